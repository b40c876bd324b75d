use crate::error::{Error, Result};

/// Smallest admissible sample component; ln of anything smaller is not
/// meaningfully representable alongside O(1) terms.
pub(crate) const MIN_COMPONENT: f64 = 1e-300;
const EXACT_SUM_TOL: f64 = 1e-12;
const RENORMALIZE_SUM_TOL: f64 = 1e-9;

/// Concentration parameters α ∈ (0, ∞)ᵈ.
#[derive(Debug, Clone, PartialEq)]
pub struct DirichletParams(Vec<f64>);

impl DirichletParams {
    pub fn new(alpha: Vec<f64>) -> Result<Self> {
        if alpha.is_empty() {
            return Err(Error::InvalidInput("parameter vector is empty".into()));
        }
        if let Some(&bad) = alpha.iter().find(|a| !(a.is_finite() && **a > 0.0)) {
            return Err(Error::domain(
                "DirichletParams::new",
                bad,
                "components must be finite and > 0",
            ));
        }
        Ok(Self(alpha))
    }

    /// α = value · 𝟙.
    pub fn constant(d: usize, value: f64) -> Result<Self> {
        Self::new(vec![value; d])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    /// ᾱ = Σ αᵢ.
    pub fn total(&self) -> f64 {
        self.0.iter().sum()
    }
}

impl AsRef<[f64]> for DirichletParams {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}

/// M observations on the open unit simplex, stored row-major, together with
/// the per-coordinate mean log ḡᵢ = (1/M) Σ_m ln z_{m,i}.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleSet {
    samples: Vec<f64>,
    m: usize,
    d: usize,
    log_geo_mean: Vec<f64>,
}

impl SampleSet {
    /// Builds a sample set from rows.
    ///
    /// Rows must have every entry in (1e-300, 1). A row whose sum is within
    /// 1e-12 of 1 is kept verbatim; within 1e-9 it is renormalized; anything
    /// else is rejected.
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let m = rows.len();
        if m == 0 {
            return Err(Error::InvalidInput("no samples".into()));
        }
        let d = rows[0].len();
        if d < 2 {
            return Err(Error::InvalidInput(format!(
                "samples need at least 2 components, got {d}"
            )));
        }
        let mut samples = Vec::with_capacity(m * d);
        for (r, mut row) in rows.into_iter().enumerate() {
            if row.len() != d {
                return Err(Error::InvalidInput(format!(
                    "row {r} has {} components, expected {d}",
                    row.len()
                )));
            }
            if let Some(&bad) = row
                .iter()
                .find(|z| !(z.is_finite() && **z > MIN_COMPONENT && **z < 1.0))
            {
                return Err(Error::InvalidInput(format!(
                    "row {r} has component {bad:?} outside the open simplex (or below 1e-300)"
                )));
            }
            let sum: f64 = row.iter().sum();
            let gap = (sum - 1.0).abs();
            if gap > RENORMALIZE_SUM_TOL {
                return Err(Error::InvalidInput(format!(
                    "row {r} sums to {sum:?}, not 1"
                )));
            }
            if gap > EXACT_SUM_TOL {
                row.iter_mut().for_each(|z| *z /= sum);
            }
            samples.extend_from_slice(&row);
        }
        Ok(Self::from_flat_unchecked(samples, m, d))
    }

    pub(crate) fn from_flat_unchecked(samples: Vec<f64>, m: usize, d: usize) -> Self {
        let mut log_geo_mean = vec![0.0; d];
        for row in samples.chunks_exact(d) {
            for (acc, z) in log_geo_mean.iter_mut().zip(row) {
                *acc += z.ln();
            }
        }
        let inv_m = 1.0 / m as f64;
        log_geo_mean.iter_mut().for_each(|g| *g *= inv_m);
        Self {
            samples,
            m,
            d,
            log_geo_mean,
        }
    }

    pub fn num_samples(&self) -> usize {
        self.m
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn row(&self, m: usize) -> &[f64] {
        &self.samples[m * self.d..(m + 1) * self.d]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.samples.chunks_exact(self.d)
    }

    /// ḡᵢ = (1/M) Σ_m ln z_{m,i}.
    pub fn log_geo_mean(&self) -> &[f64] {
        &self.log_geo_mean
    }

    /// Whether at least two samples differ. Without this the likelihood has
    /// no maximizer.
    pub fn has_distinct_rows(&self) -> bool {
        let first = self.row(0);
        self.rows().skip(1).any(|r| r != first)
    }
}

/// Per-coordinate bounds r⁻ᵢ ≤ αᵢ ≤ r⁺ᵢ with r⁻ᵢ > 0.
#[derive(Debug, Clone, PartialEq)]
pub struct BoxConstraint {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl BoxConstraint {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.len() != upper.len() {
            return Err(Error::DimensionMismatch {
                expected: lower.len(),
                got: upper.len(),
            });
        }
        for (i, (&lo, &hi)) in lower.iter().zip(&upper).enumerate() {
            if !(lo > 0.0 && lo <= hi && lo.is_finite() && !hi.is_nan()) {
                return Err(Error::InvalidInput(format!(
                    "box bounds at {i} must satisfy 0 < lower <= upper, got [{lo}, {hi}]"
                )));
            }
        }
        Ok(Self { lower, upper })
    }

    pub fn uniform(d: usize, lower: f64, upper: f64) -> Result<Self> {
        Self::new(vec![lower; d], vec![upper; d])
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dim()
            && x.iter()
                .zip(self.lower.iter().zip(&self.upper))
                .all(|(v, (lo, hi))| lo <= v && v <= hi)
    }

    pub fn bounds(&self) -> Vec<(f64, f64)> {
        self.lower.iter().copied().zip(self.upper.iter().copied()).collect()
    }

    pub(crate) fn clamp_in_place(&self, x: &mut [f64]) {
        for (v, (lo, hi)) in x.iter_mut().zip(self.lower.iter().zip(&self.upper)) {
            *v = v.clamp(*lo, *hi);
        }
    }
}
