use std::fmt;
use std::str::FromStr;

use crate::dirichlet::{BoxConstraint, DirichletParams};
use crate::error::{Error, Result};

/// Shape of the mean vector before normalization.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MeanFamily {
    /// mᵢ = 1.
    M1,
    /// m₁ = 10, mᵢ = 1 otherwise.
    M2,
    /// mᵢ = i.
    M3,
}

impl MeanFamily {
    pub fn as_str(self) -> &'static str {
        match self {
            MeanFamily::M1 => "m1",
            MeanFamily::M2 => "m2",
            MeanFamily::M3 => "m3",
        }
    }

    fn raw(self, d: usize) -> Vec<f64> {
        (1..=d)
            .map(|i| match self {
                MeanFamily::M1 => 1.0,
                MeanFamily::M2 => {
                    if i == 1 {
                        10.0
                    } else {
                        1.0
                    }
                }
                MeanFamily::M3 => i as f64,
            })
            .collect()
    }
}

impl fmt::Display for MeanFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for MeanFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "m1" => Ok(MeanFamily::M1),
            "m2" => Ok(MeanFamily::M2),
            "m3" => Ok(MeanFamily::M3),
            other => Err(Error::InvalidInput(format!(
                "unknown mean family '{other}' (expected m1, m2 or m3)"
            ))),
        }
    }
}

/// Parses a scale given as `s1`/`s2`/`s3` (100, 10, 1) or as a positive number.
pub fn parse_scale(s: &str) -> Result<f64> {
    let v = match s.trim() {
        "s1" => 100.0,
        "s2" => 10.0,
        "s3" => 1.0,
        other => other
            .parse::<f64>()
            .map_err(|_| Error::InvalidInput(format!("bad scale '{other}'")))?,
    };
    if !(v > 0.0 && v.is_finite()) {
        return Err(Error::InvalidInput(format!("scale must be > 0, got {v}")));
    }
    Ok(v)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SolverKind {
    Vbmm,
    Bmm,
    Newton,
    Minka,
}

impl SolverKind {
    pub const ALL: [SolverKind; 4] = [
        SolverKind::Vbmm,
        SolverKind::Bmm,
        SolverKind::Newton,
        SolverKind::Minka,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            SolverKind::Vbmm => "vbmm",
            SolverKind::Bmm => "bmm",
            SolverKind::Newton => "newton",
            SolverKind::Minka => "minka",
        }
    }

    pub fn supports_box(self) -> bool {
        matches!(self, SolverKind::Vbmm | SolverKind::Bmm)
    }
}

impl fmt::Display for SolverKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SolverKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "vbmm" => Ok(SolverKind::Vbmm),
            "bmm" => Ok(SolverKind::Bmm),
            "newton" => Ok(SolverKind::Newton),
            "minka" | "fixed-point" => Ok(SolverKind::Minka),
            other => Err(Error::InvalidInput(format!(
                "unknown solver '{other}' (expected vbmm, bmm, newton or minka)"
            ))),
        }
    }
}

/// One cell of the synthetic benchmark grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub family: MeanFamily,
    pub scale: f64,
    pub d: usize,
    pub num_samples: usize,
    pub repetitions: usize,
    pub base_seed: u64,
    pub solvers: Vec<SolverKind>,
    /// Relative-change tolerance of the MM solvers; gradient-norm tolerance
    /// for Newton.
    pub tol: f64,
    pub max_iterations: usize,
    pub box_bounds: Option<(f64, f64)>,
}

impl Default for ExperimentSpec {
    fn default() -> Self {
        Self {
            family: MeanFamily::M1,
            scale: 100.0,
            d: 50,
            num_samples: 100,
            repetitions: 20,
            base_seed: 0,
            solvers: SolverKind::ALL.to_vec(),
            tol: 1e-10,
            max_iterations: 10_000,
            box_bounds: None,
        }
    }
}

impl ExperimentSpec {
    pub fn validate(&self) -> Result<()> {
        if self.d < 2 || self.num_samples < 2 {
            return Err(Error::InvalidInput(format!(
                "need d >= 2 and M >= 2, got d={} M={}",
                self.d, self.num_samples
            )));
        }
        if self.repetitions == 0 || self.max_iterations == 0 {
            return Err(Error::InvalidInput("reps and max_iter must be positive".into()));
        }
        if !(self.scale > 0.0 && self.scale.is_finite()) {
            return Err(Error::InvalidInput(format!("bad scale {}", self.scale)));
        }
        if !(self.tol > 0.0) {
            return Err(Error::InvalidInput(format!("bad tolerance {}", self.tol)));
        }
        if self.solvers.is_empty() {
            return Err(Error::InvalidInput("empty solver roster".into()));
        }
        if let Some((lo, hi)) = self.box_bounds {
            BoxConstraint::uniform(self.d, lo, hi)?;
            if let Some(s) = self.solvers.iter().find(|s| !s.supports_box()) {
                return Err(Error::InvalidInput(format!(
                    "solver '{s}' cannot run on a box-constrained experiment"
                )));
            }
        }
        Ok(())
    }

    /// Identifier used in file names and the `experiment` column.
    pub fn id(&self) -> String {
        let mut id = format!(
            "{}-s{}-d{}-M{}",
            self.family, self.scale, self.d, self.num_samples
        );
        if let Some((lo, hi)) = self.box_bounds {
            id.push_str(&format!("-box{lo:e}_{hi:e}"));
        }
        id
    }

    pub fn box_constraint(&self) -> Result<Option<BoxConstraint>> {
        self.box_bounds
            .map(|(lo, hi)| BoxConstraint::uniform(self.d, lo, hi))
            .transpose()
    }
}

/// α_true = s · m / Σm.
pub fn build_alpha_true(spec: &ExperimentSpec) -> Result<DirichletParams> {
    let raw = spec.family.raw(spec.d);
    let total: f64 = raw.iter().sum();
    DirichletParams::new(raw.iter().map(|m| spec.scale * m / total).collect())
}

fn list<T>(value: &str, parse: impl Fn(&str) -> Result<T>) -> Result<Vec<T>> {
    value
        .split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| parse(s.trim()))
        .collect()
}

fn parse_num<T: FromStr>(key: &str) -> impl Fn(&str) -> Result<T> + '_ {
    move |s| {
        s.parse::<T>()
            .map_err(|_| Error::InvalidInput(format!("{key}: cannot parse '{s}'")))
    }
}

/// Parses a flat `key = value` configuration into the grid it describes.
///
/// `family`, `scale`, `d` and `M` accept comma-separated lists; the grid is
/// their Cartesian product in that nesting order. Lines starting with `#`
/// are comments. Unset keys keep the defaults of [`ExperimentSpec`].
pub fn parse_spec(text: &str) -> Result<Vec<ExperimentSpec>> {
    let mut base = ExperimentSpec::default();
    let mut families = vec![base.family];
    let mut scales = vec![base.scale];
    let mut dims = vec![base.d];
    let mut sizes = vec![base.num_samples];
    let (mut box_lo, mut box_hi) = (None, None);
    let mut roster_given = false;

    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| Error::Parse {
            location: format!("line {}", lineno + 1),
            message: format!("expected key=value, got '{line}'"),
        })?;
        let (key, value) = (key.trim(), value.trim().trim_matches('"'));
        let at = |e: Error| Error::Parse {
            location: format!("line {}", lineno + 1),
            message: e.to_string(),
        };
        match key {
            "family" => families = list(value, str::parse::<MeanFamily>).map_err(at)?,
            "scale" => scales = list(value, parse_scale).map_err(at)?,
            "d" => dims = list(value, parse_num::<usize>("d")).map_err(at)?,
            "M" => sizes = list(value, parse_num::<usize>("M")).map_err(at)?,
            "reps" => base.repetitions = parse_num("reps")(value).map_err(at)?,
            "seed" => base.base_seed = parse_num("seed")(value).map_err(at)?,
            "solvers" => {
                base.solvers = list(value, str::parse::<SolverKind>).map_err(at)?;
                roster_given = true;
            }
            "tol" => base.tol = parse_num("tol")(value).map_err(at)?,
            "max_iter" => base.max_iterations = parse_num("max_iter")(value).map_err(at)?,
            "box_lo" => box_lo = Some(parse_num::<f64>("box_lo")(value).map_err(at)?),
            "box_hi" => box_hi = Some(parse_num::<f64>("box_hi")(value).map_err(at)?),
            other => {
                return Err(Error::Parse {
                    location: format!("line {}", lineno + 1),
                    message: format!("unknown key '{other}'"),
                })
            }
        }
    }
    base.box_bounds = match (box_lo, box_hi) {
        (Some(lo), Some(hi)) => Some((lo, hi)),
        (None, None) => None,
        _ => {
            return Err(Error::InvalidInput(
                "box_lo and box_hi must be given together".into(),
            ))
        }
    };
    // the default roster shrinks to the box-capable solvers; an explicit
    // one is checked by validate()
    if base.box_bounds.is_some() && !roster_given {
        base.solvers.retain(|s| s.supports_box());
    }

    let mut grid = Vec::new();
    for &family in &families {
        for &scale in &scales {
            for &d in &dims {
                for &num_samples in &sizes {
                    let spec = ExperimentSpec {
                        family,
                        scale,
                        d,
                        num_samples,
                        ..base.clone()
                    };
                    spec.validate()?;
                    grid.push(spec);
                }
            }
        }
    }
    Ok(grid)
}
