use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// A scalar convex differentiable function νᵢ used as one coordinate of a
/// separable Bregman function.
pub trait ScalarKernel: fmt::Debug + Send + Sync {
    fn value(&self, t: f64) -> f64;

    fn derivative(&self, t: f64) -> f64;

    /// Membership in dom ν.
    fn in_domain(&self, t: f64) -> bool;

    /// Membership in int dom ν.
    fn in_interior(&self, t: f64) -> bool;

    /// ν(x) − ν(y) − ν'(y)(x − y). Kernels override this when the direct
    /// formula cancels badly.
    fn divergence(&self, x: f64, y: f64) -> f64 {
        self.value(x) - self.value(y) - self.derivative(y) * (x - y)
    }

    /// ν(u) − ν(v), overridden where a cancellation-free form exists.
    fn increment(&self, u: f64, v: f64) -> f64 {
        self.value(u) - self.value(v)
    }

    /// Short identifier used by closed-form solvers to recognize a kernel.
    fn name(&self) -> &'static str {
        "custom"
    }
}

/// ν(t) = −ln t on (0, ∞) (Burg entropy).
#[derive(Debug, Clone, Copy, Default)]
pub struct NegLog;

/// ln(x / y) for x, y > 0. ln1p of the relative difference near 1, a plain
/// logarithm of the ratio elsewhere (ln1p is ill-conditioned near −1).
fn ln_ratio(x: f64, y: f64) -> f64 {
    let w = (x - y) / y;
    if w.abs() <= 0.5 {
        return w.ln_1p();
    }
    let r = x / y;
    if r.is_finite() && r > 0.0 {
        r.ln()
    } else {
        x.ln() - y.ln()
    }
}

impl ScalarKernel for NegLog {
    fn value(&self, t: f64) -> f64 {
        -t.ln()
    }

    fn derivative(&self, t: f64) -> f64 {
        -1.0 / t
    }

    fn in_domain(&self, t: f64) -> bool {
        t > 0.0 && t.is_finite()
    }

    fn in_interior(&self, t: f64) -> bool {
        self.in_domain(t)
    }

    fn divergence(&self, x: f64, y: f64) -> f64 {
        // r − 1 − ln r with r = x / y
        (x - y) / y - ln_ratio(x, y)
    }

    fn increment(&self, u: f64, v: f64) -> f64 {
        -ln_ratio(u, v)
    }

    fn name(&self) -> &'static str {
        "neg-log"
    }
}

/// ν ≡ 0 on ℝ; leaves only the quadratic part of the Bregman function.
#[derive(Debug, Clone, Copy, Default)]
pub struct ZeroKernel;

impl ScalarKernel for ZeroKernel {
    fn value(&self, _t: f64) -> f64 {
        0.0
    }

    fn derivative(&self, _t: f64) -> f64 {
        0.0
    }

    fn in_domain(&self, t: f64) -> bool {
        t.is_finite()
    }

    fn in_interior(&self, t: f64) -> bool {
        t.is_finite()
    }

    fn divergence(&self, _x: f64, _y: f64) -> f64 {
        0.0
    }

    fn increment(&self, _u: f64, _v: f64) -> f64 {
        0.0
    }

    fn name(&self) -> &'static str {
        "zero"
    }
}

/// ν(t) = t ln t on [0, ∞) (Boltzmann–Shannon entropy).
#[derive(Debug, Clone, Copy, Default)]
pub struct EntropyKernel;

impl ScalarKernel for EntropyKernel {
    fn value(&self, t: f64) -> f64 {
        if t == 0.0 {
            0.0
        } else {
            t * t.ln()
        }
    }

    fn derivative(&self, t: f64) -> f64 {
        t.ln() + 1.0
    }

    fn in_domain(&self, t: f64) -> bool {
        t >= 0.0 && t.is_finite()
    }

    fn in_interior(&self, t: f64) -> bool {
        t > 0.0 && t.is_finite()
    }

    fn divergence(&self, x: f64, y: f64) -> f64 {
        if x == 0.0 {
            return y;
        }
        x * ln_ratio(x, y) - (x - y)
    }

    fn increment(&self, u: f64, v: f64) -> f64 {
        if u == 0.0 || v == 0.0 {
            return self.value(u) - self.value(v);
        }
        (u - v) * u.ln() + v * ln_ratio(u, v)
    }

    fn name(&self) -> &'static str {
        "entropy"
    }
}

#[derive(Debug, Clone)]
enum Kernels {
    Uniform(Arc<dyn ScalarKernel>),
    PerCoordinate(Vec<Arc<dyn ScalarKernel>>),
}

/// h(x) = Σ aᵢ νᵢ(xᵢ) + Σ bᵢ xᵢ²/2 with coefficients already evaluated at
/// an anchor point.
#[derive(Debug, Clone)]
pub struct SeparableBregman {
    kernels: Kernels,
    a: Vec<f64>,
    b: Vec<f64>,
}

fn validate_coefficients(a: &[f64], b: &[f64]) -> Result<()> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch {
            expected: a.len(),
            got: b.len(),
        });
    }
    for (i, (&ai, &bi)) in a.iter().zip(b).enumerate() {
        if !(ai >= 0.0 && bi >= 0.0 && ai.is_finite() && bi.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "coefficients must be finite and nonnegative, got a[{i}] = {ai}, b[{i}] = {bi}"
            )));
        }
        if ai + bi <= 0.0 {
            return Err(Error::InvalidInput(format!(
                "a[{i}] + b[{i}] must be positive for strict convexity"
            )));
        }
    }
    Ok(())
}

impl SeparableBregman {
    /// Same kernel on every coordinate.
    pub fn uniform(kernel: Arc<dyn ScalarKernel>, a: Vec<f64>, b: Vec<f64>) -> Result<Self> {
        validate_coefficients(&a, &b)?;
        Ok(Self {
            kernels: Kernels::Uniform(kernel),
            a,
            b,
        })
    }

    pub fn per_coordinate(
        kernels: Vec<Arc<dyn ScalarKernel>>,
        a: Vec<f64>,
        b: Vec<f64>,
    ) -> Result<Self> {
        validate_coefficients(&a, &b)?;
        if kernels.len() != a.len() {
            return Err(Error::DimensionMismatch {
                expected: a.len(),
                got: kernels.len(),
            });
        }
        Ok(Self {
            kernels: Kernels::PerCoordinate(kernels),
            a,
            b,
        })
    }

    /// h(x) = ‖x‖²/2 scaled coordinatewise by `b`.
    pub fn quadratic(b: Vec<f64>) -> Result<Self> {
        let a = vec![0.0; b.len()];
        Self::uniform(Arc::new(ZeroKernel), a, b)
    }

    pub fn dim(&self) -> usize {
        self.a.len()
    }

    pub fn a(&self) -> &[f64] {
        &self.a
    }

    pub fn b(&self) -> &[f64] {
        &self.b
    }

    pub fn kernel(&self, i: usize) -> &dyn ScalarKernel {
        match &self.kernels {
            Kernels::Uniform(k) => k.as_ref(),
            Kernels::PerCoordinate(ks) => ks[i].as_ref(),
        }
    }

    fn coord_in_domain(&self, i: usize, t: f64) -> bool {
        if self.a[i] == 0.0 {
            t.is_finite()
        } else {
            self.kernel(i).in_domain(t)
        }
    }

    fn coord_in_interior(&self, i: usize, t: f64) -> bool {
        if self.a[i] == 0.0 {
            t.is_finite()
        } else {
            self.kernel(i).in_interior(t)
        }
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dim() && x.iter().enumerate().all(|(i, &t)| self.coord_in_domain(i, t))
    }

    pub fn interior_contains(&self, x: &[f64]) -> bool {
        x.len() == self.dim()
            && x.iter()
                .enumerate()
                .all(|(i, &t)| self.coord_in_interior(i, t))
    }

    fn check_point(&self, x: &[f64], interior: bool, what: &'static str) -> Result<()> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: x.len(),
            });
        }
        for (i, &t) in x.iter().enumerate() {
            let ok = if interior {
                self.coord_in_interior(i, t)
            } else {
                self.coord_in_domain(i, t)
            };
            if !ok {
                return Err(Error::domain(what, t, "point outside the Bregman domain"));
            }
        }
        Ok(())
    }

    pub fn value(&self, x: &[f64]) -> Result<f64> {
        self.check_point(x, false, "SeparableBregman::value")?;
        Ok(x.iter()
            .enumerate()
            .map(|(i, &t)| {
                let nu = if self.a[i] == 0.0 {
                    0.0
                } else {
                    self.a[i] * self.kernel(i).value(t)
                };
                nu + 0.5 * self.b[i] * t * t
            })
            .sum())
    }

    pub fn gradient(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_point(x, true, "SeparableBregman::gradient")?;
        Ok(x.iter()
            .enumerate()
            .map(|(i, &t)| self.coord_gradient(i, t))
            .collect())
    }

    fn coord_gradient(&self, i: usize, t: f64) -> f64 {
        let nu = if self.a[i] == 0.0 {
            0.0
        } else {
            self.a[i] * self.kernel(i).derivative(t)
        };
        nu + self.b[i] * t
    }

    /// D_h(x, y) = h(x) − h(y) − ⟨∇h(y), x − y⟩, summed coordinatewise.
    pub fn divergence(&self, x: &[f64], y: &[f64]) -> Result<f64> {
        self.check_point(x, false, "SeparableBregman::divergence")?;
        self.check_point(y, true, "SeparableBregman::divergence")?;
        Ok(self.divergence_unchecked(x, y))
    }

    pub(crate) fn coord_derivative(&self, i: usize, t: f64) -> f64 {
        self.coord_gradient(i, t)
    }

    pub(crate) fn divergence_unchecked(&self, x: &[f64], y: &[f64]) -> f64 {
        x.iter()
            .zip(y)
            .enumerate()
            .map(|(i, (&xi, &yi))| {
                let nu = if self.a[i] == 0.0 {
                    0.0
                } else {
                    self.a[i] * self.kernel(i).divergence(xi, yi)
                };
                let d = xi - yi;
                nu + 0.5 * self.b[i] * d * d
            })
            .sum()
    }
}

/// D_h(x, y) for a separable Bregman function.
pub fn bregman_divergence(spec: &SeparableBregman, x: &[f64], y: &[f64]) -> Result<f64> {
    spec.divergence(x, y)
}

/// LHS − RHS of D(z,x) − D(z,y) − D(y,x) = ⟨∇h(x) − ∇h(y), y − z⟩.
pub fn three_points_residual(
    spec: &SeparableBregman,
    x: &[f64],
    y: &[f64],
    z: &[f64],
) -> Result<f64> {
    spec.check_point(x, true, "three_points_residual")?;
    spec.check_point(y, true, "three_points_residual")?;
    spec.check_point(z, false, "three_points_residual")?;
    let lhs = spec.divergence_unchecked(z, x)
        - spec.divergence_unchecked(z, y)
        - spec.divergence_unchecked(y, x);
    let rhs: f64 = (0..spec.dim())
        .map(|i| (spec.coord_gradient(i, x[i]) - spec.coord_gradient(i, y[i])) * (y[i] - z[i]))
        .sum();
    Ok(lhs - rhs)
}
