//! Solvers for the separable Bregman proximal subproblem
//!
//!   minimize over x:  Σᵢ gᵢ(xᵢ) + ⟨grad, x⟩ + D_h(x, y)
//!
//! with each gᵢ the indicator of an interval. The golden-section route is a
//! generic oracle; the Burg-entropy route is closed form.

use super::divergence::SeparableBregman;
use crate::error::{Error, Result};

const INV_PHI: f64 = 0.618_033_988_749_894_9;
const MAX_GOLDEN_ITERATIONS: usize = 20_000;
const MAX_BRACKET_STEPS: usize = 4_000;

/// Golden-section search on [lo, hi] driven by a difference oracle
/// `diff(u, v) = φ(u) − φ(v)` for a unimodal φ. Stops when the bracket width
/// falls below `tol` times the bracket magnitude.
pub fn golden_section_by_difference<D>(diff: D, lo: f64, hi: f64, tol: f64) -> f64
where
    D: Fn(f64, f64) -> f64,
{
    let (mut a, mut b) = (lo, hi);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    for _ in 0..MAX_GOLDEN_ITERATIONS {
        let scale = (0.5 * (a.abs() + b.abs())).max(f64::MIN_POSITIVE);
        if b - a <= tol * scale {
            break;
        }
        if diff(c, d) < 0.0 {
            b = d;
            d = c;
            c = b - INV_PHI * (b - a);
        } else {
            a = c;
            c = d;
            d = a + INV_PHI * (b - a);
        }
    }
    0.5 * (a + b)
}

/// Golden-section search on [lo, hi] for a unimodal function.
pub fn golden_section_minimize<F>(f: F, lo: f64, hi: f64, tol: f64) -> f64
where
    F: Fn(f64) -> f64,
{
    golden_section_by_difference(|u, v| f(u) - f(v), lo, hi, tol)
}

/// Solves c·x² + δ·x = 1 for its positive root with c ≥ 0.
///
/// Picks the algebraically equivalent form that avoids cancellation for
/// either sign of δ. Returns +∞ when c = 0 and δ ≤ 0 (no positive root).
pub fn positive_quadratic_root(c: f64, delta: f64) -> f64 {
    if c == 0.0 {
        return if delta > 0.0 { 1.0 / delta } else { f64::INFINITY };
    }
    let disc = delta.hypot(2.0 * c.sqrt());
    if delta >= 0.0 {
        2.0 / (delta + disc)
    } else {
        (disc - delta) / (2.0 * c)
    }
}

fn check_dims(anchor: &[f64], grad: &[f64], h: &SeparableBregman) -> Result<()> {
    for len in [grad.len(), h.dim()] {
        if len != anchor.len() {
            return Err(Error::DimensionMismatch {
                expected: anchor.len(),
                got: len,
            });
        }
    }
    Ok(())
}

fn check_bounds(bounds: Option<&[(f64, f64)]>, d: usize) -> Result<()> {
    if let Some(b) = bounds {
        if b.len() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: b.len(),
            });
        }
        if let Some((i, _)) = b.iter().enumerate().find(|(_, (lo, hi))| !(lo <= hi)) {
            return Err(Error::InvalidInput(format!("empty interval at coordinate {i}")));
        }
    }
    Ok(())
}

/// Closed-form subproblem solution for coordinates whose kernel is −ln
/// (or whose kernel weight is zero), followed by projection onto `bounds`.
pub fn neglog_quadratic_prox(
    anchor: &[f64],
    grad: &[f64],
    h: &SeparableBregman,
    bounds: Option<&[(f64, f64)]>,
) -> Result<Vec<f64>> {
    check_dims(anchor, grad, h)?;
    check_bounds(bounds, anchor.len())?;
    let (a, b) = (h.a(), h.b());
    let mut out = Vec::with_capacity(anchor.len());
    for i in 0..anchor.len() {
        let y = anchor[i];
        let x = if a[i] == 0.0 {
            y - grad[i] / b[i]
        } else {
            if h.kernel(i).name() != "neg-log" {
                return Err(Error::InvalidInput(format!(
                    "closed-form prox needs a neg-log kernel, coordinate {i} has '{}'",
                    h.kernel(i).name()
                )));
            }
            // b x² + p x − a = 0 with p = grad + a/y − b y
            let p = grad[i] + a[i] / y - b[i] * y;
            positive_quadratic_root(b[i] / a[i], p / a[i])
        };
        let x = match bounds {
            Some(bd) => x.clamp(bd[i].0, bd[i].1),
            None => x,
        };
        if !x.is_finite() {
            return Err(Error::InvalidInput(format!(
                "subproblem is unbounded below at coordinate {i}"
            )));
        }
        out.push(x);
    }
    Ok(out)
}

/// Per-coordinate golden-section solution of the subproblem. Works for any
/// kernel; used as a brute-force check of closed-form solvers.
pub fn golden_section_prox(
    anchor: &[f64],
    grad: &[f64],
    h: &SeparableBregman,
    bounds: Option<&[(f64, f64)]>,
    tol: f64,
) -> Result<Vec<f64>> {
    check_dims(anchor, grad, h)?;
    check_bounds(bounds, anchor.len())?;
    if !h.interior_contains(anchor) {
        return Err(Error::Precondition("anchor must be interior to dom h".into()));
    }
    (0..anchor.len())
        .map(|i| {
            let (lo, hi) = bounds.map_or((f64::NEG_INFINITY, f64::INFINITY), |b| b[i]);
            scalar_prox_golden(h, i, anchor[i], grad[i], lo, hi, tol)
        })
        .collect()
}

fn scalar_prox_golden(
    h: &SeparableBregman,
    i: usize,
    y: f64,
    grad: f64,
    lo: f64,
    hi: f64,
    tol: f64,
) -> Result<f64> {
    let slope0 = grad - h.coord_derivative(i, y);
    let b = h.b()[i];
    let a = h.a()[i];
    let kernel = h.kernel(i);
    // φ(u) − φ(v) for φ(x) = grad·x + D_h(x, y) restricted to coordinate i
    let diff = |u: f64, v: f64| -> f64 {
        let nu = if a == 0.0 { 0.0 } else { a * kernel.increment(u, v) };
        (u - v) * (slope0 + 0.5 * b * (u + v)) + nu
    };
    let admissible = |t: f64| t >= lo && t <= hi && (a == 0.0 || kernel.in_domain(t));

    let start = y.clamp(lo, hi);
    if !admissible(start) {
        return Err(Error::InvalidInput(format!(
            "interval [{lo}, {hi}] at coordinate {i} misses the kernel domain"
        )));
    }
    let right = expand(&diff, &admissible, start, 1.0, hi)?;
    let left = expand(&diff, &admissible, start, -1.0, lo)?;
    let x = golden_section_by_difference(&diff, left, right, tol);
    // snap to an active bound when it is at least as good
    for bound in [lo, hi] {
        if bound.is_finite() && admissible(bound) && (x - bound).abs() <= tol * bound.abs().max(1.0) {
            if diff(bound, x) <= 0.0 {
                return Ok(bound);
            }
        }
    }
    Ok(x)
}

/// Walks from `start` in direction `dir` while φ keeps decreasing and returns
/// the first point past the minimizer (or the bound / domain edge).
fn expand<D, A>(diff: &D, admissible: &A, start: f64, dir: f64, bound: f64) -> Result<f64>
where
    D: Fn(f64, f64) -> f64,
    A: Fn(f64) -> bool,
{
    let mut prev = start;
    let mut step = start.abs().max(1.0);
    for _ in 0..MAX_BRACKET_STEPS {
        let mut cand = prev + dir * step;
        if (dir > 0.0 && cand >= bound) || (dir < 0.0 && cand <= bound) {
            cand = bound;
        }
        if !admissible(cand) {
            // open domain edge: approach it geometrically
            step *= 0.5;
            if step <= f64::MIN_POSITIVE || prev + dir * step == prev {
                return Ok(prev);
            }
            continue;
        }
        if cand == prev {
            return Ok(prev);
        }
        if diff(cand, prev) >= 0.0 {
            return Ok(cand);
        }
        if cand == bound {
            return Ok(cand);
        }
        prev = cand;
        step *= 2.0;
        if !step.is_finite() {
            break;
        }
    }
    Err(Error::InvalidInput(
        "subproblem appears unbounded below; no bracket found".into(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bregman::divergence::{EntropyKernel, NegLog};
    use std::sync::Arc;

    #[test]
    fn golden_finds_parabola_vertex() {
        let x = golden_section_minimize(|t| (t - 1.234).powi(2), -10.0, 10.0, 1e-12);
        assert!((x - 1.234).abs() < 1e-10);
    }

    #[test]
    fn quadratic_root_forms_agree() {
        for &(c, d) in &[(1.0, 0.0), (0.3, 5.0), (0.3, -5.0), (1e-8, 1e4), (2.0, -1e-3)] {
            let x = positive_quadratic_root(c, d);
            assert!(x > 0.0);
            assert!((c * x * x + d * x - 1.0).abs() < 1e-12 * (1.0 + (d * x).abs()));
        }
        assert_eq!(positive_quadratic_root(1.0, 0.0), 1.0);
        assert_eq!(positive_quadratic_root(0.0, -1.0), f64::INFINITY);
    }

    #[test]
    fn closed_form_and_golden_agree() {
        let h = SeparableBregman::uniform(Arc::new(NegLog), vec![3.0, 1.0, 0.5], vec![0.8, 0.0, 2.0])
            .unwrap();
        let y = [0.7, 2.5, 11.0];
        let grad = [0.4, 0.1, -3.0];
        let exact = neglog_quadratic_prox(&y, &grad, &h, None).unwrap();
        let brute = golden_section_prox(&y, &grad, &h, None, 1e-13).unwrap();
        for (e, b) in exact.iter().zip(&brute) {
            assert!((e - b).abs() <= 1e-10 * e.abs(), "{e} vs {b}");
        }
    }

    #[test]
    fn bounds_are_respected() {
        let h = SeparableBregman::uniform(Arc::new(NegLog), vec![1.0, 1.0], vec![1.0, 1.0]).unwrap();
        let y = [0.5, 0.5];
        let grad = [-10.0, 10.0];
        let bounds = [(0.1, 1.0), (0.1, 1.0)];
        let exact = neglog_quadratic_prox(&y, &grad, &h, Some(&bounds)).unwrap();
        let brute = golden_section_prox(&y, &grad, &h, Some(&bounds), 1e-13).unwrap();
        assert_eq!(exact[0], 1.0);
        assert_eq!(brute[0], 1.0);
        assert_eq!(exact[1], 0.1);
        assert_eq!(brute[1], 0.1);
    }

    #[test]
    fn golden_handles_other_kernels() {
        // entropy kernel, b = 0: minimizer of grad·x + x ln(x/y) − x + y is y·e^{−grad}
        let h = SeparableBregman::uniform(Arc::new(EntropyKernel), vec![1.0], vec![0.0]).unwrap();
        let x = golden_section_prox(&[2.0], &[0.7], &h, None, 1e-13).unwrap();
        let want = 2.0 * (-0.7f64).exp();
        assert!((x[0] - want).abs() < 1e-10 * want);
    }

    #[test]
    fn closed_form_rejects_foreign_kernels() {
        let h = SeparableBregman::uniform(Arc::new(EntropyKernel), vec![1.0], vec![1.0]).unwrap();
        assert!(neglog_quadratic_prox(&[1.0], &[0.0], &h, None).is_err());
    }
}
