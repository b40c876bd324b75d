use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma};

use super::types::{DirichletParams, SampleSet, MIN_COMPONENT};
use crate::error::{Error, Result};

const MAX_ATTEMPTS_PER_ROW: usize = 100;
const MAX_COMPONENT: f64 = 1.0 - 1e-15;

/// Draws `m` samples from Dir(α) by normalizing independent Gamma(αᵢ, 1)
/// variates. Rows with a component at or below 1e-300, or at or above
/// 1 − 1e-15, are redrawn. Output is a pure function of (α, m, seed).
pub fn sample(alpha: &DirichletParams, m: usize, seed: u64) -> Result<SampleSet> {
    if m < 2 {
        return Err(Error::InvalidInput(format!("need at least 2 samples, got {m}")));
    }
    let d = alpha.dim();
    if d < 2 {
        return Err(Error::InvalidInput(format!("need dimension >= 2, got {d}")));
    }
    let gammas = alpha
        .as_slice()
        .iter()
        .map(|&a| Gamma::new(a, 1.0))
        .collect::<std::result::Result<Vec<_>, _>>()
        .map_err(|e| Error::InvalidInput(format!("gamma shape: {e}")))?;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut samples = Vec::with_capacity(m * d);
    let mut row = vec![0.0; d];
    for r in 0..m {
        let mut accepted = false;
        for _ in 0..MAX_ATTEMPTS_PER_ROW {
            for (v, g) in row.iter_mut().zip(&gammas) {
                *v = g.sample(&mut rng);
            }
            let sum: f64 = row.iter().sum();
            if !(sum > 0.0 && sum.is_finite()) {
                continue;
            }
            row.iter_mut().for_each(|v| *v /= sum);
            if row.iter().all(|&z| z > MIN_COMPONENT && z < MAX_COMPONENT) {
                accepted = true;
                break;
            }
        }
        if !accepted {
            return Err(Error::InvalidInput(format!(
                "row {r}: {MAX_ATTEMPTS_PER_ROW} consecutive draws hit the simplex boundary; \
                 the concentration parameters are too small to sample in double precision"
            )));
        }
        samples.extend_from_slice(&row);
    }
    Ok(SampleSet::from_flat_unchecked(samples, m, d))
}
