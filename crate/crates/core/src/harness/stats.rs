use crate::error::{Error, Result};

/// Normal-approximation interval `p̂ ± z·√(p̂(1−p̂)/n)`, clamped to `[0, 1]`.
pub fn binomial_ci(successes: u64, trials: u64, z: f64) -> Result<(f64, f64)> {
    if trials == 0 || successes > trials {
        return Err(Error::InvalidCounts { successes, trials });
    }
    if !(z >= 0.0 && z.is_finite()) {
        return Err(Error::InvalidConfig(format!(
            "z must be finite and non-negative, got {z}"
        )));
    }
    let n = trials as f64;
    let p = successes as f64 / n;
    let half = z * (p * (1.0 - p) / n).sqrt();
    Ok(((p - half).max(0.0), (p + half).min(1.0)))
}
