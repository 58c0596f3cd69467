//! Binomial confidence intervals for acceptance-rate estimates.

use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};

/// Two-sided standard normal quantile for the given confidence level.
pub fn normal_quantile(confidence: f64) -> Result<f64> {
    if !(confidence > 0.0 && confidence < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "confidence {confidence} must lie in (0, 1)"
        )));
    }
    let std = Normal::new(0.0, 1.0).expect("standard normal");
    Ok(std.inverse_cdf(1.0 - (1.0 - confidence) / 2.0))
}

/// Wilson score interval for `accepts` successes in `trials` Bernoulli trials.
pub fn wilson_interval(accepts: u64, trials: u64, confidence: f64) -> Result<(f64, f64)> {
    if trials == 0 {
        return Err(Error::InvalidArgument("trials must be at least 1".into()));
    }
    if accepts > trials {
        return Err(Error::InvalidArgument(format!(
            "accepts {accepts} exceeds trials {trials}"
        )));
    }
    let z = normal_quantile(confidence)?;
    let n = trials as f64;
    let p = accepts as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z / denom * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    let low = if accepts == 0 { 0.0 } else { (center - half).max(0.0) };
    let high = if accepts == trials { 1.0 } else { (center + half).min(1.0) };
    Ok((low, high))
}

/// Standard error `sqrt(p (1 - p) / trials)` of a sample proportion.
pub fn proportion_stderr(p: f64, trials: u64) -> f64 {
    (p * (1.0 - p) / trials as f64).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn edge_counts() {
        let (low, high) = wilson_interval(0, 100, 0.99).unwrap();
        assert_eq!(low, 0.0);
        assert!(high > 0.0 && high < 0.1);
        let (low, high) = wilson_interval(100, 100, 0.99).unwrap();
        assert_eq!(high, 1.0);
        assert!(low > 0.9);
    }

    #[test]
    fn half_is_symmetric() {
        // Recomputed by hand: z = 2.5758293, n = 100, p = 1/2
        //   center = 0.5, half = z/(1+z²/n) * sqrt(1/400 + z²/40000)
        //          = 0.1247204
        let (low, high) = wilson_interval(50, 100, 0.99).unwrap();
        assert!(((low + high) / 2.0 - 0.5).abs() < 1e-12);
        assert!((high - 0.5 - 0.124_720_4).abs() < 1e-6, "half-width {}", high - 0.5);
        let (l95, h95) = wilson_interval(50, 100, 0.95).unwrap();
        assert!(l95 > low && h95 < high);
    }

    #[test]
    fn domain_errors() {
        assert!(wilson_interval(1, 0, 0.99).is_err());
        assert!(wilson_interval(5, 4, 0.99).is_err());
        assert!(wilson_interval(1, 4, 1.0).is_err());
    }
}
