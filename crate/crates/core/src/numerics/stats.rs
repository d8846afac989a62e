use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};

/// Two-sided confidence interval for a probability.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConfidenceInterval {
    pub low: f64,
    pub high: f64,
    pub level: f64,
}

impl ConfidenceInterval {
    pub fn contains(&self, p: f64) -> bool {
        self.low <= p && p <= self.high
    }

    pub fn width(&self) -> f64 {
        self.high - self.low
    }
}

/// Standard normal quantile.
pub fn normal_quantile(p: f64) -> f64 {
    Normal::standard().inverse_cdf(p)
}

/// Wilson score interval for `errors` successes out of `trials`.
pub fn binomial_ci(errors: u64, trials: u64, level: f64) -> Result<ConfidenceInterval> {
    if trials == 0 {
        return Err(Error::invalid("binomial interval needs at least one trial"));
    }
    if errors > trials {
        return Err(Error::invalid(format!(
            "errors ({errors}) exceed trials ({trials})"
        )));
    }
    if !(level > 0.0 && level < 1.0) {
        return Err(Error::invalid(format!(
            "confidence level must lie in (0, 1), got {level}"
        )));
    }

    let n = trials as f64;
    let p = errors as f64 / n;
    let z = normal_quantile(0.5 + 0.5 * level);
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;

    let low = if errors == 0 { 0.0 } else { (center - half).max(0.0) };
    let high = if errors == trials { 1.0 } else { (center + half).min(1.0) };
    Ok(ConfidenceInterval { low, high, level })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::RngStream;
    use rand::Rng;
    use statrs::distribution::Beta;

    /// Exact (Clopper–Pearson) interval, used as an independent reference.
    fn clopper_pearson(k: u64, n: u64, level: f64) -> (f64, f64) {
        let alpha = 1.0 - level;
        let low = if k == 0 {
            0.0
        } else {
            Beta::new(k as f64, (n - k + 1) as f64)
                .unwrap()
                .inverse_cdf(alpha / 2.0)
        };
        let high = if k == n {
            1.0
        } else {
            Beta::new((k + 1) as f64, (n - k) as f64)
                .unwrap()
                .inverse_cdf(1.0 - alpha / 2.0)
        };
        (low, high)
    }

    #[test]
    fn zero_errors() {
        let ci = binomial_ci(0, 1_000_000, 0.95).unwrap();
        assert_eq!(ci.low, 0.0);
        assert!(ci.high <= 4e-6, "{ci:?}");
        let (_, cp_high) = clopper_pearson(0, 1_000_000, 0.95);
        assert!(cp_high < 4e-6);
        assert!((ci.high - cp_high).abs() < 0.05 * cp_high, "{} vs {cp_high}", ci.high);
    }

    #[test]
    fn all_errors() {
        for n in [1, 7, 1000] {
            let ci = binomial_ci(n, n, 0.95).unwrap();
            assert_eq!(ci.high, 1.0);
            assert!(ci.low < 1.0);
        }
    }

    #[test]
    fn half_errors() {
        let ci = binomial_ci(500, 1000, 0.95).unwrap();
        assert!((0.5 * (ci.low + ci.high) - 0.5).abs() < 1e-12);
        let (cp_low, cp_high) = clopper_pearson(500, 1000, 0.95);
        assert!((ci.width() - 0.062).abs() < 0.001, "width {}", ci.width());
        assert!((ci.width() - (cp_high - cp_low)).abs() < 0.002);
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(binomial_ci(0, 0, 0.95).is_err());
        assert!(binomial_ci(3, 2, 0.95).is_err());
        assert!(binomial_ci(1, 2, 1.0).is_err());
    }

    #[test]
    fn coverage_near_nominal() {
        let p = 0.3;
        let n = 1000;
        let experiments = 10_000;
        let mut rng = RngStream::new(11, 0);
        let covered = (0..experiments)
            .filter(|_| {
                let k = (0..n).filter(|_| rng.random::<f64>() < p).count() as u64;
                binomial_ci(k, n, 0.95).unwrap().contains(p)
            })
            .count();
        let rate = covered as f64 / experiments as f64;
        assert!((0.94..=0.96).contains(&rate), "coverage {rate}");
    }
}
