//! One-sample tests of proportions.

use statrs::distribution::{ContinuousCDF, Normal};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum StatsError {
    #[error("invalid counts: successes {successes} out of {trials}")]
    InvalidCounts { successes: u64, trials: u64 },
    #[error("null proportion must lie strictly between 0 and 1, got {0}")]
    InvalidNull(f64),
}

fn check(successes: u64, trials: u64, p0: f64) -> Result<(), StatsError> {
    if trials == 0 || successes > trials {
        return Err(StatsError::InvalidCounts { successes, trials });
    }
    if !(0.0..=1.0).contains(&p0) || p0 == 0.0 || p0 == 1.0 {
        return Err(StatsError::InvalidNull(p0));
    }
    Ok(())
}

/// One-sided z-test of an observed proportion against `p0`, without
/// continuity correction: z = (p_hat - p0) / sqrt(p0 (1 - p0) / n), and the
/// p-value is the upper normal tail.
pub fn proportion_test(successes: u64, trials: u64, p0: f64) -> Result<f64, StatsError> {
    check(successes, trials, p0)?;
    let n = trials as f64;
    let p_hat = successes as f64 / n;
    let z = (p_hat - p0) / (p0 * (1.0 - p0) / n).sqrt();
    let normal = Normal::new(0.0, 1.0).expect("standard normal");
    Ok(1.0 - normal.cdf(z))
}

/// Exact one-sided binomial tail: P(X >= successes) under Binomial(n, p0).
pub fn proportion_test_exact(successes: u64, trials: u64, p0: f64) -> Result<f64, StatsError> {
    check(successes, trials, p0)?;
    // Running product keeps each pmf term stable for the small n used here.
    let n = trials;
    let mut tail = 0.0f64;
    for k in successes..=n {
        let mut log_term = 0.0f64;
        for i in 0..k {
            log_term += ((n - i) as f64).ln() - ((i + 1) as f64).ln();
        }
        log_term += k as f64 * p0.ln() + (n - k) as f64 * (1.0 - p0).ln();
        tail += log_term.exp();
    }
    Ok(tail.min(1.0))
}
