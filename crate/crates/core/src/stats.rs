//! Binomial confidence intervals and tail tests.

use serde::{Deserialize, Serialize};
use statrs::distribution::{Beta, Binomial, ContinuousCDF, DiscreteCDF};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lower: f64,
    pub upper: f64,
    pub confidence: f64,
}

/// Exact two-sided Clopper–Pearson interval for `k` successes in `n` trials.
pub fn clopper_pearson(k: u64, n: u64, confidence: f64) -> Interval {
    assert!(n > 0 && k <= n, "need 0 <= k <= n, n > 0");
    let a = (1.0 - confidence) / 2.0;
    let (kf, nf) = (k as f64, n as f64);
    let lower = if k == 0 { 0.0 } else { Beta::new(kf, nf - kf + 1.0).unwrap().inverse_cdf(a) };
    let upper = if k == n { 1.0 } else { Beta::new(kf + 1.0, nf - kf).unwrap().inverse_cdf(1.0 - a) };
    Interval { lower, upper, confidence }
}

/// `P(X ≥ k)` for `X ~ Binomial(n, p)`.
pub fn binomial_upper_tail(k: u64, n: u64, p: f64) -> f64 {
    if k == 0 {
        return 1.0;
    }
    if k > n {
        return 0.0;
    }
    Binomial::new(p, n).unwrap().sf(k - 1)
}

/// One-sided test of `H0: rate ≤ p0` given `k` events in `n` trials.
///
/// Returns `true` when `H0` is not rejected at the given confidence.
pub fn rate_at_most(k: u64, n: u64, p0: f64, confidence: f64) -> bool {
    binomial_upper_tail(k, n, p0) > 1.0 - confidence
}
