//! Standard normal helpers.

use statrs::distribution::{ContinuousCDF, Normal};
use libm::erfc;
use std::f64::consts::{FRAC_1_SQRT_2, PI};

pub fn pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * PI).sqrt()
}

pub fn cdf(x: f64) -> f64 {
    if x == f64::INFINITY {
        return 1.0;
    }
    if x == f64::NEG_INFINITY {
        return 0.0;
    }
    0.5 * erfc(-x * FRAC_1_SQRT_2)
}

/// Upper tail `1 - cdf(x)` without cancellation.
pub fn sf(x: f64) -> f64 {
    cdf(-x)
}

/// Quantile, polished with Newton steps on `cdf`.
pub fn quantile(p: f64) -> f64 {
    if p <= 0.0 {
        return f64::NEG_INFINITY;
    }
    if p >= 1.0 {
        return f64::INFINITY;
    }
    let std = Normal::standard();
    let mut x = std.inverse_cdf(p);
    for _ in 0..3 {
        let d = pdf(x);
        if d == 0.0 {
            break;
        }
        let step = if p < 0.5 {
            (cdf(x) - p) / d
        } else {
            ((1.0 - p) - sf(x)) / d
        };
        x -= step;
    }
    x
}

/// `P(lo <= X < hi)` for a standard normal `X`, using whichever tail keeps precision.
pub fn interval(lo: f64, hi: f64) -> f64 {
    if hi <= lo {
        return 0.0;
    }
    if lo >= 0.0 {
        sf(lo) - sf(hi)
    } else if hi <= 0.0 {
        cdf(hi) - cdf(lo)
    } else {
        1.0 - cdf(lo) - sf(hi)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quantile_roundtrip() {
        for &p in &[1e-10, 0.01, 0.3, 0.5, 0.55, 0.9, 0.999999] {
            let x = quantile(p);
            assert!((cdf(x) - p).abs() <= 1e-15 * p.max(1e-3), "p={p}");
        }
    }

    #[test]
    fn interval_tails() {
        assert!((interval(f64::NEG_INFINITY, f64::INFINITY) - 1.0).abs() < 1e-16);
        let far = interval(30.0, 31.0);
        assert!(far > 0.0 && far < 1e-190);
        assert_eq!(interval(1.0, 1.0), 0.0);
    }
}
