//! Profit functionals `U`, `U^S - U` and `L`, and the insider's loss bound.
//!
//! Everything is in demand units: terminal sums carry a factor `δ` and time integrals
//! the factor `δβ = 1/(2δ)`.

use serde::Serialize;

use crate::kernel::PricingKernel;
use crate::quantizer::{Quantization, Side};
use crate::sim::PathRecord;
use crate::stats::{Estimate, CompensatedSum};

/// `U(v_n, y, 1)`: profit still collectable at the terminal time from level `level`.
pub fn u_terminal(quant: &Quantization, bin: usize, level: i64) -> f64 {
    if quant.n_bins() == 1 {
        return 0.0;
    }
    let v = quant.value(bin);
    let mut s = CompensatedSum::default();
    match quant.side(bin, level) {
        Side::Buy => {
            let a = quant.lower(bin).expect("buy side has a finite lower boundary");
            for j in level..a {
                s.add(v - quant.terminal_price(j + 1));
            }
        }
        Side::Sell => {
            let b = quant.upper(bin).expect("sell side has a finite upper boundary");
            for j in b..=level {
                s.add(quant.terminal_price(j - 1) - v);
            }
        }
    }
    quant.delta() * s.value()
}

/// `U(v_n, y, t)`.
pub fn u_of(kernel: &PricingKernel, bin: usize, level: i64, t: f64) -> f64 {
    let quant = kernel.quant();
    if quant.n_bins() == 1 {
        return 0.0;
    }
    let base = match quant.side(bin, level) {
        Side::Buy => level,
        Side::Sell => level - 1,
    };
    u_terminal(quant, bin, level) + kernel.price_step_integral(base, t) / (2.0 * kernel.delta())
}

/// `U^S(0, 0) - U(0, 0) = δ (v_n - p(0, 0)) 1{0 <= ⌊m⌋}`.
pub fn us_gap(kernel: &PricingKernel, bin: usize) -> f64 {
    let quant = kernel.quant();
    if quant.n_bins() == 1 || quant.side(bin, 0) == Side::Sell {
        return 0.0;
    }
    kernel.delta() * (quant.value(bin) - kernel.price(0, 0.0))
}

/// Contribution of one path to `L`: time at `⌈m⌉` weighted by `v_n - p(⌊m⌋, r)` minus
/// time at `⌊m⌋` weighted by `v_n - p(⌈m⌉, r)`, scaled by `1/(2δ)`.
pub fn l_path(kernel: &PricingKernel, bin: usize, path: &PathRecord) -> f64 {
    let quant = kernel.quant();
    let Some((floor, ceil)) = quant.mid_levels(bin) else {
        return 0.0;
    };
    let v = quant.value(bin);
    let mut s = CompensatedSum::default();
    for (a, b, level) in path.intervals() {
        if level == ceil {
            s.add(v * (b - a) - kernel.price_integral(floor, a, b));
        } else if level == floor {
            s.add(-(v * (b - a) - kernel.price_integral(ceil, a, b)));
        }
    }
    s.value() / (2.0 * kernel.delta())
}

/// Monte Carlo estimate of `L(v_n, 0, 0)` over paths conditioned on `bin`.
/// Outer bins return exactly zero.
pub fn l_estimate(kernel: &PricingKernel, bin: usize, paths: &[PathRecord]) -> Estimate {
    if kernel.quant().mid_levels(bin).is_none() {
        return Estimate { mean: 0.0, se: 0.0, count: paths.len() };
    }
    let xs: Vec<f64> = paths.iter().map(|p| l_path(kernel, bin, p)).collect();
    Estimate::from_samples(&xs)
}

/// Per-bin profit accounting at one lattice step.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProfitSummary {
    pub delta: f64,
    pub bin: usize,
    pub u0: f64,
    pub us_gap: f64,
    pub l_hat: f64,
    pub l_se: f64,
    pub realized: Option<f64>,
    pub realized_se: Option<f64>,
    pub loss_bound: f64,
    pub paths: usize,
}

impl ProfitSummary {
    /// Standard error of the loss bound (only `L` is random).
    pub fn loss_bound_se(&self) -> f64 {
        self.l_se
    }

    /// `realized - (U - L)` and its combined standard error.
    pub fn identity_gap(&self) -> Option<(f64, f64)> {
        let r = self.realized?;
        let se = self.realized_se?;
        Some((r - (self.u0 - self.l_hat), (se * se + self.l_se * self.l_se).sqrt()))
    }
}

/// Assembles the summary `lossBound = (U^S - U) + L` for one bin.
pub fn loss_bound(kernel: &PricingKernel, bin: usize, l_hat: Estimate, realized: Option<Estimate>) -> ProfitSummary {
    let gap = us_gap(kernel, bin);
    ProfitSummary {
        delta: kernel.delta(),
        bin,
        u0: u_of(kernel, bin, 0, 0.0),
        us_gap: gap,
        l_hat: l_hat.mean,
        l_se: l_hat.se,
        realized: realized.map(|r| r.mean),
        realized_se: realized.map(|r| r.se),
        loss_bound: gap + l_hat.mean,
        paths: l_hat.count.max(realized.map_or(0, |r| r.count)),
    }
}

/// `Σ p_n^δ lossBound_n` with its standard error, bins treated as independent batches.
pub fn mixture_bound(quant: &Quantization, rows: &[ProfitSummary]) -> Estimate {
    let mut m = CompensatedSum::default();
    let mut var = 0.0;
    for r in rows {
        let w = quant.bin_probs()[r.bin];
        m.add(w * r.loss_bound);
        var += (w * r.l_se).powi(2);
    }
    Estimate { mean: m.value(), se: var.sqrt(), count: rows.iter().map(|r| r.paths).sum() }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantizer::{quantize, AssetDistribution};

    fn setup(delta: f64) -> PricingKernel {
        PricingKernel::new(quantize(&AssetDistribution::three_point(), delta).unwrap())
    }

    #[test]
    fn terminal_zero_set() {
        let k = setup(0.2);
        let q = k.quant();
        for bin in 0..3 {
            let lo = q.lower(bin).unwrap_or(-40);
            let hi = q.upper(bin).unwrap_or(40);
            for level in lo - 20..hi + 20 {
                let u = u_terminal(q, bin, level);
                assert!(u >= 0.0);
                let zero_lo = q.lower(bin).map_or(i64::MIN, |a| a - 1);
                let zero_hi = q.upper(bin).map_or(i64::MAX, |b| b + 1);
                assert_eq!(u == 0.0, level >= zero_lo && level < zero_hi, "bin={bin} level={level}");
            }
        }
    }

    #[test]
    fn terminal_two_term_sum() {
        let k = setup(1.0);
        let q = k.quant();
        let a = q.lower(1).unwrap();
        let want = q.value(1) - q.terminal_price(a - 1);
        assert_eq!(u_terminal(q, 1, a - 2), want);
    }

    #[test]
    fn mid_levels_agree() {
        let k = setup(0.5);
        let (floor, ceil) = k.quant().mid_levels(1).unwrap();
        for &t in &[0.0, 0.3, 0.9, 1.0] {
            let a = u_of(&k, 1, floor, t);
            let b = u_of(&k, 1, ceil, t);
            assert!((a - b).abs() < 1e-12, "t={t}: {a} {b}");
        }
    }

    #[test]
    fn single_value_is_trivial() {
        let q = quantize(&AssetDistribution::new(vec![2.0], vec![1.0]).unwrap(), 0.3).unwrap();
        let k = PricingKernel::new(q);
        assert_eq!(u_of(&k, 0, 4, 0.2), 0.0);
        assert_eq!(us_gap(&k, 0), 0.0);
        let s = loss_bound(&k, 0, l_estimate(&k, 0, &[]), None);
        assert_eq!(s.loss_bound, 0.0);
    }

    #[test]
    fn us_gap_cases() {
        let k = setup(0.1);
        assert_eq!(us_gap(&k, 0), 0.0);
        let want = 0.1 * (3.0 - k.price(0, 0.0));
        assert_eq!(us_gap(&k, 2), want);
        assert!((want - 0.145).abs() < 0.01);
    }
}
