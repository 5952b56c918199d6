//! Invariant groups checked by `gm-bridge selftest` on a coarse lattice.

use serde::Serialize;

use crate::error::Result;
use crate::kernel::{GaussianKernel, PricingKernel};
use crate::kyle::kyle_profit;
use crate::profit::{l_estimate, loss_bound};
use crate::quantizer::{quantize, AssetDistribution};
use crate::rng::RngPolicy;
use crate::sim::{simulate_conditioned, simulate_constructive, simulate_unconditioned, Diagnostics, MarketParams};
use crate::skellam::SkellamTable;
use crate::stats::{chi_square_gof, compensated_sum, Estimate};

pub const SELFTEST_DELTA: f64 = 0.5;
pub const SELFTEST_PATHS: usize = 1000;
/// Monte Carlo checks accept deviations up to this many standard errors.
const Z: f64 = 4.5;
/// χ² checks fail below this p-value.
const P_MIN: f64 = 1e-4;

#[derive(Debug, Clone, Serialize)]
pub struct Group {
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub delta: f64,
    pub paths: usize,
    pub seed: u64,
    pub pass: bool,
    pub groups: Vec<Group>,
}

fn group(name: &'static str, failures: Vec<String>, ok: String) -> Group {
    if failures.is_empty() {
        Group { name, pass: true, detail: ok }
    } else {
        Group { name, pass: false, detail: failures.join("; ") }
    }
}

pub fn run(dist: &AssetDistribution, seed: u64) -> Result<Report> {
    let quant = quantize(dist, SELFTEST_DELTA)?;
    let kernel = PricingKernel::with_grid(quant, 512);
    let policy = RngPolicy::new(seed).derive("selftest");
    let groups = vec![
        skellam_group(),
        quantizer_group(&kernel),
        kernel_group(&kernel),
        noise_group(&kernel, &policy),
        profit_group(&kernel, &policy),
        kyle_group(dist, &policy)?,
        determinism_group(&kernel, &policy),
    ];
    Ok(Report {
        delta: SELFTEST_DELTA,
        paths: SELFTEST_PATHS,
        seed,
        pass: groups.iter().all(|g| g.pass),
        groups,
    })
}

fn skellam_group() -> Group {
    let mut bad = Vec::new();
    for mu in [0.0, 0.3, 2.0, 50.0] {
        let t = SkellamTable::new(mu, 200);
        let mass = t.pmf(0) + 2.0 * compensated_sum(&(1..=200).map(|k| t.pmf(k)).collect::<Vec<_>>());
        if (mass - 1.0).abs() > 1e-12 {
            bad.push(format!("mass {mass} at mu {mu}"));
        }
        if (t.cdf(-1) + t.tail(0) - 1.0).abs() > 1e-14 {
            bad.push(format!("cdf/tail mismatch at mu {mu}"));
        }
    }
    group("skellam", bad, "pmf mass and tail complement".into())
}

fn quantizer_group(k: &PricingKernel) -> Group {
    let q = k.quant();
    let mut bad = Vec::new();
    let mass: f64 = q.bin_probs().iter().sum();
    if (mass - 1.0).abs() > 1e-12 {
        bad.push(format!("bin mass {mass}"));
    }
    if q.cuts().windows(2).any(|w| w[0] >= w[1]) {
        bad.push(format!("cuts not increasing {:?}", q.cuts()));
    }
    if q.cuts().windows(2).any(|w| (w[0] + w[1]) % 2 != 0) {
        bad.push(format!("interior bin with odd width {:?}", q.cuts()));
    }
    group("quantizer", bad, format!("cuts {:?}", q.cuts()))
}

fn kernel_group(k: &PricingKernel) -> Group {
    let q = k.quant();
    let mut bad = Vec::new();
    for t in [0.0, 0.3, 0.77, 0.999, 1.0] {
        let s = k.slice(t);
        for level in -12..=12 {
            let h = s.h_all(level);
            let sum: f64 = h.iter().sum();
            if (sum - 1.0).abs() > 1e-12 {
                bad.push(format!("h sums to {sum} at ({level}, {t})"));
            }
        }
    }
    for level in -6..=6 {
        let s = k.slice(1.0);
        let b = q.bin_of(level);
        if s.h(b, level) != 1.0 {
            bad.push(format!("terminal h not an indicator at {level}"));
        }
    }
    let mean: f64 = q.values().iter().zip(q.bin_probs()).map(|(v, p)| v * p).sum();
    if (k.price(0, 0.0) - mean).abs() > 1e-12 {
        bad.push(format!("p(0,0) = {} but mean is {mean}", k.price(0, 0.0)));
    }
    group("kernel", bad, "partition of unity, terminal indicator, initial price".into())
}

fn noise_group(k: &PricingKernel, policy: &RngPolicy) -> Group {
    let q = k.quant();
    let params = MarketParams::new(k);
    let mut bad = Vec::new();
    let paths = policy.derive("noise").map_paths(SELFTEST_PATHS, |_, r| simulate_unconditioned(&params, r));
    let mut counts = vec![0u64; q.n_bins()];
    for p in &paths {
        counts[q.bin_of(p.terminal_level)] += 1;
    }
    let chi = chi_square_gof(&counts, q.bin_probs());
    if chi.p_value < P_MIN {
        bad.push(format!("terminal bins chi2 p = {:.2e}", chi.p_value));
    }
    let gap: Vec<f64> = paths
        .iter()
        .map(|p| 2.0 * p.occupation_until(0, 1.0) / (2.0 * q.delta()) - q.delta() * p.terminal_level.abs() as f64)
        .collect();
    let g = Estimate::from_samples(&gap);
    if g.mean.abs() > Z * g.se.max(1e-12) {
        bad.push(format!("occupation identity off by {:.4} ({:.4} se)", g.mean, g.se));
    }
    for bin in 0..q.n_bins() {
        let cond = policy.derive(&format!("noise/{bin}")).map_paths(SELFTEST_PATHS / 4, |_, r| simulate_conditioned(&params, bin, r));
        match cond.iter().position(|p| p.as_ref().map_or(true, |p| !q.contains(bin, p.terminal_level))) {
            Some(i) => bad.push(format!("conditioned path {i} of bin {bin} misses its bin")),
            None => {}
        }
    }
    group("noise", bad, format!("chi2 p = {:.3}, identity {:.4} +- {:.4}", chi.p_value, g.mean, g.se))
}

fn profit_group(k: &PricingKernel, policy: &RngPolicy) -> Group {
    let q = k.quant();
    let params = MarketParams::new(k);
    let mut bad = Vec::new();
    let mut diag = Diagnostics::default();
    for bin in 0..q.n_bins() {
        let pa: Vec<_> = policy
            .derive(&format!("profit/a/{bin}"))
            .map_paths(SELFTEST_PATHS, |_, r| simulate_conditioned(&params, bin, r))
            .into_iter()
            .filter_map(|p| p.ok())
            .collect();
        let pb = policy.derive(&format!("profit/b/{bin}")).map_paths(SELFTEST_PATHS, |_, r| simulate_constructive(&params, bin, r));
        pb.iter().for_each(|p| diag.record(p));
        let realized: Vec<f64> = pb.iter().filter_map(|p| p.realized_profit).collect();
        let s = loss_bound(k, bin, l_estimate(k, bin, &pa), Some(Estimate::from_samples(&realized)));
        if let Some((gap, se)) = s.identity_gap() {
            if gap.abs() > Z * se.max(1e-12) {
                bad.push(format!("bin {}: realized - (U - L) = {gap:.4} ({se:.4} se)", bin + 1));
            }
        }
        if s.us_gap < 0.0 || s.l_hat < -Z * s.l_se {
            bad.push(format!("bin {}: negative loss component", bin + 1));
        }
    }
    if diag.runaway_rate() > 0.01 {
        bad.push(format!("runaway rate {}", diag.runaway_rate()));
    }
    if diag.hit_rate() < 0.99 {
        bad.push(format!("hit rate {}", diag.hit_rate()));
    }
    group("profit", bad, format!("hit rate {:.4}", diag.hit_rate()))
}

fn kyle_group(dist: &AssetDistribution, policy: &RngPolicy) -> Result<Group> {
    let g = GaussianKernel::new(dist);
    let mut bad = Vec::new();
    for bin in 0..g.n_bins() {
        let (s, _) = kyle_profit(&g, &dist.probs, Some(bin), 1e-3, 1e-4, SELFTEST_PATHS / 4, &policy.derive(&format!("kyle/{bin}")))?;
        if s.hit_rate < 0.95 {
            bad.push(format!("bin {}: hit rate {}", bin + 1, s.hit_rate));
        }
        if s.profit_mean < -Z * s.profit_se {
            bad.push(format!("bin {}: negative profit {}", bin + 1, s.profit_mean));
        }
    }
    Ok(group("kyle", bad, "hit rates and profit signs".into()))
}

fn determinism_group(k: &PricingKernel, policy: &RngPolicy) -> Group {
    let params = MarketParams::new(k);
    let run = || policy.derive("repeat").map_paths(64, |_, r| simulate_constructive(&params, 0, r));
    let same = run() == run();
    group("determinism", if same { vec![] } else { vec!["repeat differs".into()] }, "repeat identical".into())
}
