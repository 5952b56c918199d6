//! δ → 0 experiments: occupation times, loss bounds and demand marginals.

use serde::Serialize;

use crate::error::Result;
use crate::kernel::{GaussianKernel, PricingKernel};
use crate::kyle::{brownian_local_time_mean, simulate_kyle};
use crate::profit::{l_estimate, loss_bound, mixture_bound, ProfitSummary};
use crate::quantizer::{quantize, AssetDistribution};
use crate::rng::RngPolicy;
use crate::sim::{simulate_conditioned, simulate_unconditioned, MarketParams, PathRecord};
use crate::stats::{ks_critical, ks_p_value, ks_statistic, Estimate};

/// Shared Monte Carlo settings of the experiments.
#[derive(Debug, Clone, Copy)]
pub struct Settings {
    pub paths: usize,
    pub end_epsilon: f64,
    pub max_events: usize,
    pub grid: usize,
    pub policy: RngPolicy,
}

impl Settings {
    pub fn new(paths: usize, seed: u64) -> Self {
        Settings {
            paths,
            end_epsilon: crate::sim::DEFAULT_END_EPSILON,
            max_events: crate::sim::DEFAULT_MAX_EVENTS,
            grid: crate::kernel::DEFAULT_GRID,
            policy: RngPolicy::new(seed),
        }
    }

    fn params<'k>(&self, kernel: &'k PricingKernel) -> MarketParams<'k> {
        MarketParams::new(kernel).with_end_epsilon(self.end_epsilon).with_max_events(self.max_events)
    }
}

fn delta_label(prefix: &str, delta: f64) -> String {
    format!("{prefix}/{delta:e}")
}

/// Which occupation is measured.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Conditioning {
    /// Noise paths, level 0, compared against Brownian local time.
    Unconditioned,
    /// Paths conditioned on an interior bin, at both mid levels.
    Bin(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OccupationRow {
    pub delta: f64,
    /// Zero-based bin, `None` for unconditioned paths.
    pub bin: Option<usize>,
    pub level: f64,
    pub t: f64,
    /// `E[𝓛^{δ,y}_t]`, time at `y` divided by `2δ`.
    pub occupation: f64,
    pub occupation_se: f64,
    /// `E[2𝓛^{δ,0}_t - |Y_t|]`, zero exactly at every δ (level 0, unconditioned only).
    pub identity_gap: f64,
    pub identity_se: f64,
    /// Brownian local time mean at `level` (unconditioned only, otherwise NaN).
    pub reference: f64,
    pub paths: usize,
}

pub fn occupation_convergence(
    dist: &AssetDistribution,
    deltas: &[f64],
    conditioning: Conditioning,
    t: f64,
    settings: &Settings,
) -> Result<Vec<OccupationRow>> {
    let mut rows = Vec::new();
    for &delta in deltas {
        let kernel = PricingKernel::with_grid(quantize(dist, delta)?, settings.grid);
        let params = settings.params(&kernel);
        let policy = settings.policy.derive(&delta_label("occupation", delta));
        match conditioning {
            Conditioning::Unconditioned => {
                let pairs: Vec<(f64, f64)> = policy.map_paths(settings.paths, |_, rng| {
                    let p = simulate_unconditioned(&params, rng);
                    let occ = p.occupation_until(0, t) / (2.0 * delta);
                    let y = delta * p.level_at(t) as f64;
                    (occ, 2.0 * occ - y.abs())
                });
                let occ = Estimate::from_samples(&pairs.iter().map(|p| p.0).collect::<Vec<_>>());
                let gap = Estimate::from_samples(&pairs.iter().map(|p| p.1).collect::<Vec<_>>());
                rows.push(OccupationRow {
                    delta,
                    bin: None,
                    level: 0.0,
                    t,
                    occupation: occ.mean,
                    occupation_se: occ.se,
                    identity_gap: gap.mean,
                    identity_se: gap.se,
                    reference: brownian_local_time_mean(0.0, t),
                    paths: settings.paths,
                });
            }
            Conditioning::Bin(bin) => {
                let Some((floor, ceil)) = kernel.quant().mid_levels(bin) else {
                    continue;
                };
                let paths: Vec<PathRecord> = policy
                    .map_paths(settings.paths, |_, rng| simulate_conditioned(&params, bin, rng))
                    .into_iter()
                    .collect::<Result<_>>()?;
                for level in [floor, ceil] {
                    let xs: Vec<f64> = paths.iter().map(|p| p.occupation_until(level, t) / (2.0 * delta)).collect();
                    let occ = Estimate::from_samples(&xs);
                    rows.push(OccupationRow {
                        delta,
                        bin: Some(bin),
                        level: level as f64 * delta,
                        t,
                        occupation: occ.mean,
                        occupation_se: occ.se,
                        identity_gap: f64::NAN,
                        identity_se: f64::NAN,
                        reference: f64::NAN,
                        paths: settings.paths,
                    });
                }
            }
        }
    }
    Ok(rows)
}

/// Loss bounds at one δ: per-bin summaries and the `p_n^δ`-weighted mixture.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LossPoint {
    pub delta: f64,
    pub bins: Vec<ProfitSummary>,
    pub mixture: Estimate,
}

/// Loss bound per bin at each δ; `L` comes from rejection-sampled paths.
pub fn loss_convergence(dist: &AssetDistribution, deltas: &[f64], settings: &Settings) -> Result<Vec<LossPoint>> {
    let mut out = Vec::new();
    for &delta in deltas {
        let kernel = PricingKernel::with_grid(quantize(dist, delta)?, settings.grid);
        out.push(loss_point(&kernel, settings)?);
    }
    Ok(out)
}

pub fn loss_point(kernel: &PricingKernel, settings: &Settings) -> Result<LossPoint> {
    let quant = kernel.quant();
    let delta = quant.delta();
    let params = settings.params(kernel);
    let mut bins = Vec::new();
    for bin in 0..quant.n_bins() {
        let l = if quant.mid_levels(bin).is_some() {
            let policy = settings.policy.derive(&format!("loss/{delta:e}/{bin}"));
            let paths: Vec<PathRecord> = policy
                .map_paths(settings.paths, |_, rng| simulate_conditioned(&params, bin, rng))
                .into_iter()
                .collect::<Result<_>>()?;
            l_estimate(kernel, bin, &paths)
        } else {
            Estimate { mean: 0.0, se: 0.0, count: settings.paths }
        };
        bins.push(loss_bound(kernel, bin, l, None));
    }
    let mixture = mixture_bound(quant, &bins);
    Ok(LossPoint { delta, bins, mixture })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KsRow {
    pub delta: f64,
    pub bin: usize,
    pub t: f64,
    pub statistic: f64,
    /// 1% critical value of the two-sample statistic.
    pub critical: f64,
    pub p_value: f64,
    pub paths: usize,
}

/// Two-sample KS distance between `Y^δ_t` (rejection sampling) and `Y^0_t` (Euler paths of
/// the Kyle–Back demand) given `bin`, at each time of `times`.
pub fn strategy_convergence(
    dist: &AssetDistribution,
    deltas: &[f64],
    bin: usize,
    times: &[f64],
    dt: f64,
    settings: &Settings,
) -> Result<Vec<KsRow>> {
    let g = GaussianKernel::new(dist);
    let policy = settings.policy.derive(&format!("kyle-marginals/{bin}"));
    let kyle: Vec<Vec<f64>> = policy
        .map_paths(settings.paths, |_, rng| simulate_kyle(&g, bin, dt, settings.end_epsilon, false, times, rng))
        .into_iter()
        .map(|r| r.map(|p| p.observed))
        .collect::<Result<_>>()?;
    let mut rows = Vec::new();
    for &delta in deltas {
        let kernel = PricingKernel::with_grid(quantize(dist, delta)?, settings.grid);
        let params = settings.params(&kernel);
        let policy = settings.policy.derive(&format!("marginals/{delta:e}/{bin}"));
        let paths: Vec<PathRecord> = policy
            .map_paths(settings.paths, |_, rng| simulate_conditioned(&params, bin, rng))
            .into_iter()
            .collect::<Result<_>>()?;
        for (k, &t) in times.iter().enumerate() {
            let a: Vec<f64> = paths.iter().map(|p| delta * p.level_at(t) as f64).collect();
            let b: Vec<f64> = kyle.iter().map(|o| o[k]).collect();
            let d = ks_statistic(&a, &b);
            rows.push(KsRow {
                delta,
                bin,
                t,
                statistic: d,
                critical: ks_critical(a.len(), b.len(), 0.01),
                p_value: ks_p_value(d, a.len(), b.len()),
                paths: a.len(),
            });
        }
    }
    Ok(rows)
}
