//! `U`, `L`, the realized profit and the loss bound per bin at one δ.

use gm_bridge::profit::{l_estimate, loss_bound, mixture_bound};
use gm_bridge::sim::{simulate_conditioned, simulate_constructive, MarketParams, PathRecord};
use gm_bridge::stats::Estimate;
use gm_bridge::{quantize, AssetDistribution, PricingKernel, RngPolicy};

fn main() -> gm_bridge::Result<()> {
    let delta: f64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(0.2);
    let paths = 5000;
    let kernel = PricingKernel::new(quantize(&AssetDistribution::three_point(), delta)?);
    let params = MarketParams::new(&kernel);
    let policy = RngPolicy::new(11);
    let mut rows = Vec::new();
    for bin in 0..kernel.quant().n_bins() {
        let pa: Vec<PathRecord> = policy
            .derive(&format!("a{bin}"))
            .map_paths(paths, |_, r| simulate_conditioned(&params, bin, r))
            .into_iter()
            .collect::<gm_bridge::Result<_>>()?;
        let pb = policy.derive(&format!("b{bin}")).map_paths(paths, |_, r| simulate_constructive(&params, bin, r));
        let realized: Vec<f64> = pb.iter().filter_map(|p| p.realized_profit).collect();
        let s = loss_bound(&kernel, bin, l_estimate(&kernel, bin, &pa), Some(Estimate::from_samples(&realized)));
        let (gap, se) = s.identity_gap().unwrap_or_default();
        println!(
            "bin {}: U={:.5} L={:.5} realized={:.5} (gap {:+.5}, se {:.5}) bound={:.5}",
            bin + 1, s.u0, s.l_hat, s.realized.unwrap_or(f64::NAN), gap, se, s.loss_bound
        );
        rows.push(s);
    }
    let m = mixture_bound(kernel.quant(), &rows);
    println!("mixture loss bound {:.5} +- {:.5}", m.mean, m.se);
    Ok(())
}
