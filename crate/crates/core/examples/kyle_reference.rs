//! Insider profit in the Kyle-Back limit, per bin and for the mixture.

use gm_bridge::kyle::kyle_profit;
use gm_bridge::{AssetDistribution, GaussianKernel, RngPolicy};

fn main() -> gm_bridge::Result<()> {
    let dist = AssetDistribution::three_point();
    let g = GaussianKernel::new(&dist);
    let policy = RngPolicy::new(3);
    let paths = 2000;
    for bin in (0..g.n_bins()).map(Some).chain([None]) {
        let (s, _) = kyle_profit(&g, &dist.probs, bin, 1e-4, 1e-4, paths, &policy.derive(&format!("{bin:?}")))?;
        let label = bin.map_or("mixture".to_string(), |b| format!("bin {}", b + 1));
        println!("{label:>8}: profit {:.4} +- {:.4}, hit rate {:.3}", s.profit_mean, s.profit_se, s.hit_rate);
    }
    Ok(())
}
