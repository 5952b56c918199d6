//! One insider path per bin from the constructive sampler, plus its trade log.

use gm_bridge::sim::{simulate_constructive, MarketParams};
use gm_bridge::{quantize, AssetDistribution, PricingKernel, RngPolicy};

fn main() -> gm_bridge::Result<()> {
    let kernel = PricingKernel::new(quantize(&AssetDistribution::three_point(), 0.2)?);
    let params = MarketParams::new(&kernel);
    let policy = RngPolicy::new(7);
    for bin in 0..kernel.quant().n_bins() {
        let path = simulate_constructive(&params, bin, &mut policy.stream_for(bin as u64));
        println!(
            "bin {}: {} events, {} insider, terminal y = {:.2}, profit {:.4}",
            bin + 1,
            path.events.len(),
            path.insider_events(),
            path.terminal_level as f64 * kernel.delta(),
            path.realized_profit.unwrap_or(f64::NAN),
        );
        for e in path.events.iter().filter(|e| e.mark.is_insider()).take(5) {
            println!("    t={:.4} y={:+.2} {} {:+.5}", e.time, e.level_before as f64 * kernel.delta(), e.mark, e.profit);
        }
    }
    Ok(())
}
