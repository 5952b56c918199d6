//! The market maker's price and the bin likelihoods on a few lattice levels.

use gm_bridge::{quantize, AssetDistribution, GaussianKernel, PricingKernel};

fn main() -> gm_bridge::Result<()> {
    let dist = AssetDistribution::three_point();
    let delta = 0.2;
    let kernel = PricingKernel::new(quantize(&dist, delta)?);
    let gauss = GaussianKernel::new(&dist);
    println!("{:>6} {:>5} {:>10} {:>10}  h_n", "y", "t", "p_delta", "p_0");
    for t in [0.0, 0.5, 0.9] {
        let slice = kernel.slice(t);
        for level in (-5..=10).step_by(3) {
            let y = level as f64 * delta;
            let h: Vec<String> = slice.h_all(level).iter().map(|x| format!("{x:.4}")).collect();
            println!("{y:>6.2} {t:>5.2} {:>10.6} {:>10.6}  [{}]", slice.price(level), gauss.price(y, t), h.join(", "));
        }
    }
    Ok(())
}
