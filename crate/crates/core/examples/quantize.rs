//! Lattice quantization of the three-point example as δ shrinks.

use gm_bridge::{gaussian_boundaries, quantize, AssetDistribution};

fn main() -> gm_bridge::Result<()> {
    let dist = AssetDistribution::three_point();
    println!("gaussian boundaries: {:?}", gaussian_boundaries(&dist));
    for delta in [0.5, 0.2, 0.1, 0.05, 0.01] {
        let q = quantize(&dist, delta)?;
        println!("delta {delta:<5} cuts {:?} bounds {:?} probs {:?}", q.cuts(), q.boundaries(), q.bin_probs());
    }
    // a single point mass has no boundaries at all
    let q = quantize(&AssetDistribution::new(vec![1.0], vec![1.0])?, 0.1)?;
    println!("{}", q.to_json());
    Ok(())
}
