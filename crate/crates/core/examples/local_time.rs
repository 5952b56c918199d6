//! Scaled occupation time at level 0 against Brownian local time.

use gm_bridge::convergence::{occupation_convergence, Conditioning, Settings};
use gm_bridge::AssetDistribution;

fn main() -> gm_bridge::Result<()> {
    let rows = occupation_convergence(
        &AssetDistribution::three_point(),
        &[0.4, 0.2, 0.1, 0.05],
        Conditioning::Unconditioned,
        1.0,
        &Settings::new(20_000, 5),
    )?;
    for r in rows {
        println!(
            "delta {:<5} E[L] = {:.4} +- {:.4} (limit {:.4}), E[2L - |Y|] = {:+.4} +- {:.4}",
            r.delta, r.occupation, r.occupation_se, r.reference, r.identity_gap, r.identity_se
        );
    }
    Ok(())
}
