//! Loss bound against δ, written as `figure1.csv` into the directory given as argument.

use std::path::PathBuf;

use gm_bridge::convergence::{loss_convergence, Settings};
use gm_bridge::output::figure1_table;
use gm_bridge::AssetDistribution;

fn main() -> gm_bridge::Result<()> {
    let dir = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "out".into()));
    let pts = loss_convergence(&AssetDistribution::three_point(), &[0.4, 0.2, 0.1, 0.05], &Settings::new(10_000, 1))?;
    for p in &pts {
        println!("delta {:<5} mixture bound {:.5} +- {:.5}", p.delta, p.mixture.mean, p.mixture.se);
    }
    let path = dir.join("figure1.csv");
    figure1_table(&pts).write(&path, None)?;
    println!("wrote {}", path.display());
    Ok(())
}
