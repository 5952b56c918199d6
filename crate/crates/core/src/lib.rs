//! Asymptotic Glosten–Milgrom equilibrium engine.
//!
//! The asset value is quantized on the lattice `δℤ` ([`quantizer`]); the market
//! maker prices with the Skellam kernel ([`kernel`]); the insider follows the
//! bridge strategy simulated in [`sim`]; [`profit`] holds the deterministic profit
//! functionals and the loss bound; [`kyle`] is the Gaussian limit; [`convergence`]
//! runs the δ → 0 checks.

pub mod config;
pub mod convergence;
pub mod error;
pub mod kernel;
pub mod kyle;
pub mod normal;
pub mod output;
pub mod profit;
pub mod quantizer;
pub mod rng;
pub mod runner;
pub mod selftest;
pub mod sim;
pub mod skellam;
pub mod stats;

pub use error::{Error, Result};
pub use kernel::{GaussianKernel, KernelSlice, PricingKernel};
pub use quantizer::{gaussian_boundaries, quantize, AssetDistribution, Quantization, Side};
pub use rng::RngPolicy;
