//! Equilibrium demand paths.
//!
//! Two samplers share [`PathRecord`]: [`simulate_conditioned`] draws the noise walk
//! conditioned on its terminal bin by rejection, and [`simulate_constructive`] builds
//! the insider's orders explicitly and books the realized profit.

mod conditioned;
mod constructive;
mod path;

pub use conditioned::{simulate_conditioned, simulate_unconditioned, MAX_PROPOSALS};
pub use constructive::{insider_intensities, simulate_constructive, thinning_majorant, Intensities};
pub use path::{Event, Mark, Occupation, PathFlags, PathRecord};

use crate::error::{Error, Result};
use crate::kernel::PricingKernel;
use crate::quantizer::Quantization;

pub const DEFAULT_END_EPSILON: f64 = 1e-4;
pub const DEFAULT_MAX_EVENTS: usize = 1_000_000;

/// Market setup shared by every path of a batch.
#[derive(Debug, Clone, Copy)]
pub struct MarketParams<'k> {
    pub kernel: &'k PricingKernel,
    /// Strategy intensities are frozen on `[1 - end_epsilon, 1]`.
    pub end_epsilon: f64,
    pub max_events: usize,
}

impl<'k> MarketParams<'k> {
    pub fn new(kernel: &'k PricingKernel) -> Self {
        MarketParams { kernel, end_epsilon: DEFAULT_END_EPSILON, max_events: DEFAULT_MAX_EVENTS }
    }

    pub fn with_end_epsilon(mut self, eps: f64) -> Self {
        self.end_epsilon = eps;
        self
    }

    pub fn with_max_events(mut self, n: usize) -> Self {
        self.max_events = n;
        self
    }

    pub fn quant(&self) -> &'k Quantization {
        self.kernel.quant()
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.end_epsilon > 0.0 && self.end_epsilon <= 0.01) {
            return Err(Error::InvalidArgument(format!("end_epsilon must lie in (0, 0.01], got {}", self.end_epsilon)));
        }
        if self.max_events < 10_000 {
            return Err(Error::InvalidArgument("max_events must be at least 10^4".into()));
        }
        Ok(())
    }
}

/// Counts of flagged paths in a batch.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, serde::Serialize)]
pub struct Diagnostics {
    pub paths: usize,
    pub runaway: usize,
    pub terminal_miss: usize,
    pub stranded: usize,
}

impl Diagnostics {
    pub fn from_paths<'a>(paths: impl IntoIterator<Item = &'a PathRecord>) -> Self {
        let mut d = Diagnostics::default();
        for p in paths {
            d.record(p);
        }
        d
    }

    pub fn record(&mut self, p: &PathRecord) {
        self.paths += 1;
        self.runaway += p.flags.runaway as usize;
        self.terminal_miss += p.flags.terminal_miss as usize;
        self.stranded += p.flags.stranded as usize;
    }

    pub fn hit_rate(&self) -> f64 {
        1.0 - self.terminal_miss as f64 / self.paths.max(1) as f64
    }

    pub fn runaway_rate(&self) -> f64 {
        self.runaway as f64 / self.paths.max(1) as f64
    }
}
