use rand::Rng;
use rand_distr::{Distribution, Exp1, Poisson};

use super::{Event, MarketParams, Mark, PathRecord};
use crate::error::{Error, Result};

pub const MAX_PROPOSALS: u64 = 100_000;

/// Noise path conditioned on ending in `bin`, by rejection on the terminal counts.
///
/// Only the two Poisson counts are drawn per proposal; jump times are generated once
/// a proposal lands in the bin, since given the counts they are uniform order
/// statistics with exchangeable marks.
pub fn simulate_conditioned<R: Rng + ?Sized>(params: &MarketParams, bin: usize, rng: &mut R) -> Result<PathRecord> {
    let quant = params.quant();
    let pois = poisson(quant.beta());
    for attempt in 1..=MAX_PROPOSALS {
        let nb = pois.sample(rng) as u64;
        let ns = pois.sample(rng) as u64;
        if quant.contains(bin, nb as i64 - ns as i64) {
            let mut p = PathRecord::from_events(bin, noise_events(nb, ns, rng));
            p.attempts = attempt;
            return Ok(p);
        }
    }
    Err(Error::RetryBudget { bin, attempts: MAX_PROPOSALS })
}

/// Unconditioned noise path; the bin is read off the terminal level.
pub fn simulate_unconditioned<R: Rng + ?Sized>(params: &MarketParams, rng: &mut R) -> PathRecord {
    let quant = params.quant();
    let pois = poisson(quant.beta());
    let nb = pois.sample(rng) as u64;
    let ns = pois.sample(rng) as u64;
    let bin = quant.bin_of(nb as i64 - ns as i64);
    let mut p = PathRecord::from_events(bin, noise_events(nb, ns, rng));
    p.attempts = 1;
    p
}

fn poisson(beta: f64) -> Poisson<f64> {
    Poisson::new(beta).expect("beta is positive and finite")
}

fn noise_events<R: Rng + ?Sized>(nb: u64, ns: u64, rng: &mut R) -> Vec<Event> {
    let n = (nb + ns) as usize;
    // Sorted uniforms from normalised exponential spacings.
    let mut times = Vec::with_capacity(n);
    let mut acc = 0.0f64;
    for _ in 0..n {
        let e: f64 = Exp1.sample(rng);
        acc += e;
        times.push(acc);
    }
    let e: f64 = Exp1.sample(rng);
    let total = acc + e;
    let (mut left_b, mut left) = (nb, nb + ns);
    let mut level = 0i64;
    let mut events = Vec::with_capacity(n);
    for t in times {
        let up = rng.random_range(0..left) < left_b;
        let mark = if up { Mark::ZB } else { Mark::ZS };
        if up {
            left_b -= 1;
        }
        left -= 1;
        events.push(Event { time: t / total, level_before: level, mark, profit: 0.0 });
        level += mark.shift();
    }
    events
}
