//! Kyle–Back limit: Gaussian pricing, the insider's drift and Euler paths.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::kernel::GaussianKernel;
use crate::normal;
use crate::rng::RngPolicy;
use crate::stats::{CompensatedSum, Estimate};

pub const DRIFT_CLIP: f64 = 1e4;

/// Insider drift `∂_y h_n^0 / h_n^0` at `(y, t)`; `None` when `h_n^0` underflows.
pub fn kyle_drift(g: &GaussianKernel, bin: usize, y: f64, t: f64) -> Option<f64> {
    if g.n_bins() == 1 {
        return Some(0.0);
    }
    let a = g.boundaries();
    let s = (1.0 - t).sqrt();
    let (lo, hi) = ((a[bin] - y) / s, (a[bin + 1] - y) / s);
    let h = normal::interval(lo, hi);
    if !(h > 0.0) {
        return None;
    }
    let dens = |z: f64| if z.is_finite() { normal::pdf(z) } else { 0.0 };
    Some((dens(lo) - dens(hi)) / (s * h))
}

/// `E[ℒ^m_t]` for Brownian motion from 0, with the convention `|B_t| = M_t + 2ℒ^0_t`.
pub fn brownian_local_time_mean(m: f64, t: f64) -> f64 {
    if t <= 0.0 {
        return 0.0;
    }
    let st = t.sqrt();
    let abs_mean = (2.0 * t / std::f64::consts::PI).sqrt() * (-m * m / (2.0 * t)).exp()
        + m * (2.0 * normal::cdf(m / st) - 1.0);
    0.5 * (abs_mean - m.abs())
}

/// Drift at time `t_drift` and price at time `t_price`, sharing one normal tail
/// evaluation per boundary when the two times coincide.
fn drift_and_price(g: &GaussianKernel, bin: usize, y: f64, t_drift: f64, t_price: f64) -> Option<(f64, f64)> {
    let a = g.boundaries();
    let v = g.values();
    let n = v.len();
    if n == 1 {
        return Some((0.0, v[0]));
    }
    // (cdf, sf, pdf) at each interior boundary.
    let tails = |t: f64, m: usize| {
        let s = (1.0 - t).sqrt();
        let z = (a[m] - y) / s;
        let (c, u) = if z >= 0.0 {
            let u = normal::sf(z);
            (1.0 - u, u)
        } else {
            let c = normal::cdf(z);
            (c, 1.0 - c)
        };
        (c, u, normal::pdf(z), s)
    };
    let lo = (bin > 0).then(|| tails(t_drift, bin));
    let hi = (bin + 1 < n).then(|| tails(t_drift, bin + 1));
    let price = |t: f64| {
        let mut p = v[0];
        for m in 1..n {
            let u = match (t == t_drift, m == bin, m == bin + 1) {
                (true, true, _) => lo.map(|l| l.1),
                (true, _, true) => hi.map(|h| h.1),
                _ => None,
            };
            p += (v[m] - v[m - 1]) * u.unwrap_or_else(|| tails(t, m).1);
        }
        p
    };
    let h = match (lo, hi) {
        (None, Some(h)) => h.0,
        (Some(l), None) => l.1,
        (Some(l), Some(h)) => {
            if a[bin] - y >= 0.0 {
                l.1 - h.1
            } else if a[bin + 1] - y <= 0.0 {
                h.0 - l.0
            } else {
                1.0 - l.0 - h.1
            }
        }
        (None, None) => unreachable!(),
    };
    if !(h > 0.0) {
        return None;
    }
    let s = (1.0 - t_drift).sqrt();
    let drift = (lo.map_or(0.0, |l| l.2) - hi.map_or(0.0, |h| h.2)) / (s * h);
    Some((drift, price(t_price)))
}

#[derive(Debug, Clone, PartialEq)]
pub struct KylePath {
    pub bin: usize,
    pub dt: f64,
    /// `Y` on the time grid, empty unless requested.
    pub trajectory: Vec<f64>,
    /// `Y` at the requested observation times.
    pub observed: Vec<f64>,
    pub terminal: f64,
    pub profit: f64,
    pub hit: bool,
    pub stranded: bool,
}

/// Euler–Maruyama path of the equilibrium demand given bin `bin`.
///
/// The drift is clipped at `±10^4` and frozen at its `1 - end_epsilon` value on the
/// final sliver. Profit accumulates `(v_n - p^0(Y_t, t)) θ_t dt` at left endpoints.
pub fn simulate_kyle<R: Rng + ?Sized>(
    g: &GaussianKernel,
    bin: usize,
    dt: f64,
    end_epsilon: f64,
    keep_trajectory: bool,
    observe: &[f64],
    rng: &mut R,
) -> Result<KylePath> {
    simulate_kyle_with(g, bin, dt, end_epsilon, keep_trajectory, observe, || StandardNormal.sample(rng))
}

/// [`simulate_kyle`] driven by a caller-supplied stream of standard normals, one per step.
/// Used to couple paths across time steps.
pub fn simulate_kyle_with(
    g: &GaussianKernel,
    bin: usize,
    dt: f64,
    end_epsilon: f64,
    keep_trajectory: bool,
    observe: &[f64],
    mut noise: impl FnMut() -> f64,
) -> Result<KylePath> {
    if !(dt > 0.0 && dt <= 1e-3) {
        return Err(Error::InvalidArgument(format!("time step must lie in (0, 1e-3], got {dt}")));
    }
    let steps = (1.0 / dt).round() as usize;
    let dt = 1.0 / steps as f64;
    let sq = dt.sqrt();
    let freeze = 1.0 - end_epsilon;
    let v = g.values()[bin];
    let mut y = 0.0f64;
    let mut traj = if keep_trajectory { Vec::with_capacity(steps + 1) } else { Vec::new() };
    let mut profit = CompensatedSum::default();
    let mut stranded = false;
    if keep_trajectory {
        traj.push(0.0);
    }
    let marks: Vec<usize> = observe.iter().map(|t| (t.clamp(0.0, 1.0) * steps as f64).round() as usize).collect();
    let mut observed = vec![f64::NAN; observe.len()];
    let record = |k: usize, y: f64, observed: &mut Vec<f64>| {
        for (o, &m) in observed.iter_mut().zip(&marks) {
            if m == k {
                *o = y;
            }
        }
    };
    record(0, 0.0, &mut observed);
    for k in 0..steps {
        let t = k as f64 * dt;
        let Some((drift, price)) = drift_and_price(g, bin, y, t.min(freeze), t) else {
            stranded = true;
            break;
        };
        let drift = drift.clamp(-DRIFT_CLIP, DRIFT_CLIP);
        if drift != 0.0 {
            profit.add((v - price) * drift * dt);
        }
        let z = noise();
        y += drift * dt + sq * z;
        if keep_trajectory {
            traj.push(y);
        }
        record(k + 1, y, &mut observed);
    }
    Ok(KylePath {
        bin,
        dt,
        trajectory: traj,
        observed,
        terminal: y,
        profit: profit.value(),
        hit: !stranded && g.contains(bin, y),
        stranded,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KyleSummary {
    /// Zero-based bin, or `None` for the mixture over bins.
    pub bin: Option<usize>,
    pub dt: f64,
    pub profit_mean: f64,
    pub profit_se: f64,
    pub hit_rate: f64,
    pub paths: usize,
    pub stranded: usize,
}

/// Expected insider profit by Monte Carlo.
///
/// With `bin = Some(n)` every path carries value `v_n`; with `None` each path first
/// draws its bin from the asset law, giving the unconditional expected profit.
pub fn kyle_profit(
    g: &GaussianKernel,
    probs: &[f64],
    bin: Option<usize>,
    dt: f64,
    end_epsilon: f64,
    paths: usize,
    policy: &RngPolicy,
) -> Result<(KyleSummary, Vec<KylePath>)> {
    let runs: Vec<Result<KylePath>> = policy.map_paths(paths, |_, rng| {
        let b = match bin {
            Some(b) => b,
            None => draw_bin(probs, rng),
        };
        simulate_kyle(g, b, dt, end_epsilon, false, &[], rng)
    });
    let runs: Vec<KylePath> = runs.into_iter().collect::<Result<_>>()?;
    Ok((summarize(bin, dt, &runs), runs))
}

pub fn summarize(bin: Option<usize>, dt: f64, runs: &[KylePath]) -> KyleSummary {
    let ok: Vec<&KylePath> = runs.iter().filter(|p| !p.stranded && bin.is_none_or(|b| p.bin == b)).collect();
    let xs: Vec<f64> = ok.iter().map(|p| p.profit).collect();
    let e = Estimate::from_samples(&xs);
    let hits = ok.iter().filter(|p| p.hit).count();
    KyleSummary {
        bin,
        dt,
        profit_mean: e.mean,
        profit_se: e.se,
        hit_rate: hits as f64 / ok.len().max(1) as f64,
        paths: ok.len(),
        stranded: runs.iter().filter(|p| p.stranded).count(),
    }
}

pub(crate) fn draw_bin<R: Rng + ?Sized>(probs: &[f64], rng: &mut R) -> usize {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    for (i, p) in probs.iter().enumerate() {
        acc += p;
        if u < acc {
            return i;
        }
    }
    probs.len() - 1
}
