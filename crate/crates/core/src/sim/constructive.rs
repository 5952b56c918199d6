use rand::Rng;
use rand_distr::{Distribution, Exp1};

use super::{Event, MarketParams, Mark, PathRecord};
use crate::kernel::{KernelSlice, PricingKernel};
use crate::quantizer::Side;
use crate::stats::CompensatedSum;

const SAFETY: f64 = 1.25;
const SAMPLES: usize = 9;
const MIN_WIDTH: f64 = 1e-6;

/// Insider order intensities at one state.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Intensities {
    pub bb: f64,
    pub bs: f64,
    pub ss: f64,
    pub sb: f64,
}

/// Rates of the insider's four order types at `(level, t)` given bin `bin`.
///
/// Returns `None` when `h_n(y, t)` has underflowed, i.e. the path is stranded.
pub fn insider_intensities(kernel: &PricingKernel, bin: usize, level: i64, t: f64) -> Option<Intensities> {
    intensities_at(&kernel.slice(t), kernel, bin, level)
}

fn intensities_at(slice: &KernelSlice, kernel: &PricingKernel, bin: usize, level: i64) -> Option<Intensities> {
    let h = slice.h(bin, level);
    if !(h > 0.0) || !h.is_finite() {
        return None;
    }
    let beta = kernel.beta();
    let quant = kernel.quant();
    let mut out = Intensities::default();
    if quant.n_bins() == 1 {
        return Some(out);
    }
    let mid = quant.mid_levels(bin);
    match quant.side(bin, level) {
        Side::Buy => {
            if mid.is_none_or(|(floor, _)| level != floor) {
                out.bb = beta * (slice.h(bin, level + 1) / h - 1.0).max(0.0);
            }
            out.bs = beta * (1.0 - slice.h(bin, level - 1) / h).max(0.0);
        }
        Side::Sell => {
            if mid.is_none_or(|(_, ceil)| level != ceil) {
                out.ss = beta * (slice.h(bin, level - 1) / h - 1.0).max(0.0);
            }
            out.sb = beta * (1.0 - slice.h(bin, level + 1) / h).max(0.0);
        }
    }
    Some(out)
}

/// Rate of the insider's own-direction orders (buys below the mid level, sells above).
fn active_rate(kernel: &PricingKernel, bin: usize, level: i64, t: f64) -> Option<f64> {
    let quant = kernel.quant();
    if quant.n_bins() == 1 {
        return Some(0.0);
    }
    let (next, at_mid) = match (quant.side(bin, level), quant.mid_levels(bin)) {
        (Side::Buy, Some((floor, _))) => (level + 1, level == floor),
        (Side::Buy, None) => (level + 1, false),
        (Side::Sell, Some((_, ceil))) => (level - 1, level == ceil),
        (Side::Sell, None) => (level - 1, false),
    };
    let slice = kernel.slice(t);
    let h = slice.h(bin, level);
    if !(h > 0.0) || !h.is_finite() {
        return None;
    }
    if at_mid {
        return Some(0.0);
    }
    Some(kernel.beta() * (slice.h(bin, next) / h - 1.0).max(0.0))
}

/// Upper bound for the active insider rate on `[t_lo, t_hi]`: the largest of nine
/// equally spaced samples times 1.25.
pub fn thinning_majorant(kernel: &PricingKernel, bin: usize, level: i64, t_lo: f64, t_hi: f64) -> f64 {
    sampled_max(kernel, bin, level, t_lo, t_hi).0 * SAFETY
}

/// `(max, min)` of the active rate over the sample points.
fn sampled_max(kernel: &PricingKernel, bin: usize, level: i64, t_lo: f64, t_hi: f64) -> (f64, f64) {
    let (mut hi, mut lo) = (0.0f64, f64::INFINITY);
    for k in 0..SAMPLES {
        let t = t_lo + (t_hi - t_lo) * k as f64 / (SAMPLES - 1) as f64;
        let r = active_rate(kernel, bin, level, t).unwrap_or(0.0);
        hi = hi.max(r);
        lo = lo.min(r);
    }
    (hi, lo)
}

/// Segment starting at `t` with its majorant.
fn segment(kernel: &PricingKernel, bin: usize, level: i64, t: f64, end: f64) -> (f64, f64) {
    (end, sampled_max(kernel, bin, level, t, end).0 * SAFETY)
}

/// Constructive equilibrium path: noise orders, insider orders and cancellations.
///
/// Between demand jumps the insider's own-direction orders are drawn by thinning
/// against a piecewise-constant majorant; opposite noise orders are cancelled with
/// probability `(1 - h_n(y∓δ)/h_n(y))_+`. Rates are frozen at their `1 - ε` values on
/// the final sliver.
pub fn simulate_constructive<R: Rng + ?Sized>(params: &MarketParams, bin: usize, rng: &mut R) -> PathRecord {
    let kernel = params.kernel;
    let quant = kernel.quant();
    let beta = kernel.beta();
    let delta = kernel.delta();
    let v = quant.value(bin);
    let freeze = 1.0 - params.end_epsilon;

    let mut events: Vec<Event> = Vec::new();
    let mut profit = CompensatedSum::default();
    let mut t = 0.0f64;
    let mut level = 0i64;
    let mut refinements = 0u64;
    let mut stranded = false;
    let mut runaway = false;

    // Current segment: [t, seg_end) with majorant `bound`, valid for `level`.
    let mut seg: Option<(f64, f64)> = None;
    while t < 1.0 {
        let side = quant.side(bin, level);
        let (seg_end, bound) = match seg {
            Some(s) => s,
            None => {
                let s = if t >= freeze {
                    match active_rate(kernel, bin, level, freeze) {
                        Some(r) => (1.0, r),
                        None => {
                            stranded = true;
                            break;
                        }
                    }
                } else {
                    let width = (0.5 / beta).min(0.25 * (1.0 - t)).max(MIN_WIDTH);
                    segment(kernel, bin, level, t, (t + width).min(freeze))
                };
                seg = Some(s);
                s
            }
        };
        let total = 2.0 * beta + bound;
        let e: f64 = Exp1.sample(rng);
        let cand = t + e / total;
        if cand >= seg_end {
            t = seg_end;
            seg = None;
            continue;
        }
        let u = rng.random::<f64>() * total;
        let rate_time = cand.min(freeze);
        if u >= 2.0 * beta {
            // Insider candidate in the active direction.
            let theta = match active_rate(kernel, bin, level, rate_time) {
                Some(r) => r,
                None => {
                    stranded = true;
                    break;
                }
            };
            if theta > bound {
                refinements += 1;
                let end = (t + (seg_end - t) / 2.0).max(t + MIN_WIDTH).min(seg_end);
                let (end, b) = segment(kernel, bin, level, t, end);
                seg = Some((end, b.max(theta * SAFETY)));
                continue;
            }
            t = cand;
            if rng.random::<f64>() * bound < theta {
                let slice = kernel.slice(t);
                let (mark, gain) = match side {
                    Side::Buy => (Mark::XBB, delta * (v - slice.price(level + 1))),
                    Side::Sell => (Mark::XSS, -delta * (v - slice.price(level - 1))),
                };
                profit.add(gain);
                events.push(Event { time: t, level_before: level, mark, profit: gain });
                level += mark.shift();
                seg = None;
            }
        } else {
            t = cand;
            let noise_up = u < beta;
            let opposite = match side {
                Side::Buy => !noise_up,
                Side::Sell => noise_up,
            };
            let mut mark = if noise_up { Mark::ZB } else { Mark::ZS };
            let mut gain = 0.0;
            if opposite && quant.n_bins() > 1 {
                let rs = kernel.slice(rate_time);
                let h = rs.h(bin, level);
                if !(h > 0.0) {
                    stranded = true;
                    break;
                }
                let next = if noise_up { level + 1 } else { level - 1 };
                let cancel = (1.0 - rs.h(bin, next) / h).max(0.0);
                if rng.random::<f64>() < cancel {
                    let p = if rate_time == t { rs.price(level) } else { kernel.price(level, t) };
                    match side {
                        Side::Buy => {
                            mark = Mark::XBS;
                            gain = delta * (v - p);
                        }
                        Side::Sell => {
                            mark = Mark::XSB;
                            gain = -delta * (v - p);
                        }
                    }
                    profit.add(gain);
                }
            }
            events.push(Event { time: t, level_before: level, mark, profit: gain });
            if mark.shift() != 0 {
                level += mark.shift();
                seg = None;
            }
        }
        if events.len() > params.max_events {
            runaway = true;
            break;
        }
    }

    let mut rec = PathRecord::from_events(bin, events);
    rec.realized_profit = Some(profit.value());
    rec.attempts = refinements;
    rec.flags.runaway = runaway;
    rec.flags.stranded = stranded;
    rec.flags.terminal_miss = !quant.contains(bin, rec.terminal_level);
    rec
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantizer::{quantize, AssetDistribution};
    use crate::rng::RngPolicy;

    fn kernel() -> PricingKernel {
        PricingKernel::new(quantize(&AssetDistribution::three_point(), 0.5).unwrap())
    }

    #[test]
    fn mid_level_rates_vanish() {
        let k = kernel();
        let (floor, ceil) = k.quant().mid_levels(1).unwrap();
        for &t in &[0.0, 0.4, 0.9] {
            assert_eq!(insider_intensities(&k, 1, floor, t).unwrap().bb, 0.0);
            assert_eq!(insider_intensities(&k, 1, ceil, t).unwrap().ss, 0.0);
        }
    }

    #[test]
    fn one_side_active() {
        let k = kernel();
        for level in -10..10 {
            let i = insider_intensities(&k, 1, level, 0.5).unwrap();
            let buys = i.bb + i.bs > 0.0;
            let sells = i.ss + i.sb > 0.0;
            assert!(!(buys && sells));
            match k.quant().side(1, level) {
                Side::Buy => assert!(!sells),
                Side::Sell => assert!(!buys),
            }
        }
    }

    #[test]
    fn mirror_symmetry() {
        let k = kernel();
        let (floor, ceil) = k.quant().mid_levels(1).unwrap();
        for d in 0..6 {
            let a = insider_intensities(&k, 1, floor - d, 0.3).unwrap();
            let b = insider_intensities(&k, 1, ceil + d, 0.3).unwrap();
            assert!((a.bb - b.ss).abs() <= 1e-9 * (1.0 + a.bb));
            assert!((a.bs - b.sb).abs() <= 1e-9 * (1.0 + a.bs));
        }
    }

    #[test]
    fn single_value_has_no_insider() {
        let q = quantize(&AssetDistribution::new(vec![1.0], vec![1.0]).unwrap(), 0.5).unwrap();
        let k = PricingKernel::new(q);
        assert_eq!(insider_intensities(&k, 0, 3, 0.2).unwrap(), Intensities::default());
        assert_eq!(thinning_majorant(&k, 0, 3, 0.0, 0.5), 0.0);
        let params = MarketParams::new(&k);
        let p = simulate_constructive(&params, 0, &mut RngPolicy::new(3).stream_for(0));
        assert_eq!(p.insider_events(), 0);
        assert_eq!(p.realized_profit, Some(0.0));
    }

    #[test]
    fn majorant_dominates_probes() {
        use rand::Rng;
        let k = kernel();
        let mut rng = RngPolicy::new(11).stream_for(0);
        for _ in 0..100 {
            let level = rng.random_range(-6..8);
            let t0 = rng.random::<f64>() * 0.95;
            let t1 = (t0 + 0.01).min(0.9999);
            let (end, bound) = segment(&k, 1, level, t0, t1);
            let probe = t0 + rng.random::<f64>() * (end - t0);
            assert!(active_rate(&k, 1, level, probe).unwrap() <= bound, "level={level} t={probe}");
        }
    }

    #[test]
    fn trades_stay_on_their_side() {
        let k = kernel();
        let params = MarketParams::new(&k);
        let policy = RngPolicy::new(5);
        let q = k.quant();
        for i in 0..200 {
            let bin = (i % 3) as usize;
            let p = simulate_constructive(&params, bin, &mut policy.stream_for(i));
            for e in &p.events {
                match e.mark {
                    Mark::XBB | Mark::XBS => assert_eq!(q.side(bin, e.level_before), Side::Buy),
                    Mark::XSS | Mark::XSB => assert_eq!(q.side(bin, e.level_before), Side::Sell),
                    _ => {}
                }
            }
            assert!((p.occupation.total() - 1.0).abs() < 1e-12);
        }
    }
}
