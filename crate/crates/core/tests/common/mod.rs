//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use gm_bridge::stats::CompensatedSum;

/// `ln k!` by compensated summation of logarithms.
pub fn ln_factorials(n: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(n + 1);
    let mut s = CompensatedSum::default();
    out.push(0.0);
    for i in 1..=n {
        s.add((i as f64).ln());
        out.push(s.value());
    }
    out
}

/// Skellam pmf from the convolution series
/// `P(K = k) = Σ_j e^{-2μ} μ^{2j+|k|} / (j! (j+|k|)!)`, summed in log space around its peak.
pub fn skellam_series(k: i64, mu: f64, lnf: &[f64]) -> f64 {
    let k = k.unsigned_abs() as usize;
    if mu == 0.0 {
        return if k == 0 { 1.0 } else { 0.0 };
    }
    let lm = mu.ln();
    let term = |j: usize| -2.0 * mu + (2 * j + k) as f64 * lm - lnf[j] - lnf[j + k];
    // peak of the terms: j (j + k) ≈ μ²
    let peak = (0.5 * (-(k as f64) + ((k * k) as f64 + 4.0 * mu * mu).sqrt())).round() as usize;
    let span = (40.0 * (mu.sqrt() + 1.0)) as usize + 40;
    let lo = peak.saturating_sub(span);
    let hi = peak + span;
    assert!(hi + k < lnf.len(), "factorial table too short");
    let top = term(peak);
    let mut s = CompensatedSum::default();
    for j in lo..=hi {
        s.add((term(j) - top).exp());
    }
    top.exp() * s.value()
}

/// Standard normal CDF from the Maclaurin series of erf, valid for |x| < 7.
pub fn phi_series(x: f64) -> f64 {
    let z = x / std::f64::consts::SQRT_2;
    // erf(z) = 2/√π Σ (-1)^n z^{2n+1} / (n! (2n+1)), evaluated via term recurrence
    let mut term = z;
    let mut s = CompensatedSum::default();
    let mut n = 0usize;
    loop {
        let add = term / (2 * n + 1) as f64;
        s.add(add);
        if add.abs() < 1e-18 * s.value().abs().max(1e-300) && n > 2 {
            break;
        }
        n += 1;
        term *= -z * z / n as f64;
        if n > 2000 {
            break;
        }
    }
    0.5 + s.value() / std::f64::consts::PI.sqrt()
}

/// `Φ^{-1}(p)` by bisection on [`phi_series`].
pub fn quantile_bisect(p: f64) -> f64 {
    let (mut lo, mut hi) = (-6.5f64, 6.5f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if phi_series(mid) < p {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Boundary levels by scanning the series CDF upward over the lattice, with the
/// parity skip after the first interior boundary.
pub fn scan_cuts(probs: &[f64], delta: f64) -> Vec<i64> {
    let mu = 0.5 / (delta * delta);
    let reach = (mu + 12.0 * (2.0 * mu).sqrt() + 20.0) as i64;
    let lnf = ln_factorials(4 * reach as usize + 400);
    let mut cdf = Vec::new();
    let mut acc = CompensatedSum::default();
    for k in -reach..=reach {
        acc.add(skellam_series(k, mu, &lnf));
        cdf.push((k, acc.value()));
    }
    let mut cuts: Vec<i64> = Vec::new();
    let mut cum = 0.0;
    for p in &probs[..probs.len() - 1] {
        cum += p;
        let mut y = cdf.iter().find(|(_, c)| *c >= cum).expect("cdf reaches every level").0;
        if let Some(&prev) = cuts.last() {
            if (prev + y) % 2 != 0 {
                y += 1;
            }
        }
        cuts.push(y);
    }
    cuts
}

/// Central difference in `t`.
pub fn d_dt(f: impl Fn(f64) -> f64, t: f64, tau: f64) -> f64 {
    (f(t + tau) - f(t - tau)) / (2.0 * tau)
}

/// Largest residual of `f_t + β Δf = 0` over the grid, relative to the largest `|β Δf|`.
/// Time derivatives are central differences with step `tau`.
pub fn heat_residual(
    beta: f64,
    f: impl Fn(i64, f64) -> f64,
    levels: impl Iterator<Item = i64> + Clone,
    times: &[f64],
    tau: f64,
) -> f64 {
    let (mut res, mut scale) = (0.0f64, 0.0f64);
    for &t in times {
        for y in levels.clone() {
            let ft = d_dt(|s| f(y, s), t, tau);
            let lap = beta * (f(y + 1, t) - 2.0 * f(y, t) + f(y - 1, t));
            res = res.max((ft + lap).abs());
            scale = scale.max(lap.abs());
        }
    }
    res / scale
}

/// Residuals of the five equations satisfied by `U(v_n, ·, ·)` for one bin, each relative
/// to the largest term of its family over the window. Returns `[harmonic, at ⌈m⌉, at ⌊m⌋,
/// sell side difference, buy side difference]`; families with no points in the window are 0.
pub fn u_equation_residuals(
    kernel: &gm_bridge::PricingKernel,
    bin: usize,
    levels: std::ops::RangeInclusive<i64>,
    times: &[f64],
    tau: f64,
) -> [f64; 5] {
    use gm_bridge::profit::u_of;
    use gm_bridge::Side;
    let q = kernel.quant();
    let beta = kernel.beta();
    let delta = kernel.delta();
    let v = q.value(bin);
    let u = |y: i64, t: f64| u_of(kernel, bin, y, t);
    let mut res = [0.0f64; 5];
    let mut scale = [0.0f64; 5];
    let mids = q.mid_levels(bin);
    for &t in times {
        for y in levels.clone() {
            let ut = d_dt(|s| u(y, s), t, tau);
            let lap = beta * (u(y + 1, t) - 2.0 * u(y, t) + u(y - 1, t));
            let (family, src) = match mids {
                Some((fl, ce)) if y == ce => (1, delta * beta * (kernel.price(fl, t) - v)),
                Some((fl, ce)) if y == fl => (2, delta * beta * (v - kernel.price(ce, t))),
                _ => (0, 0.0),
            };
            res[family] = res[family].max((ut + lap - src).abs());
            scale[family] = scale[family].max(ut.abs().max(lap.abs()).max(src.abs()));
            match q.side(bin, y) {
                Side::Sell => {
                    let diff = u(y, t) - u(y + 1, t);
                    let rhs = delta * (v - kernel.price(y, t));
                    res[3] = res[3].max((diff - rhs).abs());
                    scale[3] = scale[3].max(diff.abs().max(rhs.abs()));
                }
                Side::Buy => {
                    let diff = u(y, t) - u(y - 1, t);
                    let rhs = -delta * (v - kernel.price(y, t));
                    res[4] = res[4].max((diff - rhs).abs());
                    scale[4] = scale[4].max(diff.abs().max(rhs.abs()));
                }
            }
        }
    }
    let mut out = [0.0; 5];
    for i in 0..5 {
        if scale[i] > 0.0 {
            out[i] = res[i] / scale[i];
        }
    }
    out
}
