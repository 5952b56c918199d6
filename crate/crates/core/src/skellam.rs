//! Skellam law of the difference of two independent Poisson(μ) counts.
//!
//! `P(K = k) = e^{-2μ} I_{|k|}(2μ)` where `I` is the modified Bessel function of
//! the first kind. The whole sequence `e^{-x} I_k(x)`, `k = 0, 1, ...` is produced
//! by Miller's backward recurrence and normalised with the exact identity
//! `e^{-x} (I_0(x) + 2 Σ_{k≥1} I_k(x)) = 1`.
//!
//! A [`SkellamTable`] also carries the right tail and two iterated tail sums. These
//! give closed forms for time integrals of the law through the identity
//! `d/dμ E_μ[f(K)] = E_μ[f(K+1) + f(K-1) - 2 f(K)]`.

const RESCALE: f64 = 1e250;
/// Miller start is pushed until `I_M / I_kmax < e^{-40}`.
const START_LOG_RATIO: f64 = -40.0;

/// `e^{-x} I_k(x)` for `k = 0..=M` with `M >= kmax` chosen so that the neglected tail is
/// below double precision.
pub fn scaled_bessel_sequence(x: f64, kmax: usize) -> Vec<f64> {
    assert!(x >= 0.0 && x.is_finite(), "bessel argument must be finite and nonnegative");
    if x < 1e-290 {
        let mut out = vec![0.0; kmax + 1];
        out[0] = 1.0;
        return out;
    }
    let start = miller_start(x, kmax);
    let mut r = vec![0.0f64; start + 1];
    let mut above = 0.0f64;
    let mut cur = 1.0f64;
    r[start] = cur;
    let mut sum = 0.0f64;
    for k in (1..=start).rev() {
        sum += cur;
        let next = above + (2.0 * k as f64 / x) * cur;
        above = cur;
        cur = next;
        if cur > RESCALE {
            cur /= RESCALE;
            above /= RESCALE;
            sum /= RESCALE;
            for v in r[k..].iter_mut() {
                *v /= RESCALE;
            }
        }
        r[k - 1] = cur;
    }
    let total = r[0] + 2.0 * sum;
    for v in r.iter_mut() {
        *v /= total;
    }
    r
}

fn miller_start(x: f64, kmax: usize) -> usize {
    let mut k = kmax.max(1);
    let mut acc = 0.0;
    while acc > START_LOG_RATIO {
        let kf = k as f64;
        acc += (x / (kf + (kf * kf + x * x).sqrt())).ln();
        k += 1;
    }
    k + 8
}

/// `e^{-x} I_n(x)`.
pub fn scaled_bessel_i(n: u32, x: f64) -> f64 {
    scaled_bessel_sequence(x, n as usize)[n as usize]
}

/// `P(K = k)` for `K ~ Skellam(μ, μ)`.
pub fn skellam_pmf(k: i64, mu: f64) -> f64 {
    assert!(mu >= 0.0, "mu must be nonnegative");
    let idx = k.unsigned_abs() as usize;
    scaled_bessel_sequence(2.0 * mu, idx).get(idx).copied().unwrap_or(0.0)
}

/// `P(K <= k)` for `K ~ Skellam(μ, μ)`.
pub fn skellam_cdf(k: i64, mu: f64) -> f64 {
    SkellamTable::new(mu, k.unsigned_abs() as usize).cdf(k)
}

/// Tabulated Skellam law at one value of μ, over `k >= 0` (the law is symmetric).
#[derive(Debug, Clone)]
pub struct SkellamTable {
    mu: f64,
    pmf: Vec<f64>,
    /// `P(K >= k)`
    tail: Vec<f64>,
    /// `E[(K - k)_+]`
    stop1: Vec<f64>,
    /// `E[(K - k)(K - k + 1)/2 ; K >= k]`
    stop2: Vec<f64>,
}

impl SkellamTable {
    pub fn new(mu: f64, kmax: usize) -> Self {
        assert!(mu >= 0.0 && mu.is_finite(), "mu must be finite and nonnegative");
        let pmf = scaled_bessel_sequence(2.0 * mu, kmax);
        let len = pmf.len();
        let mut tail = vec![0.0; len + 1];
        let mut stop1 = vec![0.0; len + 1];
        let mut stop2 = vec![0.0; len + 1];
        for k in (0..len).rev() {
            tail[k] = tail[k + 1] + pmf[k];
            stop1[k] = stop1[k + 1] + tail[k + 1];
            stop2[k] = stop2[k + 1] + stop1[k];
        }
        SkellamTable { mu, pmf, tail, stop1, stop2 }
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    /// Largest `|k|` with a stored, possibly nonzero, probability.
    pub fn support(&self) -> usize {
        self.pmf.len() - 1
    }

    pub fn pmf(&self, k: i64) -> f64 {
        self.pmf.get(k.unsigned_abs() as usize).copied().unwrap_or(0.0)
    }

    fn right(v: &[f64], k: i64) -> f64 {
        debug_assert!(k >= 0);
        v.get(k as usize).copied().unwrap_or(0.0)
    }

    /// `P(K >= k)`.
    pub fn tail(&self, k: i64) -> f64 {
        if k >= 1 {
            Self::right(&self.tail, k)
        } else {
            1.0 - Self::right(&self.tail, 1 - k)
        }
    }

    /// `P(K <= k)`.
    pub fn cdf(&self, k: i64) -> f64 {
        self.tail(-k)
    }

    /// `P(lo <= K <= hi)`, `None` standing for an infinite end.
    pub fn range(&self, lo: Option<i64>, hi: Option<i64>) -> f64 {
        let upper = |h: Option<i64>| h.map_or(0.0, |h| Self::right(&self.tail, h + 1));
        match (lo, hi) {
            (Some(l), Some(h)) if h < l => 0.0,
            (Some(l), _) if l >= 1 => Self::right(&self.tail, l) - upper(hi),
            (_, Some(h)) if h <= -1 => {
                self.range(Some(-h), lo.map(|l| -l))
            }
            _ => {
                let left = lo.map_or(0.0, |l| Self::right(&self.tail, 1 - l));
                1.0 - left - upper(hi)
            }
        }
    }

    /// `E[(K - k)_+]`, which also equals `∫_0^μ P_u(K = k) du` for `k >= 0`.
    pub fn stop1(&self, k: i64) -> f64 {
        if k >= 0 {
            Self::right(&self.stop1, k)
        } else {
            -k as f64 + Self::right(&self.stop1, -k)
        }
    }

    /// `E[(K - k)(K - k + 1)/2 ; K >= k]`.
    pub fn stop2(&self, k: i64) -> f64 {
        if k >= 1 {
            Self::right(&self.stop2, k)
        } else {
            let kf = k as f64;
            self.mu + 0.5 * (kf * kf - kf) - Self::right(&self.stop2, 1 - k)
        }
    }

    /// `∫_0^μ P_u(K = k) du`.
    pub fn pmf_integral(&self, k: i64) -> f64 {
        self.stop1(k.abs())
    }

    /// `∫_0^μ P_u(K >= k) du`.
    pub fn tail_integral(&self, k: i64) -> f64 {
        if k >= 1 {
            Self::right(&self.stop2, k)
        } else {
            self.mu - Self::right(&self.stop2, 1 - k)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_mu_is_a_point_mass() {
        assert_eq!(skellam_pmf(0, 0.0), 1.0);
        assert_eq!(skellam_pmf(3, 0.0), 0.0);
        assert_eq!(skellam_cdf(0, 0.0), 1.0);
        assert_eq!(skellam_cdf(-1, 0.0), 0.0);
    }

    #[test]
    fn known_values() {
        assert!((skellam_pmf(0, 1.0) - 0.308_508_322_553_671).abs() < 1e-14);
        let half = (1.0 - skellam_pmf(0, 1.0)) / 2.0;
        assert!((skellam_cdf(-1, 1.0) - half).abs() < 1e-15);
        assert!((skellam_cdf(-1, 1.0) - 0.345_745_8).abs() < 1e-7);
    }

    #[test]
    fn symmetric_in_k() {
        for &mu in &[0.5, 5.0, 500.0] {
            for k in 1..=10 {
                assert_eq!(skellam_pmf(k, mu), skellam_pmf(-k, mu));
            }
        }
    }

    #[test]
    fn total_mass_and_moments() {
        for &mu in &[0.01, 1.0, 37.5, 2000.0] {
            let t = SkellamTable::new(mu, 0);
            assert!((t.tail(i64::MIN / 4) - 1.0).abs() < 1e-15);
            let n = t.support() as i64;
            let mass: f64 = (-n..=n).map(|k| t.pmf(k)).sum();
            assert!((mass - 1.0).abs() < 1e-13, "mu={mu}");
            let var: f64 = (-n..=n).map(|k| (k * k) as f64 * t.pmf(k)).sum();
            assert!((var - 2.0 * mu).abs() < 1e-10 * (1.0 + mu), "mu={mu} var={var}");
        }
    }

    #[test]
    fn range_matches_pmf_sums() {
        let t = SkellamTable::new(3.0, 40);
        for lo in -8..8 {
            for hi in lo - 1..9 {
                let direct: f64 = (lo..=hi).map(|k| t.pmf(k)).sum();
                assert!((t.range(Some(lo), Some(hi)) - direct).abs() < 1e-15);
            }
            let left: f64 = (-60..=lo).map(|k| t.pmf(k)).sum();
            assert!((t.range(None, Some(lo)) - left).abs() < 1e-15);
            assert!((t.cdf(lo) - left).abs() < 1e-15);
        }
        assert_eq!(t.range(None, None), 1.0);
    }

    #[test]
    fn integrals_match_quadrature() {
        // Composite Simpson in μ against the closed forms.
        let mu = 2.5;
        let n = 4000;
        let h = mu / n as f64;
        let tables: Vec<SkellamTable> = (0..=n).map(|i| SkellamTable::new(i as f64 * h, 60)).collect();
        let simpson = |f: &dyn Fn(&SkellamTable) -> f64| {
            let mut s = f(&tables[0]) + f(&tables[n]);
            for (i, t) in tables.iter().enumerate().take(n).skip(1) {
                s += if i % 2 == 1 { 4.0 } else { 2.0 } * f(t);
            }
            s * h / 3.0
        };
        let top = &tables[n];
        for k in -5..=5 {
            let q = simpson(&|t| t.pmf(k));
            assert!((q - top.pmf_integral(k)).abs() < 1e-12, "pmf k={k}");
            let q = simpson(&|t| t.tail(k));
            assert!((q - top.tail_integral(k)).abs() < 1e-12, "tail k={k}");
        }
    }
}
