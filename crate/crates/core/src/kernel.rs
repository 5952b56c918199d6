//! Conditional bin probabilities `h_n(y, t)` and the pricing rule `p(y, t)`.
//!
//! `h_n(i, t) = P(i + K ∈ [A_n, A_{n+1}))` with `K ~ Skellam(β(1-t))` and levels `i`
//! standing for the demand `iδ`. Skellam tables live on a uniform time grid and are
//! filled on first use. At an off-grid time `t` the law is obtained exactly from the
//! next node `s >= t` through the semigroup `K_t = K_s + J`, `J ~ Skellam(β(s-t))`.

use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::normal;
use crate::quantizer::{AssetDistribution, Quantization};
use crate::skellam::{scaled_bessel_sequence, SkellamTable};

pub const DEFAULT_GRID: usize = 2048;

#[derive(Debug)]
pub struct PricingKernel {
    quant: Quantization,
    grid: usize,
    kmax: usize,
    tables: Vec<OnceLock<SkellamTable>>,
}

impl PricingKernel {
    pub fn new(quant: Quantization) -> Self {
        Self::with_grid(quant, DEFAULT_GRID)
    }

    pub fn with_grid(quant: Quantization, grid: usize) -> Self {
        let grid = grid.max(1);
        let reach = quant.cuts().iter().map(|c| c.unsigned_abs() as usize).max().unwrap_or(0);
        let kmax = reach + (12.0 / quant.delta()).ceil() as usize + 16;
        let tables = (0..=grid).map(|_| OnceLock::new()).collect();
        PricingKernel { quant, grid, kmax, tables }
    }

    pub fn quant(&self) -> &Quantization {
        &self.quant
    }

    pub fn beta(&self) -> f64 {
        self.quant.beta()
    }

    pub fn delta(&self) -> f64 {
        self.quant.delta()
    }

    pub fn grid_size(&self) -> usize {
        self.grid
    }

    /// Time of grid node `g`.
    pub fn node_time(&self, g: usize) -> f64 {
        if g >= self.grid {
            1.0
        } else {
            g as f64 / self.grid as f64
        }
    }

    fn node(&self, g: usize) -> &SkellamTable {
        self.tables[g].get_or_init(|| {
            let mu = self.beta() * (1.0 - self.node_time(g));
            SkellamTable::new(mu, self.kmax)
        })
    }

    /// Everything the kernel knows at time `t`.
    pub fn slice(&self, t: f64) -> KernelSlice<'_> {
        let t = t.clamp(0.0, 1.0);
        let g = ((t * self.grid as f64).ceil() as usize).min(self.grid);
        let s = self.node_time(g);
        let gap = self.beta() * (s - t).max(0.0);
        let q = if gap > 0.0 {
            let mut q = scaled_bessel_sequence(2.0 * gap, 0);
            while q.len() > 1 && q[q.len() - 1] < 1e-18 {
                q.pop();
            }
            q
        } else {
            vec![1.0]
        };
        KernelSlice { quant: &self.quant, table: self.node(g), q, mu: self.beta() * (1.0 - t) }
    }

    pub fn h(&self, bin: usize, level: i64, t: f64) -> f64 {
        self.slice(t).h(bin, level)
    }

    pub fn price(&self, level: i64, t: f64) -> f64 {
        self.slice(t).price(level)
    }

    /// `∫_t^1 (p(i+1, r) - p(i, r)) dr`.
    pub fn price_step_integral(&self, level: i64, t: f64) -> f64 {
        self.slice(t).price_step_integral(level)
    }

    /// `∫_{ta}^{tb} p(i, r) dr` for `ta <= tb`.
    pub fn price_integral(&self, level: i64, ta: f64, tb: f64) -> f64 {
        if tb <= ta {
            return 0.0;
        }
        self.slice(ta).price_integral_to_end(level) - self.slice(tb).price_integral_to_end(level)
    }
}

/// Kernel evaluated at one time `t`.
#[derive(Debug, Clone)]
pub struct KernelSlice<'a> {
    quant: &'a Quantization,
    table: &'a SkellamTable,
    q: Vec<f64>,
    mu: f64,
}

impl KernelSlice<'_> {
    /// Per-side Poisson mean `β(1-t)` of the remaining noise.
    pub fn mu(&self) -> f64 {
        self.mu
    }

    fn mix(&self, f: impl Fn(i64) -> f64) -> f64 {
        if self.q.len() == 1 {
            return f(0);
        }
        let mut s = self.q[0] * f(0);
        for (j, &w) in self.q.iter().enumerate().skip(1) {
            let j = j as i64;
            s += w * (f(j) + f(-j));
        }
        s
    }

    pub fn pmf(&self, k: i64) -> f64 {
        self.mix(|j| self.table.pmf(k - j))
    }

    /// `P(lo <= K <= hi)`.
    pub fn range(&self, lo: Option<i64>, hi: Option<i64>) -> f64 {
        self.mix(|j| self.table.range(lo.map(|l| l - j), hi.map(|h| h - j)))
    }

    /// `P(K >= k)`.
    pub fn tail(&self, k: i64) -> f64 {
        self.range(Some(k), None)
    }

    pub fn h(&self, bin: usize, level: i64) -> f64 {
        let lo = self.quant.lower(bin).map(|a| a - level);
        let hi = self.quant.upper(bin).map(|a| a - 1 - level);
        self.range(lo, hi)
    }

    pub fn h_all(&self, level: i64) -> Vec<f64> {
        (0..self.quant.n_bins()).map(|b| self.h(b, level)).collect()
    }

    pub fn price(&self, level: i64) -> f64 {
        let v = self.quant.values();
        let mut p = v[0];
        for (m, &a) in self.quant.cuts().iter().enumerate() {
            p += (v[m + 1] - v[m]) * self.tail(a - level);
        }
        p.clamp(v[0], v[v.len() - 1])
    }

    /// `p(i+1) - p(i)`.
    pub fn price_step(&self, level: i64) -> f64 {
        let v = self.quant.values();
        self.quant
            .cuts()
            .iter()
            .enumerate()
            .map(|(m, &a)| (v[m + 1] - v[m]) * self.pmf(a - level - 1))
            .sum()
    }

    fn stop1(&self, k: i64) -> f64 {
        self.mix(|j| self.table.stop1(k - j))
    }

    fn stop2(&self, k: i64) -> f64 {
        self.mix(|j| self.table.stop2(k - j))
    }

    /// `∫_t^1 P(K_{β(1-r)} = k) dr`.
    pub fn pmf_integral_to_end(&self, k: i64) -> f64 {
        self.stop1(k.abs()) / self.quant.beta()
    }

    /// `∫_t^1 P(K_{β(1-r)} >= k) dr`.
    pub fn tail_integral_to_end(&self, k: i64) -> f64 {
        let beta = self.quant.beta();
        if k >= 1 {
            self.stop2(k) / beta
        } else {
            (self.mu - self.stop2(1 - k)) / beta
        }
    }

    pub fn price_step_integral(&self, level: i64) -> f64 {
        let v = self.quant.values();
        self.quant
            .cuts()
            .iter()
            .enumerate()
            .map(|(m, &a)| (v[m + 1] - v[m]) * self.pmf_integral_to_end(a - level - 1))
            .sum()
    }

    /// `∫_t^1 p(i, r) dr`.
    pub fn price_integral_to_end(&self, level: i64) -> f64 {
        let v = self.quant.values();
        let mut s = v[0] * self.mu / self.quant.beta();
        for (m, &a) in self.quant.cuts().iter().enumerate() {
            s += (v[m + 1] - v[m]) * self.tail_integral_to_end(a - level);
        }
        s
    }
}

/// Gaussian limit of the kernel on boundaries `a_n^0`.
#[derive(Debug, Clone)]
pub struct GaussianKernel {
    values: Vec<f64>,
    bounds: Vec<f64>,
}

impl GaussianKernel {
    pub fn new(dist: &AssetDistribution) -> Self {
        GaussianKernel {
            values: dist.values.clone(),
            bounds: crate::quantizer::gaussian_boundaries(dist),
        }
    }

    pub fn boundaries(&self) -> &[f64] {
        &self.bounds
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn n_bins(&self) -> usize {
        self.values.len()
    }

    pub fn contains(&self, bin: usize, y: f64) -> bool {
        y >= self.bounds[bin] && y < self.bounds[bin + 1]
    }

    pub fn h(&self, bin: usize, y: f64, t: f64) -> f64 {
        let (lo, hi) = (self.bounds[bin], self.bounds[bin + 1]);
        if t >= 1.0 {
            return if y >= lo && y < hi { 1.0 } else { 0.0 };
        }
        let s = (1.0 - t).sqrt();
        normal::interval((lo - y) / s, (hi - y) / s)
    }

    pub fn price(&self, y: f64, t: f64) -> f64 {
        (0..self.n_bins()).map(|b| self.values[b] * self.h(b, y, t)).sum()
    }

    /// `∂_y p^0(y, t)`; undefined at `t = 1`.
    pub fn price_dy(&self, y: f64, t: f64) -> Result<f64> {
        if !(t < 1.0) {
            return Err(Error::InvalidArgument("price derivative is singular at t = 1".into()));
        }
        let s = (1.0 - t).sqrt();
        let dens = |a: f64| if a.is_finite() { normal::pdf((a - y) / s) } else { 0.0 };
        Ok((0..self.n_bins())
            .map(|b| self.values[b] * (dens(self.bounds[b]) - dens(self.bounds[b + 1])) / s)
            .sum())
    }
}
