//! Lattice quantization of a discrete asset value.

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::normal;
use crate::skellam::SkellamTable;

/// Law of the asset value: ascending `values` with probabilities `probs`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AssetDistribution {
    pub values: Vec<f64>,
    pub probs: Vec<f64>,
}

impl AssetDistribution {
    pub fn new(values: Vec<f64>, probs: Vec<f64>) -> Result<Self> {
        let d = AssetDistribution { values, probs };
        d.validate()?;
        Ok(d)
    }

    /// Values (1, 2, 3) with probabilities (0.55, 0.35, 0.1).
    pub fn three_point() -> Self {
        AssetDistribution { values: vec![1.0, 2.0, 3.0], probs: vec![0.55, 0.35, 0.1] }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidDistribution(m.to_string()));
        if self.values.is_empty() {
            return bad("at least one value is required");
        }
        if self.values.len() != self.probs.len() {
            return bad("values and probs differ in length");
        }
        if self.values.iter().any(|v| !v.is_finite()) {
            return bad("values must be finite");
        }
        if self.values.windows(2).any(|w| w[0] >= w[1]) {
            return bad("values must be strictly increasing");
        }
        if self.values.len() == 1 {
            if (self.probs[0] - 1.0).abs() > 1e-12 {
                return bad("a single value must carry probability 1");
            }
            return Ok(());
        }
        if self.probs.iter().any(|&p| !(p > 0.0 && p < 1.0)) {
            return bad("each probability must lie in (0, 1)");
        }
        let total: f64 = self.probs.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return bad("probabilities must sum to 1");
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().zip(&self.probs).map(|(v, p)| v * p).sum()
    }
}

/// Which side of its bin's mid level the demand sits on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    /// At or below the lower mid level: the insider buys.
    Buy,
    /// At or above the upper mid level: the insider sells.
    Sell,
}

/// Quantized asset law on the lattice `δℤ`.
///
/// Levels are integers `i` standing for the demand `i·δ`. Bins are zero-based:
/// bin `b` covers levels `[cut(b), cut(b+1))` with infinite outer ends.
#[derive(Debug, Clone, PartialEq)]
pub struct Quantization {
    delta: f64,
    beta: f64,
    values: Vec<f64>,
    cuts: Vec<i64>,
    bin_probs: Vec<f64>,
}

impl Quantization {
    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn value(&self, bin: usize) -> f64 {
        self.values[bin]
    }

    pub fn n_bins(&self) -> usize {
        self.values.len()
    }

    /// Interior boundaries as lattice levels.
    pub fn cuts(&self) -> &[i64] {
        &self.cuts
    }

    pub fn bin_probs(&self) -> &[f64] {
        &self.bin_probs
    }

    /// First level of `bin`, `None` for the unbounded first bin.
    pub fn lower(&self, bin: usize) -> Option<i64> {
        if bin == 0 {
            None
        } else {
            Some(self.cuts[bin - 1])
        }
    }

    /// One past the last level of `bin`, `None` for the unbounded last bin.
    pub fn upper(&self, bin: usize) -> Option<i64> {
        self.cuts.get(bin).copied()
    }

    /// Boundaries `a_1 = -inf < a_2 < ... < a_{N+1} = +inf` as demand values.
    pub fn boundaries(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.cuts.len() + 2);
        out.push(f64::NEG_INFINITY);
        out.extend(self.cuts.iter().map(|&c| c as f64 * self.delta));
        out.push(f64::INFINITY);
        out
    }

    pub fn contains(&self, bin: usize, level: i64) -> bool {
        self.lower(bin).is_none_or(|l| level >= l) && self.upper(bin).is_none_or(|u| level < u)
    }

    pub fn bin_of(&self, level: i64) -> usize {
        self.cuts.partition_point(|&c| c <= level)
    }

    /// Terminal price `P(y)`: the value of the bin holding `level`.
    pub fn terminal_price(&self, level: i64) -> f64 {
        self.values[self.bin_of(level)]
    }

    /// `(⌊m⌋, ⌈m⌉)` as levels for interior bins, `None` for the outer bins.
    pub fn mid_levels(&self, bin: usize) -> Option<(i64, i64)> {
        let (lo, hi) = (self.lower(bin)?, self.upper(bin)?);
        let floor = (lo + hi - 2).div_euclid(2);
        Some((floor, floor + 1))
    }

    /// Mid levels as demand values with the infinite convention for outer bins:
    /// the first bin is all sell region, the last (of two or more) all buy region.
    pub fn mid_values(&self, bin: usize) -> (f64, f64) {
        match self.mid_levels(bin) {
            Some((a, b)) => (a as f64 * self.delta, b as f64 * self.delta),
            None if bin == 0 => (f64::NEG_INFINITY, f64::NEG_INFINITY),
            None => (f64::INFINITY, f64::INFINITY),
        }
    }

    pub fn side(&self, bin: usize, level: i64) -> Side {
        match self.mid_levels(bin) {
            Some((floor, _)) if level <= floor => Side::Buy,
            Some(_) => Side::Sell,
            None if bin == 0 => Side::Sell,
            None => Side::Buy,
        }
    }

    pub fn to_json(&self) -> Value {
        let ext = |x: f64| {
            if x == f64::INFINITY {
                json!("inf")
            } else if x == f64::NEG_INFINITY {
                json!("-inf")
            } else {
                json!(x)
            }
        };
        let mids: Vec<(f64, f64)> = (0..self.n_bins()).map(|b| self.mid_values(b)).collect();
        json!({
            "delta": self.delta,
            "beta": self.beta,
            "values": self.values,
            "boundaries": self.boundaries().into_iter().map(ext).collect::<Vec<_>>(),
            "boundaryLevels": self.cuts,
            "binProbs": self.bin_probs,
            "midLower": mids.iter().map(|m| ext(m.0)).collect::<Vec<_>>(),
            "midUpper": mids.iter().map(|m| ext(m.1)).collect::<Vec<_>>(),
        })
    }
}

/// Builds the δ-lattice quantization of `dist`.
///
/// Each boundary is the smallest lattice point whose Skellam CDF at `μ = β` reaches
/// the cumulative probability. From the second interior boundary on, a boundary is
/// moved up one step when it has the same parity as its predecessor would require for
/// an on-lattice mid level.
pub fn quantize(dist: &AssetDistribution, delta: f64) -> Result<Quantization> {
    dist.validate()?;
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(Error::InvalidArgument(format!("delta must be positive, got {delta}")));
    }
    let beta = 0.5 / (delta * delta);
    let table = SkellamTable::new(beta, 0);
    let reach = table.support() as i64 + 1;
    let n = dist.len();
    let mut cuts: Vec<i64> = Vec::with_capacity(n.saturating_sub(1));
    let mut cum = 0.0;
    for (j, p) in dist.probs.iter().take(n.saturating_sub(1)).enumerate() {
        cum += p;
        let (mut lo, mut hi) = (-reach, reach);
        while lo < hi {
            let mid = lo + (hi - lo).div_euclid(2);
            if table.cdf(mid) >= cum {
                hi = mid;
            } else {
                lo = mid + 1;
            }
        }
        let mut k = lo;
        if let Some(&prev) = cuts.last() {
            if (prev + k).rem_euclid(2) != 0 {
                k += 1;
            }
            if k <= prev {
                return Err(Error::Unresolvable { delta, index: j + 2 });
            }
        }
        cuts.push(k);
    }
    let mut bin_probs = Vec::with_capacity(n);
    for b in 0..n {
        let lo = if b == 0 { None } else { Some(cuts[b - 1]) };
        let hi = cuts.get(b).map(|&c| c - 1);
        let p = table.range(lo, hi);
        if p <= 0.0 {
            return Err(Error::Unresolvable { delta, index: b + 1 });
        }
        bin_probs.push(p);
    }
    Ok(Quantization { delta, beta, values: dist.values.clone(), cuts, bin_probs })
}

/// Limit boundaries `a_n^0 = Φ^{-1}(p_1 + ... + p_{n-1})` with infinite ends.
pub fn gaussian_boundaries(dist: &AssetDistribution) -> Vec<f64> {
    let mut out = vec![f64::NEG_INFINITY];
    let mut cum = 0.0;
    for p in dist.probs.iter().take(dist.len().saturating_sub(1)) {
        cum += p;
        out.push(normal::quantile(cum));
    }
    out.push(f64::INFINITY);
    out
}
