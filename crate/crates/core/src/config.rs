//! JSON run configuration shared by every subcommand.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quantizer::AssetDistribution;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub distribution: AssetDistribution,
    #[serde(default)]
    pub market: MarketSection,
    #[serde(default)]
    pub mc: McSection,
    #[serde(default)]
    pub outputs: OutputSection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "camelCase")]
pub struct MarketSection {
    pub deltas: Vec<f64>,
    pub end_epsilon: f64,
    pub max_events: usize,
    pub grid_size: usize,
    pub kyle_dt: f64,
}

impl Default for MarketSection {
    fn default() -> Self {
        MarketSection {
            deltas: vec![0.4, 0.2, 0.1, 0.05],
            end_epsilon: crate::sim::DEFAULT_END_EPSILON,
            max_events: crate::sim::DEFAULT_MAX_EVENTS,
            grid_size: crate::kernel::DEFAULT_GRID,
            kyle_dt: 1e-4,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "camelCase")]
pub struct McSection {
    pub paths: usize,
    pub seed: u64,
    /// Worker threads; `None` uses the available parallelism.
    pub workers: Option<usize>,
}

impl Default for McSection {
    fn default() -> Self {
        McSection { paths: 10_000, seed: 20_240_601, workers: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "camelCase")]
pub struct OutputSection {
    pub dir: PathBuf,
    /// Write a `# generated ...` first line into CSV files.
    pub timestamp: bool,
    /// Write per-path event logs from `simulate`.
    pub event_log: bool,
    /// Number of per-path event logs to write when enabled.
    pub event_log_paths: usize,
}

impl Default for OutputSection {
    fn default() -> Self {
        OutputSection { dir: PathBuf::from("out"), timestamp: true, event_log: false, event_log_paths: 5 }
    }
}

impl Config {
    pub fn three_point() -> Self {
        Config {
            distribution: AssetDistribution::three_point(),
            market: MarketSection::default(),
            mc: McSection::default(),
            outputs: OutputSection::default(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let c: Config = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        c.validate()?;
        Ok(c)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<()> {
        self.distribution.validate()?;
        let m = &self.market;
        if m.deltas.is_empty() || m.deltas.iter().any(|d| !(*d > 0.0 && d.is_finite())) {
            return Err(Error::Config("market.deltas must be a nonempty list of positive numbers".into()));
        }
        if !(m.end_epsilon > 0.0 && m.end_epsilon <= 0.01) {
            return Err(Error::Config("market.endEpsilon must lie in (0, 0.01]".into()));
        }
        if m.max_events < 10_000 {
            return Err(Error::Config("market.maxEvents must be at least 10000".into()));
        }
        if m.grid_size == 0 {
            return Err(Error::Config("market.gridSize must be positive".into()));
        }
        if !(m.kyle_dt > 0.0 && m.kyle_dt <= 1e-3) {
            return Err(Error::Config("market.kyleDt must lie in (0, 1e-3]".into()));
        }
        if self.mc.paths == 0 {
            return Err(Error::Config("mc.paths must be positive".into()));
        }
        if self.mc.workers == Some(0) {
            return Err(Error::Config("mc.workers must be positive".into()));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_gets_defaults() {
        let c = Config::from_json(r#"{"distribution": {"values": [1, 2], "probs": [0.5, 0.5]}}"#).unwrap();
        assert_eq!(c.market.deltas, vec![0.4, 0.2, 0.1, 0.05]);
        assert_eq!(c.mc.paths, 10_000);
    }

    #[test]
    fn schema_violations() {
        assert!(Config::from_json(r#"{"distribution": {"values": [1], "probs": [1]}, "bogus": 1}"#).is_err());
        assert!(Config::from_json(r#"{"distribution": {"values": [2, 1], "probs": [0.5, 0.5]}}"#).is_err());
        let bad_eps = r#"{"distribution": {"values": [1], "probs": [1]}, "market": {"deltas": [0.1], "endEpsilon": 0.5, "maxEvents": 100000, "gridSize": 64, "kyleDt": 0.001}}"#;
        assert!(matches!(Config::from_json(bad_eps), Err(Error::Config(_))));
    }

    #[test]
    fn roundtrip() {
        let c = Config::three_point();
        let back = Config::from_json(&serde_json::to_string(&c).unwrap()).unwrap();
        assert_eq!(c, back);
    }
}
