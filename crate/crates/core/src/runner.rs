//! Subcommand drivers behind the `gm-bridge` binary.
//!
//! Each driver writes its artifacts under the configured output directory and returns a
//! JSON summary for stdout.

use std::path::{Path, PathBuf};

use serde_json::{json, Value};

use crate::config::Config;
use crate::convergence::{
    loss_convergence, occupation_convergence, strategy_convergence, Conditioning, Settings,
};
use crate::error::{Error, Result};
use crate::kernel::{GaussianKernel, PricingKernel};
use crate::kyle::kyle_profit;
use crate::output::{self, Table};
use crate::profit::{l_estimate, loss_bound};
use crate::quantizer::quantize;
use crate::rng::RngPolicy;
use crate::sim::{simulate_conditioned, simulate_constructive, Diagnostics, MarketParams, PathRecord};
use crate::stats::Estimate;

/// Fraction of runaway paths above which a batch is rejected.
pub const RUNAWAY_LIMIT: f64 = 0.01;

/// Observation times of the marginal comparison.
pub const KS_TIMES: [f64; 4] = [0.25, 0.5, 0.75, 1.0];

pub struct Runner {
    pub config: Config,
    stamp: Option<String>,
}

impl Runner {
    pub fn new(config: Config) -> Self {
        let stamp = config.outputs.timestamp.then(output::timestamp);
        Runner { config, stamp }
    }

    fn out_dir(&self) -> &Path {
        &self.config.outputs.dir
    }

    fn write(&self, name: &str, table: &Table) -> Result<PathBuf> {
        let path = self.out_dir().join(name);
        table.write(&path, self.stamp.as_deref())?;
        Ok(path)
    }

    fn write_json(&self, name: &str, value: &Value) -> Result<PathBuf> {
        std::fs::create_dir_all(self.out_dir())?;
        let path = self.out_dir().join(name);
        std::fs::write(&path, serde_json::to_string_pretty(value)? + "\n")?;
        Ok(path)
    }

    fn policy(&self) -> RngPolicy {
        RngPolicy::new(self.config.mc.seed)
    }

    fn settings(&self) -> Settings {
        let m = &self.config.market;
        Settings {
            paths: self.config.mc.paths,
            end_epsilon: m.end_epsilon,
            max_events: m.max_events,
            grid: m.grid_size,
            policy: self.policy(),
        }
    }

    fn kernel(&self, delta: f64) -> Result<PricingKernel> {
        Ok(PricingKernel::with_grid(quantize(&self.config.distribution, delta)?, self.config.market.grid_size))
    }

    pub fn run(&self, command: &str) -> Result<Value> {
        match command {
            "quantize" => self.quantize(),
            "price" => self.price(),
            "simulate" => self.simulate(),
            "loss-bound" => self.loss_bound(),
            "kyle" => self.kyle(),
            "converge" => self.converge(),
            "selftest" => self.selftest(),
            other => Err(Error::InvalidArgument(format!("unknown subcommand {other}"))),
        }
    }

    pub fn quantize(&self) -> Result<Value> {
        let mut all = Vec::new();
        for &d in &self.config.market.deltas {
            all.push(quantize(&self.config.distribution, d)?.to_json());
        }
        let v = Value::Array(all);
        self.write_json("quantization.json", &v)?;
        Ok(v)
    }

    /// `h_n` and `p` on the levels spanning the boundaries, at a few times.
    pub fn price(&self) -> Result<Value> {
        let times = [0.0, 0.25, 0.5, 0.75, 0.9, 0.99, 1.0];
        let mut files = Vec::new();
        for &d in &self.config.market.deltas {
            let k = self.kernel(d)?;
            let cuts = k.quant().cuts();
            let pad = (3.0 / d).ceil() as i64;
            let lo = cuts.first().copied().unwrap_or(0).min(0) - pad;
            let hi = cuts.last().copied().unwrap_or(0).max(0) + pad;
            let path = self.write(&format!("kernel_delta{d}.csv"), &output::kernel_table(&k, lo..=hi, &times))?;
            files.push(path.display().to_string());
        }
        Ok(json!({ "files": files }))
    }

    /// Both simulation modes per bin: `L` from rejection sampling, realized profit and
    /// diagnostics from the constructive sampler.
    pub fn simulate(&self) -> Result<Value> {
        let mut rows = Vec::new();
        let mut diags = Vec::new();
        let n = self.config.mc.paths;
        let mut worst: f64 = 0.0;
        for &d in &self.config.market.deltas {
            let k = self.kernel(d)?;
            let params = MarketParams::new(&k)
                .with_end_epsilon(self.config.market.end_epsilon)
                .with_max_events(self.config.market.max_events);
            params.validate()?;
            for bin in 0..k.quant().n_bins() {
                let pa: Vec<PathRecord> = self
                    .policy()
                    .derive(&format!("simulate/a/{d:e}/{bin}"))
                    .map_paths(n, |_, rng| simulate_conditioned(&params, bin, rng))
                    .into_iter()
                    .collect::<Result<_>>()?;
                let pb: Vec<PathRecord> = self
                    .policy()
                    .derive(&format!("simulate/b/{d:e}/{bin}"))
                    .map_paths(n, |_, rng| simulate_constructive(&params, bin, rng));
                let realized: Vec<f64> = pb.iter().filter_map(|p| p.realized_profit).collect();
                let summary = loss_bound(&k, bin, l_estimate(&k, bin, &pa), Some(Estimate::from_samples(&realized)));
                let diag = Diagnostics::from_paths(&pb);
                worst = worst.max(diag.runaway_rate());
                diags.push(json!({ "delta": d, "bin": bin + 1, "diagnostics": diag, "hitRate": diag.hit_rate() }));
                if self.config.outputs.event_log {
                    for (i, p) in pb.iter().take(self.config.outputs.event_log_paths).enumerate() {
                        self.write(&format!("events_delta{d}_bin{}_path{i}.csv", bin + 1), &output::event_table(p, d))?;
                    }
                }
                rows.push(summary);
            }
        }
        self.write("simulate.csv", &output::profit_table(&rows))?;
        let v = json!({ "diagnostics": diags });
        self.write_json("diagnostics.json", &v)?;
        if worst > RUNAWAY_LIMIT {
            return Err(Error::RunawayRate { rate: worst });
        }
        Ok(v)
    }

    pub fn loss_bound(&self) -> Result<Value> {
        let pts = loss_convergence(&self.config.distribution, &self.config.market.deltas, &self.settings())?;
        let rows: Vec<_> = pts.iter().flat_map(|p| p.bins.iter().copied()).collect();
        self.write("loss_bound.csv", &output::profit_table(&rows))?;
        Ok(json!({ "mixture": pts.iter().map(|p| json!({ "delta": p.delta, "mean": p.mixture.mean, "se": p.mixture.se })).collect::<Vec<_>>() }))
    }

    /// Kyle profits per bin and for the mixture.
    pub fn kyle(&self) -> Result<Value> {
        let dist = &self.config.distribution;
        let g = GaussianKernel::new(dist);
        let m = &self.config.market;
        let n = self.config.mc.paths;
        let mut rows = Vec::new();
        for bin in 0..g.n_bins() {
            let pol = self.policy().derive(&format!("kyle/{bin}"));
            rows.push(kyle_profit(&g, &dist.probs, Some(bin), m.kyle_dt, m.end_epsilon, n, &pol)?.0);
        }
        let pol = self.policy().derive("kyle/mixture");
        rows.push(kyle_profit(&g, &dist.probs, None, m.kyle_dt, m.end_epsilon, n, &pol)?.0);
        self.write("kyle.csv", &output::kyle_table(&rows))?;
        Ok(serde_json::to_value(&rows)?)
    }

    /// Loss bounds (figure1.csv), occupation times and marginal KS distances.
    pub fn converge(&self) -> Result<Value> {
        let dist = &self.config.distribution;
        let deltas = &self.config.market.deltas;
        let s = self.settings();
        let pts = loss_convergence(dist, deltas, &s)?;
        self.write("figure1.csv", &output::figure1_table(&pts))?;

        let mut occ = occupation_convergence(dist, deltas, Conditioning::Unconditioned, 1.0, &s)?;
        let n_bins = dist.len();
        for bin in 1..n_bins.saturating_sub(1) {
            occ.extend(occupation_convergence(dist, deltas, Conditioning::Bin(bin), 1.0, &s)?);
        }
        self.write("occupation.csv", &output::occupation_table(&occ))?;

        let mut ks = Vec::new();
        for bin in 0..n_bins {
            ks.extend(strategy_convergence(dist, deltas, bin, &KS_TIMES, self.config.market.kyle_dt, &s)?);
        }
        self.write("ks.csv", &output::ks_table(&ks))?;
        Ok(json!({
            "mixture": pts.iter().map(|p| json!({ "delta": p.delta, "mean": p.mixture.mean, "se": p.mixture.se })).collect::<Vec<_>>(),
            "files": ["figure1.csv", "occupation.csv", "ks.csv"],
        }))
    }

    pub fn selftest(&self) -> Result<Value> {
        let report = crate::selftest::run(&self.config.distribution, self.config.mc.seed)?;
        self.write_json("selftest.json", &serde_json::to_value(&report)?)?;
        let v = serde_json::to_value(&report)?;
        if let Some(g) = report.groups.iter().find(|g| !g.pass) {
            return Err(Error::SelfTest(format!("group {} failed: {}", g.name, g.detail)));
        }
        Ok(v)
    }
}
