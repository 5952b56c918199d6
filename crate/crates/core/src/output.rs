//! CSV and JSON artifacts.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::convergence::{KsRow, LossPoint, OccupationRow};
use crate::error::Result;
use crate::kernel::PricingKernel;
use crate::kyle::KyleSummary;
use crate::profit::ProfitSummary;
use crate::sim::PathRecord;

pub const PROFIT_HEADER: [&str; 10] =
    ["delta", "bin", "U0", "USgap", "Lhat", "Lhat_se", "realized", "realized_se", "lossBound", "paths"];
pub const KYLE_HEADER: [&str; 6] = ["bin", "deltaT", "profitMean", "profitSE", "hitRate", "paths"];
pub const FIGURE1_HEADER: [&str; 6] = ["delta", "bin", "lossBound", "lossBound_se", "mixtureBound", "mixtureBound_se"];
pub const OCCUPATION_HEADER: [&str; 11] = [
    "delta", "bin", "level", "t", "occupation", "occupation_se", "identityGap", "identity_se", "reference", "paths", "relError",
];
pub const KS_HEADER: [&str; 7] = ["delta", "bin", "t", "statistic", "critical", "pValue", "paths"];
pub const EVENT_HEADER: [&str; 4] = ["time", "yBefore", "mark", "profitIncrement"];
pub const KERNEL_HEADER: [&str; 4] = ["y", "t", "h", "p"];

/// Float with 17 significant digits; infinities as `inf`/`-inf`.
pub fn fmt_f64(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x == f64::INFINITY {
        "inf".into()
    } else if x == f64::NEG_INFINITY {
        "-inf".into()
    } else {
        format!("{x:.16e}")
    }
}

fn bin_label(bin: Option<usize>) -> String {
    bin.map_or_else(|| "mixture".to_string(), |b| (b + 1).to_string())
}

/// Table with a fixed header. Bins are written one-based.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Table { header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        assert_eq!(row.len(), self.header.len(), "row width must match the header");
        self.rows.push(row);
    }

    /// Writes the table, preceded by a `# generated` line when `stamp` is set.
    pub fn write_to<W: Write>(&self, out: W, stamp: Option<&str>) -> Result<()> {
        let mut out = out;
        if let Some(s) = stamp {
            writeln!(out, "# generated {s}")?;
        }
        let mut w = csv::Writer::from_writer(out);
        w.write_record(&self.header).map_err(csv_err)?;
        for r in &self.rows {
            w.write_record(r).map_err(csv_err)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn write(&self, path: &Path, stamp: Option<&str>) -> Result<()> {
        if let Some(dir) = path.parent() {
            std::fs::create_dir_all(dir)?;
        }
        self.write_to(BufWriter::new(File::create(path)?), stamp)
    }

    pub fn to_string_unstamped(&self) -> String {
        let mut buf = Vec::new();
        self.write_to(&mut buf, None).expect("writing to memory cannot fail");
        String::from_utf8(buf).expect("csv output is utf-8")
    }
}

fn csv_err(e: csv::Error) -> crate::error::Error {
    crate::error::Error::Io(std::io::Error::other(e))
}

pub fn timestamp() -> String {
    let secs = std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    format!("unix={secs}")
}

pub fn profit_table(rows: &[ProfitSummary]) -> Table {
    let mut t = Table::new(&PROFIT_HEADER);
    for r in rows {
        t.push(vec![
            fmt_f64(r.delta),
            bin_label(Some(r.bin)),
            fmt_f64(r.u0),
            fmt_f64(r.us_gap),
            fmt_f64(r.l_hat),
            fmt_f64(r.l_se),
            fmt_f64(r.realized.unwrap_or(f64::NAN)),
            fmt_f64(r.realized_se.unwrap_or(f64::NAN)),
            fmt_f64(r.loss_bound),
            r.paths.to_string(),
        ]);
    }
    t
}

pub fn kyle_table(rows: &[KyleSummary]) -> Table {
    let mut t = Table::new(&KYLE_HEADER);
    for r in rows {
        t.push(vec![
            bin_label(r.bin),
            fmt_f64(r.dt),
            fmt_f64(r.profit_mean),
            fmt_f64(r.profit_se),
            fmt_f64(r.hit_rate),
            r.paths.to_string(),
        ]);
    }
    t
}

/// One row per (δ, bin) plus one `mixture` row per δ.
pub fn figure1_table(points: &[LossPoint]) -> Table {
    let mut t = Table::new(&FIGURE1_HEADER);
    for p in points {
        let (m, mse) = (fmt_f64(p.mixture.mean), fmt_f64(p.mixture.se));
        for b in &p.bins {
            t.push(vec![
                fmt_f64(p.delta),
                bin_label(Some(b.bin)),
                fmt_f64(b.loss_bound),
                fmt_f64(b.loss_bound_se()),
                m.clone(),
                mse.clone(),
            ]);
        }
        t.push(vec![fmt_f64(p.delta), bin_label(None), m.clone(), mse.clone(), m.clone(), mse.clone()]);
    }
    t
}

pub fn occupation_table(rows: &[OccupationRow]) -> Table {
    let mut t = Table::new(&OCCUPATION_HEADER);
    for r in rows {
        let rel = if r.reference.is_finite() { (r.occupation - r.reference) / r.reference } else { f64::NAN };
        t.push(vec![
            fmt_f64(r.delta),
            r.bin.map_or_else(|| "all".to_string(), |b| (b + 1).to_string()),
            fmt_f64(r.level),
            fmt_f64(r.t),
            fmt_f64(r.occupation),
            fmt_f64(r.occupation_se),
            fmt_f64(r.identity_gap),
            fmt_f64(r.identity_se),
            fmt_f64(r.reference),
            r.paths.to_string(),
            fmt_f64(rel),
        ]);
    }
    t
}

pub fn ks_table(rows: &[KsRow]) -> Table {
    let mut t = Table::new(&KS_HEADER);
    for r in rows {
        t.push(vec![
            fmt_f64(r.delta),
            bin_label(Some(r.bin)),
            fmt_f64(r.t),
            fmt_f64(r.statistic),
            fmt_f64(r.critical),
            fmt_f64(r.p_value),
            r.paths.to_string(),
        ]);
    }
    t
}

pub fn event_table(path: &PathRecord, delta: f64) -> Table {
    let mut t = Table::new(&EVENT_HEADER);
    for e in &path.events {
        t.push(vec![fmt_f64(e.time), fmt_f64(e.level_before as f64 * delta), e.mark.to_string(), fmt_f64(e.profit)]);
    }
    t
}

/// `h_n` and `p` over lattice levels and times, one row per (level, time, bin).
pub fn kernel_table(kernel: &PricingKernel, levels: std::ops::RangeInclusive<i64>, times: &[f64]) -> Table {
    let mut header: Vec<&str> = KERNEL_HEADER.to_vec();
    header.insert(2, "bin");
    let mut t = Table::new(&header);
    for &time in times {
        let s = kernel.slice(time);
        for level in levels.clone() {
            let p = s.price(level);
            for (b, h) in s.h_all(level).into_iter().enumerate() {
                t.push(vec![
                    fmt_f64(level as f64 * kernel.delta()),
                    fmt_f64(time),
                    (b + 1).to_string(),
                    fmt_f64(h),
                    fmt_f64(p),
                ]);
            }
        }
    }
    t
}

/// Machine-readable failure report.
pub fn error_json(err: &crate::error::Error) -> serde_json::Value {
    serde_json::json!({ "error": err.kind(), "message": err.to_string() })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_format() {
        assert_eq!(fmt_f64(0.1), "1.0000000000000001e-1");
        assert_eq!(fmt_f64(f64::NEG_INFINITY), "-inf");
        assert_eq!(fmt_f64(f64::NAN), "nan");
        let x = 0.512_261_794_635_934_4;
        assert_eq!(fmt_f64(x).parse::<f64>().unwrap(), x);
    }

    #[test]
    fn header_always_written() {
        let t = Table::new(&KYLE_HEADER);
        assert_eq!(t.to_string_unstamped(), "bin,deltaT,profitMean,profitSE,hitRate,paths\n");
        let mut buf = Vec::new();
        t.write_to(&mut buf, Some("x")).unwrap();
        assert!(String::from_utf8(buf).unwrap().starts_with("# generated x\n"));
    }
}
