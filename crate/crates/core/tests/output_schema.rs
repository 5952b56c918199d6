use gm_bridge::convergence::{loss_convergence, occupation_convergence, strategy_convergence, Conditioning, Settings};
use gm_bridge::output::*;
use gm_bridge::sim::{simulate_constructive, MarketParams};
use gm_bridge::{quantize, AssetDistribution, Error, PricingKernel, RngPolicy};

fn parse(t: &Table) -> Vec<Vec<String>> {
    let text = t.to_string_unstamped();
    let mut r = csv::Reader::from_reader(text.as_bytes());
    assert_eq!(r.headers().unwrap().iter().collect::<Vec<_>>(), t.header);
    r.records().map(|x| x.unwrap().iter().map(String::from).collect()).collect()
}

fn settings() -> Settings {
    let mut s = Settings::new(100, 9);
    s.grid = 128;
    s
}

#[test]
fn figure1_schema() {
    let pts = loss_convergence(&AssetDistribution::three_point(), &[0.5, 0.4], &settings()).unwrap();
    let t = figure1_table(&pts);
    assert_eq!(t.header, FIGURE1_HEADER);
    let rows = parse(&t);
    assert_eq!(rows.len(), 8);
    for r in &rows {
        let delta: f64 = r[0].parse().unwrap();
        assert!(delta == 0.5 || delta == 0.4);
        assert!(r[1] == "mixture" || (1..=3).contains(&r[1].parse::<usize>().unwrap()));
        for x in &r[2..] {
            let v: f64 = x.parse().unwrap();
            assert!(v.is_finite() && v >= 0.0);
        }
    }
}

#[test]
fn profit_schema_uses_one_based_bins() {
    let pts = loss_convergence(&AssetDistribution::three_point(), &[0.5], &settings()).unwrap();
    let t = profit_table(&pts[0].bins);
    assert_eq!(t.header, PROFIT_HEADER);
    let rows = parse(&t);
    assert_eq!(rows.iter().map(|r| r[1].as_str()).collect::<Vec<_>>(), ["1", "2", "3"]);
    // no constructive paths were run, so realized columns are nan
    assert!(rows.iter().all(|r| r[6] == "nan" && r[7] == "nan"));
}

#[test]
fn occupation_and_ks_schema() {
    let d = AssetDistribution::three_point();
    let occ = occupation_convergence(&d, &[0.5], Conditioning::Unconditioned, 1.0, &settings()).unwrap();
    let t = occupation_table(&occ);
    assert_eq!(t.header, OCCUPATION_HEADER);
    assert_eq!(parse(&t)[0][1], "all");
    let occ = occupation_convergence(&d, &[0.5], Conditioning::Bin(1), 1.0, &settings()).unwrap();
    assert_eq!(parse(&occupation_table(&occ)).len(), 2);
    let ks = strategy_convergence(&d, &[0.5], 1, &[0.5, 1.0], 1e-3, &settings()).unwrap();
    let t = ks_table(&ks);
    assert_eq!(t.header, KS_HEADER);
    assert_eq!(parse(&t).len(), 2);
}

#[test]
fn event_log_and_kernel_dump() {
    let k = PricingKernel::with_grid(quantize(&AssetDistribution::three_point(), 0.5).unwrap(), 64);
    let p = simulate_constructive(&MarketParams::new(&k), 1, &mut RngPolicy::new(1).stream_for(0));
    let t = event_table(&p, 0.5);
    assert_eq!(t.header, EVENT_HEADER);
    let rows = parse(&t);
    assert_eq!(rows.len(), p.events.len());
    let total: f64 = rows.iter().map(|r| r[3].parse::<f64>().unwrap()).sum();
    assert!((total - p.realized_profit.unwrap()).abs() < 1e-9);

    let t = kernel_table(&k, -2..=2, &[0.0, 1.0]);
    assert_eq!(t.header, ["y", "t", "bin", "h", "p"]);
    assert_eq!(parse(&t).len(), 5 * 2 * 3);
}

#[test]
fn error_json_shape() {
    let v = error_json(&Error::RunawayRate { rate: 0.02 });
    assert_eq!(v["error"], "runaway_rate");
    assert!(v["message"].as_str().unwrap().contains("0.0200"));
}

#[test]
fn stamped_files_keep_header_second() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("nested/x.csv");
    Table::new(&KYLE_HEADER).write(&path, Some("unix=1")).unwrap();
    let text = std::fs::read_to_string(path).unwrap();
    assert_eq!(text, "# generated unix=1\nbin,deltaT,profitMean,profitSE,hitRate,paths\n");
}
