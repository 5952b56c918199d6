mod common;

use common::{ln_factorials, skellam_series};
use gm_bridge::skellam::{scaled_bessel_i, skellam_pmf, SkellamTable};

fn max_rel_error(mu: f64, lnf: &[f64]) -> f64 {
    let mut worst = 0.0f64;
    for k in -200..=200 {
        let want = skellam_series(k, mu, lnf);
        let got = skellam_pmf(k, mu);
        if want < 1e-290 {
            assert!(got < 1e-280, "mu {mu} k {k}: {got} where the series underflows");
            continue;
        }
        worst = worst.max((got - want).abs() / want);
    }
    worst
}

#[test]
fn pmf_matches_convolution_series_small_mean() {
    let lnf = ln_factorials(2000);
    for mu in [1e-3, 0.05, 0.5, 1.0, 3.7, 12.5, 50.0] {
        let e = max_rel_error(mu, &lnf);
        assert!(e < 1e-12, "mu {mu}: {e:e}");
    }
}

#[test]
fn pmf_matches_convolution_series_large_mean() {
    let lnf = ln_factorials(30_000);
    for mu in [200.0, 1250.0, 1e4] {
        let e = max_rel_error(mu, &lnf);
        assert!(e < 1e-9, "mu {mu}: {e:e}");
    }
}

#[test]
fn bessel_known_values() {
    // e^{-x} I_n(x) reference values
    assert!((scaled_bessel_i(0, 1.0) - 0.465_759_607_593_640_6).abs() < 1e-15);
    assert!((scaled_bessel_i(1, 1.0) - 0.207_910_415_349_708_4).abs() < 1e-15);
    assert!((scaled_bessel_i(2, 10.0) - 0.103_580_800_886_537_5).abs() < 1e-14);
}

#[test]
fn stopping_sums_match_direct_sums() {
    let lnf = ln_factorials(2000);
    for mu in [0.3, 4.0, 40.0] {
        let t = SkellamTable::new(mu, 400);
        for k in -30i64..=30 {
            let s1: f64 = (k..400).map(|m| (m - k) as f64 * skellam_series(m, mu, &lnf)).sum();
            assert!((t.stop1(k) - s1).abs() < 1e-11 * (1.0 + s1), "stop1 mu {mu} k {k}");
            let tail: f64 = (k..400).map(|m| skellam_series(m, mu, &lnf)).sum();
            assert!((t.tail(k) - tail).abs() < 1e-12, "tail mu {mu} k {k}");
        }
    }
}
