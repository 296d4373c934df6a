use bansim_core::efficiency::{analytic_efficiency, parse_csv, sweep, to_csv, OverheadProfile};
use bansim_core::phy::{lookup, rate_table, registry, Codec};

#[test]
fn strictly_increasing_over_payload_for_every_table_row() {
    let profile = OverheadProfile::default();
    for row in rate_table() {
        let mut last = 0.0;
        for p in 1..=255 {
            let e = profile.efficiency(p, &row.entry.cfg).unwrap();
            assert!(e > last && e < 1.0, "{} at {p}: {e} after {last}", row.entry.name);
            last = e;
        }
    }
}

#[test]
fn closed_form_from_first_principles() {
    // η = payload time / (mean backoff + frame + pSIFS + ack + pSIFS).
    let profile = OverheadProfile::default();
    let codec = Codec::default();
    for named in registry() {
        let cfg = &named.cfg;
        let rate = named.rate_kbps();
        for p in [1usize, 17, 128, 255] {
            let frame = codec.frame_airtime(cfg, p).unwrap().total_us();
            let ack = codec.frame_airtime(cfg, 0).unwrap().total_us();
            let t = profile.timing;
            let backoff = t.slot_us as f64 * (1 + profile.priority.cw_min) as f64 / 2.0;
            let expected = 8.0 * p as f64 * 1000.0 / rate / (backoff + frame + 2.0 * t.psifs_us as f64 + ack);
            let got = analytic_efficiency(p, cfg, &t, &profile.priority).unwrap();
            assert!((got - expected).abs() < 1e-12, "{}: {got} vs {expected}", named.name);
        }
    }
}

#[test]
fn calibration_targets_at_maximum_payload() {
    let profile = OverheadProfile::default();
    let reg = registry();
    let slow = profile.efficiency(255, &lookup(&reg, "wmts420.u").unwrap().cfg).unwrap();
    let fast = profile.efficiency(255, &lookup(&reg, "ism2400.3").unwrap().cfg).unwrap();
    assert!((0.806..=0.866).contains(&slow), "{slow}");
    assert!((0.664..=0.724).contains(&fast), "{fast}");
}

#[test]
fn sweep_csv_has_one_row_per_point() {
    let table: Vec<_> = rate_table().into_iter().map(|r| r.entry).collect();
    let points = sweep(&table, &(1..=255).collect::<Vec<_>>(), &OverheadProfile::default()).unwrap();
    assert_eq!(points.len(), 21 * 255);
    let csv = to_csv(&points);
    assert_eq!(parse_csv(&csv).unwrap().len(), points.len());
}
