//! A single saturated node on an ideal channel must reproduce the
//! closed-form efficiency.

use bansim_core::efficiency::OverheadProfile;
use bansim_core::phy::{lookup, registry, PhyConfig};
use bansim_core::sim::{run, ChannelMode, NodeConfig, Scenario};
use bansim_core::superframe::{build_layout, LayoutConfig, PhaseKind};

const PAYLOADS: [usize; 5] = [10, 50, 100, 200, 255];

fn single_node(cfg: PhyConfig, payload: usize, profile: &OverheadProfile) -> Scenario {
    let mut layout = LayoutConfig { slots_per_superframe: 20_001, ..LayoutConfig::default() };
    layout.set_length(PhaseKind::Beacon, 1);
    layout.set_length(PhaseKind::Rap1, 20_000);
    let mut s = Scenario::new(cfg, build_layout(&layout).unwrap());
    s.timing = profile.timing;
    s.channel = ChannelMode::Ideal;
    s.record_trace = false;
    s.duration_us = 20_001 * 500;
    let mut node = NodeConfig::new(1, profile.priority);
    node.payload_bytes = payload;
    s.nodes = vec![node];
    s
}

fn check(name: &str) {
    let profile = OverheadProfile::default();
    let cfg = lookup(&registry(), name).unwrap().cfg;
    for p in PAYLOADS {
        let analytic = profile.efficiency(p, &cfg).unwrap();
        let out = run(&single_node(cfg, p, &profile)).unwrap();
        assert_eq!(out.stats.aggregate.collided, 0);
        let rel = (out.stats.efficiency - analytic).abs() / analytic;
        assert!(rel <= 0.01, "{name} payload {p}: sim {} analytic {analytic} ({rel})", out.stats.efficiency);
    }
}

#[test]
fn narrowband_low_rate() {
    check("wmts420.u");
}

#[test]
fn narrowband_high_rate() {
    check("ism2400.3");
}

#[test]
fn mics_dqpsk() {
    check("mics402.3");
}

#[test]
fn human_body_channel() {
    check("hbc16");
}

#[test]
fn every_table_psdu_mode() {
    for row in bansim_core::phy::rate_table() {
        if row.entry.component == bansim_core::phy::Component::Psdu {
            check(&row.entry.name);
        }
    }
}
