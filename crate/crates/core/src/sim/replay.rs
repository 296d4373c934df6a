//! A scripted single-node contention scenario covering every backoff rule:
//! a pSIFS wait, countdown, an odd failure (window kept), a redraw that
//! locks on the guard before the end of a CAP, resumption in the next RAP,
//! an even failure (window doubled), and a final success.
//!
//! Timeline (µs): RAP1 [0, 1360), CAP [1360, 2800), beacon [2800, 3300),
//! RAP2 [3300, 8000). The node has user priority 3 (CW 8..16), data frames
//! take 600 µs and acks 200 µs, and its draws are 3, 5 and 8.

use super::{run, ChannelMode, NodeConfig, Scenario, ScriptedPhase, SimError, Timeline, Traffic};
use crate::csma::trace::TraceRecord;
use crate::csma::{MacTimingConstants, PriorityClass};
use crate::phy::{Band, PhyConfig};
use crate::superframe::{build_layout, LayoutConfig, PhaseKind};

pub fn backoff_walkthrough() -> Scenario {
    let phy = PhyConfig::for_band(Band::Ism2400, 1).expect("built-in mode");
    let layout = build_layout(&LayoutConfig::default()).expect("default layout");
    let mut s = Scenario::new(phy, layout);
    let phase = |kind, start_us, end_us| ScriptedPhase { kind, start_us, end_us };
    s.timeline = Timeline::Scripted(vec![
        phase(PhaseKind::Rap1, 0, 1360),
        phase(PhaseKind::Cap, 1360, 2800),
        phase(PhaseKind::Beacon, 2800, 3300),
        phase(PhaseKind::Rap2, 3300, 8000),
    ]);
    s.timing = MacTimingConstants { psifs_us: 50, slot_us: 125, guard_us: 85 };
    s.tx_airtime_us = Some(600);
    s.ack_airtime_us = Some(200);
    s.channel = ChannelMode::Ideal;
    s.duration_us = 8000;
    let mut node = NodeConfig::new(1, PriorityClass::for_priority(3).expect("priority 3"));
    node.traffic = Traffic::Scripted(vec![0]);
    node.scripted_draws = Some(vec![3, 5, 8]);
    node.ack_script = vec![false, false, true];
    s.nodes = vec![node];
    s
}

pub fn backoff_walkthrough_trace() -> Result<Vec<TraceRecord>, SimError> {
    Ok(run(&backoff_walkthrough())?.trace)
}
