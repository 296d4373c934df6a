//! Deterministic discrete-event simulation of one hub and its nodes.
//!
//! Time is an integer number of µs; frame airtimes are rounded up. Events
//! run in `(time, rank, insertion order)` order, where phase starts rank
//! before everything else at the same instant.
//!
//! Channel access in contention phases follows [`crate::csma`]: after the
//! channel has been idle for pSIFS (and at least pSIFS into the phase) every
//! contending node re-checks its guard and counts down once per CSMA slot.
//! A delivered frame is acknowledged by the hub pSIFS after it ends; a
//! frame that collided or lost its ack fails when the ack timeout
//! (pSIFS + ack + GTn after the frame) expires.

mod engine;
pub mod replay;
pub mod timeline;

use std::fmt::Write as _;

use thiserror::Error;

use crate::csma::trace::TraceRecord;
use crate::csma::{CsmaError, MacTimingConstants, PriorityClass};
use crate::phy::{Codec, CodecError, PhyConfig, MAX_BODY_LEN};
use crate::security::{MkSource, SecurityError, SecurityLevel};
use crate::superframe::{check_allocations, AccessKind, NodeId, PhaseLayout, ScheduledAllocation, SuperframeError};

pub use timeline::{ScriptedPhase, Segment, Timeline};

pub const DEFAULT_RETRY_LIMIT: u32 = 7;
pub const DEFAULT_BEACON_BODY_LEN: usize = 16;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimError {
    #[error("invalid scenario: {0}")]
    Invalid(String),
    #[error(transparent)]
    Superframe(#[from] SuperframeError),
    #[error(transparent)]
    Csma(#[from] CsmaError),
    #[error(transparent)]
    Codec(#[from] CodecError),
    #[error(transparent)]
    Security(#[from] SecurityError),
    #[error("overlapping transmissions at {time_us} µs on an ideal channel")]
    IdealOverlap { time_us: u64 },
    #[error("node {node} transmission ending at {time_us} µs does not fit its phase")]
    GuardViolation { node: NodeId, time_us: u64 },
}

#[derive(Debug, Clone, PartialEq)]
pub enum Traffic {
    /// A frame is always queued.
    Saturated,
    /// Exponential inter-arrival times.
    Poisson { frames_per_s: f64 },
    /// Arrival instants in µs.
    Scripted(Vec<u64>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChannelMode {
    /// At most one contender; any overlap is an error.
    Ideal,
    /// Overlapping transmissions all fail.
    Collision,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NodeConfig {
    pub id: NodeId,
    pub priority: PriorityClass,
    pub access: AccessKind,
    pub traffic: Traffic,
    /// Application payload per frame; secured levels add their overhead.
    pub payload_bytes: usize,
    pub security: SecurityLevel,
    pub mk_source: MkSource,
    /// Replace random backoff draws with this sequence.
    pub scripted_draws: Option<Vec<u32>>,
    /// Fault injection: outcome of each otherwise successful exchange
    /// (`false` loses the ack). Exhausted scripts deliver.
    pub ack_script: Vec<bool>,
}

impl NodeConfig {
    pub fn new(id: NodeId, priority: PriorityClass) -> Self {
        NodeConfig {
            id,
            priority,
            access: AccessKind::Contention,
            traffic: Traffic::Saturated,
            payload_bytes: 100,
            security: SecurityLevel::Unsecured,
            mk_source: MkSource::default(),
            scripted_draws: None,
            ack_script: Vec::new(),
        }
    }

    fn body_len(&self) -> usize {
        self.payload_bytes + self.security.overhead_bytes()
    }
}

#[derive(Debug, Clone)]
pub struct Scenario {
    pub phy: PhyConfig,
    pub codec: Codec,
    pub timeline: Timeline,
    pub allocations: Vec<ScheduledAllocation>,
    pub timing: MacTimingConstants,
    pub nodes: Vec<NodeConfig>,
    /// Multicast groups receiving a GTK at start-up.
    pub groups: Vec<(u32, Vec<NodeId>)>,
    pub channel: ChannelMode,
    pub duration_us: u64,
    pub seed: u64,
    /// `None` is unbounded.
    pub queue_capacity: Option<usize>,
    pub retry_limit: u32,
    pub beacon_body_len: usize,
    /// Fixed data-frame airtime instead of the codec's.
    pub tx_airtime_us: Option<u64>,
    /// Fixed ack airtime instead of the codec's.
    pub ack_airtime_us: Option<u64>,
    pub record_trace: bool,
}

impl Scenario {
    pub fn new(phy: PhyConfig, layout: PhaseLayout) -> Self {
        Scenario {
            phy,
            codec: Codec::default(),
            timeline: Timeline::Superframes(layout),
            allocations: Vec::new(),
            timing: MacTimingConstants::default(),
            nodes: Vec::new(),
            groups: Vec::new(),
            channel: ChannelMode::Collision,
            duration_us: 1_000_000,
            seed: 0,
            queue_capacity: None,
            retry_limit: DEFAULT_RETRY_LIMIT,
            beacon_body_len: DEFAULT_BEACON_BODY_LEN,
            tx_airtime_us: None,
            ack_airtime_us: None,
            record_trace: true,
        }
    }

    pub fn validate(&self) -> Result<(), SimError> {
        let invalid = |m: String| Err(SimError::Invalid(m));
        self.phy.validate().map_err(CodecError::from)?;
        self.timing.validate()?;
        self.timeline.validate().map_err(SimError::Invalid)?;
        if self.duration_us == 0 {
            return invalid("duration must be positive".into());
        }
        if self.beacon_body_len > MAX_BODY_LEN {
            return invalid(format!("beacon body of {} bytes is too long", self.beacon_body_len));
        }
        let mut ids = std::collections::BTreeSet::new();
        for n in &self.nodes {
            if n.id == 0 {
                return invalid("node id 0 is the hub".into());
            }
            if !ids.insert(n.id) {
                return invalid(format!("duplicate node id {}", n.id));
            }
            PriorityClass::new(n.priority.user_priority, n.priority.cw_min, n.priority.cw_max)?;
            if n.payload_bytes == 0 || n.body_len() > MAX_BODY_LEN {
                return invalid(format!(
                    "node {}: payload of {} bytes does not fit a {}-byte body at security level {}",
                    n.id, n.payload_bytes, MAX_BODY_LEN, n.security
                ));
            }
            if n.access == AccessKind::Emergency && n.priority.user_priority != 7 {
                return invalid(format!("node {}: emergency traffic needs user priority 7", n.id));
            }
            match &n.traffic {
                Traffic::Poisson { frames_per_s } if !(frames_per_s.is_finite() && *frames_per_s > 0.0) => {
                    return invalid(format!("node {}: Poisson rate must be positive", n.id));
                }
                Traffic::Scripted(times) if times.windows(2).any(|w| w[0] > w[1]) => {
                    return invalid(format!("node {}: scripted arrivals must be in time order", n.id));
                }
                _ => {}
            }
        }
        if self.channel == ChannelMode::Ideal {
            let contenders = self
                .nodes
                .iter()
                .filter(|n| matches!(n.access, AccessKind::Contention | AccessKind::Emergency))
                .count();
            if contenders > 1 {
                return invalid(format!("ideal channel allows one contending node, got {contenders}"));
            }
        }
        if !self.allocations.is_empty() {
            let Some(layout) = self.timeline.layout() else {
                return invalid("scheduled allocations need a superframe timeline".into());
            };
            check_allocations(&self.allocations, layout)?;
            for a in &self.allocations {
                match self.nodes.iter().find(|n| n.id == a.node) {
                    Some(n) if n.access == AccessKind::Scheduled => {}
                    Some(_) => return invalid(format!("allocation for node {} which is not scheduled", a.node)),
                    None => return invalid(format!("allocation for unknown node {}", a.node)),
                }
            }
        }
        for (group, members) in &self.groups {
            if let Some(m) = members.iter().find(|m| !ids.contains(m)) {
                return invalid(format!("group {group} names unknown node {m}"));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct NodeStats {
    /// 0 for the aggregate.
    pub node: NodeId,
    pub offered: u64,
    pub delivered: u64,
    /// Dropped after the retry limit or on queue overflow.
    pub failed: u64,
    pub queued: u64,
    pub attempts: u64,
    /// Attempts that overlapped another transmission.
    pub collided: u64,
    pub payload_bits: u64,
    /// Airtime of this node's data frames.
    pub airtime_us: u64,
    pub access_delay_total_us: u64,
    pub efficiency: f64,
}

impl NodeStats {
    /// Mean time from reaching the head of the queue to acknowledgement.
    pub fn mean_access_delay_us(&self) -> f64 {
        if self.delivered == 0 {
            0.0
        } else {
            self.access_delay_total_us as f64 / self.delivered as f64
        }
    }

    fn accumulate(&mut self, o: &NodeStats) {
        self.offered += o.offered;
        self.delivered += o.delivered;
        self.failed += o.failed;
        self.queued += o.queued;
        self.attempts += o.attempts;
        self.collided += o.collided;
        self.payload_bits += o.payload_bits;
        self.airtime_us += o.airtime_us;
        self.access_delay_total_us += o.access_delay_total_us;
        self.efficiency += o.efficiency;
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunStats {
    pub seed: u64,
    pub duration_us: u64,
    pub nodes: Vec<NodeStats>,
    pub aggregate: NodeStats,
    /// Sum of all airtimes, hub frames and collided frames included.
    /// Overlapping transmissions count once each, so this can exceed the
    /// duration.
    pub busy_us: u64,
    /// Time with nothing on the air.
    pub idle_us: u64,
    /// Delivered payload time over elapsed time.
    pub efficiency: f64,
}

impl RunStats {
    fn from_nodes(seed: u64, duration_us: u64, nodes: Vec<NodeStats>, busy_us: u64, idle_us: u64) -> Self {
        let mut aggregate = NodeStats::default();
        for n in &nodes {
            aggregate.accumulate(n);
        }
        RunStats { seed, duration_us, efficiency: aggregate.efficiency, aggregate, nodes, busy_us, idle_us }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub stats: RunStats,
    pub trace: Vec<TraceRecord>,
}

/// Runs `scenario` to its duration.
pub fn run(scenario: &Scenario) -> Result<RunOutput, SimError> {
    scenario.validate()?;
    if scenario.nodes.is_empty() {
        return Ok(RunOutput {
            stats: RunStats::from_nodes(scenario.seed, scenario.duration_us, Vec::new(), 0, scenario.duration_us),
            trace: Vec::new(),
        });
    }
    engine::Kernel::new(scenario)?.run()
}

/// Runs one replica per seed on up to `threads` threads; results keep the
/// order of `seeds`.
pub fn run_replicas(scenario: &Scenario, seeds: &[u64], threads: usize) -> Vec<Result<RunOutput, SimError>> {
    let threads = threads.max(1).min(seeds.len().max(1));
    let mut results: Vec<Option<Result<RunOutput, SimError>>> = vec![None; seeds.len()];
    std::thread::scope(|scope| {
        let chunk = seeds.len().div_ceil(threads).max(1);
        for (seed_chunk, out_chunk) in seeds.chunks(chunk).zip(results.chunks_mut(chunk)) {
            scope.spawn(move || {
                for (seed, out) in seed_chunk.iter().zip(out_chunk) {
                    let mut s = scenario.clone();
                    s.seed = *seed;
                    *out = Some(run(&s));
                }
            });
        }
    });
    results.into_iter().map(|r| r.expect("every replica ran")).collect()
}

pub const STATS_HEADER: &str =
    "seed,node,offered,delivered,failed,queued,attempts,collided,payload_bits,airtime_us,mean_access_delay_us,efficiency";

fn stats_row(out: &mut String, seed: u64, label: &str, n: &NodeStats, airtime_us: u64) {
    let _ = writeln!(
        out,
        "{seed},{label},{},{},{},{},{},{},{},{airtime_us},{:.1},{:.4}",
        n.offered,
        n.delivered,
        n.failed,
        n.queued,
        n.attempts,
        n.collided,
        n.payload_bits,
        n.mean_access_delay_us(),
        n.efficiency
    );
}

/// Per-node rows plus an `all` row; the aggregate airtime is the total
/// channel busy time.
pub fn stats_csv(runs: &[&RunStats]) -> String {
    let mut out = String::from(STATS_HEADER);
    out.push('\n');
    for s in runs {
        for n in &s.nodes {
            stats_row(&mut out, s.seed, &n.node.to_string(), n, n.airtime_us);
        }
        stats_row(&mut out, s.seed, "all", &s.aggregate, s.busy_us);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phy::Band;
    use crate::superframe::{build_layout, LayoutConfig};

    fn scenario() -> Scenario {
        let layout = build_layout(&LayoutConfig::default()).unwrap();
        Scenario::new(PhyConfig::for_band(Band::Ism2400, 1).unwrap(), layout)
    }

    #[test]
    fn zero_nodes_is_all_zero() {
        let out = run(&scenario()).unwrap();
        assert!(out.trace.is_empty());
        assert_eq!(out.stats.aggregate, NodeStats::default());
        assert_eq!(out.stats.busy_us, 0);
    }

    #[test]
    fn ideal_mode_allows_one_contender() {
        let mut s = scenario();
        s.channel = ChannelMode::Ideal;
        let p = PriorityClass::for_priority(3).unwrap();
        s.nodes = vec![NodeConfig::new(1, p), NodeConfig::new(2, p)];
        assert!(matches!(s.validate(), Err(SimError::Invalid(_))));
    }

    #[test]
    fn rejects_oversize_secured_payload() {
        let mut s = scenario();
        let mut n = NodeConfig::new(1, PriorityClass::for_priority(0).unwrap());
        n.payload_bytes = 250;
        n.security = SecurityLevel::Authentication;
        s.nodes = vec![n];
        assert!(matches!(s.validate(), Err(SimError::Invalid(_))));
    }

    #[test]
    fn stats_csv_has_aggregate_row() {
        let mut s = scenario();
        s.duration_us = 200_000;
        s.nodes = vec![NodeConfig::new(1, PriorityClass::for_priority(6).unwrap())];
        let out = run(&s).unwrap();
        let csv = stats_csv(&[&out.stats]);
        assert!(csv.starts_with(STATS_HEADER));
        assert_eq!(csv.lines().count(), 3);
        assert!(csv.lines().last().unwrap().starts_with("0,all,"));
    }
}
