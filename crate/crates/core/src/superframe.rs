//! Superframe layout, access-phase admission, polling and scheduled
//! allocations.
//!
//! A superframe is `slots_per_superframe` allocation slots of
//! `slot_length_us` each, split into phases in a fixed order:
//!
//! ```text
//! Beacon | EAP1 | RAP1 | Type I/II | EAP2 | RAP2 | Type I/II | CAP
//! ```
//!
//! Any phase may have zero length, in which case it is skipped.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::csma::MacTimingConstants;

pub type NodeId = u32;

pub const DEFAULT_SLOT_LENGTH_US: u64 = 500;
pub const DEFAULT_SLOTS_PER_SUPERFRAME: u32 = 256;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PhaseKind {
    Beacon,
    Eap1,
    Rap1,
    TypeA,
    Eap2,
    Rap2,
    TypeB,
    Cap,
}

impl PhaseKind {
    /// Every phase, in superframe order.
    pub const ORDER: [PhaseKind; 8] = [
        PhaseKind::Beacon,
        PhaseKind::Eap1,
        PhaseKind::Rap1,
        PhaseKind::TypeA,
        PhaseKind::Eap2,
        PhaseKind::Rap2,
        PhaseKind::TypeB,
        PhaseKind::Cap,
    ];

    pub fn name(self) -> &'static str {
        match self {
            PhaseKind::Beacon => "BEACON",
            PhaseKind::Eap1 => "EAP1",
            PhaseKind::Rap1 => "RAP1",
            PhaseKind::TypeA => "TYPE_A",
            PhaseKind::Eap2 => "EAP2",
            PhaseKind::Rap2 => "RAP2",
            PhaseKind::TypeB => "TYPE_B",
            PhaseKind::Cap => "CAP",
        }
    }

    pub fn is_type(self) -> bool {
        matches!(self, PhaseKind::TypeA | PhaseKind::TypeB)
    }

    pub fn is_contention(self) -> bool {
        matches!(self, PhaseKind::Eap1 | PhaseKind::Rap1 | PhaseKind::Eap2 | PhaseKind::Rap2 | PhaseKind::Cap)
    }

    fn index(self) -> usize {
        PhaseKind::ORDER.iter().position(|&k| k == self).unwrap()
    }
}

impl fmt::Display for PhaseKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PhaseKind {
    type Err = SuperframeError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let lower = s.to_ascii_lowercase();
        let key = match lower.as_str() {
            "type_i_ii_a" | "type1" => "type_a",
            "type_i_ii_b" | "type2" => "type_b",
            other => other,
        };
        PhaseKind::ORDER
            .into_iter()
            .find(|k| k.name().eq_ignore_ascii_case(key))
            .ok_or_else(|| SuperframeError::UnknownName(s.to_string()))
    }
}

/// Label carried by a polled/scheduled access phase. Both types are
/// simulated as time grants.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AccessPhaseType {
    TypeI,
    TypeII,
}

impl fmt::Display for AccessPhaseType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AccessPhaseType::TypeI => "I",
            AccessPhaseType::TypeII => "II",
        })
    }
}

impl FromStr for AccessPhaseType {
    type Err = SuperframeError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "i" | "1" | "type_i" | "typei" => Ok(AccessPhaseType::TypeI),
            "ii" | "2" | "type_ii" | "typeii" => Ok(AccessPhaseType::TypeII),
            _ => Err(SuperframeError::UnknownName(s.to_string())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OperationalMode {
    /// Beacon mode with superframe boundaries: the full phase layout.
    Beacon,
    /// No beacon; one access phase of the given type spans the superframe.
    NonBeaconWithBoundaries(AccessPhaseType),
    /// No beacon and no boundaries: unscheduled Type II polling only.
    NonBeaconWithoutBoundaries,
}

impl fmt::Display for OperationalMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OperationalMode::Beacon => f.write_str("beacon"),
            OperationalMode::NonBeaconWithBoundaries(t) => write!(f, "non-beacon-bounded type {t}"),
            OperationalMode::NonBeaconWithoutBoundaries => f.write_str("non-beacon-unbounded"),
        }
    }
}

impl FromStr for OperationalMode {
    type Err = SuperframeError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "beacon" => Ok(OperationalMode::Beacon),
            "non-beacon-bounded" | "non-beacon-bounded-i" => {
                Ok(OperationalMode::NonBeaconWithBoundaries(AccessPhaseType::TypeI))
            }
            "non-beacon-bounded-ii" => Ok(OperationalMode::NonBeaconWithBoundaries(AccessPhaseType::TypeII)),
            "non-beacon-unbounded" | "non-beacon" => Ok(OperationalMode::NonBeaconWithoutBoundaries),
            _ => Err(SuperframeError::UnknownName(s.to_string())),
        }
    }
}

/// Kind of traffic asking for channel access.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AccessKind {
    Emergency,
    Contention,
    Polled,
    Scheduled,
}

impl FromStr for AccessKind {
    type Err = SuperframeError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "emergency" => Ok(AccessKind::Emergency),
            "contention" | "csma" => Ok(AccessKind::Contention),
            "polled" | "poll" => Ok(AccessKind::Polled),
            "scheduled" => Ok(AccessKind::Scheduled),
            _ => Err(SuperframeError::UnknownName(s.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SuperframeError {
    #[error("phase lengths sum to {sum} slots, more than the {total}-slot superframe")]
    Overlap { sum: u64, total: u32 },
    #[error("phase lengths sum to {sum} slots, superframe has {total}")]
    TotalMismatch { sum: u64, total: u32 },
    #[error("beacon mode needs a beacon phase of at least one slot")]
    MissingBeacon,
    #[error("{0}")]
    Invalid(String),
    #[error("time {t_us} µs outside the {duration_us} µs superframe")]
    OutOfRange { t_us: u64, duration_us: u64 },
    #[error("{0} is not a Type I/II access phase")]
    NotTypePhase(PhaseKind),
    #[error("allocation of node {node} is not inside a single Type I/II phase")]
    OutsideTypePhase { node: NodeId },
    #[error("allocations of nodes {a} and {b} overlap in superframe {superframe}")]
    Conflict { a: NodeId, b: NodeId, superframe: u64 },
    #[error("unknown name `{0}`")]
    UnknownName(String),
}

/// Input to [`build_layout`]; `lengths` is indexed in [`PhaseKind::ORDER`].
#[derive(Debug, Clone, PartialEq)]
pub struct LayoutConfig {
    pub mode: OperationalMode,
    pub slot_length_us: u64,
    pub slots_per_superframe: u32,
    pub lengths: [u32; 8],
    pub type_a: AccessPhaseType,
    pub type_b: AccessPhaseType,
    /// Every `beacon_period`-th superframe is active; the rest are inactive.
    pub beacon_period: u32,
    /// Start time of superframe 0.
    pub offset_us: u64,
    /// Beacons are prohibited in the band (MICS).
    pub beacon_prohibited: bool,
}

impl Default for LayoutConfig {
    fn default() -> Self {
        let mut lengths = [0; 8];
        lengths[PhaseKind::Beacon.index()] = 1;
        lengths[PhaseKind::Rap1.index()] = DEFAULT_SLOTS_PER_SUPERFRAME - 1;
        LayoutConfig {
            mode: OperationalMode::Beacon,
            slot_length_us: DEFAULT_SLOT_LENGTH_US,
            slots_per_superframe: DEFAULT_SLOTS_PER_SUPERFRAME,
            lengths,
            type_a: AccessPhaseType::TypeI,
            type_b: AccessPhaseType::TypeII,
            beacon_period: 1,
            offset_us: 0,
            beacon_prohibited: false,
        }
    }
}

impl LayoutConfig {
    pub fn length(&self, kind: PhaseKind) -> u32 {
        self.lengths[kind.index()]
    }

    pub fn set_length(&mut self, kind: PhaseKind, slots: u32) {
        self.lengths[kind.index()] = slots;
    }

    /// Sets every phase length at once, in superframe order, and the
    /// superframe length to their sum.
    pub fn with_lengths(mut self, lengths: [u32; 8]) -> Self {
        self.lengths = lengths;
        self.slots_per_superframe = lengths.iter().sum();
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Phase {
    pub kind: PhaseKind,
    pub start_slot: u32,
    pub length_slots: u32,
}

/// A validated superframe layout. Only nonzero phases are stored.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseLayout {
    pub mode: OperationalMode,
    pub slot_length_us: u64,
    pub slots_per_superframe: u32,
    pub phases: Vec<Phase>,
    pub type_a: AccessPhaseType,
    pub type_b: AccessPhaseType,
    pub beacon_period: u32,
    pub offset_us: u64,
    pub beacon_prohibited: bool,
}

pub fn build_layout(cfg: &LayoutConfig) -> Result<PhaseLayout, SuperframeError> {
    if cfg.slot_length_us == 0 {
        return Err(SuperframeError::Invalid("slot length must be positive".into()));
    }
    if cfg.slots_per_superframe == 0 {
        return Err(SuperframeError::Invalid("superframe needs at least one slot".into()));
    }
    if cfg.beacon_period == 0 {
        return Err(SuperframeError::Invalid("beacon period must be at least 1".into()));
    }
    let mut lengths = cfg.lengths;
    let (type_a, type_b) = match cfg.mode {
        OperationalMode::Beacon => {
            if lengths[PhaseKind::Beacon.index()] == 0 {
                return Err(SuperframeError::MissingBeacon);
            }
            (cfg.type_a, cfg.type_b)
        }
        OperationalMode::NonBeaconWithBoundaries(t) => {
            single_phase(&mut lengths, cfg.slots_per_superframe)?;
            (t, t)
        }
        OperationalMode::NonBeaconWithoutBoundaries => {
            single_phase(&mut lengths, cfg.slots_per_superframe)?;
            (AccessPhaseType::TypeII, AccessPhaseType::TypeII)
        }
    };
    let sum: u64 = lengths.iter().map(|&l| l as u64).sum();
    let total = cfg.slots_per_superframe;
    if sum > total as u64 {
        return Err(SuperframeError::Overlap { sum, total });
    }
    if sum < total as u64 {
        return Err(SuperframeError::TotalMismatch { sum, total });
    }
    let mut phases = Vec::new();
    let mut start = 0;
    for (kind, &len) in PhaseKind::ORDER.iter().zip(&lengths) {
        if len > 0 {
            phases.push(Phase { kind: *kind, start_slot: start, length_slots: len });
            start += len;
        }
    }
    Ok(PhaseLayout {
        mode: cfg.mode,
        slot_length_us: cfg.slot_length_us,
        slots_per_superframe: total,
        phases,
        type_a,
        type_b,
        beacon_period: cfg.beacon_period,
        offset_us: cfg.offset_us,
        beacon_prohibited: cfg.beacon_prohibited,
    })
}

/// Non-beacon modes: one Type phase fills the superframe. Explicit lengths
/// for any other phase are a configuration error.
fn single_phase(lengths: &mut [u32; 8], total: u32) -> Result<(), SuperframeError> {
    let type_a = PhaseKind::TypeA.index();
    if lengths.iter().enumerate().any(|(i, &l)| i != type_a && l != 0) {
        return Err(SuperframeError::Invalid(
            "non-beacon modes take a single Type I/II phase spanning the superframe".into(),
        ));
    }
    if lengths[type_a] != 0 && lengths[type_a] != total {
        return Err(SuperframeError::TotalMismatch { sum: lengths[type_a] as u64, total });
    }
    lengths[type_a] = total;
    Ok(())
}

impl PhaseLayout {
    pub fn duration_us(&self) -> u64 {
        self.slots_per_superframe as u64 * self.slot_length_us
    }

    /// Absolute start time of superframe `index`.
    pub fn superframe_start_us(&self, index: u64) -> u64 {
        self.offset_us + index * self.duration_us()
    }

    pub fn phase(&self, kind: PhaseKind) -> Option<&Phase> {
        self.phases.iter().find(|p| p.kind == kind)
    }

    /// `[start, end)` of `kind` relative to the superframe start, if present.
    pub fn phase_span_us(&self, kind: PhaseKind) -> Option<(u64, u64)> {
        self.phase(kind).map(|p| {
            let start = p.start_slot as u64 * self.slot_length_us;
            (start, start + p.length_slots as u64 * self.slot_length_us)
        })
    }

    /// The phase containing `t_us` (relative to the superframe start) and
    /// the time left in it.
    pub fn phase_at(&self, t_us: u64) -> Result<(PhaseKind, u64), SuperframeError> {
        let duration_us = self.duration_us();
        if t_us >= duration_us {
            return Err(SuperframeError::OutOfRange { t_us, duration_us });
        }
        let slot = (t_us / self.slot_length_us) as u32;
        let phase = self
            .phases
            .iter()
            .find(|p| slot >= p.start_slot && slot < p.start_slot + p.length_slots)
            .expect("phases cover the superframe");
        let end = (phase.start_slot + phase.length_slots) as u64 * self.slot_length_us;
        Ok((phase.kind, end - t_us))
    }

    pub fn type_label(&self, kind: PhaseKind) -> Option<AccessPhaseType> {
        match kind {
            PhaseKind::TypeA => Some(self.type_a),
            PhaseKind::TypeB => Some(self.type_b),
            _ => None,
        }
    }

    /// Superframes whose index is not a multiple of the beacon period are
    /// inactive.
    pub fn is_active(&self, index: u64) -> bool {
        index.is_multiple_of(self.beacon_period as u64)
    }

    pub fn beacon_sent(&self, index: u64) -> bool {
        self.mode == OperationalMode::Beacon && !self.beacon_prohibited && self.is_active(index)
    }
}

/// Whether traffic of `priority` and `access` kind may use phase `kind`.
pub fn admissible(kind: PhaseKind, priority: u8, access: AccessKind) -> bool {
    let contention = matches!(access, AccessKind::Emergency | AccessKind::Contention);
    match kind {
        PhaseKind::Beacon => false,
        PhaseKind::Eap1 | PhaseKind::Eap2 => contention && priority == 7,
        PhaseKind::Rap1 | PhaseKind::Rap2 | PhaseKind::Cap => contention,
        PhaseKind::TypeA | PhaseKind::TypeB => matches!(access, AccessKind::Polled | AccessKind::Scheduled),
    }
}

/// Length of one poll grant: a maximum-length frame exchange plus guard time.
pub fn grant_length_us(max_frame_us: u64, ack_us: u64, timing: &MacTimingConstants) -> u64 {
    max_frame_us + timing.psifs_us + ack_us + timing.guard_us
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PollGrant {
    pub node: NodeId,
    /// Relative to the superframe start.
    pub start_us: u64,
    pub length_us: u64,
    pub label: AccessPhaseType,
}

/// Round-robin poll grants filling `phase`. A phase that is absent or too
/// short for one grant yields no grants.
pub fn schedule_polls(
    layout: &PhaseLayout,
    nodes: &[NodeId],
    phase: PhaseKind,
    grant_us: u64,
) -> Result<Vec<PollGrant>, SuperframeError> {
    if !phase.is_type() {
        return Err(SuperframeError::NotTypePhase(phase));
    }
    if grant_us == 0 {
        return Err(SuperframeError::Invalid("grant length must be positive".into()));
    }
    let Some((start, end)) = layout.phase_span_us(phase) else {
        return Ok(Vec::new());
    };
    if nodes.is_empty() {
        return Ok(Vec::new());
    }
    let label = layout.type_label(phase).expect("type phase");
    let count = (end - start) / grant_us;
    Ok((0..count)
        .map(|i| PollGrant {
            node: nodes[(i % nodes.len() as u64) as usize],
            start_us: start + i * grant_us,
            length_us: grant_us,
            label,
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    Uplink,
    Downlink,
    Bilink,
    /// Scheduled like [`Direction::Bilink`].
    DelayedBilink,
}

impl FromStr for Direction {
    type Err = SuperframeError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "uplink" | "up" => Ok(Direction::Uplink),
            "downlink" | "down" => Ok(Direction::Downlink),
            "bilink" => Ok(Direction::Bilink),
            "delayed-bilink" | "delayed_bilink" => Ok(Direction::DelayedBilink),
            _ => Err(SuperframeError::UnknownName(s.to_string())),
        }
    }
}

/// A scheduled allocation recurring in superframes with
/// `index % period == offset` (`period == 1` is 1-periodic).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ScheduledAllocation {
    pub node: NodeId,
    pub start_slot: u32,
    pub length_slots: u32,
    pub period: u32,
    pub offset: u32,
    pub direction: Direction,
}

impl ScheduledAllocation {
    pub fn active_in(&self, superframe: u64) -> bool {
        superframe % self.period as u64 == self.offset as u64
    }

    fn end_slot(&self) -> u32 {
        self.start_slot + self.length_slots
    }

    fn overlaps(&self, other: &ScheduledAllocation) -> bool {
        self.start_slot < other.end_slot() && other.start_slot < self.end_slot()
    }

    /// Whether both allocations recur together in some superframe.
    pub fn co_occurs(&self, other: &ScheduledAllocation) -> bool {
        let g = gcd(self.period as u64, other.period as u64);
        self.offset as u64 % g == other.offset as u64 % g
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn validate_allocation(a: &ScheduledAllocation, layout: &PhaseLayout) -> Result<(), SuperframeError> {
    if a.period == 0 || a.offset >= a.period {
        return Err(SuperframeError::Invalid(format!(
            "allocation of node {} needs period >= 1 and offset < period",
            a.node
        )));
    }
    if a.length_slots == 0 {
        return Err(SuperframeError::Invalid(format!("allocation of node {} is empty", a.node)));
    }
    if layout.mode == OperationalMode::NonBeaconWithoutBoundaries {
        return Err(SuperframeError::Invalid("non-beacon mode without boundaries has no scheduled access".into()));
    }
    let inside = layout
        .phases
        .iter()
        .any(|p| p.kind.is_type() && a.start_slot >= p.start_slot && a.end_slot() <= p.start_slot + p.length_slots);
    if !inside {
        return Err(SuperframeError::OutsideTypePhase { node: a.node });
    }
    Ok(())
}

/// Checks every allocation and reports the first pair of distinct nodes that
/// collide in any superframe.
pub fn check_allocations(allocations: &[ScheduledAllocation], layout: &PhaseLayout) -> Result<(), SuperframeError> {
    for a in allocations {
        validate_allocation(a, layout)?;
    }
    for (i, a) in allocations.iter().enumerate() {
        for b in &allocations[i + 1..] {
            if a.node != b.node && a.overlaps(b) && a.co_occurs(b) {
                let superframe = (0..a.period as u64 * b.period as u64)
                    .find(|&s| a.active_in(s) && b.active_in(s))
                    .expect("co-occurring allocations share a superframe");
                return Err(SuperframeError::Conflict { a: a.node, b: b.node, superframe });
            }
        }
    }
    Ok(())
}

/// Allocations active in superframe `index`, ordered by start slot.
pub fn place_scheduled(
    allocations: &[ScheduledAllocation],
    layout: &PhaseLayout,
    index: u64,
) -> Result<Vec<ScheduledAllocation>, SuperframeError> {
    for a in allocations {
        validate_allocation(a, layout)?;
    }
    let mut active: Vec<ScheduledAllocation> = allocations.iter().copied().filter(|a| a.active_in(index)).collect();
    active.sort_by_key(|a| (a.start_slot, a.node));
    for (i, a) in active.iter().enumerate() {
        for b in &active[i + 1..] {
            if a.node != b.node && a.overlaps(b) {
                return Err(SuperframeError::Conflict { a: a.node, b: b.node, superframe: index });
            }
        }
    }
    Ok(active)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn layout(lengths: [u32; 8]) -> PhaseLayout {
        build_layout(&LayoutConfig::default().with_lengths(lengths)).unwrap()
    }

    #[test]
    fn single_rap_layout() {
        let cfg = LayoutConfig {
            mode: OperationalMode::NonBeaconWithBoundaries(AccessPhaseType::TypeI),
            lengths: [0; 8],
            ..Default::default()
        };
        let l = build_layout(&cfg).unwrap();
        assert_eq!(l.phases.len(), 1);
        assert_eq!(l.phases[0].kind, PhaseKind::TypeA);
        assert!(!l.beacon_sent(0));
    }

    #[test]
    fn all_phases_in_order() {
        let l = layout([1, 2, 3, 4, 5, 6, 7, 8]);
        let kinds: Vec<_> = l.phases.iter().map(|p| p.kind).collect();
        assert_eq!(kinds, PhaseKind::ORDER);
        assert_eq!(l.phases[3].start_slot, 6);
    }

    #[test]
    fn wrong_sum_rejected() {
        let mut cfg = LayoutConfig::default().with_lengths([1, 0, 10, 0, 0, 0, 0, 0]);
        cfg.slots_per_superframe = 12;
        assert!(matches!(build_layout(&cfg), Err(SuperframeError::TotalMismatch { sum: 11, total: 12 })));
        cfg.slots_per_superframe = 10;
        assert!(matches!(build_layout(&cfg), Err(SuperframeError::Overlap { .. })));
    }

    #[test]
    fn beacon_mode_needs_beacon() {
        let cfg = LayoutConfig::default().with_lengths([0, 0, 10, 0, 0, 0, 0, 0]);
        assert_eq!(build_layout(&cfg), Err(SuperframeError::MissingBeacon));
    }

    #[test]
    fn phase_at_boundaries() {
        let l = layout([1, 0, 3, 0, 0, 2, 0, 0]);
        assert_eq!(l.phase_at(0).unwrap(), (PhaseKind::Beacon, 500));
        let last = l.duration_us() - 1;
        let (kind, remaining) = l.phase_at(last).unwrap();
        assert_eq!(kind, PhaseKind::Rap2);
        assert!(remaining <= l.slot_length_us);
        assert!(l.phase_at(l.duration_us()).is_err());
    }

    #[test]
    fn mics_suppresses_beacons() {
        let mut cfg = LayoutConfig { beacon_period: 2, ..LayoutConfig::default() };
        let l = build_layout(&cfg).unwrap();
        assert!(l.beacon_sent(0) && !l.beacon_sent(1) && l.beacon_sent(2));
        cfg.beacon_prohibited = true;
        assert!(!build_layout(&cfg).unwrap().beacon_sent(0));
    }

    #[test]
    fn admission_rules() {
        assert!(admissible(PhaseKind::Eap1, 7, AccessKind::Emergency));
        for p in 0..7 {
            assert!(!admissible(PhaseKind::Eap1, p, AccessKind::Contention));
            assert!(admissible(PhaseKind::Rap1, p, AccessKind::Contention));
        }
        assert!(!admissible(PhaseKind::TypeA, 7, AccessKind::Contention));
        assert!(admissible(PhaseKind::TypeB, 0, AccessKind::Polled));
        assert!(!admissible(PhaseKind::Cap, 3, AccessKind::Scheduled));
    }

    #[test]
    fn polls_round_robin() {
        let l = layout([1, 0, 1, 10, 0, 0, 0, 0]);
        assert!(schedule_polls(&l, &[], PhaseKind::TypeA, 500).unwrap().is_empty());
        let one = schedule_polls(&l, &[1], PhaseKind::TypeA, 500).unwrap();
        assert_eq!(one.len(), 10);
        let three = schedule_polls(&l, &[1, 2, 3], PhaseKind::TypeA, 500).unwrap();
        let order: Vec<_> = three.iter().take(6).map(|g| g.node).collect();
        assert_eq!(order, [1, 2, 3, 1, 2, 3]);
        assert!(schedule_polls(&l, &[1], PhaseKind::TypeA, 5001).unwrap().is_empty());
        assert!(schedule_polls(&l, &[1], PhaseKind::TypeB, 500).unwrap().is_empty());
        assert!(schedule_polls(&l, &[1], PhaseKind::Rap1, 500).is_err());
    }

    fn alloc(node: NodeId, start: u32, len: u32, period: u32, offset: u32) -> ScheduledAllocation {
        ScheduledAllocation { node, start_slot: start, length_slots: len, period, offset, direction: Direction::Uplink }
    }

    #[test]
    fn periodic_placement() {
        let l = layout([1, 0, 1, 10, 0, 0, 0, 0]);
        let every = alloc(1, 2, 2, 1, 0);
        for sf in 0..5 {
            assert_eq!(place_scheduled(&[every], &l, sf).unwrap(), vec![every]);
        }
        let a = alloc(1, 4, 2, 2, 0);
        let b = alloc(2, 4, 2, 2, 1);
        check_allocations(&[a, b], &l).unwrap();
        assert_eq!(place_scheduled(&[a, b], &l, 3).unwrap(), vec![b]);
        let c = alloc(3, 3, 2, 1, 0);
        assert!(matches!(place_scheduled(&[every, c], &l, 0), Err(SuperframeError::Conflict { .. })));
        assert!(matches!(check_allocations(&[every, c], &l), Err(SuperframeError::Conflict { .. })));
    }

    #[test]
    fn allocation_outside_type_phase() {
        let l = layout([1, 0, 1, 10, 0, 0, 0, 0]);
        assert_eq!(place_scheduled(&[alloc(4, 1, 2, 1, 0)], &l, 0), Err(SuperframeError::OutsideTypePhase { node: 4 }));
    }
}
