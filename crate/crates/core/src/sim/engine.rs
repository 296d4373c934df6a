use std::cmp::Reverse;
use std::collections::{BinaryHeap, VecDeque};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::timeline::Segment;
use super::{ChannelMode, NodeConfig, NodeStats, RunOutput, RunStats, Scenario, SimError, Traffic};
use crate::csma::trace::{TraceEvent, TraceRecord};
use crate::csma::{guard_check, BackoffDraw, BackoffState, GuardDecision, LockReason, ScriptedDraws};
use crate::phy::{Component, MAX_BODY_LEN};
use crate::security::{SecuredFrame, SecurityManager};
use crate::superframe::{admissible, grant_length_us, place_scheduled, AccessKind, PhaseKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Ev {
    PhaseStart(SegmentKey),
    Arrival(usize),
    Tick(u64),
    TxEnd(usize),
    AckStart(usize),
    AckDue { node: usize, ok: bool },
    Grant { node: usize, end: u64, announce: bool, multi: bool },
    HubTxEnd,
}

/// Segments are looked up by index into the kernel's pending list so that
/// events stay `Ord`.
type SegmentKey = usize;

impl Ev {
    fn rank(&self) -> u8 {
        match self {
            Ev::PhaseStart(_) => 0,
            _ => 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum NodeState {
    /// Nothing queued.
    Empty,
    /// Holding a drawn backoff counter.
    Contending,
    /// Queued frame waiting for a poll or allocation.
    Waiting,
    Transmitting,
    AwaitingAck,
}

struct NodeRt {
    cfg: NodeConfig,
    backoff: BackoffState,
    draws: Box<dyn BackoffDraw>,
    traffic_rng: ChaCha8Rng,
    queue: VecDeque<u64>,
    state: NodeState,
    /// Counted down during the slot ending at the next tick.
    counted: bool,
    collided: bool,
    ack_script: VecDeque<bool>,
    grant: Option<(u64, bool)>,
    head_since: u64,
    tx_us: u64,
    seq: u8,
    in_flight: Option<SecuredFrame>,
    stats: NodeStats,
}

impl NodeRt {
    fn contends(&self) -> bool {
        matches!(self.cfg.access, AccessKind::Contention | AccessKind::Emergency)
    }
}

pub(super) struct Kernel<'a> {
    sc: &'a Scenario,
    nodes: Vec<NodeRt>,
    heap: BinaryHeap<Reverse<(u64, u8, u64, Ev)>>,
    next_seq: u64,
    now: u64,
    seg: Segment,
    segments: Vec<Segment>,
    gen: u64,
    ticking: bool,
    idle_since: u64,
    active_tx: Vec<usize>,
    /// Hub transmissions in progress or acks committed to.
    reserved: usize,
    busy_us: u64,
    /// Union of all transmission intervals so far.
    occupied_us: u64,
    occupied_until: u64,
    ack_us: u64,
    beacon_us: u64,
    grant_us: u64,
    psdu_kbps: f64,
    security: SecurityManager,
    trace: Vec<TraceRecord>,
}

fn ceil_us(t: f64) -> u64 {
    t.ceil() as u64
}

impl<'a> Kernel<'a> {
    pub(super) fn new(sc: &'a Scenario) -> Result<Self, SimError> {
        let airtime =
            |body: usize| -> Result<u64, SimError> { Ok(ceil_us(sc.codec.frame_airtime(&sc.phy, body)?.total_us())) };
        let ack_us = match sc.ack_airtime_us {
            Some(t) => t,
            None => airtime(0)?,
        };
        let max_frame_us = match sc.tx_airtime_us {
            Some(t) => t,
            None => airtime(MAX_BODY_LEN)?,
        };
        let mut security = SecurityManager::new(0);
        let mut nodes = Vec::with_capacity(sc.nodes.len());
        for cfg in &sc.nodes {
            if cfg.mk_source == crate::security::MkSource::Preshared {
                let mut key = [0u8; 16];
                key[..8].copy_from_slice(&sc.seed.to_be_bytes());
                key[8..12].copy_from_slice(&cfg.id.to_be_bytes());
                security.provision_mk(cfg.id, key);
            }
            security.associate(cfg.id, cfg.security, cfg.mk_source)?;
            let mut backoff_rng = ChaCha8Rng::seed_from_u64(sc.seed);
            backoff_rng.set_stream(cfg.id as u64);
            let mut traffic_rng = ChaCha8Rng::seed_from_u64(sc.seed);
            traffic_rng.set_stream((1 << 32) | cfg.id as u64);
            let draws: Box<dyn BackoffDraw> = match &cfg.scripted_draws {
                Some(v) => Box::new(ScriptedDraws::new(v.clone())),
                None => Box::new(backoff_rng),
            };
            let tx_us = match sc.tx_airtime_us {
                Some(t) => t,
                None => airtime(cfg.body_len())?,
            };
            nodes.push(NodeRt {
                cfg: cfg.clone(),
                backoff: BackoffState::new(cfg.priority),
                draws,
                traffic_rng,
                queue: VecDeque::new(),
                state: NodeState::Empty,
                counted: false,
                collided: false,
                ack_script: cfg.ack_script.iter().copied().collect(),
                grant: None,
                head_since: 0,
                tx_us,
                seq: 0,
                in_flight: None,
                stats: NodeStats { node: cfg.id, ..Default::default() },
            });
        }
        for (group, members) in &sc.groups {
            security.distribute_gtk(*group, members)?;
        }
        let first = sc.timeline.first();
        let mut k = Kernel {
            sc,
            nodes,
            heap: BinaryHeap::new(),
            next_seq: 0,
            now: 0,
            seg: first,
            segments: Vec::new(),
            gen: 0,
            ticking: false,
            idle_since: 0,
            active_tx: Vec::new(),
            reserved: 0,
            busy_us: 0,
            occupied_us: 0,
            occupied_until: 0,
            ack_us,
            beacon_us: airtime(sc.beacon_body_len)?,
            grant_us: grant_length_us(max_frame_us, ack_us, &sc.timing),
            psdu_kbps: sc.phy.info_data_rate(Component::Psdu).map_err(crate::phy::CodecError::from)?,
            security,
            trace: Vec::new(),
        };
        k.push_segment(first);
        for i in 0..k.nodes.len() {
            match k.nodes[i].cfg.traffic.clone() {
                Traffic::Saturated => k.schedule(0, Ev::Arrival(i)),
                Traffic::Poisson { .. } => {
                    let t = k.poisson_gap(i);
                    k.schedule(t, Ev::Arrival(i));
                }
                Traffic::Scripted(times) => {
                    for t in times {
                        k.schedule(t, Ev::Arrival(i));
                    }
                }
            }
        }
        Ok(k)
    }

    fn push_segment(&mut self, seg: Segment) {
        self.segments.push(seg);
        let key = self.segments.len() - 1;
        self.schedule(seg.start_us, Ev::PhaseStart(key));
    }

    fn schedule(&mut self, t: u64, ev: Ev) {
        self.heap.push(Reverse((t, ev.rank(), self.next_seq, ev)));
        self.next_seq += 1;
    }

    fn poisson_gap(&mut self, i: usize) -> u64 {
        let Traffic::Poisson { frames_per_s } = self.nodes[i].cfg.traffic else {
            unreachable!("only Poisson nodes draw gaps")
        };
        let u: f64 = self.nodes[i].traffic_rng.gen_range(f64::EPSILON..1.0);
        ceil_us(-u.ln() / frames_per_s * 1e6).max(1)
    }

    fn log(&mut self, i: Option<usize>, event: TraceEvent) {
        if !self.sc.record_trace {
            return;
        }
        let (node, counter, cw, failures) = match i {
            Some(i) => {
                let n = &self.nodes[i];
                (n.cfg.id, n.backoff.counter, n.backoff.cw, n.backoff.consecutive_failures)
            }
            None => (0, 0, 0, 0),
        };
        self.trace.push(TraceRecord { time_us: self.now, node, event, counter, cw, failures, phase: self.seg.kind });
    }

    /// Accounts a transmission of `len` µs starting now.
    fn occupy(&mut self, len: u64) {
        let end = (self.now + len).min(self.sc.duration_us);
        self.busy_us += len;
        self.occupied_us += end.saturating_sub(self.now.max(self.occupied_until));
        self.occupied_until = self.occupied_until.max(end);
    }

    fn channel_busy(&self) -> bool {
        !self.active_tx.is_empty() || self.reserved > 0
    }

    pub(super) fn run(mut self) -> Result<RunOutput, SimError> {
        while let Some(Reverse((t, _, _, ev))) = self.heap.pop() {
            if t >= self.sc.duration_us {
                break;
            }
            self.now = t;
            match ev {
                Ev::PhaseStart(key) => self.on_phase_start(key)?,
                Ev::Arrival(i) => self.on_arrival(i),
                Ev::Tick(gen) => self.on_tick(gen)?,
                Ev::TxEnd(i) => self.on_tx_end(i)?,
                Ev::AckStart(i) => self.on_ack_start(i),
                Ev::AckDue { node, ok } => self.on_ack_due(node, ok),
                Ev::Grant { node, end, announce, multi } => self.on_grant(node, end, announce, multi)?,
                Ev::HubTxEnd => {
                    self.reserved -= 1;
                    self.idle_since = self.now;
                    self.try_resume();
                }
            }
        }
        Ok(self.finish())
    }

    fn finish(self) -> RunOutput {
        let duration = self.sc.duration_us;
        let rate = self.psdu_kbps;
        let nodes = self
            .nodes
            .into_iter()
            .map(|n| {
                let mut s = n.stats;
                s.queued = n.queue.len() as u64;
                s.efficiency = s.payload_bits as f64 * 1000.0 / rate / duration as f64;
                s
            })
            .collect();
        RunOutput {
            stats: RunStats::from_nodes(self.sc.seed, duration, nodes, self.busy_us, duration - self.occupied_us),
            trace: self.trace,
        }
    }

    fn on_phase_start(&mut self, key: SegmentKey) -> Result<(), SimError> {
        self.seg = self.segments[key];
        self.gen += 1;
        self.ticking = false;
        if self.seg.kind.is_some() {
            self.log(None, TraceEvent::PhaseStart);
        }
        for i in 0..self.nodes.len() {
            let n = &mut self.nodes[i];
            n.counted = false;
            n.grant = None;
            if n.state == NodeState::Contending {
                let was_unlocked = !n.backoff.is_locked();
                n.backoff.lock(LockReason::Phase);
                if was_unlocked {
                    self.log(Some(i), TraceEvent::Lock(LockReason::Phase));
                }
            }
        }
        if self.seg.beacon {
            self.reserved += 1;
            self.occupy(self.beacon_us);
            self.log(None, TraceEvent::Beacon);
            self.schedule(self.now + self.beacon_us, Ev::HubTxEnd);
        }
        if self.seg.active && self.seg.kind.is_some_and(PhaseKind::is_type) {
            self.schedule_grants()?;
        }
        if let Some(next) = self.sc.timeline.next(&self.seg) {
            if next.start_us < self.sc.duration_us {
                self.push_segment(next);
            }
        }
        self.try_resume();
        Ok(())
    }

    fn schedule_grants(&mut self) -> Result<(), SimError> {
        let Some(layout) = self.sc.timeline.layout() else {
            return Ok(());
        };
        let kind = self.seg.kind.expect("type phase");
        let base = layout.superframe_start_us(self.seg.superframe);
        let slot = layout.slot_length_us;
        let phase = *layout.phase(kind).expect("phase of the current segment");
        let in_phase: Vec<_> = place_scheduled(&self.sc.allocations, layout, self.seg.superframe)?
            .into_iter()
            .filter(|a| a.start_slot >= phase.start_slot && a.start_slot < phase.start_slot + phase.length_slots)
            .collect();
        // Polls fill the time between allocations, round robin.
        let mut free_from = phase.start_slot as u64 * slot;
        let mut gaps = Vec::new();
        for a in &in_phase {
            let start = a.start_slot as u64 * slot;
            gaps.push((free_from, start));
            free_from = start + a.length_slots as u64 * slot;
            let node = self.index_of(a.node);
            self.schedule(base + start, Ev::Grant { node, end: base + free_from, announce: true, multi: true });
        }
        gaps.push((free_from, (phase.start_slot + phase.length_slots) as u64 * slot));
        let polled: Vec<_> =
            (0..self.nodes.len()).filter(|&i| self.nodes[i].cfg.access == AccessKind::Polled).collect();
        if polled.is_empty() {
            return Ok(());
        }
        let mut next = 0;
        for (from, to) in gaps {
            let mut t = from;
            while t + self.grant_us <= to {
                let node = polled[next % polled.len()];
                next += 1;
                self.schedule(
                    base + t,
                    Ev::Grant { node, end: base + t + self.grant_us, announce: true, multi: false },
                );
                t += self.grant_us;
            }
        }
        Ok(())
    }

    fn index_of(&self, id: u32) -> usize {
        self.nodes.iter().position(|n| n.cfg.id == id).expect("validated node id")
    }

    fn try_resume(&mut self) {
        if self.ticking || self.channel_busy() || !self.seg.contention() {
            return;
        }
        if !self.nodes.iter().any(|n| n.state == NodeState::Contending) {
            return;
        }
        let psifs = self.sc.timing.psifs_us;
        let at = self.now.max(self.idle_since + psifs).max(self.seg.start_us + psifs);
        self.ticking = true;
        self.schedule(at, Ev::Tick(self.gen));
    }

    fn on_tick(&mut self, gen: u64) -> Result<(), SimError> {
        if gen != self.gen {
            return Ok(());
        }
        self.ticking = false;
        let mut transmitters = Vec::new();
        for i in 0..self.nodes.len() {
            if !std::mem::take(&mut self.nodes[i].counted) {
                continue;
            }
            let fire = self.nodes[i].backoff.on_idle_slot();
            self.log(Some(i), TraceEvent::Idle);
            if fire {
                transmitters.push(i);
            }
        }
        if !transmitters.is_empty() {
            for &i in &transmitters {
                self.start_tx(i)?;
            }
            for i in 0..self.nodes.len() {
                if self.nodes[i].state == NodeState::Contending && !self.nodes[i].backoff.is_locked() {
                    self.nodes[i].backoff.on_busy();
                    self.log(Some(i), TraceEvent::Lock(LockReason::Busy));
                }
            }
            self.gen += 1;
            return Ok(());
        }
        let kind = self.seg.kind.expect("ticks run in contention phases");
        let mut counting = false;
        for i in 0..self.nodes.len() {
            if self.nodes[i].state != NodeState::Contending {
                continue;
            }
            let n = &self.nodes[i];
            if !admissible(kind, n.cfg.priority.user_priority, n.cfg.access) {
                if !n.backoff.is_locked() {
                    self.nodes[i].backoff.lock(LockReason::Phase);
                    self.log(Some(i), TraceEvent::Lock(LockReason::Phase));
                }
                continue;
            }
            if n.backoff.lock == Some(LockReason::Guard) {
                continue;
            }
            match guard_check(self.now, self.seg.end_us, n.tx_us, self.ack_us, &self.sc.timing) {
                GuardDecision::Lock => {
                    self.nodes[i].backoff.lock(LockReason::Guard);
                    self.log(Some(i), TraceEvent::Lock(LockReason::Guard));
                }
                GuardDecision::Proceed => {
                    if n.backoff.is_locked() {
                        self.nodes[i].backoff.unlock();
                        self.log(Some(i), TraceEvent::Unlock);
                    }
                    self.nodes[i].counted = true;
                    counting = true;
                }
            }
        }
        if counting {
            self.ticking = true;
            self.schedule(self.now + self.sc.timing.slot_us, Ev::Tick(self.gen));
        }
        Ok(())
    }

    fn start_tx(&mut self, i: usize) -> Result<(), SimError> {
        let id = self.nodes[i].cfg.id;
        let payload = vec![self.nodes[i].seq; self.nodes[i].cfg.payload_bytes];
        // Every transmission goes through the node's session; secured levels
        // fail here without an active PTK.
        let frame = self.security.secure_frame(id, &payload)?;
        let n = &mut self.nodes[i];
        n.in_flight = Some(frame);
        n.state = NodeState::Transmitting;
        n.stats.attempts += 1;
        n.stats.airtime_us += n.tx_us;
        let end = self.now + n.tx_us;
        let tx_us = n.tx_us;
        self.occupy(tx_us);
        self.active_tx.push(i);
        if self.active_tx.len() > 1 {
            if self.sc.channel == ChannelMode::Ideal {
                return Err(SimError::IdealOverlap { time_us: self.now });
            }
            for &j in &self.active_tx {
                self.nodes[j].collided = true;
            }
        }
        self.log(Some(i), TraceEvent::TxStart);
        self.schedule(end, Ev::TxEnd(i));
        Ok(())
    }

    fn on_tx_end(&mut self, i: usize) -> Result<(), SimError> {
        self.active_tx.retain(|&j| j != i);
        self.log(Some(i), TraceEvent::TxEnd);
        let t = self.sc.timing;
        let exchange_end = self.now + t.psifs_us + self.ack_us + t.guard_us;
        let grant_end = self.nodes[i].grant.map(|(end, _)| end);
        if self.seg.end_us.or(grant_end).is_some_and(|end| exchange_end > end) {
            return Err(SimError::GuardViolation { node: self.nodes[i].cfg.id, time_us: self.now });
        }
        let n = &mut self.nodes[i];
        n.state = NodeState::AwaitingAck;
        if std::mem::take(&mut n.collided) {
            n.stats.collided += 1;
            self.log(Some(i), TraceEvent::Collision);
            self.schedule(exchange_end, Ev::AckDue { node: i, ok: false });
        } else if n.ack_script.pop_front().unwrap_or(true) {
            let id = n.cfg.id;
            let frame = n.in_flight.take().expect("frame in flight");
            self.security.admit_frame(id, &frame)?;
            self.reserved += 1;
            self.schedule(self.now + t.psifs_us, Ev::AckStart(i));
        } else {
            self.schedule(exchange_end, Ev::AckDue { node: i, ok: false });
        }
        if !self.channel_busy() {
            self.idle_since = self.now;
            self.try_resume();
        }
        Ok(())
    }

    fn on_ack_start(&mut self, i: usize) {
        self.occupy(self.ack_us);
        self.log(Some(i), TraceEvent::AckStart);
        self.schedule(self.now + self.ack_us, Ev::AckDue { node: i, ok: true });
    }

    fn on_ack_due(&mut self, i: usize, ok: bool) {
        if ok {
            self.reserved -= 1;
            self.idle_since = self.now;
            let n = &mut self.nodes[i];
            n.stats.delivered += 1;
            n.stats.payload_bits += 8 * n.cfg.payload_bytes as u64;
            n.stats.access_delay_total_us += self.now - n.head_since;
            n.backoff.on_success();
            self.log(Some(i), TraceEvent::Success);
            self.complete_frame(i);
        } else {
            self.nodes[i].backoff.record_failure();
            self.log(Some(i), TraceEvent::Failure);
            if self.nodes[i].backoff.consecutive_failures > self.sc.retry_limit {
                self.nodes[i].stats.failed += 1;
                self.log(Some(i), TraceEvent::Drop);
                self.nodes[i].backoff.on_success();
                self.complete_frame(i);
            } else {
                self.next_frame(i, false);
            }
        }
        self.try_resume();
    }

    /// The head frame left the queue (delivered or dropped).
    fn complete_frame(&mut self, i: usize) {
        let n = &mut self.nodes[i];
        n.queue.pop_front();
        n.seq = n.seq.wrapping_add(1);
        if n.cfg.traffic == Traffic::Saturated {
            n.stats.offered += 1;
            n.queue.push_back(self.now);
        }
        self.next_frame(i, true);
    }

    /// Prepares the head of the queue for access. `fresh` marks a new head.
    fn next_frame(&mut self, i: usize, fresh: bool) {
        let now = self.now;
        let psifs = self.sc.timing.psifs_us;
        let n = &mut self.nodes[i];
        let Some(&arrival) = n.queue.front() else {
            n.state = NodeState::Empty;
            return;
        };
        if fresh {
            n.head_since = arrival.max(now);
        }
        if n.contends() {
            n.state = NodeState::Contending;
            n.backoff.draw_backoff(n.draws.as_mut());
            self.log(Some(i), TraceEvent::Draw);
            // Counting starts at the next slot boundary after the channel
            // has been idle for pSIFS.
            self.nodes[i].backoff.lock(LockReason::Busy);
        } else {
            n.state = NodeState::Waiting;
            if let Some((end, true)) = n.grant {
                self.schedule(now + psifs, Ev::Grant { node: i, end, announce: false, multi: true });
            }
        }
    }

    fn on_arrival(&mut self, i: usize) {
        let now = self.now;
        let cap = self.sc.queue_capacity;
        let n = &mut self.nodes[i];
        n.stats.offered += 1;
        if cap.is_some_and(|c| n.queue.len() >= c) {
            n.stats.failed += 1;
            self.log(Some(i), TraceEvent::Drop);
        } else {
            n.queue.push_back(now);
            self.log(Some(i), TraceEvent::Arrival);
            if self.nodes[i].state == NodeState::Empty {
                self.next_frame(i, true);
                self.try_resume();
            }
        }
        if matches!(self.nodes[i].cfg.traffic, Traffic::Poisson { .. }) {
            let gap = self.poisson_gap(i);
            self.schedule(now + gap, Ev::Arrival(i));
        }
    }

    fn on_grant(&mut self, i: usize, end: u64, announce: bool, multi: bool) -> Result<(), SimError> {
        if announce {
            self.nodes[i].grant = Some((end, multi));
            self.log(Some(i), TraceEvent::Poll);
        }
        if self.nodes[i].grant.is_none() || self.nodes[i].state != NodeState::Waiting || self.channel_busy() {
            return Ok(());
        }
        let t = self.sc.timing;
        if self.now + self.nodes[i].tx_us + t.psifs_us + self.ack_us + t.guard_us > end {
            return Ok(());
        }
        self.start_tx(i)
    }
}
