//! Event trace lines: `time_us,node,event,counter,cw,failures,phase`.
//!
//! Node 0 is the hub. `phase` is `-` outside any phase (inactive
//! superframe).

use std::fmt;
use std::str::FromStr;

use crate::superframe::{NodeId, PhaseKind};

pub const TRACE_HEADER: &str = "time_us,node,event,counter,cw,failures,phase";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TraceEvent {
    PhaseStart,
    Arrival,
    Draw,
    Unlock,
    Idle,
    Lock(crate::csma::LockReason),
    TxStart,
    TxEnd,
    Collision,
    AckStart,
    Success,
    Failure,
    Drop,
    Beacon,
    Poll,
}

impl TraceEvent {
    pub fn name(&self) -> String {
        match self {
            TraceEvent::PhaseStart => "phase_start".into(),
            TraceEvent::Arrival => "arrival".into(),
            TraceEvent::Draw => "draw".into(),
            TraceEvent::Unlock => "unlock".into(),
            TraceEvent::Idle => "idle".into(),
            TraceEvent::Lock(r) => format!("lock_{r}"),
            TraceEvent::TxStart => "tx_start".into(),
            TraceEvent::TxEnd => "tx_end".into(),
            TraceEvent::Collision => "collision".into(),
            TraceEvent::AckStart => "ack_start".into(),
            TraceEvent::Success => "success".into(),
            TraceEvent::Failure => "failure".into(),
            TraceEvent::Drop => "drop".into(),
            TraceEvent::Beacon => "beacon".into(),
            TraceEvent::Poll => "poll".into(),
        }
    }
}

impl FromStr for TraceEvent {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        use crate::csma::LockReason;
        Ok(match s {
            "phase_start" => TraceEvent::PhaseStart,
            "arrival" => TraceEvent::Arrival,
            "draw" => TraceEvent::Draw,
            "unlock" => TraceEvent::Unlock,
            "idle" => TraceEvent::Idle,
            "lock_busy" => TraceEvent::Lock(LockReason::Busy),
            "lock_guard" => TraceEvent::Lock(LockReason::Guard),
            "lock_phase" => TraceEvent::Lock(LockReason::Phase),
            "tx_start" => TraceEvent::TxStart,
            "tx_end" => TraceEvent::TxEnd,
            "collision" => TraceEvent::Collision,
            "ack_start" => TraceEvent::AckStart,
            "success" => TraceEvent::Success,
            "failure" => TraceEvent::Failure,
            "drop" => TraceEvent::Drop,
            "beacon" => TraceEvent::Beacon,
            "poll" => TraceEvent::Poll,
            other => return Err(format!("unknown trace event `{other}`")),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TraceRecord {
    pub time_us: u64,
    pub node: NodeId,
    pub event: TraceEvent,
    pub counter: u32,
    pub cw: u32,
    pub failures: u32,
    pub phase: Option<PhaseKind>,
}

impl fmt::Display for TraceRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{},{},{},{},{},{},{}",
            self.time_us,
            self.node,
            self.event.name(),
            self.counter,
            self.cw,
            self.failures,
            self.phase.map_or("-", PhaseKind::name)
        )
    }
}

impl FromStr for TraceRecord {
    type Err = String;

    fn from_str(line: &str) -> Result<Self, Self::Err> {
        let cols: Vec<&str> = line.trim().split(',').collect();
        if cols.len() != 7 {
            return Err(format!("expected 7 columns, got {}", cols.len()));
        }
        let num = |i: usize| cols[i].parse::<u64>().map_err(|e| format!("column {}: {e}", i + 1));
        Ok(TraceRecord {
            time_us: num(0)?,
            node: num(1)? as NodeId,
            event: cols[2].parse()?,
            counter: num(3)? as u32,
            cw: num(4)? as u32,
            failures: num(5)? as u32,
            phase: match cols[6] {
                "-" => None,
                p => Some(p.parse().map_err(|e| format!("{e}"))?),
            },
        })
    }
}

/// Renders records with the header line.
pub fn render(records: &[TraceRecord]) -> String {
    let mut out = String::from(TRACE_HEADER);
    out.push('\n');
    for r in records {
        out.push_str(&r.to_string());
        out.push('\n');
    }
    out
}

/// Parses rendered trace text; the header line is optional.
pub fn parse(text: &str) -> Result<Vec<TraceRecord>, String> {
    text.lines()
        .filter(|l| !l.trim().is_empty() && l.trim() != TRACE_HEADER)
        .enumerate()
        .map(|(i, l)| l.parse().map_err(|e| format!("trace line {}: {e}", i + 1)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::csma::LockReason;

    #[test]
    fn record_round_trip() {
        let r = TraceRecord {
            time_us: 1785,
            node: 1,
            event: TraceEvent::Lock(LockReason::Guard),
            counter: 2,
            cw: 8,
            failures: 1,
            phase: Some(PhaseKind::Cap),
        };
        assert_eq!(r.to_string(), "1785,1,lock_guard,2,8,1,CAP");
        assert_eq!(parse(&render(&[r])).unwrap(), vec![r]);
    }
}
