//! The sequence of phases a run walks through.

use crate::superframe::{PhaseKind, PhaseLayout};

/// A contiguous stretch of time in one phase (or in no phase).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Segment {
    pub kind: Option<PhaseKind>,
    pub start_us: u64,
    /// `None`: the segment never ends.
    pub end_us: Option<u64>,
    pub superframe: u64,
    /// False in inactive superframes; nothing but the clock runs there.
    pub active: bool,
    /// The hub sends a beacon at the start of this segment.
    pub beacon: bool,
    /// Position of the segment's phase within its superframe layout.
    phase_index: usize,
}

impl Segment {
    pub fn contention(&self) -> bool {
        self.active && self.kind.is_some_and(PhaseKind::is_contention)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ScriptedPhase {
    pub kind: PhaseKind,
    pub start_us: u64,
    pub end_us: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Timeline {
    /// Superframes repeating from the layout's offset.
    Superframes(PhaseLayout),
    /// An explicit list of phases, in time order; gaps and the time after
    /// the last phase belong to no phase. No beacons are sent.
    Scripted(Vec<ScriptedPhase>),
}

impl Timeline {
    pub fn validate(&self) -> Result<(), String> {
        if let Timeline::Scripted(phases) = self {
            let mut t = 0;
            for p in phases {
                if p.start_us < t || p.end_us <= p.start_us {
                    return Err(format!("scripted phase {} at {} µs is out of order or empty", p.kind, p.start_us));
                }
                t = p.end_us;
            }
        }
        Ok(())
    }

    pub fn layout(&self) -> Option<&PhaseLayout> {
        match self {
            Timeline::Superframes(l) => Some(l),
            Timeline::Scripted(_) => None,
        }
    }

    pub fn first(&self) -> Segment {
        match self {
            Timeline::Superframes(l) if l.offset_us > 0 => gap(0, Some(l.offset_us), 0),
            Timeline::Superframes(l) => superframe_segment(l, 0, 0),
            Timeline::Scripted(phases) => scripted_from(phases, 0, 0),
        }
    }

    /// The segment following `seg`; `None` after an endless segment.
    pub fn next(&self, seg: &Segment) -> Option<Segment> {
        let end = seg.end_us?;
        Some(match self {
            Timeline::Superframes(l) => {
                if seg.kind.is_none() {
                    superframe_segment(l, 0, 0)
                } else if seg.phase_index + 1 < l.phases.len() {
                    superframe_segment(l, seg.superframe, seg.phase_index + 1)
                } else {
                    superframe_segment(l, seg.superframe + 1, 0)
                }
            }
            Timeline::Scripted(phases) => {
                let next_index = if seg.kind.is_some() { seg.phase_index + 1 } else { seg.phase_index };
                scripted_from(phases, next_index, end)
            }
        })
    }
}

fn gap(start_us: u64, end_us: Option<u64>, phase_index: usize) -> Segment {
    Segment { kind: None, start_us, end_us, superframe: 0, active: true, beacon: false, phase_index }
}

fn superframe_segment(l: &PhaseLayout, superframe: u64, index: usize) -> Segment {
    let phase = l.phases[index];
    let base = l.superframe_start_us(superframe);
    let start = base + phase.start_slot as u64 * l.slot_length_us;
    Segment {
        kind: Some(phase.kind),
        start_us: start,
        end_us: Some(start + phase.length_slots as u64 * l.slot_length_us),
        superframe,
        active: l.is_active(superframe),
        beacon: phase.kind == PhaseKind::Beacon && l.beacon_sent(superframe),
        phase_index: index,
    }
}

/// The segment starting at `t`, where `phases[index..]` are the phases not
/// yet entered.
fn scripted_from(phases: &[ScriptedPhase], index: usize, t: u64) -> Segment {
    match phases.get(index) {
        None => gap(t, None, index),
        Some(p) if p.start_us > t => gap(t, Some(p.start_us), index),
        Some(p) => Segment {
            kind: Some(p.kind),
            start_us: p.start_us,
            end_us: Some(p.end_us),
            superframe: 0,
            active: true,
            beacon: false,
            phase_index: index,
        },
    }
}
