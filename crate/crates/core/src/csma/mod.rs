//! Per-node CSMA/CA backoff engine.
//!
//! A node with a frame draws its counter uniformly from `[1, CW]`, counts
//! down one per idle CSMA slot while unlocked, and transmits when the
//! counter reaches zero. The counter is frozen (locked) while the channel is
//! busy, outside admissible phases, and when the remainder of the current
//! phase cannot hold the exchange plus guard time. It resumes from the
//! frozen value. `CW` doubles on every second consecutive failure, capped at
//! `CWmax`, and returns to `CWmin` on success.

pub mod trace;

use std::fmt;

use rand::RngCore;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CsmaError {
    #[error("user priority {0} out of range 0..=7")]
    Priority(u8),
    #[error("priority {priority}: need 1 <= cw_min <= cw_max, got ({cw_min}, {cw_max})")]
    Window { priority: u8, cw_min: u32, cw_max: u32 },
    #[error("timing constants must be positive")]
    Timing,
}

/// MAC timing in µs. The defaults are implementation choices.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MacTimingConstants {
    pub psifs_us: u64,
    /// pCSMASlotLength.
    pub slot_us: u64,
    /// Nominal guard time GTn.
    pub guard_us: u64,
}

impl Default for MacTimingConstants {
    fn default() -> Self {
        MacTimingConstants { psifs_us: 50, slot_us: 125, guard_us: 85 }
    }
}

impl MacTimingConstants {
    pub fn validate(&self) -> Result<(), CsmaError> {
        if self.psifs_us == 0 || self.slot_us == 0 || self.guard_us == 0 {
            return Err(CsmaError::Timing);
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PriorityClass {
    pub user_priority: u8,
    pub cw_min: u32,
    pub cw_max: u32,
}

impl PriorityClass {
    pub fn new(user_priority: u8, cw_min: u32, cw_max: u32) -> Result<Self, CsmaError> {
        if user_priority > 7 {
            return Err(CsmaError::Priority(user_priority));
        }
        if cw_min == 0 || cw_min > cw_max {
            return Err(CsmaError::Window { priority: user_priority, cw_min, cw_max });
        }
        Ok(PriorityClass { user_priority, cw_min, cw_max })
    }

    /// Entry of [`PriorityTable::default`].
    pub fn for_priority(user_priority: u8) -> Result<Self, CsmaError> {
        PriorityTable::default().get(user_priority)
    }
}

/// CW bounds for user priorities 0..=7.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PriorityTable(pub [(u32, u32); 8]);

impl Default for PriorityTable {
    fn default() -> Self {
        PriorityTable([(16, 64), (16, 32), (8, 32), (8, 16), (4, 16), (4, 8), (2, 8), (1, 4)])
    }
}

impl PriorityTable {
    pub fn get(&self, user_priority: u8) -> Result<PriorityClass, CsmaError> {
        let &(lo, hi) = self.0.get(user_priority as usize).ok_or(CsmaError::Priority(user_priority))?;
        PriorityClass::new(user_priority, lo, hi)
    }

    pub fn validate(&self) -> Result<(), CsmaError> {
        (0..8).try_for_each(|p| self.get(p).map(|_| ()))
    }
}

/// Source of backoff values in `[1, cw]`. Every [`RngCore`] draws
/// uniformly; [`ScriptedDraws`] replays a fixed sequence.
pub trait BackoffDraw {
    fn draw(&mut self, cw: u32) -> u32;
}

impl<R: RngCore> BackoffDraw for R {
    fn draw(&mut self, cw: u32) -> u32 {
        rand::Rng::gen_range(self, 1..=cw)
    }
}

/// Replays scripted backoff values, clamped to `[1, cw]`; the last value
/// repeats once the script is exhausted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScriptedDraws {
    values: Vec<u32>,
    next: usize,
}

impl ScriptedDraws {
    pub fn new(values: Vec<u32>) -> Self {
        ScriptedDraws { values, next: 0 }
    }
}

impl BackoffDraw for ScriptedDraws {
    fn draw(&mut self, cw: u32) -> u32 {
        let v = self.values.get(self.next).or(self.values.last()).copied().unwrap_or(1);
        self.next += 1;
        v.clamp(1, cw)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LockReason {
    /// Channel busy.
    Busy,
    /// Not enough time left in the phase for the exchange and guard time.
    Guard,
    /// Current phase not admissible (or inactive superframe).
    Phase,
}

impl fmt::Display for LockReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LockReason::Busy => "busy",
            LockReason::Guard => "guard",
            LockReason::Phase => "phase",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GuardDecision {
    Proceed,
    Lock,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BackoffState {
    pub priority: PriorityClass,
    pub cw: u32,
    pub counter: u32,
    pub lock: Option<LockReason>,
    pub consecutive_failures: u32,
}

impl BackoffState {
    pub fn new(priority: PriorityClass) -> Self {
        BackoffState { priority, cw: priority.cw_min, counter: 0, lock: None, consecutive_failures: 0 }
    }

    pub fn is_locked(&self) -> bool {
        self.lock.is_some()
    }

    /// Draws a fresh counter from `[1, cw]` and unlocks.
    pub fn draw_backoff(&mut self, rng: &mut dyn BackoffDraw) {
        self.counter = rng.draw(self.cw);
        self.lock = None;
    }

    /// One idle CSMA slot. Returns true when the counter reaches zero.
    pub fn on_idle_slot(&mut self) -> bool {
        if self.is_locked() || self.counter == 0 {
            return false;
        }
        self.counter -= 1;
        self.counter == 0
    }

    pub fn on_busy(&mut self) {
        self.lock(LockReason::Busy);
    }

    pub fn lock(&mut self, reason: LockReason) {
        self.lock = Some(reason);
    }

    pub fn unlock(&mut self) {
        self.lock = None;
    }

    /// Counts a failure and applies the parity rule, without redrawing.
    pub fn record_failure(&mut self) {
        self.consecutive_failures += 1;
        if self.consecutive_failures.is_multiple_of(2) {
            self.cw = (self.cw * 2).min(self.priority.cw_max);
        }
    }

    pub fn on_failure(&mut self, rng: &mut dyn BackoffDraw) {
        self.record_failure();
        self.draw_backoff(rng);
    }

    pub fn on_success(&mut self) {
        self.cw = self.priority.cw_min;
        self.consecutive_failures = 0;
        self.counter = 0;
        self.lock = None;
    }
}

/// Decides at a slot boundary whether a node may keep counting.
///
/// If the counter could reach zero at the end of the coming slot, the frame,
/// pSIFS, acknowledgement and guard time must all end by `phase_end_us`;
/// otherwise the counter locks. An exact fit proceeds. `None` means the
/// phase has no end.
pub fn guard_check(
    now_us: u64,
    phase_end_us: Option<u64>,
    tx_us: u64,
    ack_us: u64,
    timing: &MacTimingConstants,
) -> GuardDecision {
    let Some(end) = phase_end_us else {
        return GuardDecision::Proceed;
    };
    let needed = now_us + timing.slot_us + tx_us + timing.psifs_us + ack_us + timing.guard_us;
    if needed > end {
        GuardDecision::Lock
    } else {
        GuardDecision::Proceed
    }
}
