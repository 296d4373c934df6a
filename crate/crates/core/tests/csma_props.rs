use bansim_core::csma::trace::{parse, render, TraceEvent, TraceRecord};
use bansim_core::csma::{BackoffDraw, BackoffState, PriorityClass};
use bansim_core::superframe::PhaseKind;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Reference interpreter: odd failures keep CW, even failures double it up
/// to CWmax, success resets to CWmin.
fn reference(cw_min: u32, cw_max: u32, outcomes: &[bool]) -> (u32, u32) {
    let mut cw = cw_min;
    let mut failures = 0;
    for &ok in outcomes {
        if ok {
            cw = cw_min;
            failures = 0;
        } else {
            failures += 1;
            if failures % 2 == 0 {
                cw = if 2 * cw > cw_max { cw_max } else { 2 * cw };
            }
        }
    }
    (cw, failures)
}

#[test]
fn cw_rule_matches_reference_interpreter() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    for _ in 0..100_000 {
        let up = rng.gen_range(0..8u8);
        let p = PriorityClass::for_priority(up).unwrap();
        let outcomes: Vec<bool> = (0..rng.gen_range(0..24)).map(|_| rng.gen_bool(0.3)).collect();
        let mut s = BackoffState::new(p);
        for &ok in &outcomes {
            if ok {
                s.on_success();
            } else {
                s.on_failure(&mut rng);
                assert!((1..=s.cw).contains(&s.counter));
            }
        }
        assert_eq!((s.cw, s.consecutive_failures), reference(p.cw_min, p.cw_max, &outcomes), "{outcomes:?}");
    }
}

#[test]
fn draws_are_uniform_over_the_window() {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let mut counts = [0u32; 9];
    let n = 100_000;
    for _ in 0..n {
        counts[rng.draw(8) as usize] += 1;
    }
    assert_eq!(counts[0], 0);
    for c in &counts[1..] {
        let f = *c as f64 / n as f64;
        assert!((f - 0.125).abs() <= 0.01, "{counts:?}");
    }
}

fn event() -> impl Strategy<Value = TraceEvent> {
    (0usize..17).prop_map(|i| {
        let names = [
            "phase_start",
            "arrival",
            "draw",
            "unlock",
            "idle",
            "lock_busy",
            "lock_guard",
            "lock_phase",
            "tx_start",
            "tx_end",
            "collision",
            "ack_start",
            "success",
            "failure",
            "drop",
            "beacon",
            "poll",
        ];
        names[i].parse().unwrap()
    })
}

proptest! {
    #[test]
    fn cw_stays_within_bounds(up in 0u8..8, outcomes in prop::collection::vec(any::<bool>(), 0..64), seed: u64) {
        let p = PriorityClass::for_priority(up).unwrap();
        let mut s = BackoffState::new(p);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for ok in outcomes {
            if ok { s.on_success() } else { s.on_failure(&mut rng) }
            prop_assert!(p.cw_min <= s.cw && s.cw <= p.cw_max);
        }
    }

    #[test]
    fn countdown_takes_exactly_counter_slots(up in 0u8..8, seed: u64) {
        let mut s = BackoffState::new(PriorityClass::for_priority(up).unwrap());
        s.draw_backoff(&mut ChaCha8Rng::seed_from_u64(seed));
        let start = s.counter;
        let slots = (1..).find(|_| s.on_idle_slot()).unwrap();
        prop_assert_eq!(slots, start);
    }

    #[test]
    fn trace_lines_round_trip(
        rows in prop::collection::vec((any::<u32>(), 0u32..300, event(), 0u32..256, 1u32..257, 0u32..9, prop::option::of(0usize..8)), 0..40)
    ) {
        let records: Vec<TraceRecord> = rows
            .into_iter()
            .map(|(t, node, event, counter, cw, failures, phase)| TraceRecord {
                time_us: t as u64,
                node,
                event,
                counter,
                cw,
                failures,
                phase: phase.map(|i| PhaseKind::ORDER[i]),
            })
            .collect();
        prop_assert_eq!(parse(&render(&records)).unwrap(), records);
    }
}
