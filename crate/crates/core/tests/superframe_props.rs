use bansim_core::superframe::{
    admissible, build_layout, check_allocations, place_scheduled, schedule_polls, AccessKind, Direction, LayoutConfig,
    PhaseKind, ScheduledAllocation, SuperframeError,
};
use proptest::prelude::*;

fn lengths() -> impl Strategy<Value = [u32; 8]> {
    (1u32..4, prop::array::uniform7(0u32..12)).prop_map(|(beacon, rest)| {
        let mut l = [0; 8];
        l[0] = beacon;
        l[1..].copy_from_slice(&rest);
        l
    })
}

fn alloc(node: u32, start_slot: u32, length_slots: u32, period: u32, offset: u32) -> ScheduledAllocation {
    ScheduledAllocation { node, start_slot, length_slots, period, offset, direction: Direction::Uplink }
}

proptest! {
    #[test]
    fn phases_tile_the_superframe(lengths in lengths(), slot_us in 1u64..600) {
        let layout = build_layout(&LayoutConfig { slot_length_us: slot_us, ..LayoutConfig::default() }.with_lengths(lengths)).unwrap();
        let mut t = 0;
        for p in &layout.phases {
            let (start, end) = layout.phase_span_us(p.kind).unwrap();
            prop_assert_eq!(start, t);
            prop_assert!(end > start);
            t = end;
        }
        prop_assert_eq!(t, layout.duration_us());
        // Every µs-resolution probe at slot edges maps to the phase spanning it.
        for slot in 0..layout.slots_per_superframe as u64 {
            for probe in [slot * slot_us, (slot + 1) * slot_us - 1] {
                let (kind, left) = layout.phase_at(probe).unwrap();
                let (start, end) = layout.phase_span_us(kind).unwrap();
                prop_assert!(start <= probe && probe < end);
                prop_assert_eq!(left, end - probe);
            }
        }
        let beyond = matches!(layout.phase_at(t), Err(SuperframeError::OutOfRange { .. }));
        prop_assert!(beyond);
    }

    #[test]
    fn co_occurrence_matches_brute_force(p1 in 1u32..13, p2 in 1u32..13, o1 in 0u32..13, o2 in 0u32..13) {
        let a = alloc(1, 0, 1, p1, o1 % p1);
        let b = alloc(2, 0, 1, p2, o2 % p2);
        let brute = (0..(p1 * p2) as u64).any(|s| a.active_in(s) && b.active_in(s));
        prop_assert_eq!(a.co_occurs(&b), brute);
    }

    #[test]
    fn accepted_allocations_never_collide(raw in prop::collection::vec((1u32..4, 0u32..10, 1u32..4, 1u32..5, 0u32..5), 1..6)) {
        let layout = build_layout(&LayoutConfig::default().with_lengths([1, 0, 2, 12, 0, 0, 0, 0])).unwrap();
        let allocs: Vec<_> = raw
            .into_iter()
            .map(|(node, start, len, period, offset)| alloc(node, 3 + start, len.min(12 - start), period, offset % period))
            .collect();
        let accepted = check_allocations(&allocs, &layout).is_ok();
        let mut clash = false;
        for s in 0..60 {
            match place_scheduled(&allocs, &layout, s) {
                Ok(active) => {
                    for w in active.windows(2) {
                        prop_assert!(w[0].start_slot <= w[1].start_slot);
                    }
                }
                Err(SuperframeError::Conflict { .. }) => clash = true,
                Err(e) => return Err(TestCaseError::fail(format!("{e}"))),
            }
        }
        prop_assert_eq!(accepted, !clash);
    }

    #[test]
    fn poll_grants_fit_their_phase(type_len in 1u32..20, nodes in prop::collection::vec(1u32..50, 1..6), grant in 100u64..3000) {
        let layout = build_layout(&LayoutConfig::default().with_lengths([1, 0, 2, type_len, 0, 0, 0, 0])).unwrap();
        let (start, end) = layout.phase_span_us(PhaseKind::TypeA).unwrap();
        let grants = schedule_polls(&layout, &nodes, PhaseKind::TypeA, grant).unwrap();
        prop_assert_eq!(grants.len() as u64, (end - start) / grant);
        for (i, g) in grants.iter().enumerate() {
            prop_assert_eq!(g.node, nodes[i % nodes.len()]);
            prop_assert_eq!(g.start_us, start + i as u64 * grant);
            prop_assert!(g.start_us + g.length_us <= end);
        }
    }
}

#[test]
fn admissibility_table() {
    use AccessKind::*;
    for up in 0..8u8 {
        assert!(!admissible(PhaseKind::Beacon, up, Contention));
        assert_eq!(admissible(PhaseKind::Eap1, up, Contention), up == 7);
        assert!(admissible(PhaseKind::Rap1, up, Contention));
        assert!(admissible(PhaseKind::Cap, up, Contention));
        assert!(!admissible(PhaseKind::Rap2, up, Polled));
        assert!(admissible(PhaseKind::TypeA, up, Polled));
        assert!(admissible(PhaseKind::TypeB, up, Scheduled));
        assert!(!admissible(PhaseKind::TypeB, up, Contention));
    }
}
