use std::collections::HashSet;

use bansim_core::security::{MkSource, SecurityError, SecurityLevel, SecurityManager};
use proptest::prelude::*;

const SECURED: [SecurityLevel; 2] = [SecurityLevel::Authentication, SecurityLevel::AuthEncryption];

#[derive(Debug, Clone)]
enum Op {
    Associate(u32, usize),
    EndPtk(u32),
    EstablishPtk(u32),
    Teardown(u32),
    Send(u32),
}

fn op() -> impl Strategy<Value = Op> {
    let node = 1u32..5;
    prop_oneof![
        (node.clone(), 0usize..3).prop_map(|(n, l)| Op::Associate(n, l)),
        node.clone().prop_map(Op::EndPtk),
        node.clone().prop_map(Op::EstablishPtk),
        node.clone().prop_map(Op::Teardown),
        node.prop_map(Op::Send),
    ]
}

proptest! {
    #[test]
    fn secured_frames_need_an_active_ptk(ops in prop::collection::vec(op(), 1..60)) {
        let mut hub = SecurityManager::new(0);
        let levels = [SecurityLevel::Unsecured, SecurityLevel::Authentication, SecurityLevel::AuthEncryption];
        for op in ops {
            match op {
                Op::Associate(n, l) => { let _ = hub.associate(n, levels[l], MkSource::UnauthenticatedAssociation); }
                Op::EndPtk(n) => { let _ = hub.end_ptk(n); }
                Op::EstablishPtk(n) => { let _ = hub.establish_ptk(n); }
                Op::Teardown(n) => { let _ = hub.teardown(n); }
                Op::Send(n) => {
                    let session = hub.session(n).cloned();
                    let result = hub.secure_frame(n, b"payload");
                    match session {
                        None => prop_assert_eq!(result, Err(SecurityError::NotAssociated(n))),
                        Some(s) if s.level.is_secured() && !s.has_ptk() => {
                            prop_assert_eq!(result, Err(SecurityError::NoPtk(n)))
                        }
                        Some(s) => prop_assert_eq!(result.unwrap().level, s.level),
                    }
                }
            }
        }
    }

    #[test]
    fn any_tag_bit_flip_is_rejected(payload in prop::collection::vec(any::<u8>(), 0..64), level in 0usize..2, bit in 0usize..32) {
        let mut hub = SecurityManager::new(0);
        hub.associate(1, SECURED[level], MkSource::UnauthenticatedAssociation).unwrap();
        let mut frame = hub.secure_frame(1, &payload).unwrap();
        let n = frame.body.len();
        frame.body[n - 4 + bit / 8] ^= 1 << (bit % 8);
        prop_assert_eq!(hub.admit_frame(1, &frame), Err(SecurityError::TagFailure));
    }
}

#[test]
fn ptks_unique_over_1000_sessions() {
    let mut hub = SecurityManager::new(0);
    let mut seen = HashSet::new();
    for node in 1..=100u32 {
        hub.associate(node, SecurityLevel::Authentication, MkSource::UnauthenticatedAssociation).unwrap();
        seen.insert(hub.session(node).unwrap().ptk.unwrap().key);
        for _ in 1..10 {
            hub.end_ptk(node).unwrap();
            seen.insert(hub.establish_ptk(node).unwrap().key);
        }
    }
    assert_eq!(seen.len(), 1000);
    assert_eq!(hub.issued_ptk_count(), 1000);
}

#[test]
fn preshared_mk_sessions_still_get_fresh_ptks() {
    let mut hub = SecurityManager::new(0);
    hub.provision_mk(7, [9; 16]);
    hub.associate(7, SecurityLevel::Authentication, MkSource::Preshared).unwrap();
    let first = hub.session(7).unwrap().ptk.unwrap();
    hub.teardown(7).unwrap();
    hub.associate(7, SecurityLevel::Authentication, MkSource::Preshared).unwrap();
    let second = hub.session(7).unwrap().ptk.unwrap();
    assert_ne!(first.key, second.key);
    assert_eq!(second.session, 2);
}

#[test]
fn replays_are_rejected() {
    for level in SECURED {
        let mut hub = SecurityManager::new(0);
        hub.associate(1, level, MkSource::UnauthenticatedAssociation).unwrap();
        let a = hub.secure_frame(1, b"first").unwrap();
        let b = hub.secure_frame(1, b"second").unwrap();
        assert_eq!(hub.admit_frame(1, &a).unwrap(), b"first");
        assert_eq!(hub.admit_frame(1, &b).unwrap(), b"second");
        assert!(matches!(hub.admit_frame(1, &a), Err(SecurityError::Replay { counter: 1, last: 2 })));
        assert!(matches!(hub.admit_frame(1, &b), Err(SecurityError::Replay { .. })));
    }
}

#[test]
fn frames_do_not_verify_across_sessions() {
    for level in SECURED {
        let mut hub = SecurityManager::new(0);
        hub.associate(1, level, MkSource::UnauthenticatedAssociation).unwrap();
        hub.associate(2, level, MkSource::UnauthenticatedAssociation).unwrap();
        let frame = hub.secure_frame(1, b"for node one").unwrap();
        assert_eq!(hub.admit_frame(2, &frame), Err(SecurityError::TagFailure));
        // A new PTK on the same node is a new session too.
        hub.end_ptk(1).unwrap();
        hub.establish_ptk(1).unwrap();
        assert_eq!(hub.admit_frame(1, &frame), Err(SecurityError::TagFailure));
    }
}

#[test]
fn encryption_hides_the_payload() {
    let mut hub = SecurityManager::new(0);
    hub.associate(1, SecurityLevel::AuthEncryption, MkSource::UnauthenticatedAssociation).unwrap();
    let payload = [0x42u8; 32];
    let frame = hub.secure_frame(1, &payload).unwrap();
    assert_ne!(&frame.body[4..36], &payload[..]);
    assert_eq!(hub.admit_frame(1, &frame).unwrap(), payload);
}

#[test]
fn gtk_only_for_ptk_holders() {
    let mut hub = SecurityManager::new(0);
    hub.associate(1, SecurityLevel::Authentication, MkSource::UnauthenticatedAssociation).unwrap();
    hub.associate(2, SecurityLevel::AuthEncryption, MkSource::UnauthenticatedAssociation).unwrap();
    hub.associate(3, SecurityLevel::Unsecured, MkSource::UnauthenticatedAssociation).unwrap();
    assert_eq!(hub.distribute_gtk(5, &[1, 3]), Err(SecurityError::GtkRefused(3)));
    assert_eq!(hub.distribute_gtk(5, &[1, 9]), Err(SecurityError::GtkRefused(9)));
    assert!(hub.session(1).unwrap().gtk.is_none());
    let group = hub.distribute_gtk(5, &[1, 2]).unwrap();
    assert_eq!(hub.session(2).unwrap().gtk.unwrap().key, group.gtk.unwrap());
    hub.end_ptk(1).unwrap();
    assert!(hub.session(1).unwrap().gtk.is_none());
    assert_eq!(hub.distribute_gtk(5, &[1, 2]), Err(SecurityError::GtkRefused(1)));
}
