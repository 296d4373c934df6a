//! Security levels and the MK → PTK → GTK key lifecycle.
//!
//! Cryptography sits behind two traits. The defaults derive keys and tags
//! from SHA-256 and encrypt with a SHA-256 keystream; they exist to exercise
//! the state machine and are not meant to protect anything.
//!
//! A secured frame body (level 1 or 2) is
//!
//! ```text
//! counter(4, big endian) | payload (plain at level 1, encrypted at level 2) | tag(4)
//! ```
//!
//! and the level itself travels in the MAC header frame-control byte.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::superframe::NodeId;

pub type Key = [u8; 16];
pub const COUNTER_LEN: usize = 4;
pub const TAG_LEN: usize = 4;
/// Bytes a secured level adds to the frame body.
pub const SECURITY_OVERHEAD: usize = COUNTER_LEN + TAG_LEN;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub enum SecurityLevel {
    #[default]
    Unsecured,
    Authentication,
    AuthEncryption,
}

impl SecurityLevel {
    pub fn as_u8(self) -> u8 {
        self as u8
    }

    pub fn from_u8(v: u8) -> Option<Self> {
        match v {
            0 => Some(SecurityLevel::Unsecured),
            1 => Some(SecurityLevel::Authentication),
            2 => Some(SecurityLevel::AuthEncryption),
            _ => None,
        }
    }

    pub fn is_secured(self) -> bool {
        self != SecurityLevel::Unsecured
    }

    pub fn overhead_bytes(self) -> usize {
        if self.is_secured() {
            SECURITY_OVERHEAD
        } else {
            0
        }
    }
}

impl fmt::Display for SecurityLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_u8())
    }
}

impl FromStr for SecurityLevel {
    type Err = SecurityError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.trim()
            .parse::<u8>()
            .ok()
            .and_then(SecurityLevel::from_u8)
            .ok_or_else(|| SecurityError::InvalidLevel(s.to_string()))
    }
}

/// How a node's master key comes to exist.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum MkSource {
    /// A key provisioned out of band with [`SecurityManager::provision_mk`].
    Preshared,
    /// Created during association when nothing is provisioned.
    #[default]
    UnauthenticatedAssociation,
}

impl FromStr for MkSource {
    type Err = SecurityError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "preshared" => Ok(MkSource::Preshared),
            "unauthenticated" | "unauthenticated-association" => Ok(MkSource::UnauthenticatedAssociation),
            other => Err(SecurityError::InvalidLevel(format!("unknown MK source `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SecurityError {
    #[error("node {0} is already associated")]
    AlreadyAssociated(NodeId),
    #[error("node {0} is not associated")]
    NotAssociated(NodeId),
    #[error("node {0} has no master key")]
    MissingMk(NodeId),
    #[error("node {0} already has an active PTK")]
    PtkActive(NodeId),
    #[error("node {0} has no active PTK")]
    NoPtk(NodeId),
    #[error("derived PTK was already used in an earlier session")]
    PtkReuse,
    #[error("GTK distribution refused: node {0} has no active PTK")]
    GtkRefused(NodeId),
    #[error("frame is at security level {got}, session expects {expected}")]
    LevelMismatch { expected: SecurityLevel, got: SecurityLevel },
    #[error("authentication tag mismatch")]
    TagFailure,
    #[error("replayed counter {counter} (last accepted {last})")]
    Replay { counter: u32, last: u32 },
    #[error("secured frame body too short")]
    Malformed,
    #[error("invalid security level `{0}`")]
    InvalidLevel(String),
    #[error("a preshared MK was requested for node {0} but none is provisioned")]
    NotProvisioned(NodeId),
}

/// Derives pairwise and group keys.
pub trait KeyDerivation: Send + Sync + fmt::Debug {
    fn derive(&self, label: &str, key: &Key, context: &[u8]) -> Key;
}

/// Authenticates and encrypts frame bodies.
pub trait FrameCipher: Send + Sync + fmt::Debug {
    fn tag(&self, key: &Key, counter: u32, level: SecurityLevel, payload: &[u8]) -> [u8; TAG_LEN];
    /// Reversible: applying it twice with the same inputs is the identity.
    fn transform(&self, key: &Key, counter: u32, payload: &[u8]) -> Vec<u8>;
}

#[derive(Debug, Clone, Copy, Default)]
pub struct Sha256Kdf;

impl KeyDerivation for Sha256Kdf {
    fn derive(&self, label: &str, key: &Key, context: &[u8]) -> Key {
        let digest = Sha256::new().chain_update(label.as_bytes()).chain_update(key).chain_update(context).finalize();
        let mut out = [0u8; 16];
        out.copy_from_slice(&digest[..16]);
        out
    }
}

/// Keyed test transform: SHA-256 truncated tag and XOR keystream.
#[derive(Debug, Clone, Copy, Default)]
pub struct TestCipher;

impl FrameCipher for TestCipher {
    fn tag(&self, key: &Key, counter: u32, level: SecurityLevel, payload: &[u8]) -> [u8; TAG_LEN] {
        let digest = Sha256::new()
            .chain_update(b"tag")
            .chain_update(key)
            .chain_update(counter.to_be_bytes())
            .chain_update([level.as_u8()])
            .chain_update(payload)
            .finalize();
        let mut out = [0u8; TAG_LEN];
        out.copy_from_slice(&digest[..TAG_LEN]);
        out
    }

    fn transform(&self, key: &Key, counter: u32, payload: &[u8]) -> Vec<u8> {
        let mut out = Vec::with_capacity(payload.len());
        for (block, chunk) in payload.chunks(32).enumerate() {
            let stream = Sha256::new()
                .chain_update(b"stream")
                .chain_update(key)
                .chain_update(counter.to_be_bytes())
                .chain_update((block as u32).to_be_bytes())
                .finalize();
            out.extend(chunk.iter().zip(stream.iter()).map(|(a, b)| a ^ b));
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MasterKey {
    pub source: MkSource,
    pub key: Key,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Ptk {
    pub key: Key,
    /// Session number under the node's MK, starting at 1.
    pub session: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GroupKey {
    pub group_id: u32,
    pub key: Key,
}

/// Security state of one node–hub association.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SecuritySession {
    pub node: NodeId,
    pub hub: NodeId,
    pub level: SecurityLevel,
    pub mk: Option<MasterKey>,
    pub ptk: Option<Ptk>,
    pub gtk: Option<GroupKey>,
    /// Last counter used on transmit.
    pub tx_counter: u32,
    /// Highest counter accepted on receive.
    pub rx_watermark: Option<u32>,
}

impl SecuritySession {
    pub fn has_ptk(&self) -> bool {
        self.ptk.is_some()
    }
}

/// A frame body after [`SecurityManager::secure_frame`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SecuredFrame {
    pub level: SecurityLevel,
    /// Counter, payload and tag as carried in the frame body.
    pub body: Vec<u8>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupKeyState {
    pub group_id: u32,
    pub gtk: Option<Key>,
    pub members: BTreeSet<NodeId>,
}

/// Hub-side key store: sessions, provisioned master keys and the registry of
/// every PTK ever issued.
#[derive(Debug, Clone)]
pub struct SecurityManager {
    pub hub: NodeId,
    sessions: BTreeMap<NodeId, SecuritySession>,
    preshared: HashMap<NodeId, Key>,
    /// Per-node MK session counters; survive teardown.
    session_counters: HashMap<NodeId, u64>,
    unauthenticated_mks: u64,
    issued_ptks: HashSet<Key>,
    group_epochs: HashMap<u32, u64>,
    kdf: Arc<dyn KeyDerivation>,
    cipher: Arc<dyn FrameCipher>,
}

impl SecurityManager {
    pub fn new(hub: NodeId) -> Self {
        Self::with_crypto(hub, Arc::new(Sha256Kdf), Arc::new(TestCipher))
    }

    pub fn with_crypto(hub: NodeId, kdf: Arc<dyn KeyDerivation>, cipher: Arc<dyn FrameCipher>) -> Self {
        SecurityManager {
            hub,
            sessions: BTreeMap::new(),
            preshared: HashMap::new(),
            session_counters: HashMap::new(),
            unauthenticated_mks: 0,
            issued_ptks: HashSet::new(),
            group_epochs: HashMap::new(),
            kdf,
            cipher,
        }
    }

    pub fn provision_mk(&mut self, node: NodeId, key: Key) {
        self.preshared.insert(node, key);
    }

    pub fn session(&self, node: NodeId) -> Option<&SecuritySession> {
        self.sessions.get(&node)
    }

    pub fn sessions(&self) -> impl Iterator<Item = &SecuritySession> {
        self.sessions.values()
    }

    pub fn issued_ptk_count(&self) -> usize {
        self.issued_ptks.len()
    }

    fn session_mut(&mut self, node: NodeId) -> Result<&mut SecuritySession, SecurityError> {
        self.sessions.get_mut(&node).ok_or(SecurityError::NotAssociated(node))
    }

    /// Associates `node` at `level`. Secured levels activate an MK (the
    /// provisioned one if `source` is preshared, a fresh one otherwise) and
    /// establish a PTK.
    pub fn associate(
        &mut self,
        node: NodeId,
        level: SecurityLevel,
        source: MkSource,
    ) -> Result<&SecuritySession, SecurityError> {
        if self.sessions.contains_key(&node) {
            return Err(SecurityError::AlreadyAssociated(node));
        }
        let mut session = SecuritySession {
            node,
            hub: self.hub,
            level,
            mk: None,
            ptk: None,
            gtk: None,
            tx_counter: 0,
            rx_watermark: None,
        };
        if level.is_secured() {
            let mk = match source {
                MkSource::Preshared => {
                    let key = *self.preshared.get(&node).ok_or(SecurityError::NotProvisioned(node))?;
                    MasterKey { source, key }
                }
                MkSource::UnauthenticatedAssociation => {
                    self.unauthenticated_mks += 1;
                    let mut context = node.to_be_bytes().to_vec();
                    context.extend_from_slice(&self.unauthenticated_mks.to_be_bytes());
                    MasterKey { source, key: self.kdf.derive("mk", &[0; 16], &context) }
                }
            };
            session.mk = Some(mk);
        }
        self.sessions.insert(node, session);
        if level.is_secured() {
            if let Err(e) = self.establish_ptk(node) {
                self.sessions.remove(&node);
                return Err(e);
            }
        }
        Ok(&self.sessions[&node])
    }

    /// Derives a fresh PTK from the node's MK and the next session number.
    pub fn establish_ptk(&mut self, node: NodeId) -> Result<Ptk, SecurityError> {
        let hub = self.hub;
        let session = self.sessions.get(&node).ok_or(SecurityError::NotAssociated(node))?;
        let mk = session.mk.ok_or(SecurityError::MissingMk(node))?;
        if session.ptk.is_some() {
            return Err(SecurityError::PtkActive(node));
        }
        let counter = self.session_counters.entry(node).or_insert(0);
        *counter += 1;
        let mut context = node.to_be_bytes().to_vec();
        context.extend_from_slice(&hub.to_be_bytes());
        context.extend_from_slice(&counter.to_be_bytes());
        let ptk = Ptk { key: self.kdf.derive("ptk", &mk.key, &context), session: *counter };
        if !self.issued_ptks.insert(ptk.key) {
            return Err(SecurityError::PtkReuse);
        }
        let session = self.session_mut(node)?;
        session.ptk = Some(ptk);
        session.tx_counter = 0;
        session.rx_watermark = None;
        Ok(ptk)
    }

    /// Ends the current PTK (and any GTK held through it), keeping the MK.
    pub fn end_ptk(&mut self, node: NodeId) -> Result<(), SecurityError> {
        let session = self.session_mut(node)?;
        session.ptk = None;
        session.gtk = None;
        Ok(())
    }

    /// Removes the association entirely.
    pub fn teardown(&mut self, node: NodeId) -> Result<SecuritySession, SecurityError> {
        self.sessions.remove(&node).ok_or(SecurityError::NotAssociated(node))
    }

    /// Shares a new GTK among `members`, each of which needs an active PTK.
    pub fn distribute_gtk(&mut self, group_id: u32, members: &[NodeId]) -> Result<GroupKeyState, SecurityError> {
        for &m in members {
            match self.sessions.get(&m) {
                Some(s) if s.has_ptk() => {}
                _ => return Err(SecurityError::GtkRefused(m)),
            }
        }
        let members: BTreeSet<NodeId> = members.iter().copied().collect();
        if members.is_empty() {
            return Ok(GroupKeyState { group_id, gtk: None, members });
        }
        let epoch = self.group_epochs.entry(group_id).or_insert(0);
        *epoch += 1;
        let mut context = self.hub.to_be_bytes().to_vec();
        context.extend_from_slice(&group_id.to_be_bytes());
        context.extend_from_slice(&epoch.to_be_bytes());
        let key = self.kdf.derive("gtk", &[0; 16], &context);
        for m in &members {
            self.sessions.get_mut(m).expect("checked above").gtk = Some(GroupKey { group_id, key });
        }
        Ok(GroupKeyState { group_id, gtk: Some(key), members })
    }

    /// Protects `payload` for transmission on `node`'s session.
    pub fn secure_frame(&mut self, node: NodeId, payload: &[u8]) -> Result<SecuredFrame, SecurityError> {
        let cipher = Arc::clone(&self.cipher);
        let session = self.session_mut(node)?;
        secure_with(session, cipher.as_ref(), payload)
    }

    /// Checks and unwraps a frame received on `node`'s session.
    pub fn admit_frame(&mut self, node: NodeId, frame: &SecuredFrame) -> Result<Vec<u8>, SecurityError> {
        let cipher = Arc::clone(&self.cipher);
        let session = self.session_mut(node)?;
        admit_with(session, cipher.as_ref(), frame)
    }
}

/// [`SecurityManager::secure_frame`] on a detached session.
pub fn secure_with(
    session: &mut SecuritySession,
    cipher: &dyn FrameCipher,
    payload: &[u8],
) -> Result<SecuredFrame, SecurityError> {
    if !session.level.is_secured() {
        return Ok(SecuredFrame { level: session.level, body: payload.to_vec() });
    }
    let ptk = session.ptk.ok_or(SecurityError::NoPtk(session.node))?;
    session.tx_counter += 1;
    let counter = session.tx_counter;
    let carried = match session.level {
        SecurityLevel::AuthEncryption => cipher.transform(&ptk.key, counter, payload),
        _ => payload.to_vec(),
    };
    let tag = cipher.tag(&ptk.key, counter, session.level, &carried);
    let mut body = counter.to_be_bytes().to_vec();
    body.extend_from_slice(&carried);
    body.extend_from_slice(&tag);
    Ok(SecuredFrame { level: session.level, body })
}

/// [`SecurityManager::admit_frame`] on a detached session.
pub fn admit_with(
    session: &mut SecuritySession,
    cipher: &dyn FrameCipher,
    frame: &SecuredFrame,
) -> Result<Vec<u8>, SecurityError> {
    if frame.level != session.level {
        return Err(SecurityError::LevelMismatch { expected: session.level, got: frame.level });
    }
    if !session.level.is_secured() {
        return Ok(frame.body.clone());
    }
    let ptk = session.ptk.ok_or(SecurityError::NoPtk(session.node))?;
    if frame.body.len() < SECURITY_OVERHEAD {
        return Err(SecurityError::Malformed);
    }
    let (head, rest) = frame.body.split_at(COUNTER_LEN);
    let (carried, tag) = rest.split_at(rest.len() - TAG_LEN);
    let counter = u32::from_be_bytes(head.try_into().expect("4 bytes"));
    if cipher.tag(&ptk.key, counter, session.level, carried) != tag {
        return Err(SecurityError::TagFailure);
    }
    if let Some(last) = session.rx_watermark {
        if counter <= last {
            return Err(SecurityError::Replay { counter, last });
        }
    }
    session.rx_watermark = Some(counter);
    Ok(match session.level {
        SecurityLevel::AuthEncryption => cipher.transform(&ptk.key, counter, carried),
        _ => carried.to_vec(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn level0_has_no_keys_and_is_identity() {
        let mut m = SecurityManager::new(0);
        let s = m.associate(1, SecurityLevel::Unsecured, MkSource::default()).unwrap();
        assert!(s.mk.is_none() && s.ptk.is_none());
        let f = m.secure_frame(1, b"abc").unwrap();
        assert_eq!(f.body, b"abc");
        assert_eq!(m.admit_frame(1, &f).unwrap(), b"abc");
    }

    #[test]
    fn preshared_level2_gets_ptk() {
        let mut m = SecurityManager::new(0);
        m.provision_mk(4, [7; 16]);
        let s = m.associate(4, SecurityLevel::AuthEncryption, MkSource::Preshared).unwrap();
        assert_eq!(s.mk.unwrap().source, MkSource::Preshared);
        assert!(s.has_ptk());
        assert_eq!(
            m.associate(5, SecurityLevel::Authentication, MkSource::Preshared).unwrap_err(),
            SecurityError::NotProvisioned(5)
        );
        assert!(m.session(5).is_none());
    }

    #[test]
    fn unauthenticated_path_creates_mk() {
        let mut m = SecurityManager::new(0);
        let s = m.associate(2, SecurityLevel::AuthEncryption, MkSource::UnauthenticatedAssociation).unwrap();
        assert_eq!(s.mk.unwrap().source, MkSource::UnauthenticatedAssociation);
        assert!(s.has_ptk());
    }

    #[test]
    fn reassociation_needs_teardown() {
        let mut m = SecurityManager::new(0);
        m.associate(1, SecurityLevel::Authentication, MkSource::default()).unwrap();
        assert_eq!(
            m.associate(1, SecurityLevel::Authentication, MkSource::default()).unwrap_err(),
            SecurityError::AlreadyAssociated(1)
        );
        m.teardown(1).unwrap();
        m.associate(1, SecurityLevel::Authentication, MkSource::default()).unwrap();
    }

    #[test]
    fn ptk_preconditions() {
        let mut m = SecurityManager::new(0);
        m.associate(1, SecurityLevel::Authentication, MkSource::default()).unwrap();
        assert_eq!(m.establish_ptk(1), Err(SecurityError::PtkActive(1)));
        m.associate(2, SecurityLevel::Unsecured, MkSource::default()).unwrap();
        assert_eq!(m.establish_ptk(2), Err(SecurityError::MissingMk(2)));
        let first = m.session(1).unwrap().ptk.unwrap();
        m.end_ptk(1).unwrap();
        let second = m.establish_ptk(1).unwrap();
        assert_ne!(first.key, second.key);
        assert_eq!(second.session, 2);
    }

    #[test]
    fn gtk_requires_ptk() {
        let mut m = SecurityManager::new(0);
        for n in 1..=3 {
            m.associate(n, SecurityLevel::Authentication, MkSource::default()).unwrap();
        }
        m.associate(9, SecurityLevel::Unsecured, MkSource::default()).unwrap();
        let empty = m.distribute_gtk(1, &[]).unwrap();
        assert!(empty.members.is_empty() && empty.gtk.is_none());
        let g = m.distribute_gtk(1, &[1, 2, 3]).unwrap();
        for n in 1..=3 {
            assert_eq!(m.session(n).unwrap().gtk.unwrap().key, g.gtk.unwrap());
        }
        assert_eq!(m.distribute_gtk(2, &[1, 9]), Err(SecurityError::GtkRefused(9)));
        m.end_ptk(2).unwrap();
        assert!(m.session(2).unwrap().gtk.is_none());
    }

    #[test]
    fn replay_and_wrong_session() {
        let mut m = SecurityManager::new(0);
        m.associate(1, SecurityLevel::AuthEncryption, MkSource::default()).unwrap();
        m.associate(2, SecurityLevel::AuthEncryption, MkSource::default()).unwrap();
        let f = m.secure_frame(1, b"vital signs").unwrap();
        assert_ne!(&f.body[4..15], b"vital signs");
        assert_eq!(m.admit_frame(2, &f), Err(SecurityError::TagFailure));
        assert_eq!(m.admit_frame(1, &f).unwrap(), b"vital signs");
        assert_eq!(m.admit_frame(1, &f), Err(SecurityError::Replay { counter: 1, last: 1 }));
    }

    #[test]
    fn level_mismatch_rejected() {
        let mut m = SecurityManager::new(0);
        m.associate(1, SecurityLevel::Authentication, MkSource::default()).unwrap();
        let mut f = m.secure_frame(1, b"x").unwrap();
        f.level = SecurityLevel::AuthEncryption;
        assert!(matches!(m.admit_frame(1, &f), Err(SecurityError::LevelMismatch { .. })));
    }
}
