//! The fixed 7-byte MAC header used by the simulator and the frame tools.
//!
//! ```text
//! byte 0  frame control: security level (bits 1..0), frame type (bits 4..2)
//! byte 1  recipient id
//! byte 2  sender id
//! byte 3  hub id
//! byte 4  sequence number
//! byte 5  fragment number
//! byte 6  reserved (zero)
//! ```

use thiserror::Error;

use crate::security::SecurityLevel;

pub const MAC_HEADER_LEN: usize = 7;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FrameType {
    Data,
    Ack,
    Beacon,
    Poll,
    Management,
}

impl FrameType {
    fn code(self) -> u8 {
        match self {
            FrameType::Data => 0,
            FrameType::Ack => 1,
            FrameType::Beacon => 2,
            FrameType::Poll => 3,
            FrameType::Management => 4,
        }
    }

    fn from_code(c: u8) -> Option<Self> {
        Some(match c {
            0 => FrameType::Data,
            1 => FrameType::Ack,
            2 => FrameType::Beacon,
            3 => FrameType::Poll,
            4 => FrameType::Management,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum MacHeaderError {
    #[error("MAC header must be {MAC_HEADER_LEN} bytes, got {0}")]
    Length(usize),
    #[error("unknown frame type code {0}")]
    FrameType(u8),
    #[error("invalid security level {0}")]
    SecurityLevel(u8),
    #[error("reserved MAC header bits are not zero")]
    Reserved,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct MacHeader {
    pub frame_type: FrameType,
    pub security: SecurityLevel,
    pub recipient: u8,
    pub sender: u8,
    pub hub: u8,
    pub sequence: u8,
    pub fragment: u8,
}

impl MacHeader {
    pub fn data(sender: u8, recipient: u8, hub: u8, sequence: u8, security: SecurityLevel) -> Self {
        MacHeader { frame_type: FrameType::Data, security, recipient, sender, hub, sequence, fragment: 0 }
    }

    pub fn to_bytes(&self) -> [u8; MAC_HEADER_LEN] {
        let fc = (self.frame_type.code() << 2) | self.security.as_u8();
        [fc, self.recipient, self.sender, self.hub, self.sequence, self.fragment, 0]
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, MacHeaderError> {
        if bytes.len() != MAC_HEADER_LEN {
            return Err(MacHeaderError::Length(bytes.len()));
        }
        if bytes[0] & 0xE0 != 0 || bytes[6] != 0 {
            return Err(MacHeaderError::Reserved);
        }
        let level = bytes[0] & 0x3;
        let ty = (bytes[0] >> 2) & 0x7;
        Ok(MacHeader {
            frame_type: FrameType::from_code(ty).ok_or(MacHeaderError::FrameType(ty))?,
            security: SecurityLevel::from_u8(level).ok_or(MacHeaderError::SecurityLevel(level))?,
            recipient: bytes[1],
            sender: bytes[2],
            hub: bytes[3],
            sequence: bytes[4],
            fragment: bytes[5],
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let h = MacHeader::data(3, 0, 0, 42, SecurityLevel::AuthEncryption);
        assert_eq!(MacHeader::from_bytes(&h.to_bytes()).unwrap(), h);
        let mut bad = h.to_bytes();
        bad[0] |= 0x3;
        assert_eq!(MacHeader::from_bytes(&bad), Err(MacHeaderError::SecurityLevel(3)));
        bad[6] = 1;
        assert_eq!(MacHeader::from_bytes(&bad), Err(MacHeaderError::Reserved));
    }
}
