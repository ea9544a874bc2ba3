//! Fixed binary framing for messages between agents.
//!
//! Layout: kind (1 byte), sender (1 byte), round (u32 BE), stamp (f64 BE),
//! payload length (u16 BE), payload.

use crate::gf::FieldSpec;
use crate::protocol::Location;

pub const HEADER_LEN: usize = 16;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FrameError {
    #[error("frame truncated: need {need} bytes, have {have}")]
    Truncated { need: usize, have: usize },
    #[error("unknown frame kind {0}")]
    UnknownKind(u8),
    #[error("unknown sender {0}")]
    UnknownSender(u8),
    #[error("payload of {got} bytes, field elements take {expected}")]
    PayloadLength { expected: usize, got: usize },
    #[error("payload too long: {0} bytes")]
    PayloadTooLong(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[repr(u8)]
pub enum FrameKind {
    Challenge = 0,
    Response = 1,
    RevealBit = 2,
    RevealAk = 3,
}

impl FrameKind {
    pub fn from_byte(b: u8) -> Result<Self, FrameError> {
        Ok(match b {
            0 => FrameKind::Challenge,
            1 => FrameKind::Response,
            2 => FrameKind::RevealBit,
            3 => FrameKind::RevealAk,
            other => return Err(FrameError::UnknownKind(other)),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[repr(u8)]
pub enum AgentId {
    A1 = 0,
    A2 = 1,
    B1 = 2,
    B2 = 3,
}

impl AgentId {
    pub const ALL: [AgentId; 4] = [AgentId::A1, AgentId::A2, AgentId::B1, AgentId::B2];

    pub fn from_byte(b: u8) -> Result<Self, FrameError> {
        Self::ALL.get(b as usize).copied().ok_or(FrameError::UnknownSender(b))
    }

    pub fn location(self) -> Location {
        match self {
            AgentId::A1 | AgentId::B1 => Location::One,
            AgentId::A2 | AgentId::B2 => Location::Two,
        }
    }

    pub fn alice_at(location: Location) -> Self {
        match location {
            Location::One => AgentId::A1,
            Location::Two => AgentId::A2,
        }
    }

    pub fn bob_at(location: Location) -> Self {
        match location {
            Location::One => AgentId::B1,
            Location::Two => AgentId::B2,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            AgentId::A1 => "A1",
            AgentId::A2 => "A2",
            AgentId::B1 => "B1",
            AgentId::B2 => "B2",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Frame {
    pub kind: FrameKind,
    pub sender: AgentId,
    pub round: u32,
    /// Simulated emission time in seconds.
    pub stamp: f64,
    pub payload: Vec<u8>,
}

impl Frame {
    pub fn encode(&self) -> Result<Vec<u8>, FrameError> {
        let len = u16::try_from(self.payload.len()).map_err(|_| FrameError::PayloadTooLong(self.payload.len()))?;
        let mut out = Vec::with_capacity(HEADER_LEN + self.payload.len());
        out.push(self.kind as u8);
        out.push(self.sender as u8);
        out.extend_from_slice(&self.round.to_be_bytes());
        out.extend_from_slice(&self.stamp.to_be_bytes());
        out.extend_from_slice(&len.to_be_bytes());
        out.extend_from_slice(&self.payload);
        Ok(out)
    }

    /// Decodes one frame from the front of `bytes`; returns it with the
    /// number of bytes consumed.
    pub fn decode(bytes: &[u8]) -> Result<(Self, usize), FrameError> {
        if bytes.len() < HEADER_LEN {
            return Err(FrameError::Truncated { need: HEADER_LEN, have: bytes.len() });
        }
        let kind = FrameKind::from_byte(bytes[0])?;
        let sender = AgentId::from_byte(bytes[1])?;
        let round = u32::from_be_bytes(bytes[2..6].try_into().expect("4 bytes"));
        let stamp = f64::from_be_bytes(bytes[6..14].try_into().expect("8 bytes"));
        let len = u16::from_be_bytes(bytes[14..16].try_into().expect("2 bytes")) as usize;
        let need = HEADER_LEN + len;
        if bytes.len() < need {
            return Err(FrameError::Truncated { need, have: bytes.len() });
        }
        let payload = bytes[HEADER_LEN..need].to_vec();
        Ok((Self { kind, sender, round, stamp, payload }, need))
    }

    /// Payloads always carry exactly one canonical field element.
    pub fn check_payload(&self, field: &FieldSpec) -> Result<(), FrameError> {
        let expected = field.byte_len();
        if self.payload.len() != expected {
            return Err(FrameError::PayloadLength { expected, got: self.payload.len() });
        }
        Ok(())
    }
}
