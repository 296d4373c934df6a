//! Bit-exact PPDU construction and parsing for the three PHYs.
//!
//! Layouts (all fields MSB first):
//!
//! ```text
//! NB   preamble(90) | spread(FEC31,19(PLCP header 19)) | spread(FEC(PSDU))
//! UWB  Kasami63 × reps | SFD(63) | spread(FEC31,19(PHR 24)) | spread(FEC(PSDU))
//! HBC  preamble(32) × 4 | SFD(32) | spread(FEC31,19(header 19)) | spread(FEC(PSDU))
//!
//! PSDU        MAC header | MAC frame body (0..=255) | FCS(16)
//! PLCP header rate(3) length(8) scrambler(1) burst(1) reserved(2) HCS(4)
//! UWB PHR     rate(4) length(8) seed(2) reserved(2) HCS(8)
//! HBC header  length(8) rate(3) reserved(4) HCS(4)
//! ```
//!
//! The length fields carry the MAC frame body length; the MAC header length
//! is fixed per [`Codec`]. The parsers are strict: every single-bit change
//! of a built image is reported as an error.

use std::sync::Arc;

use super::bits::{bits_to_bytes, bytes_to_bits, push_bits, read_bits};
use super::crc::{Crc, CRC16_CCITT_FALSE, CRC4_HEADER, CRC8_PHR};
use super::fec::{self, BlockEncoder, CodeRate, PlaceholderParity};
use super::kasami::{kasami63_binary, m_sequence63, KASAMI_LEN};
use super::{CodecError, Component, PhyConfig, PhyKind};

pub const MAX_BODY_LEN: usize = 255;
pub const DEFAULT_MAC_HEADER_LEN: usize = 7;
pub const FCS_BITS: usize = 16;

const NB_HEADER_BITS: usize = 19;
const UWB_PHR_BITS: usize = 24;
const HBC_HEADER_BITS: usize = 19;
const HBC_PREAMBLE_REPS: usize = 4;

/// HBC preamble word, sent four times.
pub const HBC_PREAMBLE: u32 = 0xA5C3_5A3C;
/// HBC start-of-frame delimiter, sent once.
pub const HBC_SFD: u32 = 0x1B4E_D2F0;

/// The 90-bit NB PLCP preamble: one period of the x^6 + x + 1 m-sequence
/// followed by the complement of its first 27 chips.
pub fn nb_preamble() -> Vec<bool> {
    let m = m_sequence63();
    let mut out: Vec<bool> = m.iter().map(|&b| b == 1).collect();
    out.extend(m[..27].iter().map(|&b| b == 0));
    out
}

/// Frame-level codec parameters. [`Codec::default`] holds the documented
/// constants; every field may be overridden.
#[derive(Debug, Clone)]
pub struct Codec {
    pub nb_preamble: Vec<bool>,
    pub uwb_preamble_index: usize,
    pub uwb_preamble_reps: usize,
    pub uwb_sfd: Vec<bool>,
    pub hbc_preamble: Vec<bool>,
    pub hbc_sfd: Vec<bool>,
    /// 16-bit frame check sequence.
    pub fcs: Crc,
    pub mac_header_len: usize,
    pub encoder: Arc<dyn BlockEncoder>,
}

impl Default for Codec {
    fn default() -> Self {
        let word = |w: u32| {
            let mut v = Vec::with_capacity(32);
            push_bits(&mut v, w as u64, 32);
            v
        };
        let uwb_sfd = kasami63_binary(1).expect("index 1 exists").iter().map(|&b| b == 1).collect();
        Codec {
            nb_preamble: nb_preamble(),
            uwb_preamble_index: 0,
            uwb_preamble_reps: 4,
            uwb_sfd,
            hbc_preamble: word(HBC_PREAMBLE),
            hbc_sfd: word(HBC_SFD),
            fcs: CRC16_CCITT_FALSE,
            mac_header_len: DEFAULT_MAC_HEADER_LEN,
            encoder: Arc::new(PlaceholderParity),
        }
    }
}

/// MAC frame carried by every PHY.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Psdu {
    pub mac_header: Vec<u8>,
    pub mac_frame_body: Vec<u8>,
    pub fcs: u16,
}

impl Psdu {
    fn info_bits(&self) -> Vec<bool> {
        let mut bits = bytes_to_bits(&self.mac_header);
        bits.extend(bytes_to_bits(&self.mac_frame_body));
        push_bits(&mut bits, self.fcs as u64, FCS_BITS as u32);
        bits
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct NbPlcpHeader {
    pub rate_index: u8,
    pub length: u8,
    pub scrambler_seed: bool,
    pub burst_mode: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NbPpdu {
    pub header: NbPlcpHeader,
    pub psdu: Psdu,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct UwbPhr {
    pub rate_index: u8,
    pub length: u8,
    pub scrambler_seed: u8,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UwbPpdu {
    pub phr: UwbPhr,
    pub psdu: Psdu,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct HbcHeader {
    pub length: u8,
    pub rate: u8,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HbcPpdu {
    pub header: HbcHeader,
    pub psdu: Psdu,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Ppdu {
    Nb(NbPpdu),
    Uwb(UwbPpdu),
    Hbc(HbcPpdu),
}

impl Ppdu {
    pub fn kind(&self) -> PhyKind {
        match self {
            Ppdu::Nb(_) => PhyKind::Narrowband,
            Ppdu::Uwb(_) => PhyKind::UltraWideband,
            Ppdu::Hbc(_) => PhyKind::BodyCoupled,
        }
    }

    pub fn psdu(&self) -> &Psdu {
        match self {
            Ppdu::Nb(p) => &p.psdu,
            Ppdu::Uwb(p) => &p.psdu,
            Ppdu::Hbc(p) => &p.psdu,
        }
    }
}

/// A named bit range of a serialized image.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FieldSpan {
    pub name: String,
    pub start: usize,
    pub len: usize,
}

/// A structured frame together with its serialized bit image.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Frame<P> {
    pub ppdu: P,
    pub bits: Vec<bool>,
    pub fields: Vec<FieldSpan>,
}

impl<P> Frame<P> {
    pub fn bytes(&self) -> Vec<u8> {
        bits_to_bytes(&self.bits)
    }
}

/// Per-component transmission time, in µs.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Airtime {
    pub preamble_us: f64,
    pub header_us: f64,
    pub psdu_us: f64,
}

impl Airtime {
    pub fn total_us(&self) -> f64 {
        self.preamble_us + self.header_us + self.psdu_us
    }
}

struct ImageWriter {
    bits: Vec<bool>,
    fields: Vec<FieldSpan>,
}

impl ImageWriter {
    fn new() -> Self {
        ImageWriter { bits: Vec::new(), fields: Vec::new() }
    }

    fn field(&mut self, name: impl Into<String>, bits: &[bool]) {
        self.fields.push(FieldSpan { name: name.into(), start: self.bits.len(), len: bits.len() });
        self.bits.extend_from_slice(bits);
    }

    fn finish<P>(self, ppdu: P) -> Frame<P> {
        Frame { ppdu, bits: self.bits, fields: self.fields }
    }
}

struct Reader<'a> {
    bits: &'a [bool],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [bool], CodecError> {
        let end = self.pos + n;
        if end > self.bits.len() {
            return Err(CodecError::Truncated { needed: end, available: self.bits.len() });
        }
        let out = &self.bits[self.pos..end];
        self.pos = end;
        Ok(out)
    }
}

impl Codec {
    fn check_phy(cfg: &PhyConfig, want: PhyKind) -> Result<(), CodecError> {
        if cfg.phy() != want {
            return Err(CodecError::PhyMismatch { expected: cfg.phy(), got: want });
        }
        cfg.validate()?;
        Ok(())
    }

    fn make_psdu(&self, mac_header: &[u8], body: &[u8]) -> Result<Psdu, CodecError> {
        if body.len() > MAX_BODY_LEN {
            return Err(CodecError::FrameTooLong { len: body.len(), max: MAX_BODY_LEN });
        }
        if mac_header.len() != self.mac_header_len {
            return Err(CodecError::MacHeaderLength { expected: self.mac_header_len, got: mac_header.len() });
        }
        let mut covered = mac_header.to_vec();
        covered.extend_from_slice(body);
        let fcs = self.fcs.checksum(&covered) as u16;
        Ok(Psdu { mac_header: mac_header.to_vec(), mac_frame_body: body.to_vec(), fcs })
    }

    fn coded(&self, info: &[bool], code: CodeRate, spreading: u8) -> Vec<bool> {
        fec::spread(&fec::encode(info, code, self.encoder.as_ref()), spreading)
    }

    fn read_coded(
        &self,
        reader: &mut Reader<'_>,
        info_len: usize,
        code: CodeRate,
        spreading: u8,
    ) -> Result<Vec<bool>, CodecError> {
        let chips = reader.take(code.coded_len(info_len) * spreading as usize)?;
        let coded = fec::despread(chips, spreading)?;
        fec::decode(&coded, info_len, code, self.encoder.as_ref())
    }

    fn write_psdu(&self, w: &mut ImageWriter, psdu: &Psdu, cfg: &PhyConfig) {
        w.field("psdu", &self.coded(&psdu.info_bits(), cfg.psdu_fec, cfg.spreading));
    }

    fn read_psdu(&self, reader: &mut Reader<'_>, body_len: usize, cfg: &PhyConfig) -> Result<Psdu, CodecError> {
        let info_len = (self.mac_header_len + body_len) * 8 + FCS_BITS;
        let info = self.read_coded(reader, info_len, cfg.psdu_fec, cfg.spreading)?;
        let covered = bits_to_bytes(&info[..info_len - FCS_BITS]);
        let carried = read_bits(&info[info_len - FCS_BITS..]) as u16;
        let computed = self.fcs.checksum(&covered) as u16;
        if carried != computed {
            return Err(CodecError::FcsMismatch { carried, computed });
        }
        let (mac_header, body) = covered.split_at(self.mac_header_len);
        Ok(Psdu { mac_header: mac_header.to_vec(), mac_frame_body: body.to_vec(), fcs: carried })
    }

    fn expect_pattern(reader: &mut Reader<'_>, pattern: &[bool], err: CodecError) -> Result<(), CodecError> {
        if reader.take(pattern.len())? != pattern {
            return Err(err);
        }
        Ok(())
    }

    fn finish_exact(reader: &Reader<'_>) -> Result<(), CodecError> {
        match reader.bits.len() - reader.pos {
            0 => Ok(()),
            extra => Err(CodecError::TrailingBits(extra)),
        }
    }

    // ---- NB -------------------------------------------------------------

    pub fn build_nb(&self, cfg: &PhyConfig, mac_header: &[u8], body: &[u8]) -> Result<Frame<NbPpdu>, CodecError> {
        let psdu = self.make_psdu(mac_header, body)?;
        let header = NbPlcpHeader { rate_index: cfg.rate_index(), length: body.len() as u8, ..Default::default() };
        self.encode_nb(cfg, &NbPpdu { header, psdu })
    }

    /// Serializes an already structured frame (e.g. with a scrambler seed set).
    pub fn encode_nb(&self, cfg: &PhyConfig, ppdu: &NbPpdu) -> Result<Frame<NbPpdu>, CodecError> {
        Self::check_phy(cfg, PhyKind::Narrowband)?;
        let mut w = ImageWriter::new();
        w.field("plcp preamble", &self.nb_preamble);
        w.field("plcp header", &self.coded(&nb_header_bits(&ppdu.header), cfg.header_fec, cfg.header_spreading));
        self.write_psdu(&mut w, &ppdu.psdu, cfg);
        Ok(w.finish(ppdu.clone()))
    }

    pub fn parse_nb(&self, bits: &[bool], cfg: &PhyConfig) -> Result<NbPpdu, CodecError> {
        let mut reader = Reader { bits, pos: 0 };
        let ppdu = self.read_nb(&mut reader, cfg)?;
        Self::finish_exact(&reader)?;
        Ok(ppdu)
    }

    fn read_nb(&self, reader: &mut Reader<'_>, cfg: &PhyConfig) -> Result<NbPpdu, CodecError> {
        Self::check_phy(cfg, PhyKind::Narrowband)?;
        Self::expect_pattern(reader, &self.nb_preamble, CodecError::PreambleMismatch)?;
        let h = self.read_coded(reader, NB_HEADER_BITS, cfg.header_fec, cfg.header_spreading)?;
        if CRC4_HEADER.checksum_bits(&h[..15]) as u64 != read_bits(&h[15..]) {
            return Err(CodecError::HeaderCheck);
        }
        if read_bits(&h[13..15]) != 0 {
            return Err(CodecError::ReservedBits);
        }
        let header = NbPlcpHeader {
            rate_index: read_bits(&h[0..3]) as u8,
            length: read_bits(&h[3..11]) as u8,
            scrambler_seed: h[11],
            burst_mode: h[12],
        };
        check_rate(cfg, header.rate_index)?;
        let psdu = self.read_psdu(reader, header.length as usize, cfg)?;
        Ok(NbPpdu { header, psdu })
    }

    // ---- UWB ------------------------------------------------------------

    fn uwb_preamble(&self) -> Vec<bool> {
        let seq = kasami63_binary(self.uwb_preamble_index).expect("configured Kasami index is valid");
        let one: Vec<bool> = seq.iter().map(|&b| b == 1).collect();
        one.repeat(self.uwb_preamble_reps)
    }

    pub fn build_uwb(&self, cfg: &PhyConfig, mac_header: &[u8], body: &[u8]) -> Result<Frame<UwbPpdu>, CodecError> {
        let psdu = self.make_psdu(mac_header, body)?;
        let phr = UwbPhr { rate_index: cfg.rate_index(), length: body.len() as u8, scrambler_seed: 0 };
        self.encode_uwb(cfg, &UwbPpdu { phr, psdu })
    }

    pub fn encode_uwb(&self, cfg: &PhyConfig, ppdu: &UwbPpdu) -> Result<Frame<UwbPpdu>, CodecError> {
        Self::check_phy(cfg, PhyKind::UltraWideband)?;
        let mut w = ImageWriter::new();
        let preamble = self.uwb_preamble();
        for (i, rep) in preamble.chunks(KASAMI_LEN).enumerate() {
            w.field(format!("shr preamble[{i}]"), rep);
        }
        w.field("shr sfd", &self.uwb_sfd);
        w.field("phr", &self.coded(&uwb_phr_bits(&ppdu.phr), cfg.header_fec, cfg.header_spreading));
        self.write_psdu(&mut w, &ppdu.psdu, cfg);
        Ok(w.finish(ppdu.clone()))
    }

    pub fn parse_uwb(&self, bits: &[bool], cfg: &PhyConfig) -> Result<UwbPpdu, CodecError> {
        let mut reader = Reader { bits, pos: 0 };
        let ppdu = self.read_uwb(&mut reader, cfg)?;
        Self::finish_exact(&reader)?;
        Ok(ppdu)
    }

    fn read_uwb(&self, reader: &mut Reader<'_>, cfg: &PhyConfig) -> Result<UwbPpdu, CodecError> {
        Self::check_phy(cfg, PhyKind::UltraWideband)?;
        Self::expect_pattern(reader, &self.uwb_preamble(), CodecError::PreambleMismatch)?;
        Self::expect_pattern(reader, &self.uwb_sfd, CodecError::SfdMismatch)?;
        let h = self.read_coded(reader, UWB_PHR_BITS, cfg.header_fec, cfg.header_spreading)?;
        if CRC8_PHR.checksum_bits(&h[..16]) as u64 != read_bits(&h[16..]) {
            return Err(CodecError::HeaderCheck);
        }
        if read_bits(&h[14..16]) != 0 {
            return Err(CodecError::ReservedBits);
        }
        let phr = UwbPhr {
            rate_index: read_bits(&h[0..4]) as u8,
            length: read_bits(&h[4..12]) as u8,
            scrambler_seed: read_bits(&h[12..14]) as u8,
        };
        check_rate(cfg, phr.rate_index)?;
        let psdu = self.read_psdu(reader, phr.length as usize, cfg)?;
        Ok(UwbPpdu { phr, psdu })
    }

    // ---- HBC ------------------------------------------------------------

    pub fn build_hbc(&self, cfg: &PhyConfig, mac_header: &[u8], body: &[u8]) -> Result<Frame<HbcPpdu>, CodecError> {
        let psdu = self.make_psdu(mac_header, body)?;
        let header = HbcHeader { length: body.len() as u8, rate: cfg.rate_index() };
        self.encode_hbc(cfg, &HbcPpdu { header, psdu })
    }

    pub fn encode_hbc(&self, cfg: &PhyConfig, ppdu: &HbcPpdu) -> Result<Frame<HbcPpdu>, CodecError> {
        Self::check_phy(cfg, PhyKind::BodyCoupled)?;
        let mut w = ImageWriter::new();
        for i in 0..HBC_PREAMBLE_REPS {
            w.field(format!("preamble[{i}]"), &self.hbc_preamble);
        }
        w.field("sfd", &self.hbc_sfd);
        w.field("phy header", &self.coded(&hbc_header_bits(&ppdu.header), cfg.header_fec, cfg.header_spreading));
        self.write_psdu(&mut w, &ppdu.psdu, cfg);
        Ok(w.finish(ppdu.clone()))
    }

    pub fn parse_hbc(&self, bits: &[bool], cfg: &PhyConfig) -> Result<HbcPpdu, CodecError> {
        let mut reader = Reader { bits, pos: 0 };
        let ppdu = self.read_hbc(&mut reader, cfg)?;
        Self::finish_exact(&reader)?;
        Ok(ppdu)
    }

    fn read_hbc(&self, reader: &mut Reader<'_>, cfg: &PhyConfig) -> Result<HbcPpdu, CodecError> {
        Self::check_phy(cfg, PhyKind::BodyCoupled)?;
        for _ in 0..HBC_PREAMBLE_REPS {
            Self::expect_pattern(reader, &self.hbc_preamble, CodecError::PreambleMismatch)?;
        }
        Self::expect_pattern(reader, &self.hbc_sfd, CodecError::SfdMismatch)?;
        let h = self.read_coded(reader, HBC_HEADER_BITS, cfg.header_fec, cfg.header_spreading)?;
        if CRC4_HEADER.checksum_bits(&h[..15]) as u64 != read_bits(&h[15..]) {
            return Err(CodecError::HeaderCheck);
        }
        if read_bits(&h[11..15]) != 0 {
            return Err(CodecError::ReservedBits);
        }
        let header = HbcHeader { length: read_bits(&h[0..8]) as u8, rate: read_bits(&h[8..11]) as u8 };
        check_rate(cfg, header.rate)?;
        let psdu = self.read_psdu(reader, header.length as usize, cfg)?;
        Ok(HbcPpdu { header, psdu })
    }

    // ---- PHY-generic ----------------------------------------------------

    /// Builds a frame for whichever PHY `cfg` belongs to.
    pub fn build(&self, cfg: &PhyConfig, mac_header: &[u8], body: &[u8]) -> Result<Frame<Ppdu>, CodecError> {
        Ok(match cfg.phy() {
            PhyKind::Narrowband => map_frame(self.build_nb(cfg, mac_header, body)?, Ppdu::Nb),
            PhyKind::UltraWideband => map_frame(self.build_uwb(cfg, mac_header, body)?, Ppdu::Uwb),
            PhyKind::BodyCoupled => map_frame(self.build_hbc(cfg, mac_header, body)?, Ppdu::Hbc),
        })
    }

    /// Serializes a structured frame of any PHY.
    pub fn encode(&self, cfg: &PhyConfig, ppdu: &Ppdu) -> Result<Frame<Ppdu>, CodecError> {
        Ok(match ppdu {
            Ppdu::Nb(p) => map_frame(self.encode_nb(cfg, p)?, Ppdu::Nb),
            Ppdu::Uwb(p) => map_frame(self.encode_uwb(cfg, p)?, Ppdu::Uwb),
            Ppdu::Hbc(p) => map_frame(self.encode_hbc(cfg, p)?, Ppdu::Hbc),
        })
    }

    pub fn parse(&self, bits: &[bool], cfg: &PhyConfig) -> Result<Ppdu, CodecError> {
        Ok(match cfg.phy() {
            PhyKind::Narrowband => Ppdu::Nb(self.parse_nb(bits, cfg)?),
            PhyKind::UltraWideband => Ppdu::Uwb(self.parse_uwb(bits, cfg)?),
            PhyKind::BodyCoupled => Ppdu::Hbc(self.parse_hbc(bits, cfg)?),
        })
    }

    /// Parses a byte-packed image; up to seven zero pad bits may follow the
    /// frame.
    pub fn parse_bytes(&self, bytes: &[u8], cfg: &PhyConfig) -> Result<Ppdu, CodecError> {
        let bits = bytes_to_bits(bytes);
        let mut reader = Reader { bits: &bits, pos: 0 };
        let ppdu = match cfg.phy() {
            PhyKind::Narrowband => Ppdu::Nb(self.read_nb(&mut reader, cfg)?),
            PhyKind::UltraWideband => Ppdu::Uwb(self.read_uwb(&mut reader, cfg)?),
            PhyKind::BodyCoupled => Ppdu::Hbc(self.read_hbc(&mut reader, cfg)?),
        };
        let rest = &bits[reader.pos..];
        if rest.len() >= 8 || rest.iter().any(|&b| b) {
            return Err(CodecError::TrailingBits(rest.len()));
        }
        Ok(ppdu)
    }

    fn preamble_symbols(&self, phy: PhyKind) -> usize {
        match phy {
            PhyKind::Narrowband => self.nb_preamble.len(),
            PhyKind::UltraWideband => self.uwb_preamble_reps * KASAMI_LEN + self.uwb_sfd.len(),
            PhyKind::BodyCoupled => HBC_PREAMBLE_REPS * self.hbc_preamble.len() + self.hbc_sfd.len(),
        }
    }

    /// Airtime of a frame with a `body_len`-byte body, without building it.
    ///
    /// Header and PSDU times are information bits divided by the component's
    /// information data rate; codeword padding is not charged.
    pub fn frame_airtime(&self, cfg: &PhyConfig, body_len: usize) -> Result<Airtime, CodecError> {
        cfg.validate()?;
        let header_bits = match cfg.phy() {
            PhyKind::Narrowband => NB_HEADER_BITS,
            PhyKind::UltraWideband => UWB_PHR_BITS,
            PhyKind::BodyCoupled => HBC_HEADER_BITS,
        };
        let psdu_bits = (self.mac_header_len + body_len) * 8 + FCS_BITS;
        let header_rate = cfg.info_data_rate(Component::Header)? / 1000.0;
        let psdu_rate = cfg.info_data_rate(Component::Psdu)? / 1000.0;
        Ok(Airtime {
            preamble_us: self.preamble_symbols(cfg.phy()) as f64 / cfg.symbols_per_us(),
            header_us: header_bits as f64 / header_rate,
            psdu_us: psdu_bits as f64 / psdu_rate,
        })
    }

    pub fn ppdu_airtime(&self, ppdu: &Ppdu, cfg: &PhyConfig) -> Result<Airtime, CodecError> {
        if ppdu.kind() != cfg.phy() {
            return Err(CodecError::PhyMismatch { expected: cfg.phy(), got: ppdu.kind() });
        }
        let psdu = ppdu.psdu();
        if psdu.mac_header.len() != self.mac_header_len {
            return Err(CodecError::MacHeaderLength { expected: self.mac_header_len, got: psdu.mac_header.len() });
        }
        self.frame_airtime(cfg, psdu.mac_frame_body.len())
    }
}

fn map_frame<P, Q>(f: Frame<P>, wrap: impl FnOnce(P) -> Q) -> Frame<Q> {
    Frame { ppdu: wrap(f.ppdu), bits: f.bits, fields: f.fields }
}

fn check_rate(cfg: &PhyConfig, got: u8) -> Result<(), CodecError> {
    let expected = cfg.rate_index();
    if got != expected {
        return Err(CodecError::RateMismatch { expected, got });
    }
    Ok(())
}

fn nb_header_bits(h: &NbPlcpHeader) -> Vec<bool> {
    let mut v = Vec::with_capacity(NB_HEADER_BITS);
    push_bits(&mut v, h.rate_index as u64, 3);
    push_bits(&mut v, h.length as u64, 8);
    v.push(h.scrambler_seed);
    v.push(h.burst_mode);
    push_bits(&mut v, 0, 2);
    let hcs = CRC4_HEADER.checksum_bits(&v);
    push_bits(&mut v, hcs as u64, 4);
    v
}

fn uwb_phr_bits(p: &UwbPhr) -> Vec<bool> {
    let mut v = Vec::with_capacity(UWB_PHR_BITS);
    push_bits(&mut v, p.rate_index as u64, 4);
    push_bits(&mut v, p.length as u64, 8);
    push_bits(&mut v, p.scrambler_seed as u64, 2);
    push_bits(&mut v, 0, 2);
    let hcs = CRC8_PHR.checksum_bits(&v);
    push_bits(&mut v, hcs as u64, 8);
    v
}

fn hbc_header_bits(h: &HbcHeader) -> Vec<bool> {
    let mut v = Vec::with_capacity(HBC_HEADER_BITS);
    push_bits(&mut v, h.length as u64, 8);
    push_bits(&mut v, h.rate as u64, 3);
    push_bits(&mut v, 0, 4);
    let hcs = CRC4_HEADER.checksum_bits(&v);
    push_bits(&mut v, hcs as u64, 4);
    v
}

pub fn build_nb_ppdu(cfg: &PhyConfig, mac_header: &[u8], body: &[u8]) -> Result<Frame<NbPpdu>, CodecError> {
    Codec::default().build_nb(cfg, mac_header, body)
}

pub fn parse_nb_ppdu(bits: &[bool], cfg: &PhyConfig) -> Result<NbPpdu, CodecError> {
    Codec::default().parse_nb(bits, cfg)
}

pub fn build_uwb_ppdu(cfg: &PhyConfig, mac_header: &[u8], body: &[u8]) -> Result<Frame<UwbPpdu>, CodecError> {
    Codec::default().build_uwb(cfg, mac_header, body)
}

pub fn parse_uwb_ppdu(bits: &[bool], cfg: &PhyConfig) -> Result<UwbPpdu, CodecError> {
    Codec::default().parse_uwb(bits, cfg)
}

pub fn build_hbc_ppdu(cfg: &PhyConfig, mac_header: &[u8], body: &[u8]) -> Result<Frame<HbcPpdu>, CodecError> {
    Codec::default().build_hbc(cfg, mac_header, body)
}

pub fn parse_hbc_ppdu(bits: &[bool], cfg: &PhyConfig) -> Result<HbcPpdu, CodecError> {
    Codec::default().parse_hbc(bits, cfg)
}

pub fn ppdu_airtime(ppdu: &Ppdu, cfg: &PhyConfig) -> Result<Airtime, CodecError> {
    Codec::default().ppdu_airtime(ppdu, cfg)
}

pub fn frame_airtime(cfg: &PhyConfig, body_len: usize) -> Result<Airtime, CodecError> {
    Codec::default().frame_airtime(cfg, body_len)
}
