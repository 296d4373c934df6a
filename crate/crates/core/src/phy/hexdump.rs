//! Annotated hex dump of a serialized frame.
//!
//! One line per field chunk of at most 64 bits:
//!
//! ```text
//! bit_offset  hex_bytes  field
//! ```
//!
//! Field chunks are generally not byte aligned, so each chunk is packed on
//! its own (MSB first, zero-padded).

use std::fmt::Write;

use super::bits::{bits_to_bytes, to_hex};
use super::ppdu::{Frame, Ppdu};

const CHUNK_BITS: usize = 64;

pub fn hexdump<P>(frame: &Frame<P>) -> String {
    let mut out = String::new();
    for field in &frame.fields {
        let bits = &frame.bits[field.start..field.start + field.len];
        let chunks = bits.len().div_ceil(CHUNK_BITS).max(1);
        for (i, chunk) in bits.chunks(CHUNK_BITS).enumerate() {
            let offset = field.start + i * CHUNK_BITS;
            let label = if chunks > 1 {
                format!("{} ({}/{}, {} bits)", field.name, i + 1, chunks, chunk.len())
            } else {
                format!("{} ({} bits)", field.name, chunk.len())
            };
            let _ = writeln!(out, "{offset:>6}  {:<16}  {label}", to_hex(&bits_to_bytes(chunk)));
        }
    }
    out
}

/// `name = value` listing of a decoded frame's fields.
pub fn describe(ppdu: &Ppdu) -> String {
    let mut out = format!("phy = {}\n", ppdu.kind());
    match ppdu {
        Ppdu::Nb(p) => {
            let h = &p.header;
            let _ = writeln!(out, "rate_index = {}", h.rate_index);
            let _ = writeln!(out, "length = {}", h.length);
            let _ = writeln!(out, "scrambler_seed = {}", h.scrambler_seed as u8);
            let _ = writeln!(out, "burst_mode = {}", h.burst_mode as u8);
        }
        Ppdu::Uwb(p) => {
            let _ = writeln!(out, "rate_index = {}", p.phr.rate_index);
            let _ = writeln!(out, "length = {}", p.phr.length);
            let _ = writeln!(out, "scrambler_seed = {}", p.phr.scrambler_seed);
        }
        Ppdu::Hbc(p) => {
            let _ = writeln!(out, "length = {}", p.header.length);
            let _ = writeln!(out, "rate = {}", p.header.rate);
        }
    }
    let psdu = ppdu.psdu();
    let _ = writeln!(out, "mac_header = {}", to_hex(&psdu.mac_header));
    let _ = writeln!(out, "mac_frame_body = {}", to_hex(&psdu.mac_frame_body));
    let _ = writeln!(out, "fcs = {:04x}", psdu.fcs);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phy::{build_hbc_ppdu, build_nb_ppdu, Band, PhyConfig};

    #[test]
    fn one_line_per_chunk_and_annotated() {
        let cfg = PhyConfig::for_band(Band::Ism902, 1).unwrap();
        let frame = build_nb_ppdu(&cfg, &[0; 7], &[0xAA; 3]).unwrap();
        let dump = hexdump(&frame);
        let expected: usize = frame.fields.iter().map(|f| f.len.div_ceil(64)).sum();
        assert_eq!(dump.lines().count(), expected);
        assert!(dump.lines().next().unwrap().starts_with("     0  "));
        assert!(dump.contains("plcp preamble (1/2, 64 bits)"));
        assert!(dump.contains("plcp header (62 bits)"));
    }

    #[test]
    fn hbc_lists_each_preamble_copy() {
        let cfg = PhyConfig::for_band(Band::Hbc16, 0).unwrap();
        let dump = hexdump(&build_hbc_ppdu(&cfg, &[0; 7], &[]).unwrap());
        for i in 0..4 {
            assert!(dump.contains(&format!("preamble[{i}] (32 bits)")));
        }
        assert!(dump.contains("a5c35a3c"));
        assert!(dump.contains("sfd (32 bits)"));
    }
}
