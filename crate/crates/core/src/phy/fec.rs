//! Block-code rate expansion and spreading.
//!
//! Only the framing of the BCH codes is modeled: information bits are cut
//! into `k`-bit blocks (the last one zero-padded), and each block is
//! extended to an `n`-bit systematic codeword by a [`BlockEncoder`]. The
//! default encoder emits a deterministic placeholder parity that the
//! decoder re-derives and checks, so every corrupted codeword is detected
//! even though nothing is corrected.

use std::fmt;

use super::crc::Crc;
use super::CodecError;

/// A block code `(n, k)`: `n`-bit codewords carrying `k` information bits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CodeRate {
    pub n: u16,
    pub k: u16,
}

impl CodeRate {
    pub const HEADER: CodeRate = CodeRate { n: 31, k: 19 };
    pub const PSDU: CodeRate = CodeRate { n: 63, k: 51 };

    pub const fn uncoded(n: u16) -> CodeRate {
        CodeRate { n, k: n }
    }

    pub fn ratio(&self) -> f64 {
        self.k as f64 / self.n as f64
    }

    /// An `(n, n)` code carries no parity and has no block structure.
    pub fn is_identity(&self) -> bool {
        self.n == self.k
    }

    pub fn is_valid(&self) -> bool {
        self.k > 0 && self.k <= self.n
    }

    /// Coded length for `info_bits` information bits.
    pub fn coded_len(&self, info_bits: usize) -> usize {
        if self.is_identity() {
            info_bits
        } else {
            info_bits.div_ceil(self.k as usize) * self.n as usize
        }
    }
}

impl fmt::Display for CodeRate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.n, self.k)
    }
}

/// Produces the `n - k` parity bits of one systematic codeword.
pub trait BlockEncoder: Send + Sync + fmt::Debug {
    fn parity(&self, code: CodeRate, data: &[bool]) -> Vec<bool>;
}

/// Placeholder parity: a CRC of width `n - k` over the block's data bits
/// (generator x^12 + x^11 + x^3 + x^2 + x + 1 for the 12-bit parity of
/// both standard codes).
#[derive(Debug, Clone, Copy, Default)]
pub struct PlaceholderParity;

impl BlockEncoder for PlaceholderParity {
    fn parity(&self, code: CodeRate, data: &[bool]) -> Vec<bool> {
        let width = (code.n - code.k) as u32;
        if width == 0 {
            return Vec::new();
        }
        let width = width.min(32);
        let poly = if width == 12 { 0x80F } else { 0x3 | (1 << (width - 1)) };
        let crc = Crc { width, poly, init: 0, xorout: 0 };
        let value = crc.checksum_bits(data) as u64;
        let mut out = Vec::with_capacity((code.n - code.k) as usize);
        // Parity wider than 32 bits repeats the low word's pattern.
        for i in 0..(code.n - code.k) as u32 {
            let bit = width - 1 - (i % width);
            out.push((value >> bit) & 1 == 1);
        }
        out
    }
}

/// Encodes information bits into whole codewords.
pub fn encode(info: &[bool], code: CodeRate, encoder: &dyn BlockEncoder) -> Vec<bool> {
    if code.is_identity() {
        return info.to_vec();
    }
    let k = code.k as usize;
    let mut out = Vec::with_capacity(code.coded_len(info.len()));
    for chunk in info.chunks(k) {
        let mut block = chunk.to_vec();
        block.resize(k, false);
        let parity = encoder.parity(code, &block);
        out.extend_from_slice(&block);
        out.extend(parity);
    }
    out
}

/// Decodes `info_len` information bits from `coded`, which must hold
/// exactly `code.coded_len(info_len)` bits. Parity and padding are
/// verified; nothing is corrected.
pub fn decode(
    coded: &[bool],
    info_len: usize,
    code: CodeRate,
    encoder: &dyn BlockEncoder,
) -> Result<Vec<bool>, CodecError> {
    debug_assert_eq!(coded.len(), code.coded_len(info_len));
    if code.is_identity() {
        return Ok(coded.to_vec());
    }
    let (n, k) = (code.n as usize, code.k as usize);
    let mut info = Vec::with_capacity(info_len);
    for (block_index, block) in coded.chunks(n).enumerate() {
        let (data, parity) = block.split_at(k);
        if encoder.parity(code, data) != parity {
            return Err(CodecError::ParityMismatch { block: block_index });
        }
        info.extend_from_slice(data);
    }
    if info[info_len..].iter().any(|&b| b) {
        return Err(CodecError::PaddingNotZero);
    }
    info.truncate(info_len);
    Ok(info)
}

/// Repeats every bit `factor` times.
pub fn spread(bits: &[bool], factor: u8) -> Vec<bool> {
    bits.iter().flat_map(|&b| std::iter::repeat_n(b, factor as usize)).collect()
}

/// Inverse of [`spread`]; every copy of a bit must agree.
pub fn despread(chips: &[bool], factor: u8) -> Result<Vec<bool>, CodecError> {
    let f = factor as usize;
    debug_assert_eq!(chips.len() % f, 0);
    chips
        .chunks(f)
        .map(|c| if c.iter().all(|&b| b == c[0]) { Ok(c[0]) } else { Err(CodecError::SpreadingMismatch) })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coded_length_rounds_up_to_whole_codewords() {
        assert_eq!(CodeRate::PSDU.coded_len(51), 63);
        assert_eq!(CodeRate::PSDU.coded_len(52), 126);
        assert_eq!(CodeRate::HEADER.coded_len(19), 31);
        assert_eq!(CodeRate::uncoded(63).coded_len(70), 70);
        assert_eq!(CodeRate::PSDU.coded_len(0), 0);
    }

    #[test]
    fn round_trip_with_padding() {
        let info: Vec<bool> = (0..100).map(|i| i % 3 == 0).collect();
        let coded = encode(&info, CodeRate::PSDU, &PlaceholderParity);
        assert_eq!(coded.len(), 126);
        assert_eq!(decode(&coded, 100, CodeRate::PSDU, &PlaceholderParity).unwrap(), info);
    }

    #[test]
    fn every_flip_in_a_codeword_is_detected() {
        let info: Vec<bool> = (0..40).map(|i| i % 5 == 1).collect();
        let coded = encode(&info, CodeRate::PSDU, &PlaceholderParity);
        for i in 0..coded.len() {
            let mut c = coded.clone();
            c[i] = !c[i];
            assert!(decode(&c, 40, CodeRate::PSDU, &PlaceholderParity).is_err(), "flip {i} undetected");
        }
    }

    #[test]
    fn despread_rejects_disagreeing_copies() {
        let chips = spread(&[true, false], 4);
        assert_eq!(chips.len(), 8);
        assert_eq!(despread(&chips, 4).unwrap(), vec![true, false]);
        let mut bad = chips;
        bad[5] = true;
        assert_eq!(despread(&bad, 4), Err(CodecError::SpreadingMismatch));
    }
}
