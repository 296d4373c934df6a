//! MSB-first bit vector helpers shared by the codecs.

/// Appends the low `width` bits of `value`, most significant first.
pub fn push_bits(out: &mut Vec<bool>, value: u64, width: u32) {
    for i in (0..width).rev() {
        out.push((value >> i) & 1 == 1);
    }
}

/// Reads `bits` as an unsigned integer, most significant first.
pub fn read_bits(bits: &[bool]) -> u64 {
    bits.iter().fold(0u64, |acc, &b| (acc << 1) | b as u64)
}

pub fn bytes_to_bits(bytes: &[u8]) -> Vec<bool> {
    let mut out = Vec::with_capacity(bytes.len() * 8);
    for &b in bytes {
        push_bits(&mut out, b as u64, 8);
    }
    out
}

/// Packs bits into bytes, zero-padding the final partial byte.
pub fn bits_to_bytes(bits: &[bool]) -> Vec<u8> {
    bits.chunks(8)
        .map(|chunk| {
            let mut byte = 0u8;
            for (i, &b) in chunk.iter().enumerate() {
                if b {
                    byte |= 0x80 >> i;
                }
            }
            byte
        })
        .collect()
}

/// Parses a hex string, ignoring ASCII whitespace.
pub fn parse_hex(text: &str) -> Option<Vec<u8>> {
    let digits: Vec<u8> = text.bytes().filter(|b| !b.is_ascii_whitespace()).collect();
    if !digits.len().is_multiple_of(2) {
        return None;
    }
    digits
        .chunks(2)
        .map(|pair| {
            let s = std::str::from_utf8(pair).ok()?;
            u8::from_str_radix(s, 16).ok()
        })
        .collect()
}

pub fn to_hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn push_and_read() {
        let mut v = Vec::new();
        push_bits(&mut v, 0b1011, 4);
        push_bits(&mut v, 0x5, 3);
        assert_eq!(v, [true, false, true, true, true, false, true]);
        assert_eq!(read_bits(&v[..4]), 0b1011);
        assert_eq!(read_bits(&v[4..]), 5);
    }

    #[test]
    fn byte_packing_pads_with_zeros() {
        let bits = [true, true, false, true, false, false, false, false, true];
        assert_eq!(bits_to_bytes(&bits), vec![0xD0, 0x80]);
        assert_eq!(bytes_to_bits(&[0xD0])[..4], [true, true, false, true]);
    }

    #[test]
    fn hex() {
        assert_eq!(parse_hex("de ad\nbe ef"), Some(vec![0xde, 0xad, 0xbe, 0xef]));
        assert_eq!(parse_hex("abc"), None);
        assert_eq!(parse_hex("zz"), None);
        assert_eq!(to_hex(&[0x01, 0xff]), "01ff");
    }
}
