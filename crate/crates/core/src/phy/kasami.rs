//! Small-set Kasami sequences of length 63.
//!
//! The base sequence `u` is the m-sequence of the primitive polynomial
//! x^6 + x + 1 (recurrence a[n+6] = a[n+1] ^ a[n], seed 000001). Decimating
//! `u` by 2^3 + 1 = 9 from phase 1 (phase 0 decimates to all zeros) yields
//! `w[i] = u[9i + 1]`, an m-sequence of period 7. The set is
//! `{u} ∪ {u ⊕ T^j w : j = 0..6}`: eight sequences whose periodic
//! cross-correlations take only the values -1, -9 and 7.

use super::CodecError;

pub const KASAMI_LEN: usize = 63;
pub const KASAMI_SET_SIZE: usize = 8;

/// Binary m-sequence of x^6 + x + 1, one full period.
pub fn m_sequence63() -> [u8; KASAMI_LEN] {
    let mut a = [0u8; KASAMI_LEN + 6];
    a[5] = 1;
    for n in 0..KASAMI_LEN {
        a[n + 6] = a[n + 1] ^ a[n];
    }
    let mut out = [0u8; KASAMI_LEN];
    out.copy_from_slice(&a[..KASAMI_LEN]);
    out
}

/// Binary (0/1) form of Kasami sequence `index`.
pub fn kasami63_binary(index: usize) -> Result<[u8; KASAMI_LEN], CodecError> {
    if index >= KASAMI_SET_SIZE {
        return Err(CodecError::KasamiIndex(index));
    }
    let u = m_sequence63();
    if index == 0 {
        return Ok(u);
    }
    let shift = index - 1;
    let mut out = [0u8; KASAMI_LEN];
    for (i, chip) in out.iter_mut().enumerate() {
        *chip = u[i] ^ u[(9 * (i + shift) + 1) % KASAMI_LEN];
    }
    Ok(out)
}

/// Kasami sequence `index` (0..8) as ±1 chips (binary 0 → +1, 1 → -1).
pub fn kasami63(index: usize) -> Result<[i8; KASAMI_LEN], CodecError> {
    let bin = kasami63_binary(index)?;
    Ok(bin.map(|b| if b == 0 { 1 } else { -1 }))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn m_sequence_is_maximal() {
        let u = m_sequence63();
        assert_eq!(u.iter().filter(|&&b| b == 1).count(), 32);
        // Every nonzero 6-bit window appears exactly once per period.
        let mut seen = [false; 64];
        for i in 0..KASAMI_LEN {
            let w = (0..6).fold(0usize, |acc, j| (acc << 1) | u[(i + j) % KASAMI_LEN] as usize);
            assert!(!seen[w]);
            seen[w] = true;
        }
        assert!(!seen[0]);
    }

    #[test]
    fn out_of_range_index() {
        assert_eq!(kasami63(8), Err(CodecError::KasamiIndex(8)));
    }

    #[test]
    fn sequences_are_distinct() {
        let all: Vec<_> = (0..KASAMI_SET_SIZE).map(|i| kasami63_binary(i).unwrap()).collect();
        for i in 0..all.len() {
            for j in i + 1..all.len() {
                assert_ne!(all[i], all[j]);
            }
        }
    }
}
