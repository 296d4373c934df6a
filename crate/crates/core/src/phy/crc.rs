//! Bitwise, non-reflected CRC used for the frame check sequence and the
//! header check fields.

/// A non-reflected CRC of width 1..=32.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Crc {
    pub width: u32,
    pub poly: u32,
    pub init: u32,
    pub xorout: u32,
}

/// CRC-16/CCITT-FALSE: poly 0x1021, init 0xFFFF, no reflection.
pub const CRC16_CCITT_FALSE: Crc = Crc { width: 16, poly: 0x1021, init: 0xFFFF, xorout: 0 };

/// CRC-4 (x^4 + x + 1) protecting the 15-bit NB and HBC headers.
pub const CRC4_HEADER: Crc = Crc { width: 4, poly: 0x3, init: 0xF, xorout: 0 };

/// CRC-8 (x^8 + x^2 + x + 1) protecting the UWB PHY header.
pub const CRC8_PHR: Crc = Crc { width: 8, poly: 0x07, init: 0x00, xorout: 0 };

impl Crc {
    fn mask(&self) -> u32 {
        if self.width == 32 {
            u32::MAX
        } else {
            (1u32 << self.width) - 1
        }
    }

    pub fn checksum_bits(&self, bits: &[bool]) -> u32 {
        let top = 1u32 << (self.width - 1);
        let mut reg = self.init & self.mask();
        for &bit in bits {
            let feedback = ((reg & top) != 0) ^ bit;
            reg = (reg << 1) & self.mask();
            if feedback {
                reg ^= self.poly;
            }
        }
        (reg ^ self.xorout) & self.mask()
    }

    pub fn checksum(&self, bytes: &[u8]) -> u32 {
        self.checksum_bits(&super::bits::bytes_to_bits(bytes))
    }
}
