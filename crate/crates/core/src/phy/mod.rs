//! PHY layer: band registry, modulation/coding rate engine, and the bit-exact
//! NB, UWB and HBC frame codecs.
//!
//! Every rate in the narrowband table follows from
//!
//! ```text
//! rate = symbol_rate × bits_per_symbol × k/n ÷ spreading
//! ```
//!
//! where `(n, k)` is (31,19) for the PLCP header and (63,51) for the PSDU.

pub mod bits;
pub mod catalog;
pub mod crc;
pub mod fec;
pub mod hexdump;
pub mod kasami;
pub mod ppdu;

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

pub use fec::CodeRate;
pub use ppdu::{
    build_hbc_ppdu, build_nb_ppdu, build_uwb_ppdu, frame_airtime, parse_hbc_ppdu, parse_nb_ppdu, parse_uwb_ppdu,
    ppdu_airtime, Airtime, Codec, Frame, HbcHeader, HbcPpdu, NbPlcpHeader, NbPpdu, Ppdu, Psdu, UwbPhr, UwbPpdu,
    MAX_BODY_LEN,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PhyError {
    #[error("unknown modulation `{0}`")]
    UnknownModulation(String),
    #[error("unknown band `{0}`")]
    UnknownBand(String),
    #[error("unknown PHY configuration `{0}`")]
    UnknownConfig(String),
    #[error("invalid PHY configuration: {0}")]
    InvalidConfig(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CodecError {
    #[error("frame body of {len} bytes exceeds the {max}-byte limit")]
    FrameTooLong { len: usize, max: usize },
    #[error("MAC header must be {expected} bytes, got {got}")]
    MacHeaderLength { expected: usize, got: usize },
    #[error("configuration is for the {expected} PHY, frame is {got}")]
    PhyMismatch { expected: PhyKind, got: PhyKind },
    #[error("preamble mismatch")]
    PreambleMismatch,
    #[error("start-of-frame delimiter mismatch")]
    SfdMismatch,
    #[error("header check sequence mismatch")]
    HeaderCheck,
    #[error("header rate index {got} does not match configuration ({expected})")]
    RateMismatch { expected: u8, got: u8 },
    #[error("reserved header bits are not zero")]
    ReservedBits,
    #[error("parity mismatch in codeword {block}")]
    ParityMismatch { block: usize },
    #[error("codeword padding is not zero")]
    PaddingNotZero,
    #[error("spread chips disagree")]
    SpreadingMismatch,
    #[error("FCS mismatch: frame carries {carried:#06x}, computed {computed:#06x}")]
    FcsMismatch { carried: u16, computed: u16 },
    #[error("truncated frame: need {needed} bits, have {available}")]
    Truncated { needed: usize, available: usize },
    #[error("{0} unexpected bits after the frame")]
    TrailingBits(usize),
    #[error("Kasami index {0} out of range 0..8")]
    KasamiIndex(usize),
    #[error(transparent)]
    Phy(#[from] PhyError),
}

/// The three PHYs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PhyKind {
    Narrowband,
    UltraWideband,
    BodyCoupled,
}

impl fmt::Display for PhyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PhyKind::Narrowband => "NB",
            PhyKind::UltraWideband => "UWB",
            PhyKind::BodyCoupled => "HBC",
        })
    }
}

impl FromStr for PhyKind {
    type Err = PhyError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "nb" => Ok(PhyKind::Narrowband),
            "uwb" => Ok(PhyKind::UltraWideband),
            "hbc" | "efc" => Ok(PhyKind::BodyCoupled),
            _ => Err(PhyError::InvalidConfig(format!("unknown PHY `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Band {
    Mics402,
    Wmts420,
    Ism863,
    Ism902,
    Ism950,
    Ism2360,
    Ism2400,
    UwbLow,
    UwbHigh,
    Hbc16,
    Hbc27,
}

impl Band {
    pub const ALL: [Band; 11] = [
        Band::Mics402,
        Band::Wmts420,
        Band::Ism863,
        Band::Ism902,
        Band::Ism950,
        Band::Ism2360,
        Band::Ism2400,
        Band::UwbLow,
        Band::UwbHigh,
        Band::Hbc16,
        Band::Hbc27,
    ];

    pub const NARROWBAND: [Band; 7] =
        [Band::Mics402, Band::Wmts420, Band::Ism863, Band::Ism902, Band::Ism950, Band::Ism2360, Band::Ism2400];

    pub fn id(self) -> &'static str {
        match self {
            Band::Mics402 => "mics402",
            Band::Wmts420 => "wmts420",
            Band::Ism863 => "ism863",
            Band::Ism902 => "ism902",
            Band::Ism950 => "ism950",
            Band::Ism2360 => "ism2360",
            Band::Ism2400 => "ism2400",
            Band::UwbLow => "uwb-low",
            Band::UwbHigh => "uwb-high",
            Band::Hbc16 => "hbc16",
            Band::Hbc27 => "hbc27",
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Band::Mics402 => "402-405 MHz",
            Band::Wmts420 => "420-450 MHz",
            Band::Ism863 => "863-870 MHz",
            Band::Ism902 => "902-928 MHz",
            Band::Ism950 => "950-956 MHz",
            Band::Ism2360 => "2360-2400 MHz",
            Band::Ism2400 => "2400-2483.5 MHz",
            Band::UwbLow => "UWB low band",
            Band::UwbHigh => "UWB high band",
            Band::Hbc16 => "HBC 16 MHz",
            Band::Hbc27 => "HBC 27 MHz",
        }
    }

    pub fn phy(self) -> PhyKind {
        match self {
            Band::UwbLow | Band::UwbHigh => PhyKind::UltraWideband,
            Band::Hbc16 | Band::Hbc27 => PhyKind::BodyCoupled,
            _ => PhyKind::Narrowband,
        }
    }

    /// Symbol rate shared by every row of the band, in ksps.
    pub fn symbol_rate_ksps(self) -> f64 {
        match self {
            Band::Mics402 | Band::Wmts420 => 187.5,
            Band::Ism863 | Band::Ism950 => 250.0,
            Band::Ism902 => 300.0,
            Band::Ism2360 | Band::Ism2400 => 600.0,
            Band::UwbLow | Band::UwbHigh => 603.1,
            Band::Hbc16 | Band::Hbc27 => 1312.5,
        }
    }

    pub fn header_modulation(self) -> Modulation {
        match self {
            Band::Wmts420 => Modulation::Gmsk,
            Band::UwbLow | Band::UwbHigh => Modulation::UwbGeneric,
            Band::Hbc16 | Band::Hbc27 => Modulation::Efc,
            _ => Modulation::Dbpsk,
        }
    }

    pub fn header_spreading(self) -> u8 {
        match self {
            Band::Ism2360 | Band::Ism2400 | Band::Hbc16 | Band::Hbc27 => 4,
            Band::UwbLow | Band::UwbHigh => 1,
            _ => 2,
        }
    }

    pub fn center_freq_mhz(self) -> f64 {
        match self {
            Band::Mics402 => 403.5,
            Band::Wmts420 => 435.0,
            Band::Ism863 => 866.5,
            Band::Ism902 => 915.0,
            Band::Ism950 => 953.0,
            Band::Ism2360 => 2380.0,
            Band::Ism2400 => 2441.75,
            Band::UwbLow => 3993.6,
            Band::UwbHigh => 7987.2,
            Band::Hbc16 => 16.0,
            Band::Hbc27 => 27.0,
        }
    }

    pub fn channel_bandwidth_mhz(self) -> f64 {
        match self {
            Band::Mics402 => 0.3,
            Band::Wmts420 => 0.32,
            Band::Ism863 | Band::Ism950 => 0.4,
            Band::Ism902 => 0.5,
            Band::Ism2360 | Band::Ism2400 => 1.0,
            Band::UwbLow | Band::UwbHigh => 499.2,
            Band::Hbc16 | Band::Hbc27 => 4.0,
        }
    }

    /// Beacons may not be transmitted in this band (MICS).
    pub fn beacon_prohibited(self) -> bool {
        self == Band::Mics402
    }

    /// PSDU modes `(modulation, spreading, code)` indexed by the PLCP rate
    /// index.
    pub fn psdu_modes(self) -> Vec<(Modulation, u8, CodeRate)> {
        use Modulation::*;
        let p = CodeRate::PSDU;
        match self {
            Band::Mics402 | Band::Ism863 | Band::Ism902 | Band::Ism950 => {
                vec![(Dbpsk, 2, p), (Dqpsk, 1, p), (D8psk, 1, p)]
            }
            Band::Wmts420 => vec![(Gmsk, 2, p), (Gmsk, 1, p), (Gmsk, 1, CodeRate::uncoded(63))],
            Band::Ism2360 | Band::Ism2400 => vec![(Dbpsk, 4, p), (Dbpsk, 1, p), (Dqpsk, 1, p)],
            Band::UwbLow | Band::UwbHigh => vec![(UwbGeneric, 1, p)],
            Band::Hbc16 | Band::Hbc27 => vec![(Efc, 4, p)],
        }
    }
}

impl fmt::Display for Band {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for Band {
    type Err = PhyError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Band::ALL
            .into_iter()
            .find(|b| b.id().eq_ignore_ascii_case(s))
            .ok_or_else(|| PhyError::UnknownBand(s.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Modulation {
    /// π/2-DBPSK
    Dbpsk,
    /// π/4-DQPSK
    Dqpsk,
    /// π/8-D8PSK
    D8psk,
    Gmsk,
    UwbGeneric,
    Efc,
}

impl Modulation {
    pub fn bits_per_symbol(self) -> u32 {
        match self {
            Modulation::Dbpsk | Modulation::Gmsk | Modulation::UwbGeneric | Modulation::Efc => 1,
            Modulation::Dqpsk => 2,
            Modulation::D8psk => 3,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Modulation::Dbpsk => "pi/2-DBPSK",
            Modulation::Dqpsk => "pi/4-DQPSK",
            Modulation::D8psk => "pi/8-D8PSK",
            Modulation::Gmsk => "GMSK",
            Modulation::UwbGeneric => "UWB",
            Modulation::Efc => "EFC",
        }
    }
}

impl fmt::Display for Modulation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Modulation {
    type Err = PhyError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let key = s.to_ascii_lowercase();
        Ok(match key.as_str() {
            "pi/2-dbpsk" | "dbpsk" => Modulation::Dbpsk,
            "pi/4-dqpsk" | "dqpsk" => Modulation::Dqpsk,
            "pi/8-d8psk" | "d8psk" => Modulation::D8psk,
            "gmsk" => Modulation::Gmsk,
            "uwb" => Modulation::UwbGeneric,
            "efc" => Modulation::Efc,
            _ => return Err(PhyError::UnknownModulation(s.to_string())),
        })
    }
}

/// Which part of the PPDU a rate refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Component {
    Header,
    Psdu,
}

impl fmt::Display for Component {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Component::Header => "header",
            Component::Psdu => "psdu",
        })
    }
}

impl FromStr for Component {
    type Err = PhyError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "header" | "plcp header" => Ok(Component::Header),
            "psdu" => Ok(Component::Psdu),
            _ => Err(PhyError::InvalidConfig(format!("unknown component `{s}`"))),
        }
    }
}

/// One modulation/coding configuration: a row of the rate table, or a
/// UWB/HBC mode.
///
/// `modulation` and `spreading` describe the PSDU; the PLCP header is always
/// sent with `header_modulation`/`header_spreading` and the `header_fec`
/// code, at the same symbol rate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhyConfig {
    pub band: Band,
    pub modulation: Modulation,
    pub symbol_rate_ksps: f64,
    pub header_fec: CodeRate,
    pub psdu_fec: CodeRate,
    pub spreading: u8,
    pub header_modulation: Modulation,
    pub header_spreading: u8,
    pub center_freq_mhz: f64,
    pub channel_bandwidth_mhz: f64,
}

impl PhyConfig {
    /// The band's PSDU mode `index` (see [`Band::psdu_modes`]).
    pub fn for_band(band: Band, index: usize) -> Result<PhyConfig, PhyError> {
        let modes = band.psdu_modes();
        let (modulation, spreading, psdu_fec) =
            *modes.get(index).ok_or_else(|| PhyError::InvalidConfig(format!("{band} has no PSDU mode {index}")))?;
        Ok(PhyConfig {
            band,
            modulation,
            symbol_rate_ksps: band.symbol_rate_ksps(),
            header_fec: CodeRate::HEADER,
            psdu_fec,
            spreading,
            header_modulation: band.header_modulation(),
            header_spreading: band.header_spreading(),
            center_freq_mhz: band.center_freq_mhz(),
            channel_bandwidth_mhz: band.channel_bandwidth_mhz(),
        })
    }

    /// A configuration describing the band's PLCP header row: its PSDU is
    /// sent exactly like the header (modulation, spreading and code), so
    /// both components have the header rate.
    pub fn header_row(band: Band) -> PhyConfig {
        let mut cfg = PhyConfig::for_band(band, 0).expect("every band has mode 0");
        cfg.modulation = band.header_modulation();
        cfg.spreading = band.header_spreading();
        cfg.psdu_fec = cfg.header_fec;
        cfg
    }

    pub fn phy(&self) -> PhyKind {
        self.band.phy()
    }

    pub fn validate(&self) -> Result<(), PhyError> {
        for s in [self.spreading, self.header_spreading] {
            if ![1, 2, 4].contains(&s) {
                return Err(PhyError::InvalidConfig(format!("spreading {s} not in {{1, 2, 4}}")));
            }
        }
        if !self.header_fec.is_valid() || !self.psdu_fec.is_valid() {
            return Err(PhyError::InvalidConfig("code rate needs 0 < k <= n".into()));
        }
        if !(self.symbol_rate_ksps.is_finite() && self.symbol_rate_ksps > 0.0) {
            return Err(PhyError::InvalidConfig("symbol rate must be positive".into()));
        }
        Ok(())
    }

    /// Position of this PSDU mode in the band's mode list; 7 marks a mode
    /// outside it.
    pub fn rate_index(&self) -> u8 {
        self.band
            .psdu_modes()
            .iter()
            .position(|&(m, s, c)| m == self.modulation && s == self.spreading && c == self.psdu_fec)
            .map(|i| i as u8)
            .unwrap_or(7)
    }

    /// Information data rate of `component`, in Kbps.
    pub fn info_data_rate(&self, component: Component) -> Result<f64, PhyError> {
        info_data_rate(self, component)
    }

    /// Channel symbol rate in symbols per µs.
    pub(crate) fn symbols_per_us(&self) -> f64 {
        self.symbol_rate_ksps / 1000.0
    }
}

/// `symbol_rate × bits_per_symbol × k/n ÷ spreading`, in Kbps.
pub fn info_data_rate(cfg: &PhyConfig, component: Component) -> Result<f64, PhyError> {
    cfg.validate()?;
    let (modulation, fec, spreading) = match component {
        Component::Header => (cfg.header_modulation, cfg.header_fec, cfg.header_spreading),
        Component::Psdu => (cfg.modulation, cfg.psdu_fec, cfg.spreading),
    };
    Ok(cfg.symbol_rate_ksps * modulation.bits_per_symbol() as f64 * fec.ratio() / spreading as f64)
}

/// A named configuration from the registry.
#[derive(Debug, Clone, PartialEq)]
pub struct NamedConfig {
    pub name: String,
    pub cfg: PhyConfig,
    /// The component this entry's rate describes.
    pub component: Component,
}

impl NamedConfig {
    pub fn rate_kbps(&self) -> f64 {
        info_data_rate(&self.cfg, self.component).expect("registry entries are valid")
    }
}

/// One row of the narrowband modulation-parameter table, with the printed
/// information data rate it must reproduce.
#[derive(Debug, Clone, PartialEq)]
pub struct RateTableRow {
    pub entry: NamedConfig,
    pub table_kbps: f64,
}

/// The 21 narrowband rows: a PLCP header row and two PSDU rows for each of
/// the seven bands.
pub fn rate_table() -> Vec<RateTableRow> {
    const PRINTED: [(Band, [f64; 3]); 7] = [
        (Band::Mics402, [57.5, 75.9, 303.6]),
        (Band::Wmts420, [57.5, 75.9, 151.8]),
        (Band::Ism863, [76.6, 101.2, 404.8]),
        (Band::Ism902, [91.9, 121.4, 485.7]),
        (Band::Ism950, [76.6, 101.2, 404.8]),
        (Band::Ism2360, [91.9, 121.4, 485.7]),
        (Band::Ism2400, [91.9, 121.4, 485.7]),
    ];
    let mut rows = Vec::with_capacity(21);
    for (band, printed) in PRINTED {
        rows.push(RateTableRow {
            entry: NamedConfig {
                name: format!("{}.h", band.id()),
                cfg: PhyConfig::header_row(band),
                component: Component::Header,
            },
            table_kbps: printed[0],
        });
        for i in 0..2 {
            rows.push(RateTableRow {
                entry: NamedConfig {
                    name: format!("{}.{}", band.id(), i + 1),
                    cfg: PhyConfig::for_band(band, i).expect("table modes exist"),
                    component: Component::Psdu,
                },
                table_kbps: printed[i + 1],
            });
        }
    }
    rows
}

/// Every built-in configuration: the 21 table rows followed by the extra
/// PSDU modes: uncoded 187.5 Kbps GMSK, the D8PSK mode of the sub-GHz
/// DBPSK/DQPSK bands, 971.4 Kbps DQPSK at 2.36/2.4 GHz, UWB and HBC.
pub fn registry() -> Vec<NamedConfig> {
    let mut out: Vec<NamedConfig> = rate_table().into_iter().map(|r| r.entry).collect();
    let extra = [
        ("wmts420.u", Band::Wmts420, 2),
        ("ism2400.3", Band::Ism2400, 2),
        ("ism2360.3", Band::Ism2360, 2),
        ("mics402.3", Band::Mics402, 2),
        ("ism863.3", Band::Ism863, 2),
        ("ism902.3", Band::Ism902, 2),
        ("ism950.3", Band::Ism950, 2),
        ("uwb-low", Band::UwbLow, 0),
        ("uwb-high", Band::UwbHigh, 0),
        ("hbc16", Band::Hbc16, 0),
        ("hbc27", Band::Hbc27, 0),
    ];
    for (name, band, mode) in extra {
        out.push(NamedConfig {
            name: name.to_string(),
            cfg: PhyConfig::for_band(band, mode).expect("extra modes exist"),
            component: Component::Psdu,
        });
    }
    out
}

pub fn lookup(registry: &[NamedConfig], name: &str) -> Result<NamedConfig, PhyError> {
    registry
        .iter()
        .find(|e| e.name.eq_ignore_ascii_case(name))
        .cloned()
        .ok_or_else(|| PhyError::UnknownConfig(name.to_string()))
}

/// One UWB channel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UwbChannel {
    pub channel_id: u8,
    pub center_freq_mhz: f64,
    pub mandatory: bool,
}

impl UwbChannel {
    pub const BANDWIDTH_MHZ: f64 = 499.2;

    pub fn band(&self) -> Band {
        if self.channel_id <= 3 {
            Band::UwbLow
        } else {
            Band::UwbHigh
        }
    }
}

/// Channels 1-3 (low band) and 4-11 (high band), spaced by one 499.2 MHz
/// channel bandwidth; channels 2 and 7 are mandatory.
pub fn uwb_channel_plan() -> Vec<UwbChannel> {
    let low = (1..=3u8).map(|c| (c, 3494.4 + (c - 1) as f64 * 499.2));
    let high = (4..=11u8).map(|c| (c, 6489.6 + (c - 4) as f64 * 499.2));
    low.chain(high)
        .map(|(channel_id, f)| UwbChannel {
            channel_id,
            center_freq_mhz: (f * 10.0).round() / 10.0,
            mandatory: channel_id == 2 || channel_id == 7,
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dqpsk_402_rate() {
        let cfg = PhyConfig::for_band(Band::Mics402, 1).unwrap();
        assert!((cfg.info_data_rate(Component::Psdu).unwrap() - 303.6).abs() < 0.05);
    }

    #[test]
    fn identity_code_gives_symbol_rate() {
        let mut cfg = PhyConfig::for_band(Band::Mics402, 0).unwrap();
        cfg.psdu_fec = CodeRate::uncoded(63);
        cfg.spreading = 1;
        assert_eq!(cfg.info_data_rate(Component::Psdu).unwrap(), 187.5);
    }

    #[test]
    fn invalid_spreading_rejected() {
        let mut cfg = PhyConfig::for_band(Band::Ism902, 0).unwrap();
        cfg.spreading = 3;
        assert!(matches!(info_data_rate(&cfg, Component::Psdu), Err(PhyError::InvalidConfig(_))));
    }

    #[test]
    fn unknown_modulation_name() {
        assert_eq!("qam64".parse::<Modulation>(), Err(PhyError::UnknownModulation("qam64".into())));
    }

    #[test]
    fn table_invariants() {
        let rows = rate_table();
        assert_eq!(rows.len(), 21);
        for row in &rows {
            let cfg = &row.entry.cfg;
            assert_eq!(cfg.header_fec, CodeRate::HEADER);
            if row.entry.component == Component::Psdu {
                assert_eq!(cfg.psdu_fec, CodeRate::PSDU);
            }
            assert!([1, 2, 4].contains(&cfg.spreading));
        }
    }

    #[test]
    fn extra_rates() {
        let reg = registry();
        let r = |n: &str| lookup(&reg, n).unwrap().rate_kbps();
        assert!((r("wmts420.u") - 187.5).abs() < 1e-9);
        assert!((r("ism2400.3") - 971.4).abs() < 0.05);
        assert!((r("uwb-low") - 488.2).abs() < 0.05);
    }

    #[test]
    fn uwb_and_hbc_bandwidths() {
        for band in [Band::UwbLow, Band::UwbHigh] {
            assert_eq!(band.channel_bandwidth_mhz(), 499.2);
        }
        for band in [Band::Hbc16, Band::Hbc27] {
            assert_eq!(band.channel_bandwidth_mhz(), 4.0);
        }
    }

    #[test]
    fn channel_plan() {
        let plan = uwb_channel_plan();
        assert_eq!(plan.len(), 11);
        let ch = |id: u8| plan.iter().find(|c| c.channel_id == id).unwrap();
        assert_eq!(ch(2).center_freq_mhz, 3993.6);
        assert!(ch(2).mandatory);
        assert_eq!(ch(7).center_freq_mhz, 7987.2);
        assert!(ch(7).mandatory);
        assert_eq!(plan.iter().filter(|c| c.mandatory).count(), 2);
        assert!(plan.iter().all(|c| (c.channel_id <= 3) == (c.band() == Band::UwbLow)));
    }

    #[test]
    fn band_round_trips_through_id() {
        for band in Band::ALL {
            assert_eq!(band.id().parse::<Band>().unwrap(), band);
        }
    }
}
