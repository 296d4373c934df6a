//! Text forms of the configuration registry: a CSV that loads back into
//! [`NamedConfig`] rows, and the aligned rate table.

use std::fmt::Write;

use super::{Band, CodeRate, Component, NamedConfig, PhyConfig, PhyError};

pub const REGISTRY_HEADER: &str = "name,band,component,modulation,symbol_rate_ksps,header_n,header_k,psdu_n,psdu_k,spreading,header_modulation,header_spreading,rate_kbps";

/// One row per entry; `rate_kbps` is informational and ignored on load.
pub fn registry_to_csv(entries: &[NamedConfig]) -> String {
    let mut out = String::from(REGISTRY_HEADER);
    out.push('\n');
    for e in entries {
        let c = &e.cfg;
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{},{:.1}",
            e.name,
            c.band,
            e.component,
            c.modulation,
            c.symbol_rate_ksps,
            c.header_fec.n,
            c.header_fec.k,
            c.psdu_fec.n,
            c.psdu_fec.k,
            c.spreading,
            c.header_modulation,
            c.header_spreading,
            e.rate_kbps()
        );
    }
    out
}

pub fn registry_from_csv(text: &str) -> Result<Vec<NamedConfig>, PhyError> {
    let mut out: Vec<NamedConfig> = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') || line == REGISTRY_HEADER {
            continue;
        }
        let err = |m: String| PhyError::InvalidConfig(format!("registry line {}: {m}", i + 1));
        let cols: Vec<&str> = line.split(',').map(str::trim).collect();
        if !(12..=13).contains(&cols.len()) {
            return Err(err(format!("expected 12 or 13 columns, got {}", cols.len())));
        }
        let num = |j: usize| cols[j].parse::<f64>().map_err(|e| err(format!("column {}: {e}", j + 1)));
        let int = |j: usize| cols[j].parse::<u16>().map_err(|e| err(format!("column {}: {e}", j + 1)));
        let band: Band = cols[1].parse()?;
        let small = |j: usize| u8::try_from(int(j)?).map_err(|e| err(format!("column {}: {e}", j + 1)));
        let cfg = PhyConfig {
            band,
            modulation: cols[3].parse()?,
            symbol_rate_ksps: num(4)?,
            header_fec: CodeRate { n: int(5)?, k: int(6)? },
            psdu_fec: CodeRate { n: int(7)?, k: int(8)? },
            spreading: small(9)?,
            header_modulation: cols[10].parse()?,
            header_spreading: small(11)?,
            center_freq_mhz: band.center_freq_mhz(),
            channel_bandwidth_mhz: band.channel_bandwidth_mhz(),
        };
        cfg.validate().map_err(|e| err(e.to_string()))?;
        if out.iter().any(|e| e.name.eq_ignore_ascii_case(cols[0])) {
            return Err(err(format!("duplicate name `{}`", cols[0])));
        }
        out.push(NamedConfig { name: cols[0].to_string(), cfg, component: cols[2].parse::<Component>()? });
    }
    Ok(out)
}

/// Aligned table: name, band, component, modulation, symbol rate, code,
/// spreading and information data rate.
pub fn format_rate_table(entries: &[NamedConfig]) -> String {
    let mut out = format!(
        "{:<11} {:<16} {:<7} {:<11} {:>9} {:>8} {:>3} {:>10}\n",
        "name", "band", "part", "modulation", "ksps", "code", "S", "rate_kbps"
    );
    for e in entries {
        let c = &e.cfg;
        let (modulation, code, spreading) = match e.component {
            Component::Header => (c.header_modulation, c.header_fec, c.header_spreading),
            Component::Psdu => (c.modulation, c.psdu_fec, c.spreading),
        };
        let _ = writeln!(
            out,
            "{:<11} {:<16} {:<7} {:<11} {:>9.1} {:>8} {:>3} {:>10.1}",
            e.name,
            c.band.label(),
            e.component,
            modulation.name(),
            c.symbol_rate_ksps,
            code.to_string(),
            spreading,
            e.rate_kbps()
        );
    }
    out
}
