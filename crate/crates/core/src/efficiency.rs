//! Closed-form bandwidth efficiency of a single saturated, collision-free
//! node on an error-free channel.
//!
//! ```text
//! T_payload = 8 · payload / R_psdu
//! T_cycle   = pCSMASlotLength · (1 + CWmin) / 2      mean first backoff
//!           + T_frame(payload) + pSIFS + T_ack + pSIFS
//! η         = T_payload / T_cycle
//! ```
//!
//! `T_frame` and `T_ack` come from [`Codec::frame_airtime`]; the ack is a
//! frame with an empty body. Efficiency falls as the PSDU rate rises
//! because the preamble and header times do not shrink with it.

use thiserror::Error;

use crate::csma::{MacTimingConstants, PriorityClass};
use crate::phy::{Codec, CodecError, Component, NamedConfig, PhyConfig, MAX_BODY_LEN};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EfficiencyError {
    #[error("payload of {0} bytes outside 1..=255")]
    PayloadRange(usize),
    #[error(transparent)]
    Codec(#[from] CodecError),
    #[error("bad efficiency CSV line {line}: {message}")]
    Csv { line: usize, message: String },
}

/// Overhead constants of the analytic model.
///
/// The defaults (pSIFS 20 µs, CSMA slot 40 µs, user priority 7) are a
/// calibration; they differ from the simulator's [`MacTimingConstants`]
/// defaults.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OverheadProfile {
    pub timing: MacTimingConstants,
    pub priority: PriorityClass,
}

impl Default for OverheadProfile {
    fn default() -> Self {
        OverheadProfile {
            timing: MacTimingConstants { psifs_us: 20, slot_us: 40, guard_us: 85 },
            priority: PriorityClass { user_priority: 7, cw_min: 1, cw_max: 4 },
        }
    }
}

impl OverheadProfile {
    pub fn efficiency(&self, payload_bytes: usize, cfg: &PhyConfig) -> Result<f64, EfficiencyError> {
        analytic_efficiency(payload_bytes, cfg, &self.timing, &self.priority)
    }

    /// Mean channel time per delivered frame, in µs.
    pub fn cycle_us(&self, payload_bytes: usize, cfg: &PhyConfig) -> Result<f64, EfficiencyError> {
        cycle_us(&Codec::default(), payload_bytes, cfg, &self.timing, &self.priority)
    }
}

fn cycle_us(
    codec: &Codec,
    payload_bytes: usize,
    cfg: &PhyConfig,
    timing: &MacTimingConstants,
    priority: &PriorityClass,
) -> Result<f64, EfficiencyError> {
    let frame = codec.frame_airtime(cfg, payload_bytes)?.total_us();
    let ack = codec.frame_airtime(cfg, 0)?.total_us();
    let backoff = timing.slot_us as f64 * (1.0 + priority.cw_min as f64) / 2.0;
    Ok(backoff + frame + timing.psifs_us as f64 + ack + timing.psifs_us as f64)
}

pub fn analytic_efficiency(
    payload_bytes: usize,
    cfg: &PhyConfig,
    timing: &MacTimingConstants,
    priority: &PriorityClass,
) -> Result<f64, EfficiencyError> {
    if !(1..=MAX_BODY_LEN).contains(&payload_bytes) {
        return Err(EfficiencyError::PayloadRange(payload_bytes));
    }
    let rate = cfg.info_data_rate(Component::Psdu).map_err(CodecError::from)?;
    let payload_us = 8.0 * payload_bytes as f64 * 1000.0 / rate;
    Ok(payload_us / cycle_us(&Codec::default(), payload_bytes, cfg, timing, priority)?)
}

#[derive(Debug, Clone, PartialEq)]
pub struct EfficiencyPoint {
    /// Registry name of the configuration.
    pub config: String,
    pub rate_kbps: f64,
    pub payload_bytes: usize,
    pub efficiency: f64,
}

/// One point per (configuration, payload), configurations outermost.
pub fn sweep(
    configs: &[NamedConfig],
    payloads: &[usize],
    profile: &OverheadProfile,
) -> Result<Vec<EfficiencyPoint>, EfficiencyError> {
    let mut out = Vec::with_capacity(configs.len() * payloads.len());
    for named in configs {
        for &p in payloads {
            out.push(EfficiencyPoint {
                config: named.name.clone(),
                rate_kbps: named.rate_kbps(),
                payload_bytes: p,
                efficiency: profile.efficiency(p, &named.cfg)?,
            });
        }
    }
    Ok(out)
}

pub const CSV_HEADER: &str = "band,rate_kbps,payload_bytes,efficiency";

/// `band,rate_kbps,payload_bytes,efficiency`, one decimal for the rate and
/// four for the efficiency.
pub fn to_csv(points: &[EfficiencyPoint]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for p in points {
        out.push_str(&format!("{},{:.1},{},{:.4}\n", p.config, p.rate_kbps, p.payload_bytes, p.efficiency));
    }
    out
}

pub fn parse_csv(text: &str) -> Result<Vec<EfficiencyPoint>, EfficiencyError> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line == CSV_HEADER {
            continue;
        }
        let err = |message: String| EfficiencyError::Csv { line: i + 1, message };
        let cols: Vec<&str> = line.split(',').collect();
        if cols.len() != 4 {
            return Err(err(format!("expected 4 columns, got {}", cols.len())));
        }
        out.push(EfficiencyPoint {
            config: cols[0].to_string(),
            rate_kbps: cols[1].parse().map_err(|e| err(format!("{e}")))?,
            payload_bytes: cols[2].parse().map_err(|e| err(format!("{e}")))?,
            efficiency: cols[3].parse().map_err(|e| err(format!("{e}")))?,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phy::{lookup, registry, Band};

    fn named(name: &str) -> NamedConfig {
        lookup(&registry(), name).unwrap()
    }

    #[test]
    fn increases_with_payload() {
        let p = OverheadProfile::default();
        let cfg = PhyConfig::for_band(Band::Ism2400, 1).unwrap();
        let e = |n| p.efficiency(n, &cfg).unwrap();
        assert!(e(255) > e(100) && e(100) > e(10));
    }

    #[test]
    fn one_byte_at_485_7_is_overhead_dominated() {
        let cfg = PhyConfig::for_band(Band::Ism2400, 1).unwrap();
        let e = OverheadProfile::default().efficiency(1, &cfg).unwrap();
        assert!(e > 0.0 && e < 0.1, "{e}");
    }

    #[test]
    fn calibrated_targets() {
        let p = OverheadProfile::default();
        let slow = p.efficiency(255, &named("wmts420.u").cfg).unwrap();
        let fast = p.efficiency(255, &named("ism2400.3").cfg).unwrap();
        assert!((0.806..=0.866).contains(&slow), "{slow}");
        assert!((0.664..=0.724).contains(&fast), "{fast}");
    }

    #[test]
    fn payload_range_checked() {
        let cfg = PhyConfig::for_band(Band::Mics402, 0).unwrap();
        let p = OverheadProfile::default();
        assert_eq!(p.efficiency(0, &cfg), Err(EfficiencyError::PayloadRange(0)));
        assert_eq!(p.efficiency(256, &cfg), Err(EfficiencyError::PayloadRange(256)));
    }

    #[test]
    fn lower_rate_is_more_efficient() {
        let p = OverheadProfile::default();
        let slow = PhyConfig::for_band(Band::Ism863, 0).unwrap();
        let fast = PhyConfig::for_band(Band::Ism863, 1).unwrap();
        assert!(p.efficiency(100, &slow).unwrap() > p.efficiency(100, &fast).unwrap());
    }

    #[test]
    fn csv_round_trip() {
        let points = sweep(&[named("mics402.1"), named("hbc16")], &[1, 128, 255], &OverheadProfile::default()).unwrap();
        assert_eq!(points.len(), 6);
        let back = parse_csv(&to_csv(&points)).unwrap();
        for (a, b) in points.iter().zip(&back) {
            assert_eq!(a.config, b.config);
            assert_eq!(a.payload_bytes, b.payload_bytes);
            assert!((a.efficiency - b.efficiency).abs() <= 5e-5);
            assert!((a.rate_kbps - b.rate_kbps).abs() <= 0.05);
        }
        let single = sweep(&[named("mics402.1")], &[42], &OverheadProfile::default()).unwrap();
        assert_eq!(single.len(), 1);
    }
}
