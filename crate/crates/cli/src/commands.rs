//! One function per subcommand. Each returns the text the command prints.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use bansim_core::csma::trace::render;
use bansim_core::efficiency::{self, EfficiencyPoint, OverheadProfile};
use bansim_core::mac::MacHeader;
use bansim_core::phy::bits::{parse_hex, to_hex};
use bansim_core::phy::catalog::{format_rate_table, registry_to_csv};
use bansim_core::phy::hexdump::{describe, hexdump};
use bansim_core::phy::{lookup, rate_table, Codec, NamedConfig};
use bansim_core::security::SecurityLevel;
use bansim_core::sim::{run_replicas, stats_csv, RunOutput};

use crate::scenario::{parse_scenario, ScenarioFile};
use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Csv,
    Table,
}

pub fn rates(registry: &[NamedConfig], format: Format) -> String {
    match format {
        Format::Csv => registry_to_csv(registry),
        Format::Table => format_rate_table(registry),
    }
}

/// Names of the 21 rate-table rows, in table order.
pub fn table_names() -> Vec<String> {
    rate_table().into_iter().map(|r| r.entry.name).collect()
}

/// `a-b` ranges and single values separated by commas, e.g. `1-10,255`.
pub fn parse_payloads(list: &str) -> Result<Vec<usize>, CliError> {
    let bad = || CliError::Usage(format!("bad payload list `{list}`"));
    let mut out = Vec::new();
    for part in list.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        match part.split_once('-') {
            Some((a, b)) => {
                let (a, b): (usize, usize) =
                    (a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?);
                if a > b {
                    return Err(bad());
                }
                out.extend(a..=b);
            }
            None => out.push(part.parse().map_err(|_| bad())?),
        }
    }
    if out.is_empty() {
        return Err(bad());
    }
    Ok(out)
}

pub fn efficiency_points(
    registry: &[NamedConfig],
    names: &[String],
    payloads: &[usize],
    profile: &OverheadProfile,
) -> Result<Vec<EfficiencyPoint>, CliError> {
    let configs = names.iter().map(|n| lookup(registry, n)).collect::<Result<Vec<_>, _>>()?;
    Ok(efficiency::sweep(&configs, payloads, profile)?)
}

pub fn format_efficiency(points: &[EfficiencyPoint], format: Format) -> String {
    match format {
        Format::Csv => efficiency::to_csv(points),
        Format::Table => {
            let mut out = format!("{:<11} {:>9} {:>7} {:>10}\n", "band", "rate_kbps", "payload", "efficiency");
            for p in points {
                let _ = writeln!(
                    out,
                    "{:<11} {:>9.1} {:>7} {:>10.4}",
                    p.config, p.rate_kbps, p.payload_bytes, p.efficiency
                );
            }
            out
        }
    }
}

fn hex_arg(text: &str, what: &str) -> Result<Vec<u8>, CliError> {
    parse_hex(text).ok_or_else(|| CliError::Usage(format!("{what} is not valid hex: `{text}`")))
}

/// Annotated dump of the built frame followed by `hex = <bytes>`.
pub fn frame_build(
    registry: &[NamedConfig],
    config: &str,
    header_hex: Option<&str>,
    body: &[u8],
) -> Result<String, CliError> {
    let cfg = lookup(registry, config)?.cfg;
    let header = match header_hex {
        Some(h) => hex_arg(h, "MAC header")?,
        None => MacHeader::data(1, 0, 0, 0, SecurityLevel::Unsecured).to_bytes().to_vec(),
    };
    let frame =
        Codec::default().build(&cfg, &header, body).map_err(|source| CliError::Frame { action: "build", source })?;
    Ok(format!("{}hex = {}\n", hexdump(&frame), to_hex(&frame.bytes())))
}

pub fn frame_body(hex: Option<&str>, text: Option<&str>) -> Result<Vec<u8>, CliError> {
    match (hex, text) {
        (Some(_), Some(_)) => Err(CliError::Usage("give either --body or --text, not both".into())),
        (Some(h), None) => hex_arg(h, "frame body"),
        (None, Some(t)) => Ok(t.as_bytes().to_vec()),
        (None, None) => Ok(Vec::new()),
    }
}

/// Field listing of the frame in `hex`.
pub fn frame_parse(registry: &[NamedConfig], config: &str, hex: &str) -> Result<String, CliError> {
    let cfg = lookup(registry, config)?.cfg;
    let bytes = hex_arg(hex, "frame")?;
    let ppdu =
        Codec::default().parse_bytes(&bytes, &cfg).map_err(|source| CliError::Frame { action: "parse", source })?;
    Ok(describe(&ppdu))
}

pub fn load_scenario(path: &Path, registry: &[NamedConfig]) -> Result<ScenarioFile, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(path.to_path_buf(), e))?;
    parse_scenario(&text, registry).map_err(|source| CliError::Scenario { path: path.to_path_buf(), source })
}

#[derive(Debug, Clone, Default)]
pub struct SimulateOptions {
    pub seed: Option<u64>,
    pub stats: Option<PathBuf>,
    pub trace: Option<PathBuf>,
    pub replicas: Option<usize>,
    pub threads: usize,
    pub format: Format,
}

/// Runs one replica per seed (`seed`, `seed + 1`, ...).
pub fn simulate(file: &ScenarioFile, opts: &SimulateOptions) -> Result<Vec<RunOutput>, CliError> {
    let mut scenario = file.scenario.clone();
    let base = opts.seed.unwrap_or(scenario.seed);
    let replicas = opts.replicas.unwrap_or(file.replicas).max(1);
    scenario.record_trace = opts.trace.is_some() || file.trace_path.is_some();
    let seeds: Vec<u64> = (0..replicas as u64).map(|i| base.wrapping_add(i)).collect();
    run_replicas(&scenario, &seeds, opts.threads.max(1)).into_iter().map(|r| r.map_err(CliError::from)).collect()
}

pub fn format_stats(runs: &[RunOutput], format: Format) -> String {
    let csv = stats_csv(&runs.iter().map(|r| &r.stats).collect::<Vec<_>>());
    match format {
        Format::Csv => csv,
        Format::Table => align_csv(&csv),
    }
}

/// Right-aligns every column of a comma-separated table.
fn align_csv(csv: &str) -> String {
    let rows: Vec<Vec<&str>> = csv.lines().map(|l| l.split(',').collect()).collect();
    let cols = rows.iter().map(Vec::len).max().unwrap_or(0);
    let widths: Vec<usize> =
        (0..cols).map(|c| rows.iter().filter_map(|r| r.get(c)).map(|s| s.len()).max().unwrap_or(0)).collect();
    let mut out = String::new();
    for r in rows {
        let cells: Vec<String> = r.iter().zip(&widths).map(|(s, w)| format!("{s:>w$}")).collect();
        out.push_str(cells.join("  ").trim_end());
        out.push('\n');
    }
    out
}

/// Trace file for replica `i` of `n`: the path itself for a single run,
/// `<stem>.<seed>.<ext>` otherwise.
pub fn trace_path(path: &Path, seed: u64, n: usize) -> PathBuf {
    if n <= 1 {
        return path.to_path_buf();
    }
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let name = match path.extension() {
        Some(ext) => format!("{stem}.{seed}.{}", ext.to_string_lossy()),
        None => format!("{stem}.{seed}"),
    };
    path.with_file_name(name)
}

pub fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent).map_err(|e| CliError::Io(parent.to_path_buf(), e))?;
    }
    std::fs::write(path, text).map_err(|e| CliError::Io(path.to_path_buf(), e))
}

/// Writes stats and traces as requested and returns what goes to stdout.
pub fn write_outputs(file: &ScenarioFile, opts: &SimulateOptions, runs: &[RunOutput]) -> Result<String, CliError> {
    if let Some(path) = opts.trace.as_ref().or(file.trace_path.as_ref()) {
        for r in runs {
            write_file(&trace_path(path, r.stats.seed, runs.len()), &render(&r.trace))?;
        }
    }
    let stats = format_stats(runs, opts.format);
    match opts.stats.as_ref().or(file.stats_path.as_ref()) {
        Some(path) => {
            write_file(path, &stats)?;
            Ok(String::new())
        }
        None => Ok(stats),
    }
}
