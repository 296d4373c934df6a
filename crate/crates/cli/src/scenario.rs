//! Scenario files.
//!
//! A scenario is a line-oriented `key = value` file split into `[section]`
//! blocks. `#` starts a comment. Every key is checked: unknown sections,
//! unknown keys, duplicates and bad values are reported with their line.
//!
//! ```text
//! [phy]
//! config = ism2400.2
//!
//! [superframe]
//! beacon = 1
//! rap1 = 200
//! type_a = 55
//! alloc.1 = node=3 start=201 length=20 period=2 offset=0 direction=uplink
//!
//! [csma]
//! cw.7 = 1,4
//!
//! [nodes]
//! count = 2
//! default.priority = 5
//! node.3.access = scheduled
//!
//! [security]
//! node.1.level = 2
//! group.1 = 1 2
//!
//! [run]
//! seed = 42
//! duration_us = 1000000
//! stats = stats.csv
//! ```
//!
//! See the guide's scenario chapter for every key.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::path::PathBuf;
use std::str::FromStr;

use bansim_core::csma::PriorityTable;
use bansim_core::phy::{lookup, CodeRate, NamedConfig};
use bansim_core::security::{MkSource, SecurityLevel};
use bansim_core::sim::{ChannelMode, NodeConfig, Scenario, ScriptedPhase, Timeline, Traffic};
use bansim_core::superframe::{
    build_layout, Direction, LayoutConfig, NodeId, OperationalMode, PhaseKind, ScheduledAllocation,
};
use thiserror::Error;

const SECTIONS: [&str; 6] = ["phy", "superframe", "csma", "nodes", "security", "run"];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{}{message}", if *line > 0 { format!("line {line}: ") } else { String::new() })]
pub struct ConfigError {
    /// 1-based; 0 when the problem has no single line.
    pub line: usize,
    pub message: String,
}

fn fail<T>(line: usize, message: impl Into<String>) -> Result<T, ConfigError> {
    Err(ConfigError { line, message: message.into() })
}

/// A parsed scenario file.
#[derive(Debug, Clone)]
pub struct ScenarioFile {
    pub scenario: Scenario,
    pub stats_path: Option<PathBuf>,
    pub trace_path: Option<PathBuf>,
    pub replicas: usize,
}

#[derive(Debug, Clone)]
struct Entry {
    line: usize,
    key: String,
    value: String,
}

fn split_sections(text: &str) -> Result<BTreeMap<&'static str, Vec<Entry>>, ConfigError> {
    let mut out: BTreeMap<&'static str, Vec<Entry>> = BTreeMap::new();
    let mut current: Option<(&'static str, usize)> = None;
    let mut seen_sections = HashMap::new();
    let mut seen_keys = HashMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        if let Some(name) = content.strip_prefix('[').and_then(|c| c.strip_suffix(']')) {
            let name = name.trim().to_ascii_lowercase();
            let Some(&section) = SECTIONS.iter().find(|s| **s == name) else {
                return fail(line, format!("unknown section [{name}]"));
            };
            if let Some(first) = seen_sections.insert(section, line) {
                return fail(line, format!("section [{section}] repeated (first at line {first})"));
            }
            current = Some((section, line));
            out.entry(section).or_default();
            continue;
        }
        let Some((section, _)) = current else {
            return fail(line, "key outside any section");
        };
        let Some((key, value)) = content.split_once('=') else {
            return fail(line, format!("expected `key = value`, got `{content}`"));
        };
        let key = key.trim().to_ascii_lowercase();
        if key.is_empty() {
            return fail(line, "empty key");
        }
        if let Some(first) = seen_keys.insert((section, key.clone()), line) {
            return fail(line, format!("duplicate key `{key}` (first at line {first})"));
        }
        out.entry(section).or_default().push(Entry { line, key, value: value.trim().to_string() });
    }
    Ok(out)
}

fn parse<T: FromStr>(e: &Entry) -> Result<T, ConfigError>
where
    T::Err: std::fmt::Display,
{
    e.value.parse::<T>().map_err(|err| ConfigError { line: e.line, message: format!("`{}`: {err}", e.key) })
}

fn parse_list<T: FromStr>(e: &Entry) -> Result<Vec<T>, ConfigError>
where
    T::Err: std::fmt::Display,
{
    e.value
        .split(|c: char| c.is_whitespace() || c == ',')
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<T>().map_err(|err| ConfigError { line: e.line, message: format!("`{}`: {err}", e.key) }))
        .collect()
}

fn unknown<T>(e: &Entry, section: &str) -> Result<T, ConfigError> {
    fail(e.line, format!("unknown key `{}` in [{section}]", e.key))
}

/// `true/false`, `yes/no`, `1/0`.
fn parse_bool(e: &Entry) -> Result<bool, ConfigError> {
    match e.value.to_ascii_lowercase().as_str() {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        _ => fail(e.line, format!("`{}`: expected true or false, got `{}`", e.key, e.value)),
    }
}

pub fn parse_scenario(text: &str, registry: &[NamedConfig]) -> Result<ScenarioFile, ConfigError> {
    let sections = split_sections(text)?;
    let empty = Vec::new();
    let get = |s: &str| sections.get(s).unwrap_or(&empty);

    let phy = parse_phy(get("phy"), registry, sections.contains_key("phy"))?;
    let (timeline, allocations) = parse_superframe(get("superframe"), &phy)?;
    let mut scenario = Scenario::new(phy, build_layout(&LayoutConfig::default()).expect("default layout"));
    scenario.timeline = timeline;
    scenario.allocations = allocations;
    let table = parse_csma(get("csma"), &mut scenario)?;
    scenario.nodes = parse_nodes(get("nodes"), &table)?;
    parse_security(get("security"), &mut scenario)?;
    let mut file = ScenarioFile { scenario, stats_path: None, trace_path: None, replicas: 1 };
    parse_run(get("run"), &mut file)?;
    file.scenario.record_trace = file.trace_path.is_some();
    file.scenario.validate().map_err(|e| ConfigError { line: 0, message: e.to_string() })?;
    Ok(file)
}

fn parse_phy(
    entries: &[Entry],
    registry: &[NamedConfig],
    present: bool,
) -> Result<bansim_core::phy::PhyConfig, ConfigError> {
    if !present {
        return fail(0, "missing [phy] section");
    }
    let Some(base) = entries.iter().find(|e| e.key == "config") else {
        return fail(0, "[phy] needs `config = <registry name>`");
    };
    let mut cfg =
        lookup(registry, &base.value).map_err(|e| ConfigError { line: base.line, message: e.to_string() })?.cfg;
    let mut last = base.line;
    for e in entries {
        match e.key.as_str() {
            "config" => continue,
            "modulation" => cfg.modulation = parse(e)?,
            "header_modulation" => cfg.header_modulation = parse(e)?,
            "symbol_rate_ksps" => cfg.symbol_rate_ksps = parse(e)?,
            "spreading" => cfg.spreading = parse(e)?,
            "header_spreading" => cfg.header_spreading = parse(e)?,
            "psdu_code" | "header_code" => {
                let v: Vec<u16> = parse_list(e)?;
                let [n, k] = v[..] else {
                    return fail(e.line, format!("`{}`: expected `n,k`", e.key));
                };
                if e.key == "psdu_code" {
                    cfg.psdu_fec = CodeRate { n, k };
                } else {
                    cfg.header_fec = CodeRate { n, k };
                }
            }
            _ => return unknown(e, "phy"),
        }
        last = e.line;
    }
    cfg.validate().map_err(|e| ConfigError { line: last, message: e.to_string() })?;
    Ok(cfg)
}

fn key_value_fields(e: &Entry) -> Result<HashMap<String, String>, ConfigError> {
    let mut out = HashMap::new();
    for part in e.value.split_whitespace() {
        let Some((k, v)) = part.split_once('=') else {
            return fail(e.line, format!("`{}`: expected `name=value` fields, got `{part}`", e.key));
        };
        out.insert(k.to_ascii_lowercase(), v.to_string());
    }
    Ok(out)
}

fn parse_allocation(e: &Entry) -> Result<ScheduledAllocation, ConfigError> {
    let mut fields = key_value_fields(e)?;
    let mut num = |name: &str, default: Option<u32>| -> Result<u32, ConfigError> {
        match fields.remove(name) {
            Some(v) => v.parse().map_err(|err| ConfigError { line: e.line, message: format!("`{name}`: {err}") }),
            None => default.map_or_else(|| fail(e.line, format!("allocation needs `{name}=`")), Ok),
        }
    };
    let node = num("node", None)?;
    let start_slot = num("start", None)?;
    let length_slots = num("length", None)?;
    let period = num("period", Some(1))?;
    let offset = num("offset", Some(0))?;
    let direction = match fields.remove("direction") {
        Some(v) => v.parse::<Direction>().map_err(|err| ConfigError { line: e.line, message: err.to_string() })?,
        None => Direction::Uplink,
    };
    if let Some(extra) = fields.keys().next() {
        return fail(e.line, format!("unknown allocation field `{extra}`"));
    }
    Ok(ScheduledAllocation { node, start_slot, length_slots, period, offset, direction })
}

fn parse_superframe(
    entries: &[Entry],
    phy: &bansim_core::phy::PhyConfig,
) -> Result<(Timeline, Vec<ScheduledAllocation>), ConfigError> {
    let mut cfg = LayoutConfig { beacon_prohibited: phy.band.beacon_prohibited(), ..LayoutConfig::default() };
    let mut lengths: Option<[u32; 8]> = None;
    let mut total: Option<u32> = None;
    let mut blame = 0;
    let mut scripted = BTreeMap::new();
    let mut allocations = Vec::new();
    for e in entries {
        if let Some(index) = e.key.strip_prefix("phase.") {
            let index: u32 =
                index.parse().map_err(|_| ConfigError { line: e.line, message: format!("bad key `{}`", e.key) })?;
            let parts: Vec<&str> = e.value.split_whitespace().collect();
            let [kind, start, end] = parts[..] else {
                return fail(e.line, "scripted phase needs `KIND start_us end_us`");
            };
            let entry = |s: &str| -> Result<u64, ConfigError> {
                s.parse().map_err(|err| ConfigError { line: e.line, message: format!("`{}`: {err}", e.key) })
            };
            let kind: PhaseKind =
                kind.parse().map_err(|err| ConfigError { line: e.line, message: format!("{err}") })?;
            scripted.insert(index, (e.line, ScriptedPhase { kind, start_us: entry(start)?, end_us: entry(end)? }));
            continue;
        }
        if e.key.starts_with("alloc.") {
            allocations.push(parse_allocation(e)?);
            continue;
        }
        if let Ok(kind) = PhaseKind::from_str(&e.key) {
            let l = lengths.get_or_insert([0; 8]);
            l[PhaseKind::ORDER.iter().position(|&k| k == kind).expect("listed")] = parse(e)?;
            blame = blame.max(e.line);
            continue;
        }
        match e.key.as_str() {
            "mode" => cfg.mode = parse::<OperationalMode>(e)?,
            "slot_us" => cfg.slot_length_us = parse(e)?,
            "slots" => {
                total = Some(parse(e)?);
                blame = blame.max(e.line);
            }
            "type_a_label" => cfg.type_a = parse(e)?,
            "type_b_label" => cfg.type_b = parse(e)?,
            "beacon_period" => cfg.beacon_period = parse(e)?,
            "offset_us" => cfg.offset_us = parse(e)?,
            _ => return unknown(e, "superframe"),
        }
    }
    if !scripted.is_empty() {
        if lengths.is_some() || !allocations.is_empty() {
            let line = scripted.values().next().expect("nonempty").0;
            return fail(line, "scripted phases cannot be combined with phase lengths or allocations");
        }
        let phases: Vec<ScriptedPhase> = scripted.values().map(|(_, p)| *p).collect();
        let timeline = Timeline::Scripted(phases);
        timeline
            .validate()
            .map_err(|m| ConfigError { line: scripted.values().last().expect("nonempty").0, message: m })?;
        return Ok((timeline, allocations));
    }
    if let Some(l) = lengths {
        cfg.lengths = l;
        cfg.slots_per_superframe = total.unwrap_or_else(|| l.iter().sum());
    } else if let Some(t) = total {
        cfg.slots_per_superframe = t;
        if cfg.mode == OperationalMode::Beacon {
            cfg.set_length(PhaseKind::Rap1, t.saturating_sub(1));
        }
    }
    if cfg.mode != OperationalMode::Beacon && lengths.is_none() {
        cfg.lengths = [0; 8];
    }
    let layout = build_layout(&cfg).map_err(|e| ConfigError { line: blame, message: e.to_string() })?;
    Ok((Timeline::Superframes(layout), allocations))
}

fn parse_csma(entries: &[Entry], s: &mut Scenario) -> Result<PriorityTable, ConfigError> {
    let mut table = PriorityTable::default();
    for e in entries {
        if let Some(up) = e.key.strip_prefix("cw.") {
            let up: usize = match up.parse() {
                Ok(u) if u < 8 => u,
                _ => return fail(e.line, format!("`{}`: user priority must be 0..7", e.key)),
            };
            let v: Vec<u32> = parse_list(e)?;
            let [lo, hi] = v[..] else {
                return fail(e.line, format!("`{}`: expected `cw_min,cw_max`", e.key));
            };
            table.0[up] = (lo, hi);
            table.validate().map_err(|err| ConfigError { line: e.line, message: err.to_string() })?;
            continue;
        }
        match e.key.as_str() {
            "psifs_us" => s.timing.psifs_us = parse(e)?,
            "slot_us" => s.timing.slot_us = parse(e)?,
            "guard_us" => s.timing.guard_us = parse(e)?,
            "retry_limit" => s.retry_limit = parse(e)?,
            "tx_airtime_us" => s.tx_airtime_us = Some(parse(e)?),
            "ack_airtime_us" => s.ack_airtime_us = Some(parse(e)?),
            _ => return unknown(e, "csma"),
        }
        s.timing.validate().map_err(|err| ConfigError { line: e.line, message: err.to_string() })?;
    }
    Ok(table)
}

/// Splits `node.<id>.<field>` and `default.<field>` keys.
fn node_key(e: &Entry) -> Result<Option<(Option<NodeId>, &str)>, ConfigError> {
    if let Some(field) = e.key.strip_prefix("default.") {
        return Ok(Some((None, field)));
    }
    let Some(rest) = e.key.strip_prefix("node.") else {
        return Ok(None);
    };
    let Some((id, field)) = rest.split_once('.') else {
        return fail(e.line, format!("expected `node.<id>.<field>`, got `{}`", e.key));
    };
    match id.parse::<NodeId>() {
        Ok(id) if id > 0 => Ok(Some((Some(id), field))),
        _ => fail(e.line, format!("`{}`: node ids are positive integers", e.key)),
    }
}

fn parse_traffic(e: &Entry) -> Result<Traffic, ConfigError> {
    let mut parts = e.value.split_whitespace();
    let bad = |m: String| ConfigError { line: e.line, message: m };
    match parts.next().map(str::to_ascii_lowercase).as_deref() {
        Some("saturated") => Ok(Traffic::Saturated),
        Some("poisson") => {
            let rate = parts.next().ok_or_else(|| bad("poisson traffic needs a rate in frames/s".into()))?;
            let frames_per_s = rate.parse().map_err(|err| bad(format!("poisson rate: {err}")))?;
            Ok(Traffic::Poisson { frames_per_s })
        }
        Some("scripted") => {
            let times = parts.map(|p| p.parse::<u64>().map_err(|err| bad(format!("arrival time: {err}"))));
            Ok(Traffic::Scripted(times.collect::<Result<_, _>>()?))
        }
        _ => Err(bad(format!("traffic must be saturated, poisson <rate> or scripted <times>, got `{}`", e.value))),
    }
}

fn apply_node_field(n: &mut NodeConfig, field: &str, e: &Entry, table: &PriorityTable) -> Result<(), ConfigError> {
    match field {
        "priority" => {
            let up: u8 = parse(e)?;
            n.priority = table.get(up).map_err(|err| ConfigError { line: e.line, message: err.to_string() })?;
        }
        "access" => n.access = parse(e)?,
        "traffic" => n.traffic = parse_traffic(e)?,
        "payload" => n.payload_bytes = parse(e)?,
        "draws" => n.scripted_draws = Some(parse_list(e)?),
        "acks" => {
            n.ack_script = e
                .value
                .split_whitespace()
                .map(|v| parse_bool(&Entry { line: e.line, key: e.key.clone(), value: v.to_string() }))
                .collect::<Result<_, _>>()?
        }
        _ => return fail(e.line, format!("unknown node field `{field}`")),
    }
    Ok(())
}

fn parse_nodes(entries: &[Entry], table: &PriorityTable) -> Result<Vec<NodeConfig>, ConfigError> {
    let mut ids = BTreeSet::new();
    for e in entries {
        match node_key(e)? {
            Some((Some(id), _)) => {
                ids.insert(id);
            }
            Some((None, _)) => {}
            None if e.key == "count" => ids.extend(1..=parse::<NodeId>(e)?),
            None => return unknown(e, "nodes"),
        }
    }
    let default_priority = table.get(0).expect("priority 0 exists");
    let mut nodes: BTreeMap<NodeId, NodeConfig> =
        ids.into_iter().map(|id| (id, NodeConfig::new(id, default_priority))).collect();
    // Defaults first, so per-node keys win regardless of order.
    for pass_defaults in [true, false] {
        for e in entries {
            match node_key(e)? {
                Some((None, field)) if pass_defaults => {
                    for n in nodes.values_mut() {
                        apply_node_field(n, field, e, table)?;
                    }
                }
                Some((Some(id), field)) if !pass_defaults => {
                    apply_node_field(nodes.get_mut(&id).expect("collected"), field, e, table)?;
                }
                _ => {}
            }
        }
    }
    Ok(nodes.into_values().collect())
}

fn parse_security(entries: &[Entry], s: &mut Scenario) -> Result<(), ConfigError> {
    for pass_defaults in [true, false] {
        for e in entries {
            if let Some(group) = e.key.strip_prefix("group.") {
                if pass_defaults {
                    continue;
                }
                let group: u32 =
                    group.parse().map_err(|_| ConfigError { line: e.line, message: format!("bad key `{}`", e.key) })?;
                let members: Vec<NodeId> = parse_list(e)?;
                if let Some(m) = members.iter().find(|m| !s.nodes.iter().any(|n| n.id == **m)) {
                    return fail(e.line, format!("group {group} names unknown node {m}"));
                }
                s.groups.push((group, members));
                continue;
            }
            let Some((id, field)) = node_key(e)? else {
                return unknown(e, "security");
            };
            if id.is_none() != pass_defaults {
                continue;
            }
            let targets: Vec<&mut NodeConfig> = match id {
                None => s.nodes.iter_mut().collect(),
                Some(id) => match s.nodes.iter_mut().find(|n| n.id == id) {
                    Some(n) => vec![n],
                    None => return fail(e.line, format!("node {id} is not declared in [nodes]")),
                },
            };
            for n in targets {
                match field {
                    "level" => n.security = parse::<SecurityLevel>(e)?,
                    "mk" => n.mk_source = parse::<MkSource>(e)?,
                    _ => return fail(e.line, format!("unknown security field `{field}`")),
                }
            }
        }
    }
    Ok(())
}

fn parse_run(entries: &[Entry], f: &mut ScenarioFile) -> Result<(), ConfigError> {
    let s = &mut f.scenario;
    for e in entries {
        match e.key.as_str() {
            "seed" => s.seed = parse(e)?,
            "duration_us" => s.duration_us = parse(e)?,
            "channel" => {
                s.channel = match e.value.to_ascii_lowercase().as_str() {
                    "ideal" => ChannelMode::Ideal,
                    "collision" => ChannelMode::Collision,
                    _ => return fail(e.line, format!("channel must be ideal or collision, got `{}`", e.value)),
                }
            }
            "queue_capacity" => {
                s.queue_capacity = match e.value.as_str() {
                    "unbounded" => None,
                    _ => Some(parse(e)?),
                }
            }
            "beacon_body" => s.beacon_body_len = parse(e)?,
            "replicas" => {
                f.replicas = parse(e)?;
                if f.replicas == 0 {
                    return fail(e.line, "replicas must be at least 1");
                }
            }
            "stats" => f.stats_path = Some(PathBuf::from(&e.value)),
            "trace" => f.trace_path = Some(PathBuf::from(&e.value)),
            _ => return unknown(e, "run"),
        }
    }
    Ok(())
}
