use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use bansim::commands::table_names;
use bansim_core::efficiency::{sweep, to_csv, OverheadProfile};
use bansim_core::phy::catalog::registry_from_csv;
use bansim_core::phy::{lookup, registry};

fn bansim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bansim")).args(args).env_remove("BANSIM_CONFIG_DIR").output().unwrap()
}

fn stdout(out: &Output) -> String {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn scenarios() -> Vec<PathBuf> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios");
    let mut out: Vec<_> = std::fs::read_dir(dir).unwrap().map(|e| e.unwrap().path()).collect();
    out.sort();
    out
}

#[test]
fn bundled_scenarios_run() {
    let all = scenarios();
    assert!(all.len() >= 5);
    for path in all {
        let text = stdout(&bansim(&["simulate", path.to_str().unwrap()]));
        assert!(text.starts_with("seed,node,"), "{}", path.display());
        assert!(text.lines().any(|l| l.split(',').nth(1) == Some("all")), "{}", path.display());
    }
}

#[test]
fn overlapping_phases_are_reported_with_a_line_number() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.conf");
    std::fs::write(
        &path,
        "[phy]\nconfig = ism2400.2\n\n[superframe]\nphase.1 = rap1 0 2000\nphase.2 = rap2 1500 4000\n\n[nodes]\ncount = 1\n",
    )
    .unwrap();
    let out = bansim(&["simulate", path.to_str().unwrap()]);
    assert!(!out.status.success());
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 6"), "{err}");
}

#[test]
fn unknown_keys_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.conf");
    std::fs::write(&path, "[phy]\nconfig = ism2400.2\ncolour = blue\n").unwrap();
    let out = bansim(&["simulate", path.to_str().unwrap()]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 3"));
}

#[test]
fn same_seed_gives_identical_files() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = scenarios().into_iter().find(|p| p.ends_with("contention.conf")).unwrap();
    let mut files = Vec::new();
    for run in 0..2 {
        let stats = dir.path().join(format!("stats{run}.csv"));
        let trace = dir.path().join(format!("trace{run}.csv"));
        let args = [
            "simulate",
            scenario.to_str().unwrap(),
            "--seed",
            "42",
            "--trace",
            trace.to_str().unwrap(),
            "--out",
            stats.to_str().unwrap(),
        ];
        stdout(&bansim(&args));
        files.push((std::fs::read(stats).unwrap(), std::fs::read(trace).unwrap()));
    }
    assert!(!files[0].1.is_empty());
    assert_eq!(files[0], files[1]);
}

#[test]
fn efficiency_defaults_to_the_rate_table() {
    let text = stdout(&bansim(&["efficiency"]));
    let reg = registry();
    let configs: Vec<_> = table_names().iter().map(|n| lookup(&reg, n).unwrap()).collect();
    assert_eq!(configs.len(), 21);
    let points = sweep(&configs, &(1..=255).collect::<Vec<_>>(), &OverheadProfile::default()).unwrap();
    assert_eq!(text, to_csv(&points));
}

#[test]
fn single_payload_gives_one_row_per_config() {
    let text = stdout(&bansim(&["efficiency", "--payloads", "255"]));
    assert_eq!(text.lines().count(), 1 + 21);
}

#[test]
fn lower_rate_is_more_efficient() {
    let text = stdout(&bansim(&["efficiency", "--config", "wmts420.u", "--config", "ism2400.3", "--payloads", "100"]));
    let eff: Vec<f64> = text.lines().skip(1).map(|l| l.rsplit(',').next().unwrap().parse().unwrap()).collect();
    assert!(eff[0] > eff[1], "{eff:?}");
}

fn built_hex(text: &str) -> &str {
    text.lines().find_map(|l| l.strip_prefix("hex = ")).unwrap()
}

#[test]
fn frame_build_then_parse() {
    for config in ["ism2400.2", "uwb-low", "hbc16"] {
        let built = stdout(&bansim(&["frame", "build", "--config", config, "--text", "hello"]));
        let parsed = stdout(&bansim(&["frame", "parse", "--config", config, built_hex(&built)]));
        assert!(parsed.contains(&format!("mac_frame_body = {}", "68656c6c6f")), "{config}: {parsed}");
        let again = stdout(&bansim(&["frame", "parse", "--config", config, built_hex(&built)]));
        assert_eq!(parsed, again);
    }
}

#[test]
fn hbc_dump_shows_the_preamble_repetitions() {
    let built = stdout(&bansim(&["frame", "build", "--config", "hbc16", "--text", "hi"]));
    for i in 0..4 {
        assert!(built.contains(&format!("preamble[{i}]")), "{built}");
    }
}

#[test]
fn corrupted_frame_is_rejected() {
    let built = stdout(&bansim(&["frame", "build", "--config", "ism2400.2", "--text", "hello"]));
    let mut hex: Vec<char> = built_hex(&built).chars().collect();
    let i = hex.len() - 6;
    hex[i] = if hex[i] == '0' { '1' } else { '0' };
    let hex: String = hex.into_iter().collect();
    let out = bansim(&["frame", "parse", "--config", "ism2400.2", &hex]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error: frame parse failed"));
}

#[test]
fn rates_output_round_trips() {
    let text = stdout(&bansim(&["rates"]));
    let rows = registry_from_csv(&text).unwrap();
    assert_eq!(rows.len(), registry().len());
    for (line, row) in text.lines().skip(1).zip(&rows) {
        let printed: f64 = line.rsplit(',').next().unwrap().parse().unwrap();
        assert!((printed - row.rate_kbps()).abs() <= 0.05, "{line}");
    }
    assert!(text.contains(",303.6\n"));
    assert!(stdout(&bansim(&["rates", "--format", "table"])).contains("303.6"));
}

#[test]
fn config_dir_overrides_registry_rows() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("phy.csv"),
        "# slower ISM 2400 PSDU mode\nism2400.slow,ism2400,psdu,pi/2-DBPSK,300,31,19,63,51,1,pi/2-DBPSK,4\n",
    )
    .unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_bansim"))
        .args(["efficiency", "--config", "ism2400.slow", "--payloads", "10"])
        .env("BANSIM_CONFIG_DIR", dir.path())
        .output()
        .unwrap();
    let text = stdout(&out);
    assert!(text.contains("ism2400.slow,242.9,10,"), "{text}");
}
