//! Library side of the `bansim` command: scenario files, the registry
//! override and one function per subcommand. Every computation lives in
//! `bansim-core`; this crate only parses, formats and writes files.

pub mod commands;
pub mod scenario;

use std::path::{Path, PathBuf};

use bansim_core::phy::catalog::registry_from_csv;
use bansim_core::phy::{registry, NamedConfig, PhyError};
use thiserror::Error;

/// Directory holding a `phy.csv` registry override.
pub const CONFIG_DIR_ENV: &str = "BANSIM_CONFIG_DIR";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Scenario { path: PathBuf, source: scenario::ConfigError },
    #[error("{0}: {1}")]
    Io(PathBuf, std::io::Error),
    #[error("{path}: {source}")]
    Registry { path: PathBuf, source: PhyError },
    #[error(transparent)]
    Phy(#[from] PhyError),
    #[error("frame {action} failed: {source}")]
    Frame { action: &'static str, source: bansim_core::phy::CodecError },
    #[error(transparent)]
    Sim(#[from] bansim_core::sim::SimError),
    #[error(transparent)]
    Efficiency(#[from] bansim_core::efficiency::EfficiencyError),
    #[error("{0}")]
    Usage(String),
}

/// The built-in registry, with rows from `$BANSIM_CONFIG_DIR/phy.csv`
/// replacing built-in rows of the same name and appending new ones.
pub fn effective_registry() -> Result<Vec<NamedConfig>, CliError> {
    match std::env::var_os(CONFIG_DIR_ENV) {
        Some(dir) => registry_with_overrides(Path::new(&dir)),
        None => Ok(registry()),
    }
}

pub fn registry_with_overrides(dir: &Path) -> Result<Vec<NamedConfig>, CliError> {
    let path = dir.join("phy.csv");
    let mut out = registry();
    if !path.exists() {
        return Ok(out);
    }
    let text = std::fs::read_to_string(&path).map_err(|e| CliError::Io(path.clone(), e))?;
    let rows = registry_from_csv(&text).map_err(|source| CliError::Registry { path: path.clone(), source })?;
    for row in rows {
        match out.iter_mut().find(|e| e.name.eq_ignore_ascii_case(&row.name)) {
            Some(existing) => *existing = row,
            None => out.push(row),
        }
    }
    Ok(out)
}

#[cfg(doctest)]
#[doc = include_str!("../../../book/src/cli.md")]
mod book_cli {}
