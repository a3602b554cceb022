//! Config-driven front end: parse a sweep file, run it, write CSVs.

pub mod config;
pub mod report;
pub mod sweep;

use std::fmt::Write as _;

pub use config::{parse_config, parse_config_str, OutputKind, SweepConfig};
pub use report::{summarize, tolerance_report};
pub use sweep::{run_limit_checks, run_sweep, timescale_table, RunManifest, RunOptions};

use crate::error::Result;
use crate::units::UnitsContext;

/// Builds the model and state without running anything; returns a short
/// description including every default that was applied.
pub fn validate_config(config: &SweepConfig) -> Result<String> {
    let units = UnitsContext::default();
    let model = config.build_model(&units)?;
    config.build_state(&model)?;
    let mut out = String::new();
    let _ = writeln!(out, "config ok");
    let _ = writeln!(out, "model dim     : {}", model.dim());
    let _ = writeln!(out, "q values      : {}", config.q_values.len());
    let _ = writeln!(out, "tau_sc values : {}", config.tau_sc_values.len());
    let _ = writeln!(out, "K values      : {}", config.k_values.len());
    let names: Vec<&str> = config.outputs.iter().map(|o| o.name()).collect();
    let _ = writeln!(out, "outputs       : {}", names.join(", "));
    for d in &config.defaults_applied {
        let _ = writeln!(out, "default       : {d}");
    }
    Ok(out)
}
