//! Plain-text run summaries.

use std::fmt::Write as _;

use super::sweep::{LimitCheck, RunManifest, LIMIT_A_TOLERANCE, LIMIT_B_TOLERANCE};

fn pass(ok: bool) -> &'static str {
    if ok {
        "ok"
    } else {
        "EXCEEDS TOLERANCE"
    }
}

/// Human-readable table for a completed run. Contains no timestamps, so
/// identical configs give identical reports.
pub fn summarize(manifest: &RunManifest) -> String {
    let s = &manifest.summary;
    let mut out = String::new();
    let _ = writeln!(out, "attoscatter {} run summary", manifest.tool_version);
    let _ = writeln!(out, "config sha256     : {}", manifest.config_hash);
    let _ = writeln!(out, "grid points       : {}", s.grid_points);
    match s.min_ratio {
        Some(r) => {
            let _ = writeln!(out, "min ratio         : {:.6}", r.ratio);
            let _ = writeln!(
                out,
                "  at K            : {:.6e} eV (q = {} 1/A, tau_sc = {} as)",
                r.k, r.q, r.tau_sc_as
            );
        }
        None => {
            let _ = writeln!(out, "min ratio         : n/a (no rates requested)");
        }
    }
    if let Some(r) = s.max_ratio {
        let _ = writeln!(out, "max ratio         : {:.6}", r.ratio);
    }
    if let Some(v0) = s.v0 {
        let _ = writeln!(out, "v0 (rms)          : {v0:.6e} A/s");
    }
    if let Some(x) = s.ia_product {
        let _ = writeln!(
            out,
            "tau_sc*q*v0       : {x:.6} (at min ratio; IA expects ~1)"
        );
    }
    if let Some(r) = s.limit_a_residual {
        let _ = writeln!(
            out,
            "limit A residual  : {r:.3e} (K=0 vs spectral sum, tol {LIMIT_A_TOLERANCE:.0e}) {}",
            pass(r <= LIMIT_A_TOLERANCE)
        );
    }
    if let Some((r, k)) = s.limit_b {
        let _ = writeln!(
            out,
            "limit B residual  : {r:.3e} (K_max = {k:.3e} eV vs diagonal limit, tol {LIMIT_B_TOLERANCE:.0e}) {}",
            pass(r < LIMIT_B_TOLERANCE)
        );
    }
    if let Some(r) = s.sum_rule_residual {
        let _ = writeln!(out, "sum rule residual : {r:.3e}");
    }
    for d in &manifest.defaults_applied {
        let _ = writeln!(out, "default           : {d}");
    }
    out
}

/// Per-point limit residuals, as written by `--tolerance-report` and the
/// `limits` subcommand.
pub fn tolerance_report(checks: &[LimitCheck], sum_rule: Option<f64>) -> String {
    let mut out = String::from("q_invA  tau_sc_as  residual_A  K_B_eV  residual_B\n");
    for c in checks {
        let k_b = c
            .k_b
            .map_or_else(|| "-".to_string(), |k| format!("{k:.3e}"));
        let _ = writeln!(
            out,
            "{}  {}  {:.3e} {}  {}  {:.3e} {}",
            c.q,
            c.tau_sc_as,
            c.residual_a,
            pass(c.residual_a <= LIMIT_A_TOLERANCE),
            k_b,
            c.residual_b,
            pass(c.residual_b <= LIMIT_B_TOLERANCE)
        );
    }
    if let Some(r) = sum_rule {
        let _ = writeln!(out, "sum rule residual (max) {r:.3e}");
    }
    out
}
