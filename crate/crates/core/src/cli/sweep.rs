//! Grid sweeps and their CSV outputs.
//!
//! Grid points run on a rayon pool; results are collected in grid order and
//! written by a single thread, so the files do not depend on scheduling.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use rayon::prelude::*;

use super::config::{OutputKind, SweepConfig};
use crate::error::{Error, Result};
use crate::linalg::DensityMatrix;
use crate::models::ModelSystem;
use crate::scattering::{
    diagonal_limit_rate, dynamic_structure_factor, intermediate_function, rate_spectral_sum,
    rate_standard, w_exact, SpectralWindow,
};
use crate::timescales::{KinematicsInput, TimescaleTable};
use crate::units::UnitsContext;

/// Bumped whenever a CSV header or column meaning changes.
pub const SCHEMA_VERSION: u32 = 1;

pub const ANOMALY_HEADER: &str = "K,tau_sc_as,q_invA,rate,rate_k0,ratio";
pub const RATES_HEADER: &str =
    "q_invA,tau_sc_as,K,rate,rate_k0,ratio,w_total,rate_times_tau_over_w";
pub const SQW_HEADER: &str = "q_invA,K,omega_eV,s";
pub const CORRELATION_HEADER: &str = "q_invA,K,t_as,re,im";
pub const TIMESCALES_HEADER: &str = "quantity,value,unit,note";

/// Limit case A compares `K = 0` with the spectral sum at this relative level.
pub const LIMIT_A_TOLERANCE: f64 = 1e-12;
/// Limit case B is evaluated at `K = LIMIT_B_SCALE / (Δξ²_min τsc)`.
pub const LIMIT_B_SCALE: f64 = 1e8;
pub const LIMIT_B_TOLERANCE: f64 = 1e-6;
/// The summary reports case B when the grid reaches `K Δξ²_min τsc` of this.
pub const LIMIT_B_REPORT_THRESHOLD: f64 = 1e6;

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub out_dir: PathBuf,
    /// Worker threads; `None` lets rayon decide.
    pub threads: Option<usize>,
    pub tolerance_report: bool,
}

/// One `(q, τsc, K)` point. `K` in eV, `τsc` in as, rates in natural units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridRow {
    pub q: f64,
    pub tau_sc_as: f64,
    pub k: f64,
    pub rate: f64,
    pub rate_k0: f64,
    pub ratio: f64,
    pub w_total: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LimitCheck {
    pub q: f64,
    pub tau_sc_as: f64,
    pub rate_k0: f64,
    pub spectral_sum: f64,
    pub residual_a: f64,
    /// `K` (eV) used for case B, or `None` when `X` is fully degenerate.
    pub k_b: Option<f64>,
    pub rate_k_b: f64,
    pub diagonal_limit: f64,
    pub residual_b: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSummary {
    pub grid_points: usize,
    pub min_ratio: Option<GridRow>,
    pub max_ratio: Option<GridRow>,
    /// RMS velocity in Å/s, when the model provides one.
    pub v0: Option<f64>,
    /// `τsc q v₀` at the minimum-ratio point.
    pub ia_product: Option<f64>,
    pub limit_a_residual: Option<f64>,
    /// Largest case-B residual at the grid's `K_max`, and that `K_max`, over
    /// points where `K_max Δξ²_min τsc ≥ 10⁶`.
    pub limit_b: Option<(f64, f64)>,
    pub sum_rule_residual: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunManifest {
    pub config_hash: String,
    pub tool_version: String,
    pub schema_version: u32,
    pub started_unix: u64,
    pub finished_unix: u64,
    pub outputs: Vec<PathBuf>,
    pub defaults_applied: Vec<String>,
    pub summary: SweepSummary,
}

fn unix_now() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

fn num(x: f64) -> String {
    format!("{x:.12e}")
}

fn rel_residual(value: f64, reference: f64) -> f64 {
    let diff = (value - reference).abs();
    if reference == 0.0 {
        diff
    } else {
        diff / reference.abs()
    }
}

fn at_point(q: f64, tau_sc_as: f64, k: f64) -> impl Fn(Error) -> Error {
    move |source| Error::GridPoint {
        q_inv_a: q,
        tau_sc_as,
        k_ev: k,
        source: Box::new(source),
    }
}

fn pool(threads: Option<usize>) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads.unwrap_or(0))
        .build()
        .map_err(|e| Error::Config {
            section: "threads".into(),
            message: e.to_string(),
        })
}

/// Runs jobs in parallel and returns results in input order, or every
/// failure.
fn run_all<J, T, F>(pool: &rayon::ThreadPool, jobs: &[J], f: F) -> Result<Vec<T>>
where
    J: Sync,
    T: Send,
    F: Fn(&J) -> Result<T> + Sync + Send,
{
    let results: Vec<Result<T>> = pool.install(|| jobs.par_iter().map(&f).collect());
    let mut ok = Vec::with_capacity(results.len());
    let mut failed = Vec::new();
    for r in results {
        match r {
            Ok(v) => ok.push(v),
            Err(e) => failed.push(e),
        }
    }
    if failed.is_empty() {
        Ok(ok)
    } else {
        Err(Error::SweepFailed(failed))
    }
}

struct Prepared {
    units: UnitsContext,
    model: ModelSystem,
    rho: DensityMatrix,
}

fn prepare(config: &SweepConfig) -> Result<Prepared> {
    let units = UnitsContext::default();
    let model = config.build_model(&units)?;
    let rho = config.build_state(&model)?;
    Ok(Prepared { units, model, rho })
}

fn qt_pairs(config: &SweepConfig) -> Vec<(f64, f64)> {
    config
        .q_values
        .iter()
        .flat_map(|&q| config.tau_sc_values.iter().map(move |&t| (q, t)))
        .collect()
}

fn grid_rows(
    p: &Prepared,
    config: &SweepConfig,
    q: f64,
    tau_as: f64,
) -> Result<(Vec<GridRow>, f64)> {
    let tau = p.units.as_to_natural(tau_as);
    let reference = p.model.with_decoherence(0.0)?;
    let rate_k0 = rate_standard(&reference, &p.rho, q, tau).map_err(at_point(q, tau_as, 0.0))?;
    let spectral =
        rate_spectral_sum(&reference, &p.rho, q, tau).map_err(at_point(q, tau_as, 0.0))?;
    let mut rows = Vec::with_capacity(config.k_values.len());
    for &k in &config.k_values {
        let wrap = at_point(q, tau_as, k);
        let model = p.model.with_decoherence(k).map_err(&wrap)?;
        let rate = rate_standard(&model, &p.rho, q, tau).map_err(&wrap)?;
        let w_total = w_exact(&model, &p.rho, q, tau).map_err(&wrap)?;
        let ratio = if k == 0.0 {
            1.0
        } else if rate_k0 == 0.0 {
            return Err(wrap(Error::OutOfDomain {
                name: "decoherence-free rate",
                requirement: "non-zero to form the anomaly ratio",
                value: rate_k0,
            }));
        } else {
            rate / rate_k0
        };
        rows.push(GridRow {
            q,
            tau_sc_as: tau_as,
            k,
            rate,
            rate_k0,
            ratio,
            w_total,
        });
    }
    Ok((rows, rel_residual(rate_k0, spectral)))
}

/// Case A and case B for every `(q, τsc)` of the config.
pub fn run_limit_checks(config: &SweepConfig, threads: Option<usize>) -> Result<Vec<LimitCheck>> {
    let p = prepare(config)?;
    let pool = pool(threads)?;
    let gap = p.model.min_lindblad_gap_sq();
    run_all(&pool, &qt_pairs(config), |&(q, tau_as)| {
        let tau = p.units.as_to_natural(tau_as);
        let reference = p.model.with_decoherence(0.0)?;
        let wrap = at_point(q, tau_as, 0.0);
        let rate_k0 = rate_standard(&reference, &p.rho, q, tau).map_err(&wrap)?;
        let spectral_sum = rate_spectral_sum(&reference, &p.rho, q, tau).map_err(&wrap)?;
        let (k_b, rate_k_b, diagonal_limit) = match gap {
            Some(g) => {
                let k_b = LIMIT_B_SCALE / (g * tau);
                let wrap = at_point(q, tau_as, k_b);
                let model = p.model.with_decoherence(k_b).map_err(&wrap)?;
                let rate = rate_standard(&model, &p.rho, q, tau).map_err(&wrap)?;
                let diag = diagonal_limit_rate(&model, &p.rho, q, tau).map_err(&wrap)?;
                (Some(k_b), rate, diag)
            }
            None => (None, rate_k0, rate_k0),
        };
        Ok(LimitCheck {
            q,
            tau_sc_as: tau_as,
            rate_k0,
            spectral_sum,
            residual_a: rel_residual(rate_k0, spectral_sum),
            k_b,
            rate_k_b,
            diagonal_limit,
            residual_b: rel_residual(rate_k_b, diagonal_limit),
        })
    })
}

/// Kinematic estimates for the `[kinematics]` section.
pub fn timescale_table(config: &SweepConfig) -> Result<TimescaleTable> {
    let units = UnitsContext::default();
    let kin = config
        .kinematics
        .as_ref()
        .ok_or_else(|| Error::MissingSections(vec!["[kinematics]".into()]))?;
    let v0 = config
        .rms_velocity(&units)
        .ok_or_else(|| Error::MissingKey {
            section: "kinematics".into(),
            key: "v0_A_per_s".into(),
        })?;
    TimescaleTable::compute(
        &units,
        KinematicsInput {
            q: kin.q_inv_a,
            v0,
            delta_e: kin.delta_e_ev,
            e_s: kin.e_s_ev,
            e0: kin.e0_ev,
            range: kin.range_a,
        },
    )
}

pub fn timescales_csv(table: &TimescaleTable) -> String {
    let i = &table.input;
    let rows: [(&str, f64, &str, &str); 11] = [
        ("q", i.q, "1/A", "input"),
        ("v0", i.v0, "A/s", "rms velocity"),
        ("deltaE", i.delta_e, "eV", "input"),
        ("Es", i.e_s, "eV", "input"),
        ("E0", i.e0, "eV", "input"),
        ("range", i.range, "A", "input"),
        ("tau_sc_ia", table.tau_ia_s, "s", "1/(q v0)"),
        ("tau_sc_width", table.tau_width_s, "s", "hbar/deltaE"),
        ("t_orthogonal", table.t_orthogonal_s, "s", "pi hbar/(2 Es)"),
        ("tau_act", table.tau_act_s, "s", "range/sqrt(2 E0/m_n)"),
        (
            "causal_radius",
            table.causal_radius_angstrom,
            "A",
            "c tau_act",
        ),
    ];
    let mut out = format!("{TIMESCALES_HEADER}\n");
    for (name, value, unit, note) in rows {
        let _ = writeln!(out, "{name},{},{unit},{note}", num(value));
    }
    let _ = writeln!(
        out,
        "hierarchy,{},bool,tau_act < t_orthogonal <= tau_sc_width",
        u8::from(table.hierarchy_holds())
    );
    out
}

struct SpectrumBlock {
    q: f64,
    k: f64,
    times_as: Vec<f64>,
    correlation: Vec<num_complex::Complex64>,
    omegas: Vec<f64>,
    s: Vec<f64>,
    sum_rule_residual: f64,
}

fn spectrum_blocks(
    p: &Prepared,
    config: &SweepConfig,
    pool: &rayon::ThreadPool,
) -> Result<Vec<SpectrumBlock>> {
    let spec = &config.spectrum;
    let jobs: Vec<(f64, f64)> = config
        .q_values
        .iter()
        .flat_map(|&q| spec.k_values.iter().map(move |&k| (q, k)))
        .collect();
    let window = match spec.window_sigma_as {
        Some(s) => SpectralWindow::Gaussian {
            sigma: p.units.as_to_natural(s),
        },
        None => SpectralWindow::None,
    };
    let dt = p.units.as_to_natural(spec.dt_as);
    let taus: Vec<f64> = (0..spec.points).map(|j| j as f64 * dt).collect();
    run_all(pool, &jobs, |&(q, k)| {
        let wrap = at_point(q, spec.dt_as * (spec.points - 1) as f64, k);
        let model = p.model.with_decoherence(k).map_err(&wrap)?;
        let series = intermediate_function(&model, &p.rho, q, &taus).map_err(&wrap)?;
        let spectrum = dynamic_structure_factor(&series, window).map_err(&wrap)?;
        Ok(SpectrumBlock {
            q,
            k,
            times_as: (0..spec.points).map(|j| j as f64 * spec.dt_as).collect(),
            sum_rule_residual: rel_residual(spectrum.sum_rule(), series.values[0].re),
            correlation: series.values,
            omegas: spectrum.omegas,
            s: spectrum.s_values,
        })
    })
}

fn write_file(dir: &Path, name: &str, contents: &str, outputs: &mut Vec<PathBuf>) -> Result<()> {
    let path = dir.join(name);
    std::fs::write(&path, contents).map_err(|e| Error::io(&path, e))?;
    outputs.push(path);
    Ok(())
}

/// Runs every requested output and writes the CSVs, `summary.txt` and
/// `manifest.txt` into `options.out_dir`.
pub fn run_sweep(config: &SweepConfig, options: &RunOptions) -> Result<RunManifest> {
    let started_unix = unix_now();
    let p = prepare(config)?;
    let pool = pool(options.threads)?;
    let dir = &options.out_dir;
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let wants = |k: OutputKind| config.outputs.contains(&k);

    let mut summary = SweepSummary {
        grid_points: 0,
        min_ratio: None,
        max_ratio: None,
        v0: config.rms_velocity(&p.units),
        ia_product: None,
        limit_a_residual: None,
        limit_b: None,
        sum_rule_residual: None,
    };
    let mut outputs = Vec::new();

    if wants(OutputKind::Anomaly) || wants(OutputKind::Rates) {
        let blocks = run_all(&pool, &qt_pairs(config), |&(q, t)| {
            grid_rows(&p, config, q, t)
        })?;
        let rows: Vec<GridRow> = blocks.iter().flat_map(|(r, _)| r.iter().copied()).collect();
        summarize_rows(&mut summary, &rows, &p, config);
        summary.limit_a_residual = blocks.iter().map(|(_, r)| *r).reduce(f64::max);

        if wants(OutputKind::Anomaly) {
            let mut csv = format!("{ANOMALY_HEADER}\n");
            for r in &rows {
                let _ = writeln!(
                    csv,
                    "{},{},{},{},{},{}",
                    num(r.k),
                    num(r.tau_sc_as),
                    num(r.q),
                    num(r.rate),
                    num(r.rate_k0),
                    num(r.ratio)
                );
            }
            write_file(dir, "anomaly.csv", &csv, &mut outputs)?;
        }
        if wants(OutputKind::Rates) {
            let mut csv = format!("{RATES_HEADER}\n");
            for r in &rows {
                let tau = p.units.as_to_natural(r.tau_sc_as);
                let _ = writeln!(
                    csv,
                    "{},{},{},{},{},{},{},{}",
                    num(r.q),
                    num(r.tau_sc_as),
                    num(r.k),
                    num(r.rate),
                    num(r.rate_k0),
                    num(r.ratio),
                    num(r.w_total),
                    num(if r.w_total == 0.0 {
                        0.0
                    } else {
                        r.rate * tau / r.w_total
                    })
                );
            }
            write_file(dir, "rates.csv", &csv, &mut outputs)?;
        }
    }

    if wants(OutputKind::Sqw) || wants(OutputKind::Correlation) {
        let blocks = spectrum_blocks(&p, config, &pool)?;
        summary.sum_rule_residual = blocks.iter().map(|b| b.sum_rule_residual).reduce(f64::max);
        if wants(OutputKind::Sqw) {
            let mut csv = format!("{SQW_HEADER}\n");
            for b in &blocks {
                for (w, s) in b.omegas.iter().zip(&b.s) {
                    let _ = writeln!(csv, "{},{},{},{}", num(b.q), num(b.k), num(*w), num(*s));
                }
            }
            write_file(dir, "sqw.csv", &csv, &mut outputs)?;
        }
        if wants(OutputKind::Correlation) {
            let mut csv = format!("{CORRELATION_HEADER}\n");
            for b in &blocks {
                for (t, c) in b.times_as.iter().zip(&b.correlation) {
                    let _ = writeln!(
                        csv,
                        "{},{},{},{},{}",
                        num(b.q),
                        num(b.k),
                        num(*t),
                        num(c.re),
                        num(c.im)
                    );
                }
            }
            write_file(dir, "correlation.csv", &csv, &mut outputs)?;
        }
    }

    if wants(OutputKind::Timescales) {
        let table = timescale_table(config)?;
        write_file(dir, "timescales.csv", &timescales_csv(&table), &mut outputs)?;
    }

    if options.tolerance_report {
        let checks = run_limit_checks(config, options.threads)?;
        let text = super::report::tolerance_report(&checks, summary.sum_rule_residual);
        write_file(dir, "tolerance_report.txt", &text, &mut outputs)?;
    }

    let mut manifest = RunManifest {
        config_hash: config.source_hash.clone(),
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        schema_version: SCHEMA_VERSION,
        started_unix,
        finished_unix: 0,
        outputs,
        defaults_applied: config.defaults_applied.clone(),
        summary,
    };
    let summary_text = super::report::summarize(&manifest);
    write_file(dir, "summary.txt", &summary_text, &mut manifest.outputs)?;
    manifest.finished_unix = unix_now();
    let manifest_path = dir.join("manifest.txt");
    let text = manifest_text(&manifest);
    std::fs::write(&manifest_path, text).map_err(|e| Error::io(&manifest_path, e))?;
    Ok(manifest)
}

fn summarize_rows(
    summary: &mut SweepSummary,
    rows: &[GridRow],
    p: &Prepared,
    config: &SweepConfig,
) {
    summary.grid_points = rows.len();
    summary.min_ratio = rows
        .iter()
        .copied()
        .reduce(|a, b| if b.ratio < a.ratio { b } else { a });
    summary.max_ratio = rows
        .iter()
        .copied()
        .reduce(|a, b| if b.ratio > a.ratio { b } else { a });
    if let (Some(min), Some(v0)) = (summary.min_ratio, summary.v0) {
        summary.ia_product = Some(p.units.as_to_s(min.tau_sc_as) * min.q * v0);
    }

    let (Some(gap), Some(&k_max)) = (p.model.min_lindblad_gap_sq(), config.k_values.last()) else {
        return;
    };
    let worst = rows
        .iter()
        .filter(|r| {
            r.k == k_max
                && k_max * gap * p.units.as_to_natural(r.tau_sc_as) >= LIMIT_B_REPORT_THRESHOLD
        })
        .filter_map(|r| {
            let tau = p.units.as_to_natural(r.tau_sc_as);
            let model = p.model.with_decoherence(k_max).ok()?;
            let diag = diagonal_limit_rate(&model, &p.rho, r.q, tau).ok()?;
            Some(rel_residual(r.rate, diag))
        })
        .reduce(f64::max);
    summary.limit_b = worst.map(|w| (w, k_max));
}

pub fn manifest_text(m: &RunManifest) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "schema_version = {}", m.schema_version);
    let _ = writeln!(out, "tool = attoscatter {}", m.tool_version);
    let _ = writeln!(out, "config_sha256 = {}", m.config_hash);
    let _ = writeln!(out, "started_unix = {}", m.started_unix);
    let _ = writeln!(out, "finished_unix = {}", m.finished_unix);
    for path in &m.outputs {
        let name = path
            .file_name()
            .map(|n| n.to_string_lossy())
            .unwrap_or_default();
        let _ = writeln!(out, "output = {name}");
    }
    for d in &m.defaults_applied {
        let _ = writeln!(out, "default: {d}");
    }
    out
}
