use std::path::{Path, PathBuf};
use std::process::Command;

use attoscatter::cli::{parse_config, parse_config_str, run_sweep, summarize, RunOptions};
use attoscatter::{Error, UnitsContext};

fn demo_path() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs/demo_anomaly.toml")
}

fn options(dir: &Path) -> RunOptions {
    RunOptions {
        out_dir: dir.to_path_buf(),
        threads: Some(2),
        tolerance_report: false,
    }
}

const SMALL: &str = r#"
[model]
kind = "oscillator"
omega_eV = 0.45
dim = 24

[state]
kind = "thermal"
temperature_K = 300

[sweep]
q_invA = [6.0, 9.0]
tau_sc_as = [300, 600]
K_eV = [0.0, 0.1, 1.0]

[outputs]
series = ["anomaly", "rates", "sqw", "correlation", "timescales"]
sqw_points = 64

[kinematics]
q_invA = 100
deltaE_eV = 10
Es_eV = 20
E0_eV = 10
range_A = 1e-5
"#;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_attoscatter"))
}

#[test]
fn demo_config_shape() {
    let cfg = parse_config(&demo_path()).unwrap();
    let model = cfg.build_model(&UnitsContext::default()).unwrap();
    assert_eq!(model.dim(), 40);
    assert!(cfg.k_values.len() >= 20);
    assert_eq!(cfg.k_values[0], 0.0);
}

#[test]
fn headers_match_golden_file() {
    let golden = include_str!("golden/csv_headers.txt");
    let dir = tempfile::tempdir().unwrap();
    run_sweep(&parse_config_str(SMALL).unwrap(), &options(dir.path())).unwrap();
    for line in golden.lines() {
        let (file, header) = line.split_once(": ").unwrap();
        let text = std::fs::read_to_string(dir.path().join(file)).unwrap();
        assert_eq!(text.lines().next().unwrap(), header, "{file}");
    }
}

#[test]
fn reruns_are_byte_identical() {
    let cfg = parse_config_str(SMALL).unwrap();
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let ma = run_sweep(&cfg, &options(a.path())).unwrap();
    let mut ob = options(b.path());
    ob.threads = Some(1);
    run_sweep(&cfg, &ob).unwrap();
    for path in &ma.outputs {
        let name = path.file_name().unwrap();
        assert_eq!(
            std::fs::read(path).unwrap(),
            std::fs::read(b.path().join(name)).unwrap(),
            "{name:?}"
        );
    }
}

#[test]
fn manifest_lists_non_empty_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let mut opts = options(dir.path());
    opts.tolerance_report = true;
    let cfg = parse_config_str(SMALL).unwrap();
    let m = run_sweep(&cfg, &opts).unwrap();
    assert_eq!(m.outputs.len(), 7);
    for p in &m.outputs {
        assert!(std::fs::metadata(p).unwrap().len() > 0, "{p:?}");
    }
    let text = std::fs::read_to_string(dir.path().join("manifest.txt")).unwrap();
    assert!(text.contains(&cfg.source_hash));
    assert!(text.contains("default: model.mass_amu"));
    assert!(text.contains("output = tolerance_report.txt"));
    assert!(m.finished_unix >= m.started_unix);
}

#[test]
fn anomaly_rows_follow_grid_order() {
    let dir = tempfile::tempdir().unwrap();
    run_sweep(&parse_config_str(SMALL).unwrap(), &options(dir.path())).unwrap();
    let text = std::fs::read_to_string(dir.path().join("anomaly.csv")).unwrap();
    let rows: Vec<Vec<f64>> = text
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 12);
    assert_eq!((rows[0][2], rows[0][1], rows[0][0]), (6.0, 300.0, 0.0));
    assert_eq!((rows[4][2], rows[4][1], rows[4][0]), (6.0, 600.0, 0.1));
    assert_eq!((rows[11][2], rows[11][1], rows[11][0]), (9.0, 600.0, 1.0));
    assert!(rows.iter().filter(|r| r[0] == 0.0).all(|r| r[5] == 1.0));
}

#[test]
fn single_zero_k_reports_unit_ratio() {
    let text = SMALL.replace("K_eV = [0.0, 0.1, 1.0]", "K_eV = [0.0]");
    let dir = tempfile::tempdir().unwrap();
    let m = run_sweep(&parse_config_str(&text).unwrap(), &options(dir.path())).unwrap();
    let report = summarize(&m);
    assert!(report.contains("min ratio         : 1.000000"), "{report}");
    assert!(!report.contains("limit B"));
}

#[test]
fn large_k_grid_reports_limit_b() {
    let text = SMALL.replace("K_eV = [0.0, 0.1, 1.0]", "K_eV = [0.0, 1e9]");
    let dir = tempfile::tempdir().unwrap();
    let m = run_sweep(&parse_config_str(&text).unwrap(), &options(dir.path())).unwrap();
    let (residual, k_max) = m.summary.limit_b.unwrap();
    assert_eq!(k_max, 1e9);
    assert!(residual < 1e-6);
    let report = summarize(&m);
    let line = report
        .lines()
        .find(|l| l.starts_with("limit B residual"))
        .unwrap();
    assert!(line.ends_with(" ok"), "{line}");
}

#[test]
fn failing_point_is_named() {
    // n(q) = 0: the K = 0 reference vanishes and no ratio exists
    let text = r#"
[model]
kind = "explicit"
energies_eV = [0.0, 0.2]
lindblad_values = [0.0, 1.0]
[[model.density]]
q_invA = 1.0
re = [[0.0, 0.0], [0.0, 0.0]]

[state]
kind = "diagonal"
populations = [1.0, 0.0]

[sweep]
q_invA = [1.0]
tau_sc_as = [100]
K_eV = [0.0, 0.5]

[outputs]
series = ["anomaly"]
"#;
    let dir = tempfile::tempdir().unwrap();
    let err = run_sweep(&parse_config_str(text).unwrap(), &options(dir.path())).unwrap_err();
    let Error::SweepFailed(points) = &err else {
        panic!("{err}")
    };
    assert!(
        matches!(points[0], Error::GridPoint { k_ev, tau_sc_as, q_inv_a, .. }
        if k_ev == 0.5 && tau_sc_as == 100.0 && q_inv_a == 1.0)
    );

    let cfg = dir.path().join("bad.toml");
    std::fs::write(&cfg, text).unwrap();
    let out = bin()
        .args(["run", cfg.to_str().unwrap(), "--out-dir"])
        .arg(dir.path().join("out"))
        .output()
        .unwrap();
    assert!(!out.status.success());
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("K = 0.5 eV"), "{stderr}");
}

#[test]
fn binary_subcommands() {
    let demo = demo_path();
    let out = bin()
        .args(["validate", demo.to_str().unwrap()])
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).contains("model dim     : 40"));

    let out = bin()
        .args(["timescales", demo.to_str().unwrap()])
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("quantity,value,unit,note\n"));

    let out = bin()
        .args(["limits", demo.to_str().unwrap()])
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stdout)
    );
}

#[test]
fn binary_reports_config_errors() {
    let dir = tempfile::tempdir().unwrap();
    let empty = dir.path().join("empty.toml");
    std::fs::write(&empty, "").unwrap();
    let out = bin()
        .args(["validate", empty.to_str().unwrap()])
        .output()
        .unwrap();
    assert!(!out.status.success());
    let stderr = String::from_utf8_lossy(&out.stderr);
    for s in ["[model]", "[state]", "[sweep]", "[outputs]"] {
        assert!(stderr.contains(s), "{stderr}");
    }

    let out = bin()
        .args(["validate", "/nonexistent/config.toml"])
        .output()
        .unwrap();
    assert!(!out.status.success());
}
