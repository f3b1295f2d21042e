use std::path::Path;
use std::process::{Command, Output};

fn qlg(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qlg"))
        .args(args)
        .current_dir(cwd)
        .env_remove("QLG_THREADS")
        .output()
        .unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

#[test]
fn dispersion_run_writes_contracted_files() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(
        tmp.path(),
        "d.conf",
        "experiment = dispersion\nm_tau = 0.6\nsites = 64\n",
    );
    let out = tmp.path().join("out");
    let o = qlg(
        &[
            "dispersion",
            "--config",
            &cfg,
            "--out",
            out.to_str().unwrap(),
        ],
        tmp.path(),
    );
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let csv = std::fs::read_to_string(out.join("dispersion.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(
        lines.next().unwrap(),
        "k_ell,omega_tau_1,omega_tau_2,omega_tau_3,omega_tau_4,p_eff_ell,residual"
    );
    assert_eq!(lines.count(), 64);
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("report.json")).unwrap()).unwrap();
    assert_eq!(report["passed"], true);
    assert_eq!(report["parameters"]["m_tau"], "0.6");
}

#[test]
fn config_errors_exit_one_with_line_numbers() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(
        tmp.path(),
        "bad.conf",
        "experiment = dispersion\nm_tau = 1.5\nsites = 64\ncolour = red\n",
    );
    let o = qlg(&["dispersion", "--config", &cfg], tmp.path());
    assert_eq!(o.status.code(), Some(1));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("line 2: m_tau = 1.5: m_tau ∉ [0,1]"), "{err}");
    assert!(err.contains("line 4: unknown key `colour`"), "{err}");
}

#[test]
fn usage_errors_exit_one() {
    let tmp = tempfile::tempdir().unwrap();
    assert_eq!(
        qlg(&["nonsense", "--config", "x"], tmp.path())
            .status
            .code(),
        Some(1)
    );
    assert_eq!(qlg(&["dispersion"], tmp.path()).status.code(), Some(1));
    let cfg = write(tmp.path(), "v.conf", "experiment = verify\n");
    assert_eq!(
        qlg(&["dispersion", "--config", &cfg], tmp.path())
            .status
            .code(),
        Some(1)
    );
    assert_eq!(
        qlg(&["bcs", "--config", &cfg, "--threads", "0"], tmp.path())
            .status
            .code(),
        Some(1)
    );
    assert_eq!(qlg(&["--help"], tmp.path()).status.code(), Some(0));
}

#[test]
fn runtime_failure_exits_two_and_is_reported() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(
        tmp.path(),
        "s.conf",
        "experiment = superfluid\nsites = 8\nsteps = 4\nlambda = 1e6\npairing_mode = local\ninitial = random\n",
    );
    let out = tmp.path().join("o");
    let o = qlg(
        &[
            "superfluid",
            "--config",
            &cfg,
            "--out",
            out.to_str().unwrap(),
        ],
        tmp.path(),
    );
    assert_eq!(o.status.code(), Some(2));
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("report.json")).unwrap()).unwrap();
    assert_eq!(report["passed"], false);
    assert!(report["error"]
        .as_str()
        .unwrap()
        .contains("gap overflow at site"));
}

#[test]
fn failing_check_exits_two() {
    // the strict monotonicity check fails at small slice counts
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(
        tmp.path(),
        "t.conf",
        "experiment = trotter-compare\nk_ell = 0.5\nm_tau = 0.5\nsteps = 64\n",
    );
    let o = qlg(
        &["trotter-compare", "--config", &cfg, "--out", "o"],
        tmp.path(),
    );
    assert_eq!(o.status.code(), Some(2));
    assert!(tmp.path().join("o/trotter.csv").exists());
}

#[test]
fn long_dirac_run_keeps_norm() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(
        tmp.path(),
        "d.conf",
        "experiment = dirac1d\nsites = 256\nsteps = 10000\nm_tau = 0.5\n",
    );
    let o = qlg(&["dirac1d", "--config", &cfg, "--out", "o"], tmp.path());
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stdout)
    );
    let csv = std::fs::read_to_string(tmp.path().join("o/timeseries.csv")).unwrap();
    let worst = csv
        .lines()
        .skip(1)
        .map(|l| (l.split(',').nth(1).unwrap().parse::<f64>().unwrap() - 1.0).abs())
        .fold(0.0, f64::max);
    assert_eq!(csv.lines().count(), 10_001);
    assert!(worst <= 1e-10, "{worst}");
}

#[test]
fn json_format_embeds_tables_and_seed_override_applies() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(
        tmp.path(),
        "b.conf",
        "experiment = bdg\neps = 0.3\ndelta = 0.4\nE_tau = 0.5\nsteps = 3\nformat = json\nrng_seed = 1\n",
    );
    let o = qlg(
        &["bdg", "--config", &cfg, "--out", "o", "--seed", "99"],
        tmp.path(),
    );
    assert_eq!(o.status.code(), Some(0));
    assert!(!tmp.path().join("o/timeseries.csv").exists());
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(tmp.path().join("o/report.json")).unwrap())
            .unwrap();
    assert_eq!(report["parameters"]["rng_seed"], "99");
    assert_eq!(report["tables"]["timeseries"].as_array().unwrap().len(), 3);
}
