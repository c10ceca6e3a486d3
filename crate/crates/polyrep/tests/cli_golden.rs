//! Golden-file tests of every subcommand. Set `UPDATE_GOLDEN=1` to rewrite
//! the files under `tests/golden`.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_polyrep"));
    c.env("POLYREP_WORKERS", "2");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn golden_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden")
}

fn check_golden(name: &str, actual: &[u8]) {
    let path = golden_dir().join(name);
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        std::fs::create_dir_all(golden_dir()).unwrap();
        std::fs::write(&path, actual).unwrap();
        return;
    }
    let expected = std::fs::read(&path).unwrap_or_else(|_| panic!("missing golden file {name}"));
    assert!(expected == actual, "{name} differs from the golden file:\n{}", String::from_utf8_lossy(actual));
}

fn golden(name: &str, args: &[&str]) {
    let out = run(args);
    assert!(out.status.success(), "{args:?} failed: {}", String::from_utf8_lossy(&out.stderr));
    check_golden(name, &out.stdout);
}

#[test]
fn equilibria_in_cube() {
    golden("equilibria_mu-20.csv", &["equilibria", "--mu", "-20"]);
}

#[test]
fn equilibria_with_formal_points() {
    golden("equilibria_mu-7_all.json", &["--format", "json", "equilibria", "--mu", "-7", "--all"]);
}

#[test]
fn equilibria_numeric() {
    golden("equilibria_mu9.8_numeric.csv", &["equilibria", "--mu", "9.8", "--numeric"]);
}

#[test]
fn eigen_named() {
    golden("eigen_B2_mu-15.json", &["eigen", "--mu", "-15", "--name", "B2", "--format", "json"]);
}

#[test]
fn eigen_csv() {
    golden("eigen_O_mu3.6.csv", &["eigen", "--mu", "3.6", "--name", "O"]);
}

#[test]
fn scan_bifurcations() {
    golden("scan.json", &["scan-bifurcations"]);
}

#[test]
fn scan_bifurcations_csv() {
    golden(
        "scan_transcritical_wide.csv",
        &["scan-bifurcations", "--from", "-32", "--kind", "transcritical", "--format", "csv"],
    );
}

#[test]
fn classify_case() {
    golden("classify_mu-10.json", &["classify-case", "--mu", "-10"]);
}

#[test]
fn integrate_sampled() {
    golden("integrate_mu-14.csv", &["integrate", "--mu", "-14", "--t-end", "5", "--dt", "0.5"]);
}

#[test]
fn integrate_from_equilibrium() {
    golden(
        "integrate_v3_mu-20.json",
        &[
            "integrate",
            "--mu",
            "-20",
            "--equilibrium",
            "v3",
            "--offset",
            "0.001,-0.001,0.001",
            "--t-end",
            "2",
            "--stride",
            "20",
            "--format",
            "json",
        ],
    );
}

#[test]
fn lyapunov_single() {
    golden("lyapunov_mu-20.csv", &["lyapunov", "--mu", "-20", "--horizon", "500", "--discard", "100"]);
}

#[test]
fn sweep_small() {
    let dir = tempfile::tempdir().unwrap();
    let summary = dir.path().join("summary.json");
    golden(
        "sweep.csv",
        &[
            "sweep",
            "--from",
            "-20",
            "--to",
            "5",
            "--points",
            "3",
            "--horizon",
            "600",
            "--discard",
            "100",
            "--summary",
            summary.to_str().unwrap(),
        ],
    );
    check_golden("sweep_summary.json", &std::fs::read(summary).unwrap());
}

#[test]
fn manifolds_traces() {
    golden("manifolds_mu-10.csv", &["manifolds", "--mu", "-10", "--seeds", "4", "--t-end", "20", "--stride", "40"]);
}

#[test]
fn manifolds_verdicts() {
    golden("manifolds_mu0.json", &["manifolds", "--mu", "0", "--branches", "stable", "--format", "json"]);
}

#[test]
fn manifolds_edge_probe() {
    golden("edge_probe_mu5.json", &["manifolds", "--mu", "5", "--edge", "v5:v6:B1"]);
}

#[test]
fn manifolds_heteroclinic_probe() {
    golden(
        "probe_v3_v8_mu-20.csv",
        &["manifolds", "--mu", "-20", "--probe", "v3:v8", "--t-end", "100", "--format", "csv"],
    );
}

#[test]
fn homoclinic() {
    golden("homoclinic_mu-17.json", &["homoclinic", "--mu", "-17"]);
}

#[test]
fn homoclinic_csv() {
    golden("homoclinic_mu2.csv", &["homoclinic", "--mu", "2", "--seeds", "16", "--format", "csv"]);
}

#[test]
fn poincare() {
    golden("poincare_mu-14.csv", &["poincare", "--mu", "-14", "--returns", "10", "--transient", "100"]);
}

#[test]
fn gallery_bundle() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["gallery", "--preset", "mu=-17.5", "--out-dir", dir.path().to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    check_golden("gallery_mu-17.5_manifest.json", &std::fs::read(dir.path().join("manifest.json")).unwrap());
    check_golden("gallery_mu-17.5_equilibria.csv", &std::fs::read(dir.path().join("equilibria.csv")).unwrap());
    for f in ["trajectory.csv", "cycle.csv", "manifolds.csv"] {
        assert!(dir.path().join(f).exists(), "{f} missing");
    }
    assert_eq!(out.stdout, std::fs::read(dir.path().join("manifest.json")).unwrap());
}

#[test]
fn gallery_list() {
    golden("gallery_list.txt", &["gallery", "--list"]);
}

#[test]
fn config_file_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "# integrate near O\ncommand = integrate\nmu = 3.6\nt_end = 20\ndt = 0.25\nscheme = true\n")
        .unwrap();
    let a = run(&["--config", cfg.to_str().unwrap()]);
    let b = run(&["--config", cfg.to_str().unwrap()]);
    assert!(a.status.success(), "{}", String::from_utf8_lossy(&a.stderr));
    assert_eq!(a.stdout, b.stdout);
    check_golden("config_integrate_mu3.6.csv", &a.stdout);

    // a command-line flag overrides the file
    let c = run(&["--config", cfg.to_str().unwrap(), "--t-end", "1"]);
    let last = String::from_utf8(c.stdout).unwrap().lines().last().unwrap().to_string();
    assert!(last.starts_with("1.0,"), "{last}");
}

#[test]
fn output_flag_writes_a_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("eq.csv");
    let out = run(&["--output", path.to_str().unwrap(), "equilibria", "--mu", "-20"]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    check_golden("equilibria_mu-20.csv", &std::fs::read(path).unwrap());
}

#[test]
fn exit_codes() {
    let code = |args: &[&str]| run(args).status.code().unwrap();
    assert_eq!(code(&["classify-case", "--mu", "-14"]), 0);
    assert_eq!(code(&["classify-case", "--mu", "-12"]), 3);
    assert_eq!(code(&["equilibria", "--mu", "20"]), 1);
    assert_eq!(code(&["equilibria", "--mu", "20", "--mu-max", "30"]), 0);
    assert_eq!(code(&["eigen", "--mu", "0", "--name", "Q"]), 1);
    assert_eq!(code(&["gallery", "--preset", "mu=2", "--out-dir", "/nonexistent"]), 1);
    assert_eq!(code(&["no-such-command"]), 1);
    assert_eq!(code(&["--config", "/nonexistent.cfg", "eigen", "--mu", "0", "--name", "O"]), 1);
    assert_eq!(code(&["eigen", "--mu", "0", "--point", "0.5,0.5,0.5"]), 2);
    assert_eq!(code(&["poincare", "--mu", "-20", "--returns", "5", "--t-max", "50"]), 3);
    assert_eq!(code(&["--help"]), 0);
}

#[test]
fn config_errors_name_the_line() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.cfg");
    std::fs::write(&cfg, "mu = 1\nthis is not a pair\n").unwrap();
    let out = run(&["--config", cfg.to_str().unwrap(), "classify-case"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("bad.cfg:2:"));

    std::fs::write(&cfg, "mu = 1\nbogus = 2\n").unwrap();
    let out = run(&["--config", cfg.to_str().unwrap(), "classify-case"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));
}

#[test]
fn help_lists_every_subcommand() {
    let help = String::from_utf8(run(&["--help"]).stdout).unwrap();
    for s in polyrep::cli::SUBCOMMANDS {
        assert!(help.contains(s), "{s} missing from --help");
    }
}
