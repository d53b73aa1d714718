//! Black-box tests of the command-line binary: exit codes, artifact layout,
//! config echo round-trip, refusal messages, and bit-identical reruns.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_pitfield"))
}

/// Run with the output root pinned to `root` and return the finished process.
fn run_in(root: &Path, args: &[&str]) -> Output {
    bin()
        .args(args)
        .env("PITFIELD_OUT_ROOT", root)
        .output()
        .expect("binary failed to launch")
}

fn stdout_of(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr_of(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn read(path: &PathBuf) -> String {
    std::fs::read_to_string(path).unwrap_or_else(|e| panic!("reading {path:?}: {e}"))
}

#[test]
fn help_exits_clean_and_lists_dotted_flags() {
    let out = bin().arg("--help").output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let text = stdout_of(&out);
    assert!(text.contains("--mode"), "{text}");
    assert!(text.contains("--grid.h"), "{text}");
}

#[test]
fn cfl_report_prints_bounds_and_alpha_table() {
    let out = bin().args(["--mode", "cfl-report", "--h", "0.25"]).output().unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", stderr_of(&out));
    let text = stdout_of(&out);
    assert!(text.contains("D_phi = "), "{text}");
    assert!(text.contains("D_c = "), "{text}");
    assert!(text.contains("D_lin = "), "{text}");
    // frozen local bound at h = 0.25 (17-significant-digit echo)
    assert!(text.contains("dt_max(local) = 1.5616398643790986e-4"), "{text}");
    assert!(text.contains("dt_max(nonlocal, m=3)"), "{text}");
    // table covers m = 1..8, and alpha(1) is the classical 1/4
    assert!(text.contains("m=1  alpha=2.5000000000000000e-1"), "{text}");
    assert!(text.contains("m=8  alpha="), "{text}");
}

#[test]
fn simulate_without_grid_h_fails_naming_the_key() {
    let tmp = tempfile::tempdir().unwrap();
    let out = run_in(tmp.path(), &["--mode", "simulate"]);
    assert_eq!(out.status.code(), Some(1));
    let err = stderr_of(&out);
    assert!(err.contains("grid.h"), "{err}");
}

#[test]
fn unknown_keys_are_rejected_from_file_and_flag() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg_path = tmp.path().join("bad.cfg");
    std::fs::write(&cfg_path, "grid.h = 1\nturbo.mode = on\n").unwrap();
    let out = run_in(tmp.path(), &["--config", cfg_path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr_of(&out).contains("unknown configuration key \"turbo.mode\""));

    let out = run_in(tmp.path(), &["--h", "1", "--set", "turbo.mode=on"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr_of(&out).contains("unknown configuration key \"turbo.mode\""));
}

#[test]
fn duplicate_definitions_are_rejected() {
    let tmp = tempfile::tempdir().unwrap();
    let out = run_in(
        tmp.path(),
        &["--h", "1", "--set", "time.dt=1e-4", "--set", "time.dt=2e-4"],
    );
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr_of(&out).contains("time.dt"), "{}", stderr_of(&out));
}

#[test]
fn oversized_dt_is_refused_with_cfl_numbers() {
    // At h = 0.25 the nonlocal m=3 bound is ~7.67e-4, far below 1e-2.
    let tmp = tempfile::tempdir().unwrap();
    let out = run_in(tmp.path(), &["--h", "0.25", "--dt", "1e-2", "--t-final", "0.1"]);
    assert_eq!(out.status.code(), Some(1));
    let err = stderr_of(&out);
    assert!(err.contains("exceeds the nonlocal CFL bound"), "{err}");
    assert!(err.contains("D_lin"), "{err}");
    assert!(err.contains("dt_max = 7.66623206149739"), "{err}");
    assert!(err.contains("--allow-unstable-dt"), "{err}");
}

#[test]
fn simulate_writes_snapshots_diagnostics_and_config_echo() {
    let tmp = tempfile::tempdir().unwrap();
    let out = run_in(tmp.path(), &["--h", "1", "--t-final", "0.001"]); // 10 steps
    assert_eq!(out.status.code(), Some(0), "{}", stderr_of(&out));
    let text = stdout_of(&out);
    assert!(text.contains("nonlocal scheme finished: 10 steps"), "{text}");

    let dir = tmp.path().join("out"); // default output.dir under the root
    assert!(dir.join("config.resolved").exists());
    // default cadence = 10% of 10 steps = every step: snapshots 0..=10
    for step in [0u64, 1, 5, 10] {
        assert!(dir.join(format!("phi_{step}.csv")).exists(), "phi_{step}.csv");
        assert!(dir.join(format!("c_{step}.csv")).exists(), "c_{step}.csv");
    }
    let diag = read(&dir.join("diagnostics.csv"));
    let mut lines = diag.lines();
    assert_eq!(
        lines.next().unwrap(),
        "step,t,energy,mass_c,min_phi,max_phi,min_c,max_c"
    );
    assert_eq!(lines.clone().count(), 11);
    assert!(lines.next().unwrap().starts_with("0,0.0000000000000000e0,"));

    // snapshot shape: 51 rows of 51 comma-separated values
    let snap = read(&dir.join("phi_10.csv"));
    let rows: Vec<&str> = snap.lines().collect();
    assert_eq!(rows.len(), 51);
    assert_eq!(rows[0].split(',').count(), 51);

    // the echo starts with the mode and mentions every section
    let resolved = read(&dir.join("config.resolved"));
    assert!(resolved.starts_with("mode = simulate\n"), "{resolved}");
    for key in ["grid.h = ", "material.a = ", "time.dt = ", "output.dir = "] {
        assert!(resolved.contains(key), "missing {key} in:\n{resolved}");
    }
}

#[test]
fn config_echo_round_trips_bit_for_bit() {
    let root_a = tempfile::tempdir().unwrap();
    let root_b = tempfile::tempdir().unwrap();
    let out = run_in(
        root_a.path(),
        &["--h", "1", "--t-final", "0", "--set", "material.a=30.5"],
    );
    assert_eq!(out.status.code(), Some(0), "{}", stderr_of(&out));
    let echo_a = root_a.path().join("out/config.resolved");

    // feed the echo back in unchanged; only the root differs
    let out = run_in(root_b.path(), &["--config", echo_a.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr_of(&out));
    let echo_b = root_b.path().join("out/config.resolved");
    assert_eq!(read(&echo_a), read(&echo_b));
    assert!(read(&echo_a).contains("material.a = 3.0500000000000000e1"));
}

#[test]
fn blowup_exits_2_and_leaves_inspectable_artifacts() {
    let tmp = tempfile::tempdir().unwrap();
    let out = run_in(
        tmp.path(),
        &[
            "--h", "1", "--dt", "0.1", "--t-final", "1", "--allow-unstable-dt",
        ],
    );
    assert_eq!(out.status.code(), Some(2), "{}", stderr_of(&out));
    let err = stderr_of(&out);
    assert!(err.contains("numerical blow-up at step"), "{err}");
    assert!(err.contains("WARNING"), "{err}"); // the override warning fired first

    let dir = tmp.path().join("out");
    assert!(dir.join("config.resolved").exists());
    let log = read(&dir.join("error.log"));
    assert!(log.contains("numerical blow-up"), "{log}");
    // the last healthy state was flushed: at least the step-0 snapshot pair
    assert!(dir.join("phi_0.csv").exists());
    assert!(dir.join("c_0.csv").exists());
}

#[test]
fn broken_output_root_exits_3() {
    let tmp = tempfile::tempdir().unwrap();
    let file = tmp.path().join("not_a_dir");
    std::fs::write(&file, "occupied").unwrap();
    let out = run_in(&file, &["--h", "1", "--t-final", "0"]);
    assert_eq!(out.status.code(), Some(3), "{}", stderr_of(&out));
    assert!(stderr_of(&out).contains("i/o error"), "{}", stderr_of(&out));
}

#[test]
fn simulate_outputs_are_bit_identical_across_runs() {
    let root_a = tempfile::tempdir().unwrap();
    let root_b = tempfile::tempdir().unwrap();
    let args = ["--h", "1", "--t-final", "0.005"]; // 50 steps
    assert_eq!(run_in(root_a.path(), &args).status.code(), Some(0));
    assert_eq!(run_in(root_b.path(), &args).status.code(), Some(0));
    for name in ["phi_50.csv", "c_50.csv", "diagnostics.csv"] {
        let a = read(&root_a.path().join("out").join(name));
        let b = read(&root_b.path().join("out").join(name));
        assert_eq!(a, b, "{name} differs between identical runs");
    }
}

#[test]
fn study_mode_emits_report_with_slope_footer() {
    let tmp = tempfile::tempdir().unwrap();
    let out = run_in(
        tmp.path(),
        &["--mode", "study", "--h-list", "2,1", "--t-final", "0.01"],
    );
    assert_eq!(out.status.code(), Some(0), "{}", stderr_of(&out));
    let text = stdout_of(&out);
    assert!(text.contains("rel_l2_error"), "{text}");
    assert!(text.contains("fitted_slope = "), "{text}");

    let report = read(&tmp.path().join("out/report.csv"));
    let lines: Vec<&str> = report.lines().collect();
    assert_eq!(lines[0], "h,delta,m,rel_l2_error_percent,wall_time_s");
    assert_eq!(lines.len(), 4, "{report}"); // header + 2 rows + slope footer
    // rows sorted by horizon, largest first
    assert!(lines[1].starts_with("2.0000000000000000e0,6.0000000000000000e0,3,"));
    assert!(lines[2].starts_with("1.0000000000000000e0,3.0000000000000000e0,3,"));
    assert!(lines[3].starts_with("# fitted_slope="), "{report}");
}

#[test]
fn consistency_mode_prints_rows_and_rate() {
    let out = bin()
        .args(["--mode", "consistency", "--deltas", "4,2", "--set", "consistency.m=2"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", stderr_of(&out));
    let text = stdout_of(&out);
    assert!(text.contains("field = sinsin"), "{text}");
    assert!(text.contains("delta = 4.0000000000000000e0"), "{text}");
    assert!(text.contains("max_interior_error"), "{text}");
    assert!(text.contains("fitted_rate"), "{text}");
}

#[test]
fn mode_alias_meaning_follows_the_mode() {
    // In study mode, --m sets study.m; nonlocal.m keeps its default.
    let tmp = tempfile::tempdir().unwrap();
    let out = run_in(
        tmp.path(),
        &["--mode", "study", "--h-list", "2", "--m", "2", "--t-final", "0.002"],
    );
    assert_eq!(out.status.code(), Some(0), "{}", stderr_of(&out));
    let resolved = read(&tmp.path().join("out/config.resolved"));
    assert!(resolved.contains("study.m = 2"), "{resolved}");
    assert!(resolved.contains("nonlocal.m = 3"), "{resolved}");
}
