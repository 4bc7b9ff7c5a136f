//! End-to-end tests of the `cvml` binary: exit codes, output determinism,
//! and the documented report values, driven through real process spawns.

use std::io::Write;
use std::path::Path;
use std::process::{Command, Output};

fn cvml() -> Command {
    Command::new(env!("CARGO_BIN_EXE_cvml"))
}

fn stdout_of(output: &Output) -> String {
    String::from_utf8_lossy(&output.stdout).into_owned()
}

fn stderr_of(output: &Output) -> String {
    String::from_utf8_lossy(&output.stderr).into_owned()
}

fn write_config(dir: &Path, content: &str) -> std::path::PathBuf {
    let path = dir.join("scenario.cfg");
    let mut file = std::fs::File::create(&path).unwrap();
    file.write_all(content.as_bytes()).unwrap();
    path
}

#[test]
fn report_passes_on_the_default_scenario() {
    let output = cvml().arg("report").output().unwrap();
    let stdout = stdout_of(&output);
    assert!(
        output.status.success(),
        "report failed:\n{stdout}\n{}",
        stderr_of(&output)
    );
    let passes = stdout.lines().filter(|l| l.starts_with("[PASS]")).count();
    assert_eq!(passes, 14, "expected 14 passing criteria:\n{stdout}");
    assert!(stdout.contains("acceptance: 14/14 criteria passed"), "{stdout}");
    assert!(
        stderr_of(&output).is_empty(),
        "no baseline warning expected on defaults"
    );
}

#[test]
fn report_flags_a_changed_baseline_and_exits_nonzero() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), "mu = 1.44e-5\n");
    let output = cvml().arg("--config").arg(&config).arg("report").output().unwrap();
    assert_eq!(output.status.code(), Some(1), "failing criteria must exit 1");
    assert!(
        stderr_of(&output).contains("differs from the reference baseline"),
        "changed scenario must be flagged: {}",
        stderr_of(&output)
    );
    // tenfold attenuation scales the reach by exactly one tenth
    assert!(stdout_of(&output).contains("closed 55.138 m"), "{}", stdout_of(&output));
}

#[test]
fn figure_output_is_byte_identical_across_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let reference = dir.path().join("ref.csv");
    let status = cvml()
        .args(["fig", "--id", "6", "--out"])
        .arg(&reference)
        .status()
        .unwrap();
    assert!(status.success());
    for threads in ["1", "5"] {
        let path = dir.path().join(format!("t{threads}.csv"));
        let status = cvml()
            .env("CVML_THREADS", threads)
            .args(["fig", "--id", "6", "--out"])
            .arg(&path)
            .status()
            .unwrap();
        assert!(status.success());
        assert_eq!(
            std::fs::read(&reference).unwrap(),
            std::fs::read(&path).unwrap(),
            "CVML_THREADS={threads} changed the bytes"
        );
    }
}

#[test]
fn every_figure_id_produces_commented_csv() {
    let dir = tempfile::tempdir().unwrap();
    for id in ["6", "8", "9", "10", "11", "12", "13"] {
        let path = dir.path().join(format!("fig{id}.csv"));
        let output = cvml()
            .args(["fig", "--id", id, "--out"])
            .arg(&path)
            .output()
            .unwrap();
        assert!(output.status.success(), "fig {id}: {}", stderr_of(&output));
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.starts_with("# cvml fig"), "fig {id} header: {text:.60}");
        assert!(
            text.lines().any(|l| l.starts_with("# columns:")),
            "fig {id} must name its columns"
        );
        let data_rows = text.lines().filter(|l| !l.starts_with('#')).count();
        assert!(data_rows > 100, "fig {id} has only {data_rows} rows");
    }
}

#[test]
fn exit_codes_follow_the_contract() {
    let dir = tempfile::tempdir().unwrap();

    let unknown_key = write_config(dir.path(), "murk = 1.0\n");
    let output = cvml().arg("--config").arg(&unknown_key).arg("report").output().unwrap();
    assert_eq!(output.status.code(), Some(2));
    assert!(stderr_of(&output).contains("unknown key `murk`"));

    let output = cvml()
        .args(["fig", "--id", "6", "--out", "/nonexistent-dir/x.csv"])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(3), "unwritable path must exit 3");

    let untangled = write_config(dir.path(), "r = 0\n");
    let output = cvml().arg("--config").arg(&untangled).arg("maxdist").output().unwrap();
    assert_eq!(output.status.code(), Some(2));
    assert!(stderr_of(&output).contains("not entangled"));

    let output = cvml().args(["fig", "--id", "7", "--out", "/tmp/x.csv"]).output().unwrap();
    assert_eq!(output.status.code(), Some(2), "unsupported figure id is a usage error");
}

#[test]
fn maxdist_reports_the_reference_reaches() {
    let asym = stdout_of(&cvml().arg("maxdist").output().unwrap());
    assert!(asym.contains("geometry = asym"), "{asym}");
    assert!(asym.contains("L_max_closed_m = 5.5138"), "{asym}");
    let delta = asym
        .lines()
        .find_map(|l| l.strip_prefix("check_delta_m = "))
        .and_then(|v| v.parse::<f64>().ok())
        .expect("delta line present");
    assert!(delta < 0.01, "closed form and bisection disagree by {delta} m");

    let sym = stdout_of(&cvml().args(["maxdist", "--geometry", "sym"]).output().unwrap());
    assert!(sym.contains("L_max_closed_m = 4.7878"), "{sym}");
}

#[test]
fn sweep_emits_ordered_rows_with_probability_only_where_defined() {
    let prob = stdout_of(
        &cvml()
            .args([
                "sweep",
                "--from",
                "0",
                "--to",
                "100",
                "--step",
                "25",
                "--resource",
                "2ps-prob-sym",
            ])
            .output()
            .unwrap(),
    );
    let rows: Vec<Vec<&str>> = prob
        .lines()
        .filter(|l| !l.starts_with('#'))
        .map(|l| l.split(',').collect())
        .collect();
    assert_eq!(rows.len(), 5, "{prob}");
    let mut last = -1.0;
    for row in &rows {
        assert_eq!(row.len(), 8, "column count in {row:?}");
        assert_eq!(row[1], "2ps-prob-sym");
        let length: f64 = row[0].parse().unwrap();
        assert!(length > last, "rows must come in grid order");
        last = length;
        assert!(!row[6].is_empty(), "probabilistic family reports P_success");
        let p: f64 = row[6].parse().unwrap();
        assert!(p > 0.0 && p < 1.0);
    }

    let bare = stdout_of(
        &cvml()
            .args(["sweep", "--from", "0", "--to", "50", "--step", "50"])
            .output()
            .unwrap(),
    );
    for row in bare.lines().filter(|l| !l.starts_with('#')) {
        let fields: Vec<&str> = row.split(',').collect();
        assert_eq!(fields[1], "tmst-asym", "default resource");
        assert!(fields[6].is_empty(), "bare family has no success probability");
    }
}

#[test]
fn flags_override_the_scenario_file() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), "tau = 0.9\n");
    let path = dir.path().join("fig6.csv");
    let status = cvml()
        .arg("--config")
        .arg(&config)
        .args(["--tau", "0.99", "fig", "--id", "6", "--out"])
        .arg(&path)
        .status()
        .unwrap();
    assert!(status.success());
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.contains("tau = 0.99"), "flag must win over the file: {text:.200}");
}

#[test]
fn displacement_is_accepted_with_a_note() {
    let output = cvml().args(["--alpha0", "1.5", "maxdist"]).output().unwrap();
    assert!(output.status.success());
    assert!(
        stderr_of(&output).contains("ignored"),
        "alpha0 should be noted as ignored: {}",
        stderr_of(&output)
    );
}

#[test]
fn satellite_report_matches_the_reference_link() {
    let output = cvml().arg("satellite").output().unwrap();
    assert!(output.status.success());
    let stdout = stdout_of(&output);
    assert!(stdout.contains("friis_transmissivity = 1.71347"), "{stdout}");
    assert!(stdout.contains("field_region = far-field"), "{stdout}");
    assert!(stdout.contains("min_aperture_product_m2 = 3.45"), "{stdout}");

    let dir = tempfile::tempdir().unwrap();
    let grid = dir.path().join("grid.csv");
    let output = cvml().args(["satellite", "--out"]).arg(&grid).output().unwrap();
    assert!(output.status.success());
    let text = std::fs::read_to_string(&grid).unwrap();
    assert!(text.contains("# panel b: free-space region"), "{text:.200}");
    assert!(text.contains(",far-field,"), "region rows present");
}
