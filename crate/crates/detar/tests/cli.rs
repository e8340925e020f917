use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use detar::output::RESULTS_HEADER;

fn detar(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_detar"))
        .current_dir(dir)
        .args(args)
        .output()
        .unwrap()
}

#[test]
fn single_resolution_gives_rows_without_fit() {
    let dir = tempfile::tempdir().unwrap();
    let out = detar(dir.path(), &["example1", "--m-range", "9", "--out", "r.csv"]);
    assert_eq!(out.status.code(), Some(0));
    let csv = fs::read_to_string(dir.path().join("r.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], RESULTS_HEADER);
    // DAR, ten seeded RAR runs and their mean
    assert_eq!(lines.len(), 1 + 12);
    assert!(lines[1].starts_with("example1,DAR_CUBE,9,512.0,"));
    assert!(lines[12].starts_with("example1,RAR_MEAN,9,"));
    let slopes = fs::read_to_string(dir.path().join("r.slopes.txt")).unwrap();
    assert!(!slopes.contains("DAR_CUBE\t"));
    assert!(!slopes.contains("check"));
}

#[test]
fn default_output_location_and_plot_data() {
    let dir = tempfile::tempdir().unwrap();
    let out = detar(dir.path(), &["example3", "--plot-data"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    for f in ["example3.csv", "example3.slopes.txt", "example3.plot.tsv"] {
        assert!(dir.path().join("results").join(f).is_file(), "{f}");
    }
    let plot = fs::read_to_string(dir.path().join("results/example3.plot.tsv")).unwrap();
    assert!(plot.starts_with("sampler\tlog10_N\tlog10_D\tlog10_fit"));
    assert!(plot.lines().any(|l| l.starts_with("DRAR\t")));
}

#[test]
fn failed_bound_check_exits_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let out = detar(dir.path(), &["example3", "--m-range", "1..3", "--out", "r.csv"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("FAIL"));
    assert!(dir.path().join("r.csv").is_file());
}

#[test]
fn usage_errors_exit_with_one() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(detar(dir.path(), &["example1", "--bogus"]).status.code(), Some(1));
    assert_eq!(detar(dir.path(), &["example1", "--m-range", "9..4"]).status.code(), Some(1));
    assert_eq!(detar(dir.path(), &["fit", "missing.csv"]).status.code(), Some(1));
    assert_eq!(detar(dir.path(), &["net-audit", "--dims", "6"]).status.code(), Some(1));
    assert_eq!(detar(dir.path(), &["--help"]).status.code(), Some(0));
}

#[test]
fn oversized_grid_leaves_discrepancy_empty() {
    let dir = tempfile::tempdir().unwrap();
    let out = detar(dir.path(), &["example1", "--m-range", "9", "--grid", "7", "--out", "r.csv"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stderr).contains("warning"));
    let csv = fs::read_to_string(dir.path().join("r.csv")).unwrap();
    assert!(csv.lines().nth(1).unwrap().ends_with(",,,,,"));
}

#[test]
fn fit_recomputes_slopes_from_csv() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(detar(dir.path(), &["example3", "--out", "r.csv"]).status.code(), Some(0));
    let out = detar(dir.path(), &["fit", "r.csv"]);
    assert_eq!(out.status.code(), Some(0));
    let stdout = String::from_utf8(out.stdout).unwrap();
    let sidecar = fs::read_to_string(dir.path().join("r.slopes.txt")).unwrap();
    let slope_of = |text: &str, prefix: &str, col: usize| -> String {
        text.lines()
            .find(|l| l.starts_with(prefix))
            .unwrap()
            .split('\t')
            .nth(col)
            .unwrap()
            .to_string()
    };
    assert_eq!(slope_of(&stdout, "example3\tDRAR\t\t", 4), slope_of(&sidecar, "DRAR\t", 1));
    assert_eq!(
        slope_of(&stdout, "example3\tDRAR_RANDOM_MEAN\t", 4),
        slope_of(&sidecar, "DRAR_RANDOM_MEAN\t", 1)
    );
}

#[test]
fn net_audit_low_dimensions() {
    let dir = tempfile::tempdir().unwrap();
    let out = detar(
        dir.path(),
        &["net-audit", "--dims", "1,2", "--m-range", "4..10", "--trials", "500", "--out", "a.csv"],
    );
    assert_eq!(out.status.code(), Some(0));
    let csv = fs::read_to_string(dir.path().join("a.csv")).unwrap();
    let mut rows = csv.lines();
    assert_eq!(rows.next().unwrap(), "s,m,t,fair,isotropic_estimate,bound,pass");
    let rows: Vec<Vec<&str>> = rows.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 14);
    assert!(rows.iter().all(|r| r[2] == "0" && r[3] == "true" && r[6] == "true"));
}
