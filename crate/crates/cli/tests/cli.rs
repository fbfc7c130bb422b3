//! End-to-end tests of the momreg binary, including the determinism
//! acceptance criterion: fixed seed, byte-identical outputs at any
//! parallelism degree.

use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

fn momreg() -> Command {
    Command::new(env!("CARGO_BIN_EXE_momreg"))
}

fn work_dir(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("momreg-cli-{}-{}", std::process::id(), name));
    fs::create_dir_all(&dir).unwrap();
    dir
}

fn stdout_of(output: &Output) -> String {
    String::from_utf8_lossy(&output.stdout).to_string()
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn write_linear_dataset(path: &PathBuf, n: usize) {
    // Stride through the grid with a coprime step so that contiguous blocks
    // still cover the whole support.
    let stride = (3..).find(|s| gcd(*s, n) == 1).unwrap();
    let mut text = String::from("x1,y\n");
    for i in 0..n {
        let x = ((i * stride % n) as f64 + 0.5) / n as f64;
        text.push_str(&format!("{x},{x}\n"));
    }
    fs::write(path, text).unwrap();
}

const SCENARIO: &str = "\
[scenario]
id = determinism
d = 1
n = 512
target = linear
trials = 400
seed = 7
delta = 0.049787068367863944
query = fixed
query_point = 0.5

[noise]
kind = student_t
nu = 2.5
sigma = 0.5

[model]
rho = 1.0

[estimator]
kind = knn
mode = mom
m = auto
tuning = auto
robust = false
";

#[test]
fn criterion_12_tail_outputs_identical_across_jobs() {
    let dir = work_dir("determinism");
    let scenario = dir.join("scenario.scn");
    fs::write(&scenario, SCENARIO).unwrap();

    let mut artifacts: Vec<(String, String, String)> = Vec::new();
    for jobs in ["1", "8"] {
        let csv = dir.join(format!("out-{jobs}.csv"));
        let json = dir.join(format!("out-{jobs}.json"));
        let output = momreg()
            .args([
                "tail",
                "--scenario",
                scenario.to_str().unwrap(),
                "--jobs",
                jobs,
                "--out-csv",
                csv.to_str().unwrap(),
                "--out-json",
                json.to_str().unwrap(),
            ])
            .output()
            .unwrap();
        assert!(output.status.success(), "{output:?}");
        artifacts.push((
            stdout_of(&output),
            fs::read_to_string(&csv).unwrap(),
            fs::read_to_string(&json).unwrap(),
        ));
    }
    assert_eq!(artifacts[0].0, artifacts[1].0, "stdout differs across jobs");
    assert_eq!(artifacts[0].1, artifacts[1].1, "CSV differs across jobs");
    assert_eq!(artifacts[0].2, artifacts[1].2, "JSON differs across jobs");
    println!(
        "[PASS] criterion 12 determinism: stdout, CSV, and JSON byte-identical at --jobs 1 and --jobs 8"
    );
}

#[test]
fn predict_nearest_neighbor_on_two_points() {
    let dir = work_dir("predict-two");
    let data = dir.join("two.csv");
    fs::write(&data, "x1,y\n0.1,10.0\n0.9,20.0\n").unwrap();
    // A query whose decimal expansion exercises the 17-digit float format.
    let query = 1.0f64 / 3.0;
    let output = momreg()
        .args([
            "predict",
            "--data",
            data.to_str().unwrap(),
            "--query",
            &format!("{query:.17}"),
            "--estimator",
            "knn",
            "--k",
            "1",
            "--m",
            "1",
            "--seed",
            "1",
        ])
        .output()
        .unwrap();
    assert!(output.status.success());
    let stdout = stdout_of(&output);
    let mut lines = stdout.lines();
    assert_eq!(lines.next().unwrap(), "x1,prediction,m");
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    // Emitted floats parse back to the exact f64 values.
    assert_eq!(row[0].parse::<f64>().unwrap(), query);
    assert_eq!(row[1].parse::<f64>().unwrap(), 10.0);
    assert_eq!(row[2], "1");
}

#[test]
fn predict_auto_reports_derived_block_count() {
    let dir = work_dir("predict-auto");
    let data = dir.join("linear.csv");
    // Large enough that delta = 0.05 sits inside the admissible interval
    // [e^{-cn+1}, 1) for this model.
    write_linear_dataset(&data, 200);
    let output = momreg()
        .args([
            "predict",
            "--data",
            data.to_str().unwrap(),
            "--query",
            "0.5",
            "--estimator",
            "knn",
            "--auto",
            "--sigma",
            "0.5",
            "--rho",
            "1.0",
            "--delta",
            "0.05",
            "--seed",
            "3",
        ])
        .output()
        .unwrap();
    assert!(output.status.success(), "{output:?}");
    let stdout = stdout_of(&output);
    let mut lines = stdout.lines();
    assert_eq!(lines.next().unwrap(), "x1,prediction,m,radius");
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    // ceil(ln(1/0.05)) = 3 blocks.
    assert_eq!(row[2], "3");
    // The prediction comes back through the dataset float format losslessly.
    let prediction: f64 = row[1].parse().unwrap();
    assert!((prediction - 0.5).abs() < 0.2);
    let radius: f64 = row[3].parse().unwrap();
    assert!(radius > 0.0);
}

#[test]
fn predict_auto_without_sigma_is_a_usage_error() {
    let dir = work_dir("predict-usage");
    let data = dir.join("linear.csv");
    write_linear_dataset(&data, 100);
    let output = momreg()
        .args([
            "predict",
            "--data",
            data.to_str().unwrap(),
            "--query",
            "0.5",
            "--estimator",
            "knn",
            "--auto",
            "--delta",
            "0.05",
            "--seed",
            "3",
        ])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(2));
}

#[test]
fn predict_infeasible_selection_is_a_configuration_error() {
    let dir = work_dir("predict-config");
    let data = dir.join("linear.csv");
    write_linear_dataset(&data, 30);
    // sigma*rho*n too small for any feasible neighbor count.
    let output = momreg()
        .args([
            "predict",
            "--data",
            data.to_str().unwrap(),
            "--query",
            "0.5",
            "--estimator",
            "knn",
            "--auto",
            "--sigma",
            "0.1",
            "--rho",
            "1.0",
            "--delta",
            "0.05",
            "--seed",
            "3",
        ])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(3), "{output:?}");
}

#[test]
fn predict_malformed_csv_reports_line() {
    let dir = work_dir("predict-malformed");
    let data = dir.join("bad.csv");
    fs::write(&data, "x1,y\n0.5,1.0\noops,2.0\n").unwrap();
    let output = momreg()
        .args([
            "predict",
            "--data",
            data.to_str().unwrap(),
            "--query",
            "0.0",
            "--estimator",
            "knn",
            "--k",
            "1",
            "--m",
            "1",
            "--seed",
            "1",
        ])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(
        stderr.contains(":3:"),
        "stderr should name line 3: {stderr}"
    );
}

#[test]
fn predict_runs_every_estimator_family() {
    let dir = work_dir("predict-families");
    let data = dir.join("linear.csv");
    write_linear_dataset(&data, 60);
    let cases: &[&[&str]] = &[
        &["--estimator", "knn", "--k", "3"],
        &["--estimator", "bagged", "--k", "5"],
        &["--estimator", "bagged", "--k", "5", "--without-replacement"],
        &["--estimator", "mnn", "--k", "3"],
        &["--estimator", "kernel", "--bandwidth", "0.25"],
        &["--estimator", "partition", "--cells", "4"],
    ];
    for extra in cases {
        let output = momreg()
            .args([
                "predict",
                "--data",
                data.to_str().unwrap(),
                "--query",
                "0.5",
                "--m",
                "2",
                "--seed",
                "1",
            ])
            .args(*extra)
            .output()
            .unwrap();
        assert!(output.status.success(), "{extra:?}: {output:?}");
        let stdout = stdout_of(&output);
        let row: Vec<&str> = stdout.lines().nth(1).unwrap().split(',').collect();
        let prediction: f64 = row[1].parse().unwrap();
        assert!(
            (prediction - 0.5).abs() < 0.3,
            "{extra:?} gave {prediction}"
        );
    }
}

#[test]
fn adaptive_reports_m_hat() {
    let dir = work_dir("adaptive");
    let data = dir.join("linear.csv");
    write_linear_dataset(&data, 100);
    let output = momreg()
        .args([
            "adaptive",
            "--data",
            data.to_str().unwrap(),
            "--query",
            "0.5",
            "--estimator",
            "knn",
            "--sigma",
            "0.5",
            "--rho",
            "1.0",
            "--seed",
            "5",
        ])
        .output()
        .unwrap();
    assert!(output.status.success(), "{output:?}");
    let stdout = stdout_of(&output);
    let mut lines = stdout.lines();
    assert_eq!(lines.next().unwrap(), "x1,estimate,m_hat,skipped_m");
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    let m_hat: usize = row[2].parse().unwrap();
    assert!(m_hat >= 1);
}

#[test]
fn oracles_pass_and_exit_zero() {
    let output = momreg().args(["oracles"]).output().unwrap();
    assert!(output.status.success());
    let stdout = stdout_of(&output);
    assert_eq!(stdout.lines().count(), 5);
    assert!(stdout.lines().all(|l| l.starts_with("PASS")));
}

#[test]
fn tail_assert_fails_on_uncertifiable_threshold() {
    let dir = work_dir("tail-assert");
    let scenario = dir.join("scenario.scn");
    fs::write(&scenario, SCENARIO).unwrap();
    let output = momreg()
        .args([
            "tail",
            "--scenario",
            scenario.to_str().unwrap(),
            "--threshold",
            "0.0001",
            "--assert",
        ])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(4));
}

#[test]
fn tail_warns_when_underpowered() {
    let dir = work_dir("tail-underpowered");
    let scenario = dir.join("scenario.scn");
    fs::write(
        &scenario,
        SCENARIO
            .replace("delta = 0.049787068367863944", "delta = 0.00001")
            .replace("m = auto", "m = 3"),
    )
    .unwrap();
    let output = momreg()
        .args(["tail", "--scenario", scenario.to_str().unwrap()])
        .output()
        .unwrap();
    assert!(output.status.success(), "{output:?}");
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(
        stderr.contains("warning"),
        "expected a power warning: {stderr}"
    );
}

#[test]
fn lower_bound_small_run_exhibits_gap() {
    let output = momreg()
        .args([
            "lower-bound",
            "--d",
            "1",
            "--sigma",
            "1.0",
            "--n",
            "64",
            "--delta",
            "0.015625",
            "--trials",
            "500",
            "--search-trials",
            "200",
            "--seed",
            "9",
        ])
        .output()
        .unwrap();
    assert!(output.status.success(), "{output:?}");
    let stdout = stdout_of(&output);
    assert!(stdout.contains("exhibits_lower_bound=true"), "{stdout}");
}

#[test]
fn lower_bound_rejects_out_of_range_delta() {
    let output = momreg()
        .args([
            "lower-bound",
            "--d",
            "1",
            "--sigma",
            "1.0",
            "--n",
            "64",
            "--delta",
            "0.2",
            "--trials",
            "100",
            "--seed",
            "9",
        ])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(2));
}

#[test]
fn contaminate_demo_certifies_robust_radius() {
    let output = momreg()
        .args([
            "contaminate-demo",
            "--n",
            "2048",
            "--trials",
            "300",
            "--seed",
            "13",
            "--assert",
        ])
        .output()
        .unwrap();
    assert!(output.status.success(), "{output:?}");
    let stdout = stdout_of(&output);
    assert!(stdout.contains("m>=4|O|: true"), "{stdout}");
    assert!(stdout.contains("certified=true"), "{stdout}");
}
