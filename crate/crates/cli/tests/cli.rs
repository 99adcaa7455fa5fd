use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qclone"))
        .args(args)
        .output()
        .expect("spawn qclone")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn csv_rows(o: &Output) -> Vec<csv::StringRecord> {
    let text = stdout(o);
    let mut r = csv::Reader::from_reader(text.as_bytes());
    r.records().map(|x| x.unwrap()).collect()
}

fn csv_header(o: &Output) -> Vec<String> {
    let text = stdout(o);
    let mut r = csv::Reader::from_reader(text.as_bytes());
    r.headers().unwrap().iter().map(String::from).collect()
}

fn num(s: &str) -> f64 {
    s.parse().unwrap()
}

#[test]
fn verify_three_copies() {
    let o = run(&["verify", "--m", "3", "--trials", "50"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let text = stdout(&o);
    assert!(text.contains("f_measured = 0.833333333333 f_predicted = 0.833333333333"));
    assert!(!text.contains("FAIL"));
}

#[test]
fn verify_two_copies() {
    let o = run(&["verify", "--m", "2", "--trials", "10"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("f_measured = 1.000000000000"));
}

#[test]
fn verify_unattainable_tolerance_fails() {
    let o = run(&["verify", "--m", "5", "--trials", "5", "--tol", "1e-30"]);
    assert_eq!(o.status.code(), Some(1));
    let text = stdout(&o);
    assert!(text.contains("isometry") && text.contains("FAIL"));
    assert!(String::from_utf8_lossy(&o.stderr).contains("failed checks"));
}

#[test]
fn verify_above_cap_runs_analytic_only() {
    let o = run(&[
        "--max-dense-qubits",
        "4",
        "verify",
        "--m",
        "6",
        "--trials",
        "5",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("analytic-path checks only"));
    assert!(!text.contains("isometry "));
}

#[test]
fn verify_usage_errors() {
    assert_eq!(run(&["verify", "--m", "1"]).status.code(), Some(2));
    assert_eq!(run(&["verify"]).status.code(), Some(2));
    assert_eq!(
        run(&["verify", "--m", "3", "--trials", "0"]).status.code(),
        Some(2)
    );
}

#[test]
fn sweep_matches_prediction() {
    let o = run(&[
        "sweep", "--m-min", "2", "--m-max", "6", "--trials", "4", "--seed", "3",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(
        csv_header(&o),
        [
            "M",
            "seed",
            "f_measured",
            "f_predicted",
            "residual",
            "oracle_gap",
            "wall_time_ms"
        ]
    );
    let rows = csv_rows(&o);
    assert_eq!(rows.len(), 20);
    let ms: Vec<usize> = rows.iter().map(|r| r[0].parse().unwrap()).collect();
    let mut sorted = ms.clone();
    sorted.sort();
    assert_eq!(ms, sorted);
    for r in &rows {
        let m = num(&r[0]);
        assert!((num(&r[2]) - (m + 2.0) / (2.0 * m)).abs() < 1e-9);
        assert!((num(&r[3]) - (m + 2.0) / (2.0 * m)).abs() < 1e-15);
        assert!(num(&r[4]) >= 0.0 && num(&r[4]) < 1e-10);
        assert!(num(&r[5]) >= 0.0 && num(&r[5]) < 1e-12);
    }
}

#[test]
fn sweep_identity_range() {
    let o = run(&["sweep", "--m-min", "2", "--m-max", "2", "--trials", "5"]);
    for r in csv_rows(&o) {
        assert!((num(&r[2]) - 1.0).abs() < 1e-12);
        assert!(num(&r[4]) < 1e-12);
    }
}

#[test]
fn sweep_seed_changes_states_not_factor() {
    let a = csv_rows(&run(&[
        "sweep", "--m-min", "3", "--m-max", "5", "--trials", "3", "--seed", "1",
    ]));
    let b = csv_rows(&run(&[
        "sweep", "--m-min", "3", "--m-max", "5", "--trials", "3", "--seed", "2",
    ]));
    assert_eq!(a.len(), b.len());
    for (ra, rb) in a.iter().zip(&b) {
        assert_ne!(&ra[1], &rb[1]);
        assert!((num(&ra[2]) - num(&rb[2])).abs() < 1e-9);
    }
}

#[test]
fn sweep_above_cap_has_no_oracle_gap() {
    let o = run(&[
        "--max-dense-qubits",
        "3",
        "sweep",
        "--m-min",
        "3",
        "--m-max",
        "4",
        "--trials",
        "1",
        "--format",
        "json",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let rows = v.as_array().unwrap();
    assert!(rows[0]["oracle_gap"].is_f64());
    assert!(rows[1]["oracle_gap"].is_null());
    assert!((rows[1]["f_measured"].as_f64().unwrap() - 0.75).abs() < 1e-12);
}

#[test]
fn sweep_invalid_range() {
    assert_eq!(
        run(&["sweep", "--m-min", "5", "--m-max", "3"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        run(&["sweep", "--m-min", "1", "--m-max", "3"])
            .status
            .code(),
        Some(2)
    );
}

fn clone_json(args: &[&str]) -> serde_json::Value {
    let mut full = vec!["clone", "--format", "json"];
    full.extend_from_slice(args);
    let o = run(&full);
    assert_eq!(o.status.code(), Some(0));
    serde_json::from_str(&stdout(&o)).unwrap()
}

#[test]
fn clone_examples() {
    let v = clone_json(&["--bloch", "0", "0", "1", "--m", "3"]);
    assert!((v["m00_re"].as_f64().unwrap() - 11.0 / 12.0).abs() < 1e-12);
    assert!((v["m11_re"].as_f64().unwrap() - 1.0 / 12.0).abs() < 1e-12);
    assert!((v["f"].as_f64().unwrap() - 5.0 / 6.0).abs() < 1e-12);

    let v = clone_json(&["--bloch", "0", "0", "0", "--m", "7"]);
    assert!((v["m00_re"].as_f64().unwrap() - 0.5).abs() < 1e-12);
    assert!((v["m11_re"].as_f64().unwrap() - 0.5).abs() < 1e-12);
    assert!(v["f"].is_null());

    let v = clone_json(&["--bloch", "0", "0", "0.5", "--m", "4"]);
    assert!((v["m00_re"].as_f64().unwrap() - 11.0 / 16.0).abs() < 1e-12);
    assert!((v["m11_re"].as_f64().unwrap() - 5.0 / 16.0).abs() < 1e-12);
    assert!((v["f_predicted"].as_f64().unwrap() - 0.75).abs() < 1e-15);
}

#[test]
fn clone_large_m_uses_analytic_path() {
    let v = clone_json(&["--bloch", "0.1", "-0.2", "0.3", "--m", "1000000"]);
    assert_eq!(v["path"], "analytic");
    assert!((v["f"].as_f64().unwrap() - 0.5 - 1e-6).abs() < 1e-12);
    // negative x/y components reach the off-diagonal entry
    assert!((v["m01_re"].as_f64().unwrap() - 0.05 * 0.500001).abs() < 1e-12);
    assert!((v["m01_im"].as_f64().unwrap() - 0.1 * 0.500001).abs() < 1e-12);
}

#[test]
fn clone_rejects_outside_ball() {
    let o = run(&["clone", "--bloch", "1", "1", "0", "--m", "3"]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(
        run(&["clone", "--bloch", "0", "0", "--m", "3"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        run(&["baseline", "--bloch", "0", "0", "-1.5"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn baseline_examples() {
    let rows = csv_rows(&run(&["baseline", "--bloch", "0", "0", "0.5"]));
    assert_eq!(&rows[0][0], "cloner_m2");
    assert!(num(&rows[0][5]) < 1e-13);
    assert_eq!(&rows[1][0], "symmetric_projection");
    assert!((num(&rows[1][5]) - 3.0 / 52.0).abs() < 1e-12);
    assert!((num(&rows[1][6]) - 13.0 / 16.0).abs() < 1e-13);

    let rows = csv_rows(&run(&["baseline", "--bloch", "0", "0", "0"]));
    assert!(num(&rows[0][5]) < 1e-13 && num(&rows[1][5]) < 1e-13);
    assert!((num(&rows[1][6]) - 0.75).abs() < 1e-13);

    let rows = csv_rows(&run(&["baseline", "--bloch", "0.6", "0", "-0.8"]));
    assert!(num(&rows[0][5]) < 1e-12 && num(&rows[1][5]) < 1e-12);
    assert!((num(&rows[1][6]) - 1.0).abs() < 1e-12);
}

#[test]
fn output_is_byte_stable() {
    let cases: [&[&str]; 4] = [
        &["verify", "--m", "4", "--trials", "7", "--seed", "9"],
        &["clone", "--bloch", "0.2", "0.1", "-0.4", "--m", "5"],
        &[
            "baseline", "--bloch", "0.2", "0.1", "-0.4", "--format", "json",
        ],
        &[
            "sweep",
            "--m-min",
            "2",
            "--m-max",
            "5",
            "--trials",
            "6",
            "--seed",
            "4",
            "--no-timing",
        ],
    ];
    for args in cases {
        let a = run(args);
        let b = run(args);
        assert_eq!(a.status.code(), Some(0));
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}
