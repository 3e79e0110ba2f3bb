use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use supershift_cli::validate::{run_suites, Fault};

fn supershift(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_supershift")).args(args).output().expect("binary runs")
}

fn read_rows(path: &Path) -> Vec<Vec<String>> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(String::from).collect())
        .collect()
}

fn cell(s: &str) -> f64 {
    s.parse().unwrap()
}

#[test]
fn usage_errors_exit_2() {
    let out = supershift(&["field", "--kind", "d", "--constant", "1", "--grid", "0:1:2,0:1:2", "--out", "x.csv"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("--t"));

    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    fs::write(&cfg, "kind = neumann\nspeed = 3\n").unwrap();
    let out = supershift(&["coeffs", "--config", cfg.to_str().unwrap(), "--t", "1", "--x", "1,1"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(supershift(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn neumann_constant_is_preserved() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("f.csv");
    let pgm = dir.path().join("f.pgm");
    let out = supershift(&[
        "field", "--kind", "neumann", "--t", "0.8", "--constant", "1", "--grid", "-2:2:5,-2:2:5",
        "--out", csv.to_str().unwrap(), "--pgm", pgm.to_str().unwrap(), "--component", "re",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = fs::read_to_string(&csv).unwrap();
    assert!(text.starts_with("x1,x2,re,im,abs\n"));
    assert!(text.contains("\n0,-1,,,\n"));
    let rows = read_rows(&csv);
    assert_eq!(rows.len(), 25);
    let mut barrier = 0;
    for r in &rows {
        if r[2].is_empty() {
            barrier += 1;
            assert_eq!(cell(&r[0]), 0.0);
            assert!(cell(&r[1]) <= 0.0);
            continue;
        }
        assert!((cell(&r[2]) - 1.0).abs() <= 1e-5 && cell(&r[3]).abs() <= 1e-5, "{r:?}");
    }
    assert_eq!(barrier, 3);

    let img = fs::read(&pgm).unwrap();
    let header = b"P5\n5 5\n65535\n";
    assert_eq!(&img[..header.len()], header);
    let px: Vec<u16> = img[header.len()..].chunks(2).map(|c| u16::from_be_bytes([c[0], c[1]])).collect();
    assert_eq!(px.len(), 25);
    for (r, p) in rows.iter().zip(&px) {
        assert_eq!(*p, if r[2].is_empty() { 0 } else { 65535 });
    }
}

#[test]
fn csv_values_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("f.csv");
    let out = supershift(&[
        "field", "--kind", "d", "--t", "1", "--plane-wave", "0.3,-0.7", "--grid", "0.5:1.5:2,0.5:1.5:2",
        "--out", csv.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    for r in read_rows(&csv) {
        let (re, im, abs) = (cell(&r[2]), cell(&r[3]), cell(&r[4]));
        assert_eq!(re.hypot(im), abs);
        assert_eq!(format!("{re:?}").parse::<f64>().unwrap(), re);
    }
}

#[test]
fn dirichlet_field_vanishes_towards_barrier() {
    let dir = tempfile::tempdir().unwrap();
    let mut last = f64::INFINITY;
    for delta in ["0.1", "0.01", "0.001"] {
        let csv = dir.path().join(format!("d{delta}.csv"));
        let grid = format!("-{delta}:{delta}:3,-1.5:-0.5:3");
        let out = supershift(&[
            "field", "--kind", "dirichlet", "--t", "1", "--plane-wave", "0.5,0.5", "--grid", &grid,
            "--out", csv.to_str().unwrap(),
        ]);
        assert!(out.status.success());
        let rows = read_rows(&csv);
        let near = rows.iter().filter(|r| !r[4].is_empty()).map(|r| cell(&r[4])).fold(0.0, f64::max);
        assert!(rows.iter().filter(|r| r[4].is_empty()).count() == 3);
        assert!(near < last, "delta {delta}: {near} vs {last}");
        last = near;
    }
    assert!(last < 1e-2);
}

#[test]
fn operator_and_quadrature_agree_on_grid() {
    let dir = tempfile::tempdir().unwrap();
    let mut values = Vec::new();
    for method in ["quadrature", "operator"] {
        let csv = dir.path().join(format!("{method}.csv"));
        let out = supershift(&[
            "field", "--kind", "n", "--t", "1", "--plane-wave", "0.5,0.5", "--grid", "-1:1:5,-1:1:5",
            "--method", method, "--out", csv.to_str().unwrap(),
        ]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        values.push(read_rows(&csv));
    }
    for (q, o) in values[0].iter().zip(&values[1]) {
        assert_eq!(q[..2], o[..2]);
        if q[2].is_empty() {
            assert!(o[2].is_empty());
            continue;
        }
        let d = (cell(&q[2]) - cell(&o[2])).hypot(cell(&q[3]) - cell(&o[3]));
        assert!(d <= 1e-5, "{q:?} vs {o:?}");
    }
}

#[test]
fn field_is_thread_count_independent() {
    let dir = tempfile::tempdir().unwrap();
    let mut outputs = Vec::new();
    for threads in ["1", "8"] {
        let csv = dir.path().join(format!("t{threads}.csv"));
        let pgm = dir.path().join(format!("t{threads}.pgm"));
        let out = supershift(&[
            "field", "--kind", "d", "--t", "0.7", "--plane-wave", "0.8,-0.2", "--grid", "-1:1:4,-1:1:4",
            "--threads", threads, "--out", csv.to_str().unwrap(), "--pgm", pgm.to_str().unwrap(),
        ]);
        assert!(out.status.success());
        outputs.push((fs::read(csv).unwrap(), fs::read(pgm).unwrap()));
    }
    assert_eq!(outputs[0], outputs[1]);
}

#[test]
fn failed_run_leaves_no_output() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("f.csv");
    let out = supershift(&[
        "field", "--kind", "d", "--t", "1", "--plane-wave", "1,1", "--grid", "0.5:1:2,0.5:1:2",
        "--n-rho", "8", "--n-theta", "8", "--out", csv.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 0);

    // the csv is complete before the heatmap fails to open
    let pgm = dir.path().join("missing").join("f.pgm");
    let out = supershift(&[
        "field", "--kind", "n", "--t", "1", "--constant", "1", "--grid", "0.5:1:2,0.5:1:2",
        "--out", csv.to_str().unwrap(), "--pgm", pgm.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 0);
}

#[test]
fn supershift_table() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("s.csv");
    let out = supershift(&["supershift", "--kind", "neumann", "--t", "1", "--out", csv.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = fs::read_to_string(&csv).unwrap();
    assert!(text.starts_with("n,re_psi,im_psi,re_target,im_target,error,a1_dist,bound\n"));
    let rows = read_rows(&csv);
    assert_eq!(rows.iter().map(|r| r[0].as_str()).collect::<Vec<_>>(), ["4", "8", "12", "16"]);
    for r in &rows {
        assert!(cell(&r[7]) >= cell(&r[5]));
    }

    let out = supershift(&["supershift", "--kind", "d", "--t", "1", "--n-list", "8,40"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("digits"));
}

#[test]
fn coeffs_and_greens_print_csv() {
    let out = supershift(&["coeffs", "--kind", "n", "--t", "1", "--x", "0.5,0.8", "--order", "2"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "n1,n2,re,im,abs,bound");
    assert_eq!(lines.len(), 1 + 6);
    let c00: Vec<f64> = lines[1].split(',').map(cell).collect();
    assert!((c00[2] - 1.0).abs() < 1e-5);

    let out = supershift(&["greens", "--kind", "d", "--t", "1", "--x", "1,1", "--y", "-0.5,2"]);
    assert!(out.status.success());
    assert!(String::from_utf8(out.stdout).unwrap().starts_with("x1,x2,y1,y2,re,im,abs\n1,1,-0.5,2,"));
    let out = supershift(&["greens", "--kind", "d", "--t", "1", "--x", "0,-1", "--y", "1,1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn validate_detects_injected_fault() {
    let clean = run_suites(None);
    assert!(clean.iter().all(|r| r.passed), "{clean:?}");
    let faulty = run_suites(Some(Fault::GreensSignFlip));
    let failed: Vec<&str> = faulty.iter().filter(|r| !r.passed).map(|r| r.name).collect();
    assert!(failed.contains(&"dirichlet-barrier"), "{failed:?}");
    assert!(failed.contains(&"neumann-barrier"), "{failed:?}");
}

#[test]
fn validate_command_exits_zero() {
    let out = supershift(&["validate"]);
    assert_eq!(out.status.code(), Some(0));
    let report = String::from_utf8(out.stdout).unwrap();
    assert!(report.lines().count() >= 19);
    assert!(!report.contains("FAIL"));
    assert!(report.contains("max_resid"));
}
