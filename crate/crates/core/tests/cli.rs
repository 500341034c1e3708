use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn zs(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_zs"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

#[test]
fn spectrum_json_document() {
    let dir = tempfile::tempdir().unwrap();
    let out = zs(&["spectrum", "--n", "120", "--no-meta"], dir.path());
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["schema"], 1);
    assert_eq!(v["method"], "chebyshev");
    assert_eq!(v["params"]["n"], 120);
    assert_eq!(v["all_k"].as_array().unwrap().len(), 240);
    let discrete = v["discrete_k"].as_array().unwrap();
    assert_eq!(discrete.len(), 4);
    let mut imag: Vec<f64> = discrete.iter().map(|k| k[1].as_f64().unwrap()).collect();
    imag.sort_by(f64::total_cmp);
    for (got, want) in imag.iter().zip([-1.3, -0.3, 0.3, 1.3]) {
        assert!((got - want).abs() < 1e-9);
    }
    assert_eq!(v["residuals"].as_array().unwrap().len(), 4);
    assert!(v.get("meta").is_none());
    // data on stdout, summary on stderr
    assert!(String::from_utf8_lossy(&out.stderr).contains("discrete=4"));
}

#[test]
fn output_file_gets_summary_on_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let out = zs(&["spectrum", "--n", "60", "--format", "csv", "-o", "s.csv"], dir.path());
    assert_eq!(code(&out), 0);
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.starts_with("discrete="), "{stdout}");
    let text = std::fs::read_to_string(dir.path().join("s.csv")).unwrap();
    assert!(text.starts_with("kind,re,im,residual\n"));
    assert_eq!(text.lines().filter(|l| l.starts_with("all,")).count(), 120);
}

#[test]
fn runs_without_meta_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    for name in ["a.json", "b.json"] {
        let out = zs(&["spectrum", "--potential", "solitonic", "--n", "80", "--no-meta", "-o", name], dir.path());
        assert_eq!(code(&out), 0);
    }
    let a = std::fs::read(dir.path().join("a.json")).unwrap();
    let b = std::fs::read(dir.path().join("b.json")).unwrap();
    assert_eq!(a, b);
}

#[test]
fn eigenfunction_csv_has_infinite_ends() {
    let dir = tempfile::tempdir().unwrap();
    let out = zs(&["eigenfunction", "--n", "80", "--k", "0,1.3", "--format", "csv"], dir.path());
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "x,re_psi1,im_psi1,re_psi2,im_psi2");
    assert_eq!(lines.len(), 81);
    assert!(lines[1].starts_with("-inf,"));
    assert!(lines[80].starts_with("inf,"));
}

#[test]
fn convergence_and_comparison_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let out = zs(&["convergence", "--path", "0.15:51,0.15:101", "--format", "csv"], dir.path());
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    let rows: Vec<&str> = text.lines().collect();
    assert_eq!(rows[0], "route,a,n,error,status");
    assert_eq!(rows.len(), 3);
    assert!(rows[2].ends_with(",found"));

    let out = zs(&["compare-fcm", "--sizes", "32,64", "--no-meta"], dir.path());
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["rows"].as_array().unwrap().len(), 2);
    assert_eq!(v["rows"][1]["size"], 64);
}

#[test]
fn evolve_writes_frames() {
    let dir = tempfile::tempdir().unwrap();
    let out = zs(
        &["evolve", "--amplitude", "1", "--m", "64", "--t-end", "0.1", "--stride", "10", "-o", "f.bin", "--format", "bin"],
        dir.path(),
    );
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let file = std::fs::File::open(dir.path().join("f.bin")).unwrap();
    let field = zs_core::nls::read_binary(std::io::BufReader::new(file)).unwrap();
    assert_eq!(field.ncols(), 64);
    assert_eq!(field.nrows(), 11);
}

#[test]
fn usage_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("empty.txt"), "# nothing\n").unwrap();
    for args in [
        &["spectrum", "--n", "3"][..],
        &["spectrum", "--potential", "gaussian"],
        &["spectrum", "--a", "-1"],
        &["spectrum", "--potential", "file:empty.txt", "-o", "out.json"],
        &["compare-fcm", "--sizes", "33"],
        &["frobnicate"],
    ] {
        let out = zs(args, dir.path());
        assert_eq!(code(&out), 2, "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    }
    assert!(!dir.path().join("out.json").exists());
}

#[test]
fn numeric_failure_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let out = zs(&["evolve", "--amplitude", "1e200", "--t-end", "0.01", "-o", "f.csv"], dir.path());
    assert_eq!(code(&out), 3);
    assert!(String::from_utf8_lossy(&out.stderr).contains("non-finite"));
    assert!(!dir.path().join("f.csv").exists());
}

#[test]
fn unwritable_output_exits_4() {
    let dir = tempfile::tempdir().unwrap();
    let out = zs(&["spectrum", "--n", "20", "-o", "missing/dir/x.json"], dir.path());
    assert_eq!(code(&out), 4);
    assert!(String::from_utf8_lossy(&out.stderr).contains("missing/dir/x.json"));
}

#[test]
fn tabulated_potential_matches_analytic() {
    let dir = tempfile::tempdir().unwrap();
    let mut table = String::from("# x re im\n");
    for j in 0..=4000 {
        let x = -40.0 + 0.02 * j as f64;
        table.push_str(&format!("{x} {} 0\n", 1.8 / x.cosh()));
    }
    std::fs::write(dir.path().join("sy.txt"), table).unwrap();
    let out = zs(&["spectrum", "--potential", "file:sy.txt", "--a", "0.15", "--n", "120", "--no-meta"], dir.path());
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    let upper: Vec<f64> = v["discrete_k"]
        .as_array()
        .unwrap()
        .iter()
        .map(|k| k[1].as_f64().unwrap())
        .filter(|&im| im > 0.0)
        .collect();
    assert_eq!(upper.len(), 2, "{upper:?}");
    // linear interpolation on h = 0.02 limits accuracy to about h²
    assert!(upper.iter().any(|im| (im - 1.3).abs() < 1e-3));
}
