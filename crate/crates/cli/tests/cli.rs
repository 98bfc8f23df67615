use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn eit3d(out: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_eit3d"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .unwrap()
}

fn rows(path: &Path) -> Vec<Vec<String>> {
    let mut reader = csv::Reader::from_path(path).unwrap();
    let mut out = vec![reader.headers().unwrap().iter().map(String::from).collect()];
    for rec in reader.records() {
        out.push(rec.unwrap().iter().map(String::from).collect());
    }
    out
}

#[test]
fn phantom_table_and_sidecar() {
    let dir = tempfile::tempdir().unwrap();
    let out = eit3d(dir.path(), &["phantom", "--alpha", "0.3", "--d", "0.9"]);
    assert_eq!(out.status.code(), Some(0));
    let table = rows(&dir.path().join("phantom/phantom.csv"));
    assert_eq!(table[0], ["r", "gamma", "q"]);
    assert_eq!(table[1][0].parse::<f64>().unwrap(), 0.0);
    assert!((table[1][1].parse::<f64>().unwrap() - 1.69).abs() < 1e-12);
    assert_eq!(table.len(), 402);
    let sidecar = fs::read_to_string(dir.path().join("phantom/config.txt")).unwrap();
    for key in ["alpha = 0.3", "d = 0.9", "n = 64", "gmres_tol = 1e-6", "command = phantom"] {
        assert!(sidecar.lines().any(|l| l == key), "missing {key}");
    }
}

#[test]
fn constant_conductivity_eigenvalues() {
    let dir = tempfile::tempdir().unwrap();
    let out = eit3d(dir.path(), &["eigenvalues", "--gamma", "const", "--bandwidth", "12"]);
    assert_eq!(out.status.code(), Some(0));
    let table = rows(&dir.path().join("eigenvalues/eigenvalues.csv"));
    assert_eq!(table[0], ["l", "lambda", "lower_bound", "upper_bound"]);
    assert_eq!(table.len(), 14);
    for (l, row) in table[1..].iter().enumerate() {
        assert_eq!(row[0], l.to_string());
        for v in &row[1..] {
            assert_eq!(v.parse::<f64>().unwrap(), l as f64);
        }
    }
}

#[test]
fn bump_eigenvalues_are_bracketed() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(eit3d(dir.path(), &["eigenvalues", "--bandwidth", "8"]).status.code(), Some(0));
    for row in &rows(&dir.path().join("eigenvalues/eigenvalues.csv"))[1..] {
        let v: Vec<f64> = row[1..].iter().map(|s| s.parse().unwrap()).collect();
        assert!(v[1] <= v[0] && v[0] <= v[2]);
    }
}

#[test]
fn scatter_and_faddeev_columns() {
    let dir = tempfile::tempdir().unwrap();
    let out = eit3d(dir.path(), &["scatter", "--kind", "qhat", "--xi-max", "10"]);
    assert_eq!(out.status.code(), Some(0));
    let table = rows(&dir.path().join("scatter/qhat.csv"));
    assert_eq!(table[0], ["xi_mag", "kind", "re", "im", "diverged", "solver_iterations"]);
    assert_eq!(table.len(), 7);
    assert_eq!(table[1][1], "qhat");
    assert_eq!(table[1][4], "false");

    let out = eit3d(dir.path(), &["faddeev", "--n", "8", "--zeta-mag", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let table = rows(&dir.path().join("faddeev/faddeev.csv"));
    assert_eq!(table[0], ["t", "re", "im"]);
    assert_eq!(table.len(), 9);
    assert_eq!(table[8][0].parse::<f64>().unwrap(), 2.0);
}

#[test]
fn truncation_figure_writes_reconstruction_tables() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(eit3d(dir.path(), &["figure", "fig4"]).status.code(), Some(0));
    for b in ["15", "25", "50"] {
        let table = rows(&dir.path().join(format!("fig4/truncation_{b}.csv")));
        assert_eq!(table[0], ["r", "gamma_true", "gamma_rec", "q_true", "q_rec", "method", "B"]);
        assert_eq!(table[1][6].parse::<f64>().unwrap(), b.parse::<f64>().unwrap());
        let last = table.last().unwrap();
        assert_eq!(last[2].parse::<f64>().unwrap(), 1.0);
    }
    assert!(dir.path().join("fig4/config.txt").exists());
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let unknown = eit3d(dir.path(), &["phantom", "--bogus", "1"]);
    assert_eq!(unknown.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&unknown.stderr).contains("Usage"));
    for args in [
        &["phantom", "--alpha", "-1.5"][..],
        &["phantom", "--d", "1.5"],
        &["scatter", "--n", "48"],
        &["eigenvalues", "--bandwidth", "65"],
        &["phantom", "--threads", "0"],
        &["phantom", "--xi-step", "0"],
        &["figure", "fig9"],
    ] {
        assert_eq!(eit3d(dir.path(), args).status.code(), Some(1), "{args:?}");
    }
    // Every sample beyond the origin needs a larger |zeta|, so no truncation is usable.
    let failure = eit3d(dir.path(), &["reconstruct", "--method", "texp", "--zeta-mag", "0.5"]);
    assert_eq!(failure.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&failure.stderr).contains("truncation"));
}

#[test]
fn help_exits_cleanly() {
    let out = Command::new(env!("CARGO_BIN_EXE_eit3d")).arg("--help").output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout);
    for sub in ["phantom", "eigenvalues", "faddeev", "scatter", "reconstruct", "figure"] {
        assert!(text.contains(sub));
    }
}
