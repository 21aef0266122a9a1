use std::path::Path;
use std::process::{Command, Output};

fn gaussify(args: &[&str], out_dir: Option<&Path>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_gaussify"));
    cmd.args(args).env_remove("GAUSSIFY_OUT_DIR");
    if let Some(dir) = out_dir {
        cmd.env("GAUSSIFY_OUT_DIR", dir);
    }
    cmd.output().expect("binary runs")
}

#[test]
fn list_names_every_experiment() {
    let out = gaussify(&["list"], None);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    for id in ["cm-ratio", "ktot", "memory-entanglement", "depth-sweep", "hd-sweep", "purify", "window-sweep"] {
        assert!(text.contains(id), "{id} missing");
    }
}

#[test]
fn reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("sweep.toml");
    std::fs::write(&config, "r = 0.9\n[memory-entanglement]\nr = 0.5\nn_bar = [0.0, 1.0]\nsteps = [1, 10]\n").unwrap();
    let run = |name: &str| {
        let out = dir.path().join(name);
        let status = gaussify(
            &["run", "memory-entanglement", "--config", config.to_str().unwrap(), "--seed", "11", "--out", out.to_str().unwrap(), "--json"],
            None,
        );
        assert!(status.status.success(), "{}", String::from_utf8_lossy(&status.stderr));
        (std::fs::read(&out).unwrap(), std::fs::read(format!("{}.json", out.display())).unwrap())
    };
    let (a, aj) = run("a.csv");
    let (b, bj) = run("b.csv");
    assert_eq!(a, b);
    assert_eq!(aj, bj);
    let text = String::from_utf8(a).unwrap();
    assert!(text.contains("# seed: 11"));
    assert!(text.contains("#   r = [0.5]"));
    let header = text.lines().find(|l| !l.starts_with('#')).unwrap();
    assert_eq!(header, "r,n_bar,c0,M,mu,mu_closed_form,log_negativity,status");
    let m10 = text.lines().find(|l| l.starts_with("5.00000000000e-1,0.00000000000e0,1.00000000000e0,10,")).unwrap();
    let en: f64 = m10.split(',').nth(6).unwrap().parse().unwrap();
    assert!((en - 1.23329).abs() < 1e-4);
}

#[test]
fn output_directory_comes_from_the_environment() {
    let dir = tempfile::tempdir().unwrap();
    let out = gaussify(&["run", "cm-ratio", "--set", "steps=[1, 2, 3]"], Some(dir.path()));
    assert!(out.status.success());
    let csv = std::fs::read_to_string(dir.path().join("cm-ratio.csv")).unwrap();
    assert_eq!(csv.lines().filter(|l| !l.starts_with('#')).count(), 4);
}

#[test]
fn invalid_specs_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        vec!["run", "ktot", "--set", "colour=1"],
        vec!["run", "no-such-experiment"],
        vec!["run", "hd-sweep", "--set", "eta_hd=1.5"],
        vec!["run", "ktot", "--config", "/nonexistent/config.toml"],
    ] {
        let out = gaussify(&args, Some(dir.path()));
        assert_eq!(out.status.code(), Some(2), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    }
}

#[test]
fn infeasible_rows_exit_with_three() {
    let dir = tempfile::tempdir().unwrap();
    let out = gaussify(&["run", "depth-sweep", "--set", "depth=[0.5, 50.0]", "--set", "steps=[1, 2]"], Some(dir.path()));
    assert_eq!(out.status.code(), Some(3));
    let csv = std::fs::read_to_string(dir.path().join("depth-sweep.csv")).unwrap();
    assert!(csv.lines().any(|l| l.ends_with(",infeasible")));
    assert!(csv.lines().any(|l| l.ends_with(",ok")));
}
