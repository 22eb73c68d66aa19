use std::path::Path;
use std::process::{Command, Output};

fn gapbound(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gapbound")).args(args).env_remove("GAPBOUND_THREADS").output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

const CHAIN: &str = "\
# six-site chain, attractive site 3
L 6
N0 1
label test chain
V 3 1 1 -1.5 0
T 1 2 1 1 -1 0
T 2 3 1 1 -1 0
T 3 4 1 1 -1 0
T 4 5 1 1 -1 0
T 5 6 1 1 -1 0
";

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn solve_prints_gap_and_writes_files() {
    let dir = tempfile::tempdir().unwrap();
    let model = write(dir.path(), "chain.txt", CHAIN);
    let spectrum = dir.path().join("spectrum.txt");
    let dens = dir.path().join("density.csv");
    let o = gapbound(&["solve", &model, "--spectrum", spectrum.to_str().unwrap(), "--density", dens.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    assert!(text.contains("gap: "));
    assert_eq!(std::fs::read_to_string(spectrum).unwrap().lines().count(), 6);
    let d = std::fs::read_to_string(dens).unwrap();
    assert!(d.starts_with("x,p_x\n"));
    assert_eq!(d.lines().count(), 7);
}

#[test]
fn bounds_report_rows() {
    let dir = tempfile::tempdir().unwrap();
    let model = write(dir.path(), "chain.txt", CHAIN);
    let o = gapbound(&["bounds", &model, "--s", "0.25", "--grid-step", "0.25"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    assert!(text.contains("kind,s,r1,xi,prefactor,C1_or_V0,deltaE0,deltaX"));
    assert!(text.lines().any(|l| l.starts_with("theorem1,2.5000000000000000e-1,")));
    assert!(text.lines().any(|l| l.starts_with("theorem2,2.5000000000000000e-1,")));
}

#[test]
fn validation_errors_exit_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.txt", "L 2\nN0 1\nT 2 1 1 1 1 0\n");
    let o = gapbound(&["solve", &bad]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 3"));

    let model = write(dir.path(), "chain.txt", CHAIN);
    assert_eq!(gapbound(&["bounds", &model, "--s", "1.5"]).status.code(), Some(1));
    assert_eq!(gapbound(&["bounds", &model, "--cv", "0.01"]).status.code(), Some(1));
    assert_eq!(gapbound(&["sweep", "--h0-min", "0.5"]).status.code(), Some(1));
    assert_eq!(gapbound(&["fuzz", "--family", "nope"]).status.code(), Some(1));
    assert_eq!(gapbound(&["solve", "/nonexistent/model"]).status.code(), Some(1));
}

#[test]
fn fuzz_is_reproducible_and_rejects_broken_declarations() {
    let a = gapbound(&["fuzz", "--seed", "7", "--trials", "30", "--family", "envelope", "--max-sites", "20"]);
    let b = gapbound(&["fuzz", "--seed", "7", "--trials", "30", "--family", "envelope", "--max-sites", "20"]);
    assert_eq!(a.status.code(), Some(0), "{}", String::from_utf8_lossy(&a.stderr));
    assert_eq!(a.stdout, b.stdout);
    assert!(stdout(&a).contains("failures: 0"));

    let broken = gapbound(&["fuzz", "--trials", "10", "--hopping-scale", "4"]);
    assert_eq!(broken.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&broken.stderr).contains("declared hopping bound"));
}

#[test]
fn sweep_then_plot() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("sweep.csv");
    let svg = dir.path().join("sweep.svg");
    let o = gapbound(&["sweep", "--L", "80", "--points", "6", "--h0-max", "-0.1", "--out", csv.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(&csv).unwrap();
    assert_eq!(text.lines().next().unwrap(), "h0,E0,E1,gap,deltaX,xi_fit,xi1,xi2,ratio1,ratio2,fit_r_squared");
    assert_eq!(text.lines().count(), 7);

    let o = gapbound(&["plot", csv.to_str().unwrap(), "--out", svg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let image = std::fs::read_to_string(&svg).unwrap();
    assert_eq!(image.matches("<circle").count(), 12);

    let empty = write(dir.path(), "empty.csv", "h0,E0,E1,gap,deltaX,xi_fit,xi1,xi2,ratio1,ratio2,fit_r_squared\n");
    assert_eq!(gapbound(&["plot", &empty, "--out", svg.to_str().unwrap()]).status.code(), Some(1));
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let config = write(dir.path(), "gapbound.toml", "[sweep]\nl = 40\npoints = 3\nh0_max = -0.2\n");
    let o = gapbound(&["sweep", "--config", &config, "--points", "2"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(stdout(&o).lines().count(), 3);

    let bad = write(dir.path(), "bad.toml", "[sweep]\nwidth = 3\n");
    assert_eq!(gapbound(&["sweep", "--config", &bad]).status.code(), Some(1));
}

#[test]
fn thread_cap_is_validated() {
    let ok = Command::new(env!("CARGO_BIN_EXE_gapbound"))
        .args(["fuzz", "--trials", "5"])
        .env("GAPBOUND_THREADS", "1")
        .output()
        .unwrap();
    assert_eq!(ok.status.code(), Some(0));
    let bad = Command::new(env!("CARGO_BIN_EXE_gapbound"))
        .args(["fuzz", "--trials", "5"])
        .env("GAPBOUND_THREADS", "0")
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(1));
}
