use std::fs;
use std::path::Path;
use std::process::Command;

fn eplab(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_eplab")).args(args).output().unwrap();
    (out.status.code().unwrap(), String::from_utf8_lossy(&out.stdout).into_owned())
}

fn write_config(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

const SMALL_RUN: &str = "\
grid.dims = 8
grid.box_length = 16.0
data.delta = 0.0
data.width = 1.5
solver.dt = 0.1
solver.t_end = 0.5
record.every = 0.1
record.norms = [\"rho_linf\", \"alpha_hn\", \"beta_hn\"]
";

#[test]
fn simulate_zero_data_gives_zero_series() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "base.toml", SMALL_RUN);
    let out = dir.path().join("out");
    let (code, _) = eplab(&["simulate", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert_eq!(code, 0);
    let csv = fs::read_to_string(out.join("simulate.csv")).unwrap();
    let mut lines = csv.lines();
    let header = lines.next().unwrap();
    assert!(header.starts_with("# subcommand=simulate config_hash="), "{header}");
    assert!(header.ends_with(" seed=7"));
    assert_eq!(lines.next(), Some("time,name,value"));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 6 * 3);
    assert!(rows.iter().all(|r| r.ends_with(",0")), "{rows:?}");
}

#[test]
fn phasebound_exit_code_follows_threshold() {
    let dir = tempfile::tempdir().unwrap();
    let lattice = "phase.min_exp = -2\nphase.max_exp = 4\nphase.angles = 17\n";
    let ok = write_config(dir.path(), "ok.toml", lattice);
    let strict = write_config(dir.path(), "strict.toml", &format!("{lattice}phase.threshold = 10.0\n"));
    let out = dir.path().join("o");
    let (code, stdout) = eplab(&["phasebound", "--config", &ok, "--out", out.to_str().unwrap()]);
    assert_eq!(code, 0, "{stdout}");
    assert_eq!(stdout.lines().filter(|l| l.starts_with("PASS")).count(), 4);
    let csv = fs::read_to_string(out.join("phasebound.csv")).unwrap();
    assert_eq!(csv.lines().count(), 2 + 4);
    let (code, _) = eplab(&["phasebound", "--config", &strict, "--out", out.to_str().unwrap()]);
    assert_eq!(code, 2);
}

#[test]
fn invalid_config_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write_config(dir.path(), "bad.toml", &format!("{SMALL_RUN}data.delta = 0.5\n").replace("data.delta = 0.0\n", ""));
    let out = Command::new(env!("CARGO_BIN_EXE_eplab"))
        .args(["simulate", "--config", &bad, "--out", dir.path().join("o").to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("data.delta"));
    let typo = write_config(dir.path(), "typo.toml", "grid.dimz = 8\n");
    assert_eq!(eplab(&["simulate", "--config", &typo]).0, 1);
    assert_eq!(eplab(&["simulate"]).0, 1);
    assert_eq!(eplab(&["frobnicate"]).0, 1);
}

#[test]
fn seeded_output_is_reproducible_and_traceable() {
    let dir = tempfile::tempdir().unwrap();
    let text = "\
holder.dims = 8
holder.trials = 2
holder.shells = [1.0, 2.0]
holder.exponents = [[4.0, 4.0, 2.0]]
holder.kinds = [\"mp\"]
holder.eps = [\"++\", \"-+\"]
holder.reduction_trials = 2
";
    let cfg = write_config(dir.path(), "h.toml", text);
    let run = |seed: &str, sub: &str| {
        let out = dir.path().join(sub);
        let (code, _) = eplab(&["holder", "--config", &cfg, "--seed", seed, "--out", out.to_str().unwrap()]);
        assert_eq!(code, 0);
        fs::read(out.join("holder.csv")).unwrap()
    };
    let a = run("11", "a");
    let b = run("11", "b");
    let c = run("12", "c");
    assert_eq!(a, b);
    assert_ne!(a, c);
    let head = String::from_utf8(a).unwrap();
    assert!(head.lines().next().unwrap().ends_with("seed=11"));
}

#[test]
fn report_aggregates_summaries() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("all");
    let o = out.to_str().unwrap();
    let run = write_config(dir.path(), "run.toml", SMALL_RUN);
    let strict = write_config(
        dir.path(),
        "p.toml",
        "phase.min_exp = 0\nphase.max_exp = 1\nphase.angles = 5\nphase.threshold = 10.0\n",
    );
    assert_eq!(eplab(&["simulate", "--config", &run, "--out", o]).0, 0);
    assert_eq!(eplab(&["phasebound", "--config", &strict, "--out", o]).0, 2);
    let (code, stdout) = eplab(&["report", "--dir", o]);
    assert_eq!(code, 2);
    assert!(stdout.contains("simulate") && stdout.contains("phasebound"));
    assert!(stdout.trim_end().ends_with("overall: FAIL"));
    assert!(out.join("report.txt").exists());
    assert_eq!(eplab(&["report", "--dir", dir.path().to_str().unwrap()]).0, 1);
}
