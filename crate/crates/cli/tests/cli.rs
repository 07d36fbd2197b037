use std::fs;
use std::process::Command;

fn relaylab(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_relaylab")).args(args).output().unwrap()
}

#[test]
fn analytic_prints_terms_that_sum() {
    let out = relaylab(&["analytic"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let value = |name: &str| -> f64 {
        let line = text.lines().find(|l| l.starts_with(&format!("{name},"))).unwrap();
        line.split(',').nth(1).unwrap().parse().unwrap()
    };
    let sum = value("active") + value("passive_rescue") + value("passive_only");
    assert!((sum - value("total")).abs() < 1e-7);
    assert!((value("total") - 0.8745).abs() < 0.01);
}

#[test]
fn simulate_reports_standard_errors() {
    let out = relaylab(&["simulate", "--slots", "400", "--seed", "3"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("estimator,estimate,std_error,slots\n"));
    assert_eq!(text.lines().count(), 7);
    assert!(text.contains("\noptimal,"));
}

#[test]
fn fig4_writes_csv_and_svg() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("race.toml");
    fs::write(&cfg, "[run]\nhorizon = 300\nreplications = 2\n").unwrap();
    let out_dir = dir.path().join("out");
    let out = relaylab(&[
        "fig4",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out_dir.to_str().unwrap(),
        "--seed",
        "11",
        "--canonical-discount",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(out_dir.join("fig4_seed11.csv").is_file());
    assert!(out_dir.join("fig4_seed11.svg").is_file());
}

#[test]
fn exit_codes() {
    assert_eq!(relaylab(&["fig2", "--gamma", "1.5"]).status.code(), Some(2));
    assert_eq!(relaylab(&["analytic", "--config", "/nonexistent/relaylab.toml"]).status.code(), Some(4));

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.toml");
    fs::write(&bad, "[params]\nunknown_key = 1\n").unwrap();
    let out = relaylab(&["simulate", "--config", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown_key"));

    // the output directory path is an existing file
    let file = dir.path().join("taken");
    fs::write(&file, "").unwrap();
    let small = dir.path().join("small.toml");
    fs::write(&small, "[sweep]\ngrid = [1e-3]\n\n[run]\nslots = 50\nreplications = 1\nhorizon = 50\n").unwrap();
    let out = relaylab(&["fig2", "--config", small.to_str().unwrap(), "--out", file.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(4));

    let strict = dir.path().join("strict.toml");
    fs::write(&strict, "[analytic]\nmax_subdivisions = 1\nrel_tol = 1e-15\nabs_tol = 1e-300\n").unwrap();
    assert_eq!(relaylab(&["analytic", "--config", strict.to_str().unwrap()]).status.code(), Some(3));
}
