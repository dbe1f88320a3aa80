//! End-to-end runs of the command-line interface.

use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_spikeslab"))
}

fn workdir(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("spikeslab-cli-{}-{name}", std::process::id()));
    let _ = fs::remove_dir_all(&dir);
    fs::create_dir_all(&dir).unwrap();
    dir
}

fn run_ok(cmd: &mut Command) -> Output {
    let out = cmd.output().expect("spawn spikeslab");
    assert!(
        out.status.success(),
        "command failed\nstdout: {}\nstderr: {}",
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

#[test]
fn datagen_enumerate_round_trip() {
    let dir = workdir("enumerate");
    let data = dir.join("data.csv");
    run_ok(bin().args([
        "datagen", "--n", "80", "--p", "4", "--beta", "2,2", "--seed", "5", "--out",
    ])
    .arg(&data));
    assert!(data.exists());

    let table = dir.join("table.csv");
    let out = run_ok(bin()
        .args(["enumerate", "--data"])
        .arg(&data)
        .args(["--phi", "1000", "--gamma0", "1100", "--out"])
        .arg(&table));
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("MAP: 1100"), "stdout: {stdout}");
    let text = fs::read_to_string(&table).unwrap();
    assert!(text.starts_with("gamma_bits,log_score,probability\n"));
    assert_eq!(text.lines().count(), 17); // header + 2^4 models
}

#[test]
fn gibbs_writes_chfiles_and_estimates() {
    let dir = workdir("gibbs");
    let data = dir.join("data.csv");
    run_ok(bin().args([
        "datagen", "--n", "60", "--p", "3", "--beta", "2,2", "--seed", "9", "--out",
    ])
    .arg(&data));
    let chains_dir = dir.join("chains");
    let out = run_ok(bin()
        .args(["gibbs", "--data"])
        .arg(&data)
        .args([
            "--phi", "1000", "--sweeps", "2000", "--burnin", "1000", "--chains", "3",
            "--seed", "4", "--gamma0", "110", "--out-dir",
        ])
        .arg(&chains_dir));
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("PSRF"), "stdout: {stdout}");
    assert!(stdout.contains("estimated p(gamma0 | data)"));
    for id in 0..3 {
        let text = fs::read_to_string(chains_dir.join(format!("chain_{id}.csv"))).unwrap();
        assert!(text.starts_with("sweep,gamma_bits,sigma,log_score\n"));
        assert_eq!(text.lines().count(), 1001);
    }
}

#[test]
fn gprior_and_check_commands() {
    let dir = workdir("gprior-check");
    let data = dir.join("data.csv");
    run_ok(bin().args([
        "datagen", "--n", "50", "--p", "3", "--beta", "2,2", "--seed", "3", "--out",
    ])
    .arg(&data));

    let out = run_ok(bin()
        .args(["gprior", "--data"])
        .arg(&data)
        .args(["--g", "uniform:10:1000", "--gamma0", "110"]));
    assert!(String::from_utf8(out.stdout).unwrap().contains("gamma0 = 110"));

    let report = dir.join("report.json");
    run_ok(bin()
        .args(["check", "--data"])
        .arg(&data)
        .args([
            "--beta0", "2,2,0", "--phi", "10", "--rate-phi", "10", "--out",
        ])
        .arg(&report));
    let json: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(json["s_n"], 2);
    assert!(json["rate_flags"]["A5"]["satisfied"].is_boolean());
}

#[test]
fn table1_runs_config_and_reproduces() {
    let dir = workdir("table1");
    let config = dir.join("exp.cfg");
    fs::write(
        &config,
        "\
n_grid = 60\n\
growth_exponent = 0.25\n\
replicates = 3\n\
settings = phi:100, phi:1000\n\
case = case_i\n\
seed = 12\n\
",
    )
    .unwrap();
    let out_a = dir.join("out_a");
    let out_b = dir.join("out_b");
    for out_dir in [&out_a, &out_b] {
        let out = run_ok(bin()
            .args(["table1", "--config"])
            .arg(&config)
            .arg("--out-dir")
            .arg(out_dir));
        assert!(String::from_utf8(out.stdout).unwrap().contains("mean"));
    }
    let a = fs::read(out_a.join("records.csv")).unwrap();
    let b = fs::read(out_b.join("records.csv")).unwrap();
    assert_eq!(a, b, "records differ between identical runs");
    let summary: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out_a.join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["master_seed"], 12);
}

#[test]
fn sweep_and_regimes_commands() {
    let dir = workdir("sweep-regimes");
    let config = dir.join("sweep.cfg");
    fs::write(
        &config,
        "\
n_grid = 40, 80\n\
growth_exponent = 0.25\n\
replicates = 2\n\
settings = phi:100\n\
case = case_i\n\
seed = 8\n\
",
    )
    .unwrap();
    let out_dir = dir.join("sweep_out");
    run_ok(bin()
        .args(["sweep", "--config"])
        .arg(&config)
        .arg("--out-dir")
        .arg(&out_dir));
    assert!(out_dir.join("records.csv").exists());
    assert!(out_dir.join("summary.json").exists());

    let regimes_dir = dir.join("regimes_out");
    run_ok(bin().args([
        "regimes",
        "--n",
        "12",
        "--replicates",
        "2",
        "--sweeps",
        "100",
        "--burnin",
        "50",
        "--chains",
        "2",
        "--seed",
        "6",
        "--out-dir",
    ])
    .arg(&regimes_dir));
    let text = fs::read_to_string(regimes_dir.join("records.csv")).unwrap();
    assert_eq!(text.lines().count(), 7); // header + 2 replicates × 3 regimes
}

#[test]
fn bad_arguments_fail_loudly() {
    // Missing slab specification.
    let dir = workdir("bad-args");
    let data = dir.join("data.csv");
    run_ok(bin().args([
        "datagen", "--n", "20", "--p", "2", "--beta", "1", "--seed", "0", "--out",
    ])
    .arg(&data));
    let out = bin()
        .args(["enumerate", "--data"])
        .arg(&data)
        .output()
        .unwrap();
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("--phi or --c"));
    // Nonexistent dataset.
    let out = bin()
        .args(["enumerate", "--data", "/nonexistent.csv", "--phi", "1"])
        .output()
        .unwrap();
    assert!(!out.status.success());
}
