use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use sha2::{Digest, Sha256};

const EQ_SUM_OF_FOURTH_POWERS: &str = "1 0 0 0 1 0 0 1 0 1 0 2 0 0 0 6 0 0 2 0";

fn qpl(out: &Path, args: &[&str]) -> Output {
    qpl_env(out, args, &[])
}

fn qpl_env(out: &Path, args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_qpl"));
    cmd.arg("--out-dir").arg(out).args(args);
    for var in ["QPL_OUT_DIR", "QPL_THREADS", "QPL_SEED"] {
        cmd.env_remove(var);
    }
    cmd.envs(env.iter().copied());
    cmd.output().expect("run qpl")
}

fn manifest(out: &Path, name: &str) -> Value {
    serde_json::from_str(&std::fs::read_to_string(out.join(format!("{name}.manifest.json"))).unwrap()).unwrap()
}

fn without_timestamps(mut m: Value) -> Value {
    for key in ["started_at", "finished_at", "elapsed_ms", "config_sources"] {
        m.as_object_mut().unwrap().remove(key);
    }
    m
}

#[test]
fn invariants_of_a_rational_pair() {
    let dir = tempfile::tempdir().unwrap();
    let out = qpl(dir.path(), &["invariants", "--pair", "0 0 0 0 0 0 1 1/2 0 0 -1/2 0 0 0 0 1 0 0 0 -1"]);
    assert!(out.status.success());
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["I"], "0");
    assert_eq!(v["J"], "54");
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(qpl(dir.path(), &["invariants", "--pair", EQ_SUM_OF_FOURTH_POWERS]).status.code(), Some(0));
    // domain errors
    assert_eq!(qpl(dir.path(), &["stabilizer-fp", "--p", "4", "--pair", EQ_SUM_OF_FOURTH_POWERS]).status.code(), Some(1));
    assert_eq!(qpl(dir.path(), &["selmer-bound", "--s2-avg", "1", "--order4-avg", "4"]).status.code(), Some(1));
    // usage errors
    assert_eq!(qpl(dir.path(), &["count-ij", "--X", "10", "--sign", "x"]).status.code(), Some(2));
    assert_eq!(qpl(dir.path(), &["count-ij"]).status.code(), Some(2));
    assert_eq!(qpl(dir.path(), &["invariants", "--pair", "1 2 3"]).status.code(), Some(2));
    assert_eq!(qpl(dir.path(), &["no-such-command"]).status.code(), Some(2));
}

#[test]
fn infeasible_moments_print_a_certificate() {
    let dir = tempfile::tempdir().unwrap();
    let out = qpl(dir.path(), &["selmer-bound", "--s2-avg", "1", "--order4-avg", "4"]);
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["feasible"], false);
    assert_eq!(v["certificate"], serde_json::json!(["1", "-1", "1/64"]));
}

#[test]
fn manifest_records_the_run() {
    let dir = tempfile::tempdir().unwrap();
    let out = qpl(dir.path(), &["count-ij", "--X", "1000"]);
    assert!(out.status.success());
    let body = std::fs::read(dir.path().join("count-ij.csv")).unwrap();
    assert_eq!(body, out.stdout);
    let m = manifest(dir.path(), "count-ij");
    assert_eq!(m["command"], "count-ij");
    assert_eq!(m["params"]["X"], "1000");
    assert_eq!(m["output_file"], "count-ij.csv");
    assert_eq!(m["result_digest"], hex::encode(Sha256::digest(&body)));
    assert!(m["totals"]["plus"].is_string());
}

#[test]
fn flags_override_environment() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["scan-box", "--M", "2", "--predicates", "disc-nonzero", "--samples", "200"];
    qpl_env(dir.path(), &args, &[("QPL_SEED", "5")]);
    let m = manifest(dir.path(), "scan-box");
    assert_eq!(m["seed"], 5);
    assert_eq!(m["config_sources"]["seed"], "env");

    let mut with_flag = args.to_vec();
    with_flag.extend(["--seed", "7"]);
    qpl_env(dir.path(), &with_flag, &[("QPL_SEED", "5")]);
    let m = manifest(dir.path(), "scan-box");
    assert_eq!(m["seed"], 7);
    assert_eq!(m["config_sources"]["seed"], "flag");

    qpl(dir.path(), &args);
    assert_eq!(manifest(dir.path(), "scan-box")["config_sources"]["seed"], "default");

    // the output directory itself may come from the environment
    let env_dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_qpl"))
        .args(["count-ij", "--X", "10"])
        .env("QPL_OUT_DIR", env_dir.path())
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(env_dir.path().join("count-ij.manifest.json").exists());
}

#[test]
fn sampled_output_is_reproducible_across_thread_counts() {
    let args = ["scan-box", "--M", "1", "--predicates", "disc-nonzero,case1,wp:5", "--samples", "30000", "--seed", "11"];
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let mut one = args.to_vec();
    one.extend(["--threads", "1"]);
    let mut two = args.to_vec();
    two.extend(["--threads", "2"]);
    let out_a = qpl(a.path(), &one);
    let out_b = qpl(b.path(), &two);
    assert!(out_a.status.success() && out_b.status.success());
    assert_eq!(out_a.stdout, out_b.stdout);
    let (ma, mb) = (manifest(a.path(), "scan-box"), manifest(b.path(), "scan-box"));
    assert_eq!(without_timestamps(ma), without_timestamps(mb));
}

#[test]
fn resume_from_a_checkpoint_reproduces_the_full_run() {
    let full_dir = tempfile::tempdir().unwrap();
    let args = ["scan-box", "--M", "1", "--predicates", "disc-nonzero,case2", "--start", "0", "--end", "2500000"];
    let full = qpl(full_dir.path(), &args);
    assert!(full.status.success());
    let mut m = manifest(full_dir.path(), "scan-box");
    let checkpoints = m["checkpoints"].as_array().unwrap().clone();
    assert_eq!(checkpoints.len(), 2);

    // pretend the run died after its first checkpoint
    m["checkpoints"] = Value::Array(checkpoints[..1].to_vec());
    let partial = full_dir.path().join("partial.manifest.json");
    std::fs::write(&partial, serde_json::to_string(&m).unwrap()).unwrap();

    let resumed_dir = tempfile::tempdir().unwrap();
    let mut resume_args = args.to_vec();
    resume_args.extend(["--resume", partial.to_str().unwrap()]);
    let resumed = qpl(resumed_dir.path(), &resume_args);
    assert!(resumed.status.success(), "{}", String::from_utf8_lossy(&resumed.stderr));
    assert_eq!(resumed.stdout, full.stdout);
    assert_eq!(manifest(resumed_dir.path(), "scan-box")["totals"], manifest(full_dir.path(), "scan-box")["totals"]);
}

#[test]
fn count_ij_resume_matches() {
    let full_dir = tempfile::tempdir().unwrap();
    let full = qpl(full_dir.path(), &["count-ij", "--X", "100000000"]);
    let mut m = manifest(full_dir.path(), "count-ij");
    let checkpoints = m["checkpoints"].as_array().unwrap().clone();
    assert!(checkpoints.len() > 3);
    m["checkpoints"] = Value::Array(checkpoints[..3].to_vec());
    let partial = full_dir.path().join("partial.json");
    std::fs::write(&partial, serde_json::to_string(&m).unwrap()).unwrap();
    let resumed_dir = tempfile::tempdir().unwrap();
    let resumed = qpl(resumed_dir.path(), &["count-ij", "--X", "100000000", "--resume", partial.to_str().unwrap()]);
    assert!(resumed.status.success());
    assert_eq!(resumed.stdout, full.stdout);

    let other = qpl(resumed_dir.path(), &["count-ij", "--X", "1000", "--resume", partial.to_str().unwrap()]);
    assert_eq!(other.status.code(), Some(2));
}

#[test]
fn stabilizer_matches_four_torsion() {
    let dir = tempfile::tempdir().unwrap();
    let out = qpl(dir.path(), &["stabilizer-fp", "--p", "11", "--pair", "1 0 0 0 1 0 0 1 0 1 0 2 0 0 0 6 0 0 2 0"]);
    assert!(out.status.success());
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["agrees"], true);
    assert_eq!(v["order"], v["four_torsion"]);
}

#[test]
fn verify_identities_passes() {
    let dir = tempfile::tempdir().unwrap();
    let out = qpl(dir.path(), &["verify-identities", "--samples", "200"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("check,cases,failures"));
    assert!(text.lines().skip(1).all(|l| l.ends_with(",0")), "{text}");
}
