//! Drives the binary end to end.

use std::path::Path;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_noisy-vqa"))
}

fn run(args: &[&str], out: &Path) -> (i32, String, String) {
    let o = bin().args(args).arg("-o").arg(out).output().unwrap();
    (
        o.status.code().unwrap_or(-1),
        String::from_utf8_lossy(&o.stdout).into_owned(),
        String::from_utf8_lossy(&o.stderr).into_owned(),
    )
}

fn header(path: &Path) -> String {
    std::fs::read_to_string(path).unwrap().lines().next().unwrap().to_string()
}

#[test]
fn channel_inspect_prints_the_damping_ptm() {
    let tmp = tempfile::tempdir().unwrap();
    let (code, out, _) = run(&["channel-inspect", "--kind", "amplitude_damping", "--strength", "0.36"], tmp.path());
    assert_eq!(code, 0);
    let z_row = out.lines().find(|l| l.starts_with("Z ")).unwrap();
    assert!(z_row.contains("0.360000") && z_row.contains("0.640000"), "{z_row}");
    assert!(tmp.path().join("manifest.toml").exists());
    assert_eq!(header(&tmp.path().join("ptm.csv")), "noise_kind,twirl,strength,row,col,value");
}

#[test]
fn twirl_prints_diagonal_and_probabilities() {
    let tmp = tempfile::tempdir().unwrap();
    let (code, out, _) = run(
        &["twirl", "--kind", "amplitude_damping", "--strength", "0.36", "--twirl", "pauli"],
        tmp.path(),
    );
    assert_eq!(code, 0);
    assert!(out.contains("diag: (1.000000, 0.800000, 0.800000, 0.640000)"), "{out}");
    assert!(out.contains("p = (0.090000, 0.090000, 0.010000)"), "{out}");
}

#[test]
fn vqe_runs_are_byte_identical() {
    let tmp = tempfile::tempdir().unwrap();
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    let args = ["vqe", "--noise", "none", "--restarts", "5", "--seed", "7"];
    assert_eq!(run(&args, &a).0, 0);
    let o = bin().args(args).arg("-o").arg(&b).env("NOISY_VQA_WORKERS", "1").output().unwrap();
    assert!(o.status.success());
    let ca = std::fs::read(a.join("vqe.csv")).unwrap();
    assert_eq!(ca, std::fs::read(b.join("vqe.csv")).unwrap());
    let text = String::from_utf8(ca).unwrap();
    assert_eq!(text.lines().next().unwrap(), "noise_kind,twirl,strength,restart,final_energy,E0,percentage_error,steps");
    assert_eq!(text.lines().count(), 6);
}

#[test]
fn manifest_reproduces_the_run() {
    let tmp = tempfile::tempdir().unwrap();
    let a = tmp.path().join("a");
    let (code, _, _) = run(
        &["gradients", "--kind", "amplitude_damping", "--twirls", "none,pauli", "--noise.strength=0.2", "--samples", "300"],
        &a,
    );
    assert_eq!(code, 0);
    let b = tmp.path().join("b");
    let (code, _, err) = run(&["run", "--config", a.join("manifest.toml").to_str().unwrap()], &b);
    assert_eq!(code, 0, "{err}");
    for f in ["grads.csv", "grads_summary.csv"] {
        assert_eq!(std::fs::read(a.join(f)).unwrap(), std::fs::read(b.join(f)).unwrap(), "{f}");
    }
    assert_eq!(header(&a.join("grads.csv")), "noise_kind,twirl,strength,sample_id,grad_abs");
}

#[test]
fn csv_headers_match_schemas() {
    let tmp = tempfile::tempdir().unwrap();
    let cases: [(&[&str], &str, &str); 5] = [
        (&["expressivity", "--seeds", "1", "--kind", "depolarizing", "--strength", "0.5", "-L", "1"], "range.csv", "seed,noise_kind,twirl,strength,L,max_range,iterations"),
        (&["depth-sweep", "--seeds", "1", "--model.depths=[1]"], "range.csv", "seed,noise_kind,twirl,strength,L,max_range,iterations"),
        (&["bounds", "-L", "1", "--kind", "amplitude_damping", "--strengths", "0.5,1.0"], "bounds.csv", "noise_kind,strength,f_min,f_max"),
        (&["fit", "-L", "1"], "dataset.csv", "x,target"),
        (&["fit", "-L", "1"], "fit.csv", "x,target,prediction"),
    ];
    for (i, (args, file, expect)) in cases.iter().enumerate() {
        let dir = tmp.path().join(i.to_string());
        let (code, _, err) = run(args, &dir);
        assert_eq!(code, 0, "{args:?}: {err}");
        assert_eq!(header(&dir.join(file)), *expect);
    }
}

#[test]
fn exit_codes() {
    let tmp = tempfile::tempdir().unwrap();
    assert_eq!(run(&["vqe", "--run.bogus=1"], tmp.path()).0, 2);
    assert_eq!(run(&["twirl", "--kind", "depolarizing", "--strength", "1.5"], tmp.path()).0, 2);
    assert_eq!(run(&["vqe", "--kind", "coherent", "--twirl", "pauli", "--strength", "0.1"], tmp.path()).0, 2);
    let bad = tmp.path().join("bad.toml");
    std::fs::write(&bad, "[experiment]\nname = \"fit\"\n[model]\nlayers = 9\n").unwrap();
    assert_eq!(run(&["run", "--config", bad.to_str().unwrap()], tmp.path()).0, 2);
    let o = bin().arg("--help").output().unwrap();
    assert_eq!(o.status.code(), Some(0));
}
