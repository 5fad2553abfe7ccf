use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_thetapencil"))
}

fn spec(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("specs").join(name)
}

fn run_to(spec_path: &Path, out: &Path, extra: &[&str]) -> Output {
    bin().arg("run").arg(spec_path).arg("--out").arg(out).args(extra).output().unwrap()
}

fn read(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn stage<'a>(report: &'a Value, name: &str) -> &'a Value {
    report["stages"].as_array().unwrap().iter().find(|s| s["stage"] == name).unwrap()
}

#[test]
fn flagship_end_to_end() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("swap.json");
    let o = run_to(&spec("swap_sl2.toml"), &out, &["--symbolic"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let r = read(&out);
    assert_eq!(r["passed"], true);
    let idx = &stage(&r, "index")["result"];
    assert_eq!(idx["contraction_0"]["index_estimate"], 2);
    assert_eq!(idx["contraction_inf"]["index_estimate"], 4);
    assert_eq!(idx["contraction_inf"]["method"], "symbolic");
    let zfull = &stage(&r, "zfull")["result"];
    assert_eq!(zfull["count"], 3);
    let cert = &stage(&r, "certify")["result"]["certificates"][0]["certificate"];
    assert_eq!(cert["all_zero"], true);
    assert_eq!(cert["jacobian_rank_at_seed"], 3);
    assert_eq!(cert["minor_gcd_constant"], true);
    assert_eq!(r["job"]["seed"], 7);
}

#[test]
fn reports_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.json"), dir.path().join("b.json"));
    for out in [&a, &b] {
        assert_eq!(run_to(&spec("cycle_sl2_3.toml"), out, &["--seed", "5"]).status.code(), Some(0));
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert_eq!(read(&a)["job"]["seed"], 5);
}

#[test]
fn gaudin_only_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("g.json");
    assert_eq!(run_to(&spec("gaudin_sl2_3.toml"), &out, &[]).status.code(), Some(0));
    let r = read(&out);
    let g = &stage(&r, "gaudin")["result"];
    assert_eq!(g["hamiltonians"].as_array().unwrap().len(), 3);
    assert_eq!(g["pairwise_zero"], true);
    assert!(g["commute_with_z"].is_null());
}

#[test]
fn corrupted_generator_fails_with_witness() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("bad.json");
    assert_eq!(run_to(&spec("corrupted.toml"), &out, &[]).status.code(), Some(1));
    let r = read(&out);
    assert_eq!(r["passed"], false);
    let c = &stage(&r, "certify")["result"]["certificates"][0];
    assert_eq!(c["corrupted_generator"], 1);
    let w = &c["certificate"]["witnesses"][0];
    assert_eq!((w["i"].as_u64(), w["j"].as_u64()), (Some(0), Some(1)));
    let o = bin().arg("check").arg(&out).output().unwrap();
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn check_reproduces_certificates() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.json");
    assert_eq!(run_to(&spec("cartan_tower.toml"), &out, &[]).status.code(), Some(0));
    let o = bin().arg("check").arg(&out).output().unwrap();
    let text = String::from_utf8_lossy(&o.stdout);
    assert_eq!(o.status.code(), Some(0), "{text}");
    assert!(text.contains("twist") && text.contains("certify/zfull"));

    // a tampered generator is no longer reproduced
    let mut r = read(&out);
    let gens = &mut r["stages"].as_array_mut().unwrap().iter_mut().find(|s| s["stage"] == "certify").unwrap()["result"]
        ["certificates"][0]["generators"]["generators"];
    gens[0]["poly"] = Value::String("(1) * x1".into());
    std::fs::write(&out, serde_json::to_string(&r).unwrap()).unwrap();
    let o = bin().arg("check").arg(&out).output().unwrap();
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stdout).contains("not reproduced"));
}

#[test]
fn raw_algebra_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("h.json");
    assert_eq!(run_to(&spec("heisenberg.toml"), &out, &["--symbolic"]).status.code(), Some(0));
    let r = read(&out);
    let idx = &stage(&r, "index")["result"];
    assert_eq!(idx["g"]["index_estimate"], 1);
    assert!(idx["closed_form"].is_null());
}

#[test]
fn invalid_specs_exit_two() {
    let o = bin().arg("run").arg(spec("broken_jacobi.toml")).output().unwrap();
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("line 5") && err.contains("(1, 2, 3)"), "{err}");

    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("s.toml");
    std::fs::write(&p, "type = \"sl\"\nn = 2\npipeline = [\"grade\"]\nflavour = 1\n").unwrap();
    let o = bin().arg("run").arg(&p).output().unwrap();
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 4"));

    let o = bin().args(["run"]).arg(spec("swap_sl2.toml")).args(["--budget", "grade=3"]).output().unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn stage_errors_are_reported() {
    // infinity is regular and the automorphism is outer: no recipe for Z
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("t.toml");
    std::fs::write(
        &p,
        "type = \"sl\"\nn = 2\ncopies = 2\nautomorphism = \"twisted_cycle\"\ninner = \"cartan\"\n\
         pipeline = [\"grade\", \"pencil\", \"invariants\", \"ggs\", \"zcross\", \"zfull\", \"certify\"]\n",
    )
    .unwrap();
    let out = dir.path().join("t.json");
    assert_eq!(run_to(&p, &out, &[]).status.code(), Some(1));
    let r = read(&out);
    let z = stage(&r, "zfull");
    assert_eq!(z["status"], "error");
    assert_eq!(z["error"]["code"], "unhandled_case");
    assert_eq!(stage(&r, "certify")["status"], "skipped");
}
