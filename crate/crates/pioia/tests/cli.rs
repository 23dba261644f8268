//! End-to-end checks of the command-line surface.

use std::process::Command;

fn pioia() -> Command {
    Command::new(env!("CARGO_BIN_EXE_pioia"))
}

#[test]
fn solve_writes_summary_and_trace_with_exit_zero() {
    let dir = tempfile::tempdir().unwrap();
    let summary = dir.path().join("summary.json");
    let trace = dir.path().join("trace.csv");
    let status = pioia()
        .args([
            "solve",
            "--synthetic",
            "3,2,3",
            "--seed",
            "7",
            "--method",
            "m4",
        ])
        .arg("--summary")
        .arg(&summary)
        .arg("--trace")
        .arg(&trace)
        .args(["--obj-star", "14.94563463858373"])
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0), "m4 closes the gap on this fixture");

    let text = std::fs::read_to_string(&summary).unwrap();
    let json: serde_json::Value = serde_json::from_str(&text).unwrap();
    for key in [
        "method",
        "variant",
        "ub",
        "lb",
        "gap",
        "optg",
        "vio",
        "runtime_s",
        "milestones",
        "cut_counts",
    ] {
        assert!(json.get(key).is_some(), "summary key {key} missing: {text}");
    }
    assert_eq!(json["method"], "m4");
    assert!(
        json["optg"].as_f64().unwrap() <= 1e-4,
        "optg {}",
        json["optg"]
    );
    assert!(json["vio"].as_f64().unwrap() <= 1e-6);
    assert!(json["milestones"].get("Gap-1").is_some());

    let csv = std::fs::read_to_string(&trace).unwrap();
    let header = csv.lines().next().unwrap();
    assert_eq!(
        header,
        "iter,stage,wall_time_s,lb,ub,gap,soc_cuts,cap_cuts,benders_cuts,n_binary,mip_gap,solver_limit,status"
    );
    assert!(csv.lines().skip(1).any(|l| l.contains(",lp,")));
    assert!(csv.lines().skip(1).any(|l| l.contains(",ig,")));
    assert!(csv.lines().skip(1).any(|l| l.contains(",oia,")));
}

#[test]
fn forbidden_method_variant_combo_exits_one() {
    let output = pioia()
        .args([
            "solve",
            "--synthetic",
            "1,1,1",
            "--method",
            "m4",
            "--variant",
            "f1",
        ])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(
        stderr.contains("slack"),
        "explanatory message, got: {stderr}"
    );
}

#[test]
fn unreadable_instance_exits_one() {
    let status = pioia()
        .args(["solve", "--instance", "/nonexistent/nope.json"])
        .output()
        .unwrap();
    assert_eq!(status.status.code(), Some(1));
}

#[test]
fn perturb_writes_one_file_per_seed_and_sigma_zero_is_identity() {
    let dir = tempfile::tempdir().unwrap();
    let instance = dir.path().join("base.json");
    // materialize a synthetic instance by perturbing with sigma 0 first
    let status = pioia()
        .args([
            "perturb",
            "--synthetic",
            "2,1,3",
            "--seed",
            "5",
            "--sigma",
            "0",
            "--seeds",
            "0",
        ])
        .arg("--out-dir")
        .arg(dir.path())
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    std::fs::rename(dir.path().join("perturbed_0.json"), &instance).unwrap();

    let status = pioia()
        .args([
            "perturb",
            "--sigma",
            "0.05",
            "--seeds",
            "1..10",
            "--instance",
        ])
        .arg(&instance)
        .arg("--out-dir")
        .arg(dir.path())
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    let mut distinct = std::collections::HashSet::new();
    for seed in 1..=10 {
        let path = dir.path().join(format!("perturbed_{seed}.json"));
        let text = std::fs::read_to_string(&path).unwrap();
        distinct.insert(text);
    }
    assert_eq!(distinct.len(), 10, "each seed gives a distinct file");

    // sigma 0 keeps the payload identical to the input
    let status = pioia()
        .args(["perturb", "--sigma", "0", "--seeds", "42", "--instance"])
        .arg(&instance)
        .arg("--out-dir")
        .arg(dir.path())
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    let copied = std::fs::read_to_string(dir.path().join("perturbed_42.json")).unwrap();
    let original = std::fs::read_to_string(&instance).unwrap();
    assert_eq!(copied, original);
}

#[test]
fn oracle_guard_exceeded_exits_one() {
    let output = pioia()
        .args(["oracle", "--synthetic", "3,5,5"])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.contains("guard"), "{stderr}");
}

#[test]
fn backend_env_var_is_honored() {
    let dir = tempfile::tempdir().unwrap();
    let summary = dir.path().join("summary.json");
    let status = pioia()
        .args([
            "solve",
            "--synthetic",
            "1,1,1",
            "--seed",
            "3",
            "--method",
            "m1",
        ])
        .arg("--summary")
        .arg(&summary)
        .env("PIOIA_BACKEND", "totsu")
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&summary).unwrap()).unwrap();
    assert_eq!(json["backend"], "totsu");

    // the flag outranks the environment
    let status = pioia()
        .args([
            "solve",
            "--synthetic",
            "1,1,1",
            "--seed",
            "3",
            "--method",
            "m1",
        ])
        .args(["--backend", "clarabel"])
        .arg("--summary")
        .arg(&summary)
        .env("PIOIA_BACKEND", "totsu")
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&summary).unwrap()).unwrap();
    assert_eq!(json["backend"], "clarabel");
}

#[test]
fn oracle_golden_file_round_trips_through_the_cli() {
    let dir = tempfile::tempdir().unwrap();
    let golden = dir.path().join("golden.json");
    let output = pioia()
        .args(["oracle", "--synthetic", "2,2,3", "--seed", "5", "--golden"])
        .arg(&golden)
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(0));
    let stdout = String::from_utf8_lossy(&output.stdout);
    assert!(stdout.contains("obj_star:"), "{stdout}");
    let record: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&golden).unwrap()).unwrap();
    for key in ["instance_hash", "variant", "obj_star", "schedule"] {
        assert!(record.get(key).is_some(), "golden key {key} missing");
    }
}
