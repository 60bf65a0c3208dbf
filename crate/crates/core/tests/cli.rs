use std::fs;
use std::process::Command;

fn hsp_sim(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_hsp-sim")).args(args).output().expect("binary runs");
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8_lossy(&out.stdout).into_owned(),
        String::from_utf8_lossy(&out.stderr).into_owned(),
    )
}

#[test]
fn run_writes_report_and_histograms() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.json");
    let out_s = out.to_str().unwrap();
    let (code, _, err) = hsp_sim(&["run", "--p", "3", "--n", "1", "--trials", "100", "--seed", "7", "--out", out_s]);
    assert_eq!(code, 0, "{err}");
    let doc: serde_json::Value = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(doc["schema"], 1);
    assert!(doc["successes"].as_u64().unwrap() >= 95);
    assert_eq!(doc["per_trial"].as_array().unwrap().len(), 100);
    assert_eq!(doc["convention_id"], "symplectic");
    for key in ["p", "n", "case", "trials", "mean_rounds", "mean_discards_by_reason", "mean_queries", "seed", "backend"] {
        assert!(doc.get(key).is_some(), "missing {key}");
    }
    let rounds = fs::read_to_string(dir.path().join("r.rounds.csv")).unwrap();
    assert!(rounds.starts_with("accepted_rounds,trials\n"));
    let labels = fs::read_to_string(dir.path().join("r.labels.csv")).unwrap();
    assert!(labels.starts_with("label,count\n"));
}

#[test]
fn identical_configs_give_identical_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for path in [&a, &b] {
        let (code, _, _) = hsp_sim(&["run", "--p", "5", "--n", "2", "--trials", "40", "--seed", "3", "--out", path.to_str().unwrap()]);
        assert_eq!(code, 0);
    }
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("exp.cfg");
    fs::write(&cfg, "# planted subgroup\np=3\nn=1\ntrials=5\nsubgroup=3,1;gen=1|1|2\nbackend=structured\n").unwrap();
    let (code, stdout, err) = hsp_sim(&["run", "--config", cfg.to_str().unwrap(), "--trials", "3"]);
    assert_eq!(code, 0, "{err}");
    let doc: serde_json::Value = serde_json::from_str(&stdout).unwrap();
    assert_eq!(doc["trials"], 3);
    assert_eq!(doc["backend"], "structured");
    assert_eq!(doc["per_trial"][0]["planted"], "3,1;gen=1|1|2");
}

#[test]
fn zero_trials_is_valid() {
    let (code, stdout, _) = hsp_sim(&["run", "--trials", "0"]);
    assert_eq!(code, 0);
    let doc: serde_json::Value = serde_json::from_str(&stdout).unwrap();
    assert_eq!(doc["successes"], 0);
    assert!(doc["per_trial"].as_array().unwrap().is_empty());
}

#[test]
fn exit_codes() {
    assert_eq!(hsp_sim(&["run", "--p", "4"]).0, 2);
    assert_eq!(hsp_sim(&["run", "--p", "3", "--n", "4", "--backend", "dense"]).0, 2);
    assert_eq!(hsp_sim(&["run", "--backend", "quantum"]).0, 2);
    assert_eq!(hsp_sim(&["run", "--config", "/nonexistent/cfg"]).0, 2);
    // At p = 3 every pair with k + l ≠ 0 has −k/l = −1, a non-residue, so
    // the literal discard rule never accepts a round.
    let (code, stdout, _) = hsp_sim(&["run", "--p", "3", "--case", "abelian", "--trials", "4", "--policy", "discard"]);
    assert_eq!(code, 1);
    let doc: serde_json::Value = serde_json::from_str(&stdout).unwrap();
    assert_eq!(doc["successes"], 0);
}

#[test]
fn verify_suite_statuses() {
    let (code, stdout, _) = hsp_sim(&["verify"]);
    assert_eq!(code, 0, "{stdout}");
    assert!(stdout.contains("PASS     circuit_vs_dense"));
    assert!(!stdout.contains("FAIL"));
    let (code, stdout, _) = hsp_sim(&["verify", "--permute-wires", "0,2,1"]);
    assert_eq!(code, 1);
    assert!(stdout.contains("FAIL     circuit_vs_dense"));
    let (code, stdout, _) = hsp_sim(&["verify", "--p", "2", "--n", "1"]);
    assert_eq!(code, 0);
    assert!(stdout.contains("SKIPPED  label_change_theorem"));
    assert_eq!(hsp_sim(&["verify", "--p", "6"]).0, 2);
}
