use std::io::Write;
use std::process::Command;

use qavail_cli::{run, Output};
use serde_json::Value;

fn qavail(args: &str) -> Output {
    run(
        std::iter::once("qavail").chain(args.split_whitespace()),
        None,
    )
}

fn json(out: &Output) -> Value {
    assert_eq!(out.code, 0, "stderr: {}", out.stderr);
    serde_json::from_str(&out.stdout).expect("valid JSON")
}

#[test]
fn amplify_example() {
    let doc = json(&qavail("amplify --n 4 --good 0 --seed 7"));
    assert_eq!(doc["result"]["a"], 0.25);
    assert_eq!(doc["result"]["m"], 1);
    assert_eq!(doc["result"]["is_good"], true);
    assert_eq!(doc["metrics"]["oracle_calls_total"], 1);
}

#[test]
fn count_example() {
    let doc = json(&qavail("count --n 4 --good 0 --m 6 --seed 1"));
    assert_eq!(doc["result"]["t_hat"], 1.0);
    assert_eq!(doc["result"]["t_true"], 1);
    assert_eq!(doc["result"]["biased"], false);
    assert_eq!(doc["metrics"]["q_applications_per_run"], 15);
}

#[test]
fn weighted_count_overestimates() {
    let doc = json(&qavail(
        "count --n 4 --good 0 --m 16 --weights 0.64,0.12,0.12,0.12 --distribution",
    ));
    assert!(doc["result"]["median_t_hat"].as_f64().unwrap() > 1.0);
    assert_eq!(doc["result"]["biased"], true);
    let total: f64 = doc["result"]["distribution"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| r["probability"].as_f64().unwrap())
        .sum();
    assert!((total - 1.0).abs() < 1e-9);
}

#[test]
fn estimate_defaults_register_and_echoes_it() {
    let doc = json(&qavail("estimate --n 16 --good 3"));
    // a = 1/16: ⌊1/√a⌋ = 4, raised to the minimum register of 8.
    assert_eq!(doc["config"]["m"], 8);
    assert_eq!(doc["config"]["seed"], 0);
    assert_eq!(doc["config"]["trials"], 1);
    assert_eq!(doc["config"]["space"]["weights"], Value::Null);
}

#[test]
fn usage_errors_exit_1() {
    for args in [
        "estimate --n 4 --good 0 --m 6 --weights 0.64,0.12,0.12",
        "amplify --n 4 --good 9",
        "amplify --n 0 --good 0",
        "count --n 4 --good 0 --m 0",
        "count --n 4 --good 0 --weights -1,1,1,1",
        "scenario-names --sizes 19",
        "scenario-names --factors 2,0",
        "scenario-names --trials 1",
        "scenario-letter --boost 0",
        "amplify --n 4 --good 0 --bogus",
        "frobnicate",
    ] {
        let out = qavail(args);
        assert_eq!(out.code, 1, "{args}: {}", out.stderr);
        assert!(out.stdout.is_empty());
        assert!(!out.stderr.is_empty());
    }
}

#[test]
fn help_exits_0() {
    let out = qavail("--help");
    assert_eq!(out.code, 0);
    assert!(out.stdout.contains("scenario-names"));
    assert!(!out.stdout.contains("inject-kernel-perturbation"));
}

#[test]
fn domain_errors_exit_2() {
    let out = qavail("amplify --n 4");
    assert_eq!(out.code, 2, "{}", out.stderr);
    let out = qavail("scenario-letter --lexicon /nonexistent/words.txt");
    assert_eq!(out.code, 2);
}

#[test]
fn empty_partition_names_the_partition() {
    let mut file = tempfile::NamedTempFile::new().unwrap();
    writeln!(file, "rat\nran\nrobe").unwrap();
    let out = run(
        [
            "qavail",
            "scenario-letter",
            "--lexicon",
            file.path().to_str().unwrap(),
        ],
        None,
    );
    assert_eq!(out.code, 2);
    assert!(out.stderr.contains("position-3"), "{}", out.stderr);
}

#[test]
fn cap_violations_exit_3() {
    let argv = ["qavail", "count", "--n", "4", "--good", "0", "--m", "6"];
    assert_eq!(run(argv, Some("23")).code, 3);
    assert_eq!(run(argv, Some("24")).code, 0);
    assert_eq!(run(["qavail", "scenario-names"], Some("1000")).code, 3);
    assert_eq!(run(["qavail", "scenario-letter"], Some("1000")).code, 3);
    assert_eq!(run(argv, Some("lots")).code, 1);
}

#[test]
fn identical_argv_gives_identical_output() {
    for args in [
        "amplify --n 37 --good 1,5,9 --trials 20 --seed 3",
        "estimate --n 16 --good 0,1 --weights 1,2,3,4,1,2,3,4,1,2,3,4,1,2,3,4 --trials 5",
        "count --n 8 --good 2 --m 16 --trials 10 --format csv",
        "scenario-letter --trials 5 --seed 9",
        "scenario-names --trials 20 --seed 4 --format csv",
        "selftest",
    ] {
        assert_eq!(qavail(args), qavail(args), "{args}");
    }
}

#[test]
fn timing_is_opt_in() {
    assert!(json(&qavail("amplify --n 4 --good 0"))
        .get("timing")
        .is_none());
    let doc = json(&qavail("amplify --n 4 --good 0 --timing"));
    assert!(doc["timing"]["wall_ms"].as_f64().unwrap() >= 0.0);
}

#[test]
fn csv_has_config_header_and_one_row_per_trial() {
    let out = qavail("scenario-names --trials 12 --seed 5 --format csv");
    assert_eq!(out.code, 0);
    let mut lines = out.stdout.lines();
    let config: Value =
        serde_json::from_str(lines.next().unwrap().strip_prefix("# config: ").unwrap()).unwrap();
    assert_eq!(config["sizes"], serde_json::json!([19, 20]));
    assert_eq!(config["factors"], serde_json::json!([2.0, 1.0]));
    assert!(lines
        .next()
        .unwrap()
        .starts_with("trial,seed,agreement,group1_label"));
    assert_eq!(lines.count(), 12);

    let out = qavail("count --n 4 --good 0 --m 8 --format csv --distribution");
    let rows: Vec<&str> = out.stdout.lines().skip(1).collect();
    assert_eq!(rows[0], "y,probability,a_hat,t_hat");
    assert_eq!(rows.len(), 1 + 8);
}

#[test]
fn names_trials_follow_seed_offsets() {
    let a = json(&qavail("scenario-names --trials 3 --seed 10"));
    let b = json(&qavail("scenario-names --trials 3 --seed 11"));
    assert_eq!(a["result"]["trials"][1], b["result"]["trials"][0]);
    assert_eq!(a["result"]["trials"][2]["seed"], 12);
}

#[test]
fn letter_scenario_reproduces_the_bias() {
    let doc = json(&qavail("scenario-letter --trials 20 --seed 1973"));
    let parts = doc["result"]["partitions"].as_array().unwrap();
    assert!(parts[0]["t_true"].as_u64() < parts[1]["t_true"].as_u64());
    assert!(parts[0]["a"].as_f64() > parts[1]["a"].as_f64());
    assert!(parts[0].get("bins").is_none());
    assert_eq!(doc["result"]["contradicting_true_counts"], 20);
}

#[test]
fn selftest_passes_and_detects_a_perturbed_kernel() {
    let doc = json(&qavail("selftest"));
    assert_eq!(doc["result"]["passed"], true);
    assert_eq!(doc["metrics"]["failed"], 0);

    let out = qavail("selftest --inject-kernel-perturbation");
    assert_eq!(out.code, 2);
    let doc: Value = serde_json::from_str(&out.stdout).unwrap();
    let failed: Vec<&str> = doc["result"]["checks"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|c| c["passed"] == false)
        .map(|c| c["name"].as_str().unwrap())
        .collect();
    assert_eq!(failed, ["estimation-oracle-equivalence"]);
}

#[test]
fn binary_reads_the_cap_variable() {
    let exe = env!("CARGO_BIN_EXE_qavail");
    let status = |cap: &str| {
        Command::new(exe)
            .args(["count", "--n", "4", "--good", "0", "--m", "6"])
            .env(qavail_cli::JOINT_CAP_ENV, cap)
            .output()
            .unwrap()
    };
    assert_eq!(status("10").status.code(), Some(3));
    let ok = status("100");
    assert_eq!(ok.status.code(), Some(0));
    let doc: Value = serde_json::from_slice(&ok.stdout).unwrap();
    assert_eq!(doc["config"]["joint_cap"], 100);
}
