use std::process::{Command, Output};

use serde_json::Value;

fn hyperquant(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hyperquant"))
        .args(args)
        .env_remove("HYPERQUANT_BUDGET")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn h(p: f64) -> f64 {
    if p == 0.0 || p == 1.0 {
        0.0
    } else {
        -p * p.log2() - (1.0 - p) * (1.0 - p).log2()
    }
}

#[test]
fn verify_theorem_reaches_the_bound() {
    let out = hyperquant(&["verify-theorem", "--n", "3", "--alpha", "0.2", "--no-timing"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["passed"], true);
    let r = &v["results"][0];
    let expected = 2.0 * (1.0 - h(0.2));
    assert!((r["max_mi"].as_f64().unwrap() - expected).abs() < 1e-9);
    assert!(r["gap"].as_f64().unwrap().abs() < 1e-9);
    assert_eq!(r["M"], 4);
    assert_eq!(r["partitions_examined"], 1 + 127 + 966 + 1701);
    for key in ["n", "alpha", "bound", "argmax"] {
        assert!(r.get(key).is_some(), "missing {key}");
    }
    assert!(v.get("runtime_ms").is_none());
}

#[test]
fn timing_fields_present_by_default() {
    let out = hyperquant(&["search", "--n", "2", "--alpha", "0.1"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert!(v["runtime_ms"].is_u64());
    assert!(v["generated_at"].is_u64());
    assert!(v["results"][0]["runtime_ms"].is_u64());
}

#[test]
fn hmn_table_csv_matches_closed_forms() {
    let out = hyperquant(&[
        "hmn-table",
        "--n",
        "4",
        "--m",
        "1..8",
        "--alpha-grid",
        "default",
        "--format",
        "csv",
        "--no-timing",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("# hyperquant hmn-table schema_version=1"));
    let mut reader = csv::Reader::from_reader(text.split_once('\n').unwrap().1.as_bytes());
    let headers = reader.headers().unwrap().clone();
    let col = |name: &str| headers.iter().position(|h| h == name).unwrap();
    let (m, mono, brute, closed) = (col("m"), col("monotone"), col("bruteforce"), col("closed_form"));
    let mut rows = 0;
    for rec in reader.records() {
        let rec = rec.unwrap();
        rows += 1;
        let value: f64 = rec[mono].parse().unwrap();
        let b: f64 = rec[brute].parse().unwrap();
        assert!((value - b).abs() < 1e-9);
        if rec[m].parse::<usize>().unwrap() <= 4 {
            let c: f64 = rec[closed].parse().unwrap();
            assert!((value - c).abs() < 1e-9);
        } else {
            assert!(rec[closed].is_empty());
        }
    }
    assert_eq!(rows, 8 * 13);
}

#[test]
fn check_lemmas_pass() {
    let out = hyperquant(&["check-lemmas", "--n", "3", "--no-timing"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    assert_eq!(v["results"]["identity_exhaustive"], true);
    let names: Vec<&str> = v["checks"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| c["name"].as_str().unwrap())
        .collect();
    for needle in ["(m-2)/(2m-2)", "brute-force", "g(1/2)", "bias", "lambda(1)", "H_3 lower bound"] {
        assert!(names.iter().any(|n| n.contains(needle)), "no check mentions {needle}");
    }
}

#[test]
fn perturbation_flips_exit_status() {
    let out = hyperquant(&[
        "check-lemmas",
        "--n",
        "3",
        "--alpha",
        "0.5",
        "--samples",
        "5",
        "--perturb-hm",
        "5",
        "--no-timing",
    ]);
    assert_eq!(out.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("m=5"), "{stderr}");
    let v = json(&out);
    assert_eq!(v["passed"], false);
    let failing: Vec<&str> = v["checks"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|c| c["passed"] == false)
        .map(|c| c["name"].as_str().unwrap())
        .collect();
    assert!(failing.iter().any(|n| n.starts_with("H_5^3(0.5) <= H_6^3(0.5)")), "{failing:?}");

    let table = hyperquant(&["hmn-table", "--n", "3", "--alpha", "0.3", "--perturb-hm", "2", "--no-timing"]);
    assert_eq!(table.status.code(), Some(1));
}

#[test]
fn reports_are_deterministic() {
    let args = [
        "search",
        "--n",
        "4",
        "--alpha",
        "0.1,0.3",
        "--samples",
        "3000",
        "--seed",
        "9",
        "--no-timing",
    ];
    let a = hyperquant(&args);
    let mut single: Vec<&str> = args.to_vec();
    single.extend(["--workers", "1"]);
    let b = hyperquant(&single);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let v = json(&a);
    assert_eq!(v["results"][0]["seed"], 9);
    assert_eq!(v["results"][0]["partitions_examined"], 3001);

    let lemmas = ["check-lemmas", "--n", "3", "--seed", "4", "--format", "csv", "--no-timing"];
    assert_eq!(hyperquant(&lemmas).stdout, hyperquant(&lemmas).stdout);
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(hyperquant(&["search", "--alpha", "0.7"]).status.code(), Some(2));
    assert_eq!(hyperquant(&["search", "--n", "0"]).status.code(), Some(2));
    assert_eq!(hyperquant(&["search", "--n", "3", "--cells", "9"]).status.code(), Some(2));
    assert_eq!(hyperquant(&["hmn-table", "--n", "3", "--m", "2..9"]).status.code(), Some(2));
    assert_eq!(hyperquant(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(hyperquant(&["bms-verify"]).status.code(), Some(2));
    assert_eq!(hyperquant(&["search", "--budget", "0"]).status.code(), Some(2));
}

#[test]
fn budget_exceeded_exits_3() {
    assert_eq!(hyperquant(&["search", "--n", "5", "--alpha", "0.1"]).status.code(), Some(3));
    assert_eq!(
        hyperquant(&["verify-theorem", "--n", "3", "--alpha", "0.1", "--budget", "100"]).status.code(),
        Some(3)
    );
    let env = Command::new(env!("CARGO_BIN_EXE_hyperquant"))
        .args(["verify-theorem", "--n", "3", "--alpha", "0.1"])
        .env("HYPERQUANT_BUDGET", "100")
        .output()
        .unwrap();
    assert_eq!(env.status.code(), Some(3));
}

#[test]
fn shift_trace() {
    let out = hyperquant(&["shift", "--n", "3", "--set", "100,010,111", "--alpha", "0.1", "--no-timing"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let result: Vec<&str> = v["results"]["result"]
        .as_array()
        .unwrap()
        .iter()
        .map(|w| w.as_str().unwrap())
        .collect();
    assert_eq!(result, ["000", "010", "001"]);
    let entropies = v["results"]["traces"][0]["entropies"].as_array().unwrap();
    assert!(entropies.windows(2).all(|w| w[1].as_f64() <= w[0].as_f64()));

    let random = hyperquant(&["shift", "--n", "5", "--random-size", "11", "--seed", "3", "--no-timing"]);
    assert_eq!(random.status.code(), Some(0));
}

#[test]
fn bms_verify_from_file() {
    let dir = std::env::temp_dir().join(format!("hyperquant-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let channel = dir.join("channel.json");
    std::fs::write(&channel, r#"{"components": [{"w": 0.5, "t": 0.02}, {"w": 0.5, "t": 0.2}]}"#).unwrap();
    let report = dir.join("report.json");
    let out = hyperquant(&[
        "bms-verify",
        "--channel",
        channel.to_str().unwrap(),
        "--n",
        "3",
        "--samples",
        "50",
        "--output",
        report.to_str().unwrap(),
        "--no-timing",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_slice(&std::fs::read(&report).unwrap()).unwrap();
    let c = v["results"]["capacity"].as_f64().unwrap();
    let expected = 1.0 - 0.5 * h(0.02) - 0.5 * h(0.2);
    assert!((c - expected).abs() < 1e-12);
    assert_eq!(v["results"]["quantizers"].as_array().unwrap().len(), 50);

    std::fs::write(&channel, r#"{"components": [{"w": 0.5, "t": 0.1}]}"#).unwrap();
    let bad = hyperquant(&["bms-verify", "--channel", channel.to_str().unwrap()]);
    assert_eq!(bad.status.code(), Some(2));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn bec_projection_attains_capacity() {
    let out = hyperquant(&["bms-verify", "--bec", "0.7", "--n", "2", "--samples", "20", "--no-timing"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let info = v["results"]["projection"]["info_bms"].as_f64().unwrap();
    assert!((info - 0.3).abs() < 1e-9);
}
