use std::path::PathBuf;
use std::process::{Command, Output};

fn corpus(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("corpus").join(name)
}

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

fn pandora(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pandora"))
        .args(args)
        .env_remove("PANDORA_BUDGET")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn json(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stdout).expect("json output")
}

fn write_temp(dir: &tempfile::TempDir, name: &str, text: &str) -> String {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p.display().to_string()
}

#[test]
fn analyze_two_point_item() {
    let o = pandora(&["analyze", corpus("two_point.json").to_str().unwrap(), "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    let row = &v["items"][0];
    assert_eq!(row["mu"]["value"], 5.0);
    assert_eq!(row["u_rsv"]["value"], 4.0);
    assert_eq!(row["u_bkp"]["value"], 6.0);
    assert!((row["p_hedge"]["value"].as_f64().unwrap() - 5.0 / 13.0).abs() < 1e-12);
    assert!((row["alpha_local"]["value"].as_f64().unwrap() - 15.0 / 13.0).abs() < 1e-12);
    assert_eq!(row["never_inspect"], false);
}

#[test]
fn analyze_point_mass_never_inspects() {
    let o = pandora(&["analyze", corpus("point_mass.json").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let row = text.lines().find(|l| l.starts_with("0 ")).unwrap();
    assert!(row.ends_with("true"), "{row}");
    let v = json(&pandora(&["analyze", corpus("point_mass.json").to_str().unwrap(), "--json"]));
    assert_eq!(v["items"][0]["p_hedge"]["value"], 0.0);
    assert_eq!(v["items"][0]["alpha_local"]["value"], 1.0);
}

#[test]
fn malformed_probabilities_cite_the_item() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_temp(
        &dir,
        "bad.json",
        r#"{"version": "1", "items": [
            {"cost": 1, "dist": [{"value": 1, "prob": 1}]},
            {"cost": 1, "dist": [{"value": 1, "prob": 0.5}, {"value": 2, "prob": 0.4}]}]}"#,
    );
    let o = pandora(&["analyze", &path]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("item 1"), "{}", stderr(&o));
}

#[test]
fn unknown_fields_are_named_with_position() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_temp(
        &dir,
        "bad.json",
        "{\"version\": \"1\",\n \"items\": [{\"cost\": 1, \"dist\": [{\"value\": 1, \"prob\": 1}], \"colour\": 3}]}",
    );
    let o = pandora(&["analyze", &path]);
    assert_eq!(o.status.code(), Some(2));
    let err = stderr(&o);
    assert!(err.contains("unknown field `colour`") && err.contains("line 2"), "{err}");
}

#[test]
fn bounds_on_worked_instance() {
    let v = json(&pandora(&["bounds", corpus("worked.json").to_str().unwrap(), "--json"]));
    let bounds = v["bounds"].as_array().unwrap();
    assert_eq!(bounds[0]["kind"], "E[min W^OI]");
    assert_eq!(bounds[0]["value"]["exact"], "9/2");
    assert_eq!(bounds[1]["value"]["exact"], "9/2");
    assert_eq!(bounds[2]["value"]["exact"], "125/26");
    assert_eq!(v["oracle"]["opt_noi"]["exact"], "9/2");
    assert!(v["notes"][0].as_str().unwrap().contains("coincides"));
}

#[test]
fn bounds_on_rank_one_matroid() {
    let v = json(&pandora(&["bounds", corpus("rank_one.json").to_str().unwrap(), "--json"]));
    assert_eq!(v["bounds"][0]["kind"], "E[Z^OI]");
    assert_eq!(v["bounds"][0]["value"]["exact"], "11/2");
}

#[test]
fn simulate_local_hedging_exactly() {
    let o = pandora(&[
        "simulate",
        corpus("worked.json").to_str().unwrap(),
        "--policy",
        "local-hedging",
        "--exact",
        "--json",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["policies"][0]["value"]["exact"], "125/26");
    assert_eq!(v["ratios"][0]["ceiling"]["exact"], "15/13");
    assert_eq!(v["status"], "PASS");
}

#[test]
fn simulate_weitzman_on_single_item() {
    let v = json(&pandora(&[
        "simulate",
        corpus("two_point.json").to_str().unwrap(),
        "--policy",
        "weitzman",
        "--json",
    ]));
    assert_eq!(v["policies"][0]["value"]["value"], 7.0);
}

#[test]
fn simulate_prints_traces() {
    let o = pandora(&[
        "simulate",
        corpus("worked.json").to_str().unwrap(),
        "--policy",
        "lh",
        "--mc",
        "--trials",
        "1000",
        "--seed",
        "4",
        "--trace",
        "3",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().filter(|l| l.starts_with("trace local-hedging")).count(), 3);
}

#[test]
fn simulate_output_is_reproducible() {
    let path = corpus("uniform_k2.json");
    let args = ["simulate", path.to_str().unwrap(), "--mc", "--trials", "20000", "--seed", "9", "--json"];
    let a = pandora(&args);
    let b = pandora(&args);
    let mut threaded: Vec<&str> = args.to_vec();
    threaded.extend(["--threads", "3"]);
    let c = pandora(&threaded);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(a.stdout, c.stdout);
}

#[test]
fn unknown_policy_is_a_usage_error() {
    let o = pandora(&["simulate", corpus("worked.json").to_str().unwrap(), "--policy", "greedy"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("greedy"));
}

#[test]
fn budget_exhaustion_exits_three() {
    let o = pandora(&["simulate", corpus("worked.json").to_str().unwrap(), "--budget", "1"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("--mc"), "{}", stderr(&o));
    let o = Command::new(env!("CARGO_BIN_EXE_pandora"))
        .args(["bounds", corpus("uniform_k2.json").to_str().unwrap()])
        .env("PANDORA_BUDGET", "2")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn monte_carlo_bounds_need_no_budget() {
    let o = pandora(&[
        "bounds",
        corpus("uniform_k2.json").to_str().unwrap(),
        "--mc",
        "--trials",
        "5000",
        "--budget",
        "2",
        "--json",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["method"], "monte-carlo");
    assert!(v["bounds"][0]["stderr"].as_f64().unwrap() > 0.0);
}

#[test]
fn verify_shipped_corpus() {
    let o = pandora(&["verify", "--corpus", &format!("{}/corpus", env!("CARGO_MANIFEST_DIR"))]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("verify: PASS"));
}

#[test]
fn verify_random_instances() {
    let o = pandora(&["verify", "--random", "200", "--seed", "42", "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["instances"], 200);
    assert_eq!(v["status"], "PASS");
}

#[test]
fn verify_flags_corrupted_alpha() {
    let o = pandora(&["verify", fixture("corrupted_alpha.json").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let text = stdout(&o);
    assert!(text.contains("FAIL local_approximation"), "{text}");
    assert!(text.contains("verify: FAIL"));
}

#[test]
fn verify_without_sources_is_a_usage_error() {
    assert_eq!(pandora(&["verify"]).status.code(), Some(2));
}

#[test]
fn facility_location_has_bounds_but_no_policy() {
    let path = corpus("facility_location.json");
    let o = pandora(&["bounds", path.to_str().unwrap(), "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["bounds"][1]["kind"], "E[Z^NOI]");
    let o = pandora(&["simulate", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("no greedy rule"));
}

#[test]
fn help_documents_the_random_generator() {
    let o = pandora(&["verify", "--help"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("0.5 grid"));
}
