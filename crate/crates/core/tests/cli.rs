use std::path::Path;
use std::process::{Command, Output};

fn entfid(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_entfid"))
        .args(args)
        .env_remove("ENTFID_SEED")
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

#[test]
fn report_on_replacement_channel() {
    let o = entfid(&["report", "--state", "mixed:d=2", "--channel", "replace_mixed"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v = json(&o);
    assert_eq!(v["fidelity"], 1.0);
    assert_eq!(v["fe_kraus"], 0.25);
    assert_eq!(v["fe_purification"], 0.25);
}

#[test]
fn report_on_identity_channel() {
    let o = entfid(&["report", "--state", "random:d=3,rank=2,seed=4", "--channel", "identity", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.starts_with("quantity,value\n"));
    assert!(text.contains("fidelity,1\n"));
    assert!(text.contains("fe_kraus,1\n"));
}

#[test]
fn report_reads_files_and_names_bad_fields() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"dim": 2, "entries": [[0.9,0],[0,0],[0,0],[0,0]]}"#).unwrap();
    let o = entfid(&["report", "--state", bad.to_str().unwrap(), "--channel", "identity"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("trace"), "{}", stderr(&o));

    let good = dir.path().join("state.json");
    std::fs::write(&good, r#"{"dim": 2, "amplitudes": [[1,0],[0,0]]}"#).unwrap();
    let chan = dir.path().join("chan.json");
    std::fs::write(
        &chan,
        r#"{"dim_in": 2, "dim_out": 2, "kraus": [{"dim": 2, "entries": [[1,0],[0,0],[0,0],[1,0]]}]}"#,
    )
    .unwrap();
    let out = dir.path().join("report.json");
    let o = entfid(&[
        "report",
        "--state",
        good.to_str().unwrap(),
        "--channel",
        chan.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(o.stdout.is_empty());
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(v["fe_kraus"], 1.0);

    let broken = dir.path().join("broken.json");
    std::fs::write(&broken, r#"{"dim_in": 2, "dim_out": 2, "kraus": []}"#).unwrap();
    let o = entfid(&["report", "--state", "mixed:d=2", "--channel", broken.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("kraus"));
}

#[test]
fn malformed_specs_exit_two() {
    for (state, channel) in [
        ("mixed", "identity"),
        ("mixed:d=2", "depolarizing"),
        ("mixed:d=2", "depolarizing:p=2"),
        ("mixed:d=2", "depolarizing:p=0.1,x=1"),
        ("mixed:d=2", "identity:d=3"),
        ("does/not/exist.json", "identity"),
    ] {
        let o = entfid(&["report", "--state", state, "--channel", channel]);
        assert_eq!(o.status.code(), Some(2), "{state} {channel}");
        assert!(stderr(&o).starts_with("error"), "{}", stderr(&o));
    }
    assert_eq!(entfid(&["report"]).status.code(), Some(2));
    assert_eq!(entfid(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn help_documents_conventions() {
    let o = entfid(&["--help"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("squared convention"));
    let o = entfid(&["verify", "--help"]);
    assert!(stdout(&o).contains("property,samples,max_violation,tolerance,pass"));
    let o = entfid(&["sweep", "--help"]);
    assert!(stdout(&o).contains("parameter,fidelity,entanglement_fidelity"));
}

#[test]
fn epr_demo_table() {
    let o = entfid(&["epr-demo"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let rows: Vec<Vec<&str>> = text
        .lines()
        .filter(|l| l.starts_with("E1 ") || l.starts_with("E2 "))
        .map(|l| l.split_whitespace().collect())
        .collect();
    assert_eq!(rows.len(), 4);
    assert_eq!(rows[0], ["E1", "fidelity", "1", "1", "yes"]);
    assert_eq!(rows[1], ["E1", "entanglement_fidelity", "1", "1", "yes"]);
    assert_eq!(rows[2], ["E2", "fidelity", "1", "1", "yes"]);
    assert_eq!(rows[3], ["E2", "entanglement_fidelity", "0.25", "0.25", "yes"]);
}

#[test]
fn epr_demo_search_agrees_and_is_deterministic() {
    let a = entfid(&["epr-demo", "--search", "--seed", "5", "--format", "json"]);
    let b = entfid(&["epr-demo", "--search", "--seed", "5", "--format", "json"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let rows = json(&a);
    let rows = rows.as_array().unwrap();
    assert_eq!(rows.len(), 8);
    for r in rows {
        let (v, e) = (r["value"].as_f64().unwrap(), r["expected"].as_f64().unwrap());
        assert!((v - e).abs() <= 1e-4, "{r}");
    }
}

#[test]
fn seed_from_environment() {
    let run = |seed: Option<&str>| {
        let mut c = Command::new(env!("CARGO_BIN_EXE_entfid"));
        c.args(["verify", "--samples", "3", "--format", "json"]);
        match seed {
            Some(s) => c.env("ENTFID_SEED", s),
            None => c.env_remove("ENTFID_SEED"),
        };
        c.output().unwrap()
    };
    let env7 = run(Some("7"));
    let flag7 = entfid(&["verify", "--samples", "3", "--format", "json", "--seed", "7"]);
    assert_eq!(env7.stdout, flag7.stdout);
    assert_ne!(env7.stdout, run(None).stdout);
}

#[test]
fn verify_default_run_passes() {
    let o = entfid(&["verify"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("property,samples,max_violation,tolerance,pass"));
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert!(rows.len() >= 15);
    assert!(rows.iter().all(|r| r.len() == 5 && r[4] == "true"));
    let mono = rows.iter().find(|r| r[0] == "operation_monotonicity").unwrap();
    assert_eq!(mono[1], "200");
    assert_eq!(entfid(&["verify"]).stdout, o.stdout);
}

#[test]
fn verify_single_sample() {
    let o = entfid(&["verify", "--samples", "1"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).lines().skip(1).all(|l| l.split(',').nth(1) == Some("1")));
}

#[test]
fn verify_flags_faulty_channel() {
    let o = entfid(&["verify", "--samples", "5", "--inject-faulty-channel"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("channel_completeness,5,"));
    assert!(stdout(&o).lines().any(|l| l.ends_with(",false")));
}

#[test]
fn verify_tolerance_overrides() {
    let o = entfid(&["verify", "--samples", "2", "--tol", "fidelity_range=0.5"]);
    assert!(stdout(&o).contains("fidelity_range,2,0,0.5,true"));
    assert_eq!(entfid(&["verify", "--tol", "nonsense=1"]).status.code(), Some(2));
    assert_eq!(entfid(&["verify", "--tol", "fidelity_range"]).status.code(), Some(2));
    assert_eq!(entfid(&["verify", "--dt", "9"]).status.code(), Some(2));
}

#[test]
fn sweep_depolarizing() {
    let o = entfid(&["sweep", "--family", "depolarizing", "--grid", "0,0.5,1"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(
        stdout(&o),
        "parameter,fidelity,entanglement_fidelity\n0,1,1\n0.5,1,0.625\n1,1,0.25\n"
    );
}

#[test]
fn sweep_constant_families() {
    let o = entfid(&["sweep", "--family", "identity", "--grid", "0.1,0.2", "--state", "random:d=3,rank=3,seed=1"]);
    assert_eq!(stdout(&o), "parameter,fidelity,entanglement_fidelity\n0.1,1,1\n0.2,1,1\n");
    let o = entfid(&["sweep", "--family", "replace_mixed", "--grid", "0,0.3,0.9", "--format", "json"]);
    for row in json(&o).as_array().unwrap() {
        assert_eq!(row["fidelity"], 1.0);
        assert_eq!(row["entanglement_fidelity"], 0.25);
    }
}

#[test]
fn sweep_rejects_empty_or_bad_grid() {
    assert_eq!(entfid(&["sweep", "--family", "depolarizing", "--grid", ""]).status.code(), Some(2));
    assert_eq!(entfid(&["sweep", "--family", "depolarizing", "--grid", ","]).status.code(), Some(2));
    assert_eq!(entfid(&["sweep", "--family", "depolarizing", "--grid", "0,x"]).status.code(), Some(2));
    assert_eq!(entfid(&["sweep", "--family", "depolarizing", "--grid", "1.5"]).status.code(), Some(2));
    assert_eq!(entfid(&["sweep", "--family", "teleport", "--grid", "0.5"]).status.code(), Some(2));
}

#[test]
fn kl_check_commands() {
    let o = entfid(&["kl-check", "--channel", "depolarizing:p=0.1", "--samples", "50"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert!((v["epsilon_hat"].as_f64().unwrap() - 0.05).abs() < 1e-9);
    assert!((v["bound"].as_f64().unwrap() - 0.925).abs() < 1e-9);
    assert_eq!(v["states_checked"], 51);
    let o = entfid(&["kl-check", "--channel", "replace_mixed", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("fe_maximally_mixed,0.25\n"));
    assert_eq!(entfid(&["kl-check", "--channel", "nope"]).status.code(), Some(2));
}

#[test]
fn unwritable_output_is_an_input_error() {
    let target = Path::new("/nonexistent-dir/x.csv");
    let o = entfid(&["sweep", "--family", "identity", "--grid", "0", "--out", target.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}
