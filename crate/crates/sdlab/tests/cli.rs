use std::path::Path;
use std::process::{Command, Output};

fn sdlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sdlab")).args(args).env_remove("SD_LAB_BUDGET").output().unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

/// Regenerate with `UPDATE_GOLDEN=1`.
fn check_golden(name: &str, actual: &[u8]) {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name);
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        std::fs::write(&path, actual).unwrap();
    }
    let expected = std::fs::read(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    assert!(actual == expected.as_slice(), "golden file {name} differs:\n{}", String::from_utf8_lossy(actual));
}

#[test]
fn classify_examples() {
    for (spec, case, witness) in [
        (r#"{"default": 1}"#, 1, serde_json::Value::Null),
        (r#"{"default": 0, "exceptions": {"2": "inf"}}"#, 2, 2.into()),
        (r#"{"default": "inf"}"#, 2, 2.into()),
    ] {
        let out = sdlab(&["classify", "--spec", spec]);
        assert_eq!(code(&out), 0);
        let r = json(&out);
        assert_eq!(r["case"], case, "{spec}");
        assert_eq!(r["witness_prime"], witness);
        assert_eq!(r["config"]["command"], "classify");
    }
}

#[test]
fn verify_exit_codes() {
    let out = sdlab(&["verify", "--construction", "lemma37", "--p", "2", "--q", "3", "--c", "1/2", "--n", "3"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(json(&out)["expectations_met"], true);

    let out = sdlab(&["verify", "--construction", "thm41p2", "--p", "5", "--y0", "1"]);
    assert_eq!(code(&out), 0);
    let r = json(&out);
    assert_eq!(r["worst_residual"], "0(exact)");
    assert_eq!(r["obstruction"]["holds"], true);

    // support unchanged: the equation still holds (see the README)
    let out = sdlab(&["verify", "--construction", "thm41p2", "--p", "5", "--y0", "1", "--tamper", "0:1:3/5"]);
    assert_eq!(code(&out), 0);
    assert_eq!(json(&out)["violation_count"], 0);

    // new support point: violated
    let out = sdlab(&["verify", "--construction", "thm41p2", "--p", "5", "--y0", "1", "--tamper", "1:1/5:1/2"]);
    assert_eq!(code(&out), 1);
    let r = json(&out);
    assert!(r["violation_count"].as_u64().unwrap() > 0);
    assert_eq!(r["expectations_met"], false);

    // f(0) != 1
    let out = sdlab(&["verify", "--construction", "thm41p2", "--p", "3", "--y0", "1", "--tamper", "2:0:1/2"]);
    assert_eq!(code(&out), 1);
}

#[test]
fn config_and_budget_errors_exit_2() {
    for args in [
        vec!["verify", "--construction", "thm41p2", "--p", "5", "--budget", "10"],
        vec!["verify", "--construction", "thm41p2", "--p", "4"],
        vec!["verify", "--construction", "lemma37", "--p", "2", "--q", "2", "--c", "1/2"],
        vec!["verify", "--construction", "lemma37", "--p", "2", "--q", "3"],
        vec!["verify", "--construction", "thm41p2", "--p", "5", "--tamper", "7:1:1"],
        vec!["verify"],
        vec!["classify"],
        vec!["classify", "--spec", r#"{"default": -1}"#],
        vec!["classify", "--spec", r#"{"default": 1}"#, "--format", "csv"],
        vec!["finite", "--group", "0"],
        vec!["finite", "--group", "5", "--n", "3", "--budget", "100"],
        vec!["finite", "--group", "5", "--forms", "four"],
    ] {
        let out = sdlab(&args);
        assert_eq!(code(&out), 2, "{args:?}");
        assert!(!out.stderr.is_empty());
    }
}

#[test]
fn budget_env_var_is_the_fallback_cap() {
    let args = ["verify", "--construction", "thm41p2", "--p", "5"];
    let run = |env: &str, extra: &[&str]| {
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_sdlab"));
        cmd.args(args).args(extra).env("SD_LAB_BUDGET", env);
        code(&cmd.output().unwrap())
    };
    assert_eq!(run("1000", &[]), 2);
    assert_eq!(run("1000000", &[]), 0);
    // an explicit flag wins
    assert_eq!(run("1000", &["--budget", "1000000"]), 0);
    assert_eq!(run("lots", &[]), 2);
}

#[test]
fn build_then_verify_from_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("m.json");
    let path = path.to_str().unwrap();
    let out = sdlab(&["build", "--construction", "thm41p2", "--p", "3", "--y0", "-1", "--out", path]);
    assert_eq!(code(&out), 0);
    let manifest: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    assert_eq!(manifest["forms"], serde_json::json!([["1", "1", "1"], ["1", "-3", "1"], ["1", "1", "-3"]]));

    let out = sdlab(&["verify", "--manifest", path]);
    assert_eq!(code(&out), 0);
    assert_eq!(json(&out)["construction"], manifest["name"]);

    // hand-edited: new support point in the second function
    let mut edited = manifest.clone();
    edited["fs"][1]["entries"].as_array_mut().unwrap().push(serde_json::json!({"point": "1/3", "value": "1/2"}));
    std::fs::write(path, serde_json::to_string(&edited).unwrap()).unwrap();
    let out = sdlab(&["verify", "--manifest", path, "--box-gens", "1,1/3", "--box-bound", "3"]);
    assert_eq!(code(&out), 1);
}

#[test]
fn csv_residual_table() {
    let out = sdlab(&["verify", "--construction", "thm41p2", "--p", "5", "--tamper", "1:1/5:1/2", "--format", "csv"]);
    assert_eq!(code(&out), 1);
    let mut rdr = csv::Reader::from_reader(out.stdout.as_slice());
    assert_eq!(rdr.headers().unwrap(), vec!["point", "lhs", "rhs", "residual"]);
    let rows: Vec<csv::StringRecord> = rdr.records().map(Result::unwrap).collect();
    assert!(!rows.is_empty());
    // rows follow the canonical box order
    assert_eq!((&rows[0][0], &rows[0][1], &rows[0][2]), ("6/5 -1/5 0", "1/8", "0"));
}

#[test]
fn finite_examples() {
    let out = sdlab(&["finite", "--group", "5", "--n", "2", "--seeds", "200"]);
    assert_eq!(code(&out), 0);
    let r = json(&out);
    assert_eq!((r["instances"].as_u64(), r["agreements"].as_u64()), (Some(200), Some(200)));

    let out = sdlab(&["finite", "--group", "4,3", "--mode", "non-idempotent", "--forms", "three", "--seeds", "100"]);
    assert_eq!(code(&out), 0);
    let r = json(&out);
    assert_eq!(r["independent"], 0);
    assert_eq!(r["flagged"], serde_json::json!([]));

    let dir = tempfile::tempdir().unwrap();
    let dists = dir.path().join("haar.json");
    let haar = r#"{"probs": {"(0)": "1/4", "(1)": "1/4", "(2)": "1/4", "(3)": "1/4"}}"#;
    std::fs::write(&dists, format!("[{haar}, {haar}]")).unwrap();
    let dists = dists.to_str().unwrap();
    // forms invertible over Z
    let out = sdlab(&["finite", "--group", "4", "--mode", "given", "--dists", dists, "--forms", "[[1,1],[1,2]]"]);
    assert_eq!(code(&out), 0);
    assert_eq!(json(&out)["results"][0]["independent"], true);
    // ξ1 ± ξ2 share their parity on Z(4)
    let out = sdlab(&["finite", "--group", "4", "--mode", "given", "--dists", dists]);
    assert_eq!(code(&out), 0);
    assert_eq!(json(&out)["results"][0]["independent"], false);
}

#[test]
fn golden_classify() {
    let out = sdlab(&["classify", "--spec", r#"{"default": 1}"#]);
    check_golden("classify_default1.json", &out.stdout);
}

#[test]
fn golden_verify_half_at_y0() {
    let out = sdlab(&["verify", "--construction", "thm41p2", "--p", "5", "--y0", "1"]);
    check_golden("verify_thm41p2_p5.json", &out.stdout);
}

#[test]
fn golden_finite_seeded() {
    let out = sdlab(&["finite", "--group", "5", "--n", "2", "--seeds", "20", "--seed", "42"]);
    check_golden("finite_z5_n2_seed42.json", &out.stdout);
    // same config, same bytes
    let again = sdlab(&["finite", "--group", "5", "--n", "2", "--seeds", "20", "--seed", "42"]);
    assert_eq!(out.stdout, again.stdout);
}
