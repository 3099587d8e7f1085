use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use xlie::catalog;
use xlie::doc;
use xlie::FieldSpec;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_xlie"));
    c.env_remove("XLIE_MAX_DIM");
    c
}

fn scratch(name: &str) -> PathBuf {
    let dir = Path::new(env!("CARGO_TARGET_TMPDIR"))
        .join("cli")
        .join(name);
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn run(args: &[&str]) -> (i32, Value, String) {
    let out = bin().args(args).output().unwrap();
    decode(out)
}

fn decode(out: Output) -> (i32, Value, String) {
    let stdout = String::from_utf8(out.stdout).unwrap();
    let value = if stdout.trim().is_empty() {
        Value::Null
    } else {
        serde_json::from_str(&stdout).unwrap()
    };
    (
        out.status.code().unwrap(),
        value,
        String::from_utf8(out.stderr).unwrap(),
    )
}

fn emit(dir: &Path, name: &str, field: &str) -> String {
    let path = dir.join(format!("{name}.{field}.json"));
    let out = bin()
        .args(["catalog", "emit", name, "--field", field])
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    std::fs::write(&path, &out.stdout).unwrap();
    path.to_str().unwrap().to_string()
}

fn write(dir: &Path, name: &str, v: &Value) -> String {
    let path = dir.join(name);
    std::fs::write(&path, serde_json::to_string_pretty(v).unwrap()).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn validate_catalog_emission() {
    let dir = scratch("validate");
    let h = emit(&dir, "id-h3", "Q");
    let (code, r, _) = run(&["validate", &h]);
    assert_eq!(code, 0);
    assert_eq!(r["verdict"]["status"], "verified");
    assert_eq!(r["schema_version"], 1);
    assert_eq!(r["command"], "validate");
    assert_eq!(r["inputs"][0]["sha256"].as_str().unwrap().len(), 64);
    assert_eq!(r["result"]["predicates"]["simply_connected"], true);
    assert!(r.get("wall_time_us").is_none());

    let (code, r, _) = run(&["--timing", "validate", &h]);
    assert_eq!(code, 0);
    assert!(r["wall_time_us"].is_u64());
}

#[test]
fn validate_reports_axiom_violations() {
    let dir = scratch("invalid");
    let x = catalog::build_xmod("id-h3", FieldSpec::Rational).unwrap();
    let mut d = doc::xmod_to_doc(&x);
    d.action[0].2[0] = "1/1".into();
    let p = write(&dir, "bad.json", &serde_json::to_value(&d).unwrap());
    let (code, r, _) = run(&["validate", &p]);
    assert_eq!(code, 1);
    assert_eq!(r["verdict"]["status"], "violated");
    assert!(!r["result"]["violations"].as_array().unwrap().is_empty());

    let (code, r, _) = run(&["center", &p]);
    assert_eq!(code, 1);
    assert_eq!(r["verdict"]["status"], "violated");
}

#[test]
fn validate_lie_documents() {
    let dir = scratch("lie");
    let g = emit(&dir, "h3", "F_3");
    let (code, r, _) = run(&["validate", &g]);
    assert_eq!((code, r["result"]["kind"].as_str()), (0, Some("lie")));

    let bad = serde_json::json!({
        "dim": 3, "field": "Q",
        "brackets": [[0, 1, ["0", "0", "1"]], [1, 2, ["0", "1", "0"]]],
    });
    let p = write(&dir, "bad.json", &bad);
    let (code, r, _) = run(&["validate", &p]);
    assert_eq!(code, 1);
    assert!(r["verdict"]["detail"].as_str().unwrap().contains("Jacobi"));
}

#[test]
fn malformed_documents_exit_2_with_position() {
    let dir = scratch("malformed");
    let p = dir.join("broken.json");
    std::fs::write(&p, "{\n  \"field\": \"Q\",\n  \"L1\": [1, 2,\n").unwrap();
    let (code, r, err) = run(&["validate", p.to_str().unwrap()]);
    assert_eq!(code, 2);
    assert_eq!(r, Value::Null);
    assert!(err.contains("line"), "{err}");

    let x = catalog::build_xmod("id-n2", FieldSpec::Rational).unwrap();
    let mut d = serde_json::to_value(doc::xmod_to_doc(&x)).unwrap();
    d["L0"]["brackets"][0][2][1] = "x".into();
    let p = write(&dir, "scalar.json", &d);
    let (code, _, err) = run(&["center", &p]);
    assert_eq!(code, 2);
    assert!(err.contains("L0.brackets[0][2][1]"), "{err}");

    let (code, _, _) = run(&["series", &p, "--kind", "sideways"]);
    assert_eq!(code, 2);
    let (code, _, _) = run(&["validate", dir.join("missing.json").to_str().unwrap()]);
    assert_eq!(code, 2);
}

#[test]
fn max_dim_cap() {
    let dir = scratch("cap");
    let h = emit(&dir, "id-h3", "F_2");
    let out = bin()
        .env("XLIE_MAX_DIM", "5")
        .args(["fingerprint", &h])
        .output()
        .unwrap();
    let (code, _, err) = decode(out);
    assert_eq!(code, 2);
    assert!(err.contains("XLIE_MAX_DIM"));
    let out = bin()
        .env("XLIE_MAX_DIM", "6")
        .args(["fingerprint", &h])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn verify_identity_witness() {
    let dir = scratch("verify");
    let h = emit(&dir, "id-h3", "Q");
    let x = catalog::build_xmod("id-h3", FieldSpec::Rational).unwrap();
    let w = xlie::isoclinism::isoclinism_identity(&x).unwrap();
    let wp = write(
        &dir,
        "w.json",
        &serde_json::to_value(doc::witness_to_doc(&w, true)).unwrap(),
    );
    let (code, r, _) = run(&["isoclinic", "verify", &h, &h, &wp]);
    assert_eq!(code, 0);
    assert_eq!(r["verdict"]["status"], "verified");

    let mut bad = doc::witness_to_doc(&w, false);
    bad.xi1[0][0] = "2/1".into();
    let wp = write(&dir, "bad.json", &serde_json::to_value(bad).unwrap());
    let (code, r, _) = run(&["isoclinic", "verify", &h, &h, &wp]);
    assert_eq!(code, 1);
    assert_eq!(r["verdict"]["status"], "violated");

    let mut wrong = doc::witness_to_doc(&w, false);
    wrong.eta1.pop();
    let wp = write(&dir, "shape.json", &serde_json::to_value(wrong).unwrap());
    let (code, _, err) = run(&["isoclinic", "verify", &h, &h, &wp]);
    assert_eq!(code, 2);
    assert!(err.contains("eta1"), "{err}");
}

#[test]
fn search_fingerprint_negative() {
    let dir = scratch("negative");
    let h = emit(&dir, "id-h3", "F_2");
    let a = emit(&dir, "id-a3", "F_2");
    let (code, r, _) = run(&["isoclinic", "search", &h, &a, "--budget", "1000"]);
    assert_eq!(code, 1);
    assert_eq!(r["verdict"]["status"], "not_isoclinic");
    assert_eq!(r["result"]["reason"], "fingerprint");
    assert!(r["verdict"]["detail"]
        .as_str()
        .unwrap()
        .starts_with("fingerprint"));
}

#[test]
fn search_budget_exit_3() {
    let dir = scratch("budget");
    let h = emit(&dir, "id-h3", "F_2");
    let ha = emit(&dir, "id-h3+a1", "F_2");
    let (code, r, _) = run(&["isoclinic", "search", &h, &ha, "--budget", "1"]);
    assert_eq!(code, 3);
    assert_eq!(r["verdict"]["status"], "budget_exhausted");
}

#[test]
fn search_over_q_is_a_usage_error() {
    let dir = scratch("q");
    let h = emit(&dir, "id-h3", "Q");
    let (code, _, err) = run(&["isoclinic", "search", &h, &h]);
    assert_eq!(code, 2);
    assert!(err.contains("finite field"), "{err}");
}

#[test]
fn search_reports_replay_through_verify() {
    let dir = scratch("replay");
    let h = emit(&dir, "id-h3", "F_2");
    let ha = emit(&dir, "id-h3+a1", "F_2");
    let rp = dir.join("report.json");
    let rp = rp.to_str().unwrap();
    let (code, r, _) = run(&["--out", rp, "isoclinic", "search", &h, &ha]);
    assert_eq!(code, 0);
    assert_eq!(r["result"]["witness"]["verified"], true);
    let saved: Value = serde_json::from_str(&std::fs::read_to_string(rp).unwrap()).unwrap();
    assert_eq!(saved, r);
    let (code, v, _) = run(&["isoclinic", "verify", &h, &ha, rp]);
    assert_eq!(code, 0);
    assert_eq!(v["verdict"]["status"], "verified");
    assert_eq!(v["result"]["witness"], r["result"]["witness"]);
}

#[test]
fn search_is_deterministic_across_jobs() {
    let dir = scratch("jobs");
    let h = emit(&dir, "id-h3", "F_2");
    let ha = emit(&dir, "id-h3+a1", "F_2");
    let (_, one, _) = run(&["isoclinic", "search", &h, &ha, "--jobs", "1"]);
    let (_, again, _) = run(&["isoclinic", "search", &h, &ha, "--jobs", "1"]);
    let (_, four, _) = run(&["isoclinic", "search", &h, &ha, "--jobs", "4"]);
    assert_eq!(one, again);
    assert_eq!(one["result"], four["result"]);
}

#[test]
fn computed_modules_replay_through_validate() {
    let dir = scratch("modules");
    let h = emit(&dir, "id-h3", "Q");
    for args in [
        vec!["quotient", h.as_str(), "--by", "center"],
        vec!["center", h.as_str()],
        vec!["commutator", h.as_str()],
        vec!["actor", h.as_str()],
        vec!["actor", h.as_str(), "--class"],
    ] {
        let name = format!("{}.json", args.join("_").replace(['/', '.'], ""));
        let out = dir.join(name);
        let out = out.to_str().unwrap();
        let mut full = vec!["--out", out];
        full.extend(&args);
        let (code, _, err) = run(&full);
        assert_eq!(code, 0, "{args:?}: {err}");
        let (code, r, _) = run(&["validate", out]);
        assert_eq!(code, 0, "{args:?}");
        assert_eq!(r["verdict"]["status"], "verified");
    }
}

#[test]
fn computations_report_expected_dimensions() {
    let dir = scratch("dims");
    let h = emit(&dir, "id-h3", "Q");
    let s = emit(&dir, "id-sl2", "Q");
    let (_, r, _) = run(&["center", &h]);
    assert_eq!(r["result"]["dims"], serde_json::json!([1, 1]));
    let (_, r, _) = run(&["commutator", &h]);
    assert_eq!(r["result"]["dims"], serde_json::json!([1, 1]));
    let (_, r, _) = run(&["series", &h, "--kind", "lc"]);
    assert_eq!(
        (
            r["result"]["nilpotent"].as_bool(),
            r["result"]["index"].as_u64()
        ),
        (Some(true), Some(2))
    );
    let (_, r, _) = run(&["series", &s, "--kind", "derived"]);
    assert_eq!(r["result"]["solvable"], false);
    let (_, r, _) = run(&["der", &s, "--kind", "whitehead"]);
    assert_eq!(r["result"]["dim"], 3);
    assert_eq!(r["result"]["kind"], "whitehead");
    let (_, r, _) = run(&["der", &h, "--kind", "xmod-class"]);
    assert_eq!(r["result"]["dim"], 2);
    let (_, r, _) = run(&["actor", &h, "--inner"]);
    assert_eq!(r["result"]["inner"]["dims"], serde_json::json!([2, 2]));
    assert_eq!(r["result"]["inner_is_ideal_of_class"], true);
    let (_, r, _) = run(&["fingerprint", &h]);
    assert_eq!(r["result"]["commutator"], serde_json::json!([1, 1]));
}

#[test]
fn catalog_commands() {
    let (code, r, _) = run(&["catalog", "list"]);
    assert_eq!(code, 0);
    let names: Vec<&str> = r["result"]["entries"]
        .as_array()
        .unwrap()
        .iter()
        .map(|e| e["name"].as_str().unwrap())
        .collect();
    assert!(names.contains(&"id-h3") && names.contains(&"sl2"));
    let (code, _, err) = run(&["catalog", "emit", "sl2", "--field", "F_2"]);
    assert_eq!(code, 2, "{err}");
    let (code, _, _) = run(&["catalog", "emit", "nonesuch"]);
    assert_eq!(code, 2);
}

#[test]
fn no_files_without_out() {
    let dir = scratch("nofiles");
    let src = scratch("nofiles-src");
    let h = emit(&src, "id-h3", "F_2");
    for args in [
        vec!["validate", h.as_str()],
        vec!["actor", h.as_str(), "--inner"],
        vec!["isoclinic", "search", h.as_str(), h.as_str()],
        vec!["catalog", "list"],
    ] {
        let out = bin().current_dir(&dir).args(&args).output().unwrap();
        assert!(out.status.success());
    }
    assert_eq!(std::fs::read_dir(&dir).unwrap().count(), 0);
}
