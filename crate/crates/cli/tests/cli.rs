use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;
use transfinite_euclid::Ordinal;

fn teuclid(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_teuclid"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = teuclid(args);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn json(args: &[&str]) -> Value {
    let mut all = args.to_vec();
    all.extend(["--format", "json"]);
    serde_json::from_str(&stdout(&all)).unwrap()
}

fn schema(name: &str) -> jsonschema::Validator {
    let path: PathBuf = [env!("CARGO_MANIFEST_DIR"), "schemas", &format!("{name}.json")]
        .iter()
        .collect();
    let text = std::fs::read_to_string(path).unwrap();
    jsonschema::validator_for(&serde_json::from_str(&text).unwrap()).unwrap()
}

fn assert_valid(name: &str, v: &Value) {
    let errors: Vec<String> = schema(name).iter_errors(v).map(|e| e.to_string()).collect();
    assert!(errors.is_empty(), "{name}: {errors:?}");
}

fn floor_log2(x: i64) -> u32 {
    63 - x.unsigned_abs().leading_zeros()
}

/// Degree read off a displayed polynomial in `t`.
fn text_degree(s: &str) -> u32 {
    s.split(" + ")
        .map(|term| match term.split_once("t^") {
            Some((_, e)) => e.parse().unwrap(),
            None if term.contains('t') => 1,
            None => 0,
        })
        .max()
        .unwrap()
}

#[test]
fn natural_sum_expression() {
    assert_eq!(stdout(&["ord", "eval", "w (+) w"]), "w*2\n");
    assert_eq!(stdout(&["ord", "eval", "1 + w"]), "w\n");
    assert_eq!(stdout(&["ord", "eval", "1 (+) w"]), "w + 1\n");
}

#[test]
fn worked_example_norm() {
    let elem = "x[5,0]*x[1,0] - x[3,0]^2";
    assert_eq!(stdout(&["ring", "norm", elem]), "5\n");
    let v = json(&["ring", "norm", elem]);
    assert_eq!(v["norm"], "5");
    assert_eq!(v["sub"], serde_json::json!(["1", "3", "5"]));
    assert_eq!(v["stage"], 0);
}

#[test]
fn integer_table_matches_binary_logarithm() {
    let table = stdout(&["motzkin", "stratify", "--model", "int:16"]);
    let mut lines = table.lines();
    assert_eq!(lines.next(), Some("element\trank"));
    let rows: Vec<(i64, u32)> = lines
        .map(|l| {
            let (e, r) = l.split_once('\t').unwrap();
            (e.parse().unwrap(), r.parse().unwrap())
        })
        .collect();
    assert_eq!(rows.len(), 32);
    for (x, r) in rows {
        assert_eq!(r, floor_log2(x), "x = {x}");
    }
}

#[test]
fn polynomial_table_matches_degree() {
    let table = stdout(&["motzkin", "stratify", "--model", "poly:2:4"]);
    let rows: Vec<&str> = table.lines().skip(1).collect();
    assert_eq!(rows.len(), 31);
    for l in rows {
        let (e, r) = l.split_once('\t').unwrap();
        assert_eq!(r.parse::<u32>().unwrap(), text_degree(e), "{e}");
    }
}

#[test]
fn outputs_validate_against_schemas() {
    assert_valid("ord_eval", &json(&["ord", "eval", "w^2 (+) w*3 + 1"]));
    assert_valid("norm", &json(&["ring", "norm", "x[w*2,0]*x[3,0] + 1"]));
    assert_valid("division", &json(&["ring", "divide", "x[3,0]", "x[2,0]"]));
    assert_valid("division", &json(&["ring", "divide", "x[1,0]*x[2,0]", "x[1,0]"]));
    assert_valid("trace", &json(&["ring", "gcd", "x[3,0]*x[1,0]", "x[2,0]"]));
    assert_valid("nonmult", &json(&["ring", "demo-nonmult", "5"]));
    assert_valid("monoid", &json(&["ring", "demo-monoid", "z^2*x[1,0]"]));
    assert_valid("stratify", &json(&["motzkin", "stratify", "--model", "poly:3:2"]));
    assert_valid("stratify", &json(&["motzkin", "stratify", "--model", "int:64"]));
    let out = teuclid(&["ring", "norm", "0", "--format", "json"]);
    assert_eq!(out.status.code(), Some(1));
    assert_valid("error", &serde_json::from_slice(&out.stderr).unwrap());
}

#[test]
fn check_all_passes_and_validates() {
    let v = json(&["check", "all", "--seed", "7"]);
    assert_valid("check", &v);
    assert_eq!(v["passed"], true);
    assert_eq!(v["seed"], 7);
}

#[test]
fn output_is_byte_identical_across_runs() {
    for args in [
        &["check", "all", "--seed", "11", "--format", "json"][..],
        &["ring", "gcd", "x[w,0]*x[3,0] + x[2,0]", "x[w,0] + x[1,0]", "--format", "json"][..],
        &["motzkin", "stratify", "--model", "poly:3:3"][..],
    ] {
        let a = teuclid(args);
        let b = teuclid(args);
        assert!(a.status.success());
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}

fn ordinal(v: &Value) -> Ordinal {
    Ordinal::parse(v.as_str().unwrap()).unwrap()
}

#[test]
fn division_descends() {
    let v = json(&["ring", "divide", "x[w*2,0]*x[1,0] + x[5,0]", "x[w,0]*x[3,0]"]);
    let d = ordinal(&v["divisor_norm"]);
    assert_eq!(d.to_string(), "w + 3");
    assert!(ordinal(&v["remainder_norm"]) < d);
}

#[test]
fn trace_norms_strictly_decrease() {
    let v = json(&["ring", "gcd", "x[w,0]*x[2,0] + x[3,0]", "x[w,0] + x[1,0]"]);
    let norms: Vec<Ordinal> = v["norms"].as_array().unwrap().iter().map(ordinal).collect();
    assert!(norms.len() >= 2);
    assert!(norms.windows(2).all(|w| w[0] > w[1]), "{norms:?}");
    assert_eq!(v["steps"].as_array().unwrap().len(), norms.len());
    let last = v["steps"].as_array().unwrap().last().unwrap();
    assert!(last["remainder_norm"].is_null());
}

#[test]
fn variant_demos() {
    let v = json(&["ring", "demo-nonmult", "3"]);
    assert_eq!(v["lhs"], "81");
    assert_eq!(v["rhs"], "256");
    assert_eq!(v["holds"], true);
    assert_eq!(stdout(&["ring", "demo-monoid", "z^3"]), "psi: w*3\nphi: 27\n");
    assert_eq!(stdout(&["ring", "norm", "--variant", "z", "z^4"]), "256\n");
}

#[test]
fn domain_errors_exit_one() {
    for (args, code) in [
        (&["ring", "norm", "0"][..], "ring.zero_element"),
        (&["ring", "norm", "z"][..], "ring.not_variant"),
        (&["ring", "norm", "x[1,0] +* 1"][..], "poly.parse"),
        (&["ring", "norm", "x[w^2,0]"][..], "ring.out_of_range"),
        (&["ring", "divide", "x[1,0]", "0"][..], "ring.zero_divisor"),
        (&["ring", "demo-nonmult", "0"][..], "ring.non_positive"),
        (&["ring", "norm", "--field", "f2", "--variant", "z", "z"][..], "ring.invalid_config"),
        (&["ord", "eval", "w +"][..], "ordinal.parse"),
        (&["motzkin", "stratify", "--model", "int:100", "--max-elements", "10"][..], "motzkin.too_large"),
        (
            &["--budget", "0", "ring", "norm", "x[1,0]^2*x[2,0]^2 + x[1,0]*x[2,0]^3 + x[1,0]^3 + x[2,0] + 1"][..],
            "poly.factorization_incomplete",
        ),
    ] {
        let out = teuclid(args);
        assert_eq!(out.status.code(), Some(1), "{args:?}");
        let err = String::from_utf8(out.stderr).unwrap();
        assert!(err.starts_with(&format!("error[{code}]")), "{args:?}: {err}");
        assert!(out.stdout.is_empty());
    }
}

#[test]
fn unverified_variant_over_finite_field_runs_when_allowed() {
    let args = ["ring", "norm", "--field", "f2", "--variant", "z", "--unverified-minimality", "z^2"];
    assert_eq!(stdout(&args), "4\n");
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        &[][..],
        &["ring"][..],
        &["ring", "frobnicate"][..],
        &["ring", "divide", "x[1,0]"][..],
        &["--field", "f9", "ord", "eval", "1"][..],
        &["--alpha", "w +", "ring", "norm", "x[1,0]"][..],
        &["--format", "yaml", "ord", "eval", "1"][..],
        &["motzkin", "stratify", "--model", "int:x"][..],
        &["--seed", "-1", "check", "all"][..],
    ] {
        assert_eq!(teuclid(args).status.code(), Some(2), "{args:?}");
    }
    assert_eq!(teuclid(&["--help"]).status.code(), Some(0));
}
