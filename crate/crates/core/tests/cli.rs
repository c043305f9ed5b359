use std::process::{Command, Output};

use serde_json::Value;

fn teichlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_teichlab"))
        .args(args)
        .env_remove("TEICHLAB_HAHN_CAP")
        .env_remove("TEICHLAB_COEFF_DEGREE")
        .env_remove("TEICHLAB_PADIC_PRECISION")
        .env_remove("TEICHLAB_WITT_LENGTH")
        .env_remove("TEICHLAB_GRID")
        .output()
        .expect("spawn teichlab")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn code(args: &[&str]) -> i32 {
    teichlab(args).status.code().unwrap()
}

fn with_format<'a>(args: &[&'a str], format: &'a str) -> Vec<&'a str> {
    let mut v = args.to_vec();
    v.extend(["--format", format]);
    v
}

fn json(args: &[&str]) -> Value {
    let o = teichlab(&with_format(args, "json"));
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{args:?}: {e}\n{}", stdout(&o)))
}

fn json_numbers(v: &Value, out: &mut Vec<f64>) {
    match v {
        Value::Number(n) => out.push(n.to_string().parse().unwrap()),
        Value::String(s) => out.extend(text_numbers(s)),
        Value::Array(a) => a.iter().for_each(|x| json_numbers(x, out)),
        Value::Object(m) => m.values().for_each(|x| json_numbers(x, out)),
        _ => {}
    }
}

fn number(t: &str) -> Option<f64> {
    match t.split_once('/') {
        Some((n, d)) => Some(n.parse::<f64>().ok()? / d.parse::<f64>().ok()?),
        None => t.parse().ok(),
    }
}

fn text_numbers(text: &str) -> Vec<f64> {
    text.split(|c: char| c.is_whitespace() || ",[]".contains(c))
        .filter_map(number)
        .collect()
}

/// Numbers in rendered table or csv output; header keys are skipped.
fn rendered_numbers(text: &str) -> Vec<f64> {
    text.lines()
        .flat_map(|line| text_numbers(line.split_once(": ").map_or(line, |(_, v)| v)))
        .collect()
}

fn sorted(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(f64::total_cmp);
    v
}

const COMMANDS: &[&[&str]] = &[
    &["places", "--bound", "20"],
    &["height", "--field", "Q", "--z", "5"],
    &["height", "--field", "Q(i)", "--z", "3+2i", "--z", "7", "--frobenius", "2"],
    &["stabilized-height", "--z", "12/35"],
    &["orbit", "--x", "3"],
    &["product-formula", "--field", "Q(sqrt(-1))", "--x", "2+i"],
    &["distance", "--m1", "0", "--m2", "2"],
    &["period-map", "--x", "6"],
    &["frobenioid", "--x", "90/7"],
    &["degree", "--place", "v5", "--order", "3"],
    &["cohomology", "kummer", "--x", "12", "--place", "v3", "--n", "2"],
    &["cohomology", "tate-class", "--param", "v3=243"],
    &["tilt", "artin-hasse", "--p", "3", "--degree", "12"],
    &["tilt", "eval", "--p", "3", "--a", "1*t^1/2"],
    &["tilt", "witt-check", "--p", "2", "--count", "5"],
    &["szpiro", "height", "--matrix", "2,1,1,1", "--winding", "1"],
    &["szpiro", "subadd", "--count", "20", "--seed", "3"],
    &["szpiro", "theta"],
    &["szpiro", "cor312", "--seed", "7", "--ell", "5", "--punctures", "3"],
    &["szpiro", "lattice"],
    &["mutate", "--param", "q1=1/9", "--param", "q2=1/4", "--r", "1"],
];

#[test]
fn every_subcommand_succeeds() {
    for args in COMMANDS {
        let o = teichlab(args);
        assert_eq!(o.status.code(), Some(0), "{args:?}\n{}", String::from_utf8_lossy(&o.stderr));
        assert!(!o.stdout.is_empty(), "{args:?}");
    }
}

#[test]
fn output_is_byte_identical_across_runs() {
    for args in COMMANDS {
        for format in ["table", "json", "csv"] {
            let a = teichlab(&with_format(args, format));
            let b = teichlab(&with_format(args, format));
            assert_eq!(a.stdout, b.stdout, "{args:?} {format}");
        }
    }
}

#[test]
fn json_and_table_carry_the_same_numbers() {
    for args in COMMANDS {
        let mut from_json = Vec::new();
        json_numbers(&json(args), &mut from_json);
        let table = stdout(&teichlab(&with_format(args, "table")));
        let csv = stdout(&teichlab(&with_format(args, "csv")));
        let j = sorted(from_json);
        assert_eq!(j, sorted(rendered_numbers(&table)), "{args:?} table");
        assert_eq!(j, sorted(rendered_numbers(&csv)), "{args:?} csv");
    }
}

#[test]
fn height_of_five_over_q() {
    let o = teichlab(&["height", "--field", "Q", "--z", "5"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("total: 1.6094379124341003e0"), "{text}");
    let v = json(&["height", "--field", "Q", "--z", "5"]);
    let total: f64 = v["total"].to_string().parse().unwrap();
    assert_eq!(total, 5f64.ln());
    let places: Vec<&str> = v["rows"].as_array().unwrap().iter().map(|r| r["place"].as_str().unwrap()).collect();
    assert_eq!(places, ["inf", "v5"]);
}

#[test]
fn product_formula_for_gaussian_integer() {
    let v = json(&["product-formula", "--field", "Q(sqrt(-1))", "--x", "2+i"]);
    assert_eq!(v["pass"], Value::Bool(true));
    assert_eq!(v["exact_cancellation"], Value::Bool(true));
    let residual: f64 = v["residual"].to_string().parse().unwrap();
    assert!(residual < 1e-12);
}

#[test]
fn corollary_chain_passes_and_prints_its_seed() {
    let args = ["szpiro", "cor312", "--seed", "7", "--ell", "5", "--punctures", "3"];
    assert_eq!(code(&args), 0);
    let text = stdout(&teichlab(&args));
    assert!(text.starts_with("command: szpiro cor312\nseed: 7\n"), "{text}");
    assert_eq!(json(&args)["pass"], Value::Bool(true));
}

#[test]
fn randomized_commands_depend_on_the_seed() {
    let a = stdout(&teichlab(&["szpiro", "subadd", "--count", "5", "--seed", "1"]));
    let b = stdout(&teichlab(&["szpiro", "subadd", "--count", "5", "--seed", "2"]));
    assert_ne!(a, b);
    assert!(a.contains("seed: 1"));
}

#[test]
fn exit_codes() {
    assert_eq!(code(&["--help"]), 0);
    assert_eq!(code(&["--version"]), 0);
    assert_eq!(code(&["szpiro", "--help"]), 0);
    assert_eq!(code(&["frobnicate"]), 64);
    assert_eq!(code(&[]), 64);
    assert_eq!(code(&["height"]), 64);
    assert_eq!(code(&["height", "--z", "5", "--format", "xml"]), 64);
    assert_eq!(code(&["product-formula", "--x", "0"]), 1);
    assert_eq!(code(&["height", "--z", "0", "--z", "0"]), 1);
    assert_eq!(code(&["height", "--z", "5", "--field", "Q(cbrt(2))"]), 1);
    assert_eq!(code(&["height", "--z", "5", "--grid", "10"]), 1);
    assert_eq!(code(&["height", "--z", "5", "--witt-length", "4"]), 1);
    assert_eq!(code(&["height", "--z", "5", "--hahn-cap", "0"]), 1);
    // Composite p gives a non-integral series: a failed check, not bad input.
    assert_eq!(code(&["tilt", "artin-hasse", "--p", "4"]), 2);
    assert_eq!(code(&["tilt", "artin-hasse", "--p", "5"]), 0);
}

#[test]
fn usage_errors_go_to_stderr() {
    let o = teichlab(&["frobnicate"]);
    assert!(o.stdout.is_empty());
    assert!(!o.stderr.is_empty());
    let o = teichlab(&["--help"]);
    assert!(stdout(&o).contains("Usage"));
}

#[test]
fn config_file_and_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(&cfg, r#"{"format": "json", "grid": 256, "seed": 11}"#).unwrap();
    let cfg = cfg.to_str().unwrap();

    let v: Value = serde_json::from_slice(&teichlab(&["szpiro", "subadd", "--count", "3", "--config", cfg]).stdout).unwrap();
    assert_eq!(v["seed"].to_string(), "11");
    assert_eq!(v["grid"].to_string(), "256");

    let v: Value =
        serde_json::from_slice(&teichlab(&["szpiro", "subadd", "--count", "3", "--config", cfg, "--seed", "5"]).stdout)
            .unwrap();
    assert_eq!(v["seed"].to_string(), "5");

    let o = Command::new(env!("CARGO_BIN_EXE_teichlab"))
        .args(["szpiro", "subadd", "--count", "3", "--config", cfg])
        .env("TEICHLAB_GRID", "512")
        .output()
        .unwrap();
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["grid"].to_string(), "512");

    let o = Command::new(env!("CARGO_BIN_EXE_teichlab"))
        .args(["szpiro", "subadd", "--count", "3", "--config", cfg, "--grid", "1024"])
        .env("TEICHLAB_GRID", "512")
        .output()
        .unwrap();
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["grid"].to_string(), "1024");

    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"grid": 256, "colour": "red"}"#).unwrap();
    assert_eq!(code(&["places", "--config", bad.to_str().unwrap()]), 1);
    assert_eq!(code(&["places", "--config", "/nonexistent/cfg.json"]), 1);
}

#[test]
fn environment_knob_out_of_range_is_rejected() {
    let o = Command::new(env!("CARGO_BIN_EXE_teichlab"))
        .args(["places"])
        .env("TEICHLAB_PADIC_PRECISION", "0")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(1));
}
