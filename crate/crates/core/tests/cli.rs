use ramified::cli::run;
use serde_json::Value;

fn data(name: &str) -> String {
    format!("{}/../../data/{name}", env!("CARGO_MANIFEST_DIR"))
}

/// Runs the CLI in-process; returns exit code, stdout, stderr.
fn call(args: &[&str], stdin: &str) -> (i32, String, String) {
    let mut argv = vec!["ramified"];
    argv.extend_from_slice(args);
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = run(argv, &mut stdin.as_bytes(), &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn json(s: &str) -> Value {
    serde_json::from_str(s).unwrap_or_else(|e| panic!("{e}: {s}"))
}

#[test]
fn dimension_prints_bare_integer() {
    let (code, out, _) = call(&["dimension", "--g", "0", "--r", "2", "--m", "4"], "");
    assert_eq!((code, out.as_str()), (0, "2\n"));
    let (code, out, _) = call(&["dimension", "--g", "1", "--r", "3", "--m", "2", "--m", "1", "--blocks", "1,2", "--blocks", "3", "--json"], "");
    assert_eq!(code, 0);
    let v = json(&out);
    // 2 r^2 (g - 1) + 2 + (r^2 - r)(m_1 + m_2) with r = 3, g = 1.
    assert_eq!(v["dimension"], 2 + 6 * 3);
    assert_eq!(v["dim_h1"], v["dimension"]);
}

#[test]
fn kernel_prints_length() {
    let (code, out, _) = call(&["kernel", "--r", "3", "--m", "2"], "");
    assert_eq!((code, out.as_str()), (0, "3\n"));
    let (code, out, _) = call(&["kernel", "--r", "4", "--m", "3", "--seed", "5", "--gauge", "--json"], "");
    assert_eq!(code, 0);
    assert_eq!(json(&out)["length"], 6);
}

#[test]
fn output_is_deterministic() {
    let a = call(&["family", "--grid"], "");
    let b = call(&["family", "--grid"], "");
    assert_eq!(a, b);
    let a = call(&["validate", &data("local.json")], "");
    let b = call(&["validate", &data("local.json")], "");
    assert_eq!(a, b);
}

#[test]
fn malformed_json_reports_position() {
    let (code, out, err) = call(&["exponents", "-"], "{\"type\": \"exponent\",\n  \"r\": 2,\n  \"m\": }");
    assert_eq!(code, 2);
    assert!(out.is_empty());
    let e = json(&err);
    assert_eq!(e["error"], "parse");
    assert_eq!(e["line"], 3);
    assert!(e["column"].as_u64().unwrap() > 0);
}

#[test]
fn schema_errors_carry_a_path() {
    let (code, _, err) = call(&["exponents", "-"], r#"{"type": "exponent", "r": 2, "m": 2, "c": [1, "1/0", 3]}"#);
    assert_eq!(code, 2);
    let e = json(&err);
    assert_eq!(e["error"], "schema");
    assert_eq!(e["path"], "$.c[1]");
    let (code, _, err) = call(&["exponents", "-"], r#"{"type": "exponent", "r": 2, "m": 2, "c": [1, 2]}"#);
    assert_eq!(code, 2);
    assert_eq!(json(&err)["error"], "invalid");
}

#[test]
fn mathematical_failures_exit_one() {
    // c_1 = 0: well formed, but not of generic ramified type.
    let (code, _, err) = call(&["exponents", "-"], r#"{"type": "exponent", "r": 2, "m": 2, "c": [1, 0, 3]}"#);
    assert_eq!(code, 1);
    assert_eq!(json(&err)["error"], "c1_zero");
    let (code, out, _) = call(&["validate", &data("local_mutated.json")], "");
    assert_eq!(code, 1);
    assert_eq!(json(&out)["failed"], serde_json::json!(["pi_well_defined"]));
}

#[test]
fn missing_file_is_an_input_error() {
    let (code, _, err) = call(&["validate", "/nonexistent/input.json"], "");
    assert_eq!(code, 2);
    assert_eq!(json(&err)["error"], "io");
}

#[test]
fn wrong_document_type_is_rejected() {
    let (code, _, err) = call(&["stability", &data("exponent.json")], "");
    assert_eq!(code, 2);
    assert_eq!(json(&err)["error"], "usage");
}

#[test]
fn sample_documents_succeed() {
    for (cmd, file) in [
        ("exponents", "exponent.json"),
        ("exponents", "formal.json"),
        ("exponents", "exponent_set.json"),
        ("exponents", "connection_model.json"),
        ("validate", "local.json"),
        ("validate", "exponent_set.json"),
        ("validate", "connection_model.json"),
        ("validate", "connection_unstable.json"),
        ("stability", "connection_model.json"),
        ("stability", "connection_unstable.json"),
        ("family", "family.json"),
    ] {
        let (code, out, err) = call(&[cmd, &data(file)], "");
        assert_eq!(code, 0, "{cmd} {file}: {err}");
        json(&out);
    }
}

#[test]
fn exponent_round_trip_through_the_cli() {
    let (code, out, _) = call(&["exponents", &data("exponent.json")], "");
    assert_eq!(code, 0);
    let v = json(&out);
    assert_eq!(v["same_orbit"], true);
    assert_eq!(v["input"]["c"], serde_json::json!(["2", "1", "-1", "1/3"]));
}

#[test]
fn stability_verdicts() {
    let (_, out, _) = call(&["stability", &data("connection_model.json")], "");
    assert_eq!(json(&out)["verdict"], "auto_stable");
    let (_, out, _) = call(&["stability", &data("connection_unstable.json")], "");
    let v = json(&out);
    assert_eq!(v["verdict"], "unstable");
    assert_eq!(v["witness"]["sub_slope"], "3/10");
}

#[test]
fn tangent_reports_pairing() {
    let (code, out, err) = call(&["tangent", &data("connection_model.json")], "");
    assert_eq!(code, 0, "{err}");
    let v = json(&out);
    assert_eq!(v["dimension"], 2);
    assert_eq!(v["rank"], 2);
    assert_eq!(v["skew_check"], true);
    assert_eq!(v["certificate"].as_array().unwrap().len(), 3);
}

#[test]
fn family_grid_counts() {
    let (code, out, _) = call(&["family", "--grid"], "");
    assert_eq!(code, 0);
    let v = json(&out);
    assert_eq!(v["counts"], serde_json::json!({"ramified": 1, "unramified": 4, "regular_singular": 7}));
    let (code, _, _) = call(&["family", "--grid", &data("family.json")], "");
    assert_eq!(code, 2);
}

#[test]
fn float_rendering_is_opt_in() {
    let (_, out, _) = call(&["--float", "exponents", &data("exponent.json")], "");
    let v = json(&out);
    assert_eq!(v["input"]["c"][3]["exact"], "1/3");
    let approx = v["input"]["c"][3]["approx"][0].as_f64().unwrap();
    assert!((approx - 1.0 / 3.0).abs() < 1e-12);
}

#[test]
fn fields_with_radicals_parse() {
    // Q(i)(sqrt 2): coordinates over the power basis of the tower.
    let doc = r#"{"type": "exponent", "field": {"cyclotomic": 4, "radicals": [{"e": 2, "u": [2, 0]}]},
                  "r": 2, "m": 2, "c": [[1, 0, 0, 1], [0, 1, 0, 0], "1/2"]}"#;
    let (code, out, err) = call(&["exponents", "-"], doc);
    assert_eq!(code, 0, "{err}");
    assert_eq!(json(&out)["same_orbit"], true);
}
