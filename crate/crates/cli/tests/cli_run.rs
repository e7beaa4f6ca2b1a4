use serde_json::{json, Value};

use opgeom::{Method, Operator};
use opgeom_cli::{run, Command, Format, RunConfig};

fn call(cfg: &RunConfig, input: Value) -> (i32, Value) {
    let (code, out) = run(cfg, input.to_string().as_bytes());
    (code, serde_json::from_slice(&out).expect("output is JSON"))
}

fn e2() -> Value {
    json!({"kind": "euclidean", "dim": 2})
}

fn op(matrix: Value, space: Value) -> Value {
    json!({"operator": {"matrix": matrix, "domain": space.clone(), "codomain": space}})
}

#[test]
fn classify_diag_one_half() {
    let (code, v) = call(&RunConfig::new(Command::Classify), op(json!([[1, 0], [0, 0.5]]), e2()));
    assert_eq!(code, 0);
    assert_eq!(v["status"], "not_extreme");
    assert_eq!(v["case"], "I");
    assert_eq!(v["epsilon"], 0.5);
    assert_eq!(v["T1"], json!([[1.0, 0.0], [0.0, 0.75]]));
    assert_eq!(v["T2"], json!([[1.0, 0.0], [0.0, 0.25]]));
}

#[test]
fn bj_l1_pair() {
    let input = json!({"space": {"kind": "lp", "p": 1, "dim": 2}, "x": [1, 1], "y": [0, 1]});
    let (code, v) = call(&RunConfig::new(Command::Bj), input);
    assert_eq!(code, 0);
    assert_eq!(v["orthogonal"], false);
    assert!((v["min_value"].as_f64().unwrap() - 1.0).abs() < 1e-9);
}

#[test]
fn error_codes_and_exit_status() {
    let (code, v) = call(&RunConfig::new(Command::Classify), op(json!([[1, 0], [0]]), e2()));
    assert_eq!((code, v["error"].as_str()), (2, Some("dimension_mismatch")));

    let (code, out) = run(&RunConfig::new(Command::NormOp), b"{not json");
    let v: Value = serde_json::from_slice(&out).unwrap();
    assert_eq!((code, v["error"].as_str()), (2, Some("malformed_json")));

    let l1 = json!({"kind": "lp", "p": 1, "dim": 2});
    let input = json!({"operator": {"matrix": [[1, 0], [0, 1]], "domain": l1, "codomain": l1}, "x": [1, 0]});
    let (code, v) = call(&RunConfig::new(Command::Thm21), input);
    assert_eq!((code, v["error"].as_str()), (2, Some("hypothesis_violation")));

    let (code, v) = call(&RunConfig::new(Command::Witness), op(json!([[1, 0], [0, 1]]), e2()));
    assert_eq!((code, v["error"].as_str()), (2, Some("isometry_has_no_witness")));

    let (code, v) = call(&RunConfig::new(Command::SearchExcon), json!({"space": e2()}));
    assert_eq!((code, v["error"].as_str()), (2, Some("refused")));

    let mut cfg = RunConfig::new(Command::Norm);
    cfg.tol = 0.0;
    let (code, v) = call(&cfg, json!({"space": e2(), "v": [3, 4]}));
    assert_eq!((code, v["error"].as_str()), (2, Some("invalid_config")));
}

#[test]
fn norm_and_operator_norm() {
    let (code, v) = call(&RunConfig::new(Command::Norm), json!({"space": e2(), "v": [3, 4]}));
    assert_eq!((code, v["norm"].as_f64()), (0, Some(5.0)));

    let mut cfg = RunConfig::new(Command::NormOp);
    cfg.method = Method::Vertex;
    let sq = json!({"kind": "lp", "p": "inf", "dim": 2});
    let (code, v) = call(&cfg, op(json!([[1, 1], [0, 1]]), sq));
    assert_eq!(code, 0);
    assert_eq!(v["value"], 2.0);
    assert_eq!(v["method"], "vertex");
    assert_eq!(v["certified"], true);

    cfg.method = Method::Spectral;
    let (code, v) = call(&cfg, op(json!([[1, 1], [0, 1]]), json!({"kind": "lp", "p": 1, "dim": 2})));
    assert_eq!((code, v["error"].as_str()), (2, Some("hypothesis_violation")));
}

#[test]
fn basis_with_verification() {
    let mut cfg = RunConfig::new(Command::Basis);
    cfg.verify = true;
    let (code, v) = call(&cfg, op(json!([[3, 0], [0, 2]]), e2()));
    assert_eq!(code, 0);
    assert_eq!(v["image_norms"], json!([3.0, 2.0]));
    assert_eq!(v["verification"]["orthogonal_images"], true);
    assert_eq!(v["svd_comparison"]["rank"], 2);
}

#[test]
fn attainment_and_membership() {
    let (code, v) = call(&RunConfig::new(Command::Attain), op(json!([[2, 0], [0, 1]]), e2()));
    assert_eq!(code, 0);
    assert_eq!(v["exhaustive"], true);
    assert_eq!(v["euclidean_subspace"], json!([[1.0, 0.0]]));

    let mut input = op(json!([[2, 0], [0, 1]]), e2());
    input["x"] = json!([1, 0]);
    let (code, v) = call(&RunConfig::new(Command::Thm21), input);
    assert_eq!((code, &v["member"]), (0, &json!(true)));
}

#[test]
fn counterexample_from_flag_or_input() {
    let mut cfg = RunConfig::new(Command::Counterexample);
    cfg.space = Some(r#"{"kind": "lp", "p": "inf", "dim": 2}"#.into());
    let (code, out) = run(&cfg, b"");
    assert_eq!(code, 0);
    let a: Value = serde_json::from_slice(&out).unwrap();
    assert_eq!(a["operator"]["matrix"], json!([[1.0, 0.0], [1.0, 0.0]]));
    assert_eq!(a["ty_norm"], 0.0);

    let (code, b) = call(&RunConfig::new(Command::Counterexample), json!({"space": {"kind": "lp", "p": "inf"}}));
    assert_eq!(code, 0);
    assert_eq!(a, b);
}

#[test]
fn thm27_lists() {
    let cfg = RunConfig::new(Command::Thm27);
    let (code, v) = call(&cfg, json!({"spaces": []}));
    assert_eq!(code, 0);
    assert_eq!(v["rows"], json!([]));

    let spaces = json!({"spaces": [
        {"kind": "lp", "p": "inf", "dim": 2},
        {"kind": "lp", "p": 1, "dim": 2},
        {"kind": "lp", "p": 4, "dim": 2},
        {"kind": "lp", "p": 2, "dim": 2},
    ]});
    let (code, v) = call(&cfg, spaces);
    assert_eq!(code, 0);
    let rows = v["rows"].as_array().unwrap();
    let found: Vec<bool> = rows.iter().map(|r| r["found_extreme_nonisometry"].as_bool().unwrap()).collect();
    assert_eq!(found, vec![true, true, true, false]);
    let protocols: Vec<&str> = rows.iter().map(|r| r["protocol"].as_str().unwrap()).collect();
    assert_eq!(protocols, vec!["lemma21", "lemma21", "search", "euclidean_negative"]);
}

#[test]
fn output_is_deterministic() {
    for command in [Command::Classify, Command::Attain, Command::NormOp] {
        let mut cfg = RunConfig::new(command);
        cfg.seed = 42;
        let input = op(json!([[0.3, -0.2], [0.1, 0.4]]), json!({"kind": "lp", "p": 3, "dim": 2}));
        let bytes = input.to_string();
        assert_eq!(run(&cfg, bytes.as_bytes()), run(&cfg, bytes.as_bytes()));
    }
    let mut cfg = RunConfig::new(Command::SearchExcon);
    cfg.seed = 9;
    cfg.budget = 50;
    let input = br#"{"space": {"kind": "lp", "p": 3, "dim": 2}}"#;
    assert_eq!(run(&cfg, input), run(&cfg, input));
}

#[test]
fn reported_operators_parse_back() {
    let mut cfg = RunConfig::new(Command::SearchExcon);
    cfg.budget = 100;
    let (code, v) = call(&cfg, json!({"space": {"kind": "lp", "p": 4, "dim": 2}}));
    assert_eq!(code, 0);
    let found = serde_json::from_value::<Operator>(v["found"]["operator"].clone()).unwrap();
    let again = serde_json::to_value(&found).unwrap();
    assert_eq!(again, v["found"]["operator"]);

    // the witness pair is itself valid classifier input
    let (_, w) = call(&RunConfig::new(Command::Witness), op(json!([[1, 0], [0, 0.5]]), e2()));
    let (code, v) = call(&RunConfig::new(Command::Classify), op(w["T1"].clone(), e2()));
    assert_eq!(code, 0);
    assert_eq!(v["status"], "not_extreme");
}

#[test]
fn text_format_is_derived_from_json() {
    let mut cfg = RunConfig::new(Command::Norm);
    cfg.format = Format::Text;
    let (code, out) = run(&cfg, json!({"space": e2(), "v": [3, 4]}).to_string().as_bytes());
    assert_eq!(code, 0);
    assert_eq!(String::from_utf8(out).unwrap(), "norm: 5.0\n");
}
