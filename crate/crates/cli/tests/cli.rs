use std::process::{Command, Output};

use carnot_jets::algebra::catalog::abelian;
use carnot_jets::contact::{counterexample_automorphism, PolyMap};
use carnot_jets::io::{map_to_json, point_from_json, point_to_json};
use carnot_jets::jet::{JetPoint, JetSpace};
use carnot_jets::rat::{int, rat};
use carnot_jets::catalog;
use serde_json::Value;

fn cli(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_carnot-jets")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json_of(args: &[&str]) -> Value {
    let o = cli(args);
    assert_eq!(o.status.code(), Some(0), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    serde_json::from_str(&stdout(&o)).unwrap()
}

fn r(s: &str) -> Value {
    Value::Array(vec![Value::String(s.into())])
}

#[test]
fn hd_basis_order_three() {
    let v = json_of(&["hd-basis", "heisenberg(1)", "3"]);
    let list = v.as_array().unwrap();
    assert_eq!(list.len(), 6);
    let a011 = list.iter().find(|e| e["label"] == "A_(0,1,1)").unwrap();
    let t = a011["tensor"].as_object().unwrap();
    assert_eq!(t["XYY"], r("-2/1"));
    assert_eq!(t["YXY"], r("-1/1"));
    let nonzero = t.values().filter(|c| c[0] != "0/1").count();
    assert_eq!(nonzero, 2);
    let text = stdout(&cli(&["hd-basis", "heisenberg(1)", "3", "--format", "text"]));
    assert!(text.contains("A_(1,0,1) = -2X*⊗X*⊗Y* - X*⊗Y*⊗X*\n"));
}

#[test]
fn dual_poly_basis_order_three() {
    let text = stdout(&cli(&["dual-poly-basis", "heisenberg(1)", "3", "--format", "text"]));
    assert!(text.contains("P_(0,1,1) = yz - xy^2/2\n"), "{text}");
    let v = json_of(&["dual-poly-basis", "heisenberg(1)", "3"]);
    let texts: Vec<&str> = v["basis"].as_array().unwrap().iter().map(|e| e["text"].as_str().unwrap()).collect();
    assert_eq!(texts, ["x^3/6", "x^2y/2", "xy^2/2", "y^3/6", "xz - x^2y/2", "yz - xy^2/2"]);
}

#[test]
fn embed_heisenberg() {
    let v = json_of(&["embed", "heisenberg(1)"]);
    let im = v["images"].as_array().unwrap();
    assert_eq!(im.len(), 3);
    assert_eq!(im[0]["basis"], "X");
    assert_eq!(im[0]["base"], serde_json::json!(["1/1", "0/1"]));
    assert_eq!(im[0]["polynomial"]["0,1"], r("1/2"));
    assert_eq!(im[0]["multilinear"]["1"]["Y"], r("1/2"));
    assert_eq!(im[0]["multilinear"]["1"]["X"], r("0/1"));
    assert_eq!(im[1]["polynomial"]["1,0"], r("-1/2"));
    assert_eq!(im[2]["polynomial"]["0,0"], r("1/1"));
    assert_eq!(im[2]["base"], serde_json::json!(["0/1", "0/1"]));
    let certs: Vec<&str> =
        v["certificates"].as_array().unwrap().iter().map(|c| c["name"].as_str().unwrap()).collect();
    assert_eq!(certs, ["homogeneity", "morphism", "injectivity", "strata"]);
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(cli(&[]).status.code(), Some(1));
    assert_eq!(cli(&["no-such-command"]).status.code(), Some(1));
    assert_eq!(cli(&["hd-basis", "heisenberg(1)"]).status.code(), Some(1));
    assert_eq!(cli(&["hd-basis", "not_an_algebra", "2"]).status.code(), Some(1));
    assert_eq!(cli(&["bch", "heisenberg(1)", "1,2", "3"]).status.code(), Some(1));
    assert_eq!(cli(&["jet-mul", "heisenberg(1)", "1", "1", "--p", "{", "--q", "{}"]).status.code(), Some(1));
    assert_eq!(cli(&["--help"]).status.code(), Some(0));
}

#[test]
fn invalid_algebra_fails_validation() {
    let bad = r#"{"name":"bad","labels":["X","Y","Z"],"weights":[1,1,1],"brackets":{"1,2":[{"k":3,"c":"1/1"}]}}"#;
    let dir = std::env::temp_dir().join(format!("cj-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("bad.json");
    std::fs::write(&path, bad).unwrap();
    let o = cli(&["validate", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["valid"], false);
    assert_eq!(v["checks"]["grading"]["pass"], false);
    assert_eq!(cli(&["validate", "heisenberg(1)"]).status.code(), Some(0));
}

#[test]
fn non_member_point_exits_two() {
    let p = r#"{"base":["0","0","0"],"stack":{"3":{"XXY":["1/1"]}}}"#;
    let id = r#"{"base":["0","0","0"],"stack":{}}"#;
    let o = cli(&["jet-mul", "heisenberg(1)", "1", "3", "--p", p, "--q", id]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("not in HD"));
}

#[test]
fn counterexample_deprolong_exits_two() {
    let ce = counterexample_automorphism(&abelian(1).unwrap()).unwrap();
    let map = map_to_json(&ce.map).to_string();
    let c = json_of(&["contact-check", "--map", &map]);
    assert_eq!(c["contact"], true);
    let o = cli(&["deprolong", "--map", &map]);
    assert_eq!(o.status.code(), Some(2));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["factored"], false);
    assert_eq!(v["hypotheses"]["dim_w_gt_one"], false);
    assert_eq!(v["hypotheses"]["v1_nondegenerate"], false);
}

#[test]
fn contact_violation_exits_two() {
    let alg = catalog("heisenberg(1)").unwrap();
    let sp = JetSpace::new(&alg, 1, 1).unwrap();
    let id = PolyMap::identity(&sp);
    let mut v = map_to_json(&id);
    // shift F^0 by x
    v["F^0"][0] = serde_json::json!({"0,0,0,1,0,0": "1/1", "1,0,0,0,0,0": "1/1"});
    let o = cli(&["contact-check", "--map", &v.to_string()]);
    assert_eq!(o.status.code(), Some(2));
    let out: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(out["contact"], false);
    assert_eq!(out["form"], "omega^0");
}

fn translation_point(sp: &JetSpace) -> JetPoint {
    let mut p = sp.identity();
    p.base = vec![int(1), rat(-1, 2), int(2)];
    p.stack[0] = vec![int(3)];
    p.stack[1] = vec![rat(1, 3), int(-1)];
    p
}

#[test]
fn prolong_translation_and_outside_domain() {
    let alg = catalog("heisenberg(1)").unwrap();
    let sp = JetSpace::new(&alg, 1, 1).unwrap();
    let hat = sp.higher().unwrap();
    let q = translation_point(&sp);
    let f = PolyMap::left_translation(&sp, &q).unwrap();
    let mut ph = hat.identity();
    ph.base = vec![rat(1, 2), int(1), int(0)];
    ph.stack[2] = vec![int(1), int(2), int(-1), int(0)];
    let map = map_to_json(&f).to_string();
    let point = point_to_json(&hat, &ph).to_string();
    let out = json_of(&["prolong", "heisenberg(1)", "1", "1", "--map", &map, "--point", &point]);
    let got = point_from_json(&hat, &out).unwrap();
    let mut qh = q.clone();
    qh.stack.push(vec![int(0); hat.block_dim(2)]);
    let expected = PolyMap::left_translation(&hat, &qh).unwrap().apply(&ph).unwrap();
    assert_eq!(got, expected);

    let k = PolyMap::constant(&sp, &q).unwrap();
    let map = map_to_json(&k).to_string();
    let o = cli(&["prolong", "heisenberg(1)", "1", "1", "--map", &map, "--point", &point]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn json_round_trips() {
    let alg = catalog("heisenberg(1)").unwrap();
    let sp = JetSpace::new(&alg, 1, 1).unwrap();
    let p = translation_point(&sp);
    let pj = point_to_json(&sp, &p).to_string();
    let id = point_to_json(&sp, &sp.identity()).to_string();
    let prod = json_of(&["jet-mul", "heisenberg(1)", "1", "1", "--p", &pj, "--q", &id]);
    assert_eq!(point_from_json(&sp, &prod).unwrap(), p);
    assert_eq!(point_to_json(&sp, &point_from_json(&sp, &prod).unwrap()), prod);

    let logged = json_of(&["jet-exp", "heisenberg(1)", "1", "1", "--x", &pj, "--log"]);
    let back = json_of(&["jet-exp", "heisenberg(1)", "1", "1", "--x", &logged.to_string()]);
    assert_eq!(point_from_json(&sp, &back).unwrap(), p);

    let cmds: Vec<Vec<&str>> = vec![
        vec!["validate", "engel"],
        vec!["bch", "heisenberg(1)", "1,0,0", "0,1,0"],
        vec!["bch", "engel"],
        vec!["tau-table", "heisenberg(1)", "3"],
        vec!["hd-basis", "cartan_n23", "2"],
        vec!["dual-poly-basis", "heisenberg(1)", "2", "--point", "1,2,3"],
        vec!["taylor", "heisenberg(1)", "2", "--poly", r#"{"2,0,1":["1/1"]}"#, "--point", "1,0,1"],
        vec!["jet-algebra", "heisenberg(1)", "2", "2"],
        vec!["embed", "engel"],
    ];
    for c in cmds {
        let o = cli(&c);
        assert_eq!(o.status.code(), Some(0), "{c:?}");
        let s = stdout(&o);
        let v: Value = serde_json::from_str(&s).unwrap();
        let again = format!("{}\n", serde_json::to_string_pretty(&v).unwrap());
        assert_eq!(again, s, "{c:?}");
    }
}

#[test]
fn bch_numeric() {
    let v = json_of(&["bch", "heisenberg(1)", "1,0,0", "0,1,0"]);
    assert_eq!(v["bch"], serde_json::json!(["1/1", "1/1", "1/2"]));
}

#[test]
fn tau_table_layout() {
    let v = json_of(&["tau-table", "heisenberg(1)", "2"]);
    assert_eq!(v["words"][1], serde_json::json!([1, 2]));
    assert_eq!(v["multi_indices"][3], serde_json::json!([0, 0, 1]));
    // tau(X⊗Y) = X̃Ỹ - Z̃
    assert_eq!(v["matrix"][1], serde_json::json!(["0/1", "1/1", "0/1", "-1/1"]));
}

#[test]
fn jet_algebra_layers() {
    let v = json_of(&["jet-algebra", "heisenberg(1)", "1", "2"]);
    assert_eq!(v["layer_dims"], serde_json::json!([6, 3, 1]));
    let labels = v["algebra"]["labels"].as_array().unwrap();
    assert!(labels.iter().any(|l| l == "A[(0,0,1)]"));
}

#[test]
fn heisenberg_report_is_byte_stable() {
    let golden = include_str!("data/heisenberg_report.txt");
    let a = cli(&["heisenberg-report"]);
    let b = cli(&["heisenberg-report", "--sequential"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(stdout(&a), golden);
    for line in [
        "  τ(X⊗Y) = Y\u{303}X\u{303} = X\u{303}Y\u{303} - Z\u{303}",
        "  A_(0,0,1) = -X*⊗Y*",
        "dual basis of P^2_e: {x^2/2, xy, y^2/2, z - xy/2}",
        "  z   | 0   | 1/2 | 0   | 1",
        "  X\u{303} = ∂x - y/2 ∂z",
    ] {
        assert!(golden.lines().any(|l| l == line), "{line}");
    }
}

#[test]
fn output_flag_writes_file() {
    let dir = std::env::temp_dir().join(format!("cj-cli-out-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("basis.json");
    let o = cli(&["hd-basis", "heisenberg(1)", "2", "-o", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v.as_array().unwrap().len(), 4);
}
