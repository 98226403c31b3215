mod report;

use std::fs;
use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use carnot_jets::contact::{self, ContactVerdict, Deprolonged, PolyMap};
use carnot_jets::embed::embed;
use carnot_jets::hd::{format_tensor, hd_basis};
use carnot_jets::io::{self as cio, algebra_to_json, point_from_json, point_to_json, rats_to_json};
use carnot_jets::jet::{JetPoint, JetSpace, Provenance};
use carnot_jets::par::{self, ExecMode};
use carnot_jets::pbw::{format_uea, tau, tau_table};
use carnot_jets::polyjet::{coordinate_names, dual_poly_basis, taylor, WPoly};
use carnot_jets::rat::{self, Rat};
use carnot_jets::{Error, Result, StratAlg};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

#[derive(Parser, Debug)]
#[command(name = "carnot-jets", version, about = "Jet spaces over Carnot groups in exact rational arithmetic")]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    format: Format,
    /// Write output to a file instead of stdout.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    /// Run every loop sequentially.
    #[arg(long, global = true)]
    sequential: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Check Jacobi, grading, bracket generation and the bracket decomposition.
    Validate { alg: String },
    /// BCH product of two elements, or the symbolic product when none are given.
    Bch {
        alg: String,
        /// Comma-separated rationals.
        x: Option<String>,
        y: Option<String>,
    },
    /// Coefficients of tau on all words of length m.
    TauTable { alg: String, m: u32 },
    /// Basis A_I of HD^m.
    HdBasis { alg: String, m: usize },
    /// Homogeneous polynomials dual to the PBW operators of degree m.
    DualPolyBasis {
        alg: String,
        m: u32,
        /// Base point, comma-separated rationals (default: identity).
        #[arg(long)]
        point: Option<String>,
    },
    /// Homogeneous Taylor components of a polynomial up to degree m.
    Taylor {
        alg: String,
        m: u32,
        /// W-valued polynomial JSON, inline or file.
        #[arg(long)]
        poly: String,
        #[arg(long)]
        point: String,
    },
    /// Structure constants of the jet algebra in its layered basis.
    JetAlgebra { alg: String, w: usize, m: usize },
    /// Group product of two jet points.
    JetMul {
        alg: String,
        w: usize,
        m: usize,
        #[arg(long)]
        p: String,
        #[arg(long)]
        q: String,
    },
    /// Exponential of a jet algebra element, or its inverse with --log.
    JetExp {
        alg: String,
        w: usize,
        m: usize,
        #[arg(long)]
        x: String,
        #[arg(long)]
        log: bool,
    },
    /// Symbolic contact test of a polynomial map.
    ContactCheck {
        #[arg(long)]
        map: String,
    },
    /// Prolong a contact map of J^m at a point of J^(m+1).
    Prolong {
        alg: String,
        w: usize,
        m: usize,
        #[arg(long)]
        map: String,
        #[arg(long)]
        point: String,
    },
    /// Factor a contact map of J^(m+1) through J^m.
    Deprolong {
        #[arg(long)]
        map: String,
    },
    /// Embed a step s+1 algebra into jets over its step s quotient.
    Embed { alg: String },
    /// Worked tables for the first Heisenberg group.
    HeisenbergReport,
}

struct Output {
    json: Value,
    text: String,
    code: u8,
}

impl Output {
    fn ok(json: Value, text: String) -> Self {
        Output { json, text, code: 0 }
    }
}

/// Inline JSON when the argument starts with `{` or `[`, else a file path.
fn read_json(arg: &str) -> Result<Value> {
    let t = arg.trim_start();
    let src = if t.starts_with('{') || t.starts_with('[') {
        arg.to_string()
    } else {
        fs::read_to_string(arg).map_err(|e| Error::Parse(format!("{arg}: {e}")))?
    };
    serde_json::from_str(&src).map_err(|e| Error::Parse(format!("{arg}: {e}")))
}

fn parse_coords(s: &str) -> Result<Vec<Rat>> {
    if s.trim().is_empty() {
        return Ok(Vec::new());
    }
    s.split(',').map(rat::parse).collect()
}

fn coords_for(alg: &StratAlg, s: &str) -> Result<Vec<Rat>> {
    let v = parse_coords(s)?;
    if v.len() != alg.dim() {
        return Err(Error::DimensionMismatch { expected: alg.dim(), got: v.len() });
    }
    Ok(v)
}

fn point_text(space: &JetSpace, p: &JetPoint) -> String {
    let alg = space.alg();
    let mut s = format!("base: {}\n", alg.format_elem(&p.base));
    for (d, t) in space.stack_tensors(&p.stack).iter().enumerate() {
        s.push_str(&format!("A^{d}: {}\n", format_tensor(alg, t)));
    }
    s
}

fn map_text(f: &PolyMap) -> String {
    let names = f.space().coord_names();
    f.comps().iter().zip(&names).map(|(p, n)| format!("{n}' = {}\n", p.format_with(&names))).collect()
}

fn wpoly_text(f: &WPoly, names: &[String]) -> String {
    let parts: Vec<String> = f.comps.iter().map(|p| p.format_compact(names)).collect();
    if parts.len() == 1 {
        parts.into_iter().next().unwrap()
    } else {
        format!("({})", parts.join(", "))
    }
}

fn validate(alg_src: &str) -> Result<Output> {
    let alg = cio::load_algebra_unchecked(alg_src)?;
    let rep = alg.validate();
    let checks = [
        ("jacobi", &rep.jacobi),
        ("grading", &rep.grading),
        ("bracket_generating", &rep.bracket_generating),
        ("decomposition", &rep.decomposition),
    ];
    let mut obj = Map::new();
    let mut text = format!("{}\n", alg.name());
    for (n, c) in checks {
        obj.insert(n.into(), json!({"pass": c.pass, "detail": c.detail}));
        text.push_str(&format!("{n}: {}", if c.pass { "pass" } else { "FAIL" }));
        if let Some(d) = &c.detail {
            text.push_str(&format!(" ({d})"));
        }
        text.push('\n');
    }
    let json = json!({
        "name": alg.name(),
        "valid": rep.all_pass(),
        "layer_dims": alg.layer_dims(),
        "checks": obj,
    });
    Ok(Output { json, text, code: if rep.all_pass() { 0 } else { 1 } })
}

fn bch(alg_src: &str, x: Option<&str>, y: Option<&str>) -> Result<Output> {
    let alg = cio::load_algebra(alg_src)?;
    match (x, y) {
        (Some(x), Some(y)) => {
            let (x, y) = (coords_for(&alg, x)?, coords_for(&alg, y)?);
            let z = alg.bch(&x, &y)?;
            let text = format!("{}\n", alg.format_elem(&z));
            Ok(Output::ok(json!({"x": rats_to_json(&x), "y": rats_to_json(&y), "bch": rats_to_json(&z)}), text))
        }
        (None, None) => {
            let n = alg.dim();
            let names: Vec<String> =
                (0..2 * n).map(|i| format!("{}{}", if i < n { "x" } else { "y" }, i % n + 1)).collect();
            let table = alg.bch_table();
            let text = table
                .polys
                .iter()
                .enumerate()
                .map(|(k, p)| format!("z{} = {}\n", k + 1, p.format_with(&names)))
                .collect();
            let json = json!({
                "variables": names,
                "components": table.polys.iter().map(cio::poly_to_json).collect::<Vec<_>>(),
            });
            Ok(Output::ok(json, text))
        }
        _ => Err(Error::InvalidArgument("give both x and y, or neither".into())),
    }
}

fn tau_table_cmd(alg_src: &str, m: u32) -> Result<Output> {
    let alg = cio::load_algebra(alg_src)?;
    let t = tau_table(&alg, m);
    let dense = t.matrix.to_dense();
    let words: Vec<Vec<usize>> = t.words.iter().map(|w| w.iter().map(|i| i + 1).collect()).collect();
    let json = json!({
        "m": m,
        "words": words,
        "multi_indices": t.indices.iter().map(|i| i.0.clone()).collect::<Vec<_>>(),
        "matrix": dense.iter().map(|r| rats_to_json(r)).collect::<Vec<_>>(),
    });
    let mut text = String::new();
    for w in &t.words {
        let word: Vec<&str> = w.iter().map(|&i| alg.labels()[i].as_str()).collect();
        text.push_str(&format!("τ({}) = {}\n", word.join("⊗"), format_uea(&alg, &tau(&alg, w)?)));
    }
    Ok(Output::ok(json, text))
}

fn hd_basis_cmd(alg_src: &str, m: usize) -> Result<Output> {
    let alg = cio::load_algebra(alg_src)?;
    let basis = hd_basis(&alg, m);
    let mut list = Vec::new();
    let mut text = String::new();
    for (i, t) in &basis {
        list.push(json!({
            "multi_index": i.0,
            "label": format!("A_{}", i.format()),
            "tensor": cio::tensor_to_json(&alg, t),
        }));
        text.push_str(&format!("A_{} = {}\n", i.format(), format_tensor(&alg, t)));
    }
    Ok(Output::ok(Value::Array(list), text))
}

fn dual_poly_cmd(alg_src: &str, m: u32, point: Option<&str>) -> Result<Output> {
    let alg = cio::load_algebra(alg_src)?;
    let p = match point {
        Some(s) => coords_for(&alg, s)?,
        None => alg.zero_elem(),
    };
    let names = coordinate_names(&alg);
    let basis = dual_poly_basis(&alg, &p, m)?;
    let mut list = Vec::new();
    let mut text = String::new();
    for (i, poly) in &basis {
        let s = poly.format_compact(&names);
        list.push(json!({
            "multi_index": i.0,
            "operator": i.format_operator(alg.labels()),
            "poly": cio::poly_to_json(poly),
            "text": s,
        }));
        text.push_str(&format!("P_{} = {s}\n", i.format()));
    }
    Ok(Output::ok(json!({"point": rats_to_json(&p), "basis": list}), text))
}

fn wdim_of(v: &Value) -> usize {
    v.as_object()
        .and_then(|o| o.values().next())
        .and_then(|c| c.as_array().map(|a| a.len()))
        .unwrap_or(1)
}

fn taylor_cmd(alg_src: &str, m: u32, poly: &str, point: &str) -> Result<Output> {
    let alg = cio::load_algebra(alg_src)?;
    let v = read_json(poly)?;
    let f = cio::wpoly_from_json(&v, alg.dim(), wdim_of(&v))?;
    let p = coords_for(&alg, point)?;
    let names = coordinate_names(&alg);
    let comps = taylor(&alg, &f, &p, m)?;
    let mut obj = Map::new();
    let mut text = String::new();
    for (k, c) in comps.iter().enumerate() {
        obj.insert(k.to_string(), cio::wpoly_to_json(c));
        text.push_str(&format!("P^{k} = {}\n", wpoly_text(c, &names)));
    }
    Ok(Output::ok(json!({"point": rats_to_json(&p), "components": obj}), text))
}

fn space(alg_src: &str, w: usize, m: usize) -> Result<Arc<JetSpace>> {
    JetSpace::new(&cio::load_algebra(alg_src)?, w, m)
}

fn jet_algebra_cmd(alg_src: &str, w: usize, m: usize) -> Result<Output> {
    let sp = space(alg_src, w, m)?;
    let ja = sp.jet_algebra()?;
    let rep = ja.alg.validate();
    if !rep.all_pass() {
        return Err(Error::Certificate(format!("jet algebra fails validation: {:?}", rep.failures())));
    }
    let names = sp.coord_names();
    let prov: Vec<Value> = ja
        .provenance
        .iter()
        .map(|p| match p {
            Provenance::Base(b) => json!({"base": b + 1}),
            Provenance::Hd { degree, index, w } => {
                let idx = &sp.hd().degree(*degree).indices[*index];
                json!({"degree": degree, "multi_index": idx.0, "w": w + 1})
            }
        })
        .collect();
    let json = json!({
        "algebra": algebra_to_json(&ja.alg),
        "layer_dims": ja.layer_dims(),
        "provenance": prov,
        "product_coordinates": names,
    });
    let mut text = format!("{}\nlayer dims: {:?}\n", ja.alg.name(), ja.layer_dims());
    let labels = ja.alg.labels();
    for (i, j, b) in ja.alg.structure() {
        let mut x = ja.alg.zero_elem();
        for (k, c) in b {
            x[k] = c;
        }
        text.push_str(&format!("[{}, {}] = {}\n", labels[i], labels[j], ja.alg.format_elem(&x)));
    }
    Ok(Output::ok(json, text))
}

fn jet_mul_cmd(alg_src: &str, w: usize, m: usize, p: &str, q: &str) -> Result<Output> {
    let sp = space(alg_src, w, m)?;
    let p = point_from_json(&sp, &read_json(p)?)?;
    let q = point_from_json(&sp, &read_json(q)?)?;
    let r = sp.mul(&p, &q)?;
    Ok(Output::ok(point_to_json(&sp, &r), point_text(&sp, &r)))
}

fn jet_exp_cmd(alg_src: &str, w: usize, m: usize, x: &str, log: bool) -> Result<Output> {
    let sp = space(alg_src, w, m)?;
    let x = point_from_json(&sp, &read_json(x)?)?;
    let r = if log {
        let (b, s) = sp.log(&x);
        JetPoint { base: b, stack: s }
    } else {
        sp.exp(&x.base, &x.stack)
    };
    Ok(Output::ok(point_to_json(&sp, &r), point_text(&sp, &r)))
}

fn load_map(arg: &str) -> Result<PolyMap> {
    let v = read_json(arg)?;
    let sp = cio::map_space_from_json(&v)?;
    cio::map_from_json(&sp, &v)
}

fn contact_cmd(map: &str) -> Result<Output> {
    let f = load_map(map)?;
    let names = f.space().coord_names();
    Ok(match f.is_contact() {
        ContactVerdict::Certified(ids) => {
            let text = format!("contact: certified\n{}", ids.iter().map(|s| format!("  {s}\n")).collect::<String>());
            Output::ok(json!({"contact": true, "certificate": ids}), text)
        }
        ContactVerdict::Violation { field, form, witness } => {
            let w = witness.format_with(&names);
            let text = format!("contact: violated\n  {form}(F_* {field}) = {w}\n");
            let json = json!({
                "contact": false,
                "field": field,
                "form": form,
                "witness": cio::poly_to_json(witness),
                "witness_text": w,
            });
            Output { json, text, code: 2 }
        }
    })
}

fn prolong_cmd(alg_src: &str, w: usize, m: usize, map: &str, point: &str) -> Result<Output> {
    let sp = space(alg_src, w, m)?;
    let f = cio::map_from_json(&sp, &read_json(map)?)?;
    if let ContactVerdict::Violation { field, form, .. } = f.is_contact() {
        return Err(Error::Obstruction(format!("map is not contact: {form}(F_* {field}) != 0")));
    }
    let hat = sp.higher()?;
    let ph = point_from_json(&hat, &read_json(point)?)?;
    let r = contact::prolong_point(&f, &ph)?;
    Ok(Output::ok(point_to_json(&hat, &r), point_text(&hat, &r)))
}

fn deprolong_cmd(map: &str) -> Result<Output> {
    let f = load_map(map)?;
    let d = contact::deprolong(&f)?;
    let hyp = |h: &Option<contact::Hypotheses>| match h {
        Some(h) => json!({"dim_w_gt_one": h.wdim_gt_one, "v1_nondegenerate": h.v1_nondegenerate}),
        None => Value::Null,
    };
    let desc = d.describe(f.space());
    Ok(match &d {
        Deprolonged::Factored { map, hypotheses } => {
            let json = json!({"factored": true, "map": cio::map_to_json(map), "hypotheses": hyp(hypotheses)});
            Output::ok(json, format!("{desc}\n{}", map_text(map)))
        }
        Deprolonged::Obstructed { component, variable, derivative, hypotheses } => {
            let names = f.space().coord_names();
            let json = json!({
                "factored": false,
                "component": names[*component],
                "variable": names[*variable],
                "derivative": cio::poly_to_json(derivative),
                "hypotheses": hyp(hypotheses),
                "description": desc,
            });
            Output { json, text: format!("obstruction: {desc}\n"), code: 2 }
        }
    })
}

fn embed_cmd(alg_src: &str) -> Result<Output> {
    let g = cio::load_algebra(alg_src)?;
    let e = embed(&g)?;
    let q = &e.quotient;
    let names = coordinate_names(q);
    let mut images = Vec::new();
    let mut text = format!(
        "{} -> J^{}({}; V{})\n",
        g.name(),
        e.space.order(),
        q.name(),
        g.step()
    );
    for (i, im) in e.images.iter().enumerate() {
        let label = &g.labels()[i];
        let tensors = e.tensors(i);
        let mut ml = Map::new();
        for (d, t) in tensors.iter().enumerate() {
            if !t.is_zero() {
                ml.insert(d.to_string(), cio::tensor_to_json(q, t));
            }
        }
        let poly_text = wpoly_text(&im.elem.poly, &names);
        let ml_text = tensors
            .get(im.degree)
            .map(|t| format_tensor(q, t))
            .unwrap_or_else(|| "0".into());
        images.push(json!({
            "basis": label,
            "layer": im.layer,
            "degree": im.degree,
            "base": rats_to_json(&im.elem.base),
            "polynomial": cio::wpoly_to_json(&im.elem.poly),
            "polynomial_text": poly_text,
            "multilinear": ml,
            "multilinear_text": ml_text,
            "coords": rats_to_json(&im.coords),
        }));
        text.push_str(&format!(
            "φ({label}) = ({}; {poly_text}) ~ A^{} = {ml_text}\n",
            q.format_elem(&im.elem.base),
            im.degree
        ));
    }
    let certs: Vec<Value> =
        e.certificates.iter().map(|c| json!({"name": c.name, "checked": c.checked, "pass": true})).collect();
    for c in &e.certificates {
        text.push_str(&format!("certificate {}: pass ({} checks)\n", c.name, c.checked));
    }
    let json = json!({
        "algebra": g.name(),
        "quotient": algebra_to_json(q),
        "target": {"W": e.space.wdim(), "m": e.space.order()},
        "images": images,
        "certificates": certs,
    });
    Ok(Output::ok(json, text))
}

fn run(cli: &Cli) -> Result<Output> {
    match &cli.cmd {
        Cmd::Validate { alg } => validate(alg),
        Cmd::Bch { alg, x, y } => bch(alg, x.as_deref(), y.as_deref()),
        Cmd::TauTable { alg, m } => tau_table_cmd(alg, *m),
        Cmd::HdBasis { alg, m } => hd_basis_cmd(alg, *m),
        Cmd::DualPolyBasis { alg, m, point } => dual_poly_cmd(alg, *m, point.as_deref()),
        Cmd::Taylor { alg, m, poly, point } => taylor_cmd(alg, *m, poly, point),
        Cmd::JetAlgebra { alg, w, m } => jet_algebra_cmd(alg, *w, *m),
        Cmd::JetMul { alg, w, m, p, q } => jet_mul_cmd(alg, *w, *m, p, q),
        Cmd::JetExp { alg, w, m, x, log } => jet_exp_cmd(alg, *w, *m, x, *log),
        Cmd::ContactCheck { map } => contact_cmd(map),
        Cmd::Prolong { alg, w, m, map, point } => prolong_cmd(alg, *w, *m, map, point),
        Cmd::Deprolong { map } => deprolong_cmd(map),
        Cmd::Embed { alg } => embed_cmd(alg),
        Cmd::HeisenbergReport => {
            let text = report::heisenberg_report()?;
            Ok(Output::ok(json!({"report": text}), text))
        }
    }
}

fn emit(cli: &Cli, out: &Output) -> std::io::Result<()> {
    let body = match (cli.format, &cli.cmd) {
        (_, Cmd::HeisenbergReport) | (Format::Text, _) => out.text.clone(),
        (Format::Json, _) => {
            let mut s = serde_json::to_string_pretty(&out.json).expect("serializable");
            s.push('\n');
            s
        }
    };
    match &cli.output {
        Some(p) => fs::write(p, body),
        None => std::io::stdout().lock().write_all(body.as_bytes()),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    if cli.sequential {
        par::set_mode(ExecMode::Sequential);
    }
    match run(&cli) {
        Ok(out) => {
            if let Err(e) = emit(&cli, &out) {
                eprintln!("error: {e}");
                return ExitCode::from(1);
            }
            ExitCode::from(out.code)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
