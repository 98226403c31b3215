//! Text tables for the first Heisenberg group, orders 1 to 3.

use std::fmt::Write;
use std::sync::Arc;

use carnot_jets::hd::{format_tensor, hd_basis};
use carnot_jets::pbw::{format_uea, multi_indices, tau, words, MultiIndex};
use carnot_jets::polyjet::{coordinate_names, dual_poly_basis, monomial, pairing_matrix};
use carnot_jets::rat::{one, to_display, zero};

use carnot_jets::{catalog, MPoly, Result, StratAlg};

const TILDE: char = '\u{303}';

fn display_width(s: &str) -> usize {
    s.chars().filter(|c| !('\u{300}'..='\u{36f}').contains(c)).count()
}

fn pad(s: &str, w: usize) -> String {
    let mut out = s.to_string();
    out.extend(std::iter::repeat_n(' ', w.saturating_sub(display_width(s))));
    out
}

fn table(rows: &[Vec<String>]) -> String {
    let cols = rows[0].len();
    let widths: Vec<usize> =
        (0..cols).map(|c| rows.iter().map(|r| display_width(&r[c])).max().unwrap_or(0)).collect();
    let mut out = String::new();
    for (i, r) in rows.iter().enumerate() {
        let cells: Vec<String> = r.iter().zip(&widths).map(|(s, &w)| pad(s, w)).collect();
        let line = format!("  {}", cells.join(" | "));
        out.push_str(line.trim_end());
        out.push('\n');
        if i == 0 {
            let rule: Vec<String> = widths.iter().map(|&w| "-".repeat(w)).collect();
            out.push_str(&format!("  {}\n", rule.join("-+-")));
        }
    }
    out
}

/// `∂x - y/2 ∂z` style rendering of a vector field.
pub fn format_field(coeffs: &[MPoly], names: &[String]) -> String {
    let mut parts: Vec<(bool, String)> = Vec::new();
    for (k, p) in coeffs.iter().enumerate() {
        if p.is_zero() {
            continue;
        }
        let d = format!("∂{}", names[k]);
        let (neg, body) = if p.num_terms() == 1 {
            let c = p.terms().next().unwrap().1.clone();
            let neg = c < zero();
            let mag = if neg { -p } else { p.clone() };
            if mag.is_constant() && mag.constant_term() == one() {
                (neg, d)
            } else {
                (neg, format!("{} {d}", mag.format_compact(names)))
            }
        } else {
            (false, format!("({}) {d}", p.format_compact(names)))
        };
        parts.push((neg, body));
    }
    if parts.is_empty() {
        return "0".into();
    }
    let mut out = String::new();
    for (i, (neg, s)) in parts.into_iter().enumerate() {
        match (i, neg) {
            (0, true) => out.push('-'),
            (0, false) => {}
            (_, true) => out.push_str(" - "),
            (_, false) => out.push_str(" + "),
        }
        out.push_str(&s);
    }
    out
}

fn tensor_word(alg: &StratAlg, w: &[usize]) -> String {
    w.iter().map(|&i| alg.labels()[i].as_str()).collect::<Vec<_>>().join("⊗")
}

fn reversed_product(alg: &StratAlg, w: &[usize]) -> String {
    w.iter().rev().map(|&i| format!("{}{TILDE}", alg.labels()[i])).collect()
}

fn order_section(alg: &Arc<StratAlg>, m: u32, out: &mut String) -> Result<()> {
    let labels = alg.labels();
    let names = coordinate_names(alg);
    let ws = words(alg.rank(), m as usize);
    let idx = multi_indices(alg.weights(), m);
    let ops: Vec<String> = idx.iter().map(|i| i.format_operator(labels)).collect();

    writeln!(out, "== HD^{m} ==").unwrap();
    writeln!(out, "words: {}", ws.iter().map(|w| tensor_word(alg, w)).collect::<Vec<_>>().join(", ")).unwrap();
    writeln!(out, "multi-indices: {}", idx.iter().map(MultiIndex::format).collect::<Vec<_>>().join(", ")).unwrap();
    writeln!(out, "operator basis: {}", ops.join(", ")).unwrap();

    writeln!(out, "tau:").unwrap();
    for w in &ws {
        let rev = reversed_product(alg, w);
        let normal = format_uea(alg, &tau(alg, w)?);
        if rev == normal {
            writeln!(out, "  τ({}) = {rev}", tensor_word(alg, w)).unwrap();
        } else {
            writeln!(out, "  τ({}) = {rev} = {normal}", tensor_word(alg, w)).unwrap();
        }
    }

    writeln!(out, "basis of HD^{m}:").unwrap();
    for (i, t) in hd_basis(alg, m as usize) {
        writeln!(out, "  A_{} = {}", i.format(), format_tensor(alg, &t)).unwrap();
    }

    writeln!(out, "pairing b̃^I x^J (e), rows x^J, columns b̃^I:").unwrap();
    let (_, pm) = pairing_matrix(alg, m);
    let mut rows = vec![std::iter::once(String::new()).chain(ops.iter().cloned()).collect::<Vec<_>>()];
    for (r, j) in idx.iter().enumerate() {
        let mut row = vec![monomial(j).format_compact(&names)];
        row.extend((0..idx.len()).map(|c| to_display(&pm.get(r, c))));
        rows.push(row);
    }
    out.push_str(&table(&rows));

    let dual = dual_poly_basis(alg, &alg.zero_elem(), m)?;
    let polys: Vec<String> = dual.iter().map(|(_, p)| p.format_compact(&names)).collect();
    writeln!(out, "dual basis of P^{m}_e: {{{}}}", polys.join(", ")).unwrap();
    Ok(())
}

pub fn heisenberg_report() -> Result<String> {
    let alg = catalog("heisenberg(1)")?;
    let labels = alg.labels();
    let names = coordinate_names(&alg);
    let mut out = String::new();
    writeln!(out, "Heisenberg algebra {}", alg.name()).unwrap();
    writeln!(out, "basis: {}", labels.join(", ")).unwrap();
    for (i, j, b) in alg.structure() {
        let mut x = alg.zero_elem();
        for (k, c) in b {
            x[k] = c;
        }
        writeln!(out, "[{},{}] = {}", labels[i], labels[j], alg.format_elem(&x)).unwrap();
    }
    for (k, d) in alg.layer_dims().iter().enumerate() {
        let r = alg.layer(k as u32 + 1);
        writeln!(out, "V{} = span{{{}}} (dim {d})", k + 1, labels[r].join(", ")).unwrap();
    }
    writeln!(out, "left-invariant fields in exponential coordinates ({}):", names.join(", ")).unwrap();
    let fields = alg.invariant_fields();
    for (i, f) in fields.left.iter().enumerate() {
        writeln!(out, "  {}{TILDE} = {}", labels[i], format_field(f, &names)).unwrap();
    }
    for m in 1..=3 {
        out.push('\n');
        order_section(&alg, m, &mut out)?;
    }
    Ok(out)
}
