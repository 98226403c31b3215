//! Library results checked against independent computations: a closed-form BCH built
//! from brackets, derivatives read off from `f(p·exp(t v))`, and hand-written tables.

mod common;

use carnot_jets::embed::{embed, quotient_algebra};
use carnot_jets::hd::{format_tensor, hd_basis, HdSpace};
use carnot_jets::jet::vector_field_bracket;
use carnot_jets::pbw::{multi_indices, tau_table, words, MultiIndex};
use carnot_jets::polyjet::{coordinate_names, dual_poly_basis, left_basis_derive, monomial, pairing_matrix};
use carnot_jets::rat::{int, rat, to_display};
use carnot_jets::{catalog, MPoly, Rat};
use common::*;

const STEP_LE_3: [&str; 6] = ["abelian(3)", "heisenberg(1)", "heisenberg(2)", "engel", "cartan_n23", "heisenberg(3)"];

fn parse_heis(s: &str) -> MPoly {
    // x, y, z monomials with rational coefficients, terms separated by " + "/" - ".
    let mut p = MPoly::zero(3);
    let s = s.replace(" - ", " + -");
    for term in s.split(" + ") {
        let (sign, t) = term.strip_prefix('-').map_or((1, term), |t| (-1, t));
        let (body, den) = t.split_once('/').map_or((t, 1), |(b, d)| (b, d.parse().unwrap()));
        let mut e = vec![0u32; 3];
        let mut chars = body.chars().peekable();
        let mut num = String::new();
        while let Some(c) = chars.peek().copied().filter(char::is_ascii_digit) {
            num.push(c);
            chars.next();
        }
        while let Some(c) = chars.next() {
            let i = "xyz".find(c).unwrap();
            let mut k = 1;
            if chars.peek() == Some(&'^') {
                chars.next();
                k = chars.next().unwrap().to_digit(10).unwrap();
            }
            e[i] += k;
        }
        let n: i64 = if num.is_empty() { 1 } else { num.parse().unwrap() };
        p.add_term(e, rat(sign * n, den));
    }
    p
}

const HEIS_DUAL: [&[&str]; 3] = [
    &["x", "y"],
    &["x^2/2", "xy", "y^2/2", "z - xy/2"],
    &["x^3/6", "x^2y/2", "xy^2/2", "y^3/6", "xz - x^2y/2", "yz - xy^2/2"],
];

const HEIS_HD: [&[&str]; 3] = [
    &["X*", "Y*"],
    &["X*⊗X*", "X*⊗Y* + Y*⊗X*", "Y*⊗Y*", "-X*⊗Y*"],
    &[
        "X*⊗X*⊗X*",
        "X*⊗X*⊗Y* + X*⊗Y*⊗X* + Y*⊗X*⊗X*",
        "X*⊗Y*⊗Y* + Y*⊗X*⊗Y* + Y*⊗Y*⊗X*",
        "Y*⊗Y*⊗Y*",
        "-2X*⊗X*⊗Y* - X*⊗Y*⊗X*",
        "-2X*⊗Y*⊗Y* - Y*⊗X*⊗Y*",
    ],
];

#[test]
fn bch_table_matches_closed_form() {
    for name in STEP_LE_3 {
        let alg = catalog(name).unwrap();
        let n = alg.dim();
        let x: Vec<MPoly> = (0..n).map(|i| MPoly::var(2 * n, i)).collect();
        let y: Vec<MPoly> = (0..n).map(|i| MPoly::var(2 * n, n + i)).collect();
        assert_eq!(alg.bch_table().polys, bch3(&alg, &x, &y), "{name}");
    }
}

#[test]
fn left_invariant_fields_match_flow_derivative() {
    let mut r = rng(11);
    for name in STEP_LE_3 {
        let alg = catalog(name).unwrap();
        for _ in 0..4 {
            let f = random_poly(&mut r, alg.dim(), 3, 5);
            let p = rats(&mut r, alg.dim());
            for i in 0..alg.dim() {
                assert_eq!(left_basis_derive(&alg, i, &f).eval(&p), field_derivative(&alg, &f, &p, i), "{name} b{i}");
            }
        }
    }
}

#[test]
fn heisenberg_fields_in_coordinates() {
    let alg = catalog("heisenberg(1)").unwrap();
    let f = alg.invariant_fields();
    let c = |s: &str| if s == "0" { MPoly::zero(3) } else { parse_heis(s) };
    assert_eq!(f.left[0], vec![c("1"), c("0"), c("-y/2")]);
    assert_eq!(f.left[1], vec![c("0"), c("1"), c("x/2")]);
    assert_eq!(f.left[2], vec![c("0"), c("0"), c("1")]);
}

/// `b̃^I` applies its rightmost factor first.
fn pbw_derivative(alg: &carnot_jets::StratAlg, i: &MultiIndex, f: &MPoly, p: &[Rat]) -> Rat {
    let mut w = i.word();
    w.reverse();
    word_derivative(alg, f, p, &w)
}

#[test]
fn tau_matches_operator_action() {
    for name in ["heisenberg(1)", "engel", "cartan_n23", "heisenberg(2)"] {
        let alg = catalog(name).unwrap();
        let e = alg.zero_elem();
        for m in 1..=3u32 {
            let t = tau_table(&alg, m);
            let idx = multi_indices(alg.weights(), m);
            for (wi, w) in t.words.iter().enumerate() {
                for j in &idx {
                    let f = monomial(j);
                    let lhs = word_derivative(&alg, &f, &e, w);
                    let mut rhs = int(0);
                    for (c, i) in idx.iter().enumerate() {
                        let coef = t.matrix.get(wi, c);
                        if coef != int(0) {
                            rhs += coef * pbw_derivative(&alg, i, &f, &e);
                        }
                    }
                    assert_eq!(lhs, rhs, "{name} m={m} word {w:?} x^{j:?}");
                }
            }
        }
    }
}

#[test]
fn heisenberg_hd_bases_from_tables() {
    let alg = catalog("heisenberg(1)").unwrap();
    let e = alg.zero_elem();
    for m in 1..=3 {
        let basis = hd_basis(&alg, m);
        let shown: Vec<String> = basis.iter().map(|(_, t)| format_tensor(&alg, t)).collect();
        assert_eq!(shown, HEIS_HD[m - 1]);
        // A_I(ξ) = (τ(ξ) P_I)(e) with P_I taken from the dual-basis table.
        for ((_, t), ps) in basis.iter().zip(HEIS_DUAL[m - 1]) {
            let p = parse_heis(ps);
            for (wi, w) in words(2, m).iter().enumerate() {
                assert_eq!(t.coeffs[wi], word_derivative(&alg, &p, &e, w), "{ps} on {w:?}");
            }
        }
    }
}

#[test]
fn heisenberg_dual_bases_from_tables() {
    let alg = catalog("heisenberg(1)").unwrap();
    let names = coordinate_names(&alg);
    for m in 1..=3u32 {
        let basis = dual_poly_basis(&alg, &alg.zero_elem(), m).unwrap();
        let got: Vec<String> = basis.iter().map(|(_, p)| p.format_compact(&names)).collect();
        assert_eq!(got, HEIS_DUAL[m as usize - 1]);
        for ((_, p), s) in basis.iter().zip(HEIS_DUAL[m as usize - 1]) {
            assert_eq!(*p, parse_heis(s));
        }
    }
}

#[test]
fn dual_bases_at_points_pair_to_identity() {
    let mut r = rng(5);
    for name in ["heisenberg(1)", "engel"] {
        let alg = catalog(name).unwrap();
        let p = rats(&mut r, alg.dim());
        for m in 1..=3u32 {
            let basis = dual_poly_basis(&alg, &p, m).unwrap();
            for (i, (ii, _)) in basis.iter().enumerate() {
                for (j, (_, pj)) in basis.iter().enumerate() {
                    let v = pbw_derivative(&alg, ii, pj, &p);
                    assert_eq!(v, if i == j { int(1) } else { int(0) }, "{name} m={m}");
                }
            }
        }
    }
}

#[test]
fn heisenberg_pairing_tables() {
    let alg = catalog("heisenberg(1)").unwrap();
    let t2 = [["2", "0", "0", "0"], ["0", "1", "0", "0"], ["0", "0", "2", "0"], ["0", "1/2", "0", "1"]];
    let t3 = [
        ["6", "0", "0", "0", "0", "0"],
        ["0", "2", "0", "0", "0", "0"],
        ["0", "0", "2", "0", "0", "0"],
        ["0", "0", "0", "6", "0", "0"],
        ["0", "1", "0", "0", "1", "0"],
        ["0", "0", "1", "0", "0", "1"],
    ];
    let (_, m2) = pairing_matrix(&alg, 2);
    let (_, m3) = pairing_matrix(&alg, 3);
    let e = alg.zero_elem();
    let idx2 = multi_indices(alg.weights(), 2);
    for (r, row) in t2.iter().enumerate() {
        for (c, v) in row.iter().enumerate() {
            assert_eq!(to_display(&m2.get(r, c)), *v);
            assert_eq!(to_display(&pbw_derivative(&alg, &idx2[c], &monomial(&idx2[r]), &e)), *v);
        }
    }
    for (r, row) in t3.iter().enumerate() {
        for (c, v) in row.iter().enumerate() {
            assert_eq!(to_display(&m3.get(r, c)), *v);
        }
    }
}

#[test]
fn abelian_hd_is_symmetric_tensors() {
    for n in 1..=3usize {
        let alg = catalog(&format!("abelian({n})")).unwrap();
        let hd = HdSpace::get(&alg, 4);
        for k in 0..=4usize {
            // dim Sym^k(R^n) = C(n+k-1, k)
            let binom = (1..=k).fold(1usize, |acc, i| acc * (n + i - 1) / i);
            assert_eq!(hd.dim(k), binom);
            for t in &hd.degree(k).basis {
                for (wi, w) in words(n, k).iter().enumerate() {
                    let mut s = w.clone();
                    s.sort();
                    let si = s.iter().fold(0, |acc, &l| acc * n + l);
                    assert_eq!(t.coeffs[wi], t.coeffs[si]);
                }
            }
        }
    }
}

#[test]
fn jet_bracket_matches_left_invariant_fields() {
    let mut r = rng(3);
    for (name, w, m) in [("abelian(2)", 1, 1), ("heisenberg(1)", 1, 2), ("heisenberg(1)", 2, 1), ("engel", 1, 1)] {
        let sp = space(name, w, m);
        let nv = sp.dim();
        let vars = sp.vars();
        let field = |x: &[Rat]| {
            let (b, s) = sp.split(x);
            let bp: Vec<MPoly> = b.iter().map(|c| MPoly::constant(nv, c.clone())).collect();
            let sp_: Vec<Vec<MPoly>> =
                s.iter().map(|v| v.iter().map(|c| MPoly::constant(nv, c.clone())).collect()).collect();
            sp.left_invariant_at(&bp, &sp_, &vars)
        };
        for _ in 0..3 {
            let x = rats(&mut r, nv);
            let y = rats(&mut r, nv);
            let lhs = vector_field_bracket(&field(&x), &field(&y));
            assert_eq!(lhs, field(&sp.bracket(&x, &y)), "{name} W={w} m={m}");
        }
    }
}

#[test]
fn embedding_images_bracket_like_the_algebra() {
    for name in ["heisenberg(1)", "heisenberg(2)", "engel", "cartan_n23"] {
        let g = catalog(name).unwrap();
        let e = embed(&g).unwrap();
        let q = quotient_algebra(&g).unwrap();
        // the quotient keeps every bracket that stays below the top layer
        let top = g.step();
        for (i, j, b) in g.structure() {
            if g.weights()[i] + g.weights()[j] < top {
                assert_eq!(q.bracket_basis_dense(i, j), {
                    let mut v = q.zero_elem();
                    for (k, c) in b {
                        v[k] = c;
                    }
                    v
                });
            }
        }
        let n = g.dim();
        for i in 0..n {
            for j in 0..n {
                let lhs = e.space.bracket(&e.images[i].coords, &e.images[j].coords);
                let rhs = e.apply(&g.bracket_basis_dense(i, j)).unwrap();
                assert_eq!(lhs, rhs, "{name} ({i},{j})");
            }
        }
    }
}
