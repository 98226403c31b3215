//! Sequential vs rayon on the heavier exact computations. Algebras are rebuilt per
//! iteration so their internal caches start cold.

use std::hint::black_box;

use carnot_jets::contact::{prolong_structured, PolyMap};
use carnot_jets::embed::embed;
use carnot_jets::hd::hd_basis;
use carnot_jets::jet::JetSpace;
use carnot_jets::par::{self, ExecMode};
use carnot_jets::polyjet::dual_poly_basis;
use carnot_jets::rat::rat;
use carnot_jets::{catalog, StratAlg};
use criterion::{criterion_group, criterion_main, BatchSize, BenchmarkId, Criterion};
use std::sync::Arc;

const MODES: [(&str, ExecMode); 2] = [("sequential", ExecMode::Sequential), ("parallel", ExecMode::Parallel)];

fn fresh(name: &str) -> Arc<StratAlg> {
    catalog(name).unwrap()
}

fn hd(c: &mut Criterion) {
    let mut g = c.benchmark_group("hd_basis");
    for (label, mode) in MODES {
        for (name, m) in [("heisenberg(1)", 5), ("engel", 4)] {
            g.bench_with_input(BenchmarkId::new(label, format!("{name} m={m}")), &m, |b, &m| {
                par::set_mode(mode);
                b.iter_batched(|| fresh(name), |alg| black_box(hd_basis(&alg, m)), BatchSize::SmallInput)
            });
        }
    }
    g.finish();
}

fn dual_basis(c: &mut Criterion) {
    let mut g = c.benchmark_group("dual_poly_basis");
    for (label, mode) in MODES {
        for (name, m) in [("heisenberg(1)", 4), ("engel", 3)] {
            g.bench_with_input(BenchmarkId::new(label, format!("{name} m={m}")), &m, |b, &m| {
                par::set_mode(mode);
                b.iter_batched(
                    || fresh(name),
                    |alg| {
                        let p: Vec<_> = (0..alg.dim()).map(|i| rat(i as i64 + 1, 2)).collect();
                        black_box(dual_poly_basis(&alg, &p, m as u32).unwrap())
                    },
                    BatchSize::SmallInput,
                )
            });
        }
    }
    g.finish();
}

fn prolong(c: &mut Criterion) {
    let mut g = c.benchmark_group("prolong_and_certify");
    g.sample_size(10);
    for (label, mode) in MODES {
        g.bench_function(BenchmarkId::new(label, "heisenberg(1) W=1 m=2"), |b| {
            par::set_mode(mode);
            b.iter_batched(
                || JetSpace::new(&fresh("heisenberg(1)"), 1, 2).unwrap(),
                |sp| {
                    let d = PolyMap::group_dilation(&sp, &rat(3, 2)).unwrap();
                    let hat = prolong_structured(&d).unwrap();
                    black_box(hat.is_contact().is_certified())
                },
                BatchSize::SmallInput,
            )
        });
    }
    g.finish();
}

fn embedding(c: &mut Criterion) {
    let mut g = c.benchmark_group("embed");
    g.sample_size(20);
    for (label, mode) in MODES {
        for name in ["engel", "cartan_n23"] {
            g.bench_function(BenchmarkId::new(label, name), |b| {
                par::set_mode(mode);
                b.iter_batched(|| fresh(name), |alg| black_box(embed(&alg).unwrap()), BatchSize::SmallInput)
            });
        }
    }
    g.finish();
}

criterion_group!(benches, hd, dual_basis, prolong, embedding);
criterion_main!(benches);
