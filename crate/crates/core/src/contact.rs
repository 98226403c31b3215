//! Polynomial contact maps of jet spaces: contact certificates, prolongation to one
//! order higher, de-prolongation, characteristic horizontal fields, and the sharpness
//! automorphism of `J^1(g'×R; R)`.

use std::sync::{Arc, OnceLock};

use num_traits::{One, Zero};

use crate::algebra::StratAlg;
use crate::error::{check_len, Error, Result};
use crate::hd::{Membership, Tensor};
use crate::jet::{vector_field_bracket, JetPoint, JetSpace};
use crate::linalg::{rank_of, RatMatrix};
use crate::mpoly::MPoly;
use crate::par;
use crate::pbw;
use crate::polyjet::WPoly;
use crate::rat::{self, Rat};

/// How a map was built. Structured maps have closed-form prolongations and inverses.
#[derive(Clone, Debug, PartialEq)]
pub enum MapKind {
    General,
    Identity,
    /// `p ↦ q·p`.
    LeftTranslation(JetPoint),
    /// `D_{λ,μ}(a, A) = (δ_λ a, μ λ^{-d} A^d)`.
    Dilation { lambda: Rat, mu: Rat },
}

/// Outcome of the symbolic contact test.
#[derive(Clone, Debug, PartialEq)]
pub enum ContactVerdict {
    /// Every identity that was checked, e.g. `omega^0(F_* X1) = 0`.
    Certified(Vec<String>),
    /// `form(F_* field)` is the nonzero polynomial `witness`.
    Violation { field: String, form: String, witness: MPoly },
}

impl ContactVerdict {
    pub fn is_certified(&self) -> bool {
        matches!(self, ContactVerdict::Certified(_))
    }
}

/// Polynomial self-map of a jet space, in product coordinates.
#[derive(Clone, Debug)]
pub struct PolyMap {
    space: Arc<JetSpace>,
    comps: Vec<MPoly>,
    kind: MapKind,
    jac: OnceLock<Vec<Vec<MPoly>>>,
    cert: OnceLock<ContactVerdict>,
}

impl PartialEq for PolyMap {
    fn eq(&self, other: &Self) -> bool {
        self.comps == other.comps && same_space(&self.space, &other.space)
    }
}

fn same_space(a: &JetSpace, b: &JetSpace) -> bool {
    a.alg().name() == b.alg().name() && a.wdim() == b.wdim() && a.order() == b.order()
}

impl PolyMap {
    pub fn new(space: &Arc<JetSpace>, comps: Vec<MPoly>) -> Result<PolyMap> {
        Self::with_kind(space, comps, MapKind::General)
    }

    fn with_kind(space: &Arc<JetSpace>, comps: Vec<MPoly>, kind: MapKind) -> Result<PolyMap> {
        check_len(space.dim(), comps.len())?;
        if let Some(p) = comps.iter().find(|p| p.nvars() != space.dim()) {
            return Err(Error::DimensionMismatch { expected: space.dim(), got: p.nvars() });
        }
        Ok(PolyMap { space: space.clone(), comps, kind, jac: OnceLock::new(), cert: OnceLock::new() })
    }

    pub fn identity(space: &Arc<JetSpace>) -> PolyMap {
        Self::with_kind(space, space.vars(), MapKind::Identity).expect("identity is well formed")
    }

    pub fn left_translation(space: &Arc<JetSpace>, q: &JetPoint) -> Result<PolyMap> {
        space.check_point(q)?;
        let nv = space.dim();
        let c = |v: &Rat| MPoly::constant(nv, v.clone());
        let qa: Vec<MPoly> = q.base.iter().map(c).collect();
        let qq: Vec<Vec<MPoly>> = q.stack.iter().map(|s| s.iter().map(c).collect()).collect();
        let (a, aa) = space.split(&space.vars());
        let (base, stack) = space.mul_generic(&qa, &qq, &a, &aa);
        Self::with_kind(space, space.join(&base, &stack), MapKind::LeftTranslation(q.clone()))
    }

    pub fn dilation(space: &Arc<JetSpace>, lambda: &Rat, mu: &Rat) -> Result<PolyMap> {
        if !rat::is_positive(lambda) || mu.is_zero() {
            return Err(Error::InvalidArgument("dilation needs λ > 0 and μ ≠ 0".into()));
        }
        let comps = space
            .vars()
            .iter()
            .zip(space.dilation_factors(lambda, mu))
            .map(|(v, f)| v.scale(&f))
            .collect();
        Self::with_kind(space, comps, MapKind::Dilation { lambda: lambda.clone(), mu: mu.clone() })
    }

    /// The group dilation, `μ = λ^{m+1}`, scaling layer `k` of the jet algebra by `λ^k`.
    pub fn group_dilation(space: &Arc<JetSpace>, lambda: &Rat) -> Result<PolyMap> {
        Self::dilation(space, lambda, &rat::pow(lambda, space.order() as u32 + 1))
    }

    pub fn constant(space: &Arc<JetSpace>, p: &JetPoint) -> Result<PolyMap> {
        space.check_point(p)?;
        let nv = space.dim();
        let comps = space.point_coords(p).into_iter().map(|c| MPoly::constant(nv, c)).collect();
        Self::new(space, comps)
    }

    /// The group automorphism `exp ∘ φ ∘ log` for a linear map `φ` of the jet algebra
    /// given in product coordinates. `φ` is not checked to be an automorphism.
    pub fn from_lie_map(space: &Arc<JetSpace>, phi: &RatMatrix) -> Result<PolyMap> {
        check_len(space.dim(), phi.rows())?;
        check_len(space.dim(), phi.cols())?;
        let (a, aa) = space.split(&space.vars());
        let (x, xx) = space.log_generic(&a, &aa);
        let flat = space.join(&x, &xx);
        let nv = space.dim();
        let image: Vec<MPoly> = (0..nv)
            .map(|i| {
                let mut acc = MPoly::zero(nv);
                for (j, c) in phi.row(i) {
                    acc.add_scaled(&flat[*j], c);
                }
                acc
            })
            .collect();
        let (y, yy) = space.split(&image);
        let (base, stack) = space.exp_generic(&y, &yy);
        Self::new(space, space.join(&base, &stack))
    }

    pub fn space(&self) -> &Arc<JetSpace> {
        &self.space
    }

    pub fn comps(&self) -> &[MPoly] {
        &self.comps
    }

    pub fn kind(&self) -> &MapKind {
        &self.kind
    }

    /// `F_G`.
    pub fn base_part(&self) -> &[MPoly] {
        &self.comps[..self.space.n()]
    }

    /// `F^k`.
    pub fn degree_part(&self, k: usize) -> &[MPoly] {
        &self.comps[self.space.block(k)]
    }

    pub fn apply_coords(&self, x: &[Rat]) -> Result<Vec<Rat>> {
        check_len(self.space.dim(), x.len())?;
        Ok(par::map(&self.comps, |p| p.eval(x)))
    }

    pub fn apply(&self, p: &JetPoint) -> Result<JetPoint> {
        self.space.check_point(p)?;
        let out = self.apply_coords(&self.space.point_coords(p))?;
        self.space.point(&out)
    }

    /// `jac[i][k] = ∂F_i/∂x_k`.
    pub fn jacobian(&self) -> &[Vec<MPoly>] {
        self.jac.get_or_init(|| {
            let n = self.space.dim();
            par::map(&self.comps, |p| (0..n).map(|k| p.derivative(k)).collect())
        })
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &PolyMap) -> Result<PolyMap> {
        if !same_space(&self.space, &other.space) {
            return Err(Error::InvalidArgument("maps act on different jet spaces".into()));
        }
        let comps = par::map(&self.comps, |p| p.compose(&other.comps).expect("arity checked"));
        Self::new(&self.space, comps)
    }

    /// Closed-form inverse of a structured map.
    pub fn inverse_structured(&self) -> Option<PolyMap> {
        match &self.kind {
            MapKind::Identity => Some(self.clone()),
            MapKind::LeftTranslation(q) => PolyMap::left_translation(&self.space, &self.space.inverse(q)).ok(),
            MapKind::Dilation { lambda, mu } => {
                PolyMap::dilation(&self.space, &(Rat::one() / lambda), &(Rat::one() / mu)).ok()
            }
            MapKind::General => None,
        }
    }

    /// Pushforward of a polynomial vector field.
    pub fn push_field(&self, field: &[MPoly]) -> Vec<MPoly> {
        let jac = self.jacobian();
        let nv = self.space.dim();
        jac.iter()
            .map(|row| {
                let mut acc = MPoly::zero(nv);
                for (d, x) in row.iter().zip(field) {
                    if !d.is_zero() && !x.is_zero() {
                        acc += &(d * x);
                    }
                }
                acc
            })
            .collect()
    }

    /// Symbolic contact test, cached. Every contact form evaluated at `F(p)` must vanish
    /// on `dF` of every frame field; for order 0 only the forms `θ^j` exist.
    pub fn is_contact(&self) -> &ContactVerdict {
        self.cert.get_or_init(|| {
            let space = &self.space;
            let frame = space.frame_fields();
            let names = frame_names(space);
            let results = par::map_range(frame.len(), |j| {
                let pushed = self.push_field(&frame[j]);
                let cf = space.coframe_coords(&self.comps, &pushed);
                match cf.first_violation() {
                    Some((form, witness)) => Err((j, form, witness)),
                    None => {
                        let mut ids: Vec<String> =
                            (0..space.order()).map(|l| format!("omega^{l}(F_* {}) = 0", names[j])).collect();
                        ids.extend(
                            (2..=space.alg().step()).map(|k| format!("theta^{k}(F_* {}) = 0", names[j])),
                        );
                        Ok(ids)
                    }
                }
            });
            let mut ids = Vec::new();
            for r in results {
                match r {
                    Ok(v) => ids.extend(v),
                    Err((j, form, witness)) => {
                        return ContactVerdict::Violation { field: names[j].clone(), form, witness };
                    }
                }
            }
            ContactVerdict::Certified(ids)
        })
    }

    fn require_contact(&self) -> Result<()> {
        match self.is_contact() {
            ContactVerdict::Certified(_) => Ok(()),
            ContactVerdict::Violation { field, form, .. } => {
                Err(Error::InvalidArgument(format!("map is not contact: {form}(F_* {field}) ≠ 0")))
            }
        }
    }
}

fn frame_names(space: &JetSpace) -> Vec<String> {
    let r = space.alg().rank();
    let mut names: Vec<String> = (0..r).map(|j| format!("X{}", j + 1)).collect();
    names.extend((0..space.block_dim(space.order())).map(|k| format!("Y{}", k + 1)));
    names
}

/// Images of the horizontal frame of `J^{m+1}` under `F ∘ π_m`.
#[derive(Clone, Debug, PartialEq)]
pub struct Transport {
    /// `Ñ_j`: coordinate tangent vectors at `F_G(p)`.
    pub tilde: Vec<Vec<Rat>>,
    /// `N_j`: the same, left-trivialized into `g`.
    pub n: Vec<Vec<Rat>>,
    pub rank: usize,
}

impl Transport {
    pub fn independent(&self) -> bool {
        self.rank == self.n.len()
    }
}

/// `𝕏̂_j(p̂)` pushed down to `J^m` coordinates.
fn projected_horizontal(space: &JetSpace, hat: &JetSpace, ph: &JetPoint) -> Vec<Vec<Rat>> {
    let coords = hat.point_coords(ph);
    let zero_stack: Vec<Vec<Rat>> = (0..=hat.order()).map(|d| vec![Rat::zero(); hat.block_dim(d)]).collect();
    (0..space.alg().rank())
        .map(|j| {
            let x = space.alg().unit(j);
            let mut v = hat.left_invariant_at(&x, &zero_stack, &coords);
            v.truncate(space.dim());
            v
        })
        .collect()
}

fn mat_vec(rows: &[Vec<MPoly>], at: &[Rat], v: &[Rat]) -> Vec<Rat> {
    rows.iter()
        .map(|row| {
            let mut acc = Rat::zero();
            for (d, x) in row.iter().zip(v) {
                if !x.is_zero() && !d.is_zero() {
                    acc += d.eval(at) * x;
                }
            }
            acc
        })
        .collect()
}

fn hat_of(f: &PolyMap, ph: &JetPoint) -> Result<(Arc<JetSpace>, JetPoint)> {
    let hat = f.space.higher()?;
    hat.check_point(ph)?;
    let mut p = ph.clone();
    p.stack.pop();
    Ok((hat, p))
}

/// `Ñ_j = dF_G(p) dπ_m 𝕏̂_j(p̂)` and `N_j = dL^{-1}_{F_G(p)} Ñ_j`.
pub fn frame_transport(f: &PolyMap, ph: &JetPoint) -> Result<Transport> {
    let (hat, p) = hat_of(f, ph)?;
    let space = &f.space;
    let pc = space.point_coords(&p);
    let fields = projected_horizontal(space, &hat, ph);
    let jac = &f.jacobian()[..space.n()];
    let target: Vec<Rat> = f.base_part().iter().map(|q| q.eval(&pc)).collect();
    let tilde: Vec<Vec<Rat>> = fields.iter().map(|v| mat_vec(jac, &pc, v)).collect();
    let n: Vec<Vec<Rat>> = tilde.iter().map(|t| space.alg().left_trivialize(&target, t)).collect();
    let rank = rank_of(&n);
    Ok(Transport { tilde, n, rank })
}

/// `F̂(p̂)` for a contact map `F` of `J^m` and `p̂ ∈ J^{m+1}`: the lower part is `F(π_m p̂)`,
/// the top part `T` is the unique solution of `N_j ⌐ T = dF^m(p)[dπ_m 𝕏̂_j(p̂)]`.
pub fn prolong_point(f: &PolyMap, ph: &JetPoint) -> Result<JetPoint> {
    let (hat, p) = hat_of(f, ph)?;
    let space = &f.space;
    let alg = space.alg();
    let (r, m, wdim) = (alg.rank(), space.order(), space.wdim());
    let tr = frame_transport(f, ph)?;
    if !tr.independent() {
        return Err(Error::OutsideDomain { rank: tr.rank, needed: r });
    }
    if tr.n.iter().any(|v| v[r..].iter().any(|c| !c.is_zero())) {
        return Err(Error::Certificate("frame images leave the first layer; map is not contact".into()));
    }
    let mmat = RatMatrix::from_columns(&tr.n.iter().map(|v| v[..r].to_vec()).collect::<Vec<_>>(), r);
    let minv = mmat.inverse().expect("independent frame images");
    let pc = space.point_coords(&p);
    let fields = projected_horizontal(space, &hat, ph);
    let jac_top = &f.jacobian()[space.block(m)];
    let hdm = space.hd().degree(m);
    let cs: Vec<Tensor> = fields.iter().map(|v| hdm.tensor_of(&mat_vec(jac_top, &pc, v), wdim)).collect();
    let mut t = Tensor::zeros(m + 1, r, wdim);
    for word in pbw::words(r, m) {
        for i in 0..r {
            let mut full = word.clone();
            full.push(i);
            for c in 0..wdim {
                let mut acc = Rat::zero();
                for (j, cj) in cs.iter().enumerate() {
                    let s = minv.get(j, i);
                    if !s.is_zero() {
                        acc += s * cj.get(&word, c);
                    }
                }
                t.set(&full, c, acc);
            }
        }
    }
    let top = match hat.hd().degree(m + 1).membership(&t) {
        Membership::Member(c) => c,
        Membership::NotMember { component, .. } => {
            return Err(Error::Certificate(format!(
                "prolonged top component {component} is not a horizontal derivative"
            )))
        }
    };
    let mut out = f.apply(&p)?;
    out.stack.push(top);
    Ok(out)
}

/// Closed-form prolongation of a structured map, verified by the projection identity
/// `π_m ∘ F̂ = F ∘ π_m` and a contact certificate.
pub fn prolong_structured(f: &PolyMap) -> Result<PolyMap> {
    let hat = f.space.higher()?;
    let cand = match &f.kind {
        MapKind::Identity => PolyMap::identity(&hat),
        MapKind::LeftTranslation(q) => {
            let mut qh = q.clone();
            qh.stack.push(vec![Rat::zero(); hat.block_dim(hat.order())]);
            PolyMap::left_translation(&hat, &qh)?
        }
        MapKind::Dilation { lambda, mu } => PolyMap::dilation(&hat, lambda, mu)?,
        MapKind::General => {
            return Err(Error::InvalidArgument("no closed-form prolongation for a general map".into()))
        }
    };
    let low = f.space.dim();
    for (i, (c, g)) in cand.comps[..low].iter().zip(&f.comps).enumerate() {
        if *c != g.extend(hat.dim()) {
            return Err(Error::Certificate(format!("projection identity fails in component {i}")));
        }
    }
    if !cand.is_contact().is_certified() {
        return Err(Error::Certificate("structured prolongation is not contact".into()));
    }
    Ok(cand)
}

/// Hypotheses under which order-one contact maps factor through `J^0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Hypotheses {
    pub wdim_gt_one: bool,
    /// Every nonzero `v ∈ V1` has some `v' ∈ V1` with `[v, v'] ≠ 0`.
    pub v1_nondegenerate: bool,
}

impl Hypotheses {
    pub fn of(alg: &StratAlg, wdim: usize) -> Hypotheses {
        let r = alg.rank();
        let n = alg.dim();
        // v ↦ ([v, e_1], …, [v, e_r]) is injective.
        let mut rows = vec![vec![Rat::zero(); r]; r * n];
        for i in 0..r {
            for j in 0..r {
                for (k, c) in alg.bracket_basis(i, j) {
                    rows[j * n + k][i] = c.clone();
                }
            }
        }
        let rank = RatMatrix::from_dense(&rows).rank();
        Hypotheses { wdim_gt_one: wdim > 1, v1_nondegenerate: rank == r }
    }

    pub fn hold(&self) -> bool {
        self.wdim_gt_one || self.v1_nondegenerate
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Deprolonged {
    /// `F'` with `π_m ∘ F = F' ∘ π_m`, certified contact.
    Factored { map: PolyMap, hypotheses: Option<Hypotheses> },
    /// `∂F_component/∂x_variable` is nonzero although `variable` is a top-order coordinate.
    Obstructed { component: usize, variable: usize, derivative: MPoly, hypotheses: Option<Hypotheses> },
}

impl Deprolonged {
    pub fn describe(&self, space: &JetSpace) -> String {
        let names = space.coord_names();
        match self {
            Deprolonged::Factored { .. } => "factors through the projection".into(),
            Deprolonged::Obstructed { component, variable, derivative, hypotheses } => {
                let mut s = format!(
                    "component {} depends on top coordinate {}: derivative {}",
                    names[*component],
                    names[*variable],
                    derivative.format_with(&names)
                );
                if let Some(h) = hypotheses {
                    s.push_str(&format!(
                        " (dim W > 1: {}, V1 nondegenerate: {})",
                        h.wdim_gt_one, h.v1_nondegenerate
                    ));
                }
                s
            }
        }
    }
}

/// Factor a contact map of `J^{m+1}` through `π_m`.
pub fn deprolong(f: &PolyMap) -> Result<Deprolonged> {
    let hat = &f.space;
    let low = hat.lower()?;
    f.require_contact()?;
    let hypotheses = (low.order() == 0).then(|| Hypotheses::of(hat.alg(), hat.wdim()));
    let top = hat.block(hat.order());
    for i in 0..low.dim() {
        for k in top.clone() {
            if f.comps[i].depends_on(k) {
                return Ok(Deprolonged::Obstructed {
                    component: i,
                    variable: k,
                    derivative: f.comps[i].derivative(k),
                    hypotheses,
                });
            }
        }
    }
    let comps = f.comps[..low.dim()].iter().map(|p| p.restrict(low.dim()).expect("checked")).collect();
    let map = PolyMap::new(&low, comps)?;
    if !map.is_contact().is_certified() {
        return Err(Error::Certificate("de-prolonged map is not contact".into()));
    }
    Ok(Deprolonged::Factored { map, hypotheses })
}

/// Result of comparing `F̂(J^{m+1}f(a))` with `J^{m+1}h(F_G(J^m f(a)))`.
#[derive(Clone, Debug, PartialEq)]
pub struct JetConsistency {
    pub prolonged: JetPoint,
    pub expected: JetPoint,
    /// The function with `F ∘ J^m f = J^m h ∘ F_G ∘ J^m f` near `a`, up to order `m+1`.
    pub h: WPoly,
}

impl JetConsistency {
    pub fn consistent(&self) -> bool {
        self.prolonged == self.expected
    }
}

/// Runs the argument behind the prolongation formula on one jet: `h` is recovered
/// from `F ∘ J^m f` by inverting `ψ = F_G ∘ J^m f` as a truncated power series.
pub fn prolong_jet_consistency(f: &PolyMap, func: &WPoly, a: &[Rat]) -> Result<JetConsistency> {
    let space = &f.space;
    let (n, m) = (space.n(), space.order());
    check_len(n, a.len())?;
    check_len(space.wdim(), func.wdim())?;
    let hat = space.higher()?;
    let ph = hat.jet_of(func, a)?;
    let prolonged = prolong_point(f, &ph)?;

    let order = m as u32 + 1;
    let mut section: Vec<MPoly> = (0..n).map(|i| MPoly::var(n, i)).collect();
    section.extend(space.jet_section(func)?.into_iter().flatten());
    let psi: Vec<MPoly> = f.base_part().iter().map(|p| p.compose(&section)).collect::<Result<_>>()?;
    let b: Vec<Rat> = psi.iter().map(|p| p.eval(a)).collect();
    let around_a: Vec<MPoly> = (0..n).map(|i| &MPoly::constant(n, a[i].clone()) + &MPoly::var(n, i)).collect();
    let shifted: Vec<MPoly> = psi
        .iter()
        .zip(&b)
        .map(|(p, bi)| Ok(&p.compose_truncated(&around_a, order)? - &MPoly::constant(n, bi.clone())))
        .collect::<Result<_>>()?;
    let mut jm = RatMatrix::zeros(n, n);
    let mut nonlinear = Vec::with_capacity(n);
    for (i, p) in shifted.iter().enumerate() {
        let mut q = p.clone();
        for k in 0..n {
            let mut e = vec![0; n];
            e[k] = 1;
            let c = p.coeff(&e);
            q.add_term(e, -c.clone());
            jm.set(i, k, c);
        }
        nonlinear.push(q);
    }
    let jinv = jm.inverse().ok_or(Error::OutsideDomain { rank: jm.rank(), needed: n })?;
    let u: Vec<MPoly> = (0..n).map(|i| MPoly::var(n, i)).collect();
    let apply_inv = |v: &[MPoly]| -> Vec<MPoly> {
        (0..n)
            .map(|i| {
                let mut acc = MPoly::zero(n);
                for (k, c) in jinv.row(i) {
                    acc.add_scaled(&v[*k], c);
                }
                acc
            })
            .collect()
    };
    let mut delta = apply_inv(&u);
    for _ in 0..order {
        let rhs: Vec<MPoly> = nonlinear
            .iter()
            .zip(&u)
            .map(|(q, ui)| Ok(ui - &q.compose_truncated(&delta, order)?))
            .collect::<Result<_>>()?;
        delta = apply_inv(&rhs);
    }
    // φ(b + u) = a + δ(u); h(b + u) = F^0(J^m f(φ(b + u))).
    let phi: Vec<MPoly> = delta.iter().zip(a).map(|(d, ai)| d + &MPoly::constant(n, ai.clone())).collect();
    let sec_phi: Vec<MPoly> =
        section.iter().map(|p| p.compose_truncated(&phi, order)).collect::<Result<_>>()?;
    let back: Vec<MPoly> = (0..n).map(|i| &MPoly::var(n, i) - &MPoly::constant(n, b[i].clone())).collect();
    let h_comps: Vec<MPoly> = f
        .degree_part(0)
        .iter()
        .map(|p| p.compose_truncated(&sec_phi, order)?.compose(&back))
        .collect::<Result<_>>()?;
    let h = WPoly { comps: h_comps };
    let expected = hat.jet_of(&h, &b)?;
    Ok(JetConsistency { prolonged, expected, h })
}

/// Rank of `dπ_m(H^{m+1})` at `p ∈ J^m`, collected over the given top-order fibre points.
pub fn span_recovery_rank(space: &Arc<JetSpace>, p: &JetPoint, fibres: &[Vec<Rat>]) -> Result<usize> {
    space.check_point(p)?;
    let hat = space.higher()?;
    let mut vecs = Vec::new();
    for b in fibres {
        check_len(hat.block_dim(hat.order()), b.len())?;
        let mut ph = p.clone();
        ph.stack.push(b.clone());
        vecs.extend(projected_horizontal(space, &hat, &ph));
    }
    // Vertical directions in the top block project to zero.
    Ok(rank_of(&vecs))
}

/// Horizontal field `X = Σ v_j 𝕏_j + Σ a_k 𝕐_k` with polynomial coefficients.
#[derive(Clone, Debug)]
pub struct HorizField {
    pub space: Arc<JetSpace>,
    pub v: Vec<MPoly>,
    pub a: Vec<MPoly>,
}

impl HorizField {
    pub fn new(space: &Arc<JetSpace>, v: Vec<MPoly>, a: Vec<MPoly>) -> Result<HorizField> {
        check_len(space.alg().rank(), v.len())?;
        check_len(space.block_dim(space.order()), a.len())?;
        if let Some(p) = v.iter().chain(&a).find(|p| p.nvars() != space.dim()) {
            return Err(Error::DimensionMismatch { expected: space.dim(), got: p.nvars() });
        }
        Ok(HorizField { space: space.clone(), v, a })
    }

    /// Coordinate components.
    pub fn field(&self) -> Vec<MPoly> {
        combine(&self.space.frame_fields(), self.v.iter().chain(&self.a), self.space.dim())
    }
}

fn combine<'a>(frame: &[Vec<MPoly>], coeffs: impl Iterator<Item = &'a MPoly>, nv: usize) -> Vec<MPoly> {
    let mut out = vec![MPoly::zero(nv); nv];
    for (c, f) in coeffs.zip(frame) {
        if c.is_zero() {
            continue;
        }
        for (o, fi) in out.iter_mut().zip(f) {
            if !fi.is_zero() {
                *o += &(c * fi);
            }
        }
    }
    out
}

/// Layer-3 part of the left-trivialization of a vector field: `V_3` and `HD^{m-2} ⊗ W`.
fn layer3(space: &JetSpace, z: &[MPoly]) -> Vec<MPoly> {
    let vars = space.vars();
    let (a, aa) = space.split(&vars);
    let (adot, zz) = space.split(z);
    let x = space.alg().left_trivialize(&a, &adot);
    let c = space.contract(&x, &aa);
    let m = space.order();
    let mut out: Vec<MPoly> = space.alg().layer(3).map(|i| x[i].clone()).collect();
    out.extend(zz[m - 2].iter().zip(&c[m - 2]).map(|(p, q)| p - q));
    out
}

#[derive(Clone, Debug, PartialEq)]
pub struct CharacteristicWitness {
    /// Frame field index (`𝕏` first, then `𝕐`).
    pub frame: usize,
    /// Exponent of the coordinate monomial multiplying it.
    pub monomial: Vec<u32>,
    /// `Π_3 [X,[X,Y]]`, left-trivialized.
    pub value: Vec<MPoly>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CharacteristicReport {
    /// `v^X ≡ 0`.
    pub criterion: bool,
    /// `Π_3 [X,[X,Y]] = 0` over the whole test family.
    pub brute_force: bool,
    pub witness: Option<CharacteristicWitness>,
    pub family_size: usize,
}

impl CharacteristicReport {
    pub fn agree(&self) -> bool {
        self.criterion == self.brute_force
    }
}

/// Test family: frame fields times coordinate monomials of degree at most 2.
fn test_monomials(nv: usize) -> Vec<Vec<u32>> {
    let mut out = vec![vec![0; nv]];
    for i in 0..nv {
        let mut e = vec![0; nv];
        e[i] = 1;
        out.push(e);
    }
    for i in 0..nv {
        for j in i..nv {
            let mut e = vec![0; nv];
            e[i] += 1;
            e[j] += 1;
            out.push(e);
        }
    }
    out
}

pub fn characteristic_test(x: &HorizField) -> Result<CharacteristicReport> {
    let space = &x.space;
    if space.order() < 2 {
        return Err(Error::InvalidArgument("characteristic test needs order m ≥ 2".into()));
    }
    let nv = space.dim();
    let xf = x.field();
    let frame = space.frame_fields();
    let monos = test_monomials(nv);
    let family: Vec<(usize, usize)> =
        (0..monos.len()).flat_map(|mi| (0..frame.len()).map(move |fi| (mi, fi))).collect();
    let witness = par::find_map_first(&family, |&(mi, fi)| {
        let c = MPoly::monomial(monos[mi].clone(), Rat::one());
        let y: Vec<MPoly> = frame[fi].iter().map(|p| &c * p).collect();
        let xy = vector_field_bracket(&xf, &y);
        let xxy = vector_field_bracket(&xf, &xy);
        let value = layer3(space, &xxy);
        value.iter().any(|p| !p.is_zero()).then(|| CharacteristicWitness {
            frame: fi,
            monomial: monos[mi].clone(),
            value,
        })
    });
    Ok(CharacteristicReport {
        criterion: x.v.iter().all(MPoly::is_zero),
        brute_force: witness.is_none(),
        witness,
        family_size: family.len(),
    })
}

#[derive(Clone, Debug, PartialEq)]
pub enum Rigidity {
    /// `R` is abelian of dimension `dim V1 · dim W` and lies in `HD^1 ⊗ W`.
    Pass,
    /// `R` is abelian of the right dimension but this spanning vector leaves `HD^1 ⊗ W`.
    Fail { witness: Vec<Rat> },
    /// A hypothesis does not hold; nothing to test.
    NotApplicable(String),
}

/// Abelian subspaces of `V1 ⊕ HD^1⊗W` of dimension `dim V1 · dim W` are `HD^1⊗W` when `dim W > 1`.
pub fn abelian_rigidity_check(space: &JetSpace, spanning: &[Vec<Rat>]) -> Result<Rigidity> {
    for v in spanning {
        check_len(space.dim(), v.len())?;
    }
    if space.order() != 1 {
        return Ok(Rigidity::NotApplicable("jet order must be 1".into()));
    }
    if space.wdim() < 2 {
        return Ok(Rigidity::NotApplicable("needs dim W > 1".into()));
    }
    let r = space.alg().rank();
    let top = space.block(1);
    let in_layer1 = |i: usize| i < r || top.contains(&i);
    if spanning.iter().any(|v| v.iter().enumerate().any(|(i, c)| !c.is_zero() && !in_layer1(i))) {
        return Ok(Rigidity::NotApplicable("vectors must lie in the first layer".into()));
    }
    let need = r * space.wdim();
    let rank = rank_of(spanning);
    if rank != need {
        return Ok(Rigidity::NotApplicable(format!("dimension {rank}, expected {need}")));
    }
    for (i, u) in spanning.iter().enumerate() {
        for w in &spanning[i + 1..] {
            if space.bracket(u, w).iter().any(|c| !c.is_zero()) {
                return Ok(Rigidity::NotApplicable("subspace is not abelian".into()));
            }
        }
    }
    match spanning.iter().find(|v| v[..r].iter().any(|c| !c.is_zero())) {
        Some(v) => Ok(Rigidity::Fail { witness: v.clone() }),
        None => Ok(Rigidity::Pass),
    }
}

/// Contact automorphism of `J^1(g'×R; R)` that is not a prolongation.
#[derive(Clone, Debug)]
pub struct Counterexample {
    pub space: Arc<JetSpace>,
    /// Automorphism of the jet algebra, product coordinates.
    pub phi: RatMatrix,
    pub map: PolyMap,
    /// Product coordinates of the extra base direction `x` and its dual `y` in `HD^1`.
    pub swapped: (usize, usize),
}

/// `[((v,x),z,(α,y)), ((v̄,x̄),z̄,(ᾱ,ȳ))] = (([v,v̄],0), α(v̄) - ᾱ(v) + y x̄ - ȳ x, 0)` in
/// product coordinates of `j^1(g'×R; R)`, with `h` the index of the extra direction.
pub fn counterexample_bracket(space: &JetSpace, h: usize, x: &[Rat], y: &[Rat]) -> Vec<Rat> {
    let alg = space.alg();
    let r = alg.rank();
    let (v, a) = space.split(x);
    let (w, b) = space.split(y);
    let mut vp = v.clone();
    let mut wp = w.clone();
    vp[h] = Rat::zero();
    wp[h] = Rat::zero();
    let base = alg.bracket_generic(&vp, &wp);
    let mut z = Rat::zero();
    for i in 0..r {
        if i != h {
            z += &a[1][i] * &w[i] - &b[1][i] * &v[i];
        }
    }
    z += &a[1][h] * &w[h] - &b[1][h] * &v[h];
    let fib = vec![vec![z], vec![Rat::zero(); r]];
    space.join(&base, &fib)
}

pub fn counterexample_automorphism(base: &StratAlg) -> Result<Counterexample> {
    let g = crate::algebra::catalog::jet_counterexample(base)?;
    let space = JetSpace::new(&g, 1, 1)?;
    let h = base.rank();
    let hd1 = space.hd().degree(1);
    for (i, t) in hd1.basis.iter().enumerate() {
        let mut e = vec![Rat::zero(); t.coeffs.len()];
        e[i] = Rat::one();
        if t.coeffs != e {
            return Err(Error::Certificate("HD^1 basis is not the dual basis of V1".into()));
        }
    }
    let xi = h;
    let yi = space.block(1).start + h;
    let nv = space.dim();
    let mut phi = RatMatrix::identity(nv);
    phi.set(xi, xi, Rat::zero());
    phi.set(yi, yi, Rat::zero());
    phi.set(xi, yi, -Rat::one());
    phi.set(yi, xi, Rat::one());
    let unit = |i: usize| {
        let mut e = vec![Rat::zero(); nv];
        e[i] = Rat::one();
        e
    };
    let pairs: Vec<(usize, usize)> = (0..nv).flat_map(|i| (i + 1..nv).map(move |j| (i, j))).collect();
    let bad = par::find_map_first(&pairs, |&(i, j)| {
        let (ei, ej) = (unit(i), unit(j));
        let br = space.bracket(&ei, &ej);
        if br != counterexample_bracket(&space, h, &ei, &ej) {
            return Some(format!("bracket formula differs on ({i},{j})"));
        }
        let lhs = phi.mul_vec(&br);
        let rhs = space.bracket(&phi.mul_vec(&ei), &phi.mul_vec(&ej));
        (lhs != rhs).then(|| format!("φ does not preserve the bracket on ({i},{j})"))
    });
    if let Some(msg) = bad {
        return Err(Error::Certificate(msg));
    }
    let map = PolyMap::from_lie_map(&space, &phi)?;
    if !map.is_contact().is_certified() {
        return Err(Error::Certificate("counterexample automorphism is not contact".into()));
    }
    Ok(Counterexample { space, phi, map, swapped: (xi, yi) })
}
