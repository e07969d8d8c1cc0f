//! Fiberwise checks of the two resolutions of `W ⊂ Y × X`, and brute-force
//! point counts.
//!
//! A pair `(a, U)` lies on `W` when `Ker f(a) ∩ U ≠ 0`. At such a pair the
//! fiber maps `Ker f(a) -> V/U -> U*` of the first resolution degenerate
//! by exactly one, and the section `hf(w + U) = f(a)(w, v)` of the second
//! vanishes at `(a, (U, v))` exactly when `v ∈ Ker f(a)`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::correspondence::{
    is_regular, isotropic, lift_point, lower_point, net_over, pfaffian_hypersurface, point_text,
    projective_points, q_quartic, RankProfile, Tri,
};
use crate::error::{Error, Result};
use crate::field::{Field, FieldElement, FieldOps};
use crate::grassmann::{self, for_each_plane, plane_from_plucker, PluckerPoint};
use crate::ideals::{HilbertConfig, HomogeneousIdeal};
use crate::linalg;
use crate::multipoly::CompiledPoly;
use crate::net::{ANet, TypedNet};
use crate::upoly;
use crate::with_typed_net;

/// Largest projective space [`count_points`] walks through.
pub const COUNT_LIMIT: u128 = 5_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SampleMode {
    /// Seeded random points of `Y` and `X`, plus pairs built on `W`.
    Random,
    /// Every point of `Y` and `X` over a small field.
    Enumerate,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SamplePlan {
    pub field: Field,
    pub samples: usize,
    pub seed: u64,
    pub mode: SampleMode,
}

impl SamplePlan {
    pub fn random(field: Field, samples: usize, seed: u64) -> Self {
        SamplePlan { field, samples, seed, mode: SampleMode::Random }
    }

    pub fn enumerate(field: Field) -> Self {
        SamplePlan { field, samples: 0, seed: 0, mode: SampleMode::Enumerate }
    }
}

/// `(a, U)` with `dim (Ker f(a) ∩ U)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WMembership {
    pub a: Vec<FieldElement>,
    pub u: PluckerPoint,
    pub intersection: usize,
}

impl WMembership {
    pub fn on_w(&self) -> bool {
        self.intersection > 0
    }
}

pub fn w_membership(net: &ANet, a: &[FieldElement], u: &PluckerPoint) -> Result<WMembership> {
    let basis = plane_from_plucker(u)?;
    with_typed_net!(net, tn => {
        let f = &tn.f;
        let at = lower_point(f, a, net.n())?;
        let b = basis.typed(f)?;
        let k = linalg::kernel(f, &tn.at(&at), net.two_m());
        let mut rows = k.clone();
        rows.extend(b.iter().cloned());
        let intersection = k.len() + 2 - linalg::rank(f, &rows, net.two_m());
        Ok(WMembership { a: a.to_vec(), u: u.clone(), intersection })
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiberReport {
    pub check: String,
    pub field: String,
    pub mode: SampleMode,
    pub tested: usize,
    pub on_w: usize,
    pub off_w: usize,
    pub failures: usize,
    pub first_failure: Option<String>,
    pub verdict: Tri,
}

/// Result of one fiber test: on `W` or not, or what went wrong.
type Outcome = std::result::Result<bool, String>;

fn summarize(check: &str, plan: &SamplePlan, outcomes: impl IntoIterator<Item = Outcome>) -> Result<FiberReport> {
    let mut r = FiberReport {
        check: check.into(),
        field: plan.field.to_string(),
        mode: plan.mode,
        tested: 0,
        on_w: 0,
        off_w: 0,
        failures: 0,
        first_failure: None,
        verdict: Tri::Yes,
    };
    for o in outcomes {
        r.tested += 1;
        match o {
            Ok(true) => r.on_w += 1,
            Ok(false) => r.off_w += 1,
            Err(e) => {
                r.failures += 1;
                r.first_failure.get_or_insert(e);
            }
        }
    }
    if r.tested == 0 {
        return Err(Error::Inconclusive(format!("no sample points over {}", plan.field)));
    }
    if r.failures > 0 {
        r.verdict = Tri::No;
    }
    Ok(r)
}

/// A plane `U` in reduced echelon form with the complementary coordinates
/// that give `V/U`.
struct Plane<E> {
    basis: [Vec<E>; 2],
    pivots: [usize; 2],
    complement: Vec<usize>,
}

fn plane<F: FieldOps>(f: &F, u: &[F::El], w: &[F::El]) -> Plane<F::El> {
    let mut rows = vec![u.to_vec(), w.to_vec()];
    let pivots = linalg::rref(f, &mut rows, u.len());
    let complement = (0..u.len()).filter(|c| !pivots.contains(c)).collect();
    Plane { basis: [rows[0].clone(), rows[1].clone()], pivots: [pivots[0], pivots[1]], complement }
}

fn describe<F: FieldOps>(f: &F, a: &[F::El], p: &Plane<F::El>) -> String {
    let u = grassmann::wedge(f, &p.basis[0], &p.basis[1]);
    let u = PluckerPoint::from_coords(p.basis[0].len(), lift_point(f, &u)).map(|x| x.to_string()).unwrap_or_default();
    format!("a = {}, U = {u}", point_text(&lift_point(f, a)))
}

/// The fiber of `Ker f(a) -> V/U -> U*` at one pair.
fn jw_pair<F: FieldOps>(tn: &TypedNet<F>, a: &[F::El], p: &Plane<F::El>) -> Outcome {
    let f = &tn.f;
    let m = tn.at(a);
    let why = |s: &str| format!("{s} at {}", describe(f, a, p));
    if !f.is_zero(&tn.pf_at(a)) {
        return Err(why("a is off Y"));
    }
    let k = linalg::kernel(f, &m, tn.two_m);
    if k.len() != 2 {
        return Err(why(&format!("dim Ker f(a) = {}", k.len())));
    }
    let map1: Vec<Vec<F::El>> = k
        .iter()
        .map(|x| {
            let mut r = x.clone();
            for (b, &piv) in p.basis.iter().zip(&p.pivots) {
                let c = x[piv].clone();
                for (ri, bi) in r.iter_mut().zip(b) {
                    *ri = f.sub(ri, &f.mul(&c, bi));
                }
            }
            p.complement.iter().map(|&c| r[c].clone()).collect()
        })
        .collect();
    let mb: Vec<Vec<F::El>> = p.basis.iter().map(|b| linalg::mat_vec(f, &m, b)).collect();
    let map2: Vec<Vec<F::El>> = p.complement.iter().map(|&c| vec![mb[0][c].clone(), mb[1][c].clone()]).collect();
    let q = p.complement.len();
    let composite = linalg::mat_mul(f, &map1, &map2, 2);
    if composite.iter().flatten().any(|x| !f.is_zero(x)) {
        return Err(why("Ker f(a) -> V/U -> U* is not a complex"));
    }
    let r1 = linalg::rank(f, &map1, q);
    let r2 = linalg::rank(f, &map2, 2);
    match 2 - r1 {
        0 if r2 == 2 && q - r2 == r1 => Ok(false),
        0 => Err(why(&format!("off W but rank V/U -> U* = {r2}"))),
        1 if r2 == 1 => Ok(true),
        1 => Err(why(&format!("on W but coker of V/U -> U* has dimension {}", 2 - r2))),
        _ => Err(why("Ker f(a) = U, a singular point of X")),
    }
}

/// The section `hf` at `(a, (U, v))` against the kernel condition
/// `f(a) v = 0`.
fn jw1_triple<F: FieldOps>(tn: &TypedNet<F>, a: &[F::El], p: &Plane<F::El>, v: &[F::El]) -> Outcome {
    let f = &tn.f;
    let mv = linalg::mat_vec(f, &tn.at(a), v);
    let hf_zero = p.complement.iter().all(|&c| f.is_zero(&mv[c]));
    let in_kernel = mv.iter().all(|x| f.is_zero(x));
    let why = |s: &str| format!("{s} at {}, v = {}", describe(f, a, p), point_text(&lift_point(f, v)));
    if hf_zero != in_kernel {
        return Err(why("hf and the kernel condition disagree"));
    }
    if in_kernel {
        if !f.is_zero(&tn.pf_at(a)) {
            return Err(why("v ∈ Ker f(a) with a off Y"));
        }
        let k = linalg::kernel(f, &tn.at(a), tn.two_m);
        let mut rows = k.clone();
        rows.extend(p.basis.iter().cloned());
        if k.len() + 2 == linalg::rank(f, &rows, tn.two_m) {
            return Err(why("hf vanishes but Ker f(a) ∩ U = 0"));
        }
    }
    Ok(in_kernel)
}

// ---------------------------------------------------------------------------
// Sampling

fn combo<F: FieldOps>(f: &F, s: &F::El, x: &[F::El], t: &F::El, y: &[F::El]) -> Vec<F::El> {
    x.iter().zip(y).map(|(p, q)| f.add(&f.mul(s, p), &f.mul(t, q))).collect()
}

fn random_vector<F: FieldOps, R: Rng>(f: &F, len: usize, rng: &mut R) -> Vec<F::El> {
    loop {
        let v: Vec<F::El> = (0..len).map(|_| f.random(rng)).collect();
        if v.iter().any(|x| !f.is_zero(x)) {
            return v;
        }
    }
}

/// A point of the hypersurface `g = 0` on a random line.
fn random_root<F: FieldOps, R: Rng>(f: &F, g: &CompiledPoly<F>, len: usize, rng: &mut R) -> Vec<F::El> {
    loop {
        let b0 = random_vector(f, len, rng);
        let b1 = random_vector(f, len, rng);
        let restricted = g.restrict_to_line(f, &b0, &b1);
        if restricted.iter().all(|c| f.is_zero(c)) {
            continue;
        }
        let mut roots = upoly::binary_roots(f, &restricted, rng);
        if roots.is_empty() {
            continue;
        }
        let (s, t) = roots.swap_remove(rng.gen_range(0..roots.len()));
        let p = combo(f, &s, &b0, &t, &b1);
        if p.iter().any(|x| !f.is_zero(x)) {
            return p;
        }
    }
}

fn random_in_span<F: FieldOps, R: Rng>(f: &F, basis: &[Vec<F::El>], rng: &mut R) -> Vec<F::El> {
    loop {
        let mut v = vec![f.zero(); basis[0].len()];
        for b in basis {
            let c = f.random(rng);
            for (vi, bi) in v.iter_mut().zip(b) {
                *vi = f.add(vi, &f.mul(&c, bi));
            }
        }
        if v.iter().any(|x| !f.is_zero(x)) {
            return v;
        }
    }
}

/// A point `v ∈ Q`, a plane `U ∈ X` through it and a point `a ∈ Y` with
/// `v ∈ Ker f(a)`.
fn random_w_point<F: FieldOps, R: Rng>(
    tn: &TypedNet<F>,
    quartic: &CompiledPoly<F>,
    rng: &mut R,
) -> (Vec<F::El>, Plane<F::El>, Vec<F::El>) {
    let f = &tn.f;
    loop {
        let v = random_root(f, quartic, tn.two_m, rng);
        let fv = tn.fv(&v);
        let wv = linalg::kernel(f, &fv, tn.two_m);
        let other = match wv.len() {
            2 | 3 => loop {
                let w = random_in_span(f, &wv, rng);
                if linalg::rank(f, &[v.clone(), w.clone()], tn.two_m) == 2 {
                    break w;
                }
            },
            _ => continue,
        };
        let ker = linalg::left_kernel(f, &fv, tn.two_m);
        if ker.is_empty() {
            continue;
        }
        let a = random_in_span(f, &ker, rng);
        return (v.clone(), plane(f, &v, &other), a);
    }
}

struct RandomSample<E> {
    a_free: Vec<E>,
    a_w: Vec<E>,
    u: Plane<E>,
    v: Vec<E>,
    v_other: Vec<E>,
}

fn random_samples<F: FieldOps>(tn: &TypedNet<F>, pf: &CompiledPoly<F>, quartic: &CompiledPoly<F>, plan: &SamplePlan) -> Vec<RandomSample<F::El>> {
    (0..plan.samples)
        .into_par_iter()
        .map(|i| {
            let f = &tn.f;
            let mut rng = ChaCha8Rng::seed_from_u64(plan.seed);
            rng.set_stream(i as u64);
            let a_free = random_root(f, pf, tn.n, &mut rng);
            let (v, u, a_w) = random_w_point(tn, quartic, &mut rng);
            let v_other = loop {
                let w = random_in_span(f, &u.basis, &mut rng);
                if linalg::rank(f, &[v.clone(), w.clone()], tn.two_m) == 2 {
                    break w;
                }
            };
            RandomSample { a_free, a_w, u, v, v_other }
        })
        .collect()
}

struct Enumerated<E> {
    all_a: Vec<Vec<E>>,
    y: Vec<Vec<E>>,
    x: Vec<Plane<E>>,
}

fn enumerate_points<F: FieldOps>(tn: &TypedNet<F>) -> Result<Enumerated<F::El>> {
    let f = &tn.f;
    let all_a = projective_points(f, tn.n, grassmann::DEFAULT_ENUMERATION_LIMIT)?;
    let y = all_a.iter().filter(|a| f.is_zero(&tn.pf_at(a))).cloned().collect();
    let mut x = Vec::new();
    for_each_plane(f, tn.two_m, grassmann::DEFAULT_ENUMERATION_LIMIT, |u, w| {
        if isotropic(tn, u, w) {
            x.push(plane(f, u, w));
        }
    })?;
    Ok(Enumerated { all_a, y, x })
}

fn points_of_line<F: FieldOps>(f: &F, b: &[Vec<F::El>; 2]) -> Vec<Vec<F::El>> {
    let q = f.size().expect("finite");
    let mut out = vec![b[0].clone()];
    for i in 0..q {
        out.push(combo(f, &f.element(i), &b[0], &f.one(), &b[1]));
    }
    out
}

/// The plan's field must be finite and the reduction there regular.
fn prepare(net: &ANet, plan: &SamplePlan, cfg: &HilbertConfig) -> Result<ANet> {
    if !plan.field.is_finite() {
        return Err(Error::InvalidInput("fiber checks run over finite fields".into()));
    }
    let reduced = net_over(net, &plan.field)?;
    let reg = is_regular(&reduced, cfg)?;
    if !reg.is_yes() {
        return Err(Error::IrregularNet(format!("reduction to {}: {}", plan.field, reg.witness)));
    }
    Ok(reduced)
}

fn random_inputs(reduced: &ANet, plan: &SamplePlan) -> Result<(crate::MultiPoly, crate::MultiPoly)> {
    if plan.samples == 0 {
        return Err(Error::Inconclusive("sample count is zero".into()));
    }
    Ok((pfaffian_hypersurface(reduced)?, q_quartic(reduced)?))
}

/// Fiber checks of `Ker f(a) -> V/U -> U*`: a complex everywhere, exact
/// off `W`, corank one on `W`.
pub fn jw_pointwise(net: &ANet, plan: &SamplePlan, cfg: &HilbertConfig) -> Result<FiberReport> {
    let reduced = prepare(net, plan, cfg)?;
    match plan.mode {
        SampleMode::Enumerate => with_typed_net!(&reduced, tn => {
            let pts = enumerate_points(&tn)?;
            let outcomes: Vec<Vec<Outcome>> =
                pts.y.par_iter().map(|a| pts.x.iter().map(|u| jw_pair(&tn, a, u)).collect()).collect();
            summarize("jw", plan, outcomes.into_iter().flatten())
        }),
        SampleMode::Random => {
            let (pf, quartic) = random_inputs(&reduced, plan)?;
            with_typed_net!(&reduced, tn => {
                let cpf = CompiledPoly::new(&tn.f, &pf)?;
                let cq = CompiledPoly::new(&tn.f, &quartic)?;
                let samples = random_samples(&tn, &cpf, &cq, plan);
                let outcomes: Vec<Outcome> = samples
                    .par_iter()
                    .flat_map_iter(|s| [jw_pair(&tn, &s.a_free, &s.u), expect_w(jw_pair(&tn, &s.a_w, &s.u))])
                    .collect();
                summarize("jw", plan, outcomes)
            })
        }
    }
}

fn expect_w(o: Outcome) -> Outcome {
    match o {
        Ok(false) => Err("a pair built on W tested off W".into()),
        other => other,
    }
}

/// `hf = 0` exactly where `v ∈ Ker f(a)`.
pub fn jw1_section_check(net: &ANet, plan: &SamplePlan, cfg: &HilbertConfig) -> Result<FiberReport> {
    let reduced = prepare(net, plan, cfg)?;
    match plan.mode {
        SampleMode::Enumerate => with_typed_net!(&reduced, tn => {
            let pts = enumerate_points(&tn)?;
            let lines: Vec<Vec<Vec<_>>> = pts.x.iter().map(|u| points_of_line(&tn.f, &u.basis)).collect();
            let outcomes: Vec<Vec<Outcome>> = pts
                .all_a
                .par_iter()
                .map(|a| {
                    let mut out = Vec::new();
                    for (u, vs) in pts.x.iter().zip(&lines) {
                        for v in vs {
                            out.push(jw1_triple(&tn, a, u, v));
                        }
                    }
                    out
                })
                .collect();
            summarize("jw1", plan, outcomes.into_iter().flatten())
        }),
        SampleMode::Random => {
            let (pf, quartic) = random_inputs(&reduced, plan)?;
            with_typed_net!(&reduced, tn => {
                let cpf = CompiledPoly::new(&tn.f, &pf)?;
                let cq = CompiledPoly::new(&tn.f, &quartic)?;
                let samples = random_samples(&tn, &cpf, &cq, plan);
                let outcomes: Vec<Outcome> = samples
                    .par_iter()
                    .flat_map_iter(|s| {
                        [
                            jw1_triple(&tn, &s.a_free, &s.u, &s.v_other),
                            expect_w(jw1_triple(&tn, &s.a_w, &s.u, &s.v)),
                            jw1_triple(&tn, &s.a_w, &s.u, &s.v_other).and_then(|w| {
                                if w {
                                    Err("hf vanishes at a second point of U".to_string())
                                } else {
                                    Ok(w)
                                }
                            }),
                        ]
                    })
                    .collect();
                summarize("jw1", plan, outcomes)
            })
        }
    }
}

// ---------------------------------------------------------------------------
// Point counts

/// Number of points of `V(I) ⊂ P^(n-1)(F)`.
pub fn count_points(ideal: &HomogeneousIdeal, field: &Field) -> Result<u128> {
    let q = field.size().ok_or_else(|| Error::InvalidInput("point counts need a finite field".into()))?;
    let n = ideal.nvars();
    let total = (0..n as u32).map(|k| q.pow(k)).sum::<u128>();
    if total > COUNT_LIMIT {
        return Err(Error::LimitExceeded { what: "point count".into(), size: total, limit: COUNT_LIMIT });
    }
    let ideal = if ideal.field() == field { ideal.clone() } else { ideal.map_field(field)? };
    crate::with_field_ops!(field, f => {
        let gens = ideal.generators().iter().map(|g| CompiledPoly::new(f, g)).collect::<Result<Vec<_>>>()?;
        let pts = projective_points(f, n, COUNT_LIMIT)?;
        Ok(pts.par_iter().filter(|p| gens.iter().all(|g| f.is_zero(&g.eval(f, p)))).count() as u128)
    })
}

/// Ranks of `f(a)` over the points of `Y(F)`.
pub fn y_rank_profile(net: &ANet, field: &Field) -> Result<RankProfile> {
    let reduced = net_over(net, field)?;
    with_typed_net!(&reduced, tn => {
        let pts = projective_points(&tn.f, tn.n, COUNT_LIMIT)?;
        let mut histogram = vec![0usize; tn.two_m + 1];
        let mut points = 0;
        for a in &pts {
            if tn.f.is_zero(&tn.pf_at(a)) {
                points += 1;
                histogram[tn.rank_at(a)] += 1;
            }
        }
        let min_rank = histogram.iter().position(|&c| c > 0).unwrap_or(0);
        Ok(RankProfile { field: field.to_string(), points, histogram, min_rank })
    })
}
