//! The objects attached to a net: the Pfaffian hypersurface `Y`, the linear
//! section `X` of the Grassmannian, the kernel map `κ: Y -> Gr(2,V)`, the
//! quartic `Q` and curve `C` in `P(V)`, the fibers of `φ` and `ψ`, and
//! splitting types of the kernel bundle on lines of `Y`.

use std::collections::HashSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{Field, FieldElement, FieldOps};
use crate::grassmann::{self, for_each_plane, pairs, wedge, GrassmannLine, PluckerPoint};
use crate::ideals::{
    is_empty_projective, jacobian_ideal, minors_ideal, subsets, Emptiness, HilbertConfig, HomogeneousIdeal,
};
use crate::linalg;
use crate::matrix::{pfaffian, ExactMatrix};
use crate::multipoly::{det_poly, exact_divide, pfaffian_poly, CompiledPoly, MultiPoly, SkewPolyMatrix};
use crate::net::{ANet, TypedNet};
use crate::upoly;
use crate::with_typed_net;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Tri {
    Yes,
    No,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub verdict: Tri,
    pub witness: String,
}

impl Verdict {
    fn new(verdict: Tri, witness: impl Into<String>) -> Self {
        Verdict { verdict, witness: witness.into() }
    }
    pub fn is_yes(&self) -> bool {
        self.verdict == Tri::Yes
    }
}

pub fn point_text(v: &[FieldElement]) -> String {
    let parts: Vec<String> = v.iter().map(ToString::to_string).collect();
    format!("[{}]", parts.join(", "))
}

pub(crate) fn lower_point<F: FieldOps>(f: &F, v: &[FieldElement], len: usize) -> Result<Vec<F::El>> {
    if v.len() != len {
        return Err(Error::DimensionMismatch(format!("point of length {} where {len} is needed", v.len())));
    }
    if v.iter().all(FieldElement::is_zero) {
        return Err(Error::InvalidInput("zero vector is not a projective point".into()));
    }
    v.iter().map(|x| f.lower(x)).collect()
}

pub(crate) fn lift_point<F: FieldOps>(f: &F, v: &[F::El]) -> Vec<FieldElement> {
    v.iter().map(|x| f.lift(x)).collect()
}

fn emptiness_text(e: &Emptiness) -> String {
    match e {
        Emptiness::Empty { degree } => format!("Hilbert function vanishes in degree {degree}"),
        Emptiness::NonEmpty { degree, value } => {
            format!("Hilbert function stays positive (value {value} in degree {degree})")
        }
        Emptiness::Inconclusive { cap, .. } => format!("Hilbert function still decreasing at degree cap {cap}"),
    }
}

/// Projective points with entries from `digits` (whose first two entries
/// are zero and one), leading coordinate one, in lexicographic order.
fn for_each_projective<T: Clone>(digits: &[T], n: usize, mut visit: impl FnMut(&[T]) -> bool) {
    let q = digits.len();
    for lead in 0..n {
        let mut v: Vec<T> = vec![digits[0].clone(); n];
        v[lead] = digits[1].clone();
        let free = n - lead - 1;
        let mut idx = vec![0usize; free];
        loop {
            for (k, &d) in idx.iter().enumerate() {
                v[lead + 1 + k] = digits[d].clone();
            }
            if !visit(&v) {
                return;
            }
            let mut pos = free;
            loop {
                if pos == 0 {
                    break;
                }
                pos -= 1;
                idx[pos] += 1;
                if idx[pos] < q {
                    break;
                }
                idx[pos] = 0;
                if pos == 0 {
                    pos = usize::MAX;
                    break;
                }
            }
            if pos == usize::MAX || free == 0 {
                break;
            }
        }
    }
}

/// Every point of `P^(n-1)(F)` for a finite field `F`.
pub fn projective_points<F: FieldOps>(f: &F, n: usize, limit: u128) -> Result<Vec<Vec<F::El>>> {
    let q = f.size().ok_or_else(|| Error::InvalidInput("enumeration needs a finite field".into()))?;
    let total = (0..n as u32).map(|k| q.pow(k)).sum::<u128>();
    if total > limit {
        return Err(Error::LimitExceeded { what: "projective space enumeration".into(), size: total, limit });
    }
    let digits: Vec<F::El> = (0..q).map(|i| f.element(i)).collect();
    let mut out = Vec::with_capacity(total as usize);
    for_each_projective(&digits, n, |v| {
        out.push(v.to_vec());
        true
    });
    Ok(out)
}

/// Cheap candidate points: coordinate vectors, then every point with
/// entries in the field when it has at most 16 elements, otherwise entries
/// in `{0, 1, -1}`.
fn probe_points<F: FieldOps>(f: &F, n: usize) -> Vec<Vec<F::El>> {
    let mut out: Vec<Vec<F::El>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { f.one() } else { f.zero() }).collect())
        .collect();
    let digits: Vec<F::El> = match f.size() {
        Some(q) if q <= 16 => (0..q).map(|i| f.element(i)).collect(),
        _ => vec![f.zero(), f.one(), f.from_i64(-1)],
    };
    let mut budget = 20_000usize;
    for_each_projective(&digits, n, |v| {
        out.push(v.to_vec());
        budget -= 1;
        budget > 0
    });
    out
}

// ---------------------------------------------------------------------------
// Polynomial objects

/// Pfaffians of the principal `(2m-2)`-submatrices of `f(a)`, the one for
/// the complement of `{i, j}` at the position of the pair `(i, j)` in
/// [`pairs`] order.
pub fn sub_pfaffians(net: &ANet) -> Result<Vec<MultiPoly>> {
    let m = net.skew_poly_matrix()?;
    let size = net.two_m();
    pairs(size)
        .into_iter()
        .map(|(i, j)| {
            let keep: Vec<usize> = (0..size).filter(|&k| k != i && k != j).collect();
            if keep.is_empty() {
                return MultiPoly::constant(net.field(), net.n(), net.field().one());
            }
            let sub: Vec<Vec<MultiPoly>> =
                keep.iter().map(|&r| keep.iter().map(|&c| m.get(r, c).clone()).collect()).collect();
            pfaffian_poly(&SkewPolyMatrix::new(sub)?)
        })
        .collect()
}

/// Sign relating sub-Pfaffians to the Plücker coordinates of the kernel of
/// a corank-2 skew form: `p_ij = (-1)^(i+j+1) Pf(M without rows/cols i, j)`.
pub fn kernel_sign(i: usize, j: usize) -> i64 {
    if (i + j) % 2 == 1 {
        1
    } else {
        -1
    }
}

pub fn pfaffian_hypersurface(net: &ANet) -> Result<MultiPoly> {
    let pf = pfaffian_poly(&net.skew_poly_matrix()?)?;
    if pf.is_zero() {
        return Err(Error::DegenerateNet("the Pfaffian vanishes identically".into()));
    }
    Ok(pf)
}

/// Plücker quadrics plus the linear forms `l_i(p) = sum_{j<k} (F_i)_jk p_jk`.
pub fn x_ideal(net: &ANet) -> Result<HomogeneousIdeal> {
    let ps = pairs(net.two_m());
    let mut gens = grassmann::plucker_quadrics(net.field(), net.two_m())?;
    for m in net.matrices() {
        let coeffs: Vec<FieldElement> = ps.iter().map(|&(j, k)| m.get(j, k).clone()).collect();
        gens.push(MultiPoly::linear(net.field(), &coeffs)?);
    }
    HomogeneousIdeal::new(net.field(), ps.len(), gens)
}

/// Is the plane spanned by `u, w` isotropic for every form of the net?
pub(crate) fn isotropic<F: FieldOps>(tn: &TypedNet<F>, u: &[F::El], w: &[F::El]) -> bool {
    (0..tn.n).all(|i| tn.f.is_zero(&tn.form(i, u, w)))
}

/// Plücker point of `Ker f(a)`.
pub fn kappa(net: &ANet, a: &[FieldElement]) -> Result<PluckerPoint> {
    with_typed_net!(net, tn => {
        let f = &tn.f;
        let at = lower_point(f, a, net.n())?;
        let k = kernel_plane(&tn, &at)?;
        let p = wedge(f, &k[0], &k[1]);
        PluckerPoint::new(net.two_m(), lift_point(f, &p))
    })
}

pub(crate) fn kernel_plane<F: FieldOps>(tn: &TypedNet<F>, a: &[F::El]) -> Result<[Vec<F::El>; 2]> {
    let f = &tn.f;
    let m = tn.at(a);
    if !f.is_zero(&pfaffian(f, &m)) {
        return Err(Error::NotOnVariety("the Pfaffian does not vanish at a".into()));
    }
    let k = linalg::kernel(f, &m, tn.two_m);
    if k.len() != 2 {
        return Err(Error::IrregularNet(format!("rank f(a) = {} < 2m - 2", tn.two_m - k.len())));
    }
    Ok([k[0].clone(), k[1].clone()])
}

/// Maximal minors of the `n x 2m` matrix `f_v` omitting one column, with
/// `Delta_i = (-1)^i Q v_i`; requires `n = 2m - 1`.
pub fn q_quartic(net: &ANet) -> Result<MultiPoly> {
    let (n, two_m) = (net.n(), net.two_m());
    if n + 1 != two_m {
        return Err(Error::InvalidInput(format!("the quartic needs n = 2m - 1, got n = {n}, 2m = {two_m}")));
    }
    let fv = net.fv_matrix()?;
    let mut quotient: Option<MultiPoly> = None;
    for i in 0..two_m {
        let sub: Vec<Vec<MultiPoly>> = fv
            .iter()
            .map(|row| row.iter().enumerate().filter(|&(k, _)| k != i).map(|(_, e)| e.clone()).collect())
            .collect();
        let delta = det_poly(&sub)?;
        if delta.is_zero() {
            return Err(Error::DegenerateNet(format!("the minor omitting column {i} vanishes")));
        }
        let vi = MultiPoly::var(net.field(), two_m, i);
        let mut q = exact_divide(&delta, &vi)?;
        if i % 2 == 1 {
            q = q.neg();
        }
        match &quotient {
            None => quotient = Some(q),
            Some(prev) if *prev == q => {}
            Some(_) => {
                return Err(Error::IrregularNet(format!("quotient of minor {i} disagrees with minor 0")));
            }
        }
    }
    normalize_form(&quotient.expect("two_m >= 2"))
}

/// Leading coefficient 1 over finite fields; over QQ a primitive integer
/// polynomial with positive leading coefficient.
pub fn normalize_form(p: &MultiPoly) -> Result<MultiPoly> {
    match p.field() {
        Field::Rational => {
            use num_integer::Integer;
            use num_traits::{One, Signed, Zero};
            let mut den = num_bigint::BigInt::one();
            let mut num = num_bigint::BigInt::zero();
            for (_, c) in p.terms() {
                let q = c.as_rational().expect("rational coefficients");
                den = den.lcm(q.denom());
                num = num.gcd(q.numer());
            }
            if num.is_zero() {
                return Ok(p.clone());
            }
            let (_, lead) = p.leading_term().expect("nonzero");
            if lead.as_rational().expect("rational").is_negative() {
                num = -num;
            }
            let scale = num_rational::BigRational::new(den, num);
            p.scale(&FieldElement::Rational(scale))
        }
        _ => p.monic(),
    }
}

/// `rank f_v <= n - 2` as the vanishing of all `(n-1)`-minors of `f_v`.
pub fn c_ideal(net: &ANet) -> Result<HomogeneousIdeal> {
    if net.n() < 2 {
        return Err(Error::InvalidInput("the curve needs n >= 2".into()));
    }
    minors_ideal(&net.fv_matrix()?, net.n() - 1)
}

pub fn rank_fv(net: &ANet, v: &[FieldElement]) -> Result<usize> {
    with_typed_net!(net, tn => {
        let vt = lower_point(&tn.f, v, net.two_m())?;
        Ok(tn.rank_fv(&vt))
    })
}

/// Ranks of `f_v` over every point of `P(V)(F)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RankProfile {
    pub field: String,
    pub points: usize,
    /// `histogram[r]` points with `rank f_v = r`.
    pub histogram: Vec<usize>,
    pub min_rank: usize,
}

pub fn fv_rank_profile(net: &ANet, field: &Field, limit: u128) -> Result<RankProfile> {
    let reduced = net_over(net, field)?;
    with_typed_net!(&reduced, tn => {
        let pts = projective_points(&tn.f, tn.two_m, limit)?;
        let histogram = pts
            .par_iter()
            .fold(
                || vec![0usize; tn.n + 1],
                |mut h, v| {
                    h[tn.rank_fv(v)] += 1;
                    h
                },
            )
            .reduce(
                || vec![0usize; tn.n + 1],
                |a, b| a.iter().zip(&b).map(|(x, y)| x + y).collect(),
            );
        let min_rank = histogram.iter().position(|&c| c > 0).unwrap_or(0);
        Ok(RankProfile { field: field.to_string(), points: pts.len(), histogram, min_rank })
    })
}

/// Emptiness of `{v : rank f_v <= 2}`, the vanishing of all 3-minors.
pub fn rank_two_locus(net: &ANet, cfg: &HilbertConfig) -> Result<Verdict> {
    let Some(model) = prime_field_model(net) else {
        return Ok(Verdict::new(Tri::Inconclusive, "entries outside the prime field"));
    };
    let ideal = minors_ideal(&model.fv_matrix()?, 3)?;
    let e = is_empty_projective(&ideal, cfg)?;
    let text = format!("3-minors of f_v: {}", emptiness_text(&e));
    Ok(match e.is_empty() {
        Some(true) => Verdict::new(Tri::Yes, text),
        Some(false) => Verdict::new(Tri::No, text),
        None => Verdict::new(Tri::Inconclusive, text),
    })
}

// ---------------------------------------------------------------------------
// Fibers

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PsiFiber {
    Point(Vec<FieldElement>),
    /// Two points spanning the line.
    Line([Vec<FieldElement>; 2]),
}

/// `P(Ker f_v) ⊂ P(A)`.
pub fn psi_fiber(net: &ANet, v: &[FieldElement]) -> Result<PsiFiber> {
    with_typed_net!(net, tn => {
        let f = &tn.f;
        let vt = lower_point(f, v, net.two_m())?;
        let k = linalg::left_kernel(f, &tn.fv(&vt), net.two_m());
        for a in &k {
            if !f.is_zero(&tn.pf_at(a)) {
                return Err(Error::IrregularNet("a kernel point of f_v is off the Pfaffian hypersurface".into()));
            }
        }
        match k.len() {
            0 => Err(Error::NotOnVariety("f_v is injective, so v is off the quartic".into())),
            1 => Ok(PsiFiber::Point(lift_point(f, &k[0]))),
            2 => Ok(PsiFiber::Line([lift_point(f, &k[0]), lift_point(f, &k[1])])),
            d => Err(Error::IrregularNet(format!("Ker f_v has dimension {d}"))),
        }
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PhiFiber {
    Point(PluckerPoint),
    Line(GrassmannLine),
}

/// Planes `U` with `v ∈ U ⊂ (Im f_v)^⊥`.
pub fn phi_fiber(net: &ANet, v: &[FieldElement]) -> Result<PhiFiber> {
    with_typed_net!(net, tn => {
        let f = &tn.f;
        let two_m = net.two_m();
        let vt = lower_point(f, v, two_m)?;
        let w = linalg::kernel(f, &tn.fv(&vt), two_m);
        match w.len() {
            0 | 1 => Err(Error::NotOnVariety("(Im f_v)^⊥ is spanned by v, so v is off the quartic".into())),
            2 => {
                let p = wedge(f, &w[0], &w[1]);
                Ok(PhiFiber::Point(PluckerPoint::new(two_m, lift_point(f, &p))?))
            }
            3 => {
                let wm = ExactMatrix::from_typed(f, 3, two_m, &w);
                Ok(PhiFiber::Line(grassmann::pencil_line(v, &wm)?))
            }
            d => Err(Error::IrregularNet(format!("(Im f_v)^⊥ has dimension {d}"))),
        }
    })
}

// ---------------------------------------------------------------------------
// Lines on Y

/// `dim ker (V ⊗ S^(s-1) -> V* ⊗ S^s)`, `v ⊗ g ↦ f(a0)(v,-) λ g + f(a1)(v,-) μ g`:
/// sections of the kernel bundle twisted by `s`.
fn kernel_sections<F: FieldOps>(tn: &TypedNet<F>, m0: &[Vec<F::El>], m1: &[Vec<F::El>], s: usize) -> usize {
    if s == 0 {
        return 0;
    }
    let f = &tn.f;
    let dim = tn.two_m;
    let cols = dim * (s + 1);
    let mut rows = Vec::with_capacity(dim * s);
    for j in 0..dim {
        for k in 0..s {
            let mut row = vec![f.zero(); cols];
            for r in 0..dim {
                row[r * (s + 1) + k] = f.add(&row[r * (s + 1) + k], &m0[j][r]);
                row[r * (s + 1) + k + 1] = f.add(&row[r * (s + 1) + k + 1], &m1[j][r]);
            }
            rows.push(row);
        }
    }
    rows.len() - linalg::rank(f, &rows, cols)
}

/// Splitting type `(d1, d2)`, `d1 <= d2`, of the kernel bundle
/// `K = O(-d1) ⊕ O(-d2) ⊂ V ⊗ O(-1)` of the pencil `f(λ a0 + μ a1)`.
fn splitting_typed<F: FieldOps>(tn: &TypedNet<F>, a0: &[F::El], a1: &[F::El]) -> Result<(usize, usize)> {
    let m0 = tn.at(a0);
    let m1 = tn.at(a1);
    let cap = 2 * tn.two_m + 2;
    let mut d1 = None;
    for s in 0..=cap {
        let h = kernel_sections(tn, &m0, &m1, s);
        match d1 {
            None if h > 0 => {
                if h > 1 {
                    return Ok((s, s));
                }
                d1 = Some(s);
            }
            Some(d) if h > s - d + 1 => return Ok((d, s)),
            _ => {}
        }
    }
    Err(Error::Inconclusive(format!("kernel bundle sections did not determine a splitting type by twist {cap}")))
}

fn line_points<F: FieldOps>(f: &F, a0: &[F::El], a1: &[F::El]) -> Vec<Vec<F::El>> {
    let combo = |s: &F::El, t: &F::El| -> Vec<F::El> {
        a0.iter().zip(a1).map(|(x, y)| f.add(&f.mul(s, x), &f.mul(t, y))).collect()
    };
    let mut out = vec![combo(&f.zero(), &f.one())];
    let params: Vec<F::El> = match f.size() {
        Some(q) if q <= 64 => (0..q).map(|i| f.element(i)).collect(),
        _ => (0..8).map(|i| f.from_i64(i)).collect(),
    };
    for t in params {
        out.push(combo(&f.one(), &t));
    }
    out
}

fn check_line_on_y<F: FieldOps>(
    tn: &TypedNet<F>,
    pf: &CompiledPoly<F>,
    a0: &[F::El],
    a1: &[F::El],
) -> Result<()> {
    let f = &tn.f;
    if pf.restrict_to_line(f, a0, a1).iter().any(|c| !f.is_zero(c)) {
        return Err(Error::NotOnVariety("the line is not contained in the Pfaffian hypersurface".into()));
    }
    for a in line_points(f, a0, a1) {
        let r = tn.rank_at(&a);
        if r + 2 < tn.two_m {
            return Err(Error::IrregularNet(format!("rank f(a) = {r} at a point of the line")));
        }
    }
    Ok(())
}

pub fn splitting_type_on_line(net: &ANet, a0: &[FieldElement], a1: &[FieldElement]) -> Result<(usize, usize)> {
    let pf = pfaffian_hypersurface(net)?;
    with_typed_net!(net, tn => {
        let f = &tn.f;
        let x = lower_point(f, a0, net.n())?;
        let y = lower_point(f, a1, net.n())?;
        if linalg::rank(f, &[x.clone(), y.clone()], net.n()) < 2 {
            return Err(Error::InvalidInput("the two points coincide".into()));
        }
        check_line_on_y(&tn, &CompiledPoly::new(f, &pf)?, &x, &y)?;
        splitting_typed(&tn, &x, &y)
    })
}

/// A line of `Y` with its splitting type and, when it is `M_c`, the point
/// `c` spanning the common kernel.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LineOnY {
    pub a0: Vec<FieldElement>,
    pub a1: Vec<FieldElement>,
    pub splitting: (usize, usize),
    pub c: Option<Vec<FieldElement>>,
}

/// The point `c` with `c ∈ Ker f(a)` for all `a` on the line, if any.
fn common_kernel<F: FieldOps>(tn: &TypedNet<F>, a0: &[F::El], a1: &[F::El]) -> Option<Vec<F::El>> {
    let f = &tn.f;
    let mut rows = tn.at(a0);
    rows.extend(tn.at(a1));
    let k = linalg::kernel(f, &rows, tn.two_m);
    (k.len() == 1).then(|| grassmann::normalize(f, &k[0]).expect("nonzero"))
}

/// Every line of `P(A)` over a finite field that lies on `Y`, classified.
pub fn lines_on_y(net: &ANet, limit: u128) -> Result<Vec<LineOnY>> {
    let pf = pfaffian_hypersurface(net)?;
    with_typed_net!(net, tn => {
        let f = &tn.f;
        let cpf = CompiledPoly::new(f, &pf)?;
        let mut found: Vec<(Vec<_>, Vec<_>)> = Vec::new();
        for_each_plane(f, net.n(), limit, |a0, a1| {
            if cpf.restrict_to_line(f, a0, a1).iter().all(|c| f.is_zero(c)) {
                found.push((a0.to_vec(), a1.to_vec()));
            }
        })?;
        found
            .into_iter()
            .map(|(a0, a1)| {
                check_line_on_y(&tn, &cpf, &a0, &a1)?;
                let splitting = splitting_typed(&tn, &a0, &a1)?;
                let c = common_kernel(&tn, &a0, &a1).map(|c| lift_point(f, &c));
                Ok(LineOnY { a0: lift_point(f, &a0), a1: lift_point(f, &a1), splitting, c })
            })
            .collect()
    })
}

// ---------------------------------------------------------------------------
// Singularities of X

/// Rank of `a ↦ f(a)|_{U × V/U}` for the plane spanned by `u, w`.
fn tangent_rank<F: FieldOps>(tn: &TypedNet<F>, u: &[F::El], w: &[F::El]) -> usize {
    let f = &tn.f;
    let mut basis = vec![u.to_vec(), w.to_vec()];
    let pivots = linalg::rref(f, &mut basis, tn.two_m);
    let complement: Vec<usize> = (0..tn.two_m).filter(|c| !pivots.contains(c)).collect();
    let rows: Vec<Vec<F::El>> = tn
        .mats
        .iter()
        .map(|m| {
            let mut row = Vec::with_capacity(2 * complement.len());
            for b in &basis {
                let bm: Vec<F::El> = (0..tn.two_m)
                    .map(|k| b.iter().zip(m).fold(f.zero(), |acc, (x, r)| f.add(&acc, &f.mul(x, &r[k]))))
                    .collect();
                row.extend(complement.iter().map(|&c| bm[c].clone()));
            }
            row
        })
        .collect();
    linalg::rank(f, &rows, 2 * complement.len())
}

/// Is `U ∈ X` a singular point? Fails when `U ∉ X`.
pub fn tangent_test_x(net: &ANet, u: &PluckerPoint) -> Result<bool> {
    if u.two_m() != net.two_m() {
        return Err(Error::DimensionMismatch("Plücker point of the wrong Grassmannian".into()));
    }
    let basis = grassmann::plane_from_plucker(u)?;
    with_typed_net!(net, tn => {
        let b = basis.typed(&tn.f)?;
        if !isotropic(&tn, &b[0], &b[1]) {
            return Err(Error::NotOnVariety("U is not isotropic for the net".into()));
        }
        Ok(tangent_rank(&tn, &b[0], &b[1]) < net.n())
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FieldCheckStatus {
    Checked,
    /// The reduction is not a regular net.
    BadReduction,
    Skipped,
}

/// `{U ∈ X : singular}` against `{κ(a) : a ∈ Y} ∩ X` over one finite field.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldConsistency {
    pub field: String,
    pub status: FieldCheckStatus,
    pub note: String,
    pub x_points: usize,
    pub y_points: usize,
    pub singular_x: usize,
    pub kappa_on_x: usize,
    pub sets_equal: bool,
    /// Up to eight singular points, sorted.
    pub sample: Vec<String>,
}

const SAMPLE_LIMIT: usize = 8;

fn singularity_sets<F: FieldOps>(tn: &TypedNet<F>) -> Result<FieldConsistency> {
    let f = &tn.f;
    let mut x_points = 0usize;
    let mut singular: HashSet<Vec<F::El>> = HashSet::new();
    for_each_plane(f, tn.two_m, grassmann::DEFAULT_ENUMERATION_LIMIT, |u, w| {
        if isotropic(tn, u, w) {
            x_points += 1;
            if tangent_rank(tn, u, w) < tn.n {
                singular.insert(grassmann::normalize(f, &wedge(f, u, w)).expect("plane"));
            }
        }
    })?;
    let mut y_points = 0usize;
    let mut kappa: HashSet<Vec<F::El>> = HashSet::new();
    for a in projective_points(f, tn.n, grassmann::DEFAULT_ENUMERATION_LIMIT)? {
        if !f.is_zero(&tn.pf_at(&a)) {
            continue;
        }
        y_points += 1;
        let [k0, k1] = kernel_plane(tn, &a)?;
        if isotropic(tn, &k0, &k1) {
            kappa.insert(grassmann::normalize(f, &wedge(f, &k0, &k1)).expect("plane"));
        }
    }
    let mut sample: Vec<String> = singular
        .iter()
        .map(|p| PluckerPoint::from_coords(tn.two_m, lift_point(f, p)).expect("nonzero").to_string())
        .collect();
    sample.sort();
    sample.truncate(SAMPLE_LIMIT);
    Ok(FieldConsistency {
        field: f.descriptor().to_string(),
        status: FieldCheckStatus::Checked,
        note: String::new(),
        x_points,
        y_points,
        singular_x: singular.len(),
        kappa_on_x: kappa.len(),
        sets_equal: singular == kappa,
        sample,
    })
}

fn skipped(field: &Field, status: FieldCheckStatus, note: String) -> FieldConsistency {
    FieldConsistency {
        field: field.to_string(),
        status,
        note,
        x_points: 0,
        y_points: 0,
        singular_x: 0,
        kappa_on_x: 0,
        sets_equal: false,
        sample: Vec::new(),
    }
}

/// The net viewed over `target`: reduction of a rational net, or the net
/// itself when it already lives there.
pub fn net_over(net: &ANet, target: &Field) -> Result<ANet> {
    if net.field() == target {
        return Ok(net.clone());
    }
    match net.field() {
        Field::Rational => net.reduce(target),
        Field::Prime(p) if target.characteristic() == *p as u64 => net.reduce(target),
        _ => Err(Error::FieldMismatch { left: net.field().to_string(), right: target.to_string() }),
    }
}

/// The same net over its prime field when every entry lies there.
fn prime_field_model(net: &ANet) -> Option<ANet> {
    match net.field() {
        Field::Extension(e) => {
            let fx = net.to_fixture().ok()?;
            ANet::from_upper(&Field::Prime(e.p()), net.two_m(), &fx.matrices).ok()
        }
        _ => Some(net.clone()),
    }
}

pub fn field_consistency(net: &ANet, field: &Field, cfg: &HilbertConfig) -> FieldConsistency {
    let reduced = match net_over(net, field) {
        Ok(r) => r,
        Err(e) => return skipped(field, FieldCheckStatus::BadReduction, e.to_string()),
    };
    match is_regular(&reduced, cfg) {
        Ok(v) if v.is_yes() => {}
        Ok(v) => return skipped(field, FieldCheckStatus::BadReduction, format!("reduction not regular: {}", v.witness)),
        Err(e) => return skipped(field, FieldCheckStatus::BadReduction, e.to_string()),
    }
    let run = || -> Result<FieldConsistency> { with_typed_net!(&reduced, tn => singularity_sets(&tn)) };
    run().unwrap_or_else(|e| skipped(field, FieldCheckStatus::Skipped, e.to_string()))
}

// ---------------------------------------------------------------------------
// Classification

pub fn is_regular(net: &ANet, cfg: &HilbertConfig) -> Result<Verdict> {
    let two_m = net.two_m();
    if two_m == 2 {
        return Ok(Verdict::new(Tri::Yes, "2m = 2: every nonzero form has rank 2"));
    }
    let witness: Option<String> = with_typed_net!(net, tn => {
        probe_points(&tn.f, net.n()).into_iter().find_map(|a| {
            let r = tn.rank_at(&a);
            (r + 4 <= two_m).then(|| format!("rank f(a) = {r} at a = {}", point_text(&lift_point(&tn.f, &a))))
        })
    });
    if let Some(w) = witness {
        return Ok(Verdict::new(Tri::No, w));
    }
    let Some(model) = prime_field_model(net) else {
        return Ok(Verdict::new(Tri::Inconclusive, "entries outside the prime field; no rank-deficient probe point"));
    };
    let ideal = HomogeneousIdeal::new(model.field(), model.n(), sub_pfaffians(&model)?)?;
    let e = is_empty_projective(&ideal, cfg)?;
    let text = format!("ideal of {}-sub-Pfaffians: {}", two_m - 2, emptiness_text(&e));
    Ok(match e.is_empty() {
        Some(true) => Verdict::new(Tri::Yes, text),
        Some(false) => Verdict::new(Tri::No, text),
        None => Verdict::new(Tri::Inconclusive, text),
    })
}

/// Emptiness of the singular locus of the Pfaffian hypersurface.
pub fn y_smoothness(net: &ANet, cfg: &HilbertConfig) -> Result<Verdict> {
    let Some(model) = prime_field_model(net) else {
        return Ok(Verdict::new(Tri::Inconclusive, "entries outside the prime field"));
    };
    let pf = match pfaffian_hypersurface(&model) {
        Ok(p) => p,
        Err(Error::DegenerateNet(w)) => return Ok(Verdict::new(Tri::No, w)),
        Err(e) => return Err(e),
    };
    let ideal = HomogeneousIdeal::new(model.field(), model.n(), vec![pf])?;
    let e = is_empty_projective(&jacobian_ideal(&ideal, Some(1))?, cfg)?;
    let text = format!("Jacobian ideal of the Pfaffian: {}", emptiness_text(&e));
    Ok(match e.is_empty() {
        Some(true) => Verdict::new(Tri::Yes, text),
        Some(false) => Verdict::new(Tri::No, text),
        None => Verdict::new(Tri::Inconclusive, text),
    })
}

/// Ideal in `P(A)` of the points `a ∈ Y` whose kernel plane lies on `X`:
/// the Pfaffian together with `l_i(κ(a))`, with `κ(a)` written through
/// sub-Pfaffians.
pub fn kappa_x_ideal(net: &ANet) -> Result<HomogeneousIdeal> {
    let pf = pfaffian_hypersurface(net)?;
    let sp = sub_pfaffians(net)?;
    let ps = pairs(net.two_m());
    let field = net.field();
    let mut gens = vec![pf];
    for m in net.matrices() {
        let mut acc = MultiPoly::zero(field, net.n());
        for (k, &(i, j)) in ps.iter().enumerate() {
            let c = m.get(i, j).mul(&field.from_i64(kernel_sign(i, j)))?;
            if !c.is_zero() {
                acc = acc.add(&sp[k].scale(&c)?)?;
            }
        }
        gens.push(acc);
    }
    HomogeneousIdeal::new(field, net.n(), gens)
}

fn x_smoothness(net: &ANet, cfg: &HilbertConfig, checks: &[FieldConsistency]) -> Result<Verdict> {
    let singular = checks.iter().find(|c| c.status == FieldCheckStatus::Checked && c.singular_x > 0);
    let char_net = net.field().characteristic();
    if let Some(c) = singular {
        // over QQ a singular reduction only shows bad reduction at that prime
        let same_char = c.field.parse::<Field>().map(|f| f.characteristic() == char_net).unwrap_or(false);
        if char_net != 0 && same_char {
            return Ok(Verdict::new(
                Tri::No,
                format!("{} singular point(s) of X over {}, e.g. {}", c.singular_x, c.field, c.sample[0]),
            ));
        }
    }
    let Some(model) = prime_field_model(net) else {
        return Ok(Verdict::new(Tri::Inconclusive, "entries outside the prime field"));
    };
    let e = is_empty_projective(&kappa_x_ideal(&model)?, cfg)?;
    let fields: Vec<&str> =
        checks.iter().filter(|c| c.status == FieldCheckStatus::Checked).map(|c| c.field.as_str()).collect();
    let enumerated = match singular {
        Some(c) => format!("; {} singular point(s) of the reduction over {}", c.singular_x, c.field),
        None if fields.is_empty() => String::new(),
        None => format!("; no singular point over {}", fields.join(", ")),
    };
    let text = format!("locus of a ∈ Y with κ(a) ∈ X: {}{enumerated}", emptiness_text(&e));
    Ok(match e.is_empty() {
        Some(true) => Verdict::new(Tri::Yes, text),
        Some(false) => Verdict::new(Tri::No, text),
        None => Verdict::new(Tri::Inconclusive, text),
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NetClassification {
    pub regular: Verdict,
    pub y_smooth: Verdict,
    pub x_smooth: Verdict,
    pub consistency: Vec<FieldConsistency>,
}

impl NetClassification {
    pub fn is_smooth_regular(&self) -> bool {
        self.regular.is_yes() && self.y_smooth.is_yes()
    }
}

pub fn classify(net: &ANet, fields: &[Field], cfg: &HilbertConfig) -> Result<NetClassification> {
    let regular = is_regular(net, cfg)?;
    if regular.verdict == Tri::No {
        let why = format!("net is not regular ({})", regular.witness);
        return Ok(NetClassification {
            y_smooth: Verdict::new(Tri::No, why.clone()),
            x_smooth: Verdict::new(Tri::No, why),
            regular,
            consistency: Vec::new(),
        });
    }
    let y_smooth = y_smoothness(net, cfg)?;
    let consistency: Vec<FieldConsistency> =
        fields.par_iter().map(|q| field_consistency(net, q, cfg)).collect();
    let mut x_smooth = x_smoothness(net, cfg, &consistency)?;
    if x_smooth.verdict == Tri::Yes && regular.verdict != Tri::Yes {
        x_smooth = Verdict::new(Tri::Inconclusive, format!("{}; regularity undecided", x_smooth.witness));
    }
    Ok(NetClassification { regular, y_smooth, x_smooth, consistency })
}

// ---------------------------------------------------------------------------
// Fixtures

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenerateOptions {
    pub n: usize,
    pub two_m: usize,
    pub bound: i64,
    pub max_attempts: usize,
    /// Primes at which the reduction must also be regular with smooth `Y`.
    pub good_primes: Vec<u64>,
}

impl GenerateOptions {
    /// Dense nets with `n = 5`, `2m = 6`, entries in `{-3..3}`, good
    /// reduction at 2, 3, 5 and 7.
    pub fn v14() -> Self {
        GenerateOptions { n: 5, two_m: 6, bound: 3, max_attempts: 200, good_primes: vec![2, 3, 5, 7] }
    }

    pub fn shape(n: usize, two_m: usize) -> Self {
        GenerateOptions { n, two_m, bound: 3, max_attempts: 200, good_primes: Vec::new() }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneratedNet {
    pub net: ANet,
    pub seed: u64,
    pub attempts: usize,
}

fn random_uppers(rng: &mut ChaCha8Rng, n: usize, two_m: usize, bound: i64) -> Vec<Vec<i64>> {
    let len = two_m * (two_m - 1) / 2;
    (0..n).map(|_| (0..len).map(|_| rng.gen_range(-bound..=bound)).collect()).collect()
}

fn smooth_regular(net: &ANet, cfg: &HilbertConfig) -> Result<bool> {
    Ok(is_regular(net, cfg)?.is_yes() && y_smoothness(net, cfg)?.is_yes())
}

/// Rejection sampling of integer nets until one is regular with smooth
/// `Y` over QQ and at every listed prime.
pub fn random_regular_net(seed: u64, opts: &GenerateOptions, cfg: &HilbertConfig) -> Result<GeneratedNet> {
    if opts.two_m % 2 == 1 || opts.two_m == 0 {
        return Err(Error::OddSize(opts.two_m));
    }
    if opts.bound <= 0 {
        return Err(Error::InvalidInput(format!("coefficient bound must be positive, got {}", opts.bound)));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for attempt in 1..=opts.max_attempts {
        let ups = random_uppers(&mut rng, opts.n, opts.two_m, opts.bound);
        let Ok(net) = ANet::from_upper(&Field::Rational, opts.two_m, &ups) else {
            continue;
        };
        let mut good = true;
        for &p in &opts.good_primes {
            let ok = match net.reduce(&Field::prime(p)?) {
                Ok(r) => smooth_regular(&r, cfg)?,
                Err(_) => false,
            };
            if !ok {
                good = false;
                break;
            }
        }
        if good && smooth_regular(&net, cfg)? {
            return Ok(GeneratedNet { net, seed, attempts: attempt });
        }
    }
    Err(Error::RetryCapExceeded { attempts: opts.max_attempts })
}

fn upper_index(two_m: usize, i: usize, j: usize) -> usize {
    grassmann::pair_index(i, j, two_m)
}

/// `a1 e12 + a2 e34 + a3 e56` padded with two random forms: rank 2 at `e1`.
pub fn block_net(seed: u64) -> Result<ANet> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let mut ups = vec![vec![0i64; 15]; 3];
        for (k, (i, j)) in [(0, 1), (2, 3), (4, 5)].into_iter().enumerate() {
            ups[k][upper_index(6, i, j)] = 1;
        }
        ups.extend(random_uppers(&mut rng, 2, 6, 3));
        if let Ok(net) = ANet::from_upper(&Field::Rational, 6, &ups) {
            return Ok(net);
        }
    }
}

/// Five random skew forms on a 5-dimensional subspace, extended by zero.
pub fn zero_extended_net(seed: u64) -> Result<ANet> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let small = random_uppers(&mut rng, 5, 5, 3);
        let ups: Vec<Vec<i64>> = small
            .iter()
            .map(|s| {
                let mut up = vec![0i64; 15];
                for (k, (i, j)) in pairs(5).into_iter().enumerate() {
                    up[upper_index(6, i, j)] = s[k];
                }
                up
            })
            .collect();
        if let Ok(net) = ANet::from_upper(&Field::Rational, 6, &ups) {
            return Ok(net);
        }
    }
}

/// A regular net whose first form has kernel `U0 = <e1, e2>` and whose
/// forms all vanish on `U0 × U0`, so that `U0` is a singular point of `X`.
/// Regular over QQ and at each listed prime.
pub fn degenerate_net(seed: u64, primes: &[u64], cfg: &HilbertConfig) -> Result<(ANet, usize)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let max_attempts = 500;
    for attempt in 1..=max_attempts {
        let mut ups = random_uppers(&mut rng, 5, 6, 3);
        for up in ups.iter_mut() {
            up[upper_index(6, 0, 1)] = 0;
        }
        for j in 1..6 {
            ups[0][upper_index(6, 0, j)] = 0;
        }
        for j in 2..6 {
            ups[0][upper_index(6, 1, j)] = 0;
        }
        let Ok(net) = ANet::from_upper(&Field::Rational, 6, &ups) else {
            continue;
        };
        let mut ok = is_regular(&net, cfg)?.is_yes();
        for &p in primes {
            if !ok {
                break;
            }
            ok = match net.reduce(&Field::prime(p)?) {
                Ok(r) => {
                    let block_rank = r.matrices()[0].rank();
                    block_rank == 4 && is_regular(&r, cfg)?.is_yes()
                }
                Err(_) => false,
            };
        }
        if ok && net.matrices()[0].rank() == 4 {
            return Ok((net, attempt));
        }
    }
    Err(Error::RetryCapExceeded { attempts: max_attempts })
}

// ---------------------------------------------------------------------------
// Points of C

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CSearchOptions {
    pub primes: Vec<u64>,
    pub max_extension_degree: usize,
    /// Exhaustive enumeration is used while `#P^(2m-1)` stays below this.
    pub enumeration_limit: u128,
    /// Random lines per field element in the randomized rungs.
    pub trials_per_element: u64,
    pub seed: u64,
}

impl Default for CSearchOptions {
    fn default() -> Self {
        CSearchOptions {
            primes: vec![3, 5, 7],
            max_extension_degree: 8,
            enumeration_limit: 100_000,
            trials_per_element: 4,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchRung {
    pub field: String,
    pub method: String,
    pub examined: u64,
    pub found: usize,
    pub note: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CPointSearch {
    pub rungs: Vec<SearchRung>,
    /// Field of the points found, if any.
    pub field: Option<Field>,
    /// Normalized points with `rank f_c = n - 2`, sorted by their text.
    pub points: Vec<Vec<FieldElement>>,
    /// Points where `rank f_v < n - 2` met on the way.
    pub low_rank: usize,
}

fn enumerate_c<F: FieldOps>(tn: &TypedNet<F>, limit: u128) -> Result<(Vec<Vec<F::El>>, usize, u64)> {
    let target = tn.n - 2;
    let mut found = Vec::new();
    let mut low = 0;
    let pts = projective_points(&tn.f, tn.two_m, limit)?;
    let examined = pts.len() as u64;
    for v in pts {
        let r = tn.rank_fv(&v);
        if r == target {
            found.push(v);
        } else if r < target {
            low += 1;
        }
    }
    Ok((found, low, examined))
}

/// Determinant of a square matrix of univariate polynomials.
fn poly_det<F: FieldOps>(f: &F, m: &[Vec<Vec<F::El>>]) -> Vec<F::El> {
    let n = m.len();
    if n == 1 {
        return m[0][0].clone();
    }
    let mut acc: Vec<F::El> = Vec::new();
    for j in 0..n {
        if m[0][j].is_empty() {
            continue;
        }
        let minor: Vec<Vec<Vec<F::El>>> =
            m[1..].iter().map(|r| r.iter().enumerate().filter(|&(k, _)| k != j).map(|(_, e)| e.clone()).collect()).collect();
        let term = upoly::mul(f, &m[0][j], &poly_det(f, &minor));
        acc = if j % 2 == 0 { upoly::add(f, &acc, &term) } else { upoly::sub(f, &acc, &term) };
    }
    acc
}

/// C-points on the line `P(Ker f(a))` for a point `a ∈ Y`.
fn c_points_on_kernel_line<F: FieldOps, R: Rng>(
    tn: &TypedNet<F>,
    k0: &[F::El],
    k1: &[F::El],
    rng: &mut R,
) -> Vec<Vec<F::El>> {
    let f = &tn.f;
    let target = tn.n - 2;
    let mut out = Vec::new();
    if tn.rank_fv(k0) == target {
        out.push(k0.to_vec());
    }
    let m0 = tn.fv(k0);
    let m1 = tn.fv(k1);
    // points s*k0 + k1: entries s*m0 + m1
    for rs in subsets(tn.n, target + 1) {
        for cs in subsets(tn.two_m, target + 1) {
            let sub: Vec<Vec<Vec<F::El>>> = rs
                .iter()
                .map(|&r| cs.iter().map(|&c| upoly::trim(f, vec![m1[r][c].clone(), m0[r][c].clone()])).collect())
                .collect();
            let d = poly_det(f, &sub);
            if d.is_empty() {
                continue;
            }
            for s in upoly::roots(f, &d, rng) {
                let v: Vec<F::El> = k0.iter().zip(k1).map(|(x, y)| f.add(&f.mul(&s, x), y)).collect();
                if tn.rank_fv(&v) == target {
                    out.push(v);
                }
            }
            return out;
        }
    }
    out
}

fn random_search_c<F: FieldOps>(
    tn: &TypedNet<F>,
    pf: &CompiledPoly<F>,
    trials: u64,
    seed: u64,
) -> Vec<Vec<F::El>> {
    let f = &tn.f;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut found = Vec::new();
    for _ in 0..trials {
        let b0: Vec<F::El> = (0..tn.n).map(|_| f.random(&mut rng)).collect();
        let b1: Vec<F::El> = (0..tn.n).map(|_| f.random(&mut rng)).collect();
        let cubic = pf.restrict_to_line(f, &b0, &b1);
        if cubic.iter().all(|c| f.is_zero(c)) {
            continue;
        }
        for (s, t) in upoly::binary_roots(f, &cubic, &mut rng) {
            let a: Vec<F::El> = b0.iter().zip(&b1).map(|(x, y)| f.add(&f.mul(&s, x), &f.mul(&t, y))).collect();
            if a.iter().all(|x| f.is_zero(x)) {
                continue;
            }
            let Ok([k0, k1]) = kernel_plane(tn, &a) else { continue };
            found.extend(c_points_on_kernel_line(tn, &k0, &k1, &mut rng));
        }
        if !found.is_empty() {
            break;
        }
    }
    found
}

fn finish_points<F: FieldOps>(f: &F, pts: Vec<Vec<F::El>>) -> Vec<Vec<FieldElement>> {
    let mut seen = HashSet::new();
    let mut out: Vec<Vec<FieldElement>> = pts
        .into_iter()
        .filter_map(|v| grassmann::normalize(f, &v))
        .filter(|v| seen.insert(v.clone()))
        .map(|v| lift_point(f, &v))
        .collect();
    out.sort_by_key(|v| point_text(v));
    out
}

/// Search for points `c` with `rank f_c = n - 2`: exhaustive over small
/// prime fields, then over extension fields, exhaustive while small and by
/// random lines through `Y` beyond that.
pub fn find_c_points(net: &ANet, opts: &CSearchOptions, cfg: &HilbertConfig) -> Result<CPointSearch> {
    let mut search = CPointSearch { rungs: Vec::new(), field: None, points: Vec::new(), low_rank: 0 };
    let mut good = Vec::new();
    for &p in &opts.primes {
        let field = Field::prime(p)?;
        let reduced = match net_over(net, &field) {
            Ok(r) if is_regular(&r, cfg)?.is_yes() => r,
            _ => {
                search.rungs.push(SearchRung {
                    field: field.to_string(),
                    method: "enumeration".into(),
                    examined: 0,
                    found: 0,
                    note: "bad reduction".into(),
                });
                continue;
            }
        };
        good.push(p);
        let (pts, low, examined) = with_typed_net!(&reduced, tn => {
            let (pts, low, examined) = enumerate_c(&tn, opts.enumeration_limit)?;
            (finish_points(&tn.f, pts), low, examined)
        });
        search.low_rank += low;
        search.rungs.push(SearchRung {
            field: field.to_string(),
            method: "enumeration".into(),
            examined,
            found: pts.len(),
            note: String::new(),
        });
        if !pts.is_empty() {
            search.field = Some(field);
            search.points = pts;
            return Ok(search);
        }
    }
    for k in 2..=opts.max_extension_degree {
        for &p in &good {
            let field = Field::extension(p, k)?;
            let q = field.size().expect("finite");
            let Ok(reduced) = net.reduce(&field).or_else(|_| net_over(net, &field)) else { continue };
            let space = (0..net.two_m() as u32).map(|e| q.pow(e)).sum::<u128>();
            let (pts, method, examined) = if space <= opts.enumeration_limit {
                with_typed_net!(&reduced, tn => {
                    let (pts, low, examined) = enumerate_c(&tn, opts.enumeration_limit)?;
                    search.low_rank += low;
                    (finish_points(&tn.f, pts), "enumeration", examined)
                })
            } else {
                let pf = pfaffian_hypersurface(&reduced)?;
                let trials = (q as u64).saturating_mul(opts.trials_per_element);
                with_typed_net!(&reduced, tn => {
                    let cpf = CompiledPoly::new(&tn.f, &pf)?;
                    let pts = random_search_c(&tn, &cpf, trials, opts.seed ^ (p << 8) ^ k as u64);
                    (finish_points(&tn.f, pts), "random lines through Y", trials)
                })
            };
            let note = if q > 2704 { "Weil bound guarantees a point" } else { "" };
            search.rungs.push(SearchRung {
                field: field.to_string(),
                method: method.into(),
                examined,
                found: pts.len(),
                note: note.into(),
            });
            if !pts.is_empty() {
                search.field = Some(field);
                search.points = pts;
                return Ok(search);
            }
        }
    }
    Ok(search)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Qq;

    fn cfg() -> HilbertConfig {
        HilbertConfig::default()
    }

    #[test]
    fn projective_enumeration_counts() {
        let f = crate::field::Zp::new(3).unwrap();
        assert_eq!(projective_points(&f, 5, 1 << 20).unwrap().len(), 121);
        assert_eq!(projective_points(&f, 1, 10).unwrap().len(), 1);
        let pts = projective_points(&f, 3, 100).unwrap();
        let set: HashSet<_> = pts.iter().cloned().collect();
        assert_eq!(set.len(), 13);
    }

    #[test]
    fn kernel_sign_matches_kernel_of_random_corank_two_form() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let f = Qq;
        for _ in 0..5 {
            // M = x∧y + z∧w with random vectors: rank 4
            let vecs: Vec<Vec<i64>> = (0..4).map(|_| (0..6).map(|_| rng.gen_range(-3..=3)).collect()).collect();
            let mut rows = vec![vec![0i64; 6]; 6];
            for (a, b) in [(0, 1), (2, 3)] {
                for i in 0..6 {
                    for j in 0..6 {
                        rows[i][j] += vecs[a][i] * vecs[b][j] - vecs[a][j] * vecs[b][i];
                    }
                }
            }
            let m = ExactMatrix::from_i64(&Field::Rational, &rows).unwrap();
            if m.rank() != 4 {
                continue;
            }
            let typed = m.typed(&f).unwrap();
            let k = linalg::kernel(&f, &typed, 6);
            let kp = wedge(&f, &k[0], &k[1]);
            let sp: Vec<_> = pairs(6)
                .into_iter()
                .map(|(i, j)| {
                    let keep: Vec<usize> = (0..6).filter(|&c| c != i && c != j).collect();
                    let sub: Vec<Vec<_>> =
                        keep.iter().map(|&r| keep.iter().map(|&c| typed[r][c].clone()).collect()).collect();
                    f.mul(&pfaffian(&f, &sub), &f.from_i64(kernel_sign(i, j)))
                })
                .collect();
            assert_eq!(grassmann::normalize(&f, &kp), grassmann::normalize(&f, &sp));
        }
    }

    #[test]
    fn block_net_is_irregular_with_coordinate_witness() {
        let net = block_net(1).unwrap();
        let v = is_regular(&net, &cfg()).unwrap();
        assert_eq!(v.verdict, Tri::No);
        assert!(v.witness.contains("rank f(a) = 2 at a = [1, 0, 0, 0, 0]"), "{}", v.witness);
        let c = classify(&net, &[Field::Prime(2)], &cfg()).unwrap();
        assert_eq!(c.y_smooth.verdict, Tri::No);
        assert!(c.consistency.is_empty());
    }

    #[test]
    fn zero_extended_net_is_irregular_and_degenerate() {
        let net = zero_extended_net(3).unwrap();
        assert_eq!(is_regular(&net, &cfg()).unwrap().verdict, Tri::No);
        assert!(matches!(pfaffian_hypersurface(&net), Err(Error::DegenerateNet(_))));
    }

    #[test]
    fn block_net_pfaffian_and_kappa() {
        let ups: Vec<Vec<i64>> = [(0, 1), (2, 3), (4, 5)]
            .into_iter()
            .map(|(i, j)| {
                let mut up = vec![0i64; 15];
                up[upper_index(6, i, j)] = 1;
                up
            })
            .collect();
        let net = ANet::from_upper(&Field::Rational, 6, &ups).unwrap();
        let pf = pfaffian_hypersurface(&net).unwrap();
        assert_eq!(pf.to_text(), MultiPoly::parse(&Field::Rational, 3, "x0*x1*x2").unwrap().to_text());
        let q = Field::Rational;
        let k = kappa(&net, &[q.one(), q.one(), q.zero()]).unwrap().normalized();
        assert!(k.get(4, 5).is_one());
        assert_eq!(k.coords().iter().filter(|c| !c.is_zero()).count(), 1);
        let e13 = PluckerPoint::new(6, (0..15).map(|i| q.from_i64((i == 1) as i64)).collect()).unwrap();
        let xi = x_ideal(&net).unwrap();
        for g in xi.generators() {
            assert!(g.evaluate(e13.coords()).unwrap().is_zero());
        }
    }

    #[test]
    fn splitting_ladder_on_explicit_pencils() {
        let f = crate::field::Zp::new(7).unwrap();
        let gen = random_regular_net(5, &GenerateOptions::v14(), &cfg()).unwrap();
        let net = gen.net.reduce(&Field::Prime(7)).unwrap();
        let tn = TypedNet::new(&f, &net).unwrap();
        let lines = lines_on_y(&net, 1 << 24).unwrap();
        assert!(!lines.is_empty());
        for l in &lines {
            assert_eq!(l.splitting.0 + l.splitting.1, 4);
            assert_eq!(l.splitting == (1, 3), l.c.is_some());
        }
        let _ = tn;
    }
}
