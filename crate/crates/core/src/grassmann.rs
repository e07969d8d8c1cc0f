//! Plücker geometry of 2-planes: coordinates, the quadric relations, lines
//! in the Grassmannian and exhaustive enumeration over finite fields.
//!
//! Coordinates are indexed by pairs `(i, j)`, `i < j`, in lexicographic
//! order. For a basis `u, w` the coordinate `p_ij` is `u_i w_j - u_j w_i`,
//! and the relations are
//! `p_ij p_kl - p_ik p_jl + p_il p_jk = 0` for `i < j < k < l`.

use std::fmt;

use crate::error::{Error, Result};
use crate::field::{mismatch, Field, FieldElement, FieldOps};
use crate::ideals::subsets;
use crate::linalg;
use crate::matrix::ExactMatrix;
use crate::multipoly::{Monomial, MultiPoly};
use crate::with_field_ops;

pub const DEFAULT_ENUMERATION_LIMIT: u128 = 10_000_000;

/// Pairs `(i, j)`, `i < j < two_m`, in lexicographic order.
pub fn pairs(two_m: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::with_capacity(two_m * two_m.saturating_sub(1) / 2);
    for i in 0..two_m {
        for j in i + 1..two_m {
            out.push((i, j));
        }
    }
    out
}

/// Position of `(i, j)` (`i < j`) in [`pairs`].
pub fn pair_index(i: usize, j: usize, two_m: usize) -> usize {
    debug_assert!(i < j && j < two_m);
    i * (2 * two_m - i - 1) / 2 + (j - i - 1)
}

/// `[n choose 2]_q`, the number of 2-planes in GF(q)^n.
pub fn gaussian_binomial_2(n: usize, q: u128) -> u128 {
    if n < 2 {
        return 0;
    }
    let num = (q.pow(n as u32) - 1) * (q.pow(n as u32 - 1) - 1);
    num / ((q * q - 1) * (q - 1))
}

/// The `C(2m,4)` Plücker quadrics in `C(2m,2)` variables.
pub fn plucker_quadrics(field: &Field, two_m: usize) -> Result<Vec<MultiPoly>> {
    if two_m < 4 {
        return Err(Error::InvalidInput(format!("Plücker quadrics need 2m >= 4, got {two_m}")));
    }
    let nv = two_m * (two_m - 1) / 2;
    let mono = |a: (usize, usize), b: (usize, usize)| {
        let mut e = vec![0u16; nv];
        e[pair_index(a.0, a.1, two_m)] += 1;
        e[pair_index(b.0, b.1, two_m)] += 1;
        Monomial(e)
    };
    let mut out = Vec::new();
    for s in subsets(two_m, 4) {
        let (i, j, k, l) = (s[0], s[1], s[2], s[3]);
        let mut q = MultiPoly::zero(field, nv);
        q.add_term(mono((i, j), (k, l)), field.one())?;
        q.add_term(mono((i, k), (j, l)), field.from_i64(-1))?;
        q.add_term(mono((i, l), (j, k)), field.one())?;
        out.push(q);
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Typed kernels

/// Plücker coordinates of the span of `u`, `w`.
pub fn wedge<F: FieldOps>(f: &F, u: &[F::El], w: &[F::El]) -> Vec<F::El> {
    let n = u.len();
    let mut out = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in i + 1..n {
            out.push(f.sub(&f.mul(&u[i], &w[j]), &f.mul(&u[j], &w[i])));
        }
    }
    out
}

/// First violated relation, if any.
pub fn violated_relation<F: FieldOps>(f: &F, p: &[F::El], two_m: usize) -> Option<[usize; 4]> {
    let at = |i: usize, j: usize| &p[pair_index(i, j, two_m)];
    for s in subsets(two_m, 4) {
        let (i, j, k, l) = (s[0], s[1], s[2], s[3]);
        let v = f.add(
            &f.sub(&f.mul(at(i, j), at(k, l)), &f.mul(at(i, k), at(j, l))),
            &f.mul(at(i, l), at(j, k)),
        );
        if !f.is_zero(&v) {
            return Some([i, j, k, l]);
        }
    }
    None
}

/// Scale so that the first nonzero coordinate is 1.
pub fn normalize<F: FieldOps>(f: &F, v: &[F::El]) -> Option<Vec<F::El>> {
    let lead = v.iter().find(|x| !f.is_zero(x))?;
    let inv = f.inv(lead)?;
    Some(v.iter().map(|x| f.mul(x, &inv)).collect())
}

/// A basis of the plane with Plücker vector `p` (assumed decomposable and
/// nonzero): rows `(p_ik)_k` and `(p_jk)_k` for a pair with `p_ij != 0`.
pub fn plane_basis<F: FieldOps>(f: &F, p: &[F::El], two_m: usize) -> Option<[Vec<F::El>; 2]> {
    let (i, j) = pairs(two_m).into_iter().find(|&(i, j)| !f.is_zero(&p[pair_index(i, j, two_m)]))?;
    let row = |a: usize| -> Vec<F::El> {
        (0..two_m)
            .map(|k| match a.cmp(&k) {
                std::cmp::Ordering::Less => p[pair_index(a, k, two_m)].clone(),
                std::cmp::Ordering::Equal => f.zero(),
                std::cmp::Ordering::Greater => f.neg(&p[pair_index(k, a, two_m)]),
            })
            .collect()
    };
    Some([row(i), row(j)])
}

/// Visit every 2-plane of GF(q)^two_m once, as its reduced row-echelon
/// basis, grouped by pivot pattern `(i, j)` in lexicographic order.
pub fn for_each_plane<F: FieldOps>(
    f: &F,
    two_m: usize,
    limit: u128,
    mut visit: impl FnMut(&[F::El], &[F::El]),
) -> Result<u128> {
    let q = f.size().ok_or_else(|| Error::InvalidInput("enumeration needs a finite field".into()))?;
    let total = gaussian_binomial_2(two_m, q);
    if total > limit {
        return Err(Error::LimitExceeded { what: "Grassmannian enumeration".into(), size: total, limit });
    }
    let mut count = 0u128;
    for (i, j) in pairs(two_m) {
        let free0: Vec<usize> = (i + 1..two_m).filter(|&c| c != j).collect();
        let free1: Vec<usize> = (j + 1..two_m).collect();
        let nfree = free0.len() + free1.len();
        let combos = q.pow(nfree as u32);
        let mut u = vec![f.zero(); two_m];
        let mut w = vec![f.zero(); two_m];
        u[i] = f.one();
        w[j] = f.one();
        let mut digits = vec![0u128; nfree];
        for _ in 0..combos {
            for (pos, &col) in free0.iter().enumerate() {
                u[col] = f.element(digits[pos]);
            }
            for (pos, &col) in free1.iter().enumerate() {
                w[col] = f.element(digits[free0.len() + pos]);
            }
            visit(&u, &w);
            count += 1;
            for d in digits.iter_mut() {
                *d += 1;
                if *d < q {
                    break;
                }
                *d = 0;
            }
        }
    }
    Ok(count)
}

// ---------------------------------------------------------------------------
// Dynamic types

/// A point of P(Λ²V), stored with coordinates as given (projective).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PluckerPoint {
    two_m: usize,
    coords: Vec<FieldElement>,
}

impl PluckerPoint {
    /// Checked constructor: nonzero, single field, decomposable.
    pub fn new(two_m: usize, coords: Vec<FieldElement>) -> Result<Self> {
        let p = Self::from_coords(two_m, coords)?;
        if let Some(rel) = p.violated_relation() {
            return Err(Error::NotDecomposable(rel));
        }
        Ok(p)
    }

    /// Constructor that does not check the quadrics.
    pub fn from_coords(two_m: usize, coords: Vec<FieldElement>) -> Result<Self> {
        if coords.len() != two_m * two_m.saturating_sub(1) / 2 || coords.is_empty() {
            return Err(Error::DimensionMismatch(format!(
                "{} Plücker coordinates for 2m = {two_m}",
                coords.len()
            )));
        }
        let field = coords[0].field();
        if let Some(bad) = coords.iter().find(|c| c.field() != field) {
            return Err(mismatch(&field, &bad.field()));
        }
        if coords.iter().all(FieldElement::is_zero) {
            return Err(Error::InvalidInput("zero Plücker vector".into()));
        }
        Ok(PluckerPoint { two_m, coords })
    }

    pub fn two_m(&self) -> usize {
        self.two_m
    }
    pub fn coords(&self) -> &[FieldElement] {
        &self.coords
    }
    pub fn field(&self) -> Field {
        self.coords[0].field()
    }
    pub fn get(&self, i: usize, j: usize) -> &FieldElement {
        &self.coords[pair_index(i, j, self.two_m)]
    }

    pub fn violated_relation(&self) -> Option<[usize; 4]> {
        let field = self.field();
        with_field_ops!(&field, f => {
            let typed: Vec<_> = self.coords.iter().map(|c| f.lower(c).expect("single field")).collect();
            violated_relation(f, &typed, self.two_m)
        })
    }

    pub fn is_decomposable(&self) -> bool {
        self.violated_relation().is_none()
    }

    /// Representative with first nonzero coordinate 1.
    pub fn normalized(&self) -> PluckerPoint {
        let field = self.field();
        with_field_ops!(&field, f => {
            let typed: Vec<_> = self.coords.iter().map(|c| f.lower(c).expect("single field")).collect();
            let n = normalize(f, &typed).expect("nonzero");
            PluckerPoint { two_m: self.two_m, coords: n.iter().map(|x| f.lift(x)).collect() }
        })
    }

    pub fn same_point(&self, other: &PluckerPoint) -> bool {
        self.two_m == other.two_m && self.normalized() == other.normalized()
    }
}

impl fmt::Display for PluckerPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c: Vec<String> = self.coords.iter().map(ToString::to_string).collect();
        write!(f, "[{}]", c.join(":"))
    }
}

/// 2×2 minors of a rank-2 matrix with two rows.
pub fn plucker_from_basis(b: &ExactMatrix) -> Result<PluckerPoint> {
    if b.rows() != 2 {
        return Err(Error::DimensionMismatch(format!("basis has {} rows, expected 2", b.rows())));
    }
    let field = b.field().clone();
    with_field_ops!(&field, f => {
        let rows = b.typed(f)?;
        let p = wedge(f, &rows[0], &rows[1]);
        if p.iter().all(|x| f.is_zero(x)) {
            return Err(Error::RankDeficient("basis of rank < 2".into()));
        }
        Ok(PluckerPoint { two_m: b.cols(), coords: p.iter().map(|x| f.lift(x)).collect() })
    })
}

/// A basis of the plane of a decomposable Plücker vector.
pub fn plane_from_plucker(p: &PluckerPoint) -> Result<ExactMatrix> {
    if let Some(rel) = p.violated_relation() {
        return Err(Error::NotDecomposable(rel));
    }
    let field = p.field();
    with_field_ops!(&field, f => {
        let typed: Vec<_> = p.coords.iter().map(|c| f.lower(c)).collect::<Result<_>>()?;
        let [u, w] = plane_basis(f, &typed, p.two_m).expect("nonzero");
        Ok(ExactMatrix::from_typed(f, 2, p.two_m, &[u, w]))
    })
}

/// Every 2-plane of GF(q)^two_m, as Plücker points.
pub fn enumerate_grassmannian(two_m: usize, field: &Field, limit: u128) -> Result<Vec<PluckerPoint>> {
    if !field.is_finite() {
        return Err(Error::InvalidInput("enumeration needs a finite field".into()));
    }
    with_field_ops!(field, f => {
        let mut out = Vec::new();
        for_each_plane(f, two_m, limit, |u, w| {
            let p = wedge(f, u, w);
            out.push(PluckerPoint { two_m, coords: p.iter().map(|x| f.lift(x)).collect() });
        })?;
        Ok(out)
    })
}

/// The pencil `{U : v in U subset W}` for a flag `v in W`, `dim W = 3`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GrassmannLine {
    pub v: Vec<FieldElement>,
    /// Basis `v, w1, w2` of `W`.
    pub w_basis: [Vec<FieldElement>; 3],
    /// `v∧w1` and `v∧w2`.
    pub span: [PluckerPoint; 2],
}

impl GrassmannLine {
    /// The point `v ∧ (s w1 + t w2) = s (v∧w1) + t (v∧w2)`.
    pub fn point(&self, s: &FieldElement, t: &FieldElement) -> Result<PluckerPoint> {
        let coords = self.span[0]
            .coords
            .iter()
            .zip(&self.span[1].coords)
            .map(|(a, b)| a.mul(s)?.add(&b.mul(t)?))
            .collect::<Result<Vec<_>>>()?;
        PluckerPoint::from_coords(self.span[0].two_m, coords)
    }
}

/// Typed pencil data: `v`, a completion `w1, w2` of `v` to a basis of `W`.
pub fn pencil_basis<F: FieldOps>(
    f: &F,
    v: &[F::El],
    w: &[Vec<F::El>],
) -> Option<[Vec<F::El>; 2]> {
    let n = v.len();
    let mut chosen: Vec<Vec<F::El>> = vec![v.to_vec()];
    for cand in w {
        let mut trial = chosen.clone();
        trial.push(cand.clone());
        if linalg::rank(f, &trial, n) == trial.len() {
            chosen = trial;
        }
        if chosen.len() == 3 {
            break;
        }
    }
    if chosen.len() != 3 {
        return None;
    }
    Some([chosen[1].clone(), chosen[2].clone()])
}

pub fn pencil_line(v: &[FieldElement], w: &ExactMatrix) -> Result<GrassmannLine> {
    let field = w.field().clone();
    if w.rows() != 3 || w.rank() != 3 {
        return Err(Error::RankDeficient("W must be spanned by 3 independent rows".into()));
    }
    if v.len() != w.cols() {
        return Err(Error::DimensionMismatch("v and W live in different spaces".into()));
    }
    with_field_ops!(&field, f => {
        let vt: Vec<_> = v.iter().map(|x| f.lower(x)).collect::<Result<_>>()?;
        let wt = w.typed(f)?;
        let mut with_v = wt.clone();
        with_v.push(vt.clone());
        if linalg::rank(f, &with_v, w.cols()) != 3 {
            return Err(Error::NotOnVariety("v is not in W".into()));
        }
        if vt.iter().all(|x| f.is_zero(x)) {
            return Err(Error::InvalidInput("v = 0".into()));
        }
        let [w1, w2] = pencil_basis(f, &vt, &wt).expect("v in W, dim W = 3");
        let lift = |x: &[_]| x.iter().map(|e| f.lift(e)).collect::<Vec<_>>();
        let p1 = PluckerPoint { two_m: w.cols(), coords: lift(&wedge(f, &vt, &w1)) };
        let p2 = PluckerPoint { two_m: w.cols(), coords: lift(&wedge(f, &vt, &w2)) };
        Ok(GrassmannLine { v: v.to_vec(), w_basis: [v.to_vec(), lift(&w1), lift(&w2)], span: [p1, p2] })
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Zp;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn e(field: &Field, n: usize, i: usize) -> Vec<FieldElement> {
        (0..n).map(|k| if k == i { field.one() } else { field.zero() }).collect()
    }

    #[test]
    fn pair_indexing_is_lexicographic() {
        for n in [4, 6, 8] {
            for (k, (i, j)) in pairs(n).into_iter().enumerate() {
                assert_eq!(pair_index(i, j, n), k);
            }
        }
    }

    #[test]
    fn coordinate_plane() {
        let f = Field::Prime(7);
        let b = ExactMatrix::from_rows(&f, vec![e(&f, 6, 0), e(&f, 6, 1)]).unwrap();
        let p = plucker_from_basis(&b).unwrap();
        assert!(p.get(0, 1).is_one());
        assert_eq!(p.coords().iter().filter(|c| !c.is_zero()).count(), 1);
        let b2 = ExactMatrix::from_i64(&f, &[vec![1, 1, 0, 0, 0, 0], vec![0, 1, 0, 0, 0, 0]]).unwrap();
        assert!(plucker_from_basis(&b2).unwrap().same_point(&p));
        let back = plane_from_plucker(&p).unwrap();
        assert!(plucker_from_basis(&back).unwrap().same_point(&p));
    }

    #[test]
    fn non_decomposable_vector_is_rejected() {
        let f = Field::Rational;
        let mut c = vec![f.zero(); 6];
        c[pair_index(0, 1, 4)] = f.one();
        c[pair_index(2, 3, 4)] = f.one();
        assert_eq!(PluckerPoint::new(4, c.clone()), Err(Error::NotDecomposable([0, 1, 2, 3])));
        let p = PluckerPoint::from_coords(4, c).unwrap();
        assert!(plane_from_plucker(&p).is_err());
    }

    #[test]
    fn rank_one_basis_is_rejected() {
        let f = Field::Prime(5);
        let b = ExactMatrix::from_i64(&f, &[vec![1, 2, 0, 0], vec![2, 4, 0, 0]]).unwrap();
        assert!(matches!(plucker_from_basis(&b), Err(Error::RankDeficient(_))));
    }

    #[test]
    fn quadric_counts() {
        let f = Field::Rational;
        assert_eq!(plucker_quadrics(&f, 4).unwrap().len(), 1);
        let q6 = plucker_quadrics(&f, 6).unwrap();
        assert_eq!(q6.len(), 15);
        assert_eq!(q6[0].nvars(), 15);
    }

    #[test]
    fn enumeration_counts_are_gaussian_binomials() {
        for (n, q, expect) in [(4, 2, 35u128), (6, 2, 651), (6, 3, 11011), (4, 3, 130)] {
            let field = Field::Prime(q);
            let pts = enumerate_grassmannian(n, &field, DEFAULT_ENUMERATION_LIMIT).unwrap();
            assert_eq!(pts.len() as u128, expect);
            assert_eq!(gaussian_binomial_2(n, q as u128), expect);
            let mut keys: Vec<Vec<FieldElement>> =
                pts.iter().map(|p| p.normalized().coords().to_vec()).collect();
            keys.sort_by_key(|k| format!("{k:?}"));
            keys.dedup();
            assert_eq!(keys.len() as u128, expect);
        }
        assert!(enumerate_grassmannian(6, &Field::Prime(3), 100).is_err());
    }

    #[test]
    fn enumerated_points_satisfy_the_quadrics() {
        let f = Field::Prime(3);
        let quads = plucker_quadrics(&f, 6).unwrap();
        for p in enumerate_grassmannian(6, &f, DEFAULT_ENUMERATION_LIMIT).unwrap() {
            for q in &quads {
                assert!(q.evaluate(p.coords()).unwrap().is_zero());
            }
        }
    }

    #[test]
    fn random_planes_round_trip_and_are_gl2_invariant() {
        let f = Field::Prime(7);
        let zp = Zp::new(7).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let quads = plucker_quadrics(&f, 6).unwrap();
        let mut tested = 0;
        while tested < 50 {
            let rows: Vec<Vec<FieldElement>> = (0..2).map(|_| (0..6).map(|_| f.random(&mut rng)).collect()).collect();
            let b = ExactMatrix::from_rows(&f, rows).unwrap();
            if b.rank() < 2 {
                continue;
            }
            tested += 1;
            let p = plucker_from_basis(&b).unwrap();
            for q in &quads {
                assert!(q.evaluate(p.coords()).unwrap().is_zero());
            }
            let g = loop {
                let g: Vec<Vec<FieldElement>> = (0..2).map(|_| (0..2).map(|_| f.random(&mut rng)).collect()).collect();
                let g = ExactMatrix::from_rows(&f, g).unwrap();
                if g.rank() == 2 {
                    break g;
                }
            };
            let moved = plucker_from_basis(&g.mul(&b).unwrap()).unwrap();
            assert!(moved.same_point(&p));
            let back = plane_from_plucker(&p).unwrap();
            // same row space
            let mut stacked = b.typed(&zp).unwrap();
            stacked.extend(back.typed(&zp).unwrap());
            assert_eq!(linalg::rank(&zp, &stacked, 6), 2);
        }
    }

    #[test]
    fn coordinate_pencil() {
        let f = Field::Rational;
        let w = ExactMatrix::from_rows(&f, vec![e(&f, 6, 0), e(&f, 6, 1), e(&f, 6, 2)]).unwrap();
        let line = pencil_line(&e(&f, 6, 0), &w).unwrap();
        assert!(line.span[0].get(0, 1).is_one());
        assert!(line.span[1].get(0, 2).is_one());
        for (s, t) in [(1, 0), (0, 1), (2, -3), (5, 7)] {
            let p = line.point(&f.from_i64(s), &f.from_i64(t)).unwrap();
            assert!(p.is_decomposable());
        }
        assert!(matches!(pencil_line(&e(&f, 6, 4), &w), Err(Error::NotOnVariety(_))));
    }
}
