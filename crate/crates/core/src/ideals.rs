//! Homogeneous ideals and their graded pieces: Macaulay matrices, Hilbert
//! functions, fitted Hilbert polynomials, projective emptiness, Jacobian and
//! determinantal ideals.
//!
//! The Hilbert function over GF(p) is computed degree by degree by
//! [`HilbertEngine`], which picks one of two routes per degree:
//!
//! * direct: insert all products `m * g` into an echelon basis of `S_t`;
//! * dual: compute `(I_t)^perp` from `(I_{t-1})^perp` and `(I_{t-2})^perp`.
//!   A functional `phi` on `S_t` is determined by its contractions
//!   `x_j o phi` on `S_{t-1}`; these must lie in `(I_{t-1})^perp`, agree
//!   pairwise (`x_i o (x_j o phi) = x_j o (x_i o phi)`) and `phi` must
//!   kill the generators of degree `t`. The unknowns are the coordinates of
//!   the contractions, so the linear system has size about
//!   `nvars * HF(t-1)` instead of `dim S_t`.
//!
//! The route with the smaller estimated cost is taken; both give the same
//! numbers, which the tests check against each other.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{Field, FieldOps, Qq, Zp};
use crate::linalg::{self, EchelonBasis, Rref};
use crate::matrix::ExactMatrix;
use crate::multipoly::{det_poly, monomial_count, monomials_of_degree, MultiPoly};

pub const DEFAULT_PRIME: u32 = 32003;
pub const ALTERNATE_PRIME: u32 = 31991;
pub const DEFAULT_DEGREE_CAP: usize = 16;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HomogeneousIdeal {
    nvars: usize,
    field: Field,
    generators: Vec<MultiPoly>,
}

impl HomogeneousIdeal {
    /// Zero generators are dropped; the rest must be homogeneous.
    pub fn new(field: &Field, nvars: usize, generators: Vec<MultiPoly>) -> Result<Self> {
        let mut gens = Vec::with_capacity(generators.len());
        for g in generators {
            if g.nvars() != nvars {
                return Err(Error::NvarsMismatch(g.nvars(), nvars));
            }
            if g.field() != field {
                return Err(crate::field::mismatch(field, g.field()));
            }
            if !g.is_homogeneous() {
                return Err(Error::NotHomogeneous);
            }
            if !g.is_zero() {
                gens.push(g);
            }
        }
        Ok(HomogeneousIdeal { nvars, field: field.clone(), generators: gens })
    }

    pub fn zero(field: &Field, nvars: usize) -> Self {
        HomogeneousIdeal { nvars, field: field.clone(), generators: Vec::new() }
    }

    /// The irrelevant ideal `(x_0, .., x_{n-1})`.
    pub fn maximal(field: &Field, nvars: usize) -> Self {
        let gens = (0..nvars).map(|i| MultiPoly::var(field, nvars, i)).collect();
        HomogeneousIdeal { nvars, field: field.clone(), generators: gens }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }
    pub fn field(&self) -> &Field {
        &self.field
    }
    pub fn generators(&self) -> &[MultiPoly] {
        &self.generators
    }

    pub fn max_generator_degree(&self) -> usize {
        self.generators.iter().filter_map(MultiPoly::degree).max().unwrap_or(0)
    }

    pub fn with_generators(&self, extra: impl IntoIterator<Item = MultiPoly>) -> Result<Self> {
        let mut gens = self.generators.clone();
        gens.extend(extra);
        Self::new(&self.field, self.nvars, gens)
    }

    /// Image of the generators in another field.
    pub fn map_field(&self, target: &Field) -> Result<Self> {
        let gens = self.generators.iter().map(|g| g.map_field(target)).collect::<Result<Vec<_>>>()?;
        Self::new(target, self.nvars, gens)
    }

    /// Rows: (generator, multiplier monomial of degree `t - deg g`) in
    /// generator order and descending graded-lex multiplier order. Columns:
    /// monomials of degree `t` in descending graded-lex order.
    pub fn macaulay_matrix(&self, t: usize) -> ExactMatrix {
        let cols = monomials_of_degree(self.nvars, t);
        let index: HashMap<&[u16], usize> =
            cols.iter().enumerate().map(|(i, m)| (m.0.as_slice(), i)).collect();
        let mut rows = Vec::new();
        for g in &self.generators {
            let d = g.degree().expect("nonzero generator");
            if d > t {
                continue;
            }
            for m in monomials_of_degree(self.nvars, t - d) {
                let mut row = vec![self.field.zero(); cols.len()];
                for (gm, c) in g.terms() {
                    row[index[gm.mul(&m).0.as_slice()]] = c.clone();
                }
                rows.push(row);
            }
        }
        let n = rows.len();
        ExactMatrix::new(&self.field, n, cols.len(), rows.into_iter().flatten().collect())
            .expect("entries share the ideal's field")
    }

    /// `HF(t) = dim S_t - dim I_t`.
    pub fn hilbert_function(&self, t: usize, cfg: &HilbertConfig) -> Result<usize> {
        Ok(*self.hilbert_values(t, cfg)?.last().expect("nonempty"))
    }

    /// `HF(0), .., HF(up_to)`.
    pub fn hilbert_values(&self, up_to: usize, cfg: &HilbertConfig) -> Result<Vec<usize>> {
        let mut eval = HilbertEvaluator::new(self, cfg)?;
        for _ in 0..=up_to {
            eval.next_value()?;
        }
        Ok(eval.values)
    }
}

/// Working primes and degree cap for Hilbert-function computations.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HilbertConfig {
    pub prime: u32,
    /// Second prime used to certify ranks of rational ideals.
    pub alt_prime: u32,
    pub degree_cap: usize,
}

impl Default for HilbertConfig {
    fn default() -> Self {
        HilbertConfig { prime: DEFAULT_PRIME, alt_prime: ALTERNATE_PRIME, degree_cap: DEFAULT_DEGREE_CAP }
    }
}

/// Hilbert function of an ideal over any supported field, one degree at a
/// time. Rational ideals run two modular engines in lockstep and fall back
/// to exact fraction-free elimination where they disagree.
pub struct HilbertEvaluator<'a> {
    ideal: &'a HomogeneousIdeal,
    engines: Vec<HilbertEngine>,
    values: Vec<usize>,
}

impl<'a> HilbertEvaluator<'a> {
    pub fn new(ideal: &'a HomogeneousIdeal, cfg: &HilbertConfig) -> Result<Self> {
        let engines = match &ideal.field {
            Field::Prime(p) => vec![HilbertEngine::new(*p, ideal)?],
            Field::Rational => {
                let mut engines: Vec<HilbertEngine> = Vec::new();
                for start in [cfg.prime as u64, cfg.alt_prime as u64] {
                    let mut candidate = start;
                    loop {
                        let fresh = !engines.iter().any(|e| e.p as u64 == candidate);
                        if fresh && crate::field::is_prime(candidate) {
                            if let Ok(reduced) = ideal.map_field(&Field::Prime(candidate as u32)) {
                                if reduced.generators.len() == ideal.generators.len() {
                                    engines.push(HilbertEngine::new(candidate as u32, &reduced)?);
                                    break;
                                }
                            }
                        }
                        candidate += 1;
                    }
                }
                engines
            }
            Field::Extension(_) => {
                return Err(Error::InvalidInput(
                    "Hilbert functions need generators over QQ or a prime field".into(),
                ))
            }
        };
        Ok(HilbertEvaluator { ideal, engines, values: Vec::new() })
    }

    pub fn values(&self) -> &[usize] {
        &self.values
    }

    pub fn next_value(&mut self) -> Result<usize> {
        let t = self.values.len();
        let vals: Vec<usize> = self.engines.iter_mut().map(|e| e.next_value()).collect();
        let v = if vals.windows(2).all(|w| w[0] == w[1]) {
            vals[0]
        } else {
            exact_rational_hf(self.ideal, t)?
        };
        self.values.push(v);
        Ok(v)
    }
}

const EXACT_FALLBACK_LIMIT: u128 = 4_000_000;

fn exact_rational_hf(ideal: &HomogeneousIdeal, t: usize) -> Result<usize> {
    let cols = monomial_count(ideal.nvars, t) as u128;
    let rows: u128 = ideal
        .generators
        .iter()
        .filter_map(|g| g.degree())
        .filter(|&d| d <= t)
        .map(|d| monomial_count(ideal.nvars, t - d) as u128)
        .sum();
    if rows * cols > EXACT_FALLBACK_LIMIT {
        return Err(Error::Inconclusive(format!(
            "modular ranks disagree in degree {t} and the exact {rows}x{cols} elimination is too large"
        )));
    }
    let m = ideal.macaulay_matrix(t);
    let rows = m.typed(&Qq).expect("rational entries");
    let (_, piv) = linalg::bareiss(linalg::integer_rows(&rows), m.cols());
    Ok(m.cols() - piv.len())
}

// ---------------------------------------------------------------------------
// Modular engine

struct DegreeTable {
    monos: Vec<Vec<u16>>,
    index: HashMap<Vec<u16>, u32>,
    /// For each monomial: first variable dividing it and the index of the
    /// quotient in the previous degree.
    first_div: Vec<(u8, u32)>,
}

/// `(I_t)^perp` as rows that restrict to the identity on `coords`.
struct DualBasis {
    rows: Vec<Vec<u32>>,
    coords: Vec<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Route {
    Direct,
    Dual,
}

/// Hilbert function of an ideal over GF(p), degree after degree.
pub struct HilbertEngine {
    p: u32,
    nvars: usize,
    /// (degree, terms as (exponents, residue))
    gens: Vec<(usize, Vec<(Vec<u16>, u32)>)>,
    tables: Vec<DegreeTable>,
    values: Vec<usize>,
    duals: Vec<Option<DualBasis>>,
    routes: Vec<Route>,
}

const MATERIALIZE_ALWAYS: f64 = 2e6;
const MATERIALIZE_MAX: f64 = 5e7;

impl HilbertEngine {
    pub fn new(p: u32, ideal: &HomogeneousIdeal) -> Result<Self> {
        let zp = Zp::new(p as u64)?;
        let reduced;
        let ideal = if ideal.field == Field::Prime(p) {
            ideal
        } else {
            reduced = ideal.map_field(&Field::Prime(p))?;
            &reduced
        };
        let gens = ideal
            .generators
            .iter()
            .map(|g| {
                let d = g.degree().expect("nonzero");
                let terms = g.terms().map(|(m, c)| Ok((m.0.clone(), zp.lower(c)?))).collect::<Result<_>>()?;
                Ok((d, terms))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(HilbertEngine {
            p,
            nvars: ideal.nvars,
            gens,
            tables: Vec::new(),
            values: Vec::new(),
            duals: Vec::new(),
            routes: Vec::new(),
        })
    }

    pub fn values(&self) -> &[usize] {
        &self.values
    }

    pub fn routes(&self) -> &[Route] {
        &self.routes
    }

    fn ensure_table(&mut self, t: usize) {
        while self.tables.len() <= t {
            let d = self.tables.len();
            let monos: Vec<Vec<u16>> =
                monomials_of_degree(self.nvars, d).into_iter().map(|m| m.0).collect();
            let index: HashMap<Vec<u16>, u32> =
                monos.iter().enumerate().map(|(i, m)| (m.clone(), i as u32)).collect();
            let first_div = if d == 0 {
                vec![(0, 0); monos.len()]
            } else {
                let prev = &self.tables[d - 1];
                monos
                    .iter()
                    .map(|m| {
                        let j = m.iter().position(|&e| e > 0).expect("positive degree");
                        let mut q = m.clone();
                        q[j] -= 1;
                        (j as u8, prev.index[&q])
                    })
                    .collect()
            };
            self.tables.push(DegreeTable { monos, index, first_div });
        }
    }

    fn n_at(&self, t: usize) -> usize {
        monomial_count(self.nvars, t)
    }

    fn direct_cost(&self, t: usize) -> f64 {
        let r: usize = self.gens.iter().filter(|(d, _)| *d <= t).map(|(d, _)| self.n_at(t - d)).sum();
        let n = self.n_at(t) as f64;
        let r = r as f64;
        r * r.min(n) * n
    }

    fn dual_cost(&self, t: usize, h1: usize, h2: usize) -> f64 {
        let n = self.nvars as f64;
        let rows = n * (n - 1.0) / 2.0 * h2 as f64 + self.gens.iter().filter(|(d, _)| *d == t).count() as f64;
        let cols = n * h1 as f64;
        let guess = (h1 as f64).max(2.0 * h1 as f64 - h2 as f64).min(self.n_at(t) as f64);
        rows * cols * rows.min(cols) + guess * self.n_at(t) as f64 * (h1 as f64 + guess)
    }

    fn dual_available(&self, t: usize) -> bool {
        t >= 1
            && self.duals.get(t - 1).is_some_and(Option::is_some)
            && (t == 1 || self.duals.get(t - 2).is_some_and(Option::is_some))
    }

    fn should_materialize(&self, t: usize, h: usize) -> bool {
        let size = h as f64 * self.n_at(t) as f64;
        if size <= MATERIALIZE_ALWAYS {
            return true;
        }
        if size > MATERIALIZE_MAX {
            return false;
        }
        let h_prev = if t == 0 { h } else { self.values[t - 1] };
        self.dual_cost(t + 1, h, h_prev) < self.direct_cost(t + 1)
    }

    /// Compute the next value of the Hilbert function.
    pub fn next_value(&mut self) -> usize {
        let t = self.values.len();
        self.ensure_table(t);
        if t > 0 && self.values[t - 1] == 0 {
            self.values.push(0);
            self.duals.push(Some(DualBasis { rows: Vec::new(), coords: Vec::new() }));
            self.routes.push(Route::Direct);
            return 0;
        }
        let use_dual = self.dual_available(t) && {
            let h1 = self.values[t - 1];
            let h2 = if t >= 2 { self.values[t - 2] } else { 0 };
            self.dual_cost(t, h1, h2) < self.direct_cost(t)
        };
        let (h, dual) = if use_dual { self.dual_step(t) } else { self.direct_step(t) };
        self.values.push(h);
        self.duals.push(dual);
        self.routes.push(if use_dual { Route::Dual } else { Route::Direct });
        // free what the next steps can no longer use
        if t >= 2 {
            self.duals[t - 2] = None;
        }
        h
    }

    fn direct_step(&mut self, t: usize) -> (usize, Option<DualBasis>) {
        let n = self.n_at(t);
        let mut basis = EchelonBasis::new(self.p, n);
        let table = &self.tables[t];
        'gens: for (d, terms) in &self.gens {
            if *d > t {
                continue;
            }
            for m in &self.tables[t - d].monos {
                if basis.is_full() {
                    break 'gens;
                }
                let mut row = vec![0u32; n];
                for (e, c) in terms {
                    let prod: Vec<u16> = e.iter().zip(m).map(|(a, b)| a + b).collect();
                    row[table.index[&prod] as usize] = *c;
                }
                basis.insert(&row);
            }
        }
        let h = n - basis.rank();
        if !self.should_materialize(t, h) {
            return (h, None);
        }
        let rref = basis.into_rref();
        let coords = rref.free_columns();
        let rows = rref.kernel_basis();
        (h, Some(DualBasis { rows, coords }))
    }

    fn dual_step(&mut self, t: usize) -> (usize, Option<DualBasis>) {
        let p = self.p as u64;
        let nv = self.nvars;
        let d1 = self.duals[t - 1].as_ref().expect("available");
        let h1 = d1.rows.len();
        let ncols = nv * h1;
        let mut system: Vec<Vec<u32>> = Vec::new();
        if t >= 2 {
            let d2 = self.duals[t - 2].as_ref().expect("available");
            let prev = &self.tables[t - 1];
            let mono2 = &self.tables[t - 2].monos;
            for i in 0..nv {
                for j in i + 1..nv {
                    for &m in &d2.coords {
                        let mut xim = mono2[m].clone();
                        xim[i] += 1;
                        let mut xjm = mono2[m].clone();
                        xjm[j] += 1;
                        let ci = prev.index[&xim] as usize;
                        let cj = prev.index[&xjm] as usize;
                        let mut row = vec![0u32; ncols];
                        for (k, psi) in d1.rows.iter().enumerate() {
                            row[j * h1 + k] = psi[ci];
                            let v = psi[cj];
                            row[i * h1 + k] = if v == 0 { 0 } else { self.p - v };
                        }
                        if row.iter().any(|&x| x != 0) {
                            system.push(row);
                        }
                    }
                }
            }
        }
        let table = &self.tables[t];
        for (d, terms) in &self.gens {
            if *d != t {
                continue;
            }
            let mut row = vec![0u64; ncols];
            for (e, c) in terms {
                let (j, q) = table.first_div[table.index[e] as usize];
                for (k, psi) in d1.rows.iter().enumerate() {
                    let idx = j as usize * h1 + k;
                    row[idx] = (row[idx] + *c as u64 * psi[q as usize] as u64) % p;
                }
            }
            system.push(row.into_iter().map(|x| x as u32).collect());
        }
        let solved = Rref::from_rows(self.p, ncols, system);
        let h = ncols - solved.rank();
        if !self.should_materialize(t, h) {
            return (h, None);
        }
        // rebuild the functionals on S_t from their contractions
        let kernel = solved.kernel_basis();
        let n = table.monos.len();
        let psi_t: Vec<Vec<u32>> = (0..d1.rows.first().map_or(0, Vec::len))
            .map(|q| d1.rows.iter().map(|r| r[q]).collect())
            .collect();
        let mut basis = EchelonBasis::new(self.p, n);
        for c in &kernel {
            let mut phi = vec![0u32; n];
            for (idx, &(j, q)) in table.first_div.iter().enumerate() {
                let block = &c[j as usize * h1..(j as usize + 1) * h1];
                let col = &psi_t[q as usize];
                let mut acc = 0u64;
                for (a, b) in block.iter().zip(col) {
                    acc = (acc + *a as u64 * *b as u64) % p;
                }
                phi[idx] = acc as u32;
            }
            basis.insert(&phi);
        }
        debug_assert_eq!(basis.rank(), h);
        let rref = basis.into_rref();
        let coords = rref.pivots.clone();
        (h, Some(DualBasis { rows: rref.rows, coords }))
    }
}

// ---------------------------------------------------------------------------
// Hilbert polynomial

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HilbertData {
    /// Inclusive degree range of the stabilized segment.
    pub window: (usize, usize),
    /// `HF(t)` for `t = 0..=window.1`.
    pub values: Vec<usize>,
    /// Coefficients of the Hilbert polynomial in `t`, constant term first,
    /// as reduced fractions `"a/b"` or integers.
    pub polynomial: Vec<String>,
    pub dimension: usize,
    /// Leading coefficient times `dimension!`.
    pub degree: String,
    /// `1 - constant term`, reported for curves.
    pub arithmetic_genus: Option<String>,
}

impl HilbertData {
    pub fn coefficients(&self) -> Vec<BigRational> {
        self.polynomial.iter().map(|s| parse_rational(s)).collect()
    }
}

fn parse_rational(s: &str) -> BigRational {
    match s.split_once('/') {
        Some((a, b)) => BigRational::new(a.parse().expect("integer"), b.parse().expect("integer")),
        None => BigRational::from_integer(s.parse::<BigInt>().expect("integer")),
    }
}

fn rational_text(q: &BigRational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Power-basis coefficients of the polynomial of degree <= e through
/// `(t0 + k, ys[k])`, k = 0..=e.
pub fn interpolate(t0: usize, ys: &[i64]) -> Vec<BigRational> {
    let e = ys.len() - 1;
    // forward differences at t0
    let mut diffs = Vec::with_capacity(e + 1);
    let mut cur: Vec<BigInt> = ys.iter().map(|&y| BigInt::from(y)).collect();
    for _ in 0..=e {
        diffs.push(cur[0].clone());
        cur = cur.windows(2).map(|w| &w[1] - &w[0]).collect();
    }
    // sum_k diffs[k] * binom(t - t0, k)
    let mut coeffs = vec![BigRational::zero(); e + 1];
    let mut basis = vec![BigRational::one()];
    let mut fact = BigInt::one();
    for (k, dk) in diffs.iter().enumerate() {
        if k > 0 {
            fact *= BigInt::from(k);
            let shift = BigRational::from_integer(BigInt::from(t0 as i64 + k as i64 - 1));
            let mut next = vec![BigRational::zero(); basis.len() + 1];
            for (i, b) in basis.iter().enumerate() {
                next[i + 1] += b;
                next[i] -= b * &shift;
            }
            basis = next;
        }
        for (i, b) in basis.iter().enumerate() {
            coeffs[i] += b * BigRational::new(dk.clone(), fact.clone());
        }
    }
    while coeffs.len() > 1 && coeffs.last().is_some_and(Zero::is_zero) {
        coeffs.pop();
    }
    coeffs
}

/// Evaluate HF on an increasing window until `expected_dim + 2`
/// consecutive values, all at or above the largest generator degree, lie on
/// one polynomial of degree exactly `expected_dim`.
pub fn fit_hilbert_polynomial(
    ideal: &HomogeneousIdeal,
    expected_dim: usize,
    cfg: &HilbertConfig,
) -> Result<HilbertData> {
    if expected_dim + 1 >= ideal.nvars.max(1) + 1 {
        return Err(Error::InvalidInput(format!(
            "expected dimension {expected_dim} too large for {} variables",
            ideal.nvars
        )));
    }
    let need = expected_dim + 2;
    let start = ideal.max_generator_degree();
    let mut eval = HilbertEvaluator::new(ideal, cfg)?;
    for t in 0..=cfg.degree_cap {
        eval.next_value()?;
        if t + 1 < start + need {
            continue;
        }
        let lo = t + 1 - need;
        let ys: Vec<i64> = eval.values[lo..=t].iter().map(|&v| v as i64).collect();
        let coeffs = interpolate(lo, &ys[..need - 1]);
        let exact_degree = coeffs.len() == expected_dim + 1 && !coeffs[expected_dim].is_zero();
        let nonzero_const = expected_dim > 0 || !coeffs[0].is_zero();
        let predicted = eval_poly(&coeffs, t as i64);
        if exact_degree && nonzero_const && predicted == BigRational::from_integer(BigInt::from(ys[need - 1])) {
            let mut fact = BigInt::one();
            for k in 2..=expected_dim {
                fact *= BigInt::from(k);
            }
            let degree = &coeffs[expected_dim] * BigRational::from_integer(fact);
            let genus = (expected_dim == 1).then(|| rational_text(&(BigRational::one() - &coeffs[0])));
            return Ok(HilbertData {
                window: (lo, t),
                values: eval.values.clone(),
                polynomial: coeffs.iter().map(rational_text).collect(),
                dimension: expected_dim,
                degree: rational_text(&degree),
                arithmetic_genus: genus,
            });
        }
    }
    Err(Error::NoStabilization { cap: cfg.degree_cap })
}

pub fn eval_poly(coeffs: &[BigRational], t: i64) -> BigRational {
    let x = BigRational::from_integer(BigInt::from(t));
    coeffs.iter().rev().fold(BigRational::zero(), |acc, c| acc * &x + c)
}

// ---------------------------------------------------------------------------
// Emptiness

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum Emptiness {
    /// `HF(degree) = 0`: the ideal contains every form of that degree.
    Empty { degree: usize },
    /// HF stays positive and stopped decreasing at the cap.
    NonEmpty { degree: usize, value: usize },
    /// HF still decreasing at the cap.
    Inconclusive { cap: usize, values: Vec<usize> },
}

impl Emptiness {
    pub fn is_empty(&self) -> Option<bool> {
        match self {
            Emptiness::Empty { .. } => Some(true),
            Emptiness::NonEmpty { .. } => Some(false),
            Emptiness::Inconclusive { .. } => None,
        }
    }
}

/// Decide whether the projective zero set is empty by watching HF up to
/// the degree cap.
pub fn is_empty_projective(ideal: &HomogeneousIdeal, cfg: &HilbertConfig) -> Result<Emptiness> {
    let mut eval = HilbertEvaluator::new(ideal, cfg)?;
    for t in 0..=cfg.degree_cap {
        if eval.next_value()? == 0 {
            return Ok(Emptiness::Empty { degree: t });
        }
    }
    let v = &eval.values;
    let k = v.len();
    let past_generators = k >= 3 && k - 3 >= ideal.max_generator_degree();
    if past_generators && v[k - 3] <= v[k - 2] && v[k - 2] <= v[k - 1] {
        return Ok(Emptiness::NonEmpty { degree: k - 1, value: v[k - 1] });
    }
    Ok(Emptiness::Inconclusive { cap: cfg.degree_cap, values: v.clone() })
}

// ---------------------------------------------------------------------------
// Constructions

/// All `r x r` minors of a matrix of polynomials, rows and columns chosen
/// in lexicographic order; zero minors are dropped.
pub fn minors_ideal(m: &[Vec<MultiPoly>], r: usize) -> Result<HomogeneousIdeal> {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    if r == 0 || r > rows.min(cols) {
        return Err(Error::DimensionMismatch(format!("{r}x{r} minors of a {rows}x{cols} matrix")));
    }
    let field = m[0][0].field().clone();
    let nvars = m[0][0].nvars();
    let mut gens = Vec::new();
    for rs in subsets(rows, r) {
        for cs in subsets(cols, r) {
            let sub: Vec<Vec<MultiPoly>> =
                rs.iter().map(|&i| cs.iter().map(|&j| m[i][j].clone()).collect()).collect();
            let d = det_poly(&sub)?;
            if !d.is_zero() {
                gens.push(d);
            }
        }
    }
    HomogeneousIdeal::new(&field, nvars, gens)
}

/// k-element subsets of `0..n` in lexicographic order.
pub fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(n: usize, k: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            go(n, k, i + 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(n, k, 0, &mut Vec::new(), &mut out);
    out
}

/// The ideal plus the `c x c` minors of the Jacobian matrix of its
/// generators, `c` the codimension (default: the number of generators,
/// capped by the number of variables). For one generator these minors are
/// the first partials.
pub fn jacobian_ideal(ideal: &HomogeneousIdeal, codim: Option<usize>) -> Result<HomogeneousIdeal> {
    let gens = &ideal.generators;
    if gens.is_empty() {
        return Ok(ideal.clone());
    }
    let c = codim.unwrap_or(gens.len()).min(gens.len()).min(ideal.nvars);
    let jac: Vec<Vec<MultiPoly>> = gens
        .iter()
        .map(|g| (0..ideal.nvars).map(|i| g.partial(i)).collect::<Result<_>>())
        .collect::<Result<_>>()?;
    if c == 0 {
        return Ok(ideal.clone());
    }
    let minors = minors_ideal(&jac, c)?;
    ideal.with_generators(minors.generators)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FieldElement;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn gf(p: u32) -> Field {
        Field::Prime(p)
    }

    fn random_linear(f: &Field, n: usize, rng: &mut ChaCha8Rng) -> MultiPoly {
        let c: Vec<FieldElement> = (0..n).map(|_| f.random(rng)).collect();
        MultiPoly::linear(f, &c).unwrap()
    }

    fn oracle_hf(ideal: &HomogeneousIdeal, t: usize) -> usize {
        let m = ideal.macaulay_matrix(t);
        m.cols() - m.rank()
    }

    #[test]
    fn macaulay_matrix_of_a_variable() {
        let f = gf(7);
        let i = HomogeneousIdeal::new(&f, 2, vec![MultiPoly::var(&f, 2, 0)]).unwrap();
        let m = i.macaulay_matrix(2);
        assert_eq!((m.rows(), m.cols(), m.rank()), (2, 3, 2));
        assert_eq!(HomogeneousIdeal::zero(&f, 4).macaulay_matrix(3).rows(), 0);
    }

    #[test]
    fn trivial_hilbert_functions() {
        let f = gf(32003);
        let cfg = HilbertConfig::default();
        assert_eq!(HomogeneousIdeal::zero(&f, 6).hilbert_function(3, &cfg).unwrap(), 56);
        let m = HomogeneousIdeal::maximal(&f, 6);
        assert_eq!(m.hilbert_values(4, &cfg).unwrap(), vec![1, 0, 0, 0, 0]);
    }

    #[test]
    fn both_routes_agree_with_macaulay_ranks() {
        let f = gf(101);
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        // random quadrics and cubics in 5 variables
        for trial in 0..6 {
            let n = 4 + trial % 2;
            let mut gens = Vec::new();
            for k in 0..(2 + trial) {
                let d = 2 + k % 2;
                let mut g = MultiPoly::zero(&f, n);
                for m in monomials_of_degree(n, d) {
                    if rng.gen_bool(0.4) {
                        g.add_term(m, f.random(&mut rng)).unwrap();
                    }
                }
                gens.push(g);
            }
            let ideal = HomogeneousIdeal::new(&f, n, gens).unwrap();
            let mut engine = HilbertEngine::new(101, &ideal).unwrap();
            for t in 0..=8 {
                assert_eq!(engine.next_value(), oracle_hf(&ideal, t), "trial {trial} t {t}");
            }
        }
    }

    #[test]
    fn dual_route_is_exercised_on_a_curve() {
        // twisted cubic: 2x2 minors of [[x0,x1,x2],[x1,x2,x3]]
        let f = gf(32003);
        let x = |i| MultiPoly::var(&f, 4, i);
        let m = vec![vec![x(0), x(1), x(2)], vec![x(1), x(2), x(3)]];
        let ideal = minors_ideal(&m, 2).unwrap();
        assert_eq!(ideal.generators().len(), 3);
        let mut engine = HilbertEngine::new(32003, &ideal).unwrap();
        let vals: Vec<usize> = (0..=14).map(|_| engine.next_value()).collect();
        for (t, v) in vals.iter().enumerate() {
            assert_eq!(*v, 3 * t + 1);
        }
        assert!(engine.routes().contains(&Route::Dual));
        let data = fit_hilbert_polynomial(&ideal, 1, &HilbertConfig::default()).unwrap();
        assert_eq!(data.polynomial, vec!["1", "3"]);
        assert_eq!(data.degree, "3");
        assert_eq!(data.arithmetic_genus.as_deref(), Some("0"));
    }

    #[test]
    fn line_has_hilbert_polynomial_t_plus_one() {
        let f = gf(32003);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let gens = (0..4).map(|_| random_linear(&f, 6, &mut rng)).collect();
        let ideal = HomogeneousIdeal::new(&f, 6, gens).unwrap();
        let data = fit_hilbert_polynomial(&ideal, 1, &HilbertConfig::default()).unwrap();
        assert_eq!(data.polynomial, vec!["1", "1"]);
        assert_eq!(data.degree, "1");
        assert_eq!(data.arithmetic_genus.as_deref(), Some("0"));
    }

    #[test]
    fn quartic_hypersurface_matches_binomial_difference() {
        let f = gf(32003);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut q = MultiPoly::zero(&f, 6);
        for m in monomials_of_degree(6, 4) {
            q.add_term(m, f.random(&mut rng)).unwrap();
        }
        let ideal = HomogeneousIdeal::new(&f, 6, vec![q]).unwrap();
        let data = fit_hilbert_polynomial(&ideal, 4, &HilbertConfig::default()).unwrap();
        let coeffs = data.coefficients();
        for t in data.window.0..=data.window.1 {
            let expect = binomial_i(t + 5, 5) - binomial_i(t + 1, 5);
            assert_eq!(eval_poly(&coeffs, t as i64), BigRational::from_integer(BigInt::from(expect)));
        }
        assert_eq!(data.degree, "4");
    }

    fn binomial_i(n: usize, k: usize) -> i64 {
        crate::multipoly::binomial(n, k) as i64
    }

    #[test]
    fn emptiness_tri_state() {
        let f = gf(32003);
        let cfg = HilbertConfig::default();
        assert_eq!(
            is_empty_projective(&HomogeneousIdeal::maximal(&f, 6), &cfg).unwrap(),
            Emptiness::Empty { degree: 1 }
        );
        assert_eq!(is_empty_projective(&HomogeneousIdeal::zero(&f, 6), &cfg).unwrap().is_empty(), Some(false));
        let tiny = HilbertConfig { degree_cap: 3, ..cfg.clone() };
        // three generic quadrics in 3 variables: HF = 1,3,3,1,0
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let gens = (0..3)
            .map(|_| {
                let mut g = MultiPoly::zero(&f, 3);
                for m in monomials_of_degree(3, 2) {
                    g.add_term(m, f.random(&mut rng)).unwrap();
                }
                g
            })
            .collect();
        let ci = HomogeneousIdeal::new(&f, 3, gens).unwrap();
        assert_eq!(ci.hilbert_values(4, &cfg).unwrap(), vec![1, 3, 3, 1, 0]);
        assert!(matches!(is_empty_projective(&ci, &tiny).unwrap(), Emptiness::Inconclusive { .. }));
        assert_eq!(is_empty_projective(&ci, &cfg).unwrap(), Emptiness::Empty { degree: 4 });
    }

    #[test]
    fn jacobian_of_conics() {
        let f = Field::Rational;
        let smooth = MultiPoly::parse(&f, 3, "x0*x2 - x1^2").unwrap();
        let j = jacobian_ideal(&HomogeneousIdeal::new(&f, 3, vec![smooth]).unwrap(), None).unwrap();
        assert_eq!(j.generators().len(), 4);
        assert_eq!(is_empty_projective(&j, &HilbertConfig::default()).unwrap().is_empty(), Some(true));
        let cone = MultiPoly::parse(&f, 3, "x0*x1").unwrap();
        let j = jacobian_ideal(&HomogeneousIdeal::new(&f, 3, vec![cone]).unwrap(), None).unwrap();
        let vals = j.hilbert_values(6, &HilbertConfig::default()).unwrap();
        assert_eq!(&vals[2..], &[1, 1, 1, 1, 1]);
    }

    #[test]
    fn minors_of_generic_two_by_two() {
        let f = Field::Rational;
        let x = |i| MultiPoly::var(&f, 4, i);
        let m = vec![vec![x(0), x(1)], vec![x(2), x(3)]];
        let i = minors_ideal(&m, 2).unwrap();
        assert_eq!(i.generators().len(), 1);
        assert_eq!(i.generators()[0].to_text(), "1*x0*x3 - 1*x1*x2");
        assert_eq!(minors_ideal(&m, 1).unwrap().generators().len(), 4);
    }

    #[test]
    fn rational_ideal_falls_back_to_exact_ranks() {
        let f = Field::Rational;
        let g1 = MultiPoly::parse(&f, 3, "x0*x1").unwrap();
        let g2 = MultiPoly::parse(&f, 3, "x0*x2 + 32003*x1*x2").unwrap();
        let i = HomogeneousIdeal::new(&f, 3, vec![g1, g2]).unwrap();
        let vals = i.hilbert_values(6, &HilbertConfig::default()).unwrap();
        let exact: Vec<usize> = (0..=6).map(|t| oracle_hf(&i, t)).collect();
        assert_eq!(vals, exact);
        // modulo 32003 the zero set acquires a line
        let modp = i.map_field(&gf(32003)).unwrap().hilbert_values(6, &HilbertConfig::default()).unwrap();
        assert_ne!(vals, modp);
    }

    #[test]
    fn interpolation_recovers_polynomials() {
        let c = interpolate(3, &[50, 75, 100]);
        assert_eq!(c.len(), 2);
        assert_eq!(rational_text(&c[0]), "-25");
        assert_eq!(rational_text(&c[1]), "25");
        let c = interpolate(0, &[1, 6, 21, 56]);
        // C(t+5,5) restricted to 4 points is not cubic; just check it reproduces
        for (k, y) in [1, 6, 21, 56].iter().enumerate() {
            assert_eq!(eval_poly(&c, k as i64), BigRational::from_integer(BigInt::from(*y)));
        }
    }
}
