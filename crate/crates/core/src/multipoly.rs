//! Sparse exact multivariate polynomials in graded-lex order, skew matrices
//! of polynomials, polynomial Pfaffians and determinants, and exact division.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt;

use crate::error::{Error, Result};
use crate::field::{mismatch, parse_element, Field, FieldElement, FieldOps};
use crate::matrix::ExactMatrix;
use crate::with_field_ops;

pub const MAX_POLY_PFAFFIAN_SIZE: usize = 8;

/// Exponent vector. Ordered by total degree, then lexicographically with
/// `x0` the most significant variable.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Monomial(pub Vec<u16>);

impl Monomial {
    pub fn one(nvars: usize) -> Self {
        Monomial(vec![0; nvars])
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        Monomial(e)
    }

    pub fn degree(&self) -> usize {
        self.0.iter().map(|&e| e as usize).sum()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    /// `other / self`, assuming divisibility.
    pub fn quotient_of(&self, other: &Monomial) -> Monomial {
        Monomial(other.0.iter().zip(&self.0).map(|(a, b)| a - b).collect())
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree().cmp(&other.degree()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// All exponent vectors of total degree `d` in `nvars` variables, in
/// descending graded-lex order.
pub fn monomials_of_degree(nvars: usize, d: usize) -> Vec<Monomial> {
    fn go(nvars: usize, i: usize, left: usize, cur: &mut Vec<u16>, out: &mut Vec<Monomial>) {
        if i + 1 == nvars {
            cur.push(left as u16);
            out.push(Monomial(cur.clone()));
            cur.pop();
            return;
        }
        for e in (0..=left).rev() {
            cur.push(e as u16);
            go(nvars, i + 1, left - e, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if nvars == 0 {
        if d == 0 {
            out.push(Monomial(Vec::new()));
        }
        return out;
    }
    go(nvars, 0, d, &mut Vec::with_capacity(nvars), &mut out);
    out
}

/// Number of monomials of degree `d` in `nvars` variables.
pub fn monomial_count(nvars: usize, d: usize) -> usize {
    if nvars == 0 {
        return usize::from(d == 0);
    }
    binomial(d + nvars - 1, nvars - 1) as usize
}

pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiPoly {
    nvars: usize,
    field: Field,
    terms: BTreeMap<Monomial, FieldElement>,
}

impl MultiPoly {
    pub fn zero(field: &Field, nvars: usize) -> Self {
        MultiPoly { nvars, field: field.clone(), terms: BTreeMap::new() }
    }

    pub fn constant(field: &Field, nvars: usize, c: FieldElement) -> Result<Self> {
        let mut p = Self::zero(field, nvars);
        p.add_term(Monomial::one(nvars), c)?;
        Ok(p)
    }

    pub fn var(field: &Field, nvars: usize, i: usize) -> Self {
        let mut p = Self::zero(field, nvars);
        p.terms.insert(Monomial::var(nvars, i), field.one());
        p
    }

    /// Build from (exponents, coefficient) pairs; repeated exponents add up.
    pub fn from_terms(
        field: &Field,
        nvars: usize,
        terms: impl IntoIterator<Item = (Vec<u16>, FieldElement)>,
    ) -> Result<Self> {
        let mut p = Self::zero(field, nvars);
        for (e, c) in terms {
            if e.len() != nvars {
                return Err(Error::NvarsMismatch(e.len(), nvars));
            }
            p.add_term(Monomial(e), c)?;
        }
        Ok(p)
    }

    /// Linear form `sum c_i x_i`.
    pub fn linear(field: &Field, coeffs: &[FieldElement]) -> Result<Self> {
        let n = coeffs.len();
        Self::from_terms(
            field,
            n,
            coeffs.iter().enumerate().map(|(i, c)| (Monomial::var(n, i).0, c.clone())),
        )
    }

    pub fn add_term(&mut self, m: Monomial, c: FieldElement) -> Result<()> {
        if c.field() != self.field {
            return Err(mismatch(&self.field, &c.field()));
        }
        if m.0.len() != self.nvars {
            return Err(Error::NvarsMismatch(m.0.len(), self.nvars));
        }
        if c.is_zero() {
            return Ok(());
        }
        match self.terms.get_mut(&m) {
            Some(old) => {
                let s = old.add(&c)?;
                if s.is_zero() {
                    self.terms.remove(&m);
                } else {
                    *old = s;
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
        Ok(())
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }
    pub fn field(&self) -> &Field {
        &self.field
    }
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
    pub fn len(&self) -> usize {
        self.terms.len()
    }
    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in ascending graded-lex order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &FieldElement)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, m: &Monomial) -> FieldElement {
        self.terms.get(m).cloned().unwrap_or_else(|| self.field.zero())
    }

    pub fn leading_term(&self) -> Option<(&Monomial, &FieldElement)> {
        self.terms.iter().next_back()
    }

    /// Maximal total degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.terms.keys().next_back().map(Monomial::degree)
    }

    pub fn is_homogeneous(&self) -> bool {
        let mut it = self.terms.keys().map(Monomial::degree);
        match it.next() {
            None => true,
            Some(d) => it.all(|e| e == d),
        }
    }

    /// Common degree of all terms; the zero polynomial has none.
    pub fn homogeneous_degree(&self) -> Result<Option<usize>> {
        if !self.is_homogeneous() {
            return Err(Error::NotHomogeneous);
        }
        Ok(self.degree())
    }

    fn check(&self, other: &MultiPoly) -> Result<()> {
        if self.nvars != other.nvars {
            return Err(Error::NvarsMismatch(self.nvars, other.nvars));
        }
        if self.field != other.field {
            return Err(mismatch(&self.field, &other.field));
        }
        Ok(())
    }

    pub fn add(&self, other: &MultiPoly) -> Result<MultiPoly> {
        self.check(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone())?;
        }
        Ok(out)
    }

    pub fn neg(&self) -> MultiPoly {
        MultiPoly {
            nvars: self.nvars,
            field: self.field.clone(),
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c.neg())).collect(),
        }
    }

    pub fn sub(&self, other: &MultiPoly) -> Result<MultiPoly> {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &FieldElement) -> Result<MultiPoly> {
        if c.field() != self.field {
            return Err(mismatch(&self.field, &c.field()));
        }
        let mut out = Self::zero(&self.field, self.nvars);
        if c.is_zero() {
            return Ok(out);
        }
        for (m, a) in &self.terms {
            out.terms.insert(m.clone(), a.mul(c)?);
        }
        Ok(out)
    }

    pub fn mul(&self, other: &MultiPoly) -> Result<MultiPoly> {
        self.check(other)?;
        with_field_ops!(&self.field, f => {
            let mut acc: HashMap<Monomial, _> = HashMap::new();
            let rhs: Vec<(&Monomial, _)> =
                other.terms.iter().map(|(m, c)| Ok((m, f.lower(c)?))).collect::<Result<_>>()?;
            for (m1, c1) in &self.terms {
                let c1 = f.lower(c1)?;
                for (m2, c2) in &rhs {
                    let prod = f.mul(&c1, c2);
                    let e = acc.entry(m1.mul(m2)).or_insert_with(|| f.zero());
                    *e = f.add(e, &prod);
                }
            }
            let terms = acc
                .into_iter()
                .filter(|(_, c)| !f.is_zero(c))
                .map(|(m, c)| (m, f.lift(&c)))
                .collect();
            Ok(MultiPoly { nvars: self.nvars, field: self.field.clone(), terms })
        })
    }

    pub fn mul_monomial(&self, m: &Monomial) -> MultiPoly {
        MultiPoly {
            nvars: self.nvars,
            field: self.field.clone(),
            terms: self.terms.iter().map(|(k, c)| (k.mul(m), c.clone())).collect(),
        }
    }

    pub fn pow(&self, e: u32) -> Result<MultiPoly> {
        let mut acc = Self::constant(&self.field, self.nvars, self.field.one())?;
        for _ in 0..e {
            acc = acc.mul(self)?;
        }
        Ok(acc)
    }

    /// Formal partial derivative with respect to `x_i`.
    pub fn partial(&self, i: usize) -> Result<MultiPoly> {
        if i >= self.nvars {
            return Err(Error::NvarsMismatch(i + 1, self.nvars));
        }
        let mut out = Self::zero(&self.field, self.nvars);
        for (m, c) in &self.terms {
            let e = m.0[i];
            if e == 0 {
                continue;
            }
            let mut m2 = m.clone();
            m2.0[i] -= 1;
            out.add_term(m2, c.mul(&self.field.from_i64(e as i64))?)?;
        }
        Ok(out)
    }

    pub fn evaluate(&self, point: &[FieldElement]) -> Result<FieldElement> {
        if point.len() != self.nvars {
            return Err(Error::NvarsMismatch(point.len(), self.nvars));
        }
        with_field_ops!(&self.field, f => {
            let pt = point.iter().map(|x| f.lower(x)).collect::<Result<Vec<_>>>()?;
            let compiled = CompiledPoly::new(f, self)?;
            Ok(f.lift(&compiled.eval(f, &pt)))
        })
    }

    /// Coefficient-wise image in another field (rationals reduce to any
    /// field; the reduction must not hit a zero denominator).
    pub fn map_field(&self, target: &Field) -> Result<MultiPoly> {
        let mut out = Self::zero(target, self.nvars);
        for (m, c) in &self.terms {
            out.add_term(m.clone(), target.coerce(c)?)?;
        }
        Ok(out)
    }

    /// Substitute polynomials (all in a common ring) for the variables.
    pub fn compose(&self, subs: &[MultiPoly]) -> Result<MultiPoly> {
        if subs.len() != self.nvars {
            return Err(Error::NvarsMismatch(subs.len(), self.nvars));
        }
        let target_nvars = subs.first().map_or(0, MultiPoly::nvars);
        let mut out = Self::zero(&self.field, target_nvars);
        for (m, c) in &self.terms {
            let mut term = Self::constant(&self.field, target_nvars, c.clone())?;
            for (i, &e) in m.0.iter().enumerate() {
                if e > 0 {
                    term = term.mul(&subs[i].pow(e as u32)?)?;
                }
            }
            out = out.add(&term)?;
        }
        Ok(out)
    }

    /// Divide by the leading coefficient (finite fields and rationals alike).
    pub fn monic(&self) -> Result<MultiPoly> {
        match self.leading_term() {
            None => Ok(self.clone()),
            Some((_, c)) => self.scale(&c.inv()?),
        }
    }

    /// Canonical text form: terms in descending graded-lex order with
    /// explicit coefficients, e.g. `1*x0^2 - 1*x1^2`.
    pub fn to_text(&self) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (k, (m, c)) in self.terms.iter().rev().enumerate() {
            let (neg, abs) = if c.is_negative() { (true, c.neg()) } else { (false, c.clone()) };
            match (k, neg) {
                (0, true) => out.push('-'),
                (0, false) => {}
                (_, true) => out.push_str(" - "),
                (_, false) => out.push_str(" + "),
            }
            out.push_str(&abs.to_string());
            for (i, &e) in m.0.iter().enumerate() {
                match e {
                    0 => {}
                    1 => out.push_str(&format!("*x{i}")),
                    _ => out.push_str(&format!("*x{i}^{e}")),
                }
            }
        }
        out
    }

    /// Parse the text form written by [`MultiPoly::to_text`]. A missing
    /// coefficient means 1.
    pub fn parse(field: &Field, nvars: usize, s: &str) -> Result<MultiPoly> {
        let mut p = Self::zero(field, nvars);
        let s = s.trim();
        if s == "0" {
            return Ok(p);
        }
        let mut depth = 0i32;
        let mut start = 0usize;
        let mut sign = 1i64;
        let mut pieces: Vec<(i64, &str)> = Vec::new();
        let bytes = s.as_bytes();
        for (i, &b) in bytes.iter().enumerate() {
            match b {
                b'(' => depth += 1,
                b')' => depth -= 1,
                b'+' | b'-' if depth == 0 => {
                    let prev_nonspace = s[..i].trim_end();
                    // a sign directly after `^` or `/` belongs to the number
                    if prev_nonspace.ends_with('^') || prev_nonspace.ends_with('/') {
                        continue;
                    }
                    let piece = s[start..i].trim();
                    if !piece.is_empty() {
                        pieces.push((sign, piece));
                    }
                    sign = if b == b'-' { -1 } else { 1 };
                    start = i + 1;
                }
                _ => {}
            }
        }
        let last = s[start..].trim();
        if !last.is_empty() {
            pieces.push((sign, last));
        }
        for (sign, piece) in pieces {
            let mut coeff = field.from_i64(sign);
            let mut exps = vec![0u16; nvars];
            let mut depth = 0i32;
            let mut fstart = 0usize;
            let mut factors = Vec::new();
            for (i, ch) in piece.char_indices() {
                match ch {
                    '(' => depth += 1,
                    ')' => depth -= 1,
                    '*' if depth == 0 => {
                        factors.push(&piece[fstart..i]);
                        fstart = i + 1;
                    }
                    _ => {}
                }
            }
            factors.push(&piece[fstart..]);
            for fac in factors {
                let fac = fac.trim();
                if let Some(rest) = fac.strip_prefix('x') {
                    let (idx, e) = match rest.split_once('^') {
                        Some((i, e)) => (i, e),
                        None => (rest, "1"),
                    };
                    let idx: usize =
                        idx.parse().map_err(|_| Error::Parse(format!("bad variable `{fac}`")))?;
                    let e: u16 =
                        e.parse().map_err(|_| Error::Parse(format!("bad exponent `{fac}`")))?;
                    if idx >= nvars {
                        return Err(Error::Parse(format!("variable x{idx} out of range")));
                    }
                    exps[idx] += e;
                } else {
                    coeff = coeff.mul(&parse_element(field, fac)?)?;
                }
            }
            p.add_term(Monomial(exps), coeff)?;
        }
        Ok(p)
    }
}

impl fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

/// Exact quotient `num / den`; fails unless `den` divides `num`.
///
/// Plain multivariate long division against one divisor in graded-lex
/// order: the leading term of the running remainder must always be
/// divisible by the leading term of `den`.
pub fn exact_divide(num: &MultiPoly, den: &MultiPoly) -> Result<MultiPoly> {
    num.check(den)?;
    let (lm, lc) = den.leading_term().ok_or(Error::DivisionByZero)?;
    let lc_inv = lc.inv()?;
    let mut rem = num.clone();
    let mut quot = MultiPoly::zero(&num.field, num.nvars);
    while let Some((m, c)) = rem.leading_term() {
        if !lm.divides(m) {
            return Err(Error::NonzeroRemainder);
        }
        let qm = lm.quotient_of(m);
        let qc = c.mul(&lc_inv)?;
        let step = den.mul_monomial(&qm).scale(&qc)?;
        rem = rem.sub(&step)?;
        quot.add_term(qm, qc)?;
    }
    Ok(quot)
}

/// Determinant of a square matrix of polynomials by Laplace expansion along
/// rows, memoized on the set of remaining columns.
pub fn det_poly(m: &[Vec<MultiPoly>]) -> Result<MultiPoly> {
    let n = m.len();
    if m.iter().any(|r| r.len() != n) {
        return Err(Error::DimensionMismatch("determinant of a non-square matrix".into()));
    }
    if n == 0 {
        return Err(Error::DimensionMismatch("empty matrix".into()));
    }
    if n > 16 {
        return Err(Error::TooLarge { size: n, max: 16 });
    }
    let field = m[0][0].field.clone();
    let nvars = m[0][0].nvars;
    let mut memo: HashMap<u32, MultiPoly> = HashMap::new();
    fn go(
        m: &[Vec<MultiPoly>],
        row: usize,
        cols: u32,
        memo: &mut HashMap<u32, MultiPoly>,
        field: &Field,
        nvars: usize,
    ) -> Result<MultiPoly> {
        if row == m.len() {
            return MultiPoly::constant(field, nvars, field.one());
        }
        if let Some(v) = memo.get(&cols) {
            return Ok(v.clone());
        }
        let mut acc = MultiPoly::zero(field, nvars);
        let mut sign_pos = true;
        for c in 0..m.len() {
            if cols & (1 << c) == 0 {
                continue;
            }
            if !m[row][c].is_zero() {
                let minor = go(m, row + 1, cols & !(1 << c), memo, field, nvars)?;
                let term = m[row][c].mul(&minor)?;
                acc = if sign_pos { acc.add(&term)? } else { acc.sub(&term)? };
            }
            sign_pos = !sign_pos;
        }
        memo.insert(cols, acc.clone());
        Ok(acc)
    }
    go(m, 0, (1u32 << n) - 1, &mut memo, &field, nvars)
}

/// Square skew-symmetric matrix of polynomials.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SkewPolyMatrix {
    size: usize,
    entries: Vec<Vec<MultiPoly>>,
}

impl SkewPolyMatrix {
    pub fn new(entries: Vec<Vec<MultiPoly>>) -> Result<Self> {
        let size = entries.len();
        if entries.iter().any(|r| r.len() != size) {
            return Err(Error::DimensionMismatch("non-square polynomial matrix".into()));
        }
        for i in 0..size {
            if !entries[i][i].is_zero() {
                return Err(Error::NotSkew);
            }
            for j in i + 1..size {
                if entries[i][j].add(&entries[j][i])? != MultiPoly::zero(entries[i][j].field(), entries[i][j].nvars()) {
                    return Err(Error::NotSkew);
                }
            }
        }
        Ok(SkewPolyMatrix { size, entries })
    }

    /// `sum_k x_k M_k` for scalar skew matrices `M_k` (a linear net).
    pub fn from_linear_net(field: &Field, mats: &[ExactMatrix]) -> Result<Self> {
        let n = mats.len();
        let size = mats.first().map_or(0, ExactMatrix::rows);
        let mut entries = vec![vec![MultiPoly::zero(field, n); size]; size];
        for (k, m) in mats.iter().enumerate() {
            if m.rows() != size || m.cols() != size {
                return Err(Error::DimensionMismatch("net matrices of different sizes".into()));
            }
            for (i, row) in entries.iter_mut().enumerate() {
                for (j, e) in row.iter_mut().enumerate() {
                    let c = m.get(i, j);
                    if !c.is_zero() {
                        e.add_term(Monomial::var(n, k), c.clone())?;
                    }
                }
            }
        }
        Self::new(entries)
    }

    pub fn size(&self) -> usize {
        self.size
    }
    pub fn entries(&self) -> &[Vec<MultiPoly>] {
        &self.entries
    }
    pub fn get(&self, i: usize, j: usize) -> &MultiPoly {
        &self.entries[i][j]
    }

    pub fn evaluate(&self, point: &[FieldElement]) -> Result<ExactMatrix> {
        let field = point
            .first()
            .map(FieldElement::field)
            .ok_or_else(|| Error::DimensionMismatch("empty point".into()))?;
        let mut data = Vec::with_capacity(self.size * self.size);
        for row in &self.entries {
            for e in row {
                data.push(e.evaluate(point)?);
            }
        }
        ExactMatrix::new(&field, self.size, self.size, data)
    }

    pub fn determinant(&self) -> Result<MultiPoly> {
        det_poly(&self.entries)
    }
}

/// Pfaffian of a skew matrix of homogeneous polynomials of a common degree.
pub fn pfaffian_poly(m: &SkewPolyMatrix) -> Result<MultiPoly> {
    if m.size % 2 == 1 {
        return Err(Error::OddSize(m.size));
    }
    if m.size > MAX_POLY_PFAFFIAN_SIZE {
        return Err(Error::TooLarge { size: m.size, max: MAX_POLY_PFAFFIAN_SIZE });
    }
    let mut degree = None;
    for row in &m.entries {
        for e in row {
            if let Some(d) = e.homogeneous_degree()? {
                if *degree.get_or_insert(d) != d {
                    return Err(Error::NotHomogeneous);
                }
            }
        }
    }
    if m.size == 0 {
        return Err(Error::DimensionMismatch("empty matrix".into()));
    }
    let idx: Vec<usize> = (0..m.size).collect();
    pf_poly_rec(m, &idx)
}

fn pf_poly_rec(m: &SkewPolyMatrix, idx: &[usize]) -> Result<MultiPoly> {
    let any = &m.entries[0][0];
    if idx.len() == 2 {
        return Ok(m.entries[idx[0]][idx[1]].clone());
    }
    let mut acc = MultiPoly::zero(any.field(), any.nvars());
    for j in 1..idx.len() {
        let a = &m.entries[idx[0]][idx[j]];
        if a.is_zero() {
            continue;
        }
        let rest: Vec<usize> =
            idx[1..].iter().enumerate().filter(|&(k, _)| k + 1 != j).map(|(_, &x)| x).collect();
        let term = a.mul(&pf_poly_rec(m, &rest)?)?;
        acc = if j % 2 == 1 { acc.add(&term)? } else { acc.sub(&term)? };
    }
    Ok(acc)
}

/// A polynomial lowered to typed coefficients for fast repeated evaluation.
#[derive(Clone, Debug)]
pub struct CompiledPoly<F: FieldOps> {
    nvars: usize,
    max_exp: usize,
    terms: Vec<(Vec<u16>, F::El)>,
}

impl<F: FieldOps> CompiledPoly<F> {
    pub fn new(f: &F, p: &MultiPoly) -> Result<Self> {
        let terms = p
            .terms
            .iter()
            .map(|(m, c)| Ok((m.0.clone(), f.lower(c)?)))
            .collect::<Result<Vec<_>>>()?;
        let max_exp = terms.iter().flat_map(|(e, _)| e.iter()).copied().max().unwrap_or(0) as usize;
        Ok(CompiledPoly { nvars: p.nvars, max_exp, terms })
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn degree(&self) -> usize {
        self.terms.iter().map(|(e, _)| e.iter().map(|&x| x as usize).sum()).max().unwrap_or(0)
    }

    fn powers(&self, f: &F, pt: &[F::El]) -> Vec<Vec<F::El>> {
        pt.iter()
            .map(|x| {
                let mut row = Vec::with_capacity(self.max_exp + 1);
                row.push(f.one());
                for k in 1..=self.max_exp {
                    let next = f.mul(&row[k - 1], x);
                    row.push(next);
                }
                row
            })
            .collect()
    }

    pub fn eval(&self, f: &F, pt: &[F::El]) -> F::El {
        let pw = self.powers(f, pt);
        let mut acc = f.zero();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (i, &k) in e.iter().enumerate() {
                if k > 0 {
                    t = f.mul(&t, &pw[i][k as usize]);
                }
            }
            acc = f.add(&acc, &t);
        }
        acc
    }

    /// Binary form `g(s,t) = P(s*a + t*b)` for a homogeneous `P` of degree
    /// `d`: coefficient `k` multiplies `s^(d-k) t^k`.
    pub fn restrict_to_line(&self, f: &F, a: &[F::El], b: &[F::El]) -> Vec<F::El> {
        let d = self.degree();
        // powers of the linear forms a_i s + b_i t, as dense binary forms
        let lin_pows: Vec<Vec<Vec<F::El>>> = a
            .iter()
            .zip(b)
            .map(|(ai, bi)| {
                let mut out = vec![vec![f.one()]];
                for _ in 0..self.max_exp {
                    let prev = out.last().expect("nonempty");
                    let mut next = vec![f.zero(); prev.len() + 1];
                    for (k, c) in prev.iter().enumerate() {
                        next[k] = f.add(&next[k], &f.mul(c, ai));
                        next[k + 1] = f.add(&next[k + 1], &f.mul(c, bi));
                    }
                    out.push(next);
                }
                out
            })
            .collect();
        let mut acc = vec![f.zero(); d + 1];
        for (e, c) in &self.terms {
            let mut prod = vec![c.clone()];
            for (i, &k) in e.iter().enumerate() {
                if k == 0 {
                    continue;
                }
                let factor = &lin_pows[i][k as usize];
                let mut next = vec![f.zero(); prod.len() + factor.len() - 1];
                for (x, px) in prod.iter().enumerate() {
                    if f.is_zero(px) {
                        continue;
                    }
                    for (y, fy) in factor.iter().enumerate() {
                        next[x + y] = f.add(&next[x + y], &f.mul(px, fy));
                    }
                }
                prod = next;
            }
            for (k, v) in prod.into_iter().enumerate() {
                acc[k] = f.add(&acc[k], &v);
            }
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Zp;
    use crate::matrix::pfaffian;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn x(field: &Field, n: usize, i: usize) -> MultiPoly {
        MultiPoly::var(field, n, i)
    }

    fn random_homogeneous(field: &Field, n: usize, d: usize, rng: &mut ChaCha8Rng) -> MultiPoly {
        let mut p = MultiPoly::zero(field, n);
        for m in monomials_of_degree(n, d) {
            if rng.gen_bool(0.5) {
                p.add_term(m, field.random(rng)).unwrap();
            }
        }
        p
    }

    #[test]
    fn difference_of_squares() {
        let f = Field::Rational;
        let (a, b) = (x(&f, 2, 0), x(&f, 2, 1));
        let prod = a.add(&b).unwrap().mul(&a.sub(&b).unwrap()).unwrap();
        assert_eq!(prod.to_text(), "1*x0^2 - 1*x1^2");
        assert_eq!(exact_divide(&prod, &a.sub(&b).unwrap()).unwrap(), a.add(&b).unwrap());
    }

    #[test]
    fn derivative_of_cube() {
        let f = Field::Rational;
        let c = x(&f, 1, 0).pow(3).unwrap();
        assert_eq!(c.partial(0).unwrap().to_text(), "3*x0^2");
    }

    #[test]
    fn division_with_remainder_fails() {
        let f = Field::Prime(7);
        let num = x(&f, 3, 0).mul(&x(&f, 3, 1)).unwrap();
        assert_eq!(exact_divide(&num, &x(&f, 3, 2)), Err(Error::NonzeroRemainder));
    }

    #[test]
    fn multiply_then_divide_round_trip() {
        let f = Field::Prime(32003);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..10 {
            let q = random_homogeneous(&f, 6, 4, &mut rng);
            let prod = q.mul(&x(&f, 6, 3)).unwrap();
            assert_eq!(exact_divide(&prod, &x(&f, 6, 3)).unwrap(), q);
        }
    }

    #[test]
    fn evaluation_ignores_insertion_order() {
        let f = Field::Prime(7);
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let mut terms: Vec<(Vec<u16>, FieldElement)> = monomials_of_degree(6, 4)
            .into_iter()
            .map(|m| (m.0, f.random(&mut rng)))
            .collect();
        let p1 = MultiPoly::from_terms(&f, 6, terms.clone()).unwrap();
        terms.reverse();
        let p2 = MultiPoly::from_terms(&f, 6, terms).unwrap();
        let pt: Vec<FieldElement> = (0..6).map(|_| f.random(&mut rng)).collect();
        assert_eq!(p1.evaluate(&pt).unwrap(), p2.evaluate(&pt).unwrap());
    }

    #[test]
    fn text_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for f in [Field::Rational, Field::Prime(11), Field::extension(3, 2).unwrap()] {
            let p = random_homogeneous(&f, 4, 3, &mut rng);
            let back = MultiPoly::parse(&f, 4, &p.to_text()).unwrap();
            assert_eq!(back, p);
        }
        let q = MultiPoly::parse(&Field::Rational, 2, "-3/2*x0^2 + x0*x1 - 5").unwrap();
        assert_eq!(q.to_text(), "-3/2*x0^2 + 1*x0*x1 - 5");
    }

    #[test]
    fn monomial_listing_is_descending_graded_lex() {
        let ms = monomials_of_degree(3, 2);
        assert_eq!(ms.len(), 6);
        assert!(ms.windows(2).all(|w| w[0] > w[1]));
        assert_eq!(ms[0].0, vec![2, 0, 0]);
        assert_eq!(monomial_count(6, 3), 56);
    }

    fn block_net(f: &Field) -> SkewPolyMatrix {
        let n = 3;
        let mut e = vec![vec![MultiPoly::zero(f, n); 6]; 6];
        for b in 0..3 {
            e[2 * b][2 * b + 1] = x(f, n, b);
            e[2 * b + 1][2 * b] = x(f, n, b).neg();
        }
        SkewPolyMatrix::new(e).unwrap()
    }

    #[test]
    fn block_pfaffian_is_product_of_variables() {
        let f = Field::Rational;
        let pf = pfaffian_poly(&block_net(&f)).unwrap();
        assert_eq!(pf.to_text(), "1*x0*x1*x2");
        let zero = SkewPolyMatrix::new(vec![vec![MultiPoly::zero(&f, 2); 4]; 4]).unwrap();
        assert!(pfaffian_poly(&zero).unwrap().is_zero());
    }

    fn random_linear_skew(f: &Field, n: usize, size: usize, rng: &mut ChaCha8Rng) -> SkewPolyMatrix {
        let mut e = vec![vec![MultiPoly::zero(f, n); size]; size];
        for i in 0..size {
            for j in i + 1..size {
                let coeffs: Vec<FieldElement> = (0..n).map(|_| f.random(rng)).collect();
                let l = MultiPoly::linear(f, &coeffs).unwrap();
                e[j][i] = l.neg();
                e[i][j] = l;
            }
        }
        SkewPolyMatrix::new(e).unwrap()
    }

    #[test]
    fn pfaffian_commutes_with_evaluation() {
        let f = Field::Prime(32003);
        let zp = Zp::new(32003).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let m = random_linear_skew(&f, 5, 6, &mut rng);
        let pf = pfaffian_poly(&m).unwrap();
        assert_eq!(pf.homogeneous_degree().unwrap(), Some(3));
        for _ in 0..100 {
            let pt: Vec<FieldElement> = (0..5).map(|_| f.random(&mut rng)).collect();
            let scalar = m.evaluate(&pt).unwrap();
            let typed = scalar.typed(&zp).unwrap();
            assert_eq!(pf.evaluate(&pt).unwrap(), zp.lift(&pfaffian(&zp, &typed)));
        }
    }

    #[test]
    fn pfaffian_squares_to_determinant() {
        let f = Field::Prime(101);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for size in [4, 6] {
            let m = random_linear_skew(&f, 3, size, &mut rng);
            let pf = pfaffian_poly(&m).unwrap();
            assert_eq!(pf.mul(&pf).unwrap(), m.determinant().unwrap());
        }
    }

    #[test]
    fn inhomogeneous_entries_rejected() {
        let f = Field::Rational;
        let mut e = vec![vec![MultiPoly::zero(&f, 2); 2]; 2];
        let p = x(&f, 2, 0).add(&x(&f, 2, 1).pow(2).unwrap()).unwrap();
        e[0][1] = p.clone();
        e[1][0] = p.neg();
        let m = SkewPolyMatrix::new(e).unwrap();
        assert_eq!(pfaffian_poly(&m), Err(Error::NotHomogeneous));
    }

    #[test]
    fn line_restriction_matches_pointwise_evaluation() {
        let f = Field::Prime(13);
        let zp = Zp::new(13).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let p = random_homogeneous(&f, 4, 3, &mut rng);
        let c = CompiledPoly::new(&zp, &p).unwrap();
        let a: Vec<u32> = (0..4).map(|_| rng.gen_range(0..13)).collect();
        let b: Vec<u32> = (0..4).map(|_| rng.gen_range(0..13)).collect();
        let g = c.restrict_to_line(&zp, &a, &b);
        for (s, t) in [(1u32, 0u32), (0, 1), (2, 5), (7, 11)] {
            let pt: Vec<u32> = a.iter().zip(&b).map(|(x, y)| (s * x + t * y) % 13).collect();
            let mut val = 0u32;
            for (k, gk) in g.iter().enumerate() {
                let term = zp.mul(gk, &zp.mul(&zp.pow(&s, (3 - k) as u64), &zp.pow(&t, k as u64)));
                val = zp.add(&val, &term);
            }
            assert_eq!(val, c.eval(&zp, &pt));
        }
    }
}
