//! Dense exact matrices over a single field kind, with rank, kernel,
//! determinant and Pfaffian.

use std::fmt;

use crate::error::{Error, Result};
use crate::field::{mismatch, Field, FieldElement, FieldOps};
use crate::linalg;
use crate::with_field_ops;

pub const MAX_PFAFFIAN_SIZE: usize = 12;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExactMatrix {
    rows: usize,
    cols: usize,
    field: Field,
    data: Vec<FieldElement>,
}

impl ExactMatrix {
    pub fn zeros(field: &Field, rows: usize, cols: usize) -> Self {
        ExactMatrix { rows, cols, field: field.clone(), data: vec![field.zero(); rows * cols] }
    }

    pub fn identity(field: &Field, n: usize) -> Self {
        let mut m = Self::zeros(field, n, n);
        for i in 0..n {
            m.data[i * n + i] = field.one();
        }
        m
    }

    /// Build from row-major entries; every entry must belong to `field`.
    pub fn new(field: &Field, rows: usize, cols: usize, data: Vec<FieldElement>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        if let Some(bad) = data.iter().find(|x| x.field() != *field) {
            return Err(mismatch(field, &bad.field()));
        }
        Ok(ExactMatrix { rows, cols, field: field.clone(), data })
    }

    pub fn from_rows(field: &Field, rows: Vec<Vec<FieldElement>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::DimensionMismatch("ragged rows".into()));
        }
        Self::new(field, r, c, rows.into_iter().flatten().collect())
    }

    pub fn from_i64(field: &Field, rows: &[Vec<i64>]) -> Result<Self> {
        Self::from_rows(
            field,
            rows.iter().map(|r| r.iter().map(|&x| field.from_i64(x)).collect()).collect(),
        )
    }

    pub fn rows(&self) -> usize {
        self.rows
    }
    pub fn cols(&self) -> usize {
        self.cols
    }
    pub fn field(&self) -> &Field {
        &self.field
    }
    pub fn get(&self, i: usize, j: usize) -> &FieldElement {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, x: FieldElement) -> Result<()> {
        if x.field() != self.field {
            return Err(mismatch(&self.field, &x.field()));
        }
        self.data[i * self.cols + j] = x;
        Ok(())
    }

    pub fn row(&self, i: usize) -> &[FieldElement] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<FieldElement>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut data = Vec::with_capacity(self.data.len());
        for j in 0..self.cols {
            for i in 0..self.rows {
                data.push(self.get(i, j).clone());
            }
        }
        ExactMatrix { rows: self.cols, cols: self.rows, field: self.field.clone(), data }
    }

    pub fn mul(&self, other: &ExactMatrix) -> Result<Self> {
        if self.field != other.field {
            return Err(mismatch(&self.field, &other.field));
        }
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        with_field_ops!(&self.field, f => {
            let a = self.typed(f)?;
            let b = other.typed(f)?;
            let c = linalg::mat_mul(f, &a, &b, other.cols);
            Ok(Self::from_typed(f, self.rows, other.cols, &c))
        })
    }

    pub fn mul_vec(&self, v: &[FieldElement]) -> Result<Vec<FieldElement>> {
        if v.len() != self.cols {
            return Err(Error::DimensionMismatch("vector length".into()));
        }
        with_field_ops!(&self.field, f => {
            let a = self.typed(f)?;
            let x = v.iter().map(|e| f.lower(e)).collect::<Result<Vec<_>>>()?;
            Ok(linalg::mat_vec(f, &a, &x).iter().map(|e| f.lift(e)).collect())
        })
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(FieldElement::is_zero)
    }

    pub fn is_skew(&self) -> bool {
        self.rows == self.cols
            && (0..self.rows).all(|i| {
                self.get(i, i).is_zero()
                    && (i + 1..self.cols).all(|j| *self.get(i, j) == self.get(j, i).neg())
            })
    }

    /// Typed rows for the statically dispatched kernels.
    pub fn typed<F: FieldOps>(&self, f: &F) -> Result<Vec<Vec<F::El>>> {
        (0..self.rows)
            .map(|i| self.row(i).iter().map(|e| f.lower(e)).collect())
            .collect()
    }

    pub fn from_typed<F: FieldOps>(f: &F, rows: usize, cols: usize, m: &[Vec<F::El>]) -> Self {
        let data = m.iter().flat_map(|r| r.iter().map(|e| f.lift(e))).collect();
        ExactMatrix { rows, cols, field: f.descriptor(), data }
    }

    /// Rank and a right-kernel basis. The basis is the canonical one read off
    /// the reduced row-echelon form: one vector per free column, with a 1 in
    /// that column, so it is in reduced column-echelon form and independent
    /// of any pivoting choices.
    pub fn rank_kernel(&self) -> (usize, Vec<Vec<FieldElement>>) {
        match &self.field {
            Field::Prime(p) => {
                let f = crate::field::Zp::new_unchecked(*p);
                let rows = self.typed(&f).expect("homogeneous field");
                let r = linalg::Rref::from_rows(*p, self.cols, rows);
                let ker = r
                    .kernel_basis()
                    .into_iter()
                    .map(|v| v.iter().map(|e| f.lift(e)).collect())
                    .collect();
                (r.rank(), ker)
            }
            Field::Rational => {
                let f = crate::field::Qq;
                let rows = self.typed(&f).expect("homogeneous field");
                let (rref, piv) = linalg::rref_rational(&rows, self.cols);
                let ker = linalg::kernel_from_rref(&f, &rref, &piv, self.cols)
                    .into_iter()
                    .map(|v| v.iter().map(|e| f.lift(e)).collect())
                    .collect();
                (piv.len(), ker)
            }
            Field::Extension(f) => {
                let rows = self.typed(f).expect("homogeneous field");
                let ker = linalg::kernel(f, &rows, self.cols);
                let rank = self.cols - ker.len();
                (rank, ker.into_iter().map(|v| v.iter().map(|e| f.lift(e)).collect()).collect())
            }
        }
    }

    pub fn rank(&self) -> usize {
        self.rank_kernel().0
    }

    pub fn det(&self) -> Result<FieldElement> {
        if self.rows != self.cols {
            return Err(Error::DimensionMismatch("determinant of a non-square matrix".into()));
        }
        with_field_ops!(&self.field, f => Ok(f.lift(&linalg::det(f, &self.typed(f)?))))
    }

    pub fn pfaffian(&self) -> Result<FieldElement> {
        pfaffian_scalar(self)
    }
}

impl fmt::Display for ExactMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(|x| x.to_string()).collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

/// Pfaffian of a skew-symmetric matrix of even size at most 12, by
/// expansion along the first row.
pub fn pfaffian_scalar(m: &ExactMatrix) -> Result<FieldElement> {
    if m.rows != m.cols {
        return Err(Error::DimensionMismatch("Pfaffian of a non-square matrix".into()));
    }
    if m.rows % 2 == 1 {
        return Err(Error::OddSize(m.rows));
    }
    if m.rows > MAX_PFAFFIAN_SIZE {
        return Err(Error::TooLarge { size: m.rows, max: MAX_PFAFFIAN_SIZE });
    }
    if !m.is_skew() {
        return Err(Error::NotSkew);
    }
    with_field_ops!(&m.field, f => Ok(f.lift(&pfaffian(f, &m.typed(f)?))))
}

/// Pfaffian of a typed skew matrix (skewness not checked).
pub fn pfaffian<F: FieldOps>(f: &F, m: &[Vec<F::El>]) -> F::El {
    let idx: Vec<usize> = (0..m.len()).collect();
    pf_rec(f, m, &idx)
}

fn pf_rec<F: FieldOps>(f: &F, m: &[Vec<F::El>], idx: &[usize]) -> F::El {
    match idx.len() {
        0 => return f.one(),
        2 => return m[idx[0]][idx[1]].clone(),
        _ => {}
    }
    let first = idx[0];
    let mut acc = f.zero();
    let mut rest: Vec<usize> = Vec::with_capacity(idx.len() - 2);
    for j in 1..idx.len() {
        let a = &m[first][idx[j]];
        if f.is_zero(a) {
            continue;
        }
        rest.clear();
        rest.extend(idx[1..].iter().enumerate().filter(|&(k, _)| k + 1 != j).map(|(_, &x)| x));
        let term = f.mul(a, &pf_rec(f, m, &rest));
        acc = if j % 2 == 1 { f.add(&acc, &term) } else { f.sub(&acc, &term) };
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Zp;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_skew<F: FieldOps>(f: &F, n: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<F::El>> {
        let mut m = vec![vec![f.zero(); n]; n];
        for i in 0..n {
            for j in i + 1..n {
                let x = f.random(rng);
                m[j][i] = f.neg(&x);
                m[i][j] = x;
            }
        }
        m
    }

    /// Signed sum over perfect matchings, sign from the crossing number.
    fn matching_oracle<F: FieldOps>(f: &F, m: &[Vec<F::El>]) -> F::El {
        fn go<F: FieldOps>(
            f: &F,
            m: &[Vec<F::El>],
            free: Vec<usize>,
            pairs: &mut Vec<(usize, usize)>,
            acc: &mut F::El,
        ) {
            if free.is_empty() {
                let mut crossings = 0;
                for (a, &(i, j)) in pairs.iter().enumerate() {
                    for &(k, l) in &pairs[a + 1..] {
                        if (i < k && k < j && j < l) || (k < i && i < l && l < j) {
                            crossings += 1;
                        }
                    }
                }
                let prod = pairs.iter().fold(f.one(), |acc, &(i, j)| f.mul(&acc, &m[i][j]));
                *acc = if crossings % 2 == 0 { f.add(acc, &prod) } else { f.sub(acc, &prod) };
                return;
            }
            let i = free[0];
            for k in 1..free.len() {
                let j = free[k];
                let rest: Vec<usize> =
                    free.iter().copied().filter(|&x| x != i && x != j).collect();
                pairs.push((i, j));
                go(f, m, rest, pairs, acc);
                pairs.pop();
            }
        }
        let mut acc = f.zero();
        go(f, m, (0..m.len()).collect(), &mut Vec::new(), &mut acc);
        acc
    }

    #[test]
    fn block_diagonal_pfaffian_is_one() {
        let f = Field::Prime(7);
        let mut rows = vec![vec![0i64; 6]; 6];
        for b in 0..3 {
            rows[2 * b][2 * b + 1] = 1;
            rows[2 * b + 1][2 * b] = -1;
        }
        let m = ExactMatrix::from_i64(&f, &rows).unwrap();
        assert!(m.pfaffian().unwrap().is_one());
        assert!(ExactMatrix::zeros(&f, 6, 6).pfaffian().unwrap().is_zero());
    }

    #[test]
    fn pfaffian_matches_perfect_matching_expansion() {
        let f = Zp::new(32003).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for n in [2, 4, 6, 8] {
            for _ in 0..20 {
                let m = random_skew(&f, n, &mut rng);
                assert_eq!(pfaffian(&f, &m), matching_oracle(&f, &m));
            }
        }
    }

    #[test]
    fn pfaffian_rejects_bad_shapes() {
        let f = Field::Rational;
        assert_eq!(ExactMatrix::zeros(&f, 3, 3).pfaffian(), Err(Error::OddSize(3)));
        let m = ExactMatrix::from_i64(&f, &[vec![0, 1], vec![1, 0]]).unwrap();
        assert_eq!(m.pfaffian(), Err(Error::NotSkew));
        assert!(matches!(ExactMatrix::zeros(&f, 14, 14).pfaffian(), Err(Error::TooLarge { .. })));
    }

    #[test]
    fn trivial_rank_kernel_cases() {
        let f = Field::Prime(7);
        let (r, k) = ExactMatrix::identity(&f, 6).rank_kernel();
        assert_eq!((r, k.len()), (6, 0));
        let (r, k) = ExactMatrix::zeros(&Field::Rational, 4, 5).rank_kernel();
        assert_eq!(r, 0);
        for (i, v) in k.iter().enumerate() {
            for (j, x) in v.iter().enumerate() {
                assert_eq!(x.is_one(), i == j);
                assert_eq!(x.is_zero(), i != j);
            }
        }
    }

    #[test]
    fn rational_rank_kernel_multiplies_back_to_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(40);
        let f = Field::Rational;
        let rows: Vec<Vec<i64>> =
            (0..40).map(|_| (0..60).map(|_| rng.gen_range(-9..=9)).collect()).collect();
        let m = ExactMatrix::from_i64(&f, &rows).unwrap();
        let (r, ker) = m.rank_kernel();
        assert_eq!(r + ker.len(), 60);
        for v in &ker {
            assert!(m.mul_vec(v).unwrap().iter().all(FieldElement::is_zero));
        }
    }

    #[test]
    fn extension_field_kernel() {
        let f = Field::extension(3, 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let rows: Vec<Vec<FieldElement>> =
            (0..4).map(|_| (0..7).map(|_| f.random(&mut rng)).collect()).collect();
        let m = ExactMatrix::from_rows(&f, rows).unwrap();
        let (r, ker) = m.rank_kernel();
        assert_eq!(r + ker.len(), 7);
        for v in &ker {
            assert!(m.mul_vec(v).unwrap().iter().all(FieldElement::is_zero));
        }
    }

    #[test]
    fn mixed_fields_are_rejected() {
        let f = Field::Prime(5);
        let data = vec![f.one(), Field::Prime(7).one()];
        assert!(matches!(ExactMatrix::new(&f, 1, 2, data), Err(Error::FieldMismatch { .. })));
    }
}
