//! Dense exact elimination.
//!
//! [`EchelonBasis`] is the prime-field workhorse: rows are inserted one at a
//! time, reduced against the current basis with delayed modular reduction,
//! and kept sorted by pivot column. The generic functions work over any
//! [`FieldOps`] and are used for the small matrices of the pointwise checks.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::field::{inv_mod, FieldOps, Qq};

/// Row-echelon basis of a subspace of GF(p)^ncols.
#[derive(Clone, Debug)]
pub struct EchelonBasis {
    p: u32,
    ncols: usize,
    rows: Vec<Vec<u32>>,
    pivots: Vec<usize>,
    lim: u64,
}

impl EchelonBasis {
    pub fn new(p: u32, ncols: usize) -> Self {
        let pm = (p as u64 - 1).max(1);
        let lim = ((u64::MAX - p as u64) / (pm * pm)).max(1);
        EchelonBasis { p, ncols, rows: Vec::new(), pivots: Vec::new(), lim }
    }

    pub fn p(&self) -> u32 {
        self.p
    }
    pub fn ncols(&self) -> usize {
        self.ncols
    }
    pub fn rank(&self) -> usize {
        self.rows.len()
    }
    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }
    pub fn rows(&self) -> &[Vec<u32>] {
        &self.rows
    }
    pub fn is_full(&self) -> bool {
        self.rows.len() == self.ncols
    }

    /// Reduce `v` against the basis; the result vanishes on every pivot column.
    pub fn reduce(&self, v: &[u32]) -> Vec<u32> {
        let p = self.p as u64;
        let mut acc: Vec<u64> = v.iter().map(|&x| x as u64).collect();
        let mut pending = 0u64;
        for (row, &piv) in self.rows.iter().zip(&self.pivots) {
            let c = acc[piv] % p;
            if c == 0 {
                continue;
            }
            let m = p - c;
            for (a, &r) in acc[piv..].iter_mut().zip(&row[piv..]) {
                *a += m * r as u64;
            }
            pending += 1;
            if pending >= self.lim {
                for a in acc[piv..].iter_mut() {
                    *a %= p;
                }
                pending = 0;
            }
        }
        acc.into_iter().map(|a| (a % p) as u32).collect()
    }

    /// Insert a row; returns whether the rank increased.
    pub fn insert(&mut self, v: &[u32]) -> bool {
        debug_assert_eq!(v.len(), self.ncols);
        if self.is_full() {
            return false;
        }
        let mut r = self.reduce(v);
        let Some(piv) = r.iter().position(|&x| x != 0) else {
            return false;
        };
        let inv = inv_mod(r[piv] as u64, self.p as u64).expect("nonzero") ;
        if inv != 1 {
            for x in r[piv..].iter_mut() {
                *x = ((*x as u64 * inv) % self.p as u64) as u32;
            }
        }
        let pos = self.pivots.partition_point(|&c| c < piv);
        self.pivots.insert(pos, piv);
        self.rows.insert(pos, r);
        true
    }

    pub fn contains(&self, v: &[u32]) -> bool {
        self.reduce(v).iter().all(|&x| x == 0)
    }

    /// Back-substitute to reduced row-echelon form.
    pub fn into_rref(mut self) -> Rref {
        let p = self.p as u64;
        for i in (0..self.rows.len()).rev() {
            let piv = self.pivots[i];
            let (upper, lower) = self.rows.split_at_mut(i);
            let pivot_row = &lower[0];
            for row in upper.iter_mut() {
                let c = row[piv] as u64;
                if c == 0 {
                    continue;
                }
                let m = p - c;
                for (a, &r) in row[piv..].iter_mut().zip(&pivot_row[piv..]) {
                    *a = ((*a as u64 + m * r as u64) % p) as u32;
                }
            }
        }
        Rref { p: self.p, ncols: self.ncols, rows: self.rows, pivots: self.pivots }
    }
}

/// Reduced row-echelon form over GF(p).
#[derive(Clone, Debug)]
pub struct Rref {
    pub p: u32,
    pub ncols: usize,
    pub rows: Vec<Vec<u32>>,
    pub pivots: Vec<usize>,
}

impl Rref {
    pub fn from_rows(p: u32, ncols: usize, rows: impl IntoIterator<Item = Vec<u32>>) -> Rref {
        let mut b = EchelonBasis::new(p, ncols);
        for r in rows {
            b.insert(&r);
        }
        b.into_rref()
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn free_columns(&self) -> Vec<usize> {
        let mut is_piv = vec![false; self.ncols];
        for &c in &self.pivots {
            is_piv[c] = true;
        }
        (0..self.ncols).filter(|&c| !is_piv[c]).collect()
    }

    /// Kernel basis: one vector per free column, 1 there and `-R[r][f]` at
    /// the pivot of row r.
    pub fn kernel_basis(&self) -> Vec<Vec<u32>> {
        let p = self.p;
        self.free_columns()
            .into_iter()
            .map(|f| {
                let mut v = vec![0u32; self.ncols];
                v[f] = 1;
                for (row, &piv) in self.rows.iter().zip(&self.pivots) {
                    let x = row[f];
                    if x != 0 {
                        v[piv] = p - x;
                    }
                }
                v
            })
            .collect()
    }
}

pub fn rank_mod_p(p: u32, ncols: usize, rows: &[Vec<u32>]) -> usize {
    let mut b = EchelonBasis::new(p, ncols);
    for r in rows {
        b.insert(r);
    }
    b.rank()
}

// ---------------------------------------------------------------------------
// Generic elimination

/// In-place reduction to reduced row-echelon form. Zero rows are dropped;
/// returns the pivot columns.
pub fn rref<F: FieldOps>(f: &F, m: &mut Vec<Vec<F::El>>, ncols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r == m.len() {
            break;
        }
        let Some(k) = (r..m.len()).find(|&k| !f.is_zero(&m[k][c])) else {
            continue;
        };
        m.swap(r, k);
        let inv = f.inv(&m[r][c]).expect("nonzero pivot");
        for x in m[r][c..].iter_mut() {
            *x = f.mul(x, &inv);
        }
        let pivot_row = m[r].clone();
        for (k, row) in m.iter_mut().enumerate() {
            if k == r || f.is_zero(&row[c]) {
                continue;
            }
            let factor = row[c].clone();
            for (x, y) in row[c..].iter_mut().zip(&pivot_row[c..]) {
                *x = f.sub(x, &f.mul(&factor, y));
            }
        }
        pivots.push(c);
        r += 1;
    }
    m.truncate(r);
    pivots
}

pub fn rank<F: FieldOps>(f: &F, m: &[Vec<F::El>], ncols: usize) -> usize {
    let mut work = m.to_vec();
    rref(f, &mut work, ncols).len()
}

/// Kernel basis from a reduced row-echelon form.
pub fn kernel_from_rref<F: FieldOps>(
    f: &F,
    rows: &[Vec<F::El>],
    pivots: &[usize],
    ncols: usize,
) -> Vec<Vec<F::El>> {
    let mut is_piv = vec![false; ncols];
    for &c in pivots {
        is_piv[c] = true;
    }
    (0..ncols)
        .filter(|&c| !is_piv[c])
        .map(|free| {
            let mut v = vec![f.zero(); ncols];
            v[free] = f.one();
            for (row, &piv) in rows.iter().zip(pivots) {
                v[piv] = f.neg(&row[free]);
            }
            v
        })
        .collect()
}

/// Right kernel basis in reduced column-echelon form.
pub fn kernel<F: FieldOps>(f: &F, m: &[Vec<F::El>], ncols: usize) -> Vec<Vec<F::El>> {
    let mut work = m.to_vec();
    let pivots = rref(f, &mut work, ncols);
    kernel_from_rref(f, &work, &pivots, ncols)
}

pub fn transpose<T: Clone>(m: &[Vec<T>], ncols: usize) -> Vec<Vec<T>> {
    (0..ncols).map(|j| m.iter().map(|row| row[j].clone()).collect()).collect()
}

/// Left kernel: vectors `y` with `y^T m = 0`.
pub fn left_kernel<F: FieldOps>(f: &F, m: &[Vec<F::El>], ncols: usize) -> Vec<Vec<F::El>> {
    let t = transpose(m, ncols);
    kernel(f, &t, m.len())
}

/// Reduced row-echelon basis of the row space.
pub fn row_space<F: FieldOps>(f: &F, m: &[Vec<F::El>], ncols: usize) -> Vec<Vec<F::El>> {
    let mut work = m.to_vec();
    rref(f, &mut work, ncols);
    work
}

pub fn det<F: FieldOps>(f: &F, m: &[Vec<F::El>]) -> F::El {
    let n = m.len();
    let mut a = m.to_vec();
    let mut d = f.one();
    for c in 0..n {
        let Some(k) = (c..n).find(|&k| !f.is_zero(&a[k][c])) else {
            return f.zero();
        };
        if k != c {
            a.swap(k, c);
            d = f.neg(&d);
        }
        d = f.mul(&d, &a[c][c]);
        let inv = f.inv(&a[c][c]).expect("nonzero");
        for r in c + 1..n {
            if f.is_zero(&a[r][c]) {
                continue;
            }
            let factor = f.mul(&a[r][c], &inv);
            let (top, bottom) = a.split_at_mut(r);
            for (x, y) in bottom[0][c..].iter_mut().zip(&top[c][c..]) {
                *x = f.sub(x, &f.mul(&factor, y));
            }
        }
    }
    d
}

pub fn mat_vec<F: FieldOps>(f: &F, m: &[Vec<F::El>], v: &[F::El]) -> Vec<F::El> {
    m.iter()
        .map(|row| {
            row.iter().zip(v).fold(f.zero(), |acc, (a, b)| f.add(&acc, &f.mul(a, b)))
        })
        .collect()
}

pub fn mat_mul<F: FieldOps>(f: &F, a: &[Vec<F::El>], b: &[Vec<F::El>], bcols: usize) -> Vec<Vec<F::El>> {
    a.iter()
        .map(|row| {
            (0..bcols)
                .map(|j| {
                    row.iter()
                        .zip(b)
                        .fold(f.zero(), |acc, (x, brow)| f.add(&acc, &f.mul(x, &brow[j])))
                })
                .collect()
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Fraction-free elimination over the rationals

/// Bareiss elimination of an integer matrix. Returns the row-echelon form
/// (rows beyond the rank dropped) and its pivot columns. Entries stay
/// integral: every division is exact.
pub fn bareiss(mut a: Vec<Vec<BigInt>>, ncols: usize) -> (Vec<Vec<BigInt>>, Vec<usize>) {
    let nrows = a.len();
    let mut prev = BigInt::one();
    let mut r = 0;
    let mut pivots = Vec::new();
    for c in 0..ncols {
        if r == nrows {
            break;
        }
        let Some(k) = (r..nrows).find(|&k| !a[k][c].is_zero()) else {
            continue;
        };
        a.swap(r, k);
        let (top, bottom) = a.split_at_mut(r + 1);
        let pr = &top[r];
        for row in bottom.iter_mut() {
            let lead = row[c].clone();
            for j in c..ncols {
                let v = &pr[c] * &row[j] - &lead * &pr[j];
                row[j] = v / &prev;
            }
            for x in row[..c].iter_mut() {
                x.set_zero();
            }
        }
        prev = a[r][c].clone();
        pivots.push(c);
        r += 1;
    }
    a.truncate(r);
    (a, pivots)
}

/// Clear denominators row by row.
pub fn integer_rows(m: &[Vec<BigRational>]) -> Vec<Vec<BigInt>> {
    m.iter()
        .map(|row| {
            let l = row.iter().fold(BigInt::one(), |acc, q| {
                num_integer::Integer::lcm(&acc, q.denom())
            });
            row.iter().map(|q| q.numer() * (&l / q.denom())).collect()
        })
        .collect()
}

/// Rational RREF via Bareiss echelon form followed by back-substitution.
pub fn rref_rational(m: &[Vec<BigRational>], ncols: usize) -> (Vec<Vec<BigRational>>, Vec<usize>) {
    let (ech, pivots) = bareiss(integer_rows(m), ncols);
    let mut rows: Vec<Vec<BigRational>> = ech
        .into_iter()
        .map(|r| r.into_iter().map(BigRational::from_integer).collect())
        .collect();
    let q = Qq;
    for i in (0..rows.len()).rev() {
        let c = pivots[i];
        let inv = q.inv(&rows[i][c]).expect("nonzero pivot");
        for x in rows[i][c..].iter_mut() {
            *x = &*x * &inv;
        }
        let (upper, lower) = rows.split_at_mut(i);
        for row in upper.iter_mut() {
            if row[c].is_zero() {
                continue;
            }
            let factor = row[c].clone();
            for (x, y) in row[c..].iter_mut().zip(&lower[0][c..]) {
                *x = &*x - &factor * y;
            }
        }
    }
    (rows, pivots)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Zp;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn echelon_basis_matches_generic_rref() {
        let p = 101u32;
        let f = Zp::new(p as u64).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for trial in 0..20 {
            let (r, c) = (rng.gen_range(1..15), rng.gen_range(1..15));
            let low_rank = trial % 2 == 0;
            let m: Vec<Vec<u32>> = if low_rank {
                let k = rng.gen_range(0..4);
                let a: Vec<Vec<u32>> = (0..r).map(|_| (0..k).map(|_| rng.gen_range(0..p)).collect()).collect();
                let b: Vec<Vec<u32>> = (0..k).map(|_| (0..c).map(|_| rng.gen_range(0..p)).collect()).collect();
                if k == 0 { vec![vec![0; c]; r] } else { mat_mul(&f, &a, &b, c) }
            } else {
                (0..r).map(|_| (0..c).map(|_| rng.gen_range(0..p)).collect()).collect()
            };
            let fast = Rref::from_rows(p, c, m.clone());
            let mut slow = m.clone();
            let piv = rref(&f, &mut slow, c);
            assert_eq!(fast.pivots, piv);
            assert_eq!(fast.rows, slow);
            for v in fast.kernel_basis() {
                assert!(mat_vec(&f, &m, &v).iter().all(|&x| x == 0));
            }
            assert_eq!(fast.rank() + fast.kernel_basis().len(), c);
        }
    }

    #[test]
    fn delayed_reduction_survives_large_primes() {
        let p = 2147483647u32;
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let n = 12;
        let m: Vec<Vec<u32>> = (0..n).map(|_| (0..n).map(|_| rng.gen_range(0..p)).collect()).collect();
        let fast = Rref::from_rows(p, n, m.clone());
        let f = Zp::new(p as u64).unwrap();
        let mut slow = m;
        rref(&f, &mut slow, n);
        assert_eq!(fast.rows, slow);
    }

    #[test]
    fn bareiss_rank_matches_modular_rank() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let m: Vec<Vec<BigRational>> = (0..8)
            .map(|i| {
                (0..10)
                    .map(|j| {
                        let v = if i >= 6 { (i as i64) * (j as i64) } else { rng.gen_range(-9..=9) };
                        BigRational::from_integer(BigInt::from(v))
                    })
                    .collect()
            })
            .collect();
        let (rows, piv) = rref_rational(&m, 10);
        // rows 6 and 7 are proportional
        assert_eq!(rows.len(), 7);
        for (r, &c) in rows.iter().zip(&piv) {
            assert!(r[c].is_one());
        }
    }

    #[test]
    fn determinant_of_triangular() {
        let f = Zp::new(7).unwrap();
        let m = vec![vec![2, 5, 1], vec![0, 3, 4], vec![0, 0, 6]];
        assert_eq!(det(&f, &m), (2 * 3 * 6) % 7);
        let swapped = vec![m[1].clone(), m[0].clone(), m[2].clone()];
        assert_eq!(det(&f, &swapped), f.neg(&((2 * 3 * 6) % 7)));
    }
}
