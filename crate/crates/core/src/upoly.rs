//! Dense univariate polynomials over a typed field, constant term first.

use rand::Rng;

use crate::field::FieldOps;

pub fn trim<F: FieldOps>(f: &F, mut a: Vec<F::El>) -> Vec<F::El> {
    while a.last().is_some_and(|c| f.is_zero(c)) {
        a.pop();
    }
    a
}

pub fn degree<F: FieldOps>(f: &F, a: &[F::El]) -> Option<usize> {
    a.iter().rposition(|c| !f.is_zero(c))
}

pub fn add<F: FieldOps>(f: &F, a: &[F::El], b: &[F::El]) -> Vec<F::El> {
    let n = a.len().max(b.len());
    let z = f.zero();
    let out = (0..n).map(|i| f.add(a.get(i).unwrap_or(&z), b.get(i).unwrap_or(&z))).collect();
    trim(f, out)
}

pub fn sub<F: FieldOps>(f: &F, a: &[F::El], b: &[F::El]) -> Vec<F::El> {
    let n = a.len().max(b.len());
    let z = f.zero();
    let out = (0..n).map(|i| f.sub(a.get(i).unwrap_or(&z), b.get(i).unwrap_or(&z))).collect();
    trim(f, out)
}

pub fn mul<F: FieldOps>(f: &F, a: &[F::El], b: &[F::El]) -> Vec<F::El> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![f.zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if f.is_zero(x) {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] = f.add(&out[i + j], &f.mul(x, y));
        }
    }
    trim(f, out)
}

/// Quotient and remainder; `b` must be nonzero.
pub fn divrem<F: FieldOps>(f: &F, a: &[F::El], b: &[F::El]) -> (Vec<F::El>, Vec<F::El>) {
    let b = trim(f, b.to_vec());
    let db = b.len() - 1;
    let lead_inv = f.inv(&b[db]).expect("nonzero divisor");
    let mut r = trim(f, a.to_vec());
    if r.len() < b.len() {
        return (Vec::new(), r);
    }
    let mut q = vec![f.zero(); r.len() - db];
    while r.len() > db {
        let k = r.len() - 1 - db;
        let c = f.mul(&r[r.len() - 1], &lead_inv);
        for (i, bi) in b.iter().enumerate() {
            r[k + i] = f.sub(&r[k + i], &f.mul(&c, bi));
        }
        q[k] = c;
        r = trim(f, r);
    }
    (trim(f, q), r)
}

pub fn monic<F: FieldOps>(f: &F, a: Vec<F::El>) -> Vec<F::El> {
    let a = trim(f, a);
    match a.last() {
        None => a,
        Some(l) => {
            let li = f.inv(l).expect("nonzero");
            a.iter().map(|c| f.mul(c, &li)).collect()
        }
    }
}

/// Monic gcd.
pub fn gcd<F: FieldOps>(f: &F, a: &[F::El], b: &[F::El]) -> Vec<F::El> {
    let mut a = trim(f, a.to_vec());
    let mut b = trim(f, b.to_vec());
    while !b.is_empty() {
        let (_, r) = divrem(f, &a, &b);
        a = b;
        b = r;
    }
    monic(f, a)
}

pub fn powmod<F: FieldOps>(f: &F, base: &[F::El], mut e: u128, m: &[F::El]) -> Vec<F::El> {
    let mut acc = vec![f.one()];
    let mut b = divrem(f, base, m).1;
    while e > 0 {
        if e & 1 == 1 {
            acc = divrem(f, &mul(f, &acc, &b), m).1;
        }
        b = divrem(f, &mul(f, &b, &b), m).1;
        e >>= 1;
    }
    divrem(f, &acc, m).1
}

pub fn eval<F: FieldOps>(f: &F, a: &[F::El], x: &F::El) -> F::El {
    a.iter().rev().fold(f.zero(), |acc, c| f.add(&f.mul(&acc, x), c))
}

const SCAN_LIMIT: u128 = 1024;

/// Distinct roots in a finite field, in no particular order. The zero
/// polynomial yields an empty list.
pub fn roots<F: FieldOps, R: Rng + ?Sized>(f: &F, a: &[F::El], rng: &mut R) -> Vec<F::El> {
    let a = trim(f, a.to_vec());
    if a.len() <= 1 {
        return Vec::new();
    }
    let q = f.size().expect("roots are searched in finite fields");
    if q <= SCAN_LIMIT || f.characteristic() == 2 {
        return (0..q).map(|i| f.element(i)).filter(|x| f.is_zero(&eval(f, &a, x))).collect();
    }
    let x = vec![f.zero(), f.one()];
    let xq = powmod(f, &x, q, &a);
    let split = gcd(f, &a, &sub(f, &xq, &x));
    let mut out = Vec::new();
    equal_degree_split(f, split, q, rng, &mut out);
    out
}

/// Cantor-Zassenhaus splitting of a monic squarefree product of linear
/// factors, odd characteristic.
fn equal_degree_split<F: FieldOps, R: Rng + ?Sized>(
    f: &F,
    g: Vec<F::El>,
    q: u128,
    rng: &mut R,
    out: &mut Vec<F::El>,
) {
    match g.len() {
        0 | 1 => return,
        2 => {
            out.push(f.neg(&g[0]));
            return;
        }
        _ => {}
    }
    loop {
        let shift = vec![f.random(rng), f.one()];
        let h = powmod(f, &shift, (q - 1) / 2, &g);
        let h = sub(f, &h, &[f.one()]);
        let d = gcd(f, &g, &h);
        if d.len() > 1 && d.len() < g.len() {
            let (rest, _) = divrem(f, &g, &d);
            let rest = monic(f, rest);
            equal_degree_split(f, d, q, rng, out);
            equal_degree_split(f, rest, q, rng, out);
            return;
        }
    }
}

/// Projective roots `(s:t)` of a binary form given as coefficients of
/// `s^(d-k) t^k`, normalized with the last nonzero coordinate equal to 1.
pub fn binary_roots<F: FieldOps, R: Rng + ?Sized>(f: &F, c: &[F::El], rng: &mut R) -> Vec<(F::El, F::El)> {
    let mut out = Vec::new();
    if c.is_empty() {
        return out;
    }
    if f.is_zero(&c[0]) {
        out.push((f.one(), f.zero()));
    }
    let as_poly_in_s: Vec<F::El> = c.iter().rev().cloned().collect();
    for r in roots(f, &as_poly_in_s, rng) {
        out.push((r, f.one()));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{GfExt, Zp};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn roots_of_split_product_mod_large_prime() {
        let f = Zp::new(32003).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut p = vec![f.one()];
        for r in [5i64, 17, 31000] {
            p = mul(&f, &p, &[f.from_i64(-r), f.one()]);
        }
        p = mul(&f, &p, &[f.one(), f.zero(), f.one()]);
        let mut rs: Vec<u32> = roots(&f, &p, &mut rng);
        rs.sort();
        assert_eq!(rs, vec![5, 17, 31000]);
    }

    #[test]
    fn roots_in_extension_match_scan() {
        let f = GfExt::new(3, 7, 0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let a = f.element(100);
        let b = f.element(1234);
        let p = mul(&f, &[f.neg(&a), f.one()], &[f.neg(&b), f.one()]);
        let p = mul(&f, &p, &[f.one(), f.one(), f.zero(), f.one()]);
        let rs = roots(&f, &p, &mut rng);
        let scan: Vec<_> = (0..f.size().unwrap())
            .map(|i| f.element(i))
            .filter(|x| f.is_zero(&eval(&f, &p, x)))
            .collect();
        assert_eq!(rs.len(), scan.len());
        for r in &scan {
            assert!(rs.contains(r));
        }
    }

    #[test]
    fn binary_roots_include_infinity() {
        let f = Zp::new(7).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        // s t^2 - t^3 = t^2 (s - t)
        let c = vec![0, 0, 1, 6];
        let rs = binary_roots(&f, &c, &mut rng);
        assert!(rs.contains(&(1, 0)));
        assert!(rs.contains(&(1, 1)));
        assert_eq!(rs.len(), 2);
    }
}
