//! Exact scalar fields: the rationals, prime fields GF(p) and extension
//! fields GF(p^k) with k <= 8.
//!
//! Two layers live here. [`FieldElement`] and [`Field`] are dynamically
//! typed values used at API boundaries, where mixing field kinds must be a
//! reported error. [`FieldOps`] is the statically typed arithmetic used by
//! the inner loops; [`Qq`], [`Zp`] and [`GfExt`] implement it.

use std::fmt;
use std::hash::Hash;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MAX_EXT_DEGREE: usize = 8;

/// Statically typed field arithmetic.
pub trait FieldOps: Clone + Send + Sync + fmt::Debug {
    type El: Clone + PartialEq + Eq + Hash + fmt::Debug + Send + Sync;

    fn zero(&self) -> Self::El;
    fn one(&self) -> Self::El;
    fn from_i64(&self, v: i64) -> Self::El;
    /// Image of a rational number; fails when the denominator vanishes.
    fn from_rational(&self, q: &BigRational) -> Result<Self::El>;
    fn add(&self, a: &Self::El, b: &Self::El) -> Self::El;
    fn sub(&self, a: &Self::El, b: &Self::El) -> Self::El;
    fn mul(&self, a: &Self::El, b: &Self::El) -> Self::El;
    fn neg(&self, a: &Self::El) -> Self::El;
    fn inv(&self, a: &Self::El) -> Option<Self::El>;
    fn is_zero(&self, a: &Self::El) -> bool;
    /// Number of elements, `None` for infinite fields.
    fn size(&self) -> Option<u128>;
    fn characteristic(&self) -> u64;
    /// The `index`-th element in a fixed enumeration order (finite fields).
    fn element(&self, index: u128) -> Self::El;
    fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> Self::El;
    fn descriptor(&self) -> Field;
    fn lift(&self, a: &Self::El) -> FieldElement;
    fn lower(&self, a: &FieldElement) -> Result<Self::El>;

    fn div(&self, a: &Self::El, b: &Self::El) -> Option<Self::El> {
        self.inv(b).map(|bi| self.mul(a, &bi))
    }

    fn is_one(&self, a: &Self::El) -> bool {
        *a == self.one()
    }

    fn pow(&self, a: &Self::El, mut e: u64) -> Self::El {
        let mut base = a.clone();
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        acc
    }
}

// ---------------------------------------------------------------------------
// Rationals

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct Qq;

impl FieldOps for Qq {
    type El = BigRational;

    fn zero(&self) -> BigRational {
        BigRational::zero()
    }
    fn one(&self) -> BigRational {
        BigRational::one()
    }
    fn from_i64(&self, v: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(v))
    }
    fn from_rational(&self, q: &BigRational) -> Result<BigRational> {
        Ok(q.clone())
    }
    fn add(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a + b
    }
    fn sub(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a - b
    }
    fn mul(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a * b
    }
    fn neg(&self, a: &BigRational) -> BigRational {
        -a
    }
    fn inv(&self, a: &BigRational) -> Option<BigRational> {
        if a.is_zero() {
            None
        } else {
            Some(a.recip())
        }
    }
    fn is_zero(&self, a: &BigRational) -> bool {
        a.is_zero()
    }
    fn size(&self) -> Option<u128> {
        None
    }
    fn characteristic(&self) -> u64 {
        0
    }
    fn element(&self, index: u128) -> BigRational {
        // 0, 1, -1, 2, -2, ...
        let k = index.div_ceil(2) as i64;
        self.from_i64(if index % 2 == 1 { k } else { -k })
    }
    fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> BigRational {
        self.from_i64(rng.gen_range(-100..=100))
    }
    fn descriptor(&self) -> Field {
        Field::Rational
    }
    fn lift(&self, a: &BigRational) -> FieldElement {
        FieldElement::Rational(a.clone())
    }
    fn lower(&self, a: &FieldElement) -> Result<BigRational> {
        match a {
            FieldElement::Rational(q) => Ok(q.clone()),
            other => Err(mismatch(&Field::Rational, &other.field())),
        }
    }
}

// ---------------------------------------------------------------------------
// Prime fields

/// GF(p) with canonical residues `0..p`. `p < 2^31`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Zp {
    p: u32,
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

impl Zp {
    pub fn new(p: u64) -> Result<Self> {
        if !is_prime(p) || p >= (1 << 31) {
            return Err(Error::NotPrime(p));
        }
        Ok(Zp { p: p as u32 })
    }

    /// Caller guarantees `p` is a prime below 2^31.
    pub const fn new_unchecked(p: u32) -> Self {
        Zp { p }
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn reduce_bigint(&self, v: &BigInt) -> u32 {
        let r = v.mod_floor(&BigInt::from(self.p));
        r.to_u32().expect("residue fits")
    }
}

pub fn inv_mod(a: u64, p: u64) -> Option<u64> {
    if a % p == 0 {
        return None;
    }
    let (mut old_r, mut r) = ((a % p) as i64, p as i64);
    let (mut old_s, mut s) = (1i64, 0i64);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    Some(old_s.rem_euclid(p as i64) as u64)
}

impl FieldOps for Zp {
    type El = u32;

    fn zero(&self) -> u32 {
        0
    }
    fn one(&self) -> u32 {
        1 % self.p
    }
    fn from_i64(&self, v: i64) -> u32 {
        v.rem_euclid(self.p as i64) as u32
    }
    fn from_rational(&self, q: &BigRational) -> Result<u32> {
        let num = self.reduce_bigint(q.numer());
        let den = self.reduce_bigint(q.denom());
        let inv = inv_mod(den as u64, self.p as u64).ok_or(Error::DivisionByZero)?;
        Ok(((num as u64 * inv) % self.p as u64) as u32)
    }
    #[inline]
    fn add(&self, a: &u32, b: &u32) -> u32 {
        let s = *a as u64 + *b as u64;
        let p = self.p as u64;
        (if s >= p { s - p } else { s }) as u32
    }
    #[inline]
    fn sub(&self, a: &u32, b: &u32) -> u32 {
        if a >= b {
            a - b
        } else {
            (*a as u64 + self.p as u64 - *b as u64) as u32
        }
    }
    #[inline]
    fn mul(&self, a: &u32, b: &u32) -> u32 {
        ((*a as u64 * *b as u64) % self.p as u64) as u32
    }
    #[inline]
    fn neg(&self, a: &u32) -> u32 {
        if *a == 0 {
            0
        } else {
            self.p - a
        }
    }
    fn inv(&self, a: &u32) -> Option<u32> {
        inv_mod(*a as u64, self.p as u64).map(|v| v as u32)
    }
    #[inline]
    fn is_zero(&self, a: &u32) -> bool {
        *a == 0
    }
    fn size(&self) -> Option<u128> {
        Some(self.p as u128)
    }
    fn characteristic(&self) -> u64 {
        self.p as u64
    }
    fn element(&self, index: u128) -> u32 {
        (index % self.p as u128) as u32
    }
    fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> u32 {
        rng.gen_range(0..self.p)
    }
    fn descriptor(&self) -> Field {
        Field::Prime(self.p)
    }
    fn lift(&self, a: &u32) -> FieldElement {
        FieldElement::Prime { p: self.p, v: *a }
    }
    fn lower(&self, a: &FieldElement) -> Result<u32> {
        match a {
            FieldElement::Prime { p, v } if *p == self.p => Ok(*v),
            other => Err(mismatch(&self.descriptor(), &other.field())),
        }
    }
}

// ---------------------------------------------------------------------------
// Polynomials over GF(p), dense coefficient vectors (constant term first).

pub(crate) mod fpoly {
    use super::inv_mod;

    pub fn trim(mut a: Vec<u32>) -> Vec<u32> {
        while a.last() == Some(&0) {
            a.pop();
        }
        a
    }

    pub fn sub(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
        let n = a.len().max(b.len());
        let mut out = vec![0u32; n];
        for (i, o) in out.iter_mut().enumerate() {
            let x = *a.get(i).unwrap_or(&0) as u64;
            let y = *b.get(i).unwrap_or(&0) as u64;
            *o = ((x + p as u64 - y) % p as u64) as u32;
        }
        trim(out)
    }

    pub fn mul(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut out = vec![0u64; a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            for (j, &y) in b.iter().enumerate() {
                out[i + j] = (out[i + j] + x as u64 * y as u64) % p as u64;
            }
        }
        trim(out.into_iter().map(|v| v as u32).collect())
    }

    /// Quotient and remainder; `b` must be nonzero.
    pub fn divrem(a: &[u32], b: &[u32], p: u32) -> (Vec<u32>, Vec<u32>) {
        let b = trim(b.to_vec());
        assert!(!b.is_empty(), "division by zero polynomial");
        let mut r: Vec<u64> = a.iter().map(|&x| x as u64).collect();
        let db = b.len() - 1;
        let lead_inv = inv_mod(b[db] as u64, p as u64).expect("nonzero lead");
        if r.len() < b.len() {
            return (Vec::new(), trim(a.to_vec()));
        }
        let mut q = vec![0u64; r.len() - db];
        for i in (db..r.len()).rev() {
            let c = r[i] % p as u64 * lead_inv % p as u64;
            if c == 0 {
                continue;
            }
            q[i - db] = c;
            for (j, &bj) in b.iter().enumerate() {
                let idx = i - db + j;
                r[idx] = (r[idx] + (p as u64 - c) * bj as u64) % p as u64;
            }
        }
        r.truncate(db);
        (
            trim(q.into_iter().map(|v| v as u32).collect()),
            trim(r.into_iter().map(|v| (v % p as u64) as u32).collect()),
        )
    }

    pub fn rem(a: &[u32], m: &[u32], p: u32) -> Vec<u32> {
        divrem(a, m, p).1
    }

    pub fn mulmod(a: &[u32], b: &[u32], m: &[u32], p: u32) -> Vec<u32> {
        rem(&mul(a, b, p), m, p)
    }

    pub fn powmod(base: &[u32], mut e: u64, m: &[u32], p: u32) -> Vec<u32> {
        let mut acc = vec![1u32];
        let mut b = rem(base, m, p);
        while e > 0 {
            if e & 1 == 1 {
                acc = mulmod(&acc, &b, m, p);
            }
            b = mulmod(&b, &b, m, p);
            e >>= 1;
        }
        acc
    }

    pub fn gcd(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
        let mut x = trim(a.to_vec());
        let mut y = trim(b.to_vec());
        while !y.is_empty() {
            let r = rem(&x, &y, p);
            x = y;
            y = r;
        }
        x
    }

    /// Inverse of `a` modulo `m`, if they are coprime.
    pub fn invmod(a: &[u32], m: &[u32], p: u32) -> Option<Vec<u32>> {
        let (mut r0, mut r1) = (trim(m.to_vec()), rem(a, m, p));
        let (mut s0, mut s1) = (Vec::new(), vec![1u32]);
        while !r1.is_empty() {
            let (q, r) = divrem(&r0, &r1, p);
            let s = sub(&s0, &mul(&q, &s1, p), p);
            r0 = r1;
            r1 = r;
            s0 = s1;
            s1 = s;
        }
        if r0.len() != 1 {
            return None;
        }
        let c = inv_mod(r0[0] as u64, p as u64)? as u32;
        Some(mul(&s0, &[c], p))
    }
}

// ---------------------------------------------------------------------------
// Extension fields

/// Residue polynomial of an extension-field element, constant term first.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ExtEl(pub [u32; MAX_EXT_DEGREE]);

/// GF(p^k) = GF(p)[z]/(modulus) with a monic irreducible modulus.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct GfExt {
    p: u32,
    k: usize,
    /// Monic modulus, constant term first, `modulus[k] == 1`.
    modulus: [u32; MAX_EXT_DEGREE + 1],
}

impl GfExt {
    /// Deterministic modulus choice: monic degree-`k` polynomials are visited
    /// in increasing order of the base-p counter whose digits are the
    /// coefficients `c_0, c_1, ..` (least significant first), starting at
    /// counter value `seed`; the first irreducible one wins.
    pub fn new(p: u64, k: usize, seed: u64) -> Result<Self> {
        let zp = Zp::new(p)?;
        if k == 0 || k > MAX_EXT_DEGREE {
            return Err(Error::BadExtensionDegree(k));
        }
        let total = (p as u128).pow(k as u32);
        let mut counter = seed as u128 % total;
        for _ in 0..total {
            let mut coeffs = vec![0u32; k + 1];
            let mut c = counter;
            for slot in coeffs.iter_mut().take(k) {
                *slot = (c % p as u128) as u32;
                c /= p as u128;
            }
            coeffs[k] = 1;
            if is_irreducible(&coeffs, zp.p) {
                return Self::with_modulus(p, &coeffs);
            }
            counter = (counter + 1) % total;
        }
        Err(Error::NotIrreducible)
    }

    /// Build from an explicit monic modulus (constant term first).
    pub fn with_modulus(p: u64, modulus: &[u32]) -> Result<Self> {
        let zp = Zp::new(p)?;
        let m = fpoly::trim(modulus.iter().map(|&c| c % zp.p).collect());
        let k = m.len().saturating_sub(1);
        if k == 0 || k > MAX_EXT_DEGREE {
            return Err(Error::BadExtensionDegree(k));
        }
        if m[k] != 1 || !is_irreducible(&m, zp.p) {
            return Err(Error::NotIrreducible);
        }
        let mut arr = [0u32; MAX_EXT_DEGREE + 1];
        arr[..=k].copy_from_slice(&m);
        Ok(GfExt { p: zp.p, k, modulus: arr })
    }

    pub fn p(&self) -> u32 {
        self.p
    }
    pub fn degree(&self) -> usize {
        self.k
    }
    pub fn modulus(&self) -> &[u32] {
        &self.modulus[..=self.k]
    }

    pub fn from_coeffs(&self, c: &[u32]) -> ExtEl {
        let mut out = [0u32; MAX_EXT_DEGREE];
        let m = fpoly::rem(
            &c.iter().map(|&x| x % self.p).collect::<Vec<_>>(),
            self.modulus(),
            self.p,
        );
        out[..m.len()].copy_from_slice(&m);
        ExtEl(out)
    }

    fn as_vec(&self, a: &ExtEl) -> Vec<u32> {
        fpoly::trim(a.0[..self.k].to_vec())
    }
}

/// Irreducibility of a monic polynomial over GF(p): `gcd(f, z^(p^j) - z) = 1`
/// for every `1 <= j < deg f`. For degree <= 3 this is the absence of roots.
pub fn is_irreducible(f: &[u32], p: u32) -> bool {
    let f = fpoly::trim(f.to_vec());
    let k = f.len().saturating_sub(1);
    if k == 0 {
        return false;
    }
    if k == 1 {
        return true;
    }
    let z = vec![0u32, 1];
    let mut power = z.clone();
    for _ in 1..k {
        power = fpoly::powmod(&power, p as u64, &f, p);
        let diff = fpoly::sub(&power, &z, p);
        let g = fpoly::gcd(&f, &diff, p);
        if g.len() != 1 {
            return false;
        }
    }
    true
}

impl FieldOps for GfExt {
    type El = ExtEl;

    fn zero(&self) -> ExtEl {
        ExtEl::default()
    }
    fn one(&self) -> ExtEl {
        let mut e = ExtEl::default();
        e.0[0] = 1 % self.p;
        e
    }
    fn from_i64(&self, v: i64) -> ExtEl {
        let mut e = ExtEl::default();
        e.0[0] = v.rem_euclid(self.p as i64) as u32;
        e
    }
    fn from_rational(&self, q: &BigRational) -> Result<ExtEl> {
        let v = Zp::new_unchecked(self.p).from_rational(q)?;
        let mut e = ExtEl::default();
        e.0[0] = v;
        Ok(e)
    }
    fn add(&self, a: &ExtEl, b: &ExtEl) -> ExtEl {
        let mut out = ExtEl::default();
        for i in 0..self.k {
            let s = a.0[i] as u64 + b.0[i] as u64;
            out.0[i] = (s % self.p as u64) as u32;
        }
        out
    }
    fn sub(&self, a: &ExtEl, b: &ExtEl) -> ExtEl {
        let mut out = ExtEl::default();
        for i in 0..self.k {
            let s = a.0[i] as u64 + self.p as u64 - b.0[i] as u64;
            out.0[i] = (s % self.p as u64) as u32;
        }
        out
    }
    fn mul(&self, a: &ExtEl, b: &ExtEl) -> ExtEl {
        let p = self.p as u64;
        let k = self.k;
        let mut prod = [0u64; 2 * MAX_EXT_DEGREE];
        for i in 0..k {
            if a.0[i] == 0 {
                continue;
            }
            for j in 0..k {
                prod[i + j] = (prod[i + j] + a.0[i] as u64 * b.0[j] as u64) % p;
            }
        }
        for d in (k..2 * k - 1).rev() {
            let c = prod[d];
            if c == 0 {
                continue;
            }
            prod[d] = 0;
            let neg = p - c;
            for i in 0..k {
                let idx = d - k + i;
                prod[idx] = (prod[idx] + neg * self.modulus[i] as u64) % p;
            }
        }
        let mut out = ExtEl::default();
        for i in 0..k {
            out.0[i] = prod[i] as u32;
        }
        out
    }
    fn neg(&self, a: &ExtEl) -> ExtEl {
        self.sub(&self.zero(), a)
    }
    fn inv(&self, a: &ExtEl) -> Option<ExtEl> {
        let v = self.as_vec(a);
        if v.is_empty() {
            return None;
        }
        let inv = fpoly::invmod(&v, self.modulus(), self.p)?;
        Some(self.from_coeffs(&inv))
    }
    fn is_zero(&self, a: &ExtEl) -> bool {
        a.0.iter().all(|&c| c == 0)
    }
    fn size(&self) -> Option<u128> {
        Some((self.p as u128).pow(self.k as u32))
    }
    fn characteristic(&self) -> u64 {
        self.p as u64
    }
    fn element(&self, index: u128) -> ExtEl {
        let mut out = ExtEl::default();
        let mut c = index;
        for i in 0..self.k {
            out.0[i] = (c % self.p as u128) as u32;
            c /= self.p as u128;
        }
        out
    }
    fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> ExtEl {
        let mut out = ExtEl::default();
        for i in 0..self.k {
            out.0[i] = rng.gen_range(0..self.p);
        }
        out
    }
    fn descriptor(&self) -> Field {
        Field::Extension(*self)
    }
    fn lift(&self, a: &ExtEl) -> FieldElement {
        FieldElement::Ext { field: *self, v: *a }
    }
    fn lower(&self, a: &FieldElement) -> Result<ExtEl> {
        match a {
            FieldElement::Ext { field, v } if field == self => Ok(*v),
            other => Err(mismatch(&self.descriptor(), &other.field())),
        }
    }
}

// ---------------------------------------------------------------------------
// Dynamic layer

/// A field kind.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Field {
    Rational,
    Prime(u32),
    Extension(GfExt),
}

/// Dispatch a generic body over the statically typed arithmetic of a
/// [`Field`]. The identifier is bound to a reference to the ops value.
#[macro_export]
macro_rules! with_field_ops {
    ($field:expr, $ops:ident => $body:expr) => {
        match $field {
            $crate::field::Field::Rational => {
                let $ops = &$crate::field::Qq;
                $body
            }
            $crate::field::Field::Prime(p) => {
                let $ops = &$crate::field::Zp::new_unchecked(*p);
                $body
            }
            $crate::field::Field::Extension(e) => {
                let $ops = e;
                $body
            }
        }
    };
}

impl Field {
    pub fn prime(p: u64) -> Result<Field> {
        Ok(Field::Prime(Zp::new(p)?.p))
    }

    pub fn extension(p: u64, k: usize) -> Result<Field> {
        if k == 1 {
            return Field::prime(p);
        }
        Ok(Field::Extension(GfExt::new(p, k, 0)?))
    }

    pub fn characteristic(&self) -> u64 {
        match self {
            Field::Rational => 0,
            Field::Prime(p) => *p as u64,
            Field::Extension(e) => e.p as u64,
        }
    }

    pub fn size(&self) -> Option<u128> {
        with_field_ops!(self, f => f.size())
    }

    pub fn is_finite(&self) -> bool {
        !matches!(self, Field::Rational)
    }

    pub fn zero(&self) -> FieldElement {
        with_field_ops!(self, f => f.lift(&f.zero()))
    }

    pub fn one(&self) -> FieldElement {
        with_field_ops!(self, f => f.lift(&f.one()))
    }

    pub fn from_i64(&self, v: i64) -> FieldElement {
        with_field_ops!(self, f => f.lift(&f.from_i64(v)))
    }

    pub fn from_rational(&self, q: &BigRational) -> Result<FieldElement> {
        with_field_ops!(self, f => Ok(f.lift(&f.from_rational(q)?)))
    }

    /// Map an element into this field. Rationals map into any field by
    /// reduction; finite-field elements only map to their own field.
    pub fn coerce(&self, x: &FieldElement) -> Result<FieldElement> {
        match x {
            FieldElement::Rational(q) => self.from_rational(q),
            other if other.field() == *self => Ok(other.clone()),
            FieldElement::Prime { p, v } => match self {
                Field::Extension(e) if e.p == *p => Ok(self.from_i64(*v as i64)),
                _ => Err(mismatch(self, &x.field())),
            },
            _ => Err(mismatch(self, &x.field())),
        }
    }

    pub fn element(&self, index: u128) -> FieldElement {
        with_field_ops!(self, f => f.lift(&f.element(index)))
    }

    pub fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> FieldElement {
        with_field_ops!(self, f => f.lift(&f.random(rng)))
    }

    /// Reduction map from rationals to this field's prime field, or `None`
    /// for the rationals themselves.
    pub fn prime_subfield(&self) -> Option<Zp> {
        match self {
            Field::Rational => None,
            Field::Prime(p) => Some(Zp::new_unchecked(*p)),
            Field::Extension(e) => Some(Zp::new_unchecked(e.p)),
        }
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Field::Rational => write!(f, "QQ"),
            Field::Prime(p) => write!(f, "GF({p})"),
            Field::Extension(e) => write!(f, "GF({},{})", e.p, e.k),
        }
    }
}

impl FromStr for Field {
    type Err = Error;

    fn from_str(s: &str) -> Result<Field> {
        let s = s.trim();
        if s == "QQ" {
            return Ok(Field::Rational);
        }
        let inner = s
            .strip_prefix("GF(")
            .and_then(|r| r.strip_suffix(')'))
            .ok_or_else(|| Error::Parse(format!("unknown field `{s}`")))?;
        let parts: Vec<&str> = inner.split(',').map(str::trim).collect();
        let num = |t: &str| {
            t.parse::<u64>()
                .map_err(|_| Error::Parse(format!("bad number `{t}` in field `{s}`")))
        };
        match parts.as_slice() {
            [p] => Field::prime(num(p)?),
            [p, k] => Field::extension(num(p)?, num(k)? as usize),
            _ => Err(Error::Parse(format!("unknown field `{s}`"))),
        }
    }
}

impl Serialize for Field {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Field {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

pub(crate) fn mismatch(a: &Field, b: &Field) -> Error {
    Error::FieldMismatch { left: a.to_string(), right: b.to_string() }
}

/// An exact scalar tagged with its field kind.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum FieldElement {
    /// Always in lowest terms with positive denominator.
    Rational(BigRational),
    Prime { p: u32, v: u32 },
    Ext { field: GfExt, v: ExtEl },
}

impl FieldElement {
    pub fn rational(num: i64, den: i64) -> Result<FieldElement> {
        if den == 0 {
            return Err(Error::DivisionByZero);
        }
        Ok(FieldElement::Rational(BigRational::new(BigInt::from(num), BigInt::from(den))))
    }

    pub fn field(&self) -> Field {
        match self {
            FieldElement::Rational(_) => Field::Rational,
            FieldElement::Prime { p, .. } => Field::Prime(*p),
            FieldElement::Ext { field, .. } => Field::Extension(*field),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            FieldElement::Rational(q) => q.is_zero(),
            FieldElement::Prime { v, .. } => *v == 0,
            FieldElement::Ext { field, v } => field.is_zero(v),
        }
    }

    pub fn is_one(&self) -> bool {
        *self == self.field().one()
    }

    fn binary(
        &self,
        other: &FieldElement,
        op: fn(&Field, &FieldElement, &FieldElement) -> Result<FieldElement>,
    ) -> Result<FieldElement> {
        let f = self.field();
        if f != other.field() {
            return Err(mismatch(&f, &other.field()));
        }
        op(&f, self, other)
    }

    pub fn add(&self, other: &FieldElement) -> Result<FieldElement> {
        self.binary(other, |f, a, b| {
            with_field_ops!(f, o => Ok(o.lift(&o.add(&o.lower(a)?, &o.lower(b)?))))
        })
    }

    pub fn sub(&self, other: &FieldElement) -> Result<FieldElement> {
        self.binary(other, |f, a, b| {
            with_field_ops!(f, o => Ok(o.lift(&o.sub(&o.lower(a)?, &o.lower(b)?))))
        })
    }

    pub fn mul(&self, other: &FieldElement) -> Result<FieldElement> {
        self.binary(other, |f, a, b| {
            with_field_ops!(f, o => Ok(o.lift(&o.mul(&o.lower(a)?, &o.lower(b)?))))
        })
    }

    pub fn div(&self, other: &FieldElement) -> Result<FieldElement> {
        self.binary(other, |f, a, b| {
            with_field_ops!(f, o => {
                let q = o.div(&o.lower(a)?, &o.lower(b)?).ok_or(Error::DivisionByZero)?;
                Ok(o.lift(&q))
            })
        })
    }

    pub fn neg(&self) -> FieldElement {
        match self {
            FieldElement::Rational(q) => FieldElement::Rational(-q),
            FieldElement::Prime { p, v } => {
                FieldElement::Prime { p: *p, v: Zp::new_unchecked(*p).neg(v) }
            }
            FieldElement::Ext { field, v } => FieldElement::Ext { field: *field, v: field.neg(v) },
        }
    }

    pub fn inv(&self) -> Result<FieldElement> {
        self.field().one().div(self)
    }

    pub fn pow(&self, e: u64) -> FieldElement {
        let f = self.field();
        with_field_ops!(&f, o => o.lift(&o.pow(&o.lower(self).expect("own field"), e)))
    }

    /// The rational value, if this is a rational element.
    pub fn as_rational(&self) -> Option<&BigRational> {
        match self {
            FieldElement::Rational(q) => Some(q),
            _ => None,
        }
    }

    /// Residue for prime-field elements.
    pub fn as_residue(&self) -> Option<u32> {
        match self {
            FieldElement::Prime { v, .. } => Some(*v),
            _ => None,
        }
    }

    /// Whether this element is "negative" for display purposes: a negative
    /// rational. Finite-field residues always print as non-negative.
    pub(crate) fn is_negative(&self) -> bool {
        matches!(self, FieldElement::Rational(q) if q.is_negative())
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldElement::Rational(q) => {
                if q.is_integer() {
                    write!(f, "{}", q.numer())
                } else {
                    write!(f, "{}/{}", q.numer(), q.denom())
                }
            }
            FieldElement::Prime { v, .. } => write!(f, "{v}"),
            FieldElement::Ext { field, v } => {
                let terms: Vec<String> = (0..field.k)
                    .filter(|&i| v.0[i] != 0)
                    .map(|i| match i {
                        0 => format!("{}", v.0[0]),
                        1 => format!("{}*z", v.0[1]),
                        _ => format!("{}*z^{}", v.0[i], i),
                    })
                    .collect();
                if terms.is_empty() {
                    write!(f, "0")
                } else if terms.len() == 1 && v.0[0] != 0 {
                    write!(f, "{}", terms[0])
                } else {
                    write!(f, "({})", terms.join("+"))
                }
            }
        }
    }
}

/// Parse a scalar written by the `Display` impl of [`FieldElement`].
/// Serialized as its display text; reading it back needs the field.
impl serde::Serialize for FieldElement {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

pub fn parse_element(field: &Field, s: &str) -> Result<FieldElement> {
    let s = s.trim();
    let bad = || Error::Parse(format!("bad coefficient `{s}` for {field}"));
    match field {
        Field::Extension(e) if s.starts_with('(') || s.contains('z') => {
            let inner = s.trim_start_matches('(').trim_end_matches(')');
            let mut coeffs = vec![0u32; e.k];
            for term in inner.split('+') {
                let term = term.trim();
                let (c, pow) = match term.split_once('*') {
                    None if term == "z" => (1u32, 1usize),
                    None => (term.parse::<u32>().map_err(|_| bad())?, 0),
                    Some((c, zpart)) => {
                        let pow = match zpart.trim().strip_prefix("z^") {
                            Some(d) => d.parse::<usize>().map_err(|_| bad())?,
                            None if zpart.trim() == "z" => 1,
                            None => return Err(bad()),
                        };
                        (c.trim().parse::<u32>().map_err(|_| bad())?, pow)
                    }
                };
                if pow >= e.k {
                    return Err(bad());
                }
                coeffs[pow] = (coeffs[pow] + c) % e.p;
            }
            Ok(FieldElement::Ext { field: *e, v: e.from_coeffs(&coeffs) })
        }
        _ => {
            let q = match s.split_once('/') {
                Some((n, d)) => {
                    let n = BigInt::from_str(n.trim()).map_err(|_| bad())?;
                    let d = BigInt::from_str(d.trim()).map_err(|_| bad())?;
                    if d.is_zero() {
                        return Err(Error::DivisionByZero);
                    }
                    BigRational::new(n, d)
                }
                None => BigRational::from_integer(BigInt::from_str(s).map_err(|_| bad())?),
            };
            field.from_rational(&q)
        }
    }
}
