//! Nets of skew forms `f: A -> Λ²V*`, stored as `n` skew matrices
//! `F_1..F_n` of size `2m`, with `f(a) = sum a_i F_i`.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::field::{Field, FieldElement, FieldOps};
use crate::grassmann::pairs;
use crate::linalg;
use crate::matrix::{pfaffian, ExactMatrix};
use crate::multipoly::{Monomial, MultiPoly, SkewPolyMatrix};
use crate::with_field_ops;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ANet {
    n: usize,
    two_m: usize,
    field: Field,
    matrices: Vec<ExactMatrix>,
}

/// On-disk form: each matrix is its strict upper triangle, row-major.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NetFixture {
    pub n: usize,
    pub two_m: usize,
    pub field: String,
    pub matrices: Vec<Vec<i64>>,
}

impl ANet {
    /// Checks: even size, every matrix skew, matrices linearly independent.
    pub fn new(field: &Field, matrices: Vec<ExactMatrix>) -> Result<Self> {
        let n = matrices.len();
        if n == 0 {
            return Err(Error::InvalidInput("a net needs at least one matrix".into()));
        }
        let two_m = matrices[0].rows();
        if two_m % 2 == 1 || two_m == 0 {
            return Err(Error::OddSize(two_m));
        }
        for m in &matrices {
            if m.rows() != two_m || m.cols() != two_m {
                return Err(Error::DimensionMismatch("net matrices of different sizes".into()));
            }
            if m.field() != field {
                return Err(crate::field::mismatch(field, m.field()));
            }
            if !m.is_skew() {
                return Err(Error::NotSkew);
            }
        }
        let net = ANet { n, two_m, field: field.clone(), matrices };
        let r = net.coefficient_matrix().rank();
        if r < n {
            return Err(Error::DegenerateNet(format!(
                "the {n} skew forms span only a {r}-dimensional space"
            )));
        }
        Ok(net)
    }

    /// Build from strict upper triangles (row-major) of integer entries.
    pub fn from_upper(field: &Field, two_m: usize, uppers: &[Vec<i64>]) -> Result<Self> {
        let ps = pairs(two_m);
        let mut mats = Vec::with_capacity(uppers.len());
        for up in uppers {
            if up.len() != ps.len() {
                return Err(Error::DimensionMismatch(format!(
                    "upper triangle of length {} for 2m = {two_m}",
                    up.len()
                )));
            }
            let mut rows = vec![vec![0i64; two_m]; two_m];
            for (&(i, j), &x) in ps.iter().zip(up) {
                rows[i][j] = x;
                rows[j][i] = -x;
            }
            mats.push(ExactMatrix::from_i64(field, &rows)?);
        }
        Self::new(field, mats)
    }

    pub fn from_fixture(fx: &NetFixture) -> Result<Self> {
        let field: Field = fx.field.parse()?;
        if fx.matrices.len() != fx.n {
            return Err(Error::InvalidInput(format!(
                "fixture declares n = {} but lists {} matrices",
                fx.n,
                fx.matrices.len()
            )));
        }
        Self::from_upper(&field, fx.two_m, &fx.matrices)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let fx: NetFixture = serde_json::from_str(s)?;
        Self::from_fixture(&fx)
    }

    /// Integer upper triangles. Rational entries must be integers;
    /// finite-field entries must lie in the prime field.
    pub fn to_fixture(&self) -> Result<NetFixture> {
        let ps = pairs(self.two_m);
        let mut matrices = Vec::with_capacity(self.n);
        for m in &self.matrices {
            let mut up = Vec::with_capacity(ps.len());
            for &(i, j) in &ps {
                up.push(integer_entry(m.get(i, j))?);
            }
            matrices.push(up);
        }
        Ok(NetFixture { n: self.n, two_m: self.two_m, field: self.field.to_string(), matrices })
    }

    /// Canonical bytes: compact JSON of the fixture.
    pub fn canonical_bytes(&self) -> Result<Vec<u8>> {
        Ok(serde_json::to_vec(&self.to_fixture()?)?)
    }

    /// SHA-256 of the canonical bytes, hex encoded.
    pub fn fingerprint(&self) -> Result<String> {
        Ok(hex::encode(Sha256::digest(self.canonical_bytes()?)))
    }

    /// Fixture JSON with one upper triangle per line.
    pub fn to_json_pretty(&self) -> Result<String> {
        let fx = self.to_fixture()?;
        let rows: Vec<String> = fx.matrices.iter().map(|m| format!("    {}", serde_json::to_string(m).expect("ints"))).collect();
        Ok(format!(
            "{{\n  \"n\": {},\n  \"two_m\": {},\n  \"field\": {},\n  \"matrices\": [\n{}\n  ]\n}}\n",
            fx.n,
            fx.two_m,
            serde_json::to_string(&fx.field)?,
            rows.join(",\n")
        ))
    }

    pub fn n(&self) -> usize {
        self.n
    }
    pub fn two_m(&self) -> usize {
        self.two_m
    }
    pub fn field(&self) -> &Field {
        &self.field
    }
    pub fn matrices(&self) -> &[ExactMatrix] {
        &self.matrices
    }

    /// The `n x C(2m,2)` matrix of upper-triangle coefficients.
    pub fn coefficient_matrix(&self) -> ExactMatrix {
        let ps = pairs(self.two_m);
        let data = self
            .matrices
            .iter()
            .flat_map(|m| ps.iter().map(move |&(i, j)| m.get(i, j).clone()))
            .collect();
        ExactMatrix::new(&self.field, self.n, ps.len(), data).expect("same field")
    }

    /// Coefficient-wise image in another field; fails if the forms become
    /// dependent.
    pub fn reduce(&self, target: &Field) -> Result<ANet> {
        let mats = self
            .matrices
            .iter()
            .map(|m| {
                let data = (0..m.rows())
                    .flat_map(|i| m.row(i).iter().map(|x| target.coerce(x)).collect::<Vec<_>>())
                    .collect::<Result<Vec<_>>>()?;
                ExactMatrix::new(target, m.rows(), m.cols(), data)
            })
            .collect::<Result<Vec<_>>>()?;
        ANet::new(target, mats)
    }

    /// `f(a)` as an exact matrix.
    pub fn at(&self, a: &[FieldElement]) -> Result<ExactMatrix> {
        if a.len() != self.n {
            return Err(Error::DimensionMismatch(format!("point of length {} for n = {}", a.len(), self.n)));
        }
        with_field_ops!(&self.field, f => {
            let tn = TypedNet::new(f, self)?;
            let at: Vec<_> = a.iter().map(|x| f.lower(x)).collect::<Result<_>>()?;
            Ok(ExactMatrix::from_typed(f, self.two_m, self.two_m, &tn.at(&at)))
        })
    }

    /// `f(a)` as a skew matrix of linear forms in `a_1..a_n`.
    pub fn skew_poly_matrix(&self) -> Result<SkewPolyMatrix> {
        SkewPolyMatrix::from_linear_net(&self.field, &self.matrices)
    }

    /// The `n x 2m` matrix of linear forms in `v` whose row `i` is the
    /// functional `f(e_i)(v, -)`, i.e. `(v^T F_i)_k = sum_j v_j (F_i)_{jk}`.
    pub fn fv_matrix(&self) -> Result<Vec<Vec<MultiPoly>>> {
        let nv = self.two_m;
        let mut out = vec![vec![MultiPoly::zero(&self.field, nv); nv]; self.n];
        for (i, m) in self.matrices.iter().enumerate() {
            for k in 0..nv {
                for j in 0..nv {
                    let c = m.get(j, k);
                    if !c.is_zero() {
                        out[i][k].add_term(Monomial::var(nv, j), c.clone())?;
                    }
                }
            }
        }
        Ok(out)
    }

    /// `f_v` evaluated at a vector `v`.
    pub fn fv_at(&self, v: &[FieldElement]) -> Result<ExactMatrix> {
        if v.len() != self.two_m {
            return Err(Error::DimensionMismatch("vector length differs from 2m".into()));
        }
        with_field_ops!(&self.field, f => {
            let tn = TypedNet::new(f, self)?;
            let vt: Vec<_> = v.iter().map(|x| f.lower(x)).collect::<Result<_>>()?;
            Ok(ExactMatrix::from_typed(f, self.n, self.two_m, &tn.fv(&vt)))
        })
    }
}

fn integer_entry(x: &FieldElement) -> Result<i64> {
    match x {
        FieldElement::Rational(q) => {
            if !q.is_integer() {
                return Err(Error::InvalidInput(format!("non-integer entry {x}")));
            }
            num_traits::ToPrimitive::to_i64(q.numer())
                .ok_or_else(|| Error::InvalidInput(format!("entry {x} does not fit in 64 bits")))
        }
        FieldElement::Prime { v, .. } => Ok(*v as i64),
        FieldElement::Ext { v, .. } => {
            if v.0[1..].iter().any(|&c| c != 0) {
                return Err(Error::InvalidInput(format!("entry {x} is not in the prime field")));
            }
            Ok(v.0[0] as i64)
        }
    }
}

/// A net lowered to typed arithmetic.
#[derive(Clone, Debug)]
pub struct TypedNet<F: FieldOps> {
    pub f: F,
    pub n: usize,
    pub two_m: usize,
    pub mats: Vec<Vec<Vec<F::El>>>,
}

impl<F: FieldOps> TypedNet<F> {
    pub fn new(f: &F, net: &ANet) -> Result<Self> {
        let mats = net.matrices.iter().map(|m| m.typed(f)).collect::<Result<Vec<_>>>()?;
        Ok(TypedNet { f: f.clone(), n: net.n, two_m: net.two_m, mats })
    }

    pub fn at(&self, a: &[F::El]) -> Vec<Vec<F::El>> {
        let f = &self.f;
        let mut out = vec![vec![f.zero(); self.two_m]; self.two_m];
        for (ai, m) in a.iter().zip(&self.mats) {
            if f.is_zero(ai) {
                continue;
            }
            for (orow, mrow) in out.iter_mut().zip(m) {
                for (o, x) in orow.iter_mut().zip(mrow) {
                    *o = f.add(o, &f.mul(ai, x));
                }
            }
        }
        out
    }

    /// Row `i`: the functional `v^T F_i`.
    pub fn fv(&self, v: &[F::El]) -> Vec<Vec<F::El>> {
        let f = &self.f;
        self.mats
            .iter()
            .map(|m| {
                (0..self.two_m)
                    .map(|k| {
                        v.iter()
                            .zip(m)
                            .fold(f.zero(), |acc, (vj, row)| f.add(&acc, &f.mul(vj, &row[k])))
                    })
                    .collect()
            })
            .collect()
    }

    /// `u^T F_i w`.
    pub fn form(&self, i: usize, u: &[F::El], w: &[F::El]) -> F::El {
        let f = &self.f;
        let mw = linalg::mat_vec(f, &self.mats[i], w);
        u.iter().zip(&mw).fold(f.zero(), |acc, (a, b)| f.add(&acc, &f.mul(a, b)))
    }

    pub fn rank_at(&self, a: &[F::El]) -> usize {
        linalg::rank(&self.f, &self.at(a), self.two_m)
    }

    pub fn pf_at(&self, a: &[F::El]) -> F::El {
        pfaffian(&self.f, &self.at(a))
    }

    pub fn rank_fv(&self, v: &[F::El]) -> usize {
        linalg::rank(&self.f, &self.fv(v), self.two_m)
    }
}

/// Run a body with a [`TypedNet`] bound for the net's field.
#[macro_export]
macro_rules! with_typed_net {
    ($net:expr, $tn:ident => $body:expr) => {
        $crate::with_field_ops!($net.field(), __f => {
            let $tn = $crate::net::TypedNet::new(__f, $net)?;
            $body
        })
    };
}

#[cfg(test)]
mod tests {
    use super::*;

    fn block_uppers() -> Vec<Vec<i64>> {
        let ps = pairs(6);
        let mut out = Vec::new();
        for (a, b) in [(0, 1), (2, 3), (4, 5)] {
            let mut up = vec![0i64; 15];
            up[ps.iter().position(|&p| p == (a, b)).unwrap()] = 1;
            out.push(up);
        }
        out
    }

    #[test]
    fn fixture_round_trip_and_fingerprint() {
        let net = ANet::from_upper(&Field::Rational, 6, &block_uppers()).unwrap();
        let json = net.to_json_pretty().unwrap();
        let back = ANet::from_json(&json).unwrap();
        assert_eq!(back, net);
        assert_eq!(back.fingerprint().unwrap(), net.fingerprint().unwrap());
        assert_eq!(net.fingerprint().unwrap().len(), 64);
    }

    #[test]
    fn dependent_forms_are_rejected() {
        let mut ups = block_uppers();
        ups.push(ups[0].iter().zip(&ups[1]).map(|(a, b)| a + b).collect());
        assert!(matches!(ANet::from_upper(&Field::Rational, 6, &ups), Err(Error::DegenerateNet(_))));
    }

    #[test]
    fn fv_annihilates_v() {
        let net = ANet::from_upper(
            &Field::Prime(7),
            4,
            &[vec![1, 2, 3, 4, 5, 6], vec![0, 1, 0, 2, 3, 1]],
        )
        .unwrap();
        let fv = net.fv_matrix().unwrap();
        let vars: Vec<MultiPoly> = (0..4).map(|j| MultiPoly::var(net.field(), 4, j)).collect();
        for row in &fv {
            let mut acc = MultiPoly::zero(net.field(), 4);
            for (e, x) in row.iter().zip(&vars) {
                acc = acc.add(&e.mul(x).unwrap()).unwrap();
            }
            assert!(acc.is_zero());
        }
    }
}
