//! Cohomology dimensions reduced to ranks of multiplication maps.
//!
//! On `P(A) = P^N`, `N = n - 1`, the theta-bundle has the resolution
//! `0 -> V ⊗ O(t-1) -> V* ⊗ O(t) -> E(t) -> 0`. Global sections come from
//! the map on symmetric powers, the top groups from the same map on
//! `H^N(O(s))`, which we write in the inverse-monomial basis
//! `x^-(b+1)`, `|b| = -s - n`, where multiplication by `x_i` lowers `b_i`.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::correspondence::{is_regular, pfaffian_hypersurface, Tri};
use crate::error::{Error, Result};
use crate::field::{FieldElement, FieldOps};
use crate::ideals::HilbertConfig;
use crate::linalg;
use crate::multipoly::{binomial, monomials_of_degree, CompiledPoly};
use crate::net::{ANet, TypedNet};
use crate::with_typed_net;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Expected {
    Exact { value: u64 },
    Range { lo: u64, hi: u64 },
}

impl Expected {
    pub fn admits(&self, v: u64) -> bool {
        match *self {
            Expected::Exact { value } => v == value,
            Expected::Range { lo, hi } => lo <= v && v <= hi,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CohomologyCell {
    pub p: usize,
    pub t: i64,
    pub computed: Option<u64>,
    pub expected: Option<Expected>,
    pub verdict: Tri,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CohomologyTable {
    pub name: String,
    pub degrees: Vec<usize>,
    pub twists: Vec<i64>,
    /// Row-major by `p`, then `t`.
    pub cells: Vec<CohomologyCell>,
    /// Alternating sums against the Euler characteristic, where known.
    pub euler_consistent: Option<bool>,
    pub verdict: Tri,
}

impl CohomologyTable {
    pub fn cell(&self, p: usize, t: i64) -> Option<&CohomologyCell> {
        self.cells.iter().find(|c| c.p == p && c.t == t)
    }

    fn assemble(
        name: &str,
        degrees: Vec<usize>,
        twists: Vec<i64>,
        computed: impl Fn(usize, i64) -> Option<u64>,
        expected: impl Fn(usize, i64) -> Option<Expected>,
        euler_consistent: Option<bool>,
    ) -> Self {
        let mut cells = Vec::new();
        for &p in &degrees {
            for &t in &twists {
                let c = computed(p, t);
                let e = expected(p, t);
                let verdict = match (c, e) {
                    (Some(v), Some(e)) if e.admits(v) => Tri::Yes,
                    (Some(_), Some(_)) => Tri::No,
                    _ => Tri::Inconclusive,
                };
                cells.push(CohomologyCell { p, t, computed: c, expected: e, verdict });
            }
        }
        let any_computed = cells.iter().any(|c| c.computed.is_some());
        let verdict = if !any_computed {
            Tri::Inconclusive
        } else if cells.iter().any(|c| c.verdict == Tri::No) || euler_consistent == Some(false) {
            Tri::No
        } else if cells.iter().all(|c| c.verdict == Tri::Yes) {
            Tri::Yes
        } else {
            Tri::Inconclusive
        };
        CohomologyTable { name: name.into(), degrees, twists, cells, euler_consistent, verdict }
    }
}

// ---------------------------------------------------------------------------
// Projective space

/// `h^0(P^N, O(s))`.
pub fn h0_projective(big_n: usize, s: i64) -> u64 {
    if s < 0 {
        0
    } else {
        binomial(s as usize + big_n, big_n) as u64
    }
}

/// `h^N(P^N, O(s))`.
pub fn htop_projective(big_n: usize, s: i64) -> u64 {
    let k = -s - 1;
    if k < big_n as i64 {
        0
    } else {
        binomial(k as usize, big_n) as u64
    }
}

/// `χ(P^N, O(s))` as the polynomial `C(s+N, N)`.
pub fn chi_projective(big_n: usize, s: i64) -> i64 {
    h0_projective(big_n, s) as i64 + if big_n % 2 == 0 { 1 } else { -1 } * htop_projective(big_n, s) as i64
}

// ---------------------------------------------------------------------------
// Theta-bundle

struct MapRank {
    source: usize,
    target: usize,
    rank: usize,
}

fn index_of(monos: &[crate::multipoly::Monomial]) -> HashMap<Vec<u16>, usize> {
    monos.iter().enumerate().map(|(k, m)| (m.0.clone(), k)).collect()
}

/// `V ⊗ S^(t-1) -> V* ⊗ S^t`, `e_j ⊗ x^c -> sum_i f(e_i)(e_j, -) ⊗ x_i x^c`.
fn sections_map<F: FieldOps>(tn: &TypedNet<F>, t: i64) -> MapRank {
    let (n, dim) = (tn.n, tn.two_m);
    if t < 0 {
        return MapRank { source: 0, target: 0, rank: 0 };
    }
    let tgt_monos = monomials_of_degree(n, t as usize);
    if t == 0 {
        return MapRank { source: 0, target: dim * tgt_monos.len(), rank: 0 };
    }
    let src_monos = monomials_of_degree(n, t as usize - 1);
    let idx = index_of(&tgt_monos);
    let cols = dim * tgt_monos.len();
    let f = &tn.f;
    let mut rows = Vec::with_capacity(dim * src_monos.len());
    for j in 0..dim {
        for c in &src_monos {
            let mut row = vec![f.zero(); cols];
            for (i, m) in tn.mats.iter().enumerate() {
                let mut e = c.0.clone();
                e[i] += 1;
                let k = idx[&e];
                for r in 0..dim {
                    let pos = r * tgt_monos.len() + k;
                    row[pos] = f.add(&row[pos], &m[j][r]);
                }
            }
            rows.push(row);
        }
    }
    let rank = linalg::rank(f, &rows, cols);
    MapRank { source: rows.len(), target: cols, rank }
}

/// The same map on `H^N`: `e_j ⊗ [b] -> sum_i f(e_i)(e_j, -) ⊗ [b - e_i]`.
fn top_map<F: FieldOps>(tn: &TypedNet<F>, t: i64) -> MapRank {
    let (n, dim) = (tn.n, tn.two_m);
    let src_deg = -(t - 1) - n as i64;
    let tgt_deg = -t - n as i64;
    if src_deg < 0 {
        return MapRank { source: 0, target: 0, rank: 0 };
    }
    let src_monos = monomials_of_degree(n, src_deg as usize);
    if tgt_deg < 0 {
        return MapRank { source: dim * src_monos.len(), target: 0, rank: 0 };
    }
    let tgt_monos = monomials_of_degree(n, tgt_deg as usize);
    let idx = index_of(&tgt_monos);
    let cols = dim * tgt_monos.len();
    let f = &tn.f;
    let mut rows = Vec::with_capacity(dim * src_monos.len());
    for j in 0..dim {
        for b in &src_monos {
            let mut row = vec![f.zero(); cols];
            for (i, m) in tn.mats.iter().enumerate() {
                if b.0[i] == 0 {
                    continue;
                }
                let mut e = b.0.clone();
                e[i] -= 1;
                let k = idx[&e];
                for r in 0..dim {
                    let pos = r * tgt_monos.len() + k;
                    row[pos] = f.add(&row[pos], &m[j][r]);
                }
            }
            rows.push(row);
        }
    }
    let rank = linalg::rank(f, &rows, cols);
    MapRank { source: rows.len(), target: cols, rank }
}

/// `h^p(P(A), E(t))` for `p = 0..n-1`, without the regularity check.
fn theta_row(net: &ANet, t: i64) -> Result<Vec<u64>> {
    let n = net.n();
    if n < 3 {
        return Err(Error::InvalidInput("theta cohomology needs n >= 3".into()));
    }
    with_typed_net!(net, tn => {
        let h0 = sections_map(&tn, t);
        if h0.rank != h0.source {
            return Err(Error::IrregularNet("V ⊗ O(-1) -> V* ⊗ O is not injective on sections".into()));
        }
        let top = top_map(&tn, t);
        let mut row = vec![0u64; n];
        row[0] = (h0.target - h0.rank) as u64;
        row[n - 2] += (top.source - top.rank) as u64;
        row[n - 1] = (top.target - top.rank) as u64;
        Ok(row)
    })
}

fn require_regular(net: &ANet, cfg: &HilbertConfig) -> Result<()> {
    let v = is_regular(net, cfg)?;
    if !v.is_yes() {
        return Err(Error::IrregularNet(v.witness));
    }
    Ok(())
}

/// `h^p(P(A), E(t))`, `p = 0..n-1`, for a regular net.
pub fn theta_cohomology(net: &ANet, t: i64, cfg: &HilbertConfig) -> Result<Vec<u64>> {
    require_regular(net, cfg)?;
    theta_row(net, t)
}

/// `χ(E(t)) = 2m (χ(O(t)) - χ(O(t-1)))`.
pub fn theta_euler_characteristic(n: usize, two_m: usize, t: i64) -> i64 {
    two_m as i64 * (chi_projective(n - 1, t) - chi_projective(n - 1, t - 1))
}

fn alternating(row: &[u64]) -> i64 {
    row.iter().enumerate().map(|(p, &h)| if p % 2 == 0 { h as i64 } else { -(h as i64) }).sum()
}

/// Twists `-(n-1)..=0`: `V*` at `(0, 0)`, a copy of `V` at `(n-2, -(n-1))`,
/// zero elsewhere.
pub fn theta_window_table(net: &ANet, cfg: &HilbertConfig) -> Result<CohomologyTable> {
    require_regular(net, cfg)?;
    let (n, dim) = (net.n(), net.two_m() as u64);
    let twists: Vec<i64> = (-(n as i64 - 1)..=0).collect();
    let rows: HashMap<i64, Vec<u64>> = twists.iter().map(|&t| Ok((t, theta_row(net, t)?))).collect::<Result<_>>()?;
    let euler = twists.iter().all(|&t| alternating(&rows[&t]) == theta_euler_characteristic(n, net.two_m(), t));
    Ok(CohomologyTable::assemble(
        &format!("theta-bundle twists, n = {n}, 2m = {dim}"),
        (0..n).collect(),
        twists,
        |p, t| Some(rows[&t][p]),
        |p, t| {
            let v = if (p, t) == (0, 0) || (p + 2 == n && t == -(n as i64 - 1)) { dim } else { 0 };
            Some(Expected::Exact { value: v })
        },
        Some(euler),
    ))
}

/// `χ(𝓔(t))` for a charge-`k` instanton on an index-2 Fano threefold of
/// degree `d`.
pub fn instanton_euler_characteristic(d: i64, k: i64, t: i64) -> i64 {
    2 * (d * t * (t + 1) * (t + 2) / 6 + t + 1) - k * (t + 1)
}

/// The table of `h^p(𝓔(t))`, `t = -3..=1`, forced by Serre duality, the
/// Koszul complex of a codimension-3 linear section and Riemann-Roch.
pub fn expected_instanton_table(d: u64, k: u64) -> Result<CohomologyTable> {
    if k < 2 {
        return Err(Error::InvalidInput(format!("charge {k} is below the minimal instanton charge 2")));
    }
    let h1_top = 2 * k - 4;
    let chi1 = 2 * d as i64 - 2 * k as i64 + 4;
    let h0_top = if h1_top == 0 {
        Expected::Exact { value: chi1.max(0) as u64 }
    } else {
        Expected::Range { lo: chi1.max(0) as u64, hi: 2 * d }
    };
    let bounded = |hi: u64| if hi == 0 { Expected::Exact { value: 0 } } else { Expected::Range { lo: 0, hi } };
    let expected = move |p: usize, t: i64| -> Option<Expected> {
        Some(match (p, t) {
            (3, -3) | (0, 1) => h0_top,
            (2, -3) | (1, 1) => bounded(h1_top),
            (2, -2) | (1, 0) => Expected::Exact { value: k - 2 },
            _ => Expected::Exact { value: 0 },
        })
    };
    Ok(CohomologyTable::assemble(
        &format!("instanton table, d = {d}, k = {k}"),
        (0..4).collect(),
        (-3..=1).collect(),
        |_, _| None,
        expected,
        None,
    ))
}

/// `h^p(Y, 𝓔(t))` for `𝓔 = E(-1)`, `p = 0..3`, `t = -3..=1`, against the
/// charge-2 instanton table of a cubic threefold.
pub fn charge2_instanton_table(net: &ANet, cfg: &HilbertConfig) -> Result<CohomologyTable> {
    if (net.n(), net.two_m()) != (5, 6) {
        return Err(Error::InvalidInput("the charge-2 table is for n = 5, 2m = 6".into()));
    }
    require_regular(net, cfg)?;
    let twists: Vec<i64> = (-3..=1).collect();
    let rows: HashMap<i64, Vec<u64>> =
        twists.iter().map(|&t| Ok((t, theta_row(net, t - 1)?))).collect::<Result<_>>()?;
    if let Some((t, _)) = rows.iter().find(|(_, r)| r[4] != 0) {
        return Err(Error::Inconclusive(format!("h^4 of a sheaf on a threefold is nonzero at twist {t}")));
    }
    let euler = twists.iter().all(|&t| alternating(&rows[&t]) == instanton_euler_characteristic(3, 2, t));
    let expected = expected_instanton_table(3, 2)?;
    Ok(CohomologyTable::assemble(
        "charge-2 instanton E(-1) on the Pfaffian cubic",
        (0..4).collect(),
        twists,
        |p, t| Some(rows[&t][p]),
        |p, t| expected.cell(p, t).and_then(|c| c.expected),
        Some(euler),
    ))
}

// ---------------------------------------------------------------------------
// Line bundles on a hypersurface

/// `h^p(Y, O_Y(t))`, `p = 0..n-2`, for a degree-`d` hypersurface
/// `Y ⊂ P^(n-1)`, from `0 -> O(t-d) -> O(t) -> O_Y(t) -> 0`.
pub fn hypersurface_line_bundle_cohomology(d: usize, n: usize, t: i64) -> Result<Vec<u64>> {
    if n < 3 || d == 0 {
        return Err(Error::InvalidInput("need a positive-degree hypersurface in P^N, N >= 2".into()));
    }
    let big_n = n - 1;
    let mut row = vec![0u64; big_n];
    row[0] = h0_projective(big_n, t) - h0_projective(big_n, t - d as i64);
    row[big_n - 1] += htop_projective(big_n, t - d as i64) - htop_projective(big_n, t);
    Ok(row)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtRow {
    pub pair: String,
    pub computed: Vec<u64>,
    pub expected: Vec<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExceptionalPairReport {
    pub rows: Vec<ExtRow>,
    pub verdict: Tri,
}

/// `(O, O(1))` on a degree-`d` hypersurface: both exceptional and
/// `Ext^*(O(1), O) = H^*(O_Y(-1)) = 0`.
pub fn exceptional_pair_check_y(d: usize, n: usize) -> Result<ExceptionalPairReport> {
    let len = n - 1;
    let mut unit = vec![0u64; len];
    unit[0] = 1;
    let rows = vec![
        ExtRow { pair: "Ext(O, O)".into(), computed: hypersurface_line_bundle_cohomology(d, n, 0)?, expected: unit.clone() },
        ExtRow { pair: "Ext(O(1), O(1))".into(), computed: hypersurface_line_bundle_cohomology(d, n, 0)?, expected: unit },
        ExtRow {
            pair: "Ext(O(1), O)".into(),
            computed: hypersurface_line_bundle_cohomology(d, n, -1)?,
            expected: vec![0; len],
        },
    ];
    let verdict = if rows.iter().all(|r| r.computed == r.expected) { Tri::Yes } else { Tri::No };
    Ok(ExceptionalPairReport { rows, verdict })
}

// ---------------------------------------------------------------------------
// Ideal sheaves of lines

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IdealTwist {
    pub t: i64,
    /// `h^p(Y, I_M(t))`, `p = 0..dim Y`.
    pub h: Vec<u64>,
    pub restriction_rank: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LineMembership {
    pub twists: Vec<IdealTwist>,
    pub verdict: Tri,
}

/// Rank of restricting degree-`t` forms on `P^(n-1)` to the line through
/// `a0, a1`.
fn restriction_rank<F: FieldOps>(f: &F, a0: &[F::El], a1: &[F::El], t: usize) -> usize {
    let monos = monomials_of_degree(a0.len(), t);
    let rows: Vec<Vec<F::El>> = monos
        .iter()
        .map(|m| {
            let mut prod = vec![f.one()];
            for (i, &e) in m.0.iter().enumerate() {
                for _ in 0..e {
                    let mut next = vec![f.zero(); prod.len() + 1];
                    for (k, c) in prod.iter().enumerate() {
                        next[k] = f.add(&next[k], &f.mul(c, &a0[i]));
                        next[k + 1] = f.add(&next[k + 1], &f.mul(c, &a1[i]));
                    }
                    prod = next;
                }
            }
            prod
        })
        .collect();
    linalg::rank(f, &rows, t + 1)
}

/// `H^*(Y, I_M(t)) = 0` for `t ∈ {0, -1}`: `I_M` is orthogonal to `O` and
/// `O(1)`.
pub fn line_ideal_membership(net: &ANet, a0: &[FieldElement], a1: &[FieldElement]) -> Result<LineMembership> {
    let n = net.n();
    if n < 5 {
        return Err(Error::InvalidInput("line ideal checks need dim Y >= 3".into()));
    }
    let pf = pfaffian_hypersurface(net)?;
    let d = pf.degree().unwrap_or(0);
    with_typed_net!(net, tn => {
        let f = &tn.f;
        let x: Vec<_> = a0.iter().map(|c| f.lower(c)).collect::<Result<_>>()?;
        let y: Vec<_> = a1.iter().map(|c| f.lower(c)).collect::<Result<_>>()?;
        if x.len() != n || y.len() != n || linalg::rank(f, &[x.clone(), y.clone()], n) < 2 {
            return Err(Error::InvalidInput("a line needs two independent points of P(A)".into()));
        }
        let cpf = CompiledPoly::new(f, &pf)?;
        if cpf.restrict_to_line(f, &x, &y).iter().any(|c| !f.is_zero(c)) {
            return Err(Error::NotOnVariety("the line is not contained in Y".into()));
        }
        let dim_y = n - 2;
        let mut twists = Vec::new();
        for t in [0i64, -1] {
            let oy = hypersurface_line_bundle_cohomology(d, n, t)?;
            let h0_line = if t >= 0 { t as u64 + 1 } else { 0 };
            let h1_line = if t <= -2 { (-t - 1) as u64 } else { 0 };
            let rank = if t >= 0 { restriction_rank(f, &x, &y, t as usize) as u64 } else { 0 };
            let mut h = vec![0u64; dim_y + 1];
            h[0] = oy[0] - rank;
            h[1] = h0_line - rank + oy[1];
            h[2] = h1_line + oy[2];
            for p in 3..=dim_y {
                h[p] = oy[p];
            }
            twists.push(IdealTwist { t, h, restriction_rank: rank });
        }
        let verdict = if twists.iter().all(|tw| tw.h.iter().all(|&v| v == 0)) { Tri::Yes } else { Tri::No };
        Ok(LineMembership { twists, verdict })
    })
}

/// The theta-bundle row as plain integers, for display.
pub fn row_text(row: &[u64]) -> String {
    let parts: Vec<String> = row.iter().map(|v| v.to_string()).collect();
    format!("({})", parts.join(","))
}
