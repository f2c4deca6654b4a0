//! Multi-index combinatorics, the coefficients `M^h_{i,L}` and the linear
//! systems `MM`, `QQ`, `PP` whose kernels carry the formal abelian relations.
//!
//! Conventions (shared with the reference worksheet so intermediate matrices
//! can be compared entry by entry):
//!
//! * rows are multi-indices, degree-major (`|L| = 1, 2, …`), each degree in
//!   the order of [`enum_multiindices`];
//! * columns of `MM` and `QQ` are pairs `(h, i)` laid out in `h`-major blocks
//!   of width `d`: column `h·d + i`.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::error::Error;
use crate::jet::{jet_eval, EvalContext, Jet, JetSpace};
use crate::linalg::JetMatrix;
use crate::sample::SamplePoint;
use crate::{Rational, WebSpec};

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for j in 0..k {
        acc = acc * (n - j) as u128 / (j + 1) as u128;
    }
    acc as usize
}

/// Dimension of the space of homogeneous polynomials of degree `h` in `n`
/// variables.
pub fn c(n: usize, h: usize) -> usize {
    binomial(n - 1 + h, h)
}

/// The integer `k0` with `c(n, k0) <= d < c(n, k0 + 1)`, and whether `d = c(n, k0)`.
pub fn k0_of(n: usize, d: usize) -> (usize, bool) {
    assert!(n >= 2 && d > n, "need d > n >= 2");
    let mut k0 = 1;
    while c(n, k0 + 1) <= d {
        k0 += 1;
    }
    (k0, c(n, k0) == d)
}

/// Upper bound `Σ_{k=1}^{k0} (d - c(n, k))` on the rank of an ordinary d-web.
pub fn pi_prime(n: usize, d: usize) -> usize {
    let (k0, _) = k0_of(n, d);
    (1..=k0).map(|k| d - c(n, k)).sum()
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MultiIndex(pub Vec<u32>);

impl MultiIndex {
    pub fn degree(&self) -> usize {
        self.0.iter().map(|&l| l as usize).sum()
    }

    /// The unit multi-index `1_λ` (0-based `lambda`).
    pub fn unit(n: usize, lambda: usize) -> MultiIndex {
        let mut v = vec![0; n];
        v[lambda] = 1;
        MultiIndex(v)
    }

    /// `L - 1_λ`, if `ℓ_λ >= 1`.
    pub fn minus(&self, lambda: usize) -> Option<MultiIndex> {
        let mut v = self.0.clone();
        v[lambda] = v[lambda].checked_sub(1)?;
        Some(MultiIndex(v))
    }

    pub fn plus(&self, lambda: usize) -> MultiIndex {
        let mut v = self.0.clone();
        v[lambda] += 1;
        MultiIndex(v)
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(u32::to_string).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// Multi-indices of degree `h` in `n` variables: `(ℓ_1..ℓ_{n-1})` read as the
/// base-`(h+1)` digits of an increasing integer (ℓ_1 most significant), kept
/// when their sum is at most `h`, and completed by `ℓ_n = h - Σ`.
pub fn enum_multiindices(n: usize, h: usize) -> Vec<MultiIndex> {
    let base = h + 1;
    let total = base.pow((n - 1) as u32);
    let mut out = Vec::with_capacity(c(n, h));
    for v in 0..total {
        let mut digits = vec![0u32; n];
        let mut rest = v;
        for k in (0..n - 1).rev() {
            digits[k] = (rest % base) as u32;
            rest /= base;
        }
        let sum: usize = digits[..n - 1].iter().map(|&x| x as usize).sum();
        if sum <= h {
            digits[n - 1] = (h - sum) as u32;
            out.push(MultiIndex(digits));
        }
    }
    out
}

/// All multi-indices of degree `1..=max_degree`, degree-major.
pub fn row_multiindices(n: usize, max_degree: usize) -> Vec<MultiIndex> {
    (1..=max_degree).flat_map(|h| enum_multiindices(n, h)).collect()
}

/// Derived integers of a d-web in dimension n.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct WebDims {
    pub n: usize,
    pub d: usize,
    pub k0: usize,
    /// Number of unknowns `w_i^{(h)}`, `h <= k0 - 2`: `(k0 - 1)·d`.
    pub alpha: usize,
    /// `alpha - ro`.
    pub beta: usize,
    /// Rank of the bundle, equal to `π'(n, d)`.
    pub ro: usize,
    pub calibrated: bool,
}

impl WebDims {
    pub fn new(n: usize, d: usize) -> WebDims {
        let (k0, calibrated) = k0_of(n, d);
        let alpha = (k0 - 1) * d;
        let ro = pi_prime(n, d);
        WebDims {
            n,
            d,
            k0,
            alpha,
            beta: alpha.saturating_sub(ro),
            ro,
            calibrated,
        }
    }

    /// Number of equations `E_L` with `1 <= |L| <= k0 - 1` (rows of `MM`).
    pub fn mm_rows(&self) -> usize {
        binomial(self.n + self.k0 - 1, self.k0 - 1) - 1
    }

    /// Size of block `R(h)`: the `c(n, h+1)` dependent unknowns of order `h`.
    pub fn nr(&self, h: usize) -> usize {
        c(self.n, h + 1)
    }

    /// Size of block `S(h)`: the free unknowns of order `h`.
    pub fn ns(&self, h: usize) -> usize {
        self.d - self.nr(h)
    }

    /// 0-based positions of `R(h)` for all `h`, in order.
    pub fn r_positions(&self) -> Vec<usize> {
        (0..self.k0.saturating_sub(1))
            .flat_map(|h| (h * self.d..h * self.d + self.nr(h)).collect::<Vec<_>>())
            .collect()
    }

    /// 0-based positions of `S(h)` for all `h`, in order.
    pub fn s_positions(&self) -> Vec<usize> {
        (0..self.k0.saturating_sub(1))
            .flat_map(|h| (h * self.d + self.nr(h)..(h + 1) * self.d).collect::<Vec<_>>())
            .collect()
    }
}

/// First integrals expanded at one base point, with their first derivatives.
#[derive(Clone, Debug)]
pub struct WebJets {
    pub space: Arc<JetSpace>,
    pub u: Vec<Jet>,
    /// `du[i][λ] = ∂_λ u_i`.
    pub du: Vec<Vec<Jet>>,
}

impl WebJets {
    pub fn evaluate(web: &WebSpec, point: &SamplePoint, order: usize) -> Result<WebJets, Error> {
        if order == 0 {
            return Err(Error::OrderExhausted { stage: "first derivatives" });
        }
        let space = JetSpace::for_web(web, order);
        let ctx = EvalContext {
            space: space.clone(),
            point: &point.coords,
            params: &web.params,
        };
        let u = web
            .integrals
            .iter()
            .map(|e| jet_eval(e, &ctx, order))
            .collect::<Result<Vec<_>, _>>()?;
        let du = u
            .iter()
            .map(|j| (0..web.n).map(|l| j.derive(l)).collect::<Result<Vec<_>, _>>())
            .collect::<Result<Vec<_>, _>>()?;
        Ok(WebJets { space, u, du })
    }

    pub fn n(&self) -> usize {
        self.space.n_vars()
    }

    pub fn d(&self) -> usize {
        self.u.len()
    }

    /// The `n × d` matrix of first derivatives; weak general position asks
    /// for rank `n`.
    pub fn gradient_matrix(&self) -> JetMatrix {
        JetMatrix::from_fn(self.n(), self.d(), |l, i| self.du[i][l].clone())
    }

    pub fn weak_general_position(&self) -> bool {
        self.gradient_matrix().residue_rank() == self.n()
    }
}

/// Which `λ` with `ℓ_λ >= 1` the recurrence steps through to reach `L`.
/// The result does not depend on it; the choice only matters for testing.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RecurrencePath {
    /// First nonzero component, as the reference worksheet does.
    First,
    Last,
}

/// `M^h_{i,L}` for `1 <= |L| <= k0`, `0 <= h <= |L| - 1`.
#[derive(Clone, Debug)]
pub struct MTable {
    n: usize,
    k0: usize,
    index: HashMap<MultiIndex, usize>,
    rows: Vec<MultiIndex>,
    /// `entries[i][row][h]`
    entries: Vec<Vec<Vec<Jet>>>,
    space: Arc<JetSpace>,
}

impl MTable {
    pub fn k0(&self) -> usize {
        self.k0
    }

    pub fn rows(&self) -> &[MultiIndex] {
        &self.rows
    }

    pub fn space(&self) -> &Arc<JetSpace> {
        &self.space
    }

    /// `M^h_{i,L}` (0-based `i`); zero outside `0 <= h < |L|`.
    pub fn get(&self, i: usize, h: isize, l: &MultiIndex) -> Option<Jet> {
        let row = *self.index.get(l)?;
        let entry = &self.entries[i][row];
        if h < 0 || h as usize >= entry.len() {
            let order = entry.first().map_or(0, Jet::order);
            return Some(Jet::zero(&self.space, order));
        }
        Some(entry[h as usize].clone())
    }

    fn get_ref(&self, i: usize, h: usize, row: usize) -> Option<&Jet> {
        self.entries[i][row].get(h)
    }
}

/// Runs the recurrence
/// `M^0_{1_λ} = u'_λ`,
/// `M^h_{L+1_μ} = ∂_μ M^h_L + M^{h-1}_L · u'_μ`
/// through `|L| = k0`. Each step consumes one derivative level, so entries
/// of degree `|L|` carry order `order(u) - |L|`.
pub fn build_mtable(jets: &WebJets, k0: usize, path: RecurrencePath) -> Result<MTable, Error> {
    let n = jets.n();
    let rows = row_multiindices(n, k0);
    let index: HashMap<MultiIndex, usize> = rows.iter().cloned().enumerate().map(|(k, l)| (l, k)).collect();
    let mut entries: Vec<Vec<Vec<Jet>>> = Vec::with_capacity(jets.d());
    for du in &jets.du {
        let mut table: Vec<Vec<Jet>> = Vec::with_capacity(rows.len());
        for l in &rows {
            let deg = l.degree();
            if deg == 1 {
                let lambda = l.0.iter().position(|&x| x == 1).expect("unit index");
                table.push(vec![du[lambda].clone()]);
                continue;
            }
            let mut nonzero = l.0.iter().enumerate().filter(|(_, &x)| x > 0).map(|(k, _)| k);
            let mu = match path {
                RecurrencePath::First => nonzero.next(),
                RecurrencePath::Last => nonzero.next_back(),
            }
            .expect("nonzero multi-index");
            let prev_row = index[&l.minus(mu).expect("positive component")];
            let prev = &table[prev_row];
            let mut cur = Vec::with_capacity(deg);
            for h in 0..deg {
                let from_derivative = match prev.get(h) {
                    Some(m) => Some(m.derive(mu).map_err(|_| Error::OrderExhausted { stage: "M-table" })?),
                    None => None,
                };
                let target = from_derivative
                    .as_ref()
                    .map_or(usize::MAX, Jet::order)
                    .min(prev.first().map_or(0, Jet::order).saturating_sub(1));
                let from_product = h
                    .checked_sub(1)
                    .and_then(|hm| prev.get(hm))
                    .map(|m| m.mul_to(&du[mu], target));
                let value = match (from_derivative, from_product) {
                    (Some(a), Some(b)) => &a + &b,
                    (Some(a), None) => a,
                    (None, Some(b)) => b,
                    (None, None) => unreachable!("h < |L|"),
                };
                cur.push(value);
            }
            table.push(cur);
        }
        entries.push(table);
    }
    Ok(MTable {
        n,
        k0,
        index,
        rows,
        entries,
        space: jets.space.clone(),
    })
}

/// The assembled linear systems at one point.
#[derive(Clone, Debug)]
pub struct Systems {
    /// Equations `E_L`, `1 <= |L| <= k0 - 1`; `mm_rows × alpha`.
    pub mm: JetMatrix,
    /// Equations `E_L`, `|L| = k0`, restricted to unknowns of order `<= k0 - 2`;
    /// `c(n, k0) × alpha`.
    pub qq: JetMatrix,
    /// `P_{k0}`: entries `M^{k0-1}_{i,L}`, `|L| = k0`; `c(n, k0) × d`.
    pub pp: JetMatrix,
}

/// Coefficient matrix of the equations `E_L` for the given rows, with
/// columns `(h, i)` for `h < blocks`.
fn equation_block(mt: &MTable, rows: &[MultiIndex], d: usize, blocks: usize) -> JetMatrix {
    JetMatrix::from_fn(rows.len(), blocks * d, |r, col| {
        let (h, i) = (col / d, col % d);
        mt.get(i, h as isize, &rows[r]).expect("row multi-index in table")
    })
}

pub fn assemble_systems(mt: &MTable, dims: &WebDims) -> Systems {
    let n = dims.n;
    let k0 = dims.k0;
    let d = dims.d;
    let lower: Vec<MultiIndex> = row_multiindices(n, k0 - 1);
    let top = enum_multiindices(n, k0);
    let mm = equation_block(mt, &lower, d, k0 - 1);
    let qq = equation_block(mt, &top, d, k0 - 1);
    let pp = p_matrix(mt, k0, d);
    Systems { mm, qq, pp }
}

/// `P_h = (M^{h-1}_{i,L})_{|L| = h}`, rows `L`, columns `i`.
pub fn p_matrix(mt: &MTable, h: usize, d: usize) -> JetMatrix {
    let rows = enum_multiindices(mt.n, h);
    JetMatrix::from_fn(rows.len(), d, |r, i| {
        let row = mt.index[&rows[r]];
        mt.get_ref(i, h - 1, row).expect("top coefficient present").clone()
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Ordinariness {
    pub rank_mm: usize,
    pub expected_mm: usize,
    pub rank_pp: usize,
    pub expected_pp: usize,
    pub ordinary: bool,
}

/// Ordinary at the point iff `MM` has full row rank and `P_{k0}` has rank
/// `c(n, k0)` (which is `d` for a calibrated web).
pub fn ordinariness_check(sys: &Systems, dims: &WebDims) -> Ordinariness {
    let rank_mm = sys.mm.residue_rank();
    let rank_pp = sys.pp.residue_rank();
    let expected_mm = dims.mm_rows();
    let expected_pp = c(dims.n, dims.k0);
    Ordinariness {
        rank_mm,
        expected_mm,
        rank_pp,
        expected_pp,
        ordinary: rank_mm == expected_mm && rank_pp == expected_pp,
    }
}

/// Rational residue of a jet, for reports.
pub fn residue_of(j: &Jet) -> Rational {
    j.residue().clone()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse_expr;
    use std::collections::{BTreeMap, BTreeSet};

    fn mi(v: &[u32]) -> MultiIndex {
        MultiIndex(v.to_vec())
    }

    fn q(n: i64) -> Rational {
        Rational::from_integer(n.into())
    }

    fn web(n: usize, srcs: &[&str]) -> WebSpec {
        let integrals = srcs.iter().map(|s| parse_expr(s, n, &BTreeSet::new()).unwrap()).collect();
        WebSpec::new(n, integrals, BTreeMap::new()).unwrap()
    }

    #[test]
    fn counting_functions() {
        assert_eq!(c(2, 4), 5);
        assert_eq!(c(3, 4), 15);
        assert_eq!(c(4, 4), 35);
        assert_eq!(c(7, 0), 1);
        assert_eq!(k0_of(2, 5), (4, true));
        assert_eq!(k0_of(3, 6), (2, true));
        assert_eq!(k0_of(2, 8), (7, true));
        assert_eq!(k0_of(3, 7), (2, false));
        assert_eq!(pi_prime(2, 5), 6);
        assert_eq!(pi_prime(3, 15), 26);
        assert_eq!(pi_prime(4, 35), 71);
        assert_eq!(pi_prime(5, 70), 155);
        assert_eq!(pi_prime(2, 8), 21);
        assert_eq!(pi_prime(3, 7), 5);
    }

    #[test]
    fn enumeration_order() {
        assert_eq!(enum_multiindices(2, 2), vec![mi(&[0, 2]), mi(&[1, 1]), mi(&[2, 0])]);
        assert_eq!(
            enum_multiindices(3, 1),
            vec![mi(&[0, 0, 1]), mi(&[0, 1, 0]), mi(&[1, 0, 0])]
        );
        assert_eq!(enum_multiindices(4, 4).len(), 35);
    }

    #[test]
    fn dims_of_bol() {
        let dims = WebDims::new(2, 5);
        assert_eq!((dims.k0, dims.alpha, dims.beta, dims.ro), (4, 15, 9, 6));
        assert_eq!(dims.mm_rows(), 9);
        assert_eq!(dims.r_positions(), vec![0, 1, 5, 6, 7, 10, 11, 12, 13]);
        assert_eq!(dims.s_positions(), vec![2, 3, 4, 8, 9, 14]);
    }

    #[test]
    fn mtable_small_cases() {
        let w = web(2, &["x1*x2", "x1^2 + x2", "x1 + x2"]);
        let p = SamplePoint::explicit(vec![q(2), q(3)]);
        let jets = WebJets::evaluate(&w, &p, 4).unwrap();
        let mt = build_mtable(&jets, 2, RecurrencePath::First).unwrap();
        // u = x1 x2
        assert_eq!(mt.get(0, 0, &mi(&[1, 1])).unwrap().residue(), &q(1));
        assert_eq!(mt.get(0, 1, &mi(&[1, 1])).unwrap().residue(), &q(6));
        // u = x1^2 + x2 at x1 = 2: M^0_(2,0) = 2, M^1_(2,0) = (2 x1)^2 = 16
        assert_eq!(mt.get(1, 0, &mi(&[2, 0])).unwrap().residue(), &q(2));
        assert_eq!(mt.get(1, 1, &mi(&[2, 0])).unwrap().residue(), &q(16));
        // out-of-range h are zero
        assert!(mt.get(1, 2, &mi(&[2, 0])).unwrap().is_zero());
        assert!(mt.get(1, -1, &mi(&[2, 0])).unwrap().is_zero());
    }

    #[test]
    fn weak_general_position_of_linear_web() {
        let w = web(3, &["x1", "x2", "x3", "x1 + x2 + x3"]);
        let p = SamplePoint::explicit(vec![q(2), q(3), q(5)]);
        let jets = WebJets::evaluate(&w, &p, 2).unwrap();
        assert!(jets.weak_general_position());
        let flat = web(3, &["x1", "x1 + 1", "2*x1", "x1^2"]);
        let jets = WebJets::evaluate(&flat, &p, 2).unwrap();
        assert!(!jets.weak_general_position());
    }

    #[test]
    fn parallel_integrals_are_not_ordinary() {
        let w = web(2, &["x1", "x2", "x1 + x2", "2*x1 + 2*x2", "x1*x2"]);
        let dims = WebDims::new(2, 5);
        for k in 0..3 {
            let p = crate::sample::sample_point(2, 3, k, 1000);
            let jets = WebJets::evaluate(&w, &p, dims.k0 + 1).unwrap();
            let mt = build_mtable(&jets, dims.k0, RecurrencePath::First).unwrap();
            let sys = assemble_systems(&mt, &dims);
            let verdict = ordinariness_check(&sys, &dims);
            assert!(verdict.rank_pp < dims.d);
            assert!(!verdict.ordinary);
        }
    }

    #[test]
    fn first_row_of_mm() {
        let w = web(2, &["x1", "x2", "x1 + x2", "x1 - x2", "x1*x2"]);
        let dims = WebDims::new(2, 5);
        let p = SamplePoint::explicit(vec![q(3), q(7)]);
        let jets = WebJets::evaluate(&w, &p, dims.k0 + 1).unwrap();
        let mt = build_mtable(&jets, dims.k0, RecurrencePath::First).unwrap();
        let sys = assemble_systems(&mt, &dims);
        assert_eq!(sys.mm.shape(), (9, 15));
        assert_eq!(sys.qq.shape(), (5, 15));
        assert_eq!(sys.pp.shape(), (5, 5));
        // first row is L = (0,1): entries ∂_2 u_i in the h = 0 block
        let row: Vec<Rational> = (0..5).map(|i| sys.mm.get(0, i).residue().clone()).collect();
        assert_eq!(row, vec![q(0), q(1), q(1), q(-1), q(3)]);
        // second row L = (1,0)
        let row: Vec<Rational> = (0..5).map(|i| sys.mm.get(1, i).residue().clone()).collect();
        assert_eq!(row, vec![q(1), q(0), q(1), q(1), q(7)]);
        // PP row for L = (4,0) (last in degree-4 order), column u_1 = x: (1)^4
        assert_eq!(sys.pp.get(4, 0).residue(), &q(1));
        // h >= 1 blocks vanish on degree-one rows
        assert!((5..15).all(|col| sys.mm.get(0, col).is_zero()));
    }
}
