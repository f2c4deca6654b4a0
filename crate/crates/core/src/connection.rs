//! The tautological connection in the trivialization by kernel vectors of
//! `MM`, and its curvature.
//!
//! Unknown vectors have length `alpha = (k0 - 1)·d`, block `h` holding the
//! `d` values `w_i^{(h)}`. In every block the first `c(n, h+1)` positions are
//! solved for (the `R` positions) and the remaining ones are free (`S`).

use num_traits::Zero;
use serde::Serialize;

use crate::engine::{Systems, WebDims, WebJets};
use crate::error::Error;
use crate::jet::Jet;
use crate::linalg::JetMatrix;

#[derive(Clone, Debug)]
pub struct Trivialization {
    pub r_positions: Vec<usize>,
    pub s_positions: Vec<usize>,
    /// The square submatrix of `MM` on the `R` columns.
    pub yyy: JetMatrix,
    /// `-YYY⁻¹·B`, `beta × ro`: the `R` coordinates of each basis vector.
    pub a: JetMatrix,
    /// `alpha × ro`; column `j` is the `j`-th basis section.
    pub w: JetMatrix,
}

impl Trivialization {
    pub fn ro(&self) -> usize {
        self.w.cols()
    }

    pub fn basis_vector(&self, j: usize) -> Vec<Jet> {
        self.w.column(j)
    }
}

/// Basis of `ker MM`: free `S` coordinates set to the standard basis, `R`
/// coordinates solved through `YYY`.
pub fn kernel_basis(mm: &JetMatrix, dims: &WebDims) -> Result<Trivialization, Error> {
    let r_positions = dims.r_positions();
    let s_positions = dims.s_positions();
    if mm.cols() != dims.alpha || r_positions.len() != mm.rows() {
        return Err(Error::ShapeMismatch(format!(
            "kernel_basis: MM is {:?}, expected {} columns and {} rows",
            mm.shape(),
            dims.alpha,
            r_positions.len()
        )));
    }
    let yyy = mm.select_cols(&r_positions);
    let b = mm.select_cols(&s_positions);
    // The residue rank is cheap and catches structural singularity before
    // any jet elimination.
    if yyy.residue_rank() < yyy.rows() {
        return Err(Error::SingularAtPoint { what: "YYY" });
    }
    let a = yyy.invert()?.matmul(&b)?.neg();
    let order = a.min_order();
    let space = mm.entries()[0].space().clone();
    let ro = s_positions.len();
    let mut w = JetMatrix::zeros(&space, dims.alpha, ro, order);
    for (k, &pos) in r_positions.iter().enumerate() {
        for j in 0..ro {
            w.set(pos, j, a.get(k, j).clone());
        }
    }
    for (j, &pos) in s_positions.iter().enumerate() {
        w.set(pos, j, Jet::one(&space, order));
    }
    Ok(Trivialization {
        r_positions,
        s_positions,
        yyy,
        a,
        w,
    })
}

/// `U = -PP⁻¹·QQ`: the top-order unknowns `w^{(k0-1)}` in terms of the lower ones.
pub fn prolongation(qq: &JetMatrix, pp: &JetMatrix) -> Result<JetMatrix, Error> {
    if pp.residue_rank() < pp.rows() {
        return Err(Error::SingularAtPoint { what: "PP" });
    }
    Ok(pp.solve(qq)?.neg())
}

/// Covariant derivative of `v` in direction `j` (0-based). Output entries are
/// one order below the lowest input order.
pub fn nabla(v: &[Jet], j: usize, u: &JetMatrix, jets: &WebJets, dims: &WebDims) -> Result<Vec<Jet>, Error> {
    let d = dims.d;
    if v.len() != dims.alpha {
        return Err(Error::ShapeMismatch(format!("nabla: vector of length {}, expected {}", v.len(), dims.alpha)));
    }
    let in_order = v.iter().map(Jet::order).min().unwrap_or(0);
    if in_order == 0 {
        return Err(Error::OrderExhausted { stage: "covariant derivative" });
    }
    let target = in_order - 1;
    let last = dims.k0 - 2;
    let uv = u.matmul_to(&JetMatrix::column_vector(v.to_vec()), target)?;
    let mut out = Vec::with_capacity(dims.alpha);
    for h in 0..=last {
        for i in 0..d {
            let dv = v[i + h * d].derive(j)?.truncate(target);
            let next = if h < last { &v[i + (h + 1) * d] } else { uv.get(i, 0) };
            let t = next.mul_to(&jets.du[i][j], target);
            out.push(&dv - &t);
        }
    }
    Ok(out)
}

/// Everything computed at one point, from the kernel basis to the curvature.
#[derive(Clone, Debug)]
pub struct ConnectionData {
    pub triv: Trivialization,
    pub u: JetMatrix,
    /// `a[i]`: component on `dx_{i+1}`, `ro × ro`.
    pub a: Vec<JetMatrix>,
    /// `(r, s, K(r,s))` for `r < s`, 0-based.
    pub k: Vec<(usize, usize, JetMatrix)>,
}

/// `N(i)` with columns `∇_i W(j)`.
pub fn covariant_derivatives(
    triv: &Trivialization,
    u: &JetMatrix,
    jets: &WebJets,
    dims: &WebDims,
    i: usize,
) -> Result<JetMatrix, Error> {
    let cols = (0..triv.ro())
        .map(|j| nabla(&triv.basis_vector(j), i, u, jets, dims))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(JetMatrix::from_fn(dims.alpha, triv.ro(), |r, c| cols[c][r].clone()))
}

/// Connection matrices: the `S` rows of each `N(i)`.
pub fn connection_form(
    triv: &Trivialization,
    u: &JetMatrix,
    jets: &WebJets,
    dims: &WebDims,
) -> Result<Vec<JetMatrix>, Error> {
    (0..dims.n)
        .map(|i| Ok(covariant_derivatives(triv, u, jets, dims, i)?.select_rows(&triv.s_positions)))
        .collect()
}

/// `K(r,s) = ∂_s A(r) - ∂_r A(s) + A(s)·A(r) - A(r)·A(s)` for `r < s`.
pub fn curvature(a: &[JetMatrix]) -> Result<Vec<(usize, usize, JetMatrix)>, Error> {
    let mut out = Vec::new();
    for s in 1..a.len() {
        for r in 0..s {
            out.push((r, s, curvature_component(a, r, s)?));
        }
    }
    Ok(out)
}

/// The curvature formula at an arbitrary ordered pair.
pub fn curvature_component(a: &[JetMatrix], r: usize, s: usize) -> Result<JetMatrix, Error> {
    let ds_ar = a[r].derive(s).map_err(|_| Error::OrderExhausted { stage: "curvature" })?;
    let dr_as = a[s].derive(r).map_err(|_| Error::OrderExhausted { stage: "curvature" })?;
    let order = ds_ar.min_order().min(dr_as.min_order());
    let sr = a[s].matmul_to(&a[r], order)?;
    let rs = a[r].matmul_to(&a[s], order)?;
    ds_ar.sub(&dr_as)?.add(&sr)?.sub(&rs)
}

/// Coefficients of `[∇_r, ∇_s] W(j)` in the basis, computed by applying the
/// covariant derivative twice and reading off the free coordinates. With the
/// curvature convention of [`curvature`] this equals `-K(r,s)`.
pub fn commutator_matrix(
    triv: &Trivialization,
    u: &JetMatrix,
    jets: &WebJets,
    dims: &WebDims,
    r: usize,
    s: usize,
) -> Result<JetMatrix, Error> {
    let mut cols = Vec::with_capacity(triv.ro());
    for j in 0..triv.ro() {
        let w = triv.basis_vector(j);
        let ws = nabla(&w, s, u, jets, dims)?;
        let wr = nabla(&w, r, u, jets, dims)?;
        let rs = nabla(&ws, r, u, jets, dims)?;
        let sr = nabla(&wr, s, u, jets, dims)?;
        cols.push(
            triv.s_positions
                .iter()
                .map(|&p| &rs[p] - &sr[p])
                .collect::<Vec<_>>(),
        );
    }
    Ok(JetMatrix::from_fn(triv.ro(), triv.ro(), |k, j| cols[j][k].clone()))
}

/// Runs kernel basis, prolongation, connection form and curvature.
pub fn compute_connection(sys: &Systems, jets: &WebJets, dims: &WebDims) -> Result<ConnectionData, Error> {
    let triv = kernel_basis(&sys.mm, dims)?;
    let u = prolongation(&sys.qq, &sys.pp)?;
    let a = connection_form(&triv, &u, jets, dims)?;
    let k = curvature(&a)?;
    Ok(ConnectionData { triv, u, a, k })
}

/// A nonzero curvature entry.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Witness {
    /// 1-based direction indices, `r < s`.
    pub r: usize,
    pub s: usize,
    /// 1-based matrix position.
    pub row: usize,
    pub col: usize,
    /// Value at the point, with nilpotent parts.
    pub value: String,
}

impl ConnectionData {
    pub fn is_flat(&self) -> bool {
        self.k.iter().all(|(_, _, k)| k.is_zero())
    }

    /// First nonzero curvature entry in `(s, r, row, col)` order.
    pub fn witness(&self) -> Option<Witness> {
        for (r, s, k) in &self.k {
            for row in 0..k.rows() {
                for col in 0..k.cols() {
                    let e = k.get(row, col);
                    if !e.is_zero() {
                        return Some(Witness {
                            r: r + 1,
                            s: s + 1,
                            row: row + 1,
                            col: col + 1,
                            value: format_value(e),
                        });
                    }
                }
            }
        }
        None
    }

    /// True when every curvature entry has zero rational constant term.
    pub fn residue_flat(&self) -> bool {
        self.k
            .iter()
            .all(|(_, _, k)| k.entries().iter().all(|e| e.constant_term().rational_part().is_zero()))
    }

    /// True when some curvature entry has a nonzero nilpotent coefficient.
    pub fn has_nilpotent_curvature(&self) -> bool {
        self.k.iter().any(|(_, _, k)| {
            k.entries()
                .iter()
                .any(|e| e.constant_term().coeffs().iter().skip(1).any(|c| !c.is_zero()))
        })
    }

    pub fn subbundle(&self, indices: &[usize]) -> SubbundleResult {
        subbundle_check(&self.a, &self.k, indices)
    }
}

/// Constant term of a jet, rendered with its nilpotent parts.
pub fn format_value(j: &Jet) -> String {
    let c = j.constant_term();
    j.space().nil().format(c.coeffs())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SubbundleResult {
    pub size: usize,
    pub invariant: bool,
    pub flat_restriction: bool,
}

/// Whether the span of the basis sections `indices` (0-based) is preserved by
/// the connection, and whether the curvature restricted to it vanishes.
pub fn subbundle_check(a: &[JetMatrix], k: &[(usize, usize, JetMatrix)], indices: &[usize]) -> SubbundleResult {
    let ro = a.first().map_or(0, JetMatrix::rows);
    let inside: Vec<bool> = (0..ro).map(|x| indices.contains(&x)).collect();
    let invariant = a.iter().all(|ai| {
        indices
            .iter()
            .all(|&j| (0..ro).filter(|&r| !inside[r]).all(|r| ai.get(r, j).is_zero()))
    });
    let flat_restriction = invariant
        && k.iter()
            .all(|(_, _, km)| indices.iter().all(|&j| indices.iter().all(|&r| km.get(r, j).is_zero())));
    SubbundleResult {
        size: indices.len(),
        invariant,
        flat_restriction,
    }
}
