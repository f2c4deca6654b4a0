//! Dense matrices over the jet ring.
//!
//! The ring is local: a jet is a unit iff its rational constant term is
//! nonzero. Rank questions are therefore decided on the residue matrix
//! (constant terms, nilpotent parts dropped), and inversion pivots only on
//! units.

use std::ops::Range;
use std::sync::Arc;

use num_traits::Zero;

use crate::error::Error;
use crate::jet::{Jet, JetSpace};
use crate::Rational;

#[derive(Clone, Debug, PartialEq)]
pub struct JetMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Jet>,
}

impl JetMatrix {
    pub fn from_vec(rows: usize, cols: usize, data: Vec<Jet>) -> JetMatrix {
        assert_eq!(data.len(), rows * cols, "matrix data has wrong length");
        JetMatrix { rows, cols, data }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Jet) -> JetMatrix {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        JetMatrix { rows, cols, data }
    }

    pub fn try_from_fn(
        rows: usize,
        cols: usize,
        mut f: impl FnMut(usize, usize) -> Result<Jet, Error>,
    ) -> Result<JetMatrix, Error> {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c)?);
            }
        }
        Ok(JetMatrix { rows, cols, data })
    }

    pub fn identity(space: &Arc<JetSpace>, n: usize, order: usize) -> JetMatrix {
        JetMatrix::from_fn(n, n, |r, c| {
            if r == c {
                Jet::one(space, order)
            } else {
                Jet::zero(space, order)
            }
        })
    }

    pub fn zeros(space: &Arc<JetSpace>, rows: usize, cols: usize, order: usize) -> JetMatrix {
        JetMatrix::from_fn(rows, cols, |_, _| Jet::zero(space, order))
    }

    /// Column vector from a list of jets.
    pub fn column_vector(entries: Vec<Jet>) -> JetMatrix {
        let rows = entries.len();
        JetMatrix::from_vec(rows, 1, entries)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn get(&self, r: usize, c: usize) -> &Jet {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: Jet) {
        self.data[r * self.cols + c] = v;
    }

    pub fn entries(&self) -> &[Jet] {
        &self.data
    }

    pub fn column(&self, c: usize) -> Vec<Jet> {
        (0..self.rows).map(|r| self.get(r, c).clone()).collect()
    }

    pub fn row(&self, r: usize) -> &[Jet] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn map(&self, f: impl Fn(&Jet) -> Jet) -> JetMatrix {
        JetMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }

    pub fn try_map(&self, f: impl Fn(&Jet) -> Result<Jet, Error>) -> Result<JetMatrix, Error> {
        Ok(JetMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect::<Result<_, _>>()?,
        })
    }

    /// Lowest truncation order among the entries.
    pub fn min_order(&self) -> usize {
        self.data.iter().map(Jet::order).min().unwrap_or(usize::MAX)
    }

    pub fn truncate(&self, order: usize) -> JetMatrix {
        self.map(|j| j.truncate(order))
    }

    pub fn derive(&self, lambda: usize) -> Result<JetMatrix, Error> {
        self.try_map(|j| j.derive(lambda))
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Jet::is_zero)
    }

    pub fn residue_matrix(&self) -> Vec<Vec<Rational>> {
        (0..self.rows)
            .map(|r| self.row(r).iter().map(|j| j.residue().clone()).collect())
            .collect()
    }

    /// Rank over the rationals of the constant terms with nilpotent parts dropped.
    pub fn residue_rank(&self) -> usize {
        rational_rank(self.residue_matrix())
    }

    pub fn select_rows(&self, rows: &[usize]) -> JetMatrix {
        let mut data = Vec::with_capacity(rows.len() * self.cols);
        for &r in rows {
            data.extend_from_slice(self.row(r));
        }
        JetMatrix {
            rows: rows.len(),
            cols: self.cols,
            data,
        }
    }

    pub fn select_cols(&self, cols: &[usize]) -> JetMatrix {
        JetMatrix::from_fn(self.rows, cols.len(), |r, c| self.get(r, cols[c]).clone())
    }

    pub fn delete_rows(&self, ranges: &[Range<usize>]) -> Result<JetMatrix, Error> {
        let keep = kept_indices(self.rows, ranges)?;
        Ok(self.select_rows(&keep))
    }

    pub fn delete_cols(&self, ranges: &[Range<usize>]) -> Result<JetMatrix, Error> {
        let keep = kept_indices(self.cols, ranges)?;
        Ok(self.select_cols(&keep))
    }

    fn check_same_shape(&self, other: &JetMatrix, op: &str) -> Result<(), Error> {
        if self.shape() != other.shape() {
            return Err(Error::ShapeMismatch(format!(
                "{op}: {:?} vs {:?}",
                self.shape(),
                other.shape()
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &JetMatrix) -> Result<JetMatrix, Error> {
        self.check_same_shape(other, "add")?;
        Ok(JetMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn sub(&self, other: &JetMatrix) -> Result<JetMatrix, Error> {
        self.check_same_shape(other, "sub")?;
        Ok(JetMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        })
    }

    pub fn neg(&self) -> JetMatrix {
        self.map(|j| -j)
    }

    pub fn scale(&self, r: &Rational) -> JetMatrix {
        self.map(|j| j.scale(r))
    }

    pub fn matmul(&self, other: &JetMatrix) -> Result<JetMatrix, Error> {
        self.matmul_to(other, usize::MAX)
    }

    /// Product with every entry truncated at `order` (or lower, if the
    /// operands are lower).
    pub fn matmul_to(&self, other: &JetMatrix, order: usize) -> Result<JetMatrix, Error> {
        if self.cols != other.rows {
            return Err(Error::ShapeMismatch(format!(
                "matmul: {:?} x {:?}",
                self.shape(),
                other.shape()
            )));
        }
        let order = order.min(self.min_order()).min(other.min_order());
        let space = match self.data.first().or(other.data.first()) {
            Some(j) => j.space().clone(),
            None => return Ok(JetMatrix::from_vec(self.rows, other.cols, Vec::new())),
        };
        let mut data = Vec::with_capacity(self.rows * other.cols);
        for r in 0..self.rows {
            let row = self.row(r);
            for c in 0..other.cols {
                let mut acc = Jet::zero(&space, order);
                for (k, a) in row.iter().enumerate() {
                    let b = other.get(k, c);
                    if a.is_zero() || b.is_zero() {
                        continue;
                    }
                    acc.add_assign_mul(a, b);
                }
                data.push(acc);
            }
        }
        Ok(JetMatrix {
            rows: self.rows,
            cols: other.cols,
            data,
        })
    }

    pub fn matvec(&self, v: &[Jet]) -> Result<Vec<Jet>, Error> {
        let col = JetMatrix::column_vector(v.to_vec());
        Ok(self.matmul(&col)?.data)
    }

    /// Gauss–Jordan inverse at the common truncation order. The pivot of each
    /// column is the first unit entry at or below the diagonal.
    pub fn invert(&self) -> Result<JetMatrix, Error> {
        if self.rows != self.cols {
            return Err(Error::ShapeMismatch(format!("invert: {:?}", self.shape())));
        }
        if self.rows == 0 {
            return Ok(self.clone());
        }
        let space = self.data[0].space().clone();
        self.solve(&JetMatrix::identity(&space, self.rows, self.min_order()))
    }

    /// `X` with `self · X = rhs`, by Gauss–Jordan on the augmented matrix,
    /// truncated at the lowest order of either side. Same pivot rule as
    /// [`JetMatrix::invert`].
    pub fn solve(&self, rhs: &JetMatrix) -> Result<JetMatrix, Error> {
        if self.rows != self.cols || rhs.rows != self.rows {
            return Err(Error::ShapeMismatch(format!(
                "solve: {:?} with right-hand side {:?}",
                self.shape(),
                rhs.shape()
            )));
        }
        let n = self.rows;
        if n == 0 {
            return Ok(rhs.clone());
        }
        let order = self.min_order().min(rhs.min_order());
        let m = rhs.cols;
        let mut left: Vec<Vec<Jet>> = (0..n)
            .map(|r| self.row(r).iter().map(|j| j.truncate(order)).collect())
            .collect();
        let mut right: Vec<Vec<Jet>> = (0..n)
            .map(|r| rhs.row(r).iter().map(|j| j.truncate(order)).collect())
            .collect();

        for col in 0..n {
            let pivot = (col..n)
                .find(|&r| left[r][col].is_unit())
                .ok_or(Error::SingularAtPoint { what: "matrix" })?;
            left.swap(col, pivot);
            right.swap(col, pivot);
            let inv = left[col][col].inverse()?;
            for j in &mut left[col][col..] {
                *j = j.mul_to(&inv, order);
            }
            for j in &mut right[col] {
                if !j.is_zero() {
                    *j = j.mul_to(&inv, order);
                }
            }
            let (pivot_left, pivot_right) = (left[col].clone(), right[col].clone());
            for r in 0..n {
                if r == col || left[r][col].is_zero() {
                    continue;
                }
                let factor = left[r][col].clone();
                for c in col..n {
                    if !pivot_left[c].is_zero() {
                        let t = factor.mul_to(&pivot_left[c], order);
                        left[r][c] = &left[r][c] - &t;
                    }
                }
                for c in 0..m {
                    if !pivot_right[c].is_zero() {
                        let t = factor.mul_to(&pivot_right[c], order);
                        right[r][c] = &right[r][c] - &t;
                    }
                }
            }
        }
        Ok(JetMatrix {
            rows: n,
            cols: m,
            data: right.into_iter().flatten().collect(),
        })
    }
}

fn kept_indices(len: usize, ranges: &[Range<usize>]) -> Result<Vec<usize>, Error> {
    for r in ranges {
        if r.start > r.end || r.end > len {
            return Err(Error::OutOfRange(format!("{r:?} in 0..{len}")));
        }
    }
    Ok((0..len).filter(|i| !ranges.iter().any(|r| r.contains(i))).collect())
}

/// Rank of a rational matrix by fraction-based Gaussian elimination.
pub fn rational_rank(mut m: Vec<Vec<Rational>>) -> usize {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..rows).find(|&r| !m[r][c].is_zero()) else {
            continue;
        };
        m.swap(rank, p);
        let inv = m[rank][c].recip();
        let (top, below) = m.split_at_mut(rank + 1);
        let pivot_row = &top[rank];
        for row in below.iter_mut() {
            if row[c].is_zero() {
                continue;
            }
            let f = &row[c] * &inv;
            for (x, p) in row[c..cols].iter_mut().zip(&pivot_row[c..cols]) {
                *x -= &f * p;
            }
        }
        rank += 1;
        if rank == rows {
            break;
        }
    }
    rank
}
