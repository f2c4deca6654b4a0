//! Truncated multivariate Taylor expansions with exact rational coefficients.
//!
//! A [`Jet`] stores `∂_L f(p) / L!` for every multi-index `|L| <= order`,
//! where each coefficient is itself a [`NilPoly`]: a polynomial in the
//! nilpotent deformation parameters, truncated at their nilpotency orders.
//! Monomials are laid out by increasing degree, so a jet of lower order is a
//! prefix of one of higher order and truncation is a slice.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::Error;
use crate::expr::{Expr, ParamBinding, WebSpec};
use crate::Rational;

/// Layout of the coefficient ring `Q[G_1..G_m] / (G_k^{q_k})`.
#[derive(Clone, Debug)]
pub struct NilSpace {
    names: Vec<String>,
    orders: Vec<u32>,
    strides: Vec<usize>,
    size: usize,
    mul_table: Vec<(usize, usize, usize)>,
}

impl NilSpace {
    pub fn new(params: &[(String, u32)]) -> NilSpace {
        let names: Vec<String> = params.iter().map(|(n, _)| n.clone()).collect();
        let orders: Vec<u32> = params.iter().map(|&(_, q)| q.max(1)).collect();
        let mut strides = Vec::with_capacity(orders.len());
        let mut size = 1usize;
        for &q in &orders {
            strides.push(size);
            size *= q as usize;
        }
        let mut space = NilSpace {
            names,
            orders,
            strides,
            size,
            mul_table: Vec::new(),
        };
        for a in 0..size {
            let ea = space.exponents(a);
            for b in 0..size {
                let eb = space.exponents(b);
                if ea.iter().zip(&eb).zip(&space.orders).all(|((x, y), q)| x + y < *q) {
                    let c = ea.iter().zip(&eb).zip(&space.strides).map(|((x, y), s)| (x + y) as usize * s).sum();
                    space.mul_table.push((a, b, c));
                }
            }
        }
        space
    }

    pub fn trivial() -> NilSpace {
        NilSpace::new(&[])
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn orders(&self) -> &[u32] {
        &self.orders
    }

    pub fn param_index(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    /// Exponent vector of slot `idx`.
    pub fn exponents(&self, idx: usize) -> Vec<u32> {
        self.orders
            .iter()
            .zip(&self.strides)
            .map(|(&q, &s)| ((idx / s) % q as usize) as u32)
            .collect()
    }

    fn mul_acc(&self, dst: &mut [Rational], a: &[Rational], b: &[Rational]) {
        for &(ia, ib, ic) in &self.mul_table {
            if a[ia].is_zero() || b[ib].is_zero() {
                continue;
            }
            dst[ic] += &a[ia] * &b[ib];
        }
    }

    fn mul(&self, a: &[Rational], b: &[Rational]) -> Vec<Rational> {
        let mut out = vec![Rational::zero(); self.size];
        self.mul_acc(&mut out, a, b);
        out
    }

    /// Inverse of a unit; `None` when the rational part vanishes.
    fn inverse(&self, a: &[Rational]) -> Option<Vec<Rational>> {
        if a[0].is_zero() {
            return None;
        }
        let r = a[0].recip();
        // a = a0 (1 + m) with m nilpotent: 1/a = (1/a0) * sum (-m)^k
        let mut m: Vec<Rational> = a.iter().map(|c| c * &r).collect();
        m[0] = Rational::zero();
        let neg_m: Vec<Rational> = m.iter().map(|c| -c).collect();
        let mut term = vec![Rational::zero(); self.size];
        term[0] = Rational::one();
        let mut acc = term.clone();
        let depth: u32 = self.orders.iter().map(|q| q - 1).sum();
        for _ in 0..depth {
            term = self.mul(&term, &neg_m);
            for (x, t) in acc.iter_mut().zip(&term) {
                *x += t;
            }
        }
        Some(acc.into_iter().map(|c| c * &r).collect())
    }

    pub fn format(&self, coeffs: &[Rational]) -> String {
        let mut parts: Vec<String> = Vec::new();
        for (idx, c) in coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let mono: Vec<String> = self
                .exponents(idx)
                .iter()
                .zip(&self.names)
                .filter(|(e, _)| **e > 0)
                .map(|(e, n)| if *e == 1 { n.clone() } else { format!("{n}^{e}") })
                .collect();
            if mono.is_empty() {
                parts.push(c.to_string());
            } else {
                parts.push(format!("{c}*{}", mono.join("*")));
            }
        }
        if parts.is_empty() {
            "0".into()
        } else {
            parts.join(" + ")
        }
    }
}

/// A polynomial in the nilpotent parameters, as a coefficient of a jet.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NilPoly {
    coeffs: Vec<Rational>,
}

impl NilPoly {
    pub fn from_coeffs(coeffs: Vec<Rational>) -> NilPoly {
        NilPoly { coeffs }
    }

    /// The part free of nilpotent parameters.
    pub fn rational_part(&self) -> &Rational {
        &self.coeffs[0]
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }
}

/// Monomial bookkeeping shared by every jet of a computation.
#[derive(Debug)]
pub struct JetSpace {
    n_vars: usize,
    max_order: usize,
    monomials: Vec<Vec<u32>>,
    degree: Vec<usize>,
    /// `prefix[o]` = number of monomials of degree <= o.
    prefix: Vec<usize>,
    index: HashMap<Vec<u32>, usize>,
    /// For each monomial `c`, the pairs `(a, b)` with `a + b = c`.
    pairs: Vec<Vec<(u32, u32)>>,
    /// `shift[λ][a]` = index of `a + 1_λ`, when within `max_order`.
    shift: Vec<Vec<Option<usize>>>,
    factorial: Vec<BigInt>,
    nil: NilSpace,
}

fn monomials_of_degree(n: usize, deg: u32, out: &mut Vec<Vec<u32>>) {
    fn rec(prefix: &mut Vec<u32>, n: usize, left: u32, out: &mut Vec<Vec<u32>>) {
        if prefix.len() + 1 == n {
            prefix.push(left);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for k in (0..=left).rev() {
            prefix.push(k);
            rec(prefix, n, left - k, out);
            prefix.pop();
        }
    }
    if n == 0 {
        if deg == 0 {
            out.push(Vec::new());
        }
        return;
    }
    rec(&mut Vec::with_capacity(n), n, deg, out);
}

impl JetSpace {
    pub fn new(n_vars: usize, max_order: usize, nil: NilSpace) -> Arc<JetSpace> {
        let mut monomials = Vec::new();
        let mut prefix = Vec::with_capacity(max_order + 1);
        let mut degree = Vec::new();
        for deg in 0..=max_order {
            let before = monomials.len();
            monomials_of_degree(n_vars, deg as u32, &mut monomials);
            degree.extend(std::iter::repeat_n(deg, monomials.len() - before));
            prefix.push(monomials.len());
        }
        let index: HashMap<Vec<u32>, usize> =
            monomials.iter().enumerate().map(|(i, m)| (m.clone(), i)).collect();
        let mut pairs = vec![Vec::new(); monomials.len()];
        for (ia, a) in monomials.iter().enumerate() {
            for (ib, b) in monomials.iter().enumerate() {
                if degree[ia] + degree[ib] > max_order {
                    continue;
                }
                let c: Vec<u32> = a.iter().zip(b).map(|(x, y)| x + y).collect();
                pairs[index[&c]].push((ia as u32, ib as u32));
            }
        }
        let shift = (0..n_vars)
            .map(|lambda| {
                monomials
                    .iter()
                    .map(|m| {
                        let mut up = m.clone();
                        up[lambda] += 1;
                        index.get(&up).copied()
                    })
                    .collect()
            })
            .collect();
        let mut factorial = vec![BigInt::one()];
        for k in 1..=max_order.max(1) {
            let next = &factorial[k - 1] * BigInt::from(k);
            factorial.push(next);
        }
        Arc::new(JetSpace {
            n_vars,
            max_order,
            monomials,
            degree,
            prefix,
            index,
            pairs,
            shift,
            factorial,
            nil,
        })
    }

    /// Jet space for evaluating the integrals of `web` to the given order.
    pub fn for_web(web: &WebSpec, max_order: usize) -> Arc<JetSpace> {
        JetSpace::new(web.n, max_order, NilSpace::new(&web.nilpotent_params()))
    }

    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    pub fn max_order(&self) -> usize {
        self.max_order
    }

    pub fn nil(&self) -> &NilSpace {
        &self.nil
    }

    /// Number of monomials of degree at most `order`.
    pub fn n_monomials(&self, order: usize) -> usize {
        self.prefix[order.min(self.max_order)]
    }

    pub fn monomial(&self, idx: usize) -> &[u32] {
        &self.monomials[idx]
    }

    pub fn monomial_index(&self, l: &[u32]) -> Option<usize> {
        self.index.get(l).copied()
    }

    fn len(&self, order: usize) -> usize {
        self.n_monomials(order) * self.nil.size
    }
}

/// Truncated Taylor expansion at an implicit base point.
#[derive(Clone)]
pub struct Jet {
    space: Arc<JetSpace>,
    order: usize,
    coeffs: Vec<Rational>,
}

impl fmt::Debug for Jet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = self.space.nil.size;
        let mut list = f.debug_map();
        for m in 0..self.space.n_monomials(self.order) {
            let c = &self.coeffs[m * s..(m + 1) * s];
            if c.iter().any(|x| !x.is_zero()) {
                list.entry(&self.space.monomials[m], &self.space.nil.format(c));
            }
        }
        list.finish()
    }
}

impl PartialEq for Jet {
    fn eq(&self, other: &Jet) -> bool {
        self.order == other.order && self.coeffs == other.coeffs
    }
}

impl Jet {
    pub fn zero(space: &Arc<JetSpace>, order: usize) -> Jet {
        assert!(order <= space.max_order, "order {order} exceeds jet space");
        Jet {
            space: space.clone(),
            order,
            coeffs: vec![Rational::zero(); space.len(order)],
        }
    }

    pub fn constant(space: &Arc<JetSpace>, order: usize, value: Rational) -> Jet {
        let mut j = Jet::zero(space, order);
        j.coeffs[0] = value;
        j
    }

    pub fn one(space: &Arc<JetSpace>, order: usize) -> Jet {
        Jet::constant(space, order, Rational::one())
    }

    /// The coordinate function `x_{var+1}` expanded at `value`.
    pub fn variable(space: &Arc<JetSpace>, order: usize, var: usize, value: Rational) -> Jet {
        let mut j = Jet::constant(space, order, value);
        if order >= 1 {
            let mut m = vec![0u32; space.n_vars];
            m[var] = 1;
            let idx = space.index[&m];
            j.coeffs[idx * space.nil.size] = Rational::one();
        }
        j
    }

    /// The nilpotent parameter with the given slot index, as a constant jet.
    pub fn nil_param(space: &Arc<JetSpace>, order: usize, param: usize) -> Jet {
        let mut j = Jet::zero(space, order);
        if space.nil.orders[param] > 1 {
            j.coeffs[space.nil.strides[param]] = Rational::one();
        }
        j
    }

    pub fn space(&self) -> &Arc<JetSpace> {
        &self.space
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// Raw coefficient storage, monomial-major.
    pub fn raw(&self) -> &[Rational] {
        &self.coeffs
    }

    /// Taylor-normalised coefficient of `l` (that is `∂_l f / l!`).
    pub fn coeff(&self, l: &[u32]) -> Option<NilPoly> {
        let idx = self.space.monomial_index(l)?;
        if self.space.degree[idx] > self.order {
            return None;
        }
        let s = self.space.nil.size;
        Some(NilPoly::from_coeffs(self.coeffs[idx * s..(idx + 1) * s].to_vec()))
    }

    /// `∂_l f` at the base point, i.e. the coefficient times `l!`.
    pub fn derivative_value(&self, l: &[u32]) -> Option<NilPoly> {
        let c = self.coeff(l)?;
        let mut scale = BigInt::one();
        for &e in l {
            scale *= &self.space.factorial[e as usize];
        }
        let scale = Rational::from_integer(scale);
        Some(NilPoly::from_coeffs(c.coeffs.iter().map(|x| x * &scale).collect()))
    }

    pub fn constant_term(&self) -> NilPoly {
        NilPoly::from_coeffs(self.coeffs[..self.space.nil.size].to_vec())
    }

    /// Value at the base point with every nilpotent parameter set to zero.
    pub fn residue(&self) -> &Rational {
        &self.coeffs[0]
    }

    pub fn is_unit(&self) -> bool {
        !self.coeffs[0].is_zero()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    pub fn truncate(&self, order: usize) -> Jet {
        let order = order.min(self.order);
        Jet {
            space: self.space.clone(),
            order,
            coeffs: self.coeffs[..self.space.len(order)].to_vec(),
        }
    }

    fn zip_with(&self, other: &Jet, f: impl Fn(&Rational, &Rational) -> Rational) -> Jet {
        let order = self.order.min(other.order);
        let len = self.space.len(order);
        Jet {
            space: self.space.clone(),
            order,
            coeffs: self.coeffs[..len]
                .iter()
                .zip(&other.coeffs[..len])
                .map(|(a, b)| f(a, b))
                .collect(),
        }
    }

    pub fn scale(&self, r: &Rational) -> Jet {
        Jet {
            space: self.space.clone(),
            order: self.order,
            coeffs: self.coeffs.iter().map(|c| c * r).collect(),
        }
    }

    /// `self += a * b`, truncating to the lowest order involved.
    pub fn add_assign_mul(&mut self, a: &Jet, b: &Jet) {
        let order = self.order.min(a.order).min(b.order);
        self.coeffs.truncate(self.space.len(order));
        self.order = order;
        self.mul_into(a, b, order);
    }

    fn mul_into(&mut self, a: &Jet, b: &Jet, order: usize) {
        let space = &*self.space;
        let s = space.nil.size;
        for ic in 0..space.n_monomials(order) {
            for &(ia, ib) in &space.pairs[ic] {
                let (ia, ib) = (ia as usize, ib as usize);
                if s == 1 {
                    let (x, y) = (&a.coeffs[ia], &b.coeffs[ib]);
                    if !x.is_zero() && !y.is_zero() {
                        self.coeffs[ic] += x * y;
                    }
                } else {
                    let (lo, hi) = (ic * s, (ic + 1) * s);
                    space.nil.mul_acc(
                        &mut self.coeffs[lo..hi],
                        &a.coeffs[ia * s..(ia + 1) * s],
                        &b.coeffs[ib * s..(ib + 1) * s],
                    );
                }
            }
        }
    }

    /// Product truncated at `order` (never above the operands' orders).
    pub fn mul_to(&self, other: &Jet, order: usize) -> Jet {
        let order = order.min(self.order).min(other.order);
        let mut out = Jet::zero(&self.space, order);
        out.mul_into(self, other, order);
        out
    }

    /// Multiplicative inverse; fails unless the rational constant term is nonzero.
    pub fn inverse(&self) -> Result<Jet, Error> {
        let space = &*self.space;
        let s = space.nil.size;
        let inv0 = space.nil.inverse(&self.coeffs[..s]).ok_or(Error::DivisionByNonUnit)?;
        let mut out = Jet::zero(&self.space, self.order);
        out.coeffs[..s].clone_from_slice(&inv0);
        // c_L = -inv0 * sum_{a + b = L, b != 0} c_a * self_b
        let mut acc = vec![Rational::zero(); s];
        for ic in 1..space.n_monomials(self.order) {
            acc.iter_mut().for_each(|x| *x = Rational::zero());
            for &(ia, ib) in &space.pairs[ic] {
                let (ia, ib) = (ia as usize, ib as usize);
                if ib == 0 {
                    continue;
                }
                space.nil.mul_acc(
                    &mut acc,
                    &out.coeffs[ia * s..(ia + 1) * s],
                    &self.coeffs[ib * s..(ib + 1) * s],
                );
            }
            if acc.iter().all(Zero::is_zero) {
                continue;
            }
            let neg: Vec<Rational> = acc.iter().map(|x| -x).collect();
            let val = space.nil.mul(&neg, &inv0);
            out.coeffs[ic * s..(ic + 1) * s].clone_from_slice(&val);
        }
        Ok(out)
    }

    pub fn div(&self, other: &Jet) -> Result<Jet, Error> {
        let order = self.order.min(other.order);
        let inv = other.truncate(order).inverse()?;
        Ok(self.mul_to(&inv, order))
    }

    pub fn pow(&self, e: u32) -> Jet {
        let mut result = Jet::one(&self.space, self.order);
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul_to(&base, self.order);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul_to(&base, self.order);
            }
        }
        result
    }

    /// Partial derivative in variable `lambda` (0-based); lowers the order by one.
    pub fn derive(&self, lambda: usize) -> Result<Jet, Error> {
        if self.order == 0 {
            return Err(Error::OrderExhausted { stage: "derivative" });
        }
        let space = &*self.space;
        let s = space.nil.size;
        let order = self.order - 1;
        let mut out = Jet::zero(&self.space, order);
        for a in 0..space.n_monomials(order) {
            let up = space.shift[lambda][a].expect("shifted monomial within max order");
            let factor = Rational::from_integer(BigInt::from(space.monomials[a][lambda] + 1));
            for k in 0..s {
                let c = &self.coeffs[up * s + k];
                if !c.is_zero() {
                    out.coeffs[a * s + k] = c * &factor;
                }
            }
        }
        Ok(out)
    }
}

impl<'a> std::ops::Add<&'a Jet> for &'a Jet {
    type Output = Jet;
    fn add(self, rhs: &Jet) -> Jet {
        self.zip_with(rhs, |a, b| a + b)
    }
}

impl<'a> std::ops::Sub<&'a Jet> for &'a Jet {
    type Output = Jet;
    fn sub(self, rhs: &Jet) -> Jet {
        self.zip_with(rhs, |a, b| a - b)
    }
}

impl<'a> std::ops::Mul<&'a Jet> for &'a Jet {
    type Output = Jet;
    fn mul(self, rhs: &Jet) -> Jet {
        self.mul_to(rhs, usize::MAX)
    }
}

impl std::ops::Neg for &Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        Jet {
            space: self.space.clone(),
            order: self.order,
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

/// Evaluation context: base point, jet space and parameter values.
pub struct EvalContext<'a> {
    pub space: Arc<JetSpace>,
    pub point: &'a [Rational],
    pub params: &'a std::collections::BTreeMap<String, ParamBinding>,
}

/// Expands `e` at the context's base point to the given order.
pub fn jet_eval(e: &Expr, ctx: &EvalContext<'_>, order: usize) -> Result<Jet, Error> {
    let space = &ctx.space;
    Ok(match e {
        Expr::Lit(v) => Jet::constant(space, order, v.clone()),
        Expr::Var(k) => Jet::variable(space, order, k - 1, ctx.point[k - 1].clone()),
        Expr::Param(name) => match ctx.params.get(name) {
            Some(ParamBinding::Value(v)) => Jet::constant(space, order, v.clone()),
            Some(ParamBinding::Nilpotent(_)) => {
                let slot = space
                    .nil
                    .param_index(name)
                    .ok_or_else(|| Error::UnboundParameter(name.clone()))?;
                Jet::nil_param(space, order, slot)
            }
            None => return Err(Error::UnboundParameter(name.clone())),
        },
        Expr::Neg(a) => -&jet_eval(a, ctx, order)?,
        Expr::Add(a, b) => &jet_eval(a, ctx, order)? + &jet_eval(b, ctx, order)?,
        Expr::Sub(a, b) => &jet_eval(a, ctx, order)? - &jet_eval(b, ctx, order)?,
        Expr::Mul(a, b) => &jet_eval(a, ctx, order)? * &jet_eval(b, ctx, order)?,
        Expr::Div(a, b) => jet_eval(a, ctx, order)?.div(&jet_eval(b, ctx, order)?)?,
        Expr::Pow(a, k) => jet_eval(a, ctx, order)?.pow(*k),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse_expr;
    use std::collections::{BTreeMap, BTreeSet};

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    fn eval(src: &str, point: &[Rational], order: usize, params: &BTreeMap<String, ParamBinding>) -> Result<Jet, Error> {
        let names: BTreeSet<String> = params.keys().cloned().collect();
        let e = parse_expr(src, point.len(), &names).unwrap();
        let nil: Vec<(String, u32)> = params
            .iter()
            .filter_map(|(k, v)| match v {
                ParamBinding::Nilpotent(q) => Some((k.clone(), *q)),
                _ => None,
            })
            .collect();
        let space = JetSpace::new(point.len(), order.max(3), NilSpace::new(&nil));
        let ctx = EvalContext { space, point, params };
        jet_eval(&e, &ctx, order)
    }

    #[test]
    fn product_rule() {
        let j = eval("x1*x2", &[q(2, 1), q(3, 1)], 1, &BTreeMap::new()).unwrap();
        assert_eq!(j.coeff(&[0, 0]).unwrap().rational_part(), &q(6, 1));
        assert_eq!(j.coeff(&[1, 0]).unwrap().rational_part(), &q(3, 1));
        assert_eq!(j.coeff(&[0, 1]).unwrap().rational_part(), &q(2, 1));
    }

    #[test]
    fn geometric_series() {
        let j = eval("1/x1", &[q(1, 1)], 2, &BTreeMap::new()).unwrap();
        let got: Vec<Rational> = (0..3).map(|k| j.coeff(&[k]).unwrap().rational_part().clone()).collect();
        assert_eq!(got, vec![q(1, 1), q(-1, 1), q(1, 1)]);
    }

    #[test]
    fn nilpotent_deformation_at_order_zero() {
        let params: BTreeMap<String, ParamBinding> = [("G".to_string(), ParamBinding::Nilpotent(2))].into();
        let j = eval("(x2-1+G)/(x1-1)", &[q(3, 1), q(5, 1)], 0, &params).unwrap();
        assert_eq!(j.constant_term().coeffs(), &[q(2, 1), q(1, 2)]);
    }

    #[test]
    fn pole_is_reported() {
        let err = eval("1/(x1-2)", &[q(2, 1), q(7, 1)], 2, &BTreeMap::new()).unwrap_err();
        assert_eq!(err, Error::DivisionByNonUnit);
    }

    #[test]
    fn derive_examples() {
        let j = eval("x1*x2", &[q(2, 1), q(3, 1)], 2, &BTreeMap::new()).unwrap();
        let d1 = j.derive(0).unwrap();
        assert_eq!(d1.order(), 1);
        assert_eq!(d1, eval("x2", &[q(2, 1), q(3, 1)], 1, &BTreeMap::new()).unwrap());

        let space = JetSpace::new(2, 3, NilSpace::trivial());
        let c = Jet::constant(&space, 1, q(5, 1));
        let d = c.derive(1).unwrap();
        assert_eq!(d.order(), 0);
        assert!(d.is_zero());
        assert_eq!(d.derive(0), Err(Error::OrderExhausted { stage: "derivative" }));

        let sq = eval("x1^2", &[q(5, 1)], 2, &BTreeMap::new()).unwrap();
        let dd = sq.derive(0).unwrap().derive(0).unwrap();
        assert_eq!(dd.order(), 0);
        assert_eq!(dd.residue(), &q(2, 1));
    }

    #[test]
    fn ring_examples() {
        let space = JetSpace::new(1, 3, NilSpace::trivial());
        let eps = &Jet::variable(&space, 1, 0, q(0, 1)) + &Jet::zero(&space, 1);
        let one = Jet::one(&space, 1);
        let p = &(&one + &eps) * &(&one - &eps);
        assert_eq!(p, one);

        let x = Jet::variable(&space, 3, 0, q(7, 1));
        assert_eq!(x.div(&x).unwrap(), Jet::one(&space, 3));
    }

    #[test]
    fn dual_number_multiplication() {
        let nil = NilSpace::new(&[("G".to_string(), 2)]);
        let space = JetSpace::new(1, 1, nil);
        let g = Jet::nil_param(&space, 0, 0);
        let a = &Jet::constant(&space, 0, q(2, 1)) + &g.scale(&q(3, 1));
        let b = &Jet::constant(&space, 0, q(5, 1)) + &g.scale(&q(7, 1));
        let p = &a * &b;
        assert_eq!(p.constant_term().coeffs(), &[q(10, 1), q(29, 1)]);
        let gg = &g * &g;
        assert!(gg.is_zero());
        let inv = a.inverse().unwrap();
        assert_eq!(&inv * &a, Jet::one(&space, 0));
    }

    #[test]
    fn two_nilpotent_parameters() {
        let nil = NilSpace::new(&[("a".to_string(), 3), ("b".to_string(), 2)]);
        assert_eq!(nil.size(), 6);
        let space = JetSpace::new(1, 0, nil);
        let a = Jet::nil_param(&space, 0, 0);
        let b = Jet::nil_param(&space, 0, 1);
        assert!(!(&a * &a).is_zero());
        assert!((&(&a * &a) * &a).is_zero());
        assert!((&b * &b).is_zero());
        let u = &(&Jet::one(&space, 0) + &a) + &b;
        let inv = u.inverse().unwrap();
        assert_eq!(&u * &inv, Jet::one(&space, 0));
        assert_eq!(space.nil().format(inv.constant_term().coeffs()), "1 + -1*a + 1*a^2 + -1*b + 2*a*b + -3*a^2*b");
    }

    #[test]
    fn derivative_value_multiplies_factorials() {
        let j = eval("x1^3*x2^2", &[q(1, 1), q(1, 1)], 5, &BTreeMap::new()).unwrap();
        // ∂^3_1 ∂^2_2 (x^3 y^2) = 3! 2! = 12
        assert_eq!(j.derivative_value(&[3, 2]).unwrap().rational_part(), &q(12, 1));
        assert_eq!(j.coeff(&[3, 2]).unwrap().rational_part(), &q(1, 1));
    }
}
