//! Sparse multivariate polynomials with rational coefficients.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::sym::Sym;
use crate::Q;

#[derive(Clone, Debug, PartialEq, Default)]
pub struct Poly {
    pub n: usize,
    /// exponent vector -> nonzero coefficient
    pub terms: BTreeMap<Vec<u32>, Q>,
}

impl Poly {
    pub fn zero(n: usize) -> Poly {
        Poly { n, terms: BTreeMap::new() }
    }

    pub fn constant(n: usize, c: Q) -> Poly {
        let mut p = Poly::zero(n);
        if !c.is_zero() {
            p.terms.insert(vec![0; n], c);
        }
        p
    }

    pub fn var(n: usize, k: usize) -> Poly {
        let mut e = vec![0; n];
        e[k] = 1;
        let mut p = Poly::zero(n);
        p.terms.insert(e, Q::one());
        p
    }

    /// `None` when the expression divides.
    pub fn from_sym(s: &Sym, n: usize) -> Option<Poly> {
        Some(match s {
            Sym::Int(v) => Poly::constant(n, Q::from_integer((*v).into())),
            Sym::X(k) => Poly::var(n, *k),
            Sym::Neg(a) => Poly::from_sym(a, n)?.scale(&-Q::one()),
            Sym::Add(a, c) => Poly::from_sym(a, n)?.add(&Poly::from_sym(c, n)?),
            Sym::Sub(a, c) => Poly::from_sym(a, n)?.add(&Poly::from_sym(c, n)?.scale(&-Q::one())),
            Sym::Mul(a, c) => Poly::from_sym(a, n)?.mul(&Poly::from_sym(c, n)?),
            Sym::Div(..) => return None,
            Sym::Pow(a, e) => {
                let base = Poly::from_sym(a, n)?;
                let mut acc = Poly::constant(n, Q::one());
                for _ in 0..*e {
                    acc = acc.mul(&base);
                }
                acc
            }
        })
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|e| e.iter().sum()).max().unwrap_or(0)
    }

    fn insert_add(&mut self, e: Vec<u32>, c: Q) {
        let entry = self.terms.entry(e.clone()).or_insert_with(Q::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&e);
        }
    }

    pub fn add(&self, o: &Poly) -> Poly {
        let mut out = self.clone();
        for (e, c) in &o.terms {
            out.insert_add(e.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, o: &Poly) -> Poly {
        self.add(&o.scale(&-Q::one()))
    }

    pub fn scale(&self, c: &Q) -> Poly {
        let mut out = Poly::zero(self.n);
        if c.is_zero() {
            return out;
        }
        for (e, v) in &self.terms {
            out.terms.insert(e.clone(), v * c);
        }
        out
    }

    pub fn mul(&self, o: &Poly) -> Poly {
        let mut out = Poly::zero(self.n);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &o.terms {
                let e: Vec<u32> = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                out.insert_add(e, c1 * c2);
            }
        }
        out
    }

    pub fn derive(&self, k: usize) -> Poly {
        let mut out = Poly::zero(self.n);
        for (e, c) in &self.terms {
            if e[k] == 0 {
                continue;
            }
            let mut e2 = e.clone();
            e2[k] -= 1;
            out.insert_add(e2, c * Q::from_integer(e[k].into()));
        }
        out
    }

    pub fn eval(&self, p: &[Q]) -> Q {
        let mut total = Q::zero();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (k, &pow) in e.iter().enumerate() {
                for _ in 0..pow {
                    t *= &p[k];
                }
            }
            total += t;
        }
        total
    }

    /// Taylor coefficient `∂^L f(p) / L!` at `p`, by differentiating.
    pub fn taylor_coeff(&self, p: &[Q], l: &[u32]) -> Q {
        let mut d = self.clone();
        let mut fact = Q::one();
        for (k, &times) in l.iter().enumerate() {
            for j in 1..=times {
                d = d.derive(k);
                fact *= Q::from_integer(j.into());
            }
        }
        d.eval(p) / fact
    }
}

/// `M^h_L(u)` as exact polynomials, by the recurrence that adds the *last*
/// nonzero index of `L` at each step. Keyed by `(h, L)`; missing keys are zero.
pub fn m_coefficients(u: &Poly, max_degree: u32) -> BTreeMap<(u32, Vec<u32>), Poly> {
    let n = u.n;
    let du: Vec<Poly> = (0..n).map(|k| u.derive(k)).collect();
    let mut table: BTreeMap<(u32, Vec<u32>), Poly> = BTreeMap::new();
    for k in 0..n {
        let mut l = vec![0; n];
        l[k] = 1;
        table.insert((0, l), du[k].clone());
    }
    for deg in 2..=max_degree {
        for l in multi_indices(n, deg) {
            let mu = (0..n).rev().find(|&k| l[k] > 0).expect("nonzero index");
            let mut prev = l.clone();
            prev[mu] -= 1;
            for h in 0..deg {
                let mut value = table
                    .get(&(h, prev.clone()))
                    .map_or_else(|| Poly::zero(n), |m| m.derive(mu));
                if h >= 1 {
                    if let Some(m) = table.get(&(h - 1, prev.clone())) {
                        value = value.add(&m.mul(&du[mu]));
                    }
                }
                table.insert((h, l.clone()), value);
            }
        }
    }
    table
}

/// All exponent vectors of total degree `deg`, lexicographic.
pub fn multi_indices(n: usize, deg: u32) -> Vec<Vec<u32>> {
    if n == 1 {
        return vec![vec![deg]];
    }
    let mut out = Vec::new();
    for first in 0..=deg {
        for mut rest in multi_indices(n - 1, deg - first) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}
