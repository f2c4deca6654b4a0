//! Symbolic expressions: printing, exact evaluation, differentiation and
//! random generation.

use num_traits::{One, Zero};
use rand::Rng;

use crate::Q;

#[derive(Clone, Debug, PartialEq)]
pub enum Sym {
    Int(i64),
    /// 0-based variable index.
    X(usize),
    Neg(Box<Sym>),
    Add(Box<Sym>, Box<Sym>),
    Sub(Box<Sym>, Box<Sym>),
    Mul(Box<Sym>, Box<Sym>),
    Div(Box<Sym>, Box<Sym>),
    Pow(Box<Sym>, u32),
}

use Sym::*;

fn b(s: Sym) -> Box<Sym> {
    Box::new(s)
}

impl Sym {
    /// Fully parenthesized source text in the `.web` grammar.
    pub fn to_source(&self) -> String {
        match self {
            Int(v) if *v < 0 => format!("(0 - {})", -v),
            Int(v) => v.to_string(),
            X(k) => format!("x{}", k + 1),
            Neg(a) => format!("(-{})", a.to_source()),
            Add(a, c) => format!("({} + {})", a.to_source(), c.to_source()),
            Sub(a, c) => format!("({} - {})", a.to_source(), c.to_source()),
            Mul(a, c) => format!("({} * {})", a.to_source(), c.to_source()),
            Div(a, c) => format!("({} / {})", a.to_source(), c.to_source()),
            Pow(a, e) => format!("({})^{}", a.to_source(), e),
        }
    }

    /// Exact value; `None` on division by zero.
    pub fn eval(&self, p: &[Q]) -> Option<Q> {
        Some(match self {
            Int(v) => Q::from_integer((*v).into()),
            X(k) => p[*k].clone(),
            Neg(a) => -a.eval(p)?,
            Add(a, c) => a.eval(p)? + c.eval(p)?,
            Sub(a, c) => a.eval(p)? - c.eval(p)?,
            Mul(a, c) => a.eval(p)? * c.eval(p)?,
            Div(a, c) => {
                let den = c.eval(p)?;
                if den.is_zero() {
                    return None;
                }
                a.eval(p)? / den
            }
            Pow(a, e) => {
                let base = a.eval(p)?;
                let mut acc = Q::one();
                for _ in 0..*e {
                    acc *= &base;
                }
                acc
            }
        })
    }

    /// Partial derivative in variable `k`, by the textbook rules.
    pub fn diff(&self, k: usize) -> Sym {
        match self {
            Int(_) => Int(0),
            X(j) => Int(i64::from(*j == k)),
            Neg(a) => Neg(b(a.diff(k))),
            Add(a, c) => Add(b(a.diff(k)), b(c.diff(k))),
            Sub(a, c) => Sub(b(a.diff(k)), b(c.diff(k))),
            Mul(a, c) => Add(b(Mul(b(a.diff(k)), c.clone())), b(Mul(a.clone(), b(c.diff(k))))),
            Div(a, c) => Div(
                b(Sub(b(Mul(b(a.diff(k)), c.clone())), b(Mul(a.clone(), b(c.diff(k)))))),
                b(Pow(c.clone(), 2)),
            ),
            Pow(_, 0) => Int(0),
            Pow(a, e) => Mul(
                b(Mul(b(Int(i64::from(*e))), b(Pow(a.clone(), e - 1)))),
                b(a.diff(k)),
            ),
        }
    }

    /// `∂^L` as repeated differentiation.
    pub fn diff_multi(&self, l: &[u32]) -> Sym {
        let mut out = self.clone();
        for (k, &times) in l.iter().enumerate() {
            for _ in 0..times {
                out = out.diff(k);
            }
        }
        out
    }

    pub fn has_division(&self) -> bool {
        match self {
            Int(_) | X(_) => false,
            Div(..) => true,
            Neg(a) | Pow(a, _) => a.has_division(),
            Add(a, c) | Sub(a, c) | Mul(a, c) => a.has_division() || c.has_division(),
        }
    }
}

/// Random polynomial expression in `n` variables with total degree at most
/// `max_deg`, small integer coefficients and a few nested shapes.
pub fn random_poly<R: Rng>(rng: &mut R, n: usize, max_deg: u32) -> Sym {
    random_node(rng, n, max_deg, 3)
}

fn random_node<R: Rng>(rng: &mut R, n: usize, budget: u32, depth: u32) -> Sym {
    if depth == 0 || budget == 0 {
        return leaf(rng, n, budget);
    }
    match rng.gen_range(0..6) {
        0 => leaf(rng, n, budget),
        1 => Add(b(random_node(rng, n, budget, depth - 1)), b(random_node(rng, n, budget, depth - 1))),
        2 => Sub(b(random_node(rng, n, budget, depth - 1)), b(random_node(rng, n, budget, depth - 1))),
        3 => {
            let left = rng.gen_range(0..=budget);
            Mul(
                b(random_node(rng, n, left, depth - 1)),
                b(random_node(rng, n, budget - left, depth - 1)),
            )
        }
        4 if budget >= 2 => {
            let e = rng.gen_range(2..=budget.min(3));
            Pow(b(random_node(rng, n, budget / e, depth - 1)), e)
        }
        _ => Neg(b(random_node(rng, n, budget, depth - 1))),
    }
}

fn leaf<R: Rng>(rng: &mut R, n: usize, budget: u32) -> Sym {
    if budget == 0 || rng.gen_bool(0.3) {
        Int(rng.gen_range(-5..=5))
    } else {
        X(rng.gen_range(0..n))
    }
}

/// Random rational expression: a polynomial, or a quotient of a polynomial by
/// `c + polynomial` with `c` large enough to stay away from zero near small
/// points.
pub fn random_rational<R: Rng>(rng: &mut R, n: usize, max_deg: u32) -> Sym {
    let num = random_poly(rng, n, max_deg);
    if rng.gen_bool(0.5) {
        return num;
    }
    let den = Add(b(Int(rng.gen_range(7..=20))), b(random_poly(rng, n, max_deg.min(2))));
    Div(b(num), b(den))
}
