//! First-integral expressions and the `.web` file format.
//!
//! The grammar is deliberately small: rational arithmetic, integer powers
//! with literal exponents, variables `x1..xn` (plus the aliases `x, y, z, t`
//! when `n <= 4`) and named parameters.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary (('*' | '/') unary)*
//! unary  := '-' unary | power
//! power  := atom ('^' exponent)?
//! exponent := INT | '(' INT ')'
//! atom   := INT | IDENT | '(' expr ')'
//! ```

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_traits::{One, Zero};
use thiserror::Error;

use crate::Rational;

/// Expression tree over variables (1-based), parameters and rational literals.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Expr {
    Lit(Rational),
    Var(usize),
    Param(String),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, u32),
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum ParseError {
    #[error("syntax error at offset {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("unknown identifier `{name}` at offset {pos}")]
    UnknownIdentifier { name: String, pos: usize },
    #[error("exponent at offset {pos} is not a non-negative integer literal")]
    BadExponent { pos: usize },
}

impl Expr {
    pub fn lit(v: impl Into<Rational>) -> Expr {
        Expr::Lit(v.into())
    }

    pub fn int(v: i64) -> Expr {
        Expr::Lit(Rational::from_integer(v.into()))
    }

    pub fn var(k: usize) -> Expr {
        Expr::Var(k)
    }

    pub fn param(name: &str) -> Expr {
        Expr::Param(name.to_string())
    }

    #[allow(clippy::should_implement_trait)]
    pub fn neg(a: Expr) -> Expr {
        Expr::Neg(Box::new(a))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn add(a: Expr, b: Expr) -> Expr {
        Expr::Add(Box::new(a), Box::new(b))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn sub(a: Expr, b: Expr) -> Expr {
        Expr::Sub(Box::new(a), Box::new(b))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn mul(a: Expr, b: Expr) -> Expr {
        Expr::Mul(Box::new(a), Box::new(b))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn div(a: Expr, b: Expr) -> Expr {
        Expr::Div(Box::new(a), Box::new(b))
    }

    pub fn pow(a: Expr, e: u32) -> Expr {
        Expr::Pow(Box::new(a), e)
    }

    /// Largest variable index referenced (0 if none).
    pub fn max_var(&self) -> usize {
        match self {
            Expr::Lit(_) | Expr::Param(_) => 0,
            Expr::Var(k) => *k,
            Expr::Neg(a) | Expr::Pow(a, _) => a.max_var(),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                a.max_var().max(b.max_var())
            }
        }
    }

    pub fn params(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_params(&mut out);
        out
    }

    fn collect_params(&self, out: &mut BTreeSet<String>) {
        match self {
            Expr::Lit(_) | Expr::Var(_) => {}
            Expr::Param(p) => {
                out.insert(p.clone());
            }
            Expr::Neg(a) | Expr::Pow(a, _) => a.collect_params(out),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                a.collect_params(out);
                b.collect_params(out);
            }
        }
    }

    /// Replaces every occurrence of parameter `name` by `value`.
    pub fn substitute(&self, name: &str, value: &Expr) -> Expr {
        match self {
            Expr::Param(p) if p == name => value.clone(),
            Expr::Lit(_) | Expr::Var(_) | Expr::Param(_) => self.clone(),
            Expr::Neg(a) => Expr::neg(a.substitute(name, value)),
            Expr::Pow(a, e) => Expr::pow(a.substitute(name, value), *e),
            Expr::Add(a, b) => Expr::add(a.substitute(name, value), b.substitute(name, value)),
            Expr::Sub(a, b) => Expr::sub(a.substitute(name, value), b.substitute(name, value)),
            Expr::Mul(a, b) => Expr::mul(a.substitute(name, value), b.substitute(name, value)),
            Expr::Div(a, b) => Expr::div(a.substitute(name, value), b.substitute(name, value)),
        }
    }

    /// Plain rational evaluation. `None` on division by zero or an unbound
    /// parameter.
    pub fn eval(&self, point: &[Rational], params: &BTreeMap<String, Rational>) -> Option<Rational> {
        Some(match self {
            Expr::Lit(v) => v.clone(),
            Expr::Var(k) => point.get(k.checked_sub(1)?)?.clone(),
            Expr::Param(p) => params.get(p)?.clone(),
            Expr::Neg(a) => -a.eval(point, params)?,
            Expr::Add(a, b) => a.eval(point, params)? + b.eval(point, params)?,
            Expr::Sub(a, b) => a.eval(point, params)? - b.eval(point, params)?,
            Expr::Mul(a, b) => a.eval(point, params)? * b.eval(point, params)?,
            Expr::Div(a, b) => {
                let den = b.eval(point, params)?;
                if den.is_zero() {
                    return None;
                }
                a.eval(point, params)? / den
            }
            Expr::Pow(a, e) => {
                let base = a.eval(point, params)?;
                let mut acc = Rational::one();
                for _ in 0..*e {
                    acc *= &base;
                }
                acc
            }
        })
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Add(..) | Expr::Sub(..) => 1,
            Expr::Mul(..) | Expr::Div(..) => 2,
            Expr::Neg(_) => 3,
            Expr::Pow(..) => 4,
            Expr::Lit(v) if !v.is_integer() || v < &Rational::zero() => 0,
            _ => 5,
        }
    }

    fn fmt_at(&self, f: &mut fmt::Formatter<'_>, min_prec: u8) -> fmt::Result {
        if self.precedence() < min_prec {
            f.write_str("(")?;
            self.fmt_at(f, 0)?;
            return f.write_str(")");
        }
        match self {
            Expr::Lit(v) => write!(f, "{v}"),
            Expr::Var(k) => write!(f, "x{k}"),
            Expr::Param(p) => f.write_str(p),
            Expr::Neg(a) => {
                f.write_str("-")?;
                a.fmt_at(f, 3)
            }
            Expr::Add(a, b) => {
                a.fmt_at(f, 1)?;
                f.write_str(" + ")?;
                b.fmt_at(f, 2)
            }
            Expr::Sub(a, b) => {
                a.fmt_at(f, 1)?;
                f.write_str(" - ")?;
                b.fmt_at(f, 2)
            }
            Expr::Mul(a, b) => {
                a.fmt_at(f, 2)?;
                f.write_str("*")?;
                b.fmt_at(f, 3)
            }
            Expr::Div(a, b) => {
                a.fmt_at(f, 2)?;
                f.write_str("/")?;
                b.fmt_at(f, 3)
            }
            Expr::Pow(a, e) => {
                a.fmt_at(f, 5)?;
                write!(f, "^{e}")
            }
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_at(f, 0)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Int(String),
    Ident(String),
    Op(char),
}

fn tokenize(src: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let mut out = Vec::new();
    let chars: Vec<(usize, char)> = src.char_indices().collect();
    let mut i = 0;
    while i < chars.len() {
        let (pos, c) = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].1.is_ascii_digit() {
                i += 1;
            }
            let s: String = chars[start..i].iter().map(|&(_, c)| c).collect();
            out.push((Tok::Int(s), pos));
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].1.is_ascii_alphanumeric() || chars[i].1 == '_') {
                i += 1;
            }
            let s: String = chars[start..i].iter().map(|&(_, c)| c).collect();
            out.push((Tok::Ident(s), pos));
        } else if "+-*/^()".contains(c) {
            out.push((Tok::Op(c), pos));
            i += 1;
        } else {
            return Err(ParseError::Syntax {
                pos,
                msg: format!("unexpected character `{c}`"),
            });
        }
    }
    Ok(out)
}

/// Resolves identifiers to variables or parameters.
fn resolve_var(name: &str, n: usize) -> Option<usize> {
    if let Some(rest) = name.strip_prefix('x') {
        if !rest.is_empty() && rest.bytes().all(|b| b.is_ascii_digit()) {
            let k: usize = rest.parse().ok()?;
            return (1..=n).contains(&k).then_some(k);
        }
    }
    if n <= 4 {
        let k = match name {
            "x" => 1,
            "y" => 2,
            "z" => 3,
            "t" => 4,
            _ => return None,
        };
        return (k <= n).then_some(k);
    }
    None
}

/// Whether `name` would be read as a variable in dimension `n`.
pub fn is_variable_name(name: &str, n: usize) -> bool {
    if let Some(rest) = name.strip_prefix('x') {
        if !rest.is_empty() && rest.bytes().all(|b| b.is_ascii_digit()) {
            return true;
        }
    }
    n <= 4 && matches!(name, "x" | "y" | "z" | "t")
}

struct Parser<'a> {
    toks: Vec<(Tok, usize)>,
    at: usize,
    end: usize,
    n: usize,
    params: &'a BTreeSet<String>,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at).map(|(t, _)| t)
    }

    fn pos(&self) -> usize {
        self.toks.get(self.at).map_or(self.end, |&(_, p)| p)
    }

    fn eat(&mut self, op: char) -> bool {
        if self.peek() == Some(&Tok::Op(op)) {
            self.at += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            if self.eat('+') {
                lhs = Expr::add(lhs, self.term()?);
            } else if self.eat('-') {
                lhs = Expr::sub(lhs, self.term()?);
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            if self.eat('*') {
                lhs = Expr::mul(lhs, self.unary()?);
            } else if self.eat('/') {
                lhs = Expr::div(lhs, self.unary()?);
            } else {
                return Ok(lhs);
            }
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if self.eat('-') {
            Ok(Expr::neg(self.unary()?))
        } else {
            self.power()
        }
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.atom()?;
        if !self.eat('^') {
            return Ok(base);
        }
        let pos = self.pos();
        let e = self.exponent().ok_or(ParseError::BadExponent { pos })?;
        if self.peek() == Some(&Tok::Op('^')) {
            return Err(ParseError::BadExponent { pos: self.pos() + 1 });
        }
        Ok(Expr::pow(base, e))
    }

    fn exponent(&mut self) -> Option<u32> {
        let save = self.at;
        let paren = self.eat('(');
        let value = match self.peek() {
            Some(Tok::Int(s)) => s.parse::<u32>().ok(),
            _ => None,
        };
        let Some(value) = value else {
            self.at = save;
            return None;
        };
        self.at += 1;
        if paren && !self.eat(')') {
            self.at = save;
            return None;
        }
        Some(value)
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        let pos = self.pos();
        match self.toks.get(self.at).map(|(t, _)| t.clone()) {
            Some(Tok::Int(s)) => {
                self.at += 1;
                let v: num_bigint::BigInt = s.parse().map_err(|_| ParseError::Syntax {
                    pos,
                    msg: "bad integer literal".into(),
                })?;
                Ok(Expr::Lit(Rational::from_integer(v)))
            }
            Some(Tok::Ident(name)) => {
                self.at += 1;
                if let Some(k) = resolve_var(&name, self.n) {
                    Ok(Expr::Var(k))
                } else if self.params.contains(&name) {
                    Ok(Expr::Param(name))
                } else {
                    Err(ParseError::UnknownIdentifier { name, pos })
                }
            }
            Some(Tok::Op('(')) => {
                self.at += 1;
                let e = self.expr()?;
                if !self.eat(')') {
                    return Err(ParseError::Syntax {
                        pos: self.pos(),
                        msg: "expected `)`".into(),
                    });
                }
                Ok(e)
            }
            Some(Tok::Op(c)) => Err(ParseError::Syntax {
                pos,
                msg: format!("unexpected `{c}`"),
            }),
            None => Err(ParseError::Syntax {
                pos,
                msg: "unexpected end of input".into(),
            }),
        }
    }
}

/// Parses one expression in dimension `n` with the given parameter names.
pub fn parse_expr(source: &str, n: usize, params: &BTreeSet<String>) -> Result<Expr, ParseError> {
    let toks = tokenize(source)?;
    let mut p = Parser {
        toks,
        at: 0,
        end: source.len(),
        n,
        params,
    };
    let e = p.expr()?;
    if p.at != p.toks.len() {
        return Err(ParseError::Syntax {
            pos: p.pos(),
            msg: "trailing input".into(),
        });
    }
    Ok(e)
}

/// Value bound to a named parameter.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ParamBinding {
    Value(Rational),
    /// Formal symbol `G` with `G^q = 0`.
    Nilpotent(u32),
}

impl fmt::Display for ParamBinding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParamBinding::Value(v) => write!(f, "{v}"),
            ParamBinding::Nilpotent(q) => write!(f, "nilpotent({q})"),
        }
    }
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum WebFileError {
    #[error("line {line}: {source}")]
    Expr {
        line: usize,
        #[source]
        source: ParseError,
    },
    #[error("line {line}: {msg}")]
    Line { line: usize, msg: String },
    #[error("missing `n = <int>` line")]
    MissingDimension,
    #[error("dimension must be at least 2, got {0}")]
    BadDimension(usize),
    #[error("a web in dimension {n} needs more than {n} first integrals, got {d}")]
    TooFewIntegrals { n: usize, d: usize },
    #[error("parameter `{0}` is bound twice")]
    DuplicateParam(String),
    #[error("parameter `{0}` collides with a variable name")]
    ReservedParam(String),
    #[error("integral {index} references x{var} but n = {n}")]
    VariableOutOfRange { index: usize, var: usize, n: usize },
    #[error("integral {index} references unbound parameter `{name}`")]
    UnboundParam { index: usize, name: String },
}

/// A web given by `d` ordered first integrals in dimension `n`.
///
/// Integral order matters: the trivialization picks free indices by
/// position.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WebSpec {
    pub n: usize,
    pub integrals: Vec<Expr>,
    pub params: BTreeMap<String, ParamBinding>,
}

impl WebSpec {
    pub fn new(
        n: usize,
        integrals: Vec<Expr>,
        params: BTreeMap<String, ParamBinding>,
    ) -> Result<WebSpec, WebFileError> {
        if n < 2 {
            return Err(WebFileError::BadDimension(n));
        }
        if integrals.len() <= n {
            return Err(WebFileError::TooFewIntegrals { n, d: integrals.len() });
        }
        for name in params.keys() {
            if is_variable_name(name, n) {
                return Err(WebFileError::ReservedParam(name.clone()));
            }
        }
        for (idx, e) in integrals.iter().enumerate() {
            let var = e.max_var();
            if var > n {
                return Err(WebFileError::VariableOutOfRange { index: idx + 1, var, n });
            }
            if let Some(name) = e.params().into_iter().find(|p| !params.contains_key(p)) {
                return Err(WebFileError::UnboundParam { index: idx + 1, name });
            }
        }
        Ok(WebSpec { n, integrals, params })
    }

    pub fn d(&self) -> usize {
        self.integrals.len()
    }

    /// Nilpotent parameters in name order, with their nilpotency orders.
    pub fn nilpotent_params(&self) -> Vec<(String, u32)> {
        self.params
            .iter()
            .filter_map(|(k, v)| match v {
                ParamBinding::Nilpotent(q) => Some((k.clone(), *q)),
                ParamBinding::Value(_) => None,
            })
            .collect()
    }

    /// Overrides the nilpotency order of every nilpotent parameter.
    pub fn with_nilpotent_order(mut self, q: u32) -> WebSpec {
        for v in self.params.values_mut() {
            if let ParamBinding::Nilpotent(old) = v {
                *old = q;
            }
        }
        self
    }

    /// Reorders the integrals; `perm[k]` is the old index of the new k-th integral.
    pub fn permuted(&self, perm: &[usize]) -> WebSpec {
        WebSpec {
            n: self.n,
            integrals: perm.iter().map(|&k| self.integrals[k].clone()).collect(),
            params: self.params.clone(),
        }
    }

    /// Renders the web in the `.web` text format.
    pub fn to_webfile(&self) -> String {
        let mut out = format!("n = {}\n", self.n);
        for (k, v) in &self.params {
            out.push_str(&format!("param {k} = {v}\n"));
        }
        for e in &self.integrals {
            out.push_str(&format!("u: {e}\n"));
        }
        out
    }
}

pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest.trim_start()),
        None => (false, s),
    };
    let v = match body.split_once('/') {
        Some((a, b)) => {
            let a: num_bigint::BigInt = a.trim().parse().ok()?;
            let b: num_bigint::BigInt = b.trim().parse().ok()?;
            if b.is_zero() {
                return None;
            }
            Rational::new(a, b)
        }
        None => Rational::from_integer(body.parse().ok()?),
    };
    Some(if neg { -v } else { v })
}

fn parse_binding(value: &str) -> Option<ParamBinding> {
    let value = value.trim();
    if let Some(inner) = value
        .strip_prefix("nilpotent")
        .map(str::trim_start)
        .and_then(|r| r.strip_prefix('('))
        .and_then(|r| r.strip_suffix(')'))
    {
        let q: u32 = inner.trim().parse().ok()?;
        return (q >= 2).then_some(ParamBinding::Nilpotent(q));
    }
    parse_rational(value).map(ParamBinding::Value)
}

fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// Parses the `.web` text format.
pub fn parse_webfile(source: &str) -> Result<WebSpec, WebFileError> {
    let mut n: Option<usize> = None;
    let mut params = BTreeMap::new();
    let mut raw_integrals: Vec<(usize, &str)> = Vec::new();

    for (idx, raw) in source.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let bad = |msg: &str| WebFileError::Line {
            line: line_no,
            msg: msg.to_string(),
        };
        if let Some(rest) = line.strip_prefix("u:") {
            raw_integrals.push((line_no, rest));
        } else if let Some(rest) = line.strip_prefix("param ") {
            let (name, value) = rest.split_once('=').ok_or_else(|| bad("expected `param <name> = <value>`"))?;
            let name = name.trim();
            if !is_identifier(name) {
                return Err(bad("invalid parameter name"));
            }
            let binding = parse_binding(value)
                .ok_or_else(|| bad("expected a rational or `nilpotent(<q>)` with q >= 2"))?;
            if params.insert(name.to_string(), binding).is_some() {
                return Err(WebFileError::DuplicateParam(name.to_string()));
            }
        } else if let Some((key, value)) = line.split_once('=') {
            if key.trim() != "n" {
                return Err(bad("unrecognised line"));
            }
            if n.is_some() {
                return Err(bad("dimension declared twice"));
            }
            n = Some(value.trim().parse().map_err(|_| bad("expected an integer dimension"))?);
        } else {
            return Err(bad("unrecognised line"));
        }
    }

    let n = n.ok_or(WebFileError::MissingDimension)?;
    let names: BTreeSet<String> = params.keys().cloned().collect();
    let integrals = raw_integrals
        .into_iter()
        .map(|(line, src)| parse_expr(src, n, &names).map_err(|source| WebFileError::Expr { line, source }))
        .collect::<Result<Vec<_>, _>>()?;
    WebSpec::new(n, integrals, params)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn no_params() -> BTreeSet<String> {
        BTreeSet::new()
    }

    #[test]
    fn product_of_variables() {
        let e = parse_expr("x1*x2", 2, &no_params()).unwrap();
        assert_eq!(e, Expr::mul(Expr::var(1), Expr::var(2)));
    }

    #[test]
    fn deformed_cross_ratio() {
        let params: BTreeSet<String> = ["G".to_string()].into();
        let e = parse_expr("(x2-1+G)/(x1-1)", 2, &params).unwrap();
        let expected = Expr::div(
            Expr::add(Expr::sub(Expr::var(2), Expr::int(1)), Expr::param("G")),
            Expr::sub(Expr::var(1), Expr::int(1)),
        );
        assert_eq!(e, expected);
    }

    #[test]
    fn negative_exponent_rejected() {
        let err = parse_expr("x1^(-1)", 2, &no_params()).unwrap_err();
        assert!(matches!(err, ParseError::BadExponent { .. }), "{err:?}");
        assert!(matches!(parse_expr("x1^x2", 2, &no_params()), Err(ParseError::BadExponent { .. })));
        assert!(matches!(parse_expr("x1^2^3", 2, &no_params()), Err(ParseError::BadExponent { .. })));
        assert_eq!(
            parse_expr("x1^(3)", 2, &no_params()).unwrap(),
            Expr::pow(Expr::var(1), 3)
        );
    }

    #[test]
    fn aliases_and_unknowns() {
        assert_eq!(parse_expr("y", 3, &no_params()).unwrap(), Expr::var(2));
        assert_eq!(parse_expr("t", 4, &no_params()).unwrap(), Expr::var(4));
        assert!(matches!(
            parse_expr("z", 2, &no_params()),
            Err(ParseError::UnknownIdentifier { .. })
        ));
        assert!(matches!(
            parse_expr("x3", 2, &no_params()),
            Err(ParseError::UnknownIdentifier { .. })
        ));
        assert!(matches!(
            parse_expr("y", 5, &no_params()),
            Err(ParseError::UnknownIdentifier { .. })
        ));
        let err = parse_expr("x1 + 2)", 2, &no_params()).unwrap_err();
        assert_eq!(err, ParseError::Syntax { pos: 6, msg: "trailing input".into() });
    }

    #[test]
    fn printer_round_trip() {
        let params: BTreeSet<String> = ["G".to_string()].into();
        for src in [
            "x1 - (x2 - x1)",
            "-x1^2",
            "(-x1)^2",
            "x1/(x2*x1)",
            "x1 - -x2",
            "(x1 + G)^3/2",
            "1/2/3",
        ] {
            let e = parse_expr(src, 2, &params).unwrap();
            let printed = e.to_string();
            assert_eq!(parse_expr(&printed, 2, &params).unwrap(), e, "{src} -> {printed}");
        }
    }

    #[test]
    fn division_by_zero_is_an_evaluation_matter() {
        let e = parse_expr("1/(x1-2)", 1, &no_params()).unwrap();
        let two = [Rational::from_integer(2.into())];
        assert_eq!(e.eval(&two, &BTreeMap::new()), None);
    }

    #[test]
    fn webfile_basic() {
        let web = parse_webfile("n = 2\n# comment\n\nu: x1\nu: x2\nu: x1+x2  # third\n").unwrap();
        assert_eq!(web.n, 2);
        assert_eq!(web.d(), 3);
        assert_eq!(web.integrals[2], Expr::add(Expr::var(1), Expr::var(2)));
    }

    #[test]
    fn webfile_with_nilpotent_param() {
        let mut src = String::from("n = 3\nparam G = nilpotent(2)\n");
        for k in 0..15 {
            src.push_str(&format!("u: x1 + {k}*x2 + {}*x3 + G*x1^2\n", k * k));
        }
        let web = parse_webfile(&src).unwrap();
        assert_eq!(web.d(), 15);
        assert_eq!(web.params["G"], ParamBinding::Nilpotent(2));
        assert_eq!(web.nilpotent_params(), vec![("G".to_string(), 2)]);
    }

    #[test]
    fn webfile_errors() {
        assert_eq!(
            parse_webfile("n = 3\nu: x1\nu: x2\nu: x3\n"),
            Err(WebFileError::TooFewIntegrals { n: 3, d: 3 })
        );
        assert_eq!(parse_webfile("u: x1\n"), Err(WebFileError::MissingDimension));
        assert_eq!(
            parse_webfile("n = 2\nparam a = 1\nparam a = 2\nu: x\nu: y\nu: x+y\n"),
            Err(WebFileError::DuplicateParam("a".into()))
        );
        assert!(matches!(
            parse_webfile("n = 2\nparam G = nilpotent(1)\nu: x\nu: y\nu: x+y\n"),
            Err(WebFileError::Line { line: 2, .. })
        ));
        assert!(matches!(
            parse_webfile("n = 2\nu: x\nu: y\nu: x+w\n"),
            Err(WebFileError::Expr { line: 4, .. })
        ));
    }

    #[test]
    fn webfile_round_trip() {
        let src = "n = 2\nparam G = nilpotent(2)\nparam a = -3/4\nu: x\nu: y\nu: x + y + G*a*x^2*y\n";
        let web = parse_webfile(src).unwrap();
        assert_eq!(parse_webfile(&web.to_webfile()).unwrap(), web);
    }

    #[test]
    fn rational_literals() {
        assert_eq!(parse_rational("-3/4"), Some(Rational::new((-3).into(), 4.into())));
        assert_eq!(parse_rational("7"), Some(Rational::from_integer(7.into())));
        assert_eq!(parse_rational("1/0"), None);
        assert_eq!(parse_rational("x"), None);
    }
}
