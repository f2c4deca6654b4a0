//! Built-in webs.
//!
//! A built-in is named `ID[:key=value,...]`, for example `bol`,
//! `pereira_pirio:n=3`, `wb:n=3,variant=sum`, `hexagonal3:f=x*y^2,G=nil`.
//! Deformable webs accept `G=<rational>` or `G=nil` (formal nilpotent);
//! `G` defaults to `0`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::engine::{binomial, c, pi_prime};
use crate::error::Error;
use crate::expr::{parse_expr, parse_rational, Expr, ParamBinding, WebSpec};
use crate::Rational;

/// Name of the deformation parameter.
pub const DEFORMATION: &str = "G";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Pirio5Variant {
    SumOfSquares,
    Product,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WbVariant {
    Product,
    Sum,
    SumOfSquares,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CorpusId {
    /// `(x, y, x + y + G·f)`.
    Hexagonal3 { f: Expr },
    /// Six linear-ish integrals in dimension 3 with one free function `F(y)`.
    Example2 { f: Expr },
    /// The resonance web of cross-ratios in dimension `n`; `n = 2` is Bol's web.
    PereiraPirio { n: usize },
    Pirio5(Pirio5Variant),
    Pirio6,
    Pirio7,
    Pirio8,
    Robert9,
    Wb { n: usize, variant: WbVariant },
}

/// How the deformation parameter is bound.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Deformation {
    Value(Rational),
    Nilpotent,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Builtin {
    pub id: CorpusId,
    pub g: Deformation,
}

pub const NAMES: &[&str] = &[
    "bol",
    "hexagonal3",
    "example2",
    "pereira_pirio",
    "pirio5",
    "pirio6",
    "pirio7",
    "pirio8",
    "robert9",
    "wb",
];

impl CorpusId {
    pub fn deformable(&self) -> bool {
        matches!(
            self,
            CorpusId::Hexagonal3 { .. }
                | CorpusId::PereiraPirio { .. }
                | CorpusId::Pirio6
                | CorpusId::Pirio7
                | CorpusId::Pirio8
        )
    }

    /// Number of integrals the generator emits.
    pub fn expected_d(&self) -> usize {
        match self {
            CorpusId::Hexagonal3 { .. } => 3,
            CorpusId::Example2 { .. } => 6,
            CorpusId::PereiraPirio { n } | CorpusId::Wb { n, .. } => c(*n, 4),
            CorpusId::Pirio5(_) => 5,
            CorpusId::Pirio6 => 6,
            CorpusId::Pirio7 => 7,
            CorpusId::Pirio8 => 8,
            CorpusId::Robert9 => 9,
        }
    }
}

impl fmt::Display for Builtin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut opts: Vec<String> = Vec::new();
        let name = match &self.id {
            CorpusId::Hexagonal3 { f: e } => {
                opts.push(format!("f={e}"));
                "hexagonal3"
            }
            CorpusId::Example2 { f: e } => {
                opts.push(format!("F={e}"));
                "example2"
            }
            CorpusId::PereiraPirio { n } => {
                opts.push(format!("n={n}"));
                "pereira_pirio"
            }
            CorpusId::Pirio5(v) => {
                opts.push(
                    match v {
                        Pirio5Variant::SumOfSquares => "variant=sumsq",
                        Pirio5Variant::Product => "variant=product",
                    }
                    .to_string(),
                );
                "pirio5"
            }
            CorpusId::Pirio6 => "pirio6",
            CorpusId::Pirio7 => "pirio7",
            CorpusId::Pirio8 => "pirio8",
            CorpusId::Robert9 => "robert9",
            CorpusId::Wb { n, variant } => {
                opts.push(format!("n={n}"));
                opts.push(
                    match variant {
                        WbVariant::Product => "variant=product",
                        WbVariant::Sum => "variant=sum",
                        WbVariant::SumOfSquares => "variant=sumsq",
                    }
                    .to_string(),
                );
                "wb"
            }
        };
        if self.id.deformable() {
            match &self.g {
                Deformation::Value(v) => opts.push(format!("G={v}")),
                Deformation::Nilpotent => opts.push("G=nil".to_string()),
            }
        }
        write!(f, "{name}:{}", opts.join(","))
    }
}

fn opt_err(msg: impl Into<String>) -> Error {
    Error::CorpusOption(msg.into())
}

fn parse_n(v: &str) -> Result<usize, Error> {
    let n: usize = v.parse().map_err(|_| opt_err(format!("n must be an integer, got `{v}`")))?;
    if n < 2 {
        return Err(opt_err(format!("n must be at least 2, got {n}")));
    }
    Ok(n)
}

/// Parses `ID[:key=value,...]`.
pub fn parse_builtin(spec: &str) -> Result<Builtin, Error> {
    let (name, rest) = match spec.split_once(':') {
        Some((a, b)) => (a.trim(), b.trim()),
        None => (spec.trim(), ""),
    };
    let mut opts: BTreeMap<String, String> = BTreeMap::new();
    for part in rest.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let (k, v) = part
            .split_once('=')
            .ok_or_else(|| opt_err(format!("expected key=value, got `{part}`")))?;
        if opts.insert(k.trim().to_string(), v.trim().to_string()).is_some() {
            return Err(opt_err(format!("option `{}` given twice", k.trim())));
        }
    }
    let mut take = |key: &str| opts.remove(key);
    let no_params = BTreeSet::new();
    let id = match name {
        "bol" => CorpusId::PereiraPirio { n: 2 },
        "hexagonal3" => {
            let src = take("f").unwrap_or_else(|| "x^2*y".to_string());
            CorpusId::Hexagonal3 {
                f: parse_expr(&src, 2, &no_params)?,
            }
        }
        "example2" => {
            let src = take("F").unwrap_or_else(|| "y^2".to_string());
            let f = parse_expr(&src, 3, &no_params)?;
            if mentions(&f, 1) || mentions(&f, 3) {
                return Err(opt_err("F must be a function of y alone"));
            }
            CorpusId::Example2 { f }
        }
        "pereira_pirio" => CorpusId::PereiraPirio {
            n: parse_n(&take("n").unwrap_or_else(|| "2".to_string()))?,
        },
        "pirio5" => CorpusId::Pirio5(match take("variant").as_deref().unwrap_or("sumsq") {
            "sumsq" => Pirio5Variant::SumOfSquares,
            "product" => Pirio5Variant::Product,
            other => return Err(opt_err(format!("pirio5 variant must be sumsq or product, got `{other}`"))),
        }),
        "pirio6" => CorpusId::Pirio6,
        "pirio7" => CorpusId::Pirio7,
        "pirio8" => CorpusId::Pirio8,
        "robert9" => CorpusId::Robert9,
        "wb" => CorpusId::Wb {
            n: parse_n(&take("n").unwrap_or_else(|| "3".to_string()))?,
            variant: match take("variant").as_deref().unwrap_or("product") {
                "product" => WbVariant::Product,
                "sum" => WbVariant::Sum,
                "sumsq" => WbVariant::SumOfSquares,
                other => return Err(opt_err(format!("wb variant must be product, sum or sumsq, got `{other}`"))),
            },
        },
        other => return Err(Error::UnknownCorpus(other.to_string())),
    };
    let g = match take(DEFORMATION) {
        None => Deformation::Value(Rational::from_integer(0.into())),
        Some(v) if !id.deformable() => return Err(opt_err(format!("`{name}` has no deformation parameter (G={v})"))),
        Some(v) if v == "nil" => Deformation::Nilpotent,
        Some(v) => Deformation::Value(parse_rational(&v).ok_or_else(|| opt_err(format!("G must be a rational or `nil`, got `{v}`")))?),
    };
    if let Some(k) = opts.keys().next() {
        return Err(opt_err(format!("unknown option `{k}` for `{name}`")));
    }
    Ok(Builtin { id, g })
}

fn mentions(e: &Expr, var: usize) -> bool {
    match e {
        Expr::Var(k) => *k == var,
        Expr::Lit(_) | Expr::Param(_) => false,
        Expr::Neg(a) | Expr::Pow(a, _) => mentions(a, var),
        Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => mentions(a, var) || mentions(b, var),
    }
}

/// Pairs `i < j` (1-based) in colexicographic order.
fn pairs(n: usize) -> Vec<(usize, usize)> {
    (2..=n).flat_map(|j| (1..j).map(move |i| (i, j))).collect()
}

fn triples(n: usize) -> Vec<(usize, usize, usize)> {
    (3..=n)
        .flat_map(|k| (2..k).flat_map(move |j| (1..j).map(move |i| (i, j, k))))
        .collect()
}

fn quads(n: usize) -> Vec<(usize, usize, usize, usize)> {
    (4..=n)
        .flat_map(|m| triples(m - 1).into_iter().map(move |(i, j, k)| (i, j, k, m)))
        .collect()
}

/// Generates the web with `G` bound per `b.g`; a nilpotent `G` gets order `g_order`.
pub fn generate_with(b: &Builtin, g_order: u32) -> Result<WebSpec, Error> {
    let (n, sources) = sources(&b.id);
    let mut params = BTreeMap::new();
    let mut names = BTreeSet::new();
    if b.id.deformable() {
        names.insert(DEFORMATION.to_string());
        let binding = match &b.g {
            Deformation::Value(v) => ParamBinding::Value(v.clone()),
            Deformation::Nilpotent => ParamBinding::Nilpotent(g_order),
        };
        params.insert(DEFORMATION.to_string(), binding);
    }
    let integrals = sources
        .iter()
        .map(|s| parse_expr(s, n, &names))
        .collect::<Result<Vec<_>, _>>()?;
    let web = WebSpec::new(n, integrals, params)?;
    debug_assert_eq!(web.d(), b.id.expected_d());
    Ok(web)
}

/// Generates the undeformed (`G = 0`) web.
pub fn generate(id: &CorpusId) -> Result<WebSpec, Error> {
    generate_with(
        &Builtin {
            id: id.clone(),
            g: Deformation::Value(Rational::from_integer(0.into())),
        },
        2,
    )
}

/// Remarks worth surfacing in a report for this built-in.
pub fn notes(id: &CorpusId) -> Vec<String> {
    match id {
        CorpusId::Example2 { .. } => vec!["the free function F(y) must differ from 25 for the web to be ordinary".to_string()],
        CorpusId::Pirio8 => vec!["an invariant flat subbundle gives a lower bound when the curvature is not zero".to_string()],
        _ => Vec::new(),
    }
}

fn sources(id: &CorpusId) -> (usize, Vec<String>) {
    match id {
        CorpusId::Hexagonal3 { f } => (2, vec!["x".into(), "y".into(), format!("x + y + G*({f})")]),
        CorpusId::Example2 { f } => (
            3,
            vec![
                "z".into(),
                "x + y + z".into(),
                "2*x + 4*y + z".into(),
                "3*x + 9*y + z".into(),
                "4*x + 16*y + z".into(),
                format!("5*x + ({f}) + z"),
            ],
        ),
        CorpusId::PereiraPirio { n } => (*n, pereira_pirio(*n)),
        CorpusId::Pirio5(v) => {
            let last = match v {
                Pirio5Variant::SumOfSquares => "x^2 + y^2",
                Pirio5Variant::Product => "x*y",
            };
            (2, ["x", "y", "x + y", "x - y", last].iter().map(|s| s.to_string()).collect())
        }
        CorpusId::Pirio6 => (2, pirio_planar(6)),
        CorpusId::Pirio7 => (2, pirio_planar(7)),
        CorpusId::Pirio8 => (2, pirio_planar(8)),
        CorpusId::Robert9 => (
            2,
            [
                "x",
                "y",
                "x/(1 + y)",
                "(1 + x)/y",
                "x/y",
                "(1 + x)/(1 + y)",
                "y*(1 + x)/(x*(1 + y))",
                "(1 + x)*(1 + y)/(x*y)",
                "x*(1 + x)/(y*(1 + y))",
            ]
            .iter()
            .map(|s| s.to_string())
            .collect(),
        ),
        CorpusId::Wb { n, variant } => (*n, wb(*n, *variant)),
    }
}

fn pirio_planar(d: usize) -> Vec<String> {
    let all = [
        "x",
        "y",
        "x + y",
        "x - y",
        "x^2 + (1 + G)*y^2",
        "x*y",
        "x^2 - (1 + G)*y^2",
        "x^4 + y^4",
    ];
    all[..d].iter().map(|s| s.to_string()).collect()
}

fn pereira_pirio(n: usize) -> Vec<String> {
    let x = |k: usize| format!("x{k}");
    let mut out: Vec<String> = (1..=n).map(x).collect();
    let p = pairs(n);
    let t = triples(n);
    out.extend(p.iter().map(|&(i, j)| format!("{}/{}", x(j), x(i))));
    out.extend(p.iter().map(|&(i, j)| format!("({} - 1 + G)/({} - 1)", x(j), x(i))));
    out.extend(
        t.iter()
            .map(|&(i, j, k)| format!("({} - {})/({} - {})", x(i), x(k), x(j), x(k))),
    );
    out.extend(
        p.iter()
            .map(|&(i, j)| format!("{}*({} - 1)/({}*({} - 1))", x(i), x(j), x(j), x(i))),
    );
    out.extend(t.iter().map(|&(i, j, k)| {
        format!("{}*({} - {})/({}*({} - {}))", x(j), x(i), x(k), x(i), x(j), x(k))
    }));
    out.extend(t.iter().map(|&(i, j, k)| {
        format!("({} - 1)*({} - {})/(({} - 1)*({} - {}))", x(j), x(i), x(k), x(i), x(j), x(k))
    }));
    out.extend(quads(n).iter().map(|&(i, j, k, m)| {
        format!(
            "({} - {})*({} - {})/(({} - {})*({} - {}))",
            x(j),
            x(m),
            x(i),
            x(k),
            x(i),
            x(m),
            x(j),
            x(k)
        )
    }));
    out
}

fn wb(n: usize, variant: WbVariant) -> Vec<String> {
    let x = |k: usize| format!("x{k}");
    let mut out: Vec<String> = (1..=n).map(x).collect();
    let p = pairs(n);
    let t = triples(n);
    out.extend(p.iter().map(|&(i, j)| format!("{} + {}", x(i), x(j))));
    out.extend(p.iter().map(|&(i, j)| format!("{} - {}", x(j), x(i))));
    out.extend(p.iter().map(|&(i, j)| format!("{}*{}", x(i), x(j))));
    out.extend(t.iter().map(|&(i, j, k)| format!("{} + {} + {}", x(i), x(j), x(k))));
    out.extend(
        t.iter()
            .map(|&(i, j, k)| format!("{}^2 + {}^2 + {}^2", x(i), x(j), x(k))),
    );
    out.extend(t.iter().map(|&(i, j, k)| format!("{}*{}*{}", x(i), x(j), x(k))));
    out.extend(quads(n).iter().map(|&(i, j, k, m)| {
        let (a, b, cc, dd) = (x(i), x(j), x(k), x(m));
        match variant {
            WbVariant::Product => format!("{a}*{b}*{cc}*{dd}"),
            WbVariant::Sum => format!("{a} + {b} + {cc} + {dd}"),
            WbVariant::SumOfSquares => format!("{a}^2 + {b}^2 + {cc}^2 + {dd}^2"),
        }
    }));
    out
}

/// `6·C(n,2) + 8·C(n,3) + 3·C(n,4)` (relations supported on 2, 3 and 4
/// coordinates) next to the bound `π'(n, c(n,4))`.
pub fn wb_rank_identity(n: usize) -> (usize, usize) {
    let sum = 6 * binomial(n, 2) + 8 * binomial(n, 3) + 3 * binomial(n, 4);
    (sum, pi_prime(n, c(n, 4)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gen(s: &str) -> WebSpec {
        generate_with(&parse_builtin(s).unwrap(), 2).unwrap()
    }

    #[test]
    fn bol_is_pereira_pirio_two() {
        let w = gen("bol");
        let src: Vec<String> = w.integrals.iter().map(|e| e.to_string()).collect();
        assert_eq!(w.d(), 5);
        assert_eq!(src[0], "x1");
        assert_eq!(src[2], "x2/x1");
        assert!(src[3].contains('G'));
        assert_eq!(w.params[DEFORMATION], ParamBinding::Value(Rational::from_integer(0.into())));
    }

    #[test]
    fn counts() {
        for n in 2..=5 {
            assert_eq!(gen(&format!("pereira_pirio:n={n}")).d(), c(n, 4));
            assert_eq!(gen(&format!("wb:n={n}")).d(), c(n, 4));
        }
        for (name, d) in [
            ("hexagonal3", 3),
            ("example2", 6),
            ("pirio5", 5),
            ("pirio5:variant=product", 5),
            ("pirio6", 6),
            ("pirio7", 7),
            ("pirio8", 8),
            ("robert9", 9),
        ] {
            assert_eq!(gen(name).d(), d, "{name}");
        }
    }

    #[test]
    fn wb3_list() {
        let w = gen("wb:n=3,variant=product");
        let src: Vec<String> = w.integrals.iter().map(|e| e.to_string()).collect();
        assert_eq!(src[3], "x1 + x2");
        assert_eq!(src[6], "x2 - x1");
        assert_eq!(src[9], "x1*x2");
        assert_eq!(src[12], "x1 + x2 + x3");
        assert_eq!(src[14], "x1*x2*x3");
    }

    #[test]
    fn ordering_of_pereira_pirio_three() {
        let w = gen("pereira_pirio:n=3");
        let src: Vec<String> = w.integrals.iter().map(|e| e.to_string()).collect();
        assert_eq!(&src[3..6], &["x2/x1", "x3/x1", "x3/x2"]);
        assert!(src[6].starts_with("(x2 - 1 + G)"));
        assert_eq!(src[9], "(x1 - x3)/(x2 - x3)");
    }

    #[test]
    fn options() {
        assert!(matches!(parse_builtin("nope"), Err(Error::UnknownCorpus(_))));
        assert!(matches!(parse_builtin("robert9:G=nil"), Err(Error::CorpusOption(_))));
        assert!(matches!(parse_builtin("wb:n=3,m=2"), Err(Error::CorpusOption(_))));
        assert!(matches!(parse_builtin("example2:F=x"), Err(Error::CorpusOption(_))));
        let b = parse_builtin("hexagonal3:G=nil").unwrap();
        assert_eq!(b.g, Deformation::Nilpotent);
        let w = generate_with(&b, 3).unwrap();
        assert_eq!(w.nilpotent_params(), vec![("G".to_string(), 3)]);
        let round = parse_builtin(&b.to_string()).unwrap();
        assert_eq!(round, b);
    }

    #[test]
    fn rank_identity() {
        assert_eq!(wb_rank_identity(2), (6, 6));
        assert_eq!(wb_rank_identity(3), (26, 26));
        assert_eq!(wb_rank_identity(4), (71, 71));
        for n in 2..=8 {
            let (a, b) = wb_rank_identity(n);
            assert_eq!(a, b, "n = {n}");
        }
    }
}
