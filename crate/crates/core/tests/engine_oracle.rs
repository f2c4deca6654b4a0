use std::collections::{BTreeMap, BTreeSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use webrank::engine::{
    assemble_systems, binomial, build_mtable, c, enum_multiindices, k0_of, p_matrix, pi_prime, MultiIndex,
    RecurrencePath, WebDims, WebJets,
};
use webrank::{parse_expr, sample_point, Rational, WebSpec};
use webrank_oracle::poly::{m_coefficients, Poly};
use webrank_oracle::sym::random_poly;

/// A random polynomial web with `d` integrals, each of degree at most 3.
fn random_web(rng: &mut ChaCha8Rng, n: usize, d: usize) -> (WebSpec, Vec<Poly>) {
    let syms: Vec<_> = (0..d).map(|_| random_poly(rng, n, 3)).collect();
    let integrals = syms
        .iter()
        .map(|s| parse_expr(&s.to_source(), n, &BTreeSet::new()).unwrap())
        .collect();
    let polys = syms.iter().map(|s| Poly::from_sym(s, n).unwrap()).collect();
    (WebSpec::new(n, integrals, BTreeMap::new()).unwrap(), polys)
}

/// 50 random small webs: the truncated M-table agrees with exact polynomial
/// M-coefficients built along a different recurrence path, with both closed
/// forms, and with itself along the other path.
#[test]
fn mtable_against_polynomial_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for case in 0..50 {
        let n = rng.gen_range(2..=3);
        let d = if n == 2 { rng.gen_range(3..=5) } else { 6 };
        let (web, polys) = random_web(&mut rng, n, d);
        let (k0, _) = k0_of(n, d);
        let p = sample_point(n, case, 0, 50);
        let jets = WebJets::evaluate(&web, &p, k0 + 1).unwrap();
        let first = build_mtable(&jets, k0, RecurrencePath::First).unwrap();
        let last = build_mtable(&jets, k0, RecurrencePath::Last).unwrap();
        for (i, u) in polys.iter().enumerate() {
            let oracle = m_coefficients(u, k0 as u32);
            let du: Vec<Poly> = (0..n).map(|k| u.derive(k)).collect();
            for deg in 1..=k0 {
                for l in enum_multiindices(n, deg) {
                    for h in 0..deg {
                        let got = first.get(i, h as isize, &l).unwrap();
                        assert_eq!(got, last.get(i, h as isize, &l).unwrap(), "path dependence, case {case}");
                        let expect = oracle
                            .get(&(h as u32, l.0.clone()))
                            .map_or_else(|| Rational::from_integer(0.into()), |m| m.eval(&p.coords));
                        assert_eq!(got.residue(), &expect, "case {case}, i {i}, h {h}, L {l}");
                    }
                    // closed forms
                    let mut deriv = u.clone();
                    for (k, &times) in l.0.iter().enumerate() {
                        for _ in 0..times {
                            deriv = deriv.derive(k);
                        }
                    }
                    assert_eq!(first.get(i, 0, &l).unwrap().residue(), &deriv.eval(&p.coords));
                    let mut prod = Poly::constant(n, Rational::from_integer(1.into()));
                    for (k, &times) in l.0.iter().enumerate() {
                        for _ in 0..times {
                            prod = prod.mul(&du[k]);
                        }
                    }
                    assert_eq!(
                        first.get(i, deg as isize - 1, &l).unwrap().residue(),
                        &prod.eval(&p.coords)
                    );
                    assert!(first.get(i, deg as isize, &l).unwrap().is_zero());
                    assert!(first.get(i, -1, &l).unwrap().is_zero());
                }
            }
        }
    }
}

#[test]
fn dimension_identities() {
    for n in 2..=5 {
        for k0 in 2..=5 {
            let d = c(n, k0);
            if d <= n {
                continue;
            }
            let dims = WebDims::new(n, d);
            assert_eq!(dims.k0, k0);
            assert!(dims.calibrated);
            assert_eq!(dims.alpha - dims.beta, dims.ro);
            assert_eq!(dims.ro, pi_prime(n, d));
            assert_eq!(dims.ro + binomial(n + k0, k0), k0 * d + 1);
            let lower: usize = (1..k0).map(|k| c(n, k)).sum();
            assert_eq!(dims.beta, lower);
            assert_eq!(dims.mm_rows(), lower);
            assert_eq!(dims.beta, binomial(n + k0 - 1, k0 - 1) - 1);
            assert_eq!(dims.r_positions().len(), dims.beta);
            assert_eq!(dims.s_positions().len(), dims.ro);
            for h in 1..=k0 {
                let list = enum_multiindices(n, h);
                assert_eq!(list.len(), c(n, h));
                assert!(list.iter().all(|l| l.degree() == h));
                let unique: BTreeSet<&MultiIndex> = list.iter().collect();
                assert_eq!(unique.len(), list.len());
            }
        }
    }
}

/// At an ordinary point every `P_h`, `h <= k0`, has full rank `c(n, h)`, so
/// each system has an affine solution space of dimension `d - c(n, h)`.
#[test]
fn solution_space_dimensions_on_bol() {
    let web = webrank::corpus::generate(&webrank::corpus::CorpusId::PereiraPirio { n: 2 }).unwrap();
    let dims = WebDims::new(2, 5);
    for seed in 0..3 {
        let p = sample_point(2, seed, 0, 1000);
        let jets = WebJets::evaluate(&web, &p, dims.k0 + 1).unwrap();
        let mt = build_mtable(&jets, dims.k0, RecurrencePath::First).unwrap();
        for h in 1..=dims.k0 {
            assert_eq!(p_matrix(&mt, h, dims.d).residue_rank(), c(2, h));
        }
        let sys = assemble_systems(&mt, &dims);
        assert_eq!(sys.mm.residue_rank(), dims.beta);
    }
}
