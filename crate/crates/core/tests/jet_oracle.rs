use std::collections::{BTreeMap, BTreeSet};

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use webrank::jet::EvalContext;
use webrank::{jet_eval, parse_expr, Error, JetSpace, NilSpace, Rational};
use webrank_oracle::poly::multi_indices;
use webrank_oracle::sym::{random_poly, random_rational};

fn small_point(rng: &mut ChaCha8Rng, n: usize) -> Vec<Rational> {
    use rand::Rng;
    (0..n)
        .map(|_| Rational::new(rng.gen_range(-9i64..=9).into(), rng.gen_range(1i64..=5).into()))
        .collect()
}

fn factorial(l: &[u32]) -> Rational {
    let mut f = Rational::from_integer(1.into());
    for &k in l {
        for j in 1..=k {
            f *= Rational::from_integer(j.into());
        }
    }
    f
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    /// Every Taylor coefficient up to order 4 matches repeated symbolic
    /// differentiation divided by `L!`.
    #[test]
    fn jets_match_symbolic_derivatives(seed in any::<u64>(), n in 1usize..=3, rational in any::<bool>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sym = if rational { random_rational(&mut rng, n, 4) } else { random_poly(&mut rng, n, 4) };
        let point = small_point(&mut rng, n);
        let expr = parse_expr(&sym.to_source(), n, &BTreeSet::new()).unwrap();
        let order = 4;
        let space = JetSpace::new(n, order, NilSpace::trivial());
        let params = BTreeMap::new();
        let ctx = EvalContext { space: space.clone(), point: &point, params: &params };
        match jet_eval(&expr, &ctx, order) {
            Ok(jet) => {
                for deg in 0..=order as u32 {
                    for l in multi_indices(n, deg) {
                        let expect = sym.diff_multi(&l).eval(&point).unwrap() / factorial(&l);
                        let got = jet.coeff(&l).unwrap();
                        prop_assert_eq!(got.rational_part(), &expect, "L = {:?}, expr = {}", l, sym.to_source());
                    }
                }
            }
            Err(Error::DivisionByNonUnit) => prop_assert!(sym.eval(&point).is_none() || sym.has_division()),
            Err(e) => prop_assert!(false, "unexpected error {e:?}"),
        }
    }

    /// Printing a parsed expression and parsing it again is the identity.
    #[test]
    fn print_parse_round_trip(seed in any::<u64>(), n in 1usize..=3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sym = random_rational(&mut rng, n, 4);
        let first = parse_expr(&sym.to_source(), n, &BTreeSet::new()).unwrap();
        let again = parse_expr(&first.to_string(), n, &BTreeSet::new()).unwrap();
        prop_assert_eq!(first, again);
    }

    /// The parser and the oracle agree on values.
    #[test]
    fn parsed_values_match(seed in any::<u64>(), n in 1usize..=3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sym = random_rational(&mut rng, n, 4);
        let point = small_point(&mut rng, n);
        let expr = parse_expr(&sym.to_source(), n, &BTreeSet::new()).unwrap();
        prop_assert_eq!(expr.eval(&point, &BTreeMap::new()), sym.eval(&point));
    }
}

#[test]
fn nilpotent_parameter_expansion() {
    // (x + G)^3 with G^2 = 0 at x = 2: 8 + 12 G
    let space = JetSpace::new(1, 1, NilSpace::new(&[("G".to_string(), 2)]));
    let mut params = BTreeMap::new();
    params.insert("G".to_string(), webrank::ParamBinding::Nilpotent(2));
    let names: BTreeSet<String> = ["G".to_string()].into();
    let e = parse_expr("(x1 + G)^3", 1, &names).unwrap();
    let point = [Rational::from_integer(2.into())];
    let ctx = EvalContext { space: space.clone(), point: &point, params: &params };
    let j = jet_eval(&e, &ctx, 1).unwrap();
    assert_eq!(space.nil().format(j.constant_term().coeffs()), "8 + 12*G");
    let slope = j.coeff(&[1]).unwrap();
    assert_eq!(space.nil().format(slope.coeffs()), "12 + 12*G");
}
