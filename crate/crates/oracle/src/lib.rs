//! Slow, obviously-correct reference computations for testing `webrank`.
//!
//! Nothing here shares code with the library under test: expressions have
//! their own tree type and printer, derivatives are taken symbolically, and
//! polynomials are sparse maps from exponent vectors to rationals.

pub mod matrix;
pub mod poly;
pub mod sym;

pub use num_rational::BigRational as Q;

pub fn q(n: i64) -> Q {
    Q::from_integer(n.into())
}

pub fn qq(n: i64, d: i64) -> Q {
    Q::new(n.into(), d.into())
}
