//! Exact computation of the curvature of the tautological connection of an
//! ordinary calibrated web of codimension one, given by explicit first
//! integrals.
//!
//! The pipeline at a rational base point is:
//!
//! 1. expand every first integral to a truncated Taylor jet ([`jet`]),
//! 2. build the coefficients `M^h_{i,L}` and the linear systems `MM`, `QQ`,
//!    `PP` ([`engine`]),
//! 3. pick a basis of `ker MM`, the prolongation `U = -PP⁻¹·QQ`, the
//!    connection matrices and their curvature ([`connection`]).
//!
//! A web of maximal rank is exactly one whose curvature vanishes; sampling
//! several generic points gives probabilistic evidence of that ([`analysis`]).

pub mod analysis;
pub mod connection;
pub mod corpus;
pub mod engine;
pub mod error;
pub mod expr;
pub mod jet;
pub mod linalg;
pub mod sample;

/// Exact rational scalar.
pub type Rational = num_rational::BigRational;

pub use error::Error;
pub use expr::{parse_expr, parse_webfile, Expr, ParamBinding, WebSpec};
pub use jet::{jet_eval, Jet, JetSpace, NilPoly, NilSpace};
pub use linalg::JetMatrix;
pub use sample::{sample_point, SamplePoint};
