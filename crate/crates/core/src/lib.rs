//! Subtropical satisfiability for conjunctions of strict polynomial
//! inequalities `f_1 > 0 ∧ … ∧ f_m > 0` over the reals.
//!
//! The heuristic looks for a direction `n` and a sign variant `τ` such that
//! every `τ(f_i)` has a positive-coefficient monomial that is a vertex of its
//! Newton polytope with respect to `n`. Such a vertex cluster is found by
//! encoding its existence as a Boolean combination of strict linear
//! constraints and handing it to a small DPLL(T) engine over an exact
//! simplex. Moving far enough along the moment curve `τ(a)^n` then makes
//! every constraint positive; the resulting point is verified exactly.
//!
//! The answer is either `sat` with a verified rational witness or `unknown`.
//! The method never proves unsatisfiability.
//!
//! Module map:
//!
//! - [`poly`]: exact sparse polynomials, frames and sign variants.
//! - [`lra`]: incremental delta-rational simplex.
//! - [`encoder`]: propositional/linear encodings and Tseitin clausification.
//! - [`engine`]: DPLL(T) over the clause set.
//! - [`subtropical`]: direction search, base search, witnesses, root bracketing.
//! - [`smtlib`]: SMT-LIB2 front end.

pub mod encoder;
pub mod engine;
mod error;
pub mod lra;
pub mod poly;
pub mod smtlib;
pub mod subtropical;

pub use error::{Error, Result};
pub use poly::{ExponentVector, Point, Polynomial, Rational, SignVariant, SignedFrame};
