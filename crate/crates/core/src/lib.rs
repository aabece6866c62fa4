//! Completely monotone functions on finite lattices and void functionals of
//! random subsets of a finite ground set.
//!
//! The crate is organised bottom-up:
//!
//! - [`lattice`]: finite lattices given by cover relations, plus a catalog of
//!   standard small lattices (chains, Boolean lattices, diamonds, the pentagon,
//!   products).
//! - [`cm`]: the discrete-difference calculus on a lattice, Möbius weights and
//!   the weight characterisation of complete monotonicity, fractional powers,
//!   sublattice extension and the Poisson accompaniment.
//! - [`randset`]: distributions of random subsets of `[n]`, void functionals,
//!   Möbius inversion, fractional powers, i.i.d. unions and Poisson unions.
//! - [`scan`] and [`multi_interval`]: the set of exponents for which a power of
//!   a random set exists, exponential-polynomial sign analysis and the
//!   multi-interval construction.
//! - [`approx`]: distances between m-divisible and infinitely divisible objects.
//! - [`moments`]: completely monotone sequences, Hankel positivity and the
//!   two-atom counterexample family.
//!
//! Numbers are either exact rationals or `f64`, selected by the [`Scalar`]
//! type parameter.

pub mod approx;
pub mod cm;
pub mod error;
pub mod expoly;
pub mod gen;
pub mod io;
pub mod lattice;
pub mod moments;
pub mod multi_interval;
pub mod randset;
pub mod scalar;
pub mod scan;
pub mod subsets;

pub use error::{Error, Result};
pub use cm::LatticeFunction;
pub use lattice::FiniteLattice;
pub use randset::RandomSubset;
pub use scalar::{Rational, Scalar, ScalarKind};
