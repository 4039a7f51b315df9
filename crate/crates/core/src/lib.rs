//! Graded and modified Hennings invariants of 3-manifolds with bichrome graphs for the
//! unrolled quantum group of sl2 at a root of unity.

pub mod diagrams;
pub mod error;
pub mod exponents;
pub mod integrals;
pub mod invariant_engine;
pub mod linalg;
pub mod modules_catalog;
pub mod qalgebra;
pub mod scalars;
pub mod suites;

pub use error::{Error, Result};
pub use scalars::{Rational, RootOfUnityConfig, C64};
