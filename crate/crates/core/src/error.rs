use crate::scalars::Rational;
use thiserror::Error;

/// Every failure the library can report.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("degenerate root of unity: Gauss sum has modulus {modulus:e}")]
    DegenerateRoot { modulus: f64 },
    #[error("function is not periodic on the lattice (residual {residual:e})")]
    PeriodicityViolation { residual: f64 },
    #[error("degree mismatch: {0}")]
    DegreeMismatch(String),
    #[error("element has a fractional Cartan part with exponent {exponent}")]
    FractionalCartan { exponent: Rational },
    #[error("linear system is singular: {0}")]
    NotInvertible(String),
    #[error("relation {relation} fails with residual {residual:e}")]
    RelationViolation { relation: String, residual: f64 },
    #[error("degree {degree} is not semisimple")]
    NotSemisimple { degree: Rational },
    #[error("cointegral space has dimension {dim}, expected 1")]
    NotUnimodular { dim: usize },
    #[error("property {property} fails with residual {residual:e}")]
    PropertyViolation { property: String, residual: f64 },
    #[error("module {0} is not projective")]
    NotProjective(String),
    #[error("map is not an intertwiner (residual {residual:e})")]
    NotIntertwiner { residual: f64 },
    #[error("linear system is ill conditioned (condition number {cond:e})")]
    IllConditioned { cond: f64 },
    #[error("element is not central (residual {residual:e})")]
    NotCentral { residual: f64 },
    #[error("incompatible cohomology class on component {component}: residue {residue}")]
    Incompatible { component: usize, residue: Rational },
    #[error("move not applicable: {0}")]
    MoveNotApplicable(String),
    #[error("parse error at row {row}, column {col}: {msg}")]
    Parse { row: usize, col: usize, msg: String },
    #[error("triple is not admissible: {0}")]
    NotAdmissible(String),
    #[error("closed component {component} kept fractional Cartan exponent {exponent}")]
    FractionalResidue { component: usize, exponent: Rational },
    #[error("degree {degree} of component {component} is not semisimple")]
    NotSemisimpleDegree { component: usize, degree: Rational },
}

pub type Result<T> = std::result::Result<T, Error>;
