//! Exact rational arithmetic: matrices, polynomials and the monodromy
//! primitives built on them (characteristic polynomials, cyclotomic
//! factorization, Chevalley decomposition, nilpotent logarithms, weight
//! filtrations).
//!
//! Everything here works over `BigRational`; there is no floating point.

mod matrix;
mod monodromy_ops;
mod poly;
mod rational;

pub use matrix::{column_space, intersect_subspaces, span_dim, RationalMatrix};
pub use monodromy_ops::{
    char_poly, chevalley_decompose, cyclotomic_factorization, eigen_rotations, is_unipotent,
    nilpotent_exp, nilpotent_log, quasi_unipotence_order, weight_filtration, WeightFiltration,
};
pub use poly::{cyclotomic, euler_phi, PolynomialQ};
pub use rational::{format_rational, int, parse_rational, rat, rational_sqrt, Rational, RotationNumber};
