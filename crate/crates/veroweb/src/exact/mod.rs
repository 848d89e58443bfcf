//! Exact arithmetic: scalars, polynomials in t, jets and linear algebra.

pub mod factor;
pub mod jet;
pub mod matrix;
pub mod poly;
pub mod scalar;
pub mod subspace;

pub use jet::{var_names, JetSeries, Mono};
pub use matrix::{resolvent_curve, LinearMap, Matrix};
pub use poly::UniPoly;
pub use scalar::{q, qf, Field, Scalar, Q, QI};
pub use subspace::Subspace;
