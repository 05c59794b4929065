//! Association schemes, generalized association schemes, finite hypergroups,
//! the hypergroups of the distance-transitive graphs `Gamma(a, b)`,
//! product and join constructions, and random walks on all of them.

// Verifiers return the violation itself as their error value, `!(x > 0)`
// style comparisons reject NaN, and index loops follow the formulas.
#![allow(clippy::result_large_err, clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod constructions;
pub mod dt_graph;
pub mod error;
pub mod hypergroup;
pub mod io;
pub mod matrix;
pub mod random_walk;
pub mod scalar;
pub mod scheme;
pub mod tensor;

pub use error::{Axiom, AxiomViolation, Error, Result, Witness};
pub use matrix::DenseMatrix;
pub use scalar::{Rational, Scalar};
pub use tensor::Tensor3;
