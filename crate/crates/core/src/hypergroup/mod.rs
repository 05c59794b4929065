//! Finite hypergroups: axioms, Haar weights, characters and Fourier analysis,
//! dual convolution, and deformation by positive semicharacters.

mod characters;
mod finite;

pub use characters::{
    characters, positive_definite_check, semicharacters, CharacterTable, ExactCharacterTable, PositiveDefiniteness,
    DEFAULT_SEED, GAP_TOL, MAX_ATTEMPTS, MAX_DENOMINATOR,
};
pub use finite::{
    haar, haar_invariance, semicharacter_deform, verify_hypergroup, FiniteHypergroup, HaarWeights, HypergroupReport,
};
