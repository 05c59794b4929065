//! Finite association schemes and generalized association schemes.

mod association;
mod generalized;
mod groups;
mod partition;

pub use association::{verify_scheme, AssociationScheme};
pub use generalized::{
    finite_rigidity_check, translation_properties, verify_generalized, GeneralizedScheme, GeneralizedVerification,
};
pub use groups::{from_double_cosets, CosetLabels, FiniteGroup};
pub use partition::RelationPartition;
