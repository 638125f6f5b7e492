//! Formal curves of symplectomorphisms of the torus and their actions.

mod curve;
pub mod lie;
mod vector_field;

pub use curve::{covariant_along, one_param_group_check, HamiltonianSpec, SymplectoCurve, SymplectoDoc};
pub use lie::{FieldCurve, ScalarCurve};
pub use vector_field::{FourierVectorField, VectorFieldDoc};
