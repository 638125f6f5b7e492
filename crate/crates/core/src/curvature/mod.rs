//! Formal curves of connections on the torus and their curvature.

mod connection;
mod tensors;
mod ub;

pub use connection::{ConnectionCurve, ConnectionDoc};
pub use tensors::{
    bianchi_check, bianchi_check_with, covariant_derivative, curvature_curve, curvature_order, ew_split,
    is_ricci_type, ricci_contraction, ricci_curve, ricci_from_curvature, ricci_order, ricci_part, BianchiRow,
    CurvatureBundle, DecompositionRow, OrderWitness, RicciTypeCheck, TensorCurve,
};
pub use ub::{extract_u_b, ResidualRow, UbExtraction};

use crate::fourier::{FourierScalar, TensorField};

/// `(∇⁰)³f`, the fully symmetric third flat derivative of a function.
pub fn third_derivative(f: &FourierScalar) -> TensorField {
    TensorField::scalar(f.clone())
        .gradient()
        .gradient()
        .gradient()
        .tag_unchecked(crate::fourier::Symmetry::FullySymmetric)
}
