//! Fourier-polynomial fields on the torus `T^{2n} = ℝ^{2n} / 2πℤ^{2n}`.

pub mod scalar;
pub mod symplectic;
pub mod tensor;

pub use scalar::{FourierScalar, Mode, ModeEntry};
pub use symplectic::{OmegaDoc, SymplecticData};
pub use tensor::{field_equal, Symmetry, TensorDoc, TensorField};
