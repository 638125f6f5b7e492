#![allow(clippy::needless_range_loop)]

pub mod curvature;
pub mod error;
pub mod euclidean;
pub mod exact;
pub mod exec;
pub mod format;
pub mod fourier;
pub mod invariant;
pub mod laws;
pub mod linalg;
pub mod moduli;
pub mod normalization;
pub mod symplecto;

pub use error::{Error, Result};
