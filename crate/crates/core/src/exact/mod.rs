//! Exact scalars (ℚ, ℚ(i)) and truncated power series in `t`.

pub mod gaussian;
pub mod rational;
pub mod series;

pub use gaussian::Gaussian;
pub use rational::Rational;
pub use series::{Coeff, Ring, Series};
