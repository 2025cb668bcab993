//! Dense matrices and the seeded generator every stochastic step draws from.

mod matrix;
mod rng;

pub use matrix::{sign, Matrix};
pub use rng::Rng;
