//! Exact arithmetic for `F_3^n` vectors and Eisenstein integers.

mod density;
mod eisenstein;
mod vector;

pub use density::Density;
pub use eisenstein::{character, Eisenstein};
pub use vector::{TritVector, MAX_DIM};
