//! Exact additive combinatorics over `F_3^n`.
//!
//! Everything here is integer-exact: vectors are packed trits, Fourier
//! coefficients are Eisenstein integers `p + q·ω`, and energies are
//! arbitrary-precision. The crate is `no_std` (it needs `alloc`); the
//! `parallel` feature pulls in `std` and rayon for the transform passes,
//! the codimension-1 scan and the nullity trials. Results never depend on
//! the thread count.

#![cfg_attr(not(feature = "parallel"), no_std)]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod capset;
pub mod energy;
mod error;
pub mod fourier;
pub mod gf3;
pub mod linalg;
pub mod randomsel;
pub mod reference;
pub mod spectrum;
pub mod structure;

pub use capset::PointSet;
pub use error::{Error, Result};
pub use fourier::SpectrumTable;
pub use gf3::{Density, Eisenstein, TritVector};
pub use linalg::Subspace;

/// `3^k` as `u64`. Panics past `3^40`.
#[inline]
pub const fn pow3(k: u32) -> u64 {
    let mut acc = 1u64;
    let mut i = 0;
    while i < k {
        acc *= 3;
        i += 1;
    }
    acc
}
