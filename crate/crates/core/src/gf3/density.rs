use num_bigint::BigInt;
use num_rational::BigRational;

use crate::pow3;

/// `ρ = |A| / 3^n`, kept exact.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Density {
    pub size: u64,
    pub n: u32,
}

impl Density {
    pub fn new(size: u64, n: u32) -> Self {
        debug_assert!(size <= pow3(n));
        Self { size, n }
    }

    pub fn ratio(&self) -> BigRational {
        BigRational::new(BigInt::from(self.size), BigInt::from(pow3(self.n)))
    }

    /// Report-only float value.
    pub fn to_f64(&self) -> f64 {
        self.size as f64 / pow3(self.n) as f64
    }
}
