use alloc::string::String;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;
use core::ops::{Add, Neg, Sub};
use core::str::FromStr;

use crate::{pow3, Error, Result};

/// Largest supported ambient dimension.
pub const MAX_DIM: u32 = 20;

/// An element of `F_3^n`, `n <= 20`, stored as two bit-planes.
///
/// Bit `i` of `ones` is set iff trit `i` equals 1, bit `i` of `twos` iff it
/// equals 2. The planes are disjoint. Trit 0 is the most significant digit
/// of the base-3 index and the first character of the text encoding.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct TritVector {
    n: u8,
    ones: u32,
    twos: u32,
}

#[inline]
fn mask(n: u32) -> u32 {
    if n == 32 {
        u32::MAX
    } else {
        (1u32 << n) - 1
    }
}

fn check_dim(n: u32) -> Result<()> {
    if n == 0 || n > MAX_DIM {
        Err(Error::Dimension {
            n,
            min: 1,
            max: MAX_DIM,
        })
    } else {
        Ok(())
    }
}

impl TritVector {
    pub fn zero(n: u32) -> Result<Self> {
        check_dim(n)?;
        Ok(Self {
            n: n as u8,
            ones: 0,
            twos: 0,
        })
    }

    /// Unit vector `e_i` (0-based position).
    pub fn unit(n: u32, i: u32) -> Result<Self> {
        check_dim(n)?;
        if i >= n {
            return Err(Error::InvalidArgument(alloc::format!(
                "unit index {i} out of range for n = {n}"
            )));
        }
        Ok(Self {
            n: n as u8,
            ones: 1 << i,
            twos: 0,
        })
    }

    pub fn from_trits(trits: &[u8]) -> Result<Self> {
        let n = trits.len() as u32;
        check_dim(n)?;
        let mut v = Self {
            n: n as u8,
            ones: 0,
            twos: 0,
        };
        for (i, &t) in trits.iter().enumerate() {
            match t {
                0 => {}
                1 => v.ones |= 1 << i,
                2 => v.twos |= 1 << i,
                _ => return Err(Error::InvalidTrit(t as u32)),
            }
        }
        Ok(v)
    }

    /// Builds the vector from raw planes. Bits above `n` and overlapping
    /// bits are rejected.
    pub fn from_planes(n: u32, ones: u32, twos: u32) -> Result<Self> {
        check_dim(n)?;
        if (ones | twos) & !mask(n) != 0 || ones & twos != 0 {
            return Err(Error::InvalidArgument(String::from("malformed bit-planes")));
        }
        Ok(Self {
            n: n as u8,
            ones,
            twos,
        })
    }

    /// Inverse of [`TritVector::index`].
    pub fn from_index(n: u32, mut index: u64) -> Result<Self> {
        check_dim(n)?;
        if index >= pow3(n) {
            return Err(Error::InvalidArgument(alloc::format!(
                "index {index} out of range for n = {n}"
            )));
        }
        let mut v = Self {
            n: n as u8,
            ones: 0,
            twos: 0,
        };
        for pos in (0..n).rev() {
            match index % 3 {
                1 => v.ones |= 1 << pos,
                2 => v.twos |= 1 << pos,
                _ => {}
            }
            index /= 3;
        }
        Ok(v)
    }

    /// Base-3 index `sum t_i 3^(n-1-i)`; this is the flat position used by
    /// every `3^n`-sized table in the crate.
    #[inline]
    pub fn index(&self) -> u64 {
        let mut acc = 0u64;
        for pos in 0..self.n as u32 {
            acc = acc * 3 + self.trit(pos) as u64;
        }
        acc
    }

    #[inline]
    pub fn dim(&self) -> u32 {
        self.n as u32
    }

    #[inline]
    pub fn planes(&self) -> (u32, u32) {
        (self.ones, self.twos)
    }

    #[inline]
    pub fn trit(&self, i: u32) -> u8 {
        (((self.ones >> i) & 1) | (((self.twos >> i) & 1) << 1)) as u8
    }

    pub fn with_trit(mut self, i: u32, t: u8) -> Self {
        debug_assert!(i < self.dim() && t < 3);
        self.ones &= !(1 << i);
        self.twos &= !(1 << i);
        match t {
            1 => self.ones |= 1 << i,
            2 => self.twos |= 1 << i,
            _ => {}
        }
        self
    }

    pub fn trits(&self) -> Vec<u8> {
        (0..self.dim()).map(|i| self.trit(i)).collect()
    }

    #[inline]
    pub fn is_zero(&self) -> bool {
        self.ones | self.twos == 0
    }

    /// Number of nonzero trits.
    #[inline]
    pub fn weight(&self) -> u32 {
        (self.ones | self.twos).count_ones()
    }

    /// Position of the first nonzero trit.
    #[inline]
    pub fn leading(&self) -> Option<u32> {
        let nz = self.ones | self.twos;
        (nz != 0).then(|| nz.trailing_zeros())
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.same_dim(other)?;
        Ok(self.add_unchecked(other))
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.same_dim(other)?;
        Ok(self.add_unchecked(&other.neg()))
    }

    pub fn checked_dot(&self, other: &Self) -> Result<u8> {
        self.same_dim(other)?;
        Ok(self.dot_unchecked(other))
    }

    /// `Σ u_i v_i mod 3`. Panics on dimension mismatch.
    #[inline]
    pub fn dot(&self, other: &Self) -> u8 {
        assert_eq!(self.n, other.n, "dimension mismatch in dot");
        self.dot_unchecked(other)
    }

    /// Multiplies by a scalar trit.
    #[inline]
    pub fn scale(&self, t: u8) -> Self {
        match t % 3 {
            0 => Self {
                n: self.n,
                ones: 0,
                twos: 0,
            },
            1 => *self,
            _ => -*self,
        }
    }

    /// Concatenation: `self`'s trits first.
    pub fn concat(&self, other: &Self) -> Result<Self> {
        let n = self.dim() + other.dim();
        check_dim(n)?;
        Ok(Self {
            n: n as u8,
            ones: self.ones | (other.ones << self.n),
            twos: self.twos | (other.twos << self.n),
        })
    }

    #[inline]
    fn same_dim(&self, other: &Self) -> Result<()> {
        if self.n != other.n {
            Err(Error::DimensionMismatch {
                left: self.n as u32,
                right: other.n as u32,
            })
        } else {
            Ok(())
        }
    }

    #[inline]
    fn add_unchecked(&self, other: &Self) -> Self {
        let m = mask(self.n as u32);
        let (a1, a2) = (self.ones, self.twos);
        let (b1, b2) = (other.ones, other.twos);
        let a0 = !(a1 | a2) & m;
        let b0 = !(b1 | b2) & m;
        Self {
            n: self.n,
            ones: (a0 & b1) | (a1 & b0) | (a2 & b2),
            twos: (a0 & b2) | (a2 & b0) | (a1 & b1),
        }
    }

    #[inline]
    fn dot_unchecked(&self, other: &Self) -> u8 {
        let p1 = (self.ones & other.ones) | (self.twos & other.twos);
        let p2 = (self.ones & other.twos) | (self.twos & other.ones);
        ((p1.count_ones() + 2 * p2.count_ones()) % 3) as u8
    }
}

impl Neg for TritVector {
    type Output = Self;
    #[inline]
    fn neg(self) -> Self {
        Self {
            n: self.n,
            ones: self.twos,
            twos: self.ones,
        }
    }
}

/// Panics on dimension mismatch; use [`TritVector::checked_add`] otherwise.
impl Add for TritVector {
    type Output = Self;
    #[inline]
    fn add(self, rhs: Self) -> Self {
        assert_eq!(self.n, rhs.n, "dimension mismatch in add");
        self.add_unchecked(&rhs)
    }
}

impl Sub for TritVector {
    type Output = Self;
    #[inline]
    fn sub(self, rhs: Self) -> Self {
        assert_eq!(self.n, rhs.n, "dimension mismatch in sub");
        self.add_unchecked(&-rhs)
    }
}

impl Ord for TritVector {
    fn cmp(&self, other: &Self) -> Ordering {
        self.n
            .cmp(&other.n)
            .then_with(|| self.index().cmp(&other.index()))
    }
}

impl PartialOrd for TritVector {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for TritVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.dim() {
            write!(f, "{}", self.trit(i))?;
        }
        Ok(())
    }
}

impl fmt::Debug for TritVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TritVector({self})")
    }
}

impl FromStr for TritVector {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let mut trits = Vec::with_capacity(s.len());
        for ch in s.chars() {
            match ch {
                '0' => trits.push(0),
                '1' => trits.push(1),
                '2' => trits.push(2),
                _ => {
                    return Err(Error::Parse(alloc::format!(
                        "invalid base-3 digit {ch:?} in {s:?}"
                    )))
                }
            }
        }
        Self::from_trits(&trits)
    }
}
