//! Exact Fourier analysis on `F_3^n`.
//!
//! Coefficients are stored unnormalized: `c(x) = Σ_a f(a) ω^{x·a}`, so the
//! normalized transform is `c(x) / 3^n`. The fast transform runs `n`
//! in-place passes of size-3 butterflies over a flat array in base-3 index
//! order.

use alloc::format;
use alloc::vec::Vec;
use core::ops::{Add, Neg, Sub};

use crate::capset::{count_line_solutions, PointSet};
use crate::{pow3, Eisenstein, Error, Result, TritVector};

/// Default guard on `n` for full transforms.
pub const TRANSFORM_LIMIT: u32 = 14;
/// Hard ceiling reachable with an explicit override.
pub const TRANSFORM_HARD_LIMIT: u32 = 16;

pub fn check_guard(n: u32, limit: u32) -> Result<()> {
    let limit = limit.min(TRANSFORM_HARD_LIMIT);
    if n > limit {
        Err(Error::TransformGuard { n, limit })
    } else {
        Ok(())
    }
}

/// Unnormalized coefficient table of a function on `F_3^n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpectrumTable {
    n: u32,
    coeffs: Vec<Eisenstein<i64>>,
}

trait Component:
    Copy + Add<Output = Self> + Sub<Output = Self> + Neg<Output = Self> + Send + Sync
{
}
impl<T: Copy + Add<Output = T> + Sub<Output = T> + Neg<Output = T> + Send + Sync> Component for T {}

/// One size-3 butterfly. Forward:
/// `y1 = x0 - x2 + ω(x1 - x2)`, `y2 = x0 - x1 + ω(x2 - x1)`.
/// Inverse uses `ω²` in place of `ω`, which swaps the two outputs.
#[inline(always)]
fn butterfly<T: Component>(
    x0: Eisenstein<T>,
    x1: Eisenstein<T>,
    x2: Eisenstein<T>,
    inverse: bool,
) -> [Eisenstein<T>; 3] {
    let y0 = x0 + x1 + x2;
    let d = x1 - x2;
    // ω·(p + qω) = -q + (p - q)ω
    let wd = Eisenstein::new(-d.q, d.p - d.q);
    let y1 = x0 - x2 + wd;
    let y2 = x0 - x1 - wd;
    if inverse {
        [y0, y2, y1]
    } else {
        [y0, y1, y2]
    }
}

fn pass<T: Component>(block: &mut [Eisenstein<T>], stride: usize, inverse: bool) {
    for j in 0..stride {
        let [a, b, c] = butterfly(block[j], block[j + stride], block[j + 2 * stride], inverse);
        block[j] = a;
        block[j + stride] = b;
        block[j + 2 * stride] = c;
    }
}

fn radix3_in_place<T: Component>(data: &mut [Eisenstein<T>], n: u32, inverse: bool) {
    debug_assert_eq!(data.len() as u64, pow3(n));
    let mut stride = 1usize;
    for _ in 0..n {
        let width = 3 * stride;
        #[cfg(feature = "parallel")]
        {
            use rayon::prelude::*;
            if data.len() >= 1 << 14 && data.len() / width >= 8 {
                data.par_chunks_mut(width)
                    .for_each(|block| pass(block, stride, inverse));
            } else {
                data.chunks_mut(width)
                    .for_each(|block| pass(block, stride, inverse));
            }
        }
        #[cfg(not(feature = "parallel"))]
        data.chunks_mut(width)
            .for_each(|block| pass(block, stride, inverse));
        stride = width;
    }
}

/// Index of `-x` given the index of `x`.
fn negated_index(n: u32, mut idx: u64) -> u64 {
    let mut out = 0u64;
    let mut place = 1u64;
    for _ in 0..n {
        let t = idx % 3;
        out += ((3 - t) % 3) * place;
        idx /= 3;
        place *= 3;
    }
    out
}

impl SpectrumTable {
    /// Transform of an integer-valued function given as `3^n` values.
    pub fn transform(n: u32, f: &[i64]) -> Result<Self> {
        Self::transform_with_limit(n, f, TRANSFORM_LIMIT)
    }

    pub fn transform_with_limit(n: u32, f: &[i64], limit: u32) -> Result<Self> {
        check_guard(n, limit)?;
        if n == 0 || f.len() as u64 != pow3(n) {
            return Err(Error::InvalidArgument(format!(
                "expected {} values for n = {n}, got {}",
                pow3(n),
                f.len()
            )));
        }
        // |c(x)| <= 3^n · max|f| and every intermediate stays within 2·3^n·max|f|
        let max = f.iter().map(|v| v.unsigned_abs()).max().unwrap_or(0) as u128;
        if max * 4 * pow3(n) as u128 > i64::MAX as u128 {
            return Err(Error::Overflow(
                "transform input too large for 64-bit coefficients",
            ));
        }
        let mut coeffs: Vec<Eisenstein<i64>> = f.iter().map(|&v| Eisenstein::new(v, 0)).collect();
        radix3_in_place(&mut coeffs, n, false);
        Ok(Self { n, coeffs })
    }

    /// Transform of the indicator of `a`.
    pub fn of_set(a: &PointSet) -> Result<Self> {
        Self::of_set_with_limit(a, TRANSFORM_LIMIT)
    }

    pub fn of_set_with_limit(a: &PointSet, limit: u32) -> Result<Self> {
        check_guard(a.n(), limit)?;
        Self::transform_with_limit(a.n(), &a.indicator(), limit)
    }

    /// Builds a table from raw coefficients (e.g. a binary dump).
    pub fn from_coeffs(n: u32, coeffs: Vec<Eisenstein<i64>>) -> Result<Self> {
        if n == 0 || coeffs.len() as u64 != pow3(n) {
            return Err(Error::InvalidArgument(format!(
                "expected {} coefficients for n = {n}",
                pow3(n)
            )));
        }
        Ok(Self { n, coeffs })
    }

    #[inline]
    pub fn n(&self) -> u32 {
        self.n
    }

    #[inline]
    pub fn coeffs(&self) -> &[Eisenstein<i64>] {
        &self.coeffs
    }

    #[inline]
    pub fn at(&self, x: &TritVector) -> Eisenstein<i64> {
        self.coeffs[x.index() as usize]
    }

    #[inline]
    pub fn at_index(&self, idx: u64) -> Eisenstein<i64> {
        self.coeffs[idx as usize]
    }

    /// `eis_norm(c(x))` for every frequency.
    pub fn norms(&self) -> Vec<u64> {
        self.coeffs.iter().map(|c| c.norm() as u64).collect()
    }

    /// Exact inverse: `f(a) = 3^{-n} Σ_x c(x) ω^{-x·a}`. Fails if the
    /// result is not a rational integer array.
    pub fn inverse(&self) -> Result<Vec<i64>> {
        let mut data: Vec<Eisenstein<i128>> = self.coeffs.iter().map(|c| c.widen()).collect();
        radix3_in_place(&mut data, self.n, true);
        let scale = pow3(self.n) as i128;
        data.into_iter()
            .enumerate()
            .map(|(i, z)| {
                if z.q != 0 || z.p % scale != 0 {
                    return Err(Error::IdentityViolation(format!(
                        "inverse transform is not integral at index {i}: {z}"
                    )));
                }
                i64::try_from(z.p / scale).map_err(|_| Error::Overflow("inverse transform value"))
            })
            .collect()
    }

    /// Pointwise sum of two tables of the same dimension.
    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch {
                left: self.n,
                right: other.n,
            });
        }
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| *a + *b)
            .collect();
        Ok(Self { n: self.n, coeffs })
    }

    /// Checks `c(-x) = conj(c(x))` (holds for real inputs).
    pub fn is_conjugate_symmetric(&self) -> bool {
        (0..self.coeffs.len() as u64).all(|i| {
            self.coeffs[negated_index(self.n, i) as usize] == self.coeffs[i as usize].conj()
        })
    }
}

/// Inverse transform of a table with `i128` components (used where the
/// forward values exceed 64 bits, e.g. `|c|²` tables). Result is divided
/// by `3^n` exactly.
pub(crate) fn inverse_wide(n: u32, mut data: Vec<Eisenstein<i128>>) -> Result<Vec<i128>> {
    radix3_in_place(&mut data, n, true);
    let scale = pow3(n) as i128;
    data.into_iter()
        .map(|z| {
            if z.q != 0 || z.p % scale != 0 {
                Err(Error::IdentityViolation(format!(
                    "inverse transform is not integral: {z}"
                )))
            } else {
                Ok(z.p / scale)
            }
        })
        .collect()
}

/// `(Σ_x |c(x)|², 3^n |A|)`. Equal by Plancherel.
pub fn plancherel_check(a: &PointSet) -> Result<(u128, u128)> {
    let t = SpectrumTable::of_set(a)?;
    Ok(plancherel_from_table(&t, a.len()))
}

pub fn plancherel_from_table(t: &SpectrumTable, size: usize) -> (u128, u128) {
    let lhs = t.coeffs.iter().map(|c| c.norm() as u128).sum();
    (lhs, pow3(t.n) as u128 * size as u128)
}

/// `Σ_x c(x)³`. Equals `3^n` times the number of ordered solutions of
/// `a + b + c = 0` in `A`; for a cap set that is `3^n |A|`.
pub fn cube_sum(a: &PointSet) -> Result<Eisenstein<i128>> {
    Ok(cube_sum_from_table(&SpectrumTable::of_set(a)?))
}

pub fn cube_sum_from_table(t: &SpectrumTable) -> Eisenstein<i128> {
    t.coeffs.iter().map(|c| c.widen().cube()).sum()
}

/// Checks the cube-sum identity against the direct line count.
pub fn cube_sum_identity(a: &PointSet) -> Result<(Eisenstein<i128>, Eisenstein<i128>)> {
    let lhs = cube_sum(a)?;
    let rhs = Eisenstein::new(pow3(a.n()) as i128 * count_line_solutions(a) as i128, 0);
    Ok((lhs, rhs))
}

/// Transform of `3^n·1_A - |A|`: zero at the origin, `3^n c(x)` elsewhere.
pub fn balanced_transform(a: &PointSet) -> Result<SpectrumTable> {
    check_guard(a.n(), TRANSFORM_LIMIT)?;
    let scale = pow3(a.n()) as i64;
    let size = a.len() as i64;
    let f: Vec<i64> = a
        .indicator()
        .into_iter()
        .map(|v| v * scale - size)
        .collect();
    SpectrumTable::transform(a.n(), &f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::capset::{greedy_random_capset, random_set};
    use crate::linalg::Subspace;
    use crate::reference;
    use alloc::vec;

    fn e(n: u32, i: u32) -> TritVector {
        TritVector::unit(n, i).unwrap()
    }

    fn hyperplane(n: u32, x0: &TritVector) -> PointSet {
        let w = Subspace::span(n, &[*x0]).unwrap().annihilator();
        PointSet::of_subspace(&w).unwrap()
    }

    #[test]
    fn origin_transform_is_flat() {
        let a = PointSet::new(3, [TritVector::zero(3).unwrap()]).unwrap();
        let t = SpectrumTable::of_set(&a).unwrap();
        assert!(t.coeffs().iter().all(|c| *c == Eisenstein::new(1, 0)));
    }

    #[test]
    fn hyperplane_transform() {
        let n = 4;
        let x0: TritVector = "1021".parse().unwrap();
        let t = SpectrumTable::of_set(&hyperplane(n, &x0)).unwrap();
        for i in 0..pow3(n) {
            let x = TritVector::from_index(n, i).unwrap();
            let c = t.at(&x);
            if x.is_zero() || x == x0 || x == x0.scale(2) {
                assert_eq!(c, Eisenstein::new(27, 0));
            } else {
                assert_eq!(c, Eisenstein::new(0, 0), "{x}");
            }
        }
    }

    #[test]
    fn matches_naive_dft() {
        for seed in 0..30u64 {
            let n = 1 + (seed % 6) as u32;
            // arbitrary integer inputs, not only indicators
            let f: Vec<i64> = (0..pow3(n))
                .map(|i| ((i * 7919 + seed * 31) % 11) as i64 - 5)
                .collect();
            let fast = SpectrumTable::transform(n, &f).unwrap();
            assert_eq!(fast.coeffs(), &reference::naive_dft(n, &f)[..]);
            assert_eq!(fast.inverse().unwrap(), f);
        }
    }

    #[test]
    fn inverse_examples() {
        for seed in 0..100u64 {
            let n = 1 + (seed % 7) as u32;
            let a = random_set(n, (seed as usize * 13) % pow3(n) as usize, seed).unwrap();
            let t = SpectrumTable::of_set(&a).unwrap();
            assert_eq!(t.inverse().unwrap(), a.indicator());
            assert!(t.is_conjugate_symmetric());
            assert_eq!(t.at_index(0), Eisenstein::new(a.len() as i64, 0));
        }
        let ones = SpectrumTable::from_coeffs(3, vec![Eisenstein::new(1, 0); 27]).unwrap();
        let f = ones.inverse().unwrap();
        assert_eq!(f[0], 1);
        assert!(f[1..].iter().all(|&v| v == 0));
        let a = SpectrumTable::of_set(&random_set(3, 9, 1).unwrap()).unwrap();
        let b = SpectrumTable::of_set(&random_set(3, 5, 2).unwrap()).unwrap();
        let sum: Vec<i64> = a
            .inverse()
            .unwrap()
            .iter()
            .zip(b.inverse().unwrap())
            .map(|(x, y)| x + y)
            .collect();
        assert_eq!(a.add(&b).unwrap().inverse().unwrap(), sum);
    }

    #[test]
    fn corrupted_table_is_detected() {
        let mut t = SpectrumTable::of_set(&random_set(3, 5, 9).unwrap()).unwrap();
        t.coeffs[4] += Eisenstein::new(1, 0);
        assert!(matches!(t.inverse(), Err(Error::IdentityViolation(_))));
    }

    #[test]
    fn plancherel_examples() {
        let n = 5;
        let origin = PointSet::new(n, [TritVector::zero(n).unwrap()]).unwrap();
        assert_eq!(plancherel_check(&origin).unwrap(), (243, 243));
        let full = PointSet::full(n).unwrap();
        assert_eq!(plancherel_check(&full).unwrap(), (243 * 243, 243 * 243));
    }

    #[test]
    fn cube_sums() {
        for n in 2..=7 {
            let a = greedy_random_capset(n, n as u64).unwrap();
            assert_eq!(
                cube_sum(&a).unwrap(),
                Eisenstein::new(pow3(n) as i128 * a.len() as i128, 0)
            );
        }
        let full = PointSet::full(3).unwrap();
        assert_eq!(
            cube_sum(&full).unwrap(),
            Eisenstein::new(pow3(9) as i128, 0)
        );
        for seed in 0..20 {
            let a = random_set(4, 30, seed).unwrap();
            let (lhs, rhs) = cube_sum_identity(&a).unwrap();
            assert_eq!(lhs, rhs);
            assert_eq!(
                rhs.p,
                81 * reference::line_solutions_triple_loop(&a) as i128
            );
        }
    }

    #[test]
    fn balanced() {
        let n = 4;
        let x0 = e(n, 2) + e(n, 0);
        let h = hyperplane(n, &x0);
        let b = balanced_transform(&h).unwrap();
        let t = SpectrumTable::of_set(&h).unwrap();
        for i in 0..pow3(n) {
            let x = TritVector::from_index(n, i).unwrap();
            if i == 0 {
                assert!(b.at(&x).is_zero());
            } else {
                assert_eq!(b.at(&x), t.at(&x).scale(81));
                assert_eq!(b.at(&x).is_zero(), !(x == x0 || x == -x0));
            }
        }
    }

    #[test]
    fn guard() {
        assert!(matches!(
            check_guard(15, TRANSFORM_LIMIT),
            Err(Error::TransformGuard { n: 15, limit: 14 })
        ));
        assert!(check_guard(16, 16).is_ok());
        assert!(check_guard(17, 99).is_err());
    }
}
