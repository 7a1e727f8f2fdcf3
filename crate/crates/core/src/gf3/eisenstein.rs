use core::fmt;
use core::iter::Sum;
use core::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_traits::{One, Zero};

/// Eisenstein integer `p + q·ω`, `ω = e^{2πi/3}`.
///
/// `ω² = -1 - ω`, so `(p + qω)(r + sω) = (pr - qs) + (ps + qr - qs)ω`.
/// Generic over the component type: `i64` for transform tables, `i128`
/// for cube sums, `BigInt` when nothing fixed-width is safe.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Eisenstein<T = i64> {
    pub p: T,
    pub q: T,
}

impl<T> Eisenstein<T> {
    pub const fn new(p: T, q: T) -> Self {
        Self { p, q }
    }
}

impl<T: Zero + One> Eisenstein<T> {
    pub fn one() -> Self {
        Self::new(T::one(), T::zero())
    }

    pub fn omega() -> Self {
        Self::new(T::zero(), T::one())
    }
}

impl<T> Eisenstein<T>
where
    T: Clone + Add<Output = T> + Sub<Output = T> + Mul<Output = T> + Neg<Output = T>,
{
    /// Complex conjugate: `p + qω̄ = p + qω² = (p - q) - qω`.
    pub fn conj(&self) -> Self {
        Self::new(self.p.clone() - self.q.clone(), -self.q.clone())
    }

    /// Squared modulus `p² - pq + q²`.
    pub fn norm(&self) -> T {
        let (p, q) = (self.p.clone(), self.q.clone());
        p.clone() * p.clone() - p * q.clone() + q.clone() * q
    }

    /// Multiplication by `ω`: `(p + qω)ω = -q + (p - q)ω`.
    #[inline]
    pub fn mul_omega(&self) -> Self {
        Self::new(-self.q.clone(), self.p.clone() - self.q.clone())
    }

    /// Multiplication by `ω^k`.
    pub fn mul_omega_pow(&self, k: u8) -> Self {
        match k % 3 {
            0 => self.clone(),
            1 => self.mul_omega(),
            _ => self.mul_omega().mul_omega(),
        }
    }

    pub fn scale(&self, k: T) -> Self {
        Self::new(self.p.clone() * k.clone(), self.q.clone() * k)
    }

    pub fn square(&self) -> Self {
        self.clone() * self.clone()
    }

    pub fn cube(&self) -> Self {
        self.square() * self.clone()
    }
}

impl<T: Zero + PartialEq> Eisenstein<T> {
    pub fn is_zero(&self) -> bool {
        self.p.is_zero() && self.q.is_zero()
    }

    /// `Some(p)` when the value is the rational integer `p`.
    pub fn as_integer(&self) -> Option<&T> {
        self.q.is_zero().then_some(&self.p)
    }
}

impl Eisenstein<i64> {
    pub fn widen(self) -> Eisenstein<i128> {
        Eisenstein::new(self.p as i128, self.q as i128)
    }
}

/// `ω^t` for a trit `t`: `(1,0)`, `(0,1)`, `(-1,-1)`.
pub fn character(t: u8) -> Eisenstein<i64> {
    match t % 3 {
        0 => Eisenstein::new(1, 0),
        1 => Eisenstein::new(0, 1),
        _ => Eisenstein::new(-1, -1),
    }
}

impl<T: Add<Output = T>> Add for Eisenstein<T> {
    type Output = Self;
    #[inline]
    fn add(self, rhs: Self) -> Self {
        Self::new(self.p + rhs.p, self.q + rhs.q)
    }
}

impl<T: Sub<Output = T>> Sub for Eisenstein<T> {
    type Output = Self;
    #[inline]
    fn sub(self, rhs: Self) -> Self {
        Self::new(self.p - rhs.p, self.q - rhs.q)
    }
}

impl<T: Neg<Output = T>> Neg for Eisenstein<T> {
    type Output = Self;
    #[inline]
    fn neg(self) -> Self {
        Self::new(-self.p, -self.q)
    }
}

impl<T: Clone + Add<Output = T> + Sub<Output = T> + Mul<Output = T>> Mul for Eisenstein<T> {
    type Output = Self;
    #[inline]
    fn mul(self, rhs: Self) -> Self {
        let qs = self.q.clone() * rhs.q.clone();
        Self::new(
            self.p.clone() * rhs.p.clone() - qs.clone(),
            self.p * rhs.q + self.q * rhs.p - qs,
        )
    }
}

impl<T: AddAssign> AddAssign for Eisenstein<T> {
    #[inline]
    fn add_assign(&mut self, rhs: Self) {
        self.p += rhs.p;
        self.q += rhs.q;
    }
}

impl<T: SubAssign> SubAssign for Eisenstein<T> {
    #[inline]
    fn sub_assign(&mut self, rhs: Self) {
        self.p -= rhs.p;
        self.q -= rhs.q;
    }
}

impl<T: Zero + Add<Output = T>> Sum for Eisenstein<T> {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(Self::new(T::zero(), T::zero()), |a, b| a + b)
    }
}

impl<T: fmt::Display> fmt::Display for Eisenstein<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.p, self.q)
    }
}

impl<T: fmt::Debug> fmt::Debug for Eisenstein<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}+{:?}ω", self.p, self.q)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;
    use proptest::prelude::*;

    type E = Eisenstein<i64>;

    #[test]
    fn characters() {
        assert_eq!(character(0), E::new(1, 0));
        assert_eq!(character(1) * character(2), E::new(1, 0));
        assert_eq!(character(1) + character(2), E::new(-1, 0));
        for a in 0..3 {
            for b in 0..3 {
                assert_eq!(character(a) * character(b), character((a + b) % 3));
            }
        }
        assert_eq!(character(1).cube(), E::one());
    }

    #[test]
    fn norms() {
        assert_eq!(E::new(0, 1).norm(), 1);
        assert_eq!(E::new(3, 0).norm(), 9);
        assert_eq!(E::new(-1, -1).norm(), 1);
        assert_eq!(E::new(0, 0).norm(), 0);
    }

    #[test]
    fn conj_of_omega_is_omega_squared() {
        assert_eq!(E::omega().conj(), character(2));
    }

    #[test]
    fn bigint_components() {
        let z = Eisenstein::new(BigInt::from(3), BigInt::from(-7));
        let w = Eisenstein::new(BigInt::from(11), BigInt::from(2));
        assert_eq!((z.clone() * w.clone()).norm(), z.norm() * w.norm());
    }

    fn arb() -> impl Strategy<Value = E> {
        (-1000i64..1000, -1000i64..1000).prop_map(|(p, q)| E::new(p, q))
    }

    proptest! {
        #[test]
        fn ring_axioms(a in arb(), b in arb(), c in arb()) {
            prop_assert_eq!(a * b, b * a);
            prop_assert_eq!((a * b) * c, a * (b * c));
            prop_assert_eq!(a * (b + c), a * b + a * c);
            prop_assert_eq!(a * E::one(), a);
            prop_assert_eq!(a.mul_omega(), a * E::omega());
            prop_assert_eq!((a * b).norm(), a.norm() * b.norm());
            prop_assert!(a.norm() >= 0);
            prop_assert_eq!(a.norm() == 0, a.is_zero());
            prop_assert_eq!(a * a.conj(), E::new(a.norm(), 0));
            prop_assert_eq!((a * b).conj(), a.conj() * b.conj());
            prop_assert_eq!((a + b).conj(), a.conj() + b.conj());
            prop_assert_eq!(a.conj().conj(), a);
        }
    }
}
