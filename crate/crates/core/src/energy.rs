//! Additive energies, exactly, with a counting backend and a transform
//! backend for every quantity.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec::Vec;

use hashbrown::HashMap;
use num_bigint::BigUint;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::capset::PointSet;
use crate::fourier::{inverse_wide, SpectrumTable, TRANSFORM_LIMIT};
use crate::{pow3, Eisenstein, Error, Result, TritVector};

/// `m(x) = #{(a, b) ∈ S² : a - b = x}`, nonzero entries in index order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiplicityMap {
    n: u32,
    entries: Vec<(TritVector, u64)>,
}

impl MultiplicityMap {
    fn from_counts(n: u32, counts: impl IntoIterator<Item = (TritVector, u64)>) -> Self {
        let mut entries: Vec<(u64, TritVector, u64)> = counts
            .into_iter()
            .filter(|e| e.1 != 0)
            .map(|(x, m)| (x.index(), x, m))
            .collect();
        entries.sort_unstable_by_key(|e| e.0);
        Self {
            n,
            entries: entries.into_iter().map(|e| (e.1, e.2)).collect(),
        }
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn get(&self, x: &TritVector) -> u64 {
        let key = x.index();
        self.entries
            .binary_search_by_key(&key, |e| e.0.index())
            .map(|i| self.entries[i].1)
            .unwrap_or(0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (TritVector, u64)> + '_ {
        self.entries.iter().copied()
    }

    /// Size of the support, i.e. `|S - S|`.
    pub fn support_len(&self) -> usize {
        self.entries.len()
    }

    pub fn total(&self) -> u128 {
        self.entries.iter().map(|e| e.1 as u128).sum()
    }

    /// `Σ m(x)²`.
    pub fn sum_of_squares(&self) -> BigUint {
        self.entries
            .iter()
            .map(|e| BigUint::from(e.1 as u128 * e.1 as u128))
            .sum()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Backend {
    /// Pair counting in a hash map, `O(|S|²)`.
    Hash,
    /// Fourier route, `O(n 3^n)`.
    Transform,
}

impl Backend {
    /// Cheaper backend by predicted operation count.
    pub fn auto(s: &PointSet) -> Self {
        let pairs = (s.len() as u128).pow(2);
        let transform = s.n() as u128 * pow3(s.n()) as u128;
        if s.n() > TRANSFORM_LIMIT || pairs <= transform {
            Backend::Hash
        } else {
            Backend::Transform
        }
    }
}

pub fn diff_multiplicity(s: &PointSet) -> Result<MultiplicityMap> {
    match Backend::auto(s) {
        Backend::Hash => Ok(diff_multiplicity_hash(s)),
        Backend::Transform => diff_multiplicity_transform(s),
    }
}

pub fn diff_multiplicity_hash(s: &PointSet) -> MultiplicityMap {
    let mut counts: HashMap<TritVector, u64> = HashMap::new();
    for a in s.iter() {
        for b in s.iter() {
            *counts.entry(a - b).or_insert(0) += 1;
        }
    }
    MultiplicityMap::from_counts(s.n(), counts)
}

/// `m = 3^{-n} · inverse-transform(|c|²)`.
pub fn diff_multiplicity_transform(s: &PointSet) -> Result<MultiplicityMap> {
    let t = SpectrumTable::of_set(s)?;
    let sq: Vec<Eisenstein<i128>> = t
        .coeffs()
        .iter()
        .map(|c| Eisenstein::new(c.norm() as i128, 0))
        .collect();
    let m = inverse_wide(s.n(), sq)?;
    let n = s.n();
    let mut counts = Vec::new();
    for (i, v) in m.into_iter().enumerate() {
        if v < 0 {
            return Err(Error::IdentityViolation(format!(
                "negative multiplicity {v}"
            )));
        }
        if v > 0 {
            counts.push((TritVector::from_index(n, i as u64)?, v as u64));
        }
    }
    Ok(MultiplicityMap::from_counts(n, counts))
}

/// Additive energy `E_4 = Σ m(x)²`: ordered quadruples `x1 + x2 = x3 + x4`.
pub fn e4(s: &PointSet) -> Result<BigUint> {
    Ok(diff_multiplicity(s)?.sum_of_squares())
}

pub fn e4_hash(s: &PointSet) -> BigUint {
    diff_multiplicity_hash(s).sum_of_squares()
}

/// `E_2m = 3^{-n} Σ_y norm(c(y))^m`. The division must be exact.
pub fn e2m_transform(s: &PointSet, m: u32) -> Result<BigUint> {
    let t = SpectrumTable::of_set(s)?;
    e2m_from_table(&t, m)
}

pub fn e2m_from_table(t: &SpectrumTable, m: u32) -> Result<BigUint> {
    if m == 0 {
        return Err(Error::InvalidArgument("m must be at least 1".into()));
    }
    // many coefficients share a norm; power each distinct norm once
    let mut histogram: BTreeMap<u64, u64> = BTreeMap::new();
    for c in t.coeffs() {
        *histogram.entry(c.norm() as u64).or_insert(0) += 1;
    }
    let total: BigUint = histogram
        .into_iter()
        .filter(|e| e.0 != 0)
        .map(|(norm, count)| BigUint::from(norm).pow(m) * BigUint::from(count))
        .sum();
    let scale = BigUint::from(pow3(t.n()));
    let (q, r) = total.div_rem(&scale);
    if !r.is_zero() {
        return Err(Error::IdentityViolation(format!(
            "Σ norm^{m} not divisible by 3^{}",
            t.n()
        )));
    }
    Ok(q)
}

/// `E_2m` by counting: `r_m(x) = #{(x_1..x_m) : Σ x_i = x}` by repeated
/// convolution, then `Σ r_m(x)²`.
pub fn e2m_count(s: &PointSet, m: u32) -> Result<BigUint> {
    if m == 0 {
        return Err(Error::InvalidArgument("m must be at least 1".into()));
    }
    let mut r: HashMap<TritVector, BigUint> = s.iter().map(|p| (p, BigUint::one())).collect();
    for _ in 1..m {
        let mut next: HashMap<TritVector, BigUint> = HashMap::new();
        for (x, c) in &r {
            for p in s.iter() {
                *next.entry(*x + p).or_insert_with(BigUint::zero) += c;
            }
        }
        r = next;
    }
    Ok(r.values().map(|c| c * c).sum())
}

/// `E_2m` by the cheaper backend.
pub fn e2m(s: &PointSet, m: u32) -> Result<BigUint> {
    if m == 1 {
        return Ok(BigUint::from(s.len()));
    }
    if m == 2 {
        return e4(s);
    }
    match Backend::auto(s) {
        Backend::Transform => e2m_transform(s, m),
        Backend::Hash if s.n() <= TRANSFORM_LIMIT => e2m_transform(s, m),
        Backend::Hash => e2m_count(s, m),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HolderCheck {
    pub m: u32,
    /// `(E_4^{m-1}, E_2m · |S|^{m-2})` for `m > 2`.
    pub first: Option<(BigUint, BigUint)>,
    /// `(E_8^{m-1}, E_2m³ · |S|^{m-4})` for `m > 3`.
    pub second: Option<(BigUint, BigUint)>,
}

impl HolderCheck {
    pub fn holds(&self) -> bool {
        self.first.iter().chain(&self.second).all(|(l, r)| l <= r)
    }

    pub fn is_tight(&self) -> bool {
        self.first.iter().chain(&self.second).all(|(l, r)| l == r)
    }
}

/// Both Hölder liftings, cross-multiplied to integers.
pub fn holder_check(s: &PointSet, m: u32) -> Result<HolderCheck> {
    if m < 3 {
        return Err(Error::InvalidArgument(format!(
            "Hölder lifting needs m > 2, got {m}"
        )));
    }
    let size = BigUint::from(s.len());
    let e2m_val = e2m(s, m)?;
    let e4_val = e4(s)?;
    let first = Some((e4_val.pow(m - 1), &e2m_val * size.pow(m - 2)));
    let second = if m > 3 {
        let e8 = e2m(s, 4)?;
        Some((e8.pow(m - 1), e2m_val.pow(3) * size.pow(m - 4)))
    } else {
        None
    };
    Ok(HolderCheck { m, first, second })
}

/// Natural log of a big integer, report-only.
pub fn ln_big(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits <= 1000 {
        return num_traits::Float::ln(x.to_f64().unwrap_or(f64::INFINITY));
    }
    let shift = bits - 64;
    let top = (x >> shift).to_f64().unwrap_or(0.0);
    num_traits::Float::ln(top) + shift as f64 * core::f64::consts::LN_2
}

#[derive(Clone, Debug, PartialEq)]
pub struct EnergyReport {
    pub size: usize,
    pub e4: BigUint,
    pub e8: BigUint,
    pub e2m: BTreeMap<u32, BigUint>,
    /// `log_n(E_8) - 15`, report-only.
    pub sigma_eff: f64,
}

pub fn energy_report(s: &PointSet, ms: &[u32]) -> Result<EnergyReport> {
    let e4_val = e4(s)?;
    let e8 = e2m(s, 4)?;
    let mut table = BTreeMap::new();
    for &m in ms {
        table.insert(m, e2m(s, m)?);
    }
    Ok(EnergyReport {
        size: s.len(),
        sigma_eff: sigma_eff(&e8, s.n()),
        e4: e4_val,
        e8,
        e2m: table,
    })
}

fn sigma_eff(e8: &BigUint, n: u32) -> f64 {
    if n < 2 {
        return f64::NAN;
    }
    ln_big(e8) / num_traits::Float::ln(n as f64) - 15.0
}

#[derive(Clone, Debug, PartialEq)]
pub struct SmoothingReport {
    pub size: usize,
    pub e8: BigUint,
    /// `log_N(E_8) - 15` with `N` the ambient dimension.
    pub sigma_eff: f64,
    /// `30ε`.
    pub boundary: f64,
    /// `sigma_eff > 30ε`; descriptive only.
    pub smoothing_like: bool,
}

pub fn smoothing_report(delta: &PointSet, eps: f64) -> Result<SmoothingReport> {
    let e8 = e2m(delta, 4)?;
    let sigma = sigma_eff(&e8, delta.n());
    Ok(SmoothingReport {
        size: delta.len(),
        sigma_eff: sigma,
        boundary: 30.0 * eps,
        smoothing_like: sigma > 30.0 * eps,
        e8,
    })
}

/// Solutions of `±a ± b = ±c ± d` with `b, c, d ∈ Δ`, each of the 16 sign
/// patterns counted separately.
pub fn quadruple_participation(a: &TritVector, delta: &PointSet) -> Result<u64> {
    if a.dim() != delta.n() {
        return Err(Error::DimensionMismatch {
            left: delta.n(),
            right: a.dim(),
        });
    }
    // right-hand sums s3·c + s4·d over the 4 sign pairs
    let mut rhs: HashMap<TritVector, u64> = HashMap::new();
    for c in delta.iter() {
        for d in delta.iter() {
            for sc in [c, -c] {
                for sd in [d, -d] {
                    *rhs.entry(sc + sd).or_insert(0) += 1;
                }
            }
        }
    }
    let mut total = 0u64;
    for sa in [*a, -*a] {
        for b in delta.iter() {
            for sb in [b, -b] {
                total += rhs.get(&(sa + sb)).copied().unwrap_or(0);
            }
        }
    }
    Ok(total)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CrossQuadruples {
    pub count: BigUint,
    /// `count / (|B| |C|²)`.
    pub ratio: BigRational,
}

/// `#{(b1, c1, b2, c2) : b1 + c1 = b2 + c2}`.
pub fn cross_quadruples(b: &PointSet, c: &PointSet) -> Result<CrossQuadruples> {
    if b.n() != c.n() {
        return Err(Error::DimensionMismatch {
            left: b.n(),
            right: c.n(),
        });
    }
    let mut sums: HashMap<TritVector, u64> = HashMap::new();
    for x in b.iter() {
        for y in c.iter() {
            *sums.entry(x + y).or_insert(0) += 1;
        }
    }
    let count: BigUint = sums
        .values()
        .map(|&r| BigUint::from(r as u128 * r as u128))
        .sum();
    let denom = BigUint::from(b.len()) * BigUint::from(c.len()).pow(2);
    let ratio = if denom.is_zero() {
        BigRational::zero()
    } else {
        BigRational::new(count.clone().into(), denom.into())
    };
    Ok(CrossQuadruples { count, ratio })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::capset::random_set;
    use crate::linalg::Subspace;
    use crate::reference;

    fn subspace_set(n: u32, d: u32) -> PointSet {
        let basis: Vec<_> = (0..d)
            .map(|i| {
                TritVector::unit(n, i).unwrap()
                    + TritVector::unit(n, n - 1).unwrap().scale((i % 2) as u8)
            })
            .collect();
        PointSet::of_subspace(&Subspace::span(n, &basis).unwrap()).unwrap()
    }

    fn b(v: u128) -> BigUint {
        BigUint::from(v)
    }

    #[test]
    fn multiplicity_examples() {
        let n = 4;
        for d in 0..=3 {
            let s = subspace_set(n, d);
            let m = diff_multiplicity_hash(&s);
            for x in s.iter() {
                assert_eq!(m.get(&x), pow3(d));
            }
            assert_eq!(m.support_len(), s.len());
            assert_eq!(diff_multiplicity_transform(&s).unwrap(), m);
        }
        let e1 = TritVector::unit(3, 0).unwrap();
        let s = PointSet::new(3, [TritVector::zero(3).unwrap(), e1]).unwrap();
        let m = diff_multiplicity_hash(&s);
        assert_eq!(
            (
                m.get(&TritVector::zero(3).unwrap()),
                m.get(&e1),
                m.get(&-e1)
            ),
            (2, 1, 1)
        );
        assert_eq!(m.support_len(), 3);
    }

    #[test]
    fn multiplicity_backends_agree() {
        for seed in 0..30u64 {
            let n = 2 + (seed % 5) as u32;
            let s = random_set(
                n,
                ((seed as usize * 3) % 40 + 1).min(pow3(n) as usize),
                seed,
            )
            .unwrap();
            let h = diff_multiplicity_hash(&s);
            assert_eq!(h, diff_multiplicity_transform(&s).unwrap());
            assert_eq!(h.get(&TritVector::zero(n).unwrap()), s.len() as u64);
            assert_eq!(h.total(), (s.len() as u128).pow(2));
            for (x, m) in h.iter() {
                assert_eq!(h.get(&-x), m);
            }
        }
    }

    #[test]
    fn e4_examples() {
        for d in 0..=3 {
            assert_eq!(e4(&subspace_set(5, d)).unwrap(), b(pow3(3 * d) as u128));
        }
        let one = PointSet::new(3, [TritVector::unit(3, 1).unwrap()]).unwrap();
        assert_eq!(e4(&one).unwrap(), b(1));
        for seed in 0..30u64 {
            let s = random_set(5, 1 + (seed as usize * 11) % 60, seed).unwrap();
            assert_eq!(e4_hash(&s), b(reference::e4_brute(&s)));
        }
    }

    #[test]
    fn e2m_examples() {
        let n = 3;
        let origin = PointSet::new(n, [TritVector::zero(n).unwrap()]).unwrap();
        let full = PointSet::full(n).unwrap();
        for m in 1..=5 {
            assert_eq!(e2m_transform(&origin, m).unwrap(), b(1));
            assert_eq!(
                e2m_transform(&full, m).unwrap(),
                b(pow3((2 * m - 1) * n) as u128)
            );
        }
        for seed in 0..40u64 {
            let s = random_set(3 + (seed % 3) as u32, 1 + (seed as usize) % 25, seed).unwrap();
            assert_eq!(e2m_transform(&s, 1).unwrap(), b(s.len() as u128));
            assert_eq!(e2m_transform(&s, 2).unwrap(), e4_hash(&s));
            for m in 1..=4 {
                let t = e2m_transform(&s, m).unwrap();
                assert_eq!(t, e2m_count(&s, m).unwrap());
                assert!(t >= BigUint::from(s.len()).pow(m));
            }
        }
        // direct enumeration of tuples on tiny sets
        for seed in 0..6u64 {
            let s = random_set(3, 5, seed).unwrap();
            assert_eq!(
                e2m_transform(&s, 3).unwrap(),
                b(reference::e2m_enumerate(&s, 3))
            );
        }
        assert!(e2m_transform(&origin, 0).is_err());
    }

    #[test]
    fn translation_and_negation_invariance() {
        for seed in 0..10u64 {
            let s = random_set(5, 30, seed).unwrap();
            let v = TritVector::from_index(5, seed * 17 % 243).unwrap();
            for m in 1..=4 {
                let base = e2m_transform(&s, m).unwrap();
                assert_eq!(e2m_transform(&s.translate(&v).unwrap(), m).unwrap(), base);
                assert_eq!(e2m_transform(&s.negate(), m).unwrap(), base);
            }
        }
    }

    #[test]
    fn holder() {
        for d in 1..=3 {
            let s = subspace_set(6, d);
            for m in 3..=5 {
                let h = holder_check(&s, m).unwrap();
                assert!(h.is_tight(), "d={d} m={m} {h:?}");
            }
        }
        let one = PointSet::new(3, [TritVector::unit(3, 1).unwrap()]).unwrap();
        let h = holder_check(&one, 4).unwrap();
        assert_eq!(h.first, Some((b(1), b(1))));
        assert!(holder_check(&one, 2).is_err());
        for seed in 0..20u64 {
            let s = random_set(5, 5 + seed as usize * 3, seed).unwrap();
            for m in 3..=5 {
                assert!(holder_check(&s, m).unwrap().holds());
            }
        }
    }

    #[test]
    fn smoothing() {
        let one = PointSet::new(4, [TritVector::unit(4, 1).unwrap()]).unwrap();
        assert_eq!(smoothing_report(&one, 0.0).unwrap().e8, b(1));
        let s = subspace_set(8, 4);
        let r = smoothing_report(&s, 0.0).unwrap();
        assert_eq!(r.e8, b(pow3(28) as u128));
        let expect = 28.0 * 3f64.ln() / 8f64.ln() - 15.0;
        assert!((r.sigma_eff - expect).abs() < 1e-9);
    }

    #[test]
    fn participation() {
        // Δ = {a}: sign patterns with s1 + s2 = s3 + s4, enumerated
        let a = TritVector::unit(3, 0).unwrap();
        let mut want = 0;
        for s in 0..16u32 {
            let sign = |k: u32| if s >> k & 1 == 1 { -1i32 } else { 1 };
            let total = sign(0) + sign(1) - sign(2) - sign(3);
            if total.rem_euclid(3) == 0 {
                want += 1;
            }
        }
        assert_eq!(
            quadruple_participation(&a, &PointSet::new(3, [a]).unwrap()).unwrap(),
            want
        );
        let e1 = TritVector::unit(2, 0).unwrap();
        let e2 = TritVector::unit(2, 1).unwrap();
        let d = PointSet::new(2, [e1]).unwrap();
        assert_eq!(quadruple_participation(&e2, &d).unwrap(), 0);
        for seed in 0..10u64 {
            let d = random_set(4, 12, seed).unwrap();
            let a = TritVector::from_index(4, seed * 7 % 81).unwrap();
            let brute = {
                let mut c = 0;
                for s in 0..16u32 {
                    let sg = |k: u32, v: TritVector| if s >> k & 1 == 1 { -v } else { v };
                    for x in d.iter() {
                        for y in d.iter() {
                            for z in d.iter() {
                                if sg(0, a) + sg(1, x) == sg(2, y) + sg(3, z) {
                                    c += 1;
                                }
                            }
                        }
                    }
                }
                c
            };
            let got = quadruple_participation(&a, &d).unwrap();
            assert_eq!(got, brute);
            assert_eq!(quadruple_participation(&-a, &d).unwrap(), got);
        }
    }

    #[test]
    fn cross() {
        let s = subspace_set(5, 2);
        assert_eq!(cross_quadruples(&s, &s).unwrap().count, b(pow3(6) as u128));
        let one = PointSet::new(3, [TritVector::unit(3, 1).unwrap()]).unwrap();
        assert_eq!(cross_quadruples(&one, &one).unwrap().count, b(1));
        for seed in 0..10u64 {
            let x = random_set(4, 1 + seed as usize * 3, seed).unwrap();
            let y = random_set(4, 2 + seed as usize * 2, seed + 100).unwrap();
            assert_eq!(
                cross_quadruples(&x, &y).unwrap().count,
                b(reference::cross_quadruples_brute(&x, &y))
            );
        }
    }
}
