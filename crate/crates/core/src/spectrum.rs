//! Large spectrum, hyperplane densities and increment checks.

use alloc::vec::Vec;

use num_bigint::{BigInt, BigUint};
use num_rational::{BigRational, Ratio};
use num_traits::One;

use crate::capset::PointSet;
use crate::fourier::SpectrumTable;
use crate::linalg::Subspace;
use crate::{pow3, Eisenstein, Error, Result, TritVector};

/// The spectrum `{x ≠ 0 : |c(x)|·3^n ≥ t·|A|²}` of a set, `t` a rational
/// threshold (default 1), tested as `norm(c(x))·3^{2n}·den² ≥ num²·|A|⁴`.
#[derive(Clone, Debug)]
pub struct SpectrumSet {
    base_size: usize,
    threshold: Ratio<u64>,
    members: PointSet,
    norms: Vec<u64>,
}

fn big(v: u64) -> BigUint {
    BigUint::from(v)
}

fn is_member(norm: u64, n: u32, size: usize, threshold: &Ratio<u64>) -> bool {
    let lhs = big(norm) * big(pow3(n)).pow(2) * big(*threshold.denom()).pow(2);
    let rhs = big(*threshold.numer()).pow(2) * big(size as u64).pow(4);
    lhs >= rhs
}

impl SpectrumSet {
    pub fn extract(a: &PointSet, threshold: Ratio<u64>) -> Result<Self> {
        let t = SpectrumTable::of_set(a)?;
        Ok(Self::from_table(a, &t, threshold))
    }

    pub fn from_table(a: &PointSet, table: &SpectrumTable, threshold: Ratio<u64>) -> Self {
        let n = a.n();
        let mut members = Vec::new();
        let mut norms = Vec::new();
        for (i, c) in table.coeffs().iter().enumerate().skip(1) {
            let norm = c.norm() as u64;
            if is_member(norm, n, a.len(), &threshold) {
                members.push(TritVector::from_index(n, i as u64).expect("index in range"));
                norms.push(norm);
            }
        }
        // coefficients are visited in index order, so `members` is already sorted
        let members = PointSet::new(n, members).expect("same dimension");
        Self {
            base_size: a.len(),
            threshold,
            members,
            norms,
        }
    }

    pub fn members(&self) -> &PointSet {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn threshold(&self) -> Ratio<u64> {
        self.threshold
    }

    pub fn base_size(&self) -> usize {
        self.base_size
    }

    /// `(x, norm(c(x)))` in index order.
    pub fn iter(&self) -> impl Iterator<Item = (TritVector, u64)> + '_ {
        self.members.iter().zip(self.norms.iter().copied())
    }

    pub fn is_symmetric(&self) -> bool {
        self.members.iter().all(|x| self.members.contains(&-x))
    }
}

/// `(k0, k1, k2)` with `k_j = |A ∩ {y : x·y = j}|`, from `c(0), c(x), c(2x)`
/// by the inverse size-3 transform.
pub fn coset_counts(table: &SpectrumTable, x: &TritVector) -> Result<[u64; 3]> {
    if x.is_zero() {
        return Err(Error::ZeroFrequency);
    }
    if x.dim() != table.n() {
        return Err(Error::DimensionMismatch {
            left: table.n(),
            right: x.dim(),
        });
    }
    let c = [table.at_index(0), table.at(x), table.at(&x.scale(2))].map(Eisenstein::widen);
    let mut out = [0u64; 3];
    for (j, slot) in out.iter_mut().enumerate() {
        // Σ_t c(t·x) ω^{-t·j}
        let z = c[0]
            + c[1].mul_omega_pow((3 - j as u8) % 3)
            + c[2].mul_omega_pow(((3 - (2 * j) % 3) % 3) as u8);
        if z.q != 0 || z.p % 3 != 0 || z.p < 0 {
            return Err(Error::IdentityViolation(alloc::format!(
                "coset count not a natural number: {z}/3"
            )));
        }
        *slot = (z.p / 3) as u64;
    }
    Ok(out)
}

/// An affine subspace `shift + direction`, with canonical shift.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AffineSubspace {
    pub direction: Subspace,
    pub shift: TritVector,
}

impl AffineSubspace {
    pub fn new(direction: Subspace, shift: TritVector) -> Result<Self> {
        if shift.dim() != direction.ambient_dim() {
            return Err(Error::DimensionMismatch {
                left: direction.ambient_dim(),
                right: shift.dim(),
            });
        }
        let shift = direction.reduce(shift);
        Ok(Self { direction, shift })
    }

    /// `{y : x·y = j}`.
    pub fn hyperplane(x: &TritVector, j: u8) -> Result<Self> {
        let p = x.leading().ok_or(Error::ZeroFrequency)?;
        let direction = Subspace::span(x.dim(), &[*x])?.annihilator();
        // x_p·t ≡ j  ⇒  t = j·x_p (x_p is its own inverse mod 3)
        let shift = TritVector::unit(x.dim(), p)?.scale((j * x.trit(p)) % 3);
        Self::new(direction, shift)
    }

    pub fn contains(&self, v: &TritVector) -> bool {
        self.direction.contains(&(*v - self.shift))
    }

    pub fn codim(&self) -> u32 {
        self.direction.codim()
    }

    pub fn size(&self) -> u64 {
        self.direction.size()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IncrementReport {
    pub subspace: AffineSubspace,
    pub codim: u32,
    pub hits: u64,
    pub density: BigRational,
    pub rho: BigRational,
    /// `ρ(1 + 20d/n)`.
    pub threshold: BigRational,
    /// `density - threshold`.
    pub excess: BigRational,
    pub strong: bool,
}

fn ratio(num: u64, den: u64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

fn increment_report(a: &PointSet, v: AffineSubspace, hits: u64) -> IncrementReport {
    let n = a.n();
    let d = v.codim();
    let density = ratio(hits, v.size());
    let rho = ratio(a.len() as u64, pow3(n));
    let threshold = &rho * (BigRational::one() + ratio(20 * d as u64, n as u64));
    let excess = &density - &threshold;
    // `density > rho` excludes the empty set and the codim-0 case, where
    // density == threshold == rho
    let strong = density >= threshold && density > rho;
    IncrementReport {
        subspace: v,
        codim: d,
        hits,
        density,
        rho,
        threshold,
        excess,
        strong,
    }
}

/// Exact density of `A` on `V` against `ρ(1 + 20d/n)`. An increment counts
/// as strong when the density reaches the threshold.
pub fn strong_increment_check(a: &PointSet, v: &AffineSubspace) -> Result<IncrementReport> {
    let n = a.n();
    if v.direction.ambient_dim() != n {
        return Err(Error::DimensionMismatch {
            left: n,
            right: v.direction.ambient_dim(),
        });
    }
    let d = v.codim();
    if 2 * d > n {
        return Err(Error::CodimTooLarge { codim: d, n });
    }
    let hits = if (a.len() as u64) <= v.size() {
        a.iter().filter(|p| v.contains(p)).count() as u64
    } else {
        v.direction
            .enumerate()?
            .filter(|w| a.contains(&(*w + v.shift)))
            .count() as u64
    };
    Ok(increment_report(a, v.clone(), hits))
}

/// Every affine hyperplane carrying a strong increment. An empty result
/// certifies the codimension-1 part of the no-strong-increment condition.
pub fn scan_codim1_increments(a: &PointSet, table: &SpectrumTable) -> Result<Vec<IncrementReport>> {
    let n = a.n();
    if n < 2 {
        return Ok(Vec::new());
    }
    let size = a.len() as u64;
    // one representative x per line {x, 2x}: leading trit 1
    let scan = |i: u64| -> Result<Vec<IncrementReport>> {
        let x = TritVector::from_index(n, i)?;
        match x.leading() {
            Some(p) if x.trit(p) == 1 => {}
            _ => return Ok(Vec::new()),
        }
        let counts = coset_counts(table, &x)?;
        let mut out = Vec::new();
        for (j, &k) in counts.iter().enumerate() {
            // k/3^{n-1} ≥ (|A|/3^n)(1 + 20/n)  ⇔  3nk ≥ |A|(n + 20)
            if 3 * n as u64 * k >= size * (n as u64 + 20) && k * 3 > size {
                let report = increment_report(a, AffineSubspace::hyperplane(&x, j as u8)?, k);
                debug_assert!(report.strong);
                out.push(report);
            }
        }
        Ok(out)
    };
    #[cfg(feature = "parallel")]
    let parts: Vec<Vec<IncrementReport>> = {
        use rayon::prelude::*;
        (1..pow3(n))
            .into_par_iter()
            .map(scan)
            .collect::<Result<_>>()?
    };
    #[cfg(not(feature = "parallel"))]
    let parts: Vec<Vec<IncrementReport>> = (1..pow3(n)).map(scan).collect::<Result<_>>()?;
    Ok(parts.into_iter().flatten().collect())
}

#[derive(Clone, Debug, PartialEq)]
pub struct SubspaceStats {
    pub dim: u32,
    /// `|Δ ∩ W|`.
    pub count: usize,
    /// `Σ_{w ≠ 0 ∈ W} norm(c(w))`, unnormalized.
    pub energy: u128,
    /// `energy / 3^{2n}`, report-only.
    pub normalized_energy: f64,
    /// `d · n^{1+2ε}`, report-only.
    pub count_scale: f64,
    /// `ρ² d / n`, report-only.
    pub energy_scale: f64,
}

/// Intersection of the spectrum with a subspace and the `L²` mass of the
/// transform on it.
pub fn subspace_spectrum_stats(
    delta: &SpectrumSet,
    table: &SpectrumTable,
    w: &Subspace,
    eps: f64,
) -> Result<SubspaceStats> {
    let n = table.n();
    if w.ambient_dim() != n {
        return Err(Error::DimensionMismatch {
            left: n,
            right: w.ambient_dim(),
        });
    }
    let mut count = 0;
    let mut energy = 0u128;
    for x in w.enumerate()?.skip(1) {
        energy += table.at(&x).norm() as u128;
        if delta.members().contains(&x) {
            count += 1;
        }
    }
    let nf = n as f64;
    let d = w.dim() as f64;
    let rho = delta.base_size() as f64 / pow3(n) as f64;
    let scale = pow3(n) as f64;
    Ok(SubspaceStats {
        dim: w.dim(),
        count,
        energy,
        normalized_energy: energy as f64 / (scale * scale),
        count_scale: d * libm_pow(nf, 1.0 + 2.0 * eps),
        energy_scale: rho * rho * d / nf,
    })
}

fn libm_pow(x: f64, y: f64) -> f64 {
    num_traits::Float::powf(x, y)
}

/// Affine subspace `shift + ann(span(picks))`; with `picks` drawn from the
/// spectrum this gives the sampled higher-codimension spot checks.
pub fn increment_candidate(picks: &[TritVector], shift: TritVector) -> Result<AffineSubspace> {
    let n = shift.dim();
    let w = Subspace::span(n, picks)?;
    AffineSubspace::new(w.annihilator(), shift)
}

/// Default threshold multiplier.
pub fn default_threshold() -> Ratio<u64> {
    Ratio::one()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::capset::{greedy_random_capset, random_set};

    fn hyperplane_set(x0: &TritVector) -> PointSet {
        PointSet::of_subspace(&Subspace::span(x0.dim(), &[*x0]).unwrap().annihilator()).unwrap()
    }

    #[test]
    fn extract_examples() {
        let n = 4;
        let full = PointSet::full(n).unwrap();
        assert!(SpectrumSet::extract(&full, default_threshold())
            .unwrap()
            .is_empty());
        let x0: TritVector = "0121".parse().unwrap();
        let h = SpectrumSet::extract(&hyperplane_set(&x0), default_threshold()).unwrap();
        assert_eq!(
            h.members().points(),
            PointSet::new(n, [x0, -x0]).unwrap().points()
        );
        let origin = PointSet::new(n, [TritVector::zero(n).unwrap()]).unwrap();
        assert_eq!(
            SpectrumSet::extract(&origin, default_threshold())
                .unwrap()
                .len(),
            80
        );
    }

    #[test]
    fn symmetry_and_monotonicity() {
        for seed in 0..40u64 {
            let n = 3 + (seed % 4) as u32;
            let a = if seed % 2 == 0 {
                greedy_random_capset(n, seed).unwrap()
            } else {
                random_set(n, 20, seed).unwrap()
            };
            let t = SpectrumTable::of_set(&a).unwrap();
            let mut prev: Option<PointSet> = None;
            for (num, den) in [(1, 4), (1, 2), (1, 1), (2, 1), (4, 1), (9, 1)] {
                let s = SpectrumSet::from_table(&a, &t, Ratio::new(num, den));
                assert!(s.is_symmetric());
                assert!(!s.members().contains(&TritVector::zero(n).unwrap()));
                if let Some(p) = &prev {
                    assert!(s.members().is_subset_of(p));
                }
                prev = Some(s.members().clone());
            }
        }
    }

    #[test]
    fn coset_counts_examples() {
        let n = 4;
        let x0: TritVector = "1200".parse().unwrap();
        let h = hyperplane_set(&x0);
        let t = SpectrumTable::of_set(&h).unwrap();
        assert_eq!(coset_counts(&t, &x0).unwrap(), [27, 0, 0]);
        let full = SpectrumTable::of_set(&PointSet::full(n).unwrap()).unwrap();
        assert_eq!(coset_counts(&full, &x0).unwrap(), [27, 27, 27]);
        assert_eq!(
            coset_counts(&full, &TritVector::zero(n).unwrap()),
            Err(Error::ZeroFrequency)
        );
        for seed in 0..20 {
            let a = random_set(n, 25, seed).unwrap();
            let t = SpectrumTable::of_set(&a).unwrap();
            for i in 1..pow3(n) {
                let x = TritVector::from_index(n, i).unwrap();
                let mut direct = [0u64; 3];
                for p in a.iter() {
                    direct[x.dot(&p) as usize] += 1;
                }
                assert_eq!(coset_counts(&t, &x).unwrap(), direct);
            }
        }
    }

    #[test]
    fn increment_examples() {
        let n = 10;
        let x0 = TritVector::unit(n, 3).unwrap();
        let a = hyperplane_set(&x0);
        let v = AffineSubspace::hyperplane(&x0, 0).unwrap();
        let r = strong_increment_check(&a, &v).unwrap();
        assert_eq!(r.density, BigRational::one());
        assert!(r.strong);
        let full = PointSet::full(6).unwrap();
        let v = AffineSubspace::hyperplane(&"120012".parse().unwrap(), 2).unwrap();
        let r = strong_increment_check(&full, &v).unwrap();
        assert_eq!(r.density, r.rho);
        assert!(!r.strong);
        let deep =
            AffineSubspace::new(Subspace::zero(6).unwrap(), TritVector::zero(6).unwrap()).unwrap();
        assert!(matches!(
            strong_increment_check(&full, &deep),
            Err(Error::CodimTooLarge { .. })
        ));
    }

    #[test]
    fn increment_density_matches_scan() {
        for seed in 0..20u64 {
            let n = 6;
            let a = random_set(n, 100, seed).unwrap();
            let picks: Vec<TritVector> = (0..(1 + seed % 3))
                .map(|k| TritVector::from_index(n, 1 + (seed * 37 + k * 101) % 728).unwrap())
                .collect();
            let v =
                increment_candidate(&picks, TritVector::from_index(n, seed * 11 % 729).unwrap())
                    .unwrap();
            let r = strong_increment_check(&a, &v).unwrap();
            let direct = a
                .iter()
                .filter(|p| picks.iter().all(|x| x.dot(p) == x.dot(&v.shift)))
                .count() as u64;
            assert_eq!(r.hits, direct);
        }
    }

    #[test]
    fn codim1_scan() {
        let full = PointSet::full(5).unwrap();
        let t = SpectrumTable::of_set(&full).unwrap();
        assert!(scan_codim1_increments(&full, &t).unwrap().is_empty());
        let x0: TritVector = "1000000000".parse().unwrap();
        let h = hyperplane_set(&x0);
        let t = SpectrumTable::of_set(&h).unwrap();
        let found = scan_codim1_increments(&h, &t).unwrap();
        assert!(found
            .iter()
            .any(|r| r.subspace == AffineSubspace::hyperplane(&x0, 0).unwrap()));
        let a = greedy_random_capset(7, 5).unwrap();
        let t = SpectrumTable::of_set(&a).unwrap();
        let first = scan_codim1_increments(&a, &t).unwrap();
        assert_eq!(first, scan_codim1_increments(&a, &t).unwrap());
        for r in &first {
            assert_eq!(strong_increment_check(&a, &r.subspace).unwrap(), *r);
        }
    }

    #[test]
    fn subspace_stats() {
        let n = 5;
        let x0: TritVector = "01201".parse().unwrap();
        let a = hyperplane_set(&x0);
        let t = SpectrumTable::of_set(&a).unwrap();
        let delta = SpectrumSet::from_table(&a, &t, default_threshold());
        let zero = Subspace::zero(n).unwrap();
        let s = subspace_spectrum_stats(&delta, &t, &zero, 0.0).unwrap();
        assert_eq!((s.count, s.energy), (0, 0));
        let w = Subspace::span(n, &[x0]).unwrap();
        assert_eq!(
            subspace_spectrum_stats(&delta, &t, &w, 0.0).unwrap().count,
            2
        );
        let r = random_set(n, 60, 3).unwrap();
        let t = SpectrumTable::of_set(&r).unwrap();
        let delta = SpectrumSet::from_table(&r, &t, Ratio::new(1, 3));
        let w = Subspace::span(n, &["11000".parse().unwrap(), "00121".parse().unwrap()]).unwrap();
        let s = subspace_spectrum_stats(&delta, &t, &w, 0.0).unwrap();
        let brute: u128 = w
            .enumerate()
            .unwrap()
            .skip(1)
            .map(|x| crate::reference::coefficient(&r, &x).norm() as u128)
            .sum();
        assert_eq!(s.energy, brute);
    }
}
