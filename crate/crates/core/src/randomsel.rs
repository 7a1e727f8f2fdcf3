//! Random selection from a set of frequencies: samples without replacement,
//! the nullity distribution of random samples, and the exact counting
//! formulas `g(k, d)` and `h(m, k)`.

use alloc::vec;
use alloc::vec::Vec;

use num_bigint::{BigInt, BigUint};
use num_integer::binomial;
use num_rational::BigRational;
use num_traits::{One, Pow, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::capset::PointSet;
use crate::energy::e2m;
use crate::linalg::nullity;
use crate::{Error, Result, TritVector};

/// A uniformly random `d`-subset of `s`, in sampling order.
pub fn sample_without_replacement<R: Rng + ?Sized>(
    s: &PointSet,
    d: usize,
    rng: &mut R,
) -> Result<Vec<TritVector>> {
    if d > s.len() {
        return Err(Error::SampleTooLarge { d, len: s.len() });
    }
    let pts = s.points();
    Ok(rand::seq::index::sample(rng, pts.len(), d)
        .into_iter()
        .map(|i| pts[i])
        .collect())
}

/// The generator for trial `t` of a run seeded with `seed`. Trials use
/// disjoint streams so they can run in any order.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NullityExperiment {
    pub source_len: usize,
    pub d: usize,
    pub trials: u64,
    pub seed: u64,
    /// `histogram[k]` = trials with nullity exactly `k`, for `k = 0..=d`.
    pub histogram: Vec<u64>,
}

impl NullityExperiment {
    /// Empirical `P(nullity ≥ k)` for `k = 0..=d`.
    pub fn tail(&self) -> Vec<BigRational> {
        let total = BigInt::from(self.trials.max(1));
        let mut acc = 0u64;
        let mut out: Vec<BigRational> = self
            .histogram
            .iter()
            .rev()
            .map(|&c| {
                acc += c;
                BigRational::new(BigInt::from(acc), total.clone())
            })
            .collect();
        out.reverse();
        out
    }

    /// The curve `2^{-k}` over the same range.
    pub fn reference_curve(&self) -> Vec<BigRational> {
        (0..=self.d)
            .map(|k| BigRational::new(BigInt::one(), BigInt::from(2u8).pow(k)))
            .collect()
    }
}

fn nullity_trial(pts: &PointSet, d: usize, seed: u64, trial: u64) -> usize {
    let sample =
        sample_without_replacement(pts, d, &mut trial_rng(seed, trial)).expect("size checked");
    nullity(&sample)
}

/// Histogram of the nullity of `d` vectors drawn without replacement from
/// `s`, over `trials` seeded trials.
pub fn nullity_distribution(
    s: &PointSet,
    d: usize,
    trials: u64,
    seed: u64,
) -> Result<NullityExperiment> {
    if d > s.len() {
        return Err(Error::SampleTooLarge { d, len: s.len() });
    }
    let mut histogram = vec![0u64; d + 1];
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        let counts = (0..trials)
            .into_par_iter()
            .fold(
                || vec![0u64; d + 1],
                |mut h, t| {
                    h[nullity_trial(s, d, seed, t)] += 1;
                    h
                },
            )
            .reduce(
                || vec![0u64; d + 1],
                |a, b| a.iter().zip(&b).map(|(x, y)| x + y).collect(),
            );
        histogram = counts;
    }
    #[cfg(not(feature = "parallel"))]
    for t in 0..trials {
        histogram[nullity_trial(s, d, seed, t)] += 1;
    }
    Ok(NullityExperiment {
        source_len: s.len(),
        d,
        trials,
        seed,
        histogram,
    })
}

/// `g(k, d) = C(d, k) (d - 1)^{d - k} / d^d`, the probability that exactly
/// `k` of `d` independent events of probability `1/d` occur.
pub fn g(k: u32, d: u32) -> Result<BigRational> {
    if d == 0 || k > d {
        return Err(Error::InvalidArgument(alloc::format!(
            "g({k}, {d}) needs 0 ≤ k ≤ d and d ≥ 1"
        )));
    }
    let num = binomial(BigUint::from(d), BigUint::from(k)) * BigUint::from(d - 1).pow(d - k);
    let den = BigUint::from(d).pow(d);
    Ok(BigRational::new(num.into(), den.into()))
}

/// `h(m, k) = 2^m (2m)! C(2mk, 2m)`.
pub fn h(m: u32, k: u32) -> BigUint {
    let two_m = 2 * m as u64;
    let choose = binomial(BigUint::from(two_m * k as u64), BigUint::from(two_m));
    if choose.is_zero() {
        return choose;
    }
    let fact: BigUint = (1..=two_m).map(BigUint::from).product();
    (BigUint::one() << m as usize) * fact * choose
}

/// `(d / |Δ|)^{2m} E_{2m}(Δ)`, the energy a uniformly random `d`-subset
/// would have if points were kept independently.
pub fn expected_tuples(delta: &PointSet, d: usize, m: u32) -> Result<BigRational> {
    if delta.is_empty() {
        return Ok(BigRational::zero());
    }
    let energy = BigInt::from(e2m(delta, m)?);
    let ratio = BigRational::new(BigInt::from(d), BigInt::from(delta.len()));
    Ok(ratio.pow(2 * m as i32) * BigRational::from_integer(energy))
}

/// Mean of `E_{2m}(S)` over `samples` seeded `d`-subsets `S ⊆ Δ`.
pub fn empirical_mean_tuples(
    delta: &PointSet,
    d: usize,
    m: u32,
    samples: u64,
    seed: u64,
) -> Result<BigRational> {
    if samples == 0 {
        return Err(Error::InvalidArgument("no samples".into()));
    }
    let mut total = BigUint::zero();
    for t in 0..samples {
        let pick = sample_without_replacement(delta, d, &mut trial_rng(seed, t))?;
        total += e2m(&PointSet::new(delta.n(), pick)?, m)?;
    }
    Ok(BigRational::new(total.into(), BigInt::from(samples)))
}

/// `g` as a float, for reports.
pub fn g_f64(k: u32, d: u32) -> Result<f64> {
    Ok(g(k, d)?.to_f64().unwrap_or(f64::NAN))
}
