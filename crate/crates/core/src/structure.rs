//! Diagnostics of additive structure on concrete sets: dyadic levels of the
//! difference multiplicity, the sets `Δ_G[x]`, the triple count
//! `K(Δ, G, D)` and its intersection histogram, doubling, span hulls, and
//! the fiber decomposition with its Plancherel identities.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use hashbrown::{HashMap, HashSet};
use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{Float, Zero};

use crate::capset::PointSet;
use crate::energy::{diff_multiplicity, MultiplicityMap};
use crate::gf3::character;
use crate::linalg::Subspace;
use crate::{Eisenstein, Error, Result, TritVector};

/// Largest `dim K` accepted by [`fiber_plancherel_check`].
pub const FIBER_K_LIMIT: u32 = 14;

/// Pairs `G ⊆ Δ × Δ` (as positions into `delta.points()`), their difference
/// set `D`, and the multiplicity band `[m_lo, m_hi)` they were cut from.
#[derive(Clone, Debug)]
pub struct AdditiveStructure {
    delta: PointSet,
    pairs: Vec<(u32, u32)>,
    diffs: PointSet,
    m_lo: u64,
    m_hi: u64,
}

impl AdditiveStructure {
    /// Builds a structure from explicit pairs. Every pair must lie in
    /// `Δ × Δ`; `D` is the set of their differences.
    pub fn new(
        delta: PointSet,
        pairs: Vec<(TritVector, TritVector)>,
        m_lo: u64,
        m_hi: u64,
    ) -> Result<Self> {
        let mut pos = Vec::with_capacity(pairs.len());
        for (a, b) in &pairs {
            let (Some(i), Some(j)) = (delta.position(a), delta.position(b)) else {
                return Err(Error::InvalidArgument(alloc::format!(
                    "pair ({a}, {b}) not in Δ × Δ"
                )));
            };
            pos.push((i as u32, j as u32));
        }
        pos.sort_unstable();
        pos.dedup();
        let diffs = PointSet::new(delta.n(), pairs.iter().map(|(a, b)| *a - *b))?;
        Ok(Self {
            delta,
            pairs: pos,
            diffs,
            m_lo,
            m_hi,
        })
    }

    pub fn delta(&self) -> &PointSet {
        &self.delta
    }

    pub fn differences(&self) -> &PointSet {
        &self.diffs
    }

    pub fn pairs(&self) -> impl Iterator<Item = (TritVector, TritVector)> + '_ {
        let p = self.delta.points();
        self.pairs
            .iter()
            .map(move |&(i, j)| (p[i as usize], p[j as usize]))
    }

    pub fn g_len(&self) -> usize {
        self.pairs.len()
    }

    pub fn band(&self) -> (u64, u64) {
        (self.m_lo, self.m_hi)
    }

    /// `log_n(m_lo) - 1` with `n` the ambient dimension, report-only.
    pub fn alpha_eff(&self) -> f64 {
        let big_n = Float::ln(self.delta.n() as f64);
        Float::ln(self.m_lo as f64) / big_n - 1.0
    }

    /// For each `x ∈ D` (by position in `differences()`), the positions in
    /// `Δ` of `Δ_G[x]`, sorted.
    fn incidence(&self) -> Vec<Vec<u32>> {
        let mut out = vec![Vec::new(); self.diffs.len()];
        let p = self.delta.points();
        for &(i, j) in &self.pairs {
            let x = p[i as usize] - p[j as usize];
            let k = self.diffs.position(&x).expect("difference recorded");
            out[k].push(i);
        }
        for v in out.iter_mut() {
            v.sort_unstable();
        }
        out
    }
}

#[derive(Clone, Debug)]
pub struct Levels {
    pub multiplicity: MultiplicityMap,
    pub structures: Vec<AdditiveStructure>,
    /// Index into `structures` of the band with the most pairs.
    pub dominant: usize,
}

/// Splits `Δ × Δ` into dyadic bands `[2^t, 2^{t+1})` of `m(a - b)`.
pub fn build_levels(delta: &PointSet) -> Result<Levels> {
    let m = diff_multiplicity(delta)?;
    let pts = delta.points();
    let lookup: HashMap<TritVector, u64> = m.iter().collect();
    let mut bands: BTreeMap<u32, Vec<(u32, u32)>> = BTreeMap::new();
    for (i, &a) in pts.iter().enumerate() {
        for (j, &b) in pts.iter().enumerate() {
            let mult = lookup[&(a - b)];
            bands
                .entry(63 - mult.leading_zeros())
                .or_default()
                .push((i as u32, j as u32));
        }
    }
    let mut structures = Vec::with_capacity(bands.len());
    for (t, pairs) in bands {
        let diffs = PointSet::new(
            delta.n(),
            pairs
                .iter()
                .map(|&(i, j)| pts[i as usize] - pts[j as usize]),
        )?;
        structures.push(AdditiveStructure {
            delta: delta.clone(),
            pairs,
            diffs,
            m_lo: 1 << t,
            m_hi: 1 << (t + 1),
        });
    }
    let dominant = structures
        .iter()
        .enumerate()
        .max_by(|(i, a), (j, b)| a.g_len().cmp(&b.g_len()).then(j.cmp(i)))
        .map(|(i, _)| i)
        .unwrap_or(0);
    Ok(Levels {
        multiplicity: m,
        structures,
        dominant,
    })
}

/// `Δ_G[x] = {a ∈ Δ : (a, a - x) ∈ G}`. Empty when `x ∉ D`.
pub fn delta_g(x: &TritVector, s: &AdditiveStructure) -> PointSet {
    let p = s.delta.points();
    let firsts = s
        .pairs
        .iter()
        .filter(|&&(i, j)| p[i as usize] - p[j as usize] == *x)
        .map(|&(i, _)| p[i as usize]);
    PointSet::new(s.delta.n(), firsts).expect("same dimension")
}

/// `K(Δ, G, D) = Σ_{a∈Δ} #{x ∈ D : a ∈ Δ_G[x]}²`.
pub fn komity(s: &AdditiveStructure) -> BigUint {
    let mut degree = vec![0u64; s.delta.len()];
    // distinct x for a fixed a are distinct pairs (a, a - x)
    for &(i, _) in &s.pairs {
        degree[i as usize] += 1;
    }
    degree
        .iter()
        .map(|&d| BigUint::from(d as u128 * d as u128))
        .sum()
}

/// `K(Δ, G, D) = Σ_{x, y ∈ D} |Δ_G[x] ∩ Δ_G[y]|` by the double loop.
pub fn komity_pairwise(s: &AdditiveStructure) -> BigUint {
    let inc = s.incidence();
    let mut total = 0u128;
    for x in &inc {
        for y in &inc {
            total += sorted_intersection(x, y) as u128;
        }
    }
    BigUint::from(total)
}

fn sorted_intersection(x: &[u32], y: &[u32]) -> u64 {
    let (mut i, mut j, mut c) = (0, 0, 0);
    while i < x.len() && j < y.len() {
        match x[i].cmp(&y[j]) {
            core::cmp::Ordering::Less => i += 1,
            core::cmp::Ordering::Greater => j += 1,
            core::cmp::Ordering::Equal => {
                c += 1;
                i += 1;
                j += 1;
            }
        }
    }
    c
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComityBand {
    /// Intersection sizes in `[lo, hi)`; the zero band is `[0, 1)`.
    pub lo: u64,
    pub hi: u64,
    /// Ordered pairs `(x, y) ∈ D²` in the band.
    pub pairs: u128,
    /// `Σ |Δ_G[x] ∩ Δ_G[y]|` over those pairs.
    pub mass: BigUint,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ComityScan {
    pub bands: Vec<ComityBand>,
    /// Index of the band with the largest mass.
    pub dominant: usize,
    /// `log_n(lo)` of the dominant band, report-only.
    pub beta_eff: f64,
}

impl ComityScan {
    pub fn total_mass(&self) -> BigUint {
        self.bands.iter().map(|b| &b.mass).sum()
    }
}

/// Dyadic histogram of `|Δ_G[x] ∩ Δ_G[y]|` over `(x, y) ∈ D²`.
pub fn comity_scan(s: &AdditiveStructure) -> ComityScan {
    // co-occurrences through the inverted index, Σ_a deg(a)² work
    let inc = s.incidence();
    let mut by_point: Vec<Vec<u32>> = vec![Vec::new(); s.delta.len()];
    for (k, members) in inc.iter().enumerate() {
        for &a in members {
            by_point[a as usize].push(k as u32);
        }
    }
    let mut counts: HashMap<(u32, u32), u64> = HashMap::new();
    for xs in &by_point {
        for &x in xs {
            for &y in xs {
                *counts.entry((x, y)).or_insert(0) += 1;
            }
        }
    }
    let mut bands: BTreeMap<u32, (u128, u128)> = BTreeMap::new();
    for &c in counts.values() {
        let e = bands.entry(63 - c.leading_zeros()).or_insert((0, 0));
        e.0 += 1;
        e.1 += c as u128;
    }
    let d = s.diffs.len() as u128;
    let zero_pairs = d * d - counts.len() as u128;
    let mut out = Vec::new();
    if zero_pairs > 0 {
        out.push(ComityBand {
            lo: 0,
            hi: 1,
            pairs: zero_pairs,
            mass: BigUint::zero(),
        });
    }
    for (t, (pairs, mass)) in bands {
        out.push(ComityBand {
            lo: 1 << t,
            hi: 1 << (t + 1),
            pairs,
            mass: BigUint::from(mass),
        });
    }
    let dominant = out
        .iter()
        .enumerate()
        .max_by(|(i, a), (j, b)| a.mass.cmp(&b.mass).then(j.cmp(i)))
        .map(|(i, _)| i)
        .unwrap_or(0);
    let big_n = Float::ln(s.delta.n() as f64);
    let beta_eff = out
        .get(dominant)
        .map_or(f64::NAN, |b| Float::ln(b.lo as f64) / big_n);
    ComityScan {
        bands: out,
        dominant,
        beta_eff,
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Doubling {
    pub size: usize,
    pub diff_size: usize,
    /// `|K - K| / |K|`.
    pub ratio: BigRational,
}

pub fn doubling(k: &PointSet) -> Result<Doubling> {
    if k.is_empty() {
        return Err(Error::InvalidArgument("doubling of the empty set".into()));
    }
    let mut diffs: HashSet<TritVector> = HashSet::new();
    for a in k.iter() {
        for b in k.iter() {
            diffs.insert(a - b);
        }
    }
    Ok(Doubling {
        size: k.len(),
        diff_size: diffs.len(),
        ratio: BigRational::new(BigInt::from(diffs.len()), BigInt::from(k.len())),
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpanHull {
    pub span: Subspace,
    /// `3^dim / |K|`.
    pub ratio: BigRational,
}

/// The linear span of `K`, i.e. the smallest subspace containing it.
pub fn span_hull(k: &PointSet) -> Result<SpanHull> {
    if k.is_empty() {
        return Err(Error::InvalidArgument("span hull of the empty set".into()));
    }
    let span = Subspace::span(k.n(), k.points())?;
    let ratio = BigRational::new(BigInt::from(span.size()), BigInt::from(k.len()));
    Ok(SpanHull { span, ratio })
}

/// `A` sliced along the cosets of `H^⊥`: `A_{H,v} = A ∩ (H^⊥ + v)` for
/// `v` in a transversal `V` of `H^⊥`.
#[derive(Clone, Debug)]
pub struct FiberDecomposition {
    pub h: Subspace,
    pub h_perp: Subspace,
    pub v_space: Subspace,
    /// One entry per `v ∈ V`, in `V`'s enumeration order.
    pub fibers: Vec<(TritVector, PointSet)>,
}

impl FiberDecomposition {
    pub fn sizes(&self) -> impl Iterator<Item = usize> + '_ {
        self.fibers.iter().map(|f| f.1.len())
    }
}

/// Coset of `x` modulo `H^⊥`, keyed by the dot products with `H`'s basis.
fn coset_key(h: &Subspace, x: &TritVector) -> usize {
    h.basis()
        .iter()
        .fold(0usize, |acc, b| acc * 3 + b.dot(x) as usize)
}

pub fn decompose_fibers(a: &PointSet, h: &Subspace) -> Result<FiberDecomposition> {
    if h.ambient_dim() != a.n() {
        return Err(Error::DimensionMismatch {
            left: a.n(),
            right: h.ambient_dim(),
        });
    }
    let h_perp = h.annihilator();
    let v_space = h_perp.transversal();
    let vs: Vec<TritVector> = v_space.enumerate()?.collect();
    let mut slot = vec![usize::MAX; vs.len()];
    for (i, v) in vs.iter().enumerate() {
        slot[coset_key(h, v)] = i;
    }
    let mut buckets: Vec<Vec<TritVector>> = vec![Vec::new(); vs.len()];
    for p in a.iter() {
        buckets[slot[coset_key(h, &p)]].push(p);
    }
    let fibers = vs
        .into_iter()
        .zip(buckets)
        .map(|(v, pts)| Ok((v, PointSet::new(a.n(), pts)?)))
        .collect::<Result<Vec<_>>>()?;
    Ok(FiberDecomposition {
        h: h.clone(),
        h_perp,
        v_space,
        fibers,
    })
}

fn coefficient(a: &PointSet, x: &TritVector) -> Eisenstein<i64> {
    let mut k = [0i64; 3];
    for p in a.iter() {
        k[p.dot(x) as usize] += 1;
    }
    Eisenstein::new(k[0] - k[2], k[1] - k[2])
}

/// Exact integer forms of the fiber Plancherel identities on unnormalized
/// coefficients `c(x) = Σ_{a∈A} ω^{a·x}`. Each pair is `(lhs, rhs)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiberPlancherel {
    /// `Σ_{h∈H} |c(h)|²` vs `|H| Σ_v |A_{H,v}|²`.
    pub full: (BigUint, BigUint),
    /// `|H| Σ_{h∈H∖0} |c(h)|²` vs `Σ_v (|H||A_{H,v}| - |A|)²`.
    pub centered: (BigUint, BigUint),
    /// `|H| Σ_{k∈K∖0} |c(k)|²` vs
    /// `|H| Σ_{h∈H∖0} |c(h)|² + |H|² Σ_v Σ_{k∈K/H∖0} |c_v(k)|²`, where
    /// `c_v(k) = Σ_{a∈A_{H,v}} ω^{(a-v)·k}`.
    pub martingale: (BigUint, BigUint),
}

impl FiberPlancherel {
    pub fn holds(&self) -> bool {
        self.full.0 == self.full.1
            && self.centered.0 == self.centered.1
            && self.martingale.0 == self.martingale.1
    }
}

/// Evaluates the local Plancherel identities for `H ⊆ K` exactly.
pub fn fiber_plancherel_check(a: &PointSet, h: &Subspace, k: &Subspace) -> Result<FiberPlancherel> {
    if h.ambient_dim() != k.ambient_dim() {
        return Err(Error::DimensionMismatch {
            left: h.ambient_dim(),
            right: k.ambient_dim(),
        });
    }
    if !h.is_subspace_of(k) {
        return Err(Error::NotContained);
    }
    if k.dim() > FIBER_K_LIMIT {
        return Err(Error::EnumerationGuard {
            dim: k.dim(),
            limit: FIBER_K_LIMIT,
        });
    }
    let fibers = decompose_fibers(a, h)?;
    let hsize = BigUint::from(h.size());
    let norm = |z: Eisenstein<i64>| BigUint::from(z.norm() as u64);

    let on_h: BigUint = h
        .enumerate()?
        .skip(1)
        .map(|x| norm(coefficient(a, &x)))
        .sum();
    let at_zero = BigUint::from(a.len() as u64).pow(2);
    let fiber_sq: BigUint = fibers.sizes().map(|s| BigUint::from(s as u64).pow(2)).sum();
    let full = (&on_h + &at_zero, &hsize * &fiber_sq);

    let centered_rhs: BigUint = fibers
        .sizes()
        .map(|s| {
            let d = BigInt::from(h.size() * s as u64) - BigInt::from(a.len());
            (&d * &d).magnitude().clone()
        })
        .sum();
    let centered = (&hsize * &on_h, centered_rhs);

    let on_k: BigUint = k
        .enumerate()?
        .skip(1)
        .map(|x| norm(coefficient(a, &x)))
        .sum();
    // reduced forms modulo H are canonical coset representatives
    let mut reps: Vec<TritVector> = k
        .enumerate()?
        .map(|x| h.reduce(x))
        .filter(|x| !x.is_zero())
        .collect();
    reps.sort_unstable_by_key(|x| x.index());
    reps.dedup();
    let mut local = BigUint::zero();
    for (v, fiber) in &fibers.fibers {
        for w in &reps {
            let c: Eisenstein<i64> = fiber.iter().map(|p| character((p - *v).dot(w))).sum();
            local += norm(c);
        }
    }
    let martingale = (&hsize * &on_k, &hsize * &on_h + &hsize * &hsize * local);
    Ok(FiberPlancherel {
        full,
        centered,
        martingale,
    })
}

/// Greedy probe for a covering `B ∩ (X + K)`: `K` is `0` plus the
/// `k_budget` most frequent nonzero differences of `C`, and `X ⊆ B` is
/// grown one point at a time by new coverage. A heuristic only.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BsgProbe {
    pub k: PointSet,
    pub x: PointSet,
    pub covered: usize,
    pub b_size: usize,
}

pub fn bsg_probe(b: &PointSet, c: &PointSet, k_budget: usize, x_budget: usize) -> Result<BsgProbe> {
    if b.n() != c.n() {
        return Err(Error::DimensionMismatch {
            left: b.n(),
            right: c.n(),
        });
    }
    let n = b.n();
    let m = diff_multiplicity(c)?;
    let mut ranked: Vec<(TritVector, u64)> = m.iter().filter(|e| !e.0.is_zero()).collect();
    ranked.sort_by(|x, y| y.1.cmp(&x.1).then(x.0.index().cmp(&y.0.index())));
    let k = PointSet::new(
        n,
        core::iter::once(TritVector::zero(n)?).chain(ranked.iter().take(k_budget).map(|e| e.0)),
    )?;
    let mut covered: HashSet<TritVector> = HashSet::new();
    let mut xs = Vec::new();
    for _ in 0..x_budget {
        let best = b
            .iter()
            .map(|x| {
                (
                    x,
                    k.iter()
                        .filter(|d| b.contains(&(x + *d)) && !covered.contains(&(x + *d)))
                        .count(),
                )
            })
            .max_by(|p, q| p.1.cmp(&q.1).then(q.0.index().cmp(&p.0.index())));
        match best {
            Some((x, gain)) if gain > 0 => {
                covered.extend(k.iter().map(|d| x + d).filter(|y| b.contains(y)));
                xs.push(x);
            }
            _ => break,
        }
    }
    Ok(BsgProbe {
        k,
        x: PointSet::new(n, xs)?,
        covered: covered.len(),
        b_size: b.len(),
    })
}
