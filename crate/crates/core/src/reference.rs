//! Slow reference computations.
//!
//! Each function here evaluates a quantity straight from its definition,
//! sharing no code path with the fast implementations, so the two can be
//! compared. Costs are polynomial in the set size or `9^n`; keep inputs small.

use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::capset::PointSet;
use crate::gf3::character;
use crate::{pow3, Eisenstein, TritVector};

/// `c(x) = Σ_a f(a) ω^{x·a}` by the double loop over `3^n × 3^n`.
pub fn naive_dft(n: u32, f: &[i64]) -> Vec<Eisenstein<i64>> {
    let size = pow3(n);
    let vecs: Vec<TritVector> = (0..size)
        .map(|i| TritVector::from_index(n, i).unwrap())
        .collect();
    vecs.iter()
        .map(|x| {
            let mut acc = Eisenstein::new(0i64, 0);
            for (a, &fa) in vecs.iter().zip(f) {
                if fa != 0 {
                    acc += character(x.dot(a)).scale(fa);
                }
            }
            acc
        })
        .collect()
}

/// Coefficient `Σ_{a∈A} ω^{x·a}` evaluated directly.
pub fn coefficient(a: &PointSet, x: &TritVector) -> Eisenstein<i64> {
    a.iter().map(|p| character(p.dot(x))).sum()
}

pub fn is_capset_triple_loop(a: &PointSet) -> bool {
    let p = a.points();
    for i in 0..p.len() {
        for j in i + 1..p.len() {
            for k in j + 1..p.len() {
                if (p[i] + p[j] + p[k]).is_zero() {
                    return false;
                }
            }
        }
    }
    true
}

pub fn line_solutions_triple_loop(a: &PointSet) -> u128 {
    let p = a.points();
    let mut count = 0;
    for &x in p {
        for &y in p {
            for &z in p {
                if (x + y + z).is_zero() {
                    count += 1;
                }
            }
        }
    }
    count
}

/// Ordered quadruples `x1 + x2 = x3 + x4`, by looping over three entries
/// and probing for the fourth.
pub fn e4_brute(s: &PointSet) -> u128 {
    let p = s.points();
    let mut count = 0;
    for &x1 in p {
        for &x2 in p {
            for &x3 in p {
                if s.contains(&(x1 + x2 - x3)) {
                    count += 1;
                }
            }
        }
    }
    count
}

/// `(b1, c1, b2, c2)` with `b1 + c1 = b2 + c2`, by quadruple loop.
pub fn cross_quadruples_brute(b: &PointSet, c: &PointSet) -> u128 {
    let mut count = 0;
    for b1 in b.iter() {
        for c1 in c.iter() {
            for b2 in b.iter() {
                for c2 in c.iter() {
                    if b1 + c1 == b2 + c2 {
                        count += 1;
                    }
                }
            }
        }
    }
    count
}

/// Number of 2m-tuples with `x_1 + … + x_m = x_{m+1} + … + x_{2m}`, by
/// enumerating all `|S|^(2m)` tuples.
pub fn e2m_enumerate(s: &PointSet, m: usize) -> u128 {
    let p = s.points();
    let len = p.len();
    let zero = TritVector::zero(s.n()).unwrap();
    let total = (len as u128).pow(2 * m as u32);
    let mut count = 0;
    let mut digits = vec![0usize; 2 * m];
    for _ in 0..total {
        let mut acc = zero;
        for (k, &d) in digits.iter().enumerate() {
            acc = if k < m { acc + p[d] } else { acc - p[d] };
        }
        if acc.is_zero() {
            count += 1;
        }
        for d in digits.iter_mut() {
            *d += 1;
            if *d < len {
                break;
            }
            *d = 0;
        }
    }
    count
}

/// `|K - K|` by double loop into a sorted list.
pub fn difference_set_size(k: &PointSet) -> usize {
    let mut diffs: Vec<u64> = Vec::new();
    for a in k.iter() {
        for b in k.iter() {
            diffs.push((a - b).index());
        }
    }
    diffs.sort_unstable();
    diffs.dedup();
    diffs.len()
}

/// Largest cap in `F_3^n` by plain depth-first enumeration of every cap
/// (no bound, no symmetry). Feasible for `n <= 3`.
pub fn max_capset_dfs(n: u32) -> usize {
    let cells = pow3(n) as usize;
    let vecs: Vec<TritVector> = (0..cells as u64)
        .map(|i| TritVector::from_index(n, i).unwrap())
        .collect();
    fn go(vecs: &[TritVector], start: usize, cur: &mut Vec<usize>, best: &mut usize) {
        *best = (*best).max(cur.len());
        for p in start..vecs.len() {
            let ok = cur.iter().enumerate().all(|(i, &a)| {
                cur[..i]
                    .iter()
                    .all(|&b| !(vecs[a] + vecs[b] + vecs[p]).is_zero())
            });
            if ok {
                cur.push(p);
                go(vecs, p + 1, cur, best);
                cur.pop();
            }
        }
    }
    let mut best = 0;
    go(&vecs, 0, &mut Vec::new(), &mut best);
    best
}

/// Histogram of how many of `d` independent Bernoulli(1/d) events occur,
/// over `trials` seeded repetitions.
pub fn bernoulli_histogram(d: u32, trials: u64, seed: u64) -> Vec<u64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut hist = vec![0u64; d as usize + 1];
    for _ in 0..trials {
        let k = (0..d).filter(|_| rng.random_range(0..d) == 0).count();
        hist[k] += 1;
    }
    hist
}

/// `Σ_{x,y∈D} |S_x ∩ S_y|` straight from the sets `S_x`.
pub fn pairwise_intersection_sum(sets: &[Vec<TritVector>]) -> u128 {
    let mut total = 0u128;
    for x in sets {
        for y in sets {
            total += x.iter().filter(|a| y.contains(a)).count() as u128;
        }
    }
    total
}

/// Both sides of the fiber Plancherel identity in the normalized floating
/// form (`Â(x) = 3^{-n} Σ e(a·x)`, fibers weighted by `|H|/3^n`), from the
/// definitions: fibers by scanning `A` for `a - v ∈ H^⊥`, quotient `K/H`
/// by pairwise comparison of cosets.
pub fn fiber_identity_f64(a: &PointSet, h: &crate::Subspace, k: &crate::Subspace) -> (f64, f64) {
    let n = a.n();
    let scale = 1.0 / pow3(n) as f64;
    let sq = |z: Eisenstein<i64>| z.norm() as f64;
    let h_elems: Vec<TritVector> = h.enumerate().unwrap().collect();
    let k_elems: Vec<TritVector> = k.enumerate().unwrap().collect();
    let h_perp = h.annihilator();
    let v_space = h_perp.transversal();
    let lhs: f64 = k_elems
        .iter()
        .filter(|x| !x.is_zero())
        .map(|x| sq(coefficient(a, x)) * scale * scale)
        .sum();
    let first: f64 = h_elems
        .iter()
        .filter(|x| !x.is_zero())
        .map(|x| sq(coefficient(a, x)) * scale * scale)
        .sum();
    // representatives of K/H: keep k unless k - r ∈ H for an earlier r
    let mut reps: Vec<TritVector> = Vec::new();
    for &x in &k_elems {
        if !reps.iter().any(|r| h_elems.contains(&(x - *r))) {
            reps.push(x);
        }
    }
    let hsize = h_elems.len() as f64;
    let mut second = 0.0;
    for v in v_space.enumerate().unwrap() {
        let fiber: Vec<TritVector> = a.iter().filter(|p| h_perp.contains(&(*p - v))).collect();
        for w in reps.iter().filter(|r| !h_elems.contains(r)) {
            let c: Eisenstein<i64> = fiber.iter().map(|p| character((*p - v).dot(w))).sum();
            let re = c.p as f64 - 0.5 * c.q as f64;
            let mag2 =
                (re * re + 0.75 * (c.q as f64) * (c.q as f64)) * (hsize * scale) * (hsize * scale);
            second += mag2;
        }
    }
    (lhs, first + second / hsize)
}
