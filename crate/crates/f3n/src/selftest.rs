//! Built-in acceptance checks. Every check is seeded and its report holds
//! counts only, so two runs with the same seed print identical bytes.

use num_bigint::BigUint;
use num_rational::{BigRational, Ratio};
use num_traits::One;
use rand::Rng;
use serde_json::{json, Value};

use f3n_core::capset::{self, PointSet};
use f3n_core::randomsel::{self, trial_rng};
use f3n_core::spectrum::SpectrumSet;
use f3n_core::structure;
use f3n_core::{energy, fourier, pow3, reference, Eisenstein, SpectrumTable, Subspace, TritVector};

use crate::report::Report;

struct Outcome {
    passed: bool,
    detail: Value,
}

fn outcome(passed: bool, detail: Value) -> Outcome {
    Outcome { passed, detail }
}

/// A seeded random set of a random size up to `max`.
pub fn random_instance(n: u32, max: usize, seed: u64, i: u64) -> PointSet {
    let mut rng = trial_rng(seed, i);
    let size = rng.random_range(0..=max.min(pow3(n) as usize));
    capset::random_set(n, size, rng.random()).expect("size in range")
}

/// A seeded random subspace of dimension at most `dim`.
pub fn random_subspace(n: u32, dim: u32, rng: &mut impl Rng) -> Subspace {
    let picks: Vec<TritVector> = (0..dim)
        .map(|_| TritVector::from_index(n, rng.random_range(0..pow3(n))).expect("in range"))
        .collect();
    Subspace::span(n, &picks).expect("same dimension")
}

fn plancherel(seed: u64) -> Outcome {
    let mut failures = 0;
    for i in 0..1000u64 {
        let n = 4 + (i % 7) as u32;
        let a = random_instance(n, 600, seed, i);
        let (lhs, rhs) = fourier::plancherel_check(&a).expect("within guard");
        failures += (lhs != rhs) as u32;
    }
    outcome(failures == 0, json!({ "sets": 1000, "failures": failures }))
}

fn cube_sums(seed: u64) -> Outcome {
    let mut checked = 0;
    let mut failures = 0;
    for n in 4..=10u32 {
        let greedy = capset::greedy_random_capset(n, seed + n as u64).expect("valid n");
        let left = capset::greedy_random_capset(2, seed + n as u64).expect("valid n");
        let right = capset::greedy_random_capset(n - 2, seed + 100 + n as u64).expect("valid n");
        let prod = capset::product(&left, &right).expect("valid n");
        for a in [greedy, prod] {
            let want = Eisenstein::new(pow3(n) as i128 * a.len() as i128, 0);
            let ok = capset::is_capset(&a) && fourier::cube_sum(&a).expect("within guard") == want;
            checked += 1;
            failures += !ok as u32;
        }
    }
    outcome(
        failures == 0,
        json!({ "sets": checked, "failures": failures }),
    )
}

fn energy_backends(seed: u64) -> Outcome {
    let mut failures = 0;
    for i in 0..200u64 {
        let n = 2 + (i % 7) as u32;
        let s = random_instance(n, 128, seed, i);
        let hash = energy::e4_hash(&s);
        failures += (hash != energy::e2m_transform(&s, 2).expect("within guard")) as u32;
    }
    let mut brute_failures = 0;
    for i in 0..50u64 {
        let n = 3 + (i % 4) as u32;
        let s = random_instance(n, 60, seed ^ 0xe4, i);
        brute_failures += (energy::e4_hash(&s) != BigUint::from(reference::e4_brute(&s))) as u32;
    }
    outcome(
        failures == 0 && brute_failures == 0,
        json!({ "backend_sets": 200, "backend_failures": failures, "brute_sets": 50, "brute_failures": brute_failures }),
    )
}

fn holder(seed: u64) -> Outcome {
    let mut failures = 0;
    for i in 0..100u64 {
        let n = 2 + (i % 4) as u32;
        let s = random_instance(n, 40, seed, i);
        if s.is_empty() {
            continue;
        }
        for m in 3..=5 {
            failures += !energy::holder_check(&s, m).expect("small set").holds() as u32;
        }
    }
    let mut not_tight = 0;
    for d in 1..=3u32 {
        let n = 4;
        let basis: Vec<TritVector> = (0..d)
            .map(|i| TritVector::unit(n, i).expect("i < n"))
            .collect();
        let w = PointSet::of_subspace(&Subspace::span(n, &basis).expect("same dimension"))
            .expect("small");
        for m in 3..=5 {
            not_tight += !energy::holder_check(&w, m).expect("small set").is_tight() as u32;
        }
    }
    outcome(
        failures == 0 && not_tight == 0,
        json!({ "sets": 100, "failures": failures, "subspaces_not_tight": not_tight }),
    )
}

fn exhaustive(skip_slow: bool) -> Outcome {
    let want = [2usize, 4, 9, 20];
    let top = if skip_slow { 3 } else { 4 };
    let mut found = Vec::new();
    let mut ok = true;
    for n in 1..=top {
        let (size, witness) = capset::exhaustive_max_capset(n).expect("n within guard");
        ok &= size == want[n as usize - 1] && witness.len() == size && capset::is_capset(&witness);
        if n <= 3 {
            ok &= reference::max_capset_dfs(n) == size;
        }
        found.push(size);
    }
    outcome(ok, json!({ "maxima": found, "skipped_n4": skip_slow }))
}

fn fiber_identity(seed: u64) -> Outcome {
    let mut failures = 0;
    for i in 0..100u64 {
        let n = 3 + (i % 7) as u32;
        let a = random_instance(n, 80, seed, i);
        let mut rng = trial_rng(seed ^ 0xf1, i);
        let hd = rng.random_range(0..=3);
        let h = random_subspace(n, hd, &mut rng);
        let extra = random_subspace(n, rng.random_range(0..=5 - h.dim()), &mut rng);
        let k = h.join(&extra).expect("same dimension");
        failures += !structure::fiber_plancherel_check(&a, &h, &k)
            .expect("small")
            .holds() as u32;
        let same = structure::fiber_plancherel_check(&a, &h, &h).expect("small");
        failures += !(same.holds() && same.martingale.0 == same.centered.0) as u32;
    }
    outcome(
        failures == 0,
        json!({ "instances": 100, "failures": failures }),
    )
}

fn komity(seed: u64) -> Outcome {
    let mut failures = 0;
    let mut structures = 0;
    for i in 0..50u64 {
        let delta = random_instance(4, 30, seed, i);
        if delta.is_empty() {
            continue;
        }
        let levels = structure::build_levels(&delta).expect("small");
        for st in &levels.structures {
            structures += 1;
            failures += (structure::komity(st) != structure::komity_pairwise(st)) as u32;
        }
    }
    outcome(
        failures == 0,
        json!({ "sets": 50, "structures": structures, "failures": failures }),
    )
}

/// Bins `k = 0..=d` so that each bin but the last has expected count at
/// least 5 under `trials` draws, merging the thin upper tail.
fn bins(d: u32, trials: u64) -> Vec<(u32, u32)> {
    let mut out = Vec::new();
    let mut start = 0;
    let mut mass = 0.0;
    for k in 0..=d {
        mass += randomsel::g_f64(k, d).expect("k <= d") * trials as f64;
        if mass >= 5.0 {
            out.push((start, k));
            start = k + 1;
            mass = 0.0;
        }
    }
    if start <= d {
        match out.last_mut() {
            Some(last) => last.1 = d,
            None => out.push((0, d)),
        }
    }
    out
}

/// Monte Carlo counts against `g(k, d)`, `3σ` per bin.
pub fn g_simulation_agrees(d: u32, trials: u64, seed: u64) -> bool {
    let hist = reference::bernoulli_histogram(d, trials, seed);
    bins(d, trials).into_iter().all(|(lo, hi)| {
        let p: f64 = (lo..=hi)
            .map(|k| randomsel::g_f64(k, d).expect("k <= d"))
            .sum();
        let count: u64 = hist[lo as usize..=hi as usize].iter().sum();
        let mean = trials as f64 * p;
        let sigma = (trials as f64 * p * (1.0 - p)).sqrt();
        (count as f64 - mean).abs() <= 3.0 * sigma
    })
}

fn g_formula(seed: u64, skip_slow: bool) -> Outcome {
    let mut mass_ok = true;
    let mut halving_ok = true;
    for d in 1..=64u32 {
        let g: Vec<BigRational> = (0..=d)
            .map(|k| randomsel::g(k, d).expect("k <= d"))
            .collect();
        mass_ok &= g.iter().sum::<BigRational>() == BigRational::one();
        for k in 3..d as usize {
            halving_ok &= g[k + 1].clone() * BigRational::from_integer(2.into()) < g[k];
        }
    }
    let trials = if skip_slow { 10_000 } else { 100_000 };
    let sims: Vec<bool> = [4u32, 16, 64]
        .iter()
        .map(|&d| g_simulation_agrees(d, trials, seed + d as u64))
        .collect();
    let ok = mass_ok && halving_ok && sims.iter().all(|&b| b);
    outcome(
        ok,
        json!({ "mass_one": mass_ok, "halving": halving_ok, "trials": trials, "simulation": sims }),
    )
}

fn nullity(seed: u64) -> Outcome {
    let n = 12;
    let a = capset::greedy_random_capset(n, seed).expect("valid n");
    let t = SpectrumTable::of_set(&a).expect("within guard");
    let delta = SpectrumSet::from_table(&a, &t, Ratio::one());
    let d = n as usize;
    let first = randomsel::nullity_distribution(delta.members(), d, 500, seed).expect("d <= |Δ|");
    let second = randomsel::nullity_distribution(delta.members(), d, 500, seed).expect("d <= |Δ|");
    let tail = first.tail();
    let monotone = tail.windows(2).all(|w| w[1] <= w[0]);
    let reference_len = first.reference_curve().len();
    outcome(
        first == second && monotone && reference_len == d + 1,
        json!({
            "cap_size": a.len(),
            "spectrum_size": delta.len(),
            "d": d,
            "histogram": first.histogram,
            "reproducible": first == second,
            "tail_non_increasing": monotone,
        }),
    )
}

fn spectrum_invariants(seed: u64) -> Outcome {
    let mut sets: Vec<PointSet> = (4..=8)
        .map(|n| capset::greedy_random_capset(n, seed + n as u64).expect("valid"))
        .collect();
    sets.extend((0..10).map(|i| random_instance(5, 100, seed ^ 0x5c, i)));
    let thresholds = [Ratio::new(1u64, 2), Ratio::one(), Ratio::new(2, 1)];
    let mut failures = 0;
    for a in sets.iter().filter(|a| !a.is_empty()) {
        let t = SpectrumTable::of_set(a).expect("within guard");
        let spectra: Vec<SpectrumSet> = thresholds
            .iter()
            .map(|&c| SpectrumSet::from_table(a, &t, c))
            .collect();
        failures += !spectra.iter().all(|s| s.is_symmetric()) as u32;
        failures += !spectra
            .windows(2)
            .all(|w| w[1].members().is_subset_of(w[0].members())) as u32;
    }
    let n = 6;
    let x0: TritVector = "120201".parse().expect("valid");
    let hyperplane = PointSet::full(n)
        .expect("valid")
        .filter(|p| p.dot(&x0) == 0);
    let delta = SpectrumSet::extract(&hyperplane, Ratio::one()).expect("within guard");
    let want = PointSet::new(n, [x0, x0 + x0]).expect("valid");
    let hyperplane_ok = *delta.members() == want;
    outcome(
        failures == 0 && hyperplane_ok,
        json!({ "sets": sets.len(), "failures": failures, "hyperplane_exact": hyperplane_ok }),
    )
}

fn determinism(seed: u64) -> Outcome {
    let render = || {
        let a = capset::greedy_random_capset(7, seed).expect("valid");
        let ex = randomsel::nullity_distribution(&a, 7, 200, seed).expect("d <= |A|");
        serde_json::to_string(&json!({
            "points": a.iter().map(|p| p.to_string()).collect::<Vec<_>>(),
            "histogram": ex.histogram,
        }))
        .expect("serializable")
    };
    let same = render() == render();
    outcome(same, json!({ "identical": same }))
}

pub fn run(seed: u64, skip_slow: bool) -> Report {
    let criteria: Vec<(&str, Outcome)> = vec![
        ("plancherel", plancherel(seed)),
        ("cube_sum", cube_sums(seed)),
        ("energy_backends", energy_backends(seed)),
        ("holder", holder(seed)),
        ("exhaustive_maxima", exhaustive(skip_slow)),
        ("fiber_plancherel", fiber_identity(seed)),
        ("komity_dual", komity(seed)),
        ("g_formula", g_formula(seed, skip_slow)),
        ("nullity", nullity(seed)),
        ("spectrum_invariants", spectrum_invariants(seed)),
        ("determinism", determinism(seed)),
    ];
    let all = criteria.iter().all(|c| c.1.passed);
    let failed: Vec<&str> = criteria
        .iter()
        .filter(|c| !c.1.passed)
        .map(|c| c.0)
        .collect();
    let list: Vec<Value> = criteria
        .into_iter()
        .enumerate()
        .map(|(i, (name, o))| json!({ "id": i + 1, "name": name, "passed": o.passed, "detail": o.detail }))
        .collect();
    let body = json!({ "skip_slow": skip_slow, "criteria": list, "passed": all });
    Report::new(body).check(all, || format!("selftest failed: {}", failed.join(", ")))
}
