//! Acceptance run: one PASS/FAIL line per criterion, non-zero exit if any
//! criterion fails.

use std::process::Command;
use std::time::{Duration, Instant};

use num_bigint::BigUint;
use num_rational::{BigRational, Ratio};
use num_traits::{One, ToPrimitive};
use rand::Rng;
use serde_json::Value;

use f3n_core::capset::{self, PointSet};
use f3n_core::randomsel::{self, trial_rng};
use f3n_core::spectrum::SpectrumSet;
use f3n_core::{
    energy, fourier, pow3, reference, structure, Eisenstein, SpectrumTable, Subspace, TritVector,
};

const SEED: u64 = 20240917;

type Check = fn() -> Verdict;

struct Verdict {
    ok: bool,
    detail: String,
}

fn verdict(ok: bool, detail: impl Into<String>) -> Verdict {
    Verdict {
        ok,
        detail: detail.into(),
    }
}

fn random_set(n: u32, max: usize, stream: u64, i: u64) -> PointSet {
    let mut rng = trial_rng(SEED ^ stream, i);
    let size = rng.random_range(0..=max.min(pow3(n) as usize));
    capset::random_set(n, size, rng.random()).unwrap()
}

fn random_subspace(n: u32, dim: u32, rng: &mut impl Rng) -> Subspace {
    let picks: Vec<TritVector> = (0..dim)
        .map(|_| TritVector::from_index(n, rng.random_range(0..pow3(n))).unwrap())
        .collect();
    Subspace::span(n, &picks).unwrap()
}

fn coordinate_subspace(n: u32, d: u32) -> PointSet {
    let basis: Vec<TritVector> = (0..d).map(|i| TritVector::unit(n, i).unwrap()).collect();
    PointSet::of_subspace(&Subspace::span(n, &basis).unwrap()).unwrap()
}

fn f3n(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_f3n"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn plancherel() -> Verdict {
    let start = Instant::now();
    let mut bad = 0;
    for i in 0..1000u64 {
        let n = 4 + (i % 7) as u32;
        let a = random_set(n, 2000, 1, i);
        let (lhs, rhs) = fourier::plancherel_check(&a).unwrap();
        bad += (lhs != rhs || rhs != pow3(n) as u128 * a.len() as u128) as u32;
    }
    let took = start.elapsed();
    verdict(
        bad == 0 && took < Duration::from_secs(60),
        format!("1000 sets, {bad} mismatches, {took:.2?}"),
    )
}

fn cube_sum() -> Verdict {
    let mut bad = 0;
    let mut sets = 0;
    for n in 4..=10u32 {
        let greedy = capset::greedy_random_capset(n, SEED + n as u64).unwrap();
        let split = n / 2;
        let prod = capset::product(
            &capset::greedy_random_capset(split, SEED + 7 * n as u64).unwrap(),
            &capset::greedy_random_capset(n - split, SEED + 11 * n as u64).unwrap(),
        )
        .unwrap();
        for a in [greedy, prod] {
            let lines_ok = if n <= 7 {
                reference::is_capset_triple_loop(&a)
            } else {
                capset::is_capset(&a)
            };
            let want = Eisenstein::new(pow3(n) as i128 * a.len() as i128, 0);
            bad += !(lines_ok && fourier::cube_sum(&a).unwrap() == want) as u32;
            sets += 1;
        }
    }
    verdict(
        bad == 0,
        format!("{sets} caps for n = 4..10, {bad} mismatches"),
    )
}

fn energy_backends() -> Verdict {
    let mut bad = 0;
    for i in 0..200u64 {
        let n = 2 + (i % 7) as u32;
        let s = random_set(n, 128, 3, i);
        bad += (energy::e4_hash(&s) != energy::e2m_transform(&s, 2).unwrap()) as u32;
    }
    let mut brute = 0;
    for i in 0..50u64 {
        let n = 3 + (i % 5) as u32;
        let s = random_set(n, 60, 4, i);
        brute += (energy::e4_hash(&s) != BigUint::from(reference::e4_brute(&s))) as u32;
    }
    verdict(
        bad == 0 && brute == 0,
        format!("hash vs transform 200 sets: {bad} mismatches; vs brute force 50 sets: {brute}"),
    )
}

fn holder() -> Verdict {
    let mut bad = 0;
    for i in 0..100u64 {
        let n = 2 + (i % 5) as u32;
        let s = random_set(n, 50, 5, i);
        for m in 3..=5 {
            bad += !energy::holder_check(&s, m).unwrap().holds() as u32;
        }
    }
    let mut loose = 0;
    for d in 1..=3 {
        let w = coordinate_subspace(5, d);
        for m in 3..=5 {
            loose += !energy::holder_check(&w, m).unwrap().is_tight() as u32;
        }
    }
    verdict(
        bad == 0 && loose == 0,
        format!("100 sets × m = 3,4,5: {bad} failures; subspaces d = 1..3 not tight: {loose}"),
    )
}

fn exhaustive() -> Verdict {
    let mut sizes = Vec::new();
    let mut ok = true;
    let mut n4 = Duration::ZERO;
    for (n, want) in [(1u32, 2usize), (2, 4), (3, 9), (4, 20)] {
        let start = Instant::now();
        let (size, witness) = capset::exhaustive_max_capset(n).unwrap();
        if n == 4 {
            n4 = start.elapsed();
        }
        ok &= size == want && witness.len() == size && reference::is_capset_triple_loop(&witness);
        if n <= 3 {
            ok &= reference::max_capset_dfs(n) == want;
        }
        sizes.push(size);
    }
    ok &= n4 < Duration::from_secs(600);
    verdict(ok, format!("maxima {sizes:?}, n = 4 in {n4:.2?}"))
}

fn fiber() -> Verdict {
    let mut bad = 0;
    let mut float_bad = 0;
    for i in 0..100u64 {
        let n = 3 + (i % 7) as u32;
        let a = random_set(n, 120, 6, i);
        let mut rng = trial_rng(SEED ^ 66, i);
        let h = random_subspace(n, rng.random_range(0..=3), &mut rng);
        let extra = random_subspace(n, rng.random_range(0..=5 - h.dim()), &mut rng);
        let k = h.join(&extra).unwrap();
        let fp = structure::fiber_plancherel_check(&a, &h, &k).unwrap();
        bad += !fp.holds() as u32;
        if k.dim() <= 4 && n <= 6 {
            let (lhs, rhs) = reference::fiber_identity_f64(&a, &h, &k);
            let scale = (pow3(n) as f64).powi(2) * h.size() as f64;
            let exact = fp.martingale.0.to_f64().unwrap() / scale;
            float_bad += ((lhs - rhs).abs() > 1e-9 || (lhs - exact).abs() > 1e-9) as u32;
        }
    }
    let mut degenerate = 0;
    for i in 0..20u64 {
        let n = 3 + (i % 4) as u32;
        let a = random_set(n, 60, 7, i);
        let mut rng = trial_rng(SEED ^ 77, i);
        let h = random_subspace(n, 1 + (i % 3) as u32, &mut rng);
        let fp = structure::fiber_plancherel_check(&a, &h, &h).unwrap();
        degenerate += !(fp.holds() && fp.martingale.0 == fp.centered.0) as u32;
    }
    verdict(
        bad == 0 && float_bad == 0 && degenerate == 0,
        format!("100 instances: {bad} exact failures, {float_bad} float-oracle disagreements; K = H: {degenerate}"),
    )
}

fn komity() -> Verdict {
    let mut bad = 0;
    let mut count = 0;
    let mut i = 0u64;
    while count < 50 {
        let delta = random_set(3 + (i % 2) as u32, 25, 8, i);
        i += 1;
        if delta.is_empty() {
            continue;
        }
        let levels = structure::build_levels(&delta).unwrap();
        let st = &levels.structures[levels.dominant];
        let sets: Vec<Vec<TritVector>> = st
            .differences()
            .iter()
            .map(|x| structure::delta_g(&x, st).points().to_vec())
            .collect();
        let oracle = BigUint::from(reference::pairwise_intersection_sum(&sets));
        let fast = structure::komity(st);
        bad += (fast != structure::komity_pairwise(st) || fast != oracle) as u32;
        count += 1;
    }
    verdict(bad == 0, format!("50 structures, {bad} mismatches"))
}

fn g_formula() -> Verdict {
    let mut mass = true;
    let mut halving = true;
    for d in 1..=64u32 {
        let g: Vec<BigRational> = (0..=d).map(|k| randomsel::g(k, d).unwrap()).collect();
        mass &= g.iter().sum::<BigRational>() == BigRational::one();
        for k in 3..d as usize {
            halving &= &g[k + 1] * BigRational::from_integer(2.into()) < g[k];
        }
    }
    let trials = 100_000u64;
    let mut worst = 0.0f64;
    for d in [4u32, 16, 64] {
        let hist = reference::bernoulli_histogram(d, trials, SEED + d as u64);
        // bins with expected count ≥ 5; the thin tail is pooled
        let mut lo = 0;
        let mut acc = 0.0;
        let p = |k: u32| randomsel::g(k, d).unwrap().to_f64().unwrap();
        let mut bins = Vec::new();
        for k in 0..=d {
            acc += p(k) * trials as f64;
            if acc >= 5.0 {
                bins.push((lo, k));
                lo = k + 1;
                acc = 0.0;
            }
        }
        if lo <= d {
            bins.last_mut().unwrap().1 = d;
        }
        for (a, b) in bins {
            let prob: f64 = (a..=b).map(p).sum();
            let observed: u64 = hist[a as usize..=b as usize].iter().sum();
            let sigma = (trials as f64 * prob * (1.0 - prob)).sqrt();
            worst = worst.max((observed as f64 - trials as f64 * prob).abs() / sigma);
        }
    }
    verdict(
        mass && halving && worst <= 3.0,
        format!("Σg = 1: {mass}; halving: {halving}; Monte Carlo worst deviation {worst:.2}σ at 10^5 trials"),
    )
}

fn nullity() -> Verdict {
    let n = 12;
    let a = capset::greedy_random_capset(n, SEED).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cap12.caps");
    std::fs::write(&path, f3n::setfile::render(&a)).unwrap();
    let spec = format!("spectrum-of:{}", path.display());
    let args = [
        "nullity-sim",
        "--input",
        &spec,
        "--trials",
        "400",
        "--seed",
        "5",
        "--json",
    ];
    let first = f3n(&args);
    let second = f3n(&args);
    let reproducible = first.status.success() && first.stdout == second.stdout;
    let v: Value = serde_json::from_slice(&first.stdout).unwrap_or(Value::Null);
    let tail: Vec<BigRational> = v["tail"]
        .as_array()
        .map(|t| {
            t.iter()
                .map(|x| x.as_str().unwrap().parse().unwrap())
                .collect()
        })
        .unwrap_or_default();
    let monotone = !tail.is_empty() && tail.windows(2).all(|w| w[1] <= w[0]);
    let emitted = v["reference"]
        .as_array()
        .is_some_and(|r| r.len() == n as usize + 1)
        && v["d"] == n;

    let t = SpectrumTable::of_set(&a).unwrap();
    let delta = SpectrumSet::from_table(&a, &t, Ratio::one());
    let lib_a = randomsel::nullity_distribution(delta.members(), n as usize, 400, 5).unwrap();
    let lib_b = randomsel::nullity_distribution(delta.members(), n as usize, 400, 5).unwrap();
    let lib_matches_cli = serde_json::to_value(&lib_a.histogram).unwrap() == v["histogram"];
    verdict(
        reproducible && monotone && emitted && lib_a == lib_b && lib_matches_cli,
        format!(
            "|A| = {}, |Δ| = {}, histogram {:?}, reproducible {reproducible}, tail non-increasing {monotone}",
            a.len(),
            delta.len(),
            lib_a.histogram
        ),
    )
}

fn spectrum_invariants() -> Verdict {
    let mut sets: Vec<PointSet> = (3..=9)
        .map(|n| capset::greedy_random_capset(n, SEED ^ n as u64).unwrap())
        .collect();
    sets.push(
        capset::product(
            &coordinate_subspace(2, 1),
            &capset::greedy_random_capset(4, 1).unwrap(),
        )
        .unwrap(),
    );
    sets.extend((0..20).map(|i| random_set(3 + (i % 5) as u32, 200, 9, i)));
    let thresholds = [
        Ratio::new(1u64, 4),
        Ratio::new(1, 2),
        Ratio::one(),
        Ratio::new(3, 2),
        Ratio::new(4, 1),
    ];
    let mut bad = 0;
    for a in sets.iter().filter(|a| !a.is_empty()) {
        let t = SpectrumTable::of_set(a).unwrap();
        let spectra: Vec<SpectrumSet> = thresholds
            .iter()
            .map(|&c| SpectrumSet::from_table(a, &t, c))
            .collect();
        bad += !spectra
            .iter()
            .all(|s| s.is_symmetric() && s.members().iter().all(|x| s.members().contains(&-x)))
            as u32;
        bad += !spectra
            .windows(2)
            .all(|w| w[1].members().is_subset_of(w[0].members())) as u32;
    }
    let mut hyper = true;
    for (n, x0) in [(4u32, "1021"), (10, "0120012001")] {
        let x0: TritVector = x0.parse().unwrap();
        let h = PointSet::full(n).unwrap().filter(|p| p.dot(&x0) == 0);
        let delta = SpectrumSet::extract(&h, Ratio::one()).unwrap();
        hyper &= *delta.members() == PointSet::new(n, [x0, x0 + x0]).unwrap();
    }
    verdict(
        bad == 0 && hyper,
        format!(
            "{} sets × 5 thresholds: {bad} failures; hyperplane Δ = {{x0, 2x0}}: {hyper}",
            sets.len()
        ),
    )
}

fn selftest_determinism() -> Verdict {
    let a = f3n(&["selftest", "--seed", "3"]);
    let b = f3n(&["selftest", "--seed", "3"]);
    let identical = a.stdout == b.stdout && !a.stdout.is_empty();
    let passed = a.status.code() == Some(0);
    verdict(
        identical && passed,
        format!(
            "byte-identical: {identical}, selftest exit {:?}",
            a.status.code()
        ),
    )
}

fn main() {
    let criteria: [(&str, Check); 11] = [
        ("exact Plancherel", plancherel),
        ("cap-set cube sum", cube_sum),
        ("energy backend equivalence", energy_backends),
        ("Hölder lifting", holder),
        ("exhaustive maxima", exhaustive),
        ("fiber Plancherel", fiber),
        ("komity dual computation", komity),
        ("g-formula", g_formula),
        ("nullity reproducibility", nullity),
        ("spectrum invariants", spectrum_invariants),
        ("selftest determinism", selftest_determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let v = check();
        failed += !v.ok as u32;
        println!(
            "{} {:>2} {name}: {}",
            if v.ok { "PASS" } else { "FAIL" },
            i + 1,
            v.detail
        );
    }
    println!(
        "acceptance: {} of {} criteria passed",
        criteria.len() as u32 - failed,
        criteria.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
