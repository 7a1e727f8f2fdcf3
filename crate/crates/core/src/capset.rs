//! Point sets, cap-set verification, generators and exhaustive maxima.

use alloc::string::ToString;
use alloc::vec;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::linalg::Subspace;
use crate::{pow3, Density, Error, Result, TritVector};

/// Bitmaps over all `3^n` cells are kept up to this dimension.
pub const BITMAP_LIMIT: u32 = 16;
/// Largest `n` accepted by [`greedy_random_capset`].
pub const GREEDY_LIMIT: u32 = 16;
/// Largest `n` accepted by [`exhaustive_max_capset`].
pub const EXHAUSTIVE_LIMIT: u32 = 4;

#[derive(Clone, Debug, PartialEq, Eq)]
struct Bitmap(Vec<u64>);

impl Bitmap {
    fn new(cells: u64) -> Self {
        Bitmap(vec![0; cells.div_ceil(64) as usize])
    }
    #[inline]
    fn get(&self, i: u64) -> bool {
        (self.0[(i >> 6) as usize] >> (i & 63)) & 1 == 1
    }
    #[inline]
    fn set(&mut self, i: u64) {
        self.0[(i >> 6) as usize] |= 1 << (i & 63);
    }
}

/// A finite subset of `F_3^n`, stored as sorted distinct base-3 indices.
#[derive(Clone, Debug)]
pub struct PointSet {
    n: u32,
    points: Vec<TritVector>,
    bitmap: Option<Bitmap>,
}

impl PartialEq for PointSet {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.points == other.points
    }
}

impl Eq for PointSet {}

impl PointSet {
    /// Builds a set, silently dropping duplicates.
    pub fn new(n: u32, points: impl IntoIterator<Item = TritVector>) -> Result<Self> {
        TritVector::zero(n)?;
        let mut pts: Vec<TritVector> = Vec::new();
        for p in points {
            if p.dim() != n {
                return Err(Error::DimensionMismatch {
                    left: n,
                    right: p.dim(),
                });
            }
            pts.push(p);
        }
        let mut keyed: Vec<(u64, TritVector)> = pts.into_iter().map(|p| (p.index(), p)).collect();
        keyed.sort_unstable_by_key(|e| e.0);
        keyed.dedup_by_key(|e| e.0);
        Ok(Self::from_sorted(
            n,
            keyed.into_iter().map(|e| e.1).collect(),
        ))
    }

    /// Like [`PointSet::new`] but rejects repeated points.
    pub fn new_unique(n: u32, points: impl IntoIterator<Item = TritVector>) -> Result<Self> {
        let pts: Vec<TritVector> = points.into_iter().collect();
        let len = pts.len();
        let set = Self::new(n, pts.iter().copied())?;
        if set.len() != len {
            let mut seen = hashbrown::HashSet::new();
            let dup = pts
                .iter()
                .find(|p| !seen.insert(**p))
                .expect("a duplicate exists");
            return Err(Error::DuplicatePoint(dup.to_string()));
        }
        Ok(set)
    }

    pub fn from_indices(n: u32, indices: impl IntoIterator<Item = u64>) -> Result<Self> {
        let pts = indices
            .into_iter()
            .map(|i| TritVector::from_index(n, i))
            .collect::<Result<Vec<_>>>()?;
        Self::new(n, pts)
    }

    fn from_sorted(n: u32, points: Vec<TritVector>) -> Self {
        let bitmap = (n <= BITMAP_LIMIT).then(|| {
            let mut b = Bitmap::new(pow3(n));
            for p in &points {
                b.set(p.index());
            }
            b
        });
        Self { n, points, bitmap }
    }

    pub fn empty(n: u32) -> Result<Self> {
        Self::new(n, [])
    }

    /// All of `F_3^n`.
    pub fn full(n: u32) -> Result<Self> {
        Self::from_indices(n, 0..pow3(n))
    }

    /// The elements of a linear subspace.
    pub fn of_subspace(w: &Subspace) -> Result<Self> {
        Self::new(w.ambient_dim(), w.enumerate()?)
    }

    #[inline]
    pub fn n(&self) -> u32 {
        self.n
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.points.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Points in increasing index order.
    #[inline]
    pub fn points(&self) -> &[TritVector] {
        &self.points
    }

    pub fn iter(&self) -> impl Iterator<Item = TritVector> + '_ {
        self.points.iter().copied()
    }

    pub fn contains(&self, v: &TritVector) -> bool {
        if v.dim() != self.n {
            return false;
        }
        match &self.bitmap {
            Some(b) => b.get(v.index()),
            None => {
                let key = v.index();
                self.points
                    .binary_search_by_key(&key, |p| p.index())
                    .is_ok()
            }
        }
    }

    /// Position of `v` in [`PointSet::points`].
    pub fn position(&self, v: &TritVector) -> Option<usize> {
        let key = v.index();
        self.points.binary_search_by_key(&key, |p| p.index()).ok()
    }

    pub fn density(&self) -> Density {
        Density::new(self.len() as u64, self.n)
    }

    /// Indicator as a dense `3^n` integer array.
    pub fn indicator(&self) -> Vec<i64> {
        let mut f = vec![0i64; pow3(self.n) as usize];
        for p in &self.points {
            f[p.index() as usize] = 1;
        }
        f
    }

    pub fn translate(&self, v: &TritVector) -> Result<Self> {
        if v.dim() != self.n {
            return Err(Error::DimensionMismatch {
                left: self.n,
                right: v.dim(),
            });
        }
        Self::new(self.n, self.iter().map(|p| p + *v))
    }

    pub fn negate(&self) -> Self {
        Self::new(self.n, self.iter().map(|p| -p)).expect("same dimension")
    }

    pub fn filter(&self, mut keep: impl FnMut(&TritVector) -> bool) -> Self {
        Self::from_sorted(
            self.n,
            self.points.iter().copied().filter(|p| keep(p)).collect(),
        )
    }

    pub fn is_subset_of(&self, other: &PointSet) -> bool {
        self.n == other.n && self.points.iter().all(|p| other.contains(p))
    }
}

/// True iff no three distinct points sum to zero.
///
/// For distinct `a, b` the third point `-(a+b)` is automatically distinct
/// from both, so one membership probe per unordered pair suffices.
pub fn is_capset(a: &PointSet) -> bool {
    let pts = a.points();
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            if a.contains(&-(pts[i] + pts[j])) {
                return false;
            }
        }
    }
    true
}

/// Ordered triples `(a, b, c)` in `A³` with `a + b + c = 0`, including
/// the degenerate `a = b = c`.
pub fn count_line_solutions(a: &PointSet) -> u128 {
    let pts = a.points();
    let mut count = 0u128;
    for &x in pts {
        for &y in pts {
            if a.contains(&-(x + y)) {
                count += 1;
            }
        }
    }
    count
}

/// Random-order greedy cap set: every point of `F_3^n` is visited once in a
/// seeded shuffle and kept unless it completes a line. The result is
/// maximal and depends only on `(n, seed)`.
pub fn greedy_random_capset(n: u32, seed: u64) -> Result<PointSet> {
    if n == 0 || n > GREEDY_LIMIT {
        return Err(Error::Dimension {
            n,
            min: 1,
            max: GREEDY_LIMIT,
        });
    }
    let mut order: Vec<u64> = (0..pow3(n)).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let mut forbidden = Bitmap::new(pow3(n));
    let mut chosen: Vec<TritVector> = Vec::new();
    for idx in order {
        if forbidden.get(idx) {
            continue;
        }
        let p = TritVector::from_index(n, idx)?;
        for &a in &chosen {
            forbidden.set((-(a + p)).index());
        }
        chosen.push(p);
    }
    PointSet::new(n, chosen)
}

/// `{(a, b) : a ∈ A, b ∈ B}` in `F_3^{m+k}`, `a`'s trits first.
pub fn product(a: &PointSet, b: &PointSet) -> Result<PointSet> {
    let n = a.n() + b.n();
    TritVector::zero(n)?;
    let mut pts = Vec::with_capacity(a.len() * b.len());
    for x in a.iter() {
        for y in b.iter() {
            pts.push(x.concat(&y)?);
        }
    }
    PointSet::new(n, pts)
}

/// Random subset of `F_3^n` of the given size (seeded; for test instances).
pub fn random_set(n: u32, size: usize, seed: u64) -> Result<PointSet> {
    let total = pow3(n);
    if size as u64 > total {
        return Err(Error::SampleTooLarge {
            d: size,
            len: total as usize,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let idx = rand::seq::index::sample(&mut rng, total as usize, size);
    PointSet::from_indices(n, idx.into_iter().map(|i| i as u64))
}

/// Exact maximum cap-set size in `F_3^n` for `n <= 4`, with a witness.
///
/// Recursion on `n`: a cap larger than the `(n-1)`-dimensional maximum lies
/// in no affine hyperplane, so it contains `n + 1` affinely independent
/// points, which an affine map sends to `0, e_0, …, e_{n-1}`. The search
/// therefore fixes that frame and branch-and-bounds over the remaining
/// cells in index order, bounding by the count of still-admissible cells.
pub fn exhaustive_max_capset(n: u32) -> Result<(usize, PointSet)> {
    exhaustive_max_capset_with_limit(n, EXHAUSTIVE_LIMIT)
}

pub fn exhaustive_max_capset_with_limit(n: u32, limit: u32) -> Result<(usize, PointSet)> {
    if n > limit {
        return Err(Error::ExhaustiveGuard { n, limit });
    }
    // Cells are tracked in u128 masks.
    if n == 0 || n > 4 {
        return Err(Error::Dimension { n, min: 1, max: 4 });
    }
    let (size, indices) = max_cap_recursive(n);
    let set = PointSet::from_indices(n, indices.iter().map(|&i| i as u64))?;
    debug_assert_eq!(set.len(), size);
    Ok((size, set))
}

fn max_cap_recursive(n: u32) -> (usize, Vec<usize>) {
    let cells = pow3(n) as usize;
    let lower = if n == 1 {
        // a single point
        (1, vec![0usize])
    } else {
        // embed the (n-1)-dimensional witness as the hyperplane x_{n-1} = 0
        let (s, w) = max_cap_recursive(n - 1);
        (s, w.into_iter().map(|i| i * 3).collect())
    };
    let third = third_point_table(n);
    let mut frame = vec![0usize];
    for i in 0..n {
        frame.push(TritVector::unit(n, i).expect("valid").index() as usize);
    }
    frame.sort_unstable();
    let mut forbidden = 0u128;
    let mut used = 0u128;
    for (k, &a) in frame.iter().enumerate() {
        used |= 1 << a;
        for &b in &frame[..k] {
            forbidden |= 1 << third[a * cells + b];
        }
    }
    let mut search = Search {
        cells,
        third: &third,
        best: lower.0,
        best_set: lower.1,
        current: frame,
    };
    let free = !(forbidden | used) & full_mask(cells);
    search.descend(free, forbidden);
    (search.best, search.best_set)
}

fn full_mask(cells: usize) -> u128 {
    if cells == 128 {
        u128::MAX
    } else {
        (1u128 << cells) - 1
    }
}

/// `third[a * cells + b]` is the index of `-(a + b)`.
fn third_point_table(n: u32) -> Vec<usize> {
    let cells = pow3(n) as usize;
    let vecs: Vec<TritVector> = (0..cells as u64)
        .map(|i| TritVector::from_index(n, i).expect("valid"))
        .collect();
    let mut t = vec![0usize; cells * cells];
    for a in 0..cells {
        for b in 0..cells {
            t[a * cells + b] = (-(vecs[a] + vecs[b])).index() as usize;
        }
    }
    t
}

struct Search<'a> {
    cells: usize,
    third: &'a [usize],
    best: usize,
    best_set: Vec<usize>,
    current: Vec<usize>,
}

impl Search<'_> {
    /// `candidates`: admissible cells not yet decided. Cells are taken in
    /// increasing index order, so each cap is visited once.
    fn descend(&mut self, mut candidates: u128, forbidden: u128) {
        if self.current.len() > self.best {
            self.best = self.current.len();
            self.best_set = self.current.clone();
        }
        while candidates != 0 {
            if self.current.len() + candidates.count_ones() as usize <= self.best {
                return;
            }
            let p = candidates.trailing_zeros() as usize;
            candidates &= candidates - 1;
            let mut f = forbidden;
            for &a in &self.current {
                f |= 1 << self.third[a * self.cells + p];
            }
            self.current.push(p);
            self.descend(candidates & !f, f);
            self.current.pop();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reference;

    fn set(n: u32, pts: &[&str]) -> PointSet {
        PointSet::new(n, pts.iter().map(|s| s.parse::<TritVector>().unwrap())).unwrap()
    }

    #[test]
    fn tiny_examples() {
        assert!(is_capset(&set(1, &["0", "1"])));
        assert!(!is_capset(&set(1, &["0", "1", "2"])));
        let full = PointSet::full(3).unwrap();
        assert_eq!(count_line_solutions(&full), pow3(6) as u128);
    }

    #[test]
    fn duplicates() {
        let v: TritVector = "12".parse().unwrap();
        assert_eq!(PointSet::new(2, [v, v]).unwrap().len(), 1);
        assert!(matches!(
            PointSet::new_unique(2, [v, v]),
            Err(Error::DuplicatePoint(_))
        ));
    }

    #[test]
    fn greedy_properties() {
        for seed in 0..5 {
            let g = greedy_random_capset(1, seed).unwrap();
            assert_eq!(g.len(), 2);
        }
        for n in 2..=6 {
            let g = greedy_random_capset(n, 7).unwrap();
            assert!(is_capset(&g));
            assert_eq!(g, greedy_random_capset(n, 7).unwrap());
            assert_eq!(count_line_solutions(&g), g.len() as u128);
            // maximal
            for x in 0..pow3(n) {
                let p = TritVector::from_index(n, x).unwrap();
                if !g.contains(&p) {
                    let bigger = PointSet::new(n, g.iter().chain([p])).unwrap();
                    assert!(!is_capset(&bigger));
                }
            }
        }
        assert!(greedy_random_capset(17, 0).is_err());
    }

    #[test]
    fn product_examples() {
        let (_, a) = exhaustive_max_capset(2).unwrap();
        let (_, b) = exhaustive_max_capset(3).unwrap();
        let p = product(&a, &b).unwrap();
        assert_eq!(p.len(), 36);
        assert!(is_capset(&p));
        let zero = set(1, &["0"]);
        let pa = product(&a, &zero).unwrap();
        assert_eq!(pa.len(), a.len());
        for x in a.iter() {
            assert!(pa.contains(&x.concat(&"0".parse().unwrap()).unwrap()));
        }
    }

    #[test]
    fn exhaustive_small() {
        for (n, want) in [(1, 2), (2, 4), (3, 9)] {
            let (s, w) = exhaustive_max_capset(n).unwrap();
            assert_eq!(s, want);
            assert_eq!(w.len(), want);
            assert!(is_capset(&w));
            assert_eq!(reference::max_capset_dfs(n), want);
        }
        assert!(matches!(
            exhaustive_max_capset(5),
            Err(Error::ExhaustiveGuard { .. })
        ));
    }

    #[test]
    fn random_sets_agree_with_triple_loop() {
        for seed in 0..100u64 {
            let n = 2 + (seed % 4) as u32;
            let size = 1 + (seed as usize * 7) % (pow3(n) as usize);
            let a = random_set(n, size.min(12), seed).unwrap();
            assert_eq!(is_capset(&a), reference::is_capset_triple_loop(&a));
            assert_eq!(
                count_line_solutions(&a),
                reference::line_solutions_triple_loop(&a)
            );
        }
    }

    #[test]
    fn subsets_of_caps_are_caps() {
        let g = greedy_random_capset(6, 3).unwrap();
        for seed in 0..20u64 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut pts = g.points().to_vec();
            pts.shuffle(&mut rng);
            pts.truncate((seed as usize * 5) % g.len());
            assert!(is_capset(&PointSet::new(6, pts).unwrap()));
        }
    }
}
