//! Linear algebra over `F_3` on packed rows.
//!
//! A [`Subspace`] is kept in reduced row-echelon form: every basis row has a
//! pivot trit equal to 1, pivot positions strictly increase, and each pivot
//! column is zero in every other row. Row updates act on whole bit-planes.

use alloc::vec::Vec;

use crate::{pow3, Error, Result, TritVector};

/// Default cap on `dim` for [`Subspace::enumerate`].
pub const ENUMERATE_LIMIT: u32 = 16;

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Subspace {
    n: u32,
    basis: Vec<TritVector>,
    pivots: Vec<u32>,
}

/// Eliminates `v` against an echelon basis (pivots normalized to 1).
#[inline]
fn reduce_against(basis: &[TritVector], pivots: &[u32], mut v: TritVector) -> TritVector {
    for (row, &p) in basis.iter().zip(pivots) {
        match v.trit(p) {
            0 => {}
            1 => v = v - *row,
            _ => v = v + *row,
        }
    }
    v
}

impl Subspace {
    pub fn zero(n: u32) -> Result<Self> {
        TritVector::zero(n)?;
        Ok(Self {
            n,
            basis: Vec::new(),
            pivots: Vec::new(),
        })
    }

    pub fn full(n: u32) -> Result<Self> {
        let units = (0..n)
            .map(|i| TritVector::unit(n, i))
            .collect::<Result<Vec<_>>>()?;
        Self::span(n, &units)
    }

    /// Span of `vectors`, reduced to canonical echelon form.
    pub fn span(n: u32, vectors: &[TritVector]) -> Result<Self> {
        let mut s = Self::zero(n)?;
        for v in vectors {
            if v.dim() != n {
                return Err(Error::DimensionMismatch {
                    left: n,
                    right: v.dim(),
                });
            }
            s.insert(*v);
        }
        Ok(s)
    }

    /// Adds `v` to the span; returns whether the dimension grew.
    pub fn insert(&mut self, v: TritVector) -> bool {
        let r = reduce_against(&self.basis, &self.pivots, v);
        let Some(p) = r.leading() else {
            return false;
        };
        // normalize pivot to 1
        let r = if r.trit(p) == 2 { -r } else { r };
        // clear column p in the existing rows
        for row in self.basis.iter_mut() {
            match row.trit(p) {
                0 => {}
                1 => *row = *row - r,
                _ => *row = *row + r,
            }
        }
        let at = self.pivots.partition_point(|&q| q < p);
        self.pivots.insert(at, p);
        self.basis.insert(at, r);
        true
    }

    #[inline]
    pub fn ambient_dim(&self) -> u32 {
        self.n
    }

    #[inline]
    pub fn dim(&self) -> u32 {
        self.basis.len() as u32
    }

    #[inline]
    pub fn codim(&self) -> u32 {
        self.n - self.dim()
    }

    /// `3^dim`.
    pub fn size(&self) -> u64 {
        pow3(self.dim())
    }

    pub fn basis(&self) -> &[TritVector] {
        &self.basis
    }

    pub fn pivots(&self) -> &[u32] {
        &self.pivots
    }

    /// Canonical representative of `v + self`: zero exactly on `self`.
    #[inline]
    pub fn reduce(&self, v: TritVector) -> TritVector {
        reduce_against(&self.basis, &self.pivots, v)
    }

    #[inline]
    pub fn contains(&self, v: &TritVector) -> bool {
        v.dim() == self.n && self.reduce(*v).is_zero()
    }

    pub fn is_subspace_of(&self, other: &Subspace) -> bool {
        self.n == other.n && self.basis.iter().all(|b| other.contains(b))
    }

    /// `{x : x·w = 0 for all w in self}`.
    pub fn annihilator(&self) -> Subspace {
        let mut out = Vec::new();
        for f in (0..self.n).filter(|f| !self.pivots.contains(f)) {
            // x_f = 1, x_p = -row_p[f]
            let mut x = TritVector::unit(self.n, f).expect("valid unit");
            for (row, &p) in self.basis.iter().zip(&self.pivots) {
                let t = row.trit(f);
                if t != 0 {
                    x = x.with_trit(p, 3 - t);
                }
            }
            out.push(x);
        }
        Self::span(self.n, &out).expect("dimensions agree")
    }

    /// Complement spanned by the unit vectors at non-pivot positions.
    pub fn transversal(&self) -> Subspace {
        let units: Vec<_> = (0..self.n)
            .filter(|f| !self.pivots.contains(f))
            .map(|f| TritVector::unit(self.n, f).expect("valid unit"))
            .collect();
        Self::span(self.n, &units).expect("dimensions agree")
    }

    /// All `3^dim` elements, zero first. Guarded at `dim <= 16`.
    pub fn enumerate(&self) -> Result<Elements<'_>> {
        self.enumerate_with_limit(ENUMERATE_LIMIT)
    }

    pub fn enumerate_with_limit(&self, limit: u32) -> Result<Elements<'_>> {
        if self.dim() > limit {
            return Err(Error::EnumerationGuard {
                dim: self.dim(),
                limit,
            });
        }
        Ok(Elements {
            space: self,
            next: 0,
            end: self.size(),
        })
    }

    /// Element with base-3 coordinate `k` in the basis (first basis row most significant).
    pub fn element(&self, mut k: u64) -> TritVector {
        let mut v = TritVector::zero(self.n).expect("valid dim");
        for row in self.basis.iter().rev() {
            v = v + row.scale((k % 3) as u8);
            k /= 3;
        }
        v
    }

    /// `self + other`.
    pub fn join(&self, other: &Subspace) -> Result<Subspace> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch {
                left: self.n,
                right: other.n,
            });
        }
        let mut s = self.clone();
        for b in &other.basis {
            s.insert(*b);
        }
        Ok(s)
    }
}

pub struct Elements<'a> {
    space: &'a Subspace,
    next: u64,
    end: u64,
}

impl Iterator for Elements<'_> {
    type Item = TritVector;

    fn next(&mut self) -> Option<TritVector> {
        (self.next < self.end).then(|| {
            let v = self.space.element(self.next);
            self.next += 1;
            v
        })
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let r = (self.end - self.next) as usize;
        (r, Some(r))
    }
}

impl ExactSizeIterator for Elements<'_> {}

/// Dimension of the span. Empty input has rank 0.
pub fn rank(vectors: &[TritVector]) -> usize {
    let Some(first) = vectors.first() else {
        return 0;
    };
    let n = first.dim();
    // plain forward elimination; no need for the reduced form
    let mut rows: Vec<TritVector> = Vec::with_capacity(n as usize);
    let mut pivots: Vec<u32> = Vec::with_capacity(n as usize);
    for &v in vectors {
        assert_eq!(v.dim(), n, "dimension mismatch in rank");
        let mut r = v;
        for (row, &p) in rows.iter().zip(&pivots) {
            match r.trit(p) {
                0 => {}
                1 => r = r - *row,
                _ => r = r + *row,
            }
        }
        if let Some(p) = r.leading() {
            let r = if r.trit(p) == 2 { -r } else { r };
            // keep `rows` sorted by pivot so later rows never reintroduce an earlier pivot
            let at = pivots.partition_point(|&q| q < p);
            pivots.insert(at, p);
            rows.insert(at, r);
            if rows.len() == n as usize {
                break;
            }
        }
    }
    rows.len()
}

/// `len - rank`; duplicates count toward nullity.
pub fn nullity(vectors: &[TritVector]) -> usize {
    vectors.len() - rank(vectors)
}
