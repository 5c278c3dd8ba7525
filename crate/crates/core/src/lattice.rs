//! Points of `{0,1}^n`, dense point sets, and upsets.
//!
//! Coordinate `i` (0-based) is bit `i` of the point's index. The text form of
//! a point is a binary string whose leftmost character is coordinate 0, so
//! `"100"` in dimension 3 is the point with index 1.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Largest dimension of a [`Point`] or [`PointSet`].
///
/// Measures stay at [`crate::measure::MAX_DIM`]; the extra headroom is for
/// truth tables over source bits.
pub const MAX_POINT_DIM: usize = 24;

/// Largest dimension for which [`enumerate_upsets`] is supported.
pub const MAX_UPSET_DIM: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Point {
    bits: u32,
    dim: u8,
}

impl Point {
    pub fn new(bits: u32, dim: usize) -> Result<Self> {
        if dim > MAX_POINT_DIM {
            return Err(Error::Capacity {
                what: "point dimension",
                value: dim,
                limit: MAX_POINT_DIM,
            });
        }
        if dim < 32 && (bits >> dim) != 0 {
            return Err(Error::PointOutOfRange {
                bits: bits as u64,
                dim,
            });
        }
        Ok(Point {
            bits,
            dim: dim as u8,
        })
    }

    pub(crate) fn from_index(index: usize, dim: usize) -> Self {
        debug_assert!(dim <= MAX_POINT_DIM && index < (1usize << dim));
        Point {
            bits: index as u32,
            dim: dim as u8,
        }
    }

    pub fn bits(self) -> u32 {
        self.bits
    }

    pub fn index(self) -> usize {
        self.bits as usize
    }

    pub fn dim(self) -> usize {
        self.dim as usize
    }

    pub fn coord(self, i: usize) -> bool {
        (self.bits >> i) & 1 == 1
    }

    /// Number of coordinates equal to one.
    pub fn weight(self) -> u32 {
        self.bits.count_ones()
    }

    fn same_dim(self, other: Point) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                left: self.dim(),
                right: other.dim(),
            });
        }
        Ok(())
    }

    /// Coordinatewise maximum.
    pub fn join(self, other: Point) -> Result<Point> {
        self.same_dim(other)?;
        Ok(Point {
            bits: self.bits | other.bits,
            dim: self.dim,
        })
    }

    /// Coordinatewise minimum.
    pub fn meet(self, other: Point) -> Result<Point> {
        self.same_dim(other)?;
        Ok(Point {
            bits: self.bits & other.bits,
            dim: self.dim,
        })
    }

    pub fn leq(self, other: Point) -> Result<bool> {
        Ok(self.meet(other)? == self)
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.dim() {
            f.write_str(if self.coord(i) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl FromStr for Point {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.len() > MAX_POINT_DIM {
            return Err(Error::Capacity {
                what: "point dimension",
                value: s.len(),
                limit: MAX_POINT_DIM,
            });
        }
        let mut bits = 0u32;
        for (i, c) in s.bytes().enumerate() {
            match c {
                b'0' => {}
                b'1' => bits |= 1 << i,
                _ => return Err(Error::BadPointString(s.to_string())),
            }
        }
        Point::new(bits, s.len())
    }
}

/// Free-function forms of the lattice operations.
pub fn join(a: Point, b: Point) -> Result<Point> {
    a.join(b)
}

pub fn meet(a: Point, b: Point) -> Result<Point> {
    a.meet(b)
}

pub fn leq(a: Point, b: Point) -> Result<bool> {
    a.leq(b)
}

/// A subset of `{0,1}^n` stored as a dense bit table of length `2^n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PointSet {
    dim: usize,
    words: Vec<u64>,
}

impl PointSet {
    pub fn empty(dim: usize) -> Result<Self> {
        if dim > MAX_POINT_DIM {
            return Err(Error::Capacity {
                what: "point set dimension",
                value: dim,
                limit: MAX_POINT_DIM,
            });
        }
        let len = 1usize << dim;
        Ok(PointSet {
            dim,
            words: vec![0; len.div_ceil(64)],
        })
    }

    pub fn full(dim: usize) -> Result<Self> {
        let mut s = Self::empty(dim)?;
        for w in s.words.iter_mut() {
            *w = u64::MAX;
        }
        s.clear_tail();
        Ok(s)
    }

    /// Builds the set of indices whose bit is set in `mask`; needs `2^dim <= 64`.
    pub fn from_mask(dim: usize, mask: u64) -> Result<Self> {
        if dim > 6 {
            return Err(Error::Capacity {
                what: "mask-backed point set dimension",
                value: dim,
                limit: 6,
            });
        }
        let mut s = Self::empty(dim)?;
        s.words[0] = mask;
        s.clear_tail();
        Ok(s)
    }

    pub fn from_points<I: IntoIterator<Item = Point>>(dim: usize, points: I) -> Result<Self> {
        let mut s = Self::empty(dim)?;
        for p in points {
            if p.dim() != dim {
                return Err(Error::DimensionMismatch {
                    left: dim,
                    right: p.dim(),
                });
            }
            s.insert_index(p.index());
        }
        Ok(s)
    }

    /// Parses binary strings of length `dim`.
    pub fn from_strings<S: AsRef<str>>(dim: usize, items: &[S]) -> Result<Self> {
        let points = items
            .iter()
            .map(|s| {
                let p: Point = s.as_ref().parse()?;
                if p.dim() != dim {
                    return Err(Error::DimensionMismatch {
                        left: dim,
                        right: p.dim(),
                    });
                }
                Ok(p)
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_points(dim, points)
    }

    pub fn to_strings(&self) -> Vec<String> {
        self.iter().map(|p| p.to_string()).collect()
    }

    fn clear_tail(&mut self) {
        let len = self.len_table();
        if !len.is_multiple_of(64) {
            let last = self.words.len() - 1;
            self.words[last] &= (1u64 << (len % 64)) - 1;
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of points in the ambient cube, `2^n`.
    pub fn len_table(&self) -> usize {
        1usize << self.dim
    }

    pub fn count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn contains_index(&self, i: usize) -> bool {
        (self.words[i / 64] >> (i % 64)) & 1 == 1
    }

    pub fn contains(&self, p: Point) -> bool {
        p.dim() == self.dim && self.contains_index(p.index())
    }

    pub fn insert_index(&mut self, i: usize) {
        self.words[i / 64] |= 1 << (i % 64);
    }

    pub fn remove_index(&mut self, i: usize) {
        self.words[i / 64] &= !(1 << (i % 64));
    }

    pub fn set_index(&mut self, i: usize, value: bool) {
        if value {
            self.insert_index(i)
        } else {
            self.remove_index(i)
        }
    }

    pub fn iter_indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let b = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(wi * 64 + b)
            })
        })
    }

    pub fn iter(&self) -> impl Iterator<Item = Point> + '_ {
        let dim = self.dim;
        self.iter_indices().map(move |i| Point::from_index(i, dim))
    }

    fn zip_with(&self, other: &PointSet, f: impl Fn(u64, u64) -> u64) -> Result<PointSet> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                left: self.dim,
                right: other.dim,
            });
        }
        let mut out = PointSet {
            dim: self.dim,
            words: self
                .words
                .iter()
                .zip(&other.words)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        };
        out.clear_tail();
        Ok(out)
    }

    pub fn union(&self, other: &PointSet) -> Result<PointSet> {
        self.zip_with(other, |a, b| a | b)
    }

    pub fn intersection(&self, other: &PointSet) -> Result<PointSet> {
        self.zip_with(other, |a, b| a & b)
    }

    pub fn difference(&self, other: &PointSet) -> Result<PointSet> {
        self.zip_with(other, |a, b| a & !b)
    }

    pub fn complement(&self) -> PointSet {
        let mut out = PointSet {
            dim: self.dim,
            words: self.words.iter().map(|w| !w).collect(),
        };
        out.clear_tail();
        out
    }

    pub fn is_disjoint(&self, other: &PointSet) -> bool {
        self.dim == other.dim && self.words.iter().zip(&other.words).all(|(a, b)| a & b == 0)
    }

    pub fn is_subset(&self, other: &PointSet) -> bool {
        self.dim == other.dim
            && self
                .words
                .iter()
                .zip(&other.words)
                .all(|(a, b)| a & !b == 0)
    }

    /// Low 64 bits of the table; exact when `2^n <= 64`.
    pub fn low_mask(&self) -> u64 {
        self.words[0]
    }

    /// A point of the set whose single-coordinate successor lies outside it,
    /// if any. `None` means the set is closed upwards.
    pub fn upset_witness(&self) -> Option<(Point, Point)> {
        for v in self.iter_indices() {
            for i in 0..self.dim {
                let w = v | (1 << i);
                if w != v && !self.contains_index(w) {
                    return Some((
                        Point::from_index(v, self.dim),
                        Point::from_index(w, self.dim),
                    ));
                }
            }
        }
        None
    }

    pub fn is_upset(&self) -> bool {
        self.upset_witness().is_none()
    }

    pub fn is_downset(&self) -> bool {
        self.complement().is_upset()
    }

    /// Smallest upset containing the set.
    pub fn up_closure(&self) -> PointSet {
        let mut out = self.clone();
        // Points in increasing index order; each successor has a larger index.
        for v in 0..self.len_table() {
            if out.contains_index(v) {
                for i in 0..self.dim {
                    out.insert_index(v | (1 << i));
                }
            }
        }
        out
    }

    /// `{w : w >= p}`.
    pub fn principal_upset(p: Point) -> PointSet {
        let mut out = PointSet::empty(p.dim()).expect("point dimension already checked");
        let free = !p.bits() & (((1u64 << p.dim()) - 1) as u32);
        // Enumerate all submasks of `free`.
        let mut s = free;
        loop {
            out.insert_index((p.bits() | s) as usize);
            if s == 0 {
                break;
            }
            s = (s - 1) & free;
        }
        out
    }
}

pub fn is_upset(s: &PointSet) -> bool {
    s.is_upset()
}

/// All upsets of `{0,1}^n`, each exactly once, including `∅` and the whole
/// cube.
///
/// Points are decided top-down in (weight descending, index ascending) order;
/// a point may join only once all of its upper covers are in, so every branch
/// of the recursion ends in an upset and nothing is generated twice.
pub fn enumerate_upsets(n: usize) -> Result<Vec<PointSet>> {
    enumerate_upset_masks(n)?
        .into_iter()
        .map(|m| PointSet::from_mask(n, m))
        .collect()
}

/// [`enumerate_upsets`] as raw `2^n`-bit masks (valid because `n <= 5`).
pub fn enumerate_upset_masks(n: usize) -> Result<Vec<u64>> {
    if n > MAX_UPSET_DIM {
        return Err(Error::Capacity {
            what: "upset enumeration dimension",
            value: n,
            limit: MAX_UPSET_DIM,
        });
    }
    let mut order: Vec<u32> = (0..(1u32 << n)).collect();
    order.sort_by_key(|&v| (std::cmp::Reverse(v.count_ones()), v));
    let covers: Vec<u64> = (0..(1u32 << n))
        .map(|v| {
            (0..n)
                .filter(|&i| v & (1 << i) == 0)
                .fold(0u64, |m, i| m | 1 << (v | 1 << i))
        })
        .collect();

    fn go(idx: usize, mask: u64, order: &[u32], covers: &[u64], out: &mut Vec<u64>) {
        if idx == order.len() {
            out.push(mask);
            return;
        }
        let v = order[idx] as usize;
        go(idx + 1, mask, order, covers, out);
        if mask & covers[v] == covers[v] {
            go(idx + 1, mask | 1 << v, order, covers, out);
        }
    }

    let mut out = Vec::new();
    go(0, 0, &order, &covers, &mut out);
    Ok(out)
}
