//! Exact probability measures on `{0,1}^n`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{self, Point, PointSet};
use crate::rational::{self, Rational};

/// Dimension cap for dense measures (`2^20` rational weights).
pub const MAX_DIM: usize = 20;

/// A probability measure stored as one exact weight per point.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Measure {
    dim: usize,
    weights: Vec<Rational>,
}

/// A pair at which `mu(a ∨ b) mu(a ∧ b) < mu(a) mu(b)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FkgViolation {
    #[serde(serialize_with = "ser_point")]
    pub a: Point,
    #[serde(serialize_with = "ser_point")]
    pub b: Point,
    #[serde(with = "rational::as_string")]
    pub lhs: Rational,
    #[serde(with = "rational::as_string")]
    pub rhs: Rational,
}

/// Two upsets with `mu(E1 ∩ E2) < mu(E1) mu(E2)`; `gap` is the positive
/// shortfall.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AssociationViolation {
    pub first: PointSet,
    pub second: PointSet,
    pub gap: Rational,
}

pub(crate) fn ser_point<S: serde::Serializer>(
    p: &Point,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&p.to_string())
}

fn check_dim(n: usize) -> Result<()> {
    if n > MAX_DIM {
        return Err(Error::Capacity {
            what: "measure dimension",
            value: n,
            limit: MAX_DIM,
        });
    }
    Ok(())
}

impl Measure {
    /// Validates nonnegativity and total mass exactly one.
    pub fn new(dim: usize, weights: Vec<Rational>) -> Result<Self> {
        check_dim(dim)?;
        if weights.len() != 1 << dim {
            return Err(Error::InvalidMeasure(format!(
                "expected {} weights, got {}",
                1usize << dim,
                weights.len()
            )));
        }
        if let Some(i) = weights.iter().position(|w| w.is_negative()) {
            return Err(Error::InvalidMeasure(format!(
                "negative weight {} at {}",
                weights[i],
                Point::from_index(i, dim)
            )));
        }
        let total: Rational = weights.iter().sum();
        if !total.is_one() {
            return Err(Error::InvalidMeasure(format!(
                "weights sum to {total}, not 1"
            )));
        }
        Ok(Measure { dim, weights })
    }

    /// Scales nonnegative weights to total one.
    pub fn normalized(dim: usize, weights: Vec<Rational>) -> Result<Self> {
        let total: Rational = weights.iter().sum();
        if !total.is_positive() {
            return Err(Error::InvalidMeasure("total weight is not positive".into()));
        }
        Self::new(dim, weights.into_iter().map(|w| w / &total).collect())
    }

    pub fn point_mass(p: Point) -> Result<Self> {
        let mut w = vec![Rational::zero(); 1 << p.dim()];
        w[p.index()] = Rational::one();
        Self::new(p.dim(), w)
    }

    pub fn uniform(dim: usize) -> Result<Self> {
        check_dim(dim)?;
        let w = Rational::new(BigInt::one(), BigInt::from(1u64 << dim));
        Self::new(dim, vec![w; 1 << dim])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn weights(&self) -> &[Rational] {
        &self.weights
    }

    pub fn weight(&self, p: Point) -> &Rational {
        &self.weights[p.index()]
    }

    pub fn weight_at(&self, index: usize) -> &Rational {
        &self.weights[index]
    }

    pub fn mass(&self, s: &PointSet) -> Result<Rational> {
        if s.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                left: self.dim,
                right: s.dim(),
            });
        }
        Ok(s.iter_indices().map(|i| &self.weights[i]).sum())
    }

    /// Probability that coordinate `i` equals one.
    pub fn marginal(&self, i: usize) -> Rational {
        self.weights
            .iter()
            .enumerate()
            .filter(|(v, _)| (v >> i) & 1 == 1)
            .map(|(_, w)| w)
            .sum()
    }

    pub fn marginals(&self) -> Vec<Rational> {
        (0..self.dim).map(|i| self.marginal(i)).collect()
    }

    /// True when the measure equals the product of its one-dimensional
    /// marginals.
    pub fn is_product(&self) -> bool {
        product_measure(&self.marginals()).is_ok_and(|m| m == *self)
    }

    pub fn has_full_support(&self) -> bool {
        self.weights.iter().all(|w| w.is_positive())
    }

    /// `(1 - eps) * self + eps * uniform`, which has full support for
    /// `eps > 0`.
    pub fn mix_uniform(&self, eps: &Rational) -> Result<Measure> {
        if !rational::in_unit_interval(eps) {
            return Err(Error::ProbabilityOutOfRange {
                what: "mixing weight".into(),
                value: eps.to_string(),
                range: "[0,1]",
            });
        }
        let u = eps / Rational::from_integer(BigInt::from(1u64 << self.dim));
        let keep = Rational::one() - eps;
        Measure::new(
            self.dim,
            self.weights.iter().map(|w| w * &keep + &u).collect(),
        )
    }

    /// Least common denominator and the integer numerators over it.
    pub(crate) fn common_denominator(&self) -> (BigInt, Vec<BigInt>) {
        let l = self
            .weights
            .iter()
            .fold(BigInt::one(), |acc, w| acc.lcm(w.denom()));
        let nums = self
            .weights
            .iter()
            .map(|w| w.numer() * (&l / w.denom()))
            .collect();
        (l, nums)
    }

    pub fn to_file(&self) -> MeasureFile {
        MeasureFile {
            n: self.dim,
            weights: self
                .weights
                .iter()
                .enumerate()
                .map(|(i, w)| {
                    (
                        Point::from_index(i, self.dim).to_string(),
                        serde_json::Value::String(rational::format(w)),
                    )
                })
                .collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_file()).expect("measure serializes")
    }

    /// Missing points get weight zero; the total must be exactly one.
    pub fn from_file(f: &MeasureFile) -> Result<Self> {
        check_dim(f.n)?;
        let mut weights = vec![Rational::zero(); 1 << f.n];
        for (k, v) in &f.weights {
            let p: Point = k.parse()?;
            if p.dim() != f.n {
                return Err(Error::DimensionMismatch {
                    left: f.n,
                    right: p.dim(),
                });
            }
            let text = v
                .as_str()
                .ok_or_else(|| Error::BadRational(v.to_string()))?;
            weights[p.index()] = rational::parse(text)?;
        }
        Self::new(f.n, weights)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let f: MeasureFile = serde_json::from_str(s)?;
        Self::from_file(&f)
    }
}

/// On-disk form: `{"n": 3, "weights": {"000": "1/3", ...}}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeasureFile {
    pub n: usize,
    pub weights: serde_json::Map<String, serde_json::Value>,
}

/// Product of independent coordinates with `P(x_i = 1) = p[i]`.
pub fn product_measure(p: &[Rational]) -> Result<Measure> {
    check_dim(p.len())?;
    for (i, pi) in p.iter().enumerate() {
        if !rational::in_unit_interval(pi) {
            return Err(Error::ProbabilityOutOfRange {
                what: format!("coordinate {i}"),
                value: pi.to_string(),
                range: "[0,1]",
            });
        }
    }
    let mut weights = vec![Rational::one()];
    for pi in p {
        let qi = Rational::one() - pi;
        // Doubling: the new coordinate is the highest bit so far.
        let mut next: Vec<Rational> = weights.iter().map(|w| w * &qi).collect();
        next.extend(weights.iter().map(|w| w * pi));
        weights = next;
    }
    Measure::new(p.len(), weights)
}

/// First pair `(a, b)`, `a < b` by index, violating the lattice condition.
/// Comparable pairs satisfy it trivially and are skipped.
pub fn check_fkg_property(mu: &Measure) -> Option<FkgViolation> {
    let n = 1usize << mu.dim;
    for a in 0..n {
        for b in (a + 1)..n {
            if a & b == a || a & b == b {
                continue;
            }
            let lhs = &mu.weights[a | b] * &mu.weights[a & b];
            let rhs = &mu.weights[a] * &mu.weights[b];
            if lhs < rhs {
                return Some(FkgViolation {
                    a: Point::from_index(a, mu.dim),
                    b: Point::from_index(b, mu.dim),
                    lhs,
                    rhs,
                });
            }
        }
    }
    None
}

/// True when every pair satisfies the lattice condition with equality.
pub fn fkg_equality_everywhere(mu: &Measure) -> bool {
    let n = 1usize << mu.dim;
    (0..n).all(|a| {
        (0..n).all(|b| {
            mu.weights[a | b].clone() * &mu.weights[a & b] == &mu.weights[a] * &mu.weights[b]
        })
    })
}

/// Checks `mu(E1 ∩ E2) >= mu(E1) mu(E2)` over all pairs of upsets and returns
/// the first violating pair in enumeration order.
pub fn check_positive_association(mu: &Measure) -> Result<Option<AssociationViolation>> {
    let upsets = lattice::enumerate_upset_masks(mu.dim)?;
    let (l, nums) = mu.common_denominator();

    let found = match (l.to_u64(), to_u64s(&nums)) {
        (Some(l64), Some(w)) => scan_pairs_u128(&upsets, l64 as u128, &w),
        _ => scan_pairs_big(&upsets, &l, &nums),
    };
    Ok(found.map(|(i, j)| {
        let e1 = PointSet::from_mask(mu.dim, upsets[i]).expect("n <= 5");
        let e2 = PointSet::from_mask(mu.dim, upsets[j]).expect("n <= 5");
        let both = e1.intersection(&e2).expect("same dimension");
        let gap = mu.mass(&e1).unwrap() * mu.mass(&e2).unwrap() - mu.mass(&both).unwrap();
        AssociationViolation {
            first: e1,
            second: e2,
            gap,
        }
    }))
}

fn to_u64s(v: &[BigInt]) -> Option<Vec<u64>> {
    v.iter().map(|x| x.to_u64()).collect()
}

fn mask_mass_u128(mask: u64, w: &[u64]) -> u128 {
    let mut m = mask;
    let mut s = 0u128;
    while m != 0 {
        s += w[m.trailing_zeros() as usize] as u128;
        m &= m - 1;
    }
    s
}

// All numerators are <= l < 2^64, so every product below fits in u128.
fn scan_pairs_u128(upsets: &[u64], l: u128, w: &[u64]) -> Option<(usize, usize)> {
    let masses: Vec<u128> = upsets.iter().map(|&u| mask_mass_u128(u, w)).collect();
    for i in 0..upsets.len() {
        for j in i..upsets.len() {
            let both = mask_mass_u128(upsets[i] & upsets[j], w);
            if both * l < masses[i] * masses[j] {
                return Some((i, j));
            }
        }
    }
    None
}

fn scan_pairs_big(upsets: &[u64], l: &BigInt, w: &[BigInt]) -> Option<(usize, usize)> {
    let mass = |mask: u64| -> BigInt {
        (0..64)
            .filter(|b| (mask >> b) & 1 == 1)
            .map(|b| &w[b])
            .sum()
    };
    let masses: Vec<BigInt> = upsets.iter().map(|&u| mass(u)).collect();
    for i in 0..upsets.len() {
        for j in i..upsets.len() {
            if mass(upsets[i] & upsets[j]) * l < &masses[i] * &masses[j] {
                return Some((i, j));
            }
        }
    }
    None
}

/// `D_0..=D_n` via `D_k = (k - 1)(D_{k-1} + D_{k-2})`.
pub fn derangements(n: usize) -> Vec<BigInt> {
    let mut d = vec![BigInt::one()];
    if n >= 1 {
        d.push(BigInt::zero());
    }
    for k in 2..=n {
        let next = BigInt::from(k - 1) * (&d[k - 1] + &d[k - 2]);
        d.push(next);
    }
    d
}

pub fn factorial(n: usize) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * k)
}

/// Law of the fixed-point set of a uniform permutation of `n` elements:
/// a point with `s` ones has weight `D_{n-s} / n!`.
pub fn fixed_point_measure(n: usize) -> Result<Measure> {
    if n == 0 {
        return Err(Error::InvalidArgument(
            "fixed-point measure needs n >= 1".into(),
        ));
    }
    check_dim(n)?;
    let d = derangements(n);
    let nf = factorial(n);
    let weights = (0..(1usize << n))
        .map(|v| Rational::new(d[n - v.count_ones() as usize].clone(), nf.clone()))
        .collect();
    Measure::new(n, weights)
}

/// Ising-type measure with multiplicative parameters:
/// `weight(v) ∝ prod_{i<j} couplings[i][j]^(v_i v_j) * prod_i fields[i]^(v_i)`.
///
/// `couplings` is symmetric with ones on the diagonal and every entry at
/// least one; `fields` are positive. Writing `couplings = e^{2J}` recovers the
/// usual ferromagnetic parametrisation.
pub fn ising_measure(couplings: &[Vec<Rational>], fields: &[Rational]) -> Result<Measure> {
    let n = fields.len();
    check_dim(n)?;
    if couplings.len() != n || couplings.iter().any(|row| row.len() != n) {
        return Err(Error::InvalidArgument(format!(
            "coupling matrix must be {n}x{n}"
        )));
    }
    for i in 0..n {
        if !couplings[i][i].is_one() {
            return Err(Error::InvalidArgument(format!(
                "coupling diagonal entry ({i},{i}) must be 1"
            )));
        }
        for j in 0..n {
            if couplings[i][j] != couplings[j][i] {
                return Err(Error::InvalidArgument(format!(
                    "coupling matrix not symmetric at ({i},{j})"
                )));
            }
            if couplings[i][j] < Rational::one() {
                return Err(Error::InvalidArgument(format!(
                    "coupling ({i},{j}) = {} is below 1",
                    couplings[i][j]
                )));
            }
        }
        if !fields[i].is_positive() {
            return Err(Error::InvalidArgument(format!(
                "field {i} = {} is not positive",
                fields[i]
            )));
        }
    }
    let weights = (0..(1usize << n))
        .map(|v| {
            let mut w = Rational::one();
            for i in 0..n {
                if (v >> i) & 1 == 0 {
                    continue;
                }
                w *= &fields[i];
                for j in (i + 1)..n {
                    if (v >> j) & 1 == 1 {
                        w *= &couplings[i][j];
                    }
                }
            }
            w
        })
        .collect();
    Measure::normalized(n, weights)
}

/// Marginal on the first `n - 1` coordinates together with the mass of the
/// face where the last coordinate is zero.
pub fn project_last(mu: &Measure) -> Result<(Measure, Rational)> {
    if mu.dim == 0 {
        return Err(Error::InvalidArgument(
            "cannot project a 0-dimensional measure".into(),
        ));
    }
    let half = 1usize << (mu.dim - 1);
    let weights: Vec<Rational> = (0..half)
        .map(|v| &mu.weights[v] + &mu.weights[v | half])
        .collect();
    let q: Rational = mu.weights[..half].iter().sum();
    Ok((Measure::new(mu.dim - 1, weights)?, q))
}

/// `mu(x_coord = 0 | x_j = prefix_j for j < coord)`. `coord` is 0-based and
/// bit `j` of `prefix` is the conditioned value of coordinate `j`.
pub fn conditional_zero_prob(mu: &Measure, coord: usize, prefix: u64) -> Result<Rational> {
    if coord >= mu.dim {
        return Err(Error::InvalidArgument(format!(
            "coordinate {coord} out of range for dimension {}",
            mu.dim
        )));
    }
    if prefix >> coord != 0 {
        return Err(Error::InvalidArgument(format!(
            "prefix {prefix:#b} has bits at or above coordinate {coord}"
        )));
    }
    let low = (1u64 << coord) - 1;
    let mut cond = Rational::zero();
    let mut zero = Rational::zero();
    for (v, w) in mu.weights.iter().enumerate() {
        if (v as u64) & low == prefix {
            cond += w;
            if (v >> coord) & 1 == 0 {
                zero += w;
            }
        }
    }
    if cond.is_zero() {
        return Err(Error::ZeroMassCondition { coord, prefix });
    }
    Ok(zero / cond)
}
