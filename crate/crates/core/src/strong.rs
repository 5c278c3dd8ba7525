//! Block partitions `{0,1}^n = A ⊔ C_1 ⊔ .. ⊔ C_k ⊔ B` with every `A ∪ C_i`
//! closed upwards, and the inequality
//!
//! ```text
//! mu(A) mu(B) >= e2(mu(C_1), .., mu(C_k))
//! ```
//!
//! which holds for product measures and, more generally, for measures that
//! are laws of monotone functions of independent bits.

use std::fmt;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{self, Point, PointSet};
use crate::measure::{self, Measure};
use crate::rational::{self, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Label {
    A,
    B,
    /// `C(i)` is block `C_{i+1}`.
    C(usize),
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::A => f.write_str("A"),
            Label::B => f.write_str("B"),
            Label::C(i) => write!(f, "C{}", i + 1),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    dim: usize,
    k: usize,
    labels: Vec<Label>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Holds,
    Violated,
}

impl Verdict {
    pub fn holds(self) -> bool {
        self == Verdict::Holds
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Holds => "holds",
            Verdict::Violated => "violated",
        })
    }
}

/// Exact comparison `lhs >= rhs`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InequalityReport {
    #[serde(with = "rational::as_string")]
    pub lhs: Rational,
    #[serde(with = "rational::as_string")]
    pub rhs: Rational,
    pub verdict: Verdict,
    #[serde(with = "rational::as_string")]
    pub margin: Rational,
}

impl InequalityReport {
    pub fn new(lhs: Rational, rhs: Rational) -> Self {
        let margin = &lhs - &rhs;
        let verdict = if margin.is_negative() {
            Verdict::Violated
        } else {
            Verdict::Holds
        };
        InequalityReport {
            lhs,
            rhs,
            verdict,
            margin,
        }
    }

    pub fn holds(&self) -> bool {
        self.verdict.holds()
    }
}

/// Second elementary symmetric polynomial, `((Σx)^2 - Σx^2) / 2`.
pub fn e2(x: &[Rational]) -> Result<Rational> {
    if x.len() < 2 {
        return Err(Error::InvalidArgument(format!(
            "e2 needs at least two arguments, got {}",
            x.len()
        )));
    }
    let s: Rational = x.iter().sum();
    let sq: Rational = x.iter().map(|v| v * v).sum();
    Ok((&s * &s - sq) / Rational::from_integer(2.into()))
}

/// Checks the labelling and builds the partition. Every `A ∪ C_i` must be an
/// upset; an offending block is reported with a covering pair that leaves it.
pub fn validate_partition(n: usize, k: usize, labels: Vec<Label>) -> Result<Partition> {
    if n > measure::MAX_DIM {
        return Err(Error::Capacity {
            what: "partition dimension",
            value: n,
            limit: measure::MAX_DIM,
        });
    }
    if k < 2 {
        return Err(Error::InvalidPartition(format!("k = {k}, need k >= 2")));
    }
    if labels.len() != 1 << n {
        return Err(Error::InvalidPartition(format!(
            "{} labels for {} points",
            labels.len(),
            1usize << n
        )));
    }
    if let Some((v, &l)) = labels
        .iter()
        .enumerate()
        .find(|(_, l)| matches!(l, Label::C(i) if *i >= k))
    {
        return Err(Error::InvalidPartition(format!(
            "point {} labelled {l} but k = {k}",
            Point::from_index(v, n)
        )));
    }
    let p = Partition { dim: n, k, labels };
    for i in 0..k {
        let upper = p.upper_set(i);
        if let Some((below, above)) = upper.upset_witness() {
            return Err(Error::NotUpset {
                block: i + 1,
                below,
                above,
            });
        }
    }
    // Consequences of the above for k >= 2; kept as a consistency check.
    let a = p.block(Label::A);
    let b = p.block(Label::B);
    if !a.is_upset() || !b.is_downset() {
        return Err(Error::InvalidPartition(
            "A is not an upset or B is not a downset".into(),
        ));
    }
    Ok(p)
}

impl Partition {
    /// Builds from explicit blocks; they must be disjoint and cover the cube.
    pub fn from_blocks(a: &PointSet, b: &PointSet, cs: &[PointSet]) -> Result<Partition> {
        let n = a.dim();
        let mut labels: Vec<Option<Label>> = vec![None; a.len_table()];
        let blocks = std::iter::once((Label::A, a))
            .chain(std::iter::once((Label::B, b)))
            .chain(cs.iter().enumerate().map(|(i, c)| (Label::C(i), c)));
        for (label, set) in blocks {
            if set.dim() != n {
                return Err(Error::DimensionMismatch {
                    left: n,
                    right: set.dim(),
                });
            }
            for v in set.iter_indices() {
                if let Some(prev) = labels[v].replace(label) {
                    return Err(Error::InvalidPartition(format!(
                        "point {} is in both {prev} and {label}",
                        Point::from_index(v, n)
                    )));
                }
            }
        }
        let labels = labels
            .into_iter()
            .enumerate()
            .map(|(v, l)| {
                l.ok_or_else(|| {
                    Error::InvalidPartition(format!(
                        "point {} has no block",
                        Point::from_index(v, n)
                    ))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        validate_partition(n, cs.len(), labels)
    }

    /// Labels each point by the `k + 1` block membership `f(v)`.
    pub fn from_fn(n: usize, k: usize, f: impl Fn(usize) -> Label) -> Result<Partition> {
        validate_partition(n, k, (0..(1usize << n)).map(f).collect())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    pub fn label(&self, p: Point) -> Label {
        self.labels[p.index()]
    }

    pub fn block(&self, label: Label) -> PointSet {
        let mut s = PointSet::empty(self.dim).expect("dimension checked");
        for (v, &l) in self.labels.iter().enumerate() {
            if l == label {
                s.insert_index(v);
            }
        }
        s
    }

    /// `A ∪ C_{i+1}`.
    pub fn upper_set(&self, i: usize) -> PointSet {
        let mut s = PointSet::empty(self.dim).expect("dimension checked");
        for (v, &l) in self.labels.iter().enumerate() {
            if l == Label::A || l == Label::C(i) {
                s.insert_index(v);
            }
        }
        s
    }

    /// Block masses `(mu(A), mu(B), [mu(C_i)])`.
    pub fn masses(&self, mu: &Measure) -> Result<(Rational, Rational, Vec<Rational>)> {
        if mu.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                left: mu.dim(),
                right: self.dim,
            });
        }
        let mut a = Rational::zero();
        let mut b = Rational::zero();
        let mut c = vec![Rational::zero(); self.k];
        for (w, l) in mu.weights().iter().zip(&self.labels) {
            match l {
                Label::A => a += w,
                Label::B => b += w,
                Label::C(i) => c[*i] += w,
            }
        }
        Ok((a, b, c))
    }

    /// Moves one point to another block, revalidating.
    pub fn relabel(&self, p: Point, label: Label) -> Result<Partition> {
        let mut labels = self.labels.clone();
        labels[p.index()] = label;
        validate_partition(self.dim, self.k, labels)
    }

    pub fn to_file(&self) -> PartitionFile {
        PartitionFile {
            n: self.dim,
            k: self.k,
            a: self.block(Label::A).to_strings(),
            b: self.block(Label::B).to_strings(),
            c: (0..self.k)
                .map(|i| self.block(Label::C(i)).to_strings())
                .collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_file()).expect("partition serializes")
    }

    pub fn from_file(f: &PartitionFile) -> Result<Partition> {
        if f.c.len() != f.k {
            return Err(Error::InvalidPartition(format!(
                "k = {} but {} C blocks given",
                f.k,
                f.c.len()
            )));
        }
        if f.n > measure::MAX_DIM {
            return Err(Error::Capacity {
                what: "partition dimension",
                value: f.n,
                limit: measure::MAX_DIM,
            });
        }
        let a = PointSet::from_strings(f.n, &f.a)?;
        let b = PointSet::from_strings(f.n, &f.b)?;
        let cs =
            f.c.iter()
                .map(|c| PointSet::from_strings(f.n, c))
                .collect::<Result<Vec<_>>>()?;
        Partition::from_blocks(&a, &b, &cs)
    }

    pub fn from_json(s: &str) -> Result<Partition> {
        let f: PartitionFile = serde_json::from_str(s)?;
        Self::from_file(&f)
    }
}

/// On-disk form: `{"n": 3, "k": 3, "A": [...], "B": [...], "C": [[...], ...]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PartitionFile {
    pub n: usize,
    pub k: usize,
    #[serde(rename = "A")]
    pub a: Vec<String>,
    #[serde(rename = "B")]
    pub b: Vec<String>,
    #[serde(rename = "C")]
    pub c: Vec<Vec<String>>,
}

/// Evaluates both sides for any measure; no hypothesis on `mu` is checked.
pub fn check_strong_inequality(mu: &Measure, p: &Partition) -> Result<InequalityReport> {
    let (a, b, c) = p.masses(mu)?;
    Ok(InequalityReport::new(a * b, e2(&c)?))
}

/// For `k = 2` returns `(mu(A)mu(B) - mu(C1)mu(C2), mu(E1 ∩ E2) - mu(E1)mu(E2))`
/// with `E_i = A ∪ C_i`. The two agree for every probability measure.
pub fn k2_identity_check(mu: &Measure, p: &Partition) -> Result<(Rational, Rational)> {
    if p.k != 2 {
        return Err(Error::InvalidArgument(format!(
            "k2 identity needs k = 2, got {}",
            p.k
        )));
    }
    let (a, b, c) = p.masses(mu)?;
    let lhs_gap = &a * &b - &c[0] * &c[1];
    let e1 = p.upper_set(0);
    let e2 = p.upper_set(1);
    let both = mu.mass(&e1.intersection(&e2)?)?;
    let corr_gap = both - mu.mass(&e1)? * mu.mass(&e2)?;
    Ok((lhs_gap, corr_gap))
}

/// Masses of the fiber classes of `{0,1}^{n-1}` obtained by pairing each
/// point `v` (last coordinate 0) with `v↑` (last coordinate 1).
///
/// | `(v, v↑)`   | class  |
/// |-------------|--------|
/// | `(A, A)`    | `a0`   |
/// | `(B, B)`    | `b0`   |
/// | `(Ci, A)`   | `c_plus[i]` |
/// | `(Ci, Ci)`  | `c_circ[i]` |
/// | `(B, Ci)`   | `c_minus[i]` |
/// | `(B, A)`    | `d`    |
///
/// Class masses are taken under the projection of `mu` that forgets the last
/// coordinate. `mass_*` are the block masses under `mu` itself.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InductionTrace {
    #[serde(with = "rational::as_string")]
    pub a0: Rational,
    #[serde(with = "rational::as_string")]
    pub b0: Rational,
    #[serde(with = "rational::as_string")]
    pub d: Rational,
    #[serde(with = "rational::vec_as_string")]
    pub c_plus: Vec<Rational>,
    #[serde(with = "rational::vec_as_string")]
    pub c_circ: Vec<Rational>,
    #[serde(with = "rational::vec_as_string")]
    pub c_minus: Vec<Rational>,
    /// Mass of the face where the last coordinate is 0.
    #[serde(with = "rational::as_string")]
    pub q: Rational,
    #[serde(with = "rational::as_string")]
    pub mass_a: Rational,
    #[serde(with = "rational::as_string")]
    pub mass_b: Rational,
    #[serde(with = "rational::vec_as_string")]
    pub mass_c: Vec<Rational>,
}

pub fn induction_trace(mu: &Measure, p: &Partition) -> Result<InductionTrace> {
    if mu.dim() != p.dim {
        return Err(Error::DimensionMismatch {
            left: mu.dim(),
            right: p.dim,
        });
    }
    if mu.dim() == 0 {
        return Err(Error::InvalidArgument(
            "induction trace needs n >= 1".into(),
        ));
    }
    if !mu.is_product() {
        return Err(Error::NotProduct);
    }
    let (proj, q) = measure::project_last(mu)?;
    let k = p.k;
    let half = 1usize << (p.dim - 1);
    let mut t = InductionTrace {
        a0: Rational::zero(),
        b0: Rational::zero(),
        d: Rational::zero(),
        c_plus: vec![Rational::zero(); k],
        c_circ: vec![Rational::zero(); k],
        c_minus: vec![Rational::zero(); k],
        q,
        mass_a: Rational::zero(),
        mass_b: Rational::zero(),
        mass_c: Vec::new(),
    };
    for v in 0..half {
        let w = proj.weight_at(v);
        let slot = match (p.labels[v], p.labels[v | half]) {
            (Label::A, Label::A) => &mut t.a0,
            (Label::B, Label::B) => &mut t.b0,
            (Label::B, Label::A) => &mut t.d,
            (Label::C(i), Label::A) => &mut t.c_plus[i],
            (Label::C(i), Label::C(j)) if i == j => &mut t.c_circ[i],
            (Label::B, Label::C(i)) => &mut t.c_minus[i],
            (lo, hi) => {
                return Err(Error::IllegalFiber {
                    point: Point::from_index(v, p.dim),
                    lower: lo.to_string(),
                    upper: hi.to_string(),
                })
            }
        };
        *slot += w;
    }
    let (a, b, c) = p.masses(mu)?;
    t.mass_a = a;
    t.mass_b = b;
    t.mass_c = c;
    Ok(t)
}

/// Which face mass plays the role of the interpolation parameter in the
/// recomposition identities.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FaceOrientation {
    /// Parameter is `1 - q`, the mass of the face where the last coordinate is 1.
    UpperFace,
    /// Parameter is `q`.
    LowerFace,
    /// Both choices satisfy the identities (e.g. `q = 1/2`).
    Either,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Obligation {
    /// Entries nonnegative and summing to one.
    TraceMass,
    /// `(a0 + d + Σc+) b0 >= e2(c° + c-)`.
    HypothesisUpper,
    /// `a0 (b0 + d + Σc-) >= e2(c° + c+)`.
    HypothesisLower,
    /// `-(d + Σc+)(d + Σc-) <= e2(c- - c+)`.
    QuadraticCoefficient,
    /// Block masses are the affine-in-parameter combinations of the entries.
    Recomposition,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StepCheck {
    pub failed: Option<Obligation>,
    pub orientation: Option<FaceOrientation>,
}

impl StepCheck {
    pub fn holds(&self) -> bool {
        self.failed.is_none()
    }
}

fn recomposes(t: &InductionTrace, param: &Rational) -> bool {
    let one_minus = Rational::from_integer(1.into()) - param;
    let sum_plus: Rational = t.c_plus.iter().sum();
    let sum_minus: Rational = t.c_minus.iter().sum();
    let a = &t.a0 + param * (&t.d + &sum_plus);
    let b = &t.b0 + &one_minus * (&t.d + &sum_minus);
    a == t.mass_a
        && b == t.mass_b
        && t.mass_c.len() == t.c_circ.len()
        && (0..t.c_circ.len()).all(|i| {
            &t.c_circ[i] + param * &t.c_minus[i] + &one_minus * &t.c_plus[i] == t.mass_c[i]
        })
}

/// Checks the obligations of one induction step. Fails on the first one that
/// does not hold; the orientation is reported whenever recomposition is
/// reached.
pub fn verify_induction_step(t: &InductionTrace) -> StepCheck {
    let fail = |o| StepCheck {
        failed: Some(o),
        orientation: None,
    };
    let k = t.c_plus.len();
    if k < 2 || t.c_circ.len() != k || t.c_minus.len() != k {
        return fail(Obligation::TraceMass);
    }
    let entries = || {
        [&t.a0, &t.b0, &t.d]
            .into_iter()
            .chain(&t.c_plus)
            .chain(&t.c_circ)
            .chain(&t.c_minus)
    };
    let total: Rational = entries().sum();
    if entries().any(|x| x.is_negative()) || total != Rational::from_integer(1.into()) {
        return fail(Obligation::TraceMass);
    }

    let sum_plus: Rational = t.c_plus.iter().sum();
    let sum_minus: Rational = t.c_minus.iter().sum();
    let zip = |x: &[Rational], y: &[Rational], f: fn(&Rational, &Rational) -> Rational| {
        x.iter().zip(y).map(|(a, b)| f(a, b)).collect::<Vec<_>>()
    };
    let e = |x: Vec<Rational>| e2(&x).expect("k >= 2");

    let upper = (&t.a0 + &t.d + &sum_plus) * &t.b0;
    if upper < e(zip(&t.c_circ, &t.c_minus, |a, b| a + b)) {
        return fail(Obligation::HypothesisUpper);
    }
    let lower = &t.a0 * (&t.b0 + &t.d + &sum_minus);
    if lower < e(zip(&t.c_circ, &t.c_plus, |a, b| a + b)) {
        return fail(Obligation::HypothesisLower);
    }
    let lead = -((&t.d + &sum_plus) * (&t.d + &sum_minus));
    if lead > e(zip(&t.c_minus, &t.c_plus, |a, b| a - b)) {
        return fail(Obligation::QuadraticCoefficient);
    }

    let upper_face = Rational::from_integer(1.into()) - &t.q;
    let orientation = match (recomposes(t, &upper_face), recomposes(t, &t.q)) {
        (true, true) => FaceOrientation::Either,
        (true, false) => FaceOrientation::UpperFace,
        (false, true) => FaceOrientation::LowerFace,
        (false, false) => return fail(Obligation::Recomposition),
    };
    StepCheck {
        failed: None,
        orientation: Some(orientation),
    }
}

/// Every valid partition of `{0,1}^n` up to reordering of the `C` blocks and
/// padding with empty ones: `A` ranges over all upsets, and the nonempty
/// blocks `C_i = V_i \ A` over all families of at most `max_blocks` upsets
/// `V_i ⊋ A` with pairwise intersection exactly `A`. Families with fewer than
/// two blocks are padded to `k = 2`.
pub fn enumerate_partitions(n: usize, max_blocks: usize) -> Result<Vec<Partition>> {
    if n > 4 {
        return Err(Error::Capacity {
            what: "partition enumeration dimension",
            value: n,
            limit: 4,
        });
    }
    let upsets = lattice::enumerate_upset_masks(n)?;
    let mut out = Vec::new();
    for &a in &upsets {
        // Nonempty increments above A.
        let increments: Vec<u64> = upsets
            .iter()
            .filter(|&&v| v & a == a && v != a)
            .map(|&v| v & !a)
            .collect();
        let mut chosen = Vec::new();
        collect_families(&increments, 0, 0, max_blocks, &mut chosen, &mut |cs| {
            let k = cs.len().max(2);
            let labels = (0..(1usize << n))
                .map(|v| {
                    if (a >> v) & 1 == 1 {
                        Label::A
                    } else if let Some(i) = cs.iter().position(|c| (c >> v) & 1 == 1) {
                        Label::C(i)
                    } else {
                        Label::B
                    }
                })
                .collect();
            out.push(validate_partition(n, k, labels).expect("construction is valid"));
        });
    }
    Ok(out)
}

fn collect_families(
    incs: &[u64],
    start: usize,
    used: u64,
    max: usize,
    chosen: &mut Vec<u64>,
    emit: &mut dyn FnMut(&[u64]),
) {
    emit(chosen);
    if chosen.len() == max {
        return;
    }
    for i in start..incs.len() {
        if incs[i] & used == 0 {
            chosen.push(incs[i]);
            collect_families(incs, i + 1, used | incs[i], max, chosen, emit);
            chosen.pop();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::{fixed_point_measure, product_measure};
    use crate::rational::{int, ratio};

    fn set(n: usize, pts: &[&str]) -> PointSet {
        PointSet::from_strings(n, pts).unwrap()
    }

    fn mu3_partition() -> Partition {
        Partition::from_blocks(
            &set(3, &["110", "101", "011", "111"]),
            &set(3, &["000"]),
            &[set(3, &["100"]), set(3, &["010"]), set(3, &["001"])],
        )
        .unwrap()
    }

    fn rank2() -> Partition {
        Partition::from_blocks(
            &set(2, &["11"]),
            &set(2, &["00"]),
            &[set(2, &["10"]), set(2, &["01"])],
        )
        .unwrap()
    }

    #[test]
    fn e2_examples() {
        let s = ratio(1, 6);
        assert_eq!(e2(&[s.clone(), s.clone(), s]).unwrap(), ratio(1, 12));
        assert_eq!(e2(&[ratio(2, 3), ratio(5, 7)]).unwrap(), ratio(10, 21));
        assert_eq!(
            e2(&[ratio(1, 2), ratio(1, 3), ratio(1, 4)]).unwrap(),
            ratio(3, 8)
        );
        assert!(e2(&[int(1)]).is_err());
    }

    #[test]
    fn partition_validation() {
        assert_eq!(mu3_partition().k(), 3);
        assert_eq!(rank2().k(), 2);
        let err = Partition::from_blocks(
            &set(2, &["11"]),
            &set(2, &["10"]),
            &[set(2, &["00"]), set(2, &["01"])],
        )
        .unwrap_err();
        match err {
            Error::NotUpset { block, below, .. } => {
                assert_eq!(block, 1);
                assert_eq!(below.to_string(), "00");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn partition_rejects_malformed_labellings() {
        assert!(validate_partition(1, 1, vec![Label::B, Label::A]).is_err());
        assert!(validate_partition(1, 2, vec![Label::B]).is_err());
        assert!(validate_partition(1, 2, vec![Label::B, Label::C(2)]).is_err());
        // Overlap and gaps.
        assert!(Partition::from_blocks(
            &set(1, &["1"]),
            &set(1, &["1", "0"]),
            &[set(1, &[]), set(1, &[])]
        )
        .is_err());
        assert!(
            Partition::from_blocks(&set(1, &["1"]), &set(1, &[]), &[set(1, &[]), set(1, &[])])
                .is_err()
        );
    }

    #[test]
    fn mu3_counterexample() {
        let r =
            check_strong_inequality(&fixed_point_measure(3).unwrap(), &mu3_partition()).unwrap();
        assert_eq!(r.lhs, ratio(1, 18));
        assert_eq!(r.rhs, ratio(1, 12));
        assert_eq!(r.verdict, Verdict::Violated);
        assert_eq!(r.margin, ratio(-1, 36));
    }

    #[test]
    fn uniform_examples() {
        let r = check_strong_inequality(&Measure::uniform(2).unwrap(), &rank2()).unwrap();
        assert_eq!((r.lhs.clone(), r.rhs.clone()), (ratio(1, 16), ratio(1, 16)));
        assert!(r.holds());
        let r = check_strong_inequality(&Measure::uniform(3).unwrap(), &mu3_partition()).unwrap();
        assert_eq!((r.lhs.clone(), r.rhs.clone()), (ratio(1, 16), ratio(3, 64)));
        assert!(r.holds());
        assert!(check_strong_inequality(&Measure::uniform(2).unwrap(), &mu3_partition()).is_err());
    }

    #[test]
    fn k2_identity_examples() {
        let (x, y) = k2_identity_check(&Measure::uniform(2).unwrap(), &rank2()).unwrap();
        assert_eq!((x, y), (int(0), int(0)));
        let m = product_measure(&[ratio(1, 3), ratio(1, 4)]).unwrap();
        let (x, y) = k2_identity_check(&m, &rank2()).unwrap();
        assert_eq!(x, y);
        assert!(k2_identity_check(&m, &mu3_partition()).is_err());
    }

    #[test]
    fn trace_on_uniform_h3() {
        let t = induction_trace(&Measure::uniform(3).unwrap(), &mu3_partition()).unwrap();
        // Fibers over the first two coordinates: 00 -> (B, C3), 10 -> (C1, A),
        // 01 -> (C2, A), 11 -> (A, A).
        assert_eq!(t.c_minus, vec![int(0), int(0), ratio(1, 4)]);
        assert_eq!(t.c_plus, vec![ratio(1, 4), ratio(1, 4), int(0)]);
        assert_eq!(t.a0, ratio(1, 4));
        assert_eq!(t.b0, int(0));
        assert_eq!(t.d, int(0));
        assert_eq!(t.q, ratio(1, 2));
        let check = verify_induction_step(&t);
        assert!(check.holds());
        assert_eq!(check.orientation, Some(FaceOrientation::Either));
    }

    #[test]
    fn trace_on_h1() {
        let p = validate_partition(1, 2, vec![Label::B, Label::A]).unwrap();
        let t = induction_trace(&Measure::uniform(1).unwrap(), &p).unwrap();
        assert_eq!(
            (t.a0.clone(), t.b0.clone(), t.d.clone()),
            (int(0), int(0), int(1))
        );
        assert!(verify_induction_step(&t).holds());
    }

    #[test]
    fn trace_orientation_is_upper_face() {
        let m = product_measure(&[ratio(1, 3), ratio(1, 5)]).unwrap();
        let t = induction_trace(&m, &rank2()).unwrap();
        let check = verify_induction_step(&t);
        assert!(check.holds());
        assert_eq!(check.orientation, Some(FaceOrientation::UpperFace));
    }

    #[test]
    fn trace_rejects_non_product() {
        let m = fixed_point_measure(3).unwrap();
        assert!(matches!(
            induction_trace(&m, &mu3_partition()),
            Err(Error::NotProduct)
        ));
    }

    #[test]
    fn degenerate_trace_quadratic_is_zero_vs_zero() {
        let t = InductionTrace {
            a0: ratio(1, 2),
            b0: ratio(1, 4),
            d: int(0),
            c_plus: vec![int(0), int(0)],
            c_circ: vec![ratio(1, 8), ratio(1, 8)],
            c_minus: vec![int(0), int(0)],
            q: ratio(1, 2),
            mass_a: ratio(1, 2),
            mass_b: ratio(1, 4),
            mass_c: vec![ratio(1, 8), ratio(1, 8)],
        };
        let check = verify_induction_step(&t);
        assert!(check.holds(), "{check:?}");
    }

    #[test]
    fn tampered_trace_fails_recomposition() {
        let m = product_measure(&[ratio(1, 3), ratio(1, 5)]).unwrap();
        let mut t = induction_trace(&m, &rank2()).unwrap();
        t.mass_a += ratio(1, 100);
        assert_eq!(
            verify_induction_step(&t).failed,
            Some(Obligation::Recomposition)
        );
        t.a0 += ratio(1, 100);
        assert_eq!(
            verify_induction_step(&t).failed,
            Some(Obligation::TraceMass)
        );
    }

    #[test]
    fn enumerated_partition_counts_are_stable() {
        // H_1: A ∈ {∅, {1}, H1}; families of increments.
        let ps = enumerate_partitions(1, 4).unwrap();
        assert!(ps.iter().all(|p| p.k() >= 2));
        assert_eq!(ps.len(), enumerate_partitions(1, 8).unwrap().len());
        assert!(enumerate_partitions(5, 2).is_err());
    }

    #[test]
    fn json_round_trip() {
        let p = mu3_partition();
        assert_eq!(Partition::from_json(&p.to_json()).unwrap(), p);
        let text = r#"{"n": 2, "k": 2, "A": ["11"], "B": ["10"], "C": [["00"], ["01"]]}"#;
        assert!(matches!(
            Partition::from_json(text),
            Err(Error::NotUpset { block: 1, .. })
        ));
    }
}
