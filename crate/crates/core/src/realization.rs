//! Monotone realizations: independent Bernoulli sources plus one monotone
//! Boolean function of the source bits per output coordinate.
//!
//! [`realize`] compiles a full-support FKG measure into such a witness. The
//! construction is the conditional-quantile coupling: coordinate `i` is zero
//! exactly when a uniform `Z_i` falls below `mu(x_i = 0 | x_<i)`. The finitely
//! many threshold events `{Z_i >= t}` are nested, so each coordinate needs a
//! single chain of sources whose prefix conjunctions reproduce them.

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::Point;
use crate::measure::{self, Measure};
use crate::rational::{self, Rational};

/// Exhaustive enumeration bound on the number of sources.
pub const MAX_SOURCES: usize = 24;

/// A Boolean function of `arity` bits as a dense table indexed by the
/// assignment integer.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TruthTable {
    arity: usize,
    words: Vec<u64>,
}

impl TruthTable {
    pub fn new(arity: usize) -> Result<Self> {
        if arity > MAX_SOURCES {
            return Err(Error::Capacity {
                what: "truth table arity",
                value: arity,
                limit: MAX_SOURCES,
            });
        }
        Ok(TruthTable {
            arity,
            words: vec![0; (1usize << arity).div_ceil(64)],
        })
    }

    pub fn from_fn(arity: usize, f: impl Fn(usize) -> bool) -> Result<Self> {
        let mut t = Self::new(arity)?;
        for x in 0..(1usize << arity) {
            t.set(x, f(x));
        }
        Ok(t)
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn get(&self, x: usize) -> bool {
        (self.words[x / 64] >> (x % 64)) & 1 == 1
    }

    pub fn set(&mut self, x: usize, value: bool) {
        if value {
            self.words[x / 64] |= 1 << (x % 64);
        } else {
            self.words[x / 64] &= !(1 << (x % 64));
        }
    }

    /// An assignment `x` and a source bit `s` with `f(x) = 1` but
    /// `f(x | 1 << s) = 0`, if the function is not monotone.
    pub fn monotonicity_witness(&self) -> Option<(usize, usize)> {
        for x in 0..(1usize << self.arity) {
            if !self.get(x) {
                continue;
            }
            for s in 0..self.arity {
                let y = x | (1 << s);
                if y != x && !self.get(y) {
                    return Some((x, s));
                }
            }
        }
        None
    }

    pub fn is_monotone(&self) -> bool {
        self.monotonicity_witness().is_none()
    }

    /// Character `x` is the value at assignment `x`.
    pub fn to_bit_string(&self) -> String {
        (0..(1usize << self.arity))
            .map(|x| if self.get(x) { '1' } else { '0' })
            .collect()
    }

    pub fn from_bit_string(arity: usize, s: &str) -> Result<Self> {
        if s.len() != 1usize.checked_shl(arity as u32).unwrap_or(0) {
            return Err(Error::InvalidRealization(format!(
                "table of length {} for {arity} sources",
                s.len()
            )));
        }
        let mut t = Self::new(arity)?;
        for (x, c) in s.bytes().enumerate() {
            match c {
                b'0' => {}
                b'1' => t.set(x, true),
                _ => {
                    return Err(Error::InvalidRealization(format!(
                        "bad table character {:?}",
                        c as char
                    )))
                }
            }
        }
        Ok(t)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Realization {
    sources: Vec<Rational>,
    outputs: Vec<TruthTable>,
    names: Vec<String>,
}

impl Realization {
    pub fn new(
        sources: Vec<Rational>,
        outputs: Vec<TruthTable>,
        names: Vec<String>,
    ) -> Result<Self> {
        let m = sources.len();
        if m > MAX_SOURCES {
            return Err(Error::Capacity {
                what: "source count",
                value: m,
                limit: MAX_SOURCES,
            });
        }
        if outputs.len() > measure::MAX_DIM {
            return Err(Error::Capacity {
                what: "output count",
                value: outputs.len(),
                limit: measure::MAX_DIM,
            });
        }
        for (i, p) in sources.iter().enumerate() {
            if !rational::in_unit_interval(p) {
                return Err(Error::ProbabilityOutOfRange {
                    what: format!("source {i}"),
                    value: p.to_string(),
                    range: "[0,1]",
                });
            }
        }
        if let Some(i) = outputs.iter().position(|t| t.arity() != m) {
            return Err(Error::InvalidRealization(format!(
                "output {i} has arity {} but there are {m} sources",
                outputs[i].arity()
            )));
        }
        if !names.is_empty() && names.len() != m {
            return Err(Error::InvalidRealization(format!(
                "{} names for {m} sources",
                names.len()
            )));
        }
        Ok(Realization {
            sources,
            outputs,
            names,
        })
    }

    /// Each output is its own source.
    pub fn identity(sources: Vec<Rational>) -> Result<Self> {
        let m = sources.len();
        let outputs = (0..m)
            .map(|i| TruthTable::from_fn(m, |x| (x >> i) & 1 == 1))
            .collect::<Result<Vec<_>>>()?;
        Self::new(sources, outputs, Vec::new())
    }

    pub fn sources(&self) -> &[Rational] {
        &self.sources
    }

    pub fn outputs(&self) -> &[TruthTable] {
        &self.outputs
    }

    pub fn outputs_mut(&mut self) -> &mut [TruthTable] {
        &mut self.outputs
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn to_file(&self) -> RealizationFile {
        RealizationFile {
            m: self.sources.len(),
            sources: self.sources.iter().map(rational::format).collect(),
            outputs: self
                .outputs
                .iter()
                .map(|t| TableEntry {
                    table: t.to_bit_string(),
                })
                .collect(),
            names: self.names.clone(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_file()).expect("realization serializes")
    }

    pub fn from_file(f: &RealizationFile) -> Result<Self> {
        if f.m != f.sources.len() {
            return Err(Error::InvalidRealization(format!(
                "m = {} but {} sources listed",
                f.m,
                f.sources.len()
            )));
        }
        if f.m > MAX_SOURCES {
            return Err(Error::Capacity {
                what: "source count",
                value: f.m,
                limit: MAX_SOURCES,
            });
        }
        let sources = f
            .sources
            .iter()
            .map(|s| rational::parse(s))
            .collect::<Result<Vec<_>>>()?;
        let outputs = f
            .outputs
            .iter()
            .map(|o| TruthTable::from_bit_string(f.m, &o.table))
            .collect::<Result<Vec<_>>>()?;
        Self::new(sources, outputs, f.names.clone())
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let f: RealizationFile = serde_json::from_str(s)?;
        Self::from_file(&f)
    }
}

/// On-disk form: `{"m": 3, "sources": [...], "outputs": [{"table": "0101.."}], "names": [...]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RealizationFile {
    pub m: usize,
    pub sources: Vec<String>,
    pub outputs: Vec<TableEntry>,
    #[serde(default)]
    pub names: Vec<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TableEntry {
    pub table: String,
}

/// Probability of each source assignment, indexed by assignment integer.
fn assignment_probs(sources: &[Rational]) -> Vec<Rational> {
    let mut probs = vec![Rational::one()];
    for p in sources {
        let q = Rational::one() - p;
        let mut next: Vec<Rational> = probs.iter().map(|w| w * &q).collect();
        next.extend(probs.iter().map(|w| w * p));
        probs = next;
    }
    probs
}

/// Exact law of the output vector.
pub fn pushforward(r: &Realization) -> Result<Measure> {
    let n = r.outputs.len();
    let mut weights = vec![Rational::zero(); 1 << n];
    for (x, w) in assignment_probs(&r.sources).into_iter().enumerate() {
        if w.is_zero() {
            continue;
        }
        let v = r
            .outputs
            .iter()
            .enumerate()
            .fold(0usize, |v, (i, t)| v | (t.get(x) as usize) << i);
        weights[v] += w;
    }
    Measure::new(n, weights)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RealizationCheck {
    Holds,
    /// Output `output` drops from 1 to 0 when source `bit` of `assignment`
    /// is switched on.
    NotMonotone {
        output: usize,
        assignment: usize,
        bit: usize,
    },
    LawMismatch {
        point: Point,
        expected: Rational,
        actual: Rational,
    },
}

impl RealizationCheck {
    pub fn holds(&self) -> bool {
        *self == RealizationCheck::Holds
    }
}

/// Monotonicity of every table, then exact equality of the pushforward with
/// `mu`.
pub fn verify_realization(r: &Realization, mu: &Measure) -> Result<RealizationCheck> {
    if r.outputs.len() != mu.dim() {
        return Err(Error::DimensionMismatch {
            left: r.outputs.len(),
            right: mu.dim(),
        });
    }
    for (i, t) in r.outputs.iter().enumerate() {
        if let Some((x, s)) = t.monotonicity_witness() {
            return Ok(RealizationCheck::NotMonotone {
                output: i,
                assignment: x,
                bit: s,
            });
        }
    }
    let law = pushforward(r)?;
    for (v, (got, want)) in law.weights().iter().zip(mu.weights()).enumerate() {
        if got != want {
            return Ok(RealizationCheck::LawMismatch {
                point: Point::from_index(v, mu.dim()),
                expected: want.clone(),
                actual: got.clone(),
            });
        }
    }
    Ok(RealizationCheck::Holds)
}

/// Thresholds `t(prefix) = mu(x_i = 0 | x_<i = prefix)` for one coordinate,
/// checked to be non-increasing in the prefix.
fn thresholds(mu: &Measure, coord: usize) -> Result<Vec<Rational>> {
    let t = (0..(1u64 << coord))
        .map(|prefix| measure::conditional_zero_prob(mu, coord, prefix))
        .collect::<Result<Vec<_>>>()?;
    for u in 0..t.len() {
        for j in 0..coord {
            let w = u | (1 << j);
            if w != u && t[u] < t[w] {
                return Err(Error::InvalidRealization(format!(
                    "threshold for coordinate {coord} increases from prefix {u:#b} to {w:#b}"
                )));
            }
        }
    }
    Ok(t)
}

/// Compiles a full-support FKG measure into a monotone realization whose
/// pushforward is exactly `mu`.
///
/// For coordinate `i` with distinct thresholds `t_1 < .. < t_r`, sources
/// `W_1..W_r` get success probabilities `(1 - t_j) / (1 - t_{j-1})`
/// (`t_0 = 0`), so `W_1 ∧ .. ∧ W_j` has probability `1 - t_j`. The output
/// selects the conjunction matching the threshold of the prefix already
/// produced by the earlier outputs.
pub fn realize(mu: &Measure) -> Result<Realization> {
    if let Some(v) = measure::check_fkg_property(mu) {
        return Err(Error::NotFkg { a: v.a, b: v.b });
    }
    if let Some(i) = mu.weights().iter().position(|w| w.is_zero()) {
        return Err(Error::NotFullSupport(Point::from_index(i, mu.dim())));
    }
    let n = mu.dim();

    struct Chain {
        start: usize,
        // Rank (1-based length of the chain prefix) of each prefix's threshold.
        rank_of_prefix: Vec<usize>,
    }

    let mut sources = Vec::new();
    let mut names = Vec::new();
    let mut chains = Vec::with_capacity(n);
    for coord in 0..n {
        let t = thresholds(mu, coord)?;
        let mut distinct = t.clone();
        distinct.sort();
        distinct.dedup();
        let start = sources.len();
        let mut prev = Rational::zero();
        for tj in &distinct {
            sources.push((Rational::one() - tj) / (Rational::one() - &prev));
            prev = tj.clone();
            let prefixes: Vec<String> = (0..t.len())
                .filter(|&u| &t[u] == tj)
                .map(|u| {
                    if coord == 0 {
                        "-".to_string()
                    } else {
                        Point::from_index(u, coord).to_string()
                    }
                })
                .collect();
            names.push(format!("Y({};{})", coord + 1, prefixes.join("|")));
        }
        let rank_of_prefix = t
            .iter()
            .map(|x| distinct.binary_search(x).expect("present") + 1)
            .collect();
        chains.push(Chain {
            start,
            rank_of_prefix,
        });
    }
    if sources.len() > MAX_SOURCES {
        return Err(Error::Capacity {
            what: "source count",
            value: sources.len(),
            limit: MAX_SOURCES,
        });
    }

    let m = sources.len();
    let mut outputs = (0..n)
        .map(|_| TruthTable::new(m))
        .collect::<Result<Vec<_>>>()?;
    for x in 0..(1usize << m) {
        let mut prefix = 0usize;
        for (coord, chain) in chains.iter().enumerate() {
            let len = chain.rank_of_prefix[prefix];
            let mask = ((1usize << len) - 1) << chain.start;
            let bit = x & mask == mask;
            outputs[coord].set(x, bit);
            prefix |= (bit as usize) << coord;
        }
    }
    Realization::new(sources, outputs, names)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::product_measure;
    use crate::rational::{int, ratio};

    fn ising2() -> Measure {
        Measure::new(2, vec![ratio(1, 5), ratio(1, 5), ratio(1, 5), ratio(2, 5)]).unwrap()
    }

    #[test]
    fn realize_product_is_identity() {
        let ps = vec![ratio(1, 3), ratio(3, 4), ratio(2, 5)];
        let r = realize(&product_measure(&ps).unwrap()).unwrap();
        assert_eq!(r.sources(), ps.as_slice());
        assert_eq!(r.outputs(), Realization::identity(ps).unwrap().outputs());
        assert_eq!(r.names(), &["Y(1;-)", "Y(2;0|1)", "Y(3;00|10|01|11)"]);
    }

    #[test]
    fn realize_uniform_h3() {
        let r = realize(&Measure::uniform(3).unwrap()).unwrap();
        assert_eq!(r.sources(), &[ratio(1, 2), ratio(1, 2), ratio(1, 2)]);
        assert_eq!(
            r.outputs(),
            Realization::identity(r.sources().to_vec())
                .unwrap()
                .outputs()
        );
    }

    #[test]
    fn realize_ising_two_sites() {
        let mu = ising2();
        let r = realize(&mu).unwrap();
        assert_eq!(r.sources(), &[ratio(3, 5), ratio(2, 3), ratio(3, 4)]);
        // X1 = W0, X2 = I2 ∨ (X1 ∧ I1), I1 = W1, I2 = W1 ∧ W2.
        let x1 = TruthTable::from_fn(3, |x| x & 1 == 1).unwrap();
        let x2 = TruthTable::from_fn(3, |x| {
            let (w0, w1, w2) = (x & 1 == 1, x & 2 == 2, x & 4 == 4);
            (w1 && w2) || (w0 && w1)
        })
        .unwrap();
        assert_eq!(r.outputs(), &[x1, x2]);
        assert_eq!(pushforward(&r).unwrap(), mu);
        assert!(verify_realization(&r, &mu).unwrap().holds());
    }

    #[test]
    fn realize_rejects_bad_inputs() {
        let mu3 = crate::measure::fixed_point_measure(3).unwrap();
        assert!(matches!(realize(&mu3), Err(Error::NotFkg { .. })));
        let m = product_measure(&[int(1), ratio(1, 2)]).unwrap();
        assert!(matches!(realize(&m), Err(Error::NotFullSupport(_))));
    }

    #[test]
    fn pushforward_examples() {
        let ps = vec![ratio(1, 3), ratio(1, 7)];
        let r = Realization::identity(ps.clone()).unwrap();
        assert_eq!(pushforward(&r).unwrap(), product_measure(&ps).unwrap());

        let ones = TruthTable::from_fn(2, |_| true).unwrap();
        let r = Realization::new(ps, vec![ones.clone(), ones], vec![]).unwrap();
        let top: Point = "11".parse().unwrap();
        assert_eq!(pushforward(&r).unwrap(), Measure::point_mass(top).unwrap());
    }

    #[test]
    fn verify_flags_broken_monotonicity() {
        let r = Realization::identity(vec![ratio(1, 2), ratio(1, 2)]).unwrap();
        let mu = Measure::uniform(2).unwrap();
        assert!(verify_realization(&r, &mu).unwrap().holds());
        let mut bad = r.clone();
        // Output 0 at assignment 0b11 flipped to 0.
        bad.outputs_mut()[0].set(3, false);
        assert_eq!(
            verify_realization(&bad, &mu).unwrap(),
            RealizationCheck::NotMonotone {
                output: 0,
                assignment: 1,
                bit: 1
            }
        );
    }

    #[test]
    fn verify_reports_law_mismatch() {
        let r = Realization::identity(vec![ratio(1, 2), ratio(1, 3)]).unwrap();
        match verify_realization(&r, &Measure::uniform(2).unwrap()).unwrap() {
            RealizationCheck::LawMismatch { point, .. } => assert_eq!(point.to_string(), "00"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn json_round_trip() {
        let r = realize(&ising2()).unwrap();
        let back = Realization::from_json(&r.to_json()).unwrap();
        assert_eq!(back, r);
        assert!(Realization::from_json(
            r#"{"m": 1, "sources": ["1/2"], "outputs": [{"table": "011"}]}"#
        )
        .is_err());
        assert!(Realization::from_json(
            r#"{"m": 1, "sources": ["3/2"], "outputs": [{"table": "01"}]}"#
        )
        .is_err());
    }
}
