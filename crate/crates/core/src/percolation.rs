//! Independent bond percolation and the connectivity classes of three marked
//! vertices.
//!
//! With `A = (123)`, `B = (1|2|3)`, `C1 = (1|23)`, `C2 = (13|2)`, `C3 = (12|3)`
//! every `A ∪ Ci` is an increasing event in the edge indicators, so
//! `P(123) P(1|2|3) >= e2(P(1|23), P(13|2), P(12|3))`.

use std::ops::{AddAssign, Mul};

use num_bigint::{BigInt, BigUint};
use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::measure::{self, Measure};
use crate::rational::{self, Rational};
use crate::strong::{self, InequalityReport, Label, Partition};
use crate::unionfind::UnionFind;

/// Exact enumeration bound on the edge count (`2^26` subgraphs).
pub const MAX_EXACT_EDGES: usize = 26;

/// Bound for embedding the edge cube as a dense measure.
pub const MAX_EMBED_EDGES: usize = measure::MAX_DIM;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub p: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeGraph {
    vertex_count: usize,
    edges: Vec<Edge>,
}

impl EdgeGraph {
    /// Endpoints are stored as `u < v`. Survival probabilities may be 0 or 1.
    pub fn new(vertex_count: usize, edges: Vec<(usize, usize, Rational)>) -> Result<Self> {
        let mut out: Vec<Edge> = Vec::with_capacity(edges.len());
        for (i, (a, b, p)) in edges.into_iter().enumerate() {
            if a == b {
                return Err(Error::InvalidGraph(format!("edge {i} is a loop at {a}")));
            }
            if a >= vertex_count || b >= vertex_count {
                return Err(Error::InvalidGraph(format!(
                    "edge {i} ({a}, {b}) has an endpoint outside 0..{vertex_count}"
                )));
            }
            if !rational::in_unit_interval(&p) {
                return Err(Error::ProbabilityOutOfRange {
                    what: format!("edge {i}"),
                    value: p.to_string(),
                    range: "[0,1]",
                });
            }
            let (u, v) = (a.min(b), a.max(b));
            if out.iter().any(|e| e.u == u && e.v == v) {
                return Err(Error::InvalidGraph(format!("duplicate edge ({u}, {v})")));
            }
            out.push(Edge { u, v, p });
        }
        Ok(EdgeGraph {
            vertex_count,
            edges: out,
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Text form: `"n m"` then `m` lines `"u v p/q"`.
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'));
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("empty graph file".into()))?;
        let nums: Vec<&str> = header.split_whitespace().collect();
        let [n, m] = nums[..] else {
            return Err(Error::Parse(format!("bad header {header:?}")));
        };
        let n: usize = n
            .parse()
            .map_err(|_| Error::Parse(format!("bad vertex count {n:?}")))?;
        let m: usize = m
            .parse()
            .map_err(|_| Error::Parse(format!("bad edge count {m:?}")))?;
        let mut edges = Vec::with_capacity(m);
        for _ in 0..m {
            let line = lines
                .next()
                .ok_or_else(|| Error::Parse(format!("expected {m} edge lines")))?;
            let parts: Vec<&str> = line.split_whitespace().collect();
            let [u, v, p] = parts[..] else {
                return Err(Error::Parse(format!("bad edge line {line:?}")));
            };
            let u: usize = u
                .parse()
                .map_err(|_| Error::Parse(format!("bad endpoint {u:?}")))?;
            let v: usize = v
                .parse()
                .map_err(|_| Error::Parse(format!("bad endpoint {v:?}")))?;
            edges.push((u, v, rational::parse(p)?));
        }
        if let Some(extra) = lines.next() {
            return Err(Error::Parse(format!("trailing line {extra:?}")));
        }
        Self::new(n, edges)
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("{} {}\n", self.vertex_count, self.edges.len());
        for e in &self.edges {
            s.push_str(&format!("{} {} {}\n", e.u, e.v, e.p));
        }
        s
    }

    fn check_terminals(&self, t: (usize, usize, usize)) -> Result<()> {
        let (a, b, c) = t;
        if a == b || a == c || b == c {
            return Err(Error::InvalidArgument(format!(
                "terminals {a}, {b}, {c} are not distinct"
            )));
        }
        if a.max(b).max(c) >= self.vertex_count {
            return Err(Error::InvalidArgument(format!(
                "terminal out of range 0..{}",
                self.vertex_count
            )));
        }
        Ok(())
    }
}

/// Connectivity class of the three terminals.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TripleClass {
    All,
    /// 1 and 2 together, 3 apart.
    TwelveThree,
    ThirteenTwo,
    OneTwentyThree,
    Apart,
}

impl TripleClass {
    fn slot(self) -> usize {
        self as usize
    }

    /// Block in the partition `A = (123)`, `C1 = (1|23)`, `C2 = (13|2)`,
    /// `C3 = (12|3)`, `B = (1|2|3)`.
    pub fn label(self) -> Label {
        match self {
            TripleClass::All => Label::A,
            TripleClass::OneTwentyThree => Label::C(0),
            TripleClass::ThirteenTwo => Label::C(1),
            TripleClass::TwelveThree => Label::C(2),
            TripleClass::Apart => Label::B,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TriplePartitionProbs {
    #[serde(with = "rational::as_string")]
    pub p123: Rational,
    #[serde(with = "rational::as_string")]
    pub p12_3: Rational,
    #[serde(with = "rational::as_string")]
    pub p13_2: Rational,
    #[serde(with = "rational::as_string")]
    pub p1_23: Rational,
    #[serde(with = "rational::as_string")]
    pub p1_2_3: Rational,
}

impl TriplePartitionProbs {
    /// In the order `(123), (12|3), (13|2), (1|23), (1|2|3)`.
    pub fn as_array(&self) -> [&Rational; 5] {
        [
            &self.p123,
            &self.p12_3,
            &self.p13_2,
            &self.p1_23,
            &self.p1_2_3,
        ]
    }

    pub fn total(&self) -> Rational {
        self.as_array().into_iter().sum()
    }
}

pub const CLASS_NAMES: [&str; 5] = ["123", "12|3", "13|2", "1|23", "1|2|3"];

fn classify(uf: &mut UnionFind, t: (usize, usize, usize)) -> TripleClass {
    let ab = uf.same(t.0, t.1);
    let ac = uf.same(t.0, t.2);
    let bc = uf.same(t.1, t.2);
    match (ab, ac, bc) {
        (true, true, _) => TripleClass::All,
        (true, false, _) => TripleClass::TwelveThree,
        (false, true, _) => TripleClass::ThirteenTwo,
        (false, false, true) => TripleClass::OneTwentyThree,
        (false, false, false) => TripleClass::Apart,
    }
}

fn class_of_mask(
    g: &EdgeGraph,
    uf: &mut UnionFind,
    mask: u64,
    t: (usize, usize, usize),
) -> TripleClass {
    uf.reset();
    for (i, e) in g.edges.iter().enumerate() {
        if (mask >> i) & 1 == 1 {
            uf.union(e.u, e.v);
        }
    }
    classify(uf, t)
}

/// Exact class probabilities by enumerating all `2^|E|` subgraphs.
pub fn exact_triple_probs(g: &EdgeGraph, t: (usize, usize, usize)) -> Result<TriplePartitionProbs> {
    exact_triple_probs_with_workers(g, t, 1)
}

/// Splits the subgraph range into `workers` contiguous chunks; the merge is
/// in chunk order, and exact sums make the result independent of `workers`.
pub fn exact_triple_probs_with_workers(
    g: &EdgeGraph,
    t: (usize, usize, usize),
    workers: usize,
) -> Result<TriplePartitionProbs> {
    g.check_terminals(t)?;
    let m = g.edges.len();
    if m > MAX_EXACT_EDGES {
        return Err(Error::Capacity {
            what: "edge count for exact enumeration",
            value: m,
            limit: MAX_EXACT_EDGES,
        });
    }
    // Put every p_e over the common denominator of its own fraction; a
    // subgraph's weight numerator is the product of per-edge numerators and
    // the shared denominator is the product of per-edge denominators.
    let dens: Vec<BigUint> = g
        .edges
        .iter()
        .map(|e| e.p.denom().to_biguint().expect("positive"))
        .collect();
    let on: Vec<BigUint> = g
        .edges
        .iter()
        .map(|e| e.p.numer().to_biguint().expect("nonnegative"))
        .collect();
    let off: Vec<BigUint> = on.iter().zip(&dens).map(|(a, d)| d - a).collect();
    let total_den: BigUint = dens.iter().product();

    let counts: [BigUint; 5] = match total_den.to_u128() {
        Some(_) => {
            let on: Vec<u128> = on.iter().map(|x| x.to_u128().unwrap()).collect();
            let off: Vec<u128> = off.iter().map(|x| x.to_u128().unwrap()).collect();
            accumulate(g, t, &on, &off, workers).map(BigUint::from)
        }
        None => accumulate(g, t, &on, &off, workers),
    };
    let den = BigInt::from(total_den);
    let [a, b, c, d, e] = counts.map(|x| Rational::new(BigInt::from(x), den.clone()));
    Ok(TriplePartitionProbs {
        p123: a,
        p12_3: b,
        p13_2: c,
        p1_23: d,
        p1_2_3: e,
    })
}

// Subgraph weights are bounded by the product of denominators, so u128 cannot
// overflow whenever that product fits.
fn accumulate<T>(
    g: &EdgeGraph,
    t: (usize, usize, usize),
    on: &[T],
    off: &[T],
    workers: usize,
) -> [T; 5]
where
    T: Clone + Zero + One + AddAssign + Send + Sync + for<'a> Mul<&'a T, Output = T>,
{
    let total = 1u64 << g.edges.len();
    let workers = (workers.max(1) as u64).min(total);
    let chunk = total.div_ceil(workers);
    let run = |lo: u64, hi: u64| -> [T; 5] {
        let mut acc: [T; 5] = std::array::from_fn(|_| T::zero());
        let mut uf = UnionFind::new(g.vertex_count);
        for mask in lo..hi {
            let mut w = T::one();
            for i in 0..g.edges.len() {
                w = if (mask >> i) & 1 == 1 {
                    w * &on[i]
                } else {
                    w * &off[i]
                };
            }
            if w.is_zero() {
                continue;
            }
            acc[class_of_mask(g, &mut uf, mask, t).slot()] += w;
        }
        acc
    };
    if workers == 1 {
        return run(0, total);
    }
    let parts: Vec<[T; 5]> = std::thread::scope(|s| {
        let handles: Vec<_> = (0..workers)
            .map(|w| {
                let lo = w * chunk;
                let hi = ((w + 1) * chunk).min(total);
                s.spawn(move || run(lo, hi))
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("worker panicked"))
            .collect()
    });
    let mut acc: [T; 5] = std::array::from_fn(|_| T::zero());
    for part in parts {
        for (a, p) in acc.iter_mut().zip(part) {
            *a += p;
        }
    }
    acc
}

/// `P(123) P(1|2|3)` against `e2(P(12|3), P(13|2), P(1|23))`.
pub fn check_percolation_inequality(probs: &TriplePartitionProbs) -> InequalityReport {
    let lhs = &probs.p123 * &probs.p1_2_3;
    let rhs = strong::e2(&[
        probs.p12_3.clone(),
        probs.p13_2.clone(),
        probs.p1_23.clone(),
    ])
    .expect("three arguments");
    InequalityReport::new(lhs, rhs)
}

/// The product measure on edge indicators (coordinate `i` is edge `i`) and
/// the five-block partition of subgraphs by terminal connectivity.
pub fn percolation_to_partition(
    g: &EdgeGraph,
    t: (usize, usize, usize),
) -> Result<(Measure, Partition)> {
    g.check_terminals(t)?;
    let m = g.edges.len();
    if m > MAX_EMBED_EDGES {
        return Err(Error::Capacity {
            what: "edge count for the hypercube embedding",
            value: m,
            limit: MAX_EMBED_EDGES,
        });
    }
    let ps: Vec<Rational> = g.edges.iter().map(|e| e.p.clone()).collect();
    let mu = measure::product_measure(&ps)?;
    let mut uf = UnionFind::new(g.vertex_count);
    let labels = (0..(1u64 << m))
        .map(|mask| class_of_mask(g, &mut uf, mask, t).label())
        .collect();
    let p = strong::validate_partition(m, 3, labels)?;
    Ok((mu, p))
}

/// Hoeffding half-width at 99% confidence, `sqrt(ln(2 / 0.01) / (2 N))`.
pub fn hoeffding_half_width(samples: u64) -> f64 {
    ((2.0f64 / 0.01).ln() / (2.0 * samples as f64)).sqrt()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct McTripleEstimate {
    pub samples: u64,
    /// Counts in the order of [`CLASS_NAMES`].
    pub counts: [u64; 5],
    pub freqs: [f64; 5],
    pub half_width: f64,
}

impl McTripleEstimate {
    /// True when every exact probability lies within the half-width of its
    /// estimate.
    pub fn covers(&self, exact: &TriplePartitionProbs) -> bool {
        exact
            .as_array()
            .iter()
            .zip(&self.freqs)
            .all(|(e, f)| (rational::to_f64(e) - f).abs() <= self.half_width)
    }
}

/// Survival threshold `floor(p * 2^64)`; an edge survives when a uniform
/// `u64` falls below it. `p = 1` maps to `2^64` (always). The bias is at most
/// `2^-64` per edge.
pub fn survival_threshold(p: &Rational) -> u128 {
    let scaled = p * Rational::from_integer(BigInt::one() << 64);
    scaled.floor().to_integer().to_u128().expect("p in [0,1]")
}

/// Per-worker generator: ChaCha8 seeded with `seed`, stream `worker`.
pub fn worker_rng(seed: u64, worker: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(worker as u64);
    rng
}

pub(crate) fn split_samples(samples: u64, workers: usize) -> Vec<u64> {
    let w = workers.max(1) as u64;
    (0..w)
        .map(|i| samples / w + u64::from(i < samples % w))
        .collect()
}

pub fn mc_triple_probs(
    g: &EdgeGraph,
    t: (usize, usize, usize),
    samples: u64,
    seed: u64,
    workers: usize,
) -> Result<McTripleEstimate> {
    g.check_terminals(t)?;
    if samples == 0 {
        return Err(Error::InvalidArgument("samples must be at least 1".into()));
    }
    let thresholds: Vec<u128> = g.edges.iter().map(|e| survival_threshold(&e.p)).collect();
    let run = |worker: usize, n: u64| -> [u64; 5] {
        let mut rng = worker_rng(seed, worker);
        let mut uf = UnionFind::new(g.vertex_count);
        let mut counts = [0u64; 5];
        for _ in 0..n {
            uf.reset();
            for (e, &th) in g.edges.iter().zip(&thresholds) {
                if (rng.random::<u64>() as u128) < th {
                    uf.union(e.u, e.v);
                }
            }
            counts[classify(&mut uf, t).slot()] += 1;
        }
        counts
    };
    let shares = split_samples(samples, workers);
    let parts: Vec<[u64; 5]> = if shares.len() == 1 {
        vec![run(0, samples)]
    } else {
        std::thread::scope(|s| {
            let handles: Vec<_> = shares
                .iter()
                .enumerate()
                .map(|(w, &n)| s.spawn(move || run(w, n)))
                .collect();
            handles
                .into_iter()
                .map(|h| h.join().expect("worker panicked"))
                .collect()
        })
    };
    let mut counts = [0u64; 5];
    for part in parts {
        for (c, p) in counts.iter_mut().zip(part) {
            *c += p;
        }
    }
    Ok(McTripleEstimate {
        samples,
        counts,
        freqs: counts.map(|c| c as f64 / samples as f64),
        half_width: hoeffding_half_width(samples),
    })
}
