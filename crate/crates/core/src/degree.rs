//! Size of the set `S` of high-degree vertices (degree `>= n`) in a uniform
//! random graph on `2n` labelled vertices.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::percolation::{hoeffding_half_width, split_samples, worker_rng};
use crate::rational::{self, Rational};
use crate::strong::{InequalityReport, Verdict};

/// Largest `n` for the default exact run (`2^15` graphs).
pub const MAX_EXACT_N: usize = 3;
/// Largest `n` reachable with `force` (`2^28` graphs, minutes in debug builds).
pub const MAX_FORCED_N: usize = 4;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DegreeSetDistribution {
    pub n: usize,
    /// `probs[k] = P(|S| = k)` for `k = 0..=2n`.
    #[serde(with = "rational::vec_as_string")]
    pub probs: Vec<Rational>,
}

impl DegreeSetDistribution {
    pub fn new(n: usize, probs: Vec<Rational>) -> Result<Self> {
        if probs.len() != 2 * n + 1 {
            return Err(Error::InvalidArgument(format!(
                "expected {} probabilities for n = {n}, got {}",
                2 * n + 1,
                probs.len()
            )));
        }
        let total: Rational = probs.iter().sum();
        if !total.is_one() || probs.iter().any(|p| p < &Rational::zero()) {
            return Err(Error::InvalidArgument(
                "degree-set probabilities must be nonnegative and sum to 1".into(),
            ));
        }
        Ok(DegreeSetDistribution { n, probs })
    }

    pub fn total(&self) -> Rational {
        self.probs.iter().sum()
    }

    pub fn above(&self, k: usize) -> Rational {
        self.probs.iter().skip(k + 1).sum()
    }

    pub fn below(&self, k: usize) -> Rational {
        self.probs.iter().take(k).sum()
    }
}

pub fn binomial(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    (0..k).fold(BigInt::one(), |acc, i| acc * (n - i) / (i + 1))
}

/// Incidence mask of each vertex over the `C(2n, 2)` edge bits, edges in
/// lexicographic order `(0,1), (0,2), .., (2n-2, 2n-1)`.
fn incidence_masks(vertices: usize) -> Vec<u64> {
    let mut inc = vec![0u64; vertices];
    let mut e = 0;
    for a in 0..vertices {
        for b in (a + 1)..vertices {
            inc[a] |= 1 << e;
            inc[b] |= 1 << e;
            e += 1;
        }
    }
    inc
}

/// Exact distribution for `n <= 3`.
pub fn exact_degree_distribution(n: usize) -> Result<DegreeSetDistribution> {
    exact_degree_distribution_with(n, 1, false)
}

/// Walks every edge mask in integer order; `force` unlocks `n = 4`.
pub fn exact_degree_distribution_with(
    n: usize,
    workers: usize,
    force: bool,
) -> Result<DegreeSetDistribution> {
    let limit = if force { MAX_FORCED_N } else { MAX_EXACT_N };
    if n == 0 || n > limit {
        return Err(Error::Capacity {
            what: "exact degree-set n (use the Monte-Carlo variant beyond it)",
            value: n,
            limit,
        });
    }
    let vertices = 2 * n;
    let edges = vertices * (vertices - 1) / 2;
    let inc = incidence_masks(vertices);
    let total = 1u64 << edges;
    let threshold = n as u32;

    let run = |lo: u64, hi: u64| -> Vec<u64> {
        let mut hist = vec![0u64; vertices + 1];
        for mask in lo..hi {
            let s = inc
                .iter()
                .filter(|&&row| (mask & row).count_ones() >= threshold)
                .count();
            hist[s] += 1;
        }
        hist
    };
    let workers = (workers.max(1) as u64).min(total);
    let chunk = total.div_ceil(workers);
    let parts: Vec<Vec<u64>> = if workers == 1 {
        vec![run(0, total)]
    } else {
        std::thread::scope(|s| {
            let handles: Vec<_> = (0..workers)
                .map(|w| {
                    let lo = w * chunk;
                    let hi = ((w + 1) * chunk).min(total);
                    let run = &run;
                    s.spawn(move || run(lo, hi))
                })
                .collect();
            handles
                .into_iter()
                .map(|h| h.join().expect("worker panicked"))
                .collect()
        })
    };
    let mut hist = vec![0u64; vertices + 1];
    for part in parts {
        for (h, p) in hist.iter_mut().zip(part) {
            *h += p;
        }
    }
    let den = BigInt::from(total);
    let probs = hist
        .into_iter()
        .map(|c| Rational::new(BigInt::from(c), den.clone()))
        .collect();
    DegreeSetDistribution::new(n, probs)
}

/// `P(|S| > k) P(|S| < k) >= binom(C, 2) / C^2 * P(|S| = k)^2` with
/// `C = binom(2n, k)`. The report's `lhs` is the tail product, so `margin >= 0`
/// means the bound is satisfied.
pub fn check_degree_corollary(dist: &DegreeSetDistribution, k: usize) -> Result<InequalityReport> {
    let (c, pk) = corollary_inputs(dist, k)?;
    let bound = prefactor(&c) * &pk * &pk;
    Ok(InequalityReport::new(dist.above(k) * dist.below(k), bound))
}

/// Variant with `P(|S| = k)` to the first power. It is not implied by the
/// strong inequality and fails for small `n` (e.g. `n = 2`, `k = 1`).
pub fn check_degree_corollary_unsquared(
    dist: &DegreeSetDistribution,
    k: usize,
) -> Result<InequalityReport> {
    let (c, pk) = corollary_inputs(dist, k)?;
    let bound = prefactor(&c) * &pk;
    Ok(InequalityReport::new(dist.above(k) * dist.below(k), bound))
}

fn corollary_inputs(dist: &DegreeSetDistribution, k: usize) -> Result<(BigInt, Rational)> {
    if k > 2 * dist.n {
        return Err(Error::InvalidArgument(format!(
            "k = {k} outside 0..={}",
            2 * dist.n
        )));
    }
    Ok((binomial(2 * dist.n as u64, k as u64), dist.probs[k].clone()))
}

/// `(C - 1) / (2C) = binom(C, 2) / C^2`.
fn prefactor(c: &BigInt) -> Rational {
    Rational::new(c - 1, c * 2)
}

/// Prefactors `(C - 1) / (2C)` and `floor(C/2) ceil(C/2) / C^2`; the first is
/// what the strong inequality gives, the second the best pairing of the `C`
/// equal-mass blocks into two groups under the two-event inequality.
pub fn prefactor_comparison(c: u64) -> (Rational, Rational) {
    let cb = BigInt::from(c);
    let hk = Rational::new(BigInt::from(c / 2) * BigInt::from(c.div_ceil(2)), &cb * &cb);
    (prefactor(&cb), hk)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CentralBound {
    /// `P(|S| = n)^2 binom(C, 2)`.
    #[serde(with = "rational::as_string")]
    pub lhs: Rational,
    /// `P(|S| > n)^2 C^2`.
    #[serde(with = "rational::as_string")]
    pub rhs: Rational,
    pub verdict: Verdict,
    /// `C / (C + 2 sqrt(binom(C, 2)))`, display only.
    pub cap: f64,
    /// `sqrt(2) - 1`, the limit of `cap`, display only.
    pub limit: f64,
}

/// The `k = n` case in squared form, so no square root enters the verdict.
pub fn check_central_bound(dist: &DegreeSetDistribution) -> CentralBound {
    let n = dist.n;
    let c = binomial(2 * n as u64, n as u64);
    let pairs = Rational::from_integer(&c * (&c - 1) / 2);
    let pn = &dist.probs[n];
    let above = dist.above(n);
    let lhs = pn * pn * &pairs;
    let rhs = &above * &above * Rational::from_integer(&c * &c);
    let verdict = if lhs <= rhs {
        Verdict::Holds
    } else {
        Verdict::Violated
    };
    let cf = rational::to_f64(&Rational::from_integer(c));
    let cap = cf / (cf + 2.0 * (cf * (cf - 1.0) / 2.0).sqrt());
    CentralBound {
        lhs,
        rhs,
        verdict,
        cap,
        limit: 2f64.sqrt() - 1.0,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct McDegreeEstimate {
    pub n: usize,
    pub samples: u64,
    pub counts: Vec<u64>,
    pub freqs: Vec<f64>,
    pub half_width: f64,
}

impl McDegreeEstimate {
    pub fn covers(&self, exact: &DegreeSetDistribution) -> bool {
        exact
            .probs
            .iter()
            .zip(&self.freqs)
            .all(|(e, f)| (rational::to_f64(e) - f).abs() <= self.half_width)
    }
}

/// Draws each edge from a fair bit of the seeded generator, 64 edges per
/// `u64`.
pub fn mc_degree_distribution(
    n: usize,
    samples: u64,
    seed: u64,
    workers: usize,
) -> Result<McDegreeEstimate> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    if samples == 0 {
        return Err(Error::InvalidArgument("samples must be at least 1".into()));
    }
    let vertices = 2 * n;
    let run = |worker: usize, count: u64| -> Vec<u64> {
        let mut rng = worker_rng(seed, worker);
        let mut hist = vec![0u64; vertices + 1];
        let mut degree = vec![0usize; vertices];
        for _ in 0..count {
            degree.fill(0);
            let mut word = 0u64;
            let mut left = 0;
            for a in 0..vertices {
                for b in (a + 1)..vertices {
                    if left == 0 {
                        word = rng.random();
                        left = 64;
                    }
                    if word & 1 == 1 {
                        degree[a] += 1;
                        degree[b] += 1;
                    }
                    word >>= 1;
                    left -= 1;
                }
            }
            hist[degree.iter().filter(|&&d| d >= n).count()] += 1;
        }
        hist
    };
    let shares = split_samples(samples, workers);
    let parts: Vec<Vec<u64>> = if shares.len() == 1 {
        vec![run(0, samples)]
    } else {
        std::thread::scope(|s| {
            let handles: Vec<_> = shares
                .iter()
                .enumerate()
                .map(|(w, &c)| {
                    let run = &run;
                    s.spawn(move || run(w, c))
                })
                .collect();
            handles
                .into_iter()
                .map(|h| h.join().expect("worker panicked"))
                .collect()
        })
    };
    let mut counts = vec![0u64; vertices + 1];
    for part in parts {
        for (c, p) in counts.iter_mut().zip(part) {
            *c += p;
        }
    }
    Ok(McDegreeEstimate {
        n,
        samples,
        freqs: counts.iter().map(|&c| c as f64 / samples as f64).collect(),
        counts,
        half_width: hoeffding_half_width(samples),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};

    #[test]
    fn n1_distribution() {
        let d = exact_degree_distribution(1).unwrap();
        assert_eq!(d.probs, vec![ratio(1, 2), int(0), ratio(1, 2)]);
    }

    #[test]
    fn distributions_sum_to_one() {
        for n in 1..=3 {
            assert_eq!(exact_degree_distribution(n).unwrap().total(), int(1));
        }
    }

    #[test]
    fn capacity() {
        assert!(matches!(
            exact_degree_distribution(4),
            Err(Error::Capacity { limit: 3, .. })
        ));
        assert!(exact_degree_distribution_with(5, 1, true).is_err());
        assert!(exact_degree_distribution(0).is_err());
    }

    #[test]
    fn corollary_examples() {
        let d = exact_degree_distribution(1).unwrap();
        let r = check_degree_corollary(&d, 1).unwrap();
        assert_eq!(r.lhs, ratio(1, 4));
        assert_eq!(r.rhs, int(0));
        assert!(r.holds());
        for k in 0..=2 {
            let r = check_degree_corollary(&d, k).unwrap();
            assert!(r.holds());
        }
        let r = check_degree_corollary(&d, 0).unwrap();
        assert_eq!(r.rhs, int(0));
        assert!(check_degree_corollary(&d, 3).is_err());
    }

    #[test]
    fn unsquared_variant_fails_at_n2_k1() {
        let d = exact_degree_distribution(2).unwrap();
        let r = check_degree_corollary_unsquared(&d, 1).unwrap();
        assert_eq!(r.lhs, ratio(95, 1024));
        assert_eq!(r.rhs, ratio(3, 32));
        assert!(!r.holds());
        assert!(check_degree_corollary(&d, 1).unwrap().holds());
    }

    #[test]
    fn central_bound_n1() {
        let c = check_central_bound(&exact_degree_distribution(1).unwrap());
        assert_eq!(c.lhs, int(0));
        assert_eq!(c.rhs, int(1));
        assert!(c.verdict.holds());
        assert!((c.limit - 0.414213).abs() < 1e-6);
    }

    #[test]
    fn prefactors() {
        assert_eq!(prefactor_comparison(2), (ratio(1, 4), ratio(1, 4)));
        assert_eq!(prefactor_comparison(3), (ratio(1, 3), ratio(2, 9)));
        assert_eq!(prefactor_comparison(1), (int(0), int(0)));
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(6, 3), BigInt::from(20));
        assert_eq!(binomial(6, 0), BigInt::from(1));
        assert_eq!(binomial(3, 4), BigInt::from(0));
    }

    #[test]
    fn workers_agree() {
        let one = exact_degree_distribution_with(2, 1, false).unwrap();
        assert_eq!(exact_degree_distribution_with(2, 5, false).unwrap(), one);
    }

    #[test]
    fn mc_unit_vector_and_rejections() {
        let est = mc_degree_distribution(2, 1, 9, 1).unwrap();
        assert_eq!(est.counts.iter().sum::<u64>(), 1);
        assert!(mc_degree_distribution(2, 0, 9, 1).is_err());
    }

    #[test]
    fn mc_n1_close_to_half() {
        let est = mc_degree_distribution(1, 100_000, 5, 1).unwrap();
        assert!((est.freqs[0] - 0.5).abs() <= est.half_width);
    }
}
