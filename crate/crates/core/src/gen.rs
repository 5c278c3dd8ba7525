//! Seeded random inputs for the property batteries.

use rand::seq::{IndexedRandom, SliceRandom};
use rand::Rng;

use crate::error::Result;
use crate::lattice::{self, Point, PointSet};
use crate::measure::{self, Measure};
use crate::percolation::EdgeGraph;
use crate::rational::{self, Rational};
use crate::realization::{Realization, TruthTable};
use crate::strong::{self, Label, Partition};

/// Uniform `a / b` with `b` in `1..=max_den` and `a` in `0..=b`.
pub fn random_probability<R: Rng + ?Sized>(rng: &mut R, max_den: i64) -> Rational {
    let b = rng.random_range(1..=max_den);
    rational::ratio(rng.random_range(0..=b), b)
}

/// As [`random_probability`] but strictly inside `(0, 1)`.
pub fn random_open_probability<R: Rng + ?Sized>(rng: &mut R, max_den: i64) -> Rational {
    let b = rng.random_range(2..=max_den.max(2));
    rational::ratio(rng.random_range(1..b), b)
}

pub fn random_product_params<R: Rng + ?Sized>(
    rng: &mut R,
    n: usize,
    max_den: i64,
) -> Vec<Rational> {
    (0..n).map(|_| random_probability(rng, max_den)).collect()
}

pub fn random_product_measure<R: Rng + ?Sized>(
    rng: &mut R,
    n: usize,
    max_den: i64,
) -> Result<Measure> {
    measure::product_measure(&random_product_params(rng, n, max_den))
}

/// Ising-type measure with couplings in `[1, 4]` and positive fields.
pub fn random_ising_measure<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Result<Measure> {
    let one = rational::one();
    let mut b = vec![vec![one.clone(); n]; n];
    for i in 0..n {
        for j in (i + 1)..n {
            let den = rng.random_range(1..=4);
            let v = rational::ratio(rng.random_range(den..=4 * den), den);
            b[i][j] = v.clone();
            b[j][i] = v;
        }
    }
    let fields: Vec<Rational> = (0..n)
        .map(|_| {
            let den = rng.random_range(1..=5);
            rational::ratio(rng.random_range(1..=10), den)
        })
        .collect();
    measure::ising_measure(&b, &fields)
}

/// A valid partition with exactly `k` blocks `C_i`, any of which may be
/// empty.
///
/// Blocks are seeded with random points `x_i`; `A` is the up-closure of all
/// joins `x_i ∨ x_j` plus an optional extra point, so the sets
/// `up(x_i) \ A` are pairwise disjoint. Each block then may absorb one more
/// `up(y) \ A` that avoids the other blocks. Every step keeps `A ∪ C_i`
/// closed upwards.
pub fn random_partition<R: Rng + ?Sized>(rng: &mut R, n: usize, k: usize) -> Result<Partition> {
    let size = 1usize << n;
    let ups: Vec<PointSet> = (0..size)
        .map(|v| PointSet::principal_upset(Point::new(v as u32, n).expect("in range")))
        .collect();

    let seeded = rng.random_range(0..=k);
    let mut picked: Vec<usize> = Vec::with_capacity(seeded);
    for _ in 0..seeded {
        // Comparable seeds would leave one block empty; retry a few times.
        let mut x = rng.random_range(0..size);
        for _ in 0..8 {
            if picked.iter().all(|&y| x & y != x && x & y != y) {
                break;
            }
            x = rng.random_range(0..size);
        }
        picked.push(x);
    }
    let mut seeds: Vec<Option<usize>> = (0..k).map(|i| picked.get(i).copied()).collect();
    seeds.shuffle(rng);

    let mut a = PointSet::empty(n)?;
    let present: Vec<usize> = seeds.iter().flatten().copied().collect();
    for (i, &x) in present.iter().enumerate() {
        for &y in &present[i + 1..] {
            a.insert_index(x | y);
        }
    }
    if rng.random_bool(0.5) {
        a.insert_index(heavier(
            rng.random_range(0..size),
            rng.random_range(0..size),
        ));
    }
    let a = a.up_closure();

    let mut blocks: Vec<PointSet> = seeds
        .iter()
        .map(|s| match s {
            Some(x) => ups[*x].difference(&a),
            None => PointSet::empty(n),
        })
        .collect::<Result<_>>()?;
    for i in 0..k {
        if !rng.random_bool(0.5) {
            continue;
        }
        let mut others = PointSet::empty(n)?;
        for (j, b) in blocks.iter().enumerate() {
            if j != i {
                others = others.union(b)?;
            }
        }
        let candidates: Vec<usize> = (0..size)
            .filter(|&y| !a.contains_index(y) && ups[y].is_disjoint(&others))
            .collect();
        if let Some(&y) = candidates.choose(rng) {
            blocks[i] = blocks[i].union(&ups[y].difference(&a)?)?;
        }
    }

    let labels = (0..size)
        .map(|v| {
            if a.contains_index(v) {
                Label::A
            } else if let Some(i) = blocks.iter().position(|c| c.contains_index(v)) {
                Label::C(i)
            } else {
                Label::B
            }
        })
        .collect();
    strong::validate_partition(n, k, labels)
}

// Of two points, the one with more ones; keeps up-sets small so that later
// blocks still have room.
fn heavier(x: usize, y: usize) -> usize {
    if y.count_ones() > x.count_ones() {
        y
    } else {
        x
    }
}

/// A uniformly chosen monotone Boolean function of `arity <= 5` bits.
pub fn random_monotone_table<R: Rng + ?Sized>(rng: &mut R, arity: usize) -> Result<TruthTable> {
    let upsets = lattice::enumerate_upset_masks(arity)?;
    let mask = *upsets.choose(rng).expect("at least two upsets");
    TruthTable::from_fn(arity, |x| (mask >> x) & 1 == 1)
}

/// Random monotone realization with `m` sources and `n` outputs.
pub fn random_monotone_realization<R: Rng + ?Sized>(
    rng: &mut R,
    m: usize,
    n: usize,
    max_den: i64,
) -> Result<Realization> {
    let sources = random_product_params(rng, m, max_den);
    let outputs = (0..n)
        .map(|_| random_monotone_table(rng, m))
        .collect::<Result<Vec<_>>>()?;
    Realization::new(sources, outputs, Vec::new())
}

/// Random simple graph on `vertices` vertices with at most `max_edges` edges
/// and survival probabilities in `(0, 1)`.
pub fn random_graph<R: Rng + ?Sized>(
    rng: &mut R,
    vertices: usize,
    max_edges: usize,
    max_den: i64,
) -> Result<EdgeGraph> {
    let mut all: Vec<(usize, usize)> = Vec::new();
    for u in 0..vertices {
        for v in (u + 1)..vertices {
            all.push((u, v));
        }
    }
    let m = rng.random_range(0..=max_edges.min(all.len()));
    let chosen: Vec<(usize, usize)> = all.choose_multiple(rng, m).copied().collect();
    let edges = chosen
        .into_iter()
        .map(|(u, v)| (u, v, random_open_probability(rng, max_den)))
        .collect();
    EdgeGraph::new(vertices, edges)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn random_partitions_are_valid_and_varied() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut nonempty_c = 0;
        let mut three_plus = 0;
        for _ in 0..200 {
            let n = rng.random_range(1..=5);
            let k = rng.random_range(2..=5);
            let p = random_partition(&mut rng, n, k).unwrap();
            assert_eq!(p.k(), k);
            let filled = (0..k).filter(|&i| !p.block(Label::C(i)).is_empty()).count();
            nonempty_c += filled;
            three_plus += usize::from(filled >= 3);
        }
        assert!(nonempty_c > 200, "{nonempty_c}");
        assert!(three_plus > 20, "{three_plus}");
    }

    #[test]
    fn ising_measures_have_full_support() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for n in 1..=3 {
            let m = random_ising_measure(&mut rng, n).unwrap();
            assert!(m.has_full_support());
            assert!(measure::check_fkg_property(&m).is_none());
        }
    }

    #[test]
    fn monotone_tables_are_monotone() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for m in 0..=4 {
            assert!(random_monotone_table(&mut rng, m).unwrap().is_monotone());
        }
    }

    #[test]
    fn graphs_respect_bounds() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..50 {
            let g = random_graph(&mut rng, 5, 7, 9).unwrap();
            assert!(g.edges().len() <= 7);
        }
    }
}
