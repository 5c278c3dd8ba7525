use fkglab::lattice::{self, Point, PointSet};
use fkglab::measure::{self, Measure};
use fkglab::percolation::{self, EdgeGraph};
use fkglab::rational::{int, ratio, Rational};
use fkglab::realization::{self, RealizationCheck};
use fkglab::strong::{self, Label, Partition};
use fkglab::{degree, gen};
use num_traits::{One, Zero};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn rational_in_unit() -> impl Strategy<Value = Rational> {
    (1i64..=12).prop_flat_map(|d| (0..=d).prop_map(move |a| ratio(a, d)))
}

#[test]
fn join_meet_laws_exhaustive_up_to_four() {
    for n in 0..=4usize {
        let pts: Vec<Point> = (0..(1u32 << n))
            .map(|b| Point::new(b, n).unwrap())
            .collect();
        for &a in &pts {
            assert_eq!(a.join(a).unwrap(), a);
            assert_eq!(a.meet(a).unwrap(), a);
            for &b in &pts {
                assert_eq!(a.join(b).unwrap(), b.join(a).unwrap());
                assert_eq!(a.meet(b).unwrap(), b.meet(a).unwrap());
                assert_eq!(a.join(a.meet(b).unwrap()).unwrap(), a);
                assert_eq!(a.meet(a.join(b).unwrap()).unwrap(), a);
                assert_eq!(a.leq(b).unwrap(), a.join(b).unwrap() == b);
                for &c in &pts {
                    assert_eq!(
                        a.join(b).unwrap().join(c).unwrap(),
                        a.join(b.join(c).unwrap()).unwrap()
                    );
                    assert_eq!(
                        a.meet(b).unwrap().meet(c).unwrap(),
                        a.meet(b.meet(c).unwrap()).unwrap()
                    );
                }
            }
        }
    }
}

#[test]
fn conditional_zero_prob_is_non_increasing_for_fkg_measures() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for n in 1..=4usize {
        let mut measures = vec![
            measure::fixed_point_measure(n).unwrap(),
            Measure::uniform(n).unwrap(),
        ];
        for _ in 0..15 {
            measures.push(gen::random_ising_measure(&mut rng, n).unwrap());
        }
        for mu in measures
            .iter()
            .filter(|m| measure::check_fkg_property(m).is_none())
        {
            for coord in 0..n {
                for u in 0..(1u64 << coord) {
                    let Ok(tu) = measure::conditional_zero_prob(mu, coord, u) else {
                        continue;
                    };
                    for w in (0..(1u64 << coord)).filter(|w| w & u == u) {
                        if let Ok(tw) = measure::conditional_zero_prob(mu, coord, w) {
                            assert!(tw <= tu, "n={n} coord={coord} {u:b} <= {w:b}");
                        }
                    }
                }
            }
        }
    }
}

#[test]
fn realization_round_trip_with_chain_encoding() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..40 {
        let n = 1 + (rand::Rng::random_range(&mut rng, 0..3usize));
        let mu = gen::random_ising_measure(&mut rng, n).unwrap();
        let r = realization::realize(&mu).unwrap();
        assert_eq!(
            realization::verify_realization(&r, &mu).unwrap(),
            RealizationCheck::Holds
        );
        assert!(r.sources().len() <= n << (n - 1));

        let mut next = 0;
        for coord in 0..n {
            let mut ts: Vec<Rational> = (0..(1u64 << coord))
                .map(|u| measure::conditional_zero_prob(&mu, coord, u).unwrap())
                .collect();
            ts.sort();
            ts.dedup();
            let mut prefix_prob = Rational::one();
            for t in &ts {
                assert!(r.names()[next].starts_with(&format!("Y({};", coord + 1)));
                prefix_prob *= &r.sources()[next];
                assert_eq!(prefix_prob, int(1) - t);
                next += 1;
            }
        }
        assert_eq!(next, r.sources().len());
    }
}

#[test]
fn fui_pushforwards_satisfy_the_strong_inequality() {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let parts: Vec<Vec<Partition>> = (0..=3)
        .map(|n| strong::enumerate_partitions(n, 1 << n).unwrap())
        .collect();
    for _ in 0..40 {
        let m = rand::Rng::random_range(&mut rng, 1..=4usize);
        let n = rand::Rng::random_range(&mut rng, 1..=3usize);
        let r = gen::random_monotone_realization(&mut rng, m, n, 7).unwrap();
        let mu = realization::pushforward(&r).unwrap();
        for p in &parts[n] {
            assert!(strong::check_strong_inequality(&mu, p).unwrap().holds());
        }
    }
}

#[test]
fn moving_a_point_from_b_to_a_changes_lhs_by_the_expected_amount() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut increases = 0;
    let mut decreases = 0;
    for _ in 0..300 {
        let n = rand::Rng::random_range(&mut rng, 1..=4usize);
        let k = rand::Rng::random_range(&mut rng, 2..=4usize);
        let mu = gen::random_product_measure(&mut rng, n, 6).unwrap();
        let p = gen::random_partition(&mut rng, n, k).unwrap();
        let before = strong::check_strong_inequality(&mu, &p).unwrap();
        for x in p.block(Label::B).iter() {
            let Ok(q) = p.relabel(x, Label::A) else {
                continue;
            };
            let after = strong::check_strong_inequality(&mu, &q).unwrap();
            assert_eq!(after.rhs, before.rhs);
            let (a, b, _) = p.masses(&mu).unwrap();
            let w = mu.weight(x).clone();
            assert_eq!(&after.lhs - &before.lhs, &w * (&b - &a - &w));
            if a + &w <= b {
                assert!(after.lhs >= before.lhs);
            }
            if after.lhs > before.lhs {
                increases += 1;
            } else if after.lhs < before.lhs {
                decreases += 1;
            }
        }
    }
    assert!(increases > 0);
    // The product μ(A)μ(B) is not monotone in such moves in general.
    assert!(decreases > 0);
}

#[test]
fn percolation_p123_monotone_in_each_edge() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..40 {
        let g = gen::random_graph(&mut rng, 5, 7, 6).unwrap();
        let base = percolation::exact_triple_probs(&g, (0, 1, 2)).unwrap();
        for (i, _) in g.edges().iter().enumerate() {
            let mut es: Vec<(usize, usize, Rational)> =
                g.edges().iter().map(|e| (e.u, e.v, e.p.clone())).collect();
            es[i].2 = (&es[i].2 + int(1)) / int(2);
            let h = EdgeGraph::new(g.vertex_count(), es).unwrap();
            let up = percolation::exact_triple_probs(&h, (0, 1, 2)).unwrap();
            assert!(up.p123 >= base.p123);
        }
    }
}

#[test]
fn percolation_partition_cross_check() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for _ in 0..30 {
        let g = gen::random_graph(&mut rng, 5, 8, 6).unwrap();
        let probs = percolation::exact_triple_probs(&g, (0, 1, 2)).unwrap();
        let direct = percolation::check_percolation_inequality(&probs);
        let (mu, part) = percolation::percolation_to_partition(&g, (0, 1, 2)).unwrap();
        let via = strong::check_strong_inequality(&mu, &part).unwrap();
        assert_eq!((direct.lhs, direct.rhs), (via.lhs, via.rhs));
    }
}

#[test]
fn degree_prefactor_dominates_for_all_arising_binomials() {
    for n in 1..=3u64 {
        for k in 0..=(2 * n) {
            let c = degree::binomial(2 * n, k);
            let c: u64 = c.try_into().unwrap();
            if c >= 2 {
                let (strong_pf, hk_pf) = degree::prefactor_comparison(c);
                assert!(strong_pf >= hk_pf, "C = {c}");
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn product_measures_are_normalized_and_project(ps in prop::collection::vec(rational_in_unit(), 1..=5)) {
        let mu = measure::product_measure(&ps).unwrap();
        let total: Rational = mu.weights().iter().sum();
        prop_assert_eq!(total, int(1));
        prop_assert!(mu.weights().iter().all(|w| *w >= Rational::zero()));
        prop_assert!(mu.is_product());
        let (head, _) = measure::project_last(&mu).unwrap();
        let expected = measure::product_measure(&ps[..ps.len() - 1]).unwrap();
        prop_assert_eq!(head.weights(), expected.weights());
        prop_assert_eq!(mu.marginals(), ps);
    }

    #[test]
    fn k2_identity_on_arbitrary_measures(
        raw in prop::collection::vec(0i64..20, 8),
        upset_pick in any::<prop::sample::Index>(),
    ) {
        prop_assume!(raw.iter().any(|&x| x > 0));
        let mu = Measure::normalized(3, raw.iter().map(|&x| int(x)).collect()).unwrap();
        let ups = lattice::enumerate_upsets(3).unwrap();
        let upper = upset_pick.get(&ups);
        // A = ∅, C1 = the chosen upset, C2 = ∅, B = the rest.
        let p = Partition::from_blocks(
            &PointSet::empty(3).unwrap(),
            &upper.complement(),
            &[upper.clone(), PointSet::empty(3).unwrap()],
        ).unwrap();
        let (lhs_gap, corr_gap) = strong::k2_identity_check(&mu, &p).unwrap();
        prop_assert_eq!(lhs_gap, corr_gap);
    }

    #[test]
    fn percolation_invariant_under_reordering_and_relabeling(
        seed in any::<u64>(),
        perm_seed in any::<u64>(),
    ) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = gen::random_graph(&mut rng, 5, 7, 5).unwrap();
        let base = percolation::exact_triple_probs(&g, (0, 1, 2)).unwrap();
        prop_assert_eq!(base.total(), int(1));

        let mut prng = ChaCha8Rng::seed_from_u64(perm_seed);
        let mut perm: Vec<usize> = (0..5).collect();
        rand::seq::SliceRandom::shuffle(perm.as_mut_slice(), &mut prng);
        let mut es: Vec<(usize, usize, Rational)> = g
            .edges()
            .iter()
            .map(|e| (perm[e.v], perm[e.u], e.p.clone()))
            .collect();
        rand::seq::SliceRandom::shuffle(es.as_mut_slice(), &mut prng);
        let h = EdgeGraph::new(5, es).unwrap();
        let moved = percolation::exact_triple_probs(&h, (perm[0], perm[1], perm[2])).unwrap();
        prop_assert_eq!(moved, base);
    }
}
