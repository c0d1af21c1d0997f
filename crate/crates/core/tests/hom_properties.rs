use graph_moments::graph::{glue_product, Multigraph};
use graph_moments::hom::{density, hom, hom_brute, inj, inj_brute, t_inj, t_rw};
use graph_moments::scalar::{rat, Rational};
use graph_moments::targets::{Distribution, RandomWeightedGraph, WeightedGraph};
use num_traits::Zero;
use proptest::prelude::*;

fn arb_graph(max_nodes: usize, max_mult: u32) -> impl Strategy<Value = Multigraph> {
    (1..=max_nodes).prop_flat_map(move |n| {
        let pairs = n * (n - 1) / 2;
        prop::collection::vec(0..=max_mult, pairs).prop_map(move |mults| {
            let mut edges = Vec::new();
            let mut it = mults.into_iter();
            for v in 0..n {
                for u in 0..v {
                    let m = it.next().unwrap();
                    if m > 0 {
                        edges.push((u, v, m));
                    }
                }
            }
            Multigraph::from_edges(n, 0, &edges).unwrap()
        })
    })
}

fn arb_weighted(max_nodes: usize) -> impl Strategy<Value = WeightedGraph> {
    (1..=max_nodes).prop_flat_map(|q| {
        (prop::collection::vec(1i64..=4, q), prop::collection::vec(-3i64..=3, q * q)).prop_map(move |(alpha, raw)| {
            let beta = (0..q)
                .map(|i| (0..q).map(|j| rat(raw[i.min(j) * q + i.max(j)], 2)).collect())
                .collect();
            WeightedGraph::new(alpha.into_iter().map(|a| rat(a, 3)).collect(), beta).unwrap()
        })
    })
}

fn arb_random(max_nodes: usize) -> impl Strategy<Value = RandomWeightedGraph> {
    (1..=max_nodes).prop_flat_map(|q| {
        let cell = prop::collection::btree_map(-3i64..=3, 1i64..=3, 1..=3);
        (prop::collection::vec(1i64..=3, q), prop::collection::vec(cell, q * q)).prop_map(move |(alpha, cells)| {
            let dist = (0..q)
                .map(|i| {
                    (0..q)
                        .map(|j| {
                            let c = &cells[i.min(j) * q + i.max(j)];
                            let total: i64 = c.values().sum();
                            Distribution::new(c.iter().map(|(&x, &w)| (rat(x, 1), rat(w, total))).collect()).unwrap()
                        })
                        .collect()
                })
                .collect();
            RandomWeightedGraph::new(alpha.into_iter().map(|a| rat(a, 1)).collect(), dist).unwrap()
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn elimination_matches_enumeration(f in arb_graph(5, 3), h in arb_weighted(3)) {
        prop_assert_eq!(hom::<Rational, _>(&f, &h), hom_brute::<Rational, _>(&f, &h));
        prop_assert_eq!(inj::<Rational, _>(&f, &h), inj_brute::<Rational, _>(&f, &h));
    }

    #[test]
    fn relabeling_invariance(f in arb_graph(5, 2), h in arb_weighted(3), rot in 0usize..5) {
        let n = f.node_count();
        let perm: Vec<usize> = (0..n).map(|i| (i + rot) % n).collect();
        let g = f.permuted(&perm).unwrap();
        prop_assert_eq!(hom::<Rational, _>(&f, &h), hom::<Rational, _>(&g, &h));
    }

    #[test]
    fn disjoint_union_multiplies(f in arb_graph(3, 2), g in arb_graph(3, 2), h in arb_weighted(3)) {
        let u = graph_moments::graph::disjoint_union(&f, &g);
        prop_assert_eq!(hom::<Rational, _>(&u, &h), hom::<Rational, _>(&f, &h) * hom::<Rational, _>(&g, &h));
    }

    #[test]
    fn degenerate_random_target_is_its_expectation(f in arb_graph(4, 3), h in arb_weighted(3)) {
        let r = RandomWeightedGraph::from_weighted(&h);
        prop_assert_eq!(t_rw(&f, &r).unwrap(), density(&f, &h).unwrap());
    }

    #[test]
    fn random_target_moments_enter_per_edge(f in arb_graph(4, 3), h in arb_random(2)) {
        // the glued square of F reads the moment of order 2m on every edge
        let labeled = f.with_labels(f.node_count()).unwrap();
        let sq = glue_product(&labeled, &labeled).unwrap().unlabeled();
        let mut doubled = Vec::new();
        for (u, v, m) in f.edges() {
            doubled.push((u, v, 2 * m));
        }
        let d = Multigraph::from_edges(f.node_count(), 0, &doubled).unwrap();
        prop_assert_eq!(t_rw(&sq, &h).unwrap(), t_rw(&d, &h).unwrap());
    }

    #[test]
    fn injective_density_is_zero_beyond_target_size(f in arb_graph(5, 1), h in arb_weighted(2)) {
        if f.node_count() > h.node_count() {
            prop_assert!(t_inj::<Rational, _>(&f, &h).unwrap().is_zero());
        }
    }
}
