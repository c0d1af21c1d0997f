use graph_moments::graph::{enumerate_k_labeled, Multigraph};
use graph_moments::hom::QuantumGraph;
use graph_moments::io::{self, Target};
use graph_moments::linalg::Matrix;
use graph_moments::moments::{Domain, MomentSequence};
use graph_moments::scalar::{rat, Rational};
use graph_moments::targets::{Distribution, RandomWeightedGraph, StepGraphon, WeightedGraph};
use proptest::prelude::*;

fn reparse(v: &serde_json::Value) -> serde_json::Value {
    io::parse(&serde_json::to_string(v).unwrap()).unwrap()
}

fn arb_rational() -> impl Strategy<Value = Rational> {
    (-50i64..50, 1i64..12).prop_map(|(n, d)| rat(n, d))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn weighted_graph(q in 1usize..4, vals in prop::collection::vec(arb_rational(), 16), alpha in prop::collection::vec(1i64..9, 4)) {
        let beta: Vec<Vec<Rational>> = (0..q).map(|i| (0..q).map(|j| vals[i.min(j) * 4 + i.max(j)].clone()).collect()).collect();
        let h = WeightedGraph::new(alpha[..q].iter().map(|&a| rat(a, 2)).collect(), beta).unwrap();
        let back: WeightedGraph = io::weighted_from_json(&reparse(&io::weighted_to_json(&h))).unwrap();
        prop_assert_eq!(&back, &h);
        prop_assert_eq!(Target::from_json(&io::weighted_to_json(&h)).unwrap(), Target::Weighted(h));
    }

    #[test]
    fn matrix(vals in prop::collection::vec(arb_rational(), 9)) {
        let m = Matrix::from_rows(vals.chunks(3).map(<[Rational]>::to_vec).collect()).unwrap();
        let back: Matrix<Rational> = io::matrix_from_json(&reparse(&io::matrix_to_json(&m))).unwrap();
        prop_assert_eq!(back, m);
    }

    #[test]
    fn float_matrix(vals in prop::collection::vec(-1e6f64..1e6, 4)) {
        let m = Matrix::from_rows(vals.chunks(2).map(<[f64]>::to_vec).collect()).unwrap();
        let back: Matrix<f64> = io::matrix_from_json(&reparse(&io::matrix_to_json(&m))).unwrap();
        prop_assert_eq!(back, m);
    }

    #[test]
    fn moment_sequence(vals in prop::collection::vec(arb_rational(), 1..8), d in 1i64..5, unit in any::<bool>()) {
        let domain = if unit { Domain::Unit } else { Domain::Symmetric(rat(d, 1)) };
        let s = MomentSequence::new(vals, domain).unwrap();
        prop_assert_eq!(io::moments_from_json(&reparse(&io::moments_to_json(&s))).unwrap(), s);
    }
}

#[test]
fn graphs_roundtrip() {
    for g in enumerate_k_labeled(1, 4, 2).unwrap() {
        let back = io::graph_from_json(&reparse(&io::graph_to_json(&g))).unwrap();
        assert_eq!(back, g);
    }
}

#[test]
fn random_target_and_graphon_roundtrip() {
    let coin = Distribution::uniform(vec![rat(0, 1), rat(1, 1)]).unwrap();
    let skew = Distribution::new(vec![(rat(-1, 2), rat(1, 3)), (rat(2, 1), rat(2, 3))]).unwrap();
    let h = RandomWeightedGraph::new(vec![rat(1, 3), rat(2, 3)], vec![vec![coin.clone(), skew.clone()], vec![skew, coin]]).unwrap();
    let v = io::random_to_json(&h);
    assert_eq!(io::random_from_json(&reparse(&v)).unwrap(), h);
    assert_eq!(Target::from_json(&v).unwrap().to_json(), v);

    let w = StepGraphon::new(
        vec![rat(1, 4), rat(3, 4)],
        vec![vec![rat(1, 2), rat(1, 5)], vec![rat(1, 5), rat(0, 1)]],
        rat(1, 1),
    )
    .unwrap();
    let v = io::graphon_to_json(&w);
    assert_eq!(io::graphon_from_json::<Rational>(&reparse(&v)).unwrap(), w);
}

#[test]
fn quantum_graph_roundtrip() {
    let edge = Multigraph::from_edges(2, 2, &[(0, 1, 1)]).unwrap();
    let path = Multigraph::from_edges(3, 2, &[(0, 2, 1), (2, 1, 1)]).unwrap();
    let mut p = QuantumGraph::new(2);
    p.add_term(rat(1, 2), &edge).unwrap();
    p.add_term(rat(-3, 1), &path).unwrap();
    let back = io::quantum_from_json(&reparse(&io::quantum_to_json(&p))).unwrap();
    assert_eq!(io::quantum_to_json(&back), io::quantum_to_json(&p));
}

#[test]
fn malformed_inputs_are_errors() {
    for text in [
        r#"{"nodes": 2, "edges": [[0, 0, 1]]}"#,
        r#"{"nodes": 2, "edges": [[0, 5, 1]]}"#,
        r#"{"edges": []}"#,
    ] {
        assert!(io::graph_from_json(&io::parse(text).unwrap()).is_err(), "{text}");
    }
    assert!(io::parse("{").is_err());
    assert!(Target::from_json(&io::parse(r#"{"kind": "mystery"}"#).unwrap()).is_err());
    assert!(io::weighted_from_json::<Rational>(&io::parse(r#"{"alpha": [1], "beta": [["1/0"]]}"#).unwrap()).is_err());
}
