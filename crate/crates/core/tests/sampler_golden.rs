use graph_moments::io;
use graph_moments::sampler::{sample_replicate, sample_zn, SampleConfig, SampleTarget};
use graph_moments::scalar::rat;
use graph_moments::targets::StepGraphon;

const GOLDEN: &str = include_str!("data/sampler_k2_n4.json");

fn k2_graphon() -> StepGraphon {
    StepGraphon::new(
        vec![rat(1, 2), rat(1, 2)],
        vec![vec![rat(0, 1), rat(1, 1)], vec![rat(1, 1), rat(0, 1)]],
        rat(1, 1),
    )
    .unwrap()
}

fn config() -> SampleConfig {
    SampleConfig::new(SampleTarget::Graphon(k2_graphon()), 4, 3, 42).unwrap()
}

#[test]
fn replicates_match_golden() {
    let c = config();
    let got: Vec<serde_json::Value> = (0..c.replicates)
        .map(|r| io::weighted_to_json(&sample_replicate(&c, r).unwrap()))
        .collect();
    let want: Vec<serde_json::Value> = serde_json::from_str(GOLDEN).unwrap();
    assert_eq!(got, want);
}

#[test]
fn first_replicate_is_zn() {
    let c = config();
    assert_eq!(sample_zn(&c).unwrap(), sample_replicate(&c, 0).unwrap());
}

#[test]
fn k2_samples_are_complete_bipartite() {
    // every sampled edge weight is 0 or 1 and the 1-edges form a bipartite graph
    let c = config();
    for r in 0..c.replicates {
        let z = sample_replicate(&c, r).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                for k in 0..4 {
                    let triangle = [z.beta(i, j), z.beta(j, k), z.beta(i, k)].iter().all(|b| **b == rat(1, 1));
                    assert!(!triangle);
                }
            }
        }
    }
}
