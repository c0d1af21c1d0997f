//! W-random weighted graphs `Z_n`, the injective-versus-plain density bound
//! on equal-weight targets, and empirical convergence of `t_inj(F, Z_n)`.
//!
//! Randomness comes from ChaCha8 seeded with the configured seed; replicate
//! `r` draws from stream `r`, so samples do not depend on evaluation order or
//! thread count.

use num_traits::One;
use rand::distributions::{Distribution as _, WeightedIndex};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::Multigraph;
use crate::hom::{density, t_inj};
use crate::scalar::{Rational, Scalar};
use crate::targets::{RandomWeightedGraph, StepGraphon, WeightedGraph};

/// What `Z_n` is sampled from.
#[derive(Clone, Debug, PartialEq)]
pub enum SampleTarget {
    Graphon(StepGraphon<Rational>),
    Random(RandomWeightedGraph),
}

impl SampleTarget {
    /// `t(F, target)`, the limit of `t_inj(F, Z_n)`.
    pub fn density(&self, f: &Multigraph) -> Result<Rational> {
        match self {
            Self::Graphon(w) => density(f, w),
            Self::Random(h) => density(f, h),
        }
    }

    fn node_weights(&self) -> Vec<f64> {
        match self {
            Self::Graphon(w) => w.measures().iter().map(Scalar::to_f64).collect(),
            Self::Random(h) => h.alpha().iter().map(Scalar::to_f64).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SampleConfig {
    pub seed: u64,
    pub n: usize,
    pub replicates: usize,
    pub target: SampleTarget,
}

impl SampleConfig {
    pub fn new(target: SampleTarget, n: usize, replicates: usize, seed: u64) -> Result<Self> {
        if n == 0 || replicates == 0 {
            return Err(Error::InvalidArgument("sample size and replicate count must be positive".into()));
        }
        Ok(Self {
            seed,
            n,
            replicates,
            target,
        })
    }
}

/// Generator for replicate `r`.
pub fn replicate_rng(seed: u64, r: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(r as u64);
    rng
}

/// Values of one cell and a picker, `None` for degenerate cells.
type Cell<T> = (Vec<T>, Option<WeightedIndex<f64>>);

/// Pre-converted cell data so repeated sampling avoids big-rational work.
struct Sampler<T> {
    nodes: WeightedIndex<f64>,
    cells: Vec<Vec<Cell<T>>>,
}

impl<T: Scalar> Sampler<T> {
    fn new(target: &SampleTarget, convert: impl Fn(&Rational) -> T) -> Result<Self> {
        let nodes = WeightedIndex::new(target.node_weights()).map_err(|e| Error::InvalidNodeWeight(e.to_string()))?;
        let cells = match target {
            SampleTarget::Graphon(w) => (0..w.step_count())
                .map(|i| (0..w.step_count()).map(|j| (vec![convert(w.value(i, j))], None)).collect())
                .collect(),
            SampleTarget::Random(h) => (0..h.node_count())
                .map(|i| {
                    (0..h.node_count())
                        .map(|j| {
                            let atoms = h.dist(i, j).atoms();
                            let values = atoms.iter().map(|(v, _)| convert(v)).collect();
                            let picker = (atoms.len() > 1)
                                .then(|| WeightedIndex::new(atoms.iter().map(|(_, p)| p.to_f64())).expect("probabilities are positive"));
                            (values, picker)
                        })
                        .collect()
                })
                .collect(),
        };
        Ok(Self { nodes, cells })
    }

    /// Edge weights of one sample; the diagonal is zero.
    fn draw(&self, n: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<T>> {
        let x: Vec<usize> = (0..n).map(|_| self.nodes.sample(rng)).collect();
        let mut beta = vec![vec![T::zero(); n]; n];
        for i in 0..n {
            for j in i + 1..n {
                let (values, picker) = &self.cells[x[i]][x[j]];
                let v = match picker {
                    Some(p) => values[p.sample(rng)].clone(),
                    None => values[0].clone(),
                };
                beta[i][j] = v.clone();
                beta[j][i] = v;
            }
        }
        beta
    }
}

/// Replicate `r` of `Z_n`: node weights `1/n`, edge weight `W(x_i, x_j)` (or a
/// draw from the cell distribution) for independent types `x_i`.
pub fn sample_replicate(config: &SampleConfig, r: usize) -> Result<WeightedGraph<Rational>> {
    let sampler = Sampler::new(&config.target, Rational::clone)?;
    let beta = sampler.draw(config.n, &mut replicate_rng(config.seed, r));
    let w = Rational::one() / Rational::from_integer((config.n as i64).into());
    WeightedGraph::new(vec![w; config.n], beta)
}

/// First replicate of `Z_n`.
pub fn sample_zn(config: &SampleConfig) -> Result<WeightedGraph<Rational>> {
    sample_replicate(config, 0)
}

/// `|t(F,Z) - t_inj(F,Z)|` against `2 C(m,2) d^|E(F)| / n`.
#[derive(Clone, Debug, PartialEq)]
pub struct TavolsagCheck {
    pub lhs: f64,
    pub bound: f64,
    pub pass: bool,
}

/// Checks the injective-density bound on a target with equal node weights
/// (rescaled to one) and edge weights in `[-d, d]`.
pub fn verify_tavolsag<T: Scalar>(f: &Multigraph, z: &WeightedGraph<T>, d: f64) -> Result<TavolsagCheck> {
    let n = z.node_count();
    if n == 0 || z.alpha().iter().any(|a| *a != z.alpha()[0]) {
        return Err(Error::InvalidNodeWeight("node weights must be equal".into()));
    }
    let max = z.max_abs_edge().to_f64();
    if max > d {
        return Err(Error::BoundExceeded {
            value: max.to_string(),
            bound: d.to_string(),
        });
    }
    let unit = z.with_unit_weights();
    let lhs = (density(f, &unit)? - t_inj(f, &unit)?).to_f64().abs();
    let m = f.node_count() as f64;
    let bound = m * (m - 1.0) * d.powi(f.edge_count() as i32) / n as f64;
    Ok(TavolsagCheck {
        lhs,
        bound,
        pass: lhs <= bound * (1.0 + 1e-9) + 1e-12,
    })
}

/// One row of [`convergence_experiment`].
#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceRow {
    pub n: usize,
    pub mean: f64,
    /// Unbiased sample variance over the replicates.
    pub variance: f64,
    /// `6 m^2 / n`.
    pub bound: f64,
    /// `t(F, target)`.
    pub limit: f64,
}

/// Mean and variance of `t_inj(F, Z_n)` over `replicates` samples per `n`.
pub fn convergence_experiment(
    f: &Multigraph,
    target: &SampleTarget,
    ns: &[usize],
    replicates: usize,
    seed: u64,
) -> Result<Vec<ConvergenceRow>> {
    let sampler = Sampler::new(target, Scalar::to_f64)?;
    let limit = target.density(f)?.to_f64();
    let m = f.node_count() as f64;
    ns.iter()
        .map(|&n| {
            let config = SampleConfig::new(target.clone(), n, replicates, seed)?;
            let values = (0..config.replicates)
                .into_par_iter()
                .map(|r| {
                    let beta = sampler.draw(n, &mut replicate_rng(seed, r));
                    let z = WeightedGraph::new(vec![1.0; n], beta)?;
                    t_inj(f, &z)
                })
                .collect::<Result<Vec<f64>>>()?;
            let mean = values.iter().sum::<f64>() / values.len() as f64;
            let variance = if values.len() > 1 {
                values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (values.len() - 1) as f64
            } else {
                0.0
            };
            Ok(ConvergenceRow {
                n,
                mean,
                variance,
                bound: 6.0 * m * m / n as f64,
                limit,
            })
        })
        .collect()
}

/// Fraction of nonzero off-diagonal edge weights.
pub fn edge_fraction<T: Scalar>(z: &WeightedGraph<T>) -> f64 {
    let n = z.node_count();
    if n < 2 {
        return 0.0;
    }
    let ones = (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .filter(|&(i, j)| !z.beta(i, j).is_zero())
        .count();
    ones as f64 / (n * (n - 1) / 2) as f64
}

/// Random unit-weight graph with edge weights uniform in `[-1, 1]`;
/// used for randomized bound checks.
pub fn random_signed_graph(n: usize, rng: &mut impl Rng) -> WeightedGraph<f64> {
    let mut beta = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let v = rng.gen_range(-1.0..=1.0);
            beta[i][j] = v;
            beta[j][i] = v;
        }
    }
    WeightedGraph::new(vec![1.0; n], beta).expect("unit weights are valid")
}
