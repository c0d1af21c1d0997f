//! Evaluation targets: weighted graphs, randomly weighted graphs and
//! stepfunction graphons.

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::scalar::{Rational, Scalar};

/// Weighted graph with positive node weights `alpha` and a symmetric edge
/// weight matrix `beta` (loops allowed on the diagonal).
#[derive(Clone, Debug, PartialEq)]
pub struct WeightedGraph<T = Rational> {
    alpha: Vec<T>,
    beta: Vec<T>,
}

impl<T: Scalar> WeightedGraph<T> {
    pub fn new(alpha: Vec<T>, beta: Vec<Vec<T>>) -> Result<Self> {
        let n = alpha.len();
        if beta.len() != n || beta.iter().any(|r| r.len() != n) {
            return Err(Error::Dimension(format!("beta must be {n}x{n}")));
        }
        if let Some(a) = alpha.iter().find(|a| **a <= T::zero()) {
            return Err(Error::InvalidNodeWeight(format!("{a:?} is not positive")));
        }
        for i in 0..n {
            for j in 0..i {
                if beta[i][j] != beta[j][i] {
                    return Err(Error::Asymmetric);
                }
            }
        }
        Ok(Self {
            alpha,
            beta: beta.into_iter().flatten().collect(),
        })
    }

    /// Unit node weights.
    pub fn unweighted(beta: Vec<Vec<T>>) -> Result<Self> {
        Self::new(vec![T::one(); beta.len()], beta)
    }

    pub fn node_count(&self) -> usize {
        self.alpha.len()
    }

    pub fn alpha(&self) -> &[T] {
        &self.alpha
    }

    pub fn beta(&self, i: usize, j: usize) -> &T {
        &self.beta[i * self.alpha.len() + j]
    }

    pub fn beta_rows(&self) -> Vec<Vec<T>> {
        let n = self.node_count();
        (0..n).map(|i| self.beta[i * n..(i + 1) * n].to_vec()).collect()
    }

    pub fn total_weight(&self) -> T {
        crate::scalar::sum(&self.alpha)
    }

    pub fn is_normalized(&self) -> bool {
        self.total_weight().approx_eq(&T::one(), 1e-12)
    }

    /// Node weights rescaled to sum to one.
    pub fn normalize(&self) -> Result<Self> {
        let total = self.total_weight();
        if total.is_zero() {
            return Err(Error::ZeroTotalWeight);
        }
        Ok(Self {
            alpha: self.alpha.iter().map(|a| a.clone() / total.clone()).collect(),
            beta: self.beta.clone(),
        })
    }

    /// Same edge weights with all node weights equal to one.
    pub fn with_unit_weights(&self) -> Self {
        Self {
            alpha: vec![T::one(); self.alpha.len()],
            beta: self.beta.clone(),
        }
    }

    /// Largest `|beta_ij|`.
    pub fn max_abs_edge(&self) -> T {
        self.beta
            .iter()
            .map(|b| b.abs_val())
            .fold(T::zero(), |m, b| if b > m { b } else { m })
    }

    /// The stepfunction graphon `W_H`. Requires a normalized graph.
    pub fn to_step_graphon(&self) -> Result<StepGraphon<T>> {
        if !self.is_normalized() {
            return Err(Error::NotNormalized);
        }
        let n = self.node_count();
        let mut bound = self.max_abs_edge();
        if bound.is_zero() {
            bound = T::one();
        }
        let w = StepGraphon::new(self.alpha.clone(), self.beta_rows(), bound)?;
        debug_assert_eq!(w.step_count(), n);
        Ok(w)
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> WeightedGraph<U> {
        WeightedGraph {
            alpha: self.alpha.iter().map(&f).collect(),
            beta: self.beta.iter().map(&f).collect(),
        }
    }

    pub fn to_f64(&self) -> WeightedGraph<f64> {
        self.map(|x| x.to_f64())
    }
}

/// Finite distribution stored as `(value, probability)` pairs sorted by value.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Distribution {
    atoms: Vec<(Rational, Rational)>,
}

impl Distribution {
    pub fn new(mut atoms: Vec<(Rational, Rational)>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::InvalidDistribution("no atoms".into()));
        }
        atoms.sort_by(|a, b| a.0.cmp(&b.0));
        if atoms.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(Error::InvalidDistribution("repeated value".into()));
        }
        if atoms.iter().any(|(_, p)| !p.is_positive()) {
            return Err(Error::InvalidDistribution("probabilities must be positive".into()));
        }
        let total: Rational = atoms.iter().map(|(_, p)| p.clone()).sum();
        if !total.is_one() {
            return Err(Error::InvalidDistribution(format!("probabilities sum to {total}")));
        }
        Ok(Self { atoms })
    }

    /// Point mass.
    pub fn degenerate(value: Rational) -> Self {
        Self {
            atoms: vec![(value, Rational::one())],
        }
    }

    /// Uniform distribution over distinct values.
    pub fn uniform(values: Vec<Rational>) -> Result<Self> {
        let p = Rational::new(1.into(), (values.len() as i64).into());
        Self::new(values.into_iter().map(|v| (v, p.clone())).collect())
    }

    pub fn atoms(&self) -> &[(Rational, Rational)] {
        &self.atoms
    }

    pub fn values(&self) -> impl Iterator<Item = &Rational> {
        self.atoms.iter().map(|(v, _)| v)
    }

    pub fn support_size(&self) -> usize {
        self.atoms.len()
    }

    /// `E(B^k)`.
    pub fn moment(&self, k: u32) -> Rational {
        self.atoms.iter().map(|(v, p)| p * v.powu(k)).sum()
    }

    pub fn mean(&self) -> Rational {
        self.moment(1)
    }

    pub fn max_abs(&self) -> Rational {
        self.atoms.iter().map(|(v, _)| v.abs()).max().unwrap_or_default()
    }
}

/// Graph with nonnegative node weights and independent finite-support
/// random edge weights.
#[derive(Clone, Debug, PartialEq)]
pub struct RandomWeightedGraph {
    alpha: Vec<Rational>,
    dist: Vec<Distribution>,
}

impl RandomWeightedGraph {
    pub fn new(alpha: Vec<Rational>, dist: Vec<Vec<Distribution>>) -> Result<Self> {
        let n = alpha.len();
        if dist.len() != n || dist.iter().any(|r| r.len() != n) {
            return Err(Error::Dimension(format!("dist must be {n}x{n}")));
        }
        if let Some(a) = alpha.iter().find(|a| a.is_negative()) {
            return Err(Error::InvalidNodeWeight(format!("{a} is negative")));
        }
        for i in 0..n {
            for j in 0..i {
                if dist[i][j] != dist[j][i] {
                    return Err(Error::Asymmetric);
                }
            }
        }
        Ok(Self {
            alpha,
            dist: dist.into_iter().flatten().collect(),
        })
    }

    /// Embeds an ordinary weighted graph as a randomly weighted graph with
    /// point-mass edge weights.
    pub fn from_weighted(h: &WeightedGraph<Rational>) -> Self {
        let n = h.node_count();
        let dist = (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .map(|(i, j)| Distribution::degenerate(h.beta(i, j).clone()))
            .collect();
        Self {
            alpha: h.alpha().to_vec(),
            dist,
        }
    }

    pub fn node_count(&self) -> usize {
        self.alpha.len()
    }

    pub fn alpha(&self) -> &[Rational] {
        &self.alpha
    }

    pub fn dist(&self, i: usize, j: usize) -> &Distribution {
        &self.dist[i * self.alpha.len() + j]
    }

    /// `beta_{i,j,k} = E(B_ij^k)`.
    pub fn moment(&self, i: usize, j: usize, k: u32) -> Rational {
        self.dist(i, j).moment(k)
    }

    /// `p_{i,j}`: support size of cell `(i, j)`.
    pub fn support_size(&self, i: usize, j: usize) -> usize {
        self.dist(i, j).support_size()
    }

    /// `p(H)`: largest cell support size (1 for the empty graph).
    pub fn p(&self) -> usize {
        self.dist.iter().map(|d| d.support_size()).max().unwrap_or(1)
    }

    pub fn is_proper(&self) -> bool {
        self.p() >= 2
    }

    pub fn total_weight(&self) -> Rational {
        self.alpha.iter().cloned().sum()
    }

    /// Drops zero-weight nodes and rescales the rest to sum to one.
    pub fn normalize(&self) -> Result<Self> {
        let total = self.total_weight();
        if total.is_zero() {
            return Err(Error::ZeroTotalWeight);
        }
        let keep: Vec<usize> = (0..self.node_count()).filter(|&i| !self.alpha[i].is_zero()).collect();
        let alpha = keep.iter().map(|&i| &self.alpha[i] / &total).collect();
        let dist = keep
            .iter()
            .flat_map(|&i| keep.iter().map(move |&j| (i, j)))
            .map(|(i, j)| self.dist(i, j).clone())
            .collect();
        Ok(Self { alpha, dist })
    }

    /// Each random edge weight replaced by its expectation. Zero-weight
    /// nodes are dropped since weighted graphs need positive node weights.
    pub fn expectation_graph(&self) -> Result<WeightedGraph<Rational>> {
        let keep: Vec<usize> = (0..self.node_count()).filter(|&i| !self.alpha[i].is_zero()).collect();
        let alpha = keep.iter().map(|&i| self.alpha[i].clone()).collect();
        let beta = keep
            .iter()
            .map(|&i| keep.iter().map(|&j| self.dist(i, j).mean()).collect())
            .collect();
        WeightedGraph::new(alpha, beta)
    }

    /// Largest `|value|` over all cells.
    pub fn bound(&self) -> Rational {
        self.dist.iter().map(|d| d.max_abs()).max().unwrap_or_default()
    }
}

/// Symmetric kernel constant on the cells `S_i x S_j` of an interval
/// partition of `[0,1]` with step lengths `measures`.
#[derive(Clone, Debug, PartialEq)]
pub struct StepGraphon<T = Rational> {
    measures: Vec<T>,
    values: Vec<T>,
    bound: T,
}

impl<T: Scalar> StepGraphon<T> {
    pub fn new(measures: Vec<T>, values: Vec<Vec<T>>, bound: T) -> Result<Self> {
        let n = measures.len();
        if n == 0 {
            return Err(Error::Dimension("a graphon needs at least one step".into()));
        }
        if values.len() != n || values.iter().any(|r| r.len() != n) {
            return Err(Error::Dimension(format!("values must be {n}x{n}")));
        }
        if let Some(m) = measures.iter().find(|m| **m <= T::zero()) {
            return Err(Error::InvalidNodeWeight(format!("step measure {m:?} is not positive")));
        }
        if !crate::scalar::sum(&measures).approx_eq(&T::one(), 1e-12) {
            return Err(Error::NotNormalized);
        }
        if bound <= T::zero() {
            return Err(Error::InvalidArgument("bound must be positive".into()));
        }
        for i in 0..n {
            for j in 0..n {
                if values[i][j] != values[j][i] {
                    return Err(Error::Asymmetric);
                }
                if values[i][j].abs_val() > bound {
                    return Err(Error::BoundExceeded {
                        value: format!("{:?}", values[i][j]),
                        bound: format!("{bound:?}"),
                    });
                }
            }
        }
        Ok(Self {
            measures,
            values: values.into_iter().flatten().collect(),
            bound,
        })
    }

    /// Constant graphon `c` (bound `max(|c|, 1)` when `c = 0`).
    pub fn constant(c: T) -> Self {
        let bound = if c.is_zero() { T::one() } else { c.abs_val() };
        Self {
            measures: vec![T::one()],
            values: vec![c],
            bound,
        }
    }

    /// Equal-measure steps.
    pub fn uniform_steps(values: Vec<Vec<T>>, bound: T) -> Result<Self> {
        let n = values.len();
        let m = T::one() / T::from_i64(n as i64);
        Self::new(vec![m; n], values, bound)
    }

    pub fn step_count(&self) -> usize {
        self.measures.len()
    }

    pub fn measures(&self) -> &[T] {
        &self.measures
    }

    pub fn value(&self, i: usize, j: usize) -> &T {
        &self.values[i * self.measures.len() + j]
    }

    pub fn value_rows(&self) -> Vec<Vec<T>> {
        let n = self.step_count();
        (0..n).map(|i| self.values[i * n..(i + 1) * n].to_vec()).collect()
    }

    pub fn bound(&self) -> &T {
        &self.bound
    }

    pub fn is_exact(&self) -> bool {
        T::EXACT
    }

    /// The equivalent normalized weighted graph.
    pub fn to_weighted_graph(&self) -> WeightedGraph<T> {
        WeightedGraph {
            alpha: self.measures.clone(),
            beta: self.values.clone(),
        }
    }

    /// Distinct values taken on cells (all cells have positive measure).
    pub fn distinct_values(&self) -> Vec<T> {
        let mut out: Vec<T> = Vec::new();
        for v in &self.values {
            if !out.iter().any(|w| w.approx_eq(v, 1e-12)) {
                out.push(v.clone());
            }
        }
        out
    }

    pub fn to_f64(&self) -> StepGraphon<f64> {
        StepGraphon {
            measures: self.measures.iter().map(|x| x.to_f64()).collect(),
            values: self.values.iter().map(|x| x.to_f64()).collect(),
            bound: self.bound.to_f64(),
        }
    }
}

/// Discretizes a symmetric kernel on `[0,1]^2` into `steps` equal steps,
/// sampling at cell centers.
pub fn grid_graphon(kernel: impl Fn(f64, f64) -> f64, steps: usize, bound: f64) -> Result<StepGraphon<f64>> {
    if steps == 0 {
        return Err(Error::InvalidArgument("grid needs at least one step".into()));
    }
    let centers: Vec<f64> = (0..steps).map(|i| (i as f64 + 0.5) / steps as f64).collect();
    let mut values = vec![vec![0.0; steps]; steps];
    for i in 0..steps {
        for j in 0..=i {
            let (x, y) = (centers[i], centers[j]);
            let v = kernel(x, y);
            let w = kernel(y, x);
            if !v.is_finite() || !w.is_finite() {
                return Err(Error::NonFinite { x, y });
            }
            if (v - w).abs() > 1e-12 * (1.0 + v.abs()) {
                return Err(Error::Asymmetric);
            }
            values[i][j] = v;
            values[j][i] = v;
        }
    }
    StepGraphon::uniform_steps(values, bound)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{int, rat};

    #[test]
    fn normalize_scales_node_weights() {
        let h = WeightedGraph::new(vec![int(2), int(2)], vec![vec![int(0), int(1)], vec![int(1), int(0)]]).unwrap();
        assert_eq!(h.normalize().unwrap().alpha(), &[rat(1, 2), rat(1, 2)]);
        let h = WeightedGraph::new(vec![int(1), int(3)], vec![vec![int(0); 2]; 2]).unwrap();
        let n = h.normalize().unwrap();
        assert_eq!(n.alpha(), &[rat(1, 4), rat(3, 4)]);
        assert_eq!(n.normalize().unwrap(), n);
    }

    #[test]
    fn rejects_nonpositive_or_asymmetric() {
        assert!(WeightedGraph::new(vec![int(0)], vec![vec![int(1)]]).is_err());
        assert_eq!(
            WeightedGraph::new(vec![int(1), int(1)], vec![vec![int(0), int(1)], vec![int(2), int(0)]]),
            Err(Error::Asymmetric)
        );
    }

    #[test]
    fn random_graph_all_zero_weights_cannot_normalize() {
        let h = RandomWeightedGraph::new(vec![int(0)], vec![vec![Distribution::degenerate(int(1))]]).unwrap();
        assert_eq!(h.normalize(), Err(Error::ZeroTotalWeight));
    }

    #[test]
    fn to_step_graphon_cases() {
        let single = WeightedGraph::new(vec![int(1)], vec![vec![rat(3, 7)]]).unwrap();
        let w = single.to_step_graphon().unwrap();
        assert_eq!(w.step_count(), 1);
        assert_eq!(w.value(0, 0), &rat(3, 7));
        let k2 = WeightedGraph::new(vec![rat(1, 2), rat(1, 2)], vec![vec![int(0), int(1)], vec![int(1), int(0)]]).unwrap();
        let w = k2.to_step_graphon().unwrap();
        assert_eq!(w.value_rows(), vec![vec![int(0), int(1)], vec![int(1), int(0)]]);
        assert_eq!(w.bound(), &int(1));
        let unnormalized = WeightedGraph::new(vec![int(1), int(1)], vec![vec![int(0); 2]; 2]).unwrap();
        assert_eq!(unnormalized.to_step_graphon(), Err(Error::NotNormalized));
    }

    #[test]
    fn distributions() {
        let coin = Distribution::uniform(vec![int(1), int(0)]).unwrap();
        assert_eq!(coin.atoms()[0].0, int(0));
        assert_eq!(coin.mean(), rat(1, 2));
        let sign = Distribution::uniform(vec![int(-1), int(1)]).unwrap();
        assert_eq!(sign.mean(), int(0));
        assert_eq!(sign.moment(2), int(1));
        assert!(Distribution::new(vec![(int(0), rat(1, 2))]).is_err());
        assert!(Distribution::new(vec![(int(0), rat(1, 2)), (int(0), rat(1, 2))]).is_err());
    }

    #[test]
    fn expectation_graph_cases() {
        let coin = Distribution::uniform(vec![int(0), int(1)]).unwrap();
        let h = RandomWeightedGraph::new(vec![int(1)], vec![vec![coin]]).unwrap();
        assert_eq!(h.expectation_graph().unwrap().beta(0, 0), &rat(1, 2));
        assert_eq!(h.p(), 2);
        assert!(h.is_proper());
        let w = WeightedGraph::new(vec![int(1), rat(1, 3)], vec![vec![int(2), rat(-1, 2)], vec![rat(-1, 2), int(0)]]).unwrap();
        let r = RandomWeightedGraph::from_weighted(&w);
        assert!(!r.is_proper());
        assert_eq!(r.expectation_graph().unwrap(), w);
    }

    #[test]
    fn grid_of_constant_kernel() {
        let w = grid_graphon(|_, _| 0.5, 7, 1.0).unwrap();
        assert!(w.distinct_values().len() == 1);
        assert!(grid_graphon(|_, _| f64::NAN, 2, 1.0).is_err());
        assert!(matches!(grid_graphon(|_, _| f64::INFINITY, 3, 1.0), Err(Error::NonFinite { .. })));
        assert_eq!(grid_graphon(|x, y| x - y * 2.0, 3, 5.0), Err(Error::Asymmetric));
    }
}
