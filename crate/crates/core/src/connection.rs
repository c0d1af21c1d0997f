//! Finite sections of connection matrices `M(f, k)` and the one-parameter
//! families `E`, `C`, `B`.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::{enumerate_k_labeled, family, glue_product, Family, Multigraph};
use crate::hom::GraphParameter;
use crate::linalg::{rank_exact, rank_psd_lazy, LazyRank, Matrix};
use crate::scalar::{Rational, Scalar};

/// `f(G_i G_j)` over the given `k`-labeled generators.
pub fn connection_submatrix<T: Scalar>(f: &(impl GraphParameter<T> + ?Sized), k: usize, generators: &[Multigraph]) -> Result<Matrix<T>> {
    if let Some(g) = generators.iter().find(|g| g.label_count() != k) {
        return Err(Error::LabelMismatch {
            left: k,
            right: g.label_count(),
        });
    }
    let n = generators.len();
    let rows: Vec<Vec<T>> = match f.section(k, generators) {
        Some(sec) => (0..n).into_par_iter().map(|i| (i..n).map(|j| sec.entry(i, j)).collect()).collect(),
        None => (0..n)
            .into_par_iter()
            .map(|i| {
                (i..n)
                    .map(|j| glue_product(&generators[i], &generators[j]).map(|g| f.eval(&g)))
                    .collect::<Result<Vec<T>>>()
            })
            .collect::<Result<_>>()?,
    };
    Ok(Matrix::symmetric_from_fn(n, |i, j| rows[i][j - i].clone()))
}

/// `E(f)_{ij} = f(K_2^{i+j})`, `0 <= i, j < s`.
pub fn e_matrix<T: Scalar>(f: &(impl GraphParameter<T> + ?Sized), s: usize) -> Matrix<T> {
    let vals: Vec<T> = (0..2 * s)
        .map(|m| f.eval(&family(Family::MultiEdge(m as u32)).expect("valid family")))
        .collect();
    Matrix::from_fn(s, |i, j| vals[i + j].clone())
}

/// `C(f)_{ab} = f(C_{a+b})` for path lengths `a, b` in `2..=s+1`.
pub fn c_matrix<T: Scalar>(f: &(impl GraphParameter<T> + ?Sized), s: usize) -> Matrix<T> {
    let vals: Vec<T> = (0..2 * s)
        .map(|i| f.eval(&family(Family::Cycle(i + 4)).expect("valid family")))
        .collect();
    Matrix::from_fn(s, |i, j| vals[i + j].clone())
}

/// `B(f)_{ij} = f(K_{i+j,2})`, `0 <= i, j < s`.
pub fn b_matrix<T: Scalar>(f: &(impl GraphParameter<T> + ?Sized), s: usize) -> Matrix<T> {
    let vals: Vec<T> = (0..2 * s)
        .map(|m| f.eval(&family(Family::CompleteBipartite(m, 2)).expect("valid family")))
        .collect();
    Matrix::from_fn(s, |i, j| vals[i + j].clone())
}

/// One budget level of [`estimate_dim`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DimLevel {
    pub nodes: usize,
    pub multiplicity: u32,
    pub generators: usize,
    pub rank: usize,
}

/// Ranks of growing connection-matrix sections.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DimEstimate {
    pub k: usize,
    pub levels: Vec<DimLevel>,
}

impl DimEstimate {
    /// Certified lower bound on `dim(Q_k / f)`.
    pub fn lower_bound(&self) -> usize {
        self.levels.last().map_or(0, |l| l.rank)
    }

    /// True when the last two levels agree.
    pub fn saturated(&self) -> bool {
        matches!(self.levels.as_slice(), [.., a, b] if a.rank == b.rank)
    }

    pub fn ranks(&self) -> Vec<usize> {
        self.levels.iter().map(|l| l.rank).collect()
    }
}

/// Rank of `M(f, k)` restricted to generators with at most `nodes` nodes and
/// multiplicity at most `multiplicity`, for nested budgets
/// `(min(k+s, nodes), min(1+s, multiplicity))`, `s = 0, 1, ...`.
///
/// Reflection-positive parameters use a pivoted `LDL^T` that only evaluates
/// pivot columns.
pub fn estimate_dim(f: &(impl GraphParameter<Rational> + ?Sized), k: usize, nodes: usize, multiplicity: u32) -> Result<DimEstimate> {
    if nodes < k {
        return Err(Error::TooManyLabels { labels: k, nodes });
    }
    let mut levels = Vec::new();
    let mut s = 0;
    loop {
        let n = (k + s).min(nodes);
        let m = (1 + s as u32).min(multiplicity);
        let gens = enumerate_k_labeled(k, n, m)?;
        let rank = section_rank(f, k, &gens)?;
        levels.push(DimLevel {
            nodes: n,
            multiplicity: m,
            generators: gens.len(),
            rank,
        });
        if n == nodes && m == multiplicity {
            return Ok(DimEstimate { k, levels });
        }
        s += 1;
    }
}

/// Exact rank of the section spanned by `gens`.
pub fn section_rank(f: &(impl GraphParameter<Rational> + ?Sized), k: usize, gens: &[Multigraph]) -> Result<usize> {
    if f.reflection_positive() {
        if let Some(sec) = f.section(k, gens) {
            let diag = (0..gens.len()).into_par_iter().map(|i| sec.entry(i, i)).collect();
            let lazy = rank_psd_lazy(diag, |p| (0..gens.len()).into_par_iter().map(|i| sec.entry(i, p)).collect());
            if let LazyRank::Rank(r) = lazy {
                return Ok(r);
            }
        }
    }
    Ok(rank_exact(&connection_submatrix(f, k, gens)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{labeled_multi_edge, labeled_path, labeled_theta};
    use crate::hom::{FnParameter, HomParameter, Provenance};
    use crate::linalg::psd_check;
    use crate::scalar::{int, rat};
    use crate::targets::{Distribution, RandomWeightedGraph, StepGraphon, WeightedGraph};
    use num_traits::One;

    fn half() -> HomParameter<StepGraphon> {
        HomParameter::density(StepGraphon::constant(rat(1, 2)))
    }

    fn coin() -> HomParameter<RandomWeightedGraph> {
        let d = Distribution::uniform(vec![int(0), int(1)]).unwrap();
        HomParameter::density(RandomWeightedGraph::new(vec![int(1)], vec![vec![d]]).unwrap())
    }

    #[test]
    fn constant_half_section() {
        let gens = enumerate_k_labeled(2, 2, 2).unwrap();
        let m = connection_submatrix(&half(), 2, &gens).unwrap();
        let want = Matrix::from_fn(3, |i, j| Rational::one() / int(2).powu((i + j) as u32));
        assert_eq!(m, want);
        assert_eq!(rank_exact(&m), 1);
    }

    #[test]
    fn multiplicative_parameters_have_rank_one_at_k0() {
        let gens = enumerate_k_labeled(0, 3, 2).unwrap();
        let m = connection_submatrix(&coin(), 0, &gens).unwrap();
        assert_eq!(rank_exact(&m), 1);
        assert!(psd_check(&m).unwrap().is_psd());
    }

    #[test]
    fn special_matrices() {
        let e = e_matrix(&half(), 5);
        assert_eq!(rank_exact(&e), 1);
        assert_eq!(rank_exact(&e_matrix(&coin(), 5)), 2);
        assert_eq!(*e_matrix(&coin(), 3).get(1, 2), rat(1, 2));
        let b = b_matrix(&half(), 5);
        assert_eq!(*b.get(0, 1), rat(1, 4));
        assert_eq!(*b.get(2, 2), Rational::one() / int(4).powu(4));
        assert_eq!(rank_exact(&b), 1);
        assert_eq!(*c_matrix(&half(), 2).get(0, 0), rat(1, 16));
    }

    #[test]
    fn special_matrices_are_connection_sections() {
        let h = RandomWeightedGraph::new(
            vec![rat(1, 3), rat(2, 3)],
            vec![
                vec![
                    Distribution::uniform(vec![int(0), int(1)]).unwrap(),
                    Distribution::degenerate(rat(1, 2)),
                ],
                vec![
                    Distribution::degenerate(rat(1, 2)),
                    Distribution::uniform(vec![int(-1), int(2), int(3)]).unwrap(),
                ],
            ],
        )
        .unwrap();
        let f = HomParameter::density(h);
        let s = 4;
        let gens: Vec<Multigraph> = (0..s as u32).map(labeled_multi_edge).collect();
        assert_eq!(connection_submatrix(&f, 2, &gens).unwrap(), e_matrix(&f, s));
        let gens: Vec<Multigraph> = (0..s).map(|a| labeled_theta(a, 1)).collect();
        assert_eq!(connection_submatrix(&f, 2, &gens).unwrap(), b_matrix(&f, s));
        let gens: Vec<Multigraph> = (2..s + 2).map(|a| labeled_path(a, 1).unwrap()).collect();
        assert_eq!(connection_submatrix(&f, 2, &gens).unwrap(), c_matrix(&f, s));
    }

    #[test]
    fn section_path_matches_generic_path() {
        let f = coin();
        let slow = FnParameter::new(|g: &Multigraph| GraphParameter::<Rational>::eval(&f, g), Provenance::Composite);
        let gens = enumerate_k_labeled(1, 3, 2).unwrap();
        assert_eq!(
            connection_submatrix(&f, 1, &gens).unwrap(),
            connection_submatrix(&slow, 1, &gens).unwrap()
        );
        assert!(connection_submatrix(&f, 2, &gens).is_err());
    }

    #[test]
    fn dimension_estimates() {
        let k3 = WeightedGraph::unweighted((0..3).map(|i| (0..3).map(|j| int((i != j) as i64)).collect()).collect()).unwrap();
        let est = estimate_dim(&HomParameter::hom(k3), 2, 3, 3).unwrap();
        assert_eq!(est.lower_bound(), 2);
        assert!(est.ranks().windows(2).all(|w| w[0] <= w[1]));
        let est = estimate_dim(&half(), 1, 3, 3).unwrap();
        assert_eq!(est.lower_bound(), 1);
        assert!(est.saturated());
    }

    #[test]
    fn lazy_and_full_ranks_agree() {
        let f = coin();
        let slow = FnParameter::new(|g: &Multigraph| GraphParameter::<Rational>::eval(&f, g), Provenance::Composite);
        let gens = enumerate_k_labeled(2, 3, 2).unwrap();
        assert_eq!(section_rank(&f, 2, &gens).unwrap(), section_rank(&slow, 2, &gens).unwrap());
    }
}
