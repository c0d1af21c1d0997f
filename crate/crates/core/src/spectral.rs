//! Spectra of step graphons as integral operators, cycle densities,
//! kernel composition and the subdivision identity.

use nalgebra::DMatrix;

use crate::connection::c_matrix;
use crate::error::{Error, Result};
use crate::graph::{subdivide, Multigraph};
use crate::hom::{density, HomParameter};
use crate::linalg::matrix_rank;
use crate::scalar::Scalar;
use crate::targets::StepGraphon;

/// Eigenvalues below this magnitude count as zero.
pub const ZERO_EIGENVALUE: f64 = 1e-12;

/// Nonzero eigenvalues and eigenfunctions of the operator `T_W`.
#[derive(Clone, Debug)]
pub struct Spectrum {
    /// Sorted by decreasing `|lambda|`.
    pub values: Vec<f64>,
    /// `functions[k][i]` is the value of the `k`-th eigenfunction on step `i`,
    /// normalized in `L^2` of the step measure.
    pub functions: Vec<Vec<f64>>,
    pub measures: Vec<f64>,
}

/// Eigen-decomposition of `D^{1/2} B D^{1/2}`, dropping eigenvalues with
/// `|lambda| <= threshold`.
pub fn spectrum<T: Scalar>(w: &StepGraphon<T>, threshold: f64) -> Spectrum {
    let n = w.step_count();
    let mu: Vec<f64> = w.measures().iter().map(Scalar::to_f64).collect();
    let root: Vec<f64> = mu.iter().map(|m| m.sqrt()).collect();
    let s = DMatrix::from_fn(n, n, |i, j| root[i] * w.value(i, j).to_f64() * root[j]);
    let eig = s.symmetric_eigen();
    let mut pairs: Vec<(f64, Vec<f64>)> = eig
        .eigenvalues
        .iter()
        .enumerate()
        .filter(|(_, l)| l.abs() > threshold)
        .map(|(k, &l)| {
            let psi = (0..n).map(|i| eig.eigenvectors[(i, k)] / root[i]).collect();
            (l, psi)
        })
        .collect();
    pairs.sort_by(|a, b| b.0.abs().total_cmp(&a.0.abs()).then(b.0.total_cmp(&a.0)));
    let (values, functions) = pairs.into_iter().unzip();
    Spectrum {
        values,
        functions,
        measures: mu,
    }
}

/// Nonzero eigenvalues of `T_W`, decreasing in absolute value.
pub fn eigenvalues_step<T: Scalar>(w: &StepGraphon<T>) -> Vec<f64> {
    spectrum(w, ZERO_EIGENVALUE).values
}

/// `t(C_n, W) = sum_k lambda_k^n`.
pub fn cycle_density_spectral<T: Scalar>(w: &StepGraphon<T>, n: usize) -> Result<f64> {
    if n < 2 {
        return Err(Error::CycleTooShort(n));
    }
    Ok(eigenvalues_step(w).iter().map(|l| l.powi(n as i32)).sum())
}

/// `t(F, W)` from the spectral expansion `W(x,y) = sum_k lambda_k psi_k(x) psi_k(y)`.
///
/// Sums over one eigen-index per edge copy, so the cost is
/// `rank^{|E(F)|} * |V(F)| * steps`; meant for large low-rank graphons.
pub fn density_spectral(f: &Multigraph, spec: &Spectrum) -> Result<f64> {
    let r = spec.values.len();
    let copies: Vec<(usize, usize)> = f.edges().flat_map(|(u, v, m)| std::iter::repeat_n((u, v), m as usize)).collect();
    let terms = (r as u128).checked_pow(copies.len() as u32).unwrap_or(u128::MAX);
    if terms > 10_000_000 {
        return Err(Error::GuardExceeded {
            what: "spectral terms",
            value: terms,
            limit: 10_000_000,
        });
    }
    if r == 0 {
        return Ok(if copies.is_empty() { 1.0 } else { 0.0 });
    }
    let steps = spec.measures.len();
    let mut idx = vec![0usize; copies.len()];
    let mut total = 0.0;
    loop {
        let mut term: f64 = idx.iter().map(|&k| spec.values[k]).product();
        for v in 0..f.node_count() {
            if term == 0.0 {
                break;
            }
            let mut integral = 0.0;
            for i in 0..steps {
                let mut prod = spec.measures[i];
                for (e, &(a, b)) in copies.iter().enumerate() {
                    if a == v || b == v {
                        prod *= spec.functions[idx[e]][i];
                    }
                }
                integral += prod;
            }
            term *= integral;
        }
        total += term;
        let mut e = 0;
        while e < idx.len() {
            idx[e] += 1;
            if idx[e] < r {
                break;
            }
            idx[e] = 0;
            e += 1;
        }
        if e == idx.len() {
            return Ok(total);
        }
    }
}

/// Splits steps so that both graphons live on the same interval partition.
pub fn common_refinement<T: Scalar>(w1: &StepGraphon<T>, w2: &StepGraphon<T>) -> Result<(StepGraphon<T>, StepGraphon<T>)> {
    let ends = |w: &StepGraphon<T>| {
        let mut acc = T::zero();
        w.measures()
            .iter()
            .map(|m| {
                acc = acc.clone() + m.clone();
                acc.clone()
            })
            .collect::<Vec<T>>()
    };
    let (e1, e2) = (ends(w1), ends(w2));
    if !e1.last().expect("nonempty").approx_eq(e2.last().expect("nonempty"), 1e-12) {
        return Err(Error::IncompatiblePartitions("total measures differ".into()));
    }
    let mut cuts: Vec<T> = e1.iter().chain(e2.iter()).cloned().collect();
    cuts.sort_by(|a, b| a.partial_cmp(b).expect("comparable"));
    cuts.dedup_by(|a, b| a.approx_eq(b, 1e-14));
    let mut pieces = Vec::with_capacity(cuts.len());
    let mut start = T::zero();
    for c in &cuts {
        let len = c.clone() - start.clone();
        if len > T::zero() {
            let mid = (start.clone() + c.clone()) / T::from_i64(2);
            pieces.push((len, mid));
        }
        start = c.clone();
    }
    let locate = |ends: &[T], x: &T| ends.iter().position(|e| e > x).unwrap_or(ends.len() - 1);
    let build = |w: &StepGraphon<T>, ends: &[T]| {
        let idx: Vec<usize> = pieces.iter().map(|(_, mid)| locate(ends, mid)).collect();
        let values = idx.iter().map(|&i| idx.iter().map(|&j| w.value(i, j).clone()).collect()).collect();
        StepGraphon::new(pieces.iter().map(|(l, _)| l.clone()).collect(), values, w.bound().clone())
    };
    Ok((build(w1, &e1)?, build(w2, &e2)?))
}

/// `(W1 o W2)(x,y) = integral of W1(x,z) W2(z,y) dz`, refining partitions
/// first if they differ. The result must be symmetric (as for `W o W`).
pub fn compose_step<T: Scalar>(w1: &StepGraphon<T>, w2: &StepGraphon<T>) -> Result<StepGraphon<T>> {
    let (a, b) = if w1.measures() == w2.measures() {
        (w1.clone(), w2.clone())
    } else {
        common_refinement(w1, w2)?
    };
    let n = a.step_count();
    let mu = a.measures();
    let values: Vec<Vec<T>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    (0..n).fold(T::zero(), |acc, z| {
                        acc + mu[z].clone() * a.value(i, z).clone() * b.value(z, j).clone()
                    })
                })
                .collect()
        })
        .collect();
    let bound = a.bound().clone() * b.bound().clone();
    // exact symmetry can fail in floating point; symmetrize within rounding
    let values = if T::EXACT {
        values
    } else {
        (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| (values[i][j].clone() + values[j][i].clone()) / T::from_i64(2))
                    .collect()
            })
            .collect()
    };
    StepGraphon::new(mu.to_vec(), values, bound)
}

/// Both sides of `t(F', W) = t(F, W o W)` where `F'` subdivides every edge.
#[derive(Clone, Debug, PartialEq)]
pub struct SubdivisionCheck<T> {
    pub lhs: T,
    pub rhs: T,
    pub equal: bool,
}

pub fn check_subdivision<T: Scalar>(f: &Multigraph, w: &StepGraphon<T>) -> Result<SubdivisionCheck<T>> {
    let lhs = density(&subdivide(f), w)?;
    let rhs = density(f, &compose_step(w, w)?)?;
    let equal = lhs.approx_eq(&rhs, 1e-9);
    Ok(SubdivisionCheck { lhs, rhs, equal })
}

/// Eigenvalue counts against the rank of `C(t_W)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TwRankBounds {
    pub distinct_nonzero: usize,
    pub total_nonzero: usize,
    pub rank_c: usize,
}

impl TwRankBounds {
    /// `distinct_nonzero <= rank_c <= total_nonzero`.
    pub fn holds(&self) -> bool {
        self.distinct_nonzero <= self.rank_c && self.rank_c <= self.total_nonzero
    }
}

/// Nonzero-eigenvalue counts (distinct values grouped at relative tolerance
/// `1e-9`) and the rank of the `c_size x c_size` matrix `C(t_W)`.
pub fn tw_rank_bounds<T: Scalar>(w: &StepGraphon<T>, c_size: usize) -> TwRankBounds {
    let ev = eigenvalues_step(w);
    let mut distinct: Vec<f64> = Vec::new();
    for &l in &ev {
        if !distinct.iter().any(|&d| (d - l).abs() <= 1e-9 * d.abs().max(l.abs())) {
            distinct.push(l);
        }
    }
    let c = c_matrix(&HomParameter::density(w.clone()), c_size);
    TwRankBounds {
        distinct_nonzero: distinct.len(),
        total_nonzero: ev.len(),
        rank_c: matrix_rank(&c),
    }
}
