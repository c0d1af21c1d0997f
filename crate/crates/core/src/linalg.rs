//! Dense square matrices, exact rank and positive-semidefiniteness
//! certificates.
//!
//! Certification works over [`Rational`] only. Float helpers exist for
//! advisory checks (numerical rank, eigenvalues).

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::scalar::{Rational, Scalar};

/// Dense square matrix in row-major order.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix<T> {
    n: usize,
    data: Vec<T>,
}

/// Exact rational matrix, the carrier of all certified rank and PSD claims.
pub type ExactMatrix = Matrix<Rational>;

impl<T: Scalar> Matrix<T> {
    pub fn from_rows(rows: Vec<Vec<T>>) -> Result<Self> {
        let n = rows.len();
        if let Some(r) = rows.iter().find(|r| r.len() != n) {
            return Err(Error::Dimension(format!("row of length {} in a {n}x{n} matrix", r.len())));
        }
        Ok(Self {
            n,
            data: rows.into_iter().flatten().collect(),
        })
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(f(i, j));
            }
        }
        Self { n, data }
    }

    /// Symmetric matrix from a function evaluated on the upper triangle only.
    pub fn symmetric_from_fn(n: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = vec![T::zero(); n * n];
        for i in 0..n {
            for j in i..n {
                let x = f(i, j);
                data[j * n + i] = x.clone();
                data[i * n + j] = x;
            }
        }
        Self { n, data }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, |i, j| if i == j { T::one() } else { T::zero() })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &T {
        &self.data[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn rows(&self) -> Vec<Vec<T>> {
        (0..self.n).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.n).all(|i| (0..i).all(|j| self.get(i, j) == self.get(j, i)))
    }

    /// Principal submatrix on `idx`.
    pub fn principal(&self, idx: &[usize]) -> Self {
        Self::from_fn(idx.len(), |i, j| self.get(idx[i], idx[j]).clone())
    }

    /// `v^T M v`.
    pub fn quadratic_form(&self, v: &[T]) -> T {
        let mut acc = T::zero();
        for i in 0..self.n {
            if v[i].is_zero() {
                continue;
            }
            let mut row = T::zero();
            for j in 0..self.n {
                if !v[j].is_zero() {
                    row = row + self.get(i, j).clone() * v[j].clone();
                }
            }
            acc = acc + v[i].clone() * row;
        }
        acc
    }

    pub fn to_f64(&self) -> Matrix<f64> {
        Matrix {
            n: self.n,
            data: self.data.iter().map(Scalar::to_f64).collect(),
        }
    }

    pub fn to_nalgebra(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.n, self.n, |i, j| self.get(i, j).to_f64())
    }
}

/// Rank over the rationals of an arbitrary list of rows.
pub fn rank_of_rows(mut rows: Vec<Vec<Rational>>) -> usize {
    let cols = rows.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..rows.len()).find(|&r| !rows[r][c].is_zero()) else {
            continue;
        };
        rows.swap(rank, p);
        let pivot = rows[rank].clone();
        for r in rank + 1..rows.len() {
            if rows[r][c].is_zero() {
                continue;
            }
            let factor = &rows[r][c] / &pivot[c];
            for (x, y) in rows[r][c..].iter_mut().zip(&pivot[c..]) {
                if !y.is_zero() {
                    *x -= &factor * y;
                }
            }
        }
        rank += 1;
        if rank == rows.len() {
            break;
        }
    }
    rank
}

/// Exact rank by Gaussian elimination.
pub fn rank_exact(m: &ExactMatrix) -> usize {
    rank_of_rows(m.rows())
}

/// Exact rank for exact matrices, numerical rank (tolerance `1e-9`)
/// otherwise.
pub fn matrix_rank<T: Scalar>(m: &Matrix<T>) -> usize {
    let exact: Option<Vec<Rational>> = m.data.iter().map(Scalar::to_rational).collect();
    match exact {
        Some(data) => rank_exact(&Matrix { n: m.n, data }),
        None => numerical_rank(&m.to_nalgebra(), 1e-9),
    }
}

/// Outcome of [`psd_check`].
#[derive(Clone, Debug, PartialEq)]
pub enum PsdCertificate {
    /// Positive semidefinite; `rank` is the exact rank.
    Psd { rank: usize },
    /// `vector^T M vector = value < 0`.
    Witness { vector: Vec<Rational>, value: Rational },
}

impl PsdCertificate {
    pub fn is_psd(&self) -> bool {
        matches!(self, Self::Psd { .. })
    }
}

/// Exact PSD decision by symmetric elimination; a failing matrix comes with
/// a vector `v` and the value `v^T M v < 0`.
pub fn psd_check(m: &ExactMatrix) -> Result<PsdCertificate> {
    if !m.is_symmetric() {
        return Err(Error::Asymmetric);
    }
    match psd_rank_fraction_free(m) {
        Some(rank) => Ok(PsdCertificate::Psd { rank }),
        None => psd_witness(m),
    }
}

/// Fraction-free (Bareiss) symmetric elimination on the matrix scaled to
/// integers. Each entry after `r` pivots is the minor on the pivot rows plus
/// one row and column, so divisions are exact and residual diagonals keep the
/// sign of the Schur complement. `None` when the matrix is not PSD.
fn psd_rank_fraction_free(m: &ExactMatrix) -> Option<usize> {
    let n = m.dim();
    let lcm = m.data.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let idx = |j: usize, k: usize| if j <= k { j * n + k } else { k * n + j };
    let mut a: Vec<BigInt> = m
        .data
        .iter()
        .map(|x| (x * Rational::from_integer(lcm.clone())).to_integer())
        .collect();
    let mut active: Vec<usize> = (0..n).collect();
    let mut prev = BigInt::one();
    let mut rank = 0;
    loop {
        if active.iter().any(|&j| a[idx(j, j)].is_negative()) {
            return None;
        }
        for &j in &active {
            if a[idx(j, j)].is_zero() && active.iter().any(|&k| k != j && !a[idx(j, k)].is_zero()) {
                return None;
            }
        }
        active.retain(|&j| !a[idx(j, j)].is_zero());
        if active.is_empty() {
            return Some(rank);
        }
        // small pivots keep the minors short
        let pos = (0..active.len())
            .min_by_key(|&x| a[idx(active[x], active[x])].bits())
            .expect("nonempty");
        let p = active.remove(pos);
        rank += 1;
        let app = a[idx(p, p)].clone();
        for (x, &j) in active.iter().enumerate() {
            let apj = a[idx(p, j)].clone();
            for &k in &active[x..] {
                let cell = idx(j, k);
                let mut v = &app * &a[cell];
                let apk = &a[idx(p, k)];
                if !apj.is_zero() && !apk.is_zero() {
                    v -= &apj * apk;
                }
                a[cell] = v / &prev;
            }
        }
        prev = app;
    }
}

/// Rational elimination that keeps the current Schur complement `S` together
/// with vectors `v_j` (original coordinates) with `S_jk = v_j^T M v_k`, so any
/// negative value found on the way is a replayable witness.
fn psd_witness(m: &ExactMatrix) -> Result<PsdCertificate> {
    let n = m.dim();
    let mut active: Vec<usize> = (0..n).collect();
    let mut s = m.clone();
    let mut basis: Vec<Vec<Rational>> = (0..n)
        .map(|j| (0..n).map(|i| if i == j { Rational::one() } else { Rational::zero() }).collect())
        .collect();
    let mut rank = 0;
    loop {
        if let Some(&j) = active.iter().find(|&&j| s.get(j, j).is_negative()) {
            let vector = basis[j].clone();
            let value = m.quadratic_form(&vector);
            return Ok(PsdCertificate::Witness { vector, value });
        }
        // zero diagonal with a nonzero off-diagonal entry
        for &j in &active {
            if !s.get(j, j).is_zero() {
                continue;
            }
            if let Some(&k) = active.iter().find(|&&k| k != j && !s.get(j, k).is_zero()) {
                let b = s.get(j, k).clone();
                let c = s.get(k, k).clone();
                let t = -(c + Rational::one()) / (Rational::from_integer(2.into()) * b);
                let vector: Vec<Rational> = basis[j].iter().zip(&basis[k]).map(|(x, y)| &t * x + y).collect();
                let value = m.quadratic_form(&vector);
                return Ok(PsdCertificate::Witness { vector, value });
            }
        }
        active.retain(|&j| !s.get(j, j).is_zero());
        let Some(&p) = active.first() else {
            return Ok(PsdCertificate::Psd { rank });
        };
        active.remove(0);
        rank += 1;
        let spp = s.get(p, p).clone();
        let col: Vec<Rational> = active.iter().map(|&j| s.get(j, p) / &spp).collect();
        for (a, &j) in active.iter().enumerate() {
            if col[a].is_zero() {
                continue;
            }
            for &k in &active {
                let delta = &col[a] * s.get(p, k);
                if !delta.is_zero() {
                    s.data[j * n + k] -= delta;
                }
            }
            let vp = basis[p].clone();
            for (x, y) in basis[j].iter_mut().zip(&vp) {
                if !y.is_zero() {
                    *x -= &col[a] * y;
                }
            }
        }
    }
}

/// Result of [`rank_psd_lazy`].
#[derive(Clone, Debug, PartialEq)]
pub enum LazyRank {
    /// All residual diagonals vanished after `rank` pivots.
    Rank(usize),
    /// A negative residual diagonal appeared, so the matrix is not PSD.
    NotPsd,
}

/// Rank of a matrix already known to be positive semidefinite, touching only
/// its diagonal and the columns of the chosen pivots (pivoted `LDL^T`).
///
/// For PSD matrices a vanishing residual diagonal forces the whole residual
/// row to vanish, so this is exact. `column(p)` must return the full column
/// `p`.
pub fn rank_psd_lazy(diag: Vec<Rational>, mut column: impl FnMut(usize) -> Vec<Rational>) -> LazyRank {
    let n = diag.len();
    let mut d = diag;
    // columns of L (unit lower), scaled by their pivots' D
    let mut cols: Vec<Vec<Rational>> = Vec::new();
    let mut pivots: Vec<(usize, Rational)> = Vec::new();
    let mut used = vec![false; n];
    loop {
        if d.iter().any(Signed::is_negative) {
            return LazyRank::NotPsd;
        }
        let Some(p) = (0..n).filter(|&i| !used[i] && d[i].is_positive()).max_by(|&a, &b| d[a].cmp(&d[b])) else {
            return LazyRank::Rank(pivots.len());
        };
        let mut c = column(p);
        for (lcol, (_, dr)) in cols.iter().zip(&pivots) {
            let lp = &lcol[p];
            if lp.is_zero() {
                continue;
            }
            let scale = lp * dr;
            for (x, l) in c.iter_mut().zip(lcol) {
                if !l.is_zero() {
                    *x -= l * &scale;
                }
            }
        }
        let dp = d[p].clone();
        let l: Vec<Rational> = c.iter().map(|x| x / &dp).collect();
        for i in 0..n {
            if !used[i] && i != p && !l[i].is_zero() {
                d[i] -= &l[i] * &l[i] * &dp;
            }
        }
        used[p] = true;
        d[p] = Rational::zero();
        cols.push(l);
        pivots.push((p, dp));
    }
}

/// Solve `A x = b` exactly; `None` if `A` is singular.
pub fn solve_exact(a: &ExactMatrix, b: &[Rational]) -> Option<Vec<Rational>> {
    let n = a.dim();
    let mut rows: Vec<Vec<Rational>> = (0..n)
        .map(|i| {
            let mut r = a.row(i).to_vec();
            r.push(b[i].clone());
            r
        })
        .collect();
    for c in 0..n {
        let p = (c..n).find(|&r| !rows[r][c].is_zero())?;
        rows.swap(c, p);
        let pivot = rows[c].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r == c || row[c].is_zero() {
                continue;
            }
            let factor = &row[c] / &pivot[c];
            for (x, y) in row[c..].iter_mut().zip(&pivot[c..]) {
                *x -= &factor * y;
            }
        }
    }
    Some((0..n).map(|i| &rows[i][n] / &rows[i][i]).collect())
}

/// Numerical rank: singular values above `tol * max(1, sigma_max)`.
pub fn numerical_rank(m: &DMatrix<f64>, tol: f64) -> usize {
    let sv = m.singular_values();
    let top = sv.iter().cloned().fold(0.0, f64::max);
    sv.iter().filter(|&&s| s > tol * top.max(1.0)).count()
}

/// Condition estimate `sigma_max / sigma_min` over singular values above `tol`.
pub fn condition_number(m: &DMatrix<f64>, tol: f64) -> f64 {
    let sv = m.singular_values();
    let kept: Vec<f64> = sv.iter().copied().filter(|&s| s > tol).collect();
    match (kept.iter().cloned().reduce(f64::max), kept.iter().cloned().reduce(f64::min)) {
        (Some(a), Some(b)) => a / b,
        _ => f64::INFINITY,
    }
}

/// Eigenvalues of a symmetric float matrix, ascending.
pub fn symmetric_eigenvalues(m: &DMatrix<f64>) -> Vec<f64> {
    let mut ev: Vec<f64> = m.clone().symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}
