//! One-dimensional moment sequences: Hankel positivity and rank, Hausdorff
//! differences, finite-support recovery, and the graph inclusion-exclusion
//! check.

use nalgebra::{DMatrix, DVector};
use num_integer::binomial;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::graph::{simple_supergraphs, Multigraph};
use crate::hom::GraphParameter;
use crate::linalg::{numerical_rank, psd_check, rank_exact, solve_exact, ExactMatrix, Matrix, PsdCertificate};
use crate::scalar::{rational_from_f64, Rational, Scalar};
use crate::targets::Distribution;

/// Probability measure with finitely many atoms; same representation as an
/// edge distribution.
pub type FiniteSupportMeasure = Distribution;

/// Interval the measure is assumed to live on.
#[derive(Clone, Debug, PartialEq)]
pub enum Domain {
    /// `[0, 1]`.
    Unit,
    /// `[-d, d]`.
    Symmetric(Rational),
}

/// Finite prefix `a_0, ..., a_L` of a moment sequence.
#[derive(Clone, Debug, PartialEq)]
pub struct MomentSequence {
    values: Vec<Rational>,
    domain: Domain,
}

impl MomentSequence {
    pub fn new(values: Vec<Rational>, domain: Domain) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidArgument("empty moment sequence".into()));
        }
        if let Domain::Symmetric(d) = &domain {
            if !d.is_positive() {
                return Err(Error::InvalidArgument(format!("domain bound {d} must be positive")));
            }
        }
        Ok(Self { values, domain })
    }

    pub fn values(&self) -> &[Rational] {
        &self.values
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    /// Largest square Hankel matrix `A_ij = a_{i+j}` the prefix supports.
    pub fn hankel(&self) -> ExactMatrix {
        hankel_matrix(&self.values, self.values.len().div_ceil(2))
    }

    /// First index `n` with `|a_n| > d^n a_0`, if any.
    pub fn bound_violation(&self) -> Option<usize> {
        let d = match &self.domain {
            Domain::Unit => Rational::one(),
            Domain::Symmetric(d) => d.clone(),
        };
        let a0 = &self.values[0];
        (0..self.values.len()).find(|&n| self.values[n].abs() > d.powu(n as u32) * a0)
    }
}

/// `s x s` Hankel matrix of `values`.
pub fn hankel_matrix<T: Scalar>(values: &[T], s: usize) -> Matrix<T> {
    Matrix::from_fn(s, |i, j| values[i + j].clone())
}

/// Moments `E(X^0), ..., E(X^{count-1})`.
pub fn moments_of(mu: &FiniteSupportMeasure, count: usize) -> Vec<Rational> {
    (0..count as u32).map(|k| mu.moment(k)).collect()
}

/// PSD certificate and exact rank of the largest Hankel matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct HankelReport {
    pub certificate: PsdCertificate,
    pub rank: usize,
}

pub fn hankel_psd_rank(seq: &MomentSequence) -> HankelReport {
    let h = seq.hankel();
    HankelReport {
        certificate: psd_check(&h).expect("Hankel matrices are symmetric"),
        rank: rank_exact(&h),
    }
}

/// Outcome of [`hausdorff_check`].
#[derive(Clone, Debug, PartialEq)]
pub enum Hausdorff {
    Pass,
    /// `sum_j (-1)^j C(k,j) a_{n+j} = value < 0`.
    Violated {
        n: usize,
        k: usize,
        value: Rational,
    },
}

/// Complete monotonicity: `sum_{j<=k} (-1)^j C(k,j) a_{n+j} >= 0` for all
/// `k <= up_to_k` and `n + k <= L`.
pub fn hausdorff_check(seq: &MomentSequence, up_to_k: usize) -> Result<Hausdorff> {
    if seq.domain != Domain::Unit {
        return Err(Error::InvalidArgument("Hausdorff differences need the domain [0,1]".into()));
    }
    let a = &seq.values;
    let last = a.len() - 1;
    for k in 0..=up_to_k.min(last) {
        for n in 0..=last - k {
            let value: Rational = (0..=k)
                .map(|j| {
                    let c = Rational::from_integer(binomial(k as i64, j as i64).into());
                    let term = c * &a[n + j];
                    if j % 2 == 0 {
                        term
                    } else {
                        -term
                    }
                })
                .sum();
            if value.is_negative() {
                return Ok(Hausdorff::Violated { n, k, value });
            }
        }
    }
    Ok(Hausdorff::Pass)
}

/// Float atoms and weights.
#[derive(Clone, Debug, PartialEq)]
pub struct ApproxMeasure {
    pub atoms: Vec<(f64, f64)>,
}

/// Result of [`recover_finite_support`].
#[derive(Clone, Debug, PartialEq)]
pub enum Recovered {
    /// All atoms rational; weights and moments reproduced exactly.
    Exact(FiniteSupportMeasure),
    /// Some atom irrational; moments reproduced to `1e-9`.
    Approx(ApproxMeasure),
}

/// The measure with at most `max_atoms` atoms whose moments start with
/// `moments`. Needs a prefix of length at least `2 * max_atoms`.
pub fn recover_finite_support(moments: &[Rational], max_atoms: usize) -> Result<Recovered> {
    if max_atoms == 0 || moments.len() < 2 * max_atoms {
        return Err(Error::InvalidArgument(format!(
            "need at least {} moments for {max_atoms} atoms, got {}",
            2 * max_atoms,
            moments.len()
        )));
    }
    let jmax = (max_atoms + 1).min(moments.len().div_ceil(2));
    let k = (1..=jmax)
        .rev()
        .find(|&j| rank_exact(&hankel_matrix(moments, j)) == j)
        .ok_or_else(|| Error::Inconsistent("a_0 = 0".into()))?;
    if k > max_atoms {
        let rank = rank_exact(&hankel_matrix(moments, moments.len().div_ceil(2)));
        return Err(Error::RankExceeds { rank, max: max_atoms });
    }
    // monic x^k + c_{k-1} x^{k-1} + ... + c_0 annihilating the shifted moments
    let rhs: Vec<Rational> = (0..k).map(|i| -moments[i + k].clone()).collect();
    let c = solve_exact(&hankel_matrix(moments, k), &rhs).expect("leading Hankel block is nonsingular");
    let mut poly = c;
    poly.push(Rational::one());
    let roots = real_roots(&poly)?;
    let exact: Option<Vec<Rational>> = roots
        .iter()
        .map(|r| match r {
            Root::Exact(x) => Some(x.clone()),
            Root::Approx(_) => None,
        })
        .collect();
    match exact {
        Some(atoms) => {
            let v = Matrix::from_fn(k, |i, j| atoms[j].powu(i as u32));
            let w = solve_exact(&v, &moments[..k]).ok_or(Error::NonrealRoots)?;
            if let Some(bad) = w.iter().find(|x| !x.is_positive()) {
                return Err(Error::Inconsistent(format!("atom weight {bad} is not positive")));
            }
            let mu = Distribution::new(atoms.into_iter().zip(w).collect()).map_err(|e| Error::Inconsistent(e.to_string()))?;
            if let Some(n) = (0..moments.len()).find(|&n| mu.moment(n as u32) != moments[n]) {
                return Err(Error::Inconsistent(format!("moment {n} is not reproduced")));
            }
            Ok(Recovered::Exact(mu))
        }
        None => {
            let xs: Vec<f64> = roots.iter().map(Root::to_f64).collect();
            let ms: Vec<f64> = moments.iter().map(Scalar::to_f64).collect();
            finish_approx(&xs, &ms).map(Recovered::Approx)
        }
    }
}

/// Float version of [`recover_finite_support`]; the number of atoms is the
/// numerical rank (tolerance `1e-9`) of the largest Hankel matrix.
pub fn recover_finite_support_f64(moments: &[f64], max_atoms: usize) -> Result<ApproxMeasure> {
    if max_atoms == 0 || moments.len() < 2 * max_atoms {
        return Err(Error::InvalidArgument(format!(
            "need at least {} moments for {max_atoms} atoms, got {}",
            2 * max_atoms,
            moments.len()
        )));
    }
    let full = hankel_matrix(moments, moments.len().div_ceil(2)).to_nalgebra();
    let k = numerical_rank(&full, 1e-9);
    if k > max_atoms {
        return Err(Error::RankExceeds { rank: k, max: max_atoms });
    }
    if k == 0 {
        return Err(Error::Inconsistent("zero Hankel matrix".into()));
    }
    let h = hankel_matrix(moments, k).to_nalgebra();
    let rhs = DVector::from_fn(k, |i, _| -moments[i + k]);
    let c = h
        .lu()
        .solve(&rhs)
        .ok_or_else(|| Error::Inconsistent("singular Hankel block".into()))?;
    // companion matrix of x^k + c_{k-1} x^{k-1} + ... + c_0
    let comp = DMatrix::from_fn(k, k, |i, j| {
        if j == k - 1 {
            -c[i]
        } else if i == j + 1 {
            1.0
        } else {
            0.0
        }
    });
    let eig = comp.complex_eigenvalues();
    if eig.iter().any(|z| z.im.abs() > 1e-9 * (1.0 + z.re.abs())) {
        return Err(Error::NonrealRoots);
    }
    let mut xs: Vec<f64> = eig.iter().map(|z| z.re).collect();
    xs.sort_by(f64::total_cmp);
    finish_approx(&xs, moments)
}

fn finish_approx(xs: &[f64], moments: &[f64]) -> Result<ApproxMeasure> {
    let k = xs.len();
    if xs.windows(2).any(|w| (w[1] - w[0]).abs() < 1e-12) {
        return Err(Error::NonrealRoots);
    }
    let v = DMatrix::from_fn(k, k, |i, j| xs[j].powi(i as i32));
    let w = v
        .lu()
        .solve(&DVector::from_column_slice(&moments[..k]))
        .ok_or(Error::NonrealRoots)?;
    for (n, m) in moments.iter().enumerate() {
        let got: f64 = xs.iter().zip(w.iter()).map(|(x, p)| p * x.powi(n as i32)).sum();
        if (got - m).abs() > 1e-9 * (1.0 + m.abs()) {
            return Err(Error::Inconsistent(format!("moment {n} reproduced as {got}, expected {m}")));
        }
    }
    Ok(ApproxMeasure {
        atoms: xs.iter().copied().zip(w.iter().copied()).collect(),
    })
}

#[derive(Clone, Debug, PartialEq)]
enum Root {
    Exact(Rational),
    Approx(f64),
}

impl Root {
    fn to_f64(&self) -> f64 {
        match self {
            Root::Exact(r) => r.to_f64(),
            Root::Approx(x) => *x,
        }
    }
}

// Polynomials are coefficient vectors, lowest degree first.

fn eval(p: &[Rational], x: &Rational) -> Rational {
    p.iter().rev().fold(Rational::zero(), |acc, c| acc * x + c)
}

fn derivative(p: &[Rational]) -> Vec<Rational> {
    p.iter()
        .enumerate()
        .skip(1)
        .map(|(i, c)| c * Rational::from_integer((i as i64).into()))
        .collect()
}

fn trim(mut p: Vec<Rational>) -> Vec<Rational> {
    while p.last().is_some_and(Zero::is_zero) {
        p.pop();
    }
    p
}

fn remainder(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    let mut r = a.to_vec();
    let db = b.len() - 1;
    let lead = b.last().expect("nonzero divisor");
    while r.len() > db && !r.is_empty() {
        let shift = r.len() - 1 - db;
        let f = r.last().expect("nonempty") / lead;
        for (i, c) in b.iter().enumerate() {
            r[shift + i] -= &f * c;
        }
        r.pop();
        r = trim(r);
    }
    trim(r)
}

fn sturm_chain(p: &[Rational]) -> Vec<Vec<Rational>> {
    let mut chain = vec![p.to_vec(), derivative(p)];
    loop {
        let n = chain.len();
        if chain[n - 1].is_empty() {
            chain.pop();
            return chain;
        }
        if chain[n - 1].len() == 1 {
            return chain;
        }
        let r: Vec<Rational> = remainder(&chain[n - 2], &chain[n - 1]).into_iter().map(|c| -c).collect();
        chain.push(r);
    }
}

fn sign_changes(chain: &[Vec<Rational>], x: &Rational) -> usize {
    let signs: Vec<bool> = chain
        .iter()
        .map(|p| eval(p, x))
        .filter(|v| !v.is_zero())
        .map(|v| v.is_positive())
        .collect();
    signs.windows(2).filter(|w| w[0] != w[1]).count()
}

/// Simplest rational (smallest denominator) in `[a, b]`.
pub(crate) fn simplest_between(a: &Rational, b: &Rational) -> Rational {
    if !a.is_positive() && !b.is_negative() {
        return Rational::zero();
    }
    if b.is_negative() {
        return -simplest_between(&-b.clone(), &-a.clone());
    }
    let fl = a.floor();
    if &fl == a {
        return fl;
    }
    let next = &fl + Rational::one();
    if &next <= b {
        return next;
    }
    let inner = simplest_between(&(Rational::one() / (b - &fl)), &(Rational::one() / (a - &fl)));
    fl + Rational::one() / inner
}

/// All roots of `p` (degree `k`), which must be real and simple.
fn real_roots(p: &[Rational]) -> Result<Vec<Root>> {
    let deg = p.len() - 1;
    let lead = &p[deg];
    let bound = Rational::one() + p[..deg].iter().map(|c| (c / lead).abs()).max().unwrap_or_default();
    let chain = sturm_chain(p);
    let lo = -bound.clone();
    let count = sign_changes(&chain, &lo) - sign_changes(&chain, &bound);
    if count != deg {
        return Err(Error::NonrealRoots);
    }
    // isolate: (a, b] intervals containing exactly one root
    let mut stack = vec![(lo, bound)];
    let mut isolated = Vec::new();
    while let Some((a, b)) = stack.pop() {
        let n = sign_changes(&chain, &a) - sign_changes(&chain, &b);
        match n {
            0 => {}
            1 => isolated.push((a, b)),
            _ => {
                let mid = (&a + &b) / Rational::from_integer(2.into());
                stack.push((mid.clone(), b));
                stack.push((a, mid));
            }
        }
    }
    let tol = rational_from_f64(1e-12).expect("finite");
    let mut roots: Vec<Root> = isolated
        .into_iter()
        .map(|(mut a, mut b)| {
            if eval(p, &b).is_zero() {
                return Root::Exact(b);
            }
            loop {
                let s = simplest_between(&a, &b);
                if s != a && eval(p, &s).is_zero() {
                    return Root::Exact(s);
                }
                if &b - &a < tol {
                    return Root::Approx(((&a + &b) / Rational::from_integer(2.into())).to_f64());
                }
                let mid = (&a + &b) / Rational::from_integer(2.into());
                let fm = eval(p, &mid);
                if fm.is_zero() {
                    return Root::Exact(mid);
                }
                // root in (a, b]: keep the half with the sign change
                if sign_changes(&chain, &a) - sign_changes(&chain, &mid) == 1 {
                    b = mid;
                } else {
                    a = mid;
                }
            }
        })
        .collect();
    roots.sort_by(|x, y| x.to_f64().total_cmp(&y.to_f64()));
    Ok(roots)
}

/// `sum over simple F' >= F on V(F) of (-1)^{|E(F')| - |E(F)|} f(F')`, the
/// induced-subgraph value of `f` at `F`.
pub fn induced_nonnegativity<T: Scalar>(f: &(impl GraphParameter<T> + ?Sized), g: &Multigraph) -> Result<T> {
    if g.node_count() > 6 {
        return Err(Error::GuardExceeded {
            what: "node count",
            value: g.node_count() as u128,
            limit: 6,
        });
    }
    let base = g.edge_count();
    let mut acc = T::zero();
    for sup in simple_supergraphs(g)? {
        let v = f.eval(&sup);
        if (sup.edge_count() - base).is_multiple_of(2) {
            acc = acc + v;
        } else {
            acc = acc - v;
        }
    }
    Ok(acc)
}
