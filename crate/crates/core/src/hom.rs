//! Homomorphism numbers and densities into weighted graphs, randomly weighted
//! graphs and step graphons; injective variants; graph parameters and their
//! linear extension to quantum graphs.
//!
//! The main evaluator sums over maps `V(F) -> V(H)` by eliminating the nodes of
//! `F` one at a time (min-degree order), which reduces to transfer-matrix
//! products on paths and cycles and stays cheap on subdivisions. An exhaustive
//! map enumeration with early zero termination is kept as the reference route.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::graph::{canonical_form, glue_product, set_partitions, CanonicalCode, CodeMode, Multigraph};
use crate::scalar::{Rational, Scalar};
use crate::targets::{RandomWeightedGraph, StepGraphon, WeightedGraph};

/// Anything `F` can be mapped into: node weights plus a weight for each
/// `mult`-fold edge between (possibly equal) target nodes.
pub trait HomTarget<T: Scalar>: Sync {
    fn size(&self) -> usize;
    fn node_weight(&self, i: usize) -> T;
    /// Contribution of `mult` parallel edges mapped onto `{a, b}`.
    fn edge_weight(&self, a: usize, b: usize, mult: u32) -> T;

    fn total_weight(&self) -> T {
        (0..self.size()).fold(T::zero(), |acc, i| acc + self.node_weight(i))
    }
}

impl<T: Scalar> HomTarget<T> for WeightedGraph<T> {
    fn size(&self) -> usize {
        self.node_count()
    }
    fn node_weight(&self, i: usize) -> T {
        self.alpha()[i].clone()
    }
    fn edge_weight(&self, a: usize, b: usize, mult: u32) -> T {
        self.beta(a, b).powu(mult)
    }
}

impl<T: Scalar> HomTarget<T> for StepGraphon<T> {
    fn size(&self) -> usize {
        self.step_count()
    }
    fn node_weight(&self, i: usize) -> T {
        self.measures()[i].clone()
    }
    fn edge_weight(&self, a: usize, b: usize, mult: u32) -> T {
        self.value(a, b).powu(mult)
    }
}

impl HomTarget<Rational> for RandomWeightedGraph {
    fn size(&self) -> usize {
        self.node_count()
    }
    fn node_weight(&self, i: usize) -> Rational {
        self.alpha()[i].clone()
    }
    fn edge_weight(&self, a: usize, b: usize, mult: u32) -> Rational {
        self.moment(a, b, mult)
    }
}

/// Same target with every node weight replaced by one.
struct UnitWeights<'a, H: ?Sized>(&'a H);

impl<T: Scalar, H: HomTarget<T> + ?Sized> HomTarget<T> for UnitWeights<'_, H> {
    fn size(&self) -> usize {
        self.0.size()
    }
    fn node_weight(&self, _: usize) -> T {
        T::one()
    }
    fn edge_weight(&self, a: usize, b: usize, mult: u32) -> T {
        self.0.edge_weight(a, b, mult)
    }
}

/// Loop-capable edge multiset used internally (quotients of multigraphs can
/// carry loops).
#[derive(Clone, Debug)]
pub(crate) struct Pattern {
    nodes: usize,
    edges: Vec<(usize, usize, u32)>,
}

impl Pattern {
    pub(crate) fn of(f: &Multigraph) -> Self {
        Self {
            nodes: f.node_count(),
            edges: f.edges().collect(),
        }
    }

    /// Identify nodes in the same block of `blocks` (restricted-growth form).
    fn quotient(&self, blocks: &[usize]) -> Self {
        let nodes = blocks.iter().max().map_or(0, |b| b + 1);
        let mut merged: BTreeMap<(usize, usize), u32> = BTreeMap::new();
        for &(u, v, m) in &self.edges {
            let (a, b) = (blocks[u], blocks[v]);
            *merged.entry((a.min(b), a.max(b))).or_insert(0) += m;
        }
        Self {
            nodes,
            edges: merged.into_iter().map(|((a, b), m)| (a, b, m)).collect(),
        }
    }
}

struct Factor<T> {
    scope: Vec<usize>,
    table: Vec<T>,
}

const TABLE_LIMIT: usize = 1 << 26;

/// Sum over maps of the free nodes (`pins.len()..`) with the first
/// `pins.len()` nodes fixed to `pins`. Pinned node weights and edges between
/// two pinned nodes are left out.
fn contract<T: Scalar, H: HomTarget<T> + ?Sized>(pattern: &Pattern, h: &H, node_weights: bool, pins: &[usize]) -> T {
    let q = h.size();
    let n = pattern.nodes;
    let k = pins.len();
    if n == k {
        return T::one();
    }
    if q == 0 {
        return T::zero();
    }
    let mut unary: Vec<Option<Vec<T>>> = vec![None; n];
    let mul_unary = |slot: &mut Option<Vec<T>>, vals: Vec<T>| match slot {
        Some(cur) => cur.iter_mut().zip(vals).for_each(|(c, v)| *c = c.clone() * v),
        None => *slot = Some(vals),
    };
    let w: Vec<T> = (0..q).map(|a| h.node_weight(a)).collect();
    if node_weights && !w.iter().all(|x| x.is_one()) {
        for slot in unary.iter_mut().skip(k) {
            mul_unary(slot, w.clone());
        }
    }
    let mut factors: Vec<Factor<T>> = Vec::new();
    for &(u, v, m) in &pattern.edges {
        match (u < k, v < k) {
            (true, true) => {}
            (true, false) | (false, true) => {
                let (p, free) = if u < k { (u, v) } else { (v, u) };
                let vals = (0..q).map(|b| h.edge_weight(pins[p], b, m)).collect();
                mul_unary(&mut unary[free], vals);
            }
            (false, false) if u == v => {
                let vals = (0..q).map(|a| h.edge_weight(a, a, m)).collect();
                mul_unary(&mut unary[u], vals);
            }
            (false, false) => {
                let mut table = Vec::with_capacity(q * q);
                for a in 0..q {
                    for b in 0..q {
                        table.push(h.edge_weight(a, b, m));
                    }
                }
                factors.push(Factor {
                    scope: vec![u.min(v), u.max(v)],
                    table,
                });
            }
        }
    }
    for (v, slot) in unary.into_iter().enumerate() {
        if let Some(table) = slot {
            factors.push(Factor { scope: vec![v], table });
        }
    }
    if factors.iter().any(|f| f.table.iter().all(|x| x.is_zero())) {
        return T::zero();
    }

    // interaction graph over free nodes
    let mut nbrs: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); n];
    for f in &factors {
        if f.scope.len() == 2 {
            nbrs[f.scope[0]].insert(f.scope[1]);
            nbrs[f.scope[1]].insert(f.scope[0]);
        }
    }
    let mut alive: BTreeSet<usize> = (k..n).collect();
    let mut result = T::one();
    while let Some(&v) = alive.iter().min_by_key(|&&v| (nbrs[v].len(), v)) {
        alive.remove(&v);
        let width = nbrs[v].len();
        if q.checked_pow(width as u32 + 1).is_none_or(|s| s > TABLE_LIMIT) {
            // too wide for tables; finish by enumeration over the remaining nodes
            return result * brute_over_factors(&factors, q, &alive, v);
        }
        let (inv, rest): (Vec<_>, Vec<_>) = factors.into_iter().partition(|f| f.scope.contains(&v));
        factors = rest;
        let new_scope: Vec<usize> = nbrs[v].iter().copied().collect();
        let new = eliminate(&inv, v, &new_scope, q);
        let nb: Vec<usize> = nbrs[v].iter().copied().collect();
        for &a in &nb {
            nbrs[a].remove(&v);
            for &b in &nb {
                if a != b {
                    nbrs[a].insert(b);
                }
            }
        }
        nbrs[v].clear();
        if new_scope.is_empty() {
            result = result * new.table[0].clone();
            if result.is_zero() {
                return result;
            }
        } else {
            if new.table.iter().all(|x| x.is_zero()) {
                return T::zero();
            }
            factors.push(new);
        }
    }
    for f in factors {
        debug_assert!(f.scope.is_empty());
        result = result * f.table[0].clone();
    }
    result
}

fn eliminate<T: Scalar>(inv: &[Factor<T>], v: usize, new_scope: &[usize], q: usize) -> Factor<T> {
    let s = new_scope.len();
    // re-lay each factor so that `v` is the contiguous last axis; `strides`
    // are with respect to new_scope positions
    let laid: Vec<(Vec<T>, Vec<usize>)> = inv
        .iter()
        .map(|f| {
            let vars: Vec<usize> = f.scope.iter().copied().filter(|&x| x != v).chain([v]).collect();
            let table = if vars == f.scope { f.table.clone() } else { transpose(f, &vars, q) };
            let len = vars.len();
            let mut st = vec![0; s];
            for (pos, var) in vars[..len - 1].iter().enumerate() {
                let i = new_scope.binary_search(var).expect("scope var is a neighbour");
                st[i] = q.pow((len - 1 - pos) as u32);
            }
            (table, st)
        })
        .collect();
    let size = q.pow(s as u32);
    let mut table = Vec::with_capacity(size);
    let mut assign = vec![0usize; s];
    let mut scratch: Vec<T> = vec![T::zero(); q];
    for _ in 0..size {
        let slices: Vec<&[T]> = laid
            .iter()
            .map(|(t, st)| {
                let b: usize = st.iter().zip(&assign).map(|(x, y)| x * y).sum();
                &t[b..b + q]
            })
            .collect();
        let acc = match slices.as_slice() {
            [a] => a.iter().fold(T::zero(), |acc, x| acc + x.clone()),
            // zero skipping pays off only for big rationals
            [a, b] if !T::EXACT => a.iter().zip(*b).fold(T::zero(), |acc, (x, y)| acc + x.clone() * y.clone()),
            [a, b] => a.iter().zip(*b).fold(T::zero(), |acc, (x, y)| {
                if x.is_zero() || y.is_zero() {
                    acc
                } else {
                    acc + x.clone() * y.clone()
                }
            }),
            [first, rest @ ..] => {
                scratch.clone_from_slice(first);
                for sl in rest {
                    for (c, x) in scratch.iter_mut().zip(*sl) {
                        if !T::EXACT || !c.is_zero() {
                            *c = c.clone() * x.clone();
                        }
                    }
                }
                scratch.iter().fold(T::zero(), |acc, x| acc + x.clone())
            }
            [] => T::from_i64(q as i64),
        };
        table.push(acc);
        // odometer, last position fastest
        for i in (0..s).rev() {
            assign[i] += 1;
            if assign[i] < q {
                break;
            }
            assign[i] = 0;
        }
    }
    Factor {
        scope: new_scope.to_vec(),
        table,
    }
}

/// Table of `f` re-indexed with variable order `vars` (a permutation of its scope).
fn transpose<T: Scalar>(f: &Factor<T>, vars: &[usize], q: usize) -> Vec<T> {
    let len = vars.len();
    let old_stride: Vec<usize> = vars
        .iter()
        .map(|var| {
            let pos = f.scope.iter().position(|x| x == var).expect("same scope");
            q.pow((len - 1 - pos) as u32)
        })
        .collect();
    let mut out = Vec::with_capacity(f.table.len());
    let mut assign = vec![0usize; len];
    for _ in 0..f.table.len() {
        let idx: usize = assign.iter().zip(&old_stride).map(|(a, s)| a * s).sum();
        out.push(f.table[idx].clone());
        for i in (0..len).rev() {
            assign[i] += 1;
            if assign[i] < q {
                break;
            }
            assign[i] = 0;
        }
    }
    out
}

fn brute_over_factors<T: Scalar>(factors: &[Factor<T>], q: usize, alive: &BTreeSet<usize>, v: usize) -> T {
    let mut vars: Vec<usize> = alive.iter().copied().collect();
    vars.push(v);
    vars.sort_unstable();
    let mut assign = vec![0usize; vars.iter().max().map_or(0, |m| m + 1)];
    let mut total = T::zero();
    let mut counter = vec![0usize; vars.len()];
    loop {
        for (i, &var) in vars.iter().enumerate() {
            assign[var] = counter[i];
        }
        let mut prod = T::one();
        for f in factors {
            let idx = f.scope.iter().fold(0, |acc, &var| acc * q + assign[var]);
            prod = prod * f.table[idx].clone();
            if prod.is_zero() {
                break;
            }
        }
        total = total + prod;
        let mut i = 0;
        while i < counter.len() {
            counter[i] += 1;
            if counter[i] < q {
                break;
            }
            counter[i] = 0;
            i += 1;
        }
        if i == counter.len() {
            return total;
        }
    }
}

/// Exhaustive enumeration of maps, assigning nodes in index order and pruning
/// on zero partial products.
fn brute<T: Scalar, H: HomTarget<T> + ?Sized>(pattern: &Pattern, h: &H, node_weights: bool, injective: bool) -> T {
    let q = h.size();
    let n = pattern.nodes;
    // back-edges per node: (earlier node, table) and loop tables
    let mut back: Vec<Vec<(usize, Vec<T>)>> = vec![Vec::new(); n];
    let mut loops: Vec<Vec<T>> = vec![vec![T::one(); q]; n];
    for &(u, v, m) in &pattern.edges {
        if u == v {
            for a in 0..q {
                loops[u][a] = loops[u][a].clone() * h.edge_weight(a, a, m);
            }
        } else {
            let (early, late) = (u.min(v), u.max(v));
            let table = (0..q * q).map(|i| h.edge_weight(i / q, i % q, m)).collect();
            back[late].push((early, table));
        }
    }
    let weights: Vec<T> = (0..q).map(|a| if node_weights { h.node_weight(a) } else { T::one() }).collect();
    let ctx = Brute {
        back,
        loops,
        weights,
        q,
        injective,
    };
    ctx.run(0, T::one(), &mut vec![0; n], &mut vec![false; q])
}

struct Brute<T> {
    back: Vec<Vec<(usize, Vec<T>)>>,
    loops: Vec<Vec<T>>,
    weights: Vec<T>,
    q: usize,
    injective: bool,
}

impl<T: Scalar> Brute<T> {
    fn run(&self, i: usize, partial: T, assign: &mut [usize], used: &mut [bool]) -> T {
        if i == assign.len() {
            return partial;
        }
        let q = self.q;
        let mut acc = T::zero();
        for a in 0..q {
            if self.injective && used[a] {
                continue;
            }
            let mut p = partial.clone() * self.weights[a].clone() * self.loops[i][a].clone();
            for (j, table) in &self.back[i] {
                if p.is_zero() {
                    break;
                }
                p = p * table[assign[*j] * q + a].clone();
            }
            if p.is_zero() {
                continue;
            }
            assign[i] = a;
            used[a] = true;
            acc = acc + self.run(i + 1, p, assign, used);
            used[a] = false;
        }
        acc
    }
}

/// `hom(F, H)`: weighted sum over all maps `V(F) -> V(H)`. A `mult`-fold edge
/// contributes `target.edge_weight(.., mult)`, i.e. `beta^mult` for weighted
/// graphs and the `mult`-th edge moment for randomly weighted graphs.
pub fn hom<T: Scalar, H: HomTarget<T> + ?Sized>(f: &Multigraph, h: &H) -> T {
    contract(&Pattern::of(f), h, true, &[])
}

/// Reference evaluation of [`hom`] by exhaustive map enumeration.
pub fn hom_brute<T: Scalar, H: HomTarget<T> + ?Sized>(f: &Multigraph, h: &H) -> T {
    brute(&Pattern::of(f), h, true, false)
}

/// Homomorphism density `hom(F,H) / (sum alpha)^|V(F)|`.
pub fn density<T: Scalar, H: HomTarget<T> + ?Sized>(f: &Multigraph, h: &H) -> Result<T> {
    let total = h.total_weight();
    if total.is_zero() {
        return Err(Error::ZeroTotalWeight);
    }
    Ok(hom(f, h) / total.powu(f.node_count() as u32))
}

/// `hom` into a randomly weighted graph.
pub fn hom_rw(f: &Multigraph, h: &RandomWeightedGraph) -> Rational {
    hom(f, h)
}

/// Density into a randomly weighted graph.
pub fn t_rw(f: &Multigraph, h: &RandomWeightedGraph) -> Result<Rational> {
    density(f, h)
}

/// Sum over injective maps of the edge-weight product (no node weights).
/// Computed by Möbius inversion over set partitions of `V(F)`.
pub fn inj<T: Scalar, H: HomTarget<T> + ?Sized>(f: &Multigraph, h: &H) -> T {
    let m = f.node_count();
    if m > h.size() {
        return T::zero();
    }
    let pattern = Pattern::of(f);
    let unit = UnitWeights(h);
    let mut total = T::zero();
    for blocks in set_partitions(m) {
        let nblocks = blocks.iter().max().map_or(0, |b| b + 1);
        let mut sizes = vec![0usize; nblocks];
        for &b in &blocks {
            sizes[b] += 1;
        }
        // mu = prod over blocks of (-1)^(s-1) (s-1)!
        let mut mu: i64 = 1;
        for &s in &sizes {
            let fact: i64 = (1..s as i64).product();
            mu *= if s % 2 == 0 { -fact } else { fact };
        }
        let term = contract(&pattern.quotient(&blocks), &unit, true, &[]);
        if !term.is_zero() {
            total = total + T::from_i64(mu) * term;
        }
    }
    total
}

/// Reference evaluation of [`inj`] by enumerating injective maps.
pub fn inj_brute<T: Scalar, H: HomTarget<T> + ?Sized>(f: &Multigraph, h: &H) -> T {
    brute(&Pattern::of(f), h, false, true)
}

/// `k`-th elementary symmetric polynomial.
pub fn elementary_symmetric<T: Scalar>(xs: &[T], k: usize) -> T {
    let mut e = vec![T::zero(); k + 1];
    e[0] = T::one();
    for x in xs {
        for j in (1..=k).rev() {
            e[j] = e[j].clone() + e[j - 1].clone() * x.clone();
        }
    }
    e[k].clone()
}

/// Injective density `inj(F,H) / (m! * sigma_m(alpha))` with `m = |V(F)|`;
/// zero when `F` has more nodes than `H`.
pub fn t_inj<T: Scalar, H: HomTarget<T> + ?Sized>(f: &Multigraph, h: &H) -> Result<T> {
    let m = f.node_count();
    if m > h.size() {
        return Ok(T::zero());
    }
    let alpha: Vec<T> = (0..h.size()).map(|i| h.node_weight(i)).collect();
    let sigma = elementary_symmetric(&alpha, m);
    if sigma.is_zero() {
        return Err(Error::ZeroTotalWeight);
    }
    let fact = (1..=m as i64).fold(T::one(), |acc, i| acc * T::from_i64(i));
    Ok(inj(f, h) / (fact * sigma))
}

/// Where a graph parameter's values come from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Provenance {
    /// Homomorphism number or density into a concrete target.
    HomTarget,
    /// Explicit table or closed-form rule.
    Table,
    /// Built from other parameters.
    Composite,
}

/// An isomorphism-invariant map from multigraphs to numbers.
pub trait GraphParameter<T: Scalar>: Send + Sync {
    fn eval(&self, f: &Multigraph) -> T;

    fn provenance(&self) -> Provenance;

    /// Whether all connection matrices are known to be positive semidefinite.
    fn reflection_positive(&self) -> bool {
        false
    }

    /// Fast evaluator for `f(G_i G_j)` over a list of `k`-labeled generators.
    fn section(&self, _k: usize, _generators: &[Multigraph]) -> Option<LabeledSection<T>> {
        None
    }
}

/// `hom(., H)` or `t(., H)` as a graph parameter.
#[derive(Clone, Debug)]
pub struct HomParameter<H> {
    target: H,
    normalized: bool,
}

impl<H> HomParameter<H> {
    /// The unnormalized homomorphism number `hom(., H)`.
    pub fn hom(target: H) -> Self {
        Self { target, normalized: false }
    }

    /// The density `t(., H)`.
    pub fn density(target: H) -> Self {
        Self { target, normalized: true }
    }

    pub fn target(&self) -> &H {
        &self.target
    }
}

impl<T: Scalar, H: HomTarget<T> + Send> GraphParameter<T> for HomParameter<H> {
    fn eval(&self, f: &Multigraph) -> T {
        if self.normalized {
            density(f, &self.target).unwrap_or_else(|_| T::zero())
        } else {
            hom(f, &self.target)
        }
    }

    fn provenance(&self) -> Provenance {
        Provenance::HomTarget
    }

    fn reflection_positive(&self) -> bool {
        (0..self.target.size()).all(|i| self.target.node_weight(i) >= T::zero())
    }

    fn section(&self, k: usize, generators: &[Multigraph]) -> Option<LabeledSection<T>> {
        if generators.iter().any(|g| g.label_count() != k) {
            return None;
        }
        Some(LabeledSection::new(&self.target, self.normalized, k, generators))
    }
}

/// A parameter given by a closure.
pub struct FnParameter<F> {
    f: F,
    provenance: Provenance,
}

impl<F> FnParameter<F> {
    pub fn new(f: F, provenance: Provenance) -> Self {
        Self { f, provenance }
    }
}

impl<T: Scalar, F: Fn(&Multigraph) -> T + Send + Sync> GraphParameter<T> for FnParameter<F> {
    fn eval(&self, g: &Multigraph) -> T {
        (self.f)(g)
    }
    fn provenance(&self) -> Provenance {
        self.provenance
    }
}

/// Connection-matrix entries of a homomorphism parameter, computed by
/// splitting the sum over maps at the labeled nodes:
/// `f(G_i G_j) = sum_phi w(phi) c_phi(m_i + m_j) a_phi(G_i) a_phi(G_j)`.
pub struct LabeledSection<T> {
    k: usize,
    pairs: Vec<(usize, usize)>,
    map_weight: Vec<T>,
    // pair_weight[phi][pair][m]
    pair_weight: Vec<Vec<Vec<T>>>,
    // partial[g][phi]
    partial: Vec<Vec<T>>,
    labeled_mult: Vec<Vec<u32>>,
    free_nodes: Vec<usize>,
    inv_total_pow: Option<Vec<T>>,
    scaled: Option<ScaledTables>,
}

/// Exact tables as integer numerators over one denominator per table, so an
/// entry costs big-integer products and a single reduction.
struct ScaledTables {
    map_weight: Vec<BigInt>,
    partial: Vec<Vec<BigInt>>,
    // pair_weight[phi][pair][m], including m = 0
    pair_weight: Vec<Vec<Vec<BigInt>>>,
    denominator: Rational,
}

fn common_scale(values: &[&Rational]) -> (BigInt, Vec<BigInt>) {
    let den = values.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let nums = values.iter().map(|x| x.numer() * (&den / x.denom())).collect();
    (den, nums)
}

impl ScaledTables {
    fn new<T: Scalar>(map_weight: &[T], partial: &[Vec<T>], pair_weight: &[Vec<Vec<T>>], pairs: usize) -> Option<Self> {
        let exact = |x: &T| x.to_rational();
        let mw: Vec<Rational> = map_weight.iter().map(exact).collect::<Option<_>>()?;
        let pa: Vec<Rational> = partial.iter().flatten().map(exact).collect::<Option<_>>()?;
        let pw: Vec<Rational> = pair_weight.iter().flatten().flatten().map(exact).collect::<Option<_>>()?;
        let (mw_den, mw) = common_scale(&mw.iter().collect::<Vec<_>>());
        let (pa_den, pa) = common_scale(&pa.iter().collect::<Vec<_>>());
        let (pw_den, pw) = common_scale(&pw.iter().collect::<Vec<_>>());
        let width = partial.first().map_or(0, Vec::len);
        let mut pa = pa.into_iter();
        let partial = partial.iter().map(|_| pa.by_ref().take(width).collect()).collect();
        let mut pw = pw.into_iter();
        let pair_weight = pair_weight
            .iter()
            .map(|per_phi| per_phi.iter().map(|ms| pw.by_ref().take(ms.len()).collect()).collect())
            .collect();
        let den = mw_den * &pa_den * &pa_den * num_traits::pow(pw_den, pairs);
        Some(Self {
            map_weight: mw,
            partial,
            pair_weight,
            denominator: Rational::from_integer(den),
        })
    }

    fn entry(&self, i: usize, j: usize, mi: &[u32], mj: &[u32]) -> Rational {
        let (pi, pj) = (&self.partial[i], &self.partial[j]);
        let mut acc = BigInt::zero();
        for phi in 0..self.map_weight.len() {
            if pi[phi].is_zero() || pj[phi].is_zero() {
                continue;
            }
            let mut term = &self.map_weight[phi] * &pi[phi] * &pj[phi];
            for (p, ms) in self.pair_weight[phi].iter().enumerate() {
                term *= &ms[(mi[p] + mj[p]) as usize];
            }
            acc += term;
        }
        Rational::from_integer(acc) / &self.denominator
    }
}

impl<T: Scalar> LabeledSection<T> {
    fn new<H: HomTarget<T> + ?Sized>(h: &H, normalized: bool, k: usize, gens: &[Multigraph]) -> Self {
        let q = h.size();
        let pairs: Vec<(usize, usize)> = (0..k).flat_map(|j| (0..j).map(move |i| (i, j))).collect();
        let maps: Vec<Vec<usize>> = all_maps(k, q);
        let labeled_mult: Vec<Vec<u32>> = gens
            .iter()
            .map(|g| pairs.iter().map(|&(i, j)| g.multiplicity(i, j)).collect())
            .collect();
        let max_m = labeled_mult.iter().flatten().copied().max().unwrap_or(0) * 2;
        let map_weight: Vec<T> = maps
            .iter()
            .map(|phi| phi.iter().fold(T::one(), |acc, &a| acc * h.node_weight(a)))
            .collect();
        let pair_weight: Vec<Vec<Vec<T>>> = maps
            .iter()
            .map(|phi| {
                pairs
                    .iter()
                    .map(|&(i, j)| (0..=max_m).map(|m| h.edge_weight(phi[i], phi[j], m)).collect())
                    .collect()
            })
            .collect();
        let partial: Vec<Vec<T>> = gens
            .iter()
            .map(|g| {
                let pattern = Pattern::of(g);
                maps.iter().map(|phi| contract(&pattern, h, true, phi)).collect()
            })
            .collect();
        let free_nodes: Vec<usize> = gens.iter().map(|g| g.node_count() - k).collect();
        let inv_total_pow = normalized.then(|| {
            let total = h.total_weight();
            let top = 2 * free_nodes.iter().copied().max().unwrap_or(0) + k;
            let inv = if total.is_zero() { T::zero() } else { T::one() / total };
            (0..=top).map(|e| inv.powu(e as u32)).collect()
        });
        let scaled = if T::EXACT {
            ScaledTables::new(&map_weight, &partial, &pair_weight, pairs.len())
        } else {
            None
        };
        Self {
            k,
            pairs,
            map_weight,
            pair_weight,
            partial,
            labeled_mult,
            free_nodes,
            inv_total_pow,
            scaled,
        }
    }

    pub fn len(&self) -> usize {
        self.partial.len()
    }

    pub fn is_empty(&self) -> bool {
        self.partial.is_empty()
    }

    pub fn label_count(&self) -> usize {
        self.k
    }

    /// `f(G_i G_j)`.
    pub fn entry(&self, i: usize, j: usize) -> T {
        let (pi, pj) = (&self.partial[i], &self.partial[j]);
        let (mi, mj) = (&self.labeled_mult[i], &self.labeled_mult[j]);
        let mut acc = T::zero();
        if let Some(scaled) = &self.scaled {
            acc = T::from_rational(&scaled.entry(i, j, mi, mj));
        } else {
            for phi in 0..self.map_weight.len() {
                if pi[phi].is_zero() || pj[phi].is_zero() {
                    continue;
                }
                let mut term = self.map_weight[phi].clone() * pi[phi].clone() * pj[phi].clone();
                for p in 0..self.pairs.len() {
                    let m = (mi[p] + mj[p]) as usize;
                    if m > 0 {
                        term = term * self.pair_weight[phi][p][m].clone();
                    }
                }
                acc = acc + term;
            }
        }
        match &self.inv_total_pow {
            Some(pows) => acc * pows[self.k + self.free_nodes[i] + self.free_nodes[j]].clone(),
            None => acc,
        }
    }
}

pub(crate) fn all_maps(k: usize, q: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..k {
        out = out
            .into_iter()
            .flat_map(|m| {
                (0..q).map(move |a| {
                    let mut m2 = m.clone();
                    m2.push(a);
                    m2
                })
            })
            .collect();
    }
    out
}

/// Formal rational combination of `k`-labeled multigraphs, keyed by
/// labels-fixed isomorphism class.
#[derive(Clone, Debug, PartialEq)]
pub struct QuantumGraph {
    k: usize,
    terms: BTreeMap<CanonicalCode, (Multigraph, Rational)>,
}

impl QuantumGraph {
    pub fn new(k: usize) -> Self {
        Self { k, terms: BTreeMap::new() }
    }

    pub fn from_graph(g: &Multigraph) -> Result<Self> {
        let mut q = Self::new(g.label_count());
        q.add_term(Rational::one(), g)?;
        Ok(q)
    }

    pub fn label_count(&self) -> usize {
        self.k
    }

    pub fn add_term(&mut self, coef: Rational, g: &Multigraph) -> Result<()> {
        if g.label_count() != self.k {
            return Err(Error::LabelMismatch {
                left: self.k,
                right: g.label_count(),
            });
        }
        let (code, rep) = canonical_form(g, CodeMode::LabelsFixed)?;
        let entry = self.terms.entry(code.clone()).or_insert((rep, Rational::zero()));
        entry.1 += coef;
        if entry.1.is_zero() {
            self.terms.remove(&code);
        }
        Ok(())
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Multigraph, &Rational)> {
        self.terms.values().map(|(g, c)| (g, c))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn scaled(&self, c: &Rational) -> Self {
        let mut out = Self::new(self.k);
        for (g, a) in self.terms() {
            out.add_term(a * c, g).expect("same label count");
        }
        out
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        let mut out = self.clone();
        for (g, c) in other.terms() {
            out.add_term(c.clone(), g)?;
        }
        Ok(out)
    }

    /// Bilinear extension of the gluing product.
    pub fn product(&self, other: &Self) -> Result<Self> {
        if self.k != other.k {
            return Err(Error::LabelMismatch {
                left: self.k,
                right: other.k,
            });
        }
        let mut out = Self::new(self.k);
        for (g1, c1) in self.terms() {
            for (g2, c2) in other.terms() {
                out.add_term(c1 * c2, &glue_product(g1, g2)?)?;
            }
        }
        Ok(out)
    }

    pub fn square(&self) -> Self {
        self.product(self).expect("same label count")
    }

    /// True when every term has only labeled nodes (an element of `P_k`).
    pub fn is_fully_labeled(&self) -> bool {
        self.terms().all(|(g, _)| g.node_count() == self.k)
    }
}

/// Linear extension of `f` to quantum graphs.
pub fn evaluate_quantum<T: Scalar>(f: &(impl GraphParameter<T> + ?Sized), p: &QuantumGraph) -> T {
    p.terms().fold(T::zero(), |acc, (g, c)| acc + T::from_rational(c) * f.eval(g))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{disjoint_union, family, labeled_multi_edge, Family};
    use crate::scalar::{int, rat};
    use crate::targets::Distribution;

    fn k3() -> WeightedGraph {
        let b = |i: usize, j: usize| if i == j { int(0) } else { int(1) };
        WeightedGraph::unweighted((0..3).map(|i| (0..3).map(|j| b(i, j)).collect()).collect()).unwrap()
    }

    fn coin() -> RandomWeightedGraph {
        RandomWeightedGraph::new(vec![int(1)], vec![vec![Distribution::uniform(vec![int(0), int(1)]).unwrap()]]).unwrap()
    }

    #[test]
    fn fibonacci_target_on_one_edge() {
        let h = WeightedGraph::unweighted(vec![vec![int(1), int(1)], vec![int(1), int(0)]]).unwrap();
        let p2 = family(Family::Path(2)).unwrap();
        assert_eq!(hom(&p2, &h), int(3));
        assert_eq!(hom_brute(&p2, &h), int(3));
        // paths on n nodes count Fibonacci numbers of independent-set-like words
        let fib: Vec<Rational> = (1..8).map(|n| hom(&family(Family::Path(n)).unwrap(), &h)).collect();
        assert_eq!(fib, [2, 3, 5, 8, 13, 21, 34].map(int).to_vec());
    }

    #[test]
    fn triangle_into_k3_counts_colorings() {
        let c3 = family(Family::Cycle(3)).unwrap();
        assert_eq!(hom(&c3, &k3()), int(6));
        assert_eq!(hom_brute(&c3, &k3()), int(6));
    }

    #[test]
    fn single_looped_node() {
        let h = WeightedGraph::new(vec![int(1)], vec![vec![rat(2, 3)]]).unwrap();
        let f = Multigraph::from_edges(4, 0, &[(0, 1, 2), (1, 2, 1), (2, 3, 3)]).unwrap();
        assert_eq!(hom(&f, &h), rat(2, 3).powu(6));
    }

    #[test]
    fn constant_half_density() {
        let w = StepGraphon::constant(rat(1, 2));
        let f = Multigraph::from_edges(4, 0, &[(0, 1, 2), (1, 2, 1), (0, 3, 3)]).unwrap();
        assert_eq!(density(&f, &w).unwrap(), rat(1, 64));
        assert_eq!(density(&family(Family::K1).unwrap(), &k3()).unwrap(), int(1));
    }

    #[test]
    fn density_rejects_zero_weight() {
        let h = RandomWeightedGraph::new(vec![int(0)], vec![vec![Distribution::degenerate(int(1))]]).unwrap();
        assert_eq!(t_rw(&family(Family::K1).unwrap(), &h), Err(Error::ZeroTotalWeight));
    }

    #[test]
    fn injective_counts() {
        let k2 = family(Family::MultiEdge(1)).unwrap();
        assert_eq!(inj(&k2, &k3()), int(6));
        assert_eq!(inj_brute(&k2, &k3()), int(6));
        assert_eq!(t_inj(&k2, &k3()).unwrap(), int(1));
        let two = WeightedGraph::unweighted(vec![vec![int(0), int(1)], vec![int(1), int(0)]]).unwrap();
        assert_eq!(inj(&family(Family::Cycle(3)).unwrap(), &two), int(0));
        assert_eq!(t_inj(&family(Family::Cycle(3)).unwrap(), &two).unwrap(), int(0));
    }

    #[test]
    fn coin_and_sign_targets() {
        let k22 = family(Family::MultiEdge(2)).unwrap();
        assert_eq!(t_rw(&k22, &coin()).unwrap(), rat(1, 2));
        let sign = RandomWeightedGraph::new(vec![int(1)], vec![vec![Distribution::uniform(vec![int(-1), int(1)]).unwrap()]]).unwrap();
        assert_eq!(t_rw(&family(Family::MultiEdge(1)).unwrap(), &sign).unwrap(), int(0));
        assert_eq!(t_rw(&k22, &sign).unwrap(), int(1));
    }

    #[test]
    fn quantum_square_expansion() {
        // f((F - lambda e_2)^2) = f(F F) - 2 lambda f(F) + lambda^2 f(e_2)
        let h = coin();
        let f = HomParameter::density(h);
        let z = labeled_multi_edge(1);
        let e2 = Multigraph::new(2, 2).unwrap();
        let lambda = rat(1, 3);
        let mut p = QuantumGraph::from_graph(&z).unwrap();
        p.add_term(-lambda.clone(), &e2).unwrap();
        let lhs: Rational = evaluate_quantum(&f, &p.square());
        let ff = glue_product(&z, &z).unwrap();
        let rhs = f.eval(&ff) - int(2) * &lambda * f.eval(&z) + &lambda * &lambda * f.eval(&e2);
        assert_eq!(lhs, rhs);
        assert!(lhs >= int(0));
        let single: Rational = evaluate_quantum(&f, &QuantumGraph::from_graph(&z).unwrap());
        assert_eq!(single, f.eval(&z));
    }

    #[test]
    fn quantum_terms_cancel() {
        let z = labeled_multi_edge(1);
        let mut p = QuantumGraph::from_graph(&z).unwrap();
        p.add_term(int(-1), &z).unwrap();
        assert!(p.is_empty());
        assert!(p.add_term(int(1), &family(Family::K1).unwrap()).is_err());
    }

    #[test]
    fn section_matches_direct_gluing() {
        let alpha = vec![rat(1, 3), rat(1, 2), rat(1, 6)];
        let d = |vals: &[(i64, i64)]| Distribution::uniform(vals.iter().map(|&(a, b)| rat(a, b)).collect()).unwrap();
        let cells = [
            [d(&[(1, 1)]), d(&[(0, 1), (1, 2)]), d(&[(-1, 1), (2, 1)])],
            [d(&[(0, 1), (1, 2)]), d(&[(1, 3), (1, 1), (0, 1)]), d(&[(1, 4)])],
            [d(&[(-1, 1), (2, 1)]), d(&[(1, 4)]), d(&[(0, 1), (3, 1)])],
        ];
        let h = RandomWeightedGraph::new(alpha, cells.iter().map(|r| r.to_vec()).collect()).unwrap();
        for normalized in [false, true] {
            let f = if normalized {
                HomParameter::density(h.clone())
            } else {
                HomParameter::hom(h.clone())
            };
            for k in 0..=2 {
                let gens = crate::graph::enumerate_k_labeled(k, k + 2, 2).unwrap();
                let gens: Vec<_> = gens.into_iter().take(25).collect();
                let sec = GraphParameter::<Rational>::section(&f, k, &gens).unwrap();
                for i in 0..gens.len() {
                    for j in 0..gens.len() {
                        let direct: Rational = f.eval(&glue_product(&gens[i], &gens[j]).unwrap());
                        assert_eq!(sec.entry(i, j), direct, "k={k} i={i} j={j}");
                    }
                }
            }
        }
    }

    #[test]
    fn multiplicativity_over_disjoint_union() {
        let h = WeightedGraph::new(
            vec![rat(1, 5), rat(4, 5)],
            vec![vec![rat(1, 2), rat(-1, 3)], vec![rat(-1, 3), int(2)]],
        )
        .unwrap();
        let a = family(Family::Cycle(3)).unwrap();
        let b = Multigraph::from_edges(3, 0, &[(0, 1, 2), (1, 2, 1)]).unwrap();
        let u = disjoint_union(&a, &b);
        assert_eq!(density(&u, &h).unwrap(), density(&a, &h).unwrap() * density(&b, &h).unwrap());
    }

    #[test]
    fn elementary_symmetric_values() {
        let xs = [int(1), int(2), int(3)];
        assert_eq!(elementary_symmetric(&xs, 0), int(1));
        assert_eq!(elementary_symmetric(&xs, 2), int(11));
        assert_eq!(elementary_symmetric(&xs, 3), int(6));
        assert_eq!(elementary_symmetric(&xs, 4), int(0));
    }

    #[test]
    fn wide_pattern_falls_back_to_enumeration() {
        // K_6 on a 30-node target exceeds the table limit at width 5.
        let n = 30;
        let beta: Vec<Vec<f64>> = (0..n)
            .map(|i| (0..n).map(|j| if (i + j) % 3 == 0 { 0.5 } else { 1.0 }).collect())
            .collect();
        let h = WeightedGraph::unweighted(beta).unwrap();
        let k3 = family(Family::Complete(3)).unwrap();
        let a: f64 = hom(&k3, &h);
        let b: f64 = hom_brute(&k3, &h);
        assert!((a - b).abs() < 1e-9 * b);
    }
}
