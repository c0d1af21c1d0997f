//! Multigraphs with a labeled node prefix, canonical codes, gluing products,
//! standard families and bounded enumeration.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};

/// Largest node count accepted by canonicalization and enumeration.
pub const NODE_GUARD: usize = 10;

/// Largest number of raw multiplicity assignments `enumerate_k_labeled`
/// is willing to visit.
pub const ENUMERATION_BUDGET: u128 = 20_000_000;

/// Finite loopless multigraph whose nodes `0..labels` carry the labels
/// `1..=labels`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Multigraph {
    nodes: usize,
    labels: usize,
    edges: BTreeMap<(usize, usize), u32>,
}

impl Multigraph {
    /// Edgeless graph. Fails if `labels > nodes`.
    pub fn new(nodes: usize, labels: usize) -> Result<Self> {
        if labels > nodes {
            return Err(Error::TooManyLabels { labels, nodes });
        }
        Ok(Self {
            nodes,
            labels,
            edges: BTreeMap::new(),
        })
    }

    /// Builds a graph from `(u, v, multiplicity)` triples; repeated pairs add up.
    pub fn from_edges(nodes: usize, labels: usize, edges: &[(usize, usize, u32)]) -> Result<Self> {
        let mut g = Self::new(nodes, labels)?;
        for &(u, v, m) in edges {
            g.add_edge(u, v, m)?;
        }
        Ok(g)
    }

    /// The empty graph, unit of the 0-labeled semigroup.
    pub fn empty() -> Self {
        Self {
            nodes: 0,
            labels: 0,
            edges: BTreeMap::new(),
        }
    }

    pub fn add_edge(&mut self, u: usize, v: usize, mult: u32) -> Result<()> {
        if u == v {
            return Err(Error::LoopEdge(u));
        }
        for w in [u, v] {
            if w >= self.nodes {
                return Err(Error::NodeOutOfRange {
                    node: w,
                    nodes: self.nodes,
                });
            }
        }
        if mult == 0 {
            return Ok(());
        }
        *self.edges.entry(key(u, v)).or_insert(0) += mult;
        Ok(())
    }

    pub fn node_count(&self) -> usize {
        self.nodes
    }

    pub fn label_count(&self) -> usize {
        self.labels
    }

    pub fn multiplicity(&self, u: usize, v: usize) -> u32 {
        if u == v {
            return 0;
        }
        self.edges.get(&key(u, v)).copied().unwrap_or(0)
    }

    /// `(u, v, multiplicity)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, u32)> + '_ {
        self.edges.iter().map(|(&(u, v), &m)| (u, v, m))
    }

    /// Number of edges counted with multiplicity.
    pub fn edge_count(&self) -> u32 {
        self.edges.values().sum()
    }

    /// Number of adjacent pairs.
    pub fn distinct_edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn is_simple(&self) -> bool {
        self.edges.values().all(|&m| m == 1)
    }

    /// Degree counted with multiplicity.
    pub fn degree(&self, v: usize) -> u32 {
        self.edges.iter().filter(|((a, b), _)| *a == v || *b == v).map(|(_, m)| *m).sum()
    }

    /// Same graph with a different labeled prefix.
    pub fn with_labels(&self, labels: usize) -> Result<Self> {
        if labels > self.nodes {
            return Err(Error::TooManyLabels { labels, nodes: self.nodes });
        }
        Ok(Self { labels, ..self.clone() })
    }

    pub fn unlabeled(&self) -> Self {
        Self { labels: 0, ..self.clone() }
    }

    /// The simple graph obtained by clamping all multiplicities to 1.
    pub fn suppress_multiplicities(&self) -> Self {
        Self {
            nodes: self.nodes,
            labels: self.labels,
            edges: self.edges.keys().map(|&k| (k, 1)).collect(),
        }
    }

    /// Moves node `i` to position `perm[i]`. The label prefix is kept as a
    /// count, so callers relabeling labeled nodes change which nodes are labeled.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        if perm.len() != self.nodes {
            return Err(Error::Dimension(format!(
                "permutation of length {} for {} nodes",
                perm.len(),
                self.nodes
            )));
        }
        let mut seen = vec![false; self.nodes];
        for &p in perm {
            if p >= self.nodes || std::mem::replace(&mut seen[p], true) {
                return Err(Error::InvalidArgument("not a permutation".into()));
            }
        }
        let edges = self.edges.iter().map(|(&(u, v), &m)| (key(perm[u], perm[v]), m)).collect();
        Ok(Self {
            nodes: self.nodes,
            labels: self.labels,
            edges,
        })
    }

    /// Symmetric multiplicity matrix, row-major.
    pub fn adjacency(&self) -> Vec<u32> {
        let n = self.nodes;
        let mut a = vec![0; n * n];
        for (&(u, v), &m) in &self.edges {
            a[u * n + v] = m;
            a[v * n + u] = m;
        }
        a
    }

    /// Sizes of the connected components (isolated nodes count as components).
    pub fn component_sizes(&self) -> Vec<usize> {
        let mut parent: Vec<usize> = (0..self.nodes).collect();
        fn find(p: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while p[r] != r {
                r = p[r];
            }
            let mut y = x;
            while p[y] != r {
                let nxt = p[y];
                p[y] = r;
                y = nxt;
            }
            r
        }
        for &(u, v) in self.edges.keys() {
            let (a, b) = (find(&mut parent, u), find(&mut parent, v));
            if a != b {
                parent[a] = b;
            }
        }
        let mut sizes = BTreeMap::new();
        for v in 0..self.nodes {
            *sizes.entry(find(&mut parent, v)).or_insert(0) += 1;
        }
        sizes.into_values().collect()
    }
}

fn key(u: usize, v: usize) -> (usize, usize) {
    if u < v {
        (u, v)
    } else {
        (v, u)
    }
}

/// Product of two `k`-labeled graphs: disjoint union followed by identifying
/// equally labeled nodes. Multiplicities between labeled nodes add up.
pub fn glue_product(f1: &Multigraph, f2: &Multigraph) -> Result<Multigraph> {
    if f1.labels != f2.labels {
        return Err(Error::LabelMismatch {
            left: f1.labels,
            right: f2.labels,
        });
    }
    let k = f1.labels;
    let shift = f1.nodes - k;
    let map = |i: usize| if i < k { i } else { i + shift };
    let mut g = Multigraph {
        nodes: f1.nodes + f2.nodes - k,
        labels: k,
        edges: f1.edges.clone(),
    };
    for (&(u, v), &m) in &f2.edges {
        *g.edges.entry(key(map(u), map(v))).or_insert(0) += m;
    }
    Ok(g)
}

/// Gluing product of simple graphs with parallel edges suppressed.
pub fn simple_glue_product(f1: &Multigraph, f2: &Multigraph) -> Result<Multigraph> {
    if !f1.is_simple() || !f2.is_simple() {
        return Err(Error::NotSimple);
    }
    Ok(glue_product(f1, f2)?.suppress_multiplicities())
}

/// Disjoint union; the result is unlabeled.
pub fn disjoint_union(f1: &Multigraph, f2: &Multigraph) -> Multigraph {
    let shift = f1.nodes;
    let mut edges = f1.edges.clone();
    for (&(u, v), &m) in &f2.edges {
        edges.insert((u + shift, v + shift), m);
    }
    Multigraph {
        nodes: f1.nodes + f2.nodes,
        labels: 0,
        edges,
    }
}

/// Replaces every edge copy by a path of length two through a fresh node.
/// Labels are kept; new nodes are appended.
pub fn subdivide(f: &Multigraph) -> Multigraph {
    let mut g = Multigraph {
        nodes: f.nodes + f.edge_count() as usize,
        labels: f.labels,
        edges: BTreeMap::new(),
    };
    let mut next = f.nodes;
    for (u, v, m) in f.edges() {
        for _ in 0..m {
            g.edges.insert((u, next), 1);
            g.edges.insert((v, next), 1);
            next += 1;
        }
    }
    g
}

/// Number of orientations of the edge copies of `f` in which every node has
/// equal in- and out-degree. Exhaustive over `2^|E|` orientations.
pub fn eulerian_orientations(f: &Multigraph) -> Result<u64> {
    let copies: Vec<(usize, usize)> = f.edges().flat_map(|(u, v, m)| std::iter::repeat_n((u, v), m as usize)).collect();
    if copies.len() > 30 {
        return Err(Error::GuardExceeded {
            what: "edge copies",
            value: copies.len() as u128,
            limit: 30,
        });
    }
    let mut count = 0;
    let mut balance = vec![0i32; f.nodes];
    for mask in 0u64..(1u64 << copies.len()) {
        balance.iter_mut().for_each(|b| *b = 0);
        for (i, &(u, v)) in copies.iter().enumerate() {
            let (from, to) = if mask >> i & 1 == 1 { (v, u) } else { (u, v) };
            balance[from] += 1;
            balance[to] -= 1;
        }
        if balance.iter().all(|&b| b == 0) {
            count += 1;
        }
    }
    Ok(count)
}

/// Whether isomorphisms must fix the labeled nodes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CodeMode {
    LabelsFixed,
    LabelsFree,
}

/// Total-ordering isomorphism key. Two graphs get the same code iff they are
/// isomorphic under the code's mode.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CanonicalCode {
    nodes: usize,
    labels: usize,
    mode: CodeMode,
    code: Vec<u32>,
}

impl CanonicalCode {
    pub fn mode(&self) -> CodeMode {
        self.mode
    }
    pub fn node_count(&self) -> usize {
        self.nodes
    }
}

pub fn canonical_code(f: &Multigraph, mode: CodeMode) -> Result<CanonicalCode> {
    Ok(canonical_form(f, mode)?.0)
}

/// Canonical code together with the representative graph in canonical order.
pub fn canonical_form(f: &Multigraph, mode: CodeMode) -> Result<(CanonicalCode, Multigraph)> {
    let n = f.nodes;
    if n > NODE_GUARD {
        return Err(Error::GuardExceeded {
            what: "node count",
            value: n as u128,
            limit: NODE_GUARD as u128,
        });
    }
    let fixed = match mode {
        CodeMode::LabelsFixed => f.labels,
        CodeMode::LabelsFree => 0,
    };
    let adj = f.adjacency();

    // Isomorphism-invariant node key used to split free nodes into classes.
    let invariant = |v: usize| -> Vec<u32> {
        let mut inv: Vec<u32> = (0..fixed).map(|l| adj[v * n + l]).collect();
        let mut incident: Vec<u32> = (0..n).map(|w| adj[v * n + w]).filter(|&m| m > 0).collect();
        incident.sort_unstable_by(|a, b| b.cmp(a));
        inv.push(incident.iter().sum());
        inv.push(incident.len() as u32);
        inv.extend(incident);
        inv
    };
    let mut free: Vec<(Vec<u32>, usize)> = (fixed..n).map(|v| (invariant(v), v)).collect();
    free.sort();
    // class_of_position[p] = invariant required at position p
    let slot_inv: Vec<Vec<u32>> = free.iter().map(|(inv, _)| inv.clone()).collect();
    let free_nodes: Vec<(Vec<u32>, usize)> = free;

    let mut order: Vec<usize> = (0..fixed).collect();
    let mut used = vec![false; free_nodes.len()];
    let mut best: Option<(Vec<u32>, Vec<usize>)> = None;
    let mut current: Vec<u32> = Vec::with_capacity(n * n.saturating_sub(1) / 2);
    // prefix for fixed nodes
    for p in 1..fixed {
        for i in 0..p {
            current.push(adj[order[i] * n + order[p]]);
        }
    }
    search(&adj, n, &slot_inv, &free_nodes, &mut used, &mut order, &mut current, &mut best);
    let (code, order) = best.unwrap_or_else(|| (current.clone(), order.clone()));
    // order[p] = old node placed at position p
    let mut perm = vec![0; n];
    for (p, &old) in order.iter().enumerate() {
        perm[old] = p;
    }
    let rep = f.permuted(&perm)?;
    Ok((
        CanonicalCode {
            nodes: n,
            labels: fixed,
            mode,
            code,
        },
        rep,
    ))
}

// Column-major upper triangle: placing position p appends entries (0,p)..(p-1,p),
// so prefixes can be compared against the best code found so far.
#[allow(clippy::too_many_arguments)]
fn search(
    adj: &[u32],
    n: usize,
    slot_inv: &[Vec<u32>],
    free_nodes: &[(Vec<u32>, usize)],
    used: &mut [bool],
    order: &mut Vec<usize>,
    current: &mut Vec<u32>,
    best: &mut Option<(Vec<u32>, Vec<usize>)>,
) {
    let p = order.len();
    if p == n {
        if best.as_ref().is_none_or(|(b, _)| *current < *b) {
            *best = Some((current.clone(), order.clone()));
        }
        return;
    }
    let fixed = n - slot_inv.len();
    let want = &slot_inv[p - fixed];
    for idx in 0..free_nodes.len() {
        if used[idx] || free_nodes[idx].0 != *want {
            continue;
        }
        let v = free_nodes[idx].1;
        let before = current.len();
        for &u in order.iter() {
            current.push(adj[u * n + v]);
        }
        let prune = match best {
            Some((b, _)) => current[..] > b[..current.len()],
            None => false,
        };
        if !prune {
            used[idx] = true;
            order.push(v);
            search(adj, n, slot_inv, free_nodes, used, order, current, best);
            order.pop();
            used[idx] = false;
        }
        current.truncate(before);
    }
}

/// Standard graph families.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Family {
    /// `K_2^n`: two nodes joined by `n` parallel edges.
    MultiEdge(u32),
    /// `C_n`, `n >= 2`; `C_2` is the double edge.
    Cycle(usize),
    /// `K_{a,b}`; the side of size `a` comes first.
    CompleteBipartite(usize, usize),
    /// Complete simple graph `K_n`.
    Complete(usize),
    /// Path on `n` nodes (`n - 1` edges).
    Path(usize),
    /// `n` isolated nodes.
    Edgeless(usize),
    /// Single node.
    K1,
}

pub fn family(kind: Family) -> Result<Multigraph> {
    match kind {
        Family::MultiEdge(m) => Multigraph::from_edges(2, 0, &[(0, 1, m)]),
        Family::Cycle(n) => {
            if n < 2 {
                return Err(Error::InvalidFamily(format!("C_{n} would need a loop; cycles start at n = 2")));
            }
            let edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n, 1)).collect();
            Multigraph::from_edges(n, 0, &edges)
        }
        Family::CompleteBipartite(a, b) => {
            let mut edges = Vec::with_capacity(a * b);
            for i in 0..a {
                for j in 0..b {
                    edges.push((i, a + j, 1));
                }
            }
            Multigraph::from_edges(a + b, 0, &edges)
        }
        Family::Complete(n) => {
            let mut edges = Vec::new();
            for i in 0..n {
                for j in i + 1..n {
                    edges.push((i, j, 1));
                }
            }
            Multigraph::from_edges(n, 0, &edges)
        }
        Family::Path(n) => {
            let edges: Vec<_> = (1..n).map(|i| (i - 1, i, 1)).collect();
            Multigraph::from_edges(n, 0, &edges)
        }
        Family::Edgeless(n) => Multigraph::new(n, 0),
        Family::K1 => Multigraph::new(1, 0),
    }
}

/// `z_{1,2}^m`: two labeled nodes joined by `m` edges.
pub fn labeled_multi_edge(m: u32) -> Multigraph {
    Multigraph::from_edges(2, 2, &[(0, 1, m)]).expect("valid")
}

/// `P_{a;i}`: path of length `a` whose edges are `mult`-fold, endpoints
/// labeled 1 and 2. Requires `a >= 1`.
pub fn labeled_path(a: usize, mult: u32) -> Result<Multigraph> {
    if a == 0 {
        return Err(Error::InvalidFamily("labeled path needs length >= 1".into()));
    }
    // nodes: 0 and 1 are the labeled endpoints, 2..a+1 are interior
    let mut seq = vec![0];
    seq.extend(2..a + 1);
    seq.push(1);
    let edges: Vec<_> = seq.windows(2).map(|w| (w[0], w[1], mult)).collect();
    Multigraph::from_edges(a + 1, 2, &edges)
}

/// `K_{a;i}`: `K_{2,a}` with `mult`-fold edges and the two-node side labeled.
pub fn labeled_theta(a: usize, mult: u32) -> Multigraph {
    let mut edges = Vec::with_capacity(2 * a);
    for j in 0..a {
        edges.push((0, 2 + j, mult));
        edges.push((1, 2 + j, mult));
    }
    Multigraph::from_edges(a + 2, 2, &edges).expect("valid")
}

/// One canonical representative per labels-fixed isomorphism class of
/// `k`-labeled multigraphs with at most `max_nodes` nodes and multiplicities
/// at most `max_multiplicity`. Ordered by node count, then canonical code.
pub fn enumerate_k_labeled(k: usize, max_nodes: usize, max_multiplicity: u32) -> Result<Vec<Multigraph>> {
    if max_nodes > NODE_GUARD {
        return Err(Error::GuardExceeded {
            what: "max_nodes",
            value: max_nodes as u128,
            limit: NODE_GUARD as u128,
        });
    }
    let mut out = Vec::new();
    let base = max_multiplicity as u128 + 1;
    for n in k..=max_nodes {
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|v| (0..v).map(move |u| (u, v))).collect();
        let total = base.checked_pow(pairs.len() as u32).unwrap_or(u128::MAX);
        if total > ENUMERATION_BUDGET {
            return Err(Error::GuardExceeded {
                what: "multiplicity assignments",
                value: total,
                limit: ENUMERATION_BUDGET,
            });
        }
        let mut classes: BTreeMap<CanonicalCode, Multigraph> = BTreeMap::new();
        let mut digits = vec![0u32; pairs.len()];
        loop {
            let mut g = Multigraph::new(n, k)?;
            for (d, &(u, v)) in digits.iter().zip(&pairs) {
                if *d > 0 {
                    g.edges.insert((u, v), *d);
                }
            }
            let (code, rep) = canonical_form(&g, CodeMode::LabelsFixed)?;
            classes.entry(code).or_insert(rep);
            // odometer
            let mut i = 0;
            while i < digits.len() {
                digits[i] += 1;
                if digits[i] <= max_multiplicity {
                    break;
                }
                digits[i] = 0;
                i += 1;
            }
            if i == digits.len() {
                break;
            }
        }
        out.extend(classes.into_values());
    }
    Ok(out)
}

/// All simple graphs on the node set of `f` that contain `f`.
pub fn simple_supergraphs(f: &Multigraph) -> Result<Vec<Multigraph>> {
    if !f.is_simple() {
        return Err(Error::NotSimple);
    }
    let n = f.nodes;
    let missing: Vec<(usize, usize)> = (0..n)
        .flat_map(|v| (0..v).map(move |u| (u, v)))
        .filter(|&(u, v)| f.multiplicity(u, v) == 0)
        .collect();
    if missing.len() > 20 {
        return Err(Error::GuardExceeded {
            what: "missing pairs",
            value: missing.len() as u128,
            limit: 20,
        });
    }
    let mut out = Vec::with_capacity(1 << missing.len());
    for mask in 0u32..(1u32 << missing.len()) {
        let mut g = f.clone();
        for (i, &(u, v)) in missing.iter().enumerate() {
            if mask >> i & 1 == 1 {
                g.edges.insert((u, v), 1);
            }
        }
        out.push(g);
    }
    Ok(out)
}

/// Set partitions of `0..n` as block-index vectors in restricted-growth form.
pub(crate) fn set_partitions(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = vec![0usize; n];
    fn rec(i: usize, max_block: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if i == cur.len() {
            out.push(cur.clone());
            return;
        }
        for b in 0..=max_block {
            cur[i] = b;
            rec(i + 1, max_block.max(b + 1), cur, out);
        }
    }
    if n == 0 {
        out.push(Vec::new());
    } else {
        rec(1, 1, &mut cur, &mut out);
    }
    out
}

/// Node-index sets touched by edges, for display.
pub fn support(f: &Multigraph) -> BTreeSet<usize> {
    f.edges().flat_map(|(u, v, _)| [u, v]).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn code(g: &Multigraph, mode: CodeMode) -> CanonicalCode {
        canonical_code(g, mode).unwrap()
    }

    #[test]
    fn rejects_loops_and_bad_labels() {
        assert_eq!(Multigraph::from_edges(2, 0, &[(1, 1, 1)]), Err(Error::LoopEdge(1)));
        assert!(Multigraph::new(1, 2).is_err());
        assert!(Multigraph::from_edges(2, 0, &[(0, 2, 1)]).is_err());
    }

    #[test]
    fn generator_squared_is_double_edge() {
        let z = labeled_multi_edge(1);
        let sq = glue_product(&z, &z).unwrap();
        assert_eq!(sq, labeled_multi_edge(2));
        assert_eq!(simple_glue_product(&z, &z).unwrap(), z);
    }

    #[test]
    fn edgeless_labeled_graph_is_unit() {
        let f = Multigraph::from_edges(4, 2, &[(0, 2, 2), (2, 3, 1), (1, 3, 1)]).unwrap();
        let e = Multigraph::new(2, 2).unwrap();
        assert_eq!(glue_product(&f, &e).unwrap(), f);
        assert_eq!(glue_product(&e, &f).unwrap().node_count(), 4);
    }

    #[test]
    fn two_labeled_paths_glue_to_c4() {
        let p = labeled_path(2, 1).unwrap();
        let c = glue_product(&p, &p).unwrap();
        assert_eq!(
            code(&c, CodeMode::LabelsFree),
            code(&family(Family::Cycle(4)).unwrap(), CodeMode::LabelsFree)
        );
    }

    #[test]
    fn cherries_glue_without_doubled_edges() {
        // cherry: labeled nodes 0,1 both joined to unlabeled node 2
        let cherry = Multigraph::from_edges(3, 2, &[(0, 2, 1), (1, 2, 1)]).unwrap();
        let g = simple_glue_product(&cherry, &cherry).unwrap();
        assert!(g.is_simple());
        assert_eq!(
            code(&g, CodeMode::LabelsFree),
            code(&family(Family::CompleteBipartite(2, 2)).unwrap(), CodeMode::LabelsFree)
        );
        // with k = 0 the simple product is the disjoint union
        let a = family(Family::Path(3)).unwrap();
        let b = family(Family::K1).unwrap();
        assert_eq!(simple_glue_product(&a, &b).unwrap(), disjoint_union(&a, &b));
        let dbl = labeled_multi_edge(2);
        assert_eq!(simple_glue_product(&dbl, &dbl), Err(Error::NotSimple));
        assert!(glue_product(&dbl, &cherry.with_labels(1).unwrap()).is_err());
    }

    #[test]
    fn disjoint_unions() {
        let k1 = family(Family::K1).unwrap();
        let u = disjoint_union(&k1, &k1);
        assert_eq!((u.node_count(), u.edge_count()), (2, 0));
        let z = labeled_multi_edge(1);
        assert_eq!(disjoint_union(&z, &Multigraph::empty()), z.unlabeled());
        let g = disjoint_union(&family(Family::MultiEdge(1)).unwrap(), &family(Family::MultiEdge(2)).unwrap());
        assert_eq!(g.node_count(), 4);
        assert_eq!(g.edges().collect::<Vec<_>>(), vec![(0, 1, 1), (2, 3, 2)]);
    }

    #[test]
    fn canonical_codes() {
        let k3 = family(Family::Complete(3)).unwrap();
        let k3b = k3.permuted(&[2, 0, 1]).unwrap();
        assert_eq!(code(&k3, CodeMode::LabelsFree), code(&k3b, CodeMode::LabelsFree));
        assert_ne!(
            code(&family(Family::Cycle(4)).unwrap(), CodeMode::LabelsFree),
            code(&family(Family::Cycle(2)).unwrap(), CodeMode::LabelsFree)
        );
        // labels matter in fixed mode: pendant edge at label 1 vs label 2
        let a = Multigraph::from_edges(3, 2, &[(0, 2, 1)]).unwrap();
        let b = Multigraph::from_edges(3, 2, &[(1, 2, 1)]).unwrap();
        assert_ne!(code(&a, CodeMode::LabelsFixed), code(&b, CodeMode::LabelsFixed));
        assert_eq!(code(&a, CodeMode::LabelsFree), code(&b, CodeMode::LabelsFree));
        assert!(canonical_code(&Multigraph::new(11, 0).unwrap(), CodeMode::LabelsFree).is_err());
    }

    #[test]
    fn subdivisions() {
        let p = subdivide(&family(Family::MultiEdge(1)).unwrap());
        assert_eq!(
            code(&p, CodeMode::LabelsFree),
            code(&family(Family::Path(3)).unwrap(), CodeMode::LabelsFree)
        );
        for n in 2..6 {
            let s = subdivide(&family(Family::Cycle(n)).unwrap());
            assert_eq!(
                code(&s, CodeMode::LabelsFree),
                code(&family(Family::Cycle(2 * n)).unwrap(), CodeMode::LabelsFree)
            );
        }
        let s = subdivide(&family(Family::MultiEdge(2)).unwrap());
        assert!(s.is_simple());
        assert_eq!(
            code(&s, CodeMode::LabelsFree),
            code(&family(Family::Cycle(4)).unwrap(), CodeMode::LabelsFree)
        );
    }

    #[test]
    fn families() {
        let k20 = family(Family::MultiEdge(0)).unwrap();
        assert_eq!((k20.node_count(), k20.edge_count()), (2, 0));
        assert_eq!(family(Family::Cycle(2)).unwrap(), family(Family::MultiEdge(2)).unwrap());
        assert!(matches!(family(Family::Cycle(1)), Err(Error::InvalidFamily(_))));
        assert!(family(Family::Cycle(0)).is_err());
        let k12 = family(Family::CompleteBipartite(1, 2)).unwrap();
        assert_eq!(
            code(&k12, CodeMode::LabelsFree),
            code(&family(Family::Path(3)).unwrap(), CodeMode::LabelsFree)
        );
        let k02 = family(Family::CompleteBipartite(0, 2)).unwrap();
        assert_eq!((k02.node_count(), k02.edge_count()), (2, 0));
    }

    #[test]
    fn small_enumerations() {
        let g = enumerate_k_labeled(0, 2, 1).unwrap();
        assert_eq!(g.len(), 4);
        let g = enumerate_k_labeled(2, 2, 2).unwrap();
        assert_eq!(
            g,
            vec![Multigraph::new(2, 2).unwrap(), labeled_multi_edge(1), labeled_multi_edge(2)]
        );
        assert_eq!(enumerate_k_labeled(0, 0, 3).unwrap(), vec![Multigraph::empty()]);
        assert!(enumerate_k_labeled(0, 11, 1).is_err());
    }

    #[test]
    fn enumeration_is_deterministic_and_duplicate_free() {
        let a = enumerate_k_labeled(1, 4, 2).unwrap();
        let b = enumerate_k_labeled(1, 4, 2).unwrap();
        assert_eq!(a, b);
        let codes: BTreeSet<_> = a.iter().map(|g| code(g, CodeMode::LabelsFixed)).collect();
        assert_eq!(codes.len(), a.len());
        // simple unlabeled graphs on 4 nodes: 11 classes
        let simple4 = enumerate_k_labeled(0, 4, 1).unwrap();
        assert_eq!(simple4.iter().filter(|g| g.node_count() == 4).count(), 11);
    }

    #[test]
    fn eulerian_counts() {
        assert_eq!(eulerian_orientations(&family(Family::Cycle(4)).unwrap()).unwrap(), 2);
        assert_eq!(eulerian_orientations(&family(Family::MultiEdge(2)).unwrap()).unwrap(), 2);
        assert_eq!(eulerian_orientations(&family(Family::Complete(4)).unwrap()).unwrap(), 0);
        // K_5 is 4-regular: 24 eulerian orientations
        assert_eq!(eulerian_orientations(&family(Family::Complete(5)).unwrap()).unwrap(), 24);
    }

    #[test]
    fn bell_numbers() {
        let bells: Vec<usize> = (0..7).map(|n| set_partitions(n).len()).collect();
        assert_eq!(bells, vec![1, 1, 2, 5, 15, 52, 203]);
    }

    fn arb_graph(max_nodes: usize, max_mult: u32) -> impl Strategy<Value = Multigraph> {
        (1..=max_nodes)
            .prop_flat_map(move |n| {
                let pairs = n * (n - 1) / 2;
                (Just(n), 0..=n, proptest::collection::vec(0..=max_mult, pairs))
            })
            .prop_map(|(n, k, mults)| {
                let mut g = Multigraph::new(n, k).unwrap();
                let mut it = mults.into_iter();
                for v in 0..n {
                    for u in 0..v {
                        g.add_edge(u, v, it.next().unwrap()).unwrap();
                    }
                }
                g
            })
    }

    proptest! {
        #[test]
        fn code_invariant_under_permutation(g in arb_graph(6, 3), seed in any::<u64>()) {
            use rand::{seq::SliceRandom, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let n = g.node_count();
            let mut perm: Vec<usize> = (0..n).collect();
            perm.shuffle(&mut rng);
            let h = g.permuted(&perm).unwrap();
            prop_assert_eq!(code(&g, CodeMode::LabelsFree), code(&h, CodeMode::LabelsFree));
            // permuting only unlabeled nodes preserves the labels-fixed code
            let k = g.label_count();
            let mut tail: Vec<usize> = (k..n).collect();
            tail.shuffle(&mut rng);
            let perm2: Vec<usize> = (0..k).chain(tail).collect();
            let h2 = g.permuted(&perm2).unwrap();
            prop_assert_eq!(code(&g, CodeMode::LabelsFixed), code(&h2, CodeMode::LabelsFixed));
        }

        #[test]
        fn glue_is_commutative_associative_and_additive(
            a in arb_graph(3, 2), b in arb_graph(3, 2), c in arb_graph(3, 2), k in 0usize..=2
        ) {
            prop_assume!(a.node_count() >= k && b.node_count() >= k && c.node_count() >= k);
            let (a, b, c) = (a.with_labels(k).unwrap(), b.with_labels(k).unwrap(), c.with_labels(k).unwrap());
            let ab = glue_product(&a, &b).unwrap();
            let ba = glue_product(&b, &a).unwrap();
            prop_assert_eq!(code(&ab, CodeMode::LabelsFixed), code(&ba, CodeMode::LabelsFixed));
            let l = glue_product(&ab, &c).unwrap();
            let r = glue_product(&a, &glue_product(&b, &c).unwrap()).unwrap();
            prop_assert_eq!(code(&l, CodeMode::LabelsFixed), code(&r, CodeMode::LabelsFixed));
            prop_assert_eq!(ab.node_count(), a.node_count() + b.node_count() - k);
            for v in 0..k {
                for u in 0..v {
                    prop_assert_eq!(ab.multiplicity(u, v), a.multiplicity(u, v) + b.multiplicity(u, v));
                }
            }
        }

        #[test]
        fn subdivision_doubles_edge_count(g in arb_graph(5, 3)) {
            let s = subdivide(&g);
            prop_assert_eq!(s.edge_count(), 2 * g.edge_count());
            prop_assert!(s.is_simple());
        }
    }
}
