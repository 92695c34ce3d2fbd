//! (r,n)-graphs: the combinatorial model of the r-braid intersection lattice,
//! and set partitions for the braid arrangement.
//!
//! An edge `(i, j, k)` with `i <= j` stands for the hyperplane `x_i = ζ^k x_j`;
//! self-edges `(i, i, k)` with `k != 0` stand for `x_i = 0`.

use std::collections::BTreeSet;
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arrangement::{rbraid_form, ArrangementKind};
use crate::lattice::{FlatId, IntersectionLattice};
use crate::linalg::CanonicalRowSpace;
use crate::poset::Poset;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("edge ({i}, {j}, {k}) is out of range for an ({r},{n})-graph")]
    BadEdge { i: usize, j: usize, k: u32, r: u32, n: usize },
    #[error("graphs have different (r, n)")]
    Mismatch,
    #[error("the arrangement is not an r-braid arrangement")]
    NotRBraid,
    #[error("the arrangement is not a braid arrangement")]
    NotBraid,
    #[error("need r >= 2 and n >= 1")]
    BadParameters,
    #[error("{count} graphs exceed the cap of {cap}")]
    Cap { count: u128, cap: u128 },
    #[error("invalid graph: {0}")]
    Invalid(Violation),
    #[error("not a set partition of {{0, ..., {n}}}")]
    BadPartition { n: usize },
}

/// An edge-labeled multigraph on vertices `1..=n` with labels in `Z_r`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RnGraph {
    r: u32,
    n: usize,
    edges: BTreeSet<(usize, usize, u32)>,
}

/// JSON form `{ "r", "n", "edges": [[i, j, k], ...] }`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphJson {
    pub r: u32,
    pub n: usize,
    pub edges: Vec<[u64; 3]>,
}

impl RnGraph {
    pub fn edgeless(r: u32, n: usize) -> Self {
        RnGraph {
            r,
            n,
            edges: BTreeSet::new(),
        }
    }

    /// Builds a graph from `(i, j, k)` triples; `(j, i, k)` with `j > i` is
    /// stored as `(i, j, -k)`.
    pub fn from_edges(r: u32, n: usize, edges: impl IntoIterator<Item = (usize, usize, u32)>) -> Result<Self, GraphError> {
        let mut g = Self::edgeless(r, n);
        for (i, j, k) in edges {
            g.add_edge(i, j, k)?;
        }
        Ok(g)
    }

    pub fn add_edge(&mut self, i: usize, j: usize, k: u32) -> Result<(), GraphError> {
        let (r, n) = (self.r, self.n);
        let bad = GraphError::BadEdge { i, j, k, r, n };
        if i == 0 || j == 0 || i > n || j > n || k >= r || (i == j && k == 0) {
            return Err(bad);
        }
        let edge = if i <= j { (i, j, k) } else { (j, i, (r - k) % r) };
        self.edges.insert(edge);
        Ok(())
    }

    /// The complete r-flower on `vertices`.
    pub fn flower(r: u32, n: usize, vertices: &[usize]) -> Result<Self, GraphError> {
        let mut g = Self::edgeless(r, n);
        for (a, &i) in vertices.iter().enumerate() {
            for k in 1..r {
                g.add_edge(i, i, k)?;
            }
            for &j in &vertices[a + 1..] {
                for k in 0..r {
                    g.add_edge(i.min(j), i.max(j), k)?;
                }
            }
        }
        Ok(g)
    }

    pub fn r(&self) -> u32 {
        self.r
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &BTreeSet<(usize, usize, u32)> {
        &self.edges
    }

    pub fn is_edgeless(&self) -> bool {
        self.edges.is_empty()
    }

    /// Labels on the edges between `i <= j`.
    pub fn labels(&self, i: usize, j: usize) -> Vec<u32> {
        self.edges
            .range((i, j, 0)..=(i, j, u32::MAX))
            .map(|&(_, _, k)| k)
            .collect()
    }

    pub fn to_json(&self) -> GraphJson {
        GraphJson {
            r: self.r,
            n: self.n,
            edges: self.edges.iter().map(|&(i, j, k)| [i as u64, j as u64, k as u64]).collect(),
        }
    }

    pub fn from_json(json: &GraphJson) -> Result<Self, GraphError> {
        Self::from_edges(
            json.r,
            json.n,
            json.edges.iter().map(|e| (e[0] as usize, e[1] as usize, e[2] as u32)),
        )
    }
}

/// First condition of the (r,n)-graph definition that a graph violates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    /// More than one component has self-edges or parallel edges.
    SecondFlower { first: usize, second: usize },
    /// Vertex `vertex` of the flower component lacks some self-edge label.
    FlowerSelfEdges { vertex: usize },
    /// The pair `(i, j)` in the flower component lacks some label.
    FlowerPair { i: usize, j: usize },
    /// `i` and `j` share a simple component but are not adjacent.
    NotComplete { i: usize, j: usize },
    /// `k_{i1 i3} != k_{i1 i2} + k_{i2 i3} (mod r)`.
    Incompatible { i1: usize, i2: usize, i3: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::SecondFlower { first, second } => {
                write!(f, "vertices {first} and {second} lie in two different non-simple components")
            }
            Violation::FlowerSelfEdges { vertex } => {
                write!(f, "flower vertex {vertex} does not carry self-edges labeled 1..r-1")
            }
            Violation::FlowerPair { i, j } => write!(f, "flower pair ({i}, {j}) does not carry all r labels"),
            Violation::NotComplete { i, j } => write!(f, "component is not complete: no edge between {i} and {j}"),
            Violation::Incompatible { i1, i2, i3 } => write!(f, "labels on ({i1}, {i2}, {i3}) are not compatible"),
        }
    }
}

/// A connected component of the underlying graph.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Component {
    pub vertices: Vec<usize>,
    /// Has at least one edge, self-edges included.
    pub nontrivial: bool,
    /// Has a self-edge or parallel edges.
    pub flower: bool,
}

/// Connected components in order of their smallest vertex.
pub fn components(g: &RnGraph) -> Vec<Component> {
    let n = g.n;
    let mut parent: Vec<usize> = (0..=n).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for &(i, j, _) in &g.edges {
        let (a, b) = (find(&mut parent, i), find(&mut parent, j));
        if a != b {
            parent[a.max(b)] = a.min(b);
        }
    }
    let mut groups: Vec<Vec<usize>> = vec![Vec::new(); n + 1];
    for v in 1..=n {
        let root = find(&mut parent, v);
        groups[root].push(v);
    }
    groups
        .into_iter()
        .filter(|vs| !vs.is_empty())
        .map(|vertices| {
            let inside = |&(i, _, _): &&(usize, usize, u32)| vertices.binary_search(i).is_ok();
            let edges: Vec<&(usize, usize, u32)> = g.edges.iter().filter(inside).collect();
            let flower = edges
                .iter()
                .any(|&&(i, j, _)| i == j || g.labels(i, j).len() > 1);
            Component {
                nontrivial: !edges.is_empty(),
                flower,
                vertices,
            }
        })
        .collect()
}

/// Components with at least one edge.
pub fn nontrivial_components(g: &RnGraph) -> Vec<Component> {
    components(g).into_iter().filter(|c| c.nontrivial).collect()
}

/// Checks both conditions of the (r,n)-graph definition.
pub fn validate_rn_graph(g: &RnGraph) -> Result<(), Violation> {
    let r = g.r;
    let mut flower_seen: Option<usize> = None;
    for c in components(g) {
        let vs = &c.vertices;
        if c.flower {
            if let Some(first) = flower_seen {
                return Err(Violation::SecondFlower { first, second: vs[0] });
            }
            flower_seen = Some(vs[0]);
            let all_self: Vec<u32> = (1..r).collect();
            let all_labels: Vec<u32> = (0..r).collect();
            for (a, &i) in vs.iter().enumerate() {
                if g.labels(i, i) != all_self {
                    return Err(Violation::FlowerSelfEdges { vertex: i });
                }
                for &j in &vs[a + 1..] {
                    if g.labels(i, j) != all_labels {
                        return Err(Violation::FlowerPair { i, j });
                    }
                }
            }
            continue;
        }
        for (a, &i) in vs.iter().enumerate() {
            for &j in &vs[a + 1..] {
                if g.labels(i, j).is_empty() {
                    return Err(Violation::NotComplete { i, j });
                }
            }
        }
        let label = |i: usize, j: usize| g.labels(i, j)[0];
        for (a, &i1) in vs.iter().enumerate() {
            for (b, &i2) in vs.iter().enumerate().skip(a + 1) {
                for &i3 in &vs[b + 1..] {
                    if label(i1, i3) != (label(i1, i2) + label(i2, i3)) % r {
                        return Err(Violation::Incompatible { i1, i2, i3 });
                    }
                }
            }
        }
    }
    Ok(())
}

/// Label-respecting edge inclusion.
pub fn gamma_leq(g: &RnGraph, h: &RnGraph) -> Result<bool, GraphError> {
    if g.r != h.r || g.n != h.n {
        return Err(GraphError::Mismatch);
    }
    Ok(g.edges.is_subset(&h.edges))
}

fn binomial(n: u128, k: u128) -> u128 {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

/// Σ over set partitions of an m-set of ∏ r^{|block| - 1}, for m = 0..=max.
pub fn weighted_bell_numbers(r: u32, max: usize) -> Vec<u128> {
    let r = r as u128;
    let mut b = vec![1u128];
    for m in 0..max {
        // the block holding a new element picks j companions, each labeled
        let next = (0..=m)
            .map(|j| binomial(m as u128, j as u128) * r.pow(j as u32) * b[m - j])
            .sum();
        b.push(next);
    }
    b
}

/// Number of (r,n)-graphs: Σ_{Z ⊆ [n]} B_r(n - |Z|).
pub fn rn_graph_count(r: u32, n: usize) -> u128 {
    let b = weighted_bell_numbers(r, n);
    (0..=n).map(|z| binomial(n as u128, z as u128) * b[n - z]).sum()
}

/// Set partitions of `items` as restricted growth strings, in lexicographic order.
fn set_partitions(items: &[usize]) -> Vec<Vec<Vec<usize>>> {
    let m = items.len();
    let mut out = Vec::new();
    let mut rgs = vec![0usize; m];
    loop {
        let blocks = rgs.iter().copied().max().map_or(0, |x| x + 1);
        let mut parts = vec![Vec::new(); blocks];
        for (idx, &b) in rgs.iter().enumerate() {
            parts[b].push(items[idx]);
        }
        out.push(parts);
        // next restricted growth string
        let mut i = m;
        loop {
            if i <= 1 {
                return out;
            }
            i -= 1;
            let prefix_max = rgs[..i].iter().copied().max().unwrap_or(0);
            if rgs[i] <= prefix_max {
                rgs[i] += 1;
                for x in rgs[i + 1..].iter_mut() {
                    *x = 0;
                }
                break;
            }
        }
    }
}

/// Every (r,n)-graph exactly once. Order: flower set Z by bitmask, then set
/// partitions of the remaining vertices, then vertex potentials per block
/// (first vertex fixed to 0), with `k_ij = b(i) - b(j) mod r` for `i < j`.
pub fn enumerate_rn_graphs(r: u32, n: usize, cap: u128) -> Result<Vec<RnGraph>, GraphError> {
    if r < 2 || n == 0 {
        return Err(GraphError::BadParameters);
    }
    let count = rn_graph_count(r, n);
    if count > cap {
        return Err(GraphError::Cap { count, cap });
    }
    let per_flower: Vec<Vec<RnGraph>> = (0u64..1 << n)
        .into_par_iter()
        .map(|mask| graphs_with_flower(r, n, mask))
        .collect::<Result<_, _>>()?;
    Ok(per_flower.into_iter().flatten().collect())
}

fn graphs_with_flower(r: u32, n: usize, mask: u64) -> Result<Vec<RnGraph>, GraphError> {
    let mut out = Vec::new();
    let z: Vec<usize> = (1..=n).filter(|v| mask >> (v - 1) & 1 == 1).collect();
    let rest: Vec<usize> = (1..=n).filter(|v| mask >> (v - 1) & 1 == 0).collect();
    let base = RnGraph::flower(r, n, &z)?;
    for partition in set_partitions(&rest) {
        let free: usize = partition.iter().map(|b| b.len() - 1).sum();
        for code in 0..(r as u64).pow(free as u32) {
            let mut g = base.clone();
            let mut c = code;
            for block in &partition {
                let mut potential = vec![0u32; block.len()];
                for p in potential.iter_mut().skip(1) {
                    *p = (c % r as u64) as u32;
                    c /= r as u64;
                }
                for a in 0..block.len() {
                    for b in a + 1..block.len() {
                        let k = (potential[a] + r - potential[b]) % r;
                        g.add_edge(block[a], block[b], k)?;
                    }
                }
            }
            out.push(g);
        }
    }
    Ok(out)
}

/// The poset Γ of all (r,n)-graphs under label-respecting edge inclusion.
#[derive(Debug, Clone)]
pub struct GammaPoset {
    pub graphs: Vec<RnGraph>,
}

impl GammaPoset {
    pub fn new(r: u32, n: usize, cap: u128) -> Result<Self, GraphError> {
        Ok(GammaPoset {
            graphs: enumerate_rn_graphs(r, n, cap)?,
        })
    }

    pub fn len(&self) -> usize {
        self.graphs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.graphs.is_empty()
    }

    pub fn leq(&self, a: usize, b: usize) -> bool {
        self.graphs[a].edges.is_subset(&self.graphs[b].edges)
    }

    pub fn to_poset(&self) -> Poset {
        Poset::from_relation(self.len(), |a, b| self.leq(a, b))
    }
}

fn require_rbraid(lat: &IntersectionLattice) -> Result<(u32, usize), GraphError> {
    let arr = lat.arrangement();
    if arr.kind() != ArrangementKind::RBraid {
        return Err(GraphError::NotRBraid);
    }
    Ok((arr.root_order(), arr.ambient_dim()))
}

/// The graph with an edge `(i, j, k)` whenever the flat lies in `x_i = ζ^k x_j`.
pub fn graph_of_flat(lat: &IntersectionLattice, x: FlatId) -> Result<RnGraph, GraphError> {
    let (r, n) = require_rbraid(lat)?;
    let eqs = &lat.flat(x).equations;
    let mut g = RnGraph::edgeless(r, n);
    for i in 1..=n {
        for j in i..=n {
            for k in 0..r {
                if i == j && k == 0 {
                    continue;
                }
                if eqs.contains_vector(&rbraid_form(r, n, i, j, k as i64)) {
                    g.edges.insert((i, j, k));
                }
            }
        }
    }
    Ok(g)
}

/// The flat cut out by the hyperplanes of all labeled edges.
pub fn flat_of_graph(lat: &IntersectionLattice, g: &RnGraph) -> Result<FlatId, GraphError> {
    let (r, n) = require_rbraid(lat)?;
    if g.r != r || g.n != n {
        return Err(GraphError::Mismatch);
    }
    validate_rn_graph(g).map_err(GraphError::Invalid)?;
    let eqs = g
        .edges
        .iter()
        .fold(CanonicalRowSpace::empty(r, n), |acc, &(i, j, k)| {
            acc.with_row(&rbraid_form(r, n, i, j, k as i64))
        });
    Ok(lat.find_by_equations(&eqs).expect("intersections of arrangement hyperplanes are flats"))
}

/// A set partition of `{0, …, n}` with sorted blocks in order of their minima.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct SetPartition {
    pub blocks: Vec<Vec<usize>>,
}

impl SetPartition {
    pub fn new(n: usize, mut blocks: Vec<Vec<usize>>) -> Result<Self, GraphError> {
        for b in blocks.iter_mut() {
            b.sort_unstable();
        }
        blocks.retain(|b| !b.is_empty());
        blocks.sort();
        let mut all: Vec<usize> = blocks.iter().flatten().copied().collect();
        all.sort_unstable();
        if all != (0..=n).collect::<Vec<_>>() {
            return Err(GraphError::BadPartition { n });
        }
        Ok(SetPartition { blocks })
    }

    /// Blocks with more than one element.
    pub fn non_singleton_blocks(&self) -> Vec<&Vec<usize>> {
        self.blocks.iter().filter(|b| b.len() > 1).collect()
    }
}

fn braid_form(n: usize, i: usize, j: usize) -> Vec<crate::cyclotomic::CycNum> {
    // x_0 = 0
    if i == 0 {
        rbraid_form(1, n, j, j, 0)
    } else {
        rbraid_form(1, n, i, j, 0)
    }
}

/// The partition of `{0, …, n}` recording which coordinates the flat makes
/// equal; the block of 0 holds the vanishing coordinates.
pub fn braid_partition_of_flat(lat: &IntersectionLattice, x: FlatId) -> Result<SetPartition, GraphError> {
    let arr = lat.arrangement();
    if arr.kind() != ArrangementKind::Braid {
        return Err(GraphError::NotBraid);
    }
    let n = arr.ambient_dim();
    let eqs = &lat.flat(x).equations;
    let mut block_of: Vec<usize> = (0..=n).collect();
    for i in 0..=n {
        for j in i + 1..=n {
            if block_of[j] == j && eqs.contains_vector(&braid_form(n, i, j)) {
                block_of[j] = block_of[i];
            }
        }
    }
    let mut blocks: Vec<Vec<usize>> = vec![Vec::new(); n + 1];
    for v in 0..=n {
        blocks[block_of[v]].push(v);
    }
    SetPartition::new(n, blocks)
}

/// Inverse of [`braid_partition_of_flat`].
pub fn partition_to_flat(lat: &IntersectionLattice, p: &SetPartition) -> Result<FlatId, GraphError> {
    let arr = lat.arrangement();
    if arr.kind() != ArrangementKind::Braid {
        return Err(GraphError::NotBraid);
    }
    let n = arr.ambient_dim();
    let p = SetPartition::new(n, p.blocks.clone())?;
    let mut eqs = CanonicalRowSpace::empty(1, n);
    for b in &p.blocks {
        for w in b.windows(2) {
            eqs = eqs.with_row(&braid_form(n, w[0], w[1]));
        }
    }
    Ok(lat.find_by_equations(&eqs).expect("partition flats are intersections of hyperplanes"))
}

/// All set partitions of `{0, …, n}`.
pub fn all_set_partitions(n: usize) -> Vec<SetPartition> {
    let items: Vec<usize> = (0..=n).collect();
    set_partitions(&items)
        .into_iter()
        .map(|blocks| SetPartition::new(n, blocks).expect("generated partitions are valid"))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arrangement::{braid_arrangement, r_braid_arrangement};
    use crate::lattice::{intersection_lattice, LatticeConfig};

    const CAP: u128 = 1_000_000;

    /// The (3,7)-graph: flower on {1,3}; triangle on {2,4,6} with labels
    /// k_24 = 1, k_46 = 1, k_26 = 2; edge {5,7} labeled 0.
    fn figure_graph() -> RnGraph {
        let mut g = RnGraph::flower(3, 7, &[1, 3]).unwrap();
        for (i, j, k) in [(2, 4, 1), (4, 6, 1), (2, 6, 2), (5, 7, 0)] {
            g.add_edge(i, j, k).unwrap();
        }
        g
    }

    /// Every subset of the possible edges, filtered by the validator.
    fn raw_filter(r: u32, n: usize) -> BTreeSet<RnGraph> {
        let mut slots = Vec::new();
        for i in 1..=n {
            for j in i..=n {
                for k in 0..r {
                    if i != j || k != 0 {
                        slots.push((i, j, k));
                    }
                }
            }
        }
        (0u64..1 << slots.len())
            .map(|mask| {
                RnGraph::from_edges(r, n, (0..slots.len()).filter(|b| mask >> b & 1 == 1).map(|b| slots[b])).unwrap()
            })
            .filter(|g| validate_rn_graph(g).is_ok())
            .collect()
    }

    #[test]
    fn validation_examples() {
        assert_eq!(validate_rn_graph(&RnGraph::edgeless(3, 4)), Ok(()));
        assert_eq!(validate_rn_graph(&figure_graph()), Ok(()));
        let tri = RnGraph::from_edges(2, 3, [(1, 2, 1), (2, 3, 1), (1, 3, 1)]).unwrap();
        assert_eq!(
            validate_rn_graph(&tri),
            Err(Violation::Incompatible { i1: 1, i2: 2, i3: 3 })
        );
        let path = RnGraph::from_edges(2, 3, [(1, 2, 0), (2, 3, 0)]).unwrap();
        assert_eq!(validate_rn_graph(&path), Err(Violation::NotComplete { i: 1, j: 3 }));
        let partial = RnGraph::from_edges(3, 2, [(1, 1, 1)]).unwrap();
        assert_eq!(validate_rn_graph(&partial), Err(Violation::FlowerSelfEdges { vertex: 1 }));
        let two = RnGraph::from_edges(2, 2, [(1, 1, 1), (2, 2, 1)]).unwrap();
        assert_eq!(validate_rn_graph(&two), Err(Violation::SecondFlower { first: 1, second: 2 }));
        let multi = RnGraph::from_edges(3, 2, [(1, 2, 0), (1, 2, 1)]).unwrap();
        assert_eq!(validate_rn_graph(&multi), Err(Violation::FlowerSelfEdges { vertex: 1 }));
    }

    #[test]
    fn bad_edges() {
        assert!(RnGraph::from_edges(2, 2, [(1, 1, 0)]).is_err());
        assert!(RnGraph::from_edges(2, 2, [(1, 3, 0)]).is_err());
        assert!(RnGraph::from_edges(2, 2, [(1, 2, 2)]).is_err());
        let g = RnGraph::from_edges(3, 2, [(2, 1, 1)]).unwrap();
        assert_eq!(g.labels(1, 2), vec![2]);
    }

    #[test]
    fn components_of_examples() {
        let comps = components(&RnGraph::edgeless(2, 3));
        assert_eq!(comps.len(), 3);
        assert!(comps.iter().all(|c| !c.nontrivial));

        let nt = nontrivial_components(&figure_graph());
        let sets: Vec<Vec<usize>> = nt.iter().map(|c| c.vertices.clone()).collect();
        assert_eq!(sets, vec![vec![1, 3], vec![2, 4, 6], vec![5, 7]]);
        assert_eq!(components(&figure_graph()).len(), 3);

        let g = RnGraph::flower(2, 3, &[1]).unwrap();
        let comps = components(&g);
        assert_eq!(comps.iter().filter(|c| c.nontrivial).count(), 1);
        assert_eq!(comps.iter().filter(|c| !c.nontrivial).count(), 2);
    }

    #[test]
    fn order() {
        let g = RnGraph::from_edges(2, 2, [(1, 2, 0)]).unwrap();
        let h = RnGraph::from_edges(2, 2, [(1, 2, 1)]).unwrap();
        assert!(gamma_leq(&g, &g).unwrap());
        assert!(gamma_leq(&RnGraph::edgeless(2, 2), &h).unwrap());
        assert!(!gamma_leq(&g, &h).unwrap() && !gamma_leq(&h, &g).unwrap());
        assert_eq!(gamma_leq(&g, &RnGraph::edgeless(3, 2)), Err(GraphError::Mismatch));
    }

    #[test]
    fn counts() {
        assert_eq!(weighted_bell_numbers(2, 4), vec![1, 1, 3, 11, 49]);
        assert_eq!(rn_graph_count(2, 2), 6);
        assert_eq!(rn_graph_count(3, 2), 7);
        assert_eq!(rn_graph_count(2, 4), 116);
        assert_eq!(enumerate_rn_graphs(2, 2, CAP).unwrap().len(), 6);
        assert_eq!(enumerate_rn_graphs(3, 2, CAP).unwrap().len(), 7);
        assert_eq!(enumerate_rn_graphs(2, 4, CAP).unwrap().len(), 116);
        assert!(matches!(enumerate_rn_graphs(2, 4, 100), Err(GraphError::Cap { count: 116, .. })));
        assert_eq!(enumerate_rn_graphs(1, 2, CAP), Err(GraphError::BadParameters));
    }

    #[test]
    fn enumeration_matches_raw_filter() {
        for (r, n) in [(2, 1), (2, 2), (3, 2), (2, 3), (2, 4)] {
            let listed = enumerate_rn_graphs(r, n, CAP).unwrap();
            let distinct: BTreeSet<RnGraph> = listed.iter().cloned().collect();
            assert_eq!(distinct.len(), listed.len(), "duplicates for ({r},{n})");
            assert_eq!(distinct, raw_filter(r, n), "({r},{n})");
        }
    }

    #[test]
    fn top_is_last_for_two_two() {
        let graphs = enumerate_rn_graphs(2, 2, CAP).unwrap();
        assert_eq!(graphs[5], RnGraph::flower(2, 2, &[1, 2]).unwrap());
        assert_eq!(graphs[0], RnGraph::from_edges(2, 2, [(1, 2, 0)]).unwrap());
        assert_eq!(graphs[1], RnGraph::from_edges(2, 2, [(1, 2, 1)]).unwrap());
        assert!(graphs[2].is_edgeless());
    }

    #[test]
    fn flats_and_graphs() {
        let l = intersection_lattice(&r_braid_arrangement(3, 2).unwrap(), LatticeConfig::default()).unwrap();
        assert!(graph_of_flat(&l, l.bottom()).unwrap().is_edgeless());
        assert_eq!(graph_of_flat(&l, l.top()).unwrap(), RnGraph::flower(3, 2, &[1, 2]).unwrap());
        let g = RnGraph::from_edges(3, 2, [(1, 2, 1)]).unwrap();
        let x = flat_of_graph(&l, &g).unwrap();
        assert_eq!(graph_of_flat(&l, x).unwrap(), g);
        assert_eq!(flat_of_graph(&l, &RnGraph::edgeless(3, 2)).unwrap(), l.bottom());
        assert_eq!(flat_of_graph(&l, &RnGraph::flower(3, 2, &[1, 2]).unwrap()).unwrap(), l.top());

        let l3 = intersection_lattice(&r_braid_arrangement(2, 3).unwrap(), LatticeConfig::default()).unwrap();
        let g = RnGraph::from_edges(2, 3, [(1, 2, 0)]).unwrap();
        let x = flat_of_graph(&l3, &g).unwrap();
        assert_eq!(l3.flat(x).rank(), 1);
        assert_eq!(l3.flat(x).hset.len(), 1);

        let b = intersection_lattice(&braid_arrangement(2).unwrap(), LatticeConfig::default()).unwrap();
        assert_eq!(graph_of_flat(&b, 0), Err(GraphError::NotRBraid));
    }

    #[test]
    fn braid_partitions() {
        let l = intersection_lattice(&braid_arrangement(3).unwrap(), LatticeConfig::default()).unwrap();
        let p = braid_partition_of_flat(&l, l.bottom()).unwrap();
        assert_eq!(p.blocks, vec![vec![0], vec![1], vec![2], vec![3]]);
        // hyperplane 3 is x1 - x2, hyperplane 0 is x1
        let x12 = l.flat_of_hset(&[3]).unwrap();
        assert_eq!(braid_partition_of_flat(&l, x12).unwrap().non_singleton_blocks(), vec![&vec![1, 2]]);
        let x1 = l.flat_of_hset(&[0]).unwrap();
        assert_eq!(braid_partition_of_flat(&l, x1).unwrap().non_singleton_blocks(), vec![&vec![0, 1]]);
        for f in l.flats() {
            let p = braid_partition_of_flat(&l, f.id).unwrap();
            assert_eq!(partition_to_flat(&l, &p).unwrap(), f.id);
        }
        assert_eq!(all_set_partitions(3).len(), 15);
        assert!(SetPartition::new(2, vec![vec![0, 1]]).is_err());
    }

    #[test]
    fn json_round_trip() {
        let g = figure_graph();
        let json = serde_json::to_string(&g.to_json()).unwrap();
        let back: GraphJson = serde_json::from_str(&json).unwrap();
        assert_eq!(RnGraph::from_json(&back).unwrap(), g);
    }
}
