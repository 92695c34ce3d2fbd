//! The intersection lattice of a central arrangement.
//!
//! Flats are ordered by reverse inclusion of subspaces, which is inclusion of
//! their hyperplane sets. The bottom element is the ambient space (no
//! equations); the origin flat is kept and flagged as projectively empty.

use std::collections::HashMap;
use std::fmt;
use std::sync::OnceLock;

use fixedbitset::FixedBitSet;
use rayon::prelude::*;
use thiserror::Error;

use crate::arrangement::Arrangement;
use crate::linalg::CanonicalRowSpace;
use crate::poset::Poset;

pub type FlatId = usize;

pub const DEFAULT_FLAT_CAP: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LatticeError {
    #[error("flat count exceeds the configured cap of {cap}")]
    FlatCap { cap: usize },
    #[error("flat {0} does not exist")]
    UnknownFlat(FlatId),
    #[error("flat {a} is not below flat {b}")]
    NotBelow { a: FlatId, b: FlatId },
    #[error("hyperplane index {0} out of range")]
    UnknownHyperplane(usize),
}

#[derive(Debug, Clone, Copy)]
pub struct LatticeConfig {
    pub flat_cap: usize,
}

impl Default for LatticeConfig {
    fn default() -> Self {
        LatticeConfig {
            flat_cap: DEFAULT_FLAT_CAP,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Flat {
    pub id: FlatId,
    /// Sorted indices of the hyperplanes containing this subspace.
    pub hset: Vec<usize>,
    pub equations: CanonicalRowSpace,
    pub lin_dim: usize,
    pub proj_empty: bool,
}

impl Flat {
    pub fn rank(&self) -> usize {
        self.equations.rank()
    }
}

/// Hyperplanes (by index) whose forms lie in the row space `eqs`.
fn closed_hset(arr: &Arrangement, eqs: &CanonicalRowSpace) -> FixedBitSet {
    let mut bits = FixedBitSet::with_capacity(arr.len());
    for (i, h) in arr.hyperplanes().iter().enumerate() {
        if eqs.contains_vector(h.coeffs()) {
            bits.insert(i);
        }
    }
    bits
}

fn equations_of(arr: &Arrangement, hset: &[usize]) -> Result<CanonicalRowSpace, LatticeError> {
    let empty = CanonicalRowSpace::empty(arr.root_order(), arr.ambient_dim());
    hset.iter().try_fold(empty, |acc, &i| {
        let h = arr.hyperplanes().get(i).ok_or(LatticeError::UnknownHyperplane(i))?;
        Ok(acc.with_row(h.coeffs()))
    })
}

/// All hyperplanes containing the intersection of the given ones.
pub fn closure(arr: &Arrangement, hset: &[usize]) -> Result<Vec<usize>, LatticeError> {
    let eqs = equations_of(arr, hset)?;
    Ok(closed_hset(arr, &eqs).ones().collect())
}

/// Up-sets and down-sets of every flat as bitsets. Quadratic in the flat count.
#[derive(Debug)]
pub struct OrderIndex {
    up: Vec<FixedBitSet>,
    down: Vec<FixedBitSet>,
}

impl OrderIndex {
    pub fn up(&self, x: FlatId) -> &FixedBitSet {
        &self.up[x]
    }

    pub fn down(&self, x: FlatId) -> &FixedBitSet {
        &self.down[x]
    }

    /// Least upper bound. Ids increase with rank, so the join is the first
    /// common upper bound.
    pub fn join(&self, a: FlatId, b: FlatId) -> FlatId {
        self.up[a]
            .intersection(&self.up[b])
            .next()
            .expect("central arrangements have a top flat")
    }
}

pub struct IntersectionLattice {
    arrangement: Arrangement,
    flats: Vec<Flat>,
    hset_bits: Vec<FixedBitSet>,
    by_equations: HashMap<CanonicalRowSpace, FlatId>,
    covers_up: Vec<Vec<FlatId>>,
    covers_down: Vec<Vec<FlatId>>,
    order: OnceLock<OrderIndex>,
}

impl fmt::Debug for IntersectionLattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("IntersectionLattice")
            .field("flats", &self.flats.len())
            .field("hasse_edges", &self.covers_up.iter().map(Vec::len).sum::<usize>())
            .finish()
    }
}

struct Pending {
    equations: CanonicalRowSpace,
    hset: FixedBitSet,
}

/// Builds the lattice by breadth-first extension: every flat of rank k is
/// intersected with each hyperplane not containing it, and the results are
/// deduplicated by canonical equations. The covers found on the way are the
/// Hasse diagram. Ids are assigned afterwards by sorting on (rank, hset).
pub fn intersection_lattice(arr: &Arrangement, config: LatticeConfig) -> Result<IntersectionLattice, LatticeError> {
    let k = arr.len();
    let bottom = Pending {
        equations: CanonicalRowSpace::empty(arr.root_order(), arr.ambient_dim()),
        hset: FixedBitSet::with_capacity(k),
    };
    let mut all: Vec<Pending> = vec![bottom];
    let mut edges: Vec<(usize, usize)> = Vec::new();
    let mut frontier: Vec<usize> = vec![0];
    while !frontier.is_empty() {
        let candidates: Vec<(usize, CanonicalRowSpace)> = frontier
            .par_iter()
            .flat_map_iter(|&p| {
                let parent = &all[p];
                (0..k)
                    .filter(|i| !parent.hset.contains(*i))
                    .map(move |i| (p, parent.equations.with_row(arr.hyperplanes()[i].coeffs())))
                    .collect::<Vec<_>>()
            })
            .collect();
        let mut index: HashMap<CanonicalRowSpace, usize> = HashMap::new();
        let mut fresh: Vec<CanonicalRowSpace> = Vec::new();
        let mut level_edges: Vec<(usize, usize)> = Vec::new();
        for (p, eqs) in candidates {
            let next = all.len() + fresh.len();
            let child = *index.entry(eqs.clone()).or_insert_with(|| {
                fresh.push(eqs);
                next
            });
            level_edges.push((p, child));
        }
        if all.len() + fresh.len() > config.flat_cap {
            return Err(LatticeError::FlatCap { cap: config.flat_cap });
        }
        let hsets: Vec<FixedBitSet> = fresh.par_iter().map(|eqs| closed_hset(arr, eqs)).collect();
        let start = all.len();
        all.extend(
            fresh
                .into_iter()
                .zip(hsets)
                .map(|(equations, hset)| Pending { equations, hset }),
        );
        level_edges.sort_unstable();
        level_edges.dedup();
        edges.extend(level_edges);
        frontier = (start..all.len()).collect();
    }

    let n = arr.ambient_dim();
    let mut perm: Vec<usize> = (0..all.len()).collect();
    let keys: Vec<(usize, Vec<usize>)> = all
        .iter()
        .map(|p| (p.equations.rank(), p.hset.ones().collect()))
        .collect();
    perm.sort_by(|&a, &b| keys[a].cmp(&keys[b]));
    let mut new_id = vec![0; all.len()];
    for (id, &old) in perm.iter().enumerate() {
        new_id[old] = id;
    }
    let mut slots: Vec<Option<Pending>> = all.into_iter().map(Some).collect();
    let mut flats = Vec::with_capacity(slots.len());
    let mut hset_bits = Vec::with_capacity(slots.len());
    let mut by_equations = HashMap::with_capacity(slots.len());
    for (id, &old) in perm.iter().enumerate() {
        let p = slots[old].take().expect("each flat is placed once");
        let lin_dim = n - p.equations.rank();
        by_equations.insert(p.equations.clone(), id);
        flats.push(Flat {
            id,
            hset: p.hset.ones().collect(),
            equations: p.equations,
            lin_dim,
            proj_empty: lin_dim == 0,
        });
        hset_bits.push(p.hset);
    }
    let mut covers_up = vec![Vec::new(); flats.len()];
    let mut covers_down = vec![Vec::new(); flats.len()];
    for (a, b) in edges {
        covers_up[new_id[a]].push(new_id[b]);
        covers_down[new_id[b]].push(new_id[a]);
    }
    for v in covers_up.iter_mut().chain(covers_down.iter_mut()) {
        v.sort_unstable();
    }
    Ok(IntersectionLattice {
        arrangement: arr.clone(),
        flats,
        hset_bits,
        by_equations,
        covers_up,
        covers_down,
        order: OnceLock::new(),
    })
}

impl IntersectionLattice {
    pub fn arrangement(&self) -> &Arrangement {
        &self.arrangement
    }

    pub fn flats(&self) -> &[Flat] {
        &self.flats
    }

    pub fn len(&self) -> usize {
        self.flats.len()
    }

    pub fn is_empty(&self) -> bool {
        self.flats.is_empty()
    }

    pub fn flat(&self, id: FlatId) -> &Flat {
        &self.flats[id]
    }

    pub fn bottom(&self) -> FlatId {
        0
    }

    /// The flat of largest rank (the intersection of all hyperplanes).
    pub fn top(&self) -> FlatId {
        self.flats.len() - 1
    }

    pub fn leq(&self, a: FlatId, b: FlatId) -> bool {
        self.hset_bits[a].is_subset(&self.hset_bits[b])
    }

    pub fn lt(&self, a: FlatId, b: FlatId) -> bool {
        a != b && self.leq(a, b)
    }

    pub fn hset_bits(&self, id: FlatId) -> &FixedBitSet {
        &self.hset_bits[id]
    }

    /// The flat with the given canonical equations, if it is in the lattice.
    pub fn find_by_equations(&self, eqs: &CanonicalRowSpace) -> Option<FlatId> {
        self.by_equations.get(eqs).copied()
    }

    /// The flat cut out by the given hyperplanes.
    pub fn flat_of_hset(&self, hset: &[usize]) -> Result<FlatId, LatticeError> {
        let eqs = equations_of(&self.arrangement, hset)?;
        Ok(self.by_equations[&eqs])
    }

    pub fn closure(&self, hset: &[usize]) -> Result<Vec<usize>, LatticeError> {
        closure(&self.arrangement, hset)
    }

    /// Covering pairs `(a, b)` with `a` covered by `b`, sorted.
    pub fn hasse(&self) -> Vec<(FlatId, FlatId)> {
        self.covers_up
            .iter()
            .enumerate()
            .flat_map(|(a, ups)| ups.iter().map(move |&b| (a, b)))
            .collect()
    }

    pub fn covers_up(&self, x: FlatId) -> &[FlatId] {
        &self.covers_up[x]
    }

    pub fn covers_down(&self, x: FlatId) -> &[FlatId] {
        &self.covers_down[x]
    }

    pub fn atoms(&self) -> &[FlatId] {
        &self.covers_up[self.bottom()]
    }

    /// All flats `y <= x`, in increasing id order.
    pub fn down_set(&self, x: FlatId) -> Vec<FlatId> {
        let mut seen = FixedBitSet::with_capacity(self.len());
        let mut stack = vec![x];
        seen.insert(x);
        while let Some(y) = stack.pop() {
            for &z in &self.covers_down[y] {
                if !seen.put(z) {
                    stack.push(z);
                }
            }
        }
        seen.ones().collect()
    }

    /// Bitset order index, built on first use.
    pub fn order(&self) -> &OrderIndex {
        self.order.get_or_init(|| {
            let n = self.len();
            let mut down: Vec<FixedBitSet> = Vec::with_capacity(n);
            for x in 0..n {
                let mut set = FixedBitSet::with_capacity(n);
                set.insert(x);
                for &y in &self.covers_down[x] {
                    set.union_with(&down[y]);
                }
                down.push(set);
            }
            let mut up = vec![FixedBitSet::with_capacity(n); n];
            for (x, set) in down.iter().enumerate() {
                for y in set.ones() {
                    up[y].insert(x);
                }
            }
            OrderIndex { up, down }
        })
    }

    pub fn join(&self, a: FlatId, b: FlatId) -> FlatId {
        self.order().join(a, b)
    }

    /// The induced poset on `[a, b]`, with its elements listed in id order.
    pub fn interval(&self, a: FlatId, b: FlatId) -> Result<(Poset, Vec<FlatId>), LatticeError> {
        for x in [a, b] {
            if x >= self.len() {
                return Err(LatticeError::UnknownFlat(x));
            }
        }
        if !self.leq(a, b) {
            return Err(LatticeError::NotBelow { a, b });
        }
        let elements: Vec<FlatId> = self
            .down_set(b)
            .into_iter()
            .filter(|&c| self.leq(a, c))
            .collect();
        let poset = Poset::from_relation(elements.len(), |i, j| self.leq(elements[i], elements[j]));
        Ok((poset, elements))
    }

    /// μ(0̂, x) for every flat x.
    pub fn mobius(&self) -> Vec<i128> {
        let mut mu = vec![0i128; self.len()];
        let mut start = 0;
        while start < self.len() {
            let rank = self.flats[start].rank();
            let end = start + self.flats[start..].iter().take_while(|f| f.rank() == rank).count();
            let level: Vec<i128> = (start..end)
                .into_par_iter()
                .map(|x| {
                    if x == self.bottom() {
                        1
                    } else {
                        -self
                            .down_set(x)
                            .into_iter()
                            .filter(|&y| y != x)
                            .map(|y| mu[y])
                            .sum::<i128>()
                    }
                })
                .collect();
            mu[start..end].copy_from_slice(&level);
            start = end;
        }
        mu
    }

    /// χ(t) = Σ_x μ(0̂, x) t^{dim x}.
    pub fn characteristic_polynomial(&self) -> IntPolynomial {
        let mu = self.mobius();
        let mut coeffs = vec![0i128; self.arrangement.ambient_dim() + 1];
        for (f, m) in self.flats.iter().zip(mu) {
            coeffs[f.lin_dim] += m;
        }
        IntPolynomial { coeffs }
    }

    /// Number of flats of each linear dimension, indexed by dimension.
    pub fn counts_by_dim(&self) -> Vec<usize> {
        let mut counts = vec![0; self.arrangement.ambient_dim() + 1];
        for f in &self.flats {
            counts[f.lin_dim] += 1;
        }
        counts
    }
}

/// Integer polynomial in one variable, lowest degree first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntPolynomial {
    pub coeffs: Vec<i128>,
}

impl IntPolynomial {
    pub fn eval(&self, t: i128) -> i128 {
        self.coeffs.iter().rev().fold(0, |acc, &c| acc * t + c)
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.iter().rposition(|&c| c != 0)
    }
}

impl fmt::Display for IntPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut out = String::new();
        for (deg, &c) in self.coeffs.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            if out.is_empty() {
                if c < 0 {
                    out.push('-');
                }
            } else {
                out.push_str(if c < 0 { " - " } else { " + " });
            }
            let abs = c.unsigned_abs();
            let mono = match deg {
                0 => String::new(),
                1 => "t".to_string(),
                _ => format!("t^{deg}"),
            };
            if mono.is_empty() {
                out.push_str(&abs.to_string());
            } else if abs == 1 {
                out.push_str(&mono);
            } else {
                out.push_str(&format!("{abs}{mono}"));
            }
        }
        if out.is_empty() {
            out.push('0');
        }
        f.write_str(&out)
    }
}
