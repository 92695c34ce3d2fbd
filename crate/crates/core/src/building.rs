//! Building sets, nested sets and blow-up schedules on an intersection lattice.
//!
//! Decomposability and the building-set condition are tested through the join
//! map `(H_1, …, H_k) ↦ H_1 ∨ … ∨ H_k` from a product of lower intervals onto
//! `[0̂, X]`. Where the join map fails, an abstract poset isomorphism search is
//! run as a second opinion and any disagreement is reported.

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::arrangement::ArrangementKind;
use crate::cyclotomic::CycNum;
use crate::lattice::{FlatId, IntersectionLattice};
use crate::linalg::{null_space, rref, row_space_contains, CycMatrix};
use crate::poset::{is_poset_isomorphic, IsoLimits, Poset, PosetError};

pub const DEFAULT_NESTED_CAP: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BuildingError {
    #[error("the bottom flat cannot be decomposed or belong to a building set")]
    Bottom,
    #[error("flat {0} does not exist")]
    UnknownFlat(FlatId),
    #[error("flat {0} is not a member of the building set")]
    NotAMember(FlatId),
    #[error("more than {cap} nested sets")]
    NestedCap { cap: usize },
    #[error("the explicit description applies only to r-braid arrangements")]
    NotRBraid,
    #[error("span of {points} is not a flat of the lattice")]
    NotAFlat { points: String },
    #[error(transparent)]
    Poset(#[from] PosetError),
}

/// A subset of the nonzero flats.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BuildingSet {
    members: BTreeSet<FlatId>,
}

impl BuildingSet {
    pub fn new(lat: &IntersectionLattice, members: impl IntoIterator<Item = FlatId>) -> Result<Self, BuildingError> {
        let members: BTreeSet<FlatId> = members.into_iter().collect();
        for &m in &members {
            if m >= lat.len() {
                return Err(BuildingError::UnknownFlat(m));
            }
            if m == lat.bottom() {
                return Err(BuildingError::Bottom);
            }
        }
        Ok(BuildingSet { members })
    }

    pub fn members(&self) -> &BTreeSet<FlatId> {
        &self.members
    }

    pub fn contains(&self, x: FlatId) -> bool {
        self.members.contains(&x)
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Members that are nonempty in projective space.
    pub fn geometric_members(&self, lat: &IntersectionLattice) -> Vec<FlatId> {
        self.members
            .iter()
            .copied()
            .filter(|&m| !lat.flat(m).proj_empty)
            .collect()
    }

    pub fn without(&self, x: FlatId) -> BuildingSet {
        let mut members = self.members.clone();
        members.remove(&x);
        BuildingSet { members }
    }
}

/// Two flats below `x` whose lower intervals multiply to `[0̂, x]` via the join.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct DecompositionWitness {
    pub y1: FlatId,
    pub y2: FlatId,
}

fn check_flat(lat: &IntersectionLattice, x: FlatId) -> Result<(), BuildingError> {
    if x >= lat.len() {
        return Err(BuildingError::UnknownFlat(x));
    }
    if x == lat.bottom() {
        return Err(BuildingError::Bottom);
    }
    Ok(())
}

/// Whether the join map `∏ [0̂, y] → [0̂, x]` is an order isomorphism.
fn join_map_is_isomorphism(lat: &IntersectionLattice, factors: &[FlatId], x: FlatId) -> bool {
    let order = lat.order();
    let target = order.down(x);
    let target_len = target.count_ones(..);
    let intervals: Vec<Vec<FlatId>> = factors.iter().map(|&y| order.down(y).ones().collect()).collect();
    let size = intervals
        .iter()
        .try_fold(1usize, |acc, iv| acc.checked_mul(iv.len()));
    if size != Some(target_len) {
        return false;
    }
    let mut tuples: Vec<Vec<FlatId>> = vec![Vec::new()];
    for iv in &intervals {
        tuples = tuples
            .into_iter()
            .flat_map(|t| {
                iv.iter().map(move |&h| {
                    let mut t = t.clone();
                    t.push(h);
                    t
                })
            })
            .collect();
    }
    let images: Vec<FlatId> = tuples
        .iter()
        .map(|t| t.iter().fold(lat.bottom(), |acc, &h| order.join(acc, h)))
        .collect();
    let mut hit = fixedbitset::FixedBitSet::with_capacity(lat.len());
    for &img in &images {
        if !target.contains(img) || hit.put(img) {
            return false;
        }
    }
    // The join map is monotone; it must also reflect the order.
    for (i, s) in tuples.iter().enumerate() {
        for (j, t) in tuples.iter().enumerate() {
            if i != j && lat.leq(images[i], images[j]) && !s.iter().zip(t).all(|(&a, &b)| lat.leq(a, b)) {
                return false;
            }
        }
    }
    true
}

/// A two-factor decomposition of `[0̂, x]`, searched over pairs in increasing
/// id order; `None` means `x` is indecomposable.
pub fn is_decomposable(lat: &IntersectionLattice, x: FlatId) -> Result<Option<DecompositionWitness>, BuildingError> {
    check_flat(lat, x)?;
    let order = lat.order();
    let target_len = order.down(x).count_ones(..);
    let below: Vec<FlatId> = order
        .down(x)
        .ones()
        .filter(|&y| y != x && y != lat.bottom())
        .collect();
    for (i, &y1) in below.iter().enumerate() {
        let s1 = order.down(y1).count_ones(..);
        if !target_len.is_multiple_of(s1) {
            continue;
        }
        for &y2 in &below[i + 1..] {
            if s1 * order.down(y2).count_ones(..) != target_len {
                continue;
            }
            if join_map_is_isomorphism(lat, &[y1, y2], x) {
                return Ok(Some(DecompositionWitness { y1, y2 }));
            }
        }
    }
    Ok(None)
}

/// The indecomposable nonzero flats, including the projectively empty top
/// when it is indecomposable.
pub fn minimal_building_set(lat: &IntersectionLattice) -> BuildingSet {
    lat.order();
    let members: Vec<FlatId> = (1..lat.len())
        .into_par_iter()
        .filter(|&x| is_decomposable(lat, x).expect("nonzero flat").is_none())
        .collect();
    BuildingSet {
        members: members.into_iter().collect(),
    }
}

/// Every flat except 0̂.
pub fn maximal_building_set(lat: &IntersectionLattice) -> BuildingSet {
    BuildingSet {
        members: (1..lat.len()).collect(),
    }
}

/// The maximal members of `g` lying below (or equal to) `x`.
pub fn g_factors(lat: &IntersectionLattice, g: &BuildingSet, x: FlatId) -> Vec<FlatId> {
    if g.contains(x) {
        return vec![x];
    }
    let below: Vec<FlatId> = g.members.iter().copied().filter(|&y| lat.leq(y, x)).collect();
    below
        .iter()
        .copied()
        .filter(|&y| !below.iter().any(|&z| lat.lt(y, z)))
        .collect()
}

/// Which test settled the building-set condition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Criterion {
    JoinMap,
    AbstractIsomorphism,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BuildingSetVerdict {
    pub is_building_set: bool,
    /// Flats whose interval does not factor, by either criterion.
    pub failures: Vec<FlatId>,
    /// Flats where the join map failed but an abstract isomorphism exists.
    pub divergent: Vec<FlatId>,
    pub decided_by: Criterion,
}

/// Checks the building-set condition at every nonzero flat.
pub fn is_building_set(
    lat: &IntersectionLattice,
    g: &BuildingSet,
    limits: IsoLimits,
) -> Result<BuildingSetVerdict, BuildingError> {
    let mut failures = Vec::new();
    let mut divergent = Vec::new();
    for x in 1..lat.len() {
        let factors = g_factors(lat, g, x);
        if join_map_is_isomorphism(lat, &factors, x) {
            continue;
        }
        let target = lat.interval(lat.bottom(), x).expect("0̂ is below everything").0;
        let product_len = factors
            .iter()
            .try_fold(1usize, |acc, &y| acc.checked_mul(lat.order().down(y).count_ones(..)));
        if product_len != Some(target.len()) {
            failures.push(x);
            continue;
        }
        let parts: Vec<Poset> = factors
            .iter()
            .map(|&y| lat.interval(lat.bottom(), y).expect("0̂ is below everything").0)
            .collect();
        let product = Poset::product_all(&parts);
        if is_poset_isomorphic(&product, &target, limits)?.is_some() {
            divergent.push(x);
        } else {
            failures.push(x);
        }
    }
    let decided_by = if divergent.is_empty() {
        Criterion::JoinMap
    } else {
        Criterion::AbstractIsomorphism
    };
    Ok(BuildingSetVerdict {
        is_building_set: failures.is_empty(),
        failures,
        divergent,
        decided_by,
    })
}

/// Whether every antichain of size at least two in `s` has its join outside `g`.
pub fn is_nested(lat: &IntersectionLattice, g: &BuildingSet, s: &[FlatId]) -> Result<bool, BuildingError> {
    for &x in s {
        if !g.contains(x) {
            return Err(BuildingError::NotAMember(x));
        }
    }
    let mut items = s.to_vec();
    items.sort_unstable();
    items.dedup();
    Ok(!bad_antichain_from(lat, g, &items, None, 0, 0))
}

/// Backtracks over antichains drawn from `items[from..]` extending a current
/// antichain with join `acc` of size `size`; true if some antichain of size
/// >= 2 has its join in `g`.
fn bad_antichain_from(
    lat: &IntersectionLattice,
    g: &BuildingSet,
    items: &[FlatId],
    chosen: Option<&[FlatId]>,
    acc: FlatId,
    from: usize,
) -> bool {
    let chosen = chosen.unwrap_or(&[]);
    for i in from..items.len() {
        let e = items[i];
        if chosen.iter().any(|&c| lat.leq(c, e) || lat.leq(e, c)) {
            continue;
        }
        let join = lat.join(acc, e);
        if !chosen.is_empty() && g.contains(join) {
            return true;
        }
        let mut next = chosen.to_vec();
        next.push(e);
        if bad_antichain_from(lat, g, items, Some(&next), join, i + 1) {
            return true;
        }
    }
    false
}

#[derive(Debug, Clone, Copy)]
pub struct NestedSetOptions {
    pub max_size: usize,
    /// Restrict to projectively nonempty members.
    pub geometric_only: bool,
    pub cap: usize,
}

impl Default for NestedSetOptions {
    fn default() -> Self {
        NestedSetOptions {
            max_size: usize::MAX,
            geometric_only: false,
            cap: DEFAULT_NESTED_CAP,
        }
    }
}

/// Nested sets grouped by size, the empty set included.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NestedReport {
    pub by_size: BTreeMap<usize, usize>,
    pub sets: Vec<Vec<FlatId>>,
}

/// All nested subsets of `g` up to `max_size`, ordered by size and then
/// lexicographically. Nestedness is hereditary, so the search only grows
/// nested sets.
pub fn enumerate_nested_sets(
    lat: &IntersectionLattice,
    g: &BuildingSet,
    opts: NestedSetOptions,
) -> Result<NestedReport, BuildingError> {
    let universe: Vec<FlatId> = if opts.geometric_only {
        g.geometric_members(lat)
    } else {
        g.members.iter().copied().collect()
    };
    let mut sets: Vec<Vec<FlatId>> = vec![Vec::new()];
    let mut stack: Vec<(Vec<FlatId>, usize)> = vec![(Vec::new(), 0)];
    while let Some((current, from)) = stack.pop() {
        if current.len() >= opts.max_size {
            continue;
        }
        for i in (from..universe.len()).rev() {
            let e = universe[i];
            // only antichains containing e can be new
            let incomparable: Vec<FlatId> = current
                .iter()
                .copied()
                .filter(|&c| !lat.leq(c, e) && !lat.leq(e, c))
                .collect();
            if bad_antichain_from(lat, g, &incomparable, Some(&[e]), e, 0) {
                continue;
            }
            let mut next = current.clone();
            next.push(e);
            sets.push(next.clone());
            if sets.len() > opts.cap {
                return Err(BuildingError::NestedCap { cap: opts.cap });
            }
            stack.push((next, i + 1));
        }
    }
    sets.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    let mut by_size = BTreeMap::new();
    for s in &sets {
        *by_size.entry(s.len()).or_insert(0) += 1;
    }
    Ok(NestedReport { by_size, sets })
}

/// Blow-up centers: projectively nonempty members by increasing dimension,
/// ties broken by flat id.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BlowupSchedule {
    pub centers: Vec<FlatId>,
}

pub fn blowup_schedule(lat: &IntersectionLattice, g: &BuildingSet) -> BlowupSchedule {
    let mut centers = g.geometric_members(lat);
    centers.sort_by_key(|&c| (lat.flat(c).lin_dim, c));
    BlowupSchedule { centers }
}

/// True iff no later center is contained in an earlier one, checked by
/// comparing equation spaces.
pub fn schedule_is_inclusion_compatible(lat: &IntersectionLattice, schedule: &BlowupSchedule) -> bool {
    let c = &schedule.centers;
    for i in 0..c.len() {
        for j in i + 1..c.len() {
            let (earlier, later) = (&lat.flat(c[i]).equations, &lat.flat(c[j]).equations);
            // later ⊆ earlier as subspaces iff earlier's equations lie in later's
            let later_inside = row_space_contains(later, earlier).expect("same arrangement");
            if later_inside && c[i] != c[j] {
                return false;
            }
        }
    }
    true
}

/// Flats spanned by a set of coordinate points, or by such a set together
/// with one point `[ζ^{a_1} : … : ζ^{a_n}]`, excluding the whole space.
pub fn explicit_rbraid_building_set(lat: &IntersectionLattice) -> Result<BTreeSet<FlatId>, BuildingError> {
    let arr = lat.arrangement();
    if arr.kind() != ArrangementKind::RBraid {
        return Err(BuildingError::NotRBraid);
    }
    let (r, n) = (arr.root_order(), arr.ambient_dim());
    let zero = CycNum::zero(r).expect("positive order");
    let one = CycNum::one(r).expect("positive order");
    let coordinate_point = |i: usize| -> Vec<CycNum> {
        let mut p = vec![zero.clone(); n];
        p[i] = one.clone();
        p
    };
    let mut out = BTreeSet::new();
    let mut emit = |points: Vec<Vec<CycNum>>, describe: &dyn Fn() -> String| -> Result<(), BuildingError> {
        let span = CycMatrix::from_rows(r, n, points).expect("points have n coordinates");
        let eqs = rref(&null_space(&span));
        if eqs.rank() == 0 {
            return Ok(());
        }
        let id = lat
            .find_by_equations(&eqs)
            .ok_or_else(|| BuildingError::NotAFlat { points: describe() })?;
        out.insert(id);
        Ok(())
    };
    for mask in 0u64..1 << n {
        let s: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
        let base: Vec<Vec<CycNum>> = s.iter().map(|&i| coordinate_point(i)).collect();
        let label = |extra: &str| format!("p_S for S = {:?}{extra}", s.iter().map(|i| i + 1).collect::<Vec<_>>());
        if !s.is_empty() {
            emit(base.clone(), &|| label(""))?;
        }
        // a is taken modulo coordinates in S (set to 0) and modulo a global
        // shift (first free coordinate set to 0).
        let free: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 0).collect();
        let Some((_, varying)) = free.split_first() else {
            continue;
        };
        let classes = (r as u64).pow(varying.len() as u32);
        for code in 0..classes {
            let mut a = vec![0i64; n];
            let mut c = code;
            for &i in varying {
                a[i] = (c % r as u64) as i64;
                c /= r as u64;
            }
            let p_a: Vec<CycNum> = a
                .iter()
                .map(|&k| CycNum::zeta_pow(r, k).expect("positive order"))
                .collect();
            let mut points = base.clone();
            points.push(p_a);
            emit(points, &|| label(&format!(" with p_a for a = {a:?}")))?;
        }
    }
    Ok(out)
}
