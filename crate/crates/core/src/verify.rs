//! Machine-checkable structural claims about an arrangement, collected into a
//! deterministic report.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::arrangement::{Arrangement, ArrangementKind};
use crate::building::{
    blowup_schedule, enumerate_nested_sets, explicit_rbraid_building_set, is_building_set, is_decomposable,
    maximal_building_set, minimal_building_set, schedule_is_inclusion_compatible, BuildingError, BuildingSet,
    NestedSetOptions,
};
use crate::export::{kind_name, SCHEMA};
use crate::finite_field::{complement_count_mod_q, smallest_good_prime, FiniteFieldError};
use crate::graphs::{
    all_set_partitions, braid_partition_of_flat, enumerate_rn_graphs, flat_of_graph, gamma_leq, graph_of_flat,
    nontrivial_components, partition_to_flat, rn_graph_count, validate_rn_graph, RnGraph, SetPartition,
};
use crate::lattice::{intersection_lattice, FlatId, IntersectionLattice, LatticeConfig, LatticeError};
use crate::poset::IsoLimits;

#[derive(Debug, Clone)]
pub struct VerifyConfig {
    pub flat_cap: usize,
    pub nested_cap: usize,
    pub enumeration_cap: u64,
    pub prime_floor: u64,
    pub primes: usize,
    pub seed: u64,
    pub closure_samples: usize,
    pub iso: IsoLimits,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            flat_cap: crate::lattice::DEFAULT_FLAT_CAP,
            nested_cap: crate::building::DEFAULT_NESTED_CAP,
            enumeration_cap: crate::finite_field::DEFAULT_ENUMERATION_CAP,
            prime_floor: 5,
            primes: 2,
            seed: 0,
            closure_samples: 200,
            iso: IsoLimits::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skip,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClaimResult {
    pub claim: String,
    pub instance: String,
    pub status: Status,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ReportSummary {
    pub passed: usize,
    pub failed: usize,
    pub skipped: usize,
}

/// Contains no timings, so equal inputs give byte-identical JSON.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VerifyReport {
    pub schema: &'static str,
    pub kind: &'static str,
    pub r: u32,
    pub n: usize,
    pub hyperplanes: usize,
    pub seed: u64,
    pub claims: Vec<ClaimResult>,
    pub summary: ReportSummary,
}

impl VerifyReport {
    pub fn all_passed(&self) -> bool {
        self.summary.failed == 0 && self.summary.skipped == 0
    }
}

/// Wall-clock time per claim, parallel to `VerifyReport::claims`.
pub type Timings = Vec<Duration>;

/// Flat count predicted without building the lattice, for builtin arrangements.
pub fn predicted_flat_count(arr: &Arrangement) -> Option<u128> {
    match arr.kind() {
        ArrangementKind::RBraid => Some(rn_graph_count(arr.root_order(), arr.ambient_dim())),
        ArrangementKind::Braid => Some(bell(arr.ambient_dim() + 1)),
        ArrangementKind::Custom => None,
    }
}

fn bell(m: usize) -> u128 {
    let mut row = vec![1u128];
    for _ in 0..m {
        let mut next = vec![*row.last().expect("nonempty")];
        for &x in &row {
            let last = *next.last().expect("nonempty");
            next.push(last + x);
        }
        row = next;
    }
    row[0]
}

struct Runner {
    instance: String,
    claims: Vec<ClaimResult>,
    timings: Timings,
}

type Outcome = Result<Result<String, String>, String>;

impl Runner {
    /// `Ok(Ok(detail))` passes, `Ok(Err(detail))` fails, `Err(detail)` skips.
    fn run(&mut self, claim: &str, check: impl FnOnce() -> Outcome) {
        let start = Instant::now();
        let (status, detail) = match check() {
            Ok(Ok(d)) => (Status::Pass, d),
            Ok(Err(d)) => (Status::Fail, d),
            Err(d) => (Status::Skip, d),
        };
        self.timings.push(start.elapsed());
        self.claims.push(ClaimResult {
            claim: claim.to_string(),
            instance: self.instance.clone(),
            status,
            detail,
        });
    }

    fn skip(&mut self, claim: &str, detail: &str) {
        self.run(claim, || Err(detail.to_string()));
    }
}

fn verdict(ok: bool, pass: String, fail: String) -> Result<String, String> {
    if ok {
        Ok(pass)
    } else {
        Err(fail)
    }
}

/// Claim names in the order they run for each arrangement kind.
pub fn claim_names(kind: ArrangementKind) -> Vec<&'static str> {
    let mut names = match kind {
        ArrangementKind::RBraid => vec![
            "lattice-graph-isomorphism",
            "indecomposability-criterion",
            "explicit-minimal-building-set",
        ],
        ArrangementKind::Braid => vec!["braid-set-partitions", "kapranov-count"],
        ArrangementKind::Custom => vec![],
    };
    names.extend([
        "building-set-axioms",
        "maximal-nested-sets-are-chains",
        "schedule-inclusion-compatible",
        "characteristic-polynomial-finite-field",
        "closure-operator",
    ]);
    names
}

/// Runs every claim that applies to the arrangement's kind.
pub fn verify(arr: &Arrangement, config: &VerifyConfig) -> (VerifyReport, Timings) {
    let instance = match arr.kind() {
        ArrangementKind::RBraid => format!("r-braid r={} n={}", arr.root_order(), arr.ambient_dim()),
        ArrangementKind::Braid => format!("braid n={}", arr.ambient_dim()),
        ArrangementKind::Custom => format!("custom r={} n={} k={}", arr.root_order(), arr.ambient_dim(), arr.len()),
    };
    let mut runner = Runner {
        instance,
        claims: Vec::new(),
        timings: Vec::new(),
    };
    let predicted = predicted_flat_count(arr);
    let lattice = match predicted {
        Some(p) if p > config.flat_cap as u128 => Err(format!(
            "predicted {p} flats exceed the flat cap of {}",
            config.flat_cap
        )),
        _ => intersection_lattice(arr, LatticeConfig { flat_cap: config.flat_cap }).map_err(|e| match e {
            LatticeError::FlatCap { cap } => format!("more than {cap} flats"),
            other => other.to_string(),
        }),
    };
    match lattice {
        Err(reason) => {
            for name in claim_names(arr.kind()) {
                runner.skip(name, &reason);
            }
        }
        Ok(lat) => run_all(&mut runner, &lat, config),
    }
    let count = |s: Status| runner.claims.iter().filter(|c| c.status == s).count();
    let summary = ReportSummary {
        passed: count(Status::Pass),
        failed: count(Status::Fail),
        skipped: count(Status::Skip),
    };
    let report = VerifyReport {
        schema: SCHEMA,
        kind: kind_name(arr.kind()),
        r: arr.root_order(),
        n: arr.ambient_dim(),
        hyperplanes: arr.len(),
        seed: config.seed,
        claims: runner.claims,
        summary,
    };
    (report, runner.timings)
}

fn run_all(runner: &mut Runner, lat: &IntersectionLattice, config: &VerifyConfig) {
    let min = minimal_building_set(lat);
    match lat.arrangement().kind() {
        ArrangementKind::RBraid => {
            runner.run("lattice-graph-isomorphism", || check_graph_isomorphism(lat, config));
            runner.run("indecomposability-criterion", || Ok(check_indecomposability(lat)));
            runner.run("explicit-minimal-building-set", || Ok(check_explicit(lat, &min)));
        }
        ArrangementKind::Braid => {
            runner.run("braid-set-partitions", || Ok(check_set_partitions(lat)));
            runner.run("kapranov-count", || Ok(check_kapranov(lat, &min)));
        }
        ArrangementKind::Custom => {}
    }
    runner.run("building-set-axioms", || check_axioms(lat, &min, config));
    runner.run("maximal-nested-sets-are-chains", || check_chains(lat, config));
    runner.run("schedule-inclusion-compatible", || {
        let mut checked = Vec::new();
        for (name, g) in [("minimal", &min), ("maximal", &maximal_building_set(lat))] {
            let s = blowup_schedule(lat, g);
            if !schedule_is_inclusion_compatible(lat, &s) {
                return Ok(Err(format!("{name} schedule violates inclusion order")));
            }
            checked.push(format!("{name}: {} centers", s.centers.len()));
        }
        Ok(Ok(checked.join("; ")))
    });
    runner.run("characteristic-polynomial-finite-field", || check_charpoly(lat, config));
    runner.run("closure-operator", || Ok(check_closure(lat, config)));
}

fn check_graph_isomorphism(lat: &IntersectionLattice, config: &VerifyConfig) -> Outcome {
    let arr = lat.arrangement();
    let (r, n) = (arr.root_order(), arr.ambient_dim());
    let graphs = enumerate_rn_graphs(r, n, config.flat_cap as u128).map_err(|e| e.to_string())?;
    if graphs.len() != lat.len() {
        return Ok(Err(format!("{} graphs but {} flats", graphs.len(), lat.len())));
    }
    let index: HashMap<&RnGraph, usize> = graphs.iter().enumerate().map(|(i, g)| (g, i)).collect();
    let mut of_flat = Vec::with_capacity(lat.len());
    let mut hit = vec![false; graphs.len()];
    for f in lat.flats() {
        let g = graph_of_flat(lat, f.id).map_err(|e| e.to_string())?;
        if let Err(v) = validate_rn_graph(&g) {
            return Ok(Err(format!("graph of flat {} is invalid: {v}", f.id)));
        }
        let Some(&i) = index.get(&g) else {
            return Ok(Err(format!("graph of flat {} is not enumerated", f.id)));
        };
        if std::mem::replace(&mut hit[i], true) {
            return Ok(Err(format!("two flats share graph {i}")));
        }
        if flat_of_graph(lat, &g).map_err(|e| e.to_string())? != f.id {
            return Ok(Err(format!("flat_of_graph does not invert graph_of_flat at {}", f.id)));
        }
        of_flat.push(g);
    }
    for x in 0..lat.len() {
        for y in 0..lat.len() {
            let by_graph = gamma_leq(&of_flat[x], &of_flat[y]).map_err(|e| e.to_string())?;
            if lat.leq(x, y) != by_graph {
                return Ok(Err(format!("order disagrees at flats ({x}, {y})")));
            }
        }
    }
    Ok(Ok(format!("{} flats = {} graphs; bijective and order-preserving both ways", lat.len(), graphs.len())))
}

fn check_indecomposability(lat: &IntersectionLattice) -> Result<String, String> {
    let mut indecomposable = 0;
    for x in 1..lat.len() {
        let brute = is_decomposable(lat, x).expect("x is not the bottom").is_none();
        let g = graph_of_flat(lat, x).expect("r-braid lattice");
        let one_component = nontrivial_components(&g).len() == 1;
        if brute != one_component {
            return Err(format!(
                "flat {x}: brute force says indecomposable={brute}, components say {one_component}"
            ));
        }
        indecomposable += usize::from(brute);
    }
    Ok(format!("{} flats agree; {indecomposable} indecomposable", lat.len() - 1))
}

fn check_explicit(lat: &IntersectionLattice, min: &BuildingSet) -> Result<String, String> {
    let explicit = explicit_rbraid_building_set(lat).expect("r-braid lattice");
    let geometric: BTreeSet<FlatId> = min.geometric_members(lat).into_iter().collect();
    verdict(
        explicit == geometric,
        format!("{} flats from point spans equal the geometric indecomposables", explicit.len()),
        format!(
            "explicit {:?} vs geometric {:?}",
            explicit.difference(&geometric).collect::<Vec<_>>(),
            geometric.difference(&explicit).collect::<Vec<_>>()
        ),
    )
}

fn is_refinement(p: &SetPartition, q: &SetPartition) -> bool {
    p.blocks.iter().all(|b| q.blocks.iter().any(|c| b.iter().all(|v| c.contains(v))))
}

fn check_set_partitions(lat: &IntersectionLattice) -> Result<String, String> {
    let n = lat.arrangement().ambient_dim();
    let all = all_set_partitions(n);
    if all.len() != lat.len() {
        return Err(format!("{} set partitions but {} flats", all.len(), lat.len()));
    }
    let mut seen = BTreeSet::new();
    let mut parts = Vec::with_capacity(lat.len());
    for f in lat.flats() {
        let p = braid_partition_of_flat(lat, f.id).expect("braid lattice");
        if partition_to_flat(lat, &p).expect("braid lattice") != f.id {
            return Err(format!("partition of flat {} does not round-trip", f.id));
        }
        if !seen.insert(p.clone()) {
            return Err(format!("two flats share a partition at {}", f.id));
        }
        parts.push(p);
    }
    for x in 0..lat.len() {
        for y in 0..lat.len() {
            if lat.leq(x, y) != is_refinement(&parts[x], &parts[y]) {
                return Err(format!("order disagrees with refinement at ({x}, {y})"));
            }
        }
    }
    Ok(format!("{} flats = {} set partitions of {{0..{n}}}; order is refinement", lat.len(), all.len()))
}

fn check_kapranov(lat: &IntersectionLattice, min: &BuildingSet) -> Result<String, String> {
    let n = lat.arrangement().ambient_dim() as u32;
    let expected = 2usize.pow(n + 1) - n as usize - 3;
    let got = min.geometric_members(lat).len();
    verdict(
        got == expected,
        format!("{got} = 2^(n+1) - n - 3"),
        format!("{got} geometric indecomposables, expected {expected}"),
    )
}

fn check_axioms(lat: &IntersectionLattice, min: &BuildingSet, config: &VerifyConfig) -> Outcome {
    let check = |g: &BuildingSet| is_building_set(lat, g, config.iso).map_err(|e| e.to_string());
    for (name, g) in [("minimal", min.clone()), ("maximal", maximal_building_set(lat))] {
        let v = check(&g)?;
        if !v.divergent.is_empty() {
            return Ok(Err(format!("{name}: join map and abstract criteria diverge at {:?}", v.divergent)));
        }
        if !v.is_building_set {
            return Ok(Err(format!("{name} set fails at {:?}", v.failures)));
        }
    }
    for &m in min.members() {
        let v = check(&min.without(m))?;
        if !v.divergent.is_empty() {
            return Ok(Err(format!("criteria diverge at {:?} without {m}", v.divergent)));
        }
        if v.is_building_set {
            return Ok(Err(format!("minimal set without {m} still passes")));
        }
    }
    Ok(Ok(format!(
        "minimal ({}) and maximal ({}) pass; each of the {} single removals fails",
        min.len(),
        lat.len() - 1,
        min.len()
    )))
}

/// Chains of `lat \ {0̂}` by depth-first search over the strict order.
fn chains(lat: &IntersectionLattice, cap: usize) -> Option<BTreeSet<Vec<FlatId>>> {
    fn grow(lat: &IntersectionLattice, chain: &mut Vec<FlatId>, out: &mut BTreeSet<Vec<FlatId>>, cap: usize) -> bool {
        out.insert(chain.clone());
        if out.len() > cap {
            return false;
        }
        let last = chain.last().copied().unwrap_or(lat.bottom());
        for y in 1..lat.len() {
            if lat.lt(last, y) {
                chain.push(y);
                let ok = grow(lat, chain, out, cap);
                chain.pop();
                if !ok {
                    return false;
                }
            }
        }
        true
    }
    let mut out = BTreeSet::new();
    grow(lat, &mut Vec::new(), &mut out, cap).then_some(out)
}

fn check_chains(lat: &IntersectionLattice, config: &VerifyConfig) -> Outcome {
    let max = maximal_building_set(lat);
    let options = NestedSetOptions {
        max_size: lat.len(),
        geometric_only: false,
        cap: config.nested_cap,
    };
    let nested = match enumerate_nested_sets(lat, &max, options) {
        Ok(report) => report,
        Err(BuildingError::NestedCap { cap }) => return Err(format!("more than {cap} nested sets")),
        Err(e) => return Ok(Err(e.to_string())),
    };
    let chains = chains(lat, config.nested_cap).ok_or(format!("more than {} chains", config.nested_cap))?;
    let nested: BTreeSet<Vec<FlatId>> = nested.sets.into_iter().collect();
    let mut by_size: BTreeMap<usize, usize> = BTreeMap::new();
    for c in &chains {
        *by_size.entry(c.len()).or_default() += 1;
    }
    Ok(verdict(
        nested == chains,
        format!("{} nested sets = {} chains, by size {:?}", nested.len(), chains.len(), by_size),
        format!("{} nested sets vs {} chains", nested.len(), chains.len()),
    ))
}

/// Checks good primes from the floor upward until `primes` of them have
/// `chi(q) != 0`; primes where both sides vanish are checked but not counted.
fn check_charpoly(lat: &IntersectionLattice, config: &VerifyConfig) -> Outcome {
    let arr = lat.arrangement();
    let chi = lat.characteristic_polynomial();
    let mut floor = config.prime_floor;
    let mut rows = Vec::new();
    let mut nonzero = 0;
    while nonzero < config.primes {
        let q = smallest_good_prime(arr, floor);
        floor = q + 1;
        let count = match complement_count_mod_q(arr, q, config.enumeration_cap) {
            Ok(c) => c,
            Err(e @ FiniteFieldError::TooLarge { .. }) => return Err(e.to_string()),
            Err(e) => return Ok(Err(e.to_string())),
        };
        let value = chi.eval(q as i128);
        if value != count as i128 {
            return Ok(Err(format!("chi({q}) = {value} but {count} points off the arrangement")));
        }
        nonzero += usize::from(count > 0);
        rows.push(format!("chi({q}) = {count}"));
    }
    Ok(Ok(format!("chi(t) = {chi}; {}", rows.join(", "))))
}

/// Extensive, idempotent and monotone on seeded random hyperplane subsets.
fn check_closure(lat: &IntersectionLattice, config: &VerifyConfig) -> Result<String, String> {
    let k = lat.arrangement().len();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let random_subset = |rng: &mut ChaCha8Rng| -> Vec<usize> { (0..k).filter(|_| rng.gen_bool(0.3)).collect() };
    for sample in 0..config.closure_samples {
        let a = random_subset(&mut rng);
        let mut b = a.clone();
        b.extend(random_subset(&mut rng));
        b.sort_unstable();
        b.dedup();
        let ca = lat.closure(&a).expect("indices in range");
        let cb = lat.closure(&b).expect("indices in range");
        if !a.iter().all(|h| ca.contains(h)) {
            return Err(format!("sample {sample}: closure of {a:?} is not extensive"));
        }
        if lat.closure(&ca).expect("indices in range") != ca {
            return Err(format!("sample {sample}: closure of {a:?} is not idempotent"));
        }
        if !ca.iter().all(|h| cb.contains(h)) {
            return Err(format!("sample {sample}: closure is not monotone on {a:?} and {b:?}"));
        }
        if lat.flat_of_hset(&ca).map(|x| lat.flat(x).hset.clone()) != Ok(ca.clone()) {
            return Err(format!("sample {sample}: closure of {a:?} is not a flat"));
        }
    }
    Ok(format!("{} samples with seed {}", config.closure_samples, config.seed))
}
