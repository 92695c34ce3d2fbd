//! Acceptance criteria, one line each. Runs without the libtest harness so the
//! lines always appear in `cargo test` output.

use std::collections::{BTreeSet, HashMap};
use std::process::Command;

use wonderbraid_core::arrangement::{braid_arrangement, r_braid_arrangement, Arrangement};
use wonderbraid_core::building::{
    blowup_schedule, enumerate_nested_sets, explicit_rbraid_building_set, is_building_set, is_decomposable,
    maximal_building_set, minimal_building_set, BuildingSet, NestedSetOptions,
};
use wonderbraid_core::finite_field::{complement_count_mod_q, smallest_good_prime, DEFAULT_ENUMERATION_CAP};
use wonderbraid_core::graphs::{
    all_set_partitions, braid_partition_of_flat, enumerate_rn_graphs, flat_of_graph, gamma_leq, graph_of_flat,
    nontrivial_components, partition_to_flat, rn_graph_count, validate_rn_graph, RnGraph,
};
use wonderbraid_core::lattice::{intersection_lattice, IntersectionLattice, LatticeConfig};
use wonderbraid_core::linalg::row_space_contains;
use wonderbraid_core::poset::IsoLimits;

const RBRAID: [(u32, usize); 5] = [(2, 2), (3, 2), (2, 3), (3, 3), (2, 4)];
const SMALL_RBRAID: [(u32, usize); 3] = [(2, 2), (3, 2), (2, 3)];
const BRAID: [usize; 3] = [2, 3, 4];

type Check = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn lattice(arr: &Arrangement) -> IntersectionLattice {
    intersection_lattice(arr, LatticeConfig::default()).expect("fixture lattices fit the default cap")
}

fn rbraid(r: u32, n: usize) -> IntersectionLattice {
    lattice(&r_braid_arrangement(r, n).expect("valid parameters"))
}

fn fixtures() -> Vec<(String, IntersectionLattice)> {
    let mut out: Vec<(String, IntersectionLattice)> =
        RBRAID.iter().map(|&(r, n)| (format!("r-braid({r},{n})"), rbraid(r, n))).collect();
    out.extend(BRAID.iter().map(|&n| (format!("braid({n})"), lattice(&braid_arrangement(n).expect("n >= 1")))));
    out
}

/// Every edge subset of the (r,n) multigraph, filtered by the validator.
fn raw_filter_count(r: u32, n: usize) -> usize {
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
        .filter(|mask| {
            let edges = (0..slots.len()).filter(|b| mask >> b & 1 == 1).map(|b| slots[b]);
            validate_rn_graph(&RnGraph::from_edges(r, n, edges).expect("slots are in range")).is_ok()
        })
        .count()
}

fn criterion_1() -> Check {
    let mut sizes = Vec::new();
    for (r, n) in RBRAID {
        let lat = rbraid(r, n);
        let graphs = enumerate_rn_graphs(r, n, 1_000_000).map_err(|e| e.to_string())?;
        ensure(graphs.len() == lat.len() && graphs.len() as u128 == rn_graph_count(r, n), || {
            format!("({r},{n}): {} graphs, {} flats", graphs.len(), lat.len())
        })?;
        let position: HashMap<&RnGraph, usize> = graphs.iter().enumerate().map(|(i, g)| (g, i)).collect();
        let mut image = BTreeSet::new();
        let of_flat: Vec<RnGraph> = (0..lat.len()).map(|x| graph_of_flat(&lat, x).expect("r-braid")).collect();
        for (x, g) in of_flat.iter().enumerate() {
            let i = *position.get(g).ok_or(format!("({r},{n}): graph of flat {x} not enumerated"))?;
            image.insert(i);
            ensure(flat_of_graph(&lat, g) == Ok(x), || format!("({r},{n}): no inverse at flat {x}"))?;
        }
        ensure(image.len() == graphs.len(), || format!("({r},{n}): not injective"))?;
        for x in 0..lat.len() {
            for y in 0..lat.len() {
                ensure(lat.leq(x, y) == gamma_leq(&of_flat[x], &of_flat[y]).expect("same (r,n)"), || {
                    format!("({r},{n}): order differs at ({x},{y})")
                })?;
            }
        }
        sizes.push(format!("({r},{n})={}", lat.len()));
    }
    let raw22 = raw_filter_count(2, 2);
    let raw24 = raw_filter_count(2, 4);
    ensure(raw22 == 6 && raw24 == 116, || format!("raw filter gave {raw22} and {raw24}"))?;
    Ok(format!("bijective order isomorphisms, {}; raw filter 6 and 116", sizes.join(" ")))
}

fn criterion_2() -> Check {
    let mut total = 0;
    for (r, n) in RBRAID {
        let lat = rbraid(r, n);
        for x in 1..lat.len() {
            let brute = is_decomposable(&lat, x).map_err(|e| e.to_string())?.is_none();
            let graph = graph_of_flat(&lat, x).expect("r-braid");
            let one = nontrivial_components(&graph).len() == 1;
            ensure(brute == one, || format!("({r},{n}) flat {x}: brute {brute}, components {one}"))?;
            total += 1;
        }
    }
    Ok(format!("{total} flats agree"))
}

fn criterion_3() -> Check {
    let mut counts = Vec::new();
    for (r, n) in RBRAID {
        let lat = rbraid(r, n);
        let explicit = explicit_rbraid_building_set(&lat).map_err(|e| e.to_string())?;
        let computed: BTreeSet<usize> = minimal_building_set(&lat).geometric_members(&lat).into_iter().collect();
        ensure(explicit == computed, || format!("({r},{n}) differs"))?;
        counts.push(explicit.len());
    }
    ensure(counts[..3] == [4, 5, 16], || format!("counts {counts:?}"))?;
    Ok(format!("equal as sets; sizes {counts:?}"))
}

fn criterion_4() -> Check {
    let mut sizes = Vec::new();
    for n in BRAID {
        let lat = lattice(&braid_arrangement(n).expect("n >= 1"));
        let partitions = all_set_partitions(n);
        ensure(partitions.len() == lat.len(), || format!("braid({n}): {} partitions", partitions.len()))?;
        let mut seen = BTreeSet::new();
        for x in 0..lat.len() {
            let p = braid_partition_of_flat(&lat, x).map_err(|e| e.to_string())?;
            ensure(partition_to_flat(&lat, &p) == Ok(x), || format!("braid({n}): flat {x} does not round-trip"))?;
            seen.insert(p);
        }
        ensure(seen.len() == lat.len() && seen == partitions.into_iter().collect(), || {
            format!("braid({n}): not a bijection")
        })?;
        sizes.push(minimal_building_set(&lat).geometric_members(&lat).len());
    }
    ensure(sizes == [3, 10, 25], || format!("sizes {sizes:?}"))?;
    Ok(format!("flats biject with set partitions; geometric sizes {sizes:?}"))
}

fn criterion_5() -> Check {
    let mut removals = 0;
    for (name, lat) in fixtures() {
        let check = |g: &BuildingSet| is_building_set(&lat, g, IsoLimits::default()).map_err(|e| e.to_string());
        let min = minimal_building_set(&lat);
        for g in [&min, &maximal_building_set(&lat)] {
            let v = check(g)?;
            ensure(v.is_building_set && v.divergent.is_empty(), || format!("{name}: {v:?}"))?;
        }
        for &m in min.members() {
            let v = check(&min.without(m))?;
            ensure(!v.is_building_set && v.divergent.is_empty(), || format!("{name}: removing {m} still passes"))?;
            removals += 1;
        }
    }
    Ok(format!("minimal and maximal pass; all {removals} single removals fail"))
}

fn chains(lat: &IntersectionLattice) -> BTreeSet<Vec<usize>> {
    let mut out = BTreeSet::from([Vec::new()]);
    let mut frontier: Vec<Vec<usize>> = vec![Vec::new()];
    while let Some(chain) = frontier.pop() {
        let last = chain.last().copied().unwrap_or(0);
        for y in 1..lat.len() {
            if lat.lt(last, y) {
                let mut longer = chain.clone();
                longer.push(y);
                out.insert(longer.clone());
                frontier.push(longer);
            }
        }
    }
    out
}

fn criterion_6() -> Check {
    let mut counts = Vec::new();
    for (r, n) in SMALL_RBRAID {
        let lat = rbraid(r, n);
        let options = NestedSetOptions {
            max_size: lat.len(),
            geometric_only: false,
            ..NestedSetOptions::default()
        };
        let nested = enumerate_nested_sets(&lat, &maximal_building_set(&lat), options).map_err(|e| e.to_string())?;
        let nested: BTreeSet<Vec<usize>> = nested.sets.into_iter().collect();
        let chains = chains(&lat);
        ensure(nested == chains, || format!("({r},{n}): {} nested vs {} chains", nested.len(), chains.len()))?;
        counts.push(format!("({r},{n})={}", chains.len()));
    }
    Ok(format!("nested sets = chains: {}", counts.join(" ")))
}

fn criterion_7() -> Check {
    let mut pairs = 0;
    for (name, lat) in fixtures() {
        for g in [minimal_building_set(&lat), maximal_building_set(&lat)] {
            let centers = blowup_schedule(&lat, &g).centers;
            for (a, &x) in centers.iter().enumerate() {
                for &y in &centers[a + 1..] {
                    // a later center may not lie inside an earlier one
                    let later_inside = row_space_contains(&lat.flat(y).equations, &lat.flat(x).equations)
                        .map_err(|e| e.to_string())?;
                    ensure(!later_inside, || format!("{name}: flat {y} lies inside earlier flat {x}"))?;
                    pairs += 1;
                }
            }
        }
    }
    Ok(format!("{pairs} ordered pairs checked"))
}

fn criterion_8() -> Check {
    let mut rows = Vec::new();
    for (name, lat) in fixtures() {
        let arr = lat.arrangement();
        let chi = lat.characteristic_polynomial();
        let mut floor = 5;
        let mut nonzero = 0;
        while nonzero < 2 {
            let q = smallest_good_prime(arr, floor);
            floor = q + 1;
            let count = complement_count_mod_q(arr, q, DEFAULT_ENUMERATION_CAP).map_err(|e| e.to_string())?;
            ensure(chi.eval(q as i128) == count as i128, || format!("{name}: chi({q}) != {count}"))?;
            nonzero += usize::from(count > 0);
        }
        rows.push(name);
    }
    let a22 = r_braid_arrangement(2, 2).expect("valid");
    let c5 = complement_count_mod_q(&a22, 5, DEFAULT_ENUMERATION_CAP).map_err(|e| e.to_string())?;
    ensure(c5 == 8 && rbraid(2, 2).characteristic_polynomial().eval(5) == 8, || format!("chi(5) gave {c5}"))?;
    Ok(format!("chi(5) = 8 for r-braid(2,2); two nonzero primes each for {} fixtures", rows.len()))
}

fn verify_json(source: &[&str], threads: &str) -> Result<Vec<u8>, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_wonderbraid"))
        .arg("verify")
        .args(source)
        .args(["--threads", threads, "--format", "json"])
        .output()
        .map_err(|e| e.to_string())?;
    ensure(out.status.success(), || {
        format!("verify {source:?} exited with {:?}: {}", out.status.code(), String::from_utf8_lossy(&out.stderr))
    })?;
    Ok(out.stdout)
}

fn criterion_9() -> Check {
    let mut bytes = 0;
    for source in [&["--rbraid", "2,3"][..], &["--braid", "3"][..]] {
        let one = verify_json(source, "1")?;
        let four = verify_json(source, "4")?;
        ensure(one == four, || format!("verify {source:?} differs between 1 and 4 threads"))?;
        bytes += one.len();
    }
    Ok(format!("1 and 4 threads give identical reports ({bytes} bytes)"))
}

type Criterion = (&'static str, fn() -> Check);

fn main() {
    let criteria: [Criterion; 9] = [
        ("lattice is isomorphic to the (r,n)-graph poset", criterion_1),
        ("indecomposable iff one nontrivial component", criterion_2),
        ("explicit minimal building set", criterion_3),
        ("braid flats are set partitions", criterion_4),
        ("building-set axioms", criterion_5),
        ("maximal-set nested sets are chains", criterion_6),
        ("blow-up schedules respect inclusion", criterion_7),
        ("characteristic polynomial matches F_q counts", criterion_8),
        ("verify is deterministic across thread counts", criterion_9),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("criterion {} PASS {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {} FAIL {name}: {detail}", i + 1);
            }
        }
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
