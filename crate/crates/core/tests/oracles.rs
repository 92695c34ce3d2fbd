//! Values checked against independent computations: subset sweeps, closed
//! formulas and hand enumeration.

use std::collections::HashSet;

use wonderbraid_core::arrangement::{braid_arrangement, r_braid_arrangement, Arrangement};
use wonderbraid_core::building::{
    enumerate_nested_sets, explicit_rbraid_building_set, minimal_building_set, NestedSetOptions,
};
use wonderbraid_core::graphs::{enumerate_rn_graphs, rn_graph_count, weighted_bell_numbers};
use wonderbraid_core::lattice::{intersection_lattice, IntersectionLattice, LatticeConfig};
use wonderbraid_core::linalg::{rref, CanonicalRowSpace, CycMatrix};

fn lattice(arr: &Arrangement) -> IntersectionLattice {
    intersection_lattice(arr, LatticeConfig::default()).unwrap()
}

/// Distinct row spaces over all 2^k subsets of hyperplanes.
fn subset_sweep(arr: &Arrangement) -> usize {
    let k = arr.len();
    let (r, n) = (arr.root_order(), arr.ambient_dim());
    let mut seen: HashSet<CanonicalRowSpace> = HashSet::new();
    for mask in 0u32..1 << k {
        let rows = (0..k)
            .filter(|i| mask >> i & 1 == 1)
            .map(|i| arr.hyperplanes()[i].coeffs().to_vec())
            .collect();
        seen.insert(rref(&CycMatrix::from_rows(r, n, rows).unwrap()));
    }
    seen.len()
}

#[test]
fn flat_counts_match_subset_sweeps() {
    let cases = [
        (r_braid_arrangement(2, 2).unwrap(), 6),
        (r_braid_arrangement(3, 2).unwrap(), 7),
        (r_braid_arrangement(2, 3).unwrap(), 24),
        (r_braid_arrangement(3, 3).unwrap(), 35),
        (braid_arrangement(2).unwrap(), 5),
        (braid_arrangement(3).unwrap(), 15),
        (braid_arrangement(4).unwrap(), 52),
    ];
    for (arr, expected) in cases {
        assert_eq!(subset_sweep(&arr), expected);
        assert_eq!(lattice(&arr).len(), expected);
    }
}

#[test]
fn graph_counts_match_the_formula_and_the_lattice() {
    assert_eq!(weighted_bell_numbers(2, 9), vec![1, 1, 3, 11, 49, 257, 1539, 10299, 75905, 609441]);
    for (r, n) in [(2, 2), (3, 2), (4, 2), (2, 3), (3, 3), (2, 4), (2, 5)] {
        let count = rn_graph_count(r, n);
        assert_eq!(enumerate_rn_graphs(r, n, 1_000_000).unwrap().len() as u128, count);
        assert_eq!(lattice(&r_braid_arrangement(r, n).unwrap()).len() as u128, count, "({r},{n})");
    }
    assert_eq!(rn_graph_count(2, 4), 116);
    assert!(rn_graph_count(2, 9) > 1_000_000);
}

#[test]
fn characteristic_polynomials() {
    let chi = |arr: Arrangement| lattice(&arr).characteristic_polynomial().to_string();
    assert_eq!(chi(r_braid_arrangement(2, 2).unwrap()), "t^2 - 4t + 3");
    assert_eq!(chi(braid_arrangement(2).unwrap()), "t^2 - 3t + 2");
    // (t - 1)(t - 3)(t - 5) and (t - 1)(t - 2)(t - 3)
    assert_eq!(chi(r_braid_arrangement(2, 3).unwrap()), "t^3 - 9t^2 + 23t - 15");
    assert_eq!(chi(braid_arrangement(3).unwrap()), "t^3 - 6t^2 + 11t - 6");
}

#[test]
fn minimal_building_set_sizes() {
    let geometric = |arr: Arrangement| {
        let l = lattice(&arr);
        minimal_building_set(&l).geometric_members(&l).len()
    };
    for (n, expected) in [(2, 3), (3, 10), (4, 25)] {
        assert_eq!(geometric(braid_arrangement(n).unwrap()), expected);
        assert_eq!(expected, 2usize.pow(n as u32 + 1) - n - 3);
    }
    assert_eq!(geometric(r_braid_arrangement(2, 2).unwrap()), 4);
    assert_eq!(geometric(r_braid_arrangement(3, 2).unwrap()), 5);
    assert_eq!(geometric(r_braid_arrangement(2, 3).unwrap()), 6 + 10);
}

#[test]
fn explicit_building_sets_match() {
    for (r, n) in [(2, 2), (3, 2), (2, 3), (3, 3), (2, 4)] {
        let l = lattice(&r_braid_arrangement(r, n).unwrap());
        let explicit = explicit_rbraid_building_set(&l).unwrap();
        let computed: std::collections::BTreeSet<usize> =
            minimal_building_set(&l).geometric_members(&l).into_iter().collect();
        assert_eq!(explicit, computed, "({r},{n})");
    }
}

/// The wonderful model of braid(3) is the moduli space of 5-pointed genus-0
/// curves: 10 boundary divisors meeting in 15 points.
#[test]
fn braid_three_boundary_strata() {
    let l = lattice(&braid_arrangement(3).unwrap());
    let options = NestedSetOptions {
        max_size: 3,
        geometric_only: true,
        ..NestedSetOptions::default()
    };
    let report = enumerate_nested_sets(&l, &minimal_building_set(&l), options).unwrap();
    let counts: Vec<(usize, usize)> = report.by_size.into_iter().collect();
    assert_eq!(counts, vec![(0, 1), (1, 10), (2, 15)]);
}
