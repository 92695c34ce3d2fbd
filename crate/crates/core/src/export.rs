//! JSON and DOT serializations. Every JSON document carries `"schema"`.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::Serialize;

use crate::arrangement::{format_form, ArrangementFile, ArrangementKind};
use crate::building::{BlowupSchedule, BuildingSet, NestedReport};
use crate::graphs::{GraphJson, RnGraph};
use crate::lattice::{FlatId, IntersectionLattice};

pub const SCHEMA: &str = "wonderbraid/1";

#[derive(Debug, Clone, Serialize)]
pub struct FlatJson {
    pub id: FlatId,
    pub hset: Vec<usize>,
    pub equations: Vec<String>,
    pub lin_dim: usize,
    pub proj_empty: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct LatticeSummary {
    pub kind: &'static str,
    pub flats: usize,
    pub hyperplanes: usize,
    pub rank: usize,
    /// Flat count per linear dimension, indexed by dimension.
    pub counts_by_dim: Vec<usize>,
    pub characteristic_polynomial: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct LatticeJson {
    pub schema: &'static str,
    pub arrangement: ArrangementFile,
    pub flats: Vec<FlatJson>,
    pub hasse: Vec<[FlatId; 2]>,
    pub summary: LatticeSummary,
}

pub fn kind_name(kind: ArrangementKind) -> &'static str {
    match kind {
        ArrangementKind::Braid => "braid",
        ArrangementKind::RBraid => "r-braid",
        ArrangementKind::Custom => "custom",
    }
}

/// Defining equations of a flat, one string per row of its reduced basis.
pub fn flat_equations(lat: &IntersectionLattice, x: FlatId) -> Vec<String> {
    lat.flat(x).equations.matrix().row_iter().map(format_form).collect()
}

pub fn lattice_summary(lat: &IntersectionLattice) -> LatticeSummary {
    LatticeSummary {
        kind: kind_name(lat.arrangement().kind()),
        flats: lat.len(),
        hyperplanes: lat.arrangement().len(),
        rank: lat.flat(lat.top()).rank(),
        counts_by_dim: lat.counts_by_dim(),
        characteristic_polynomial: lat.characteristic_polynomial().to_string(),
    }
}

pub fn lattice_json(lat: &IntersectionLattice) -> LatticeJson {
    LatticeJson {
        schema: SCHEMA,
        arrangement: lat.arrangement().to_file(),
        flats: lat
            .flats()
            .iter()
            .map(|f| FlatJson {
                id: f.id,
                hset: f.hset.clone(),
                equations: flat_equations(lat, f.id),
                lin_dim: f.lin_dim,
                proj_empty: f.proj_empty,
            })
            .collect(),
        hasse: lat.hasse().into_iter().map(|(a, b)| [a, b]).collect(),
        summary: lattice_summary(lat),
    }
}

fn dot_escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

/// Hasse diagram, bottom at the bottom; nodes are labeled by id and equations.
pub fn lattice_dot(lat: &IntersectionLattice) -> String {
    let mut out = String::from("digraph lattice {\n  rankdir=BT;\n  node [shape=box, fontsize=10];\n");
    for f in lat.flats() {
        let eqs = flat_equations(lat, f.id);
        let body = if eqs.is_empty() { "ambient".to_string() } else { eqs.join("\\n") };
        let style = if f.proj_empty { ", style=dashed" } else { "" };
        let _ = writeln!(out, "  f{} [label=\"{}: {}\"{}];", f.id, f.id, dot_escape(&body), style);
    }
    for (a, b) in lat.hasse() {
        let _ = writeln!(out, "  f{a} -> f{b};");
    }
    out.push_str("}\n");
    out
}

/// Undirected multigraph; each label is drawn as its own edge.
pub fn graph_dot(g: &RnGraph) -> String {
    let mut out = format!("graph rn_{}_{} {{\n  node [shape=circle];\n", g.r(), g.n());
    for v in 1..=g.n() {
        let _ = writeln!(out, "  v{v} [label=\"{v}\"];");
    }
    for &(i, j, k) in g.edges() {
        let _ = writeln!(out, "  v{i} -- v{j} [label=\"{k}\"];");
    }
    out.push_str("}\n");
    out
}

#[derive(Debug, Clone, Serialize)]
pub struct GraphListJson {
    pub schema: &'static str,
    pub r: u32,
    pub n: usize,
    pub count: usize,
    pub graphs: Vec<GraphJson>,
}

pub fn graph_list_json(r: u32, n: usize, graphs: &[RnGraph]) -> GraphListJson {
    GraphListJson {
        schema: SCHEMA,
        r,
        n,
        count: graphs.len(),
        graphs: graphs.iter().map(RnGraph::to_json).collect(),
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ScheduleEntry {
    pub id: FlatId,
    pub dim: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct NestedJson {
    pub by_size: BTreeMap<usize, usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sets: Option<Vec<Vec<FlatId>>>,
}

#[derive(Debug, Clone, Serialize)]
pub struct BuildingJson {
    pub schema: &'static str,
    pub which: String,
    pub members: Vec<FlatId>,
    pub geometric_members: Vec<FlatId>,
    /// Members that are projectively empty.
    pub flagged_empty: Vec<FlatId>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub schedule: Option<Vec<ScheduleEntry>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nested: Option<NestedJson>,
}

/// Schedule dimensions are projective: `lin_dim - 1`.
pub fn building_json(
    lat: &IntersectionLattice,
    which: &str,
    g: &BuildingSet,
    schedule: Option<&BlowupSchedule>,
    nested: Option<(&NestedReport, bool)>,
) -> BuildingJson {
    BuildingJson {
        schema: SCHEMA,
        which: which.to_string(),
        members: g.members().iter().copied().collect(),
        geometric_members: g.geometric_members(lat),
        flagged_empty: g.members().iter().copied().filter(|&x| lat.flat(x).proj_empty).collect(),
        schedule: schedule.map(|s| {
            s.centers
                .iter()
                .map(|&id| ScheduleEntry {
                    id,
                    dim: lat.flat(id).lin_dim - 1,
                })
                .collect()
        }),
        nested: nested.map(|(report, with_sets)| NestedJson {
            by_size: report.by_size.clone(),
            sets: with_sets.then(|| report.sets.clone()),
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arrangement::{braid_arrangement, r_braid_arrangement};
    use crate::building::{blowup_schedule, minimal_building_set};
    use crate::lattice::{intersection_lattice, LatticeConfig};

    #[test]
    fn lattice_json_shape() {
        let l = intersection_lattice(&r_braid_arrangement(2, 2).unwrap(), LatticeConfig::default()).unwrap();
        let v = serde_json::to_value(lattice_json(&l)).unwrap();
        assert_eq!(v["schema"], "wonderbraid/1");
        assert_eq!(v["flats"].as_array().unwrap().len(), 6);
        assert_eq!(v["flats"][0]["equations"].as_array().unwrap().len(), 0);
        assert_eq!(v["flats"][5]["proj_empty"], true);
        assert_eq!(v["flats"][5]["equations"], serde_json::json!(["x1", "x2"]));
        assert_eq!(v["hasse"].as_array().unwrap().len(), 8);
        assert_eq!(v["summary"]["counts_by_dim"], serde_json::json!([1, 4, 1]));
        assert_eq!(v["summary"]["characteristic_polynomial"], "t^2 - 4t + 3");
    }

    #[test]
    fn dot_outputs() {
        let l = intersection_lattice(&braid_arrangement(2).unwrap(), LatticeConfig::default()).unwrap();
        let dot = lattice_dot(&l);
        assert!(dot.starts_with("digraph lattice {"));
        assert_eq!(dot.matches(" [label=").count(), 5);
        assert_eq!(dot.matches(" -> ").count(), 6);

        let g = RnGraph::flower(2, 2, &[1, 2]).unwrap();
        let dot = graph_dot(&g);
        assert_eq!(dot.matches(" -- ").count(), 4);
        assert!(dot.contains("v1 -- v2 [label=\"0\"]") && dot.contains("v1 -- v2 [label=\"1\"]"));
    }

    #[test]
    fn schedule_dimensions_are_projective() {
        let l = intersection_lattice(&r_braid_arrangement(2, 2).unwrap(), LatticeConfig::default()).unwrap();
        let g = minimal_building_set(&l);
        let s = blowup_schedule(&l, &g);
        let j = building_json(&l, "minimal", &g, Some(&s), None);
        assert_eq!(j.members.len(), 5);
        assert_eq!(j.geometric_members.len(), 4);
        assert_eq!(j.flagged_empty, vec![l.top()]);
        assert!(j.schedule.unwrap().iter().all(|e| e.dim == 0));
    }
}
