//! Binding thematic points to network elements and aggregating them.
//!
//! Three relations are supported:
//!
//! * `buffer`: points within a radius of the element's midpoint (the node
//!   position for nodes).
//! * `nn`: the k points closest to the element's geometry, ties broken by
//!   ascending point id.
//! * `contains`: points inside a rectangular corridor around each polyline
//!   edge (a disk for nodes).
//!
//! All distances are planar, in the network's local projection. Boundaries
//! are inclusive.

mod index;
mod thematic;

pub use index::SpatialIndex;
pub use thematic::{load_thematic, parse_thematic, AttrValue, ThematicLayer, ThematicLoad, ThematicPoint};

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::geo::{
    closest_on_segment, distance_to_polyline, planar_point_along, planar_length, GeoPoint, NetworkNode,
    PlanarPoint, Projection, StreetSegment, SubSegment,
};
use crate::spec::{Aggregation, RelationSpec, SpatialRelation};

/// Planar geometry of an element, as seen by the relations.
#[derive(Debug, Clone, PartialEq)]
pub enum JoinGeometry {
    Linear { line: Vec<PlanarPoint>, midpoint: PlanarPoint },
    Point(PlanarPoint),
}

/// An element (segment, sub-segment or node) prepared for joining.
#[derive(Debug, Clone, PartialEq)]
pub struct JoinTarget {
    pub id: String,
    pub geometry: JoinGeometry,
}

impl JoinTarget {
    pub fn linear(id: impl Into<String>, polyline: &[GeoPoint], proj: &Projection) -> Self {
        let line = proj.project_all(polyline);
        let (midpoint, _) = planar_point_along(&line, planar_length(&line) / 2.0);
        JoinTarget { id: id.into(), geometry: JoinGeometry::Linear { line, midpoint } }
    }

    pub fn segment(seg: &StreetSegment, proj: &Projection) -> Self {
        Self::linear(seg.id.clone(), &seg.polyline, proj)
    }

    pub fn sub_segment(sub: &SubSegment, proj: &Projection) -> Self {
        Self::linear(sub.id(), &sub.polyline, proj)
    }

    pub fn node(node: &NetworkNode, proj: &Projection) -> Self {
        JoinTarget { id: node.id.clone(), geometry: JoinGeometry::Point(proj.project(node.position)) }
    }

    pub fn point(id: impl Into<String>, p: GeoPoint, proj: &Projection) -> Self {
        JoinTarget { id: id.into(), geometry: JoinGeometry::Point(proj.project(p)) }
    }

    /// Buffer anchor: midpoint for linear elements, the position otherwise.
    pub fn anchor(&self) -> PlanarPoint {
        match &self.geometry {
            JoinGeometry::Linear { midpoint, .. } => *midpoint,
            JoinGeometry::Point(p) => *p,
        }
    }

    fn points(&self) -> &[PlanarPoint] {
        match &self.geometry {
            JoinGeometry::Linear { line, .. } => line,
            JoinGeometry::Point(p) => std::slice::from_ref(p),
        }
    }

    /// Distance used by the nearest-neighbour relation.
    pub fn distance(&self, p: PlanarPoint) -> f64 {
        distance_to_polyline(p, self.points())
    }
}

fn sorted_ids(index: &SpatialIndex, slots: impl Iterator<Item = usize>) -> Vec<usize> {
    let mut ids: Vec<usize> = slots.map(|s| index.id(s)).collect();
    ids.sort_unstable();
    ids
}

/// Point ids within `radius_m` of the element's anchor, ascending.
pub fn relate_buffer(target: &JoinTarget, index: &SpatialIndex, radius_m: f64) -> Vec<usize> {
    let anchor = target.anchor();
    sorted_ids(
        index,
        index
            .near(&[anchor], radius_m)
            .filter(|&s| index.position(s).distance(anchor) <= radius_m),
    )
}

/// The `k` closest point ids ordered by (distance, id).
pub fn relate_nn(target: &JoinTarget, index: &SpatialIndex, k: usize) -> Vec<usize> {
    if k == 0 || index.is_empty() {
        return Vec::new();
    }
    let pts = target.points();
    let limit = match index.bounds() {
        Some((lo, hi)) => {
            let far = pts
                .iter()
                .map(|p| p.distance(lo).max(p.distance(hi)).max(p.distance(PlanarPoint::new(lo.x, hi.y))).max(p.distance(PlanarPoint::new(hi.x, lo.y))))
                .fold(0.0, f64::max);
            far + 1.0
        }
        None => return Vec::new(),
    };
    // Grow a search radius until it holds at least k candidates; every
    // point outside it is farther than every point inside.
    let mut radius = 16.0_f64;
    loop {
        let r = radius.min(limit);
        let mut found: Vec<(f64, usize)> = index
            .near(pts, r)
            .map(|s| (target.distance(index.position(s)), index.id(s)))
            .filter(|&(d, _)| d <= r)
            .collect();
        if found.len() >= k || r >= limit {
            found.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
            found.truncate(k);
            return found.into_iter().map(|(_, id)| id).collect();
        }
        radius *= 2.0;
    }
}

/// Point ids inside the element's corridor (`half_width_m` each side of
/// every edge, with the perpendicular foot inside the edge), ascending.
pub fn relate_contains(target: &JoinTarget, index: &SpatialIndex, half_width_m: f64) -> Vec<usize> {
    match &target.geometry {
        JoinGeometry::Point(center) => sorted_ids(
            index,
            index
                .near(&[*center], half_width_m)
                .filter(|&s| index.position(s).distance(*center) <= half_width_m),
        ),
        JoinGeometry::Linear { line, .. } => sorted_ids(
            index,
            index
                .near(line, half_width_m)
                .filter(|&s| in_corridor(index.position(s), line, half_width_m)),
        ),
    }
}

fn in_corridor(p: PlanarPoint, line: &[PlanarPoint], half_width: f64) -> bool {
    line.windows(2).any(|w| {
        let ab = w[1] - w[0];
        let len2 = ab.dot(ab);
        if len2 == 0.0 {
            return false;
        }
        let t = (p - w[0]).dot(ab) / len2;
        (0.0..=1.0).contains(&t) && closest_on_segment(p, w[0], w[1]).1 <= half_width
    })
}

/// Apply a relation to one element.
pub fn relate(target: &JoinTarget, index: &SpatialIndex, relation: &RelationSpec) -> Vec<usize> {
    match relation.spatial {
        SpatialRelation::Buffer => relate_buffer(target, index, relation.value),
        SpatialRelation::Nn => relate_nn(target, index, relation.value as usize),
        SpatialRelation::Contains => relate_contains(target, index, relation.value),
    }
}

/// Reduce values; `None` for an empty list.
///
/// Values are summed in ascending order so the result does not depend on
/// input order.
pub fn aggregate(values: &[f64], kind: Aggregation) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    Some(match kind {
        Aggregation::Sum => sorted.iter().sum(),
        Aggregation::Mean => sorted.iter().sum::<f64>() / sorted.len() as f64,
        Aggregation::Min => sorted[0],
        Aggregation::Max => sorted[sorted.len() - 1],
    })
}

/// An element with the points bound to it and their aggregates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct JoinedElement {
    pub element_id: String,
    pub matched_point_ids: Vec<usize>,
    /// Numeric columns with at least one non-missing matched value.
    pub aggregates: BTreeMap<String, f64>,
    pub count: usize,
}

impl JoinedElement {
    pub fn value(&self, field: &str) -> Option<f64> {
        self.aggregates.get(field).copied()
    }
}

/// Relate and aggregate every element, in parallel. Output is sorted by
/// element id.
pub fn join(
    targets: &[JoinTarget],
    layer: &ThematicLayer,
    index: &SpatialIndex,
    relation: &RelationSpec,
) -> Vec<JoinedElement> {
    let slot_of: BTreeMap<usize, usize> =
        layer.points.iter().enumerate().map(|(slot, p)| (p.id, slot)).collect();
    let mut out: Vec<JoinedElement> = targets
        .par_iter()
        .map(|t| {
            let ids = relate(t, index, relation);
            let aggregates = layer
                .numeric_columns
                .iter()
                .filter_map(|col| {
                    let values: Vec<f64> =
                        ids.iter().filter_map(|id| layer.points[slot_of[id]].number(col)).collect();
                    aggregate(&values, relation.aggregation).map(|v| (col.clone(), v))
                })
                .collect();
            let mut matched = ids;
            matched.sort_unstable();
            JoinedElement { element_id: t.id.clone(), count: matched.len(), matched_point_ids: matched, aggregates }
        })
        .collect();
    out.sort_by(|a, b| a.element_id.cmp(&b.element_id));
    out
}

/// Elements with no thematic layer: nothing matched.
pub fn empty_join(targets: &[JoinTarget]) -> Vec<JoinedElement> {
    let mut out: Vec<JoinedElement> = targets
        .iter()
        .map(|t| JoinedElement {
            element_id: t.id.clone(),
            matched_point_ids: Vec::new(),
            aggregates: BTreeMap::new(),
            count: 0,
        })
        .collect();
    out.sort_by(|a, b| a.element_id.cmp(&b.element_id));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn layer_at(points: &[(f64, f64, f64)], proj: &Projection) -> ThematicLayer {
        let mut csv = String::from("latitude,longitude,v\n");
        for &(x, y, v) in points {
            let g = proj.unproject(PlanarPoint::new(x, y));
            csv.push_str(&format!("{},{},{}\n", g.lat, g.lon, v));
        }
        parse_thematic(&csv, "t", "latitude", "longitude").unwrap().layer
    }

    fn setup(points: &[(f64, f64, f64)]) -> (Projection, ThematicLayer, SpatialIndex, JoinTarget) {
        let proj = Projection::new(GeoPoint { lat: 41.88, lon: -87.63 });
        let layer = layer_at(points, &proj);
        let index = SpatialIndex::build(&layer, &proj);
        // East-west segment from x = -50 to x = 50.
        let target = JoinTarget {
            id: "s".into(),
            geometry: JoinGeometry::Linear {
                line: vec![PlanarPoint::new(-50.0, 0.0), PlanarPoint::new(50.0, 0.0)],
                midpoint: PlanarPoint::new(0.0, 0.0),
            },
        };
        (proj, layer, index, target)
    }

    #[test]
    fn buffer_inside_and_outside() {
        let (_, _, index, target) = setup(&[(5.0, 0.0, 1.0), (15.0, 0.0, 2.0), (0.0, -9.0, 3.0)]);
        assert_eq!(relate_buffer(&target, &index, 10.0), vec![0, 2]);
    }

    #[test]
    fn contains_corridor_and_extent() {
        let (_, _, index, target) = setup(&[(0.0, 3.0, 1.0), (53.0, 0.0, 1.0), (49.0, -4.9, 1.0), (10.0, 6.0, 1.0)]);
        assert_eq!(relate_contains(&target, &index, 5.0), vec![0, 2]);
    }

    #[test]
    fn nn_returns_all_when_k_exceeds() {
        let pts: Vec<_> = (0..10).map(|i| (i as f64 * 30.0, 5.0, 1.0)).collect();
        let (_, _, index, target) = setup(&pts);
        let got = relate_nn(&target, &index, 50);
        assert_eq!(got.len(), 10);
    }

    #[test]
    fn nn_orders_by_distance_then_id() {
        let (_, _, index, target) = setup(&[(0.0, 8.0, 1.0), (0.0, 2.0, 1.0), (10.0, -2.0, 1.0), (500.0, 0.0, 1.0)]);
        assert_eq!(relate_nn(&target, &index, 3), vec![1, 2, 0]);
    }

    #[test]
    fn aggregate_rules() {
        assert_eq!(aggregate(&[2.0, 4.0, 6.0], Aggregation::Mean), Some(4.0));
        assert_eq!(aggregate(&[], Aggregation::Sum), None);
        for kind in [Aggregation::Sum, Aggregation::Mean, Aggregation::Min, Aggregation::Max] {
            assert_eq!(aggregate(&[7.5], kind), Some(7.5));
        }
        assert_eq!(aggregate(&[3.0, -1.0, 2.0], Aggregation::Min), Some(-1.0));
        assert_eq!(aggregate(&[3.0, -1.0, 2.0], Aggregation::Max), Some(3.0));
    }

    #[test]
    fn join_aggregates_numeric_columns() {
        let (_, layer, index, target) = setup(&[(1.0, 1.0, 2.0), (2.0, 1.0, 4.0), (100.0, 100.0, 9.0)]);
        let rel = RelationSpec { spatial: SpatialRelation::Buffer, value: 10.0, aggregation: Aggregation::Mean };
        let out = join(&[target], &layer, &index, &rel);
        assert_eq!(out[0].count, 2);
        assert_eq!(out[0].matched_point_ids, vec![0, 1]);
        assert_eq!(out[0].value("v"), Some(3.0));
    }

    #[test]
    fn empty_match_has_no_aggregate() {
        let (_, layer, index, target) = setup(&[(100.0, 100.0, 9.0)]);
        let rel = RelationSpec { spatial: SpatialRelation::Buffer, value: 10.0, aggregation: Aggregation::Sum };
        let out = join(&[target], &layer, &index, &rel);
        assert_eq!(out[0].count, 0);
        assert!(out[0].aggregates.is_empty());
    }
}
