use rstar::{RTree, RTreeObject, AABB};

use crate::geo::{PlanarPoint, Projection};

use super::ThematicLayer;

#[derive(Debug, Clone, Copy)]
struct Entry {
    slot: usize,
    xy: [f64; 2],
}

impl RTreeObject for Entry {
    type Envelope = AABB<[f64; 2]>;

    fn envelope(&self) -> Self::Envelope {
        AABB::from_point(self.xy)
    }
}

/// Planar index over a thematic layer's points.
///
/// Results are layer slots (positions in `layer.points`), not point ids.
pub struct SpatialIndex {
    tree: RTree<Entry>,
    planar: Vec<PlanarPoint>,
    ids: Vec<usize>,
    bounds: Option<(PlanarPoint, PlanarPoint)>,
}

impl SpatialIndex {
    pub fn build(layer: &ThematicLayer, proj: &Projection) -> Self {
        let planar: Vec<PlanarPoint> = layer.points.iter().map(|p| proj.project(p.position)).collect();
        let entries = planar
            .iter()
            .enumerate()
            .map(|(slot, q)| Entry { slot, xy: [q.x, q.y] })
            .collect();
        let bounds = planar.iter().fold(None, |acc: Option<(PlanarPoint, PlanarPoint)>, q| {
            Some(match acc {
                None => (*q, *q),
                Some((lo, hi)) => (
                    PlanarPoint::new(lo.x.min(q.x), lo.y.min(q.y)),
                    PlanarPoint::new(hi.x.max(q.x), hi.y.max(q.y)),
                ),
            })
        });
        SpatialIndex {
            tree: RTree::bulk_load(entries),
            planar,
            ids: layer.points.iter().map(|p| p.id).collect(),
            bounds,
        }
    }

    pub fn len(&self) -> usize {
        self.planar.len()
    }

    pub fn is_empty(&self) -> bool {
        self.planar.is_empty()
    }

    pub fn position(&self, slot: usize) -> PlanarPoint {
        self.planar[slot]
    }

    pub fn id(&self, slot: usize) -> usize {
        self.ids[slot]
    }

    /// Bounding box of all indexed points.
    pub fn bounds(&self) -> Option<(PlanarPoint, PlanarPoint)> {
        self.bounds
    }

    /// Slots whose point lies inside the axis-aligned box (inclusive).
    pub fn in_box(&self, lo: PlanarPoint, hi: PlanarPoint) -> impl Iterator<Item = usize> + '_ {
        self.tree
            .locate_in_envelope_intersecting(&AABB::from_corners([lo.x, lo.y], [hi.x, hi.y]))
            .map(|e| e.slot)
    }

    /// Slots within the bounding box of `pts` grown by `margin` on every side.
    pub fn near(&self, pts: &[PlanarPoint], margin: f64) -> impl Iterator<Item = usize> + '_ {
        let (mut lo, mut hi) = (pts[0], pts[0]);
        for p in pts {
            lo = PlanarPoint::new(lo.x.min(p.x), lo.y.min(p.y));
            hi = PlanarPoint::new(hi.x.max(p.x), hi.y.max(p.y));
        }
        // The slack keeps points exactly on the boundary inside the box.
        let m = margin + 1e-6;
        self.in_box(PlanarPoint::new(lo.x - m, lo.y - m), PlanarPoint::new(hi.x + m, hi.y + m))
    }
}
