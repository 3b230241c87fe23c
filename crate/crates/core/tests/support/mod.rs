//! Brute-force reference implementations used by the integration tests.
//!
//! Nothing here calls into the engine's join, aggregation or scale code; the
//! only shared pieces are the point types and the projection.

#![allow(dead_code)]

use std::collections::BTreeMap;

use streetweave::geo::{GeoPoint, PlanarPoint};

pub const GRAMMAR_FIXTURES: &str = include_str!("../fixtures/grammar.json");

fn dist(a: PlanarPoint, b: PlanarPoint) -> f64 {
    ((a.x - b.x) * (a.x - b.x) + (a.y - b.y) * (a.y - b.y)).sqrt()
}

fn seg_dist(p: PlanarPoint, a: PlanarPoint, b: PlanarPoint) -> f64 {
    let (dx, dy) = (b.x - a.x, b.y - a.y);
    let len2 = dx * dx + dy * dy;
    if len2 == 0.0 {
        return dist(p, a);
    }
    let t = (((p.x - a.x) * dx + (p.y - a.y) * dy) / len2).clamp(0.0, 1.0);
    dist(p, PlanarPoint::new(a.x + t * dx, a.y + t * dy))
}

pub fn polyline_dist(p: PlanarPoint, line: &[PlanarPoint]) -> f64 {
    if line.len() == 1 {
        return dist(p, line[0]);
    }
    line.windows(2).map(|w| seg_dist(p, w[0], w[1])).fold(f64::INFINITY, f64::min)
}

/// Midpoint by arc length of a planar polyline.
pub fn arc_midpoint(line: &[PlanarPoint]) -> PlanarPoint {
    if line.len() == 1 {
        return line[0];
    }
    let total: f64 = line.windows(2).map(|w| dist(w[0], w[1])).sum();
    let mut left = total / 2.0;
    for w in line.windows(2) {
        let len = dist(w[0], w[1]);
        if len >= left && len > 0.0 {
            let t = left / len;
            return PlanarPoint::new(w[0].x + t * (w[1].x - w[0].x), w[0].y + t * (w[1].y - w[0].y));
        }
        left -= len;
    }
    *line.last().unwrap()
}

/// Ids of points within `r` of `anchor`, ascending.
pub fn buffer(anchor: PlanarPoint, points: &[(usize, PlanarPoint)], r: f64) -> Vec<usize> {
    let mut ids: Vec<usize> = points.iter().filter(|(_, p)| dist(*p, anchor) <= r).map(|(id, _)| *id).collect();
    ids.sort_unstable();
    ids
}

/// The `k` nearest ids ordered by (distance, id).
pub fn nn(line: &[PlanarPoint], points: &[(usize, PlanarPoint)], k: usize) -> Vec<usize> {
    let mut all: Vec<(f64, usize)> = points.iter().map(|(id, p)| (polyline_dist(*p, line), *id)).collect();
    all.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then(a.1.cmp(&b.1)));
    all.into_iter().take(k).map(|(_, id)| id).collect()
}

/// Corridor membership: within `hw` of some edge, with the perpendicular
/// foot on that edge. A single-vertex line is a disk.
pub fn contains(line: &[PlanarPoint], points: &[(usize, PlanarPoint)], hw: f64) -> Vec<usize> {
    let inside = |p: PlanarPoint| {
        if line.len() == 1 {
            return dist(p, line[0]) <= hw;
        }
        line.windows(2).any(|w| {
            let (a, b) = (w[0], w[1]);
            let (dx, dy) = (b.x - a.x, b.y - a.y);
            let len2 = dx * dx + dy * dy;
            if len2 == 0.0 {
                return false;
            }
            let t = ((p.x - a.x) * dx + (p.y - a.y) * dy) / len2;
            (0.0..=1.0).contains(&t) && dist(p, PlanarPoint::new(a.x + t * dx, a.y + t * dy)) <= hw
        })
    };
    let mut ids: Vec<usize> = points.iter().filter(|(_, p)| inside(*p)).map(|(id, _)| *id).collect();
    ids.sort_unstable();
    ids
}

pub fn sum(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    v.iter().fold(0.0, |acc, x| acc + x)
}

pub fn mean(values: &[f64]) -> f64 {
    sum(values) / values.len() as f64
}

/// One CSV data row: ordinal, position and numeric cells.
#[derive(Debug, Clone)]
pub struct Row {
    pub id: usize,
    pub position: GeoPoint,
    pub values: BTreeMap<String, f64>,
}

/// Minimal reader for the bundled sample files (no quoting, no blanks).
pub fn read_rows(text: &str) -> Vec<Row> {
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    lines
        .filter(|l| !l.trim().is_empty())
        .enumerate()
        .map(|(id, line)| {
            let cells: Vec<f64> = line.split(',').map(|c| c.trim().parse().unwrap()).collect();
            let mut values = BTreeMap::new();
            let (mut lat, mut lon) = (0.0, 0.0);
            for (h, v) in header.iter().zip(cells) {
                match *h {
                    "latitude" => lat = v,
                    "longitude" => lon = v,
                    name => {
                        values.insert(name.to_string(), v);
                    }
                }
            }
            Row { id, position: GeoPoint { lat, lon }, values }
        })
        .collect()
}

/// `[lo, hi]` of a set of values.
pub fn extent(values: impl IntoIterator<Item = f64>) -> Option<(f64, f64)> {
    values.into_iter().fold(None, |acc, v| Some(acc.map_or((v, v), |(lo, hi): (f64, f64)| (lo.min(v), hi.max(v)))))
}

/// Linear map of `v` from `domain` onto `range`, clamped.
pub fn linear(v: f64, domain: (f64, f64), range: [f64; 2]) -> f64 {
    if domain.1 <= domain.0 {
        return (range[0] + range[1]) / 2.0;
    }
    let t = ((v - domain.0) / (domain.1 - domain.0)).clamp(0.0, 1.0);
    range[0] + t * (range[1] - range[0])
}
