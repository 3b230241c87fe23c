//! Street network loading and intersection extraction.

use std::collections::{BTreeMap, HashMap};
use std::path::Path;

use geojson::GeoJson;
use serde_json::Value;

use super::*;

/// Endpoints closer than this merge into one node.
pub const SNAP_TOLERANCE_M: f64 = 0.5;

#[derive(Debug, Clone, PartialEq)]
pub struct StreetSegment {
    pub id: String,
    pub polyline: Vec<GeoPoint>,
    pub length_m: f64,
    pub bearing_deg: f64,
}

impl StreetSegment {
    /// Build a segment, dropping consecutive duplicate vertices.
    ///
    /// The bearing runs from the first to the last vertex; closed loops fall
    /// back to the direction of the first edge.
    pub fn new(id: impl Into<String>, mut polyline: Vec<GeoPoint>) -> Result<Self> {
        let id = id.into();
        polyline.dedup();
        if polyline.len() < 2 {
            return Err(Error::data(id, "segment needs at least 2 distinct vertices"));
        }
        let first = polyline[0];
        let last = *polyline.last().unwrap();
        let bearing_deg = bearing(first, last).or_else(|_| bearing(first, polyline[1]))?;
        let length_m = polyline_length_m(&polyline);
        Ok(StreetSegment { id, polyline, length_m, bearing_deg })
    }

    /// Arc-length midpoint.
    pub fn midpoint(&self) -> GeoPoint {
        point_along(&self.polyline, self.length_m / 2.0)
    }

    pub fn start(&self) -> GeoPoint {
        self.polyline[0]
    }

    pub fn end(&self) -> GeoPoint {
        *self.polyline.last().unwrap()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NetworkNode {
    pub id: String,
    pub position: GeoPoint,
    /// Number of segment endpoints merged into this node.
    pub degree: usize,
}

/// Physical layer. Immutable once loaded.
#[derive(Debug, Clone)]
pub struct StreetNetwork {
    pub segments: BTreeMap<String, StreetSegment>,
    pub nodes: BTreeMap<String, NetworkNode>,
    /// Node ids of each segment's (start, end).
    pub endpoints: BTreeMap<String, (String, String)>,
    pub centroid: GeoPoint,
}

impl StreetNetwork {
    /// Assemble a network from segments, snapping endpoints into nodes.
    pub fn from_segments(segments: Vec<StreetSegment>) -> Result<Self> {
        if segments.is_empty() {
            return Err(Error::data("network", "network has no segments"));
        }
        let vertex_count: usize = segments.iter().map(|s| s.polyline.len()).sum();
        let (lat_sum, lon_sum) = segments
            .iter()
            .flat_map(|s| &s.polyline)
            .fold((0.0, 0.0), |(a, b), p| (a + p.lat, b + p.lon));
        let centroid = GeoPoint { lat: lat_sum / vertex_count as f64, lon: lon_sum / vertex_count as f64 };
        let proj = Projection::new(centroid);

        let mut snapper = Snapper::new(proj);
        let mut by_id = BTreeMap::new();
        let mut endpoints = BTreeMap::new();
        for seg in segments {
            let a = snapper.node_for(seg.start());
            let b = snapper.node_for(seg.end());
            endpoints.insert(seg.id.clone(), (a, b));
            if let Some(prev) = by_id.insert(seg.id.clone(), seg) {
                return Err(Error::data("network", format!("duplicate segment id `{}`", prev.id)));
            }
        }
        Ok(StreetNetwork { segments: by_id, nodes: snapper.finish(), endpoints, centroid })
    }

    pub fn projection(&self) -> Projection {
        Projection::new(self.centroid)
    }

    /// `[min_lon, min_lat, max_lon, max_lat]` over all vertices.
    pub fn bbox(&self) -> [f64; 4] {
        let mut b = [f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY];
        for p in self.segments.values().flat_map(|s| &s.polyline) {
            b[0] = b[0].min(p.lon);
            b[1] = b[1].min(p.lat);
            b[2] = b[2].max(p.lon);
            b[3] = b[3].max(p.lat);
        }
        b
    }
}

struct Snapper {
    proj: Projection,
    cells: HashMap<(i64, i64), Vec<usize>>,
    nodes: Vec<(PlanarPoint, NetworkNode)>,
}

impl Snapper {
    fn new(proj: Projection) -> Self {
        Snapper { proj, cells: HashMap::new(), nodes: Vec::new() }
    }

    fn cell(q: PlanarPoint) -> (i64, i64) {
        ((q.x / SNAP_TOLERANCE_M).floor() as i64, (q.y / SNAP_TOLERANCE_M).floor() as i64)
    }

    fn node_for(&mut self, p: GeoPoint) -> String {
        let q = self.proj.project(p);
        let (cx, cy) = Self::cell(q);
        let mut best: Option<(f64, usize)> = None;
        for dx in -1..=1 {
            for dy in -1..=1 {
                for &i in self.cells.get(&(cx + dx, cy + dy)).into_iter().flatten() {
                    let d = self.nodes[i].0.distance(q);
                    if d <= SNAP_TOLERANCE_M && best.is_none_or(|(bd, bi)| (d, i) < (bd, bi)) {
                        best = Some((d, i));
                    }
                }
            }
        }
        let i = match best {
            Some((_, i)) => i,
            None => {
                let i = self.nodes.len();
                let node = NetworkNode { id: format!("n-{i}"), position: p, degree: 0 };
                self.nodes.push((q, node));
                self.cells.entry((cx, cy)).or_default().push(i);
                i
            }
        };
        let node = &mut self.nodes[i].1;
        node.degree += 1;
        node.id.clone()
    }

    fn finish(self) -> BTreeMap<String, NetworkNode> {
        self.nodes.into_iter().map(|(_, n)| (n.id.clone(), n)).collect()
    }
}

/// A loaded network together with the features that were skipped.
#[derive(Debug, Clone)]
pub struct NetworkLoad {
    pub network: StreetNetwork,
    pub warnings: Vec<String>,
}

pub fn load_network(path: &Path) -> Result<NetworkLoad> {
    let text = std::fs::read_to_string(path)
        .map_err(|source| Error::Io { path: path.to_path_buf(), source })?;
    parse_network(&text).map_err(|e| match e {
        Error::Data { message, .. } => Error::data(path.display().to_string(), message),
        other => other,
    })
}

/// Parse a GeoJSON FeatureCollection (or Feature / bare geometry) of
/// LineStrings, or the plain array form
/// `[{"id": "a", "coordinates": [[lon, lat], ...]}, ...]`.
pub fn parse_network(text: &str) -> Result<NetworkLoad> {
    let value: Value =
        serde_json::from_str(text).map_err(|e| Error::data("network", format!("unparseable document: {e}")))?;
    let mut raw = Vec::new();
    let mut warnings = Vec::new();
    match value {
        Value::Array(items) => plain_array(items, &mut raw, &mut warnings),
        other => {
            let gj = GeoJson::from_json_value(other)
                .map_err(|e| Error::data("network", format!("not a GeoJSON document: {e}")))?;
            match gj {
                GeoJson::FeatureCollection(fc) => {
                    for (i, f) in fc.features.into_iter().enumerate() {
                        feature(i, f, &mut raw, &mut warnings);
                    }
                }
                GeoJson::Feature(f) => feature(0, f, &mut raw, &mut warnings),
                GeoJson::Geometry(g) => geometry("seg-0".to_string(), 0, g.value, &mut raw, &mut warnings),
            }
        }
    }

    let mut segments = Vec::with_capacity(raw.len());
    for (label, id, coords) in raw {
        let pts: Result<Vec<GeoPoint>> = coords.iter().map(|&[lon, lat]| GeoPoint::new(lat, lon)).collect();
        match pts.and_then(|pts| StreetSegment::new(id, pts)) {
            Ok(seg) => segments.push(seg),
            Err(e) => warnings.push(format!("{label} skipped: {}", short(&e))),
        }
    }
    if segments.is_empty() {
        return Err(Error::data("network", "no usable line segments"));
    }
    Ok(NetworkLoad { network: StreetNetwork::from_segments(segments)?, warnings })
}

fn short(e: &Error) -> String {
    match e {
        Error::Data { message, .. } => message.clone(),
        other => other.to_string(),
    }
}

type RawSegment = (String, String, Vec<[f64; 2]>);

fn feature(i: usize, f: geojson::Feature, raw: &mut Vec<RawSegment>, warnings: &mut Vec<String>) {
    let prop_id = f.property("id").and_then(id_string);
    let feature_id = f.id.as_ref().map(|id| match id {
        geojson::feature::Id::String(s) => s.clone(),
        geojson::feature::Id::Number(n) => n.to_string(),
    });
    let id = prop_id.or(feature_id).unwrap_or_else(|| format!("seg-{i}"));
    match f.geometry {
        Some(g) => geometry(id, i, g.value, raw, warnings),
        None => warnings.push(format!("feature {i} skipped: no geometry")),
    }
}

fn id_string(v: &Value) -> Option<String> {
    match v {
        Value::String(s) => Some(s.clone()),
        Value::Number(n) => Some(n.to_string()),
        _ => None,
    }
}

fn coords(line: Vec<Vec<f64>>) -> Vec<[f64; 2]> {
    line.into_iter().filter(|c| c.len() >= 2).map(|c| [c[0], c[1]]).collect()
}

fn geometry(id: String, i: usize, value: geojson::Value, raw: &mut Vec<RawSegment>, warnings: &mut Vec<String>) {
    match value {
        geojson::Value::LineString(line) => raw.push((format!("feature {i}"), id, coords(line))),
        geojson::Value::MultiLineString(parts) => {
            for (k, line) in parts.into_iter().enumerate() {
                raw.push((format!("feature {i} part {k}"), format!("{id}-{k}"), coords(line)));
            }
        }
        other => warnings.push(format!("feature {i} skipped: {} geometry", other.type_name())),
    }
}

fn plain_array(items: Vec<Value>, raw: &mut Vec<RawSegment>, warnings: &mut Vec<String>) {
    for (i, item) in items.into_iter().enumerate() {
        let (id, line) = match item {
            Value::Object(mut m) => {
                let id = m.get("id").and_then(id_string).unwrap_or_else(|| format!("seg-{i}"));
                (id, m.remove("coordinates"))
            }
            line @ Value::Array(_) => (format!("seg-{i}"), Some(line)),
            _ => (String::new(), None),
        };
        match line.and_then(|l| serde_json::from_value::<Vec<Vec<f64>>>(l).ok()) {
            Some(line) => raw.push((format!("entry {i}"), id, coords(line))),
            None => warnings.push(format!("entry {i} skipped: expected a coordinate list")),
        }
    }
}
