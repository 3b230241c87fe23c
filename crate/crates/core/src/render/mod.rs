//! Render plans: styled primitives in geographic coordinates, plus their
//! canonical JSON form and an SVG emitter.

pub mod layout;
mod svg;

pub use layout::{
    layout_bristle, layout_chart_anchor, layout_circle, layout_matrix, layout_parallel, layout_perpendicular,
    meters_per_pixel, offset_distance, offset_polyline, squiggle_path, squiggle_periods, Shape, NOMINAL_ZOOM,
};
pub use svg::{emit_svg, Viewport};

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::encoding::{ResolvedStyle, Rgba};
use crate::geo::{GeoPoint, PlanarPoint, Projection};
use crate::spec::{Diagnostic, UnitBinding};

/// Decimal places kept for coordinates in serialized plans.
pub const COORD_DECIMALS: i32 = 7;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum PrimitiveKind {
    Polyline,
    Rect,
    Path,
    Circle,
    ChartAnchor,
}

/// Chart placeholder data carried by `chartAnchor` primitives.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ChartAnchor {
    pub orientation_deg: f64,
    pub alignment: String,
    /// The unit's chart document with its `data` replaced by the element's
    /// record.
    pub embedded_spec: Value,
    pub injected_data: BTreeMap<String, f64>,
}

impl ChartAnchor {
    pub fn new(spec: &Value, record: BTreeMap<String, f64>, orientation_deg: f64, alignment: &str) -> Self {
        let mut embedded = spec.clone();
        if let Value::Object(m) = &mut embedded {
            m.insert("data".into(), serde_json::json!({ "values": [record] }));
        }
        ChartAnchor {
            orientation_deg,
            alignment: alignment.to_string(),
            embedded_spec: embedded,
            injected_data: record,
        }
    }
}

/// A styled mark in geographic coordinates (`[lon, lat]`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Primitive {
    pub kind: PrimitiveKind,
    pub geometry: Vec<[f64; 2]>,
    /// `[along, across]` in meters.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub extent: Option<[f64; 2]>,
    /// Direction of the `along` axis, degrees clockwise from north.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rotation_deg: Option<f64>,
    pub style: ResolvedStyle,
    pub layer_index: usize,
    pub source_id: String,
    pub ordinal: usize,
    pub z_order: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chart: Option<ChartAnchor>,
}

impl Primitive {
    pub fn from_shape(
        shape: &Shape,
        proj: &Projection,
        style: ResolvedStyle,
        layer_index: usize,
        source_id: impl Into<String>,
        ordinal: usize,
    ) -> Self {
        Primitive {
            kind: shape.kind,
            geometry: shape.points.iter().map(|&q| lon_lat(proj.unproject(q))).collect(),
            extent: shape.extent,
            rotation_deg: shape.rotation_deg,
            style,
            layer_index,
            source_id: source_id.into(),
            ordinal,
            z_order: 0,
            chart: None,
        }
    }

    pub fn points(&self) -> impl Iterator<Item = GeoPoint> + '_ {
        self.geometry.iter().map(|&[lon, lat]| GeoPoint { lat, lon })
    }

    /// The primitive's outline vertices in `proj`'s plane.
    pub fn footprint(&self, proj: &Projection) -> Vec<PlanarPoint> {
        Shape {
            kind: self.kind,
            points: self.points().map(|g| proj.project(g)).collect(),
            extent: self.extent,
            rotation_deg: self.rotation_deg,
        }
        .footprint()
    }

    fn sort_key(&self) -> (usize, &str, usize) {
        (self.layer_index, &self.source_id, self.ordinal)
    }
}

pub fn lon_lat(g: GeoPoint) -> [f64; 2] {
    [g.lon, g.lat]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct LayerMeta {
    pub layer_index: usize,
    pub unit_type: String,
    pub method: String,
    pub orientation: String,
    pub alignment: String,
    pub zoom: [u8; 2],
    pub visible: bool,
    pub primitive_count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct PlanMeta {
    pub spec_hash: String,
    pub unit_bindings: Vec<UnitBinding>,
    pub warnings: Vec<Diagnostic>,
    pub layers: Vec<LayerMeta>,
    /// Zoom the plan was requested for; decides layer visibility.
    pub zoom: u8,
    /// Zoom at which pixel sizes were converted to meters.
    pub nominal_zoom: u8,
    pub meters_per_pixel: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct BaseStreet {
    pub id: String,
    pub geometry: Vec<[f64; 2]>,
}

/// The street network drawn underneath every layer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct BaseLayer {
    pub street_color: Rgba,
    pub street_width: f64,
    pub background: String,
    pub streets: Vec<BaseStreet>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct RenderPlan {
    /// `[minLon, minLat, maxLon, maxLat]`.
    pub bbox: [f64; 4],
    pub base: BaseLayer,
    pub primitives: Vec<Primitive>,
    pub meta: PlanMeta,
}

impl RenderPlan {
    /// Sort primitives, number them, and compute the bounding box over the
    /// base streets and every primitive outline.
    pub fn assemble(mut primitives: Vec<Primitive>, base: BaseLayer, meta: PlanMeta, proj: &Projection) -> Self {
        primitives.sort_by(|a, b| a.sort_key().cmp(&b.sort_key()));
        for (i, p) in primitives.iter_mut().enumerate() {
            p.z_order = i;
        }
        let mut bbox = [f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY];
        let mut grow = |g: GeoPoint| {
            bbox[0] = bbox[0].min(g.lon);
            bbox[1] = bbox[1].min(g.lat);
            bbox[2] = bbox[2].max(g.lon);
            bbox[3] = bbox[3].max(g.lat);
        };
        for s in &base.streets {
            s.geometry.iter().for_each(|&[lon, lat]| grow(GeoPoint { lat, lon }));
        }
        for p in &primitives {
            p.points().for_each(&mut grow);
            if p.extent.is_some() {
                p.footprint(proj).into_iter().for_each(|q| grow(proj.unproject(q)));
            }
        }
        if bbox[0] > bbox[2] {
            let o = proj.origin();
            bbox = [o.lon, o.lat, o.lon, o.lat];
        }
        RenderPlan { bbox, base, primitives, meta }
    }

    /// Distinct layer indices that own at least one primitive.
    pub fn layer_count(&self) -> usize {
        let mut layers: Vec<usize> = self.primitives.iter().map(|p| p.layer_index).collect();
        layers.dedup();
        layers.len()
    }

    pub fn layer(&self, index: usize) -> impl Iterator<Item = &Primitive> {
        self.primitives.iter().filter(move |p| p.layer_index == index)
    }

    /// The plan exactly as [`emit_plan`] writes it: coordinates rounded to
    /// 7 decimals, the bbox widened to the same grid, sizes to 6 decimals.
    pub fn quantized(&self) -> RenderPlan {
        let mut plan = self.clone();
        let scale = 10f64.powi(COORD_DECIMALS);
        let snap = |v: f64, f: fn(f64) -> f64| {
            let s = v * scale;
            let r = s.round();
            clean(if (s - r).abs() < 1e-6 { r } else { f(s) } / scale)
        };
        let down = |v: f64| snap(v, f64::floor);
        let up = |v: f64| snap(v, f64::ceil);
        plan.bbox = [down(plan.bbox[0]), down(plan.bbox[1]), up(plan.bbox[2]), up(plan.bbox[3])];
        let coords = |g: &mut Vec<[f64; 2]>| {
            for c in g.iter_mut() {
                *c = [round_to(c[0], COORD_DECIMALS), round_to(c[1], COORD_DECIMALS)];
            }
        };
        for s in &mut plan.base.streets {
            coords(&mut s.geometry);
        }
        for p in &mut plan.primitives {
            coords(&mut p.geometry);
            p.extent = p.extent.map(|[a, b]| [round_to(a, 6), round_to(b, 6)]);
            p.rotation_deg = p.rotation_deg.map(round_degrees);
            let s = &mut p.style;
            s.width_px = round_to(s.width_px, 6);
            s.height_px = round_to(s.height_px, 6);
            s.opacity = round_to(s.opacity, 6);
            s.dash = s.dash.map(|[a, b]| [round_to(a, 6), round_to(b, 6)]);
            if let Some(q) = &mut s.squiggle {
                q.amplitude_px = round_to(q.amplitude_px, 6);
                q.wavelength_px = round_to(q.wavelength_px, 6);
            }
            if let Some(c) = &mut p.chart {
                c.orientation_deg = round_degrees(c.orientation_deg);
            }
        }
        plan.meta.meters_per_pixel = round_to(plan.meta.meters_per_pixel, 9);
        plan
    }
}

/// Round an angle to 6 decimals, keeping it in `[0, 360)`.
fn round_degrees(d: f64) -> f64 {
    let r = round_to(d, 6);
    if r >= 360.0 {
        0.0
    } else {
        r
    }
}

fn clean(v: f64) -> f64 {
    if v == 0.0 {
        0.0
    } else {
        v
    }
}

pub fn round_to(v: f64, decimals: i32) -> f64 {
    let s = 10f64.powi(decimals);
    clean((v * s).round() / s)
}

/// Rebuild every JSON object with its keys in sorted order.
pub fn canonical_json(v: Value) -> Value {
    match v {
        Value::Object(m) => {
            let sorted: BTreeMap<String, Value> = m.into_iter().map(|(k, v)| (k, canonical_json(v))).collect();
            Value::Object(sorted.into_iter().collect())
        }
        Value::Array(a) => Value::Array(a.into_iter().map(canonical_json).collect()),
        other => other,
    }
}

/// Canonical plan JSON: sorted keys, quantized numbers, primitives in
/// z-order. Identical plans give identical bytes.
pub fn emit_plan(plan: &RenderPlan) -> String {
    let v = serde_json::to_value(plan.quantized()).expect("plan serializes");
    serde_json::to_string(&canonical_json(v)).expect("plan serializes")
}

pub fn parse_plan(text: &str) -> serde_json::Result<RenderPlan> {
    serde_json::from_str(text)
}
