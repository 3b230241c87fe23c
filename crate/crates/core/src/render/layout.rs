//! Planar layout of unit marks. All lengths here are meters in the
//! network's local projection.

use std::f64::consts::TAU;

use crate::encoding::ResolvedStyle;
use crate::geo::{planar_bearing, planar_length, planar_point_along, PlanarPoint};
use crate::spec::{Alignment, Method};

use super::PrimitiveKind;

/// Gap between the base street edge and an offset mark, in pixels.
pub const GAP_PX: f64 = 1.0;
/// Matrix cell edge length, in pixels.
pub const CELL_PX: f64 = 8.0;
/// Chart anchor box edge length, in pixels.
pub const CHART_PX: f64 = 48.0;
/// Default nominal zoom for pixel sizes.
pub const NOMINAL_ZOOM: u8 = 16;

/// Ground resolution of web-mercator tiles at `zoom` and `lat_deg`.
pub fn meters_per_pixel(lat_deg: f64, zoom: u8) -> f64 {
    156_543.033_92 * lat_deg.to_radians().cos() / 2f64.powi(zoom as i32)
}

/// A laid-out mark before conversion to geographic coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct Shape {
    pub kind: PrimitiveKind,
    /// Vertices for polylines and paths; the center for everything else.
    pub points: Vec<PlanarPoint>,
    /// `[along, across]` size in meters for rects, circles and anchors.
    pub extent: Option<[f64; 2]>,
    /// Direction of the `along` axis, degrees clockwise from north.
    pub rotation_deg: Option<f64>,
}

impl Shape {
    pub fn line(kind: PrimitiveKind, points: Vec<PlanarPoint>) -> Self {
        Shape { kind, points, extent: None, rotation_deg: None }
    }

    pub fn boxed(kind: PrimitiveKind, center: PlanarPoint, extent: [f64; 2], rotation_deg: f64) -> Self {
        Shape { kind, points: vec![center], extent: Some(extent), rotation_deg: Some(rotation_deg) }
    }

    /// Every point the mark covers at its outline.
    pub fn footprint(&self) -> Vec<PlanarPoint> {
        match (self.extent, self.kind) {
            (None, _) => self.points.clone(),
            (Some([w, h]), PrimitiveKind::Circle) => {
                let c = self.points[0];
                let (rx, ry) = (w / 2.0, h / 2.0);
                vec![c + PlanarPoint::new(-rx, -ry), c + PlanarPoint::new(rx, ry)]
            }
            (Some([w, h]), _) => {
                let c = self.points[0];
                let theta = self.rotation_deg.unwrap_or(90.0).to_radians();
                let along = PlanarPoint::new(theta.sin(), theta.cos());
                let across = along.left_normal();
                [(-1.0, -1.0), (1.0, -1.0), (1.0, 1.0), (-1.0, 1.0)]
                    .iter()
                    .map(|&(a, b)| c + along * (a * w / 2.0) + across * (b * h / 2.0))
                    .collect()
            }
        }
    }
}

/// Signed offset of a mark's centerline from the street centerline.
/// Positive is the left-hand side when traveling first to last vertex.
pub fn offset_distance(alignment: Alignment, base_width_px: f64, mark_width_px: f64, m_per_px: f64) -> f64 {
    let d = (base_width_px / 2.0 + mark_width_px / 2.0 + GAP_PX) * m_per_px;
    match alignment {
        Alignment::Left => d,
        Alignment::Center => 0.0,
        Alignment::Right => -d,
    }
}

fn edge_normals(line: &[PlanarPoint]) -> Vec<PlanarPoint> {
    line.windows(2).map(|w| (w[1] - w[0]).normalized().left_normal()).collect()
}

/// Offset a polyline by `d` meters along its left normal, mitering joints.
pub fn offset_polyline(line: &[PlanarPoint], d: f64) -> Vec<PlanarPoint> {
    if d == 0.0 {
        return line.to_vec();
    }
    let normals = edge_normals(line);
    let last = normals.len() - 1;
    line.iter()
        .enumerate()
        .map(|(i, &p)| {
            let n = if i == 0 {
                normals[0]
            } else if i > last {
                normals[last]
            } else {
                let (a, b) = (normals[i - 1], normals[i]);
                let sum = a + b;
                if sum.norm() < 1e-9 {
                    a
                } else {
                    // Miter, limited to 4x the offset on sharp turns.
                    let m = sum.normalized();
                    m * (1.0 / m.dot(a)).min(4.0)
                }
            };
            p + n * d
        })
        .collect()
}

/// Sinusoidal displacement along `line`.
///
/// The wavelength is stretched so a whole number of periods fits the line,
/// and the path is sampled every eighth of a period, so both endpoints lie on
/// the original line.
pub fn squiggle_path(line: &[PlanarPoint], amplitude: f64, wavelength: f64) -> Vec<PlanarPoint> {
    let total = planar_length(line);
    if amplitude <= 0.0 || wavelength <= 0.0 || total == 0.0 {
        return line.to_vec();
    }
    let periods = (total / wavelength).round().max(1.0);
    let steps = (periods as usize) * 8;
    let mut out: Vec<PlanarPoint> = (0..=steps)
        .map(|k| {
            let s = total * k as f64 / steps as f64;
            let (p, dir) = planar_point_along(line, s);
            let phase = TAU * (k % 8) as f64 / 8.0;
            p + dir.left_normal() * (amplitude * phase.sin())
        })
        .collect();
    out[0] = line[0];
    out[steps] = line[line.len() - 1];
    out
}

/// Number of whole squiggle periods drawn along a line of `length`.
pub fn squiggle_periods(length: f64, wavelength: f64) -> usize {
    (length / wavelength).round().max(1.0) as usize
}

/// Parallel marks along one element.
pub fn layout_parallel(
    line: &[PlanarPoint],
    style: &ResolvedStyle,
    method: Method,
    alignment: Alignment,
    base_width_px: f64,
    m_per_px: f64,
) -> Vec<Shape> {
    let d = offset_distance(alignment, base_width_px, style.width_px, m_per_px);
    let offset = offset_polyline(line, d);
    match method {
        Method::Rect => offset
            .windows(2)
            .filter(|w| w[0] != w[1])
            .map(|w| {
                let len = w[0].distance(w[1]);
                Shape::boxed(
                    PrimitiveKind::Rect,
                    (w[0] + w[1]) * 0.5,
                    [len, style.width_px * m_per_px],
                    planar_bearing(w[1] - w[0]),
                )
            })
            .collect(),
        _ => match style.squiggle {
            Some(sq) => vec![Shape::line(
                PrimitiveKind::Path,
                squiggle_path(&offset, sq.amplitude_px * m_per_px, sq.wavelength_px * m_per_px),
            )],
            None => vec![Shape::line(PrimitiveKind::Polyline, offset)],
        },
    }
}

/// One bristle per element: a mark perpendicular to the local direction at
/// `mid`, extending away from the street.
///
/// Left bristles leave from the left edge of the base street, right ones from
/// the right edge; centered bristles straddle the centerline.
pub fn layout_bristle(
    mid: PlanarPoint,
    dir: PlanarPoint,
    style: &ResolvedStyle,
    method: Method,
    alignment: Alignment,
    base_width_px: f64,
    m_per_px: f64,
) -> Shape {
    let dir = dir.normalized();
    let normal = dir.left_normal();
    let h = style.height_px * m_per_px;
    let gap = (base_width_px / 2.0 + GAP_PX) * m_per_px;
    let (from, to) = match alignment {
        Alignment::Left => (gap, gap + h),
        Alignment::Right => (-gap, -(gap + h)),
        Alignment::Center => (-h / 2.0, h / 2.0),
    };
    let (a, b) = (mid + normal * from, mid + normal * to);
    match method {
        Method::Rect => Shape::boxed(
            PrimitiveKind::Rect,
            (a + b) * 0.5,
            [style.width_px * m_per_px, h],
            planar_bearing(dir),
        ),
        _ => Shape::line(PrimitiveKind::Polyline, vec![a, b]),
    }
}

/// Bristles for a run of elements given as `(midpoint, direction)`.
pub fn layout_perpendicular(
    elements: &[(PlanarPoint, PlanarPoint)],
    styles: &[ResolvedStyle],
    method: Method,
    alignment: Alignment,
    base_width_px: f64,
    m_per_px: f64,
) -> Vec<Shape> {
    elements
        .iter()
        .zip(styles)
        .map(|(&(mid, dir), style)| layout_bristle(mid, dir, style, method, alignment, base_width_px, m_per_px))
        .collect()
}

/// A `rows` x `columns` grid of square cells centered on `center`, columns
/// running along `dir`. Cells are returned row-major, row 0 on the left.
pub fn layout_matrix(center: PlanarPoint, dir: PlanarPoint, rows: u32, columns: u32, m_per_px: f64) -> Vec<Shape> {
    let dir = dir.normalized();
    let normal = dir.left_normal();
    let cell = CELL_PX * m_per_px;
    let rotation = planar_bearing(dir);
    let mut out = Vec::with_capacity((rows * columns) as usize);
    for r in 0..rows {
        for c in 0..columns {
            let u = (c as f64 - (columns as f64 - 1.0) / 2.0) * cell;
            let v = ((rows as f64 - 1.0) / 2.0 - r as f64) * cell;
            out.push(Shape::boxed(PrimitiveKind::Rect, center + dir * u + normal * v, [cell, cell], rotation));
        }
    }
    out
}

/// Circle marker with radius `style.widthPx`.
pub fn layout_circle(center: PlanarPoint, style: &ResolvedStyle, m_per_px: f64) -> Shape {
    let d = 2.0 * style.width_px * m_per_px;
    Shape { kind: PrimitiveKind::Circle, points: vec![center], extent: Some([d, d]), rotation_deg: None }
}

pub fn layout_chart_anchor(center: PlanarPoint, orientation_deg: f64, m_per_px: f64) -> Shape {
    let s = CHART_PX * m_per_px;
    Shape::boxed(PrimitiveKind::ChartAnchor, center, [s, s], orientation_deg)
}
