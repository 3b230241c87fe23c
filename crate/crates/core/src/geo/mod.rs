//! Geographic primitives: points, a local planar projection, distances and
//! bearings.
//!
//! Metric work happens in a local equirectangular projection about an
//! origin (normally the network centroid). At city scale the distortion is
//! far below anything visible on a map.

mod network;
mod subdivide;

pub use network::{load_network, parse_network, NetworkLoad, NetworkNode, StreetNetwork, StreetSegment};
pub use subdivide::{resolve_density, subdivide, SubSegment, MAX_DENSITY};

use std::ops::{Add, Mul, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Mean Earth radius in meters.
pub const EARTH_RADIUS_M: f64 = 6_371_008.8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeoPoint {
    pub lat: f64,
    pub lon: f64,
}

impl GeoPoint {
    pub fn new(lat: f64, lon: f64) -> Result<Self> {
        if !lat.is_finite() || !lon.is_finite() {
            return Err(Error::InvalidCoordinate(format!("({lat}, {lon}) is not finite")));
        }
        if !(-90.0..=90.0).contains(&lat) {
            return Err(Error::InvalidCoordinate(format!("latitude {lat} out of range")));
        }
        if !(-180.0..=180.0).contains(&lon) {
            return Err(Error::InvalidCoordinate(format!("longitude {lon} out of range")));
        }
        Ok(GeoPoint { lat, lon })
    }

    /// Linear interpolation in coordinate space, which is a straight line in
    /// any equirectangular projection.
    pub fn lerp(self, other: GeoPoint, t: f64) -> GeoPoint {
        GeoPoint {
            lat: self.lat + (other.lat - self.lat) * t,
            lon: self.lon + (other.lon - self.lon) * t,
        }
    }
}

/// Meters east (`x`) and north (`y`) of a projection origin.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PlanarPoint {
    pub x: f64,
    pub y: f64,
}

impl PlanarPoint {
    pub const fn new(x: f64, y: f64) -> Self {
        PlanarPoint { x, y }
    }

    pub fn dot(self, o: PlanarPoint) -> f64 {
        self.x * o.x + self.y * o.y
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn distance(self, o: PlanarPoint) -> f64 {
        (self - o).norm()
    }

    pub fn normalized(self) -> PlanarPoint {
        let n = self.norm();
        PlanarPoint::new(self.x / n, self.y / n)
    }

    /// Rotate 90° counter-clockwise; for a travel direction this points to
    /// the left-hand side.
    pub fn left_normal(self) -> PlanarPoint {
        PlanarPoint::new(-self.y, self.x)
    }
}

impl Add for PlanarPoint {
    type Output = PlanarPoint;
    fn add(self, o: PlanarPoint) -> PlanarPoint {
        PlanarPoint::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for PlanarPoint {
    type Output = PlanarPoint;
    fn sub(self, o: PlanarPoint) -> PlanarPoint {
        PlanarPoint::new(self.x - o.x, self.y - o.y)
    }
}

impl Mul<f64> for PlanarPoint {
    type Output = PlanarPoint;
    fn mul(self, k: f64) -> PlanarPoint {
        PlanarPoint::new(self.x * k, self.y * k)
    }
}

/// Local equirectangular projection about a fixed origin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Projection {
    origin: GeoPoint,
    cos_lat: f64,
}

impl Projection {
    pub fn new(origin: GeoPoint) -> Self {
        Projection { origin, cos_lat: origin.lat.to_radians().cos() }
    }

    pub fn origin(&self) -> GeoPoint {
        self.origin
    }

    pub fn project(&self, p: GeoPoint) -> PlanarPoint {
        PlanarPoint {
            x: EARTH_RADIUS_M * (p.lon - self.origin.lon).to_radians() * self.cos_lat,
            y: EARTH_RADIUS_M * (p.lat - self.origin.lat).to_radians(),
        }
    }

    pub fn unproject(&self, q: PlanarPoint) -> GeoPoint {
        GeoPoint {
            lat: self.origin.lat + (q.y / EARTH_RADIUS_M).to_degrees(),
            lon: self.origin.lon + (q.x / (EARTH_RADIUS_M * self.cos_lat)).to_degrees(),
        }
    }

    pub fn project_all(&self, pts: &[GeoPoint]) -> Vec<PlanarPoint> {
        pts.iter().map(|&p| self.project(p)).collect()
    }
}

pub fn project(p: GeoPoint, origin: GeoPoint) -> PlanarPoint {
    Projection::new(origin).project(p)
}

pub fn unproject(q: PlanarPoint, origin: GeoPoint) -> GeoPoint {
    Projection::new(origin).unproject(q)
}

/// Normalize an angle in degrees into `[0, 360)`.
pub fn normalize_degrees(deg: f64) -> f64 {
    let d = deg.rem_euclid(360.0);
    if d >= 360.0 {
        0.0
    } else {
        d
    }
}

/// Clockwise angle from true north of the direction `a → b`, in `[0, 360)`.
pub fn bearing(a: GeoPoint, b: GeoPoint) -> Result<f64> {
    if a == b {
        return Err(Error::DegenerateBearing);
    }
    let mid = a.lerp(b, 0.5);
    let proj = Projection::new(mid);
    let d = proj.project(b) - proj.project(a);
    Ok(planar_bearing(d))
}

/// Bearing of a planar direction vector (x east, y north).
pub fn planar_bearing(d: PlanarPoint) -> f64 {
    normalize_degrees(d.x.atan2(d.y).to_degrees())
}

/// Unit vector pointing along a bearing.
pub fn bearing_direction(bearing_deg: f64) -> PlanarPoint {
    let r = bearing_deg.to_radians();
    PlanarPoint::new(r.sin(), r.cos())
}

/// Great-circle distance in meters.
pub fn haversine_m(a: GeoPoint, b: GeoPoint) -> f64 {
    let (lat1, lat2) = (a.lat.to_radians(), b.lat.to_radians());
    let dlat = (b.lat - a.lat).to_radians();
    let dlon = (b.lon - a.lon).to_radians();
    let h = (dlat / 2.0).sin().powi(2) + lat1.cos() * lat2.cos() * (dlon / 2.0).sin().powi(2);
    2.0 * EARTH_RADIUS_M * h.sqrt().min(1.0).asin()
}

/// Sum of great-circle edge lengths.
pub fn polyline_length_m(pts: &[GeoPoint]) -> f64 {
    pts.windows(2).map(|w| haversine_m(w[0], w[1])).sum()
}

/// The point `distance` meters along a polyline, measured with great-circle
/// edge lengths and interpolated linearly inside an edge.
pub fn point_along(pts: &[GeoPoint], distance: f64) -> GeoPoint {
    let mut walked = 0.0;
    for w in pts.windows(2) {
        let len = haversine_m(w[0], w[1]);
        if walked + len >= distance && len > 0.0 {
            let t = ((distance - walked) / len).clamp(0.0, 1.0);
            return w[0].lerp(w[1], t);
        }
        walked += len;
    }
    *pts.last().expect("non-empty polyline")
}

/// Closest point on segment `a–b` to `p`, as the clamped parameter `t` and
/// the distance.
pub fn closest_on_segment(p: PlanarPoint, a: PlanarPoint, b: PlanarPoint) -> (f64, f64) {
    let ab = b - a;
    let len2 = ab.dot(ab);
    let t = if len2 == 0.0 { 0.0 } else { ((p - a).dot(ab) / len2).clamp(0.0, 1.0) };
    (t, p.distance(a + ab * t))
}

/// Minimum distance from `p` to a planar polyline.
pub fn distance_to_polyline(p: PlanarPoint, line: &[PlanarPoint]) -> f64 {
    match line {
        [] => f64::INFINITY,
        [only] => p.distance(*only),
        _ => line
            .windows(2)
            .map(|w| closest_on_segment(p, w[0], w[1]).1)
            .fold(f64::INFINITY, f64::min),
    }
}

/// Planar point at arc length `distance` along a planar polyline.
pub fn planar_point_along(line: &[PlanarPoint], distance: f64) -> (PlanarPoint, PlanarPoint) {
    let mut walked = 0.0;
    let mut last_dir = PlanarPoint::new(0.0, 1.0);
    for w in line.windows(2) {
        let d = w[1] - w[0];
        let len = d.norm();
        if len == 0.0 {
            continue;
        }
        last_dir = d * (1.0 / len);
        if walked + len >= distance {
            let t = ((distance - walked) / len).clamp(0.0, 1.0);
            return (w[0] + d * t, last_dir);
        }
        walked += len;
    }
    (*line.last().expect("non-empty polyline"), last_dir)
}

pub fn planar_length(line: &[PlanarPoint]) -> f64 {
    line.windows(2).map(|w| w[0].distance(w[1])).sum()
}
