use crate::spec::{defaults, ChannelBinding, Channel, Constant};

use super::*;

/// Upper bound on sub-segments per segment.
pub const MAX_DENSITY: usize = 10_000;

/// A contiguous piece of a parent segment.
#[derive(Debug, Clone, PartialEq)]
pub struct SubSegment {
    pub parent_id: String,
    pub index: usize,
    pub polyline: Vec<GeoPoint>,
    pub midpoint: GeoPoint,
    pub bearing_deg: f64,
    pub length_m: f64,
}

impl SubSegment {
    pub fn id(&self) -> String {
        format!("{}/{}", self.parent_id, self.index)
    }
}

/// Split a segment by arc length into `n` pieces of equal length.
///
/// Cut points are interpolated linearly inside the edge they fall on. Each
/// piece's bearing uses its own first and last vertex.
pub fn subdivide(seg: &StreetSegment, n: usize) -> Result<Vec<SubSegment>> {
    if n == 0 {
        return Err(Error::ZeroDensity);
    }
    if n > MAX_DENSITY {
        return Err(Error::DensityLimit(n));
    }
    let pts = &seg.polyline;
    let edge_len: Vec<f64> = pts.windows(2).map(|w| haversine_m(w[0], w[1])).collect();
    let total: f64 = edge_len.iter().sum();
    let step = total / n as f64;
    let eps = total * 1e-12;

    let mut pieces: Vec<Vec<GeoPoint>> = Vec::with_capacity(n);
    let mut current = vec![pts[0]];
    // Arc length at the start of edge `e`, and how far into it `current` ends.
    let mut e = 0;
    let mut edge_start = 0.0;
    for k in 1..n {
        let target = step * k as f64;
        loop {
            let edge_end = edge_start + edge_len[e];
            if edge_end > target + eps {
                let t = (target - edge_start) / edge_len[e];
                let cut = pts[e].lerp(pts[e + 1], t);
                current.push(cut);
                pieces.push(std::mem::replace(&mut current, vec![cut]));
                break;
            }
            current.push(pts[e + 1]);
            edge_start = edge_end;
            e += 1;
            if edge_end >= target - eps {
                pieces.push(std::mem::replace(&mut current, vec![pts[e]]));
                break;
            }
        }
    }
    current.extend_from_slice(&pts[e + 1..]);
    pieces.push(current);
    debug_assert_eq!(pieces.len(), n);

    Ok(pieces
        .into_iter()
        .enumerate()
        .map(|(index, mut polyline)| {
            polyline.dedup();
            let length_m = polyline_length_m(&polyline);
            let first = polyline[0];
            let last = *polyline.last().unwrap();
            let bearing_deg = bearing(first, last)
                .or_else(|_| polyline.get(1).map_or(Err(Error::DegenerateBearing), |&p| bearing(first, p)))
                .unwrap_or(seg.bearing_deg);
            let midpoint = point_along(&polyline, length_m / 2.0);
            SubSegment { parent_id: seg.id.clone(), index, polyline, midpoint, bearing_deg, length_m }
        })
        .collect())
}

/// Number of sub-segments for one segment.
///
/// Field bindings map the segment's aggregated value linearly from the
/// field's global `[min, max]` onto the binding's output range, rounding half
/// up. Missing values and degenerate domains give 1.
pub fn resolve_density(binding: &ChannelBinding, value: Option<f64>, domain: Option<(f64, f64)>) -> usize {
    match binding {
        ChannelBinding::Constant(Constant::Number(n)) => (n.max(1.0)) as usize,
        ChannelBinding::Constant(_) => 1,
        ChannelBinding::Field(f) => {
            let (Some(v), Some((min, max))) = (value, domain) else {
                return 1;
            };
            if !(max > min) {
                return 1;
            }
            let [lo, hi] = f.range.unwrap_or_else(|| defaults::output_range(Channel::Density));
            let t = ((v - min) / (max - min)).clamp(0.0, 1.0);
            let x = lo + t * (hi - lo);
            ((x + 0.5).floor() as usize).max(1)
        }
    }
}
