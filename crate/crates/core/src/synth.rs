//! Seeded synthetic datasets: a rectangular street grid and point layers
//! scattered along it.

use std::fmt::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use crate::geo::{GeoPoint, PlanarPoint, Projection};

/// A `rows` x `cols` lattice of intersections `block_m` apart.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub rows: usize,
    pub cols: usize,
    pub block_m: f64,
    pub origin: GeoPoint,
}

impl Grid {
    pub fn new(rows: usize, cols: usize, block_m: f64) -> Self {
        Grid { rows, cols, block_m, origin: GeoPoint { lat: 41.8781, lon: -87.6298 } }
    }

    /// Smallest square grid with at least `n` segments.
    pub fn with_segments(n: usize, block_m: f64) -> Self {
        let mut side = 2;
        while 2 * side * (side - 1) < n {
            side += 1;
        }
        Grid::new(side, side, block_m)
    }

    pub fn segment_count(&self) -> usize {
        self.rows * (self.cols - 1) + self.cols * (self.rows - 1)
    }

    fn projection(&self) -> Projection {
        Projection::new(self.origin)
    }

    fn node(&self, r: usize, c: usize) -> PlanarPoint {
        PlanarPoint::new(c as f64 * self.block_m, r as f64 * self.block_m)
    }

    /// `(id, start, end)` in planar meters, east-west streets first.
    pub fn segments(&self) -> Vec<(String, PlanarPoint, PlanarPoint)> {
        let mut out = Vec::with_capacity(self.segment_count());
        for r in 0..self.rows {
            for c in 0..self.cols - 1 {
                out.push((format!("h-{r}-{c}"), self.node(r, c), self.node(r, c + 1)));
            }
        }
        for c in 0..self.cols {
            for r in 0..self.rows - 1 {
                out.push((format!("v-{r}-{c}"), self.node(r, c), self.node(r + 1, c)));
            }
        }
        out
    }

    /// The grid as a GeoJSON FeatureCollection of LineStrings.
    pub fn geojson(&self) -> String {
        let proj = self.projection();
        let coord = |q: PlanarPoint| {
            let g = proj.unproject(q);
            json!([round7(g.lon), round7(g.lat)])
        };
        let features: Vec<_> = self
            .segments()
            .into_iter()
            .map(|(id, a, b)| {
                json!({
                    "type": "Feature",
                    "properties": {"id": id},
                    "geometry": {"type": "LineString", "coordinates": [coord(a), coord(b)]}
                })
            })
            .collect();
        serde_json::to_string_pretty(&json!({"type": "FeatureCollection", "features": features})).unwrap() + "\n"
    }

    /// Random points near the streets: a uniform position along a random
    /// segment, displaced sideways by up to `spread_m`.
    pub fn scatter(&self, n: usize, spread_m: f64, seed: u64) -> Vec<GeoPoint> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let segs = self.segments();
        let proj = self.projection();
        (0..n)
            .map(|_| {
                let (_, a, b) = &segs[rng.gen_range(0..segs.len())];
                let t: f64 = rng.gen();
                let side: f64 = rng.gen_range(-spread_m..=spread_m);
                let dir = (*b - *a).normalized();
                let q = *a + (*b - *a) * t + dir.left_normal() * side;
                let g = proj.unproject(q);
                GeoPoint { lat: round7(g.lat), lon: round7(g.lon) }
            })
            .collect()
    }

    /// Uniform random points over the grid's bounding box grown by `margin_m`.
    pub fn uniform(&self, n: usize, margin_m: f64, seed: u64) -> Vec<GeoPoint> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let proj = self.projection();
        let w = (self.cols - 1) as f64 * self.block_m;
        let h = (self.rows - 1) as f64 * self.block_m;
        (0..n)
            .map(|_| {
                let x = rng.gen_range(-margin_m..=w + margin_m);
                let y = rng.gen_range(-margin_m..=h + margin_m);
                proj.unproject(PlanarPoint::new(x, y))
            })
            .collect()
    }
}

fn round7(v: f64) -> f64 {
    (v * 1e7).round() / 1e7
}

/// How a synthetic attribute column is filled.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Column {
    /// Integers in `[lo, hi]`.
    Int(i64, i64),
    /// Uniform reals in `[lo, hi)`, two decimals.
    Real(f64, f64),
}

/// CSV with `latitude,longitude` and the given attribute columns.
pub fn points_csv(points: &[GeoPoint], columns: &[(&str, Column)], seed: u64) -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = String::from("latitude,longitude");
    for (name, _) in columns {
        out.push(',');
        out.push_str(name);
    }
    out.push('\n');
    for p in points {
        let _ = write!(out, "{},{}", p.lat, p.lon);
        for (_, col) in columns {
            match *col {
                Column::Int(lo, hi) => {
                    let _ = write!(out, ",{}", rng.gen_range(lo..=hi));
                }
                Column::Real(lo, hi) => {
                    let v: f64 = rng.gen_range(lo..hi);
                    let _ = write!(out, ",{:.2}", v);
                }
            }
        }
        out.push('\n');
    }
    out
}

/// Named sample datasets shipped with the repository.
pub mod samples {
    use super::*;

    pub fn grid() -> Grid {
        Grid::new(5, 5, 120.0)
    }

    pub fn sidewalk_csv() -> String {
        let pts = grid().scatter(600, 8.0, 11);
        points_csv(
            &pts,
            &[
                ("curbRampSeverity", Column::Int(1, 5)),
                ("missingSidewalkSeverity", Column::Int(1, 5)),
                ("surfaceProblemSeverity", Column::Int(1, 5)),
            ],
            12,
        )
    }

    pub fn crime_csv() -> String {
        let pts = grid().scatter(400, 12.0, 21);
        points_csv(&pts, &[("severity", Column::Int(1, 10)), ("violent", Column::Int(0, 1)), ("property", Column::Int(0, 1))], 22)
    }

    pub fn requests311_csv() -> String {
        let pts = grid().scatter(500, 6.0, 31);
        points_csv(&pts, &[("requests", Column::Int(1, 12)), ("daysOpen", Column::Real(0.0, 30.0))], 32)
    }
}
