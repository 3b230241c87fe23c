//! Seeded workloads shared by the benchmarks.

use serde_json::json;
use streetweave::pipeline::{DataOverrides, RenderOptions};
use streetweave::synth::{points_csv, Column, Grid};

/// A street grid with about `segments` segments and `points` uniform
/// points carrying one numeric column `v`.
pub struct Workload {
    pub grid: Grid,
    pub network: String,
    pub csv: String,
}

impl Workload {
    pub fn new(segments: usize, points: usize) -> Self {
        let grid = Grid::with_segments(segments, 80.0);
        let pts = grid.uniform(points, 20.0, 42);
        let csv = points_csv(&pts, &[("v", Column::Real(0.0, 100.0))], 43);
        Workload { network: grid.geojson(), grid, csv }
    }

    pub fn options(&self) -> RenderOptions {
        RenderOptions {
            overrides: DataOverrides { physical: Some(self.network.clone()), thematic: Some(self.csv.clone()) },
            ..Default::default()
        }
    }
}

/// One segment unit joined with `spatial` and mapped to width.
pub fn segment_spec(spatial: &str, value: f64, orientation: &str) -> String {
    json!({
        "map": [{}],
        "unit": [{ "type": "segment", "orientation": orientation, "density": 2, "width": { "field": "v" }, "height": { "field": "v" } }],
        "data": [{ "physical": "net.geojson", "thematic": "points.csv" }],
        "relation": { "spatial": spatial, "value": value, "aggregation": "mean" }
    })
    .to_string()
}
