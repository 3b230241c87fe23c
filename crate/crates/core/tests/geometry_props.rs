use proptest::prelude::*;
use streetweave::geo::{
    bearing, haversine_m, load_network, parse_network, polyline_length_m, subdivide, GeoPoint, PlanarPoint,
    Projection, StreetSegment,
};

fn config() -> ProptestConfig {
    ProptestConfig { cases: 256, failure_persistence: None, ..ProptestConfig::default() }
}

fn geo() -> impl Strategy<Value = GeoPoint> {
    (-75.0f64..75.0, -179.0f64..179.0).prop_map(|(lat, lon)| GeoPoint { lat, lon })
}

fn polyline() -> impl Strategy<Value = Vec<GeoPoint>> {
    (geo(), prop::collection::vec((-600.0f64..600.0, -600.0f64..600.0), 2..8)).prop_map(|(origin, offs)| {
        let proj = Projection::new(origin);
        offs.into_iter().map(|(x, y)| proj.unproject(PlanarPoint::new(x, y))).collect()
    })
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn subdivision_conserves_length(pts in polyline(), n in 1usize..40) {
        prop_assume!(polyline_length_m(&pts) > 1.0);
        let seg = StreetSegment::new("s", pts).unwrap();
        let parts = subdivide(&seg, n).unwrap();
        prop_assert_eq!(parts.len(), n);
        let total = polyline_length_m(&seg.polyline);
        let sum: f64 = parts.iter().map(|p| p.length_m).sum();
        prop_assert!((sum - total).abs() / total <= 1e-6, "{} vs {}", sum, total);
        for w in parts.windows(2) {
            prop_assert_eq!(w[0].polyline.last(), w[1].polyline.first());
        }
        prop_assert_eq!(parts[0].polyline[0], seg.polyline[0]);
        prop_assert_eq!(parts[n - 1].polyline.last(), seg.polyline.last());
        for p in &parts {
            prop_assert!((p.length_m - total / n as f64).abs() <= 1e-3 * total / n as f64);
        }
    }

    #[test]
    fn bearing_reverses_by_half_turn(a in geo(), dx in -500.0f64..500.0, dy in -500.0f64..500.0) {
        prop_assume!(dx.abs() + dy.abs() > 0.01);
        let b = Projection::new(a).unproject(PlanarPoint::new(dx, dy));
        let ab = bearing(a, b).unwrap();
        let ba = bearing(b, a).unwrap();
        prop_assert!((0.0..360.0).contains(&ab));
        prop_assert!((((ba - ab).rem_euclid(360.0)) - 180.0).abs() < 1e-9);
    }

    #[test]
    fn axis_bearings(a in geo(), d in 0.0001f64..0.01) {
        let at = |lat: f64, lon: f64| bearing(a, GeoPoint { lat: a.lat + lat, lon: a.lon + lon }).unwrap();
        prop_assert_eq!(at(d, 0.0), 0.0);
        prop_assert_eq!(at(0.0, d), 90.0);
        prop_assert_eq!(at(-d, 0.0), 180.0);
        prop_assert_eq!(at(0.0, -d), 270.0);
    }

    #[test]
    fn projection_round_trip(origin in geo(), x in -5000.0f64..5000.0, y in -5000.0f64..5000.0) {
        let proj = Projection::new(origin);
        let g = proj.unproject(PlanarPoint::new(x, y));
        let back = proj.unproject(proj.project(g));
        prop_assert!((back.lat - g.lat).abs() < 1e-9 && (back.lon - g.lon).abs() < 1e-9);
    }

    #[test]
    fn projection_agrees_with_haversine_locally(origin in geo(), x in -300.0f64..300.0, y in -300.0f64..300.0) {
        let proj = Projection::new(origin);
        let g = proj.unproject(PlanarPoint::new(x, y));
        let planar = x.hypot(y);
        prop_assume!(planar > 1.0);
        let rel = (haversine_m(origin, g) - planar).abs() / planar;
        prop_assert!(rel < 1e-3, "relative error {}", rel);
    }
}

#[test]
fn l_shape_split_respects_arc_length() {
    // 60 m east then 40 m north: the midpoint of 100 m lies 10 m before the bend.
    let proj = Projection::new(GeoPoint { lat: 41.88, lon: -87.63 });
    let pts = [(0.0, 0.0), (60.0, 0.0), (60.0, 40.0)].map(|(x, y)| proj.unproject(PlanarPoint::new(x, y)));
    let seg = StreetSegment::new("L", pts.to_vec()).unwrap();
    let parts = subdivide(&seg, 2).unwrap();
    let cut = proj.project(*parts[0].polyline.last().unwrap());
    let half = polyline_length_m(&seg.polyline) / 2.0;
    assert!((cut.y).abs() < 1e-6, "{cut:?}");
    assert!((haversine_m(seg.polyline[0], *parts[0].polyline.last().unwrap()) - half).abs() < 1e-3);
    assert_eq!(parts[0].polyline.len(), 2);
    assert_eq!(parts[1].polyline.len(), 3);
    assert_eq!(parts[1].polyline[1], seg.polyline[1]);
}

#[test]
fn l_shape_split_past_the_bend() {
    // 40 m east then 60 m north: the cut falls 10 m past the bend.
    let proj = Projection::new(GeoPoint { lat: 41.88, lon: -87.63 });
    let pts = [(0.0, 0.0), (40.0, 0.0), (40.0, 60.0)].map(|(x, y)| proj.unproject(PlanarPoint::new(x, y)));
    let seg = StreetSegment::new("L", pts.to_vec()).unwrap();
    let parts = subdivide(&seg, 2).unwrap();
    let cut = proj.project(*parts[0].polyline.last().unwrap());
    assert!((cut.x - 40.0).abs() < 1e-3 && (cut.y - 10.0).abs() < 0.05, "{cut:?}");
    assert_eq!(parts[0].polyline.len(), 3);
}

#[test]
fn network_snaps_shared_endpoints() {
    let doc = r#"{"type":"FeatureCollection","features":[
        {"type":"Feature","properties":{"id":"a"},"geometry":{"type":"LineString","coordinates":[[-87.63,41.88],[-87.629,41.88]]}},
        {"type":"Feature","properties":{"id":"b"},"geometry":{"type":"LineString","coordinates":[[-87.629000001,41.880000001],[-87.629,41.881]]}},
        {"type":"Feature","properties":{},"geometry":{"type":"MultiLineString","coordinates":[[[-87.629,41.881],[-87.63,41.881]]]}}
    ]}"#;
    let load = parse_network(doc).unwrap();
    let net = &load.network;
    assert_eq!(net.segments.len(), 3);
    assert_eq!(net.nodes.len(), 4);
    assert_eq!(net.endpoints["a"].1, net.endpoints["b"].0);
}

#[test]
fn bundled_grid_loads() {
    let path = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenarios/data/grid.geojson");
    let load = load_network(&path).unwrap();
    assert_eq!(load.network.segments.len(), 40);
    assert_eq!(load.network.nodes.len(), 25);
    assert!(load.warnings.is_empty());
}
