//! Acceptance suite: one PASS/FAIL line per criterion. Exits non-zero when
//! any criterion fails.

#[path = "../../core/tests/support/mod.rs"]
mod support;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::{Duration, Instant};

use axum::body::Body;
use axum::http::{Request, StatusCode};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use streetweave::geo::{
    bearing, parse_network, polyline_length_m, subdivide, GeoPoint, PlanarPoint, Projection, StreetSegment,
};
use streetweave::join::{
    aggregate, join, relate_buffer, relate_contains, relate_nn, AttrValue, JoinTarget, SpatialIndex, ThematicLayer,
    ThematicPoint,
};
use streetweave::pipeline::prepare;
use streetweave::render::{PrimitiveKind, RenderPlan};
use streetweave::spec::{Aggregation, RelationSpec, SpatialRelation};
use streetweave::synth::{points_csv, Column, Grid};
use streetweave::{emit_plan, emit_svg, DataOverrides, RenderOptions, Viewport};
use streetweave_cli::config::Config;
use streetweave_cli::service::{router, AppState};
use tower::ServiceExt;

type Outcome = Result<String, String>;

fn root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn scenarios() -> PathBuf {
    root().join("scenarios")
}

fn core_tests() -> PathBuf {
    root().join("crates/core/tests")
}

fn read(path: &Path) -> Result<String, String> {
    std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))
}

fn load_spec(name: &str) -> Result<Value, String> {
    serde_json::from_str(&read(&scenarios().join(name))?).map_err(|e| e.to_string())
}

fn render_in(spec: &Value, dir: &Path) -> Result<RenderPlan, String> {
    let options = RenderOptions { base_dir: dir.to_path_buf(), ..Default::default() };
    streetweave::render(&spec.to_string(), &options).map_err(|e| e.to_string())
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(elapsed: Duration, limit_s: f64) -> Result<(), String> {
    ensure(elapsed.as_secs_f64() < limit_s, || format!("took {:.2} s, limit {limit_s} s", elapsed.as_secs_f64()))
}

/// Network projection and planar thematic points for a scenario data pair.
fn planar_rows(csv: &str) -> Result<(Projection, Vec<support::Row>, Vec<(usize, PlanarPoint)>), String> {
    let network = parse_network(&read(&scenarios().join("data/grid.geojson"))?).map_err(|e| e.to_string())?.network;
    let proj = network.projection();
    let rows = support::read_rows(&read(&scenarios().join("data").join(csv))?);
    let pts = rows.iter().map(|r| (r.id, proj.project(r.position))).collect();
    Ok((proj, rows, pts))
}

fn grammar_conformance() -> Outcome {
    let start = Instant::now();
    let cases: Vec<Value> = serde_json::from_str(support::GRAMMAR_FIXTURES).map_err(|e| e.to_string())?;
    ensure(cases.len() >= 40, || format!("only {} fixtures", cases.len()))?;
    let mut failures = Vec::new();
    for c in &cases {
        let name = c["name"].as_str().unwrap_or("?");
        let result = prepare(&c["spec"].to_string());
        let ok = match (c["expect"].as_str(), &result) {
            (Some("valid"), Ok(p)) => {
                c.get("warning").and_then(Value::as_str).is_none_or(|w| p.warnings.iter().any(|d| d.path == w))
            }
            (Some("error"), Err(e)) => {
                let want = c["path"].as_str().unwrap_or_default();
                e.diagnostics().iter().any(|d| d.is_error() && d.path == want)
            }
            _ => false,
        };
        if !ok {
            failures.push(name.to_string());
        }
    }
    ensure(failures.is_empty(), || format!("failed fixtures: {failures:?}"))?;
    within(start.elapsed(), 1.0)?;
    Ok(format!("{} fixtures", cases.len()))
}

fn random_layer(rng: &mut ChaCha8Rng, proj: &Projection, n: usize) -> ThematicLayer {
    let points = (0..n)
        .map(|id| {
            let q = PlanarPoint::new(rng.gen_range(-300.0..300.0), rng.gen_range(-300.0..300.0));
            let mut attributes = BTreeMap::new();
            attributes.insert("v".to_string(), AttrValue::Number(rng.gen_range(0.0..10.0)));
            ThematicPoint { id, position: proj.unproject(q), attributes }
        })
        .collect();
    ThematicLayer {
        points,
        columns: vec!["v".into()],
        numeric_columns: ["v".to_string()].into_iter().collect(),
        source_path: "random".into(),
    }
}

fn join_oracle() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let proj = Projection::new(GeoPoint { lat: 41.88, lon: -87.63 });
    let mut comparisons = 0usize;
    for instance in 0..100 {
        let n = rng.gen_range(1..=1000);
        let layer = random_layer(&mut rng, &proj, n);
        let index = SpatialIndex::build(&layer, &proj);
        let pts: Vec<(usize, PlanarPoint)> = layer.points.iter().map(|p| (p.id, proj.project(p.position))).collect();
        for e in 0..rng.gen_range(1..=200) {
            let vertices = rng.gen_range(1..=4);
            let geo: Vec<GeoPoint> = (0..vertices)
                .map(|_| proj.unproject(PlanarPoint::new(rng.gen_range(-320.0..320.0), rng.gen_range(-320.0..320.0))))
                .collect();
            let target = if vertices == 1 {
                JoinTarget::point(format!("e{e}"), geo[0], &proj)
            } else {
                JoinTarget::linear(format!("e{e}"), &geo, &proj)
            };
            let line = proj.project_all(&geo);
            let r = rng.gen_range(1.0..80.0);
            let k = rng.gen_range(1..=12);
            let hw = rng.gen_range(1.0..40.0);
            let checks = [
                ("buffer", relate_buffer(&target, &index, r), support::buffer(support::arc_midpoint(&line), &pts, r)),
                ("nn", relate_nn(&target, &index, k), support::nn(&line, &pts, k)),
                ("contains", relate_contains(&target, &index, hw), support::contains(&line, &pts, hw)),
            ];
            for (name, got, want) in checks {
                ensure(got == want, || format!("instance {instance} element {e} {name}: {got:?} != {want:?}"))?;
                comparisons += 1;
            }
        }
    }
    within(start.elapsed(), 10.0)?;
    Ok(format!("100 instances, {comparisons} relation comparisons"))
}

fn aggregation_identities() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for i in 0..10_000 {
        let n = rng.gen_range(0..=64);
        let values: Vec<f64> = (0..n).map(|_| rng.gen_range(-1e3..1e3)).collect();
        let [sum, mean, min, max] =
            [Aggregation::Sum, Aggregation::Mean, Aggregation::Min, Aggregation::Max].map(|k| aggregate(&values, k));
        if n == 0 {
            ensure([sum, mean, min, max].iter().all(Option::is_none), || format!("list {i}: empty gave a value"))?;
            continue;
        }
        let (sum, mean, min, max) = (sum.unwrap(), mean.unwrap(), min.unwrap(), max.unwrap());
        let scale = values.iter().map(|v| v.abs()).sum::<f64>().max(1.0);
        ensure((sum - mean * n as f64).abs() <= 1e-12 * scale, || format!("list {i}: sum {sum} != mean*count"))?;
        ensure(min <= mean && mean <= max, || format!("list {i}: {min} <= {mean} <= {max} violated"))?;
        if n == 1 {
            ensure([sum, mean, min, max].iter().all(|&a| a == values[0]), || format!("list {i}: singleton moved"))?;
        }
    }
    within(start.elapsed(), 1.0)?;
    Ok("10000 lists".into())
}

fn geometry_suite() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut worst = 0.0f64;
    for i in 0..500 {
        let origin = GeoPoint { lat: rng.gen_range(-60.0..60.0), lon: rng.gen_range(-170.0..170.0) };
        let proj = Projection::new(origin);
        let pts: Vec<GeoPoint> = (0..rng.gen_range(2..=6))
            .map(|_| proj.unproject(PlanarPoint::new(rng.gen_range(-800.0..800.0), rng.gen_range(-800.0..800.0))))
            .collect();
        let seg = StreetSegment::new(format!("s{i}"), pts).map_err(|e| e.to_string())?;
        let n = rng.gen_range(1..=25);
        let total = polyline_length_m(&seg.polyline);
        let parts: f64 = subdivide(&seg, n).map_err(|e| e.to_string())?.iter().map(|s| s.length_m).sum();
        let rel = (parts - total).abs() / total;
        worst = worst.max(rel);
        ensure(rel <= 1e-6, || format!("segment {i} n={n}: relative length error {rel:e}"))?;
    }
    for i in 0..1000 {
        let a = GeoPoint { lat: rng.gen_range(-80.0..80.0), lon: rng.gen_range(-179.0..179.0) };
        let b = GeoPoint {
            lat: (a.lat + rng.gen_range(-0.05..0.05)).clamp(-89.0, 89.0),
            lon: a.lon + rng.gen_range(-0.05..0.05),
        };
        if a == b {
            continue;
        }
        let ab = bearing(a, b).map_err(|e| e.to_string())?;
        let ba = bearing(b, a).map_err(|e| e.to_string())?;
        ensure((0.0..360.0).contains(&ab), || format!("pair {i}: bearing {ab} out of range"))?;
        let diff = ((ba - ab).rem_euclid(360.0) - 180.0).abs();
        ensure(diff < 1e-9, || format!("pair {i}: reverse bearing off by {diff:e} deg"))?;
        let north = bearing(a, GeoPoint { lat: a.lat + 0.01, lon: a.lon }).unwrap();
        let east = bearing(a, GeoPoint { lat: a.lat, lon: a.lon + 0.01 }).unwrap();
        let south = bearing(a, GeoPoint { lat: a.lat - 0.01, lon: a.lon }).unwrap();
        let west = bearing(a, GeoPoint { lat: a.lat, lon: a.lon - 0.01 }).unwrap();
        for (got, want) in [(north, 0.0), (east, 90.0), (south, 180.0), (west, 270.0)] {
            ensure((got - want).abs() < 1e-9, || format!("pair {i}: axis bearing {got} != {want}"))?;
        }
        let proj = Projection::new(a);
        let back = proj.unproject(proj.project(b));
        let err = (back.lat - b.lat).abs().max((back.lon - b.lon).abs());
        ensure(err < 1e-9, || format!("pair {i}: projection round trip off by {err:e} deg"))?;
    }
    within(start.elapsed(), 2.0)?;
    Ok(format!("worst subdivision error {worst:.1e}, 1000 bearing pairs"))
}

/// Brute-force per-segment aggregates for `relation` over `csv`.
fn segment_oracle(
    csv: &str,
    relation: &RelationSpec,
) -> Result<BTreeMap<String, (BTreeMap<String, f64>, usize)>, String> {
    let (proj, rows, pts) = planar_rows(csv)?;
    let network = parse_network(&read(&scenarios().join("data/grid.geojson"))?).map_err(|e| e.to_string())?.network;
    let mut out = BTreeMap::new();
    for seg in network.segments.values() {
        let line = proj.project_all(&seg.polyline);
        let ids = match relation.spatial {
            SpatialRelation::Buffer => support::buffer(support::arc_midpoint(&line), &pts, relation.value),
            SpatialRelation::Contains => support::contains(&line, &pts, relation.value),
            SpatialRelation::Nn => support::nn(&line, &pts, relation.value as usize),
        };
        out.insert(seg.id.clone(), (reduce(&rows, &ids, relation.aggregation), ids.len()));
    }
    Ok(out)
}

fn reduce(rows: &[support::Row], ids: &[usize], kind: Aggregation) -> BTreeMap<String, f64> {
    let mut out = BTreeMap::new();
    if ids.is_empty() {
        return out;
    }
    for col in rows[0].values.keys() {
        let vals: Vec<f64> = ids.iter().map(|&i| rows[i].values[col]).collect();
        let v = match kind {
            Aggregation::Sum => support::sum(&vals),
            Aggregation::Mean => support::mean(&vals),
            Aggregation::Min => vals.iter().copied().fold(f64::INFINITY, f64::min),
            Aggregation::Max => vals.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        };
        out.insert(col.clone(), v);
    }
    out
}

fn scenario1() -> Outcome {
    let spec = load_spec("scenario1-sidewalk-lines.json")?;
    let plan = render_in(&spec, &scenarios())?;
    ensure(plan.layer_count() == 3, || format!("layer count {}", plan.layer_count()))?;
    let relation = RelationSpec { spatial: SpatialRelation::Buffer, value: 10.0, aggregation: Aggregation::Mean };
    let oracle = segment_oracle("sidewalk.csv", &relation)?;

    // Engine join against the oracle, bit for bit.
    let network = parse_network(&read(&scenarios().join("data/grid.geojson"))?).map_err(|e| e.to_string())?.network;
    let proj = network.projection();
    let layer = streetweave::join::parse_thematic(
        &read(&scenarios().join("data/sidewalk.csv"))?,
        "sidewalk.csv",
        "latitude",
        "longitude",
    )
    .map_err(|e| e.to_string())?
    .layer;
    let index = SpatialIndex::build(&layer, &proj);
    let targets: Vec<JoinTarget> = network.segments.values().map(|s| JoinTarget::segment(s, &proj)).collect();
    let mut matched = 0;
    for j in join(&targets, &layer, &index, &relation) {
        let (want, count) = &oracle[&j.element_id];
        ensure(&j.aggregates == want && j.count == *count, || {
            format!("{}: {:?} != oracle {:?}", j.element_id, j.aggregates, want)
        })?;
        matched += usize::from(*count > 0);
    }

    // Rendered widths follow the oracle means through the width scale.
    for (layer_index, unit) in spec["unit"].as_array().unwrap().iter().enumerate() {
        let field = unit["width"]["field"].as_str().unwrap();
        let range = [unit["width"]["range"][0].as_f64().unwrap(), unit["width"]["range"][1].as_f64().unwrap()];
        let domain = support::extent(oracle.values().filter_map(|(a, _)| a.get(field).copied())).unwrap();
        let prims: Vec<_> = plan.layer(layer_index).collect();
        ensure(prims.len() == oracle.len(), || format!("layer {layer_index}: {} primitives", prims.len()))?;
        for p in prims {
            ensure(p.kind == PrimitiveKind::Polyline, || format!("{} is {:?}", p.source_id, p.kind))?;
            let want = oracle[&p.source_id].0.get(field).map_or(3.0, |&v| support::linear(v, domain, range));
            ensure((p.style.width_px - want).abs() <= 1e-9, || {
                format!("layer {layer_index} {}: width {} != {want}", p.source_id, p.style.width_px)
            })?;
        }
    }
    Ok(format!("3 layers, {} segments, {matched} with matches, means exact", oracle.len()))
}

fn scenario2() -> Outcome {
    let bristles = load_spec("scenario2-bristles.json")?;
    let mut parallel = bristles.clone();
    for unit in parallel["unit"].as_array_mut().unwrap() {
        unit["orientation"] = json!("parallel");
        unit.as_object_mut().unwrap().remove("height");
    }
    let par = render_in(&parallel, &scenarios())?;
    let per = render_in(&bristles, &scenarios())?;
    let network = parse_network(&read(&scenarios().join("data/grid.geojson"))?).map_err(|e| e.to_string())?.network;
    let proj = network.projection();

    // Oracle density for unit 0: curbRampSeverity means mapped onto [2, 6].
    let relation = RelationSpec { spatial: SpatialRelation::Buffer, value: 10.0, aggregation: Aggregation::Mean };
    let oracle = segment_oracle("sidewalk.csv", &relation)?;
    let domain =
        support::extent(oracle.values().filter_map(|(a, _)| a.get("curbRampSeverity").copied())).unwrap();
    let density = |seg: &str| {
        oracle[seg].0.get("curbRampSeverity").map_or(1, |&v| {
            let x = support::linear(v, domain, [2.0, 6.0]);
            ((x + 0.5).floor() as usize).max(1)
        })
    };

    let mut worst_cos = 0.0f64;
    for (layer, fixed) in [(0, None), (1, Some(4usize))] {
        for p in par.layer(layer) {
            ensure(p.kind == PrimitiveKind::Polyline && p.geometry.len() >= 2, || {
                format!("parallel layer {layer}: {} is not a polyline", p.source_id)
            })?;
        }
        let mut per_segment: BTreeMap<&str, usize> = BTreeMap::new();
        for p in per.layer(layer) {
            ensure(p.kind == PrimitiveKind::Polyline && p.geometry.len() == 2, || {
                format!("bristle layer {layer}: {} has {} vertices", p.source_id, p.geometry.len())
            })?;
            let parent = p.source_id.split('/').next().unwrap();
            *per_segment.entry(parent).or_default() += 1;
            let seg = &network.segments[parent];
            let s = proj.project_all(&seg.polyline);
            let g: Vec<PlanarPoint> = p.points().map(|q| proj.project(q)).collect();
            let (sx, sy) = (s[s.len() - 1].x - s[0].x, s[s.len() - 1].y - s[0].y);
            let (bx, by) = (g[1].x - g[0].x, g[1].y - g[0].y);
            let cos = (sx * bx + sy * by).abs() / (sx.hypot(sy) * bx.hypot(by));
            worst_cos = worst_cos.max(cos);
        }
        for seg in network.segments.keys() {
            let want = fixed.unwrap_or_else(|| density(seg));
            let got = per_segment.get(seg.as_str()).copied().unwrap_or(0);
            ensure(got == want, || format!("layer {layer} segment {seg}: {got} bristles, want {want}"))?;
        }
    }
    ensure(worst_cos <= 1e-9, || format!("bristle/segment |cos| {worst_cos:e} > 1e-9"))?;
    Ok(format!("polylines -> bristles, counts = density, max |cos| {worst_cos:.1e}"))
}

fn scenario3() -> Outcome {
    let spec = load_spec("scenario3-crime-311.json")?;
    let plan = render_in(&spec, &scenarios())?;
    let network = parse_network(&read(&scenarios().join("data/grid.geojson"))?).map_err(|e| e.to_string())?.network;
    let (proj, rows, pts) = planar_rows("crime.csv")?;

    let mut nodes = 0;
    for p in plan.layer(0) {
        let chart = p.chart.as_ref().ok_or_else(|| format!("node {} has no chart", p.source_id))?;
        let node = &network.nodes[&p.source_id];
        let ids = support::buffer(proj.project(node.position), &pts, 15.0);
        let mut want = reduce(&rows, &ids, Aggregation::Mean);
        want.insert("_count".into(), ids.len() as f64);
        ensure(chart.injected_data == want, || {
            format!("node {}: {:?} != oracle {want:?}", p.source_id, chart.injected_data)
        })?;
        ensure(chart.embedded_spec["data"]["values"][0] == json!(want), || format!("node {}: spec data", p.source_id))?;
        nodes += 1;
    }
    ensure(nodes == network.nodes.len(), || format!("{nodes} node anchors for {} nodes", network.nodes.len()))?;

    let relation = RelationSpec { spatial: SpatialRelation::Contains, value: 10.0, aggregation: Aggregation::Sum };
    let oracle = segment_oracle("requests311.csv", &relation)?;
    let mut segments = 0;
    for p in plan.layer(1) {
        let chart = p.chart.as_ref().ok_or_else(|| format!("segment {} has no chart", p.source_id))?;
        let (sums, count) = &oracle[&p.source_id];
        let mut want = sums.clone();
        want.insert("_count".into(), *count as f64);
        ensure(chart.injected_data == want, || {
            format!("segment {}: {:?} != oracle {want:?}", p.source_id, chart.injected_data)
        })?;
        segments += 1;
    }
    ensure(segments == oracle.len(), || format!("{segments} segment anchors"))?;

    // Parallel variant: only orientation-dependent fields may change.
    let mut parallel = spec.clone();
    parallel["unit"][1]["orientation"] = json!("parallel");
    let other = render_in(&parallel, &scenarios())?;
    let strip = |plan: &RenderPlan| -> Result<Vec<Value>, String> {
        let mut v = serde_json::to_value(&plan.primitives).map_err(|e| e.to_string())?;
        for p in v.as_array_mut().unwrap() {
            let m = p.as_object_mut().unwrap();
            m.remove("geometry");
            m.remove("rotationDeg");
            if let Some(c) = m.get_mut("chart").and_then(Value::as_object_mut) {
                c.remove("orientationDeg");
            }
        }
        Ok(v.as_array().unwrap().clone())
    };
    ensure(strip(&plan)? == strip(&other)?, || "non-orientation primitive fields changed".into())?;
    let changed = plan.primitives.iter().zip(&other.primitives).filter(|(a, b)| a.rotation_deg != b.rotation_deg).count();
    ensure(changed == segments, || format!("{changed} rotations changed, want {segments}"))?;
    let unchanged_nodes = plan.layer(0).zip(other.layer(0)).all(|(a, b)| a == b);
    ensure(unchanged_nodes, || "node layer changed".into())?;
    Ok(format!("{nodes} node means, {segments} segment sums exact; parallel variant rotates {changed}"))
}

fn shuffled_copy(dir: &Path, files: &[&str], seed: u64) -> Result<(), String> {
    let data = dir.join("data");
    std::fs::create_dir_all(&data).map_err(|e| e.to_string())?;
    std::fs::copy(scenarios().join("data/grid.geojson"), data.join("grid.geojson")).map_err(|e| e.to_string())?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for f in files {
        let text = read(&scenarios().join("data").join(f))?;
        let mut lines: Vec<&str> = text.lines().collect();
        lines[1..].shuffle(&mut rng);
        std::fs::write(data.join(f), lines.join("\n") + "\n").map_err(|e| e.to_string())?;
    }
    Ok(())
}

fn determinism() -> Outcome {
    let cases = [
        ("scenario1-sidewalk-lines.json", vec!["sidewalk.csv"]),
        ("scenario2-bristles.json", vec!["sidewalk.csv"]),
        ("scenario3-crime-311.json", vec!["crime.csv", "requests311.csv"]),
    ];
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    for (k, (name, files)) in cases.iter().enumerate() {
        let spec = load_spec(name)?;
        let a = render_in(&spec, &scenarios())?;
        let b = render_in(&spec, &scenarios())?;
        ensure(emit_plan(&a) == emit_plan(&b), || format!("{name}: plan differs between runs"))?;
        let svg = |p: &RenderPlan| emit_svg(p, Viewport::default()).map_err(|e| e.to_string());
        ensure(svg(&a)? == svg(&b)?, || format!("{name}: SVG differs between runs"))?;
        let dir = tmp.path().join(format!("case{k}"));
        shuffled_copy(&dir, files, 99 + k as u64)?;
        let c = render_in(&spec, &dir)?;
        ensure(emit_plan(&a) == emit_plan(&c), || format!("{name}: plan changed after row shuffle"))?;
        ensure(svg(&a)? == svg(&c)?, || format!("{name}: SVG changed after row shuffle"))?;
    }

    let fixtures = core_tests().join("fixtures/golden");
    let golden = read(&core_tests().join("golden/four_segments.svg"))?;
    let spec = read(&fixtures.join("spec.json"))?;
    let options = RenderOptions { base_dir: fixtures, ..Default::default() };
    let plan = streetweave::render(&spec, &options).map_err(|e| e.to_string())?;
    let svg = emit_svg(&plan, Viewport::default()).map_err(|e| e.to_string())?;
    ensure(svg == golden, || "golden SVG does not match".into())?;
    Ok("3 scenarios stable across reruns and row shuffles; golden SVG matches".into())
}

fn performance() -> Outcome {
    let grid = Grid::with_segments(10_000, 80.0);
    let points = grid.uniform(100_000, 20.0, 42);
    let csv = points_csv(&points, &[("v", Column::Real(0.0, 100.0))], 43);
    let spec = json!({
        "map": [{}],
        "unit": [{ "type": "segment", "method": "line", "width": { "field": "v" } }],
        "data": [{ "physical": "net.geojson", "thematic": "points.csv" }],
        "relation": { "spatial": "buffer", "value": 10, "aggregation": "mean" }
    });
    let options = RenderOptions {
        overrides: DataOverrides { physical: Some(grid.geojson()), thematic: Some(csv) },
        ..Default::default()
    };
    let start = Instant::now();
    let plan = streetweave::render(&spec.to_string(), &options).map_err(|e| e.to_string())?;
    let text = emit_plan(&plan);
    let elapsed = start.elapsed();
    ensure(plan.primitives.len() == grid.segment_count(), || format!("{} primitives", plan.primitives.len()))?;
    within(elapsed, 5.0)?;
    Ok(format!(
        "{} segments x 100000 points in {:.2} s ({} MB plan)",
        grid.segment_count(),
        elapsed.as_secs_f64(),
        text.len() / 1_000_000
    ))
}

async fn call(app: &axum::Router, req: Request<Body>) -> (StatusCode, String, String) {
    let resp = app.clone().oneshot(req).await.expect("router is infallible");
    let status = resp.status();
    let ctype = resp
        .headers()
        .get("content-type")
        .and_then(|v| v.to_str().ok())
        .unwrap_or_default()
        .to_string();
    let body = axum::body::to_bytes(resp.into_body(), usize::MAX).await.expect("body");
    (status, ctype, String::from_utf8_lossy(&body).into_owned())
}

fn post(uri: &str, body: String) -> Request<Body> {
    Request::post(uri).header("content-type", "application/json").body(Body::from(body)).unwrap()
}

fn get(uri: &str) -> Request<Body> {
    Request::get(uri).body(Body::empty()).unwrap()
}

async fn service_checks(tmp: &Path) -> Outcome {
    let config = |geocoder_url: Option<&str>| Config {
        geocoder_url: geocoder_url.map(str::to_string),
        cache_dir: tmp.join("cache"),
        data_dir: scenarios(),
        ..Default::default()
    };
    let app = router(Arc::new(AppState::new(config(None))));
    // Port 9 on loopback refuses connections: any remote call fails.
    let offline = router(Arc::new(AppState::new(config(Some("http://127.0.0.1:9")))));
    let scenario = load_spec("scenario1-sidewalk-lines.json")?;
    let mut bad_enum = scenario.clone();
    bad_enum["unit"][0]["type"] = json!("edge");

    let expect = |what: &str, got: StatusCode, want: StatusCode| {
        ensure(got == want, || format!("{what}: status {got}, want {want}"))
    };

    let (s, _, body) = call(&app, get("/api/health")).await;
    expect("health", s, StatusCode::OK)?;
    ensure(body.contains("\"ok\""), || format!("health body {body}"))?;

    let (s, _, body) = call(&app, post("/api/validate", scenario.to_string())).await;
    expect("validate valid", s, StatusCode::OK)?;
    ensure(body.contains("\"valid\":true"), || format!("validate body {body}"))?;
    let (s, _, body) = call(&app, post("/api/validate", bad_enum.to_string())).await;
    expect("validate invalid", s, StatusCode::BAD_REQUEST)?;
    ensure(body.contains("unit[0].type"), || format!("validate body {body}"))?;

    let (s, ctype, body) = call(&app, post("/api/render", json!({ "spec": scenario }).to_string())).await;
    expect("render", s, StatusCode::OK)?;
    ensure(ctype.starts_with("application/json"), || format!("render content type {ctype}"))?;
    let plan: Value = serde_json::from_str(&body).map_err(|e| e.to_string())?;
    let layers = plan["meta"]["layers"].as_array().map_or(0, Vec::len);
    ensure(layers == 3, || format!("render plan has {layers} layers"))?;
    let (s, ctype, body) =
        call(&app, post("/api/render", json!({ "spec": scenario, "output": "svg" }).to_string())).await;
    expect("render svg", s, StatusCode::OK)?;
    ensure(ctype.starts_with("image/svg+xml") && body.starts_with("<svg"), || format!("svg content type {ctype}"))?;
    let (s, _, _) = call(&app, post("/api/render", json!({ "spec": bad_enum }).to_string())).await;
    expect("render spec error", s, StatusCode::BAD_REQUEST)?;
    let broken = json!({
        "spec": scenario,
        "data": { "thematic": "latitude,longitude,curbRampSeverity\n41.88,-87.63,1\n41.88,-87.63,2,9\n" }
    });
    let (s, _, body) = call(&app, post("/api/render", broken.to_string())).await;
    expect("render broken csv", s, StatusCode::UNPROCESSABLE_ENTITY)?;
    ensure(body.contains("row 2"), || format!("broken csv body {body}"))?;

    let (s, _, body) = call(&offline, get("/api/geocode?q=41.88,-87.63")).await;
    expect("geocode literal", s, StatusCode::OK)?;
    let r: Value = serde_json::from_str(&body).map_err(|e| e.to_string())?;
    ensure(r["provider"] == "literal" && r["center"]["lat"] == 41.88 && r["center"]["lon"] == -87.63, || {
        format!("geocode literal body {body}")
    })?;
    let (s, _, _) = call(&offline, get("/api/geocode?q=Union%20Station")).await;
    expect("geocode unavailable", s, StatusCode::BAD_GATEWAY)?;
    let (s, _, _) = call(&app, get("/api/geocode?q=Union%20Station")).await;
    expect("geocode remote disabled", s, StatusCode::BAD_REQUEST)?;
    let (s, _, _) = call(&app, get("/api/geocode?q=")).await;
    expect("geocode empty", s, StatusCode::BAD_REQUEST)?;
    Ok("validate/render/geocode statuses match; literal geocode offline".into())
}

fn service_contract() -> Outcome {
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let rt = tokio::runtime::Builder::new_multi_thread().enable_all().build().map_err(|e| e.to_string())?;
    rt.block_on(service_checks(tmp.path()))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("grammar conformance", grammar_conformance),
        ("spatial join oracle equivalence", join_oracle),
        ("aggregation identities", aggregation_identities),
        ("geometry suite", geometry_suite),
        ("scenario 1: buffer + mean line layers", scenario1),
        ("scenario 2: parallel to perpendicular bristles", scenario2),
        ("scenario 3: node charts and segment sums", scenario3),
        ("determinism", determinism),
        ("performance floor", performance),
        ("service contract", service_contract),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(check).unwrap_or_else(|_| Err("panicked".into()));
        let ms = start.elapsed().as_millis();
        match outcome {
            Ok(detail) => println!("PASS {name} ({ms} ms): {detail}"),
            Err(why) => {
                failed += 1;
                println!("FAIL {name} ({ms} ms): {why}");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
