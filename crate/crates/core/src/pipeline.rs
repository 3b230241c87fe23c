//! End-to-end rendering: spec text and datasets in, [`RenderPlan`] out.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use crate::encoding::{
    apply_query, resolve_cell_colors, resolve_style, Domains, QueryRegion, ResolvedStyle, Rgba, StyledElement,
};
use crate::error::{Error, Result};
use crate::geo::{parse_network, resolve_density, subdivide, GeoPoint, PlanarPoint, Projection, StreetNetwork};
use crate::geocode::parse_literal;
use crate::join::{empty_join, join, parse_thematic, JoinTarget, JoinedElement, SpatialIndex, ThematicLayer};
use crate::render::{
    canonical_json, layout, layout_bristle, layout_chart_anchor, layout_circle, layout_matrix, layout_parallel,
    meters_per_pixel, BaseLayer, BaseStreet, ChartAnchor, LayerMeta, PlanMeta, Primitive, RenderPlan, NOMINAL_ZOOM,
};
use crate::spec::{
    apply_defaults, bind_units, defaults, parse_spec, Alignment, Channel, ChannelBinding, Diagnostic, Method,
    Orientation, UnitBinding, UnitSpec, UnitType, VisualizationSpec,
};

/// Dataset text supplied with a request instead of the document's file paths.
#[derive(Debug, Clone, Default)]
pub struct DataOverrides {
    /// GeoJSON for the street network.
    pub physical: Option<String>,
    /// CSV used for every thematic entry.
    pub thematic: Option<String>,
}

#[derive(Debug, Clone)]
pub struct RenderOptions {
    /// Zoom the plan is for; decides which layers are visible.
    pub zoom: u8,
    /// Zoom at which pixel sizes are converted to meters.
    pub nominal_zoom: u8,
    /// Directory that relative data paths are resolved against.
    pub base_dir: PathBuf,
    pub overrides: DataOverrides,
    /// Resolved query address; literal addresses resolve without it.
    pub query_center: Option<GeoPoint>,
}

impl Default for RenderOptions {
    fn default() -> Self {
        RenderOptions {
            zoom: NOMINAL_ZOOM,
            nominal_zoom: NOMINAL_ZOOM,
            base_dir: PathBuf::from("."),
            overrides: DataOverrides::default(),
            query_center: None,
        }
    }
}

/// A validated spec with defaults applied and units bound to data.
#[derive(Debug, Clone)]
pub struct Prepared {
    /// The document as written, used for hashing.
    pub original: VisualizationSpec,
    pub spec: VisualizationSpec,
    pub bindings: Vec<UnitBinding>,
    pub warnings: Vec<Diagnostic>,
}

pub fn prepare(text: &str) -> Result<Prepared> {
    let parsed = parse_spec(text).map_err(Error::Spec)?;
    let bindings = bind_units(&parsed.spec).map_err(|mut errs| {
        errs.extend(parsed.warnings.iter().cloned());
        Error::Spec(errs)
    })?;
    Ok(Prepared {
        spec: apply_defaults(parsed.spec.clone()),
        original: parsed.spec,
        bindings,
        warnings: parsed.warnings,
    })
}

/// Hex SHA-256 of the document's canonical JSON.
pub fn spec_hash(spec: &VisualizationSpec) -> String {
    let text = serde_json::to_string(&canonical_json(spec.to_value())).expect("spec serializes");
    hex::encode(Sha256::digest(text.as_bytes()))
}

/// Loaded physical and thematic layers for one spec.
#[derive(Debug, Clone)]
pub struct Datasets {
    pub network: StreetNetwork,
    /// Indexed like the document's `data` entries.
    pub thematic: Vec<Option<ThematicLayer>>,
    pub warnings: Vec<Diagnostic>,
}

fn read(base: &Path, rel: &str) -> Result<String> {
    let path = base.join(rel);
    std::fs::read_to_string(&path).map_err(|source| Error::Io { path, source })
}

pub fn load_datasets(spec: &VisualizationSpec, options: &RenderOptions) -> Result<Datasets> {
    let mut warnings = Vec::new();
    let physical = spec.physical_index().ok_or_else(|| {
        Error::Spec(vec![Diagnostic::error("data", "no data entry has a physical layer")])
    })?;
    let geojson = match &options.overrides.physical {
        Some(text) => text.clone(),
        None => read(&options.base_dir, spec.data[physical].physical.as_deref().unwrap_or_default())?,
    };
    let name = spec.data[physical].physical.clone().unwrap_or_else(|| "physical".into());
    let load = parse_network(&geojson).map_err(|e| match e {
        Error::Data { message, .. } => Error::data(name.clone(), message),
        other => other,
    })?;
    let path = format!("data[{physical}].physical");
    warnings.extend(load.warnings.into_iter().map(|w| Diagnostic::warning(path.clone(), w)));

    let mut thematic = Vec::with_capacity(spec.data.len());
    for (k, d) in spec.data.iter().enumerate() {
        let Some(src) = &d.thematic else {
            thematic.push(None);
            continue;
        };
        let (text, name) = match &options.overrides.thematic {
            Some(text) => (text.clone(), "inline thematic data".to_string()),
            None => (read(&options.base_dir, &src.path)?, src.path.clone()),
        };
        let load = parse_thematic(&text, &name, src.lat_column(), src.lon_column())?;
        let path = format!("data[{k}].thematic");
        warnings.extend(load.warnings.into_iter().map(|w| Diagnostic::warning(path.clone(), w)));
        thematic.push(Some(load.layer));
    }
    Ok(Datasets { network: load.network, thematic, warnings })
}

/// Parse, load and render in one step.
pub fn render(text: &str, options: &RenderOptions) -> Result<RenderPlan> {
    let prepared = prepare(text)?;
    let data = load_datasets(&prepared.spec, options)?;
    render_prepared(&prepared, &data, options)
}

fn channel_path(unit: usize, channel: Channel, spec: &UnitSpec, field: &str) -> String {
    if channel == Channel::Color {
        if let Some(crate::spec::ColorBinding::Cells(cells)) = &spec.color {
            if let Some(k) = cells.iter().position(|b| b.field().is_some_and(|f| f.field == field)) {
                return format!("unit[{unit}].color[{k}].field");
            }
        }
    }
    format!("unit[{unit}].{}.field", channel.as_str())
}

/// Every bound field must exist in the unit's thematic layer and be numeric.
fn check_fields(prepared: &Prepared, data: &Datasets) -> Result<()> {
    let mut errors = Vec::new();
    for (b, unit) in prepared.bindings.iter().zip(&prepared.spec.units) {
        let Some(layer) = data.thematic.get(b.data).and_then(Option::as_ref) else {
            continue;
        };
        for (channel, f) in unit.field_bindings() {
            let path = channel_path(b.unit, channel, unit, &f.field);
            if !layer.has_column(&f.field) {
                errors.push(Diagnostic::error(path, format!("unknown field {:?} in data[{}].thematic", f.field, b.data)));
            } else if !layer.numeric_columns.contains(&f.field) {
                errors.push(Diagnostic::error(path, format!("field {:?} is not numeric", f.field)));
            }
        }
    }
    if errors.is_empty() {
        Ok(())
    } else {
        Err(Error::Spec(errors))
    }
}

struct Context<'a> {
    network: &'a StreetNetwork,
    proj: Projection,
    m_per_px: f64,
    base_width: f64,
    region: Option<QueryRegion>,
}

/// One element of a segment or node unit.
struct Element {
    target: JoinTarget,
    midpoint: GeoPoint,
}

fn direction(line: &[PlanarPoint]) -> PlanarPoint {
    let d = line[line.len() - 1] - line[0];
    if d.norm() > 0.0 {
        d
    } else {
        line[1] - line[0]
    }
}

fn chart_record(e: &JoinedElement) -> BTreeMap<String, f64> {
    let mut r = e.aggregates.clone();
    r.insert("_count".into(), e.count as f64);
    r
}

fn styled(ctx: &Context, unit: &UnitSpec, elements: &[Element], joined: &[JoinedElement]) -> Result<Vec<ResolvedStyle>> {
    let domains = if unit.uses_fields() { Domains::for_elements(unit, joined)? } else { Domains::default() };
    let styled: Vec<StyledElement> = elements
        .iter()
        .zip(joined)
        .map(|(el, j)| StyledElement {
            id: el.target.id.clone(),
            midpoint: el.midpoint,
            style: resolve_style(unit, &|f| j.value(f), &domains),
        })
        .collect();
    Ok(apply_query(styled, ctx.region.as_ref()).into_iter().map(|s| s.style).collect())
}

fn cell_colors(unit: &UnitSpec, joined: &[JoinedElement]) -> Result<Vec<Vec<Rgba>>> {
    let domains = if unit.uses_fields() { Domains::for_elements(unit, joined)? } else { Domains::default() };
    joined.iter().map(|j| resolve_cell_colors(unit, &|f| j.value(f), &domains)).collect()
}

fn run_join(
    targets: Vec<JoinTarget>,
    layer: Option<(&ThematicLayer, &SpatialIndex)>,
    binding: &UnitBinding,
) -> Vec<JoinedElement> {
    let mut by_id: BTreeMap<String, JoinedElement> = match layer {
        Some((layer, index)) => join(&targets, layer, index, &binding.relation),
        None => empty_join(&targets),
    }
    .into_iter()
    .map(|j| (j.element_id.clone(), j))
    .collect();
    targets.iter().map(|t| by_id.remove(&t.id).expect("joined every target")).collect()
}

fn segment_layer(
    ctx: &Context,
    unit_index: usize,
    unit: &UnitSpec,
    binding: &UnitBinding,
    layer: Option<(&ThematicLayer, &SpatialIndex)>,
) -> Result<Vec<Primitive>> {
    let segments: Vec<_> = ctx.network.segments.values().collect();
    let density = unit.density.clone().unwrap_or(ChannelBinding::Constant(defaults::constant(Channel::Density)));
    let counts: Vec<usize> = match &density {
        ChannelBinding::Field(f) => {
            let targets = segments.iter().map(|s| JoinTarget::segment(s, &ctx.proj)).collect();
            let joined = run_join(targets, layer, binding);
            let values: Vec<Option<f64>> = joined.iter().map(|j| j.value(&f.field)).collect();
            let domain = values.iter().flatten().fold(None, |acc: Option<(f64, f64)>, &v| {
                Some(acc.map_or((v, v), |(lo, hi)| (lo.min(v), hi.max(v))))
            });
            values.iter().map(|&v| resolve_density(&density, v, domain)).collect()
        }
        constant => vec![resolve_density(constant, None, None); segments.len()],
    };

    let mut elements = Vec::new();
    for (seg, &n) in segments.iter().zip(&counts) {
        if n == 1 {
            elements.push(Element { target: JoinTarget::segment(seg, &ctx.proj), midpoint: seg.midpoint() });
        } else {
            for sub in subdivide(seg, n)? {
                elements.push(Element { target: JoinTarget::sub_segment(&sub, &ctx.proj), midpoint: sub.midpoint });
            }
        }
    }
    let joined = run_join(elements.iter().map(|e| e.target.clone()).collect(), layer, binding);
    let styles = styled(ctx, unit, &elements, &joined)?;
    let cells = if unit.method == Method::Matrix && unit.chart.is_none() { Some(cell_colors(unit, &joined)?) } else { None };

    let orientation = unit.orientation();
    let alignment = unit.alignment();
    let mut out = Vec::new();
    for (k, (el, style)) in elements.iter().zip(&styles).enumerate() {
        let crate::join::JoinGeometry::Linear { line, midpoint } = &el.target.geometry else {
            unreachable!("segment elements are linear")
        };
        let dir = direction(line);
        let id = &el.target.id;
        let push = |out: &mut Vec<Primitive>, shape: &layout::Shape, style: ResolvedStyle, ordinal| {
            out.push(Primitive::from_shape(shape, &ctx.proj, style, unit_index, id.clone(), ordinal));
        };
        if let Some(chart) = &unit.chart {
            let mut rotation = crate::geo::planar_bearing(dir);
            if orientation == Orientation::Perpendicular {
                rotation = crate::geo::normalize_degrees(rotation + 90.0);
            }
            let shape = layout_chart_anchor(*midpoint, rotation, ctx.m_per_px);
            let mut p = Primitive::from_shape(&shape, &ctx.proj, style.clone(), unit_index, id.clone(), 0);
            p.chart = Some(ChartAnchor::new(chart, chart_record(&joined[k]), rotation, alignment.as_str()));
            out.push(p);
            continue;
        }
        match (unit.method, orientation) {
            (Method::Matrix, _) => {
                let grid_dir = if orientation == Orientation::Perpendicular { dir.left_normal() } else { dir };
                let across = unit.rows() as f64 * layout::CELL_PX;
                let d = match alignment {
                    Alignment::Center => 0.0,
                    a => crate::render::offset_distance(a, ctx.base_width, across, ctx.m_per_px),
                };
                let center = *midpoint + dir.normalized().left_normal() * d;
                let shapes = layout_matrix(center, grid_dir, unit.rows(), unit.columns(), ctx.m_per_px);
                for (c, (shape, color)) in shapes.iter().zip(&cells.as_ref().expect("matrix cells")[k]).enumerate() {
                    push(&mut out, shape, ResolvedStyle { color: *color, ..style.clone() }, c);
                }
            }
            (_, Orientation::Parallel) => {
                for (c, shape) in
                    layout_parallel(line, style, unit.method, alignment, ctx.base_width, ctx.m_per_px).iter().enumerate()
                {
                    push(&mut out, shape, style.clone(), c);
                }
            }
            (_, Orientation::Perpendicular) => {
                let shape = layout_bristle(*midpoint, dir, style, unit.method, alignment, ctx.base_width, ctx.m_per_px);
                push(&mut out, &shape, style.clone(), 0);
            }
        }
    }
    Ok(out)
}

fn node_layer(
    ctx: &Context,
    unit_index: usize,
    unit: &UnitSpec,
    binding: &UnitBinding,
    layer: Option<(&ThematicLayer, &SpatialIndex)>,
) -> Result<Vec<Primitive>> {
    let elements: Vec<Element> = ctx
        .network
        .nodes
        .values()
        .map(|n| Element { target: JoinTarget::node(n, &ctx.proj), midpoint: n.position })
        .collect();
    let joined = run_join(elements.iter().map(|e| e.target.clone()).collect(), layer, binding);
    let styles = styled(ctx, unit, &elements, &joined)?;
    Ok(elements
        .iter()
        .zip(styles)
        .zip(&joined)
        .map(|((el, style), j)| {
            let center = el.target.anchor();
            match &unit.chart {
                Some(chart) => {
                    let shape = layout_chart_anchor(center, 0.0, ctx.m_per_px);
                    let mut p = Primitive::from_shape(&shape, &ctx.proj, style, unit_index, el.target.id.clone(), 0);
                    p.chart = Some(ChartAnchor::new(chart, chart_record(j), 0.0, unit.alignment().as_str()));
                    p
                }
                None => {
                    let shape = layout_circle(center, &style, ctx.m_per_px);
                    Primitive::from_shape(&shape, &ctx.proj, style, unit_index, el.target.id.clone(), 0)
                }
            }
        })
        .collect())
}

fn point_layer(ctx: &Context, unit_index: usize, unit: &UnitSpec, layer: &ThematicLayer) -> Result<Vec<Primitive>> {
    let domains = Domains::collect(unit, &layer.points, |p, f| p.number(f))?;
    let styled: Vec<StyledElement> = layer
        .points
        .iter()
        .map(|p| StyledElement {
            id: format!("pt-{}", p.id),
            midpoint: p.position,
            style: resolve_style(unit, &|f| p.number(f), &domains),
        })
        .collect();
    Ok(apply_query(styled, ctx.region.as_ref())
        .into_iter()
        .map(|s| {
            let shape = layout_circle(ctx.proj.project(s.midpoint), &s.style, ctx.m_per_px);
            let mut prim = Primitive::from_shape(&shape, &ctx.proj, s.style, unit_index, s.id, 0);
            // Points keep their exact input coordinates.
            prim.geometry = vec![[s.midpoint.lon, s.midpoint.lat]];
            prim
        })
        .collect())
}

fn query_region(spec: &VisualizationSpec, options: &RenderOptions, warnings: &mut Vec<Diagnostic>) -> Option<QueryRegion> {
    let q = spec.query.as_ref()?;
    let radius = q.radius.unwrap_or(defaults::QUERY_RADIUS_M);
    let center = options.query_center.or_else(|| q.address.as_deref().and_then(parse_literal));
    match (center, &q.address) {
        (Some(c), _) => Some(QueryRegion::new(c, radius)),
        (None, Some(addr)) => {
            warnings.push(Diagnostic::warning(
                "query.address",
                format!("address {addr:?} could not be resolved; query region ignored"),
            ));
            None
        }
        (None, None) => None,
    }
}

/// Render a prepared spec against loaded data.
pub fn render_prepared(prepared: &Prepared, data: &Datasets, options: &RenderOptions) -> Result<RenderPlan> {
    check_fields(prepared, data)?;
    let spec = &prepared.spec;
    let mut warnings = prepared.warnings.clone();
    warnings.extend(data.warnings.iter().cloned());

    let network = &data.network;
    let proj = network.projection();
    let m_per_px = meters_per_pixel(network.centroid.lat, options.nominal_zoom);
    let map = spec.map();
    let ctx = Context {
        network,
        proj,
        m_per_px,
        base_width: map.street_width(),
        region: query_region(spec, options, &mut warnings),
    };
    let indexes: Vec<Option<SpatialIndex>> =
        data.thematic.iter().map(|t| t.as_ref().map(|l| SpatialIndex::build(l, &proj))).collect();

    let mut primitives = Vec::new();
    let mut layers = Vec::new();
    for (b, unit) in prepared.bindings.iter().zip(&spec.units) {
        let layer = data.thematic[b.data].as_ref().zip(indexes[b.data].as_ref());
        let prims = match unit.unit_type {
            UnitType::Segment => segment_layer(&ctx, b.unit, unit, b, layer)?,
            UnitType::Node => node_layer(&ctx, b.unit, unit, b, layer)?,
            UnitType::Point => match layer {
                Some((l, _)) => point_layer(&ctx, b.unit, unit, l)?,
                None => Vec::new(),
            },
        };
        if prims.is_empty() {
            warnings.push(Diagnostic::warning(format!("unit[{}]", b.unit), "layer is empty"));
        }
        let zoom = unit.zoom();
        layers.push(LayerMeta {
            layer_index: b.unit,
            unit_type: unit.unit_type.as_str().into(),
            method: unit.method.as_str().into(),
            orientation: unit.orientation().as_str().into(),
            alignment: unit.alignment().as_str().into(),
            zoom: [zoom.min, zoom.max],
            visible: zoom.contains(options.zoom),
            primitive_count: prims.len(),
        });
        primitives.extend(prims);
    }

    let base = BaseLayer {
        street_color: Rgba::parse(map.street_color()).unwrap_or_else(|| Rgba::parse(defaults::STREET_COLOR).unwrap()),
        street_width: map.street_width(),
        background: map.background().as_str().into(),
        streets: network
            .segments
            .values()
            .map(|s| BaseStreet { id: s.id.clone(), geometry: s.polyline.iter().map(|&g| [g.lon, g.lat]).collect() })
            .collect(),
    };
    let meta = PlanMeta {
        spec_hash: spec_hash(&prepared.original),
        unit_bindings: prepared.bindings.clone(),
        warnings,
        layers,
        zoom: options.zoom,
        nominal_zoom: options.nominal_zoom,
        meters_per_pixel: m_per_px,
    };
    Ok(RenderPlan::assemble(primitives, base, meta, &proj))
}
