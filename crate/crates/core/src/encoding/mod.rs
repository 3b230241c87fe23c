//! Scales, color ramps and per-element style resolution.

mod color;

pub use color::{ramp, Rgba};

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geo::{haversine_m, GeoPoint};
use crate::join::JoinedElement;
use crate::spec::{defaults, Channel, ChannelBinding, Constant, FieldBinding, OutputRange, UnitSpec};

/// Width factor applied inside a query region.
pub const QUERY_WIDTH_MULTIPLIER: f64 = 2.0;

/// Linear, clamped mapping from a data domain onto an output range.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scale {
    pub domain: [f64; 2],
    pub range: OutputRange,
}

impl Scale {
    pub fn new(domain: [f64; 2], range: OutputRange) -> Self {
        Scale { domain, range }
    }

    /// Domain position in [0, 1]; 0.5 for a degenerate domain.
    pub fn position(&self, v: f64) -> f64 {
        let [min, max] = self.domain;
        if !(max > min) {
            return 0.5;
        }
        ((v - min) / (max - min)).clamp(0.0, 1.0)
    }

    pub fn map(&self, v: f64) -> f64 {
        let [lo, hi] = self.range;
        let t = self.position(v);
        if t == 1.0 {
            hi
        } else {
            lo + t * (hi - lo)
        }
    }
}

/// Scale over the non-missing `values` of `field`.
pub fn build_scale(
    field: &str,
    values: impl IntoIterator<Item = Option<f64>>,
    range: OutputRange,
) -> Result<Scale> {
    let domain = domain_of(values).ok_or_else(|| Error::NoData(field.to_string()))?;
    Ok(Scale::new(domain, range))
}

fn domain_of(values: impl IntoIterator<Item = Option<f64>>) -> Option<[f64; 2]> {
    values.into_iter().flatten().fold(None, |acc, v| match acc {
        None => Some([v, v]),
        Some([lo, hi]) => Some([lo.min(v), hi.max(v)]),
    })
}

/// Per-field data domains of one unit.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Domains(BTreeMap<String, [f64; 2]>);

impl Domains {
    /// Domains for every field the unit binds, computed from `lookup` over
    /// all records. Fields with no data anywhere are an error.
    pub fn collect<R>(unit: &UnitSpec, records: &[R], lookup: impl Fn(&R, &str) -> Option<f64>) -> Result<Self> {
        let mut out = BTreeMap::new();
        for (_, f) in unit.field_bindings() {
            if out.contains_key(&f.field) {
                continue;
            }
            let d = domain_of(records.iter().map(|r| lookup(r, &f.field)))
                .ok_or_else(|| Error::NoData(f.field.clone()))?;
            out.insert(f.field.clone(), d);
        }
        Ok(Domains(out))
    }

    pub fn for_elements(unit: &UnitSpec, elements: &[JoinedElement]) -> Result<Self> {
        Self::collect(unit, elements, |e, f| e.value(f))
    }

    pub fn insert(&mut self, field: impl Into<String>, domain: [f64; 2]) {
        self.0.insert(field.into(), domain);
    }

    pub fn get(&self, field: &str) -> Option<[f64; 2]> {
        self.0.get(field).copied()
    }

    pub fn scale(&self, binding: &FieldBinding, channel: Channel) -> Option<Scale> {
        let range = binding.range.unwrap_or_else(|| defaults::output_range(channel));
        self.get(&binding.field).map(|d| Scale::new(d, range))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Squiggle {
    pub amplitude_px: f64,
    pub wavelength_px: f64,
}

/// Concrete channel values for one element.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ResolvedStyle {
    pub color: Rgba,
    pub width_px: f64,
    pub height_px: f64,
    pub opacity: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dash: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub squiggle: Option<Squiggle>,
}

impl Default for ResolvedStyle {
    fn default() -> Self {
        ResolvedStyle {
            color: Rgba::parse(defaults::COLOR).expect("default color"),
            width_px: defaults::WIDTH_PX,
            height_px: defaults::HEIGHT_PX,
            opacity: defaults::OPACITY,
            dash: None,
            squiggle: None,
        }
    }
}

fn numeric(
    binding: Option<&ChannelBinding>,
    channel: Channel,
    lookup: &dyn Fn(&str) -> Option<f64>,
    domains: &Domains,
) -> Option<f64> {
    match binding? {
        ChannelBinding::Constant(c) => c.as_number(),
        ChannelBinding::Field(f) => {
            let v = lookup(&f.field)?;
            domains.scale(f, channel).map(|s| s.map(v))
        }
    }
}

/// Color for a single color binding; `None` means use the default.
pub fn resolve_color(
    binding: &ChannelBinding,
    lookup: &dyn Fn(&str) -> Option<f64>,
    domains: &Domains,
) -> Option<Rgba> {
    match binding {
        ChannelBinding::Constant(Constant::Text(s)) => Rgba::parse(s),
        ChannelBinding::Constant(_) => None,
        ChannelBinding::Field(f) => {
            let v = lookup(&f.field)?;
            let base = Rgba::parse(f.base.as_deref().unwrap_or(defaults::RAMP_BASE))?;
            let scale = domains.scale(f, Channel::Color)?;
            Some(ramp(base, scale.map(v).clamp(0.0, 1.0)))
        }
    }
}

/// Resolve every channel of `unit` for one record.
///
/// `lookup` returns the record's value for a column; missing values fall
/// back to the channel default.
pub fn resolve_style(unit: &UnitSpec, lookup: &dyn Fn(&str) -> Option<f64>, domains: &Domains) -> ResolvedStyle {
    let d = ResolvedStyle::default();
    let color = unit
        .binding(Channel::Color)
        .and_then(|b| resolve_color(b, lookup, domains))
        .unwrap_or(d.color);
    let width_px = numeric(unit.width.as_ref(), Channel::Width, lookup, domains).unwrap_or(d.width_px).max(0.0);
    let height_px = numeric(unit.height.as_ref(), Channel::Height, lookup, domains).unwrap_or(d.height_px).max(0.0);
    let opacity = numeric(unit.opacity.as_ref(), Channel::Opacity, lookup, domains)
        .unwrap_or(d.opacity)
        .clamp(0.0, 1.0);
    let dash = match &unit.dash {
        Some(ChannelBinding::Constant(Constant::Bool(true))) => Some(defaults::DASH_PATTERN),
        Some(ChannelBinding::Constant(Constant::Pattern(p))) => Some(*p),
        Some(b @ ChannelBinding::Field(_)) => {
            numeric(Some(b), Channel::Dash, lookup, domains).map(|on| [on, defaults::DASH_PATTERN[1]])
        }
        _ => None,
    };
    let squiggle = match &unit.squiggle {
        Some(ChannelBinding::Constant(Constant::Bool(true))) => Some(Squiggle {
            amplitude_px: defaults::SQUIGGLE_AMPLITUDE,
            wavelength_px: defaults::SQUIGGLE_WAVELENGTH,
        }),
        Some(ChannelBinding::Constant(Constant::Squiggle { amplitude, wavelength })) => {
            Some(Squiggle { amplitude_px: *amplitude, wavelength_px: *wavelength })
        }
        Some(b @ ChannelBinding::Field(_)) => numeric(Some(b), Channel::Squiggle, lookup, domains)
            .map(|a| Squiggle { amplitude_px: a, wavelength_px: defaults::SQUIGGLE_WAVELENGTH }),
        _ => None,
    }
    .filter(|s| s.amplitude_px > 0.0 && s.wavelength_px > 0.0);
    ResolvedStyle { color, width_px, height_px, opacity, dash, squiggle }
}

pub fn resolve_element_style(unit: &UnitSpec, element: &JoinedElement, domains: &Domains) -> ResolvedStyle {
    resolve_style(unit, &|f| element.value(f), domains)
}

/// Row-major matrix cell colors. Cells beyond the bound list get the default.
pub fn resolve_cell_colors(
    unit: &UnitSpec,
    lookup: &dyn Fn(&str) -> Option<f64>,
    domains: &Domains,
) -> Result<Vec<Rgba>> {
    let cells = (unit.rows() * unit.columns()) as usize;
    let bindings = unit.color.as_ref().map_or(&[][..], |c| c.bindings());
    if bindings.len() > cells {
        return Err(Error::MatrixOverflow { fields: bindings.len(), cells });
    }
    let fallback = ResolvedStyle::default().color;
    Ok((0..cells)
        .map(|i| bindings.get(i).and_then(|b| resolve_color(b, lookup, domains)).unwrap_or(fallback))
        .collect())
}

/// Units visible at `zoom`, as indices.
pub fn zoom_filter(units: &[UnitSpec], zoom: u8) -> Vec<usize> {
    units.iter().enumerate().filter(|(_, u)| u.zoom().contains(zoom)).map(|(i, _)| i).collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QueryRegion {
    pub center: GeoPoint,
    pub radius_m: f64,
    pub width_multiplier: f64,
}

impl QueryRegion {
    pub fn new(center: GeoPoint, radius_m: f64) -> Self {
        QueryRegion { center, radius_m, width_multiplier: QUERY_WIDTH_MULTIPLIER }
    }

    pub fn contains(&self, p: GeoPoint) -> bool {
        haversine_m(self.center, p) <= self.radius_m
    }
}

/// A resolved style tied to the point used for query tests.
#[derive(Debug, Clone, PartialEq)]
pub struct StyledElement {
    pub id: String,
    pub midpoint: GeoPoint,
    pub style: ResolvedStyle,
}

/// Multiply the width of elements whose midpoint lies in the region.
pub fn apply_query(mut elements: Vec<StyledElement>, region: Option<&QueryRegion>) -> Vec<StyledElement> {
    if let Some(r) = region {
        for e in &mut elements {
            if r.contains(e.midpoint) {
                e.style.width_px *= r.width_multiplier;
            }
        }
    }
    elements
}
