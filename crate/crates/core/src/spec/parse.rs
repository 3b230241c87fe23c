//! Structural validation of grammar documents.
//!
//! The walker never stops at the first problem: every error and warning in
//! the document is collected so an editor can show them all at once.

use serde_json::{Map, Value};

use super::diagnostic::has_errors;
use super::*;

/// Result of a successful parse: the document plus any warnings.
#[derive(Debug, Clone, PartialEq)]
pub struct Parsed {
    pub spec: VisualizationSpec,
    pub warnings: Vec<Diagnostic>,
}

/// Parse and validate a grammar document.
///
/// On failure the returned list holds every diagnostic found (warnings
/// included), with at least one error.
pub fn parse_spec(text: &str) -> Result<Parsed, Vec<Diagnostic>> {
    match serde_json::from_str::<Value>(text) {
        Ok(value) => parse_value(&value),
        Err(err) => {
            let offset = byte_offset(text, err.line(), err.column());
            Err(vec![Diagnostic::error(
                "",
                format!(
                    "malformed document at byte {offset} (line {}, column {}): {err}",
                    err.line(),
                    err.column()
                ),
            )])
        }
    }
}

pub fn parse_value(value: &Value) -> Result<Parsed, Vec<Diagnostic>> {
    let mut walker = Walker::default();
    let spec = walker.document(value);
    match spec {
        Some(spec) if !has_errors(&walker.diags) => Ok(Parsed { spec, warnings: walker.diags }),
        _ => {
            debug_assert!(has_errors(&walker.diags));
            Err(walker.diags)
        }
    }
}

fn byte_offset(text: &str, line: usize, column: usize) -> usize {
    if line == 0 {
        return 0;
    }
    let line_start: usize = text
        .split_inclusive('\n')
        .take(line - 1)
        .map(str::len)
        .sum();
    (line_start + column.saturating_sub(1)).min(text.len())
}

fn key(path: &str, key: &str) -> String {
    if path.is_empty() {
        key.to_string()
    } else {
        format!("{path}.{key}")
    }
}

fn index(path: &str, i: usize) -> String {
    format!("{path}[{i}]")
}

fn type_name(v: &Value) -> &'static str {
    match v {
        Value::Null => "null",
        Value::Bool(_) => "boolean",
        Value::Number(_) => "number",
        Value::String(_) => "string",
        Value::Array(_) => "array",
        Value::Object(_) => "object",
    }
}

pub(crate) fn is_color(s: &str) -> bool {
    csscolorparser::parse(s).is_ok()
}

#[derive(Default)]
struct Walker {
    diags: Vec<Diagnostic>,
}

impl Walker {
    fn error(&mut self, path: impl Into<String>, msg: impl Into<String>) {
        self.diags.push(Diagnostic::error(path, msg));
    }

    fn warn(&mut self, path: impl Into<String>, msg: impl Into<String>) {
        self.diags.push(Diagnostic::warning(path, msg));
    }

    fn object<'v>(&mut self, path: &str, v: &'v Value) -> Option<&'v Map<String, Value>> {
        match v {
            Value::Object(m) => Some(m),
            other => {
                self.error(path, format!("expected object, found {}", type_name(other)));
                None
            }
        }
    }

    fn unknown_fields(&mut self, path: &str, obj: &Map<String, Value>, known: &[&str]) {
        for k in obj.keys() {
            if !known.contains(&k.as_str()) {
                self.warn(key(path, k), format!("unknown field `{k}` is ignored"));
            }
        }
    }

    fn non_empty_list<'v>(&mut self, path: &str, v: Option<&'v Value>) -> Option<&'v [Value]> {
        match v {
            None => {
                self.error(path, "required; expected a non-empty array");
                None
            }
            Some(Value::Array(items)) if items.is_empty() => {
                self.error(path, "expected at least one entry");
                None
            }
            Some(Value::Array(items)) => Some(items),
            Some(other) => {
                self.error(path, format!("expected array, found {}", type_name(other)));
                None
            }
        }
    }

    fn token<T>(
        &mut self,
        path: &str,
        v: &Value,
        parse: fn(&str) -> Option<T>,
        allowed: &[&str],
    ) -> Option<T> {
        let found = match v {
            Value::String(s) => {
                if let Some(t) = parse(s) {
                    return Some(t);
                }
                format!("\"{s}\"")
            }
            other => other.to_string(),
        };
        self.error(
            path,
            format!("invalid value {found}; expected one of: {}", allowed.join(", ")),
        );
        None
    }

    fn number(&mut self, path: &str, v: &Value) -> Option<f64> {
        match v.as_f64() {
            Some(n) if n.is_finite() => Some(n),
            _ => {
                self.error(path, format!("expected number, found {}", type_name(v)));
                None
            }
        }
    }

    fn number_where(
        &mut self,
        path: &str,
        v: &Value,
        ok: impl Fn(f64) -> bool,
        requirement: &str,
    ) -> Option<f64> {
        let n = self.number(path, v)?;
        if ok(n) {
            Some(n)
        } else {
            self.error(path, format!("{n} violates {requirement}"));
            None
        }
    }

    fn integer(&mut self, path: &str, v: &Value, min: u64, max: u64) -> Option<u64> {
        let n = self.number(path, v)?;
        if n.fract() != 0.0 {
            self.error(path, format!("expected an integer, found {n}"));
            return None;
        }
        if n < min as f64 || n > max as f64 {
            self.error(path, format!("{n} is outside the allowed range [{min}, {max}]"));
            return None;
        }
        Some(n as u64)
    }

    fn string<'v>(&mut self, path: &str, v: &'v Value) -> Option<&'v str> {
        match v {
            Value::String(s) if !s.trim().is_empty() => Some(s),
            Value::String(_) => {
                self.error(path, "expected a non-empty string");
                None
            }
            other => {
                self.error(path, format!("expected string, found {}", type_name(other)));
                None
            }
        }
    }

    fn color(&mut self, path: &str, v: &Value) -> Option<String> {
        let s = self.string(path, v)?;
        if is_color(s) {
            Some(s.to_string())
        } else {
            self.error(path, format!("\"{s}\" is not a recognized color (hex or CSS name)"));
            None
        }
    }

    fn document(&mut self, v: &Value) -> Option<VisualizationSpec> {
        let obj = self.object("", v)?;
        self.unknown_fields("", obj, &["$schema", "map", "unit", "data", "relation", "query"]);

        let maps = self.non_empty_list("map", obj.get("map")).map(|items| {
            if items.len() > 1 {
                for i in 1..items.len() {
                    self.warn(index("map", i), "only the first map entry is honored");
                }
            }
            items
                .iter()
                .enumerate()
                .filter_map(|(i, m)| self.map(&index("map", i), m))
                .collect::<Vec<_>>()
        });

        let units = self.non_empty_list("unit", obj.get("unit")).map(|items| {
            items
                .iter()
                .enumerate()
                .filter_map(|(i, u)| self.unit(&index("unit", i), u))
                .collect::<Vec<_>>()
        });

        let data = self.non_empty_list("data", obj.get("data")).map(|items| {
            items
                .iter()
                .enumerate()
                .filter_map(|(i, d)| self.data(&index("data", i), d))
                .collect::<Vec<_>>()
        });

        if let Some(data) = &data {
            let mut physical = data.iter().enumerate().filter(|(_, d)| d.physical.is_some());
            match physical.next() {
                None if !data.is_empty() => {
                    self.error("data", "no data entry supplies a physical network")
                }
                _ => {}
            }
            for (i, _) in physical {
                self.error(
                    key(&index("data", i), "physical"),
                    "only one physical network is allowed per document; the first one wins",
                );
            }
        }

        let relation = obj.get("relation").and_then(|r| self.relation("relation", r));
        let query = obj.get("query").and_then(|q| self.query("query", q));

        Some(VisualizationSpec {
            maps: maps?,
            units: units?,
            data: data?,
            relation,
            query,
        })
    }

    fn map(&mut self, path: &str, v: &Value) -> Option<MapConfig> {
        let obj = self.object(path, v)?;
        self.unknown_fields(path, obj, &["streetColor", "streetWidth", "background"]);
        let mut m = MapConfig::default();
        if let Some(c) = obj.get("streetColor") {
            m.street_color = self.color(&key(path, "streetColor"), c);
        }
        if let Some(w) = obj.get("streetWidth") {
            m.street_width =
                self.number_where(&key(path, "streetWidth"), w, |x| x > 0.0, "streetWidth > 0");
        }
        if let Some(b) = obj.get("background") {
            m.background =
                self.token(&key(path, "background"), b, Background::from_token, Background::TOKENS);
        }
        Some(m)
    }

    fn unit(&mut self, path: &str, v: &Value) -> Option<UnitSpec> {
        let obj = self.object(path, v)?;
        self.unknown_fields(
            path,
            obj,
            &[
                "type", "density", "method", "opacity", "color", "dash", "squiggle", "width",
                "height", "chart", "rows", "columns", "orientation", "alignment", "zoom",
                "relation",
            ],
        );

        let unit_type = match obj.get("type") {
            Some(t) => self.token(&key(path, "type"), t, UnitType::from_token, UnitType::TOKENS),
            None => {
                self.error(key(path, "type"), "required; expected one of: segment, node, point");
                None
            }
        };
        let method = match obj.get("method") {
            Some(m) => self.token(&key(path, "method"), m, Method::from_token, Method::TOKENS),
            None => Some(Method::Line),
        };
        let (unit_type, method) = (unit_type?, method?);
        let mut unit = UnitSpec::new(unit_type, method);

        if let Some(d) = obj.get("density") {
            let p = key(path, "density");
            if unit_type != UnitType::Segment {
                self.error(&p, "density is only allowed when type is \"segment\"");
            } else {
                unit.density = self.binding(&p, d, Channel::Density);
            }
        }
        for (name, channel) in [
            ("opacity", Channel::Opacity),
            ("dash", Channel::Dash),
            ("squiggle", Channel::Squiggle),
            ("width", Channel::Width),
            ("height", Channel::Height),
        ] {
            if let Some(b) = obj.get(name) {
                let binding = self.binding(&key(path, name), b, channel);
                match channel {
                    Channel::Opacity => unit.opacity = binding,
                    Channel::Dash => unit.dash = binding,
                    Channel::Squiggle => unit.squiggle = binding,
                    Channel::Width => unit.width = binding,
                    Channel::Height => unit.height = binding,
                    _ => unreachable!(),
                }
            }
        }
        if let Some(r) = obj.get("rows") {
            unit.rows = self.integer(&key(path, "rows"), r, 1, 64).map(|n| n as u32);
        }
        if let Some(c) = obj.get("columns") {
            unit.columns = self.integer(&key(path, "columns"), c, 1, 64).map(|n| n as u32);
        }
        if method != Method::Matrix {
            for name in ["rows", "columns"] {
                if obj.contains_key(name) {
                    self.warn(key(path, name), "only used when method is \"matrix\"");
                }
            }
        }
        if let Some(c) = obj.get("color") {
            let p = key(path, "color");
            unit.color = match c {
                Value::Array(items) => {
                    if method != Method::Matrix {
                        self.error(&p, "a list of color bindings requires method \"matrix\"");
                        None
                    } else if items.is_empty() {
                        self.error(&p, "expected at least one color binding");
                        None
                    } else {
                        let cells = unit.rows() as usize * unit.columns() as usize;
                        if items.len() > cells {
                            self.error(
                                &p,
                                format!(
                                    "matrix overflow: {} color bindings for {cells} cells",
                                    items.len()
                                ),
                            );
                        }
                        let bindings: Vec<_> = items
                            .iter()
                            .enumerate()
                            .filter_map(|(i, b)| self.binding(&index(&p, i), b, Channel::Color))
                            .collect();
                        (bindings.len() == items.len()).then_some(ColorBinding::Cells(bindings))
                    }
                }
                other => self.binding(&p, other, Channel::Color).map(ColorBinding::Single),
            };
        }
        if let Some(c) = obj.get("chart") {
            let p = key(path, "chart");
            if self.object(&p, c).is_some() {
                unit.chart = Some(c.clone());
            }
        }
        if let Some(o) = obj.get("orientation") {
            unit.orientation = self.token(
                &key(path, "orientation"),
                o,
                Orientation::from_token,
                Orientation::TOKENS,
            );
        }
        if let Some(a) = obj.get("alignment") {
            unit.alignment =
                self.token(&key(path, "alignment"), a, Alignment::from_token, Alignment::TOKENS);
        }
        if let Some(z) = obj.get("zoom") {
            unit.zoom = self.zoom(&key(path, "zoom"), z);
        }
        if let Some(r) = obj.get("relation") {
            unit.relation = self.relation(&key(path, "relation"), r);
        }
        Some(unit)
    }

    fn zoom(&mut self, path: &str, v: &Value) -> Option<ZoomRange> {
        let items = match v {
            Value::Array(items) if items.len() == 2 => items,
            _ => {
                self.error(path, "expected [minZoom, maxZoom]");
                return None;
            }
        };
        let max = u64::from(ZoomRange::MAX_LEVEL);
        let lo = self.integer(&index(path, 0), &items[0], 0, max);
        let hi = self.integer(&index(path, 1), &items[1], 0, max);
        let (lo, hi) = (lo?, hi?);
        if lo > hi {
            self.error(path, format!("minZoom ≤ maxZoom violated ({lo} > {hi})"));
            return None;
        }
        Some(ZoomRange { min: lo as u8, max: hi as u8 })
    }

    fn binding(&mut self, path: &str, v: &Value, channel: Channel) -> Option<ChannelBinding> {
        if let Value::Object(obj) = v {
            if obj.contains_key("field") || channel != Channel::Squiggle {
                return self.field_binding(path, obj, channel).map(ChannelBinding::Field);
            }
        }
        let constant = match channel {
            Channel::Density => {
                self.integer(path, v, 1, 10_000).map(|n| Constant::Number(n as f64))
            }
            Channel::Opacity => self
                .number_where(path, v, |x| (0.0..=1.0).contains(&x), "0 ≤ opacity ≤ 1")
                .map(Constant::Number),
            Channel::Width | Channel::Height => self
                .number_where(path, v, |x| x >= 0.0, &format!("{} ≥ 0", channel.as_str()))
                .map(Constant::Number),
            Channel::Color => self.color(path, v).map(Constant::Text),
            Channel::Dash => match v {
                Value::Bool(b) => Some(Constant::Bool(*b)),
                Value::Array(items) if items.len() == 2 => {
                    let on = self.number_where(&index(path, 0), &items[0], |x| x > 0.0, "on > 0");
                    let off =
                        self.number_where(&index(path, 1), &items[1], |x| x > 0.0, "off > 0");
                    Some(Constant::Pattern([on?, off?]))
                }
                _ => {
                    self.error(path, "expected true/false, [on, off] or a field binding");
                    None
                }
            },
            Channel::Squiggle => match v {
                Value::Bool(b) => Some(Constant::Bool(*b)),
                Value::Object(obj) => {
                    self.unknown_fields(path, obj, &["amplitude", "wavelength"]);
                    let amp = obj.get("amplitude").map_or(Some(defaults::SQUIGGLE_AMPLITUDE), |a| {
                        self.number_where(&key(path, "amplitude"), a, |x| x >= 0.0, "amplitude ≥ 0")
                    });
                    let wl = obj.get("wavelength").map_or(Some(defaults::SQUIGGLE_WAVELENGTH), |w| {
                        self.number_where(&key(path, "wavelength"), w, |x| x > 0.0, "wavelength > 0")
                    });
                    Some(Constant::Squiggle { amplitude: amp?, wavelength: wl? })
                }
                _ => {
                    self.error(path, "expected true/false, {amplitude, wavelength} or a field binding");
                    None
                }
            },
        };
        constant.map(ChannelBinding::Constant)
    }

    fn field_binding(
        &mut self,
        path: &str,
        obj: &Map<String, Value>,
        channel: Channel,
    ) -> Option<FieldBinding> {
        let known: &[&str] = if channel == Channel::Color {
            &["field", "range", "base"]
        } else {
            &["field", "range"]
        };
        self.unknown_fields(path, obj, known);
        let field = match obj.get("field") {
            Some(f) => self.string(&key(path, "field"), f).map(str::to_string),
            None => {
                self.error(key(path, "field"), "required in a field binding");
                None
            }
        };
        let mut ok = true;
        let range = match obj.get("range") {
            None => None,
            Some(r) => {
                let p = key(path, "range");
                match r.as_array().map(Vec::as_slice) {
                    Some([lo, hi]) => match (self.number(&index(&p, 0), lo), self.number(&index(&p, 1), hi)) {
                        (Some(lo), Some(hi)) if lo < hi => Some([lo, hi]),
                        (Some(lo), Some(hi)) => {
                            self.error(&p, format!("range requires lo < hi, found [{lo}, {hi}]"));
                            ok = false;
                            None
                        }
                        _ => {
                            ok = false;
                            None
                        }
                    },
                    _ => {
                        self.error(&p, "expected [lo, hi]");
                        ok = false;
                        None
                    }
                }
            }
        };
        if channel == Channel::Color && range.is_some() {
            self.warn(key(path, "range"), "range is ignored for color bindings");
        }
        if channel == Channel::Density {
            if let Some([lo, _]) = range {
                if lo < 1.0 {
                    self.error(key(path, "range"), "density range must start at 1 or above");
                    ok = false;
                }
            }
        }
        let base = match obj.get("base") {
            Some(b) if channel == Channel::Color => {
                let c = self.color(&key(path, "base"), b);
                ok &= c.is_some();
                c
            }
            _ => None,
        };
        let field = field?;
        ok.then_some(FieldBinding { field, range, base })
    }

    fn data(&mut self, path: &str, v: &Value) -> Option<DataSpec> {
        let obj = self.object(path, v)?;
        self.unknown_fields(path, obj, &["physical", "thematic"]);
        let mut d = DataSpec::default();
        if let Some(p) = obj.get("physical") {
            d.physical = self.string(&key(path, "physical"), p).map(str::to_string);
        }
        if let Some(t) = obj.get("thematic") {
            let p = key(path, "thematic");
            d.thematic = match t {
                Value::String(_) => self
                    .string(&p, t)
                    .map(|s| ThematicSource { path: s.to_string(), lat_column: None, lon_column: None }),
                other => {
                    let tobj = self.object(&p, other)?;
                    self.unknown_fields(&p, tobj, &["path", "latColumn", "lonColumn"]);
                    let file = match tobj.get("path") {
                        Some(f) => self.string(&key(&p, "path"), f).map(str::to_string),
                        None => {
                            self.error(key(&p, "path"), "required");
                            None
                        }
                    };
                    let lat = tobj
                        .get("latColumn")
                        .and_then(|c| self.string(&key(&p, "latColumn"), c).map(str::to_string));
                    let lon = tobj
                        .get("lonColumn")
                        .and_then(|c| self.string(&key(&p, "lonColumn"), c).map(str::to_string));
                    file.map(|path| ThematicSource { path, lat_column: lat, lon_column: lon })
                }
            };
        }
        if !obj.contains_key("physical") && !obj.contains_key("thematic") {
            self.error(path, "a data entry needs `physical`, `thematic`, or both");
            return None;
        }
        Some(d)
    }

    fn relation(&mut self, path: &str, v: &Value) -> Option<RelationSpec> {
        let obj = self.object(path, v)?;
        self.unknown_fields(path, obj, &["spatial", "value", "aggregation", "type"]);
        let spatial = match obj.get("spatial") {
            Some(s) => self.token(
                &key(path, "spatial"),
                s,
                SpatialRelation::from_token,
                SpatialRelation::TOKENS,
            ),
            None => {
                self.error(key(path, "spatial"), "required; expected one of: buffer, nn, contains");
                None
            }
        };
        let (agg_key, agg_value) = match (obj.get("aggregation"), obj.get("type")) {
            (Some(a), _) => ("aggregation", Some(a)),
            (None, Some(t)) => ("type", Some(t)),
            (None, None) => ("aggregation", None),
        };
        let aggregation = match agg_value {
            Some(a) => {
                self.token(&key(path, agg_key), a, Aggregation::from_token, Aggregation::TOKENS)
            }
            None => {
                self.error(key(path, "aggregation"), "required; expected one of: sum, mean, min, max");
                None
            }
        };
        let value = match obj.get("value") {
            Some(val) => {
                let p = key(path, "value");
                match spatial {
                    Some(SpatialRelation::Nn) => {
                        self.integer(&p, val, 1, u32::MAX as u64).map(|k| k as f64)
                    }
                    _ => self.number_where(&p, val, |x| x > 0.0, "value > 0"),
                }
            }
            None => {
                self.error(key(path, "value"), "required");
                None
            }
        };
        Some(RelationSpec { spatial: spatial?, value: value?, aggregation: aggregation? })
    }

    fn query(&mut self, path: &str, v: &Value) -> Option<QuerySpec> {
        let obj = self.object(path, v)?;
        self.unknown_fields(path, obj, &["address", "radius"]);
        let address = obj
            .get("address")
            .and_then(|a| self.string(&key(path, "address"), a).map(str::to_string));
        let radius = obj
            .get("radius")
            .and_then(|r| self.number_where(&key(path, "radius"), r, |x| x > 0.0, "radius > 0"));
        if obj.contains_key("radius") && !obj.contains_key("address") {
            self.error(key(path, "radius"), "radius requires an address");
            return None;
        }
        Some(QuerySpec { address, radius })
    }
}
