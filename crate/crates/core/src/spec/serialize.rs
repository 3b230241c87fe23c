//! Writing a [`VisualizationSpec`] back out as a grammar document.

use serde_json::{json, Map, Value};

use super::*;

impl VisualizationSpec {
    /// The document form of this spec. Only properties that are set are
    /// written, so `parse(to_value(s)) == s`.
    pub fn to_value(&self) -> Value {
        let mut doc = Map::new();
        doc.insert("map".into(), Value::Array(self.maps.iter().map(MapConfig::to_value).collect()));
        doc.insert("unit".into(), Value::Array(self.units.iter().map(UnitSpec::to_value).collect()));
        doc.insert("data".into(), Value::Array(self.data.iter().map(DataSpec::to_value).collect()));
        if let Some(r) = &self.relation {
            doc.insert("relation".into(), r.to_value());
        }
        if let Some(q) = &self.query {
            let mut m = Map::new();
            if let Some(a) = &q.address {
                m.insert("address".into(), json!(a));
            }
            if let Some(r) = q.radius {
                m.insert("radius".into(), json!(r));
            }
            doc.insert("query".into(), Value::Object(m));
        }
        Value::Object(doc)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string(&self.to_value()).expect("spec serializes")
    }
}

impl MapConfig {
    fn to_value(&self) -> Value {
        let mut m = Map::new();
        if let Some(c) = &self.street_color {
            m.insert("streetColor".into(), json!(c));
        }
        if let Some(w) = self.street_width {
            m.insert("streetWidth".into(), json!(w));
        }
        if let Some(b) = self.background {
            m.insert("background".into(), json!(b.as_str()));
        }
        Value::Object(m)
    }
}

impl RelationSpec {
    pub fn to_value(&self) -> Value {
        json!({
            "spatial": self.spatial.as_str(),
            "value": self.value,
            "aggregation": self.aggregation.as_str(),
        })
    }
}

impl ChannelBinding {
    pub fn to_value(&self) -> Value {
        match self {
            ChannelBinding::Constant(c) => match c {
                Constant::Number(n) => json!(n),
                Constant::Text(s) => json!(s),
                Constant::Bool(b) => json!(b),
                Constant::Pattern(p) => json!(p),
                Constant::Squiggle { amplitude, wavelength } => {
                    json!({"amplitude": amplitude, "wavelength": wavelength})
                }
            },
            ChannelBinding::Field(f) => {
                let mut m = Map::new();
                m.insert("field".into(), json!(f.field));
                if let Some(r) = f.range {
                    m.insert("range".into(), json!(r));
                }
                if let Some(b) = &f.base {
                    m.insert("base".into(), json!(b));
                }
                Value::Object(m)
            }
        }
    }
}

impl UnitSpec {
    fn to_value(&self) -> Value {
        let mut m = Map::new();
        m.insert("type".into(), json!(self.unit_type.as_str()));
        m.insert("method".into(), json!(self.method.as_str()));
        let channels = [
            ("density", &self.density),
            ("opacity", &self.opacity),
            ("dash", &self.dash),
            ("squiggle", &self.squiggle),
            ("width", &self.width),
            ("height", &self.height),
        ];
        for (name, binding) in channels {
            if let Some(b) = binding {
                m.insert(name.into(), b.to_value());
            }
        }
        match &self.color {
            Some(ColorBinding::Single(b)) => {
                m.insert("color".into(), b.to_value());
            }
            Some(ColorBinding::Cells(v)) => {
                m.insert("color".into(), Value::Array(v.iter().map(ChannelBinding::to_value).collect()));
            }
            None => {}
        }
        if let Some(c) = &self.chart {
            m.insert("chart".into(), c.clone());
        }
        if let Some(r) = self.rows {
            m.insert("rows".into(), json!(r));
        }
        if let Some(c) = self.columns {
            m.insert("columns".into(), json!(c));
        }
        if let Some(o) = self.orientation {
            m.insert("orientation".into(), json!(o.as_str()));
        }
        if let Some(a) = self.alignment {
            m.insert("alignment".into(), json!(a.as_str()));
        }
        if let Some(z) = self.zoom {
            m.insert("zoom".into(), json!([z.min, z.max]));
        }
        if let Some(r) = &self.relation {
            m.insert("relation".into(), r.to_value());
        }
        Value::Object(m)
    }
}

impl DataSpec {
    fn to_value(&self) -> Value {
        let mut m = Map::new();
        if let Some(p) = &self.physical {
            m.insert("physical".into(), json!(p));
        }
        if let Some(t) = &self.thematic {
            let mut tm = Map::new();
            tm.insert("path".into(), json!(t.path));
            if let Some(c) = &t.lat_column {
                tm.insert("latColumn".into(), json!(c));
            }
            if let Some(c) = &t.lon_column {
                tm.insert("lonColumn".into(), json!(c));
            }
            m.insert("thematic".into(), Value::Object(tm));
        }
        Value::Object(m)
    }
}
