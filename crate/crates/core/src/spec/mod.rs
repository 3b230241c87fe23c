//! Grammar document model.
//!
//! A [`VisualizationSpec`] is produced by [`parse_spec`] from JSON text. All
//! optional properties stay `None` until [`apply_defaults`] fills them, after
//! which the accessor methods on each type return concrete values.

mod bind;
pub mod defaults;
mod diagnostic;
mod parse;
mod serialize;

pub use bind::{bind_units, UnitBinding};
pub use defaults::apply_defaults;
pub use diagnostic::{has_errors, Diagnostic, Severity};
pub use parse::{parse_spec, parse_value, Parsed};

use serde_json::Value;

/// Map background style.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Background {
    Light,
    Dark,
}

/// Spatial granularity of a unit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum UnitType {
    Segment,
    Node,
    Point,
}

/// Graphical mark used by a unit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Line,
    Rect,
    Matrix,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Orientation {
    Parallel,
    Perpendicular,
}

/// Side of the street a mark sits on, relative to vertex order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Alignment {
    Left,
    Center,
    Right,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpatialRelation {
    Buffer,
    Nn,
    Contains,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Aggregation {
    Sum,
    Mean,
    Min,
    Max,
}

macro_rules! tokens {
    ($ty:ty { $($variant:ident => $tok:literal),+ $(,)? }) => {
        impl $ty {
            /// Every token accepted by the grammar for this property.
            pub const TOKENS: &'static [&'static str] = &[$($tok),+];

            pub fn as_str(self) -> &'static str {
                match self {
                    $(Self::$variant => $tok),+
                }
            }

            pub fn from_token(token: &str) -> Option<Self> {
                match token {
                    $($tok => Some(Self::$variant),)+
                    _ => None,
                }
            }
        }
    };
}

tokens!(Background { Light => "light", Dark => "dark" });
tokens!(UnitType { Segment => "segment", Node => "node", Point => "point" });
tokens!(Method { Line => "line", Rect => "rect", Matrix => "matrix" });
tokens!(Orientation { Parallel => "parallel", Perpendicular => "perpendicular" });
tokens!(Alignment { Left => "left", Center => "center", Right => "right" });
tokens!(SpatialRelation { Buffer => "buffer", Nn => "nn", Contains => "contains" });
tokens!(Aggregation { Sum => "sum", Mean => "mean", Min => "min", Max => "max" });

/// Parsed grammar document: `(map+, unit+, data+, relation?, query?)`.
#[derive(Debug, Clone, PartialEq)]
pub struct VisualizationSpec {
    pub maps: Vec<MapConfig>,
    pub units: Vec<UnitSpec>,
    pub data: Vec<DataSpec>,
    pub relation: Option<RelationSpec>,
    pub query: Option<QuerySpec>,
}

impl VisualizationSpec {
    /// The map entry that is honored; extra entries are ignored.
    pub fn map(&self) -> &MapConfig {
        &self.maps[0]
    }

    /// Relation applied to `unit`: its own override, else the global one,
    /// else the default.
    pub fn relation_for(&self, unit: &UnitSpec) -> RelationSpec {
        unit.relation
            .or(self.relation)
            .unwrap_or(defaults::DEFAULT_RELATION)
    }

    /// Index of the data entry that supplies the street network.
    pub fn physical_index(&self) -> Option<usize> {
        self.data.iter().position(|d| d.physical.is_some())
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct MapConfig {
    pub street_color: Option<String>,
    pub street_width: Option<f64>,
    pub background: Option<Background>,
}

impl MapConfig {
    pub fn street_color(&self) -> &str {
        self.street_color.as_deref().unwrap_or(defaults::STREET_COLOR)
    }

    pub fn street_width(&self) -> f64 {
        self.street_width.unwrap_or(defaults::STREET_WIDTH)
    }

    pub fn background(&self) -> Background {
        self.background.unwrap_or(Background::Light)
    }
}

/// Output range attached to a field binding.
pub type OutputRange = [f64; 2];

/// A channel value: either fixed or driven by a thematic column.
#[derive(Debug, Clone, PartialEq)]
pub enum ChannelBinding {
    Constant(Constant),
    Field(FieldBinding),
}

impl ChannelBinding {
    pub fn field(&self) -> Option<&FieldBinding> {
        match self {
            ChannelBinding::Field(f) => Some(f),
            ChannelBinding::Constant(_) => None,
        }
    }

    pub fn constant(&self) -> Option<&Constant> {
        match self {
            ChannelBinding::Constant(c) => Some(c),
            ChannelBinding::Field(_) => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Constant {
    Number(f64),
    Text(String),
    Bool(bool),
    /// Dash on/off lengths in pixels.
    Pattern([f64; 2]),
    Squiggle { amplitude: f64, wavelength: f64 },
}

impl Constant {
    pub fn as_number(&self) -> Option<f64> {
        match self {
            Constant::Number(n) => Some(*n),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FieldBinding {
    pub field: String,
    pub range: Option<OutputRange>,
    /// Base hue for color ramps; ignored by other channels.
    pub base: Option<String>,
}

impl FieldBinding {
    pub fn new(field: impl Into<String>) -> Self {
        FieldBinding { field: field.into(), range: None, base: None }
    }

    pub fn with_range(mut self, lo: f64, hi: f64) -> Self {
        self.range = Some([lo, hi]);
        self
    }
}

/// Color channel. Matrix units may bind a list, one entry per cell.
#[derive(Debug, Clone, PartialEq)]
pub enum ColorBinding {
    Single(ChannelBinding),
    Cells(Vec<ChannelBinding>),
}

impl ColorBinding {
    pub fn bindings(&self) -> &[ChannelBinding] {
        match self {
            ColorBinding::Single(b) => std::slice::from_ref(b),
            ColorBinding::Cells(v) => v,
        }
    }
}

/// Named visual channels of a unit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Channel {
    Density,
    Opacity,
    Color,
    Dash,
    Squiggle,
    Width,
    Height,
}

impl Channel {
    pub fn as_str(self) -> &'static str {
        match self {
            Channel::Density => "density",
            Channel::Opacity => "opacity",
            Channel::Color => "color",
            Channel::Dash => "dash",
            Channel::Squiggle => "squiggle",
            Channel::Width => "width",
            Channel::Height => "height",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ZoomRange {
    pub min: u8,
    pub max: u8,
}

impl ZoomRange {
    pub const MAX_LEVEL: u8 = 22;
    pub const FULL: ZoomRange = ZoomRange { min: 0, max: Self::MAX_LEVEL };

    pub fn contains(&self, zoom: u8) -> bool {
        self.min <= zoom && zoom <= self.max
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct UnitSpec {
    pub unit_type: UnitType,
    pub method: Method,
    pub density: Option<ChannelBinding>,
    pub opacity: Option<ChannelBinding>,
    pub color: Option<ColorBinding>,
    pub dash: Option<ChannelBinding>,
    pub squiggle: Option<ChannelBinding>,
    pub width: Option<ChannelBinding>,
    pub height: Option<ChannelBinding>,
    /// Embedded chart document, kept opaque.
    pub chart: Option<Value>,
    pub rows: Option<u32>,
    pub columns: Option<u32>,
    pub orientation: Option<Orientation>,
    pub alignment: Option<Alignment>,
    pub zoom: Option<ZoomRange>,
    /// Per-unit relation override (grammar extension).
    pub relation: Option<RelationSpec>,
}

impl UnitSpec {
    pub fn new(unit_type: UnitType, method: Method) -> Self {
        UnitSpec {
            unit_type,
            method,
            density: None,
            opacity: None,
            color: None,
            dash: None,
            squiggle: None,
            width: None,
            height: None,
            chart: None,
            rows: None,
            columns: None,
            orientation: None,
            alignment: None,
            zoom: None,
            relation: None,
        }
    }

    pub fn orientation(&self) -> Orientation {
        self.orientation.unwrap_or(Orientation::Parallel)
    }

    pub fn alignment(&self) -> Alignment {
        self.alignment.unwrap_or(Alignment::Center)
    }

    pub fn zoom(&self) -> ZoomRange {
        self.zoom.unwrap_or(ZoomRange::FULL)
    }

    pub fn rows(&self) -> u32 {
        self.rows.unwrap_or(1)
    }

    pub fn columns(&self) -> u32 {
        self.columns.unwrap_or(1)
    }

    pub fn binding(&self, channel: Channel) -> Option<&ChannelBinding> {
        match channel {
            Channel::Density => self.density.as_ref(),
            Channel::Opacity => self.opacity.as_ref(),
            Channel::Color => match &self.color {
                Some(ColorBinding::Single(b)) => Some(b),
                _ => None,
            },
            Channel::Dash => self.dash.as_ref(),
            Channel::Squiggle => self.squiggle.as_ref(),
            Channel::Width => self.width.as_ref(),
            Channel::Height => self.height.as_ref(),
        }
    }

    /// Every field binding with the channel it drives, in a fixed order.
    pub fn field_bindings(&self) -> Vec<(Channel, &FieldBinding)> {
        let mut out = Vec::new();
        let singles = [
            (Channel::Density, &self.density),
            (Channel::Opacity, &self.opacity),
            (Channel::Dash, &self.dash),
            (Channel::Squiggle, &self.squiggle),
            (Channel::Width, &self.width),
            (Channel::Height, &self.height),
        ];
        for (ch, b) in singles {
            if let Some(ChannelBinding::Field(f)) = b {
                out.push((ch, f));
            }
        }
        if let Some(color) = &self.color {
            for b in color.bindings() {
                if let ChannelBinding::Field(f) = b {
                    out.push((Channel::Color, f));
                }
            }
        }
        out
    }

    pub fn uses_fields(&self) -> bool {
        !self.field_bindings().is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct DataSpec {
    pub physical: Option<String>,
    pub thematic: Option<ThematicSource>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ThematicSource {
    pub path: String,
    pub lat_column: Option<String>,
    pub lon_column: Option<String>,
}

impl ThematicSource {
    pub fn lat_column(&self) -> &str {
        self.lat_column.as_deref().unwrap_or(defaults::LAT_COLUMN)
    }

    pub fn lon_column(&self) -> &str {
        self.lon_column.as_deref().unwrap_or(defaults::LON_COLUMN)
    }
}

/// How thematic points bind to elements.
///
/// `value` is a radius in meters for `buffer`, a point count for `nn`, and a
/// corridor half-width in meters for `contains`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RelationSpec {
    pub spatial: SpatialRelation,
    pub value: f64,
    pub aggregation: Aggregation,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct QuerySpec {
    pub address: Option<String>,
    pub radius: Option<f64>,
}
