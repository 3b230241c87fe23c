//! Default values for every optional grammar property.

use super::*;

pub const STREET_COLOR: &str = "#888888";
pub const STREET_WIDTH: f64 = 1.5;
pub const OPACITY: f64 = 1.0;
pub const DENSITY: f64 = 1.0;
pub const COLOR: &str = "#2c7bb6";
pub const RAMP_BASE: &str = "#2166ac";
pub const WIDTH_PX: f64 = 3.0;
pub const HEIGHT_PX: f64 = 12.0;
pub const LAT_COLUMN: &str = "latitude";
pub const LON_COLUMN: &str = "longitude";
pub const QUERY_RADIUS_M: f64 = 250.0;
pub const SQUIGGLE_AMPLITUDE: f64 = 3.0;
pub const SQUIGGLE_WAVELENGTH: f64 = 12.0;
pub const DASH_PATTERN: [f64; 2] = [6.0, 4.0];

pub const DEFAULT_RELATION: RelationSpec = RelationSpec {
    spatial: SpatialRelation::Buffer,
    value: 10.0,
    aggregation: Aggregation::Mean,
};

/// Default output ranges for field bindings, per channel.
pub fn output_range(channel: Channel) -> OutputRange {
    match channel {
        Channel::Density => [1.0, 10.0],
        Channel::Width => [1.0, 12.0],
        Channel::Height => [4.0, 40.0],
        Channel::Opacity => [0.2, 1.0],
        Channel::Dash => [2.0, 12.0],
        Channel::Squiggle => [0.0, 6.0],
        // Ramp position.
        Channel::Color => [0.0, 1.0],
    }
}

/// Constant used for a channel when nothing is bound or data is missing.
pub fn constant(channel: Channel) -> Constant {
    match channel {
        Channel::Density => Constant::Number(DENSITY),
        Channel::Opacity => Constant::Number(OPACITY),
        Channel::Color => Constant::Text(COLOR.to_string()),
        Channel::Dash | Channel::Squiggle => Constant::Bool(false),
        Channel::Width => Constant::Number(WIDTH_PX),
        Channel::Height => Constant::Number(HEIGHT_PX),
    }
}

/// Table of the defaults, as `(property, value)` pairs, for documentation
/// and the `validate` command.
pub fn defaults() -> Vec<(&'static str, String)> {
    vec![
        ("map.background", "light".into()),
        ("map.streetColor", STREET_COLOR.into()),
        ("map.streetWidth", STREET_WIDTH.to_string()),
        ("unit.method", "line".into()),
        ("unit.opacity", OPACITY.to_string()),
        ("unit.orientation", "parallel".into()),
        ("unit.alignment", "center".into()),
        ("unit.density", "1".into()),
        ("unit.zoom", "[0, 22]".into()),
        ("unit.color", COLOR.into()),
        ("unit.width", WIDTH_PX.to_string()),
        ("unit.height", HEIGHT_PX.to_string()),
        ("unit.rows", "1".into()),
        ("unit.columns", "1".into()),
        ("data.thematic.latColumn", LAT_COLUMN.into()),
        ("data.thematic.lonColumn", LON_COLUMN.into()),
        ("relation", "buffer 10 m, mean".into()),
        ("query.radius", QUERY_RADIUS_M.to_string()),
    ]
}

/// Fill every unset optional property. Explicit values are never touched,
/// so the operation is idempotent.
pub fn apply_defaults(mut spec: VisualizationSpec) -> VisualizationSpec {
    for map in &mut spec.maps {
        map.street_color.get_or_insert_with(|| STREET_COLOR.to_string());
        map.street_width.get_or_insert(STREET_WIDTH);
        map.background.get_or_insert(Background::Light);
    }
    for unit in &mut spec.units {
        if unit.unit_type == UnitType::Segment {
            unit.density.get_or_insert_with(|| ChannelBinding::Constant(constant(Channel::Density)));
        }
        for channel in [
            Channel::Opacity,
            Channel::Dash,
            Channel::Squiggle,
            Channel::Width,
            Channel::Height,
        ] {
            let slot = match channel {
                Channel::Opacity => &mut unit.opacity,
                Channel::Dash => &mut unit.dash,
                Channel::Squiggle => &mut unit.squiggle,
                Channel::Width => &mut unit.width,
                Channel::Height => &mut unit.height,
                _ => unreachable!(),
            };
            slot.get_or_insert_with(|| ChannelBinding::Constant(constant(channel)));
        }
        unit.color
            .get_or_insert_with(|| ColorBinding::Single(ChannelBinding::Constant(constant(Channel::Color))));
        unit.rows.get_or_insert(1);
        unit.columns.get_or_insert(1);
        unit.orientation.get_or_insert(Orientation::Parallel);
        unit.alignment.get_or_insert(Alignment::Center);
        unit.zoom.get_or_insert(ZoomRange::FULL);
    }
    for data in &mut spec.data {
        if let Some(t) = &mut data.thematic {
            t.lat_column.get_or_insert_with(|| LAT_COLUMN.to_string());
            t.lon_column.get_or_insert_with(|| LON_COLUMN.to_string());
        }
    }
    spec.relation.get_or_insert(DEFAULT_RELATION);
    if let Some(q) = &mut spec.query {
        if q.address.is_some() {
            q.radius.get_or_insert(QUERY_RADIUS_M);
        }
    }
    spec
}
