//! Grammar-driven street network visualization: parse a specification,
//! join thematic points onto a street network, resolve visual encodings and
//! lay out a deterministic render plan.

pub mod encoding;
pub mod error;
pub mod geo;
pub mod geocode;
pub mod join;
pub mod pipeline;
pub mod render;
pub mod spec;
pub mod synth;

pub use error::{Error, Result};
pub use pipeline::{render, DataOverrides, RenderOptions};
pub use render::{emit_plan, emit_svg, RenderPlan, Viewport};
pub use spec::{parse_spec, Diagnostic, VisualizationSpec};
