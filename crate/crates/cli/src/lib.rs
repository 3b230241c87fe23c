//! Command-line and HTTP front ends for the StreetWeave engine.

pub mod cli;
pub mod config;
pub mod geocoder;
pub mod service;

use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use streetweave::geocode::parse_literal;
use streetweave::pipeline::{load_datasets, prepare, render_prepared, DataOverrides, RenderOptions};
use streetweave::render::{emit_plan, emit_svg, Viewport, NOMINAL_ZOOM};
use streetweave::{Error, Result};

use crate::geocoder::Geocoder;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Plan,
    Svg,
}

/// Everything besides the document text that shapes a render.
#[derive(Debug, Clone)]
pub struct RenderSettings {
    pub format: OutputFormat,
    pub zoom: u8,
    pub nominal_zoom: u8,
    pub viewport: Viewport,
    pub base_dir: PathBuf,
    pub overrides: DataOverrides,
}

impl Default for RenderSettings {
    fn default() -> Self {
        RenderSettings {
            format: OutputFormat::Plan,
            zoom: NOMINAL_ZOOM,
            nominal_zoom: NOMINAL_ZOOM,
            viewport: Viewport::default(),
            base_dir: PathBuf::from("."),
            overrides: DataOverrides::default(),
        }
    }
}

/// Render spec text to plan JSON or SVG.
///
/// A non-literal query address is looked up with `geocoder`; if that fails
/// the render continues without a query region and carries a warning.
pub async fn render_document(text: &str, settings: &RenderSettings, geocoder: &Geocoder) -> Result<String> {
    let prepared = prepare(text)?;
    let address = prepared.spec.query.as_ref().and_then(|q| q.address.clone());
    let query_center = match address {
        Some(a) if parse_literal(&a).is_none() && geocoder.remote_enabled() => {
            geocoder.geocode(&a).await.ok().map(|r| r.center)
        }
        _ => None,
    };
    let options = RenderOptions {
        zoom: settings.zoom,
        nominal_zoom: settings.nominal_zoom,
        base_dir: settings.base_dir.clone(),
        overrides: settings.overrides.clone(),
        query_center,
    };
    let format = settings.format;
    let viewport = settings.viewport;
    tokio::task::spawn_blocking(move || {
        let data = load_datasets(&prepared.spec, &options)?;
        let plan = render_prepared(&prepared, &data, &options)?;
        match format {
            OutputFormat::Plan => Ok(emit_plan(&plan)),
            OutputFormat::Svg => emit_svg(&plan, viewport),
        }
    })
    .await
    .map_err(|e| Error::Geocode(format!("render task failed: {e}")))?
}
