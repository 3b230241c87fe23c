use std::path::PathBuf;

use streetweave::render::NOMINAL_ZOOM;

pub const DEFAULT_PORT: u16 = 8080;
pub const DEFAULT_CACHE_DIR: &str = ".streetweave-cache";

/// Runtime settings, read from the environment and overridable by flags.
#[derive(Debug, Clone, PartialEq)]
pub struct Config {
    /// Base URL of a Nominatim-compatible geocoder; `None` disables remote
    /// lookups.
    pub geocoder_url: Option<String>,
    pub port: u16,
    pub cache_dir: PathBuf,
    pub nominal_zoom: u8,
    /// Directory that spec data paths are resolved against by the service.
    pub data_dir: PathBuf,
    pub static_dir: Option<PathBuf>,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            geocoder_url: None,
            port: DEFAULT_PORT,
            cache_dir: PathBuf::from(DEFAULT_CACHE_DIR),
            nominal_zoom: NOMINAL_ZOOM,
            data_dir: PathBuf::from("."),
            static_dir: None,
        }
    }
}

impl Config {
    /// Defaults overlaid with `STREETWEAVE_*` variables from `lookup`.
    pub fn from_lookup(lookup: impl Fn(&str) -> Option<String>) -> Result<Self, String> {
        let mut c = Config::default();
        if let Some(url) = lookup("STREETWEAVE_GEOCODER_URL").filter(|s| !s.trim().is_empty()) {
            c.geocoder_url = Some(url);
        }
        if let Some(p) = lookup("STREETWEAVE_PORT") {
            c.port = p.trim().parse().map_err(|_| format!("STREETWEAVE_PORT: invalid port {p:?}"))?;
        }
        if let Some(d) = lookup("STREETWEAVE_CACHE_DIR") {
            c.cache_dir = PathBuf::from(d);
        }
        if let Some(z) = lookup("STREETWEAVE_NOMINAL_ZOOM") {
            c.nominal_zoom = z
                .trim()
                .parse()
                .ok()
                .filter(|z| *z <= 22)
                .ok_or_else(|| format!("STREETWEAVE_NOMINAL_ZOOM: expected 0..=22, got {z:?}"))?;
        }
        Ok(c)
    }

    pub fn from_env() -> Result<Self, String> {
        Self::from_lookup(|k| std::env::var(k).ok())
    }
}
