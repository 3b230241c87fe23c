//! Literal, cached and remote address lookup.

use std::path::PathBuf;
use std::time::Duration;

use serde::Deserialize;
use sha2::{Digest, Sha256};
use streetweave::geo::GeoPoint;
use streetweave::geocode::{normalize_query, parse_literal, GeocodeResult, Provider};
use tokio::sync::Mutex;

#[derive(Debug, Clone, PartialEq)]
pub enum GeocodeError {
    EmptyQuery,
    /// Non-literal query and no remote geocoder configured.
    RemoteDisabled(String),
    NotFound(String),
    Unavailable(String),
}

impl std::fmt::Display for GeocodeError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            GeocodeError::EmptyQuery => write!(f, "empty query"),
            GeocodeError::RemoteDisabled(q) => write!(
                f,
                "remote geocoding is disabled; give the address as \"lat,lon\" or set STREETWEAVE_GEOCODER_URL (query {q:?})"
            ),
            GeocodeError::NotFound(q) => write!(f, "no match for {q:?}"),
            GeocodeError::Unavailable(why) => write!(f, "geocoder unavailable: {why}"),
        }
    }
}

impl std::error::Error for GeocodeError {}

#[derive(Deserialize)]
struct Hit {
    lat: Coord,
    lon: Coord,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum Coord {
    Text(String),
    Number(f64),
}

impl Coord {
    fn value(&self) -> Option<f64> {
        match self {
            Coord::Text(s) => s.trim().parse().ok(),
            Coord::Number(n) => Some(*n),
        }
    }
}

/// Geocoder with an on-disk cache keyed by the normalized query.
pub struct Geocoder {
    base_url: Option<String>,
    cache_dir: PathBuf,
    client: reqwest::Client,
    write_lock: Mutex<()>,
}

impl Geocoder {
    pub fn new(base_url: Option<String>, cache_dir: PathBuf) -> Self {
        let client = reqwest::Client::builder()
            .timeout(Duration::from_secs(10))
            .user_agent(concat!("streetweave/", env!("CARGO_PKG_VERSION")))
            .build()
            .expect("http client");
        Geocoder { base_url, cache_dir, client, write_lock: Mutex::new(()) }
    }

    pub fn remote_enabled(&self) -> bool {
        self.base_url.is_some()
    }

    fn cache_path(&self, query: &str) -> PathBuf {
        let key = hex::encode(Sha256::digest(normalize_query(query).as_bytes()));
        self.cache_dir.join(format!("{key}.json"))
    }

    async fn cached(&self, query: &str) -> Option<GeoPoint> {
        let text = tokio::fs::read_to_string(self.cache_path(query)).await.ok()?;
        serde_json::from_str(&text).ok()
    }

    async fn store(&self, query: &str, center: GeoPoint) {
        let _guard = self.write_lock.lock().await;
        let path = self.cache_path(query);
        if tokio::fs::create_dir_all(&self.cache_dir).await.is_err() {
            return;
        }
        let tmp = path.with_extension("tmp");
        let body = serde_json::to_string(&center).expect("point serializes");
        if tokio::fs::write(&tmp, body).await.is_ok() {
            let _ = tokio::fs::rename(&tmp, &path).await;
        }
    }

    async fn remote(&self, base: &str, query: &str) -> Result<GeoPoint, GeocodeError> {
        let url = format!("{}/search", base.trim_end_matches('/'));
        let resp = self
            .client
            .get(url)
            .query(&[("q", query), ("format", "json"), ("limit", "1")])
            .send()
            .await
            .map_err(|e| GeocodeError::Unavailable(e.to_string()))?;
        if !resp.status().is_success() {
            return Err(GeocodeError::Unavailable(format!("status {}", resp.status())));
        }
        let hits: Vec<Hit> = resp.json().await.map_err(|e| GeocodeError::Unavailable(e.to_string()))?;
        let hit = hits.first().ok_or_else(|| GeocodeError::NotFound(query.to_string()))?;
        match (hit.lat.value(), hit.lon.value()) {
            (Some(lat), Some(lon)) => {
                GeoPoint::new(lat, lon).map_err(|e| GeocodeError::Unavailable(e.to_string()))
            }
            _ => Err(GeocodeError::Unavailable("malformed response".into())),
        }
    }

    pub async fn geocode(&self, query: &str) -> Result<GeocodeResult, GeocodeError> {
        let q = query.trim();
        if q.is_empty() {
            return Err(GeocodeError::EmptyQuery);
        }
        let result = |center, provider| GeocodeResult { query: q.to_string(), center, provider };
        if let Some(center) = parse_literal(q) {
            return Ok(result(center, Provider::Literal));
        }
        let Some(base) = &self.base_url else {
            return Err(GeocodeError::RemoteDisabled(q.to_string()));
        };
        if let Some(center) = self.cached(q).await {
            return Ok(result(center, Provider::Cache));
        }
        let center = self.remote(base, q).await?;
        self.store(q, center).await;
        Ok(result(center, Provider::Remote))
    }
}
