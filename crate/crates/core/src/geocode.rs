//! Address resolution for query regions.
//!
//! Only the offline literal form `lat,lon` is handled here; network
//! geocoders implement [`Geocoder`] elsewhere.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geo::GeoPoint;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Provider {
    Literal,
    Remote,
    Cache,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeocodeResult {
    pub query: String,
    pub center: GeoPoint,
    pub provider: Provider,
}

pub trait Geocoder: Send + Sync {
    fn geocode(&self, query: &str) -> Result<GeocodeResult>;
}

/// Parse `<float>,<float>` as latitude, longitude.
pub fn parse_literal(query: &str) -> Option<GeoPoint> {
    let (a, b) = query.split_once(',')?;
    let lat: f64 = a.trim().parse().ok()?;
    let lon: f64 = b.trim().parse().ok()?;
    GeoPoint::new(lat, lon).ok()
}

/// Whitespace-collapsed, lowercased form used as a cache key.
pub fn normalize_query(query: &str) -> String {
    query.split_whitespace().collect::<Vec<_>>().join(" ").to_lowercase()
}

/// Geocoder that only understands literal coordinates.
#[derive(Debug, Clone, Copy, Default)]
pub struct LiteralGeocoder;

impl Geocoder for LiteralGeocoder {
    fn geocode(&self, query: &str) -> Result<GeocodeResult> {
        if query.trim().is_empty() {
            return Err(Error::Geocode("empty query".into()));
        }
        parse_literal(query)
            .map(|center| GeocodeResult { query: query.to_string(), center, provider: Provider::Literal })
            .ok_or_else(|| {
                Error::Geocode(format!(
                    "no remote geocoder configured; give the address as \"lat,lon\" (got {query:?})"
                ))
            })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn literal() {
        let r = LiteralGeocoder.geocode("41.88,-87.63").unwrap();
        assert_eq!(r.center, GeoPoint { lat: 41.88, lon: -87.63 });
        assert_eq!(r.provider, Provider::Literal);
        assert_eq!(parse_literal(" 41.88 , -87.63 "), Some(GeoPoint { lat: 41.88, lon: -87.63 }));
        assert_eq!(parse_literal("91,0"), None);
        assert_eq!(parse_literal("Union Station, Chicago"), None);
        assert!(LiteralGeocoder.geocode("Union Station").is_err());
    }

    #[test]
    fn normalize() {
        assert_eq!(normalize_query("  Union   Station\tChicago "), "union station chicago");
    }
}
