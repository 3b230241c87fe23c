use std::fmt;

use csscolorparser::Color;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// 8-bit RGBA color, serialized as `#rrggbbaa`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Rgba(pub [u8; 4]);

impl Rgba {
    /// Parse any CSS color string.
    pub fn parse(s: &str) -> Option<Rgba> {
        csscolorparser::parse(s).ok().map(|c| Rgba(c.to_rgba8()))
    }

    pub fn to_hex(self) -> String {
        let [r, g, b, a] = self.0;
        format!("#{r:02x}{g:02x}{b:02x}{a:02x}")
    }

    /// `#rrggbb` without alpha, for SVG attributes.
    pub fn to_rgb_hex(self) -> String {
        let [r, g, b, _] = self.0;
        format!("#{r:02x}{g:02x}{b:02x}")
    }

    pub fn alpha(self) -> f64 {
        self.0[3] as f64 / 255.0
    }

    fn color(self) -> Color {
        let [r, g, b, a] = self.0;
        Color::from_rgba8(r, g, b, a)
    }
}

impl fmt::Display for Rgba {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_hex())
    }
}

impl Serialize for Rgba {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_hex())
    }
}

impl<'de> Deserialize<'de> for Rgba {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Rgba, D::Error> {
        let s = String::deserialize(d)?;
        Rgba::parse(&s).ok_or_else(|| serde::de::Error::custom(format!("invalid color {s:?}")))
    }
}

/// Two-stop light→dark ramp of `base`, interpolated in OKLab.
///
/// `t = 0` is a pale tint, `t = 1` a shade darker than the base.
pub fn ramp(base: Rgba, t: f64) -> Rgba {
    let base = base.color();
    let white = Color::new(1.0, 1.0, 1.0, base.a);
    let black = Color::new(0.0, 0.0, 0.0, base.a);
    let light = white.interpolate_oklab(&base, 0.15);
    let dark = base.interpolate_oklab(&black, 0.35);
    Rgba(light.interpolate_oklab(&dark, t.clamp(0.0, 1.0) as f32).clamp().to_rgba8())
}
