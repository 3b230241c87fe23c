use std::fmt::Write;

use crate::error::{Error, Result};
use crate::geo::{GeoPoint, PlanarPoint, Projection};

use super::{Primitive, PrimitiveKind, RenderPlan};

/// Output size in pixels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Viewport {
    pub width: f64,
    pub height: f64,
}

impl Default for Viewport {
    fn default() -> Self {
        Viewport { width: 800.0, height: 800.0 }
    }
}

const PADDING_PX: f64 = 8.0;

struct Screen {
    proj: Projection,
    scale: f64,
    center: PlanarPoint,
    half: (f64, f64),
    px_scale: f64,
}

impl Screen {
    fn new(plan: &RenderPlan, vp: Viewport) -> Self {
        let [x0, y0, x1, y1] = plan.bbox;
        let proj = Projection::new(GeoPoint { lat: (y0 + y1) / 2.0, lon: (x0 + x1) / 2.0 });
        let lo = proj.project(GeoPoint { lat: y0, lon: x0 });
        let hi = proj.project(GeoPoint { lat: y1, lon: x1 });
        let (w, h) = (hi.x - lo.x, hi.y - lo.y);
        let avail = ((vp.width - 2.0 * PADDING_PX).max(1.0), (vp.height - 2.0 * PADDING_PX).max(1.0));
        let scale = match (w > 0.0, h > 0.0) {
            (true, true) => (avail.0 / w).min(avail.1 / h),
            (true, false) => avail.0 / w,
            (false, true) => avail.1 / h,
            (false, false) => 1.0,
        };
        Screen {
            proj,
            scale,
            center: (lo + hi) * 0.5,
            half: (vp.width / 2.0, vp.height / 2.0),
            px_scale: plan.meta.meters_per_pixel * scale,
        }
    }

    fn xy(&self, [lon, lat]: [f64; 2]) -> (f64, f64) {
        let q = self.proj.project(GeoPoint { lat, lon }) - self.center;
        (self.half.0 + q.x * self.scale, self.half.1 - q.y * self.scale)
    }

    fn meters(&self, m: f64) -> f64 {
        m * self.scale
    }

    /// Plan pixels to screen pixels.
    fn px(&self, px: f64) -> f64 {
        px * self.px_scale
    }
}

fn num(v: f64) -> String {
    let s = format!("{v:.2}");
    if s == "-0.00" {
        "0.00".into()
    } else {
        s
    }
}

fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            _ => out.push(c),
        }
    }
    out
}

fn points_attr(screen: &Screen, geometry: &[[f64; 2]]) -> String {
    geometry
        .iter()
        .map(|&c| {
            let (x, y) = screen.xy(c);
            format!("{},{}", num(x), num(y))
        })
        .collect::<Vec<_>>()
        .join(" ")
}

fn stroke_attrs(screen: &Screen, p: &Primitive) -> String {
    let s = &p.style;
    let mut a = format!(
        "fill=\"none\" stroke=\"{}\" stroke-opacity=\"{}\" stroke-width=\"{}\" stroke-linecap=\"butt\"",
        s.color.to_rgb_hex(),
        num(s.opacity * s.color.alpha()),
        num(screen.px(s.width_px)),
    );
    if let Some([on, off]) = s.dash {
        let _ = write!(a, " stroke-dasharray=\"{} {}\"", num(screen.px(on)), num(screen.px(off)));
    }
    a
}

fn fill_attrs(p: &Primitive) -> String {
    let s = &p.style;
    format!("fill=\"{}\" fill-opacity=\"{}\"", s.color.to_rgb_hex(), num(s.opacity * s.color.alpha()))
}

fn primitive(out: &mut String, screen: &Screen, p: &Primitive) {
    let id = escape(&p.source_id);
    match p.kind {
        PrimitiveKind::Polyline => {
            let _ = writeln!(
                out,
                "<polyline data-source=\"{id}\" points=\"{}\" {}/>",
                points_attr(screen, &p.geometry),
                stroke_attrs(screen, p)
            );
        }
        PrimitiveKind::Path => {
            let d = p
                .geometry
                .iter()
                .enumerate()
                .map(|(i, &c)| {
                    let (x, y) = screen.xy(c);
                    format!("{}{} {}", if i == 0 { "M" } else { "L" }, num(x), num(y))
                })
                .collect::<Vec<_>>()
                .join(" ");
            let _ = writeln!(out, "<path data-source=\"{id}\" d=\"{d}\" {}/>", stroke_attrs(screen, p));
        }
        PrimitiveKind::Circle => {
            let (cx, cy) = screen.xy(p.geometry[0]);
            let r = screen.meters(p.extent.map_or(0.0, |e| e[0] / 2.0));
            let _ = writeln!(
                out,
                "<circle data-source=\"{id}\" cx=\"{}\" cy=\"{}\" r=\"{}\" {}/>",
                num(cx),
                num(cy),
                num(r),
                fill_attrs(p)
            );
        }
        PrimitiveKind::Rect | PrimitiveKind::ChartAnchor => {
            let (cx, cy) = screen.xy(p.geometry[0]);
            let [along, across] = p.extent.unwrap_or([0.0, 0.0]);
            let (w, h) = (screen.meters(along), screen.meters(across));
            let geom = format!(
                "x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\"",
                num(cx - w / 2.0),
                num(cy - h / 2.0),
                num(w),
                num(h)
            );
            if let Some(chart) = &p.chart {
                let spec = serde_json::to_string(&chart.embedded_spec).unwrap_or_default();
                let values = serde_json::to_string(&chart.injected_data).unwrap_or_default();
                let _ = writeln!(
                    out,
                    "<rect class=\"chart-anchor\" data-source=\"{id}\" {geom} fill=\"none\" stroke=\"#999999\" \
                     stroke-dasharray=\"2 2\" data-orientation=\"{}\" data-alignment=\"{}\" data-values=\"{}\" data-spec=\"{}\"/>",
                    num(chart.orientation_deg),
                    escape(&chart.alignment),
                    escape(&values),
                    escape(&spec)
                );
            } else {
                let angle = p.rotation_deg.unwrap_or(90.0) - 90.0;
                let _ = writeln!(
                    out,
                    "<rect data-source=\"{id}\" {geom} transform=\"rotate({} {} {})\" {}/>",
                    num(angle),
                    num(cx),
                    num(cy),
                    fill_attrs(p)
                );
            }
        }
    }
}

/// Standalone SVG for a plan: background, base streets, then one group per
/// visible layer.
pub fn emit_svg(plan: &RenderPlan, viewport: Viewport) -> Result<String> {
    if !(viewport.width > 0.0 && viewport.height > 0.0) {
        return Err(Error::Viewport);
    }
    let plan = plan.quantized();
    let screen = Screen::new(&plan, viewport);
    let mut out = String::new();
    let (w, h) = (num(viewport.width), num(viewport.height));
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">"
    );
    let bg = if plan.base.background == "dark" { "#1b1b1b" } else { "#ffffff" };
    let _ = writeln!(out, "<rect x=\"0\" y=\"0\" width=\"{w}\" height=\"{h}\" fill=\"{bg}\"/>");

    let _ = writeln!(
        out,
        "<g id=\"base\" fill=\"none\" stroke=\"{}\" stroke-opacity=\"{}\" stroke-width=\"{}\" stroke-linecap=\"round\">",
        plan.base.street_color.to_rgb_hex(),
        num(plan.base.street_color.alpha()),
        num(screen.px(plan.base.street_width))
    );
    for s in &plan.base.streets {
        let _ = writeln!(out, "<polyline data-source=\"{}\" points=\"{}\"/>", escape(&s.id), points_attr(&screen, &s.geometry));
    }
    out.push_str("</g>\n");

    let layers: Vec<usize> = if plan.meta.layers.is_empty() {
        let mut v: Vec<usize> = plan.primitives.iter().map(|p| p.layer_index).collect();
        v.dedup();
        v
    } else {
        plan.meta.layers.iter().filter(|l| l.visible).map(|l| l.layer_index).collect()
    };
    for layer in layers {
        let _ = writeln!(out, "<g id=\"layer-{layer}\" data-layer=\"{layer}\">");
        for p in plan.layer(layer) {
            primitive(&mut out, &screen, p);
        }
        out.push_str("</g>\n");
    }
    out.push_str("</svg>\n");
    Ok(out)
}
