use std::fmt::Write;

use lhsphere::rays::{RayPath, Vec2};

use crate::output::Meta;

const PIXELS: f64 = 600.0;

/// Sphere outline, source marker and one polyline per ray, y axis up.
pub fn render(paths: &[RayPath], source: Vec2, meta: &Meta) -> String {
    let mut lo = Vec2::new(-1.0, -1.0);
    let mut hi = Vec2::new(1.0, 1.0);
    for p in paths
        .iter()
        .flat_map(|p| p.points.iter())
        .chain(std::iter::once(&source))
    {
        lo = Vec2::new(lo.x.min(p.x), lo.y.min(p.y));
        hi = Vec2::new(hi.x.max(p.x), hi.y.max(p.y));
    }
    let pad = 0.05 * (hi.x - lo.x).max(hi.y - lo.y);
    let (x0, y0) = (lo.x - pad, lo.y - pad);
    let (w, h) = (hi.x - lo.x + 2.0 * pad, hi.y - lo.y + 2.0 * pad);
    let scale = PIXELS / w.max(h);
    let stroke = 1.0 / scale;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{:.0}" height="{:.0}" viewBox="{x0:.6} {:.6} {w:.6} {h:.6}">"#,
        w * scale,
        h * scale,
        -(y0 + h),
    );
    s.push_str("<desc>\n");
    for (k, v) in meta.entries() {
        let _ = writeln!(s, "{k} = {}", escape(v));
    }
    s.push_str("</desc>\n");
    s.push_str(r#"<g transform="scale(1,-1)">"#);
    s.push('\n');
    let _ = writeln!(
        s,
        r##"<circle cx="0" cy="0" r="1" fill="#eef3fb" stroke="#333" stroke-width="{:.6}"/>"##,
        2.0 * stroke
    );
    for path in paths {
        let mut d = String::new();
        for (i, p) in path.points.iter().enumerate() {
            let _ = write!(d, "{}{:.6},{:.6}", if i == 0 { "M" } else { " L" }, p.x, p.y);
        }
        let _ = writeln!(
            s,
            r##"<path d="{d}" fill="none" stroke="#c0392b" stroke-opacity="0.7" stroke-width="{stroke:.6}"/>"##
        );
    }
    let _ = writeln!(
        s,
        r##"<circle cx="{:.6}" cy="{:.6}" r="{:.6}" fill="#000"/>"##,
        source.x,
        source.y,
        3.0 * stroke
    );
    s.push_str("</g>\n</svg>\n");
    s
}

fn escape(v: &str) -> String {
    v.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
