//! Minimal SVG figures: a scatter with an optional closed boundary, and a
//! log-log decay curve. Coordinates are printed with fixed precision so the
//! output is stable across runs.

use std::fmt::Write;

use crate::hull::Point2;

const W: f64 = 480.0;
const H: f64 = 480.0;
const PAD: f64 = 40.0;

struct Frame {
    lo: Point2,
    hi: Point2,
}

impl Frame {
    fn fit<'a>(pts: impl Iterator<Item = &'a Point2>) -> Frame {
        let mut lo = [f64::INFINITY; 2];
        let mut hi = [f64::NEG_INFINITY; 2];
        for p in pts {
            if p[0].is_finite() && p[1].is_finite() {
                for k in 0..2 {
                    lo[k] = lo[k].min(p[k]);
                    hi[k] = hi[k].max(p[k]);
                }
            }
        }
        if !lo[0].is_finite() {
            lo = [0.0, 0.0];
            hi = [1.0, 1.0];
        }
        for k in 0..2 {
            let span = hi[k] - lo[k];
            let pad = if span > 0.0 {
                0.05 * span
            } else {
                0.5 * (1.0 + lo[k].abs())
            };
            lo[k] -= pad;
            hi[k] += pad;
        }
        Frame { lo, hi }
    }

    fn map(&self, p: Point2) -> Point2 {
        [
            PAD + (p[0] - self.lo[0]) / (self.hi[0] - self.lo[0]) * (W - 2.0 * PAD),
            H - PAD - (p[1] - self.lo[1]) / (self.hi[1] - self.lo[1]) * (H - 2.0 * PAD),
        ]
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

fn header(out: &mut String, title: &str, frame: &Frame, labels: [&str; 2]) {
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">"#
    );
    let _ = writeln!(out, "<title>{}</title>", escape(title));
    let _ = writeln!(
        out,
        r#"<rect x="0" y="0" width="{W}" height="{H}" fill="white"/>"#
    );
    let _ = writeln!(
        out,
        r#"<rect x="{PAD}" y="{PAD}" width="{}" height="{}" fill="none" stroke="black"/>"#,
        W - 2.0 * PAD,
        H - 2.0 * PAD
    );
    let _ = writeln!(
        out,
        r#"<text x="{}" y="{}" font-size="11" text-anchor="middle">{} [{:.4}, {:.4}]</text>"#,
        W / 2.0,
        H - 12.0,
        escape(labels[0]),
        frame.lo[0],
        frame.hi[0]
    );
    let _ = writeln!(
        out,
        r#"<text x="12" y="{}" font-size="11" text-anchor="middle" transform="rotate(-90 12 {})">{} [{:.4}, {:.4}]</text>"#,
        H / 2.0,
        H / 2.0,
        escape(labels[1]),
        frame.lo[1],
        frame.hi[1]
    );
}

fn polyline(points: &[Point2], frame: &Frame) -> String {
    points
        .iter()
        .filter(|p| p[0].is_finite() && p[1].is_finite())
        .map(|p| {
            let q = frame.map(*p);
            format!("{:.3},{:.3}", q[0], q[1])
        })
        .collect::<Vec<_>>()
        .join(" ")
}

/// Scatter of `points` with `boundary` drawn as a closed polygon.
pub fn scatter_svg(title: &str, points: &[Point2], boundary: Option<&[Point2]>) -> String {
    let frame = Frame::fit(points.iter().chain(boundary.unwrap_or(&[]).iter()));
    let mut out = String::new();
    header(&mut out, title, &frame, ["z1", "z2"]);
    out.push_str("<g id=\"scatter\" fill=\"steelblue\" fill-opacity=\"0.5\">\n");
    for p in points
        .iter()
        .filter(|p| p[0].is_finite() && p[1].is_finite())
    {
        let q = frame.map(*p);
        let _ = writeln!(
            out,
            r#"<circle cx="{:.3}" cy="{:.3}" r="1.5"/>"#,
            q[0], q[1]
        );
    }
    out.push_str("</g>\n");
    if let Some(b) = boundary {
        let _ = writeln!(
            out,
            r#"<g id="boundary"><polygon points="{}" fill="none" stroke="crimson" stroke-width="1.2"/></g>"#,
            polyline(b, &frame)
        );
    }
    out.push_str("</svg>\n");
    out
}

/// Log-log plot of `(x, y)` pairs with an optional reference curve.
pub fn decay_svg(title: &str, series: &[Point2], reference: Option<&[Point2]>) -> String {
    let logged = |s: &[Point2]| -> Vec<Point2> {
        s.iter()
            .filter(|p| p[0] > 0.0 && p[1] > 0.0)
            .map(|p| [p[0].log10(), p[1].log10()])
            .collect()
    };
    let main = logged(series);
    let refc = reference.map(logged).unwrap_or_default();
    let frame = Frame::fit(main.iter().chain(refc.iter()));
    let mut out = String::new();
    header(&mut out, title, &frame, ["log10 N", "log10 residual"]);
    if !refc.is_empty() {
        let _ = writeln!(
            out,
            r#"<g id="reference"><polyline points="{}" fill="none" stroke="gray" stroke-dasharray="4 3"/></g>"#,
            polyline(&refc, &frame)
        );
    }
    let _ = writeln!(
        out,
        r#"<g id="decay"><polyline points="{}" fill="none" stroke="crimson" stroke-width="1.5"/>"#,
        polyline(&main, &frame)
    );
    for p in &main {
        let q = frame.map(*p);
        let _ = writeln!(
            out,
            r#"<circle cx="{:.3}" cy="{:.3}" r="3" fill="crimson"/>"#,
            q[0], q[1]
        );
    }
    out.push_str("</g>\n</svg>\n");
    out
}
