//! Static SVG figures: the record graph and the normalised cylinder.

use std::fmt::Write;

use crate::certified::{CertifiedScalar, Comparison};
use crate::cylinder::PipelineWitness;
use crate::geometry::{project, LineFrame, GeometryError};

const W: f64 = 640.0;
const H: f64 = 480.0;
const PAD: f64 = 56.0;

struct Frame {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
}

impl Frame {
    fn fit(pts: impl Iterator<Item = (f64, f64)>) -> Frame {
        let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
        for (x, y) in pts.filter(|(x, y)| x.is_finite() && y.is_finite()) {
            x0 = x0.min(x);
            x1 = x1.max(x);
            y0 = y0.min(y);
            y1 = y1.max(y);
        }
        if !x0.is_finite() {
            return Frame { x0: 0.0, x1: 1.0, y0: 0.0, y1: 1.0 };
        }
        let grow = |a: f64, b: f64| {
            let m = ((b - a) * 0.05).max(1e-9);
            (a - m, b + m)
        };
        let (x0, x1) = grow(x0, x1);
        let (y0, y1) = grow(y0, y1);
        Frame { x0, x1, y0, y1 }
    }

    fn px(&self, x: f64) -> f64 {
        PAD + (x - self.x0) / (self.x1 - self.x0) * (W - 2.0 * PAD)
    }

    fn py(&self, y: f64) -> f64 {
        H - PAD - (y - self.y0) / (self.y1 - self.y0) * (H - 2.0 * PAD)
    }

    fn clip_y(&self, y: f64) -> f64 {
        y.clamp(self.y0, self.y1)
    }
}

fn header(out: &mut String, title: &str) {
    let _ = writeln!(out, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(out, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(out, r#"<text x="{}" y="24" text-anchor="middle" font-size="14">{}</text>"#, W / 2.0, escape(title));
}

fn axes(out: &mut String, f: &Frame, xlabel: &str, ylabel: &str) {
    let (l, r, b, t) = (PAD, W - PAD, H - PAD, PAD);
    let _ = writeln!(out, r#"<path d="M{l} {t} L{l} {b} L{r} {b}" fill="none" stroke="black"/>"#);
    for i in 0..=4 {
        let x = f.x0 + (f.x1 - f.x0) * i as f64 / 4.0;
        let y = f.y0 + (f.y1 - f.y0) * i as f64 / 4.0;
        let _ = writeln!(out, r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{}</text>"#, f.px(x), b + 16.0, tick(x));
        let _ = writeln!(out, r#"<text x="{:.1}" y="{:.1}" text-anchor="end">{}</text>"#, l - 6.0, f.py(y) + 4.0, tick(y));
    }
    let _ = writeln!(out, r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#, W / 2.0, H - 12.0, escape(xlabel));
    let _ = writeln!(
        out,
        r#"<text x="14" y="{}" text-anchor="middle" transform="rotate(-90 14 {})">{}</text>"#,
        H / 2.0,
        H / 2.0,
        escape(ylabel)
    );
}

fn tick(v: f64) -> String {
    if v.abs() >= 1e4 || (v != 0.0 && v.abs() < 1e-3) {
        format!("{v:.2e}")
    } else {
        format!("{v:.3}")
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Records as points `(log t_k, -log err_k)` joined by a polyline.
pub fn records_svg(points: &[(f64, f64)], title: &str) -> String {
    let f = Frame::fit(points.iter().copied());
    let mut out = String::new();
    header(&mut out, title);
    axes(&mut out, &f, "log t", "-log err");
    let path: Vec<String> = points.iter().map(|&(x, y)| format!("{:.2},{:.2}", f.px(x), f.py(y))).collect();
    let _ = writeln!(out, r##"<polyline points="{}" fill="none" stroke="#3060a0"/>"##, path.join(" "));
    for &(x, y) in points {
        let _ = writeln!(out, r##"<circle cx="{:.2}" cy="{:.2}" r="3" fill="#3060a0"/>"##, f.px(x), f.py(y));
    }
    out.push_str("</svg>\n");
    out
}

/// The cylinder in coordinates `X = (ℓ⊥ part)/t`, `Y = h(v)·(ℓ part)`.
/// There it is the box `|X| < 1`, `Y ∈ [lo, hi]`, and the hyperplanes
/// `<v,x> = 0, 1` become `Y = -sX` and `Y = 1 - sX` with `s = r(v) t`.
#[derive(Clone, Debug)]
pub struct CylinderFigure {
    pub s: f64,
    pub lo: f64,
    pub hi: f64,
    /// Unit direction of `v` in figure coordinates.
    pub v_dir: (f64, f64),
    pub title: String,
}

impl CylinderFigure {
    pub fn from_witness(frame: &LineFrame, w: &PipelineWitness, precision: u32) -> Result<CylinderFigure, GeometryError> {
        let p = project(frame, &w.v, precision)?;
        let (r, h, t) = (p.r.approx_f64(), p.h.approx_f64(), w.t.approx_f64());
        let f = |s: &CertifiedScalar| s.approx_f64();
        let (vx, vy) = (r / t, h * h);
        let n = vx.hypot(vy).max(f64::MIN_POSITIVE);
        let verdict = match w.cylinder.hypothesis {
            Comparison::Greater => format!("{:?}", w.lemma.verdict),
            _ => "hypothesis fails".to_string(),
        };
        Ok(CylinderFigure {
            s: r * t,
            lo: h * f(&w.cylinder.h_floor),
            hi: h * f(&w.cylinder.h_ceil),
            v_dir: (vx / n, vy / n),
            title: format!("record {} ({}): t = {:.4}, {}", w.index, w.case_tag, t, verdict),
        })
    }

    pub fn to_svg(&self) -> String {
        let (x0, x1) = (-1.25, 1.25);
        let ys = [-self.s * 1.25, 1.0 + self.s * 1.25, self.lo, self.hi, 0.0];
        let f = Frame::fit(ys.iter().flat_map(|&y| [(x0, y), (x1, y)]));
        let mut out = String::new();
        header(&mut out, &self.title);
        axes(&mut out, &f, "ℓ⊥ component / t", "h(v) · ℓ component");
        let (bx0, bx1) = (f.px(-1.0), f.px(1.0));
        let (by0, by1) = (f.py(f.clip_y(self.hi)), f.py(f.clip_y(self.lo)));
        let _ = writeln!(
            out,
            r##"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="#f0c040" fill-opacity="0.45" stroke="#a07000"/>"##,
            bx0,
            by0.min(by1),
            bx1 - bx0,
            (by1 - by0).abs()
        );
        for (c, label) in [(0.0, "<v,x> = 0"), (1.0, "<v,x> = 1")] {
            let (ya, yb) = (f.clip_y(c + self.s * 1.25), f.clip_y(c - self.s * 1.25));
            let _ = writeln!(
                out,
                r##"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="#a03030"/>"##,
                f.px(-1.25),
                f.py(ya),
                f.px(1.25),
                f.py(yb)
            );
            let _ = writeln!(out, r##"<text x="{:.2}" y="{:.2}" fill="#a03030">{}</text>"##, f.px(0.6), f.py(c) - 6.0, escape(label));
        }
        let scale = 0.35 * (f.y1 - f.y0);
        let (ox, oy) = (0.0, f.clip_y(0.0));
        let (tx, ty) = (self.v_dir.0 * scale, oy + self.v_dir.1 * scale);
        let _ = writeln!(
            out,
            r##"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="#206020" stroke-width="2"/>"##,
            f.px(ox),
            f.py(oy),
            f.px(ox + tx),
            f.py(f.clip_y(ty))
        );
        let _ = writeln!(out, r##"<text x="{:.2}" y="{:.2}" fill="#206020">v</text>"##, f.px(ox + tx) + 6.0, f.py(f.clip_y(ty)));
        out.push_str("</svg>\n");
        out
    }
}
