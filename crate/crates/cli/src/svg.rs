//! Minimal hand-written SVG plots.
//!
//! Only two-dimensional data is drawn; callers receive `None` (and report a
//! note) otherwise. Coordinates are printed with fixed precision so plots
//! are byte-stable.

use std::fmt::Write;

use irrtoric::linalg::AffineFrame;
use irrtoric::{PointConfig, Subdivision, Vector};

const SIZE: f64 = 400.0;
const MARGIN: f64 = 30.0;

/// Maps data coordinates into the drawing area, preserving aspect ratio.
struct Viewport {
    lo: [f64; 2],
    scale: [f64; 2],
}

impl Viewport {
    fn fit(points: &[[f64; 2]], keep_aspect: bool) -> Self {
        let mut lo = [f64::INFINITY; 2];
        let mut hi = [f64::NEG_INFINITY; 2];
        for p in points {
            for k in 0..2 {
                lo[k] = lo[k].min(p[k]);
                hi[k] = hi[k].max(p[k]);
            }
        }
        let span = |k: usize| (hi[k] - lo[k]).max(1e-12);
        let inner = SIZE - 2.0 * MARGIN;
        let mut scale = [inner / span(0), inner / span(1)];
        if keep_aspect {
            let s = scale[0].min(scale[1]);
            scale = [s, s];
        }
        Self { lo, scale }
    }

    fn map(&self, p: [f64; 2]) -> (f64, f64) {
        (
            MARGIN + (p[0] - self.lo[0]) * self.scale[0],
            SIZE - MARGIN - (p[1] - self.lo[1]) * self.scale[1],
        )
    }
}

fn header(title: &str) -> String {
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{SIZE}\" height=\"{SIZE}\" viewBox=\"0 0 {SIZE} {SIZE}\">\n\
         <title>{}</title>\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n",
        escape(title)
    )
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

fn line(out: &mut String, a: (f64, f64), b: (f64, f64), style: &str) {
    let _ = writeln!(
        out,
        "<line x1=\"{:.3}\" y1=\"{:.3}\" x2=\"{:.3}\" y2=\"{:.3}\" {style}/>",
        a.0, a.1, b.0, b.1
    );
}

fn dot(out: &mut String, p: (f64, f64), label: Option<&str>) {
    let _ = writeln!(
        out,
        "<circle cx=\"{:.3}\" cy=\"{:.3}\" r=\"3\" fill=\"black\"/>",
        p.0, p.1
    );
    if let Some(l) = label {
        let _ = writeln!(
            out,
            "<text x=\"{:.3}\" y=\"{:.3}\" font-size=\"12\" font-family=\"sans-serif\">{}</text>",
            p.0 + 5.0,
            p.1 - 5.0,
            escape(l)
        );
    }
}

fn planar(frame: &AffineFrame, p: &Vector) -> [f64; 2] {
    let c = frame.coords(p);
    [
        c.get(0).copied().unwrap_or(0.0),
        c.get(1).copied().unwrap_or(0.0),
    ]
}

/// The subdivision drawn on `conv(A)`: every one-dimensional face as a
/// segment and every point with its label. `None` unless `dim A = 2`.
pub fn subdivision(a: &PointConfig, s: &Subdivision) -> Option<String> {
    if a.dim() != 2 {
        return None;
    }
    let frame = a.frame();
    let pts: Vec<[f64; 2]> = a.points().iter().map(|p| planar(frame, p)).collect();
    let view = Viewport::fit(&pts, true);
    let mut out = header("regular subdivision");
    for face in s.faces() {
        if let Some((i, j)) = edge(&pts, face) {
            line(
                &mut out,
                view.map(pts[i]),
                view.map(pts[j]),
                "stroke=\"black\" stroke-width=\"1.5\"",
            );
        }
    }
    let used = s.participating();
    for (i, p) in pts.iter().enumerate() {
        let q = view.map(*p);
        dot(&mut out, q, Some(&a.labels()[i]));
        if !used.contains(&i) {
            let _ = writeln!(
                out,
                "<circle cx=\"{:.3}\" cy=\"{:.3}\" r=\"6\" fill=\"none\" stroke=\"gray\"/>",
                q.0, q.1
            );
        }
    }
    out.push_str("</svg>\n");
    Some(out)
}

/// Endpoints of a face whose points are collinear (and not all equal).
fn edge(pts: &[[f64; 2]], face: &[usize]) -> Option<(usize, usize)> {
    if face.len() < 2 {
        return None;
    }
    let (mut i, mut j, mut best) = (face[0], face[0], 0.0);
    for &p in face {
        for &q in face {
            let d = (pts[p][0] - pts[q][0]).hypot(pts[p][1] - pts[q][1]);
            if d > best {
                (i, j, best) = (p, q, d);
            }
        }
    }
    let (dx, dy) = (pts[j][0] - pts[i][0], pts[j][1] - pts[i][1]);
    let collinear = face.iter().all(|&k| {
        ((pts[k][0] - pts[i][0]) * dy - (pts[k][1] - pts[i][1]) * dx).abs() <= 1e-9 * best * best
    });
    (best > 0.0 && collinear).then_some((i, j))
}

/// Scatter of GKZ vectors in the first two coordinates of their affine
/// span (the span of the secondary polytope), labelled by index.
pub fn gkz_scatter(vertices: &[Vector], eps: f64) -> Option<String> {
    let first = vertices.first()?;
    let frame = AffineFrame::of_points(vertices, first.len(), eps);
    let pts: Vec<[f64; 2]> = vertices.iter().map(|v| planar(&frame, v)).collect();
    let view = Viewport::fit(&pts, true);
    let title = match frame.dim() {
        0..=2 => "secondary polytope".to_string(),
        d => format!("secondary polytope (dimension {d}, first two coordinates)"),
    };
    let mut out = header(&title);
    for (i, p) in pts.iter().enumerate() {
        dot(&mut out, view.map(*p), Some(&i.to_string()));
    }
    out.push_str("</svg>\n");
    Some(out)
}

/// Distance curve on a log scale with the threshold as a dashed line.
pub fn distance_curve(schedule: &[f64], distances: &[f64], threshold: f64) -> String {
    let log = |d: f64| d.max(1e-300).log10();
    let mut pts: Vec<[f64; 2]> = schedule
        .iter()
        .zip(distances)
        .map(|(&s, &d)| [s, log(d)])
        .collect();
    let t = log(threshold);
    let mut bounds = pts.clone();
    if let (Some(f), Some(l)) = (pts.first(), pts.last()) {
        bounds.push([f[0], t]);
        bounds.push([l[0], t]);
    }
    let view = Viewport::fit(&bounds, false);
    let mut out = header("Hausdorff distance (log10) against the schedule");
    if let (Some(f), Some(l)) = (bounds.first(), pts.last()) {
        line(
            &mut out,
            view.map([f[0], t]),
            view.map([l[0], t]),
            "stroke=\"red\" stroke-dasharray=\"4 3\"",
        );
    }
    let path: Vec<String> = pts
        .drain(..)
        .map(|p| {
            let (x, y) = view.map(p);
            format!("{x:.3},{y:.3}")
        })
        .collect();
    let _ = writeln!(
        out,
        "<polyline points=\"{}\" fill=\"none\" stroke=\"black\" stroke-width=\"1.5\"/>",
        path.join(" ")
    );
    out.push_str("</svg>\n");
    out
}
