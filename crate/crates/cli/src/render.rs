use std::fmt::Write;

use explograph_core::gluing::Mark;
use explograph_core::rational::to_f64;
use explograph_core::tropcurve::{edge_multiplicity, TropicalCurve};

use crate::fail::{CliResult, Failure, EXIT_NON_PLANAR};

const SIZE: u32 = 640;

fn num(x: f64) -> String {
    let s = format!("{x:.3}");
    if s == "-0.000" {
        "0.000".into()
    } else {
        s
    }
}

fn inf_norm(d: &[i64]) -> f64 {
    d.iter().map(|x| x.unsigned_abs()).max().unwrap_or(0) as f64
}

/// Plane curve as a standalone SVG. The viewport is the vertex bounding box
/// padded by the longest end as drawn.
pub fn svg(curve: &TropicalCurve, marks: &[Mark], title: &str) -> CliResult<String> {
    if curve.dim() != 2 {
        return Err(Failure::new(EXIT_NON_PLANAR, format!("cannot render a curve in dimension {}", curve.dim())));
    }
    curve.validate()?;
    let pts: Vec<(f64, f64)> = curve.vertices.iter().map(|v| (to_f64(&v.pos[0]), -to_f64(&v.pos[1]))).collect();
    let xmin = pts.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
    let xmax = pts.iter().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max);
    let ymin = pts.iter().map(|p| p.1).fold(f64::INFINITY, f64::min);
    let ymax = pts.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max);
    let span = (xmax - xmin).max(ymax - ymin).max(1.0);
    let unit = span / 4.0;
    let reach = unit * curve.ends.iter().map(|e| inf_norm(&e.d)).fold(1.0, f64::max);
    let pad = reach + unit / 4.0;
    let (vx, vy) = (xmin - pad, ymin - pad);
    let (vw, vh) = (xmax - xmin + 2.0 * pad, ymax - ymin + 2.0 * pad);
    let stroke = vw.max(vh) / 250.0;
    let font = vw.max(vh) / 40.0;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" viewBox="{} {} {} {}">"#,
        num(vx),
        num(vy),
        num(vw),
        num(vh)
    );
    let _ = writeln!(s, "<title>{title}</title>");
    let _ = writeln!(
        s,
        r#"<g stroke="black" stroke-width="{}" stroke-linecap="round" font-family="sans-serif" font-size="{}">"#,
        num(stroke),
        num(font)
    );
    let label = |s: &mut String, x: f64, y: f64, m: u64| {
        if m > 1 {
            let _ = writeln!(s, r#"<text class="weight" x="{}" y="{}" stroke="none">{m}</text>"#, num(x), num(y));
        }
    };
    for e in &curve.edges {
        let (a, b) = (pts[e.v[0]], pts[e.v[1]]);
        let _ = writeln!(
            s,
            r#"<line class="edge" x1="{}" y1="{}" x2="{}" y2="{}"/>"#,
            num(a.0),
            num(a.1),
            num(b.0),
            num(b.1)
        );
        label(&mut s, (a.0 + b.0) / 2.0, (a.1 + b.1) / 2.0, edge_multiplicity(&e.d));
    }
    for e in &curve.ends {
        let a = pts[e.v];
        let b = (a.0 + unit * e.d[0] as f64, a.1 - unit * e.d[1] as f64);
        let _ = writeln!(
            s,
            r#"<line class="end" x1="{}" y1="{}" x2="{}" y2="{}"/>"#,
            num(a.0),
            num(a.1),
            num(b.0),
            num(b.1)
        );
        label(&mut s, (a.0 + b.0) / 2.0, (a.1 + b.1) / 2.0, edge_multiplicity(&e.d));
    }
    for p in &pts {
        let _ = writeln!(s, r#"<circle class="vertex" cx="{}" cy="{}" r="{}"/>"#, num(p.0), num(p.1), num(2.0 * stroke));
    }
    for m in marks {
        let _ = writeln!(
            s,
            r#"<circle class="mark" cx="{}" cy="{}" r="{}" fill="none" stroke="red"/>"#,
            num(to_f64(&m.point[0])),
            num(-to_f64(&m.point[1])),
            num(4.0 * stroke)
        );
    }
    s.push_str("</g>\n</svg>\n");
    Ok(s)
}
