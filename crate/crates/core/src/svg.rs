//! SVG rendering of thick-thin decompositions.
//!
//! Vertices are laid out left to right in root-first DFS order, one unit disc each. Child
//! circles are drawn inside the disc of their vertex, ends are shaded, and every neck is an
//! annulus between the child circle it plumbs and the disc of the lower vertex.

use std::fmt::Write as _;
use std::path::Path;

use crate::curve_families::{CircleShape, ThickThinDecomposition};

const UNIT: f64 = 100.0;
const SPACING: f64 = 320.0;
const MARGIN: f64 = 40.0;
/// Smallest drawn radius, so that tiny child circles stay visible.
const MIN_RADIUS: f64 = 1.5;

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// SVG 1.1 document for a decomposition.
pub fn render_svg(d: &ThickThinDecomposition<f64>) -> String {
    let p = d.point();
    let t = p.tree();
    let order = t.dfs_order();
    let mut column = vec![0usize; t.n_vertices()];
    for (i, &v) in order.iter().enumerate() {
        column[v] = i;
    }
    let center = |v: usize| (MARGIN + UNIT + SPACING * column[v] as f64, MARGIN + UNIT + 30.0);
    let width = 2.0 * (MARGIN + UNIT) + SPACING * (t.n_vertices() - 1) as f64;
    let height = 2.0 * (MARGIN + UNIT) + 90.0;

    let mut s = String::new();
    let _ = writeln!(s, r#"<?xml version="1.0" encoding="UTF-8" standalone="no"?>"#);
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width:.0}" height="{height:.0}" viewBox="0 0 {width:.0} {height:.0}">"#
    );
    let _ = writeln!(
        s,
        "<style>.disc{{fill:#f7f7f2;stroke:#222;stroke-width:1.5}} .child{{fill:none;stroke:#1f5fa8;stroke-width:1}} \
         .end{{fill:#bbb;fill-opacity:0.6}} .neck circle{{fill:none;stroke:#a83a1f}} .link{{stroke:#a83a1f;stroke-dasharray:4 3}} \
         text{{font-family:sans-serif;font-size:11px}}</style>"
    );
    let root_end = t.root_edge();
    for &v in &order {
        let (cx, cy) = center(v);
        let _ = writeln!(s, r#"<g id="vertex-{v}" class="vertex">"#);
        if v == t.root_vertex() {
            let _ = writeln!(
                s,
                r#"<circle class="end" data-edge="{root_end}" cx="{cx:.3}" cy="{cy:.3}" r="{:.3}"/>"#,
                UNIT + 12.0
            );
        }
        let _ = writeln!(s, r#"<circle class="disc" cx="{cx:.3}" cy="{cy:.3}" r="{UNIT:.3}"/>"#);
        for c in d.circles.iter().filter(|c| c.vertex == v) {
            if let CircleShape::Disc { center: z, radius } = c.shape {
                let (x, y) = (cx + UNIT * z.re, cy - UNIT * z.im);
                let r = (UNIT * radius).max(MIN_RADIUS);
                let class = if t.is_half(c.edge) { "child end" } else { "child" };
                let _ = writeln!(s, r#"<circle class="{class}" data-edge="{}" cx="{x:.3}" cy="{y:.3}" r="{r:.3}"/>"#, c.edge);
            }
        }
        let _ = writeln!(s, r#"<text x="{:.3}" y="{:.3}">v{v}</text>"#, cx - 8.0, cy + UNIT + 18.0);
        let _ = writeln!(s, "</g>");
    }
    for e in t.full_edges() {
        let (u, v) = (t.negative(e).expect("full"), t.positive(e).expect("full"));
        let k = p.coord(e).expect("child edge");
        let (ux, uy) = center(u);
        let (vx, vy) = center(v);
        let from = (ux + UNIT * k.z.re, uy - UNIT * k.z.im);
        let mid = ((from.0 + vx - UNIT) / 2.0, (from.1 + vy) / 2.0);
        let g = p.gamma(e).expect("full edge");
        let label = escape(&format!("γ = {:.3e} {:+.3e}i", g.re, g.im));
        let _ = writeln!(s, r#"<g id="neck-{e}" class="neck">"#);
        let _ = writeln!(s, r#"<line class="link" x1="{:.3}" y1="{:.3}" x2="{:.3}" y2="{:.3}"/>"#, from.0, from.1, vx - UNIT, vy);
        let _ = writeln!(s, r#"<circle cx="{:.3}" cy="{:.3}" r="18"/>"#, mid.0, mid.1);
        let _ = writeln!(s, r#"<circle cx="{:.3}" cy="{:.3}" r="8"/>"#, mid.0, mid.1);
        let _ = writeln!(s, r#"<text x="{:.3}" y="{:.3}">{label}</text>"#, mid.0 - 40.0, mid.1 - 24.0);
        let _ = writeln!(s, "</g>");
    }
    let _ = writeln!(s, "</svg>");
    s
}

pub fn emit_svg(d: &ThickThinDecomposition<f64>, path: &Path) -> std::io::Result<()> {
    std::fs::write(path, render_svg(d))
}
