//! SVG drawing of a flow diagram. Edges are coloured by the sign of their upward label and
//! annotated with it; absent edges are not drawn.

use std::fmt::Write as _;

use crate::growth::{Cell, Fill, FlowDiagram};

const UNIT: f64 = 24.0;

type Point = (f64, f64);

fn center(c: &Cell) -> Point {
    (UNIT * (4 * c.col + 2 * c.row + 2) as f64, UNIT * (2 * c.row + 2) as f64)
}

fn offset(p: Point, dx: f64, dy: f64) -> Point {
    (p.0 + dx * UNIT, p.1 + dy * UNIT)
}

fn colour(label: i32) -> &'static str {
    if label > 0 {
        "#1f5fbf"
    } else {
        "#bf3f1f"
    }
}

fn edge(s: &mut String, a: Point, b: Point, label: i32, annotate: bool) {
    if label == 0 {
        return;
    }
    let _ = writeln!(
        s,
        r#"<line x1="{:.1}" y1="{:.1}" x2="{:.1}" y2="{:.1}" stroke="{}" stroke-width="{}"/>"#,
        a.0,
        a.1,
        b.0,
        b.1,
        colour(label),
        label.abs()
    );
    if annotate {
        let m = ((a.0 + b.0) / 2.0 + 3.0, (a.1 + b.1) / 2.0 - 3.0);
        let _ = writeln!(s, r#"<text x="{:.1}" y="{:.1}" font-size="10">{label}</text>"#, m.0, m.1);
    }
}

fn arc(s: &mut String, a: Point, via: Point, b: Point, label: i32) {
    if label == 0 {
        return;
    }
    let _ = writeln!(
        s,
        r#"<path d="M {:.1} {:.1} Q {:.1} {:.1} {:.1} {:.1}" fill="none" stroke="{}" stroke-width="{}"/>"#,
        a.0,
        a.1,
        via.0,
        via.1,
        b.0,
        b.1,
        colour(label),
        label.abs()
    );
}

fn draw_cell(s: &mut String, c: &Cell) {
    let o = center(c);
    let (bl, br, tl, tr) = (offset(o, -1.0, 1.0), offset(o, 1.0, 1.0), offset(o, -1.0, -1.0), offset(o, 1.0, -1.0));
    let (sw, se) = c.outputs();
    match c.fill {
        Fill::Letter(l) => {
            let top = offset(o, 0.0, -1.0);
            edge(s, top, o, l.z_label().signum(), false);
            edge(s, o, bl, sw, true);
            edge(s, o, br, se, true);
            let _ = writeln!(s, r#"<text x="{:.1}" y="{:.1}" font-size="12" text-anchor="middle">{l}</text>"#, top.0, top.1 - 4.0);
        }
        Fill::Through { .. } => {
            let m = c.x + c.y;
            if m == 0 {
                arc(s, bl, o, br, sw);
                arc(s, tl, o, tr, c.x);
            } else {
                let (up, low) = (offset(o, 0.0, -0.4), offset(o, 0.0, 0.4));
                edge(s, tl, up, c.x, false);
                edge(s, tr, up, c.y, false);
                edge(s, up, low, m, true);
                edge(s, low, bl, sw, true);
                edge(s, low, br, se, true);
            }
        }
        Fill::Parallel => {
            edge(s, tl, bl, sw, true);
            edge(s, tr, br, se, true);
        }
        Fill::Empty => {}
    }
}

pub fn render(d: &FlowDiagram) -> String {
    let width = UNIT * (4 * d.r.max(1) + 2) as f64;
    let height = UNIT * (2 * d.r.max(1) + 3) as f64;
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0}" height="{height:.0}" viewBox="0 0 {width:.0} {height:.0}">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    for c in d.iter_cells() {
        draw_cell(&mut s, c);
    }
    s.push_str("</svg>\n");
    s
}
