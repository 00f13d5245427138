//! OBJ export of polyhedral liftings and SVG drawings of chamber complexes.

use std::fmt::Write;

use crate::arrangement::{signed_area, triangulate, ChamberComplex};
use crate::lifting2d::{DifferentialLifting2D, PolyhedralLifting};
use crate::linalg::Vector;
use crate::tol::Tolerances;

/// The lifted surface over all bounded chambers as ASCII OBJ.
///
/// Chamber polygons are triangulated, placed at height `L(x)` and grouped
/// per chamber. Vertices closer than `eps_geom` are merged. Triangles are
/// wound so that their normals point along `ν = (∇L, -1)`.
pub fn export_obj(pl: &PolyhedralLifting, tol: &Tolerances) -> String {
    let cc = pl.complex();
    let mut verts: Vec<[f64; 3]> = Vec::new();
    let mut index = |p: [f64; 3]| -> usize {
        let near = |q: &[f64; 3]| (0..3).all(|k| (p[k] - q[k]).abs() <= tol.eps_geom);
        match verts.iter().position(near) {
            Some(k) => k + 1,
            None => {
                verts.push(p);
                verts.len()
            }
        }
    };
    let mut groups = Vec::new();
    for ch in cc.chambers().iter().filter(|c| c.bounded) {
        let mut faces = Vec::new();
        for mut tri in triangulate(&ch.boundaries) {
            if signed_area(&tri) > 0.0 {
                tri.swap(1, 2);
            }
            let ids = tri.map(|[x, y]| index([x, y, pl.value_on(ch.id, &Vector::from_column_slice(&[x, y]))]));
            faces.push(ids);
        }
        groups.push((ch.id, faces));
    }
    let mut out = String::from("# polyhedral lifting\n");
    for v in &verts {
        writeln!(out, "v {:.9} {:.9} {:.9}", v[0], v[1], v[2]).unwrap();
    }
    for (id, faces) in groups {
        writeln!(out, "g chamber_{id}").unwrap();
        for [a, b, c] in faces {
            writeln!(out, "f {a} {b} {c}").unwrap();
        }
    }
    out
}

const SIZE: f64 = 600.0;
const MARGIN: f64 = 60.0;

/// SVG drawing of the chamber complex with a boxed label per chamber. When a
/// differential lifting is given, each label carries its 1-form.
pub fn export_svg(cc: &ChamberComplex, dl: Option<&DifferentialLifting2D>) -> String {
    let nodes = cc.nodes();
    let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
    for p in nodes {
        for k in 0..2 {
            lo[k] = lo[k].min(p[k]);
            hi[k] = hi[k].max(p[k]);
        }
    }
    let span = (hi[0] - lo[0]).max(hi[1] - lo[1]).max(1e-12);
    let s = (SIZE - 2.0 * MARGIN) / span;
    let map = |p: [f64; 2]| (MARGIN + (p[0] - lo[0]) * s, SIZE - MARGIN - (p[1] - lo[1]) * s);

    let mut out = String::new();
    writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">"#
    )
    .unwrap();
    writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#).unwrap();
    writeln!(out, r#"<g stroke="black" stroke-width="2">"#).unwrap();
    for &(a, b, e) in cc.segments() {
        let ((x1, y1), (x2, y2)) = (map(nodes[a]), map(nodes[b]));
        writeln!(out, r#"<line x1="{x1:.3}" y1="{y1:.3}" x2="{x2:.3}" y2="{y2:.3}"><title>{e}</title></line>"#).unwrap();
    }
    writeln!(out, "</g>").unwrap();
    writeln!(out, r#"<g fill="black">"#).unwrap();
    for (k, p) in nodes.iter().enumerate() {
        let (x, y) = map(*p);
        writeln!(out, r#"<circle cx="{x:.3}" cy="{y:.3}" r="3"><title>node {k}</title></circle>"#).unwrap();
    }
    writeln!(out, "</g>").unwrap();
    writeln!(out, r#"<g font-family="sans-serif" font-size="13" text-anchor="middle">"#).unwrap();
    for ch in cc.chambers() {
        let (x, y, name) = if ch.bounded {
            let c = cc.interior_point(ch.id);
            let (x, y) = map([c[0], c[1]]);
            (x, y, format!("C{}", ch.id))
        } else {
            (MARGIN, MARGIN / 2.0, "C∞".to_string())
        };
        let text = match dl {
            Some(dl) => format!("{name} ↦ {}", dl.form(ch.id)),
            None => name,
        };
        let w = 8.0 * text.chars().count() as f64 + 10.0;
        writeln!(
            out,
            r#"<rect x="{:.3}" y="{:.3}" width="{w:.3}" height="20" fill="white" stroke="gray"/>"#,
            x - w / 2.0,
            y - 14.0
        )
        .unwrap();
        writeln!(out, r#"<text x="{x:.3}" y="{y:.3}">{}</text>"#, escape(&text)).unwrap();
    }
    writeln!(out, "</g>").unwrap();
    out.push_str("</svg>\n");
    out
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
