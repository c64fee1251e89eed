//! Poincaré-disk pictures of tile complexes and envelopes.
//!
//! Edges are drawn as true geodesics: arcs of circles orthogonal to the unit
//! circle, or diameters.

use std::fmt::Write;

use irs_core::coxeter::TriangleGroup;
use irs_core::disk::DiskFrame;
use irs_core::envelope::{Envelope, RaoGroup};
use irs_core::field::Mat3;
use irs_core::polygon::blocks::OCTAGON_WORDS;

use crate::io::ComplexFile;

pub struct DiskSvg {
    size: f64,
    body: String,
}

impl DiskSvg {
    pub fn new(size: f64) -> Self {
        let mut s = DiskSvg { size, body: String::new() };
        let c = size / 2.0;
        let _ = writeln!(
            s.body,
            r#"<circle cx="{c:.1}" cy="{c:.1}" r="{:.1}" fill="white" stroke="black" stroke-width="1"/>"#,
            c - 2.0
        );
        s
    }

    fn radius(&self) -> f64 {
        self.size / 2.0 - 2.0
    }

    fn to_screen(&self, p: [f64; 2]) -> [f64; 2] {
        let c = self.size / 2.0;
        [c + self.radius() * p[0], c - self.radius() * p[1]]
    }

    /// SVG path segment from the current point `p` to `q` along the geodesic.
    fn geodesic_to(&self, p: [f64; 2], q: [f64; 2]) -> String {
        let sq = self.to_screen(q);
        let cross = p[0] * q[1] - p[1] * q[0];
        if cross.abs() < 1e-9 {
            return format!("L {:.3} {:.3} ", sq[0], sq[1]);
        }
        // Centre c of the circle through p and q orthogonal to the unit
        // circle: c·p = (|p|² + 1)/2 and c·q = (|q|² + 1)/2.
        let bp = (p[0] * p[0] + p[1] * p[1] + 1.0) / 2.0;
        let bq = (q[0] * q[0] + q[1] * q[1] + 1.0) / 2.0;
        let det = p[0] * q[1] - p[1] * q[0];
        let c = [(bp * q[1] - bq * p[1]) / det, (p[0] * bq - q[0] * bp) / det];
        let r = (c[0] * c[0] + c[1] * c[1] - 1.0).max(0.0).sqrt() * self.radius();
        let (sp, sc) = (self.to_screen(p), self.to_screen(c));
        let turn = (sp[0] - sc[0]) * (sq[1] - sc[1]) - (sp[1] - sc[1]) * (sq[0] - sc[0]);
        let sweep = u8::from(turn > 0.0);
        format!("A {r:.3} {r:.3} 0 0 {sweep} {:.3} {:.3} ", sq[0], sq[1])
    }

    /// A geodesic polygon.
    pub fn polygon(&mut self, pts: &[[f64; 2]], fill: &str, stroke: &str, width: f64) {
        let s0 = self.to_screen(pts[0]);
        let mut d = format!("M {:.3} {:.3} ", s0[0], s0[1]);
        for i in 0..pts.len() {
            d += &self.geodesic_to(pts[i], pts[(i + 1) % pts.len()]);
        }
        let _ = writeln!(self.body, r#"<path d="{d}Z" fill="{fill}" stroke="{stroke}" stroke-width="{width}"/>"#);
    }

    pub fn segment(&mut self, p: [f64; 2], q: [f64; 2], stroke: &str, width: f64) {
        let s0 = self.to_screen(p);
        let d = format!("M {:.3} {:.3} {}", s0[0], s0[1], self.geodesic_to(p, q));
        let _ = writeln!(self.body, r#"<path d="{d}" fill="none" stroke="{stroke}" stroke-width="{width}"/>"#);
    }

    /// The hyperbolic circle of radius `r` about the disk centre.
    pub fn centred_circle(&mut self, r: f64, stroke: &str) {
        let c = self.size / 2.0;
        let rr = (r / 2.0).tanh() * self.radius();
        let _ = writeln!(
            self.body,
            r#"<circle cx="{c:.1}" cy="{c:.1}" r="{rr:.3}" fill="none" stroke="{stroke}" stroke-width="1.5" stroke-dasharray="4 3"/>"#
        );
    }

    pub fn label(&mut self, p: [f64; 2], text: &str) {
        let s = self.to_screen(p);
        let _ = writeln!(
            self.body,
            r#"<text x="{:.3}" y="{:.3}" font-size="9" text-anchor="middle">{text}</text>"#,
            s[0], s[1]
        );
    }

    pub fn finish(self) -> String {
        format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0}\" height=\"{0}\" viewBox=\"0 0 {0} {0}\">\n{1}</svg>\n",
            self.size, self.body
        )
    }
}

const BLOCK_FILLS: [&str; 4] = ["#dbe9f6", "#f6e3cf", "#e0f0d8", "#eadcf2"];

/// Tiles shaded by block, boundary walls in bold, cuts dashed red, and
/// optionally the angle denominators at boundary vertices.
pub fn render_complex(group: &TriangleGroup, file: &ComplexFile, label_angles: bool) -> String {
    let frame = DiskFrame::new(group);
    let mut svg = DiskSvg::new(600.0);
    let mats: Vec<Mat3> = file.matrices().expect("complex file written by this crate");
    for (t, m) in mats.iter().enumerate() {
        let fill = BLOCK_FILLS[file.tiles[t].block_index % BLOCK_FILLS.len()];
        svg.polygon(&frame.tile_vertices(group, m), fill, "#999999", 0.3);
    }
    for walk in &file.boundary {
        for e in walk {
            svg.segment(e.edge_endpoints[0], e.edge_endpoints[1], "black", 1.6);
            if let (true, Some(m)) = (label_angles, e.angle_denominator) {
                let p = e.edge_endpoints[1];
                svg.label([p[0] * 0.97, p[1] * 0.97], &format!("π/{m}"));
            }
        }
    }
    for &(t, k) in &file.cuts {
        let v = frame.tile_vertices(group, &mats[t]);
        svg.segment(v[(k + 1) % 3], v[(k + 2) % 3], "#cc0000", 1.2);
    }
    svg.finish()
}

/// Octagons of an envelope with the ball B(o, n) overlaid.
pub fn render_envelope(rao: &RaoGroup, env: &Envelope) -> String {
    let group = &rao.group;
    let frame = DiskFrame::new(group);
    let mut svg = DiskSvg::new(600.0);
    let tiles: Vec<Mat3> = OCTAGON_WORDS.iter().map(|w| group.word_matrix(w)).collect();
    // Side k of O is the third side of its k-th triangle.
    let side_ends = |g: &Mat3, k: usize| {
        [0, 1].map(|v| frame.project_exact(&g.mul(&tiles[k]).apply(&group.tile_vertex(v))))
    };
    for g in &env.octagons {
        for t in &tiles {
            svg.polygon(&frame.tile_vertices(group, &g.mul(t)), "#eef3f8", "#cccccc", 0.2);
        }
        for k in 0..8 {
            let [a, b] = side_ends(g, k);
            svg.segment(a, b, "#335577", 0.8);
        }
    }
    for (i, k) in env.boundary() {
        let [a, b] = side_ends(&env.octagons[i], k);
        svg.segment(a, b, "black", 1.6);
    }
    svg.centred_circle(env.n, "#cc0000");
    svg.finish()
}
