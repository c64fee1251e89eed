//! Floating-point Poincaré-disk coordinates, for drawing and for the few
//! checks that are inherently metric (distances compared to real radii).

use crate::coxeter::TriangleGroup;
use crate::field::{Mat3, Vec3};

/// An orthonormal frame of the Lorentzian form centred at the basepoint.
#[derive(Clone, Debug)]
pub struct DiskFrame {
    gram: [[f64; 3]; 3],
    /// Timelike unit vector along the basepoint.
    centre: [f64; 3],
    axes: [[f64; 3]; 2],
}

impl DiskFrame {
    pub fn new(group: &TriangleGroup) -> Self {
        let gram = group.gram().matrix().to_f64();
        let b = |x: &[f64; 3], y: &[f64; 3]| form(&gram, x, y);
        let o = group.basepoint().to_f64();
        let s = libm::sqrt(-b(&o, &o));
        let centre = o.map(|x| x / s);
        // Project e₁ and e₂ onto the orthogonal complement and orthonormalize.
        let proj = |x: [f64; 3], others: &[[f64; 3]]| {
            let mut y = x;
            let c = b(&x, &centre);
            for i in 0..3 {
                y[i] += c * centre[i];
            }
            for w in others {
                let c = b(&x, w);
                for i in 0..3 {
                    y[i] -= c * w[i];
                }
            }
            let n = libm::sqrt(b(&y, &y));
            y.map(|v| v / n)
        };
        let a1 = proj([1.0, 0.0, 0.0], &[]);
        let a2 = proj([0.0, 1.0, 0.0], &[a1]);
        DiskFrame { gram, centre, axes: [a1, a2] }
    }

    pub fn form(&self, x: &[f64; 3], y: &[f64; 3]) -> f64 {
        form(&self.gram, x, y)
    }

    /// Disk coordinates of a timelike (or isotropic) vector, either sign.
    pub fn project(&self, x: &[f64; 3]) -> [f64; 2] {
        let t = -self.form(x, &self.centre);
        let (t, sgn) = if t < 0.0 { (-t, -1.0) } else { (t, 1.0) };
        let u = sgn * self.form(x, &self.axes[0]);
        let v = sgn * self.form(x, &self.axes[1]);
        let q = -self.form(x, x);
        let scale = if q > 0.0 { libm::sqrt(q) } else { 0.0 };
        [u / (scale + t), v / (scale + t)]
    }

    pub fn project_exact(&self, x: &Vec3) -> [f64; 2] {
        self.project(&x.to_f64())
    }

    /// Disk coordinates of the three vertices of tile `m·T`, vertex `k`
    /// opposite side `k`.
    pub fn tile_vertices(&self, group: &TriangleGroup, m: &Mat3) -> [[f64; 2]; 3] {
        let mf = m.to_f64();
        core::array::from_fn(|k| {
            let v = group.tile_vertex(k).to_f64();
            self.project(&apply(&mf, &v))
        })
    }

    /// Hyperbolic distance from the centre of the disk.
    pub fn distance_from_centre(&self, p: [f64; 2]) -> f64 {
        let r = libm::sqrt(p[0] * p[0] + p[1] * p[1]);
        2.0 * libm::atanh(r)
    }
}

fn form(g: &[[f64; 3]; 3], x: &[f64; 3], y: &[f64; 3]) -> f64 {
    let mut s = 0.0;
    for i in 0..3 {
        for j in 0..3 {
            s += x[i] * g[i][j] * y[j];
        }
    }
    s
}

pub fn apply(m: &[[f64; 3]; 3], v: &[f64; 3]) -> [f64; 3] {
    core::array::from_fn(|i| m[i][0] * v[0] + m[i][1] * v[1] + m[i][2] * v[2])
}

/// Signed area of a triangle in the plane (positive when counter-clockwise).
pub fn signed_area(p: [[f64; 2]; 3]) -> f64 {
    0.5 * ((p[1][0] - p[0][0]) * (p[2][1] - p[0][1]) - (p[2][0] - p[0][0]) * (p[1][1] - p[0][1]))
}
