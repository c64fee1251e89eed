//! Convex envelopes in the right-angled octagon tiling and the finitely
//! supported IRSs of their reflection groups.
//!
//! The octagon group Γ_O is generated by the reflections r_k in the eight sides
//! of the base octagon O. Octagons of the tiling are indexed by elements of
//! Γ_O, the neighbour of g·O across side k being g·r_k·O. An octagon lies in
//! Conv(B(o, n)) exactly when it can be reached from O crossing only walls that
//! meet the open ball, so the envelope is a breadth-first search.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use hashbrown::HashMap;
use libm::{acosh, asinh, log, sqrt};

use crate::coxeter::{Ball, Letter, TriangleGroup};
use crate::field::{Mat3, Vec3};
use crate::irs::{coset_fingerprint, coset_positions, Fingerprint};
use crate::polygon::blocks::{OCTAGON_SIDE, OCTAGON_WORDS};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EnvelopeError {
    ResourceCap { cap: usize },
}

impl fmt::Display for EnvelopeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EnvelopeError::ResourceCap { cap } => write!(f, "envelope exceeds {cap} octagons"),
        }
    }
}

/// Γ_O inside the triangle group.
#[derive(Clone, Debug)]
pub struct RaoGroup {
    pub group: TriangleGroup,
    /// Reflection in side k of O.
    pub generators: Vec<Mat3>,
    /// Root vector of side k.
    pub roots: Vec<Vec3>,
    /// The centre of O, where its eight triangles meet.
    pub centre: Vec3,
    /// The point o of the balls B(o, n): the incentre of the base triangle.
    pub origin: Vec3,
    /// The eight corners of O.
    pub corners: Vec<Vec3>,
    /// `adjacent[j][k]`: sides j and k share a corner.
    pub adjacent: [[bool; 8]; 8],
}

impl RaoGroup {
    pub fn new(group: &TriangleGroup) -> Self {
        let tiles: Vec<Mat3> = OCTAGON_WORDS.iter().map(|w| group.word_matrix(w)).collect();
        let sigma = group.generator_matrix(OCTAGON_SIDE);
        let generators = tiles.iter().map(|m| m.mul(sigma).mul(&group.invert_matrix(m))).collect();
        let roots = tiles.iter().map(|m| m.apply(&Vec3::basis(OCTAGON_SIDE))).collect();
        let ends: Vec<[Vec3; 2]> =
            tiles.iter().map(|m| [m.apply(&group.tile_vertex(0)), m.apply(&group.tile_vertex(1))]).collect();
        let mut corners: Vec<Vec3> = Vec::new();
        for e in ends.iter().flatten() {
            if !corners.contains(e) {
                corners.push(e.clone());
            }
        }
        let mut adjacent = [[false; 8]; 8];
        for j in 0..8 {
            for k in 0..8 {
                adjacent[j][k] = j != k && ends[j].iter().any(|v| ends[k].contains(v));
            }
        }
        RaoGroup {
            group: group.clone(),
            generators,
            roots,
            centre: group.tile_vertex(OCTAGON_SIDE),
            origin: group.basepoint().clone(),
            corners,
            adjacent,
        }
    }

    fn form(&self, x: &Vec3, y: &Vec3) -> f64 {
        self.group.gram().eval(x, y).to_f64()
    }

    /// Hyperbolic distance between two points given by timelike vectors.
    pub fn distance(&self, x: &Vec3, y: &Vec3) -> f64 {
        let c = self.form(x, y).abs() / sqrt(self.form(x, x) * self.form(y, y));
        acosh(c.max(1.0))
    }

    /// Distance from a point to the wall with root `alpha`.
    pub fn wall_distance(&self, x: &Vec3, alpha: &Vec3) -> f64 {
        asinh(self.form(x, alpha).abs() / sqrt(-self.form(x, x) * self.form(alpha, alpha)))
    }

    /// Diameter of O: the largest corner-to-corner distance, rounded up.
    pub fn octagon_diameter(&self) -> f64 {
        let mut d: f64 = 0.0;
        for a in &self.corners {
            for b in &self.corners {
                d = d.max(self.distance(a, b));
            }
        }
        d + 1e-12
    }
}

/// A finite union of octagons with its adjacency.
#[derive(Clone, Debug)]
pub struct Envelope {
    /// Radius of the ball the envelope was built around (0 for point sets).
    pub n: f64,
    /// Γ_O element placing each octagon; index 0 is O itself.
    pub octagons: Vec<Mat3>,
    /// Word in the generators r_k for each octagon.
    pub words: Vec<Vec<Letter>>,
    /// Neighbour across each side, `None` on the boundary.
    pub sides: Vec<[Option<usize>; 8]>,
}

/// Conv(B(o, n)).
pub fn conv_envelope(rao: &RaoGroup, n: f64, max_octagons: usize) -> Result<Envelope, EnvelopeError> {
    grow(rao, n, max_octagons, |root| rao.wall_distance(&rao.origin, root) < n)
}

/// The smallest convex union of octagons containing `points`, which must
/// include a point inside O. Walls through a point do not separate it.
pub fn conv_of_points(rao: &RaoGroup, points: &[Vec3], max_octagons: usize) -> Result<Envelope, EnvelopeError> {
    let gram = rao.group.gram();
    grow(rao, 0.0, max_octagons, |root| {
        let signs: Vec<i8> = points.iter().map(|p| gram.eval(p, root).sign()).collect();
        signs.contains(&1) && signs.contains(&-1)
    })
}

/// Octagons reachable from O through walls accepted by `crosses`.
fn grow(
    rao: &RaoGroup,
    n: f64,
    max_octagons: usize,
    crosses: impl Fn(&Vec3) -> bool,
) -> Result<Envelope, EnvelopeError> {
    let mut octagons = vec![Mat3::identity()];
    let mut words: Vec<Vec<Letter>> = vec![Vec::new()];
    let mut index: HashMap<Mat3, usize> = HashMap::new();
    index.insert(Mat3::identity(), 0);
    let mut sides: Vec<[Option<usize>; 8]> = vec![[None; 8]];
    let mut i = 0;
    while i < octagons.len() {
        for k in 0..8 {
            if !crosses(&octagons[i].apply(&rao.roots[k])) {
                continue;
            }
            let next = octagons[i].mul(&rao.generators[k]);
            let j = match index.get(&next) {
                Some(&j) => j,
                None => {
                    if octagons.len() >= max_octagons {
                        return Err(EnvelopeError::ResourceCap { cap: max_octagons });
                    }
                    let j = octagons.len();
                    index.insert(next.clone(), j);
                    let mut w = words[i].clone();
                    w.push(k as Letter);
                    octagons.push(next);
                    words.push(w);
                    sides.push([None; 8]);
                    j
                }
            };
            sides[i][k] = Some(j);
        }
        i += 1;
    }
    Ok(Envelope { n, octagons, words, sides })
}

impl Envelope {
    pub fn len(&self) -> usize {
        self.octagons.len()
    }

    pub fn is_empty(&self) -> bool {
        self.octagons.is_empty()
    }

    /// `(octagon, side)` pairs on the boundary.
    pub fn boundary(&self) -> Vec<(usize, usize)> {
        (0..self.len()).flat_map(|i| (0..8).filter(move |&k| self.sides[i][k].is_none()).map(move |k| (i, k))).collect()
    }

    fn step(&self, o: usize, k: Letter) -> usize {
        self.sides[o][k as usize].unwrap_or(o)
    }

    /// Fingerprint over a ball of Γ_O of the conjugate marked at `marked`.
    pub fn fingerprint(&self, marked: usize, ball: &Ball) -> Fingerprint {
        coset_fingerprint(ball, marked, |o, k| Some(self.step(o, k))).expect("the envelope is compact")
    }

    /// Which side types s have some ball element g with g·s·g⁻¹ in the
    /// conjugate marked at `marked`.
    pub fn spanning_types(&self, marked: usize, ball: &Ball) -> [bool; 8] {
        let pos = coset_positions(ball, marked, |o, k| Some(self.step(o, k))).expect("the envelope is compact");
        let mut out = [false; 8];
        for &o in &pos {
            for (s, hit) in out.iter_mut().enumerate() {
                *hit |= self.sides[o][s].is_none();
            }
        }
        out
    }

    /// Whether the octagons reached by ball words never meet a wall, so the
    /// conjugate marked at `marked` misses every nontrivial ball element.
    pub fn ball_is_interior(&self, marked: usize, ball: &Ball) -> bool {
        match coset_positions(ball, marked, |o, k| self.sides[o][k as usize]) {
            Some(pos) => {
                let mut seen = hashbrown::HashSet::new();
                pos.iter().all(|o| seen.insert(*o))
            }
            None => false,
        }
    }
}

/// Whether the octagons `set` (given by their Γ_O elements) lie weakly on one
/// side of each of their boundary walls, by exact sign tests.
pub fn is_convex(rao: &RaoGroup, set: &[Mat3]) -> bool {
    let members: HashMap<&Mat3, ()> = set.iter().map(|m| (m, ())).collect();
    let centres: Vec<Vec3> = set.iter().map(|m| m.apply(&rao.centre)).collect();
    let gram = rao.group.gram();
    for (i, g) in set.iter().enumerate() {
        for k in 0..8 {
            if members.contains_key(&g.mul(&rao.generators[k])) {
                continue;
            }
            let root = g.apply(&rao.roots[k]);
            let side = gram.eval(&centres[i], &root).sign();
            if centres.iter().any(|c| gram.eval(c, &root).sign() != side) {
                return false;
            }
        }
    }
    true
}

/// Whether the union of `set` contains B(o, n): O belongs to it and every
/// boundary wall is at distance at least n from o. Assumes convexity.
pub fn contains_ball(rao: &RaoGroup, set: &[Mat3], n: f64) -> bool {
    let members: HashMap<&Mat3, ()> = set.iter().map(|m| (m, ())).collect();
    if !members.contains_key(&Mat3::identity()) {
        return false;
    }
    set.iter().all(|g| {
        (0..8).all(|k| {
            members.contains_key(&g.mul(&rao.generators[k]))
                || rao.wall_distance(&rao.origin, &g.apply(&rao.roots[k])) >= n
        })
    })
}

/// Octagons whose removal keeps the set convex and still containing B(o, n).
/// Empty exactly when the envelope is minimal among such unions.
pub fn removable_octagons(rao: &RaoGroup, env: &Envelope) -> Vec<usize> {
    (0..env.len())
        .filter(|&i| env.sides[i].iter().any(|s| s.is_none()))
        .filter(|&i| {
            let rest: Vec<Mat3> =
                env.octagons.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, m)| m.clone()).collect();
            is_convex(rao, &rest) && contains_ball(rao, &rest, env.n)
        })
        .collect()
}

/// Largest distance from a point of the envelope to B(o, n).
pub fn envelope_excess(rao: &RaoGroup, env: &Envelope) -> f64 {
    let mut worst: f64 = 0.0;
    for g in &env.octagons {
        for v in &rao.corners {
            worst = worst.max(rao.distance(&rao.origin, &g.apply(v)) - env.n);
        }
    }
    worst
}

/// D + log(2 + √3).
pub fn envelope_bound(rao: &RaoGroup) -> f64 {
    rao.octagon_diameter() + log(2.0 + sqrt(3.0))
}

/// For every octagon centre and corner x of the envelope, look for an octagon
/// centre y with d(x, y) ≤ R + C and B(y, R) inside the envelope.
pub fn deep_point_check(rao: &RaoGroup, env: &Envelope, r: f64, c: f64) -> bool {
    let centres: Vec<Vec3> = env.octagons.iter().map(|g| g.apply(&rao.centre)).collect();
    let walls: Vec<Vec3> = env.boundary().iter().map(|&(i, k)| env.octagons[i].apply(&rao.roots[k])).collect();
    let deep: Vec<&Vec3> =
        centres.iter().filter(|y| walls.iter().all(|w| rao.wall_distance(y, w) >= r)).collect();
    let mut points = centres.clone();
    for g in &env.octagons {
        points.extend(rao.corners.iter().map(|v| g.apply(v)));
    }
    points.iter().all(|x| deep.iter().any(|y| rao.distance(x, y) <= r + c))
}

/// The constant 2 + √3 + D of the deep-point statement.
pub fn deep_point_constant(rao: &RaoGroup) -> f64 {
    2.0 + sqrt(3.0) + rao.octagon_diameter()
}
