//! Boundary walks and angle sequences.
//!
//! A boundary vertex's angle is counted combinatorially: the number of tiles
//! of the complex in its star, each contributing π/4.

use alloc::vec;
use alloc::vec::Vec;

use super::complex::{ComplexError, Side, TileComplex};

/// For an even tile, the counter-clockwise traversal of side `k` ends at
/// vertex `(k + CCW_SHIFT) % 3`. Pinned against the disk picture in tests.
pub const CCW_SHIFT: usize = 2;

/// One boundary component: angle denominators `m` (angle π/m) in
/// counter-clockwise order. Straight vertices are omitted.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Component {
    /// Closed loop, as opposed to a run between two cuts whose end vertices
    /// are unreliable and excluded.
    pub cyclic: bool,
    pub entries: Vec<u8>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AngleSequence {
    pub components: Vec<Component>,
}

impl AngleSequence {
    /// All entries, concatenated in component order.
    pub fn entries(&self) -> impl Iterator<Item = u8> + '_ {
        self.components.iter().flat_map(|c| c.entries.iter().copied())
    }

    pub fn count(&self, m: u8) -> usize {
        self.entries().filter(|&e| e == m).count()
    }

    /// Some component contains two consecutive π/4 vertices.
    pub fn has_quarter_pair(&self) -> bool {
        self.components.iter().any(|c| {
            let e = &c.entries;
            let n = e.len();
            if c.cyclic {
                n >= 2 && (0..n).any(|i| e[i] == 4 && e[(i + 1) % n] == 4)
            } else {
                e.windows(2).any(|w| w == [4, 4])
            }
        })
    }
}

/// A boundary edge and the label of the vertex at its counter-clockwise end.
fn ccw_end(c: &TileComplex, tile: usize, k: usize) -> usize {
    let shift = if c.is_odd(tile) { 3 - CCW_SHIFT } else { CCW_SHIFT };
    (k + shift) % 3
}

enum Turn {
    /// Next boundary edge and the number of tiles in the vertex star.
    Next { tile: usize, side: usize, star: usize },
    /// The vertex star crosses a cut.
    Unreliable,
}

/// Rotate about vertex `m` of `tile`, starting from boundary side `k`.
fn turn(c: &TileComplex, tile: usize, k: usize, m: usize) -> Turn {
    let (mut cur, mut incoming, mut star) = (tile, k, 1);
    loop {
        let out = 3 - incoming - m;
        match c.side(cur, out) {
            Side::Tile(u) => {
                cur = u;
                incoming = out;
                star += 1;
                if star > 8 {
                    // A full turn without reaching the boundary: interior vertex.
                    unreachable!("boundary vertex with a full star");
                }
            }
            Side::Wall => return Turn::Next { tile: cur, side: out, star },
            Side::Cut => return Turn::Unreliable,
        }
    }
}

fn entry(star: usize) -> Result<Option<u8>, ComplexError> {
    match star {
        1 => Ok(Some(4)),
        2 => Ok(Some(2)),
        4 => Ok(None),
        _ => Err(ComplexError::Constraint("boundary vertex that is not convex")),
    }
}

/// A boundary loop, or a run of walls between two cuts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundaryWalk {
    pub cyclic: bool,
    /// Boundary edges `(tile, side)` in counter-clockwise order.
    pub edges: Vec<(usize, usize)>,
    /// Angle denominator at the counter-clockwise end of each edge: `None` for
    /// a straight vertex or for the last edge of a run.
    pub angles: Vec<Option<u8>>,
}

/// The boundary walks of a complex, runs between cuts first.
pub fn boundary_walks(c: &TileComplex) -> Result<Vec<BoundaryWalk>, ComplexError> {
    let walls: Vec<(usize, usize)> = c
        .boundary_sides()
        .into_iter()
        .filter(|&(t, k)| c.side(t, k) == Side::Wall)
        .collect();
    let id = |t: usize, k: usize| walls.binary_search(&(t, k)).expect("wall edge");
    let n = walls.len();
    let mut succ: Vec<Option<(usize, Option<u8>)>> = vec![None; n];
    let mut has_pred = vec![false; n];
    for (i, &(t, k)) in walls.iter().enumerate() {
        let m = ccw_end(c, t, k);
        if let Turn::Next { tile, side, star } = turn(c, t, k, m) {
            let j = id(tile, side);
            debug_assert_eq!(3 - side - ccw_end(c, tile, side), m, "orientation mismatch");
            succ[i] = Some((j, entry(star)?));
            has_pred[j] = true;
        }
    }
    let mut seen = vec![false; n];
    let mut walks = Vec::new();
    for start in (0..n).filter(|&i| !has_pred[i]).chain(0..n) {
        if seen[start] {
            continue;
        }
        let mut walk = BoundaryWalk { cyclic: has_pred[start], edges: Vec::new(), angles: Vec::new() };
        let mut i = start;
        loop {
            seen[i] = true;
            walk.edges.push(walls[i]);
            match succ[i] {
                Some((j, e)) => {
                    walk.angles.push(e);
                    if j == start {
                        break;
                    }
                    i = j;
                }
                None => {
                    walk.angles.push(None);
                    break;
                }
            }
        }
        walks.push(walk);
    }
    Ok(walks)
}

/// Angle sequence of a complex: one component per boundary loop or per run of
/// walls between cuts. Cyclic components start at their lexicographically
/// minimal rotation; components are sorted.
pub fn angle_sequence(c: &TileComplex) -> Result<AngleSequence, ComplexError> {
    let mut components: Vec<Component> = boundary_walks(c)?
        .into_iter()
        .map(|w| {
            let entries: Vec<u8> = w.angles.iter().flatten().copied().collect();
            let entries = if w.cyclic { min_rotation(&entries) } else { entries };
            Component { cyclic: w.cyclic, entries }
        })
        .collect();
    components.sort();
    Ok(AngleSequence { components })
}

/// Lexicographically least rotation.
pub fn min_rotation<T: Ord + Clone>(s: &[T]) -> Vec<T> {
    (0..s.len())
        .map(|r| s[r..].iter().chain(&s[..r]).cloned().collect::<Vec<T>>())
        .min()
        .unwrap_or_default()
}

/// Canonical form up to rotation (cyclic) and reversal.
pub fn canonical_component(c: &Component) -> Component {
    let rev: Vec<u8> = c.entries.iter().rev().copied().collect();
    let entries = if c.cyclic {
        core::cmp::min(min_rotation(&c.entries), min_rotation(&rev))
    } else {
        core::cmp::min(c.entries.clone(), rev)
    };
    Component { cyclic: c.cyclic, entries }
}

/// Do two sequences agree up to shift and mirror, componentwise as multisets?
pub fn iso_check(s1: &AngleSequence, s2: &AngleSequence) -> bool {
    let canon = |s: &AngleSequence| {
        let mut v: Vec<Component> = s.components.iter().map(canonical_component).collect();
        v.sort();
        v
    };
    canon(s1) == canon(s2)
}
