//! Isometries between tile complexes.
//!
//! Every isometry of the plane preserving the tiling sends a tile to a tile
//! and permutes the three side labels (the base triangle is equilateral), so a
//! candidate is fixed by the image of one tile and a label permutation. The
//! candidate is then checked tile by tile.

use alloc::vec;
use alloc::vec::Vec;

use crate::field::{Mat3, QSqrt2};

use super::complex::{Side, TileComplex};

pub const PERMUTATIONS: [[usize; 3]; 6] =
    [[0, 1, 2], [1, 0, 2], [0, 2, 1], [2, 1, 0], [1, 2, 0], [2, 0, 1]];

/// Root-basis matrix of the label permutation `e_k ↦ e_{π(k)}`; it preserves
/// the Gram form because all off-diagonal entries agree.
pub fn permutation_matrix(pi: [usize; 3]) -> Mat3 {
    Mat3::from_fn(|r, c| if pi[c] == r { QSqrt2::one() } else { QSqrt2::zero() })
}

/// Which sides may correspond under a partial map defined on `region`.
fn compatible(a: Side, b: Side, in_src: &dyn Fn(usize) -> bool, in_dst: &dyn Fn(usize) -> bool) -> bool {
    let inside = |s: Side, f: &dyn Fn(usize) -> bool| matches!(s, Side::Tile(u) if f(u));
    match (inside(a, in_src), inside(b, in_dst)) {
        (true, true) => true,
        (false, false) => (a == Side::Wall) == (b == Side::Wall),
        _ => false,
    }
}

/// Extend `start ↦ image` with label permutation `pi` over the source region.
fn extend(
    src: &TileComplex,
    dst: &TileComplex,
    start: usize,
    image: usize,
    pi: [usize; 3],
    in_src: &dyn Fn(usize) -> bool,
    in_dst: &dyn Fn(usize) -> bool,
) -> Option<Vec<Option<usize>>> {
    let mut map = vec![None; src.len()];
    let mut used = vec![false; dst.len()];
    map[start] = Some(image);
    used[image] = true;
    let mut stack = vec![start];
    while let Some(a) = stack.pop() {
        let fa = map[a].unwrap();
        for k in 0..3 {
            let (sa, sb) = (src.side(a, k), dst.side(fa, pi[k]));
            if !compatible(sa, sb, in_src, in_dst) {
                return None;
            }
            if let (Side::Tile(u), Side::Tile(v)) = (sa, sb) {
                if !in_src(u) {
                    continue;
                }
                match map[u] {
                    Some(w) if w != v => return None,
                    Some(_) => {}
                    None => {
                        if used[v] {
                            return None;
                        }
                        map[u] = Some(v);
                        used[v] = true;
                        stack.push(u);
                    }
                }
            }
        }
    }
    Some(map)
}

fn isometry_matrix(src_m: &[Mat3], dst_m: &[Mat3], a: usize, b: usize, pi: [usize; 3]) -> Mat3 {
    let inv = src_m[a].inverse().expect("tile matrices are invertible");
    dst_m[b].mul(&permutation_matrix(pi)).mul(&inv)
}

/// All isometries carrying the tiles of `src` onto the tiles of `dst`, as
/// matrices acting on the positions obtained by rooting each at tile 0.
pub fn isometries_between(src: &TileComplex, dst: &TileComplex) -> Vec<Mat3> {
    if src.len() != dst.len() || src.is_empty() {
        return Vec::new();
    }
    let all = |_: usize| true;
    let src_m = src.matrices_rooted(0);
    let dst_m = dst.matrices_rooted(0);
    let mut out = Vec::new();
    for b in 0..dst.len() {
        for pi in PERMUTATIONS {
            if let Some(map) = extend(src, dst, 0, b, pi, &all, &all) {
                if map.iter().all(|m| m.is_some()) {
                    out.push(isometry_matrix(&src_m, &dst_m, 0, b, pi));
                }
            }
        }
    }
    out
}

/// The symmetry group of a finite complex; the identity is always present.
pub fn self_isometries(c: &TileComplex) -> Vec<Mat3> {
    isometries_between(c, c)
}

/// An isometry carrying blocks `0..len−p` of a glued window onto blocks
/// `p..len`, matching walls with walls. Exists whenever the glued word has
/// period `p`.
pub fn block_shift_isometry(c: &TileComplex, blocks: usize, p: usize) -> Option<Mat3> {
    if p == 0 || p >= blocks {
        return None;
    }
    let in_src = |t: usize| c.block_of(t) + p < blocks;
    let in_dst = |t: usize| c.block_of(t) >= p;
    let start = c.tiles_in_block(0).next()?;
    let src_count = (0..c.len()).filter(|&t| in_src(t)).count();
    let mats = c.matrices_rooted(0);
    for b in c.tiles_in_block(p) {
        for pi in PERMUTATIONS {
            if let Some(map) = extend(c, c, start, b, pi, &in_src, &in_dst) {
                let mapped = map.iter().filter(|m| m.is_some()).count();
                let images_ok = map.iter().flatten().all(|&v| in_dst(v));
                if mapped == src_count && images_ok {
                    return Some(isometry_matrix(&mats, &mats, start, b, pi));
                }
            }
        }
    }
    None
}
