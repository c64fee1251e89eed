//! Random subgroups Γ_{P_a}: sampling marked handles, membership, and
//! finite-ball fingerprints.
//!
//! The tiles of P_a are a fundamental domain for Γ_{P_a}, so they index the
//! cosets Γ_{P_a}\Γ. Right multiplication by σ_k moves a tile across its side
//! k, or leaves it in place when that side is a wall of P_a (the wall's
//! reflection folds the neighbour back). An element lies in the subgroup iff
//! tracing its word from the marked tile returns to the marked tile.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;
use num_traits::Zero;
use rand_chacha::ChaCha8Rng;

use crate::coxeter::{right_mul_generator, Ball, Letter, TriangleGroup};
use crate::field::{Mat3, QSqrt2, Rational, Vec3};
use crate::polygon::blocks::{glue_blocks, BlockSet, Ends};
use crate::polygon::complex::{ComplexError, Side, TileComplex};
use crate::shift::{uniform_index, ReweightedMeasure, ShiftMeasure};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EngineError {
    /// The computation needs tiles beyond the materialized window.
    Margin { radius: usize, required: Option<usize> },
    Complex(ComplexError),
}

impl fmt::Display for EngineError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EngineError::Margin { radius, required: Some(r) } => {
                write!(f, "window radius {radius} too small for this ball; need at least {r}")
            }
            EngineError::Margin { radius, required: None } => {
                write!(f, "computation left the materialized window of radius {radius}")
            }
            EngineError::Complex(e) => write!(f, "{e}"),
        }
    }
}

impl From<ComplexError> for EngineError {
    fn from(e: ComplexError) -> Self {
        EngineError::Complex(e)
    }
}

/// Fewest tile steps needed to pass through one block, F⁻ side to F⁺ side,
/// including the step across the F⁺ face.
pub fn crossing_cost(blocks: &BlockSet) -> usize {
    [&blocks.octagon, &blocks.phat2]
        .iter()
        .map(|b| {
            let c = &b.complex;
            let dist = tile_distances(c, b.f_minus.unwrap());
            dist[b.f_plus.unwrap()] + 1
        })
        .min()
        .unwrap()
}

fn tile_distances(c: &TileComplex, from: usize) -> Vec<usize> {
    let mut dist = vec![usize::MAX; c.len()];
    dist[from] = 0;
    let mut queue = alloc::collections::VecDeque::from([from]);
    while let Some(t) = queue.pop_front() {
        for s in c.sides()[t] {
            if let Side::Tile(u) = s {
                if dist[u] == usize::MAX {
                    dist[u] = dist[t] + 1;
                    queue.push_back(u);
                }
            }
        }
    }
    dist
}

/// Window radius that keeps every trace of at most `max_len` letters away
/// from the cut faces: reaching the cut past k blocks takes at least
/// `k·cost + 1` steps.
pub fn required_radius(blocks: &BlockSet, max_len: usize) -> usize {
    if max_len == 0 {
        return 0;
    }
    (max_len - 1) / crossing_cost(blocks) + 1
}

/// Longest word in a ball.
pub fn ball_depth(ball: &Ball) -> usize {
    (0..ball.len()).map(|i| ball.word(i).len()).max().unwrap_or(0)
}

/// Error naming the needed radius when `radius` cannot carry traces of the
/// ball's words, conjugated by up to `extra` letters.
pub fn check_radius(blocks: &BlockSet, radius: usize, ball: &Ball, extra: usize) -> Result<(), EngineError> {
    let required = required_radius(blocks, ball_depth(ball) + 2 * extra);
    if radius < required {
        return Err(EngineError::Margin { radius, required: Some(required) });
    }
    Ok(())
}

/// A sampled conjugate of Γ_{P_a}: the window a[−k..=k] glued with cut ends,
/// and a marked tile in the block of a₀ placed at the identity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubgroupHandle {
    pub window: Vec<u8>,
    pub radius: usize,
    pub complex: TileComplex,
    pub marked: usize,
    /// Index of the marked tile within its block template.
    pub marked_in_block: usize,
}

impl SubgroupHandle {
    pub fn new(blocks: &BlockSet, window: Vec<u8>, marked_in_block: usize) -> Result<Self, EngineError> {
        if window.len().is_multiple_of(2) {
            return Err(ComplexError::Constraint("window must have odd length").into());
        }
        let radius = window.len() / 2;
        let complex = glue_blocks(blocks, &window, Ends::Cut)?;
        let start = complex.tiles_in_block(radius).next().unwrap();
        if marked_in_block >= blocks.for_symbol(window[radius]).tile_count() {
            return Err(ComplexError::Constraint("marked tile outside block 0").into());
        }
        Ok(SubgroupHandle { window, radius, complex, marked: start + marked_in_block, marked_in_block })
    }

    /// Γ_P for a compact glued polygon (closed ends), marked at `marked`.
    pub fn closed(blocks: &BlockSet, word: Vec<u8>, marked: usize) -> Result<Self, EngineError> {
        let complex = glue_blocks(blocks, &word, Ends::Closed)?;
        if marked >= complex.len() {
            return Err(ComplexError::Constraint("marked tile outside the polygon").into());
        }
        let block = complex.block_of(marked);
        let first = complex.tiles_in_block(block).next().unwrap();
        Ok(SubgroupHandle { window: word, radius: block, complex, marked, marked_in_block: marked - first })
    }

    /// Symbol a₀.
    pub fn centre_symbol(&self) -> u8 {
        self.window[self.radius]
    }

    fn margin(&self) -> EngineError {
        EngineError::Margin { radius: self.radius, required: None }
    }

    /// Coset reached from `start` by the word, or a margin error.
    pub fn trace(&self, start: usize, word: &[Letter]) -> Result<usize, EngineError> {
        word.iter().try_fold(start, |t, &l| self.complex.step(t, l).ok_or_else(|| self.margin()))
    }

    /// Words for the reflections in the non-cut walls, each a path from the
    /// marked tile, the wall letter, and the path back.
    pub fn wall_words(&self) -> Vec<Vec<Letter>> {
        let c = &self.complex;
        let mut path: Vec<Option<Vec<Letter>>> = vec![None; c.len()];
        path[self.marked] = Some(Vec::new());
        let mut queue = alloc::collections::VecDeque::from([self.marked]);
        let mut out = Vec::new();
        while let Some(t) = queue.pop_front() {
            let p = path[t].clone().unwrap();
            for k in 0..3u8 {
                match c.side(t, k as usize) {
                    Side::Tile(u) if path[u].is_none() => {
                        let mut q = p.clone();
                        q.push(k);
                        path[u] = Some(q);
                        queue.push_back(u);
                    }
                    Side::Wall => {
                        let mut w = p.clone();
                        w.push(k);
                        w.extend(p.iter().rev());
                        out.push(w);
                    }
                    _ => {}
                }
            }
        }
        out
    }

    /// Whether the word lies in the subgroup.
    pub fn contains_word(&self, word: &[Letter]) -> Result<bool, EngineError> {
        Ok(self.trace(self.marked, word)? == self.marked)
    }

    /// Exact equality of two subgroups whose polygons have no cut faces, by
    /// testing each generating set against the other subgroup.
    pub fn same_subgroup(&self, other: &SubgroupHandle) -> Result<bool, EngineError> {
        for (a, b) in [(self, other), (other, self)] {
            if a.complex.boundary_sides().iter().any(|&(t, k)| a.complex.side(t, k) == Side::Cut) {
                return Err(a.margin());
            }
            for w in a.wall_words() {
                if !b.contains_word(&w)? {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// Exact tile positions with the marked tile at the identity.
    pub fn matrices(&self) -> Vec<Mat3> {
        self.complex.matrices_rooted(self.marked)
    }
}

/// Draw a handle: window from ν′, marked tile uniform in block 0.
pub fn sample_subgroup(
    blocks: &BlockSet,
    m: &ReweightedMeasure,
    radius: usize,
    rng: &mut ChaCha8Rng,
) -> Result<SubgroupHandle, EngineError> {
    let window = m.sample_window(radius, rng);
    mark_uniformly(blocks, window, rng)
}

/// Same, but with the window drawn from ν itself: the biased sampler used as
/// a negative control.
pub fn sample_subgroup_unweighted(
    blocks: &BlockSet,
    m: &ShiftMeasure,
    radius: usize,
    rng: &mut ChaCha8Rng,
) -> Result<SubgroupHandle, EngineError> {
    let window = m.sample_window(radius, rng);
    mark_uniformly(blocks, window, rng)
}

fn mark_uniformly(blocks: &BlockSet, window: Vec<u8>, rng: &mut ChaCha8Rng) -> Result<SubgroupHandle, EngineError> {
    let n = blocks.for_symbol(window[window.len() / 2]).tile_count();
    let marked = uniform_index(rng, n);
    SubgroupHandle::new(blocks, window, marked)
}

/// Membership bitset over the elements of a ball.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Fingerprint {
    len: usize,
    bits: Vec<u64>,
}

impl Fingerprint {
    pub fn from_members(len: usize, members: &[usize]) -> Self {
        let mut f = Fingerprint { len, bits: vec![0; len.div_ceil(64)] };
        for &i in members {
            f.bits[i / 64] |= 1 << (i % 64);
        }
        f
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn contains(&self, i: usize) -> bool {
        self.bits[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn members(&self) -> Vec<usize> {
        (0..self.len).filter(|&i| self.contains(i)).collect()
    }

    pub fn count(&self) -> usize {
        self.bits.iter().map(|b| b.count_ones() as usize).sum()
    }
}

/// Fingerprint of the subgroup that fixes coset `start`.
/// Coset reached by every ball element from `start`, following ball parent
/// pointers, under a coset action `step`; `None` when the action leaves the
/// materialized region.
pub fn coset_positions(
    ball: &Ball,
    start: usize,
    step: impl Fn(usize, Letter) -> Option<usize>,
) -> Option<Vec<usize>> {
    let mut pos = vec![0usize; ball.len()];
    for i in 0..ball.len() {
        pos[i] = match ball.parent(i) {
            Some((p, l)) if p < i => step(pos[p], l)?,
            _ => ball.word(i).iter().try_fold(start, |t, &l| step(t, l))?,
        };
    }
    Some(pos)
}

/// Fingerprint of the stabilizer of `start` under a coset action.
pub fn coset_fingerprint(
    ball: &Ball,
    start: usize,
    step: impl Fn(usize, Letter) -> Option<usize>,
) -> Option<Fingerprint> {
    let pos = coset_positions(ball, start, step)?;
    let members: Vec<usize> = (0..ball.len()).filter(|&i| pos[i] == start).collect();
    Some(Fingerprint::from_members(ball.len(), &members))
}

fn fingerprint_from(h: &SubgroupHandle, start: usize, ball: &Ball) -> Result<Fingerprint, EngineError> {
    coset_fingerprint(ball, start, |t, l| h.complex.step(t, l)).ok_or_else(|| h.margin())
}

/// Which ball elements lie in the handle's subgroup H.
pub fn fingerprint(h: &SubgroupHandle, ball: &Ball) -> Result<Fingerprint, EngineError> {
    fingerprint_from(h, h.marked, ball)
}

/// Fingerprint of g H g⁻¹: γ belongs iff g⁻¹γg ∈ H, i.e. iff γ fixes the coset
/// H g⁻¹.
pub fn conjugate_fingerprint(h: &SubgroupHandle, g: &[Letter], ball: &Ball) -> Result<Fingerprint, EngineError> {
    let inverse: Vec<Letter> = g.iter().rev().copied().collect();
    let start = h.trace(h.marked, &inverse)?;
    fingerprint_from(h, start, ball)
}

/// A wall of the materialized polygon: root `n` with the polygon on the side
/// `B(n, ·) < 0`.
#[derive(Clone, Debug)]
pub struct Wall {
    pub root: Vec3,
    pub reflection: Mat3,
    pub cut: bool,
}

/// Geometric data for folding: walls of the window polygon, marked tile at
/// the identity.
#[derive(Clone, Debug)]
pub struct FoldingDomain {
    pub walls: Vec<Wall>,
}

impl FoldingDomain {
    pub fn new(h: &SubgroupHandle) -> Self {
        let mats = h.matrices();
        let mut walls = Vec::new();
        for (t, k) in h.complex.boundary_sides() {
            let m = &mats[t];
            let inv = m.inverse().expect("invertible");
            let reflection = right_mul_generator(m, k).mul(&inv);
            walls.push(Wall {
                root: m.apply(&Vec3::basis(k)),
                reflection,
                cut: h.complex.side(t, k) == Side::Cut,
            });
        }
        FoldingDomain { walls }
    }
}

/// Decide g ∈ H by folding g·o back into the polygon.
///
/// While the point lies strictly outside, reflect it in the separating wall
/// that the segment from o crosses first (ties to the lower wall index).
/// Reflection in a wall separating the point from o strictly decreases its
/// distance to o, so the loop ends; g ∈ H iff the accumulated product is the
/// identity.
pub fn membership(group: &TriangleGroup, dom: &FoldingDomain, radius: usize, g: &Mat3) -> Result<bool, EngineError> {
    let gram = group.gram();
    let o = group.basepoint();
    let o_side: Vec<QSqrt2> = dom.walls.iter().map(|w| gram.eval(&w.root, o)).collect();
    let mut r = g.clone();
    loop {
        let x = r.apply(o);
        let mut best: Option<(usize, QSqrt2)> = None;
        for (i, w) in dom.walls.iter().enumerate() {
            let bx = gram.eval(&w.root, &x);
            if bx.sign() <= 0 {
                continue;
            }
            if w.cut {
                return Err(EngineError::Margin { radius, required: None });
            }
            // Crossing parameter along o → x: s = B(n,o) / (B(n,o) − B(n,x)).
            let s = o_side[i].checked_div(&(&o_side[i] - &bx)).expect("nonzero");
            if best.as_ref().is_none_or(|(_, b)| s.cmp_value(b).is_lt()) {
                best = Some((i, s));
            }
        }
        match best {
            None => return Ok(r.is_identity()),
            Some((i, _)) => r = dom.walls[i].reflection.mul(&r),
        }
    }
}

/// Exact law of the fingerprint of H (or of g H g⁻¹) under ν′, by enumerating
/// the determining window a[−k..=k] and the marked tile.
pub fn exact_fingerprint_law(
    blocks: &BlockSet,
    m: &ReweightedMeasure,
    radius: usize,
    ball: &Ball,
    conjugator: &[Letter],
) -> Result<BTreeMap<Fingerprint, Rational>, EngineError> {
    let width = 2 * radius + 1;
    let mut law: BTreeMap<Fingerprint, Rational> = BTreeMap::new();
    for bits in 0..1u64 << width {
        let window: Vec<u8> = (0..width).map(|i| if bits >> i & 1 == 1 { 2 } else { 1 }).collect();
        let p = m.window_probability(&window);
        if p.is_zero() {
            continue;
        }
        let n = blocks.for_symbol(window[radius]).tile_count();
        let share = p / Rational::from_integer(BigInt::from(n));
        for t in 0..n {
            let h = SubgroupHandle::new(blocks, window.clone(), t)?;
            let f = conjugate_fingerprint(&h, conjugator, ball)?;
            *law.entry(f).or_insert_with(Rational::zero) += &share;
        }
    }
    Ok(law)
}
