//! The building blocks T, O, Q, P̂₁, P̂₂ and their gluing along words.
//!
//! Each octagon side is a single side-3 edge of one triangle. Blocks are glued
//! F⁺ to F⁻ with every copy placed by an element of Γ, so side labels are
//! preserved across the gluing. Consecutive copies may therefore be mirror
//! images of each other.

use alloc::vec;
use alloc::vec::Vec;

use crate::coxeter::{Letter, TriangleGroup};
use crate::field::Mat3;

use super::complex::{ComplexError, Side, TileComplex};

/// Side label of octagon edges (σ₃, zero-based).
pub const OCTAGON_SIDE: usize = 2;

/// Tiles of the base octagon in cyclic order around its centre.
pub const OCTAGON_WORDS: [&[Letter]; 8] =
    [&[], &[0], &[0, 1], &[0, 1, 0], &[0, 1, 0, 1], &[1, 0, 1], &[1, 0], &[1]];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BlockKind {
    Triangle,
    Octagon,
    HalfOctagon,
    /// P̂₂: octagon + half-octagon + two octagons.
    Composite,
}

impl BlockKind {
    pub fn name(self) -> &'static str {
        match self {
            BlockKind::Triangle => "T",
            BlockKind::Octagon => "O",
            BlockKind::HalfOctagon => "Q",
            BlockKind::Composite => "P2",
        }
    }
}

/// A block template: a tile complex with its tile words and gluing faces.
#[derive(Clone, Debug)]
pub struct Block {
    pub kind: BlockKind,
    pub complex: TileComplex,
    /// Word of each tile relative to the template's identity tile.
    pub words: Vec<Vec<Letter>>,
    /// Tile carrying F⁻ on its side 3, if the block is gluable.
    pub f_minus: Option<usize>,
    /// Tile carrying F⁺ on its side 3.
    pub f_plus: Option<usize>,
}

impl Block {
    pub fn tile_count(&self) -> usize {
        self.complex.len()
    }

    fn from_words(
        group: &TriangleGroup,
        kind: BlockKind,
        words: Vec<Vec<Letter>>,
        faces: Option<(usize, usize)>,
    ) -> Result<Self, ComplexError> {
        let mats: Vec<Mat3> = words.iter().map(|w| group.word_matrix(w)).collect();
        let complex = TileComplex::from_matrices(&mats)?;
        Ok(Block {
            kind,
            complex,
            words,
            f_minus: faces.map(|f| f.0),
            f_plus: faces.map(|f| f.1),
        })
    }

    fn faces(&self) -> (usize, usize) {
        (self.f_minus.expect("gluable block"), self.f_plus.expect("gluable block"))
    }
}

fn prefixed(prefix: &[Letter], w: &[Letter]) -> Vec<Letter> {
    prefix.iter().chain(w.iter()).copied().collect()
}

pub fn build_triangle(group: &TriangleGroup) -> Block {
    Block::from_words(group, BlockKind::Triangle, vec![Vec::new()], None).expect("single tile")
}

/// Right-angled octagon: the eight tiles around the centre where sides 1 and 2
/// meet. F⁻ and F⁺ are opposite sides.
pub fn build_octagon(group: &TriangleGroup) -> Block {
    let words = OCTAGON_WORDS.iter().map(|w| w.to_vec()).collect();
    Block::from_words(group, BlockKind::Octagon, words, Some((0, 4))).expect("octagon")
}

/// Half of the octagon across the base tile's side 3, cut along a diagonal so
/// that the shared edge is one of its two middle sides.
pub fn build_half_octagon(group: &TriangleGroup) -> Block {
    let words = [7usize, 0, 1, 2]
        .iter()
        .map(|&k| OCTAGON_WORDS[k].to_vec())
        .collect();
    Block::from_words(group, BlockKind::HalfOctagon, words, None).expect("half-octagon")
}

/// P̂₂: base octagon, a half-octagon on side s₀, and octagons on the opposite
/// sides s₂ and s₆. F⁻ is the far side of the s₆ octagon, F⁺ that of the s₂
/// octagon.
pub fn build_phat2(group: &TriangleGroup) -> Result<Block, ComplexError> {
    let mut words: Vec<Vec<Letter>> = OCTAGON_WORDS.iter().map(|w| w.to_vec()).collect();
    // Half-octagon inside the octagon across s₀.
    for k in [7usize, 0, 1, 2] {
        words.push(prefixed(&[2], OCTAGON_WORDS[k]));
    }
    let across = |k: usize| prefixed(OCTAGON_WORDS[k], &[2]);
    let o2 = across(2);
    let o6 = across(6);
    for w in OCTAGON_WORDS {
        words.push(prefixed(&o2, w));
    }
    for w in OCTAGON_WORDS {
        words.push(prefixed(&o6, w));
    }
    // Far sides: the tile opposite the glued one in each added octagon.
    let f_plus = 12 + 4;
    let f_minus = 20 + 4;
    let block = Block::from_words(group, BlockKind::Composite, words, Some((f_minus, f_plus)))?;
    check_phat2(&block)?;
    Ok(block)
}

fn check_phat2(block: &Block) -> Result<(), ComplexError> {
    let c = &block.complex;
    if c.len() != 28 {
        return Err(ComplexError::Constraint("P2 must have 28 tiles"));
    }
    let (fm, fp) = block.faces();
    if c.side(fm, OCTAGON_SIDE) != Side::Wall || c.side(fp, OCTAGON_SIDE) != Side::Wall {
        return Err(ComplexError::Constraint("P2 gluing faces must be boundary octagon sides"));
    }
    let seq = super::angles::angle_sequence(c)?;
    let quarter = seq.components.iter().flat_map(|comp| comp.entries.iter()).filter(|&&m| m == 4).count();
    if quarter != 2 {
        return Err(ComplexError::Constraint("P2 must have exactly two pi/4 vertices"));
    }
    if super::symmetry::self_isometries(c).len() != 1 {
        return Err(ComplexError::Constraint("P2 must have no nontrivial self-isometry"));
    }
    Ok(())
}

/// All five block templates.
#[derive(Clone, Debug)]
pub struct BlockSet {
    pub triangle: Block,
    pub octagon: Block,
    pub half_octagon: Block,
    pub phat2: Block,
}

impl BlockSet {
    pub fn new(group: &TriangleGroup) -> Result<Self, ComplexError> {
        Ok(BlockSet {
            triangle: build_triangle(group),
            octagon: build_octagon(group),
            half_octagon: build_half_octagon(group),
            phat2: build_phat2(group)?,
        })
    }

    /// The block glued for a symbol of the shift (1 → P̂₁ = O, 2 → P̂₂).
    pub fn for_symbol(&self, symbol: u8) -> &Block {
        match symbol {
            1 => &self.octagon,
            2 => &self.phat2,
            _ => panic!("shift symbols are 1 and 2"),
        }
    }

    /// Tile counts (n₁, n₂).
    pub fn weights(&self) -> (usize, usize) {
        (self.octagon.tile_count(), self.phat2.tile_count())
    }
}

/// How the two ends of a glued word are closed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Ends {
    /// Compact polygon: the outer faces are walls.
    Closed,
    /// Window of an infinite polygon: the outer faces are cuts.
    Cut,
}

/// Glue blocks along a word over {1, 2}.
///
/// Tile 0 of the result is tile 0 of the first block, at the identity. Tiles
/// are numbered block by block in template order.
pub fn glue_blocks(blocks: &BlockSet, word: &[u8], ends: Ends) -> Result<TileComplex, ComplexError> {
    if word.is_empty() {
        return Err(ComplexError::EmptyWord);
    }
    let total: usize = word.iter().map(|&s| blocks.for_symbol(s).tile_count()).sum();
    let mut sides = Vec::with_capacity(total);
    let mut block_of = Vec::with_capacity(total);
    let mut odd = Vec::with_capacity(total);
    let mut offsets = Vec::with_capacity(word.len());
    // Parity of the group element placing the current block.
    let mut flip = false;
    for (i, &s) in word.iter().enumerate() {
        let b = blocks.for_symbol(s);
        let off = sides.len();
        offsets.push(off);
        if i > 0 {
            // g_{i+1} = g_i · τ⁺ · σ₃ · (τ⁻)⁻¹.
            let prev = blocks.for_symbol(word[i - 1]);
            let (_, prev_plus) = prev.faces();
            let (minus, _) = b.faces();
            flip ^= !(prev.complex.is_odd(prev_plus) ^ b.complex.is_odd(minus));
        }
        for t in 0..b.tile_count() {
            sides.push(b.complex.side_array(t).map(|side| match side {
                Side::Tile(u) => Side::Tile(off + u),
                other => other,
            }));
            block_of.push(i);
            odd.push(b.complex.is_odd(t) ^ flip);
        }
    }
    let end_side = match ends {
        Ends::Closed => Side::Wall,
        Ends::Cut => Side::Cut,
    };
    for i in 0..word.len() {
        let (minus, plus) = blocks.for_symbol(word[i]).faces();
        let plus_tile = offsets[i] + plus;
        let minus_tile = offsets[i] + minus;
        if i + 1 < word.len() {
            let (next_minus, _) = blocks.for_symbol(word[i + 1]).faces();
            let next_tile = offsets[i + 1] + next_minus;
            sides[plus_tile][OCTAGON_SIDE] = Side::Tile(next_tile);
            sides[next_tile][OCTAGON_SIDE] = Side::Tile(plus_tile);
        } else {
            sides[plus_tile][OCTAGON_SIDE] = end_side;
        }
        if i == 0 {
            sides[minus_tile][OCTAGON_SIDE] = end_side;
        }
    }
    Ok(TileComplex { sides, block_of, odd })
}
