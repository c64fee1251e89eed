use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use hashbrown::HashMap;

use crate::coxeter::{right_mul_generator, Letter};
use crate::field::Mat3;

/// What lies across one side of a tile.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Side {
    /// Another tile of the complex.
    Tile(usize),
    /// A genuine wall of the polygon.
    Wall,
    /// A truncation face: the polygon continues beyond it but was not materialized.
    Cut,
}

impl Side {
    pub fn tile(self) -> Option<usize> {
        match self {
            Side::Tile(t) => Some(t),
            _ => None,
        }
    }

    pub fn is_boundary(self) -> bool {
        !matches!(self, Side::Tile(_))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ComplexError {
    /// Two tiles of the complex occupy the same position.
    Overlap { first: usize, second: usize },
    /// The combinatorial adjacency disagrees with the exact geometry.
    Inconsistent { tile: usize, side: usize },
    Disconnected,
    /// A construction postcondition failed.
    Constraint(&'static str),
    /// An angle sequence that no glued word produces.
    Unrecognized,
    EmptyWord,
}

impl fmt::Display for ComplexError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ComplexError::Overlap { first, second } => {
                write!(f, "tiles {first} and {second} overlap")
            }
            ComplexError::Inconsistent { tile, side } => {
                write!(f, "adjacency of tile {tile} across side {} is inconsistent", side + 1)
            }
            ComplexError::Disconnected => write!(f, "tile complex is disconnected"),
            ComplexError::Constraint(c) => write!(f, "construction constraint violated: {c}"),
            ComplexError::Unrecognized => write!(f, "angle sequence is not produced by any word"),
            ComplexError::EmptyWord => write!(f, "word must be nonempty"),
        }
    }
}

/// A connected union of tiles of the Γ_{T₄} tiling.
///
/// The structure is combinatorial: each tile knows what lies across each of
/// its three sides. Exact positions are recovered on demand by walking the
/// adjacency from a root tile of known matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TileComplex {
    pub(crate) sides: Vec<[Side; 3]>,
    /// Block each tile belongs to (0 for single-block complexes).
    pub(crate) block_of: Vec<usize>,
    /// Orientation parity of each tile relative to tile 0 (`true` = reversed).
    pub(crate) odd: Vec<bool>,
}

impl TileComplex {
    /// Build from a set of exact tile positions. Adjacency is found by lookup
    /// of `M·σ_k`; every unmatched side is a wall.
    pub fn from_matrices(tiles: &[Mat3]) -> Result<Self, ComplexError> {
        let mut index: HashMap<&Mat3, usize> = HashMap::new();
        for (i, m) in tiles.iter().enumerate() {
            if let Some(j) = index.insert(m, i) {
                return Err(ComplexError::Overlap { first: j, second: i });
            }
        }
        let mut sides = vec![[Side::Wall; 3]; tiles.len()];
        for (i, m) in tiles.iter().enumerate() {
            for (k, side) in sides[i].iter_mut().enumerate() {
                let n = right_mul_generator(m, k);
                if let Some(&j) = index.get(&n) {
                    *side = Side::Tile(j);
                }
            }
        }
        let odd = tiles
            .iter()
            .map(|m| m.determinant().sign() != tiles[0].determinant().sign())
            .collect();
        let c = TileComplex { sides, block_of: vec![0; tiles.len()], odd };
        c.check_connected()?;
        Ok(c)
    }

    /// `from_matrices` followed by block labels and truncation faces, for
    /// complexes read back from files.
    pub fn from_stored(tiles: &[Mat3], block_of: Vec<usize>, cuts: &[(usize, usize)]) -> Result<Self, ComplexError> {
        let mut c = Self::from_matrices(tiles)?;
        if block_of.len() != c.len() {
            return Err(ComplexError::Constraint("one block index per tile"));
        }
        c.block_of = block_of;
        for &(t, k) in cuts {
            if t >= c.len() || k >= 3 || c.sides[t][k] != Side::Wall {
                return Err(ComplexError::Inconsistent { tile: t, side: k });
            }
            c.sides[t][k] = Side::Cut;
        }
        Ok(c)
    }

    pub fn len(&self) -> usize {
        self.sides.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sides.is_empty()
    }

    pub fn side(&self, tile: usize, k: usize) -> Side {
        self.sides[tile][k]
    }

    pub fn side_array(&self, tile: usize) -> [Side; 3] {
        self.sides[tile]
    }

    pub fn sides(&self) -> &[[Side; 3]] {
        &self.sides
    }

    pub fn block_of(&self, tile: usize) -> usize {
        self.block_of[tile]
    }

    pub fn is_odd(&self, tile: usize) -> bool {
        self.odd[tile]
    }

    pub fn tiles_in_block(&self, block: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.len()).filter(move |&t| self.block_of[t] == block)
    }

    pub fn has_cuts(&self) -> bool {
        self.sides.iter().flatten().any(|s| *s == Side::Cut)
    }

    /// Coset action of a generator on tiles: step across side `k`, or stay
    /// put when that side is a wall. `None` when the step would cross a cut.
    #[inline]
    pub fn step(&self, tile: usize, k: Letter) -> Option<usize> {
        match self.sides[tile][k as usize] {
            Side::Tile(u) => Some(u),
            Side::Wall => Some(tile),
            Side::Cut => None,
        }
    }

    fn check_connected(&self) -> Result<(), ComplexError> {
        if self.is_empty() {
            return Err(ComplexError::Disconnected);
        }
        let mut seen = vec![false; self.len()];
        let mut stack = vec![0];
        seen[0] = true;
        let mut count = 1;
        while let Some(t) = stack.pop() {
            for s in &self.sides[t] {
                if let Side::Tile(u) = *s {
                    if !seen[u] {
                        seen[u] = true;
                        count += 1;
                        stack.push(u);
                    }
                }
            }
        }
        if count == self.len() {
            Ok(())
        } else {
            Err(ComplexError::Disconnected)
        }
    }

    /// Exact tile positions, given the position of `root`.
    pub fn matrices_from(&self, root: usize, root_matrix: &Mat3) -> Vec<Mat3> {
        let mut out: Vec<Option<Mat3>> = vec![None; self.len()];
        out[root] = Some(root_matrix.clone());
        let mut queue = alloc::collections::VecDeque::new();
        queue.push_back(root);
        while let Some(t) = queue.pop_front() {
            for k in 0..3 {
                if let Side::Tile(u) = self.sides[t][k] {
                    if out[u].is_none() {
                        let m = right_mul_generator(out[t].as_ref().unwrap(), k);
                        out[u] = Some(m);
                        queue.push_back(u);
                    }
                }
            }
        }
        out.into_iter().map(|m| m.expect("complex is connected")).collect()
    }

    /// Positions with `root` placed at the identity.
    pub fn matrices_rooted(&self, root: usize) -> Vec<Mat3> {
        self.matrices_from(root, &Mat3::identity())
    }

    /// Check that the combinatorial structure embeds in the tiling: positions
    /// are pairwise distinct, every recorded adjacency matches `M·σ_k`, and no
    /// boundary side hides a tile of the complex.
    pub fn verify_embedding(&self) -> Result<Vec<Mat3>, ComplexError> {
        self.check_connected()?;
        let mats = self.matrices_rooted(0);
        let mut index: HashMap<&Mat3, usize> = HashMap::new();
        for (i, m) in mats.iter().enumerate() {
            if let Some(j) = index.insert(m, i) {
                return Err(ComplexError::Overlap { first: j, second: i });
            }
        }
        for (t, m) in mats.iter().enumerate() {
            for k in 0..3 {
                let n = right_mul_generator(m, k);
                let found = index.get(&n).copied();
                let ok = match self.sides[t][k] {
                    Side::Tile(u) => found == Some(u),
                    Side::Wall | Side::Cut => found.is_none(),
                };
                if !ok {
                    return Err(ComplexError::Inconsistent { tile: t, side: k });
                }
            }
            let parity = m.determinant().sign() < 0;
            if parity != self.odd[t] {
                return Err(ComplexError::Inconsistent { tile: t, side: 0 });
            }
        }
        drop(index);
        Ok(mats)
    }

    /// All boundary sides `(tile, side)`, walls and cuts.
    pub fn boundary_sides(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (t, s) in self.sides.iter().enumerate() {
            for (k, side) in s.iter().enumerate() {
                if side.is_boundary() {
                    out.push((t, k));
                }
            }
        }
        out
    }
}
