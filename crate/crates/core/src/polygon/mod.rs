//! Tile complexes in the tiling by the base triangle: blocks, gluing, angle
//! sequences, reconstruction and self-isometries.

pub mod angles;
pub mod blocks;
pub mod complex;
pub mod reconstruct;
pub mod symmetry;

pub use angles::{angle_sequence, boundary_walks, iso_check, AngleSequence, BoundaryWalk, Component};
pub use blocks::{glue_blocks, Block, BlockKind, BlockSet, Ends};
pub use complex::{ComplexError, Side, TileComplex};
pub use reconstruct::{reconstruct_word, Calibration};
