//! Exact geometry of the (4,4,4) triangle group and the invariant random
//! subgroups built from glued polygons in its tiling.
#![no_std]
extern crate alloc;

pub mod coxeter;
pub mod disk;
pub mod envelope;
pub mod field;
pub mod irs;
pub mod polygon;
pub mod shift;
