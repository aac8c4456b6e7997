//! Geometric multigrid on agglomerated polygonal meshes for the lowest-order
//! virtual element discretization of the Poisson problem on the unit square.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod agglomeration;
pub mod bench;
pub mod error;
pub mod mesh;
pub mod solver;
pub mod sparse;
pub mod transfer;
pub mod vem;

pub use error::{Error, Result};
