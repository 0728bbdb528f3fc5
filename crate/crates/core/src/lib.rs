//! Numerical core for solutions of the Eikonal equation `|∇u| = 1` on planar
//! rectangles.
//!
//! The crate is `no_std` and only needs `alloc`. It provides:
//!
//! * uniform cell-centred grids and masked scalar / vector / matrix fields
//!   ([`grid`], [`field`], [`fd`], [`mollify`], [`quadrature`]);
//! * closed-form Eikonal generators and the half-space indicator ([`eikonal`]);
//! * entropies, their production and the associated identities ([`entropy`]);
//! * the matrix set `K`, the Beltrami form and the `Γ` transform ([`inclusion`]);
//! * Gagliardo seminorms, difference quotients and the Aviles–Giga energy
//!   ([`sobolev`]);
//! * Lipschitz maps, singularity detection and vortex fitting ([`regularity`]).
//!
//! Every operation is a pure function of its inputs. Loops run in a fixed order
//! so every sum is reproducible bit for bit.
#![no_std]
#![forbid(unsafe_code)]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod eikonal;
pub mod entropy;
pub mod error;
pub mod fd;
pub mod field;
pub mod grid;
pub mod inclusion;
pub mod jet;
pub mod mollify;
pub mod quadrature;
pub mod regularity;
pub mod sobolev;

pub(crate) mod math;

pub use error::{Error, Result};
pub use field::{Field2D, FieldValue, Linear, Mat2, MatrixField2D, ScalarField2D, VectorField2D};
pub use grid::GridSpec;
