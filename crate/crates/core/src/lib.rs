//! Exact invariants of negative definite intersection matrices arising as
//! resolution graphs of normal surface singularities.
//!
//! Matrices ([`IntersectionMatrix`]) are built from star-shaped specs
//! ([`StarSpec`]), Hirzebruch–Jung chains ([`hj`]) or the named families in
//! [`catalog`]. From a matrix one gets the discriminant group
//! ([`lattice::discriminant_group`]), the fundamental and canonical cycles
//! ([`cycles`]) and Mumford pullbacks. [`verify`] runs seeded sweeps that
//! compare computed invariants against closed-form predictions.
//!
//! ```
//! use singres_core::{catalog, cycles, lattice};
//!
//! let e8 = catalog::brieskorn(2, 3, 5).unwrap();
//! assert_eq!(e8.matrix.n(), 8);
//! assert!(lattice::discriminant_group(&e8.matrix).is_trivial());
//! assert_eq!(cycles::fundamental_genus(&e8.matrix).unwrap(), 0.into());
//! ```

#![allow(clippy::needless_range_loop)]

pub mod catalog;
pub mod cycles;
pub mod hj;
pub mod json;
pub mod lattice;
pub mod linalg;
pub mod matrix;
pub mod star;
pub mod verify;

pub use catalog::{CatalogEntry, CatalogError, Status};
pub use hj::{ChainSpec, FractionType, HjTriple, ReducedFraction};
pub use lattice::{AbelianGroup, Cokernel};
pub use matrix::{DualGraph, IntersectionMatrix, MatrixError};
pub use star::{StarError, StarSpec};
