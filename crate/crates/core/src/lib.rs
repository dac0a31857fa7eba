//! Exact-arithmetic symbolic engine for classical W-algebras and algebraic
//! Frobenius-manifold potentials built from nilpotent elements of semisimple
//! type in simple Lie algebras.
//!
//! The pipeline runs: matrix Lie algebra -> sl2 triple and gradings ->
//! Slodowy-slice invariants and finite Poisson structures -> loop-space
//! reduction of the affine bihamiltonian structure -> restriction to the
//! space of common equilibrium points -> flat pencil of metrics -> potential.

pub mod dsred;
pub mod frob;
pub mod liealg;
pub mod nilstruct;
pub mod slice;
pub mod symcore;

pub use symcore::rat::Rat;
