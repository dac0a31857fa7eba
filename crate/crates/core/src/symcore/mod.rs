//! Exact arithmetic, sparse polynomial rings, differential polynomials,
//! formal distribution calculus, and quotient rings with algebraic elements.

pub mod algfn;
pub mod jet;
pub mod linalg;
pub mod poly;
pub mod rat;

pub use algfn::{AlgError, AlgFn, AuxVar, BaseVar, QuotientRing};
pub use jet::{jet, jet_field, jet_order, DeltaDist, JetField, JetRing, LPoly, TwoPoint};
pub use linalg::{poly_bareiss_solve, RatMat};
pub use poly::{Mono, Poly, Var};
pub use rat::{binomial, factorial, Rat};
