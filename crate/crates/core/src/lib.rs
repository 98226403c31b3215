//! Jet spaces over Carnot groups, computed with exact rational arithmetic.
//!
//! The crate is layered bottom-up:
//!
//! - [`rat`], [`linalg`], [`mpoly`]: rationals, sparse matrices, multivariate polynomials.
//! - [`algebra`]: stratified Lie algebras, BCH products, the built-in catalog.
//! - [`pbw`]: PBW normal forms in the graded enveloping algebra and the map `tau`.
//! - [`hd`]: horizontal-derivative tensor spaces `HD^k(g;W)` and contractions.
//! - [`polyjet`]: polynomial realization (invariant derivatives, Taylor data, dual bases).
//! - [`jet`]: jet algebras and jet groups, the contact coframe, jets of functions.
//! - [`contact`]: contact checks, prolongation, de-prolongation, characteristics.
//! - [`embed`]: embedding a step `s+1` algebra into jets over its step-`s` quotient.
//! - [`io`]: JSON formats shared with the command-line tool.
//!
//! Data-parallel loops go through [`par`], which uses rayon when the `parallel`
//! feature is enabled and falls back to plain iteration otherwise.

pub mod algebra;
pub mod contact;
pub mod embed;
pub mod error;
pub mod hd;
pub mod io;
pub mod jet;
pub mod linalg;
pub mod mpoly;
pub mod par;
pub mod pbw;
pub mod polyjet;
pub mod rat;
pub mod scalar;

pub use algebra::{catalog, StratAlg};
pub use error::{Error, Result};
pub use mpoly::MPoly;
pub use rat::Rat;
