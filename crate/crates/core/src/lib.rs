//! Valuation algebras, generic inference, and disagreement analysis.
//!
//! The crate is organised bottom-up:
//!
//! * [`universe`] and [`semiring`] hold variables, frames, assignments and value carriers.
//! * [`algebra`] defines the valuation-algebra contract and the axiom suite.
//! * [`relation`], [`potential`] and [`csp`] are concrete instances.
//! * [`inference`] solves `(φ1 ⊗ … ⊗ φn)↓D` naively and by variable elimination.
//! * [`lp`] decides exact rational feasibility with Farkas certificates.
//! * [`disagreement`] checks local, global and complete disagreement.
//! * [`contextuality`] classifies empirical models; [`builtins`] ships a model corpus.

pub mod algebra;
pub mod builtins;
pub mod contextuality;
pub mod csp;
pub mod disagreement;
pub mod error;
pub mod inference;
pub mod lp;
pub mod potential;
pub mod relation;
pub mod sampling;
pub mod semiring;
pub mod universe;

pub use error::{Error, Result};
