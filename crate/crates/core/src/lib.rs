//! Arrangements of the real roots of a real polynomial `P` and of its `s`-th
//! derivative: extraction from concrete polynomials, the Rolle-root
//! admissibility test, enumeration of admissible chains, and numerical
//! realization of a target chain.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod poly;
pub mod arrangement;
pub mod admissibility;
pub mod config;
pub mod realizer;
pub mod verify;
pub mod analysis;
