//! Test sets and Graver bases for families of integer programs, and their use
//! in building opportunity cost matrices for two-stage stochastic integer
//! programs.
//!
//! Everything is computed over exact integers. Lattice vectors stand in for
//! binomials: a vector `v` represents the pair of monomials given by its
//! positive and negative parts, so no polynomial type is needed.

pub mod augment;
pub mod cli;
pub mod error;
pub mod graver;
pub mod groebner;
pub mod instances;
pub mod json;
pub mod lattice;
pub mod opcost;
pub mod oracle;
pub mod toric;

pub use error::{Error, Result};
pub use lattice::{compare, conforms, kernel_basis, sign_split, CostOrder, IntMatrix, IntVector, SignSplit, VectorSet};
