//! Exact integer vectors, matrices, the cost order, the conformal order and
//! integer kernel lattices.

pub(crate) mod coef;
mod kernel;
mod matrix;
mod order;
mod vector;

#[cfg(test)]
pub(crate) use kernel::hermite_rows;
pub use kernel::kernel_basis;
pub use matrix::IntMatrix;
pub use order::{compare, CostOrder};
pub use vector::{conforms, sign_split, IntVector, SignSplit, VectorSet};
