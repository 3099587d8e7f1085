//! Exact linear algebra: dense matrices, row reduction, canonical subspaces
//! and quotient coordinates.

mod matrix;
mod subspace;

pub use matrix::{
    add_vectors, axpy, dot, is_zero_vector, rref, scale_vector, solve, sub_vectors, unit_vector,
    zero_vector, Matrix, Rref, Vector,
};
pub use subspace::{kernel, quotient_coords, QuotientCoords, Subspace};
