//! Dense complex linear-algebra kernels: eigenvalues, rank-revealing SVD,
//! and linear solves. Everything else in the crate is built on these.
//!
//! All kernels are implemented in-tree; the scalar type is
//! [`num_complex::Complex64`].

mod cmatrix;
mod eig;
mod sampling;
mod solve;
mod svd;

pub use cmatrix::CMatrix;
pub use eig::eig;
pub use sampling::{random_matrix, random_orthonormal, random_unitary};
pub use solve::{inverse, resolvent, solve};
pub use svd::{condition_number, op_norm, singular_values, svd, svd_rank, Svd, SvdRank, DEFAULT_RANK_TOL};

use num_complex::Complex64;

/// Symmetric Hausdorff distance between two finite point sets in the plane.
/// Empty vs empty is 0; empty vs nonempty is infinite.
pub fn hausdorff(a: &[Complex64], b: &[Complex64]) -> f64 {
    match (a.is_empty(), b.is_empty()) {
        (true, true) => return 0.0,
        (true, false) | (false, true) => return f64::INFINITY,
        _ => {}
    }
    let one_sided = |from: &[Complex64], to: &[Complex64]| -> f64 {
        from.iter()
            .map(|p| to.iter().map(|q| (p - q).norm()).fold(f64::INFINITY, f64::min))
            .fold(0.0, f64::max)
    };
    one_sided(a, b).max(one_sided(b, a))
}
