//! Self-contained complex linear algebra: extremal singular values of banded
//! or dense rectangular matrices, and polynomial roots.
//!
//! Everything here is a pure function of its inputs.

mod matrix;
mod roots;
mod svd;

pub use matrix::{Band, ComplexMatrix};
pub use roots::{polynomial_roots, polynomial_roots_with, RootConfig};
pub use svd::{
    extremal_gram_eigenvalue, extremal_singular_value, extremal_singular_value_with, Extremal,
    KernelConfig,
};

