//! Spectral criterion for deciding whether sequences of the form
//! `(f(T) e_n)` in `l2(N)` are frames / Riesz bases, together with the
//! numerical machinery (exact finite sections, extremal singular values,
//! root finding, winding numbers) used to corroborate each verdict.
//!
//! Module map:
//!
//! * [`numkernel`]: complex banded linear algebra and polynomial roots.
//! * [`operators`]: shifts, banded Toeplitz, diagonal and weighted shift models.
//! * [`holocalc`]: polynomials, tail-bounded power series and `f(T)`.
//! * [`spectral`]: spectrum regions, zero-in-image tests, `sigma_ap` probes.
//! * [`framecheck`]: the verdict engine and frame-bound sweeps.

pub mod error;
pub mod framecheck;
pub mod holocalc;
pub mod numkernel;
pub mod operators;
pub mod spectral;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;
