//! Spectral distances under spectral truncation of the Dirac operator.
//!
//! The distance between two states φ, ψ of an algebra (or order-unit space)
//! represented on the same Hilbert space as a Dirac-type operator D is
//!
//! ```text
//! d(φ, ψ) = sup { |φ(a) − ψ(a)| : ‖[D, a]‖ ≤ 1 }
//! ```
//!
//! This crate builds the two worked truncated geometries — the circle with a
//! Fourier-mode cut-off and the Berezin-quantized plane with a Fock-level
//! cut-off — and solves the supremum as a spectral-norm-constrained convex
//! program with feasibility certificates.
//!
//! Module map:
//! - [`matops`]: dense Hermitian eigendecomposition, operator norms via the
//!   Hermitian dilation, Toeplitz construction, nullspaces of linear maps.
//! - [`geometry`]: truncated circle and Berezin geometries, eigenvalue
//!   counting, the Berezin transform.
//! - [`states`]: Fejér states, point evaluations, coherent states, truncated
//!   normal states and first moments.
//! - [`seminorm`]: the commutator seminorms that constrain the optimization.
//! - [`solver`]: cutting-plane maximization with certificates.
//! - [`distances`]: the assembled distance computations.

pub mod distances;
pub mod error;
pub mod geometry;
pub mod matops;
pub mod seminorm;
pub mod solver;
pub mod states;

pub use error::{CoreError, Result};
