//! Numerical laboratory for multivariate Polya-type inequalities.
//!
//! The crate computes the objects that relate the transfinite diameter of a
//! compact set `K ⊂ ℂⁿ` to the Hankel-like determinants of an analytic
//! functional:
//!
//! * [`indexcomb`]: graded-lexicographic multi-index enumeration and the
//!   counting sequences `m_s`, `N_s`, `l_s`.
//! * [`domains`]: model compact sets with membership and sampling.
//! * [`vandermonde`]: log-domain Vandermondians, Fekete search and `d_s(K)`.
//! * [`measures`]: moments, Gram matrices, `Z_s(K, μ)` and the
//!   Bernstein–Markov ratio.
//! * [`functionals`]: germ coefficients, the torus contour transform,
//!   Hankel determinants and the Polya quantity `D_i`.

pub mod domains;
pub mod error;
pub mod exact;
pub mod functionals;
pub mod indexcomb;
pub mod linalg;
pub mod measures;
pub mod quadrature;
pub mod rng;
pub mod vandermonde;

pub use error::{Error, Result};
pub use linalg::LogDet;

/// Complex scalar used throughout.
pub type C64 = num_complex::Complex64;

/// A point of `ℂⁿ`.
pub type Point = Vec<C64>;
