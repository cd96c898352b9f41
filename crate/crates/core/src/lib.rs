//! Numerical toolkit for weighted group algebras `ℓ¹(G, ω)` over finitely
//! generated groups.
//!
//! The crate is organised by subsystem:
//!
//! * [`group`]: exact arithmetic in `Zᵈ`, the discrete Heisenberg group and
//!   the free group on two generators, word lengths, BFS balls and growth fits.
//! * [`weight`]: radial weights, weighted `ℓ¹` norms, convolution and the
//!   submultiplicativity constants of the composite weight.
//! * [`littlewood`]: the kernel `Ω(x, y) = ω(xy) / (ω(x) ω(y))`, enclosures of
//!   the length-zeta series and upper bounds on the injective norm of the
//!   multiplication map.
//! * [`vn`]: von Neumann constants `(δ, L)` and a randomized stress test.
//! * [`free_group`]: Rudin–Shapiro polynomials, Hankel certificates and the
//!   divergent lower bound on the free group.

pub mod error;
pub mod free_group;
pub mod group;
pub mod littlewood;
pub mod spectral;
pub mod vn;
pub mod weight;

pub use error::{Error, Result};

/// Default value of the complex Grothendieck constant used in the bounds.
pub const DEFAULT_KG: f64 = 1.40491;
