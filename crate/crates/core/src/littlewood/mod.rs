//! The kernel `Ω = ω(xy) / (ω(x) ω(y))`, its Littlewood splitting, the
//! length-zeta series that controls its `T²` norm, and the resulting bounds
//! on `‖m‖_ε`.

mod bounds;
mod omega;
mod zeta;

pub use bounds::{
    beta_selection, m_eps_upper_exp, m_eps_upper_poly, operator_alg_verdict, t2_bound_poly,
    BoundResult, NotOperatorReason, Verdict, VerdictOptions,
};
pub use omega::{
    omega_matrix, verify_decomposition, DecompositionReport, OmegaRestriction, DEFAULT_OMEGA_CAP,
};
pub use zeta::{length_zeta, sphere_sizes, SeriesBound, TailMajorant};

/// `A_β` in `(a + b)^β ≤ A_β (a^β + b^β)` for `a, b ≥ 0`: `max{1, 2^{β−1}}`.
pub fn a_beta(beta: f64) -> f64 {
    2f64.powf(beta - 1.0).max(1.0)
}
