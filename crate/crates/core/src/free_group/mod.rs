//! The free-group obstruction: flat Rudin–Shapiro polynomials, their Hankel
//! matrices, the kernel `Ω_β` on alternating words and the lower bound that
//! diverges when `2β < d`.

mod alternating;
mod rudin_shapiro;

pub use alternating::{
    divergence_sequence, omega_in_matrix, omega_lower_bound, omega_lower_bound_check,
    s_sum, write_divergence_csv, AdditivityCheck, AlternatingIndex, DivergencePoint,
    OmegaCrossCheck, OmegaIn, DEFAULT_INDEX_CAP, DEFAULT_OMEGA_ROWS_CAP,
};
pub use rudin_shapiro::{
    flatness_check, hankel_certificate, hankel_from_rs, rudin_shapiro, schur_square_is_ones,
    tensor_norm_bound, tensor_power, FlatnessReport, HankelMatrix, RudinShapiroPair,
    TensorNormBound, HANKEL_NOTE, MAX_RS_LEVEL,
};
