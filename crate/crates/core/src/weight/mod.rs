//! Radial weights on word-metric groups, the weighted `ℓ¹` algebra, and the
//! submultiplicativity constants of the composite weight `e^{Cτ^α}/(1+τ)^β`.
//!
//! Every weight here factors through the length function, so a weight is
//! evaluated from `τ(x)` alone. Values are carried as `ln ω` to keep
//! `e^{Cτ^α}` finite at large radii.

mod algebra;
mod composite;
mod submult;

use std::fmt;

use serde::{Deserialize, Serialize};

pub use algebra::{Algebra, WeightedElement};
pub use composite::{
    k_threshold, lemma_beta_floor, m_constant, monotonicity_check, p_func, q_func, MConstant,
    MonotonicityReport,
};
pub use submult::{check_submultiplicative, SubmultOptions, SubmultReport, DEFAULT_PAIR_CAP};

use crate::error::{usage, Result};

/// Parametric description of a radial weight.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum WeightSpec {
    /// `ω_β(x) = (1 + τ(x))^β`.
    Polynomial { beta: f64 },
    /// `σ_{α,C}(x) = e^{C τ(x)^α}`; for `α = 0` this is the constant `e^C`.
    Exponential {
        alpha: f64,
        #[serde(rename = "C")]
        c: f64,
    },
    /// `e^{p(τ(x))}` with `p(t) = C t^α − β ln(1 + t)`.
    CompositeExpOverPoly {
        alpha: f64,
        #[serde(rename = "C")]
        c: f64,
        beta: f64,
    },
    Constant { value: f64 },
}

impl WeightSpec {
    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            WeightSpec::Polynomial { beta } => beta >= 0.0 && beta.is_finite(),
            WeightSpec::Exponential { alpha, c } => {
                (0.0..=1.0).contains(&alpha) && c > 0.0 && c.is_finite()
            }
            WeightSpec::CompositeExpOverPoly { alpha, c, beta } => {
                alpha > 0.0 && alpha < 1.0 && c > 0.0 && c.is_finite() && beta >= 1.0
            }
            WeightSpec::Constant { value } => value > 0.0 && value.is_finite(),
        };
        if ok {
            Ok(())
        } else {
            Err(usage(format!("weight parameters out of range: {self}")))
        }
    }

    /// `ln ω` at length `tau`.
    pub fn log_eval(&self, tau: u64) -> f64 {
        let t = tau as f64;
        match *self {
            WeightSpec::Polynomial { beta } => beta * t.ln_1p(),
            WeightSpec::Exponential { alpha, c } => c * t.powf(alpha),
            WeightSpec::CompositeExpOverPoly { alpha, c, beta } => p_func(alpha, c, beta, t),
            WeightSpec::Constant { value } => value.ln(),
        }
    }

    pub fn eval(&self, tau: u64) -> f64 {
        match *self {
            WeightSpec::Polynomial { beta } => (1.0 + tau as f64).powf(beta),
            WeightSpec::Constant { value } => value,
            _ => self.log_eval(tau).exp(),
        }
    }

    /// `ln M` for the constant in `ω(xy) ≤ M ω(x) ω(y)`.
    ///
    /// Polynomial and exponential weights are submultiplicative (`M = 1`);
    /// the composite weight uses the grid maximum from [`m_constant`];
    /// a constant weight `c` has ratio exactly `1/c`.
    pub fn log_submult_constant(&self) -> f64 {
        match *self {
            WeightSpec::Polynomial { .. } | WeightSpec::Exponential { .. } => 0.0,
            WeightSpec::CompositeExpOverPoly { alpha, c, beta } => {
                m_constant(alpha, c, beta).log_m
            }
            WeightSpec::Constant { value } => -value.ln(),
        }
    }
}

impl fmt::Display for WeightSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            WeightSpec::Polynomial { beta } => write!(f, "polynomial(beta={beta})"),
            WeightSpec::Exponential { alpha, c } => write!(f, "exponential(alpha={alpha}, C={c})"),
            WeightSpec::CompositeExpOverPoly { alpha, c, beta } => {
                write!(f, "composite(alpha={alpha}, C={c}, beta={beta})")
            }
            WeightSpec::Constant { value } => write!(f, "constant({value})"),
        }
    }
}
