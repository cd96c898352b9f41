use serde::{Deserialize, Serialize};

use super::{a_beta, length_zeta, SeriesBound, TailMajorant};
use crate::error::{domain, usage, Result};
use crate::group::{BallTable, GroupDescriptor, GroupKind, GrowthClass};
use crate::weight::{m_constant, WeightSpec};

/// `A_β (upper end of the zeta enclosure at s = 2β)^{1/2}`.
pub fn t2_bound_poly(beta: f64, zeta: &SeriesBound) -> Result<f64> {
    check_zeta(beta, zeta)?;
    Ok(a_beta(beta) * zeta.upper.sqrt())
}

fn check_zeta(beta: f64, zeta: &SeriesBound) -> Result<()> {
    if (zeta.exponent - 2.0 * beta).abs() > 1e-12 * (1.0 + beta.abs()) {
        return Err(usage(format!(
            "zeta was computed at s = {}, bound needs s = 2 beta = {}",
            zeta.exponent,
            2.0 * beta
        )));
    }
    if zeta.diverges {
        return Err(domain(format!("length zeta diverges at s = {}", zeta.exponent)));
    }
    Ok(())
}

/// An upper bound for `‖m‖_ε` and the ingredients behind it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundResult {
    pub weight: WeightSpec,
    pub kg: f64,
    pub beta: f64,
    /// `ln M`; zero for polynomial weights.
    pub log_m: f64,
    pub m: f64,
    /// `A_β` for polynomial weights, `2^{β−1}` for exponential ones.
    pub factor: f64,
    pub zeta: SeriesBound,
    pub bound: f64,
    pub log_bound: f64,
    pub rigorous: bool,
    /// `β` was raised above the selection formula to make the zeta series
    /// converge.
    pub beta_adjusted: bool,
}

/// `K_G A_β (Σ_x (1+τ(x))^{−2β})^{1/2}`.
pub fn m_eps_upper_poly(beta: f64, kg: f64, zeta: &SeriesBound) -> Result<BoundResult> {
    check_kg(kg)?;
    let t2 = t2_bound_poly(beta, zeta)?;
    let bound = kg * t2;
    Ok(BoundResult {
        weight: WeightSpec::Polynomial { beta },
        kg,
        beta,
        log_m: 0.0,
        m: 1.0,
        factor: a_beta(beta),
        zeta: zeta.clone(),
        bound,
        log_bound: bound.ln(),
        rigorous: zeta.rigorous,
        beta_adjusted: false,
    })
}

fn check_kg(kg: f64) -> Result<()> {
    if kg >= 1.0 && kg.is_finite() {
        Ok(())
    } else {
        Err(usage(format!("K_G must be a finite value >= 1, got {kg}")))
    }
}

/// `β = max{1, 6/(Cα(1−α)), (d + 1 − δ₁(λ))/2}`.
pub fn beta_selection(alpha: f64, c: f64, growth_order: u32, lambda_one: bool) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 1.0) || !(c > 0.0 && c.is_finite()) {
        return Err(usage(format!(
            "beta selection needs 0 < alpha < 1 and C > 0, got alpha = {alpha}, C = {c}"
        )));
    }
    let growth_term = (growth_order as f64 + if lambda_one { 0.0 } else { 1.0 }) / 2.0;
    Ok(1f64
        .max(6.0 / (c * alpha * (1.0 - alpha)))
        .max(growth_term))
}

/// `K_G M 2^{β−1} (Σ_x (1+τ(x))^{−2β})^{1/2}`, evaluated in log form.
pub fn m_eps_upper_exp(
    alpha: f64,
    c: f64,
    kg: f64,
    beta: f64,
    zeta: &SeriesBound,
) -> Result<BoundResult> {
    check_kg(kg)?;
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(usage(format!("exponential bound needs 0 < alpha < 1, got {alpha}")));
    }
    if beta < 1.0 {
        return Err(usage(format!("exponential bound needs beta >= 1, got {beta}")));
    }
    check_zeta(beta, zeta)?;
    let m = m_constant(alpha, c, beta);
    let log_bound =
        kg.ln() + m.log_m + (beta - 1.0) * std::f64::consts::LN_2 + 0.5 * zeta.upper.ln();
    let bound = if m.log_m == 0.0 {
        // keep the M = 1 case free of exp/ln round trips
        kg * 2f64.powf(beta - 1.0) * zeta.upper.sqrt()
    } else {
        log_bound.exp()
    };
    Ok(BoundResult {
        weight: WeightSpec::Exponential { alpha, c },
        kg,
        beta,
        log_m: m.log_m,
        m: m.value(),
        factor: 2f64.powf(beta - 1.0),
        zeta: zeta.clone(),
        bound,
        log_bound,
        rigorous: zeta.rigorous,
        beta_adjusted: false,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NotOperatorReason {
    AlphaZero,
    AlphaOne,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Verdict {
    InjectiveAlgebra {
        bound: BoundResult,
    },
    NotOperatorAlgebra {
        reason: NotOperatorReason,
        note: String,
    },
    OutsideTheoremHypotheses {
        note: String,
    },
}

impl Verdict {
    pub fn bound(&self) -> Option<&BoundResult> {
        match self {
            Verdict::InjectiveAlgebra { bound } => Some(bound),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct VerdictOptions {
    /// Zeta cutoff; defaults to 0 on `Zᵈ` (closed-form tail from the first
    /// sphere) and to the table radius elsewhere.
    pub cutoff: Option<u32>,
    pub majorant: TailMajorant,
}

/// Dispatches on the weight and the growth of the group.
pub fn operator_alg_verdict(
    desc: &GroupDescriptor,
    table: Option<&BallTable>,
    weight: &WeightSpec,
    kg: f64,
    opts: VerdictOptions,
) -> Result<Verdict> {
    weight.validate()?;
    check_kg(kg)?;
    let growth = GrowthClass::of(desc);
    let cutoff = || -> u32 {
        opts.cutoff.unwrap_or(match desc.kind() {
            GroupKind::Zd { .. } => 0,
            _ => table.map_or(0, |t| t.radius()),
        })
    };
    let zeta = |s: f64| length_zeta(desc, table, s, cutoff(), opts.majorant, false);

    match *weight {
        WeightSpec::Constant { .. } => Ok(Verdict::NotOperatorAlgebra {
            reason: NotOperatorReason::AlphaZero,
            note: "a constant weight gives an algebra isomorphic to l1(G), which is not \
                   Arens regular for infinite G"
                .into(),
        }),
        WeightSpec::Exponential { alpha: 0.0, .. } => Ok(Verdict::NotOperatorAlgebra {
            reason: NotOperatorReason::AlphaZero,
            note: "sigma_{0,C} = e^C is constant, so the algebra is isomorphic to l1(G), which \
                   is not Arens regular for infinite G"
                .into(),
        }),
        WeightSpec::Exponential { alpha: 1.0, .. } => Ok(Verdict::NotOperatorAlgebra {
            reason: NotOperatorReason::AlphaOne,
            note: "elements with tau(xy) = tau(x) + tau(y) exist at every length, so \
                   Omega = 1 on an infinite set and the algebra is not Arens regular"
                .into(),
        }),
        WeightSpec::Exponential { alpha, c } => {
            let GrowthClass::Polynomial { order, lambda_one } = growth else {
                return Ok(Verdict::OutsideTheoremHypotheses {
                    note: format!("{} has exponential growth", desc.name()),
                });
            };
            let mut beta = beta_selection(alpha, c, order, lambda_one)?;
            let mut adjusted = false;
            while !converges(order, lambda_one, beta) {
                beta += 0.5;
                adjusted = true;
            }
            let z = zeta(2.0 * beta)?;
            let mut bound = m_eps_upper_exp(alpha, c, kg, beta, &z)?;
            bound.beta_adjusted = adjusted;
            Ok(Verdict::InjectiveAlgebra { bound })
        }
        WeightSpec::Polynomial { beta } => match growth {
            GrowthClass::Polynomial { order, lambda_one } if converges(order, lambda_one, beta) => {
                let z = zeta(2.0 * beta)?;
                Ok(Verdict::InjectiveAlgebra {
                    bound: m_eps_upper_poly(beta, kg, &z)?,
                })
            }
            GrowthClass::Polynomial { order, lambda_one } => {
                let threshold = if lambda_one {
                    format!("beta > {}/2", order)
                } else {
                    format!("beta > ({} + 1)/2", order)
                };
                let note = match desc.kind() {
                    GroupKind::Zd { dim } if 2.0 * beta <= dim as f64 => format!(
                        "needs {threshold}; for Z^d with beta <= d/2 the algebra is known not \
                         to be injective (sharpness)"
                    ),
                    GroupKind::Heisenberg if beta <= 0.5 => format!(
                        "needs {threshold}; for H3(Z) with beta <= 1/2 the algebra is known \
                         not to be an operator algebra"
                    ),
                    _ => format!("needs {threshold}; the theorem is silent here"),
                };
                Ok(Verdict::OutsideTheoremHypotheses { note })
            }
            GrowthClass::Exponential => Ok(Verdict::OutsideTheoremHypotheses {
                note: "F2 has exponential growth; for 2 beta < d the Omega matrices on \
                       alternating words have unbounded lower bounds (see free-group)"
                    .into(),
            }),
        },
        WeightSpec::CompositeExpOverPoly { .. } => Ok(Verdict::OutsideTheoremHypotheses {
            note: "the composite weight only enters as the quotient sigma/omega_beta; \
                   its M constant is reported by weight-check"
                .into(),
        }),
    }
}

/// `λ = 1` and `2β > d`, or `λ < 1` and `2β > d + 1`.
fn converges(order: u32, lambda_one: bool, beta: f64) -> bool {
    let need = order as f64 + if lambda_one { 0.0 } else { 1.0 };
    2.0 * beta > need
}
