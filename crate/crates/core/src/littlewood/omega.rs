use serde::{Deserialize, Serialize};

use super::a_beta;
use crate::error::{usage, Error, Result};
use crate::group::{word_length, BallTable, GroupElement};
use crate::spectral::DenseMatrix;
use crate::weight::WeightSpec;

/// Default cap on `|ball(R)|²` matrix entries.
pub const DEFAULT_OMEGA_CAP: u64 = 25_000_000;

/// `Ω(x, y) = ω(xy) / (ω(x) ω(y))` on `ball(R) × ball(R)`.
#[derive(Debug, Clone)]
pub struct OmegaRestriction {
    pub weight: WeightSpec,
    pub radius: u32,
    pub elements: Vec<GroupElement>,
    pub lengths: Vec<u64>,
    pub matrix: DenseMatrix,
}

/// Builds `Ω` on `ball(R)` in parallel over rows. Product lengths come from
/// the closed form or from the table, which then needs radius `2R`.
pub fn omega_matrix(
    weight: &WeightSpec,
    table: &BallTable,
    radius: u32,
    cap: u64,
) -> Result<OmegaRestriction> {
    weight.validate()?;
    if radius > table.radius() {
        return Err(usage(format!(
            "Omega radius {radius} exceeds table radius {}",
            table.radius()
        )));
    }
    let elements = table.ball(radius).to_vec();
    let n = elements.len();
    let entries = (n as u64).saturating_mul(n as u64);
    if entries > cap {
        return Err(Error::Resource {
            what: format!("Omega matrix on ball({radius})"),
            projected: entries,
            cap,
        });
    }
    let desc = table.group();
    if !desc.has_closed_form_length() && table.radius() < 2 * radius {
        return Err(usage(format!(
            "Omega on ball({radius}) of {} needs a table of radius {}",
            desc.name(),
            2 * radius
        )));
    }
    let lengths: Vec<u64> = (0..n).map(|i| table.length_at(i) as u64).collect();
    let log_w: Vec<f64> = lengths.iter().map(|&t| weight.log_eval(t)).collect();

    let matrix = DenseMatrix::from_fn(n, n, |i, j| {
        let xy = elements[i]
            .multiply(&elements[j])
            .expect("ball elements share a group");
        let tau = word_length(&xy, desc, Some(table)).expect("product inside ball(2R)");
        (weight.log_eval(tau) - log_w[i] - log_w[j]).exp()
    });
    Ok(OmegaRestriction {
        weight: *weight,
        radius,
        elements,
        lengths,
        matrix,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecompositionReport {
    pub beta: f64,
    pub a_beta: f64,
    pub radius: u32,
    /// Entries where `|f₁| > w₁` or `|f₂| > w₂`.
    pub entrywise_violations: u64,
    /// `max |f₁ + f₂ − Ω| / Ω`.
    pub max_reconstruction_error: f64,
    /// `sup_y (Σ_x |f₁(x, y)|²)^{1/2}`.
    pub column_sup_f1: f64,
    /// `sup_x (Σ_y |f₂(x, y)|²)^{1/2}`.
    pub row_sup_f2: f64,
    /// `A_β (Σ_{x ∈ ball(R)} (1+τ(x))^{−2β})^{1/2}`.
    pub restricted_bound: f64,
    pub pass: bool,
}

/// Splits `Ω_β = f₁ + f₂` with `f₁ = Ω w₁/(w₁+w₂)`, `f₂ = Ω w₂/(w₁+w₂)`,
/// `w₁(x,y) = A_β (1+τ(x))^{−β}`, `w₂(x,y) = A_β (1+τ(y))^{−β}`, and checks
/// the bounds that make `Ω_β` a Littlewood multiplier.
pub fn verify_decomposition(omega: &OmegaRestriction, beta: f64) -> Result<DecompositionReport> {
    match omega.weight {
        WeightSpec::Polynomial { beta: b } if b == beta => {}
        _ => {
            return Err(usage(format!(
                "decomposition needs the polynomial weight with beta = {beta}, got {}",
                omega.weight
            )))
        }
    }
    let a = a_beta(beta);
    let w: Vec<f64> = omega
        .lengths
        .iter()
        .map(|&t| a * (1.0 + t as f64).powf(-beta))
        .collect();
    let n = w.len();
    let m = &omega.matrix;

    let mut violations = 0u64;
    let mut recon: f64 = 0.0;
    let mut col_sq = vec![0.0; n];
    let mut row_sup_sq: f64 = 0.0;
    for i in 0..n {
        let mut row_sq = 0.0;
        for j in 0..n {
            let om = m.get(i, j);
            let (w1, w2) = (w[i], w[j]);
            let f1 = om * w1 / (w1 + w2);
            let f2 = om * w2 / (w1 + w2);
            if f1 > w1 * (1.0 + 1e-12) || f2 > w2 * (1.0 + 1e-12) {
                violations += 1;
            }
            recon = recon.max((f1 + f2 - om).abs() / om);
            col_sq[j] += f1 * f1;
            row_sq += f2 * f2;
        }
        row_sup_sq = row_sup_sq.max(row_sq);
    }
    let column_sup_f1 = col_sq.iter().fold(0.0f64, |a, &b| a.max(b)).sqrt();
    let row_sup_f2 = row_sup_sq.sqrt();
    let restricted_bound = w.iter().map(|x| x * x).sum::<f64>().sqrt();
    let slack = 1.0 + 1e-12;
    let pass = violations == 0
        && recon <= 4.0 * f64::EPSILON
        && column_sup_f1 <= restricted_bound * slack
        && row_sup_f2 <= restricted_bound * slack;
    Ok(DecompositionReport {
        beta,
        a_beta: a,
        radius: omega.radius,
        entrywise_violations: violations,
        max_reconstruction_error: recon,
        column_sup_f1,
        row_sup_f2,
        restricted_bound,
        pass,
    })
}
