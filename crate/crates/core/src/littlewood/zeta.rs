use serde::{Deserialize, Serialize};

use crate::error::{domain, usage, Result};
use crate::group::{BallTable, GroupDescriptor, GroupKind};

/// How the tail `Σ_{n>N} |Sₙ| / (1+n)^s` is bounded.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TailMajorant {
    /// `Zᵈ` gets `|Sₙ| ≤ d 2ᵈ (1+n)^{d−1}`; `F₂` is known to diverge;
    /// anything else is extrapolated from the last spheres and flagged.
    #[default]
    Auto,
    /// User-supplied bound `|Sₙ| ≤ coeff · (1+n)^degree` for `n ≥ 1`.
    SpherePower { coeff: f64, degree: f64 },
}

/// The enclosure `[P, P + T]` of `Σ_{x∈G} (1+τ(x))^{−s}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesBound {
    pub exponent: f64,
    pub cutoff: u32,
    /// `Σ_{n≤N} |Sₙ| (1+n)^{−s}`.
    pub partial: f64,
    /// Upper bound for the tail; infinite when the majorant diverges.
    pub tail: f64,
    pub lower: f64,
    pub upper: f64,
    /// False when the tail rests on an extrapolated majorant.
    pub rigorous: bool,
    pub diverges: bool,
    pub majorant: String,
}

impl SeriesBound {
    pub fn contains(&self, value: f64) -> bool {
        self.lower <= value && value <= self.upper
    }

    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }
}

/// Sphere sizes `|Sₙ|` for `n = 0..=cutoff` as floats, by closed form where
/// one exists and from the table otherwise.
pub fn sphere_sizes(
    desc: &GroupDescriptor,
    table: Option<&BallTable>,
    cutoff: u32,
) -> Result<Vec<f64>> {
    match desc.kind() {
        GroupKind::Zd { dim } => Ok((0..=cutoff)
            .map(|n| {
                if n == 0 {
                    1.0
                } else {
                    let n = n as f64;
                    (2.0 * n + 1.0).powi(dim as i32) - (2.0 * n - 1.0).powi(dim as i32)
                }
            })
            .collect()),
        GroupKind::Free2 => Ok((0..=cutoff)
            .map(|n| if n == 0 { 1.0 } else { 4.0 * 3f64.powi(n as i32 - 1) })
            .collect()),
        GroupKind::Heisenberg => {
            let table = table.ok_or_else(|| usage("H3(Z) sphere sizes need a BFS ball table"))?;
            if table.group() != desc {
                return Err(usage("ball table was built for a different group"));
            }
            if cutoff > table.radius() {
                return Err(usage(format!(
                    "zeta cutoff {cutoff} exceeds ball table radius {}",
                    table.radius()
                )));
            }
            Ok(table.sphere_sizes()[..=cutoff as usize]
                .iter()
                .map(|&s| s as f64)
                .collect())
        }
    }
}

/// Encloses the length-zeta series `Σ_{x∈G} (1+τ(x))^{−s}`.
///
/// The partial sum is exact up to rounding, which is padded into the upper
/// end. A majorant `|Sₙ| ≤ A (1+n)^k` gives the tail bound
/// `A ∫_N^∞ (1+x)^{k−s} dx = A (N+1)^{k+1−s} / (s−k−1)`, finite iff
/// `s > k+1`. Divergence is an error unless `allow_divergence` is set, in
/// which case the partial sum comes back with an infinite upper end.
pub fn length_zeta(
    desc: &GroupDescriptor,
    table: Option<&BallTable>,
    s: f64,
    cutoff: u32,
    majorant: TailMajorant,
    allow_divergence: bool,
) -> Result<SeriesBound> {
    if !s.is_finite() {
        return Err(usage(format!("zeta exponent must be finite, got {s}")));
    }
    let spheres = sphere_sizes(desc, table, cutoff)?;
    let mut partial = 0.0;
    for (n, size) in spheres.iter().enumerate() {
        partial += size * (1.0 + n as f64).powf(-s);
    }
    // every term past n = 0 carries a few ulps; summation adds one per term
    let pad = (cutoff as f64 + 3.0) * f64::EPSILON * (partial - 1.0);

    let (coeff, degree, rigorous, label) = match (majorant, desc.kind()) {
        (TailMajorant::SpherePower { coeff, degree }, _) => {
            if !(coeff >= 0.0 && coeff.is_finite() && degree.is_finite()) {
                return Err(usage("sphere majorant needs finite coeff >= 0 and degree"));
            }
            (coeff, degree, true, format!("|S_n| <= {coeff} (1+n)^{degree}"))
        }
        (TailMajorant::Auto, GroupKind::Zd { dim }) => {
            let coeff = dim as f64 * 2f64.powi(dim as i32);
            let degree = dim as f64 - 1.0;
            (coeff, degree, true, format!("|S_n| <= {coeff} (1+n)^{degree}"))
        }
        (TailMajorant::Auto, GroupKind::Free2) => {
            (f64::INFINITY, f64::INFINITY, true, "|S_n| = 4 3^(n-1)".into())
        }
        (TailMajorant::Auto, GroupKind::Heisenberg) => {
            if cutoff == 0 {
                return Err(usage("extrapolating the H3(Z) tail needs cutoff >= 1"));
            }
            // order of growth 4, so spheres grow like n^3
            let degree = 3.0;
            let coeff = ((cutoff / 2).max(1)..=cutoff)
                .map(|n| spheres[n as usize] / (1.0 + n as f64).powf(degree))
                .fold(0.0, f64::max);
            (
                coeff,
                degree,
                false,
                format!("extrapolated |S_n| ~ {coeff:.6} (1+n)^{degree}"),
            )
        }
    };

    let diverges = !(s > degree + 1.0);
    let tail = if diverges {
        f64::INFINITY
    } else {
        coeff * (cutoff as f64 + 1.0).powf(degree + 1.0 - s) / (s - degree - 1.0)
    };
    if diverges && !allow_divergence {
        return Err(domain(format!(
            "length zeta at s = {s} diverges under the majorant ({label})"
        )));
    }
    Ok(SeriesBound {
        exponent: s,
        cutoff,
        partial,
        tail,
        lower: partial,
        upper: partial + pad + tail,
        rigorous,
        diverges,
        majorant: label,
    })
}
