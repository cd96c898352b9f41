use serde::{Deserialize, Serialize};

use super::{BallTable, GroupDescriptor, GroupElement, GroupKind, WordMetric};
use crate::error::{usage, Error, Result};

/// Least-squares fit of `log |Fⁿ|` against `log n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrowthFit {
    pub exponent: f64,
    /// Root-mean-square residual of the log-log fit.
    pub residual: f64,
    pub n_min: u32,
    pub n_max: u32,
}

/// Growth type of a group as far as the theory needs it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum GrowthClass {
    /// `λ f(n) ≤ |Fⁿ| ≤ f(n)` with `deg f = order`. `lambda_one` is true only
    /// when `λ = 1` is known to be attainable.
    Polynomial { order: u32, lambda_one: bool },
    Exponential,
}

impl GrowthClass {
    /// What is known in closed form about the three supported groups.
    pub fn of(desc: &GroupDescriptor) -> Self {
        match desc.kind() {
            GroupKind::Zd { dim } => GrowthClass::Polynomial {
                order: dim as u32,
                lambda_one: true,
            },
            // d(H₃) = 1·rank(Z²) + 2·rank(Z) = 4; no explicit (f, λ) pair known.
            GroupKind::Heisenberg => GrowthClass::Polynomial {
                order: bass_guivarch(&[(1, 2), (2, 1)]).unwrap_or(4) as u32,
                lambda_one: false,
            },
            GroupKind::Free2 => GrowthClass::Exponential,
        }
    }
}

/// Slope of `log |Fⁿ|` against `log n` over `n ∈ [n_min, N]`.
///
/// `n_min` defaults to `N / 2` (at least 1).
pub fn growth_order_fit(table: &BallTable, n_min: Option<u32>) -> Result<GrowthFit> {
    let n_max = table.radius();
    let n_min = n_min.unwrap_or(n_max / 2).max(1);
    if n_max < n_min + 4 {
        return Err(usage(format!(
            "growth fit needs radius >= n_min + 4 = {}, table radius is {n_max}",
            n_min + 4
        )));
    }
    let cumulative = table.cumulative();
    let pts: Vec<(f64, f64)> = (n_min..=n_max)
        .map(|n| ((n as f64).ln(), (cumulative[n as usize] as f64).ln()))
        .collect();
    let m = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let sxy: f64 = pts.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = pts.iter().map(|(x, _)| (x - mx).powi(2)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss: f64 = pts
        .iter()
        .map(|(x, y)| (y - intercept - slope * x).powi(2))
        .sum();
    Ok(GrowthFit {
        exponent: slope.max(0.0),
        residual: (rss / m).sqrt(),
        n_min,
        n_max,
    })
}

/// Order of growth of a nilpotent group from the ranks of its lower central
/// series quotients: `Σ k · rank(G_k / G_{k+1})`.
pub fn bass_guivarch(ranks: &[(u32, u32)]) -> Result<u64> {
    let mut seen: Vec<u32> = ranks.iter().map(|r| r.0).collect();
    seen.sort_unstable();
    if seen.windows(2).any(|w| w[0] == w[1]) || seen.first() == Some(&0) {
        return Err(usage("lower central series levels must be distinct and positive"));
    }
    Ok(ranks.iter().map(|&(k, r)| k as u64 * r as u64).sum())
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct TriangleReport {
    pub checked: u64,
    /// Pairs whose product length could not be computed.
    pub skipped: u64,
    pub violations: u64,
    /// Up to ten offending pairs, as normal forms.
    pub examples: Vec<(String, String)>,
}

/// Checks `|τ(x) − τ(y)| ≤ τ(xy) ≤ τ(x) + τ(y)` for every pair.
pub fn triangle_check<I>(metric: &WordMetric, pairs: I) -> Result<TriangleReport>
where
    I: IntoIterator<Item = (GroupElement, GroupElement)>,
{
    let mut report = TriangleReport::default();
    for (x, y) in pairs {
        let xy = x.multiply(&y)?;
        let (tx, ty, txy) = match (metric.length(&x), metric.length(&y), metric.length(&xy)) {
            (Ok(a), Ok(b), Ok(c)) => (a, b, c),
            (Err(Error::OutOfRange { .. }), _, _)
            | (_, Err(Error::OutOfRange { .. }), _)
            | (_, _, Err(Error::OutOfRange { .. })) => {
                report.skipped += 1;
                continue;
            }
            (Err(e), _, _) | (_, Err(e), _) | (_, _, Err(e)) => return Err(e),
        };
        report.checked += 1;
        if txy > tx + ty || tx.abs_diff(ty) > txy {
            report.violations += 1;
            if report.examples.len() < 10 {
                report.examples.push((x.to_string(), y.to_string()));
            }
        }
    }
    Ok(report)
}

/// All ordered pairs from `ball(r)` of a table.
pub fn exhaustive_pairs(
    table: &BallTable,
    r: u32,
) -> impl Iterator<Item = (GroupElement, GroupElement)> + '_ {
    let ball = table.ball(r);
    ball.iter()
        .flat_map(move |x| ball.iter().map(move |y| (x.clone(), y.clone())))
}

/// A pair with `τ(x) = n`, `τ(y) = m` and `τ(xy) = m + n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdditivityWitness {
    pub x: GroupElement,
    pub y: GroupElement,
    pub tau_x: u64,
    pub tau_y: u64,
    pub tau_xy: u64,
}

/// Factors the first element of the `(m+n)`-sphere through its BFS parent
/// chain. The prefix of length `n` is `x` and the remaining suffix is `y`;
/// since `τ(xy) = m + n ≤ τ(x) + τ(y)` both lengths are forced.
///
/// Returns `None` only when the `(m+n)`-sphere is empty.
pub fn additivity_witness(
    table: &BallTable,
    m: u32,
    n: u32,
) -> Result<Option<AdditivityWitness>> {
    if m < 2 || n < 2 {
        return Err(usage("additivity witness needs m, n >= 2"));
    }
    if table.radius() < m + n {
        return Err(usage(format!(
            "additivity witness needs a ball of radius {}, table radius is {}",
            m + n,
            table.radius()
        )));
    }
    let Some(a) = table.sphere(m + n).first() else {
        return Ok(None);
    };
    let x = table
        .ancestor(a, n)
        .expect("stored element has ancestors at every depth")
        .clone();
    let y = x.inverse().multiply(a)?;
    let tau = |g: &GroupElement| -> Result<u64> {
        match table.length_of(g) {
            Some(l) => Ok(l as u64),
            None => super::word_length(g, table.group(), Some(table)),
        }
    };
    Ok(Some(AdditivityWitness {
        tau_x: tau(&x)?,
        tau_y: tau(&y)?,
        tau_xy: tau(a)?,
        x,
        y,
    }))
}
