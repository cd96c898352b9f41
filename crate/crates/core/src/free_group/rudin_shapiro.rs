use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{usage, Error, Result};
use crate::spectral::{generic_start, operator_norm, DenseMatrix, Relation, SpectralCertificate, DEFAULT_MAX_ITER};

pub const MAX_RS_LEVEL: u32 = 20;

/// `P_k`, `Q_k` from `P₀ = Q₀ = 1`, `P_{k+1} = P_k + z^{2^k} Q_k`,
/// `Q_{k+1} = P_k − z^{2^k} Q_k`.
///
/// The variant `Q_{k+1} = Q_k − z^{2^k} P_k` agrees up to `k = 1` but breaks
/// `|P_k|² + |Q_k|² = 2^{k+1}` from `k = 2` on; see `swapped_recursion_is_not_flat`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RudinShapiroPair {
    pub level: u32,
    pub p: Vec<i8>,
    pub q: Vec<i8>,
}

pub fn rudin_shapiro(k: u32) -> Result<RudinShapiroPair> {
    if k > MAX_RS_LEVEL {
        return Err(Error::Resource {
            what: format!("Rudin-Shapiro level {k}"),
            projected: 1u64 << k.min(63),
            cap: 1 << MAX_RS_LEVEL,
        });
    }
    let mut p = vec![1i8];
    let mut q = vec![1i8];
    for _ in 0..k {
        let mut p_next = p.clone();
        p_next.extend(&q);
        let mut q_next = p;
        q_next.extend(q.iter().map(|c| -c));
        p = p_next;
        q = q_next;
    }
    Ok(RudinShapiroPair { level: k, p, q })
}

impl RudinShapiroPair {
    pub fn all_unimodular(&self) -> bool {
        self.p.iter().chain(&self.q).all(|&c| c == 1 || c == -1)
    }
}

/// `Σ_m c_m z^m` at `z = e^{2πij/s}`. Coefficients are first folded by
/// `jm mod s` in integer arithmetic, so rounding does not grow with the degree.
fn eval_at_root(coeffs: &[i8], j: usize, s: usize) -> Complex64 {
    let mut folded = vec![0i64; s];
    for (m, &c) in coeffs.iter().enumerate() {
        folded[(m % s) * j % s] += c as i64;
    }
    folded
        .iter()
        .enumerate()
        .filter(|(_, &b)| b != 0)
        .map(|(r, &b)| Complex64::from_polar(b as f64, 2.0 * PI * r as f64 / s as f64))
        .sum()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlatnessReport {
    pub level: u32,
    pub samples: usize,
    /// `max | |P|² + |Q|² − 2^{k+1} |` over the samples.
    pub max_deviation: f64,
    pub max_abs_p: f64,
    /// `√(2^{k+1})`
    pub sup_bound: f64,
    pub tolerance: f64,
    pub pass: bool,
}

/// Checks `|P_k(z)|² + |Q_k(z)|² = 2^{k+1}` at `samples` equispaced points
/// of the unit circle.
pub fn flatness_check(pair: &RudinShapiroPair, samples: usize) -> Result<FlatnessReport> {
    if samples == 0 {
        return Err(usage("flatness check needs at least one sample"));
    }
    let target = 2f64.powi(pair.level as i32 + 1);
    let tolerance = 1e-9;
    let mut max_deviation: f64 = 0.0;
    let mut max_abs_p: f64 = 0.0;
    for j in 0..samples {
        let p = eval_at_root(&pair.p, j, samples).norm_sqr();
        let q = eval_at_root(&pair.q, j, samples).norm_sqr();
        max_deviation = max_deviation.max((p + q - target).abs());
        max_abs_p = max_abs_p.max(p.sqrt());
    }
    let sup_bound = target.sqrt();
    Ok(FlatnessReport {
        level: pair.level,
        samples,
        max_deviation,
        max_abs_p,
        sup_bound,
        tolerance,
        pass: max_deviation < tolerance && max_abs_p <= sup_bound * (1.0 + 1e-12),
    })
}

pub const HANKEL_NOTE: &str = "A_n (n = 2^k) is filled from the 2n coefficients of P_{k+1} so every \
anti-diagonal is +-1; the bound is ||P_{k+1}||_inf <= sqrt(2^{k+2}) = 2 sqrt(n), a factor sqrt(2) \
above sqrt(2n)";

/// `A_n(i, j) = c_{i+j}` with `c` the coefficients of `P_{k+1}` and `n = 2^k`.
#[derive(Debug, Clone)]
pub struct HankelMatrix {
    pub level: u32,
    pub size: usize,
    pub coeffs: Vec<i8>,
    pub matrix: DenseMatrix,
}

pub fn hankel_from_rs(k: u32) -> Result<HankelMatrix> {
    if k == 0 {
        return Err(usage("Hankel construction needs level k >= 1"));
    }
    if k >= MAX_RS_LEVEL {
        return Err(Error::Resource {
            what: format!("Hankel matrix at level {k}"),
            projected: 1u64 << (2 * k.min(31)),
            cap: 1 << (2 * (MAX_RS_LEVEL - 1)),
        });
    }
    let coeffs = rudin_shapiro(k + 1)?.p;
    let n = 1usize << k;
    let matrix = DenseMatrix::from_fn(n, n, |i, j| coeffs[i + j] as f64);
    Ok(HankelMatrix {
        level: k,
        size: n,
        coeffs,
        matrix,
    })
}

impl HankelMatrix {
    pub fn is_hankel(&self) -> bool {
        let n = self.size;
        (0..n).all(|i| (0..n).all(|j| i == 0 || j + 1 == n || self.matrix.get(i, j) == self.matrix.get(i - 1, j + 1)))
    }

    pub fn entries_pm_one(&self) -> bool {
        self.matrix.data().iter().all(|&x| x == 1.0 || x == -1.0)
    }
}

/// Certifies `‖A_n‖ ≤ 2√n` by power iteration.
pub fn hankel_certificate(h: &HankelMatrix, rel_tol: f64) -> SpectralCertificate {
    let it = operator_norm(&h.matrix, &generic_start(h.size), rel_tol, DEFAULT_MAX_ITER);
    let bound = 2.0 * (h.size as f64).sqrt();
    SpectralCertificate::from_iteration(
        format!("A_{} (RS level {})", h.size, h.level),
        &h.matrix,
        it,
        bound,
        Relation::AtMost,
        rel_tol,
    )
    .with_note(HANKEL_NOTE)
}

/// Kronecker power `a^{⊗d}`; refused beyond `cap` entries.
pub fn tensor_power(a: &DenseMatrix, d: u32, cap: u64) -> Result<DenseMatrix> {
    if d == 0 {
        return DenseMatrix::new(1, 1, vec![1.0]);
    }
    let (r, c) = (a.rows() as u64, a.cols() as u64);
    let entries = r.saturating_pow(d).saturating_mul(c.saturating_pow(d));
    if entries > cap {
        return Err(Error::Resource {
            what: format!("{d}-fold tensor power"),
            projected: entries,
            cap,
        });
    }
    let mut out = a.clone();
    for _ in 1..d {
        let (orow, ocol) = (out.rows(), out.cols());
        out = DenseMatrix::from_fn(orow * a.rows(), ocol * a.cols(), |i, j| {
            out.get(i / a.rows(), j / a.cols()) * a.get(i % a.rows(), j % a.cols())
        });
    }
    Ok(out)
}

/// `b ∘ b = J` for a `±1` matrix `b`.
pub fn schur_square_is_ones(b: &DenseMatrix) -> bool {
    b.schur(b)
        .map(|s| s.data().iter().all(|&x| x == 1.0))
        .unwrap_or(false)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TensorNormBound {
    pub d: u32,
    pub n: usize,
    pub factor_norm: f64,
    /// `‖A^{⊗d}‖ = ‖A‖^d`
    pub tensor_norm: f64,
    /// `(2n)^{d/2}`, the bound for a factor of norm `√(2n)`.
    pub nominal_bound: f64,
    /// `(2√n)^d`, the bound that holds for the `P_{k+1}` construction.
    pub carried_bound: f64,
    pub pass: bool,
}

/// Bounds `‖A_n^{⊗d}‖` from the per-factor certificate without forming the
/// tensor power.
pub fn tensor_norm_bound(cert: &SpectralCertificate, d: u32) -> TensorNormBound {
    let n = cert.rows;
    let tensor_norm = cert.norm.powi(d as i32);
    let carried_bound = cert.bound.powi(d as i32);
    TensorNormBound {
        d,
        n,
        factor_norm: cert.norm,
        tensor_norm,
        nominal_bound: (2.0 * n as f64).powf(d as f64 / 2.0),
        carried_bound,
        pass: cert.pass && tensor_norm <= carried_bound * (1.0 + cert.tolerance).powi(d as i32),
    }
}
