use serde::{Deserialize, Serialize};

use crate::error::{domain, usage, Result};

/// `p(x) = C x^α − β ln(1 + x)`.
pub fn p_func(alpha: f64, c: f64, beta: f64, x: f64) -> f64 {
    c * x.powf(alpha) - beta * x.ln_1p()
}

/// `q(x) = p(x) / x`, defined for `x > 0`.
pub fn q_func(alpha: f64, c: f64, beta: f64, x: f64) -> Result<f64> {
    if x <= 0.0 {
        return Err(domain(format!("q is defined on (0, inf), got x = {x}")));
    }
    Ok(p_func(alpha, c, beta, x) / x)
}

/// `K = (β² / (C α (1 − α)))^{1/α}`, the left end of the interval on which
/// `p` increases and `q` decreases.
pub fn k_threshold(alpha: f64, c: f64, beta: f64) -> f64 {
    (beta * beta / (c * alpha * (1.0 - alpha))).powf(1.0 / alpha)
}

/// Smallest admissible `β`: `max{1, 6 / (C α (1 − α))}`.
pub fn lemma_beta_floor(alpha: f64, c: f64) -> f64 {
    (6.0 / (c * alpha * (1.0 - alpha))).max(1.0)
}

fn check_lemma_hypotheses(alpha: f64, c: f64, beta: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha < 1.0) || c <= 0.0 || !c.is_finite() {
        return Err(usage(format!(
            "need 0 < alpha < 1 and C > 0, got alpha = {alpha}, C = {c}"
        )));
    }
    let floor = lemma_beta_floor(alpha, c);
    // β is often produced by the floor formula itself; allow its rounding.
    if beta < floor * (1.0 - 1e-12) {
        return Err(usage(format!(
            "beta = {beta} is below max{{1, 6/(C alpha (1 - alpha))}} = {floor}"
        )));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonotonicityReport {
    pub alpha: f64,
    #[serde(rename = "C")]
    pub c: f64,
    pub beta: f64,
    pub k: f64,
    pub lo: f64,
    pub hi: f64,
    pub step: f64,
    pub points: u64,
    pub p_violations: u64,
    pub q_violations: u64,
    /// Grid point where the first violation (of either kind) starts.
    pub first_violation: Option<f64>,
}

impl MonotonicityReport {
    pub fn passed(&self) -> bool {
        self.p_violations == 0 && self.q_violations == 0
    }
}

/// Checks on the grid `lo, lo + h, …, hi` that `p` is nondecreasing and `q`
/// is nonincreasing, up to the rounding error of evaluating `p`.
pub fn monotonicity_check(
    alpha: f64,
    c: f64,
    beta: f64,
    lo: f64,
    hi: f64,
    step: f64,
) -> Result<MonotonicityReport> {
    check_lemma_hypotheses(alpha, c, beta)?;
    let k = k_threshold(alpha, c, beta);
    if !(step > 0.0) || !(hi > lo) || lo <= 0.0 {
        return Err(usage("grid needs 0 < lo < hi and step > 0"));
    }
    if lo < k * (1.0 - 1e-9) {
        return Err(usage(format!("grid starts at {lo}, below K = {k}")));
    }
    Ok(scan(alpha, c, beta, lo, hi, step))
}

fn scan(alpha: f64, c: f64, beta: f64, lo: f64, hi: f64, step: f64) -> MonotonicityReport {
    // |fl(p(x)) − p(x)| is at most a few ulps of the two terms' magnitudes.
    let eval = |x: f64| {
        let a = c * x.powf(alpha);
        let b = beta * x.ln_1p();
        (a - b, 8.0 * f64::EPSILON * (a.abs() + b.abs()))
    };
    let steps = ((hi - lo) / step).floor() as u64;
    let mut grid: Vec<f64> = (0..=steps).map(|i| lo + i as f64 * step).collect();
    if grid.last().is_some_and(|&x| x < hi) {
        grid.push(hi);
    }

    let mut report = MonotonicityReport {
        alpha,
        c,
        beta,
        k: k_threshold(alpha, c, beta),
        lo,
        hi,
        step,
        points: grid.len() as u64,
        p_violations: 0,
        q_violations: 0,
        first_violation: None,
    };
    let mut prev = None;
    for x in grid {
        let (p, err) = eval(x);
        if let Some((px, pp, perr)) = prev {
            let tol = err + perr;
            let p_bad = p < pp - tol;
            let q_bad = p / x > pp / px + tol / px;
            report.p_violations += p_bad as u64;
            report.q_violations += q_bad as u64;
            if (p_bad || q_bad) && report.first_violation.is_none() {
                report.first_violation = Some(px);
            }
        }
        prev = Some((x, p, err));
    }
    report
}

/// `M = max { e^{p(t) − p(s) − p(r)} : t, s, r ∈ [0, 4K] ∩ Z }`, kept in log
/// form since it overflows `f64` for moderate parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MConstant {
    pub log_m: f64,
    pub k: f64,
    /// Largest integer in `[0, 4K]` (infinite when it overflows).
    pub grid_max: f64,
    pub ln_grid_max: f64,
    pub argmax_t: f64,
    pub argmin_s: f64,
}

impl MConstant {
    pub fn value(&self) -> f64 {
        self.log_m.exp()
    }
}

/// Beyond this, neighbouring integers are indistinguishable in `f64` and
/// points are handled through their logarithm.
const EXACT_INT: f64 = 4_503_599_627_370_496.0; // 2^52

/// Computes `M` from the shape of `p` instead of scanning the grid.
///
/// `p'(x)` has the sign of `g(x) = Cα (x^{α−1} + x^α) − β`, and
/// `x^{α−1} + x^α` falls then rises with its minimum at `(1−α)/α`. So `p`
/// rises on `[0, x₁]`, falls on `[x₁, x₂]` and rises after `x₂`, where
/// `x₁ < x₂` are the roots of `g` (absent when `g > 0` throughout). The
/// integer maximum of `p` on `[0, G]` sits next to `x₁` or at `G`; the
/// minimum sits at `0`, next to `x₂`, or at `G`. Roots are found in
/// `u = ln x` because `x₂` and `G` overflow for small `α`.
pub fn m_constant(alpha: f64, c: f64, beta: f64) -> MConstant {
    let k = k_threshold(alpha, c, beta);
    let ln_k = (beta * beta / (c * alpha * (1.0 - alpha))).ln() / alpha;
    let ln_top = 4f64.ln() + ln_k;
    let top = if ln_top < EXACT_INT.ln() {
        (4.0 * k).floor()
    } else {
        ln_top.exp()
    };
    let ln_grid_max = if top >= 1.0 { top.ln().min(ln_top) } else { f64::NEG_INFINITY };

    // p(e^u) without forming e^u
    let p_log = |u: f64| c * (alpha * u).exp() - beta * (u + (-u).exp().ln_1p());
    let g = |u: f64| c * alpha * (((alpha - 1.0) * u).exp() + (alpha * u).exp()) - beta;

    // (position, p) pairs
    let mut points = vec![(0.0, 0.0)];
    let push_near = |u: f64, points: &mut Vec<(f64, f64)>| {
        if u >= ln_grid_max {
            return;
        }
        if u < EXACT_INT.ln() {
            let f = u.exp().floor();
            for t in [f - 1.0, f, f + 1.0, f + 2.0] {
                if t >= 0.0 && t <= top {
                    points.push((t, p_func(alpha, c, beta, t)));
                }
            }
        } else {
            points.push((u.exp(), p_log(u)));
        }
    };
    let valley = ((1.0 - alpha) / alpha).ln();
    if g(valley) < 0.0 {
        let mut lo = valley - 1.0;
        while g(lo) < 0.0 {
            lo = valley - 2.0 * (valley - lo);
        }
        let mut hi = valley + 1.0;
        while g(hi) < 0.0 {
            hi = valley + 2.0 * (hi - valley);
        }
        push_near(bisect(&g, lo, valley), &mut points);
        push_near(bisect(&g, valley, hi), &mut points);
    }
    if top >= 1.0 {
        let p_top = if top < EXACT_INT {
            p_func(alpha, c, beta, top)
        } else {
            p_log(ln_top)
        };
        points.push((top, p_top));
    }

    let (mut arg_max, mut best_max) = points[0];
    let (mut arg_min, mut best_min) = points[0];
    for &(t, v) in &points[1..] {
        if v > best_max {
            best_max = v;
            arg_max = t;
        }
        if v < best_min {
            best_min = v;
            arg_min = t;
        }
    }
    MConstant {
        log_m: best_max - 2.0 * best_min,
        k,
        grid_max: top.max(0.0),
        ln_grid_max,
        argmax_t: arg_max,
        argmin_s: arg_min,
    }
}

/// Root of a sign change of `f` on `[lo, hi]`, to full double precision.
fn bisect(f: &impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let lo_sign = f(lo) > 0.0;
    loop {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            return mid;
        }
        if (f(mid) > 0.0) == lo_sign {
            lo = mid;
        } else {
            hi = mid;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    /// Triple loop over the whole grid, straight from the definition.
    fn m_brute(alpha: f64, c: f64, beta: f64) -> f64 {
        let top = (4.0 * k_threshold(alpha, c, beta)).floor() as u64;
        let p = |t: u64| p_func(alpha, c, beta, t as f64);
        let mut best = f64::NEG_INFINITY;
        for t in 0..=top {
            for s in 0..=top {
                for r in 0..=top {
                    best = best.max(p(t) - p(s) - p(r));
                }
            }
        }
        best
    }

    #[test]
    fn p_and_q_values() {
        assert_eq!(p_func(0.3, 7.0, 2.0, 0.0), 0.0);
        assert_relative_eq!(p_func(0.5, 24.0, 1.0, 4.0), 48.0 - 5f64.ln());
        assert_relative_eq!(
            q_func(0.5, 24.0, 1.0, 4.0).unwrap(),
            (48.0 - 5f64.ln()) / 4.0
        );
        assert!(matches!(q_func(0.5, 24.0, 1.0, 0.0), Err(crate::Error::Domain(_))));
    }

    #[test]
    fn k_threshold_values() {
        assert_relative_eq!(k_threshold(0.5, 24.0, 1.0), 1.0 / 36.0, max_relative = 1e-14);
        // homogeneity: β → tβ scales K by t^{2/α}
        let (a, c, b, t) = (0.3, 5.0, 2.0, 1.7);
        assert_relative_eq!(
            k_threshold(a, c, t * b),
            t.powf(2.0 / a) * k_threshold(a, c, b),
            max_relative = 1e-12
        );
        for beta in [1.0, 2.0, 3.5] {
            assert_relative_eq!(
                k_threshold(0.5, 24.0, beta),
                (beta * beta / 6.0).powi(2),
                max_relative = 1e-13
            );
        }
    }

    #[test]
    fn m_is_one_for_the_special_family() {
        let m = m_constant(0.5, 24.0, 1.0);
        assert_eq!(m.grid_max, 0.0);
        assert_eq!(m.value(), 1.0);
        // any weight with 4K < 1
        let m = m_constant(0.2, 100.0, 1.0);
        assert!(4.0 * m.k < 1.0);
        assert_eq!(m.log_m, 0.0);
    }

    #[test]
    fn m_matches_brute_force_triple_loop() {
        for (alpha, beta) in [(0.5, 3.0), (0.5, 2.0), (0.3, 2.0), (0.7, 2.5)] {
            let c = 6.0 / (beta * alpha * (1.0 - alpha));
            let fast = m_constant(alpha, c, beta);
            let slow = m_brute(alpha, c, beta);
            assert!(fast.grid_max >= 4.0, "grid too small to be interesting");
            assert_relative_eq!(fast.log_m, slow, max_relative = 1e-12);
        }
    }

    #[test]
    fn m_for_large_grid_is_finite_in_log_form() {
        // 4K ≈ 2.1e7 integers; exp(ln M) overflows.
        let m = m_constant(0.5, 1.0, 24.0);
        assert_eq!(m.grid_max, 21_233_664.0);
        assert!(m.log_m > 700.0 && m.log_m.is_finite());
        assert_eq!(m.argmax_t, m.grid_max);
        // the minimum sits where p' = 0, near √x = 48
        assert!((2200.0..2400.0).contains(&m.argmin_s), "{}", m.argmin_s);
        assert!(m.value().is_infinite());
        assert_relative_eq!(m.log_m, m_scan(0.5, 1.0, 24.0), max_relative = 1e-14);
    }

    /// One pass over every integer of `[0, 4K]`, max and min kept apart.
    fn m_scan(alpha: f64, c: f64, beta: f64) -> f64 {
        let top = (4.0 * k_threshold(alpha, c, beta)).floor() as u64;
        let (mut hi, mut lo) = (0.0f64, 0.0f64);
        for t in 0..=top {
            let v = p_func(alpha, c, beta, t as f64);
            hi = hi.max(v);
            lo = lo.min(v);
        }
        hi - 2.0 * lo
    }

    #[test]
    fn m_matches_full_scan() {
        for (alpha, c, beta) in [(0.5, 2.0, 5.0), (0.3, 4.0, 3.0), (0.8, 0.5, 20.0), (0.6, 10.0, 1.2)] {
            assert_relative_eq!(
                m_constant(alpha, c, beta).log_m,
                m_scan(alpha, c, beta),
                max_relative = 1e-14
            );
        }
    }

    #[test]
    fn m_handles_astronomical_grids() {
        let m = m_constant(0.05, 1.0, lemma_beta_floor(0.05, 1.0));
        assert!(m.grid_max > 1e60);
        assert!(m.log_m.is_finite() && m.log_m > 0.0);
        // 4K overflows f64 outright
        let m = m_constant(0.01, 1.0, lemma_beta_floor(0.01, 1.0));
        assert!(m.grid_max.is_infinite() && m.ln_grid_max.is_finite());
        assert!(m.log_m.is_finite() && m.log_m > 0.0);
    }

    #[test]
    fn monotonicity_lemma_examples() {
        let rep = monotonicity_check(0.5, 24.0, 1.0, 1.0 / 36.0, 100.0, 0.01).unwrap();
        assert!(rep.passed(), "{rep:?}");
        assert_eq!(rep.points, 9999);

        let (alpha, c): (f64, f64) = (0.3, 30.0);
        let beta = (6.0 / (c * alpha * (1.0 - alpha))).ceil();
        assert_eq!(beta, 1.0);
        let k = k_threshold(alpha, c, beta);
        let rep = monotonicity_check(alpha, c, beta, k, 50.0, 0.01).unwrap();
        assert!(rep.passed(), "{rep:?}");
    }

    #[test]
    fn monotonicity_guards() {
        // 6/(Cα(1−α)) = 24 here
        assert!(matches!(
            monotonicity_check(0.5, 1.0, 2.0, 1e6, 1e6 + 1.0, 0.1),
            Err(crate::Error::Usage(_))
        ));
        assert!(monotonicity_check(0.5, 24.0, 1.0, 0.0, 1.0, 0.1).is_err());
        assert!(monotonicity_check(0.5, 24.0, 1.0, 1.0, 0.5, 0.1).is_err());
    }

    #[test]
    fn scan_detects_decrease_outside_the_lemma_interval() {
        // p(x) = √x − 30 ln(1+x) decreases after its first critical point.
        let rep = scan(0.5, 1.0, 30.0, 1.0, 100.0, 0.5);
        assert!(rep.p_violations > 0);
        assert_eq!(rep.first_violation, Some(1.0));
    }
}
