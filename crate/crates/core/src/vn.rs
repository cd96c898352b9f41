//! Von Neumann constants `(δ, L)` from `‖m‖_ε` bounds, polynomial calculus
//! in commutative weighted algebras, and a randomized stress test of
//! `‖p(a₁, …, aₙ)‖ ≤ L ‖p‖_∞`.

use std::f64::consts::{E, PI};
use std::sync::Arc;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{usage, Result};
use crate::group::GroupElement;
use crate::littlewood::BoundResult;
use crate::weight::{Algebra, WeightedElement};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VNConstants {
    pub delta: f64,
    #[serde(rename = "L")]
    pub l: f64,
    pub m_eps: f64,
    pub kg: Option<f64>,
}

/// `δ = 1 / ((1 + ‖m‖_ε) e)` and `L = 1`.
pub fn delta_from_bound(m_eps: f64) -> Result<VNConstants> {
    if !(m_eps >= 0.0) {
        return Err(usage(format!("need ||m||_eps >= 0, got {m_eps}")));
    }
    Ok(VNConstants {
        delta: 1.0 / ((1.0 + m_eps) * E),
        l: 1.0,
        m_eps,
        kg: None,
    })
}

impl VNConstants {
    pub fn from_bound(bound: &BoundResult) -> Result<Self> {
        let mut c = delta_from_bound(bound.bound)?;
        c.kg = Some(bound.kg);
        Ok(c)
    }
}

/// A polynomial without constant term in `n` commuting variables.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolySpec {
    n_vars: usize,
    terms: Vec<(Vec<u32>, Complex64)>,
}

impl PolySpec {
    pub fn new(n_vars: usize, terms: Vec<(Vec<u32>, Complex64)>) -> Result<Self> {
        if n_vars == 0 {
            return Err(usage("polynomial needs at least one variable"));
        }
        for (exps, _) in &terms {
            if exps.len() != n_vars {
                return Err(usage(format!(
                    "monomial {exps:?} does not have {n_vars} exponents"
                )));
            }
            if exps.iter().all(|&e| e == 0) {
                return Err(usage("constant terms are not allowed"));
            }
        }
        if terms.iter().all(|(_, c)| *c == Complex64::new(0.0, 0.0)) {
            return Err(usage("the zero polynomial is excluded"));
        }
        Ok(PolySpec { n_vars, terms })
    }

    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    pub fn terms(&self) -> &[(Vec<u32>, Complex64)] {
        &self.terms
    }

    /// Largest exponent of each variable.
    pub fn degrees(&self) -> Vec<u32> {
        (0..self.n_vars)
            .map(|j| self.terms.iter().map(|(e, _)| e[j]).max().unwrap_or(0))
            .collect()
    }

    pub fn eval(&self, z: &[Complex64]) -> Complex64 {
        self.terms
            .iter()
            .map(|(exps, c)| {
                exps.iter()
                    .zip(z)
                    .fold(*c, |acc, (&e, zj)| acc * zj.powu(e))
            })
            .sum()
    }
}

/// `Σ c · a₁^{*e₁} * ⋯ * aₙ^{*eₙ}`, monomials taken in ascending variable
/// order. Only defined on commutative groups.
pub fn poly_eval_algebra(p: &PolySpec, elems: &[WeightedElement]) -> Result<WeightedElement> {
    if elems.len() != p.n_vars {
        return Err(usage(format!(
            "polynomial has {} variables, got {} elements",
            p.n_vars,
            elems.len()
        )));
    }
    let algebra: &Arc<Algebra> = elems[0].algebra();
    let kind = algebra.metric().group().kind();
    if !kind.is_commutative() {
        return Err(usage(format!(
            "polynomial calculus needs a commutative group, got {kind}"
        )));
    }
    let degrees = p.degrees();
    let mut powers: Vec<Vec<WeightedElement>> = Vec::with_capacity(p.n_vars);
    for (a, &deg) in elems.iter().zip(&degrees) {
        let mut list = vec![a.power(0)?];
        for k in 1..=deg as usize {
            list.push(list[k - 1].convolve(a)?);
        }
        powers.push(list);
    }
    let mut out = WeightedElement::zero(algebra);
    for (exps, c) in &p.terms {
        let mut mono = powers[0][exps[0] as usize].clone();
        for (j, &e) in exps.iter().enumerate().skip(1) {
            mono = mono.convolve(&powers[j][e as usize])?;
        }
        out = out.add(&mono.scale(*c))?;
    }
    Ok(out)
}

pub const DEFAULT_GRID_PER_DIM: usize = 512;
pub const DEFAULT_INFLATION: f64 = 1.05;
/// Cap on the total number of torus grid points.
pub const MAX_GRID_POINTS: usize = 1 << 18;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SupNormEstimate {
    /// `max |p|` over the torus grid; a lower bound for `‖p‖_∞`.
    pub estimate: f64,
    pub inflation: f64,
    pub grid_per_dim: usize,
    /// `1 / (1 − Σ_j π deg_j / G)` when the sum is below 1: the grid maximum
    /// times this is a true upper bound.
    pub grid_factor: Option<f64>,
    pub warning: Option<String>,
}

impl SupNormEstimate {
    pub fn inflated(&self) -> f64 {
        self.estimate * self.inflation
    }
}

/// Samples `|p|` on an equispaced grid of the torus `Tⁿ`, which carries the
/// supremum over the polydisc. The per-dimension resolution is reduced so
/// that the grid has at most `MAX_GRID_POINTS` points.
pub fn poly_sup_norm(p: &PolySpec, grid_per_dim: usize, inflation: f64) -> Result<SupNormEstimate> {
    let n = p.n_vars;
    if n > 4 {
        return Err(usage(format!("sup-norm grid supports at most 4 variables, got {n}")));
    }
    if grid_per_dim == 0 || !(inflation >= 1.0) {
        return Err(usage("grid needs at least one point per dimension and inflation >= 1"));
    }
    let cap_per_dim = (MAX_GRID_POINTS as f64).powf(1.0 / n as f64).floor() as usize;
    let g = grid_per_dim.min(cap_per_dim.max(1));
    let roots: Vec<Complex64> = (0..g)
        .map(|k| Complex64::from_polar(1.0, 2.0 * PI * k as f64 / g as f64))
        .collect();
    let total = g.pow(n as u32);
    let estimate = (0..total)
        .into_par_iter()
        .map(|mut idx| {
            let mut z = [Complex64::new(1.0, 0.0); 4];
            for zj in z.iter_mut().take(n) {
                *zj = roots[idx % g];
                idx /= g;
            }
            p.eval(&z[..n]).norm()
        })
        .reduce(|| 0.0, f64::max);

    let spread: f64 = p.degrees().iter().map(|&d| PI * d as f64 / g as f64).sum();
    let grid_factor = (spread < 1.0).then(|| 1.0 / (1.0 - spread));
    let warning = match grid_factor {
        Some(f) if f <= inflation => None,
        _ => Some(format!(
            "grid of {g} points per dimension is coarse for degrees {:?}; inflation {inflation} \
             may not cover the sampling error",
            p.degrees()
        )),
    };
    Ok(SupNormEstimate {
        estimate,
        inflation,
        grid_per_dim: g,
        grid_factor,
        warning,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StressOptions {
    pub trials: u64,
    pub max_vars: usize,
    pub max_degree: u32,
    pub max_terms: usize,
    /// Supports are drawn from `ball(support_radius)`.
    pub support_radius: u32,
    /// Points per element support.
    pub support_points: usize,
    pub grid_per_dim: usize,
    pub inflation: f64,
    pub seed: u64,
}

impl Default for StressOptions {
    fn default() -> Self {
        StressOptions {
            trials: 500,
            max_vars: 2,
            max_degree: 3,
            max_terms: 4,
            support_radius: 3,
            support_points: 3,
            grid_per_dim: DEFAULT_GRID_PER_DIM,
            inflation: DEFAULT_INFLATION,
            seed: 42,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StressReport {
    pub trials: u64,
    pub passes: u64,
    /// `min (1 − ‖p(a)‖ / (L · inflated sup))` over trials.
    pub worst_margin: f64,
    pub delta: f64,
    #[serde(rename = "L")]
    pub l: f64,
    pub kg: Option<f64>,
    pub seed: u64,
    pub grid_warnings: u64,
}

fn complex_gaussian(rng: &mut ChaCha8Rng) -> Complex64 {
    Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

fn random_poly(rng: &mut ChaCha8Rng, opts: &StressOptions) -> PolySpec {
    let n = rng.random_range(1..=opts.max_vars);
    let count = rng.random_range(1..=opts.max_terms);
    let mut terms = Vec::with_capacity(count);
    while terms.len() < count {
        let exps: Vec<u32> = (0..n).map(|_| rng.random_range(0..=opts.max_degree)).collect();
        if exps.iter().any(|&e| e > 0) {
            terms.push((exps, complex_gaussian(rng)));
        }
    }
    PolySpec::new(n, terms).expect("nonzero monomials with Gaussian coefficients")
}

fn random_element(
    rng: &mut ChaCha8Rng,
    algebra: &Arc<Algebra>,
    dim: usize,
    opts: &StressOptions,
    norm: f64,
) -> Result<WeightedElement> {
    let r = opts.support_radius as i64;
    loop {
        let terms = (0..opts.support_points).map(|_| {
            let x: Vec<i64> = (0..dim).map(|_| rng.random_range(-r..=r)).collect();
            (GroupElement::Zd(x), complex_gaussian(rng))
        });
        let f = WeightedElement::from_terms(algebra, terms.collect::<Vec<_>>())?;
        let current = f.norm()?;
        if current > 0.0 {
            return Ok(f.scale(Complex64::new(norm / current, 0.0)));
        }
    }
}

/// Runs independent trials, each on its own ChaCha stream so the report does
/// not depend on scheduling. A failure beyond the inflation points at a bug
/// in this code, since the inequality itself is a theorem.
pub fn vn_stress_test(
    constants: &VNConstants,
    algebra: &Arc<Algebra>,
    opts: &StressOptions,
) -> Result<StressReport> {
    let dim = match algebra.metric().group().kind() {
        crate::group::GroupKind::Zd { dim } => dim,
        other => {
            return Err(usage(format!(
                "the stress test runs on commutative Z^d only, got {other}"
            )))
        }
    };
    if opts.max_vars == 0 || opts.max_vars > 4 || opts.max_terms == 0 || opts.support_points == 0
    {
        return Err(usage("stress test needs 1..=4 variables, terms >= 1, support >= 1"));
    }

    let results: Vec<(f64, bool)> = (0..opts.trials)
        .into_par_iter()
        .map(|trial| -> Result<(f64, bool)> {
            let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
            rng.set_stream(trial);
            let p = random_poly(&mut rng, opts);
            let elems = (0..p.n_vars())
                .map(|_| random_element(&mut rng, algebra, dim, opts, constants.delta))
                .collect::<Result<Vec<_>>>()?;
            let lhs = poly_eval_algebra(&p, &elems)?.norm()?;
            let sup = poly_sup_norm(&p, opts.grid_per_dim, opts.inflation)?;
            let rhs = constants.l * sup.inflated();
            Ok((1.0 - lhs / rhs, sup.warning.is_some()))
        })
        .collect::<Result<_>>()?;

    Ok(StressReport {
        trials: opts.trials,
        passes: results.iter().filter(|r| r.0 >= 0.0).count() as u64,
        worst_margin: results.iter().map(|r| r.0).fold(f64::INFINITY, f64::min),
        delta: constants.delta,
        l: constants.l,
        kg: constants.kg,
        seed: opts.seed,
        grid_warnings: results.iter().filter(|r| r.1).count() as u64,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{GroupDescriptor, WordMetric};
    use crate::weight::WeightSpec;
    use crate::DEFAULT_KG;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn z1() -> Arc<Algebra> {
        Algebra::new(
            WordMetric::closed_form(GroupDescriptor::zd(1).unwrap()),
            WeightSpec::Polynomial { beta: 1.0 },
        )
        .unwrap()
    }

    fn one() -> Complex64 {
        Complex64::new(1.0, 0.0)
    }

    #[test]
    fn delta_examples() {
        assert_relative_eq!(delta_from_bound(0.0).unwrap().delta, 1.0 / E);
        let m = 3f64.sqrt() * DEFAULT_KG;
        let c = delta_from_bound(m).unwrap();
        assert_relative_eq!(c.delta, 1.0 / (E * (1.0 + m)), max_relative = 1e-15);
        assert_eq!(c.l, 1.0);
        assert!(delta_from_bound(-1.0).is_err());
    }

    #[test]
    fn delta_identity_and_monotonicity() {
        let mut prev = f64::INFINITY;
        for i in 0..50 {
            let m = 0.37 * i as f64;
            let c = delta_from_bound(m).unwrap();
            assert_relative_eq!(c.delta * E * (1.0 + m), 1.0, max_relative = 1e-14);
            assert!(c.delta < prev && c.delta <= 1.0 / E);
            prev = c.delta;
        }
    }

    #[test]
    fn poly_spec_guards() {
        assert!(PolySpec::new(1, vec![(vec![0], one())]).is_err());
        assert!(PolySpec::new(2, vec![(vec![1], one())]).is_err());
        assert!(PolySpec::new(1, vec![]).is_err());
        assert!(PolySpec::new(1, vec![(vec![1], Complex64::new(0.0, 0.0))]).is_err());
    }

    #[test]
    fn algebra_evaluation_examples() {
        let alg = z1();
        let d = |k: i64| WeightedElement::delta(&alg, GroupElement::zd([k])).unwrap();
        let z = PolySpec::new(1, vec![(vec![1], one())]).unwrap();
        assert_eq!(poly_eval_algebra(&z, &[d(1)]).unwrap().coeffs(), d(1).coeffs());
        let z2 = PolySpec::new(1, vec![(vec![2], one())]).unwrap();
        assert_eq!(poly_eval_algebra(&z2, &[d(1)]).unwrap().coeffs(), d(2).coeffs());
        let z1z2 = PolySpec::new(2, vec![(vec![1, 1], one())]).unwrap();
        assert_eq!(
            poly_eval_algebra(&z1z2, &[d(1), d(-1)]).unwrap().coeffs(),
            d(0).coeffs()
        );
    }

    #[test]
    fn non_commutative_group_is_refused() {
        let alg = Algebra::new(
            WordMetric::closed_form(GroupDescriptor::free2()),
            WeightSpec::Polynomial { beta: 1.0 },
        )
        .unwrap();
        let a = WeightedElement::delta(&alg, GroupDescriptor::free2().generators()[0].clone())
            .unwrap();
        let z = PolySpec::new(1, vec![(vec![1], one())]).unwrap();
        assert!(matches!(poly_eval_algebra(&z, &[a]), Err(crate::Error::Usage(_))));
    }

    #[test]
    fn sup_norm_examples() {
        let z = PolySpec::new(1, vec![(vec![1], one())]).unwrap();
        assert_relative_eq!(poly_sup_norm(&z, 512, 1.05).unwrap().estimate, 1.0);
        let zz = PolySpec::new(1, vec![(vec![1], one()), (vec![2], one())]).unwrap();
        assert_relative_eq!(poly_sup_norm(&zz, 512, 1.05).unwrap().estimate, 2.0);
        let prod = PolySpec::new(2, vec![(vec![1, 1], one())]).unwrap();
        let est = poly_sup_norm(&prod, 512, 1.05).unwrap();
        assert_relative_eq!(est.estimate, 1.0, max_relative = 1e-12);
        assert!(est.warning.is_none());
    }

    #[test]
    fn sup_norm_grid_is_capped_and_warns() {
        let p = PolySpec::new(4, vec![(vec![6, 6, 6, 6], one())]).unwrap();
        let est = poly_sup_norm(&p, 512, 1.05).unwrap();
        assert!(est.grid_per_dim.pow(4) <= MAX_GRID_POINTS);
        assert!(est.warning.is_some());
        let five = PolySpec::new(5, vec![(vec![1, 0, 0, 0, 0], one())]).unwrap();
        assert!(poly_sup_norm(&five, 8, 1.05).is_err());
    }

    #[test]
    fn stress_test_passes_and_is_deterministic() {
        let m = 3f64.sqrt() * DEFAULT_KG;
        let mut c = delta_from_bound(m).unwrap();
        c.kg = Some(DEFAULT_KG);
        let opts = StressOptions {
            trials: 60,
            ..StressOptions::default()
        };
        let a = vn_stress_test(&c, &z1(), &opts).unwrap();
        let b = vn_stress_test(&c, &z1(), &opts).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.passes, 60);
        assert!(a.worst_margin > 0.0);
    }

    #[test]
    fn single_variable_identity_stays_below_one() {
        let c = delta_from_bound(3f64.sqrt() * DEFAULT_KG).unwrap();
        let alg = z1();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let opts = StressOptions::default();
        let z = PolySpec::new(1, vec![(vec![1], one())]).unwrap();
        for _ in 0..20 {
            let a = random_element(&mut rng, &alg, 1, &opts, c.delta).unwrap();
            let lhs = poly_eval_algebra(&z, &[a]).unwrap().norm().unwrap();
            assert_relative_eq!(lhs, c.delta, max_relative = 1e-12);
            assert!(lhs <= 1.0);
        }
    }

    proptest! {
        #[test]
        fn evaluation_is_linear_in_coefficients(
            c1 in prop::collection::vec((-3i32..=3, -3i32..=3), 3),
            c2 in prop::collection::vec((-3i32..=3, -3i32..=3), 3),
            seed in 0u64..1000,
        ) {
            let alg = z1();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let opts = StressOptions::default();
            let elems: Vec<_> = (0..2)
                .map(|_| random_element(&mut rng, &alg, 1, &opts, 0.5).unwrap())
                .collect();
            let monos = [vec![1, 0], vec![1, 2], vec![0, 3]];
            let mk = |cs: &[(i32, i32)]| {
                let terms = monos
                    .iter()
                    .cloned()
                    .zip(cs.iter().map(|&(a, b)| Complex64::new(a as f64, b as f64)))
                    .collect();
                PolySpec::new(2, terms)
            };
            let sum: Vec<_> = c1.iter().zip(&c2).map(|(a, b)| (a.0 + b.0, a.1 + b.1)).collect();
            if let (Ok(p1), Ok(p2), Ok(ps)) = (mk(&c1), mk(&c2), mk(&sum)) {
                let lhs = poly_eval_algebra(&ps, &elems).unwrap();
                let rhs = poly_eval_algebra(&p1, &elems)
                    .unwrap()
                    .add(&poly_eval_algebra(&p2, &elems).unwrap())
                    .unwrap();
                let diff = lhs.add(&rhs.scale(Complex64::new(-1.0, 0.0))).unwrap();
                prop_assert!(diff.norm().unwrap() <= 1e-12 * (1.0 + rhs.norm().unwrap()));
            }
        }
    }
}
