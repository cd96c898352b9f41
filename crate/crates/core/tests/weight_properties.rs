use std::sync::OnceLock;

use num_complex::Complex64;
use proptest::prelude::*;
use wga_core::group::{GroupDescriptor, GroupElement, WordMetric};
use wga_core::littlewood::{length_zeta, TailMajorant};
use wga_core::vn::delta_from_bound;
use wga_core::weight::{k_threshold, Algebra, WeightSpec, WeightedElement};

const COMPOSITE: WeightSpec = WeightSpec::CompositeExpOverPoly {
    alpha: 0.5,
    c: 24.0,
    beta: 1.0,
};

fn composite_log_m() -> f64 {
    static LOG_M: OnceLock<f64> = OnceLock::new();
    *LOG_M.get_or_init(|| COMPOSITE.log_submult_constant())
}

fn zd_point(dim: usize, r: i64) -> impl Strategy<Value = GroupElement> {
    prop::collection::vec(-r..=r, dim).prop_map(GroupElement::Zd)
}

fn weighted(dim: usize) -> impl Strategy<Value = Vec<(GroupElement, Complex64)>> {
    prop::collection::vec(
        (zd_point(dim, 30), -5.0f64..5.0, -5.0f64..5.0).prop_map(|(x, re, im)| (x, Complex64::new(re, im))),
        1..6,
    )
}

fn tau(x: &GroupElement) -> u64 {
    match x {
        GroupElement::Zd(v) => v.iter().map(|c| c.unsigned_abs()).max().unwrap_or(0),
        _ => unreachable!(),
    }
}

proptest! {
    #[test]
    fn polynomial_and_exponential_weights_are_monotone(
        beta in 0.0f64..6.0, alpha in 0.0f64..=1.0, c in 0.01f64..3.0, t in 0u64..10_000,
    ) {
        for w in [WeightSpec::Polynomial { beta }, WeightSpec::Exponential { alpha, c }] {
            prop_assert!(w.log_eval(t + 1) >= w.log_eval(t));
        }
    }

    #[test]
    fn composite_weight_is_monotone_past_threshold(
        alpha in 0.2f64..0.8, c in 0.5f64..5.0, beta in 1.0f64..4.0, offset in 0u64..1000,
    ) {
        let k = k_threshold(alpha, c, beta);
        prop_assume!(k < 1e6);
        let w = WeightSpec::CompositeExpOverPoly { alpha, c, beta };
        let t = k.ceil() as u64 + offset;
        let (a, b) = (w.log_eval(t), w.log_eval(t + 1));
        prop_assert!(b >= a - 1e-12 * a.abs().max(1.0), "t = {t}: {a} > {b}");
    }

    #[test]
    fn standard_weights_are_submultiplicative_on_random_pairs(
        (pairs, beta, alpha, c) in (1usize..=3).prop_flat_map(|d| (
            prop::collection::vec((zd_point(d, 1000), zd_point(d, 1000)), 50),
            0.0f64..5.0, 0.0f64..=1.0, 0.01f64..3.0,
        )),
    ) {
        for (x, y) in pairs {
            let xy = x.multiply(&y).unwrap();
            for w in [WeightSpec::Polynomial { beta }, WeightSpec::Exponential { alpha, c }] {
                let lhs = w.log_eval(tau(&xy));
                let rhs = w.log_eval(tau(&x)) + w.log_eval(tau(&y));
                prop_assert!(lhs <= rhs + 1e-12 * rhs.abs().max(1.0));
            }
        }
    }

    #[test]
    fn composite_convolution_respects_m(f in weighted(1), g in weighted(1)) {
        let algebra = Algebra::new(
            WordMetric::closed_form(GroupDescriptor::zd(1).unwrap()),
            COMPOSITE,
        ).unwrap();
        let f = WeightedElement::from_terms(&algebra, f).unwrap();
        let g = WeightedElement::from_terms(&algebra, g).unwrap();
        prop_assume!(!f.is_zero() && !g.is_zero());
        let fg = f.convolve(&g).unwrap().norm().unwrap();
        let m = composite_log_m().exp();
        let rhs = m * f.norm().unwrap() * g.norm().unwrap();
        prop_assert!(fg <= rhs * (1.0 + 1e-12));
    }

    #[test]
    fn zeta_enclosures_nest_as_cutoff_grows(
        dim in 1usize..=3, excess in 0.1f64..3.0, n1 in 0u32..40, extra in 1u32..40,
    ) {
        let desc = GroupDescriptor::zd(dim).unwrap();
        let s = dim as f64 + excess;
        let a = length_zeta(&desc, None, s, n1, TailMajorant::Auto, false).unwrap();
        let b = length_zeta(&desc, None, s, n1 + extra, TailMajorant::Auto, false).unwrap();
        let slack = 1e-12 * a.upper;
        prop_assert!(b.lower >= a.lower - slack);
        prop_assert!(b.upper <= a.upper + slack);
        prop_assert!(b.lower <= b.upper);
    }

    #[test]
    fn delta_identity(m in 0.0f64..1e6) {
        let vn = delta_from_bound(m).unwrap();
        prop_assert!((vn.delta * (1.0 + m) * std::f64::consts::E - 1.0).abs() < 1e-12);
    }
}

#[test]
fn zeta_encloses_known_value_on_the_integers() {
    // Σ_{x∈Z} (1+|x|)^{-2} = 2ζ(2) − 1
    let exact = std::f64::consts::PI.powi(2) / 3.0 - 1.0;
    let desc = GroupDescriptor::zd(1).unwrap();
    for n in [0, 1, 10, 100, 10_000] {
        let z = length_zeta(&desc, None, 2.0, n, TailMajorant::Auto, false).unwrap();
        assert!(z.contains(exact), "N = {n}: [{}, {}]", z.lower, z.upper);
    }
}
