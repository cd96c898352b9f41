//! End-to-end acceptance suite. Runs without the libtest harness so every
//! criterion prints exactly one PASS/FAIL line; exits non-zero on any FAIL.

use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use serde_json::Value;
use wga_core::free_group::{
    divergence_sequence, flatness_check, hankel_certificate, hankel_from_rs,
    omega_lower_bound_check, rudin_shapiro, DEFAULT_OMEGA_ROWS_CAP,
};
use wga_core::group::{
    bfs_balls, growth_order_fit, BfsOptions, GroupDescriptor, GrowthClass, WordMetric,
};
use wga_core::littlewood::{
    beta_selection, length_zeta, omega_matrix, operator_alg_verdict, verify_decomposition,
    NotOperatorReason, TailMajorant, Verdict, VerdictOptions, DEFAULT_OMEGA_CAP,
};
use wga_core::vn::{vn_stress_test, StressOptions, VNConstants};
use wga_core::weight::{check_submultiplicative, monotonicity_check, Algebra, SubmultOptions, WeightSpec};
use wga_core::DEFAULT_KG;

type Check = Result<String, String>;
type Criterion<'a> = (&'static str, Box<dyn Fn() -> Check + 'a>);

fn ensure(ok: bool, detail: String) -> Check {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn within(elapsed: Duration, limit_secs: u64) -> bool {
    elapsed < Duration::from_secs(limit_secs)
}

fn wga(out: &Path, args: &[&str]) -> Result<(Value, Vec<u8>), String> {
    let output = Command::new(env!("CARGO_BIN_EXE_wga"))
        .arg("--out")
        .arg(out)
        .arg("--json")
        .args(args)
        .output()
        .map_err(err)?;
    if !output.status.success() {
        return Err(format!(
            "wga {args:?} exited with {:?}: {}",
            output.status.code(),
            String::from_utf8_lossy(&output.stderr).trim()
        ));
    }
    let payload = serde_json::from_slice(&output.stdout).map_err(err)?;
    Ok((payload, output.stdout))
}

/// `1 / (e (1 + √3 K_G))`, the δ of `ℓ¹(Z, ω₁)`.
fn integer_delta() -> f64 {
    1.0 / (std::f64::consts::E * (1.0 + 3f64.sqrt() * DEFAULT_KG))
}

fn growth_exactness(out: &Path) -> Check {
    let start = Instant::now();
    let (p, _) = wga(out, &["growth", "--set", "group.kind=zd", "--set", "group.dim=2", "--set", "radius.ball=40"])?;
    let elapsed = start.elapsed();
    let balls: Vec<u64> = serde_json::from_value(p["ball_sizes"].clone()).map_err(err)?;
    let exact = balls.len() == 41
        && balls.iter().enumerate().all(|(n, &b)| b == (2 * n as u64 + 1).pow(2));
    ensure(
        exact && within(elapsed, 10),
        format!("|F^40| = {}, all n <= 40 exact: {exact}, {:.2?}", balls.last().copied().unwrap_or(0), elapsed),
    )
}

fn word_metric_oracle() -> Check {
    let mut mismatches = 0u64;
    let mut checked = 0u64;
    for (desc, r) in [
        (GroupDescriptor::zd(1).map_err(err)?, 8),
        (GroupDescriptor::zd(2).map_err(err)?, 8),
        (GroupDescriptor::zd(3).map_err(err)?, 8),
        (GroupDescriptor::free2(), 7),
    ] {
        let table = bfs_balls(&desc, r, BfsOptions::default()).map_err(err)?;
        for (i, x) in table.elements().iter().enumerate() {
            checked += 1;
            if desc.closed_form_length(x) != Some(table.length_at(i) as u64) {
                mismatches += 1;
            }
        }
    }
    ensure(mismatches == 0, format!("{checked} elements, {mismatches} mismatches"))
}

fn heisenberg_growth() -> Check {
    let start = Instant::now();
    let table = bfs_balls(&GroupDescriptor::heisenberg(), 15, BfsOptions::default()).map_err(err)?;
    let fit = growth_order_fit(&table, None).map_err(err)?;
    let elapsed = start.elapsed();
    ensure(
        (3.4..=4.4).contains(&fit.exponent) && within(elapsed, 60),
        format!("fitted order {:.4} on n in [{}, {}], {:.2?}", fit.exponent, fit.n_min, fit.n_max, elapsed),
    )
}

fn zeta_enclosure() -> Check {
    let z1 = GroupDescriptor::zd(1).map_err(err)?;
    let exact = std::f64::consts::PI.powi(2) / 3.0 - 1.0;
    let fine = length_zeta(&z1, None, 2.0, 10_000, TailMajorant::Auto, false).map_err(err)?;
    let coarse = length_zeta(&z1, None, 2.0, 0, TailMajorant::Auto, false).map_err(err)?;
    ensure(
        fine.contains(exact) && fine.width() < 0.05 && coarse.upper <= 3.0,
        format!(
            "N=1e4: [{:.8}, {:.8}] width {:.2e}; N=0 upper {}",
            fine.lower,
            fine.upper,
            fine.width(),
            coarse.upper
        ),
    )
}

fn headline_constant(out: &Path) -> Check {
    let (poly, _) = wga(out, &["bound", "--set", "group.kind=zd", "--set", "group.dim=1"])?;
    let bound = poly["constants"]["m_eps"].as_f64().ok_or("missing m_eps")?;
    let delta = poly["constants"]["delta"].as_f64().ok_or("missing delta")?;
    let want = 3f64.sqrt() * DEFAULT_KG;
    let bound_ok = ((bound - want) / want).abs() <= 1e-12;
    let delta_ok = ((delta - integer_delta()) / integer_delta()).abs() <= 1e-12;

    let (exp, _) = wga(
        out,
        &["bound", "--set", "group.dim=1", "--set", "weight.kind=exponential", "--set", "weight.alpha=0.5", "--set", "weight.C=24"],
    )?;
    let beta = exp["result"]["bound"]["beta"].as_f64().ok_or("missing beta")?;
    let m = exp["result"]["bound"]["m"].as_f64().ok_or("missing M")?;
    let exp_delta = exp["constants"]["delta"].as_f64().ok_or("missing delta")?;
    ensure(
        bound_ok && delta_ok && beta == 1.0 && m == 1.0 && exp_delta == delta,
        format!("||m||_eps = {bound} (sqrt3 K_G = {want}), delta = {delta}; sigma_(0.5,24): beta {beta}, M {m}, delta {exp_delta}"),
    )
}

fn submult_sweeps() -> Check {
    let mut worst = 0f64;
    let mut all = true;
    let mut pairs = 0u64;
    let opts = SubmultOptions::default();
    for (desc, r) in [(GroupDescriptor::zd(2).map_err(err)?, 6), (GroupDescriptor::heisenberg(), 4)] {
        // products of two radius-R elements need lengths up to 2R
        let table = bfs_balls(&desc, 2 * r, BfsOptions::default()).map_err(err)?;
        for beta in [0.5, 1.0, 2.5] {
            let rep = check_submultiplicative(&WeightSpec::Polynomial { beta }, &table, r, 0.0, opts).map_err(err)?;
            all &= rep.pass && rep.worst_ratio <= 1.0 + 1e-12;
            worst = worst.max(rep.worst_ratio);
            pairs += rep.pairs_checked;
        }
    }
    let composite = WeightSpec::CompositeExpOverPoly { alpha: 0.5, c: 24.0, beta: 1.0 };
    let z1 = GroupDescriptor::zd(1).map_err(err)?;
    let table = bfs_balls(&z1, 80, BfsOptions::default()).map_err(err)?;
    let rep = check_submultiplicative(&composite, &table, 40, 0.0, opts).map_err(err)?;
    all &= rep.pass;
    ensure(
        all,
        format!(
            "{pairs} polynomial pairs, worst ratio {worst}; composite(0.5,24,1) worst ratio {} with M = 1",
            rep.worst_ratio
        ),
    )
}

fn lemma_verification() -> Check {
    let pairs = [
        (0.2, 40.0),
        (0.3, 30.0),
        (0.3, 5.0),
        (0.4, 25.0),
        (0.5, 24.0),
        (0.5, 10.0),
        (0.5, 2.0),
        (0.6, 25.0),
        (0.7, 30.0),
        (0.8, 40.0),
    ];
    // Z¹: order 1 with λ = 1
    let GrowthClass::Polynomial { order, lambda_one } = GrowthClass::of(&GroupDescriptor::zd(1).map_err(err)?) else {
        return Err("Z^1 should have polynomial growth".into());
    };
    let mut points = 0;
    let mut violations = 0;
    for (alpha, c) in pairs {
        let beta = beta_selection(alpha, c, order, lambda_one).map_err(err)?;
        let k = wga_core::weight::k_threshold(alpha, c, beta);
        let rep = monotonicity_check(alpha, c, beta, k, k + 100.0, 0.01).map_err(err)?;
        points += rep.points;
        violations += rep.p_violations + rep.q_violations;
    }
    ensure(violations == 0, format!("10 pairs, {points} grid points, {violations} violations"))
}

fn littlewood_decomposition() -> Check {
    let z1 = GroupDescriptor::zd(1).map_err(err)?;
    let table = bfs_balls(&z1, 100, BfsOptions::default()).map_err(err)?;
    let omega = omega_matrix(&WeightSpec::Polynomial { beta: 1.0 }, &table, 50, DEFAULT_OMEGA_CAP).map_err(err)?;
    let rep = verify_decomposition(&omega, 1.0).map_err(err)?;
    let limit = 3f64.sqrt() + 1e-9;
    ensure(
        rep.pass && rep.entrywise_violations == 0 && rep.column_sup_f1 <= limit && rep.row_sup_f2 <= limit,
        format!(
            "entrywise violations {}, column sup {:.12}, row sup {:.12}, sqrt3 = {:.12}",
            rep.entrywise_violations,
            rep.column_sup_f1,
            rep.row_sup_f2,
            3f64.sqrt()
        ),
    )
}

fn rudin_shapiro_checks() -> Check {
    let mut worst = 0f64;
    let mut ok = true;
    for k in 0..=10 {
        let pair = rudin_shapiro(k).map_err(err)?;
        let rep = flatness_check(&pair, 256).map_err(err)?;
        ok &= pair.all_unimodular() && rep.max_deviation <= 1e-9;
        worst = worst.max(rep.max_deviation);
    }
    let mut worst_ratio = 0f64;
    for k in 1..=8 {
        let h = hankel_from_rs(k).map_err(err)?;
        let cert = hankel_certificate(&h, 1e-8);
        ok &= cert.pass && !cert.inconclusive;
        worst_ratio = worst_ratio.max(cert.norm / cert.bound);
    }
    ensure(
        ok,
        format!("flatness worst deviation {worst:.2e} for k <= 10; max ||A_n|| / 2sqrt(n) = {worst_ratio:.6} for k <= 8"),
    )
}

fn free_group_divergence() -> Check {
    let start = Instant::now();
    let seq = divergence_sequence(2, 0.5, DEFAULT_KG, 10).map_err(err)?;
    let increasing = seq.windows(2).all(|w| w[1].l_n > w[0].l_n);
    let ratio = seq.last().ok_or("empty sequence")?.l_n / seq[0].l_n;
    let mut omega_ok = true;
    for n in [2, 4, 8, 16] {
        let cert = omega_lower_bound_check(2, n, 0.5, 1e-10, DEFAULT_OMEGA_ROWS_CAP).map_err(err)?;
        omega_ok &= cert.pass;
    }
    let elapsed = start.elapsed();
    ensure(
        increasing && ratio > 10.0 && omega_ok && within(elapsed, 120),
        format!("strictly increasing: {increasing}, L_1024/L_2 = {ratio:.3}, Omega bounds n in {{2,4,8,16}}: {omega_ok}, {elapsed:.2?}"),
    )
}

fn vn_stress(out: &Path) -> Check {
    let args = ["vn", "--set", "group.kind=zd", "--set", "group.dim=1", "--seed", "42", "--set", "vn.trials=500"];
    let (first, bytes_a) = wga(out, &args)?;
    let (_, bytes_b) = wga(out, &args)?;
    let stress = &first["stress"];
    let trials = stress["trials"].as_u64().ok_or("missing trials")?;
    let passes = stress["passes"].as_u64().ok_or("missing passes")?;
    let delta = stress["delta"].as_f64().ok_or("missing delta")?;
    let delta_ok = ((delta - integer_delta()) / integer_delta()).abs() <= 1e-12;

    // the library path agrees with the binary
    let algebra = Algebra::new(
        WordMetric::closed_form(GroupDescriptor::zd(1).map_err(err)?),
        WeightSpec::Polynomial { beta: 1.0 },
    )
    .map_err(err)?;
    let constants = VNConstants {
        delta,
        l: 1.0,
        m_eps: 3f64.sqrt() * DEFAULT_KG,
        kg: Some(DEFAULT_KG),
    };
    let lib = vn_stress_test(&constants, &algebra, &StressOptions::default()).map_err(err)?;
    ensure(
        trials == 500 && passes == 500 && delta_ok && bytes_a == bytes_b && lib.passes == 500,
        format!(
            "{passes}/{trials} within the 1.05 inflation, worst margin {:.4}, delta {delta}, re-run identical: {}",
            lib.worst_margin,
            bytes_a == bytes_b
        ),
    )
}

fn verdict_dispatch() -> Check {
    let h3 = GroupDescriptor::heisenberg();
    let h3_table = bfs_balls(&h3, 10, BfsOptions::default()).map_err(err)?;
    let groups = [
        (GroupDescriptor::zd(1).map_err(err)?, None),
        (GroupDescriptor::zd(2).map_err(err)?, None),
        (GroupDescriptor::zd(3).map_err(err)?, None),
        (h3.clone(), Some(&h3_table)),
        (GroupDescriptor::free2(), None),
    ];
    let mut wrong = Vec::new();
    for (desc, table) in &groups {
        for (alpha, want) in [(0.0, NotOperatorReason::AlphaZero), (1.0, NotOperatorReason::AlphaOne)] {
            for c in [0.5, 1.0, 3.0] {
                let w = WeightSpec::Exponential { alpha, c };
                let v = operator_alg_verdict(desc, *table, &w, DEFAULT_KG, VerdictOptions::default()).map_err(err)?;
                if !matches!(v, Verdict::NotOperatorAlgebra { reason, .. } if reason == want) {
                    wrong.push(format!("{} alpha={alpha} C={c}", desc.name()));
                }
            }
        }
    }
    let mut h3_bounds = Vec::new();
    for beta in [2.6, 3.0, 4.0] {
        let v = operator_alg_verdict(&h3, Some(&h3_table), &WeightSpec::Polynomial { beta }, DEFAULT_KG, VerdictOptions::default())
            .map_err(err)?;
        match v {
            Verdict::InjectiveAlgebra { bound } => h3_bounds.push(format!("beta {beta}: {:.4}", bound.bound)),
            _ => wrong.push(format!("H3 beta={beta}")),
        }
    }
    ensure(
        wrong.is_empty(),
        format!("30 exponential verdicts, H3 injective bounds [{}]; wrong: {wrong:?}", h3_bounds.join(", ")),
    )
}

fn main() {
    let dir = std::env::temp_dir().join(format!("wga-acceptance-{}", std::process::id()));
    let out = dir.as_path();
    let criteria: Vec<Criterion> = vec![
        ("growth exactness", Box::new(|| growth_exactness(out))),
        ("word-metric oracle equivalence", Box::new(word_metric_oracle)),
        ("Heisenberg growth order", Box::new(heisenberg_growth)),
        ("zeta enclosure", Box::new(zeta_enclosure)),
        ("headline constant", Box::new(|| headline_constant(out))),
        ("submultiplicativity sweeps", Box::new(submult_sweeps)),
        ("monotonicity lemma", Box::new(lemma_verification)),
        ("Littlewood decomposition", Box::new(littlewood_decomposition)),
        ("Rudin-Shapiro and Hankel", Box::new(rudin_shapiro_checks)),
        ("free-group divergence", Box::new(free_group_divergence)),
        ("von Neumann stress test", Box::new(|| vn_stress(out))),
        ("verdict dispatch", Box::new(verdict_dispatch)),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let (tag, detail) = match check() {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        println!("{tag} {:>2} {name}: {detail}", i + 1);
    }
    let _ = std::fs::remove_dir_all(out);
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
