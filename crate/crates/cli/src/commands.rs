//! The five experiment commands. Each returns a JSON payload that depends
//! only on the configuration, plus the CSV artifacts it wrote.

use std::fmt::Write as _;
use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde_json::{json, Value};
use wga_core::free_group::{
    divergence_sequence, flatness_check, hankel_certificate, hankel_from_rs,
    omega_in_matrix, omega_lower_bound_check, rudin_shapiro, schur_square_is_ones,
    tensor_norm_bound, tensor_power, write_divergence_csv, AlternatingIndex, DEFAULT_INDEX_CAP,
    DEFAULT_OMEGA_ROWS_CAP,
};
use wga_core::group::{
    bfs_balls, growth_order_fit, BallTable, BfsOptions, GroupDescriptor, GroupKind, GrowthClass,
    WordMetric,
};
use wga_core::littlewood::{
    beta_selection, operator_alg_verdict, TailMajorant, Verdict, VerdictOptions,
};
use wga_core::vn::{vn_stress_test, StressOptions, VNConstants};
use wga_core::weight::{
    check_submultiplicative, k_threshold, lemma_beta_floor, m_constant, monotonicity_check,
    Algebra, SubmultOptions, WeightSpec,
};

use crate::config::ExperimentConfig;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] wga_core::Error),
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
}

impl CliError {
    /// 2 for precondition and domain errors, 3 for resource caps, 1 for i/o.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(wga_core::Error::Resource { .. }) => 3,
            CliError::Core(_) => 2,
            CliError::Io(_) => 1,
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Growth,
    Bound,
    WeightCheck,
    Vn,
    FreeGroup,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Growth => "growth",
            Command::Bound => "bound",
            Command::WeightCheck => "weight-check",
            Command::Vn => "vn",
            Command::FreeGroup => "free-group",
        }
    }
}

#[derive(Debug, Clone)]
pub struct Outcome {
    pub command: Command,
    pub payload: Value,
    /// A certificate could not be settled, or `--rigorous` met an
    /// extrapolated series bound.
    pub inconclusive: bool,
    pub artifacts: Vec<PathBuf>,
    pub summary: String,
}

pub fn run(command: Command, cfg: &ExperimentConfig) -> CliResult<Outcome> {
    match command {
        Command::Growth => cmd_growth(cfg),
        Command::Bound => cmd_bound(cfg),
        Command::WeightCheck => cmd_weight_check(cfg),
        Command::Vn => cmd_vn(cfg),
        Command::FreeGroup => cmd_free_group(cfg),
    }
}

fn csv_file(cfg: &ExperimentConfig, name: &str) -> CliResult<(PathBuf, BufWriter<fs::File>)> {
    fs::create_dir_all(&cfg.output_dir)?;
    let path = cfg.output_dir.join(name);
    let file = fs::File::create(&path)?;
    Ok((path, BufWriter::new(file)))
}

fn file_name(p: &Path) -> String {
    p.file_name().map_or_else(String::new, |s| s.to_string_lossy().into_owned())
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map_or_else(String::new, |x| x.to_string())
}

/// BFS table needed for word lengths on groups without a closed form.
fn length_table(desc: &GroupDescriptor, radius: u32) -> CliResult<Option<BallTable>> {
    if desc.has_closed_form_length() {
        Ok(None)
    } else {
        Ok(Some(bfs_balls(desc, radius, BfsOptions::default())?))
    }
}

pub const GROWTH_CSV: &str = "growth.csv";
pub const BOUND_SWEEP_CSV: &str = "bound_sweep.csv";
pub const SUBMULT_CSV: &str = "submult.csv";
pub const LEMMA_CSV: &str = "lemma_sweep.csv";
pub const DIVERGENCE_CSV: &str = "divergence.csv";

pub fn cmd_growth(cfg: &ExperimentConfig) -> CliResult<Outcome> {
    let desc = cfg.descriptor()?;
    let r = cfg.ball_radius;
    let table = bfs_balls(&desc, r, BfsOptions::default())?;
    let spheres = table.sphere_sizes();
    let balls = table.cumulative();
    let closed_balls: Vec<Option<u64>> = (0..=r).map(|n| desc.closed_form_ball_size(n)).collect();
    let mismatches = desc.closed_form_sphere_sizes(r).map(|c| {
        c.iter().zip(&spheres).filter(|(a, b)| a != b).count()
    });
    let fit = if r >= 6 {
        Some(growth_order_fit(&table, None)?)
    } else {
        None
    };

    let (path, mut w) = csv_file(cfg, GROWTH_CSV)?;
    writeln!(w, "n,sphere,ball,closed_form_ball")?;
    for n in 0..=r as usize {
        writeln!(w, "{n},{},{},{}", spheres[n], balls[n], opt(closed_balls[n]))?;
    }
    w.flush()?;

    let payload = json!({
        "kg": cfg.kg,
        "series_rigorous": null,
        "group": desc.name(),
        "generators": desc.generators().iter().map(|g| g.to_string()).collect::<Vec<_>>(),
        "radius": r,
        "sphere_sizes": spheres,
        "ball_sizes": balls,
        "closed_form_mismatches": mismatches,
        "fit": fit,
        "growth_class": GrowthClass::of(&desc),
        "artifacts": [file_name(&path)],
    });
    let mut summary = format!(
        "{}: |ball({r})| = {}",
        desc.name(),
        balls.last().copied().unwrap_or(0)
    );
    if let Some(m) = mismatches {
        let _ = write!(summary, ", closed-form mismatches {m}");
    }
    if let Some(f) = &fit {
        let _ = write!(summary, ", fitted order {:.4} on n in [{}, {}]", f.exponent, f.n_min, f.n_max);
    }
    Ok(Outcome {
        command: Command::Growth,
        payload,
        inconclusive: false,
        artifacts: vec![path],
        summary,
    })
}

fn verdict_for(
    desc: &GroupDescriptor,
    table: Option<&BallTable>,
    weight: &WeightSpec,
    cfg: &ExperimentConfig,
) -> CliResult<Verdict> {
    let opts = VerdictOptions {
        cutoff: cfg.zeta_cutoff,
        majorant: TailMajorant::Auto,
    };
    Ok(operator_alg_verdict(desc, table, weight, cfg.kg, opts)?)
}

fn verdict_label(v: &Verdict) -> &'static str {
    match v {
        Verdict::InjectiveAlgebra { .. } => "injective_algebra",
        Verdict::NotOperatorAlgebra { .. } => "not_operator_algebra",
        Verdict::OutsideTheoremHypotheses { .. } => "outside_theorem_hypotheses",
    }
}

pub fn cmd_bound(cfg: &ExperimentConfig) -> CliResult<Outcome> {
    let desc = cfg.descriptor()?;
    let table = length_table(&desc, cfg.ball_radius)?;
    let verdict = verdict_for(&desc, table.as_ref(), &cfg.weight, cfg)?;
    let constants = verdict.bound().map(VNConstants::from_bound).transpose()?;

    let mut sweep_weights: Vec<WeightSpec> =
        cfg.betas.iter().map(|&beta| WeightSpec::Polynomial { beta }).collect();
    for &alpha in &cfg.alphas {
        for &c in &cfg.cs {
            sweep_weights.push(WeightSpec::Exponential { alpha, c });
        }
    }
    let sweep: Vec<(WeightSpec, Verdict)> = sweep_weights
        .par_iter()
        .map(|w| verdict_for(&desc, table.as_ref(), w, cfg).map(|v| (*w, v)))
        .collect::<CliResult<_>>()?;

    let mut rigor: Vec<bool> = verdict.bound().map(|b| b.rigorous).into_iter().collect();
    rigor.extend(sweep.iter().filter_map(|(_, v)| v.bound().map(|b| b.rigorous)));
    let series_rigorous = (!rigor.is_empty()).then(|| rigor.iter().all(|&r| r));

    let mut artifacts = Vec::new();
    let mut rows = Vec::new();
    if !sweep.is_empty() {
        let (path, mut w) = csv_file(cfg, BOUND_SWEEP_CSV)?;
        writeln!(w, "weight,verdict,beta,M,zeta_upper,bound,delta,rigorous")?;
        for (weight, v) in &sweep {
            let b = v.bound();
            let delta = b.map(|b| VNConstants::from_bound(b).map(|c| c.delta)).transpose()?;
            writeln!(
                w,
                "\"{weight}\",{},{},{},{},{},{},{}",
                verdict_label(v),
                opt(b.map(|b| b.beta)),
                opt(b.map(|b| b.m)),
                opt(b.map(|b| b.zeta.upper)),
                opt(b.map(|b| b.bound)),
                opt(delta),
                opt(b.map(|b| b.rigorous)),
            )?;
            rows.push(json!({"weight": weight, "result": v, "delta": delta}));
        }
        w.flush()?;
        artifacts.push(path);
    }

    let inconclusive = cfg.rigorous && series_rigorous == Some(false);
    let summary = match (&verdict, &constants) {
        (Verdict::InjectiveAlgebra { bound }, Some(c)) => format!(
            "{} on {}: injective algebra, ||m||_eps <= {} (beta = {}, M = {}{}), delta = {}, L = 1",
            cfg.weight,
            desc.name(),
            bound.bound,
            bound.beta,
            bound.m,
            if bound.rigorous { "" } else { ", extrapolated tail" },
            c.delta
        ),
        (Verdict::NotOperatorAlgebra { reason, .. }, _) => format!(
            "{} on {}: not an operator algebra ({reason:?})",
            cfg.weight,
            desc.name()
        ),
        (Verdict::OutsideTheoremHypotheses { note }, _) => {
            format!("{} on {}: outside the theorem ({note})", cfg.weight, desc.name())
        }
        _ => unreachable!("injective verdicts carry a bound"),
    };
    let payload = json!({
        "kg": cfg.kg,
        "series_rigorous": series_rigorous,
        "group": desc.name(),
        "weight": cfg.weight,
        "zeta_cutoff": cfg.zeta_cutoff,
        "result": verdict,
        "constants": constants,
        "sweep": rows,
        "artifacts": artifacts.iter().map(|p| file_name(p)).collect::<Vec<_>>(),
    });
    Ok(Outcome {
        command: Command::Bound,
        payload,
        inconclusive,
        artifacts,
        summary,
    })
}

pub fn cmd_weight_check(cfg: &ExperimentConfig) -> CliResult<Outcome> {
    let desc = cfg.descriptor()?;
    let r = cfg.ball_radius;
    // products of two elements of ball(R) lie in ball(2R)
    let table_radius = if desc.has_closed_form_length() { r } else { 2 * r };
    let table = bfs_balls(&desc, table_radius, BfsOptions::default())?;
    let opts = SubmultOptions {
        pair_cap: cfg.pair_cap,
        seed: cfg.seed,
    };

    let mut weights = vec![cfg.weight];
    weights.extend(cfg.betas.iter().map(|&beta| WeightSpec::Polynomial { beta }));
    let submult = weights
        .iter()
        .map(|w| check_submultiplicative(w, &table, r, w.log_submult_constant(), opts))
        .collect::<wga_core::Result<Vec<_>>>()?;

    let lemma = |alpha: f64, c: f64, beta: f64| -> CliResult<Value> {
        let k = k_threshold(alpha, c, beta);
        let mono = monotonicity_check(
            alpha,
            c,
            beta,
            k,
            k + cfg.monotonicity_span,
            cfg.monotonicity_step,
        )?;
        let m = m_constant(alpha, c, beta);
        Ok(json!({
            "alpha": alpha, "C": c, "beta": beta,
            "monotonicity": mono, "monotonicity_pass": mono.passed(),
            "m_constant": m, "M": m.value(),
        }))
    };
    let composite = match cfg.weight {
        WeightSpec::CompositeExpOverPoly { alpha, c, beta } => Some(lemma(alpha, c, beta)?),
        _ => None,
    };

    let growth = GrowthClass::of(&desc);
    let pairs: Vec<(f64, f64)> = cfg
        .alphas
        .iter()
        .flat_map(|&a| cfg.cs.iter().map(move |&c| (a, c)))
        .collect();
    let lemma_rows: Vec<Value> = pairs
        .par_iter()
        .map(|&(alpha, c)| {
            let beta = match growth {
                GrowthClass::Polynomial { order, lambda_one } => {
                    beta_selection(alpha, c, order, lambda_one)?
                }
                GrowthClass::Exponential => lemma_beta_floor(alpha, c),
            };
            lemma(alpha, c, beta)
        })
        .collect::<CliResult<_>>()?;

    let mut artifacts = Vec::new();
    let (path, mut w) = csv_file(cfg, SUBMULT_CSV)?;
    writeln!(w, "weight,radius,pairs_checked,skipped,sampled,worst_ratio,claimed_M,violations,pass")?;
    for s in &submult {
        writeln!(
            w,
            "\"{}\",{},{},{},{},{},{},{},{}",
            s.weight, s.radius, s.pairs_checked, s.skipped, s.sampled, s.worst_ratio, s.claimed_m,
            s.violations, s.pass
        )?;
    }
    w.flush()?;
    artifacts.push(path);
    if !lemma_rows.is_empty() {
        let (path, mut w) = csv_file(cfg, LEMMA_CSV)?;
        writeln!(w, "alpha,C,beta,K,points,p_violations,q_violations,log_M,pass")?;
        for row in &lemma_rows {
            let m = &row["monotonicity"];
            writeln!(
                w,
                "{},{},{},{},{},{},{},{},{}",
                row["alpha"], row["C"], row["beta"], m["k"], m["points"], m["p_violations"],
                m["q_violations"], row["m_constant"]["log_m"], row["monotonicity_pass"]
            )?;
        }
        w.flush()?;
        artifacts.push(path);
    }

    let all_pass = submult.iter().all(|s| s.pass)
        && composite.iter().chain(&lemma_rows).all(|v| v["monotonicity_pass"] == true);
    let summary = format!(
        "{} sweep(s) on ball({r}) of {}: worst ratios [{}]; {} lemma grid(s); {}",
        submult.len(),
        desc.name(),
        submult
            .iter()
            .map(|s| format!("{:.12}", s.worst_ratio))
            .collect::<Vec<_>>()
            .join(", "),
        lemma_rows.len() + composite.is_some() as usize,
        if all_pass { "all pass" } else { "FAILURES" }
    );
    let payload = json!({
        "kg": cfg.kg,
        "series_rigorous": null,
        "group": desc.name(),
        "radius": r,
        "submultiplicativity": submult,
        "composite": composite,
        "lemma_sweep": lemma_rows,
        "pass": all_pass,
        "artifacts": artifacts.iter().map(|p| file_name(p)).collect::<Vec<_>>(),
    });
    Ok(Outcome {
        command: Command::WeightCheck,
        payload,
        inconclusive: false,
        artifacts,
        summary,
    })
}

pub fn cmd_vn(cfg: &ExperimentConfig) -> CliResult<Outcome> {
    let desc = cfg.descriptor()?;
    if !matches!(desc.kind(), GroupKind::Zd { .. }) {
        return Err(wga_core::Error::Usage(format!(
            "the von Neumann stress test needs a commutative group Z^d, got {}",
            desc.name()
        ))
        .into());
    }
    let verdict = verdict_for(&desc, None, &cfg.weight, cfg)?;
    let Some(bound) = verdict.bound() else {
        return Err(wga_core::Error::Usage(format!(
            "{} on {} has no affirmative verdict, so there are no von Neumann constants",
            cfg.weight,
            desc.name()
        ))
        .into());
    };
    let constants = VNConstants::from_bound(bound)?;
    let report = if cfg.vn.trials == 0 {
        None
    } else {
        let algebra = Algebra::new(WordMetric::closed_form(desc.clone()), cfg.weight)?;
        let opts = StressOptions {
            trials: cfg.vn.trials,
            max_vars: cfg.vn.max_vars,
            max_degree: cfg.vn.max_degree,
            max_terms: cfg.vn.max_terms,
            support_radius: cfg.vn.support_size,
            grid_per_dim: cfg.vn.grid,
            inflation: cfg.vn.inflation,
            seed: cfg.seed,
            ..StressOptions::default()
        };
        Some(vn_stress_test(&constants, &algebra, &opts)?)
    };
    let summary = match &report {
        Some(r) => format!(
            "delta = {}, L = 1; {}/{} trials within L * {} * sup-norm estimate, worst margin {:.6}",
            constants.delta, r.passes, r.trials, cfg.vn.inflation, r.worst_margin
        ),
        None => format!("delta = {}, L = 1 (no trials requested)", constants.delta),
    };
    let payload = json!({
        "kg": cfg.kg,
        "series_rigorous": bound.rigorous,
        "group": desc.name(),
        "weight": cfg.weight,
        "m_eps_bound": bound.bound,
        "constants": constants,
        "stress": report,
        "note": "a trial beyond the sup-norm inflation would point at an implementation bug; \
                 the inequality itself is proven",
        "artifacts": [],
    });
    Ok(Outcome {
        command: Command::Vn,
        payload,
        inconclusive: cfg.rigorous && !bound.rigorous,
        artifacts: Vec::new(),
        summary,
    })
}

pub fn cmd_free_group(cfg: &ExperimentConfig) -> CliResult<Outcome> {
    let fg = &cfg.free_group;

    let flatness: Vec<Value> = (0..=fg.rs_k_max)
        .into_par_iter()
        .map(|k| {
            let pair = rudin_shapiro(k)?;
            let report = flatness_check(&pair, fg.flatness_samples)?;
            Ok(json!({"level": k, "unimodular": pair.all_unimodular(), "flatness": report}))
        })
        .collect::<CliResult<_>>()?;

    let hankel: Vec<Value> = (1..=fg.hankel_k_max)
        .into_par_iter()
        .map(|k| {
            let h = hankel_from_rs(k)?;
            let cert = hankel_certificate(&h, fg.tolerance);
            let tensor = tensor_norm_bound(&cert, fg.d);
            let schur = (k <= 3)
                .then(|| tensor_power(&h.matrix, 2, 1 << 20).map(|b| schur_square_is_ones(&b)))
                .transpose()?;
            Ok(json!({
                "level": k, "n": h.size, "hankel": h.is_hankel(), "pm_one": h.entries_pm_one(),
                "certificate": cert, "tensor_bound": tensor, "schur_square_is_ones_d2": schur,
            }))
        })
        .collect::<CliResult<_>>()?;

    let additivity_n = if fg.d <= 4 { 4 } else { 2 };
    let additivity = AlternatingIndex::new(fg.d, additivity_n, DEFAULT_INDEX_CAP)?.additivity_check();

    let omega: Vec<Value> = fg
        .omega_ns
        .par_iter()
        .map(|&n| {
            let cert = omega_lower_bound_check(fg.d, n, fg.beta, fg.tolerance, DEFAULT_OMEGA_ROWS_CAP)?;
            let cross = omega_in_matrix(fg.d, n, fg.beta, DEFAULT_OMEGA_ROWS_CAP)?
                .cross_check(1000, cfg.seed);
            Ok(json!({"n": n, "certificate": cert, "group_engine_cross_check": cross}))
        })
        .collect::<CliResult<_>>()?;

    let seq = divergence_sequence(fg.d, fg.beta, cfg.kg, fg.divergence_k_max)?;
    let (path, mut w) = csv_file(cfg, DIVERGENCE_CSV)?;
    write_divergence_csv(&seq, &mut w)?;
    w.flush()?;
    let increasing = seq.windows(2).all(|p| p[1].l_n > p[0].l_n);
    let growth_ratio = (seq.len() >= 2).then(|| seq[seq.len() - 1].l_n / seq[seq.len() - 2].l_n);
    let overall_ratio = (seq.len() >= 2).then(|| seq[seq.len() - 1].l_n / seq[0].l_n);

    let certs = hankel
        .iter()
        .map(|h| &h["certificate"])
        .chain(omega.iter().map(|o| &o["certificate"]));
    let mut inconclusive = false;
    let mut all_pass = additivity.pass;
    for c in certs {
        inconclusive |= c["inconclusive"] == true;
        all_pass &= c["pass"] == true;
    }
    all_pass &= flatness.iter().all(|f| f["flatness"]["pass"] == true && f["unimodular"] == true);
    all_pass &= omega.iter().all(|o| o["group_engine_cross_check"]["pass"] == true);

    let summary = format!(
        "RS levels 0..={}: flatness {}; Hankel certificates 1..={}; Omega lower bounds for n in {:?}; \
         L_n {} over n = 2..{} (L_last / L_first = {}); {}",
        fg.rs_k_max,
        if flatness.iter().all(|f| f["flatness"]["pass"] == true) { "ok" } else { "FAILED" },
        fg.hankel_k_max,
        fg.omega_ns,
        if increasing { "strictly increasing" } else { "NOT increasing" },
        seq.last().map_or(0, |p| p.n),
        opt(overall_ratio),
        if inconclusive {
            "inconclusive"
        } else if all_pass {
            "all pass"
        } else {
            "FAILURES"
        }
    );
    let payload = json!({
        "kg": cfg.kg,
        "series_rigorous": null,
        "d": fg.d,
        "beta": fg.beta,
        "rudin_shapiro": flatness,
        "hankel": hankel,
        "additivity": {"d": fg.d, "n": additivity_n, "report": additivity},
        "omega_lower_bounds": omega,
        "divergence": {
            "points": seq,
            "strictly_increasing": increasing,
            "last_step_ratio": growth_ratio,
            "last_over_first": overall_ratio,
        },
        "pass": all_pass,
        "artifacts": [file_name(&path)],
    });
    Ok(Outcome {
        command: Command::FreeGroup,
        payload,
        inconclusive,
        artifacts: vec![path],
        summary,
    })
}
