use std::cmp::Ordering;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::WeightSpec;
use crate::error::{usage, Error, Result};
use crate::group::{word_length, BallTable, GroupElement};

/// Above this many ordered pairs the sweep samples instead.
pub const DEFAULT_PAIR_CAP: u64 = 4_000_000;

/// Slack on `ln ω(xy) − ln ω(x) − ln ω(y) ≤ ln M`, relative to the size of
/// the log-weights involved.
const LOG_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy)]
pub struct SubmultOptions {
    pub pair_cap: u64,
    pub seed: u64,
}

impl Default for SubmultOptions {
    fn default() -> Self {
        SubmultOptions {
            pair_cap: DEFAULT_PAIR_CAP,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubmultReport {
    pub weight: WeightSpec,
    pub radius: u32,
    pub pairs_checked: u64,
    /// Pairs whose product fell outside the length oracle.
    pub skipped: u64,
    pub sampled: bool,
    pub worst_ratio: f64,
    pub worst_log_ratio: f64,
    pub argmax: Option<(String, String)>,
    pub claimed_m: f64,
    pub claimed_log_m: f64,
    pub violations: u64,
    pub pass: bool,
}

#[derive(Clone)]
struct Worst {
    log_ratio: f64,
    pair: Option<(usize, usize)>,
    checked: u64,
    skipped: u64,
    violations: u64,
}

impl Worst {
    fn empty() -> Self {
        Worst {
            log_ratio: f64::NEG_INFINITY,
            pair: None,
            checked: 0,
            skipped: 0,
            violations: 0,
        }
    }

    fn offer(&mut self, log_ratio: f64, pair: (usize, usize), ball: &[GroupElement]) {
        let key = |(i, j): (usize, usize)| (&ball[i], &ball[j]);
        let better = match (log_ratio.total_cmp(&self.log_ratio), self.pair) {
            (Ordering::Greater, _) | (Ordering::Equal, None) => true,
            (Ordering::Equal, Some(cur)) => key(pair) < key(cur),
            (Ordering::Less, _) => false,
        };
        if better {
            self.log_ratio = log_ratio;
            self.pair = Some(pair);
        }
    }

    fn merge(mut self, other: Self, ball: &[GroupElement]) -> Self {
        if let Some(pair) = other.pair {
            self.offer(other.log_ratio, pair, ball);
        }
        self.checked += other.checked;
        self.skipped += other.skipped;
        self.violations += other.violations;
        self
    }
}

/// Sweeps `ω(xy) / (ω(x) ω(y))` over ordered pairs from `ball(R)` and checks
/// it against `M` (given as `ln M`, since `M` may overflow).
///
/// The sweep is exhaustive when `|ball(R)|²` is within the pair cap, and a
/// seeded uniform sample of `pair_cap` pairs otherwise. The arg-max breaks
/// ties by the lexicographic order of normal forms.
pub fn check_submultiplicative(
    weight: &WeightSpec,
    table: &BallTable,
    radius: u32,
    claimed_log_m: f64,
    opts: SubmultOptions,
) -> Result<SubmultReport> {
    weight.validate()?;
    if radius > table.radius() {
        return Err(usage(format!(
            "sweep radius {radius} exceeds table radius {}",
            table.radius()
        )));
    }
    let ball = table.ball(radius);
    let desc = table.group();
    let log_w: Vec<f64> = (0..ball.len())
        .map(|i| weight.log_eval(table.length_at(i) as u64))
        .collect();

    let visit = |acc: &mut Worst, i: usize, j: usize| -> Result<()> {
        let (x, y) = (&ball[i], &ball[j]);
        let xy = x.multiply(y)?;
        let tau = match word_length(&xy, desc, Some(table)) {
            Ok(t) => t,
            Err(Error::OutOfRange { .. }) => {
                acc.skipped += 1;
                return Ok(());
            }
            Err(e) => return Err(e),
        };
        let lw_xy = weight.log_eval(tau);
        let lr = lw_xy - log_w[i] - log_w[j];
        acc.checked += 1;
        let scale = 1.0 + lw_xy.abs() + log_w[i].abs() + log_w[j].abs();
        if lr > claimed_log_m + LOG_TOL * scale {
            acc.violations += 1;
        }
        acc.offer(lr, (i, j), ball);
        Ok(())
    };

    let n = ball.len() as u64;
    let sampled = n.saturating_mul(n) > opts.pair_cap;
    let worst = if sampled {
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
        let mut acc = Worst::empty();
        for _ in 0..opts.pair_cap {
            let i = rng.random_range(0..ball.len());
            let j = rng.random_range(0..ball.len());
            visit(&mut acc, i, j)?;
        }
        acc
    } else {
        (0..ball.len())
            .into_par_iter()
            .map(|i| {
                let mut acc = Worst::empty();
                for j in 0..ball.len() {
                    visit(&mut acc, i, j)?;
                }
                Ok(acc)
            })
            .try_reduce(Worst::empty, |a, b| Ok(a.merge(b, ball)))?
    };

    Ok(SubmultReport {
        weight: *weight,
        radius,
        pairs_checked: worst.checked,
        skipped: worst.skipped,
        sampled,
        worst_ratio: worst.log_ratio.exp(),
        worst_log_ratio: worst.log_ratio,
        argmax: worst
            .pair
            .map(|(i, j)| (ball[i].to_string(), ball[j].to_string())),
        claimed_m: claimed_log_m.exp(),
        claimed_log_m,
        violations: worst.violations,
        pass: worst.violations == 0,
    })
}
