use std::io::{self, Write};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{domain, usage, Error, Result};
use crate::group::{FreeGen, GroupDescriptor, GroupElement};
use crate::spectral::{operator_norm, DenseMatrix, Relation, SpectralCertificate, DEFAULT_MAX_ITER};
use crate::weight::WeightSpec;

pub const DEFAULT_INDEX_CAP: u64 = 1 << 20;
pub const DEFAULT_OMEGA_ROWS_CAP: u64 = 4096;
/// Above this many tuples `s_sum` switches to counting compositions.
const ENUMERATION_CAP: u64 = 1 << 20;

fn check_even(d: u32) -> Result<()> {
    if d == 0 || !d.is_multiple_of(2) {
        return Err(usage(format!("alternating words need an even d >= 2, got {d}")));
    }
    Ok(())
}

fn tuple_count(d: u32, n: u32) -> u64 {
    (n as u64).saturating_pow(d)
}

/// The words `g₁^{x₁} g₂^{x₂} g₁^{x₃} ⋯ g₂^{x_d}` with `1 ≤ xᵢ ≤ n`, indexed
/// in lexicographic order of `(x₁, …, x_d)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlternatingIndex {
    d: u32,
    n: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AdditivityCheck {
    pub pairs: u64,
    pub failures: u64,
    pub pass: bool,
}

impl AlternatingIndex {
    pub fn new(d: u32, n: u32, cap: u64) -> Result<Self> {
        check_even(d)?;
        if n == 0 {
            return Err(usage("alternating words need n >= 1"));
        }
        let count = tuple_count(d, n);
        if count > cap {
            return Err(Error::Resource {
                what: format!("alternating index I^{d}_{n}"),
                projected: count,
                cap,
            });
        }
        Ok(AlternatingIndex { d, n })
    }

    pub fn d(&self) -> u32 {
        self.d
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn len(&self) -> usize {
        tuple_count(self.d, self.n) as usize
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn exponents(&self, mut i: usize) -> Vec<u32> {
        let mut x = vec![0; self.d as usize];
        for slot in x.iter_mut().rev() {
            *slot = 1 + (i % self.n as usize) as u32;
            i /= self.n as usize;
        }
        x
    }

    pub fn index_of(&self, x: &[u32]) -> Option<usize> {
        if x.len() != self.d as usize || x.iter().any(|&v| v == 0 || v > self.n) {
            return None;
        }
        Some(x.iter().fold(0, |acc, &v| acc * self.n as usize + (v - 1) as usize))
    }

    pub fn word(&self, i: usize) -> GroupElement {
        let syllables = self.exponents(i).into_iter().enumerate().map(|(j, x)| {
            let gen = if j % 2 == 0 { FreeGen::G1 } else { FreeGen::G2 };
            (gen, x as i64)
        });
        GroupElement::free2(syllables)
    }

    pub fn tau(&self, i: usize) -> u64 {
        self.exponents(i).iter().map(|&x| x as u64).sum()
    }

    /// `τ(gg') = τ(g) + τ(g')` on all pairs, with lengths from the group engine.
    pub fn additivity_check(&self) -> AdditivityCheck {
        let f2 = GroupDescriptor::free2();
        let words: Vec<GroupElement> = (0..self.len()).map(|i| self.word(i)).collect();
        let lengths: Vec<u64> = words
            .iter()
            .map(|w| f2.closed_form_length(w).expect("free words have closed-form length"))
            .collect();
        let failures: u64 = (0..words.len())
            .into_par_iter()
            .map(|i| {
                let mut bad = 0u64;
                for j in 0..words.len() {
                    let prod = words[i].multiply(&words[j]).expect("same group");
                    let tau = f2.closed_form_length(&prod).expect("free word");
                    if tau != lengths[i] + lengths[j] || lengths[i] != self.tau(i) {
                        bad += 1;
                    }
                }
                bad
            })
            .sum();
        AdditivityCheck {
            pairs: (words.len() as u64).pow(2),
            failures,
            pass: failures == 0,
        }
    }
}

/// `Ω^n_β(g, g') = ((1 + τ(g) + τ(g')) / ((1 + τ(g))(1 + τ(g'))))^β` on `I^d_n`.
#[derive(Debug, Clone)]
pub struct OmegaIn {
    pub index: AlternatingIndex,
    pub beta: f64,
    pub matrix: DenseMatrix,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OmegaCrossCheck {
    pub samples: usize,
    pub max_rel_error: f64,
    pub pass: bool,
}

pub fn omega_in_matrix(d: u32, n: u32, beta: f64, rows_cap: u64) -> Result<OmegaIn> {
    if !(beta >= 0.0 && beta.is_finite()) {
        return Err(usage(format!("need finite beta >= 0, got {beta}")));
    }
    let index = AlternatingIndex::new(d, n, rows_cap)?;
    let taus: Vec<f64> = (0..index.len()).map(|i| index.tau(i) as f64).collect();
    let matrix = DenseMatrix::from_fn(taus.len(), taus.len(), |i, j| {
        let (a, b) = (taus[i], taus[j]);
        ((1.0 + a + b) / ((1.0 + a) * (1.0 + b))).powf(beta)
    });
    Ok(OmegaIn { index, beta, matrix })
}

impl OmegaIn {
    /// Compares random entries with `ω(gg') / (ω(g) ω(g'))` evaluated through
    /// free-group multiplication and word length.
    pub fn cross_check(&self, samples: usize, seed: u64) -> OmegaCrossCheck {
        let f2 = GroupDescriptor::free2();
        let weight = WeightSpec::Polynomial { beta: self.beta };
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let len = self.index.len();
        let mut max_rel_error: f64 = 0.0;
        for _ in 0..samples {
            let (i, j) = (rng.random_range(0..len), rng.random_range(0..len));
            let (g, h) = (self.index.word(i), self.index.word(j));
            let tau = |x: &GroupElement| f2.closed_form_length(x).expect("free word");
            let gh = g.multiply(&h).expect("same group");
            let expect = (weight.log_eval(tau(&gh)) - weight.log_eval(tau(&g)) - weight.log_eval(tau(&h))).exp();
            let got = self.matrix.get(i, j);
            max_rel_error = max_rel_error.max((got - expect).abs() / expect);
        }
        OmegaCrossCheck {
            samples,
            max_rel_error,
            pass: max_rel_error <= 1e-12,
        }
    }
}

/// `Σ_{1 ≤ x₁,…,x_d ≤ n} (1 + x₁ + ⋯ + x_d)^{−2β}`, by enumeration for small
/// inputs and otherwise by counting tuples with a given sum.
pub fn s_sum(d: u32, n: u32, beta: f64) -> Result<f64> {
    if d == 0 || n == 0 {
        return Err(usage("s_sum needs d >= 1 and n >= 1"));
    }
    if !beta.is_finite() {
        return Err(usage(format!("beta must be finite, got {beta}")));
    }
    let count = tuple_count(d, n);
    if d < 4 && count <= ENUMERATION_CAP {
        let mut x = vec![1u32; d as usize];
        let mut total = 0.0;
        loop {
            let s: u64 = x.iter().map(|&v| v as u64).sum();
            total += (1.0 + s as f64).powf(-2.0 * beta);
            let mut pos = d as usize;
            loop {
                if pos == 0 {
                    return Ok(total);
                }
                pos -= 1;
                if x[pos] < n {
                    x[pos] += 1;
                    break;
                }
                x[pos] = 1;
            }
        }
    }
    // hist[s] = #{x ∈ [1, n]^j : Σx = s + j}
    let n = n as usize;
    let mut hist: Vec<f64> = vec![1.0; n];
    for _ in 1..d {
        let mut next = vec![0.0; hist.len() + n - 1];
        for (s, &c) in hist.iter().enumerate() {
            for slot in &mut next[s..s + n] {
                *slot += c;
            }
        }
        hist = next;
    }
    Ok(hist
        .iter()
        .enumerate()
        .map(|(s, &c)| c * (1.0 + (s + d as usize) as f64).powf(-2.0 * beta))
        .sum())
}

/// `2^{−β} n^{d/2} S_n^{1/2}`.
pub fn omega_lower_bound(d: u32, n: u32, beta: f64) -> Result<f64> {
    Ok(2f64.powf(-beta) * (n as f64).powf(d as f64 / 2.0) * s_sum(d, n, beta)?.sqrt())
}

/// Checks `‖Ω^n_β‖ ≥ 2^{−β} n^{d/2} S_n^{1/2}` by power iteration from the
/// all-ones vector.
pub fn omega_lower_bound_check(
    d: u32,
    n: u32,
    beta: f64,
    rel_tol: f64,
    rows_cap: u64,
) -> Result<SpectralCertificate> {
    let om = omega_in_matrix(d, n, beta, rows_cap)?;
    let bound = omega_lower_bound(d, n, beta)?;
    let start = vec![1.0; om.matrix.rows()];
    let it = operator_norm(&om.matrix, &start, rel_tol, DEFAULT_MAX_ITER);
    Ok(SpectralCertificate::from_iteration(
        format!("Omega^{n}_{beta} on I^{d}_{n}"),
        &om.matrix,
        it,
        bound,
        Relation::AtLeast,
        rel_tol,
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DivergencePoint {
    pub n: u64,
    pub s_n: f64,
    pub l_n: f64,
}

/// `L_n = K_G^{−1} 2^{−d/2} 2^{−β} S_n^{1/2}` for `n = 2, 4, …, 2^{k_max}`.
pub fn divergence_sequence(d: u32, beta: f64, kg: f64, k_max: u32) -> Result<Vec<DivergencePoint>> {
    check_even(d)?;
    if !(kg > 0.0 && kg.is_finite()) {
        return Err(usage(format!("K_G must be positive, got {kg}")));
    }
    if !(beta >= 0.0) {
        return Err(usage(format!("need beta >= 0, got {beta}")));
    }
    if 2.0 * beta >= d as f64 {
        return Err(domain(format!(
            "the lower bound diverges only when 2 beta < d; got beta = {beta}, d = {d}"
        )));
    }
    if k_max > 30 {
        return Err(usage(format!("k_max {k_max} is beyond the supported range")));
    }
    let scale = 2f64.powf(-(d as f64) / 2.0 - beta) / kg;
    (1..=k_max)
        .into_par_iter()
        .map(|k| {
            let n = 1u32 << k;
            let s_n = s_sum(d, n, beta)?;
            Ok(DivergencePoint {
                n: n as u64,
                s_n,
                l_n: scale * s_n.sqrt(),
            })
        })
        .collect()
}

/// CSV with header `n,S_n,L_n`.
pub fn write_divergence_csv<W: Write>(points: &[DivergencePoint], mut out: W) -> io::Result<()> {
    writeln!(out, "n,S_n,L_n")?;
    for p in points {
        writeln!(out, "{},{},{}", p.n, p.s_n, p.l_n)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::DEFAULT_KG;
    use approx::assert_relative_eq;

    #[test]
    fn enumeration_d2_n2() {
        let idx = AlternatingIndex::new(2, 2, DEFAULT_INDEX_CAP).unwrap();
        let words: Vec<String> = (0..idx.len()).map(|i| idx.word(i).to_string()).collect();
        let expect: Vec<String> = [(1, 1), (1, 2), (2, 1), (2, 2)]
            .iter()
            .map(|&(a, b)| GroupElement::free2([(FreeGen::G1, a), (FreeGen::G2, b)]).to_string())
            .collect();
        assert_eq!(words, expect);
        assert_eq!(idx.index_of(&[2, 1]), Some(2));
        assert_eq!(idx.index_of(&[3, 1]), None);
    }

    #[test]
    fn concatenation_length() {
        let f2 = GroupDescriptor::free2();
        let g = GroupElement::free2([(FreeGen::G1, 1), (FreeGen::G2, 1)]);
        assert_eq!(f2.closed_form_length(&g.multiply(&g).unwrap()), Some(4));
    }

    #[test]
    fn additivity_and_guards() {
        let rep = AlternatingIndex::new(2, 4, DEFAULT_INDEX_CAP).unwrap().additivity_check();
        assert_eq!(rep.pairs, 256);
        assert!(rep.pass);
        assert!(AlternatingIndex::new(4, 2, DEFAULT_INDEX_CAP).unwrap().additivity_check().pass);
        assert!(AlternatingIndex::new(3, 2, DEFAULT_INDEX_CAP).is_err());
        assert!(AlternatingIndex::new(2, 0, DEFAULT_INDEX_CAP).is_err());
        assert!(matches!(
            AlternatingIndex::new(2, 100, 4096),
            Err(Error::Resource { projected: 10_000, .. })
        ));
    }

    #[test]
    fn omega_single_word_and_beta_zero() {
        let om = omega_in_matrix(2, 1, 1.0, DEFAULT_OMEGA_ROWS_CAP).unwrap();
        assert_relative_eq!(om.matrix.get(0, 0), 5.0 / 9.0, max_relative = 1e-15);
        let om = omega_in_matrix(2, 1, 2.5, DEFAULT_OMEGA_ROWS_CAP).unwrap();
        assert_relative_eq!(om.matrix.get(0, 0), (5.0f64 / 9.0).powf(2.5), max_relative = 1e-15);
        let ones = omega_in_matrix(2, 4, 0.0, DEFAULT_OMEGA_ROWS_CAP).unwrap();
        assert!(ones.matrix.data().iter().all(|&x| x == 1.0));
        assert!(omega_in_matrix(2, 65, 1.0, DEFAULT_OMEGA_ROWS_CAP).is_err());
    }

    #[test]
    fn omega_matches_group_engine() {
        for (d, n, beta) in [(2, 8, 0.5), (2, 16, 1.0), (4, 4, 1.5)] {
            let om = omega_in_matrix(d, n, beta, DEFAULT_OMEGA_ROWS_CAP).unwrap();
            let c = om.cross_check(1000, 7);
            assert!(c.pass, "{c:?}");
        }
    }

    #[test]
    fn s_sum_examples() {
        assert_relative_eq!(s_sum(2, 2, 0.5).unwrap(), 31.0 / 30.0, max_relative = 1e-15);
        assert_relative_eq!(s_sum(2, 1, 1.0).unwrap(), 1.0 / 9.0, max_relative = 1e-15);
        // beta = 0 counts tuples
        assert_eq!(s_sum(3, 5, 0.0).unwrap(), 125.0);
        let mut prev = f64::INFINITY;
        for i in 0..20 {
            let s = s_sum(2, 6, 0.5 * i as f64).unwrap();
            assert!(s < prev);
            prev = s;
        }
        let big = s_sum(2, 3, 30.0).unwrap();
        assert_relative_eq!(big, 3f64.powi(-60), max_relative = 1e-6);
    }

    #[test]
    fn histogram_agrees_with_enumeration() {
        for (d, n, beta) in [(4u32, 6u32, 0.7), (6, 3, 1.2), (4, 10, 0.0)] {
            let mut brute = 0.0;
            let idx = AlternatingIndex::new(d, n, DEFAULT_INDEX_CAP).unwrap();
            for i in 0..idx.len() {
                brute += (1.0 + idx.tau(i) as f64).powf(-2.0 * beta);
            }
            assert_relative_eq!(s_sum(d, n, beta).unwrap(), brute, max_relative = 1e-12);
        }
    }

    #[test]
    fn lower_bound_certificates() {
        let c = omega_lower_bound_check(2, 1, 1.0, 1e-8, DEFAULT_OMEGA_ROWS_CAP).unwrap();
        // (1/2) · 1 · (1/3²)^{1/2}
        assert_relative_eq!(c.bound, 1.0 / 6.0, max_relative = 1e-15);
        assert_relative_eq!(c.norm, 5.0 / 9.0, max_relative = 1e-15);
        assert!(c.pass);
        for n in [2, 4, 8, 16] {
            let c = omega_lower_bound_check(2, n, 0.5, 1e-8, DEFAULT_OMEGA_ROWS_CAP).unwrap();
            assert!(c.pass && c.converged, "{c:?}");
        }
        let c = omega_lower_bound_check(2, 4, 0.0, 1e-8, DEFAULT_OMEGA_ROWS_CAP).unwrap();
        assert_relative_eq!(c.norm, 16.0, max_relative = 1e-12);
        assert_relative_eq!(c.bound, 16.0, max_relative = 1e-12);
        assert!(c.pass);
    }

    #[test]
    fn divergence_increases() {
        for beta in [0.5, 0.9] {
            let seq = divergence_sequence(2, beta, DEFAULT_KG, 10).unwrap();
            assert_eq!(seq.len(), 10);
            assert!(seq.windows(2).all(|w| w[1].l_n > w[0].l_n));
        }
        let seq = divergence_sequence(2, 0.5, DEFAULT_KG, 10).unwrap();
        assert!(seq[9].l_n / seq[0].l_n > 10.0);
        let ratio = seq[9].l_n / seq[8].l_n;
        assert!((ratio - 2f64.sqrt()).abs() < 0.05, "{ratio}");
        let d2 = (2.0 * 0.5f64.exp2() * DEFAULT_KG).recip();
        assert_relative_eq!(seq[0].l_n, d2 * seq[0].s_n.sqrt(), max_relative = 1e-15);
    }

    #[test]
    fn divergence_guards_and_csv() {
        assert!(matches!(divergence_sequence(2, 1.0, DEFAULT_KG, 3), Err(Error::Domain(_))));
        assert!(divergence_sequence(3, 0.5, DEFAULT_KG, 3).is_err());
        let seq = divergence_sequence(4, 1.5, DEFAULT_KG, 2).unwrap();
        let mut buf = Vec::new();
        write_divergence_csv(&seq, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("n,S_n,L_n\n2,"));
        assert_eq!(text.lines().count(), 3);
    }
}
