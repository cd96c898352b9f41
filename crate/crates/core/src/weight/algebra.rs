use std::collections::BTreeMap;
use std::sync::Arc;

use num_complex::Complex64;

use super::WeightSpec;
use crate::error::{usage, Result};
use crate::group::{GroupElement, WordMetric};

/// The weighted algebra `ℓ¹(G, ω)`: a length oracle and a weight.
#[derive(Debug)]
pub struct Algebra {
    metric: WordMetric,
    weight: WeightSpec,
}

impl Algebra {
    pub fn new(metric: WordMetric, weight: WeightSpec) -> Result<Arc<Self>> {
        weight.validate()?;
        Ok(Arc::new(Algebra { metric, weight }))
    }

    pub fn metric(&self) -> &WordMetric {
        &self.metric
    }

    pub fn weight(&self) -> &WeightSpec {
        &self.weight
    }

    pub fn log_weight(&self, x: &GroupElement) -> Result<f64> {
        Ok(self.weight.log_eval(self.metric.length(x)?))
    }

    fn same_context(&self, other: &Algebra) -> bool {
        self.metric.group() == other.metric.group() && self.weight == other.weight
    }
}

/// A finitely supported element of `ℓ¹(G, ω)`.
#[derive(Debug, Clone)]
pub struct WeightedElement {
    algebra: Arc<Algebra>,
    coeffs: BTreeMap<GroupElement, Complex64>,
}

impl WeightedElement {
    pub fn zero(algebra: &Arc<Algebra>) -> Self {
        WeightedElement {
            algebra: algebra.clone(),
            coeffs: BTreeMap::new(),
        }
    }

    pub fn delta(algebra: &Arc<Algebra>, x: GroupElement) -> Result<Self> {
        Self::from_terms(algebra, [(x, Complex64::new(1.0, 0.0))])
    }

    /// Sums repeated elements; exact zeros are dropped.
    pub fn from_terms<I>(algebra: &Arc<Algebra>, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (GroupElement, Complex64)>,
    {
        let kind = algebra.metric.group().kind();
        let mut out = Self::zero(algebra);
        for (x, c) in terms {
            if x.kind() != kind {
                return Err(usage(format!("element {x} is not in {kind}")));
            }
            *out.coeffs.entry(x).or_default() += c;
        }
        out.prune();
        Ok(out)
    }

    fn prune(&mut self) {
        self.coeffs.retain(|_, c| *c != Complex64::new(0.0, 0.0));
    }

    pub fn algebra(&self) -> &Arc<Algebra> {
        &self.algebra
    }

    pub fn coeffs(&self) -> &BTreeMap<GroupElement, Complex64> {
        &self.coeffs
    }

    pub fn coeff(&self, x: &GroupElement) -> Complex64 {
        self.coeffs.get(x).copied().unwrap_or_default()
    }

    pub fn support_len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `Σ |f(x)| ω(x)`.
    pub fn norm(&self) -> Result<f64> {
        self.coeffs.iter().try_fold(0.0, |acc, (x, c)| {
            Ok(acc + c.norm() * self.algebra.log_weight(x)?.exp())
        })
    }

    fn check_context(&self, other: &WeightedElement) -> Result<()> {
        if Arc::ptr_eq(&self.algebra, &other.algebra) || self.algebra.same_context(&other.algebra)
        {
            Ok(())
        } else {
            Err(usage("operands live in different weighted algebras"))
        }
    }

    pub fn add(&self, other: &WeightedElement) -> Result<Self> {
        self.check_context(other)?;
        let mut out = self.clone();
        for (x, c) in &other.coeffs {
            *out.coeffs.entry(x.clone()).or_default() += c;
        }
        out.prune();
        Ok(out)
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        let mut out = self.clone();
        for c in out.coeffs.values_mut() {
            *c *= factor;
        }
        out.prune();
        out
    }

    /// `(f * g)(z) = Σ_{xy = z} f(x) g(y)`.
    pub fn convolve(&self, other: &WeightedElement) -> Result<Self> {
        self.check_context(other)?;
        let mut out = Self::zero(&self.algebra);
        for (x, a) in &self.coeffs {
            for (y, b) in &other.coeffs {
                *out.coeffs.entry(x.multiply(y)?).or_default() += a * b;
            }
        }
        out.prune();
        Ok(out)
    }

    /// `f^{*k}`, with `f^{*0} = δ_e`.
    pub fn power(&self, k: u32) -> Result<Self> {
        let identity = self.algebra.metric.group().identity();
        let mut acc = Self::delta(&self.algebra, identity)?;
        for _ in 0..k {
            acc = acc.convolve(self)?;
        }
        Ok(acc)
    }
}
