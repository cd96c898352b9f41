//! Flat `section.key = value` experiment configuration.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::PathBuf;
use std::str::FromStr;

use sha2::{Digest, Sha256};
use wga_core::group::{GroupDescriptor, GroupKind};
use wga_core::weight::WeightSpec;
use wga_core::{Error, Result, DEFAULT_KG};

#[derive(Debug, Clone, PartialEq)]
pub struct VnSettings {
    pub trials: u64,
    pub max_vars: usize,
    pub max_degree: u32,
    pub max_terms: usize,
    pub support_size: u32,
    pub grid: usize,
    pub inflation: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FreeGroupSettings {
    pub d: u32,
    pub beta: f64,
    pub rs_k_max: u32,
    pub flatness_samples: usize,
    pub hankel_k_max: u32,
    pub divergence_k_max: u32,
    pub omega_ns: Vec<u32>,
    pub tolerance: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub group: GroupKind,
    pub weight: WeightSpec,
    pub ball_radius: u32,
    pub zeta_cutoff: Option<u32>,
    pub kg: f64,
    pub betas: Vec<f64>,
    pub alphas: Vec<f64>,
    pub cs: Vec<f64>,
    pub seed: u64,
    pub output_dir: PathBuf,
    pub rigorous: bool,
    pub pair_cap: u64,
    pub monotonicity_step: f64,
    pub monotonicity_span: f64,
    pub vn: VnSettings,
    pub free_group: FreeGroupSettings,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            group: GroupKind::Zd { dim: 1 },
            weight: WeightSpec::Polynomial { beta: 1.0 },
            ball_radius: 10,
            zeta_cutoff: None,
            kg: DEFAULT_KG,
            betas: Vec::new(),
            alphas: Vec::new(),
            cs: Vec::new(),
            seed: 42,
            output_dir: PathBuf::from("wga-out"),
            rigorous: false,
            pair_cap: wga_core::weight::DEFAULT_PAIR_CAP,
            monotonicity_step: 0.01,
            monotonicity_span: 100.0,
            vn: VnSettings {
                trials: 500,
                max_vars: 2,
                max_degree: 3,
                max_terms: 4,
                support_size: 3,
                grid: wga_core::vn::DEFAULT_GRID_PER_DIM,
                inflation: wga_core::vn::DEFAULT_INFLATION,
            },
            free_group: FreeGroupSettings {
                d: 2,
                beta: 0.5,
                rs_k_max: 10,
                flatness_samples: 256,
                hankel_k_max: 8,
                divergence_k_max: 10,
                omega_ns: vec![2, 4, 8, 16],
                tolerance: 1e-8,
            },
        }
    }
}

fn usage(msg: impl Into<String>) -> Error {
    Error::Usage(msg.into())
}

fn parse_scalar<T: FromStr>(key: &str, raw: &str) -> Result<T> {
    raw.trim()
        .parse()
        .map_err(|_| usage(format!("cannot parse `{raw}` for {key}")))
}

fn parse_list<T: FromStr>(key: &str, raw: &str) -> Result<Vec<T>> {
    raw.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| parse_scalar(key, s))
        .collect()
}

fn join<T: ToString>(v: &[T]) -> String {
    v.iter().map(T::to_string).collect::<Vec<_>>().join(",")
}

/// Reads `key = value` lines; `#` starts a comment. Later lines win.
pub fn parse_pairs(text: &str) -> Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| usage(format!("config line {}: expected `key = value`", lineno + 1)))?;
        let k = k.trim();
        if k.is_empty() {
            return Err(usage(format!("config line {}: empty key", lineno + 1)));
        }
        out.insert(k.to_string(), v.trim().to_string());
    }
    Ok(out)
}

impl ExperimentConfig {
    pub fn from_text(text: &str) -> Result<Self> {
        Self::from_pairs(&parse_pairs(text)?)
    }

    pub fn from_pairs(pairs: &BTreeMap<String, String>) -> Result<Self> {
        let mut cfg = ExperimentConfig::default();
        cfg.apply(pairs)?;
        Ok(cfg)
    }

    /// Overrides fields from `pairs`, starting from the current values.
    pub fn apply(&mut self, pairs: &BTreeMap<String, String>) -> Result<()> {
        let mut pairs = pairs.clone();
        let mut take = |k: &str| pairs.remove(k);

        let kind = take("group.kind");
        let dim = take("group.dim");
        let current_dim = match self.group {
            GroupKind::Zd { dim } => dim,
            _ => 1,
        };
        let dim: usize = dim.map_or(Ok(current_dim), |d| parse_scalar("group.dim", &d))?;
        self.group = match kind.as_deref().map(str::trim) {
            None => match self.group {
                GroupKind::Zd { .. } => GroupKind::Zd { dim },
                g => g,
            },
            Some("zd") => GroupKind::Zd { dim },
            Some("heisenberg") => GroupKind::Heisenberg,
            Some("free2") => GroupKind::Free2,
            Some(other) => {
                return Err(usage(format!(
                    "group.kind must be zd, heisenberg or free2, got `{other}`"
                )))
            }
        };

        let wkind = take("weight.kind");
        let wbeta = take("weight.beta");
        let walpha = take("weight.alpha");
        let wc = take("weight.C");
        let wvalue = take("weight.value");
        let (cur_alpha, cur_c, cur_beta, cur_value) = match self.weight {
            WeightSpec::Polynomial { beta } => (None, None, Some(beta), None),
            WeightSpec::Exponential { alpha, c } => (Some(alpha), Some(c), None, None),
            WeightSpec::CompositeExpOverPoly { alpha, c, beta } => {
                (Some(alpha), Some(c), Some(beta), None)
            }
            WeightSpec::Constant { value } => (None, None, None, Some(value)),
        };
        let pick = |key: &str, raw: &Option<String>, cur: Option<f64>| -> Result<f64> {
            match raw {
                Some(r) => parse_scalar(key, r),
                None => cur.ok_or_else(|| usage(format!("{key} is required for this weight"))),
            }
        };
        let kind = match wkind.as_deref().map(str::trim) {
            Some(k) => k.to_string(),
            None => weight_kind_name(&self.weight).to_string(),
        };
        let unused = |names: &[(&str, &Option<String>)]| -> Result<()> {
            for (name, v) in names {
                if v.is_some() {
                    return Err(usage(format!("{name} does not apply to weight.kind = {kind}")));
                }
            }
            Ok(())
        };
        self.weight = match kind.as_str() {
            "polynomial" => {
                unused(&[("weight.alpha", &walpha), ("weight.C", &wc), ("weight.value", &wvalue)])?;
                WeightSpec::Polynomial {
                    beta: pick("weight.beta", &wbeta, cur_beta)?,
                }
            }
            "exponential" => {
                unused(&[("weight.beta", &wbeta), ("weight.value", &wvalue)])?;
                WeightSpec::Exponential {
                    alpha: pick("weight.alpha", &walpha, cur_alpha)?,
                    c: pick("weight.C", &wc, cur_c)?,
                }
            }
            "composite" => {
                unused(&[("weight.value", &wvalue)])?;
                WeightSpec::CompositeExpOverPoly {
                    alpha: pick("weight.alpha", &walpha, cur_alpha)?,
                    c: pick("weight.C", &wc, cur_c)?,
                    beta: pick("weight.beta", &wbeta, cur_beta)?,
                }
            }
            "constant" => {
                unused(&[("weight.alpha", &walpha), ("weight.C", &wc), ("weight.beta", &wbeta)])?;
                WeightSpec::Constant {
                    value: pick("weight.value", &wvalue, cur_value)?,
                }
            }
            other => {
                return Err(usage(format!(
                    "weight.kind must be polynomial, exponential, composite or constant, got `{other}`"
                )))
            }
        };

        macro_rules! scalar {
            ($key:literal, $field:expr) => {
                if let Some(v) = take($key) {
                    $field = parse_scalar($key, &v)?;
                }
            };
        }
        macro_rules! list {
            ($key:literal, $field:expr) => {
                if let Some(v) = take($key) {
                    $field = parse_list($key, &v)?;
                }
            };
        }
        scalar!("radius.ball", self.ball_radius);
        if let Some(v) = take("radius.zeta_cutoff") {
            self.zeta_cutoff = match v.trim() {
                "" | "auto" => None,
                s => Some(parse_scalar("radius.zeta_cutoff", s)?),
            };
        }
        scalar!("bound.kg", self.kg);
        list!("sweep.betas", self.betas);
        list!("sweep.alphas", self.alphas);
        list!("sweep.cs", self.cs);
        scalar!("run.seed", self.seed);
        scalar!("run.rigorous", self.rigorous);
        if let Some(v) = take("output.dir") {
            self.output_dir = PathBuf::from(v.trim());
        }
        scalar!("weight_check.pair_cap", self.pair_cap);
        scalar!("weight_check.monotonicity_step", self.monotonicity_step);
        scalar!("weight_check.monotonicity_span", self.monotonicity_span);
        scalar!("vn.trials", self.vn.trials);
        scalar!("vn.max_vars", self.vn.max_vars);
        scalar!("vn.max_degree", self.vn.max_degree);
        scalar!("vn.max_terms", self.vn.max_terms);
        scalar!("vn.support_size", self.vn.support_size);
        scalar!("vn.grid", self.vn.grid);
        scalar!("vn.inflation", self.vn.inflation);
        scalar!("free_group.d", self.free_group.d);
        scalar!("free_group.beta", self.free_group.beta);
        scalar!("free_group.rs_k_max", self.free_group.rs_k_max);
        scalar!("free_group.flatness_samples", self.free_group.flatness_samples);
        scalar!("free_group.hankel_k_max", self.free_group.hankel_k_max);
        scalar!("free_group.divergence_k_max", self.free_group.divergence_k_max);
        list!("free_group.omega_ns", self.free_group.omega_ns);
        scalar!("free_group.tolerance", self.free_group.tolerance);

        if let Some(k) = pairs.keys().next() {
            return Err(usage(format!("unknown config key `{k}`")));
        }
        self.validate()
    }

    pub fn validate(&self) -> Result<()> {
        GroupDescriptor::for_kind(self.group)?;
        self.weight.validate()?;
        if !(self.kg >= 1.0 && self.kg.is_finite()) {
            return Err(usage(format!("bound.kg must be finite and >= 1, got {}", self.kg)));
        }
        if !(self.monotonicity_step > 0.0 && self.monotonicity_span > 0.0) {
            return Err(usage("monotonicity step and span must be positive"));
        }
        if !(self.vn.inflation >= 1.0) || self.vn.grid == 0 {
            return Err(usage("vn.inflation must be >= 1 and vn.grid >= 1"));
        }
        if !(self.free_group.tolerance > 0.0) || self.free_group.flatness_samples == 0 {
            return Err(usage("free_group.tolerance and flatness_samples must be positive"));
        }
        Ok(())
    }

    /// Every key with its value, sorted by key.
    pub fn to_pairs(&self) -> BTreeMap<String, String> {
        let mut m = BTreeMap::new();
        let mut put = |k: &str, v: String| {
            m.insert(k.to_string(), v);
        };
        match self.group {
            GroupKind::Zd { dim } => {
                put("group.kind", "zd".into());
                put("group.dim", dim.to_string());
            }
            GroupKind::Heisenberg => put("group.kind", "heisenberg".into()),
            GroupKind::Free2 => put("group.kind", "free2".into()),
        }
        put("weight.kind", weight_kind_name(&self.weight).into());
        match self.weight {
            WeightSpec::Polynomial { beta } => put("weight.beta", beta.to_string()),
            WeightSpec::Exponential { alpha, c } => {
                put("weight.alpha", alpha.to_string());
                put("weight.C", c.to_string());
            }
            WeightSpec::CompositeExpOverPoly { alpha, c, beta } => {
                put("weight.alpha", alpha.to_string());
                put("weight.C", c.to_string());
                put("weight.beta", beta.to_string());
            }
            WeightSpec::Constant { value } => put("weight.value", value.to_string()),
        }
        put("radius.ball", self.ball_radius.to_string());
        put(
            "radius.zeta_cutoff",
            self.zeta_cutoff.map_or("auto".into(), |c| c.to_string()),
        );
        put("bound.kg", self.kg.to_string());
        put("sweep.betas", join(&self.betas));
        put("sweep.alphas", join(&self.alphas));
        put("sweep.cs", join(&self.cs));
        put("run.seed", self.seed.to_string());
        put("run.rigorous", self.rigorous.to_string());
        put("output.dir", self.output_dir.display().to_string());
        put("weight_check.pair_cap", self.pair_cap.to_string());
        put("weight_check.monotonicity_step", self.monotonicity_step.to_string());
        put("weight_check.monotonicity_span", self.monotonicity_span.to_string());
        put("vn.trials", self.vn.trials.to_string());
        put("vn.max_vars", self.vn.max_vars.to_string());
        put("vn.max_degree", self.vn.max_degree.to_string());
        put("vn.max_terms", self.vn.max_terms.to_string());
        put("vn.support_size", self.vn.support_size.to_string());
        put("vn.grid", self.vn.grid.to_string());
        put("vn.inflation", self.vn.inflation.to_string());
        let fg = &self.free_group;
        put("free_group.d", fg.d.to_string());
        put("free_group.beta", fg.beta.to_string());
        put("free_group.rs_k_max", fg.rs_k_max.to_string());
        put("free_group.flatness_samples", fg.flatness_samples.to_string());
        put("free_group.hankel_k_max", fg.hankel_k_max.to_string());
        put("free_group.divergence_k_max", fg.divergence_k_max.to_string());
        put("free_group.omega_ns", join(&fg.omega_ns));
        put("free_group.tolerance", fg.tolerance.to_string());
        m
    }

    /// Canonical text form; floats use the shortest round-tripping digits.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for (k, v) in self.to_pairs() {
            let _ = writeln!(s, "{k} = {v}");
        }
        s
    }

    /// SHA-256 of the canonical text, hex encoded.
    pub fn hash(&self) -> String {
        hex::encode(Sha256::digest(self.to_text().as_bytes()))
    }

    pub fn descriptor(&self) -> Result<GroupDescriptor> {
        GroupDescriptor::for_kind(self.group)
    }
}

fn weight_kind_name(w: &WeightSpec) -> &'static str {
    match w {
        WeightSpec::Polynomial { .. } => "polynomial",
        WeightSpec::Exponential { .. } => "exponential",
        WeightSpec::CompositeExpOverPoly { .. } => "composite",
        WeightSpec::Constant { .. } => "constant",
    }
}
