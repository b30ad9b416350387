//! TOML run configuration. Parsing is strict (unknown keys are rejected) and
//! validation reports every violation it can find, not only the first.

use anyhow::{anyhow, Context, Result};
use modsel_core::models::{
    build_histogram_collection, build_pp_collection, build_trig_collection, IntervalPartition,
    ModelCollection, TrigMode,
};
use modsel_core::noise::{NoiseKind, NoiseSpec};
use modsel_core::selection::{default_z, PenaltyMode};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
pub struct Config {
    pub run: RunSection,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub family: Option<FamilySection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub noise: Option<NoiseSection>,
    pub selection: SelectionSection,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub experiment: Option<ExperimentSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<CounterSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub covering: Option<CoveringSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub chaining: Option<ChainingSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub data: Option<DataSection>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
pub struct RunSection {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reps: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyName {
    Histogram,
    PiecewisePoly,
    Trigonometric,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TrigModeName {
    Nested,
    AllSubsets,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilySection {
    pub kind: FamilyName,
    pub n: usize,
    /// Finest partition as a number of near-equal blocks.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub blocks: Option<usize>,
    /// Finest partition as explicit cut positions (a cut after design point
    /// `c` for each listed `c`, `1 <= c < n`).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cuts: Option<Vec<usize>>,
    /// Polynomial degree per block (piecewise_poly only).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub degree: Option<usize>,
    /// Frequency budget (trigonometric only): the full space has dimension
    /// `2 * dbar + 1`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dbar: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trig_mode: Option<TrigModeName>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseSection {
    /// gaussian | laplace | centered_poisson | centered_gamma |
    /// bounded_uniform
    pub kind: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sigma: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scale: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mean: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub shape: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub half_width: Option<f64>,
    /// Optional claim overrides; defaults are the preset's certified pair.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub claim_sigma: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub claim_c: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SelectionSection {
    pub k: f64,
    /// Deviation level; when absent, `exp_b * log n` is used.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub z: Option<f64>,
    pub exp_b: f64,
    /// general | family
    pub mode: String,
    /// Minimum-block calibration constant of the family route.
    pub a: f64,
    pub multiplier: f64,
}

impl Default for SelectionSection {
    fn default() -> Self {
        SelectionSection {
            k: 2.0,
            z: None,
            exp_b: 1.0,
            mode: "general".to_string(),
            a: 1.0,
            multiplier: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentSection {
    /// Deviation levels (chi experiment) or absolute thresholds (sup-norm
    /// experiment).
    pub xs: Vec<f64>,
    /// Sup-norm truncation level; computed from the collection when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub u: Option<f64>,
    /// Label of the model to project onto; the largest model when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub model: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reps: Option<u64>,
    /// Regression function as per-block constants on equal blocks.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub f_blocks: Option<Vec<f64>>,
    /// Regression function as a file of newline-separated values.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub f_path: Option<String>,
    /// Reference model for the recovery-rate column of oracle reports.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub true_label: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CounterSection {
    pub dim: usize,
    pub p: f64,
    #[serde(default = "one")]
    pub c: f64,
    pub us: Vec<f64>,
    /// hypothetical | gaussian_concentration
    #[serde(default = "hypothetical")]
    pub rule: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reps: Option<u64>,
}

fn one() -> f64 {
    1.0
}

fn hypothetical() -> String {
    "hypothetical".to_string()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoveringSection {
    pub dim: usize,
    pub num_points: usize,
    pub deltas: Vec<f64>,
    /// l1 | l2 | linf
    #[serde(default = "l2")]
    pub norm: String,
}

fn l2() -> String {
    "l2".to_string()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChainingSection {
    pub dims: Vec<usize>,
    #[serde(default = "one")]
    pub v: f64,
    #[serde(default = "one")]
    pub b: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DataSection {
    pub path: String,
}

/// Parses and validates; the error message lists every violation found.
pub fn parse_config(text: &str) -> Result<Config> {
    let cfg: Config = toml::from_str(text).context("config parse error")?;
    let violations = validate(&cfg);
    if violations.is_empty() {
        Ok(cfg)
    } else {
        Err(anyhow!("invalid config:\n  - {}", violations.join("\n  - ")))
    }
}

/// Collects every constraint violation in the configuration.
pub fn validate(cfg: &Config) -> Vec<String> {
    let mut out = Vec::new();
    if let Some(family) = &cfg.family {
        if let Err(errs) = family.build() {
            out.extend(errs);
        }
    }
    if let Some(noise) = &cfg.noise {
        if let Err(errs) = noise.build() {
            out.extend(errs);
        }
    }
    let sel = &cfg.selection;
    if !(sel.k > 1.0) {
        out.push(format!("K must exceed 1, got {}", sel.k));
    }
    if !(sel.exp_b > 0.0) {
        out.push(format!("exp_b must be positive, got {}", sel.exp_b));
    }
    if !(sel.a > 0.0) {
        out.push(format!("a must be positive, got {}", sel.a));
    }
    if !(sel.multiplier >= 1.0) {
        out.push(format!("multiplier must be at least 1, got {}", sel.multiplier));
    }
    if let Some(z) = sel.z {
        if !(z >= 0.0) {
            out.push(format!("z must be nonnegative, got {z}"));
        }
    }
    if sel.mode != "general" && sel.mode != "family" {
        out.push(format!("selection mode must be general or family, got {}", sel.mode));
    }
    if let Some(exp) = &cfg.experiment {
        if exp.f_blocks.is_some() && exp.f_path.is_some() {
            out.push("give f_blocks or f_path, not both".to_string());
        }
        if let Some(blocks) = &exp.f_blocks {
            if blocks.is_empty() {
                out.push("f_blocks must not be empty".to_string());
            } else if let Some(family) = &cfg.family {
                if family.n % blocks.len() != 0 {
                    out.push(format!(
                        "f_blocks length {} does not divide n = {}",
                        blocks.len(),
                        family.n
                    ));
                }
            }
        }
        if exp.xs.iter().any(|x| !x.is_finite()) {
            out.push("xs must be finite".to_string());
        }
    }
    if let Some(ce) = &cfg.counterexample {
        if !(ce.p > 0.0 && ce.p <= 1.0) {
            out.push(format!("counterexample p must lie in (0, 1], got {}", ce.p));
        }
        if !(ce.c >= 1.0) {
            out.push(format!("counterexample constant must be at least 1, got {}", ce.c));
        }
        if ce.dim == 0 {
            out.push("counterexample dim must be positive".to_string());
        }
        if ce.us.iter().any(|u| !(*u > 0.0)) {
            out.push("counterexample us must be positive".to_string());
        }
        if ce.rule != "hypothetical" && ce.rule != "gaussian_concentration" {
            out.push(format!(
                "counterexample rule must be hypothetical or gaussian_concentration, got {}",
                ce.rule
            ));
        }
    }
    if let Some(cov) = &cfg.covering {
        if cov.dim == 0 {
            out.push("covering dim must be positive".to_string());
        }
        if cov.num_points == 0 {
            out.push("covering num_points must be positive".to_string());
        }
        if cov.deltas.iter().any(|d| !(*d > 0.0)) {
            out.push("covering deltas must be positive".to_string());
        }
        if !["l1", "l2", "linf"].contains(&cov.norm.as_str()) {
            out.push(format!("covering norm must be l1, l2, or linf, got {}", cov.norm));
        }
    }
    if let Some(ch) = &cfg.chaining {
        if ch.dims.is_empty() || ch.dims.contains(&0) {
            out.push("chaining dims must be positive and nonempty".to_string());
        }
        if !(ch.v >= 0.0 && ch.b >= 0.0) || (ch.v == 0.0 && ch.b == 0.0) {
            out.push("chaining scales must be nonnegative and not both zero".to_string());
        }
    }
    out
}

impl FamilySection {
    fn finest(&self) -> Result<IntervalPartition, Vec<String>> {
        match (&self.blocks, &self.cuts) {
            (Some(_), Some(_)) => Err(vec!["give blocks or cuts, not both".to_string()]),
            (None, None) => Err(vec![
                "a partition family needs blocks or cuts".to_string(),
            ]),
            (Some(k), None) => {
                IntervalPartition::equal_blocks(self.n, *k).map_err(|e| vec![e.to_string()])
            }
            (None, Some(cuts)) => {
                // cut after position c splits {1..n}; bad cut lists are
                // reported by the partition validator with every defect
                let mut blocks = Vec::new();
                let mut lo = 1usize;
                for &c in cuts {
                    blocks.push((lo, c));
                    lo = c.saturating_add(1);
                }
                blocks.push((lo, self.n));
                IntervalPartition::new(self.n, blocks).map_err(|e| vec![e.to_string()])
            }
        }
    }

    /// Builds the model collection, reporting every violation found.
    pub fn build(&self) -> Result<ModelCollection, Vec<String>> {
        match self.kind {
            FamilyName::Histogram => {
                let mut errs = Vec::new();
                if self.degree.is_some() {
                    errs.push("degree only applies to piecewise_poly".to_string());
                }
                if self.dbar.is_some() || self.trig_mode.is_some() {
                    errs.push("dbar and trig_mode only apply to trigonometric".to_string());
                }
                let finest = match self.finest() {
                    Ok(f) => f,
                    Err(e) => {
                        errs.extend(e);
                        return Err(errs);
                    }
                };
                match build_histogram_collection(&finest) {
                    Ok(c) if errs.is_empty() => Ok(c),
                    Ok(_) => Err(errs),
                    Err(e) => {
                        errs.push(e.to_string());
                        Err(errs)
                    }
                }
            }
            FamilyName::PiecewisePoly => {
                let mut errs = Vec::new();
                if self.dbar.is_some() || self.trig_mode.is_some() {
                    errs.push("dbar and trig_mode only apply to trigonometric".to_string());
                }
                let degree = match self.degree {
                    Some(d) => d,
                    None => {
                        errs.push("piecewise_poly needs a degree".to_string());
                        return Err(errs);
                    }
                };
                let finest = match self.finest() {
                    Ok(f) => f,
                    Err(e) => {
                        errs.extend(e);
                        return Err(errs);
                    }
                };
                match build_pp_collection(&finest, degree) {
                    Ok(c) if errs.is_empty() => Ok(c),
                    Ok(_) => Err(errs),
                    Err(e) => {
                        errs.push(e.to_string());
                        Err(errs)
                    }
                }
            }
            FamilyName::Trigonometric => {
                let mut errs = Vec::new();
                if self.blocks.is_some() || self.cuts.is_some() {
                    errs.push("blocks and cuts only apply to partition families".to_string());
                }
                if self.degree.is_some() {
                    errs.push("degree only applies to piecewise_poly".to_string());
                }
                let dbar = match self.dbar {
                    Some(d) => d,
                    None => {
                        errs.push("trigonometric needs dbar".to_string());
                        return Err(errs);
                    }
                };
                let mode = match self.trig_mode.unwrap_or(TrigModeName::Nested) {
                    TrigModeName::Nested => TrigMode::Nested,
                    TrigModeName::AllSubsets => TrigMode::AllSubsets,
                };
                match build_trig_collection(self.n, dbar, mode) {
                    Ok(c) if errs.is_empty() => Ok(c),
                    Ok(_) => Err(errs),
                    Err(e) => {
                        errs.push(e.to_string());
                        Err(errs)
                    }
                }
            }
        }
    }
}

impl NoiseSection {
    /// Builds the noise spec, applying claim overrides if present.
    pub fn build(&self) -> Result<NoiseSpec, Vec<String>> {
        let mut errs = Vec::new();
        let mut take = |name: &str, v: Option<f64>, wanted: bool| -> f64 {
            match (v, wanted) {
                (Some(x), true) => x,
                (None, true) => {
                    errs.push(format!("noise kind {} needs {name}", self.kind));
                    f64::NAN
                }
                (Some(_), false) => {
                    errs.push(format!("{name} does not apply to noise kind {}", self.kind));
                    f64::NAN
                }
                (None, false) => f64::NAN,
            }
        };
        let kind = match self.kind.as_str() {
            "gaussian" => {
                let sigma = take("sigma", self.sigma, true);
                take("scale", self.scale, false);
                take("mean", self.mean, false);
                take("shape", self.shape, false);
                take("half_width", self.half_width, false);
                NoiseKind::Gaussian { sigma }
            }
            "laplace" => {
                let scale = take("scale", self.scale, true);
                take("sigma", self.sigma, false);
                take("mean", self.mean, false);
                take("shape", self.shape, false);
                take("half_width", self.half_width, false);
                NoiseKind::Laplace { scale }
            }
            "centered_poisson" => {
                let mean = take("mean", self.mean, true);
                take("sigma", self.sigma, false);
                take("scale", self.scale, false);
                take("shape", self.shape, false);
                take("half_width", self.half_width, false);
                NoiseKind::CenteredPoisson { mean }
            }
            "centered_gamma" => {
                let shape = take("shape", self.shape, true);
                let scale = take("scale", self.scale, true);
                take("sigma", self.sigma, false);
                take("mean", self.mean, false);
                take("half_width", self.half_width, false);
                NoiseKind::CenteredGamma { shape, scale }
            }
            "bounded_uniform" => {
                let half_width = take("half_width", self.half_width, true);
                take("sigma", self.sigma, false);
                take("scale", self.scale, false);
                take("mean", self.mean, false);
                take("shape", self.shape, false);
                NoiseKind::BoundedUniform { half_width }
            }
            other => {
                errs.push(format!("unknown noise kind {other}"));
                return Err(errs);
            }
        };
        if !errs.is_empty() {
            return Err(errs);
        }
        let preset = NoiseSpec::preset(kind).map_err(|e| vec![e.to_string()])?;
        match (self.claim_sigma, self.claim_c) {
            (None, None) => Ok(preset),
            (s, c) => NoiseSpec::with_claim(
                kind,
                s.unwrap_or(preset.sigma()),
                c.unwrap_or(preset.c()),
            )
            .map_err(|e| vec![e.to_string()]),
        }
    }
}

impl SelectionSection {
    pub fn resolve_z(&self, n: usize) -> f64 {
        self.z.unwrap_or_else(|| default_z(n, self.exp_b))
    }

    pub fn penalty_mode(&self) -> PenaltyMode {
        if self.mode == "family" {
            PenaltyMode::FamilyRoute { a: self.a, exp_b: self.exp_b }
        } else {
            PenaltyMode::General
        }
    }
}
