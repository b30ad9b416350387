//! The penalized selection procedure: admissible penalties, the selection
//! criterion `crit(m) = |Y - f_m|^2 + pen(m)`, the minimizer with a
//! deterministic tie rule, and assembly of the theoretical risk bound
//! `C(K) [inf_m (risk(m) + pen(m)) + R]`.

use crate::bounds;
use crate::linalg::RealVector;
use crate::math;
use crate::models::{FamilyKind, ModelCollection};
use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use serde::Serialize;

#[derive(Debug, Clone, PartialEq)]
pub enum SelectionError {
    KNotAboveOne(f64),
    MultiplierBelowOne(f64),
    EmptyCollection,
    LengthMismatch { expected: usize, got: usize },
    MissingLabel(String),
    Invalid(String),
}

impl fmt::Display for SelectionError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SelectionError::KNotAboveOne(k) => write!(f, "K must exceed 1, got {k}"),
            SelectionError::MultiplierBelowOne(m) => {
                write!(f, "penalty multiplier must be at least 1, got {m}")
            }
            SelectionError::EmptyCollection => write!(f, "the model collection is empty"),
            SelectionError::LengthMismatch { expected, got } => {
                write!(f, "observation length {got} does not match the design size {expected}")
            }
            SelectionError::MissingLabel(l) => write!(f, "no entry for model {l}"),
            SelectionError::Invalid(msg) => write!(f, "{msg}"),
        }
    }
}

/// `u = (c + sigma) LambdaBar_inf Lambda_2(S_n) (2 log n + z)`, the sup-norm
/// truncation level behind the general penalty.
pub fn compute_u(
    sigma: f64,
    c: f64,
    lambda_bar_inf: f64,
    lambda2_sn: f64,
    n: usize,
    z: f64,
) -> Result<f64, SelectionError> {
    if n < 2 {
        return Err(SelectionError::Invalid(format!("need n >= 2, got {n}")));
    }
    if !(z >= 0.0) {
        return Err(SelectionError::Invalid(format!("need z >= 0, got {z}")));
    }
    if !(lambda_bar_inf >= 1.0) {
        return Err(SelectionError::Invalid(format!(
            "LambdaBar_inf is floored at 1 by definition, got {lambda_bar_inf}"
        )));
    }
    Ok((c + sigma) * lambda_bar_inf * lambda2_sn * (2.0 * math::ln(n as f64) + z))
}

/// Default deviation level `z = exp_b log n`, the value used by the closed
/// family routes.
pub fn default_z(n: usize, exp_b: f64) -> f64 {
    exp_b * math::ln(n as f64)
}

/// Which penalty factor to install.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum PenaltyMode {
    /// General route: factor `kappa^2 (sigma^2 + 2 c u / kappa)` with `u`
    /// computed from the collection's seminorms.
    General,
    /// Family route: the closed factor of the matching family result, driven
    /// by the calibration `a` and decay exponent `exp_b` instead of `u`.
    FamilyRoute { a: f64, exp_b: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PenaltyEntry {
    pub dim: usize,
    pub delta: f64,
    pub pen: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PenaltyConfig {
    pub k: f64,
    pub z: f64,
    /// Truncation level of the general route (recorded in both modes).
    pub u: f64,
    /// The factor multiplying `K (D_m + Delta_m)`, mode dependent.
    pub factor: f64,
    pub multiplier: f64,
    pub mode: PenaltyMode,
    pub per_model: BTreeMap<String, PenaltyEntry>,
}

/// Fills the minimal admissible penalty `pen(m) = K x factor x (D_m +
/// Delta_m)` for every model, scaled by `multiplier >= 1` for callers who
/// want slack above the threshold.
pub fn penalty(
    collection: &ModelCollection,
    sigma: f64,
    c: f64,
    k: f64,
    z: f64,
    mode: PenaltyMode,
    multiplier: f64,
) -> Result<PenaltyConfig, SelectionError> {
    if !(k > 1.0) {
        return Err(SelectionError::KNotAboveOne(k));
    }
    if !(multiplier >= 1.0) {
        return Err(SelectionError::MultiplierBelowOne(multiplier));
    }
    if collection.items.is_empty() {
        return Err(SelectionError::EmptyCollection);
    }
    let lambdas = collection
        .lambdas()
        .map_err(|e| SelectionError::Invalid(format!("collection seminorms: {e}")))?;
    let u = compute_u(sigma, c, lambdas.lambda_bar_inf, lambdas.lambda2, collection.n, z)?;
    let factor = match mode {
        PenaltyMode::General => bounds::penalty_factor_general(sigma, c, u),
        PenaltyMode::FamilyRoute { a, exp_b } => {
            if !(a > 0.0 && exp_b > 0.0) {
                return Err(SelectionError::Invalid(format!(
                    "family route needs a > 0 and exp_b > 0, got a={a}, exp_b={exp_b}"
                )));
            }
            match collection.family {
                FamilyKind::Histogram => bounds::penalty_factor_histogram(sigma, c, a, exp_b),
                FamilyKind::PiecewisePoly { degree } => {
                    bounds::penalty_factor_pp(sigma, c, a, exp_b, degree)
                }
                FamilyKind::Trigonometric { .. } => {
                    bounds::penalty_factor_trig(sigma, c, a, exp_b)
                }
            }
        }
    };
    let per_model = collection
        .items
        .iter()
        .map(|e| {
            let dim = e.space.dim();
            let pen = multiplier * k * factor * (dim as f64 + e.delta);
            (e.label.clone(), PenaltyEntry { dim, delta: e.delta, pen })
        })
        .collect();
    Ok(PenaltyConfig { k, z, u, factor, multiplier, mode, per_model })
}

/// `crit(m) = |Y - Pi_m Y|^2 + pen(m)` for every model, keyed by label.
pub fn criterion(
    collection: &ModelCollection,
    pen: &PenaltyConfig,
    y: &RealVector,
) -> Result<BTreeMap<String, f64>, SelectionError> {
    if y.len() != collection.n {
        return Err(SelectionError::LengthMismatch { expected: collection.n, got: y.len() });
    }
    let mut out = BTreeMap::new();
    for e in &collection.items {
        let entry = pen
            .per_model
            .get(&e.label)
            .ok_or_else(|| SelectionError::MissingLabel(e.label.clone()))?;
        let resid = e
            .space
            .residual_sq(y.as_slice())
            .map_err(|err| SelectionError::Invalid(format!("residual for {}: {err}", e.label)))?;
        out.insert(e.label.clone(), resid + entry.pen);
    }
    Ok(out)
}

/// Relative tolerance within which criterion values count as tied.
pub const TIE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SelectionResult {
    pub chosen: String,
    pub crit_values: BTreeMap<String, f64>,
    /// Least-squares fit under the chosen model.
    pub fitted: RealVector,
    /// All labels within tolerance of the minimum, in tie-rule order.
    pub ties: Vec<String>,
}

/// Minimizes the criterion. Ties within `TIE_TOL x (1 + |min|)` are broken
/// by smaller dimension, then label order, making the result independent of
/// the collection's storage order.
pub fn select(
    collection: &ModelCollection,
    pen: &PenaltyConfig,
    y: &RealVector,
) -> Result<SelectionResult, SelectionError> {
    let crit_values = criterion(collection, pen, y)?;
    let min = crit_values
        .values()
        .fold(f64::INFINITY, |acc, &v| acc.min(v));
    if !min.is_finite() {
        return Err(SelectionError::Invalid("criterion values are not finite".to_string()));
    }
    let tol = TIE_TOL * (1.0 + min.abs());
    let mut ties: Vec<(usize, String)> = crit_values
        .iter()
        .filter(|(_, &v)| v <= min + tol)
        .map(|(label, _)| (pen.per_model[label].dim, label.clone()))
        .collect();
    ties.sort();
    let chosen = ties[0].1.clone();
    let entry = collection
        .entry(&chosen)
        .ok_or_else(|| SelectionError::MissingLabel(chosen.clone()))?;
    let fitted = entry
        .space
        .project(y.as_slice())
        .and_then(RealVector::new)
        .map_err(|err| SelectionError::Invalid(format!("projection: {err}")))?;
    Ok(SelectionResult {
        chosen,
        crit_values,
        fitted,
        ties: ties.into_iter().map(|(_, l)| l).collect(),
    })
}

/// Exact risk `E|f - f_m|^2 = |f - Pi_m f|^2 + variance x D_m`, valid for
/// any centered independent noise with the given per-coordinate variance.
pub fn exact_risks(
    collection: &ModelCollection,
    f: &RealVector,
    noise_variance: f64,
) -> Result<BTreeMap<String, f64>, SelectionError> {
    if f.len() != collection.n {
        return Err(SelectionError::LengthMismatch { expected: collection.n, got: f.len() });
    }
    let mut out = BTreeMap::new();
    for e in &collection.items {
        let bias = e
            .space
            .residual_sq(f.as_slice())
            .map_err(|err| SelectionError::Invalid(format!("bias for {}: {err}", e.label)))?;
        out.insert(e.label.clone(), bias + noise_variance * e.space.dim() as f64);
    }
    Ok(out)
}

/// Right side of the oracle inequality: `C(K) (inf_m (risk(m) + pen(m)) +
/// remainder)`. Risk estimates must cover every penalized model.
pub fn oracle_rhs(
    pen: &PenaltyConfig,
    risks: &BTreeMap<String, f64>,
    remainder: f64,
) -> Result<f64, SelectionError> {
    let ck = bounds::constant_ck(pen.k)
        .map_err(|e| SelectionError::Invalid(format!("{e}")))?;
    let mut inf = f64::INFINITY;
    for (label, entry) in &pen.per_model {
        let risk = risks
            .get(label)
            .ok_or_else(|| SelectionError::MissingLabel(label.clone()))?;
        inf = inf.min(risk + entry.pen);
    }
    if !inf.is_finite() {
        return Err(SelectionError::EmptyCollection);
    }
    Ok(ck * (inf + remainder))
}
