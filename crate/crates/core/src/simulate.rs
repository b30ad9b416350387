//! Monte Carlo harness. Each experiment is a plan struct exposing a
//! per-replication kernel and an order-sensitive summarizer; running the
//! kernels serially or in parallel and summarizing the collected outputs in
//! replication order produces bitwise identical reports.

use crate::bounds;
use crate::linalg::{RealVector, Subspace};
use crate::math;
use crate::models::ModelCollection;
use crate::noise::NoiseSpec;
use crate::selection::{self, PenaltyConfig, PenaltyMode};
use crate::stats;
use crate::KAPPA;
use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

#[derive(Debug, Clone, PartialEq)]
pub enum SimulateError {
    Invalid(String),
}

impl fmt::Display for SimulateError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SimulateError::Invalid(msg) => write!(f, "{msg}"),
        }
    }
}

/// Confidence level for all binomial intervals in this module.
pub const CI_CONFIDENCE: f64 = 0.95;

/// Empirical tail frequency at one threshold with an exact binomial interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TailEstimate {
    /// Deviation parameter the row was computed at (equal to `threshold`
    /// when the experiment takes absolute thresholds).
    pub x: f64,
    pub threshold: f64,
    pub exceed: u64,
    pub reps: u64,
    pub p_hat: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
    pub bound: f64,
    /// The bound is 1 or larger, so dominance carries no information.
    pub vacuous: bool,
    /// No exceedances, or the upper interval endpoint is below the bound.
    pub pass: bool,
}

/// Builds a `TailEstimate` from an exceedance count.
pub fn tail_from_count(x: f64, threshold: f64, exceed: u64, reps: u64, bound: f64) -> TailEstimate {
    let (ci_lo, ci_hi) = stats::clopper_pearson(exceed, reps, CI_CONFIDENCE);
    TailEstimate {
        x,
        threshold,
        exceed,
        reps,
        p_hat: exceed as f64 / reps as f64,
        ci_lo,
        ci_hi,
        bound,
        vacuous: bound >= 1.0,
        pass: exceed == 0 || ci_hi <= bound,
    }
}

/// Shared scalar engine: counts `sampler(rep) >= threshold` over `reps`
/// replications. The sampler owns its randomness, keyed by the replication
/// index, so results are reproducible and order-independent.
pub fn estimate_tail<F: FnMut(u64) -> f64>(
    mut sampler: F,
    threshold: f64,
    bound: f64,
    reps: u64,
) -> TailEstimate {
    let exceed = (0..reps).filter(|&r| sampler(r) >= threshold).count() as u64;
    tail_from_count(threshold, threshold, exceed, reps, bound)
}

/// A Monte Carlo experiment whose replications are independent. `kernel`
/// must depend only on the plan and the replication index.
pub trait RepKernel: Sync {
    type Out: Send;
    fn reps(&self) -> u64;
    fn kernel(&self, rep: u64) -> Self::Out;
}

/// Runs every replication on the current thread, in index order.
pub fn collect_serial<K: RepKernel>(plan: &K) -> Vec<K::Out> {
    (0..plan.reps()).map(|r| plan.kernel(r)).collect()
}

fn kahan_sum<I: Iterator<Item = f64>>(values: I) -> f64 {
    let mut sum = 0.0;
    let mut comp = 0.0;
    for v in values {
        let y = v - comp;
        let t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    sum
}

/// Mean and standard error by compensated summation in slice order.
fn mean_and_stderr(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    if n == 0 {
        return (0.0, 0.0);
    }
    let mean = kahan_sum(values.iter().copied()) / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let var = kahan_sum(values.iter().map(|v| (v - mean) * (v - mean))) / (n - 1) as f64;
    (mean, math::sqrt(var / n as f64))
}

/// Report for the threshold-sweep experiments.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentReport {
    pub name: String,
    pub seed: u64,
    pub reps: u64,
    /// Numeric configuration echo.
    pub params: BTreeMap<String, f64>,
    pub rows: Vec<TailEstimate>,
    /// All rows pass.
    pub pass: bool,
}

fn finish_report(
    name: &str,
    seed: u64,
    reps: u64,
    params: BTreeMap<String, f64>,
    rows: Vec<TailEstimate>,
) -> ExperimentReport {
    let pass = rows.iter().all(|r| r.pass);
    ExperimentReport { name: String::from(name), seed, reps, params, rows, pass }
}

fn draw_noise(noise: &NoiseSpec, n: usize, seed: u64, rep: u64) -> Vec<f64> {
    noise.sample_stream(n, seed, rep)
}

/// Projection statistics used by the deviation experiments.
fn projection_stats(space: &Subspace, xi: &[f64]) -> (f64, f64) {
    let proj = space.project(xi).expect("ambient dimensions match");
    let norm_sq = proj.iter().map(|v| v * v).sum::<f64>();
    let sup = proj.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
    (norm_sq, sup)
}

/// Tests the truncated quadratic deviation bound: the probability that
/// `|Pi_S xi|_2^2` clears the chi-type threshold while `|Pi_S xi|_inf`
/// stays under `u` must be at most `e^{-x}`.
pub struct ChiTailPlan<'a> {
    pub space: &'a Subspace,
    pub noise: NoiseSpec,
    pub xs: Vec<f64>,
    pub u: f64,
    pub reps: u64,
    pub seed: u64,
}

impl RepKernel for ChiTailPlan<'_> {
    type Out = (f64, f64);
    fn reps(&self) -> u64 {
        self.reps
    }
    fn kernel(&self, rep: u64) -> (f64, f64) {
        let xi = draw_noise(&self.noise, self.space.ambient_dim(), self.seed, rep);
        projection_stats(self.space, &xi)
    }
}

impl ChiTailPlan<'_> {
    pub fn summarize(&self, outs: &[(f64, f64)]) -> ExperimentReport {
        let d = self.space.dim();
        let rows = self
            .xs
            .iter()
            .map(|&x| {
                let thr =
                    bounds::chi_threshold(self.noise.sigma(), self.noise.c(), self.u, d, x);
                let exceed = outs
                    .iter()
                    .filter(|(norm_sq, sup)| *norm_sq >= thr && *sup <= self.u)
                    .count() as u64;
                tail_from_count(x, thr, exceed, self.reps, math::exp(-x))
            })
            .collect();
        let mut params = BTreeMap::new();
        params.insert(String::from("dim"), d as f64);
        params.insert(String::from("n"), self.space.ambient_dim() as f64);
        params.insert(String::from("sigma"), self.noise.sigma());
        params.insert(String::from("c"), self.noise.c());
        params.insert(String::from("u"), self.u);
        finish_report("chi-tail", self.seed, self.reps, params, rows)
    }

    pub fn run_serial(&self) -> ExperimentReport {
        self.summarize(&collect_serial(self))
    }
}

/// Tests the sup-norm deviation bound: `P(|Pi_S xi|_inf >= x)` against
/// `2n exp(-x^2 / (2 Lambda_2^2 (sigma^2 + c x)))`. The `xs` here are
/// absolute thresholds, not deviation levels.
pub struct SupNormPlan<'a> {
    pub space: &'a Subspace,
    pub noise: NoiseSpec,
    pub xs: Vec<f64>,
    pub reps: u64,
    pub seed: u64,
}

impl RepKernel for SupNormPlan<'_> {
    type Out = f64;
    fn reps(&self) -> u64 {
        self.reps
    }
    fn kernel(&self, rep: u64) -> f64 {
        let xi = draw_noise(&self.noise, self.space.ambient_dim(), self.seed, rep);
        projection_stats(self.space, &xi).1
    }
}

impl SupNormPlan<'_> {
    pub fn summarize(&self, outs: &[f64]) -> ExperimentReport {
        let lambda2 = self.space.lambda2();
        let n = self.space.ambient_dim();
        let rows = self
            .xs
            .iter()
            .map(|&x| {
                let bound =
                    bounds::sup_norm_tail(lambda2, self.noise.sigma(), self.noise.c(), x, n);
                let exceed = outs.iter().filter(|&&sup| sup >= x).count() as u64;
                tail_from_count(x, x, exceed, self.reps, bound.value)
            })
            .collect();
        let mut params = BTreeMap::new();
        params.insert(String::from("dim"), self.space.dim() as f64);
        params.insert(String::from("n"), n as f64);
        params.insert(String::from("lambda2"), lambda2);
        params.insert(String::from("sigma"), self.noise.sigma());
        params.insert(String::from("c"), self.noise.c());
        finish_report("supnorm-tail", self.seed, self.reps, params, rows)
    }

    pub fn run_serial(&self) -> ExperimentReport {
        self.summarize(&collect_serial(self))
    }
}

/// Tests the chaining bound in norm form. The scale pair is instantiated as
/// in the quadratic proof: `z_x` is the square root of the chi-type
/// threshold and the effective linear scale is `c u / z_x`, so the event is
/// again joint with `|Pi_S xi|_inf <= u`.
pub struct SupBoundPlan<'a> {
    pub space: &'a Subspace,
    pub noise: NoiseSpec,
    pub xs: Vec<f64>,
    pub u: f64,
    pub reps: u64,
    pub seed: u64,
}

impl RepKernel for SupBoundPlan<'_> {
    type Out = (f64, f64);
    fn reps(&self) -> u64 {
        self.reps
    }
    fn kernel(&self, rep: u64) -> (f64, f64) {
        let xi = draw_noise(&self.noise, self.space.ambient_dim(), self.seed, rep);
        projection_stats(self.space, &xi)
    }
}

impl SupBoundPlan<'_> {
    /// Norm threshold at deviation `x`.
    pub fn threshold(&self, x: f64) -> f64 {
        let d = self.space.dim();
        let sigma = self.noise.sigma();
        let c = self.noise.c();
        let z = math::sqrt(bounds::chi_threshold(sigma, c, self.u, d, x));
        let b = if c == 0.0 || self.u == 0.0 { 0.0 } else { c * self.u / z };
        bounds::sup_bound_norm(sigma, b, d, x)
    }

    pub fn summarize(&self, outs: &[(f64, f64)]) -> ExperimentReport {
        let rows = self
            .xs
            .iter()
            .map(|&x| {
                let thr = self.threshold(x);
                let exceed = outs
                    .iter()
                    .filter(|(norm_sq, sup)| math::sqrt(*norm_sq) >= thr && *sup <= self.u)
                    .count() as u64;
                tail_from_count(x, thr, exceed, self.reps, math::exp(-x))
            })
            .collect();
        let mut params = BTreeMap::new();
        params.insert(String::from("dim"), self.space.dim() as f64);
        params.insert(String::from("n"), self.space.ambient_dim() as f64);
        params.insert(String::from("sigma"), self.noise.sigma());
        params.insert(String::from("c"), self.noise.c());
        params.insert(String::from("u"), self.u);
        finish_report("sup-bound", self.seed, self.reps, params, rows)
    }

    pub fn run_serial(&self) -> ExperimentReport {
        self.summarize(&collect_serial(self))
    }
}

/// Report of the expectation check `E |Pi_S xi|_2 <= sqrt(D)` for
/// unit-variance noise.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MeanSupReport {
    pub dim: usize,
    pub seed: u64,
    pub reps: u64,
    pub mean: f64,
    pub stderr: f64,
    pub jensen_bound: f64,
    /// Exact chi mean, available for standard Gaussian noise.
    pub exact_mean: Option<f64>,
    pub pass: bool,
}

/// Estimates `E |Pi_S xi|_2` and checks it against `sqrt(D)`; requires
/// unit componentwise variance.
pub struct MeanSupPlan<'a> {
    pub space: &'a Subspace,
    pub noise: NoiseSpec,
    pub reps: u64,
    pub seed: u64,
}

impl RepKernel for MeanSupPlan<'_> {
    type Out = f64;
    fn reps(&self) -> u64 {
        self.reps
    }
    fn kernel(&self, rep: u64) -> f64 {
        let xi = draw_noise(&self.noise, self.space.ambient_dim(), self.seed, rep);
        math::sqrt(projection_stats(self.space, &xi).0)
    }
}

impl MeanSupPlan<'_> {
    pub fn validate(&self) -> Result<(), SimulateError> {
        let var = self.noise.variance();
        if (var - 1.0).abs() > 1e-12 {
            return Err(SimulateError::Invalid(format!(
                "the expectation check needs unit componentwise variance, got {var}"
            )));
        }
        Ok(())
    }

    pub fn summarize(&self, outs: &[f64]) -> MeanSupReport {
        let d = self.space.dim();
        let (mean, stderr) = mean_and_stderr(outs);
        let jensen = math::sqrt(d as f64);
        let exact = if self.noise.is_standard_gaussian() {
            Some(if d == 0 { 0.0 } else { stats::chi_mean(d) })
        } else {
            None
        };
        let mut pass = mean <= jensen + 3.0 * stderr;
        if let Some(e) = exact {
            pass = pass && (mean - e).abs() <= 3.0 * stderr.max(1e-15);
        }
        MeanSupReport {
            dim: d,
            seed: self.seed,
            reps: self.reps,
            mean,
            stderr,
            jensen_bound: jensen,
            exact_mean: exact,
            pass,
        }
    }

    pub fn run_serial(&self) -> Result<MeanSupReport, SimulateError> {
        self.validate()?;
        Ok(self.summarize(&collect_serial(self)))
    }
}

/// Risk report for the penalized selector against its oracle bound.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleReport {
    pub seed: u64,
    pub reps: u64,
    pub k: f64,
    pub z: f64,
    pub u: f64,
    pub penalty_factor: f64,
    /// Monte Carlo mean of `|f - fitted|^2` under the selected model.
    pub lhs_mean: f64,
    pub lhs_stderr: f64,
    /// Theoretical right side including the remainder.
    pub rhs: f64,
    pub remainder: f64,
    /// Minimum of risk + penalty over the collection (before the outer
    /// constant).
    pub inf_risk_plus_pen: f64,
    pub pass: bool,
    /// Fraction of replications selecting `true_label`, when one was given.
    pub recovery_rate: Option<f64>,
    pub chosen_counts: BTreeMap<String, u64>,
}

/// Runs the full selection procedure per replication and compares the Monte
/// Carlo risk of the selected estimator with the oracle right side.
pub struct OraclePlan<'a> {
    collection: &'a ModelCollection,
    noise: NoiseSpec,
    f: &'a RealVector,
    pen: PenaltyConfig,
    rhs: f64,
    remainder: f64,
    inf_risk_plus_pen: f64,
    reps: u64,
    seed: u64,
    true_label: Option<String>,
}

impl<'a> OraclePlan<'a> {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        collection: &'a ModelCollection,
        noise: NoiseSpec,
        f: &'a RealVector,
        k: f64,
        z: f64,
        reps: u64,
        seed: u64,
        true_label: Option<String>,
    ) -> Result<Self, SimulateError> {
        let wrap = |msg: String| SimulateError::Invalid(msg);
        let pen = selection::penalty(
            collection,
            noise.sigma(),
            noise.c(),
            k,
            z,
            PenaltyMode::General,
            1.0,
        )
        .map_err(|e| wrap(format!("penalty: {e}")))?;
        let risks = selection::exact_risks(collection, f, noise.variance())
            .map_err(|e| wrap(format!("risks: {e}")))?;
        let lambdas = collection
            .lambdas()
            .map_err(|e| wrap(format!("seminorms: {e}")))?;
        let remainder = bounds::remainder_r(&bounds::RemainderInput::General {
            sigma: noise.sigma(),
            c: noise.c(),
            u: pen.u,
            sigma_weights: collection.sigma_weights(),
            lambda_bar_inf: lambdas.lambda_bar_inf,
            z,
        });
        let rhs = selection::oracle_rhs(&pen, &risks, remainder)
            .map_err(|e| wrap(format!("oracle bound: {e}")))?;
        let inf_risk_plus_pen = risks
            .iter()
            .map(|(l, r)| r + pen.per_model[l].pen)
            .fold(f64::INFINITY, f64::min);
        if let Some(label) = &true_label {
            if collection.entry(label).is_none() {
                return Err(wrap(format!("unknown reference model {label}")));
            }
        }
        Ok(OraclePlan {
            collection,
            noise,
            f,
            pen,
            rhs,
            remainder,
            inf_risk_plus_pen,
            reps,
            seed,
            true_label,
        })
    }

    pub fn penalty_config(&self) -> &PenaltyConfig {
        &self.pen
    }

    pub fn summarize(&self, outs: &[(f64, String)]) -> OracleReport {
        let losses: Vec<f64> = outs.iter().map(|(l, _)| *l).collect();
        let (lhs_mean, lhs_stderr) = mean_and_stderr(&losses);
        let mut chosen_counts: BTreeMap<String, u64> = BTreeMap::new();
        for (_, label) in outs {
            *chosen_counts.entry(label.clone()).or_insert(0) += 1;
        }
        let recovery_rate = self.true_label.as_ref().map(|label| {
            let hits = chosen_counts.get(label).copied().unwrap_or(0);
            hits as f64 / self.reps as f64
        });
        OracleReport {
            seed: self.seed,
            reps: self.reps,
            k: self.pen.k,
            z: self.pen.z,
            u: self.pen.u,
            penalty_factor: self.pen.factor,
            lhs_mean,
            lhs_stderr,
            rhs: self.rhs,
            remainder: self.remainder,
            inf_risk_plus_pen: self.inf_risk_plus_pen,
            pass: lhs_mean <= self.rhs + 3.0 * lhs_stderr,
            recovery_rate,
            chosen_counts,
        }
    }

    pub fn run_serial(&self) -> OracleReport {
        self.summarize(&collect_serial(self))
    }
}

impl RepKernel for OraclePlan<'_> {
    type Out = (f64, String);
    fn reps(&self) -> u64 {
        self.reps
    }
    fn kernel(&self, rep: u64) -> (f64, String) {
        let n = self.collection.n;
        let xi = draw_noise(&self.noise, n, self.seed, rep);
        let y: Vec<f64> = self
            .f
            .as_slice()
            .iter()
            .zip(&xi)
            .map(|(a, b)| a + b)
            .collect();
        let y = RealVector::new(y).expect("noise draws are finite");
        let result = selection::select(self.collection, &self.pen, &y)
            .expect("plan validated at construction");
        let loss = self
            .f
            .as_slice()
            .iter()
            .zip(result.fitted.as_slice())
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>();
        (loss, result.chosen)
    }
}

/// Threshold rule for the concentration counter-example.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum CounterThreshold {
    /// The hypothetical mean-centered bound `C p sqrt(D) + C (sqrt(u) + u)`
    /// that the mixture process defeats.
    Hypothetical { c: f64 },
    /// The Gaussian concentration threshold `sqrt(D) + sqrt(2u)`, which the
    /// pure process respects.
    GaussianConcentration,
}

/// Counter-example report: rows as usual plus the violation flag the
/// experiment exists to produce.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CounterReport {
    pub dim: usize,
    pub p: f64,
    pub rule: CounterThreshold,
    pub seed: u64,
    pub reps: u64,
    pub rows: Vec<TailEstimate>,
    /// Some row's lower interval endpoint clears its bound, proving the
    /// claimed inequality false.
    pub violation_found: bool,
}

/// Mixture process: with probability `p` the replication is the norm of a
/// standard Gaussian vector in dimension `dim`, otherwise zero. Both branch
/// processes satisfy the sub-exponential increment condition with c = 0,
/// yet the mixture defeats any bound centered at the mean.
pub struct CounterExamplePlan {
    pub dim: usize,
    pub p: f64,
    pub us: Vec<f64>,
    pub rule: CounterThreshold,
    pub reps: u64,
    pub seed: u64,
}

impl RepKernel for CounterExamplePlan {
    type Out = f64;
    fn reps(&self) -> u64 {
        self.reps
    }
    fn kernel(&self, rep: u64) -> f64 {
        let mut rng = NoiseSpec::rng(self.seed, rep);
        // branch draw first, then the Gaussian vector; both are always
        // consumed so the stream layout does not depend on the branch
        let coin: f64 = rng.random();
        let norm_sq: f64 = (0..self.dim)
            .map(|_| {
                let g: f64 = rng.sample(StandardNormal);
                g * g
            })
            .sum();
        if coin < self.p {
            math::sqrt(norm_sq)
        } else {
            0.0
        }
    }
}

impl CounterExamplePlan {
    pub fn validate(&self) -> Result<(), SimulateError> {
        if !(self.p > 0.0 && self.p <= 1.0) {
            return Err(SimulateError::Invalid(format!(
                "mixture probability must lie in (0, 1], got {}",
                self.p
            )));
        }
        if let CounterThreshold::Hypothetical { c } = self.rule {
            if !(c >= 1.0) {
                return Err(SimulateError::Invalid(format!(
                    "the hypothetical constant must be at least 1, got {c}"
                )));
            }
        }
        Ok(())
    }

    pub fn threshold(&self, u: f64) -> f64 {
        let sqrt_d = math::sqrt(self.dim as f64);
        match self.rule {
            CounterThreshold::Hypothetical { c } => {
                c * self.p * sqrt_d + c * (math::sqrt(u) + u)
            }
            CounterThreshold::GaussianConcentration => sqrt_d + math::sqrt(2.0 * u),
        }
    }

    pub fn summarize(&self, outs: &[f64]) -> CounterReport {
        let rows: Vec<TailEstimate> = self
            .us
            .iter()
            .map(|&u| {
                let thr = self.threshold(u);
                let exceed = outs.iter().filter(|&&z| z >= thr).count() as u64;
                tail_from_count(u, thr, exceed, self.reps, math::exp(-u))
            })
            .collect();
        let violation_found = rows.iter().any(|r| r.ci_lo > r.bound);
        CounterReport {
            dim: self.dim,
            p: self.p,
            rule: self.rule,
            seed: self.seed,
            reps: self.reps,
            rows,
            violation_found,
        }
    }

    pub fn run_serial(&self) -> Result<CounterReport, SimulateError> {
        self.validate()?;
        Ok(self.summarize(&collect_serial(self)))
    }
}

/// The chi-type threshold in norm form never exceeds its own square root
/// budget; used by the sup-bound plan.
pub fn norm_threshold_below_quadratic(sigma: f64, c: f64, u: f64, d: usize, x: f64) -> bool {
    let z = math::sqrt(bounds::chi_threshold(sigma, c, u, d, x));
    let b = if c == 0.0 || u == 0.0 { 0.0 } else { c * u / z };
    let thr = bounds::sup_bound_norm(sigma, b, d, x);
    thr <= z * (1.0 + 1e-12) && thr <= KAPPA * (math::sqrt(sigma * sigma * (d as f64 + x)) + b * (d as f64 + x)) + 1e-12
}
