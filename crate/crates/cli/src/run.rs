//! Subcommand orchestration: resolve settings, build the objects, run the
//! experiment, stage artifacts, write them, and map verdicts to exit codes.

use crate::config::Config;
use crate::exec;
use crate::report::{self, Artifact};
use anyhow::{anyhow, bail, Context, Result};
use modsel_core::bounds::{self, Norm};
use modsel_core::linalg::{RealVector, Subspace};
use modsel_core::models::ModelCollection;
use modsel_core::noise::NoiseSpec;
use modsel_core::selection::{self, PenaltyConfig, SelectionResult};
use modsel_core::simulate::{
    ChiTailPlan, CounterExamplePlan, CounterThreshold, OraclePlan, SupNormPlan,
};
use rand::Rng;
use rand_distr::StandardNormal;
use serde::Serialize;
use std::collections::BTreeMap;
use std::fs;
use std::path::PathBuf;

/// Exit code for a completed run whose verdicts did not all pass.
pub const EXIT_VERDICT_FAIL: i32 = 2;

/// Fully resolved invocation: config plus command line overrides.
pub struct Settings {
    pub config: Config,
    pub seed: u64,
    pub reps_flag: Option<u64>,
    pub out: PathBuf,
    pub threads: usize,
}

const DEFAULT_TAIL_REPS: u64 = 100_000;
const DEFAULT_ORACLE_REPS: u64 = 1_000;

impl Settings {
    fn reps(&self, section: Option<u64>, default: u64) -> u64 {
        self.reps_flag
            .or(section)
            .or(self.config.run.reps)
            .unwrap_or(default)
    }

    fn collection(&self) -> Result<ModelCollection> {
        let family = self
            .config
            .family
            .as_ref()
            .ok_or_else(|| anyhow!("this subcommand needs a [family] section"))?;
        let coll = family
            .build()
            .map_err(|errs| anyhow!("invalid family: {}", errs.join("; ")))?;
        for warning in coll.condition_warnings(self.config.selection.a, self.config.selection.exp_b)
        {
            eprintln!("warning: {warning}");
        }
        Ok(coll)
    }

    fn noise(&self) -> Result<NoiseSpec> {
        let section = self
            .config
            .noise
            .as_ref()
            .ok_or_else(|| anyhow!("this subcommand needs a [noise] section"))?;
        section
            .build()
            .map_err(|errs| anyhow!("invalid noise: {}", errs.join("; ")))
    }

    /// The subspace an experiment projects onto: a labelled model, or the
    /// largest one in the collection.
    fn pick_space<'a>(&self, coll: &'a ModelCollection) -> Result<(String, &'a Subspace)> {
        let label = self
            .config
            .experiment
            .as_ref()
            .and_then(|e| e.model.clone());
        match label {
            Some(l) => {
                let entry = coll
                    .entry(&l)
                    .ok_or_else(|| anyhow!("no model labelled {l} in the collection"))?;
                Ok((l, &entry.space))
            }
            None => {
                let entry = coll
                    .items
                    .iter()
                    .max_by_key(|e| e.space.dim())
                    .ok_or_else(|| anyhow!("empty collection"))?;
                Ok((entry.label.clone(), &entry.space))
            }
        }
    }

    /// Truncation level: configured, or computed from the collection's
    /// seminorms at the default deviation level.
    fn resolve_u(&self, coll: &ModelCollection, noise: &NoiseSpec) -> Result<f64> {
        if let Some(u) = self.config.experiment.as_ref().and_then(|e| e.u) {
            return Ok(u);
        }
        let lambdas = coll.lambdas().map_err(|e| anyhow!("seminorms: {e}"))?;
        let z = self.config.selection.resolve_z(coll.n);
        selection::compute_u(
            noise.sigma(),
            noise.c(),
            lambdas.lambda_bar_inf,
            lambdas.lambda2,
            coll.n,
            z,
        )
        .map_err(|e| anyhow!("truncation level: {e}"))
    }

    fn xs(&self) -> Result<Vec<f64>> {
        let xs = self
            .config
            .experiment
            .as_ref()
            .map(|e| e.xs.clone())
            .unwrap_or_default();
        if xs.is_empty() {
            bail!("this subcommand needs [experiment] xs = [...]");
        }
        Ok(xs)
    }

    /// Regression function for the oracle experiment: per-block constants,
    /// a file, or zero.
    fn regression_f(&self, n: usize) -> Result<RealVector> {
        let exp = self.config.experiment.as_ref();
        if let Some(blocks) = exp.and_then(|e| e.f_blocks.as_ref()) {
            if blocks.is_empty() || !n.is_multiple_of(blocks.len()) {
                bail!("f_blocks length {} does not divide n = {n}", blocks.len());
            }
            let len = n / blocks.len();
            let mut f = Vec::with_capacity(n);
            for &value in blocks {
                f.extend(std::iter::repeat_n(value, len));
            }
            return RealVector::new(f).map_err(|e| anyhow!("f_blocks: {e}"));
        }
        if let Some(path) = exp.and_then(|e| e.f_path.as_ref()) {
            let values = read_vector(path)?;
            if values.len() != n {
                bail!("{path} holds {} values, the design needs {n}", values.len());
            }
            return RealVector::new(values).map_err(|e| anyhow!("{path}: {e}"));
        }
        Ok(RealVector::zeros(n))
    }
}

/// Reads newline-separated floats; blank lines are skipped.
pub fn read_vector(path: &str) -> Result<Vec<f64>> {
    let text = fs::read_to_string(path).with_context(|| format!("cannot read {path}"))?;
    let mut values = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let v: f64 = line
            .parse()
            .with_context(|| format!("{path}:{}: not a number: {line}", idx + 1))?;
        values.push(v);
    }
    Ok(values)
}

// ---------------------------------------------------------------- bounds

#[derive(Serialize)]
struct BoundReport {
    name: String,
    params: BTreeMap<String, f64>,
    value: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    vacuous: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    phi_x0: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pair_majorant: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    kappa_majorant: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pass: Option<bool>,
}

impl BoundReport {
    fn plain(name: &str, params: &BTreeMap<String, f64>, value: f64) -> Self {
        BoundReport {
            name: name.to_string(),
            params: params.clone(),
            value,
            vacuous: None,
            phi_x0: None,
            pair_majorant: None,
            kappa_majorant: None,
            pass: None,
        }
    }
}

struct Params<'a> {
    name: &'a str,
    map: BTreeMap<String, f64>,
    used: Vec<String>,
}

impl<'a> Params<'a> {
    fn parse(name: &'a str, raw: &[String]) -> Result<Self> {
        let mut map = BTreeMap::new();
        for item in raw {
            let (key, value) = item
                .split_once('=')
                .ok_or_else(|| anyhow!("expected key=value, got {item}"))?;
            let value: f64 = value
                .parse()
                .with_context(|| format!("parameter {key} is not a number"))?;
            if map.insert(key.to_string(), value).is_some() {
                bail!("parameter {key} given twice");
            }
        }
        Ok(Params { name, map, used: Vec::new() })
    }

    fn get(&mut self, key: &str) -> Result<f64> {
        self.used.push(key.to_string());
        self.map
            .get(key)
            .copied()
            .ok_or_else(|| anyhow!("{} needs parameter {key}", self.name))
    }

    fn get_usize(&mut self, key: &str) -> Result<usize> {
        let v = self.get(key)?;
        if v < 0.0 || v.fract() != 0.0 || v > usize::MAX as f64 {
            bail!("parameter {key} must be a nonnegative integer, got {v}");
        }
        Ok(v as usize)
    }

    fn finish(self) -> Result<()> {
        let stray: Vec<&String> = self
            .map
            .keys()
            .filter(|k| !self.used.contains(k))
            .collect();
        if stray.is_empty() {
            Ok(())
        } else {
            bail!(
                "{} does not take: {}",
                self.name,
                stray.iter().map(|s| s.as_str()).collect::<Vec<_>>().join(", ")
            )
        }
    }
}

const BOUND_NAMES: &[&str] = &[
    "bernstein-quantile",
    "bernstein-tail",
    "sup-bound-norm",
    "chi-threshold",
    "supnorm-tail",
    "truncated-moment",
    "constant-ck",
    "penalty-factor",
    "penalty-factor-histogram",
    "penalty-factor-pp",
    "penalty-factor-trig",
    "remainder-general",
    "remainder-histogram",
    "remainder-pp",
    "remainder-trig",
    "h-constant",
];

/// Evaluates one named bound at `key=value` parameters and prints the JSON
/// result on stdout.
pub fn run_compute_bounds(name: &str, raw_params: &[String]) -> Result<i32> {
    let mut p = Params::parse(name, raw_params)?;
    let report = match name {
        "bernstein-quantile" => {
            let (v2, c, u) = (p.get("v2")?, p.get("c")?, p.get("u")?);
            let value = bounds::bernstein_quantile(v2, c, u);
            BoundReport::plain(name, &p.map, value)
        }
        "bernstein-tail" => {
            let (v2, c, x) = (p.get("v2")?, p.get("c")?, p.get("x")?);
            let value = bounds::bernstein_tail(v2, c, x);
            BoundReport::plain(name, &p.map, value)
        }
        "sup-bound-norm" => {
            let (v, b, d, x) = (p.get("v")?, p.get("b")?, p.get_usize("d")?, p.get("x")?);
            let value = bounds::sup_bound_norm(v, b, d, x);
            BoundReport::plain(name, &p.map, value)
        }
        "chi-threshold" => {
            let (sigma, c, u, d, x) =
                (p.get("sigma")?, p.get("c")?, p.get("u")?, p.get_usize("d")?, p.get("x")?);
            let value = bounds::chi_threshold(sigma, c, u, d, x);
            BoundReport::plain(name, &p.map, value)
        }
        "supnorm-tail" => {
            let (lambda2, sigma, c, x, n) = (
                p.get("lambda2")?,
                p.get("sigma")?,
                p.get("c")?,
                p.get("x")?,
                p.get_usize("n")?,
            );
            let tail = bounds::sup_norm_tail(lambda2, sigma, c, x, n);
            let mut r = BoundReport::plain(name, &p.map, tail.value);
            r.vacuous = Some(tail.vacuous);
            r
        }
        "truncated-moment" => {
            let (a, alpha, beta, x0, moment) = (
                p.get("a")?,
                p.get("alpha")?,
                p.get("beta")?,
                p.get("x0")?,
                p.get_usize("p")?,
            );
            let tm = bounds::truncated_moment_bound(a, alpha, beta, x0, moment as u32)
                .map_err(|e| anyhow!("{e}"))?;
            let mut r = BoundReport::plain(name, &p.map, tm.bound);
            r.phi_x0 = Some(tm.phi_x0);
            r
        }
        "constant-ck" => {
            let k = p.get("k")?;
            let value = bounds::constant_ck(k).map_err(|e| anyhow!("{e}"))?;
            BoundReport::plain(name, &p.map, value)
        }
        "penalty-factor" => {
            let (sigma, c, u) = (p.get("sigma")?, p.get("c")?, p.get("u")?);
            BoundReport::plain(name, &p.map, bounds::penalty_factor_general(sigma, c, u))
        }
        "penalty-factor-histogram" => {
            let (sigma, c, a, b) = (p.get("sigma")?, p.get("c")?, p.get("a")?, p.get("b")?);
            BoundReport::plain(name, &p.map, bounds::penalty_factor_histogram(sigma, c, a, b))
        }
        "penalty-factor-pp" => {
            let (sigma, c, a, b, d) =
                (p.get("sigma")?, p.get("c")?, p.get("a")?, p.get("b")?, p.get_usize("d")?);
            BoundReport::plain(name, &p.map, bounds::penalty_factor_pp(sigma, c, a, b, d))
        }
        "penalty-factor-trig" => {
            let (sigma, c, a, b) = (p.get("sigma")?, p.get("c")?, p.get("a")?, p.get("b")?);
            BoundReport::plain(name, &p.map, bounds::penalty_factor_trig(sigma, c, a, b))
        }
        "remainder-general" => {
            let input = bounds::RemainderInput::General {
                sigma: p.get("sigma")?,
                c: p.get("c")?,
                u: p.get("u")?,
                sigma_weights: p.get("weights")?,
                lambda_bar_inf: p.get("lambda_bar_inf")?,
                z: p.get("z")?,
            };
            BoundReport::plain(name, &p.map, bounds::remainder_r(&input))
        }
        "remainder-histogram" => {
            let input = bounds::RemainderInput::Histogram {
                sigma: p.get("sigma")?,
                c: p.get("c")?,
                a: p.get("a")?,
                exp_b: p.get("b")?,
                n: p.get_usize("n")?,
                sigma_weights: p.get("weights")?,
            };
            BoundReport::plain(name, &p.map, bounds::remainder_r(&input))
        }
        "remainder-pp" => {
            let input = bounds::RemainderInput::PiecewisePoly {
                sigma: p.get("sigma")?,
                c: p.get("c")?,
                a: p.get("a")?,
                exp_b: p.get("b")?,
                n: p.get_usize("n")?,
                degree: p.get_usize("d")?,
                sigma_weights: p.get("weights")?,
            };
            BoundReport::plain(name, &p.map, bounds::remainder_r(&input))
        }
        "remainder-trig" => {
            let input = bounds::RemainderInput::Trigonometric {
                sigma: p.get("sigma")?,
                c: p.get("c")?,
                a: p.get("a")?,
                exp_b: p.get("b")?,
                n: p.get_usize("n")?,
                dbar: p.get_usize("dbar")?,
                sigma_weights: p.get("weights")?,
            };
            BoundReport::plain(name, &p.map, bounds::remainder_r(&input))
        }
        "h-constant" => {
            let (d, v, b) = (p.get_usize("d")?, p.get("v")?, p.get("b")?);
            let hc = bounds::h_constant_check(d, v, b).map_err(|e| anyhow!("{e}"))?;
            let mut r = BoundReport::plain(name, &p.map, hc.series);
            r.pair_majorant = Some(hc.pair_majorant);
            r.kappa_majorant = Some(hc.kappa_majorant);
            r.pass = Some(hc.pass);
            r
        }
        other => bail!(
            "unknown bound {other}; valid names: {}",
            BOUND_NAMES.join(", ")
        ),
    };
    p.finish()?;
    print!("{}", report::to_json(&report)?);
    Ok(0)
}

// --------------------------------------------------------------- certify

pub fn run_certify_noise(settings: &Settings, grid: usize) -> Result<i32> {
    let spec = settings.noise()?;
    let report = spec.certify(grid);
    let json = report::to_json(&report)?;
    print!("{json}");
    report::write_artifacts(&settings.out, &[Artifact::new("certify_report.json", json)])?;
    Ok(if report.pass { 0 } else { EXIT_VERDICT_FAIL })
}

// ---------------------------------------------------------------- select

#[derive(Serialize)]
struct SelectReport<'a> {
    n: usize,
    selection: &'a SelectionResult,
    penalty: &'a PenaltyConfig,
}

pub fn run_select(settings: &Settings) -> Result<i32> {
    let coll = settings.collection()?;
    let noise = settings.noise()?;
    let data = settings
        .config
        .data
        .as_ref()
        .ok_or_else(|| anyhow!("select needs a [data] section with a path"))?;
    let values = read_vector(&data.path)?;
    if values.len() != coll.n {
        bail!(
            "{} holds {} values, the design needs {}",
            data.path,
            values.len(),
            coll.n
        );
    }
    let y = RealVector::new(values).map_err(|e| anyhow!("{}: {e}", data.path))?;
    let sel = &settings.config.selection;
    let pen = selection::penalty(
        &coll,
        noise.sigma(),
        noise.c(),
        sel.k,
        sel.resolve_z(coll.n),
        sel.penalty_mode(),
        sel.multiplier,
    )
    .map_err(|e| anyhow!("penalty: {e}"))?;
    let result = selection::select(&coll, &pen, &y).map_err(|e| anyhow!("select: {e}"))?;
    let ledger = report::penalty_ledger_csv(&coll, &pen)?;
    let json = report::to_json(&SelectReport {
        n: coll.n,
        selection: &result,
        penalty: &pen,
    })?;
    println!("chosen: {}", result.chosen);
    if result.ties.len() > 1 {
        println!("ties: {}", result.ties.join(", "));
    }
    report::write_artifacts(
        &settings.out,
        &[
            Artifact::new("selection.json", json),
            Artifact::new("penalty_ledger.csv", ledger),
        ],
    )?;
    Ok(0)
}

// ----------------------------------------------------------- experiments

fn finish_tail_run(
    settings: &Settings,
    report_json: String,
    rows_csv: String,
    stem: &str,
    pass: bool,
) -> Result<i32> {
    report::write_artifacts(
        &settings.out,
        &[
            Artifact::new(&format!("{stem}_report.json"), report_json),
            Artifact::new(&format!("{stem}_rows.csv"), rows_csv),
        ],
    )?;
    Ok(if pass { 0 } else { EXIT_VERDICT_FAIL })
}

pub fn run_chi(settings: &Settings) -> Result<i32> {
    let coll = settings.collection()?;
    let noise = settings.noise()?;
    let (label, space) = settings.pick_space(&coll)?;
    let u = settings.resolve_u(&coll, &noise)?;
    let reps = settings.reps(
        settings.config.experiment.as_ref().and_then(|e| e.reps),
        DEFAULT_TAIL_REPS,
    );
    let plan = ChiTailPlan {
        space,
        noise,
        xs: settings.xs()?,
        u,
        reps,
        seed: settings.seed,
    };
    let outs = exec::collect(&plan, settings.threads)?;
    let report = plan.summarize(&outs);
    println!("model {label}, dim {}, u = {u:.6}", space.dim());
    for row in &report.rows {
        println!(
            "x = {:>6.3}  exceed {:>6}/{}  bound {:.6e}  {}",
            row.x,
            row.exceed,
            row.reps,
            row.bound,
            if row.pass { "pass" } else { "fail" }
        );
    }
    finish_tail_run(
        settings,
        report::to_json(&report)?,
        report::tail_rows_csv(&report.rows),
        "chi",
        report.pass,
    )
}

pub fn run_supnorm(settings: &Settings) -> Result<i32> {
    let coll = settings.collection()?;
    let noise = settings.noise()?;
    let (label, space) = settings.pick_space(&coll)?;
    let reps = settings.reps(
        settings.config.experiment.as_ref().and_then(|e| e.reps),
        DEFAULT_TAIL_REPS,
    );
    let plan = SupNormPlan {
        space,
        noise,
        xs: settings.xs()?,
        reps,
        seed: settings.seed,
    };
    let outs = exec::collect(&plan, settings.threads)?;
    let report = plan.summarize(&outs);
    println!("model {label}, dim {}", space.dim());
    for row in &report.rows {
        println!(
            "x = {:>8.4}  exceed {:>6}/{}  bound {:.6e}  {}",
            row.x,
            row.exceed,
            row.reps,
            row.bound,
            if row.pass { "pass" } else { "fail" }
        );
    }
    finish_tail_run(
        settings,
        report::to_json(&report)?,
        report::tail_rows_csv(&report.rows),
        "supnorm",
        report.pass,
    )
}

pub fn run_oracle(settings: &Settings) -> Result<i32> {
    let coll = settings.collection()?;
    let noise = settings.noise()?;
    let f = settings.regression_f(coll.n)?;
    let sel = &settings.config.selection;
    let exp = settings.config.experiment.as_ref();
    let reps = settings.reps(exp.and_then(|e| e.reps), DEFAULT_ORACLE_REPS);
    let plan = OraclePlan::new(
        &coll,
        noise,
        &f,
        sel.k,
        sel.resolve_z(coll.n),
        reps,
        settings.seed,
        exp.and_then(|e| e.true_label.clone()),
    )
    .map_err(|e| anyhow!("{e}"))?;
    let outs = exec::collect(&plan, settings.threads)?;
    let report = plan.summarize(&outs);
    println!(
        "risk {:.6} (stderr {:.6})  bound {:.6}  {}",
        report.lhs_mean,
        report.lhs_stderr,
        report.rhs,
        if report.pass { "pass" } else { "fail" }
    );
    if let Some(rate) = report.recovery_rate {
        println!("recovery rate {rate:.3}");
    }
    report::write_artifacts(
        &settings.out,
        &[Artifact::new("oracle_report.json", report::to_json(&report)?)],
    )?;
    Ok(if report.pass { 0 } else { EXIT_VERDICT_FAIL })
}

pub fn run_counterexample(settings: &Settings) -> Result<i32> {
    let section = settings
        .config
        .counterexample
        .as_ref()
        .ok_or_else(|| anyhow!("this subcommand needs a [counterexample] section"))?;
    let rule = match section.rule.as_str() {
        "hypothetical" => CounterThreshold::Hypothetical { c: section.c },
        "gaussian_concentration" => CounterThreshold::GaussianConcentration,
        other => bail!("unknown rule {other}"),
    };
    let reps = settings.reps(section.reps, 10_000);
    let plan = CounterExamplePlan {
        dim: section.dim,
        p: section.p,
        us: section.us.clone(),
        rule,
        reps,
        seed: settings.seed,
    };
    plan.validate().map_err(|e| anyhow!("{e}"))?;
    let outs = exec::collect(&plan, settings.threads)?;
    let report = plan.summarize(&outs);
    for row in &report.rows {
        println!(
            "u = {:>6.3}  threshold {:>8.3}  freq {:.4}  bound {:.4}  ci [{:.4}, {:.4}]",
            row.x, row.threshold, row.p_hat, row.bound, row.ci_lo, row.ci_hi
        );
    }
    println!(
        "violation {}",
        if report.violation_found { "FOUND" } else { "not found" }
    );
    let pass = report.rows.iter().all(|r| r.pass);
    finish_tail_run(
        settings,
        report::to_json(&report)?,
        report::tail_rows_csv(&report.rows),
        "counterexample",
        pass,
    )
}

// --------------------------------------------------------------- covering

#[derive(Serialize)]
pub struct CoveringRow {
    pub delta: f64,
    pub net_size: usize,
    pub bound: f64,
    pub separated: bool,
    pub covers: bool,
    pub pass: bool,
}

#[derive(Serialize)]
pub struct CoveringReport {
    pub dim: usize,
    pub num_points: usize,
    pub norm: String,
    pub seed: u64,
    pub rows: Vec<CoveringRow>,
    pub pass: bool,
}

/// Seeded point cloud in the unit ball of the given norm: a Euclidean-ball
/// draw rescaled so its chosen norm equals the original Euclidean length.
pub fn sample_cloud(dim: usize, num_points: usize, norm: Norm, seed: u64) -> Vec<RealVector> {
    let mut rng = NoiseSpec::rng(seed, 0);
    (0..num_points)
        .map(|_| {
            let mut v: Vec<f64> = (0..dim).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
            let l2 = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            let radius: f64 = rng.random::<f64>().powf(1.0 / dim as f64);
            if l2 > 0.0 {
                for x in v.iter_mut() {
                    *x *= radius / l2;
                }
            }
            let target = norm.dist(&v, &vec![0.0; dim]);
            if target > 0.0 {
                let back = radius / target;
                for x in v.iter_mut() {
                    *x *= back;
                }
            }
            RealVector::new(v).expect("finite draws")
        })
        .collect()
}

/// Checks one cloud against the covering law at one radius.
pub fn covering_row(points: &[RealVector], delta: f64, norm: Norm, dim: usize) -> Result<CoveringRow> {
    let net = bounds::covering_greedy(points, delta, norm).map_err(|e| anyhow!("{e}"))?;
    let separated = net.iter().enumerate().all(|(i, &a)| {
        net.iter()
            .skip(i + 1)
            .all(|&b| norm.dist(points[a].as_slice(), points[b].as_slice()) > delta)
    });
    let covers = (0..points.len()).all(|i| {
        net.iter()
            .any(|&c| norm.dist(points[i].as_slice(), points[c].as_slice()) <= delta)
    });
    let bound = (1.0 + 2.0 / delta).powi(dim as i32);
    let pass = separated && covers && (net.len() as f64) <= bound;
    Ok(CoveringRow { delta, net_size: net.len(), bound, separated, covers, pass })
}

pub fn run_covering(settings: &Settings) -> Result<i32> {
    let section = settings
        .config
        .covering
        .as_ref()
        .ok_or_else(|| anyhow!("this subcommand needs a [covering] section"))?;
    let norm = match section.norm.as_str() {
        "l1" => Norm::L1,
        "l2" => Norm::L2,
        "linf" => Norm::LInf,
        other => bail!("unknown norm {other}"),
    };
    let points = sample_cloud(section.dim, section.num_points, norm, settings.seed);
    let rows: Vec<CoveringRow> = section
        .deltas
        .iter()
        .map(|&d| covering_row(&points, d, norm, section.dim))
        .collect::<Result<_>>()?;
    let pass = rows.iter().all(|r| r.pass);
    for row in &rows {
        println!(
            "delta = {:>6.3}  net {:>4}  bound {:>10.1}  {}",
            row.delta,
            row.net_size,
            row.bound,
            if row.pass { "pass" } else { "fail" }
        );
    }
    let mut csv = String::from("delta,net_size,bound,verdict\n");
    for r in &rows {
        csv.push_str(&format!(
            "{:.16e},{},{:.16e},{}\n",
            r.delta,
            r.net_size,
            r.bound,
            if r.pass { "pass" } else { "fail" }
        ));
    }
    let report = CoveringReport {
        dim: section.dim,
        num_points: section.num_points,
        norm: section.norm.clone(),
        seed: settings.seed,
        rows,
        pass,
    };
    report::write_artifacts(
        &settings.out,
        &[
            Artifact::new("covering_report.json", report::to_json(&report)?),
            Artifact::new("covering_rows.csv", csv),
        ],
    )?;
    Ok(if pass { 0 } else { EXIT_VERDICT_FAIL })
}

// --------------------------------------------------------------- chaining

#[derive(Serialize)]
pub struct ChainingReport {
    pub v: f64,
    pub b: f64,
    pub rows: Vec<bounds::HConstantReport>,
    pub pass: bool,
}

pub fn run_chaining_h(settings: &Settings) -> Result<i32> {
    let section = settings
        .config
        .chaining
        .as_ref()
        .ok_or_else(|| anyhow!("this subcommand needs a [chaining] section"))?;
    let rows: Vec<bounds::HConstantReport> = section
        .dims
        .iter()
        .map(|&d| bounds::h_constant_check(d, section.v, section.b).map_err(|e| anyhow!("{e}")))
        .collect::<Result<_>>()?;
    let pass = rows.iter().all(|r| r.pass);
    for row in &rows {
        println!(
            "D = {:>3}  series {:>12.4}  majorant {:>12.4}  {}",
            row.dim,
            row.series,
            row.pair_majorant,
            if row.pass { "pass" } else { "fail" }
        );
    }
    let mut csv = String::from("dim,series,pair_majorant,kappa_majorant,verdict\n");
    for r in &rows {
        csv.push_str(&format!(
            "{},{:.16e},{:.16e},{:.16e},{}\n",
            r.dim,
            r.series,
            r.pair_majorant,
            r.kappa_majorant,
            if r.pass { "pass" } else { "fail" }
        ));
    }
    let report = ChainingReport { v: section.v, b: section.b, rows, pass };
    report::write_artifacts(
        &settings.out,
        &[
            Artifact::new("chaining_report.json", report::to_json(&report)?),
            Artifact::new("chaining_rows.csv", csv),
        ],
    )?;
    Ok(if pass { 0 } else { EXIT_VERDICT_FAIL })
}
