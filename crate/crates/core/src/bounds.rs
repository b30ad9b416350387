//! Closed-form deviation bounds and proof-level quantities: Bernstein
//! thresholds and tails, sup-norm and chi-square thresholds for projected
//! noise, generic chaining over certified partition trees, greedy covering
//! nets, truncated-moment bounds, and the remainder/constant formulas of the
//! oracle inequality.

use crate::linalg::RealVector;
use crate::math;
use crate::KAPPA;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use serde::Serialize;

#[derive(Debug, Clone, PartialEq)]
pub enum BoundsError {
    Invalid(String),
    /// Truncated-moment bound requires `phi(x0) >= 1`.
    PhiBelowOne { phi: f64 },
    NotAPartition { level: usize, detail: String },
    NotNested { level: usize },
    DiameterViolation { level: usize, metric: &'static str, got: f64, allowed: f64 },
    /// The deepest stored level still contains cells of positive diameter,
    /// so the implicit extension to all further levels is unsound.
    OpenTail { metric: &'static str, diameter: f64 },
}

impl fmt::Display for BoundsError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BoundsError::Invalid(msg) => write!(f, "{msg}"),
            BoundsError::PhiBelowOne { phi } => {
                write!(f, "phi(x0) = {phi} < 1; the truncated-moment bound requires phi(x0) >= 1")
            }
            BoundsError::NotAPartition { level, detail } => {
                write!(f, "level {level} is not a partition of the index set: {detail}")
            }
            BoundsError::NotNested { level } => {
                write!(f, "level {level} is not a refinement of level {}", level - 1)
            }
            BoundsError::DiameterViolation { level, metric, got, allowed } => write!(
                f,
                "cell at level {level} has {metric}-diameter {got} > {allowed}"
            ),
            BoundsError::OpenTail { metric, diameter } => write!(
                f,
                "deepest level has a cell of positive {metric}-diameter {diameter}; \
                 refine until all cells are points"
            ),
        }
    }
}

/// `sqrt(2 v2 u) + c u`: the level-`u` quantile of a Bernstein-type tail
/// with variance factor `v2` and scale factor `c`.
pub fn bernstein_quantile(v2: f64, c: f64, u: f64) -> f64 {
    math::sqrt(2.0 * v2 * u) + c * u
}

/// `exp(-x^2 / (2 (v2 + c x)))`: tail probability at level `x >= 0`.
pub fn bernstein_tail(v2: f64, c: f64, x: f64) -> f64 {
    if x == 0.0 {
        return 1.0;
    }
    math::exp(-x * x / (2.0 * (v2 + c * x)))
}

/// Threshold `kappa (sqrt(v^2 (D + x)) + b (D + x))` for the supremum of a
/// process indexed by the unit ball of a `D`-dimensional space, crossed with
/// probability at most `exp(-x)`.
pub fn sup_bound_norm(v: f64, chain_b: f64, d: usize, x: f64) -> f64 {
    let s = d as f64 + x;
    KAPPA * (math::sqrt(v * v * s) + chain_b * s)
}

/// Threshold `kappa^2 (sigma^2 + 2 c u / kappa) (D + x)` for the squared
/// projection norm on the event where the sup norm of the projection stays
/// below `u`.
pub fn chi_threshold(sigma: f64, c: f64, u: f64, d: usize, x: f64) -> f64 {
    KAPPA * KAPPA * (sigma * sigma + 2.0 * c * u / KAPPA) * (d as f64 + x)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TailValue {
    pub value: f64,
    /// True when the bound is at least 1 and says nothing.
    pub vacuous: bool,
}

/// `2 n exp(-x^2 / (2 Lambda_2^2 (sigma^2 + c x)))`: tail of the sup norm of
/// the projected noise at level `x`.
pub fn sup_norm_tail(lambda2: f64, sigma: f64, c: f64, x: f64, n: usize) -> TailValue {
    let value = if x == 0.0 {
        2.0 * n as f64
    } else {
        2.0 * n as f64
            * math::exp(-x * x / (2.0 * lambda2 * lambda2 * (sigma * sigma + c * x)))
    };
    TailValue { value, vacuous: value >= 1.0 }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TruncatedMoment {
    pub bound: f64,
    pub phi_x0: f64,
}

/// Bound on `E[X^p 1{X >= x0}]` for a nonnegative `X` with
/// `P(X >= x) <= a exp(-phi(x))`, `phi(x) = x^2 / (2 (alpha + beta x))`:
/// the value `a x0^p exp(-phi(x0)) (1 + e p! / phi(x0))`, valid once
/// `phi(x0) >= 1`.
pub fn truncated_moment_bound(
    a: f64,
    alpha: f64,
    beta: f64,
    x0: f64,
    p: u32,
) -> Result<TruncatedMoment, BoundsError> {
    if !(a > 0.0 && alpha > 0.0 && beta >= 0.0 && x0 > 0.0 && p >= 1) {
        return Err(BoundsError::Invalid(format!(
            "need a > 0, alpha > 0, beta >= 0, x0 > 0, p >= 1; got a={a}, alpha={alpha}, beta={beta}, x0={x0}, p={p}"
        )));
    }
    let phi = x0 * x0 / (2.0 * (alpha + beta * x0));
    if phi < 1.0 {
        return Err(BoundsError::PhiBelowOne { phi });
    }
    let mut factorial = 1.0;
    for i in 2..=p {
        factorial *= i as f64;
    }
    let bound = a * math::powf(x0, p as f64) * math::exp(-phi)
        * (1.0 + core::f64::consts::E * factorial / phi);
    Ok(TruncatedMoment { bound, phi_x0: phi })
}

/// `C(K) = K (K^2 + K - 1) / (K - 1)^3`, the leading constant of the oracle
/// inequality; requires `K > 1`, decreases to 1 as `K` grows.
pub fn constant_ck(k: f64) -> Result<f64, BoundsError> {
    if !(k > 1.0) {
        return Err(BoundsError::Invalid(format!("K must exceed 1, got {k}")));
    }
    let km1 = k - 1.0;
    Ok(k * (k * k + k - 1.0) / (km1 * km1 * km1))
}

/// Inputs for the remainder term `R` of the oracle inequality: the general
/// form, or the closed family-specific forms with block-size calibration `a`
/// and decay exponent `exp_b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RemainderInput {
    General {
        sigma: f64,
        c: f64,
        u: f64,
        sigma_weights: f64,
        lambda_bar_inf: f64,
        /// May be infinite: the second term then vanishes, which is how the
        /// `c = 0` corollary arises.
        z: f64,
    },
    Histogram { sigma: f64, c: f64, a: f64, exp_b: f64, n: usize, sigma_weights: f64 },
    PiecewisePoly {
        sigma: f64,
        c: f64,
        a: f64,
        exp_b: f64,
        n: usize,
        degree: usize,
        sigma_weights: f64,
    },
    Trigonometric {
        sigma: f64,
        c: f64,
        a: f64,
        exp_b: f64,
        n: usize,
        dbar: usize,
        sigma_weights: f64,
    },
}

/// Penalty factor `kappa^2 (sigma^2 + 2 c u / kappa)` of the general route.
pub fn penalty_factor_general(sigma: f64, c: f64, u: f64) -> f64 {
    KAPPA * KAPPA * (sigma * sigma + 2.0 * c * u / KAPPA)
}

/// Histogram-route factor `kappa^2 (sigma^2 + 2 c (sigma + c)(b + 2)/(a kappa))`.
pub fn penalty_factor_histogram(sigma: f64, c: f64, a: f64, exp_b: f64) -> f64 {
    KAPPA * KAPPA * (sigma * sigma + 2.0 * c * (sigma + c) * (exp_b + 2.0) / (a * KAPPA))
}

/// Piecewise-polynomial-route factor
/// `kappa^2 (sigma^2 + 4 sqrt(2) c (sigma + c)(d + 1)(b + 2)/(a kappa))`.
pub fn penalty_factor_pp(sigma: f64, c: f64, a: f64, exp_b: f64, degree: usize) -> f64 {
    KAPPA * KAPPA
        * (sigma * sigma
            + c * 4.0 * core::f64::consts::SQRT_2 * (sigma + c) * (degree as f64 + 1.0)
                * (exp_b + 2.0)
                / (a * KAPPA))
}

/// Trigonometric-route factor `kappa^2 (sigma^2 + 4 c (c + sigma)(b + 2)/a)`.
pub fn penalty_factor_trig(sigma: f64, c: f64, a: f64, exp_b: f64) -> f64 {
    KAPPA * KAPPA * (sigma * sigma + 4.0 * c * (c + sigma) * (exp_b + 2.0) / a)
}

/// Remainder `R` entering the right side of the oracle inequality.
pub fn remainder_r(input: &RemainderInput) -> f64 {
    match *input {
        RemainderInput::General { sigma, c, u, sigma_weights, lambda_bar_inf, z } => {
            let second = if z.is_infinite() {
                0.0
            } else {
                2.0 * u * u / (lambda_bar_inf * lambda_bar_inf) * math::exp(-z)
            };
            penalty_factor_general(sigma, c, u) * sigma_weights + second
        }
        RemainderInput::Histogram { sigma, c, a, exp_b, n, sigma_weights } => {
            penalty_factor_histogram(sigma, c, a, exp_b) * sigma_weights
                + 2.0 * (c + sigma) * (c + sigma) * (exp_b + 2.0) * (exp_b + 2.0)
                    / (a * a * math::powf(n as f64, exp_b))
        }
        RemainderInput::PiecewisePoly { sigma, c, a, exp_b, n, degree, sigma_weights } => {
            penalty_factor_pp(sigma, c, a, exp_b, degree) * sigma_weights
                + 4.0 * (c + sigma) * (c + sigma) * (exp_b + 2.0) * (exp_b + 2.0)
                    / (a * a * math::powf(n as f64, exp_b))
        }
        RemainderInput::Trigonometric { sigma, c, a, exp_b, n, dbar, sigma_weights } => {
            penalty_factor_trig(sigma, c, a, exp_b) * sigma_weights
                + 4.0 * (exp_b + 2.0) * (exp_b + 2.0) * (c + sigma) * (c + sigma)
                    / (a * a * (2.0 * dbar as f64 + 1.0) * math::powf(n as f64, exp_b))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Norm {
    L1,
    L2,
    LInf,
}

impl Norm {
    pub fn dist(&self, a: &[f64], b: &[f64]) -> f64 {
        match self {
            Norm::L1 => a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum(),
            Norm::L2 => math::sqrt(a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()),
            Norm::LInf => a
                .iter()
                .zip(b)
                .map(|(x, y)| (x - y).abs())
                .fold(0.0, f64::max),
        }
    }
}

/// Greedy maximal `delta`-separated subset over abstract indices: first index
/// always in, then every index farther than `delta` from all accepted ones,
/// in input order. Maximality makes the result a `delta`-covering.
fn separated_indices(
    candidates: &[usize],
    delta: f64,
    dist: impl Fn(usize, usize) -> f64,
) -> Vec<usize> {
    let mut net: Vec<usize> = Vec::new();
    for &i in candidates {
        if net.iter().all(|&j| dist(i, j) > delta) {
            net.push(i);
        }
    }
    net
}

/// Maximal `delta`-separated subset of `points` (indices into the input, in
/// input order). The result is simultaneously `delta`-separated and a
/// `delta`-covering of the input; for points inside the unit ball of a
/// `D`-dimensional space its size is at most `(1 + 2/delta)^D`.
pub fn covering_greedy(
    points: &[RealVector],
    delta: f64,
    norm: Norm,
) -> Result<Vec<usize>, BoundsError> {
    if points.is_empty() {
        return Err(BoundsError::Invalid("no points to cover".into()));
    }
    if !(delta > 0.0) {
        return Err(BoundsError::Invalid(format!("delta must be positive, got {delta}")));
    }
    let dim = points[0].len();
    if points.iter().any(|p| p.len() != dim) {
        return Err(BoundsError::Invalid("points of mixed dimensions".into()));
    }
    let all: Vec<usize> = (0..points.len()).collect();
    Ok(separated_indices(&all, delta, |i, j| {
        norm.dist(points[i].as_slice(), points[j].as_slice())
    }))
}

/// Relative tolerance for certified diameters, absorbing metric round-off.
const DIAM_TOL: f64 = 1e-9;

/// Nested partitions of a finite index set with certified geometric decay of
/// the cell diameters in two metrics: cells at level `k` have `d`-diameter at
/// most `2^-k v` and `cdelta`-diameter at most `2^-k b`. Level 0 is the whole
/// set. Beyond the deepest stored level the partition is understood to stay
/// constant, which is sound because construction-time validation requires
/// that level to have zero-diameter cells.
#[derive(Debug, Clone, PartialEq)]
pub struct PartitionTree {
    num_points: usize,
    v: f64,
    chain_b: f64,
    levels: Vec<Vec<Vec<usize>>>,
}

impl PartitionTree {
    pub fn new(
        num_points: usize,
        v: f64,
        chain_b: f64,
        levels: Vec<Vec<Vec<usize>>>,
        d_metric: impl Fn(usize, usize) -> f64,
        cdelta_metric: impl Fn(usize, usize) -> f64,
    ) -> Result<Self, BoundsError> {
        if num_points == 0 || levels.is_empty() {
            return Err(BoundsError::Invalid("need at least one point and one level".into()));
        }
        if !(v >= 0.0 && chain_b >= 0.0) {
            return Err(BoundsError::Invalid("scales v and b must be nonnegative".into()));
        }
        if levels[0].len() != 1 || levels[0][0].len() != num_points {
            return Err(BoundsError::NotAPartition {
                level: 0,
                detail: "level 0 must be the single cell holding every index".into(),
            });
        }
        for (k, level) in levels.iter().enumerate() {
            let mut seen = vec![false; num_points];
            for cell in level {
                if cell.is_empty() {
                    return Err(BoundsError::NotAPartition {
                        level: k,
                        detail: "empty cell".into(),
                    });
                }
                for &i in cell {
                    if i >= num_points {
                        return Err(BoundsError::NotAPartition {
                            level: k,
                            detail: format!("index {i} out of range"),
                        });
                    }
                    if seen[i] {
                        return Err(BoundsError::NotAPartition {
                            level: k,
                            detail: format!("index {i} appears twice"),
                        });
                    }
                    seen[i] = true;
                }
            }
            if seen.iter().any(|s| !s) {
                return Err(BoundsError::NotAPartition {
                    level: k,
                    detail: "some index is missing".into(),
                });
            }
        }
        // nesting: each cell at level k sits inside one cell of level k-1
        for k in 1..levels.len() {
            for cell in &levels[k] {
                let anchor = cell[0];
                let parent = levels[k - 1].iter().find(|p| p.contains(&anchor));
                let parent = match parent {
                    Some(p) => p,
                    None => return Err(BoundsError::NotNested { level: k }),
                };
                if !cell.iter().all(|i| parent.contains(i)) {
                    return Err(BoundsError::NotNested { level: k });
                }
            }
        }
        // diameter certificates, exhaustively on every cell
        for (k, level) in levels.iter().enumerate().skip(1) {
            let allowed_d = math::powi(0.5, k as i32) * v;
            let allowed_b = math::powi(0.5, k as i32) * chain_b;
            for cell in level {
                let (dd, db) = cell_diameters(cell, &d_metric, &cdelta_metric);
                if dd > allowed_d + DIAM_TOL * (1.0 + v) {
                    return Err(BoundsError::DiameterViolation {
                        level: k,
                        metric: "d",
                        got: dd,
                        allowed: allowed_d,
                    });
                }
                if db > allowed_b + DIAM_TOL * (1.0 + chain_b) {
                    return Err(BoundsError::DiameterViolation {
                        level: k,
                        metric: "cdelta",
                        got: db,
                        allowed: allowed_b,
                    });
                }
            }
        }
        // the deepest level must be exact so the constant extension stays valid
        for cell in levels.last().unwrap() {
            let (dd, db) = cell_diameters(cell, &d_metric, &cdelta_metric);
            if dd > DIAM_TOL * (1.0 + v) {
                return Err(BoundsError::OpenTail { metric: "d", diameter: dd });
            }
            if db > DIAM_TOL * (1.0 + chain_b) {
                return Err(BoundsError::OpenTail { metric: "cdelta", diameter: db });
            }
        }
        Ok(PartitionTree { num_points, v, chain_b, levels })
    }

    pub fn num_points(&self) -> usize {
        self.num_points
    }

    pub fn v(&self) -> f64 {
        self.v
    }

    pub fn chain_b(&self) -> f64 {
        self.chain_b
    }

    pub fn depth(&self) -> usize {
        self.levels.len()
    }

    fn level_size(&self, k: usize) -> usize {
        self.levels[k.min(self.levels.len() - 1)].len()
    }

    /// `N_k = |A_{k+1}| |A_k|`, with the partition held constant past the
    /// deepest stored level.
    pub fn n_k(&self, k: usize) -> usize {
        self.level_size(k + 1) * self.level_size(k)
    }

    /// `H = sum_k 2^-k (v sqrt(2 log(2^(k+1) N_k)) + b log(2^(k+1) N_k))`.
    /// The infinite sum is truncated once the geometric tail drops below
    /// 1e-12 of the partial sum.
    pub fn chaining_h(&self) -> f64 {
        let mut sum = 0.0;
        let mut weight = 1.0;
        for k in 0..MAX_CHAIN_TERMS {
            let log_arg = (k as f64 + 1.0) * core::f64::consts::LN_2 + math::ln(self.n_k(k) as f64);
            let term = weight * (self.v * math::sqrt(2.0 * log_arg) + self.chain_b * log_arg);
            sum += term;
            weight *= 0.5;
            // past the stored levels the terms decay at least geometrically
            // with ratio well under 1; 4x the current term dominates the tail
            if k + 1 >= self.levels.len() && 4.0 * term < 1e-12 * sum {
                break;
            }
        }
        sum
    }

    /// Deviation threshold `H + 2 sqrt(2 v^2 x) + 2 b x` crossed with
    /// probability at most `exp(-x)`.
    pub fn threshold(&self, x: f64) -> f64 {
        self.chaining_h() + 2.0 * math::sqrt(2.0 * self.v * self.v * x) + 2.0 * self.chain_b * x
    }
}

const MAX_CHAIN_TERMS: usize = 400;

fn cell_diameters(
    cell: &[usize],
    d_metric: &impl Fn(usize, usize) -> f64,
    cdelta_metric: &impl Fn(usize, usize) -> f64,
) -> (f64, f64) {
    let mut dd = 0.0_f64;
    let mut db = 0.0_f64;
    for (a, &i) in cell.iter().enumerate() {
        for &j in &cell[a + 1..] {
            dd = dd.max(d_metric(i, j));
            db = db.max(cdelta_metric(i, j));
        }
    }
    (dd, db)
}

/// One side chain of nested partitions under a single metric: each cell of
/// level `k - 1` is split by a greedy cover of radius `2^-(k+1) scale`,
/// assigning points to the first center within reach (cover minus the union
/// of earlier covers), so cells at level `k` have diameter at most
/// `2^-k scale`. A zero `scale` keeps the whole set at every level.
fn side_chain(
    num_points: usize,
    scale: f64,
    metric: impl Fn(usize, usize) -> f64,
    max_levels: usize,
) -> Vec<Vec<Vec<usize>>> {
    let all: Vec<usize> = (0..num_points).collect();
    let mut levels: Vec<Vec<Vec<usize>>> = vec![vec![all]];
    if scale == 0.0 {
        return levels;
    }
    let spread = |cell: &[usize]| -> bool {
        cell.iter()
            .enumerate()
            .any(|(a, &i)| cell[a + 1..].iter().any(|&j| metric(i, j) > 0.0))
    };
    for k in 1..=max_levels {
        // refinement is only needed while some cell has positive diameter;
        // stopping earlier would leave the constant extension uncertified
        if !levels[k - 1].iter().any(|cell| spread(cell)) {
            break;
        }
        let radius = math::powi(0.5, k as i32 + 1) * scale;
        let mut next: Vec<Vec<usize>> = Vec::new();
        for cell in levels[k - 1].iter() {
            if cell.len() == 1 {
                next.push(cell.clone());
                continue;
            }
            let centers = separated_indices(cell, radius, &metric);
            if centers.len() == 1 {
                // fits one certified ball at this radius; splits later once
                // the radius drops below its diameter
                next.push(cell.clone());
                continue;
            }
            let mut sub: Vec<Vec<usize>> = vec![Vec::new(); centers.len()];
            for &i in cell {
                let owner = centers
                    .iter()
                    .position(|&c| metric(i, c) <= radius)
                    .expect("maximal separated set covers the cell");
                sub[owner].push(i);
            }
            next.extend(sub.into_iter().filter(|s| !s.is_empty()));
        }
        levels.push(next);
    }
    levels
}

/// Builds a certified partition tree over indices `0..num_points` following
/// the covering recipe: one side chain per metric, levels formed as pairwise
/// intersections of the two chains' cells. Index 0 is the base point; every
/// index must lie within `v` of it in the `d` metric and within `b` in the
/// `cdelta` metric. A final singleton level is appended when `max_levels`
/// stops the refinement early.
pub fn build_proof_tree(
    num_points: usize,
    v: f64,
    chain_b: f64,
    d_metric: impl Fn(usize, usize) -> f64 + Copy,
    cdelta_metric: impl Fn(usize, usize) -> f64 + Copy,
    max_levels: usize,
) -> Result<PartitionTree, BoundsError> {
    if num_points == 0 {
        return Err(BoundsError::Invalid("no points".into()));
    }
    for i in 0..num_points {
        let dd = d_metric(0, i);
        let db = cdelta_metric(0, i);
        if dd > v + DIAM_TOL * (1.0 + v) || db > chain_b + DIAM_TOL * (1.0 + chain_b) {
            return Err(BoundsError::Invalid(format!(
                "index {i} lies outside the certified ball around index 0: \
                 d = {dd} (v = {v}), cdelta = {db} (b = {chain_b})"
            )));
        }
    }
    let side_d = side_chain(num_points, v, d_metric, max_levels);
    let side_b = side_chain(num_points, chain_b, cdelta_metric, max_levels);
    let depth = side_d.len().max(side_b.len());
    let pick = |side: &Vec<Vec<Vec<usize>>>, k: usize| -> Vec<Vec<usize>> {
        side[k.min(side.len() - 1)].clone()
    };
    let mut levels: Vec<Vec<Vec<usize>>> = Vec::with_capacity(depth + 1);
    for k in 0..depth {
        let a2 = pick(&side_d, k);
        let ainf = pick(&side_b, k);
        let mut level: Vec<Vec<usize>> = Vec::new();
        for c2 in &a2 {
            for cinf in &ainf {
                let cell: Vec<usize> = c2.iter().copied().filter(|i| cinf.contains(i)).collect();
                if !cell.is_empty() {
                    level.push(cell);
                }
            }
        }
        levels.push(level);
    }
    // guarantee a closed tail: cells of positive diameter in the deepest
    // level are split into singletons
    let needs_singletons = levels.last().is_none_or(|level| {
        level.iter().any(|cell| {
            let (dd, db) = cell_diameters(cell, &d_metric, &cdelta_metric);
            dd > DIAM_TOL * (1.0 + v) || db > DIAM_TOL * (1.0 + chain_b)
        })
    });
    if needs_singletons {
        let singles: Vec<Vec<usize>> = (0..num_points).map(|i| vec![i]).collect();
        levels.push(singles);
    }
    PartitionTree::new(num_points, v, chain_b, levels, d_metric, cdelta_metric)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HConstantReport {
    pub dim: usize,
    /// The chaining series evaluated with the covering-recipe cardinalities
    /// `N_k = 9^(2D) 5^(2kD)`.
    pub series: f64,
    /// `14 sqrt(D v^2) + 18 D b`.
    pub pair_majorant: f64,
    /// `kappa (sqrt(v^2 D) + b D)`, the regrouped threshold at `x = 0`.
    pub kappa_majorant: f64,
    pub pass: bool,
}

/// Evaluates the chaining series with the covering-recipe cardinalities and
/// checks it against both closed majorants.
pub fn h_constant_check(d: usize, v: f64, chain_b: f64) -> Result<HConstantReport, BoundsError> {
    if d == 0 {
        return Err(BoundsError::Invalid("dimension must be at least 1".into()));
    }
    if !(v >= 0.0 && chain_b >= 0.0) {
        return Err(BoundsError::Invalid("scales must be nonnegative".into()));
    }
    let df = d as f64;
    let ln9 = math::ln(9.0);
    let ln5 = math::ln(5.0);
    let mut series = 0.0;
    let mut weight = 1.0;
    for k in 0..MAX_CHAIN_TERMS {
        let log_arg =
            (k as f64 + 1.0) * core::f64::consts::LN_2 + 2.0 * df * ln9 + 2.0 * k as f64 * df * ln5;
        let term = weight * (v * math::sqrt(2.0 * log_arg) + chain_b * log_arg);
        series += term;
        weight *= 0.5;
        if 4.0 * term < 1e-12 * series {
            break;
        }
    }
    let pair_majorant = 14.0 * math::sqrt(df * v * v) + 18.0 * df * chain_b;
    let kappa_majorant = KAPPA * (math::sqrt(v * v * df) + chain_b * df);
    Ok(HConstantReport {
        dim: d,
        series,
        pair_majorant,
        kappa_majorant,
        pass: series < pair_majorant && series < kappa_majorant,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn bernstein_quantile_reference_values() {
        assert!((bernstein_quantile(1.0, 0.0, 1.0) - core::f64::consts::SQRT_2).abs() < 1e-15);
        assert_eq!(bernstein_quantile(0.0, 1.0, 2.0), 2.0);
        assert!((bernstein_quantile(2.0, 0.5, 3.0) - 4.964101615137754).abs() < 1e-12);
        // nondecreasing in every argument
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100 {
            let (v2, c, u) = (
                rng.random_range(0.0..4.0),
                rng.random_range(0.0..2.0),
                rng.random_range(0.0..5.0),
            );
            let base = bernstein_quantile(v2, c, u);
            assert!(bernstein_quantile(v2 + 0.5, c, u) >= base);
            assert!(bernstein_quantile(v2, c + 0.5, u) >= base);
            assert!(bernstein_quantile(v2, c, u + 0.5) >= base);
        }
    }

    #[test]
    fn bernstein_tail_reference_and_inversion() {
        assert_eq!(bernstein_tail(1.0, 0.0, 0.0), 1.0);
        assert!((bernstein_tail(1.0, 0.0, core::f64::consts::SQRT_2) - math::exp(-1.0)).abs() < 1e-15);
        assert!((bernstein_tail(1.0, 1.0, 2.0) - math::exp(-2.0 / 3.0)).abs() < 1e-15);
        // the two displays are distinct bounds on the same probability; their
        // exact relation at the quantile threshold q = sqrt(2 v^2 u) + c u is
        //   tail(q) = exp(-u + c^2 u^2 / (2 (v^2 + c q))) in [e^-u, e^-u/2],
        // with equality to e^-u iff c = 0, while the root
        // x* = c u + sqrt(c^2 u^2 + 2 v^2 u) inverts the tail form exactly
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for _ in 0..100 {
            let (v2, c, u) = (
                rng.random_range(0.01..4.0),
                rng.random_range(0.0..2.0),
                rng.random_range(0.01..6.0),
            );
            let q = bernstein_quantile(v2, c, u);
            let t = bernstein_tail(v2, c, q);
            assert!(t >= math::exp(-u) - 1e-12);
            assert!(t <= math::exp(-u / 2.0) + 1e-12);
            let root = c * u + math::sqrt(c * c * u * u + 2.0 * v2 * u);
            let exact = bernstein_tail(v2, c, root);
            assert!((exact - math::exp(-u)).abs() <= 1e-12 * math::exp(-u));
            // and at c = 0 the quantile inverts the tail exactly
            let q0 = bernstein_quantile(v2, 0.0, u);
            assert!((bernstein_tail(v2, 0.0, q0) - math::exp(-u)).abs() <= 1e-12 * math::exp(-u));
        }
    }

    #[test]
    fn sup_bound_norm_gaussian_specialization() {
        assert!((sup_bound_norm(1.0, 0.0, 1, 0.0) - 18.0).abs() < 1e-12);
        for (d, x) in [(1, 0.5), (4, 2.0), (16, 7.3)] {
            let want = 18.0 * math::sqrt(d as f64 + x);
            assert!((sup_bound_norm(1.0, 0.0, d, x) - want).abs() < 1e-12);
        }
        // concavity regrouping: sqrt(D + x) <= sqrt(D) + sqrt(x)
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..100 {
            let d = rng.random_range(1..60usize);
            let x = rng.random_range(0.0..30.0);
            assert!(
                18.0 * math::sqrt(d as f64 + x)
                    <= 18.0 * (math::sqrt(d as f64) + math::sqrt(x)) + 1e-12
            );
        }
    }

    #[test]
    fn chi_threshold_reference_values() {
        assert_eq!(chi_threshold(1.0, 0.0, 7.0, 1, 0.0), 324.0);
        assert_eq!(chi_threshold(1.0, 0.0, 7.0, 3, 1.0), 324.0 * 4.0);
        assert!((chi_threshold(1.0, 1.0, 2.0, 3, 1.0) - 1584.0).abs() < 1e-9);
    }

    #[test]
    fn sup_norm_tail_values_and_vacuity() {
        let at_zero = sup_norm_tail(1.0, 1.0, 0.0, 0.0, 5);
        assert_eq!(at_zero.value, 10.0);
        assert!(at_zero.vacuous);
        let mid = sup_norm_tail(1.0, 1.0, 0.0, core::f64::consts::SQRT_2, 3);
        assert!((mid.value - 6.0 * math::exp(-1.0)).abs() < 1e-12);
        let frozen = sup_norm_tail(0.5, 1.0, 1.0, 2.0, 8);
        assert!((frozen.value - 16.0 * math::exp(-8.0 / 3.0)).abs() < 1e-12);
        assert!(frozen.vacuous); // 16 e^{-8/3} is slightly above 1
        let useful = sup_norm_tail(1.0, 1.0, 0.0, 4.0, 2);
        assert!((useful.value - 4.0 * math::exp(-8.0)).abs() < 1e-12);
        assert!(!useful.vacuous);
    }

    #[test]
    fn truncated_moment_bound_checks() {
        // phi(x0) = 1 exactly: alpha = 0.5, beta = 0, x0 = 1, p = 1
        let tm = truncated_moment_bound(1.0, 0.5, 0.0, 1.0, 1).unwrap();
        assert!((tm.phi_x0 - 1.0).abs() < 1e-15);
        let want = math::exp(-1.0) * (1.0 + core::f64::consts::E);
        assert!((tm.bound - want).abs() < 1e-12);

        // dominates the exact envelope integral (frozen quadrature value)
        let tm = truncated_moment_bound(4.0, 0.25, 0.25, 3.0, 2).unwrap();
        assert!((tm.phi_x0 - 4.5).abs() < 1e-12);
        assert!((tm.bound - 0.88308201013381905).abs() < 1e-12);
        let quadrature_oracle = 0.56473390825851242;
        assert!(tm.bound >= quadrature_oracle);

        // nonincreasing in x0 once past the validity threshold
        let mut prev = f64::INFINITY;
        let mut x0 = 3.0;
        while x0 < 10.0 {
            let b = truncated_moment_bound(4.0, 0.25, 0.25, x0, 2).unwrap().bound;
            assert!(b <= prev + 1e-12, "bound rose at x0 = {x0}");
            prev = b;
            x0 += 0.25;
        }

        match truncated_moment_bound(1.0, 2.0, 0.0, 1.0, 2) {
            Err(BoundsError::PhiBelowOne { phi }) => assert!(phi < 1.0),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn constant_ck_values_and_limits() {
        assert_eq!(constant_ck(2.0).unwrap(), 10.0);
        assert_eq!(constant_ck(3.0).unwrap(), 4.125);
        let far = constant_ck(1e6).unwrap();
        assert!(far > 1.0 && far < 1.001);
        assert!(constant_ck(1.0).is_err());
        assert!(constant_ck(0.5).is_err());
    }

    #[test]
    fn remainder_general_degenerations() {
        let c0 = RemainderInput::General {
            sigma: 1.5,
            c: 0.0,
            u: 3.0,
            sigma_weights: 0.7,
            lambda_bar_inf: 2.0,
            z: f64::INFINITY,
        };
        assert!((remainder_r(&c0) - 324.0 * 2.25 * 0.7).abs() < 1e-9);
        let empty = RemainderInput::General {
            sigma: 1.5,
            c: 1.0,
            u: 3.0,
            sigma_weights: 0.0,
            lambda_bar_inf: 2.0,
            z: f64::INFINITY,
        };
        assert_eq!(remainder_r(&empty), 0.0);
    }

    #[test]
    fn remainder_family_routes_are_finite_and_positive() {
        let hist = RemainderInput::Histogram {
            sigma: 1.0,
            c: 1.0,
            a: 1.0,
            exp_b: 1.0,
            n: 100,
            sigma_weights: 1.0,
        };
        let r = remainder_r(&hist);
        // 324 (1 + 2/3) + 2 * 4 * 9 / 100
        assert!((r - (540.0 + 0.72)).abs() < 1e-9);
        // cross-check against the general route with z = b log n
        let u = 2.0 * 1.0 * 1.0 * (2.0f64).mul_add(math::ln(100.0), 1.0 * math::ln(100.0));
        let general = RemainderInput::General {
            sigma: 1.0,
            c: 1.0,
            u,
            sigma_weights: 1.0,
            lambda_bar_inf: 1.0,
            z: math::ln(100.0),
        };
        let rg = remainder_r(&general);
        assert!(rg.is_finite() && rg > 0.0);

        let pp = RemainderInput::PiecewisePoly {
            sigma: 1.0,
            c: 0.5,
            a: 1.0,
            exp_b: 1.0,
            n: 240,
            degree: 2,
            sigma_weights: 0.9,
        };
        assert!(remainder_r(&pp).is_finite());
        let trig = RemainderInput::Trigonometric {
            sigma: 1.0,
            c: 0.5,
            a: 1.0,
            exp_b: 1.0,
            n: 256,
            dbar: 8,
            sigma_weights: 0.9,
        };
        assert!(remainder_r(&trig).is_finite());
    }

    fn grid_1d(count: usize) -> Vec<RealVector> {
        (0..count)
            .map(|i| {
                let t = -1.0 + 2.0 * i as f64 / (count - 1) as f64;
                RealVector::new(vec![t]).unwrap()
            })
            .collect()
    }

    #[test]
    fn covering_greedy_is_separated_and_covers() {
        let points = grid_1d(101);
        let delta = 0.5;
        let net = covering_greedy(&points, delta, Norm::L2).unwrap();
        // the covering-number law for the unit ball in one dimension
        assert!(net.len() <= 25);
        for (a, &i) in net.iter().enumerate() {
            for &j in &net[a + 1..] {
                assert!(Norm::L2.dist(points[i].as_slice(), points[j].as_slice()) > delta);
            }
        }
        for p in &points {
            assert!(net
                .iter()
                .any(|&i| Norm::L2.dist(p.as_slice(), points[i].as_slice()) <= delta));
        }
        // a delta beyond the diameter keeps only the first point
        let wide = covering_greedy(&points, 2.5, Norm::L2).unwrap();
        assert_eq!(wide, vec![0]);
    }

    #[test]
    fn covering_law_on_random_disc() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let mut points = Vec::new();
        while points.len() < 200 {
            let x: f64 = rng.random_range(-1.0..1.0);
            let y: f64 = rng.random_range(-1.0..1.0);
            if x * x + y * y <= 1.0 {
                points.push(RealVector::new(vec![x, y]).unwrap());
            }
        }
        let net = covering_greedy(&points, 0.25, Norm::L2).unwrap();
        assert!(net.len() <= 81); // (1 + 2/delta)^2
    }

    #[test]
    fn partition_tree_rejects_bad_structures() {
        let metric = |i: usize, j: usize| if i == j { 0.0 } else { 1.0 };
        let zero = |_: usize, _: usize| 0.0;
        // level 0 must be one full cell
        assert!(matches!(
            PartitionTree::new(2, 2.0, 0.0, vec![vec![vec![0], vec![1]]], metric, zero),
            Err(BoundsError::NotAPartition { level: 0, .. })
        ));
        // missing index
        assert!(matches!(
            PartitionTree::new(3, 2.0, 0.0, vec![vec![vec![0, 1, 2]], vec![vec![0], vec![1]]], metric, zero),
            Err(BoundsError::NotAPartition { level: 1, .. })
        ));
        // non-nested refinement
        let levels = vec![
            vec![vec![0, 1, 2, 3]],
            vec![vec![0, 1], vec![2, 3]],
            vec![vec![0], vec![1, 2], vec![3]],
        ];
        assert!(matches!(
            PartitionTree::new(4, 4.0, 0.0, levels, zero, zero),
            Err(BoundsError::NotNested { level: 2 })
        ));
        // diameter certificate violated at level 1 (cells of diameter 1 > v/2)
        let levels = vec![vec![vec![0, 1, 2, 3]], vec![vec![0, 1], vec![2, 3]], vec![vec![0], vec![1], vec![2], vec![3]]];
        assert!(matches!(
            PartitionTree::new(4, 1.0, 0.0, levels, metric, zero),
            Err(BoundsError::DiameterViolation { level: 1, metric: "d", .. })
        ));
        // open tail: deepest level still has a spread-out cell
        let levels = vec![vec![vec![0, 1, 2, 3]], vec![vec![0, 1], vec![2, 3]]];
        assert!(matches!(
            PartitionTree::new(4, 4.0, 0.0, levels, metric, zero),
            Err(BoundsError::OpenTail { .. })
        ));
    }

    #[test]
    fn chaining_single_point_matches_series() {
        let zero = |_: usize, _: usize| 0.0;
        let tree = PartitionTree::new(1, 1.0, 1.0, vec![vec![vec![0]]], zero, zero).unwrap();
        // frozen value of sum_k 2^-k (sqrt(2 (k+1) log 2) + (k+1) log 2)
        assert!((tree.chaining_h() - 5.9451288649250972).abs() < 1e-10);
        // linearity in (v, b)
        let tv = PartitionTree::new(1, 1.0, 0.0, vec![vec![vec![0]]], zero, zero).unwrap();
        let tb = PartitionTree::new(1, 0.0, 1.0, vec![vec![vec![0]]], zero, zero).unwrap();
        assert!((tv.chaining_h() + tb.chaining_h() - tree.chaining_h()).abs() < 1e-10);
        // threshold adds the deviation part
        let x = 2.0;
        assert!(
            (tree.threshold(x) - (tree.chaining_h() + 2.0 * math::sqrt(2.0 * x) + 2.0 * x)).abs()
                < 1e-12
        );
    }

    #[test]
    fn build_proof_tree_identical_points() {
        let zero = |_: usize, _: usize| 0.0;
        let tree = build_proof_tree(5, 1.0, 1.0, zero, zero, 30).unwrap();
        assert_eq!(tree.depth(), 1);
        assert!((tree.chaining_h() - 5.9451288649250972).abs() < 1e-10);
    }

    #[test]
    fn build_proof_tree_on_interval_beats_norm_threshold() {
        // 41-point grid on [-1, 1] around base point 0, scaled so the
        // certified radii are exactly v = 1 and b = 0.5
        let mut ts: Vec<f64> = vec![0.0];
        for i in 0..40 {
            ts.push(-1.0 + 2.0 * i as f64 / 39.0);
        }
        let d = move |i: usize, j: usize| (ts[i] - ts[j]).abs();
        let ts2: Vec<f64> = {
            let mut v = vec![0.0];
            for i in 0..40 {
                v.push(-1.0 + 2.0 * i as f64 / 39.0);
            }
            v
        };
        let cd = move |i: usize, j: usize| 0.5 * (ts2[i] - ts2[j]).abs();
        let tree = build_proof_tree(41, 1.0, 0.5, &d, &cd, 60).unwrap();
        let h = tree.chaining_h();
        assert!(h > 0.0);
        assert!(
            h <= sup_bound_norm(1.0, 0.5, 1, 0.0),
            "greedy tree H = {h} exceeds the closed one-dimensional threshold"
        );
    }

    #[test]
    fn build_proof_tree_random_cloud_validates() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let mut pts: Vec<(f64, f64)> = vec![(0.0, 0.0)];
        for _ in 0..60 {
            let x: f64 = rng.random_range(-0.7..0.7);
            let y: f64 = rng.random_range(-0.7..0.7);
            pts.push((x, y));
        }
        let p1 = pts.clone();
        let d = move |i: usize, j: usize| {
            let (xa, ya) = p1[i];
            let (xb, yb) = p1[j];
            math::sqrt((xa - xb) * (xa - xb) + (ya - yb) * (ya - yb))
        };
        let p2 = pts.clone();
        let cd = move |i: usize, j: usize| {
            let (xa, ya) = p2[i];
            let (xb, yb) = p2[j];
            0.3 * (xa - xb).abs().max((ya - yb).abs())
        };
        // constructor re-validates nesting and every diameter certificate
        let tree = build_proof_tree(61, 2.0, 0.6, &d, &cd, 60).unwrap();
        assert!(tree.chaining_h().is_finite());
        assert!(tree.depth() >= 2);
    }

    #[test]
    fn h_constant_recipe_series_within_majorants() {
        // the pure-b series at D = 1 has the closed form 4 log 2 + 4 log 45,
        // leaving a margin under 1e-3 to the majorant 18
        let b1 = h_constant_check(1, 0.0, 1.0).unwrap();
        let closed = 4.0 * math::ln(2.0) + 4.0 * math::ln(45.0);
        assert!((b1.series - closed).abs() < 1e-9);
        assert!(b1.pass && b1.series < 18.0);
        assert!(18.0 - b1.series < 1e-3);

        let v1 = h_constant_check(1, 1.0, 0.0).unwrap();
        assert!((v1.series - 8.1795614441777553).abs() < 1e-9);
        assert!(v1.pass && v1.series < 14.0);

        for d in 1..=50 {
            for (v, b) in [(1.0, 0.0), (0.0, 1.0), (1.0, 1.0)] {
                let rep = h_constant_check(d, v, b).unwrap();
                assert!(rep.pass, "series exceeds majorant at D = {d}, v = {v}, b = {b}");
            }
        }

        // the v part scales linearly
        let doubled = h_constant_check(3, 2.0, 0.0).unwrap();
        let single = h_constant_check(3, 1.0, 0.0).unwrap();
        assert!((doubled.series - 2.0 * single.series).abs() < 1e-9);
    }
}
