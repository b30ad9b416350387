//! Error distributions with a certified moment-generating-function envelope.
//!
//! A spec pairs a centered distribution with a claim `(sigma, c)` asserting
//!
//! ```text
//! log E[exp(lambda xi)] <= lambda^2 sigma^2 / (2 (1 - |lambda| c))
//! ```
//!
//! for all `lambda` with `|lambda| < 1/c` (all reals when `c = 0`). Preset
//! constructors install claims that hold analytically; [`NoiseSpec::certify`]
//! re-checks any claim numerically on a grid against the closed-form
//! log-Laplace transform, which is how a false claim such as treating a
//! Laplace error as purely Gaussian-type gets rejected.

use crate::math;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma, Normal, Open01, Poisson, Uniform};
use serde::{Deserialize, Serialize};

/// Largest tolerated exceedance of the claimed envelope during
/// certification, guarding against floating-point noise in the closed forms.
pub const CERTIFY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub enum NoiseError {
    InvalidParameter(String),
}

impl fmt::Display for NoiseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NoiseError::InvalidParameter(msg) => write!(f, "invalid noise parameter: {msg}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum NoiseKind {
    Gaussian { sigma: f64 },
    Laplace { scale: f64 },
    CenteredPoisson { mean: f64 },
    CenteredGamma { shape: f64, scale: f64 },
    BoundedUniform { half_width: f64 },
}

/// A noise distribution together with its claimed envelope parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseSpec {
    kind: NoiseKind,
    sigma: f64,
    c: f64,
}

fn positive(name: &str, v: f64) -> Result<f64, NoiseError> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(NoiseError::InvalidParameter(format!("{name} must be positive, got {v}")))
    }
}

impl NoiseSpec {
    /// Gaussian with standard deviation `sigma`; claim `(sigma, 0)`.
    pub fn gaussian(sigma: f64) -> Result<Self, NoiseError> {
        let s = positive("sigma", sigma)?;
        Ok(NoiseSpec { kind: NoiseKind::Gaussian { sigma: s }, sigma: s, c: 0.0 })
    }

    /// Laplace with scale `s` (variance `2 s^2`); claim `(2 s, s)`.
    pub fn laplace(scale: f64) -> Result<Self, NoiseError> {
        let s = positive("scale", scale)?;
        Ok(NoiseSpec { kind: NoiseKind::Laplace { scale: s }, sigma: 2.0 * s, c: s })
    }

    /// Poisson with mean `mu`, recentered at zero; claim `(sqrt(mu), 1/3)`.
    pub fn centered_poisson(mean: f64) -> Result<Self, NoiseError> {
        let mu = positive("mean", mean)?;
        Ok(NoiseSpec {
            kind: NoiseKind::CenteredPoisson { mean: mu },
            sigma: math::sqrt(mu),
            c: 1.0 / 3.0,
        })
    }

    /// Gamma with shape `k` and scale `theta`, recentered at zero; claim
    /// `(theta sqrt(2 k), theta)`.
    pub fn centered_gamma(shape: f64, scale: f64) -> Result<Self, NoiseError> {
        let k = positive("shape", shape)?;
        let th = positive("scale", scale)?;
        Ok(NoiseSpec {
            kind: NoiseKind::CenteredGamma { shape: k, scale: th },
            sigma: th * math::sqrt(2.0 * k),
            c: th,
        })
    }

    /// Uniform on `[-a, a]`; claim `(a, 0)`.
    pub fn bounded_uniform(half_width: f64) -> Result<Self, NoiseError> {
        let a = positive("half_width", half_width)?;
        Ok(NoiseSpec { kind: NoiseKind::BoundedUniform { half_width: a }, sigma: a, c: 0.0 })
    }

    /// The preset claim for any kind.
    pub fn preset(kind: NoiseKind) -> Result<Self, NoiseError> {
        match kind {
            NoiseKind::Gaussian { sigma } => Self::gaussian(sigma),
            NoiseKind::Laplace { scale } => Self::laplace(scale),
            NoiseKind::CenteredPoisson { mean } => Self::centered_poisson(mean),
            NoiseKind::CenteredGamma { shape, scale } => Self::centered_gamma(shape, scale),
            NoiseKind::BoundedUniform { half_width } => Self::bounded_uniform(half_width),
        }
    }

    /// A distribution with an arbitrary claimed envelope, for probing claims
    /// that the preset does not make. `certify` decides whether it holds.
    pub fn with_claim(kind: NoiseKind, sigma: f64, c: f64) -> Result<Self, NoiseError> {
        let s = positive("sigma", sigma)?;
        if !c.is_finite() || c < 0.0 {
            return Err(NoiseError::InvalidParameter(format!("c must be nonnegative, got {c}")));
        }
        match kind {
            NoiseKind::Gaussian { sigma } => positive("sigma", sigma)?,
            NoiseKind::Laplace { scale } => positive("scale", scale)?,
            NoiseKind::CenteredPoisson { mean } => positive("mean", mean)?,
            NoiseKind::CenteredGamma { shape, scale } => {
                positive("shape", shape)?;
                positive("scale", scale)?
            }
            NoiseKind::BoundedUniform { half_width } => positive("half_width", half_width)?,
        };
        Ok(NoiseSpec { kind, sigma: s, c })
    }

    pub fn kind(&self) -> NoiseKind {
        self.kind
    }

    /// Claimed envelope scale.
    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    /// Claimed envelope tail parameter.
    pub fn c(&self) -> f64 {
        self.c
    }

    /// Exactly the standard normal distribution.
    pub fn is_standard_gaussian(&self) -> bool {
        matches!(self.kind, NoiseKind::Gaussian { sigma } if sigma == 1.0)
    }

    /// True variance of the distribution (independent of the claim).
    pub fn variance(&self) -> f64 {
        match self.kind {
            NoiseKind::Gaussian { sigma } => sigma * sigma,
            NoiseKind::Laplace { scale } => 2.0 * scale * scale,
            NoiseKind::CenteredPoisson { mean } => mean,
            NoiseKind::CenteredGamma { shape, scale } => shape * scale * scale,
            NoiseKind::BoundedUniform { half_width } => half_width * half_width / 3.0,
        }
    }

    /// Open interval of `lambda` on which the log-Laplace transform is
    /// finite; infinite endpoints mean unbounded on that side.
    pub fn natural_domain(&self) -> (f64, f64) {
        match self.kind {
            NoiseKind::Gaussian { .. }
            | NoiseKind::CenteredPoisson { .. }
            | NoiseKind::BoundedUniform { .. } => (f64::NEG_INFINITY, f64::INFINITY),
            NoiseKind::Laplace { scale } => (-1.0 / scale, 1.0 / scale),
            NoiseKind::CenteredGamma { scale, .. } => (f64::NEG_INFINITY, 1.0 / scale),
        }
    }

    /// Closed-form `log E[exp(lambda xi)]`. Returns infinity outside the
    /// natural domain.
    pub fn log_laplace(&self, lambda: f64) -> f64 {
        let (lo, hi) = self.natural_domain();
        if lambda <= lo || lambda >= hi {
            return f64::INFINITY;
        }
        match self.kind {
            NoiseKind::Gaussian { sigma } => 0.5 * lambda * lambda * sigma * sigma,
            NoiseKind::Laplace { scale } => {
                let t = lambda * scale;
                -math::ln_1p(-t * t)
            }
            NoiseKind::CenteredPoisson { mean } => mean * (math::exp(lambda) - 1.0 - lambda),
            NoiseKind::CenteredGamma { shape, scale } => {
                let t = lambda * scale;
                -shape * math::ln_1p(-t) - shape * t
            }
            NoiseKind::BoundedUniform { half_width } => {
                // log(sinh(t)/t): series for tiny t, direct evaluation in
                // the wide middle range, asymptotic form past where sinh
                // would overflow
                let t = (lambda * half_width).abs();
                if t < 1e-4 {
                    t * t / 6.0 - t * t * t * t / 180.0
                } else if t < 350.0 {
                    math::ln(math::sinh(t) / t)
                } else {
                    t + math::ln_1p(-math::exp(-2.0 * t)) - math::ln(2.0 * t)
                }
            }
        }
    }

    /// Claimed envelope value at `lambda`; infinite once `|lambda| c >= 1`.
    pub fn claimed_envelope(&self, lambda: f64) -> f64 {
        let denom = 1.0 - lambda.abs() * self.c;
        if denom <= 0.0 {
            return f64::INFINITY;
        }
        lambda * lambda * self.sigma * self.sigma / (2.0 * denom)
    }

    /// Grid check of the claim over the admissible range of `lambda`: the
    /// claim window (`0.999/c`, or `10/sigma` when `c = 0`) intersected with
    /// 0.999 times the natural domain. Passes iff the worst exceedance of
    /// the envelope stays within [`CERTIFY_TOL`].
    pub fn certify(&self, grid_size: usize) -> CertifyReport {
        let claim_edge = if self.c > 0.0 { 0.999 / self.c } else { 10.0 / self.sigma };
        let (nlo, nhi) = self.natural_domain();
        let lo = (-claim_edge).max(if nlo.is_finite() { 0.999 * nlo } else { nlo });
        let hi = claim_edge.min(if nhi.is_finite() { 0.999 * nhi } else { nhi });
        let grid = grid_size.max(3);
        let mut max_violation = f64::NEG_INFINITY;
        let mut worst_lambda = lo;
        for i in 0..grid {
            let lambda = lo + (hi - lo) * i as f64 / (grid - 1) as f64;
            let v = self.log_laplace(lambda) - self.claimed_envelope(lambda);
            if v > max_violation {
                max_violation = v;
                worst_lambda = lambda;
            }
        }
        CertifyReport {
            pass: max_violation <= CERTIFY_TOL,
            max_violation,
            worst_lambda,
            grid_size: grid,
            lambda_lo: lo,
            lambda_hi: hi,
        }
    }

    /// Deterministic generator: one fixed key per `seed`, one independent
    /// stream per replication index.
    pub fn rng(seed: u64, stream: u64) -> ChaCha8Rng {
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        r.set_stream(stream);
        r
    }

    /// `n` independent centered draws.
    pub fn sample<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Vec<f64> {
        let mut out = Vec::with_capacity(n);
        match self.kind {
            NoiseKind::Gaussian { sigma } => {
                let d = Normal::new(0.0, sigma).expect("validated at construction");
                out.extend((0..n).map(|_| d.sample(rng)));
            }
            NoiseKind::Laplace { scale } => {
                for _ in 0..n {
                    let u: f64 = Open01.sample(rng);
                    let centered = u - 0.5;
                    let sign = if centered < 0.0 { -1.0 } else { 1.0 };
                    out.push(-scale * sign * math::ln_1p(-2.0 * centered.abs()));
                }
            }
            NoiseKind::CenteredPoisson { mean } => {
                let d = Poisson::new(mean).expect("validated at construction");
                out.extend((0..n).map(|_| {
                    let x: f64 = d.sample(rng);
                    x - mean
                }));
            }
            NoiseKind::CenteredGamma { shape, scale } => {
                let d = Gamma::new(shape, scale).expect("validated at construction");
                out.extend((0..n).map(|_| d.sample(rng) - shape * scale));
            }
            NoiseKind::BoundedUniform { half_width } => {
                let d = Uniform::new_inclusive(-half_width, half_width)
                    .expect("validated at construction");
                out.extend((0..n).map(|_| d.sample(rng)));
            }
        }
        out
    }

    /// Convenience wrapper: draw `n` values on stream `stream` of `seed`.
    pub fn sample_stream(&self, n: usize, seed: u64, stream: u64) -> Vec<f64> {
        let mut rng = Self::rng(seed, stream);
        self.sample(n, &mut rng)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CertifyReport {
    pub pass: bool,
    /// Worst value of `log_laplace - envelope` over the grid; negative means
    /// the claim holds with margin.
    pub max_violation: f64,
    pub worst_lambda: f64,
    pub grid_size: usize,
    pub lambda_lo: f64,
    pub lambda_hi: f64,
}
