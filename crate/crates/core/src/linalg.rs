//! Vectors in `R^n`, orthonormal subspaces, projections, and the operator
//! seminorms that calibrate penalties.
//!
//! For a linear subspace `S` with orthonormal basis `u_1..u_D` the projector
//! applied to the `i`-th canonical vector has coordinates
//! `(proj_S e_i)[i'] = sum_j u_j[i] u_j[i']`, which gives the two seminorms
//!
//! ```text
//! Lambda_2(S)   = max_i |proj_S e_i|_2 = max_i sqrt(sum_j u_j[i]^2)
//! Lambda_inf(S) = max_i |proj_S e_i|_1
//! ```
//!
//! `Lambda_2(S)` equals `sup { |t|_inf / |t|_2 : t in S, t != 0 }` and is
//! always `<= 1`; `Lambda_inf(S) <= sqrt(n) Lambda_2(S)`.

use crate::math;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use serde::Serialize;

/// Max allowed deviation of a basis Gram matrix from the identity.
pub const GRAM_TOL: f64 = 1e-9;

/// Rank-drop threshold for orthonormalization, relative to the largest input
/// column norm: a residual below `RANK_DROP_REL * max_col_norm` is discarded.
pub const RANK_DROP_REL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub enum LinalgError {
    EmptyVector,
    NonFinite { index: usize },
    DimensionMismatch { expected: usize, got: usize },
    NotOrthonormal { max_deviation: f64 },
    Invalid(String),
}

impl fmt::Display for LinalgError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LinalgError::EmptyVector => write!(f, "vector must have at least one entry"),
            LinalgError::NonFinite { index } => {
                write!(f, "non-finite entry at position {}", index + 1)
            }
            LinalgError::DimensionMismatch { expected, got } => {
                write!(f, "dimension mismatch: expected {expected}, got {got}")
            }
            LinalgError::NotOrthonormal { max_deviation } => write!(
                f,
                "basis is not orthonormal: max Gram deviation {max_deviation:e} exceeds {GRAM_TOL:e}"
            ),
            LinalgError::Invalid(msg) => write!(f, "{msg}"),
        }
    }
}

/// A finite-dimensional real vector; entries are finite by construction.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct RealVector {
    data: Vec<f64>,
}

impl RealVector {
    pub fn new(data: Vec<f64>) -> Result<Self, LinalgError> {
        if data.is_empty() {
            return Err(LinalgError::EmptyVector);
        }
        if let Some(index) = data.iter().position(|v| !v.is_finite()) {
            return Err(LinalgError::NonFinite { index });
        }
        Ok(RealVector { data })
    }

    pub fn zeros(n: usize) -> Self {
        RealVector { data: vec![0.0; n] }
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }
}

impl AsRef<[f64]> for RealVector {
    fn as_ref(&self) -> &[f64] {
        &self.data
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let mut acc = 0.0;
    for (x, y) in a.iter().zip(b) {
        acc += x * y;
    }
    acc
}

pub fn norm2_sq(a: &[f64]) -> f64 {
    dot(a, a)
}

pub fn norm2(a: &[f64]) -> f64 {
    math::sqrt(norm2_sq(a))
}

pub fn norm_inf(a: &[f64]) -> f64 {
    a.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
}

pub fn norm1(a: &[f64]) -> f64 {
    a.iter().map(|v| v.abs()).sum()
}

/// Modified Gram-Schmidt with a second re-orthogonalization pass. Columns whose
/// residual norm falls below `RANK_DROP_REL` times the largest input column
/// norm are dropped, so the result spans the input within working precision.
pub fn orthonormalize(ambient: usize, columns: &[RealVector]) -> Result<Vec<RealVector>, LinalgError> {
    let mut max_norm = 0.0_f64;
    for col in columns {
        if col.len() != ambient {
            return Err(LinalgError::DimensionMismatch {
                expected: ambient,
                got: col.len(),
            });
        }
        max_norm = max_norm.max(norm2(col.as_slice()));
    }
    let drop_tol = RANK_DROP_REL * max_norm;
    let mut basis: Vec<Vec<f64>> = Vec::new();
    for col in columns {
        let mut w = col.as_slice().to_vec();
        for _pass in 0..2 {
            for u in &basis {
                let coeff = dot(&w, u);
                for (wi, ui) in w.iter_mut().zip(u) {
                    *wi -= coeff * ui;
                }
            }
        }
        let norm = norm2(&w);
        if norm <= drop_tol {
            continue;
        }
        for wi in w.iter_mut() {
            *wi /= norm;
        }
        basis.push(w);
    }
    Ok(basis
        .into_iter()
        .map(|data| RealVector { data })
        .collect())
}

/// A linear subspace of `R^n` carried by an orthonormal basis. `dim` may be 0,
/// in which case projections are identically zero and both seminorms are 0.
#[derive(Debug, Clone, PartialEq)]
pub struct Subspace {
    ambient: usize,
    basis: Vec<RealVector>,
}

impl Subspace {
    /// Wraps an already orthonormal basis; the Gram matrix must be within
    /// [`GRAM_TOL`] of the identity entrywise.
    pub fn from_orthonormal(ambient: usize, basis: Vec<RealVector>) -> Result<Self, LinalgError> {
        if ambient == 0 {
            return Err(LinalgError::Invalid(String::from("ambient dimension must be positive")));
        }
        for v in &basis {
            if v.len() != ambient {
                return Err(LinalgError::DimensionMismatch {
                    expected: ambient,
                    got: v.len(),
                });
            }
        }
        let dev = gram_deviation(&basis);
        if dev > GRAM_TOL {
            return Err(LinalgError::NotOrthonormal { max_deviation: dev });
        }
        Ok(Subspace { ambient, basis })
    }

    /// Builds the span of arbitrary columns via [`orthonormalize`].
    pub fn span(ambient: usize, columns: &[RealVector]) -> Result<Self, LinalgError> {
        let basis = orthonormalize(ambient, columns)?;
        Ok(Subspace { ambient, basis })
    }

    pub fn zero(ambient: usize) -> Self {
        Subspace {
            ambient,
            basis: Vec::new(),
        }
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[RealVector] {
        &self.basis
    }

    /// Coefficients of the orthogonal projection in the stored basis.
    pub fn coeffs(&self, y: &[f64]) -> Result<Vec<f64>, LinalgError> {
        if y.len() != self.ambient {
            return Err(LinalgError::DimensionMismatch {
                expected: self.ambient,
                got: y.len(),
            });
        }
        Ok(self.basis.iter().map(|u| dot(y, u.as_slice())).collect())
    }

    /// Orthogonal projection of `y` onto the subspace.
    pub fn project(&self, y: &[f64]) -> Result<Vec<f64>, LinalgError> {
        let coeffs = self.coeffs(y)?;
        let mut out = vec![0.0; self.ambient];
        for (c, u) in coeffs.iter().zip(&self.basis) {
            for (o, ui) in out.iter_mut().zip(u.as_slice()) {
                *o += c * ui;
            }
        }
        Ok(out)
    }

    /// Squared norm of the projection, `sum_j <y, u_j>^2`.
    pub fn projection_norm_sq(&self, y: &[f64]) -> Result<f64, LinalgError> {
        Ok(self.coeffs(y)?.iter().map(|c| c * c).sum())
    }

    /// Squared residual `|y - proj y|^2`, computed as `|y|^2 - |proj y|^2` and
    /// clamped at zero against cancellation.
    pub fn residual_sq(&self, y: &[f64]) -> Result<f64, LinalgError> {
        let total = norm2_sq(y);
        let fitted = self.projection_norm_sq(y)?;
        Ok((total - fitted).max(0.0))
    }

    /// `Lambda_2(S) = max_i |proj_S e_i|_2`; equals the best constant in
    /// `|t|_inf <= Lambda_2(S) |t|_2` over `t in S`. Always `<= 1`.
    pub fn lambda2(&self) -> f64 {
        if self.basis.is_empty() {
            return 0.0;
        }
        let mut worst = 0.0_f64;
        for i in 0..self.ambient {
            let mut s = 0.0;
            for u in &self.basis {
                let v = u.as_slice()[i];
                s += v * v;
            }
            worst = worst.max(s);
        }
        math::sqrt(worst)
    }

    /// `Lambda_inf(S) = max_i |proj_S e_i|_1`. Always `<= sqrt(n) Lambda_2(S)`.
    pub fn lambda_inf(&self) -> f64 {
        if self.basis.is_empty() {
            return 0.0;
        }
        let n = self.ambient;
        let mut worst = 0.0_f64;
        for i in 0..n {
            let mut row_sum = 0.0;
            for ip in 0..n {
                let mut entry = 0.0;
                for u in &self.basis {
                    entry += u.as_slice()[i] * u.as_slice()[ip];
                }
                row_sum += entry.abs();
            }
            worst = worst.max(row_sum);
        }
        worst
    }
}

/// Least-squares fit of `y` over `s`; identical to the orthogonal projection.
pub fn least_squares(s: &Subspace, y: &[f64]) -> Result<Vec<f64>, LinalgError> {
    s.project(y)
}

/// The sum `S + S'` as a subspace: concatenated bases re-orthonormalized, with
/// near-dependent directions dropped.
pub fn sum_subspace(a: &Subspace, b: &Subspace) -> Result<Subspace, LinalgError> {
    if a.ambient != b.ambient {
        return Err(LinalgError::DimensionMismatch {
            expected: a.ambient,
            got: b.ambient,
        });
    }
    let mut cols: Vec<RealVector> = a.basis.clone();
    cols.extend(b.basis.iter().cloned());
    Subspace::span(a.ambient, &cols)
}

/// Largest absolute entrywise deviation of the Gram matrix from the identity.
pub fn gram_deviation(basis: &[RealVector]) -> f64 {
    let mut dev = 0.0_f64;
    for (j, u) in basis.iter().enumerate() {
        for (k, w) in basis.iter().enumerate() {
            let g = dot(u.as_slice(), w.as_slice());
            let target = if j == k { 1.0 } else { 0.0 };
            dev = dev.max((g - target).abs());
        }
    }
    dev
}
