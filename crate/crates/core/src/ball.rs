//! The open s-ball, its validated elements, and the gamma factor.
//!
//! Every gyro-operation in this crate works on [`BallVector`]s: real
//! n-vectors whose Euclidean norm is strictly below the radius `s` of the
//! ball they belong to. Construction rejects boundary and exterior points
//! outright; nothing is ever clamped back inside.

use serde::{Deserialize, Serialize};

use crate::error::{GyroError, Result};

/// Radius and ambient dimension of an open ball.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BallParams {
    s: f64,
    dim: usize,
}

impl BallParams {
    pub fn new(s: f64, dim: usize) -> Result<Self> {
        if !(s.is_finite() && s > 0.0) {
            return Err(GyroError::InvalidParams(format!(
                "radius must be a positive finite number, got {s}"
            )));
        }
        if dim == 0 {
            return Err(GyroError::InvalidParams(
                "dimension must be at least 1".into(),
            ));
        }
        Ok(Self { s, dim })
    }

    /// The unit ball of the given dimension.
    pub fn unit(dim: usize) -> Result<Self> {
        Self::new(1.0, dim)
    }

    #[inline]
    pub fn s(&self) -> f64 {
        self.s
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    fn ensure_same(&self, other: &BallParams) -> Result<()> {
        if self.s == other.s && self.dim == other.dim {
            Ok(())
        } else {
            Err(GyroError::ParamsMismatch {
                left_s: self.s,
                left_dim: self.dim,
                right_s: other.s,
                right_dim: other.dim,
            })
        }
    }
}

/// Absolute plus relative tolerance used by every identity check.
///
/// A residual `r` measured against a quantity of magnitude `scale` is
/// accepted when `r <= abs + rel * scale`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    abs: f64,
    rel: f64,
}

impl Tolerance {
    pub fn new(abs: f64, rel: f64) -> Result<Self> {
        let valid = |x: f64| x.is_finite() && x >= 0.0;
        if !valid(abs) || !valid(rel) {
            return Err(GyroError::InvalidTolerance(format!(
                "components must be finite and nonnegative (abs={abs}, rel={rel})"
            )));
        }
        if abs == 0.0 && rel == 0.0 {
            return Err(GyroError::InvalidTolerance(
                "abs and rel cannot both be zero".into(),
            ));
        }
        Ok(Self { abs, rel })
    }

    /// A purely relative tolerance.
    pub fn relative(rel: f64) -> Result<Self> {
        Self::new(0.0, rel)
    }

    #[inline]
    pub fn abs(&self) -> f64 {
        self.abs
    }

    #[inline]
    pub fn rel(&self) -> f64 {
        self.rel
    }

    /// Largest admissible residual for a quantity of magnitude `scale`.
    #[inline]
    pub fn bound(&self, scale: f64) -> f64 {
        self.abs + self.rel * scale.abs()
    }

    #[inline]
    pub fn accepts(&self, residual: f64, scale: f64) -> bool {
        residual <= self.bound(scale)
    }
}

impl Default for Tolerance {
    fn default() -> Self {
        Self {
            abs: 1e-12,
            rel: 1e-9,
        }
    }
}

/// A point of the open s-ball.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawBallVector", into = "RawBallVector")]
pub struct BallVector {
    coords: Vec<f64>,
    params: BallParams,
}

#[derive(Serialize, Deserialize)]
struct RawBallVector {
    coords: Vec<f64>,
    s: f64,
}

impl TryFrom<RawBallVector> for BallVector {
    type Error = GyroError;

    fn try_from(raw: RawBallVector) -> Result<Self> {
        let params = BallParams::new(raw.s, raw.coords.len())?;
        BallVector::new(raw.coords, params)
    }
}

impl From<BallVector> for RawBallVector {
    fn from(v: BallVector) -> Self {
        RawBallVector {
            s: v.params.s,
            coords: v.coords,
        }
    }
}

impl BallVector {
    /// Validates `coords` as a member of the open ball described by `params`.
    pub fn new(coords: Vec<f64>, params: BallParams) -> Result<Self> {
        if coords.len() != params.dim {
            return Err(GyroError::DimensionMismatch {
                expected: params.dim,
                found: coords.len(),
            });
        }
        let n = norm(&coords);
        if !(n < params.s) {
            return Err(GyroError::OutOfBall {
                norm: n,
                s: params.s,
            });
        }
        Ok(Self { coords, params })
    }

    pub fn zero(params: BallParams) -> Self {
        Self {
            coords: vec![0.0; params.dim],
            params,
        }
    }

    #[inline]
    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn into_coords(self) -> Vec<f64> {
        self.coords
    }

    #[inline]
    pub fn params(&self) -> BallParams {
        self.params
    }

    #[inline]
    pub fn s(&self) -> f64 {
        self.params.s
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.params.dim
    }

    #[inline]
    pub fn norm(&self) -> f64 {
        norm(&self.coords)
    }

    #[inline]
    pub fn norm_sq(&self) -> f64 {
        dot(&self.coords, &self.coords)
    }

    /// Ambient inner product. Callers are expected to have checked that both
    /// vectors share a ball; see [`BallVector::ensure_same_ball`].
    #[inline]
    pub fn dot(&self, other: &BallVector) -> f64 {
        dot(&self.coords, &other.coords)
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|&x| x == 0.0)
    }

    /// The Euclidean negation, which is the inverse in both ball models.
    pub fn negated(&self) -> BallVector {
        BallVector {
            coords: self.coords.iter().map(|x| -x).collect(),
            params: self.params,
        }
    }

    pub fn ensure_same_ball(&self, other: &BallVector) -> Result<()> {
        self.params.ensure_same(&other.params)
    }

    /// Euclidean distance between the coordinate vectors.
    pub fn euclidean_distance(&self, other: &BallVector) -> f64 {
        self.coords
            .iter()
            .zip(&other.coords)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }

    /// Builds a vector in the same ball from freshly computed coordinates,
    /// re-validating membership.
    pub(crate) fn sibling(&self, coords: Vec<f64>) -> Result<BallVector> {
        BallVector::new(coords, self.params)
    }
}

#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
pub(crate) fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Linear combination `alpha * a + beta * b` of equal-length slices.
#[inline]
pub(crate) fn lincomb(alpha: f64, a: &[f64], beta: f64, b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| alpha * x + beta * y).collect()
}

/// Gamma factor of a vector of norm `norm` in the ball of radius `s`.
///
/// Uses the factored form `1/sqrt((1 - r)(1 + r))`, `r = norm/s`, which keeps
/// full relative accuracy as `r` approaches one.
#[inline]
pub fn gamma_from_norm(norm: f64, s: f64) -> f64 {
    let r = norm / s;
    (1.0 / ((1.0 - r) * (1.0 + r)).sqrt()).max(1.0)
}

/// Gamma factor `1/sqrt(1 - |v|^2/s^2)`.
pub fn gamma(v: &BallVector) -> f64 {
    gamma_from_norm(v.norm(), v.s())
}

/// Inverse hyperbolic tangent through `log1p`, accurate up to `|x| -> 1`.
pub fn atanh_stable(x: f64) -> f64 {
    0.5 * (2.0 * x / (1.0 - x)).ln_1p()
}

/// Rapidity `atanh(|v|/s)`.
pub fn rapidity(v: &BallVector) -> f64 {
    atanh_stable(v.norm() / v.s())
}

/// Norm of a vector with the given rapidity: `s * tanh(r)`, for `r >= 0`.
pub fn rapidity_to_norm(r: f64, params: BallParams) -> f64 {
    params.s * r.tanh()
}
