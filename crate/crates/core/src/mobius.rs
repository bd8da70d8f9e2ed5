//! Möbius addition in the complex unit disc and in the s-ball, together with
//! the disc gyration, Möbius coaddition and gyrovector scalar multiplication.

use serde::{Deserialize, Serialize};

use crate::ball::{gamma, gamma_from_norm, lincomb, BallVector};
use crate::error::{GyroError, Result};

/// A complex number of the open unit disc.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiscComplex {
    re: f64,
    im: f64,
}

impl DiscComplex {
    pub fn new(re: f64, im: f64) -> Result<Self> {
        let norm = re.hypot(im);
        if !(norm < 1.0) {
            return Err(GyroError::OutOfBall { norm, s: 1.0 });
        }
        Ok(Self { re, im })
    }

    pub fn zero() -> Self {
        Self { re: 0.0, im: 0.0 }
    }

    #[inline]
    pub fn re(&self) -> f64 {
        self.re
    }

    #[inline]
    pub fn im(&self) -> f64 {
        self.im
    }

    pub fn modulus(&self) -> f64 {
        self.re.hypot(self.im)
    }

    pub fn conj(&self) -> Self {
        Self {
            re: self.re,
            im: -self.im,
        }
    }

    pub fn neg(&self) -> Self {
        Self {
            re: -self.re,
            im: -self.im,
        }
    }

    /// The disc point `(re, im)` as a vector of the unit 2-ball.
    pub fn to_ball(&self) -> BallVector {
        let params = crate::ball::BallParams::unit(2).expect("unit disc parameters");
        BallVector::new(vec![self.re, self.im], params).expect("disc point has modulus below 1")
    }

    /// Identification of a unit 2-ball vector with a disc point.
    pub fn from_ball(v: &BallVector) -> Result<Self> {
        if v.dim() != 2 {
            return Err(GyroError::DimensionUnsupported {
                expected: 2,
                found: v.dim(),
            });
        }
        if v.s() != 1.0 {
            return Err(GyroError::RadiusUnsupported {
                expected: 1.0,
                found: v.s(),
            });
        }
        Self::new(v.coords()[0], v.coords()[1])
    }
}

/// A complex number of modulus one: the value of a disc gyration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UnimodularComplex {
    re: f64,
    im: f64,
}

impl UnimodularComplex {
    #[inline]
    pub fn re(&self) -> f64 {
        self.re
    }

    #[inline]
    pub fn im(&self) -> f64 {
        self.im
    }

    pub fn modulus(&self) -> f64 {
        self.re.hypot(self.im)
    }

    /// Rotation angle in `(-pi, pi]`.
    pub fn angle(&self) -> f64 {
        self.im.atan2(self.re)
    }

    /// Rotates a disc point by this factor.
    pub fn rotate(&self, z: &DiscComplex) -> DiscComplex {
        let (re, im) = cmul((self.re, self.im), (z.re, z.im));
        DiscComplex { re, im }
    }
}

#[inline]
fn cmul(a: (f64, f64), b: (f64, f64)) -> (f64, f64) {
    (a.0 * b.0 - a.1 * b.1, a.0 * b.1 + a.1 * b.0)
}

#[inline]
fn cdiv(a: (f64, f64), b: (f64, f64)) -> (f64, f64) {
    let d = b.0 * b.0 + b.1 * b.1;
    ((a.0 * b.0 + a.1 * b.1) / d, (a.1 * b.0 - a.0 * b.1) / d)
}

/// Möbius addition in the disc, `(a + z) / (1 + conj(a) z)`.
pub fn mob_add_disc(a: DiscComplex, z: DiscComplex) -> DiscComplex {
    let num = (a.re + z.re, a.im + z.im);
    let az = cmul((a.re, -a.im), (z.re, z.im));
    let den = (1.0 + az.0, az.1);
    let (re, im) = cdiv(num, den);
    DiscComplex { re, im }
}

/// Closed-form disc gyration `(1 + a conj(b)) / (1 + conj(a) b)`.
pub fn mob_gyr_disc(a: DiscComplex, b: DiscComplex) -> UnimodularComplex {
    let ab = cmul((a.re, a.im), (b.re, -b.im));
    let (re, im) = cdiv((1.0 + ab.0, ab.1), (1.0 + ab.0, -ab.1));
    UnimodularComplex { re, im }
}

/// Möbius addition in the s-ball.
pub fn mob_add(u: &BallVector, v: &BallVector) -> Result<BallVector> {
    u.ensure_same_ball(v)?;
    let s2 = u.s() * u.s();
    let uv = u.dot(v) / s2;
    let uu = u.norm_sq() / s2;
    let vv = v.norm_sq() / s2;
    let den = 1.0 + 2.0 * uv + uu * vv;
    debug_assert!(
        den > 0.0,
        "Möbius denominator must be positive inside the ball"
    );
    let cu = (1.0 + 2.0 * uv + vv) / den;
    let cv = (1.0 - uu) / den;
    u.sibling(lincomb(cu, u.coords(), cv, v.coords()))
}

/// Closed-form Möbius coaddition `(g_u^2 u + g_v^2 v) / (g_u^2 + g_v^2 - 1)`.
pub fn mob_coadd(u: &BallVector, v: &BallVector) -> Result<BallVector> {
    u.ensure_same_ball(v)?;
    let gu2 = gamma(u).powi(2);
    let gv2 = gamma(v).powi(2);
    let den = gu2 + gv2 - 1.0;
    debug_assert!(den > 0.0);
    u.sibling(lincomb(gu2 / den, u.coords(), gv2 / den, v.coords()))
}

/// Gyrovector scalar multiplication `s tanh(r atanh(|v|/s)) v/|v|`, shared by
/// the Möbius and Einstein models.
///
/// Fails with [`GyroError::OutOfBall`] only when the exact result is so close
/// to the boundary that it rounds onto it in double precision.
pub fn scalar_mul(r: f64, v: &BallVector) -> Result<BallVector> {
    let n = v.norm();
    let s = v.s();
    if n < f64::EPSILON * s || r == 0.0 {
        return Ok(BallVector::zero(v.params()));
    }
    // tanh(r atanh x) as e/(e + 2) with e = expm1(2 r atanh x), which is
    // correctly rounded more often than tanh of a rounded rapidity
    let x = n / s;
    let two_y = r.abs() * (2.0 * x / (1.0 - x)).ln_1p();
    let t = if two_y > 80.0 {
        1.0
    } else {
        let e = two_y.exp_m1();
        e / (e + 2.0)
    };
    let k = r.signum() * s * t / n;
    v.sibling(v.coords().iter().map(|x| k * x).collect())
}

/// Gamma of a Möbius sum through the gamma identity, without forming the sum.
pub fn mob_gamma_of_sum(u: &BallVector, v: &BallVector) -> Result<f64> {
    u.ensure_same_ball(v)?;
    let s2 = u.s() * u.s();
    let radicand = 1.0 + 2.0 * u.dot(v) / s2 + u.norm_sq() * v.norm_sq() / (s2 * s2);
    let g = gamma_from_norm(u.norm(), u.s()) * gamma_from_norm(v.norm(), v.s()) * radicand.sqrt();
    Ok(g.max(1.0))
}
