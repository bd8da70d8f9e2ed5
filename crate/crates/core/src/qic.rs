//! Qubit density matrices over Bloch vectors in the unit 3-ball.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::ball::{gamma, BallParams, BallVector};
use crate::einstein::ein_gamma_of_sum;
use crate::error::{GyroError, Result};
use crate::mobius::{mob_add, scalar_mul};

type M2 = [[Complex64; 2]; 2];

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Entry tolerance for the Hermitian and trace checks.
pub const DENSITY_TOL: f64 = 1e-12;

fn mul(a: &M2, b: &M2) -> M2 {
    let mut out = [[ZERO; 2]; 2];
    for (i, row) in out.iter_mut().enumerate() {
        for (j, x) in row.iter_mut().enumerate() {
            *x = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

fn trace(a: &M2) -> Complex64 {
    a[0][0] + a[1][1]
}

fn max_entry_diff(a: &M2, b: &M2) -> f64 {
    (0..2)
        .flat_map(|i| (0..2).map(move |j| (i, j)))
        .map(|(i, j)| (a[i][j] - b[i][j]).norm())
        .fold(0.0, f64::max)
}

/// Principal square root of a Hermitian positive semidefinite 2×2 matrix
/// through its eigendecomposition.
fn hermitian_sqrt(m: &M2) -> M2 {
    let a = m[0][0].re;
    let d = m[1][1].re;
    let b = m[0][1];
    let half_tr = (a + d) / 2.0;
    let radius = (((a - d) / 2.0).powi(2) + b.norm_sqr()).sqrt();
    let l1 = (half_tr + radius).max(0.0);
    let l2 = (half_tr - radius).max(0.0);
    if radius == 0.0 {
        let r = l1.sqrt();
        return [
            [Complex64::new(r, 0.0), ZERO],
            [ZERO, Complex64::new(r, 0.0)],
        ];
    }
    // projector onto the l1 eigenspace is (M − l2 I)/(l1 − l2)
    let (r1, r2) = (l1.sqrt(), l2.sqrt());
    let k = 1.0 / (2.0 * radius);
    let p = [
        [Complex64::new((a - half_tr + radius) * k, 0.0), b * k],
        [
            b.conj() * k,
            Complex64::new((d - half_tr + radius) * k, 0.0),
        ],
    ];
    let mut out = [[ZERO; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            let id = if i == j { 1.0 } else { 0.0 };
            out[i][j] = p[i][j] * r1 + (Complex64::new(id, 0.0) - p[i][j]) * r2;
        }
    }
    out
}

/// A valid qubit density matrix: Hermitian, unit trace, positive definite.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QubitDensity {
    entries: M2,
}

impl QubitDensity {
    pub fn new(entries: M2) -> Result<Self> {
        let herm = (entries[0][1] - entries[1][0].conj())
            .norm()
            .max(entries[0][0].im.abs())
            .max(entries[1][1].im.abs());
        if !(herm <= DENSITY_TOL) {
            return Err(GyroError::InvalidDensity(format!(
                "not Hermitian (defect {herm:e})"
            )));
        }
        let tr = trace(&entries).re;
        if !((tr - 1.0).abs() <= DENSITY_TOL) {
            return Err(GyroError::InvalidDensity(format!(
                "trace is {tr}, expected 1"
            )));
        }
        let det = entries[0][0].re * entries[1][1].re - entries[0][1].norm_sqr();
        if !(det > 0.0 && entries[0][0].re > 0.0) {
            return Err(GyroError::InvalidDensity("not positive definite".into()));
        }
        Ok(Self { entries })
    }

    pub fn entries(&self) -> &M2 {
        &self.entries
    }

    pub fn trace(&self) -> f64 {
        trace(&self.entries).re
    }

    pub fn det(&self) -> f64 {
        (self.entries[0][0] * self.entries[1][1] - self.entries[0][1] * self.entries[1][0]).re
    }
}

fn check_bloch(v: &BallVector) -> Result<()> {
    if v.dim() != 3 {
        return Err(GyroError::DimensionUnsupported {
            expected: 3,
            found: v.dim(),
        });
    }
    if v.s() != 1.0 {
        return Err(GyroError::RadiusUnsupported {
            expected: 1.0,
            found: v.s(),
        });
    }
    Ok(())
}

fn bloch_matrix(v: &[f64]) -> M2 {
    [
        [
            Complex64::new((1.0 + v[2]) / 2.0, 0.0),
            Complex64::new(v[0] / 2.0, -v[1] / 2.0),
        ],
        [
            Complex64::new(v[0] / 2.0, v[1] / 2.0),
            Complex64::new((1.0 - v[2]) / 2.0, 0.0),
        ],
    ]
}

/// `ρ = ½ [[1 + v3, v1 − i v2], [v1 + i v2, 1 − v3]]`.
pub fn density_from_bloch(v: &BallVector) -> Result<QubitDensity> {
    check_bloch(v)?;
    QubitDensity::new(bloch_matrix(v.coords()))
}

/// Inverse of [`density_from_bloch`].
pub fn bloch_from_density(rho: &QubitDensity) -> Result<BallVector> {
    let e = rho.entries();
    let coords = vec![2.0 * e[1][0].re, 2.0 * e[1][0].im, e[0][0].re - e[1][1].re];
    BallVector::new(coords, BallParams::unit(3)?)
}

/// The Bloch vector of the normalized product `ρu ρv ρv ρu`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TwoSum {
    /// `u ⊕ (2 ⊗ v ⊕ u)`.
    pub w: BallVector,
    /// `2 ⊗ (u ⊕ v)`.
    pub w_doubled: BallVector,
    /// Largest coordinate difference between the two routes.
    pub route_gap: f64,
    /// `‖ρu ρv ρv ρu − tr[ρu ρv ρv ρu] ρw‖` in the max-entry norm.
    pub matrix_residual: f64,
}

/// Möbius two-sum of Bloch vectors, checked against the density product.
pub fn two_sum_bloch(u: &BallVector, v: &BallVector) -> Result<TwoSum> {
    u.ensure_same_ball(v)?;
    check_bloch(u)?;
    let w = mob_add(u, &mob_add(&scalar_mul(2.0, v)?, u)?)?;
    let w_doubled = scalar_mul(2.0, &mob_add(u, v)?)?;
    let route_gap = w
        .coords()
        .iter()
        .zip(w_doubled.coords())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    let matrix_residual = two_sum_residual(u, v, &w)?;
    Ok(TwoSum {
        w,
        w_doubled,
        route_gap,
        matrix_residual,
    })
}

/// `‖ρu ρv ρv ρu − tr[ρu ρv ρv ρu] ρw‖` in the max-entry norm.
pub fn two_sum_residual(u: &BallVector, v: &BallVector, w: &BallVector) -> Result<f64> {
    let ru = density_from_bloch(u)?;
    let rv = density_from_bloch(v)?;
    let rw = density_from_bloch(w)?;
    let (ru, rv) = (ru.entries(), rv.entries());
    let prod = mul(&mul(&mul(ru, rv), rv), ru);
    let tr = trace(&prod);
    let scaled = rw.entries().map(|row| row.map(|x| x * tr));
    Ok(max_entry_diff(&prod, &scaled))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FidelityMethod {
    /// `[tr √(√ρu ρv √ρu)]²`.
    Matrix,
    /// `½ (1 + γ(u ⊕_E v)) / (γu γv)`.
    Gyro,
}

/// Bures fidelity of the qubit states with Bloch vectors `u` and `v`.
pub fn bures_fidelity(u: &BallVector, v: &BallVector, method: FidelityMethod) -> Result<f64> {
    check_bloch(u)?;
    check_bloch(v)?;
    match method {
        FidelityMethod::Matrix => {
            let ru = density_from_bloch(u)?;
            let rv = density_from_bloch(v)?;
            let su = hermitian_sqrt(ru.entries());
            let inner = mul(&mul(&su, rv.entries()), &su);
            let t = trace(&hermitian_sqrt(&inner)).re;
            Ok(t * t)
        }
        FidelityMethod::Gyro => {
            let g = ein_gamma_of_sum(u, v)?;
            Ok(0.5 * (1.0 + g) / (gamma(u) * gamma(v)))
        }
    }
}
