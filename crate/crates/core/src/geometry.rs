//! Gyrolines, cogyrolines, midpoints, gyrodistance and gyrotriangles, with a
//! circle-fit diagnostic for curves in the disc.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::ball::BallVector;
use crate::error::{GyroError, Result};
use crate::gyro::Model;

/// Which of the two dual curve families a [`GyroCurve`] belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CurveKind {
    Gyroline,
    Cogyroline,
}

impl std::str::FromStr for CurveKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "gyroline" | "line" => Ok(CurveKind::Gyroline),
            "cogyroline" | "coline" => Ok(CurveKind::Cogyroline),
            other => Err(format!(
                "unknown curve kind '{other}' (expected gyroline or cogyroline)"
            )),
        }
    }
}

/// `⊖A ⊕ B`.
fn gyrovector(model: Model, a: &BallVector, b: &BallVector) -> Result<BallVector> {
    model.add(&a.negated(), b)
}

/// Gyrovectors shorter than this multiple of `s` count as zero when
/// checking that two points determine a curve.
pub const DEGENERATE_LENGTH: f64 = 1e-12;

fn is_degenerate(v: &BallVector) -> bool {
    v.norm() <= DEGENERATE_LENGTH * v.s()
}

/// Gyroline point `A ⊕ (⊖A ⊕ B) ⊗ t`.
pub fn gyroline_point(a: &BallVector, b: &BallVector, t: f64, model: Model) -> Result<BallVector> {
    let ab = gyrovector(model, a, b)?;
    if is_degenerate(&ab) {
        return Err(GyroError::DegenerateCurve);
    }
    model.add(a, &model.scalar(t, &ab)?)
}

/// Cogyroline point `(B ⊟ A) ⊗ t ⊕ A`.
pub fn cogyroline_point(
    a: &BallVector,
    b: &BallVector,
    t: f64,
    model: Model,
) -> Result<BallVector> {
    let ba = model.cosub(b, a)?;
    if is_degenerate(&ba) {
        return Err(GyroError::DegenerateCurve);
    }
    model.add(&model.scalar(t, &ba)?, a)
}

/// A gyroline or cogyroline through two distinct points.
#[derive(Debug, Clone, PartialEq)]
pub struct GyroCurve {
    kind: CurveKind,
    a: BallVector,
    b: BallVector,
    model: Model,
}

impl GyroCurve {
    pub fn new(kind: CurveKind, a: BallVector, b: BallVector, model: Model) -> Result<Self> {
        a.ensure_same_ball(&b)?;
        if is_degenerate(&gyrovector(model, &a, &b)?) {
            return Err(GyroError::DegenerateCurve);
        }
        Ok(Self { kind, a, b, model })
    }

    pub fn kind(&self) -> CurveKind {
        self.kind
    }

    pub fn a(&self) -> &BallVector {
        &self.a
    }

    pub fn b(&self) -> &BallVector {
        &self.b
    }

    pub fn model(&self) -> Model {
        self.model
    }

    pub fn point(&self, t: f64) -> Result<BallVector> {
        match self.kind {
            CurveKind::Gyroline => gyroline_point(&self.a, &self.b, t, self.model),
            CurveKind::Cogyroline => cogyroline_point(&self.a, &self.b, t, self.model),
        }
    }

    /// `n + 1` points at uniform parameters from `t0` to `t1`, ordered by
    /// parameter index.
    pub fn sample(&self, t0: f64, t1: f64, n: usize) -> Result<Vec<(f64, BallVector)>> {
        let ts = uniform_params(t0, t1, n);
        #[cfg(feature = "parallel")]
        {
            use rayon::prelude::*;
            ts.into_par_iter()
                .map(|t| self.point(t).map(|p| (t, p)))
                .collect()
        }
        #[cfg(not(feature = "parallel"))]
        {
            ts.into_iter()
                .map(|t| self.point(t).map(|p| (t, p)))
                .collect()
        }
    }

    /// Sequential counterpart of [`GyroCurve::sample`].
    pub fn sample_sequential(&self, t0: f64, t1: f64, n: usize) -> Result<Vec<(f64, BallVector)>> {
        uniform_params(t0, t1, n)
            .into_iter()
            .map(|t| self.point(t).map(|p| (t, p)))
            .collect()
    }
}

fn uniform_params(t0: f64, t1: f64, n: usize) -> Vec<f64> {
    if n == 0 {
        return vec![t0];
    }
    (0..=n)
        .map(|i| {
            if i == n {
                t1
            } else {
                t0 + (t1 - t0) * (i as f64 / n as f64)
            }
        })
        .collect()
}

/// Gyromidpoint `A ⊕ (⊖A ⊕ B) ⊗ ½`.
pub fn gyromidpoint(a: &BallVector, b: &BallVector, model: Model) -> Result<BallVector> {
    model.add(a, &model.scalar(0.5, &gyrovector(model, a, b)?)?)
}

/// The same gyromidpoint through cooperation, `½ ⊗ (A ⊞ B)`.
pub fn gyromidpoint_cooperative(
    a: &BallVector,
    b: &BallVector,
    model: Model,
) -> Result<BallVector> {
    model.scalar(0.5, &model.coadd(a, b)?)
}

/// Cogyromidpoint `(B ⊟ A) ⊗ ½ ⊕ A`, the parameter-½ point of the cogyroline.
pub fn cogyromidpoint(a: &BallVector, b: &BallVector, model: Model) -> Result<BallVector> {
    model.add(&model.scalar(0.5, &model.cosub(b, a)?)?, a)
}

/// Gyrodistance `‖⊖A ⊕ B‖`.
pub fn gyrodistance(a: &BallVector, b: &BallVector, model: Model) -> Result<f64> {
    Ok(gyrovector(model, a, b)?.norm())
}

/// Cogyrodistance `‖⊖A ⊞ B‖`.
pub fn cogyrodistance(a: &BallVector, b: &BallVector, model: Model) -> Result<f64> {
    Ok(model.coadd(&a.negated(), b)?.norm())
}

/// Angular tolerance of the gyrocollinearity test.
pub const COLLINEARITY_ANGLE_TOL: f64 = 1e-8;

/// Whether `C` lies on the gyroline through `A` and `B`: the gyrovectors
/// `⊖A ⊕ B` and `⊖A ⊕ C` are parallel within [`COLLINEARITY_ANGLE_TOL`].
/// Coincident points count as collinear.
pub fn is_gyrocollinear(
    a: &BallVector,
    b: &BallVector,
    c: &BallVector,
    model: Model,
) -> Result<bool> {
    let ab = gyrovector(model, a, b)?;
    let ac = gyrovector(model, a, c)?;
    let (nb, nc) = (ab.norm(), ac.norm());
    if nb <= DEGENERATE_LENGTH * a.s() || nc <= DEGENERATE_LENGTH * a.s() {
        return Ok(true);
    }
    // angle between the unit directions as 2 atan(|p − q| / |p + q|), which
    // stays accurate near 0 and pi
    let (mut d, mut sum) = (0.0, 0.0);
    for (x, y) in ab.coords().iter().zip(ac.coords()) {
        let (p, q) = (x / nb, y / nc);
        d += (p - q) * (p - q);
        sum += (p + q) * (p + q);
    }
    let angle = 2.0 * d.sqrt().atan2(sum.sqrt());
    Ok(angle.min(std::f64::consts::PI - angle) <= COLLINEARITY_ANGLE_TOL)
}

/// A gyrotriangle with its side gyrovectors and side gyrolengths.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GyroTriangle {
    pub a_vertex: BallVector,
    pub b_vertex: BallVector,
    pub c_vertex: BallVector,
    /// `⊖C ⊕ B`, opposite vertex A.
    pub side_a: BallVector,
    /// `⊖C ⊕ A`, opposite vertex B.
    pub side_b: BallVector,
    /// `⊖B ⊕ A`, opposite vertex C.
    pub side_c: BallVector,
    pub len_a: f64,
    pub len_b: f64,
    pub len_c: f64,
}

pub fn gyrotriangle(
    a: &BallVector,
    b: &BallVector,
    c: &BallVector,
    model: Model,
) -> Result<GyroTriangle> {
    a.ensure_same_ball(b)?;
    a.ensure_same_ball(c)?;
    if a == b || b == c || a == c {
        return Err(GyroError::DegenerateTriangle(
            "vertices are not distinct".into(),
        ));
    }
    if is_gyrocollinear(a, b, c, model)? {
        return Err(GyroError::DegenerateTriangle(
            "vertices are gyrocollinear".into(),
        ));
    }
    let side_a = gyrovector(model, c, b)?;
    let side_b = gyrovector(model, c, a)?;
    let side_c = gyrovector(model, b, a)?;
    Ok(GyroTriangle {
        len_a: side_a.norm(),
        len_b: side_b.norm(),
        len_c: side_c.norm(),
        a_vertex: a.clone(),
        b_vertex: b.clone(),
        c_vertex: c.clone(),
        side_a,
        side_b,
        side_c,
    })
}

impl GyroTriangle {
    /// Largest violation of the three gyrotriangle inequalities
    /// `x <= y ⊕ z` (scalar speed addition); nonpositive when all hold.
    pub fn inequality_excess(&self, model: Model) -> f64 {
        let s = self.a_vertex.s();
        let (a, b, c) = (self.len_a, self.len_b, self.len_c);
        [
            a - model.add_speeds(b, c, s),
            b - model.add_speeds(a, c, s),
            c - model.add_speeds(a, b, s),
        ]
        .into_iter()
        .fold(f64::NEG_INFINITY, f64::max)
    }
}

/// `(A, B)` and `(A2, B2)` are equivalent when `⊖A ⊕ B` and `⊖A2 ⊕ B2`
/// agree within `tol` (Euclidean).
pub fn gyrovector_equivalent(
    a: &BallVector,
    b: &BallVector,
    a2: &BallVector,
    b2: &BallVector,
    model: Model,
    tol: f64,
) -> Result<bool> {
    a.ensure_same_ball(a2)?;
    let u = gyrovector(model, a, b)?;
    let v = gyrovector(model, a2, b2)?;
    Ok(u.euclidean_distance(&v) <= tol)
}

/// Fourth vertex `D = (B ⊞ C) ⊖ A` of the gyroparallelogram `ABDC`.
pub fn gyroparallelogram_fourth(
    a: &BallVector,
    b: &BallVector,
    c: &BallVector,
    model: Model,
) -> Result<BallVector> {
    a.ensure_same_ball(b)?;
    a.ensure_same_ball(c)?;
    if is_gyrocollinear(a, b, c, model)? {
        return Err(GyroError::DegenerateTriangle(
            "vertices are gyrocollinear".into(),
        ));
    }
    model.sub(&model.coadd(b, c)?, a)
}

/// Supporting curve recovered from sampled points.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "shape", rename_all = "lowercase")]
pub enum ArcFit {
    Circle {
        center: [f64; 2],
        radius: f64,
    },
    /// The line `normal . x = offset`, `|normal| = 1`.
    Line {
        normal: [f64; 2],
        offset: f64,
    },
}

/// Boundary behavior of a fitted disc curve.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ArcDiagnostics {
    pub kind: CurveKind,
    pub fit: ArcFit,
    /// Radius of the supporting circle; infinite for a straight curve.
    pub radius: f64,
    pub straight: bool,
    /// Angle in `[0, pi/2]` between the supporting curve and the boundary
    /// circle at their intersection; `NaN` if they do not meet.
    pub boundary_angle: f64,
    /// For gyrolines `|‖center‖² − radius² − s²| / s²`, zero for orthogonal
    /// intersection. For cogyrolines `‖p1 + p2‖ / (2s)` over the two boundary
    /// intersections, zero when they are antipodal.
    pub boundary_residual: f64,
    /// Root-mean-square geometric distance of the samples from the fit.
    pub fit_rms: f64,
    pub samples: usize,
}

/// Relative spread below which sampled points are treated as collinear.
const STRAIGHT_TOL: f64 = 1e-12;

/// Fits the supporting circle of a Möbius disc curve from `samples` points
/// on `t ∈ [0, 1]` and measures how it meets the boundary.
pub fn arc_diagnostics(curve: &GyroCurve, samples: usize) -> Result<ArcDiagnostics> {
    let p = curve.a().params();
    if p.dim() != 2 {
        return Err(GyroError::DimensionUnsupported {
            expected: 2,
            found: p.dim(),
        });
    }
    if curve.model() != Model::Mobius {
        return Err(GyroError::DegenerateFit(
            "circle diagnostics apply to the Möbius disc only".into(),
        ));
    }
    if samples < 3 {
        return Err(GyroError::DegenerateFit(format!(
            "need at least 3 samples, got {samples}"
        )));
    }
    let s = p.s();
    let pts: Vec<[f64; 2]> = curve
        .sample_sequential(0.0, 1.0, samples - 1)?
        .into_iter()
        .map(|(_, v)| [v.coords()[0] / s, v.coords()[1] / s])
        .collect();
    let mut d = fit_points(curve.kind(), &pts)?;
    // back to ball units
    d.fit = match d.fit {
        ArcFit::Circle { center, radius } => ArcFit::Circle {
            center: [center[0] * s, center[1] * s],
            radius: radius * s,
        },
        ArcFit::Line { normal, offset } => ArcFit::Line {
            normal,
            offset: offset * s,
        },
    };
    d.radius *= s;
    d.fit_rms *= s;
    Ok(d)
}

/// Fit on points already scaled to the unit disc.
fn fit_points(kind: CurveKind, pts: &[[f64; 2]]) -> Result<ArcDiagnostics> {
    let n = pts.len() as f64;
    let mean = pts
        .iter()
        .fold([0.0, 0.0], |m, q| [m[0] + q[0] / n, m[1] + q[1] / n]);
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for q in pts {
        let (dx, dy) = (q[0] - mean[0], q[1] - mean[1]);
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    let tr = sxx + syy;
    if tr == 0.0 {
        return Err(GyroError::DegenerateFit("all samples coincide".into()));
    }
    let disc = ((sxx - syy).powi(2) / 4.0 + sxy * sxy).sqrt();
    let lam_min = (tr / 2.0 - disc).max(0.0);
    let lam_max = tr / 2.0 + disc;

    if (lam_min / lam_max).sqrt() <= STRAIGHT_TOL {
        // principal axis of the scatter
        let phi = 0.5 * (2.0 * sxy).atan2(sxx - syy);
        let dir = [phi.cos(), phi.sin()];
        let normal = [-dir[1], dir[0]];
        let offset = normal[0] * mean[0] + normal[1] * mean[1];
        let rms = (pts
            .iter()
            .map(|q| (normal[0] * q[0] + normal[1] * q[1] - offset).powi(2))
            .sum::<f64>()
            / n)
            .sqrt();
        // both conditions reduce to the line passing through the center
        let boundary_residual = offset.abs();
        return Ok(ArcDiagnostics {
            kind,
            fit: ArcFit::Line { normal, offset },
            radius: f64::INFINITY,
            straight: true,
            boundary_angle: if offset.abs() < 1.0 {
                offset.abs().acos()
            } else {
                f64::NAN
            },
            boundary_residual,
            fit_rms: rms,
            samples: pts.len(),
        });
    }

    // algebraic fit: x² + y² + D x + E y + F = 0
    let m = DMatrix::from_fn(pts.len(), 3, |i, j| match j {
        0 => pts[i][0],
        1 => pts[i][1],
        _ => 1.0,
    });
    let rhs = DVector::from_fn(pts.len(), |i, _| -(pts[i][0].powi(2) + pts[i][1].powi(2)));
    let sol = m
        .svd(true, true)
        .solve(&rhs, 1e-15)
        .map_err(|e| GyroError::DegenerateFit(e.to_string()))?;
    let (dc, ec, fc) = (sol[0], sol[1], sol[2]);
    let center = [-dc / 2.0, -ec / 2.0];
    let c2 = center[0].powi(2) + center[1].powi(2);
    let r2 = c2 - fc;
    if !(r2 > 0.0) {
        return Err(GyroError::DegenerateFit(
            "fitted circle has no real radius".into(),
        ));
    }
    let radius = r2.sqrt();
    let rms = (pts
        .iter()
        .map(|q| ((q[0] - center[0]).hypot(q[1] - center[1]) - radius).powi(2))
        .sum::<f64>()
        / n)
        .sqrt();

    // |c|² − r² = F, so the orthogonality defect is F − 1 without cancellation
    let orthogonality = (fc - 1.0).abs();
    // boundary intersections lie on the chord c.x = h with h = (|c|² − r² + 1)/2;
    // their midpoint is h c/|c|², so ‖p1 + p2‖/2 = |h|/|c|
    let h = (fc + 1.0) / 2.0;
    let cn = c2.sqrt();
    let foot2 = h * h / c2;
    let meets = foot2 <= 1.0;
    let boundary_residual = match kind {
        CurveKind::Gyroline => orthogonality,
        CurveKind::Cogyroline => {
            if meets {
                h.abs() / cn
            } else {
                f64::INFINITY
            }
        }
    };
    let boundary_angle = if meets {
        // cosine of the angle between the two circles at an intersection
        ((r2 + 1.0 - c2) / (2.0 * radius)).abs().min(1.0).acos()
    } else {
        f64::NAN
    };
    Ok(ArcDiagnostics {
        kind,
        fit: ArcFit::Circle { center, radius },
        radius,
        straight: false,
        boundary_angle,
        boundary_residual,
        fit_rms: rms,
        samples: pts.len(),
    })
}
