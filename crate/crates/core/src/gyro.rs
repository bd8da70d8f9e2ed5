//! A model-agnostic gyrogroup engine.
//!
//! Gyrations are evaluated straight from their definition
//! `gyr[a,b]z = ⊖(a⊕b) ⊕ (a⊕(b⊕z))`, so anything implementing
//! [`GyroGroup`] gets gyrations, cooperation, loop-equation solvers and the
//! randomized axiom [`audit`] for free.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::ball::{BallParams, BallVector, Tolerance};
use crate::einstein::{ein_add, ein_coadd, ein_gamma_of_sum};
use crate::error::{GyroError, Result};
use crate::mobius::{mob_add, mob_coadd, mob_gamma_of_sum, scalar_mul};
use crate::sampling::SampleRng;

/// A binary operation on a ball together with its inverse and identity.
pub trait GyroGroup: Sync {
    fn label(&self) -> &str;

    fn add(&self, u: &BallVector, v: &BallVector) -> Result<BallVector>;

    fn neg(&self, v: &BallVector) -> BallVector {
        v.negated()
    }

    fn zero(&self, params: BallParams) -> BallVector {
        BallVector::zero(params)
    }

    /// Closed-form cooperation, for models that have one.
    fn coadd_closed_form(&self, _u: &BallVector, _v: &BallVector) -> Option<Result<BallVector>> {
        None
    }
}

/// The two gyrovector space models of the ball.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Model {
    Mobius,
    Einstein,
}

impl Model {
    pub const ALL: [Model; 2] = [Model::Mobius, Model::Einstein];

    pub fn name(&self) -> &'static str {
        match self {
            Model::Mobius => "mobius",
            Model::Einstein => "einstein",
        }
    }

    pub fn add(&self, u: &BallVector, v: &BallVector) -> Result<BallVector> {
        match self {
            Model::Mobius => mob_add(u, v),
            Model::Einstein => ein_add(u, v),
        }
    }

    /// `u ⊖ v = u ⊕ (⊖v)`.
    pub fn sub(&self, u: &BallVector, v: &BallVector) -> Result<BallVector> {
        self.add(u, &v.negated())
    }

    pub fn coadd(&self, u: &BallVector, v: &BallVector) -> Result<BallVector> {
        match self {
            Model::Mobius => mob_coadd(u, v),
            Model::Einstein => ein_coadd(u, v),
        }
    }

    /// `u ⊟ v = u ⊞ (⊖v)`.
    pub fn cosub(&self, u: &BallVector, v: &BallVector) -> Result<BallVector> {
        self.coadd(u, &v.negated())
    }

    pub fn scalar(&self, r: f64, v: &BallVector) -> Result<BallVector> {
        scalar_mul(r, v)
    }

    pub fn gamma_of_sum(&self, u: &BallVector, v: &BallVector) -> Result<f64> {
        match self {
            Model::Mobius => mob_gamma_of_sum(u, v),
            Model::Einstein => ein_gamma_of_sum(u, v),
        }
    }

    /// Addition of collinear speeds in `[0, s)`, the same law in both models.
    pub fn add_speeds(&self, a: f64, b: f64, s: f64) -> f64 {
        (a + b) / (1.0 + a * b / (s * s))
    }
}

impl GyroGroup for Model {
    fn label(&self) -> &str {
        self.name()
    }

    fn add(&self, u: &BallVector, v: &BallVector) -> Result<BallVector> {
        Model::add(self, u, v)
    }

    fn coadd_closed_form(&self, u: &BallVector, v: &BallVector) -> Option<Result<BallVector>> {
        Some(self.coadd(u, v))
    }
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Model {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "mobius" | "möbius" | "m" => Ok(Model::Mobius),
            "einstein" | "e" => Ok(Model::Einstein),
            other => Err(format!(
                "unknown model '{other}' (expected mobius or einstein)"
            )),
        }
    }
}

/// Ordinary vector addition restricted to the ball; sums that leave the ball
/// are rejected with [`GyroError::OutOfBall`]. Used as a negative control for
/// the audit.
#[derive(Debug, Clone, Copy, Default)]
pub struct VectorAddition;

impl GyroGroup for VectorAddition {
    fn label(&self) -> &str {
        "vector-addition"
    }

    fn add(&self, u: &BallVector, v: &BallVector) -> Result<BallVector> {
        u.ensure_same_ball(v)?;
        u.sibling(
            u.coords()
                .iter()
                .zip(v.coords())
                .map(|(a, b)| a + b)
                .collect(),
        )
    }
}

/// Gyration `gyr[a,b]z = ⊖(a⊕b) ⊕ (a⊕(b⊕z))`.
pub fn gyr<G: GyroGroup + ?Sized>(
    op: &G,
    a: &BallVector,
    b: &BallVector,
    z: &BallVector,
) -> Result<BallVector> {
    let ab = op.add(a, b)?;
    let abz = op.add(a, &op.add(b, z)?)?;
    op.add(&op.neg(&ab), &abz)
}

/// Probe scale for [`gyr_matrix`], relative to `s`.
pub const GYR_PROBE_SCALE: f64 = 1e-6;

fn probe_columns<G: GyroGroup + ?Sized>(
    op: &G,
    a: &BallVector,
    b: &BallVector,
    eps: f64,
) -> Result<DMatrix<f64>> {
    a.ensure_same_ball(b)?;
    let n = a.dim();
    let mut m = DMatrix::zeros(n, n);
    for i in 0..n {
        let mut e = vec![0.0; n];
        e[i] = eps;
        let image = gyr(op, a, b, &a.sibling(e)?)?;
        for (r, x) in image.coords().iter().enumerate() {
            m[(r, i)] = x / eps;
        }
    }
    Ok(m)
}

/// Matrix of the gyration `gyr[a,b]`, probed column by column at
/// `GYR_PROBE_SCALE * s`-scaled basis vectors.
pub fn gyr_matrix<G: GyroGroup + ?Sized>(
    op: &G,
    a: &BallVector,
    b: &BallVector,
) -> Result<DMatrix<f64>> {
    probe_columns(op, a, b, GYR_PROBE_SCALE * a.s())
}

/// Largest entrywise difference between the probed matrices at scales
/// `eps` and `2 eps`; zero for a linear gyration.
pub fn gyr_linearity_defect<G: GyroGroup + ?Sized>(
    op: &G,
    a: &BallVector,
    b: &BallVector,
) -> Result<f64> {
    let eps = GYR_PROBE_SCALE * a.s();
    let m1 = probe_columns(op, a, b, eps)?;
    let m2 = probe_columns(op, a, b, 2.0 * eps)?;
    Ok((m1 - m2).amax())
}

/// Cooperation from its definition, `a ⊞ b = a ⊕ gyr[a,⊖b]b`.
pub fn coadd<G: GyroGroup + ?Sized>(op: &G, a: &BallVector, b: &BallVector) -> Result<BallVector> {
    op.add(a, &gyr(op, a, &op.neg(b), b)?)
}

/// Cooperation, preferring the model's closed form when it has one.
fn cooperate<G: GyroGroup + ?Sized>(op: &G, a: &BallVector, b: &BallVector) -> Result<BallVector> {
    match op.coadd_closed_form(a, b) {
        Some(r) => r,
        None => coadd(op, a, b),
    }
}

/// Solves `a ⊕ x = b`: `x = ⊖a ⊕ b`.
pub fn solve_left<G: GyroGroup + ?Sized>(
    op: &G,
    a: &BallVector,
    b: &BallVector,
) -> Result<BallVector> {
    op.add(&op.neg(a), b)
}

/// Solves `y ⊕ a = b`: `y = b ⊟ a`.
pub fn solve_right<G: GyroGroup + ?Sized>(
    op: &G,
    a: &BallVector,
    b: &BallVector,
) -> Result<BallVector> {
    cooperate(op, b, &op.neg(a))
}

/// Solves `a ⊞ x = b`: `x = ⊖(⊖b ⊕ a)`.
pub fn solve_co_left<G: GyroGroup + ?Sized>(
    op: &G,
    a: &BallVector,
    b: &BallVector,
) -> Result<BallVector> {
    Ok(op.neg(&op.add(&op.neg(b), a)?))
}

/// Solves `y ⊞ a = b`: `y = b ⊖ a`.
pub fn solve_co_right<G: GyroGroup + ?Sized>(
    op: &G,
    a: &BallVector,
    b: &BallVector,
) -> Result<BallVector> {
    op.add(b, &op.neg(a))
}

/// Per-identity outcome of an audit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentityResult {
    pub name: String,
    pub samples: u64,
    pub max_residual: f64,
    pub pass: bool,
}

/// Result of a randomized axiom audit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AxiomReport {
    pub op: String,
    pub dim: usize,
    pub s: f64,
    pub seed: u64,
    pub identities: Vec<IdentityResult>,
}

impl AxiomReport {
    pub fn all_pass(&self) -> bool {
        self.identities.iter().all(|r| r.pass)
    }

    pub fn get(&self, name: &str) -> Option<&IdentityResult> {
        self.identities.iter().find(|r| r.name == name)
    }

    pub fn failures(&self) -> impl Iterator<Item = &IdentityResult> {
        self.identities.iter().filter(|r| !r.pass)
    }
}

/// Identities checked by [`audit`], in report order.
///
/// `closure` records results that left the ball; its residual is zero when
/// every operation stayed inside and `|x|/s >= 1` for the worst escape.
pub const IDENTITIES: [&str; 23] = [
    "closure",
    "G1_left_identity",
    "right_identity",
    "G2_left_inverse",
    "right_inverse",
    "G3_left_gyroassociative",
    "G4_gyroautomorphism",
    "G5_left_loop",
    "G6_gyrocommutative",
    "left_bol",
    "gyration_inversion",
    "right_loop",
    "nested_gyration",
    "gyration_isometry",
    "duality_cooperation",
    "duality_operation",
    "cancellation_left",
    "cancellation_right",
    "cancellation_co_left",
    "cancellation_second_right",
    "automorphic_inverse",
    "cooperation_commutative",
    "co_loop_solutions_agree",
];

const N_ID: usize = IDENTITIES.len();

/// How the audit walks its samples.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    Sequential,
    /// Uses rayon when the `parallel` feature is enabled, otherwise runs
    /// sequentially.
    #[default]
    Parallel,
}

/// Default sampling cap of the audit, as a fraction of `s`. Loop identities
/// nest four sums, whose rounding grows like `γ²` of the result; at this cap
/// their residuals stay near `1e-11`.
pub const AUDIT_NORM_CAP: f64 = 0.8;

/// Parameters of an audit run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AuditConfig {
    pub params: BallParams,
    pub samples: u64,
    pub seed: u64,
    pub tol: Tolerance,
    /// Cap on sampled norms, as a fraction of `s`.
    pub norm_cap: f64,
    /// Fraction of samples drawn with `b` close to `⊖a`.
    pub near_degenerate_fraction: f64,
    /// Redraws allowed after an operation leaves the ball.
    pub max_attempts: u32,
    pub execution: Execution,
}

impl AuditConfig {
    pub fn new(params: BallParams, samples: u64, seed: u64) -> Self {
        Self {
            params,
            samples,
            seed,
            tol: Tolerance::default(),
            norm_cap: AUDIT_NORM_CAP,
            near_degenerate_fraction: 0.05,
            max_attempts: 64,
            execution: Execution::default(),
        }
    }

    pub fn with_tolerance(mut self, tol: Tolerance) -> Self {
        self.tol = tol;
        self
    }

    pub fn with_execution(mut self, execution: Execution) -> Self {
        self.execution = execution;
        self
    }
}

#[derive(Debug, Clone, Copy)]
struct Tally {
    residual: [f64; N_ID],
    count: [u64; N_ID],
}

impl Tally {
    fn empty() -> Self {
        Self {
            residual: [0.0; N_ID],
            count: [0; N_ID],
        }
    }

    fn merge(mut self, other: Tally) -> Tally {
        for i in 0..N_ID {
            self.residual[i] = worst(self.residual[i], other.residual[i]);
            self.count[i] += other.count[i];
        }
        self
    }
}

#[inline]
fn worst(a: f64, b: f64) -> f64 {
    if a.is_nan() || b.is_nan() {
        f64::INFINITY
    } else {
        a.max(b)
    }
}

struct Sample {
    a: BallVector,
    b: BallVector,
    z: BallVector,
    c: BallVector,
    d: BallVector,
}

fn draw_sample(cfg: &AuditConfig, index: u64, attempt: u32) -> Sample {
    let mut rng = SampleRng::with_attempt(cfg.seed, index, u64::from(attempt));
    let p = cfg.params;
    // redraws after an escape shrink the sampling radius
    let cap = cfg.norm_cap / f64::from(1 + attempt);
    let a = rng.ball_vector(p, cap);
    let near_degenerate = {
        let period = (1.0 / cfg.near_degenerate_fraction.max(1e-12)).round() as u64;
        cfg.near_degenerate_fraction > 0.0 && index % period.max(1) == period.max(1) - 1
    };
    let b = if near_degenerate {
        // b = -a + small perturbation, so that a ⊕ b sits near the origin
        let jitter = rng.ball_vector(p, 1e-3);
        let coords: Vec<f64> = a
            .coords()
            .iter()
            .zip(jitter.coords())
            .map(|(x, j)| j - x)
            .collect();
        BallVector::new(coords, p).unwrap_or_else(|_| a.negated())
    } else {
        rng.ball_vector(p, cap)
    };
    let z = rng.ball_vector(p, cap);
    let c = rng.ball_vector(p, cap);
    let d = rng.ball_vector(p, cap);
    Sample { a, b, z, c, d }
}

fn identity_residuals<G: GyroGroup + ?Sized>(op: &G, x: &Sample) -> Result<[f64; N_ID]> {
    let Sample { a, b, z, c, d } = x;
    let s = a.s();
    let diff = |u: &BallVector, v: &BallVector| u.euclidean_distance(v) / s;
    let add = |u: &BallVector, v: &BallVector| op.add(u, v);
    let neg = |u: &BallVector| op.neg(u);
    let g = |p: &BallVector, q: &BallVector, w: &BallVector| gyr(op, p, q, w);
    let co = |u: &BallVector, v: &BallVector| cooperate(op, u, v);
    let zero = op.zero(a.params());

    let mut r = [0.0; N_ID];
    // closure is accounted for by the caller
    r[1] = diff(&add(&zero, a)?, a);
    r[2] = diff(&add(a, &zero)?, a);
    r[3] = diff(&add(&neg(a), a)?, &zero);
    r[4] = diff(&add(a, &neg(a))?, &zero);

    let ab = add(a, b)?;
    let gab_z = g(a, b, z)?;
    r[5] = diff(&add(a, &add(b, z)?)?, &add(&ab, &gab_z)?);

    let cd = add(c, d)?;
    r[6] = diff(&g(a, b, &cd)?, &add(&g(a, b, c)?, &g(a, b, d)?)?);

    r[7] = diff(&gab_z, &g(&ab, b, z)?);

    let ba = add(b, a)?;
    r[8] = diff(&ab, &g(a, b, &ba)?);

    let bol_lhs = add(a, &add(b, &add(a, z)?)?)?;
    let bol_rhs = add(&add(a, &ba)?, z)?;
    r[9] = diff(&bol_lhs, &bol_rhs);

    r[10] = diff(&g(b, a, &gab_z)?, z);
    r[11] = diff(&gab_z, &g(a, &ba, z)?);

    let gab_b = g(a, b, b)?;
    r[12] = diff(&gab_z, &g(&neg(&gab_b), a, z)?);

    let gab_c = g(a, b, c)?;
    let isometry_norm = (gab_z.norm() - z.norm()).abs() / s;
    let isometry_dot = (gab_z.dot(&gab_c) - z.dot(c)).abs() / (s * s);
    r[13] = isometry_norm.max(isometry_dot);

    let definitional = add(a, &g(a, &neg(b), b)?)?;
    let coab = co(a, b)?;
    r[14] = diff(&coab, &definitional);
    r[15] = diff(&ab, &co(a, &gab_b)?);

    // a ⊕ (⊖a ⊕ b) = b
    r[16] = diff(&add(a, &add(&neg(a), b)?)?, b);
    // (b ⊟ a) ⊕ a = b
    r[17] = diff(&add(&co(b, &neg(a))?, a)?, b);
    // a ⊟ (⊖b ⊕ a) = b
    r[18] = diff(&co(a, &neg(&add(&neg(b), a)?))?, b);
    // (b ⊖ a) ⊞ a = b
    r[19] = diff(&co(&add(b, &neg(a))?, a)?, b);

    r[20] = diff(&neg(&ab), &add(&neg(a), &neg(b))?);
    r[21] = diff(&coab, &co(b, a)?);

    let x_left = solve_co_left(op, a, b)?;
    let y_right = solve_co_right(op, a, b)?;
    r[22] = diff(&x_left, &y_right);
    Ok(r)
}

fn evaluate<G: GyroGroup + ?Sized>(op: &G, cfg: &AuditConfig, index: u64) -> Tally {
    let mut t = Tally::empty();
    for attempt in 0..cfg.max_attempts.max(1) {
        let sample = draw_sample(cfg, index, attempt);
        t.count[0] += 1;
        match identity_residuals(op, &sample) {
            Ok(r) => {
                for ((acc, count), x) in t.residual.iter_mut().zip(&mut t.count).zip(r).skip(1) {
                    *acc = worst(*acc, x);
                    *count += 1;
                }
                return t;
            }
            Err(GyroError::OutOfBall { norm, s }) => {
                t.residual[0] = worst(t.residual[0], (norm / s).max(1.0));
            }
            Err(_) => {
                t.residual = [f64::INFINITY; N_ID];
                return t;
            }
        }
    }
    t
}

fn run_tallies<G: GyroGroup + ?Sized>(op: &G, cfg: &AuditConfig) -> Tally {
    match cfg.execution {
        Execution::Sequential => (0..cfg.samples)
            .map(|i| evaluate(op, cfg, i))
            .fold(Tally::empty(), Tally::merge),
        Execution::Parallel => parallel_tallies(op, cfg),
    }
}

#[cfg(feature = "parallel")]
fn parallel_tallies<G: GyroGroup + ?Sized>(op: &G, cfg: &AuditConfig) -> Tally {
    use rayon::prelude::*;
    (0..cfg.samples)
        .into_par_iter()
        .map(|i| evaluate(op, cfg, i))
        .reduce(Tally::empty, Tally::merge)
}

#[cfg(not(feature = "parallel"))]
fn parallel_tallies<G: GyroGroup + ?Sized>(op: &G, cfg: &AuditConfig) -> Tally {
    (0..cfg.samples)
        .map(|i| evaluate(op, cfg, i))
        .fold(Tally::empty(), Tally::merge)
}

/// Evaluates every identity in [`IDENTITIES`] on `cfg.samples` seeded random
/// samples and reports the worst residual of each.
///
/// Residuals are Euclidean distances divided by `s`; an identity passes when
/// its worst residual is within `tol.bound(1.0)`. A sample whose evaluation
/// leaves the ball is redrawn (up to `max_attempts` times, each redraw at a
/// smaller sampling radius) and the escape is recorded under `closure`. Sequential and parallel runs give identical
/// reports.
pub fn audit<G: GyroGroup + ?Sized>(op: &G, cfg: &AuditConfig) -> AxiomReport {
    let tally = run_tallies(op, cfg);
    let bound = cfg.tol.bound(1.0);
    let identities = IDENTITIES
        .iter()
        .enumerate()
        .map(|(i, name)| {
            let evaluated = tally.count[i];
            let max_residual = tally.residual[i];
            IdentityResult {
                name: (*name).to_string(),
                samples: evaluated,
                max_residual,
                pass: max_residual <= bound && (evaluated > 0 || cfg.samples == 0),
            }
        })
        .collect();
    AxiomReport {
        op: op.label().to_string(),
        dim: cfg.params.dim(),
        s: cfg.params.s(),
        seed: cfg.seed,
        identities,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mobius::{mob_gyr_disc, DiscComplex};

    fn bv(c: &[f64], s: f64) -> BallVector {
        BallVector::new(c.to_vec(), BallParams::new(s, c.len()).unwrap()).unwrap()
    }

    fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
        a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
    }

    fn samples(dim: usize, s: f64, seed: u64, n: u64) -> Vec<(BallVector, BallVector, BallVector)> {
        let p = BallParams::new(s, dim).unwrap();
        (0..n)
            .map(|i| {
                let mut rng = SampleRng::new(seed, i);
                (
                    rng.ball_vector(p, AUDIT_NORM_CAP),
                    rng.ball_vector(p, AUDIT_NORM_CAP),
                    rng.ball_vector(p, AUDIT_NORM_CAP),
                )
            })
            .collect()
    }

    #[test]
    fn gyration_with_identity_is_trivial() {
        for model in Model::ALL {
            let a = bv(&[0.3, -0.5, 0.2], 1.0);
            let z = bv(&[0.1, 0.1, 0.7], 1.0);
            let zero = BallVector::zero(a.params());
            assert!(close(
                gyr(&model, &a, &zero, &z).unwrap().coords(),
                z.coords(),
                1e-15
            ));
        }
    }

    #[test]
    fn disc_gyration_matches_closed_form() {
        let a = bv(&[0.5, 0.0], 1.0);
        let b = bv(&[0.0, 0.3], 1.0);
        let z = bv(&[0.1, 0.1], 1.0);
        let g = mob_gyr_disc(
            DiscComplex::new(0.5, 0.0).unwrap(),
            DiscComplex::new(0.0, 0.3).unwrap(),
        );
        let rotated = g.rotate(&DiscComplex::new(0.1, 0.1).unwrap());
        let generic = gyr(&Model::Mobius, &a, &b, &z).unwrap();
        assert!(close(
            generic.coords(),
            &[rotated.re(), rotated.im()],
            1e-15
        ));

        // equal arguments give the trivial disc gyration
        let generic = gyr(&Model::Mobius, &a, &a, &z).unwrap();
        assert!(close(generic.coords(), z.coords(), 1e-14));

        for (a, b, z) in samples(2, 1.0, 31, 200) {
            let da = DiscComplex::from_ball(&a).unwrap();
            let db = DiscComplex::from_ball(&b).unwrap();
            let dz = DiscComplex::from_ball(&z).unwrap();
            let rotated = mob_gyr_disc(da, db).rotate(&dz);
            let generic = gyr(&Model::Mobius, &a, &b, &z).unwrap();
            assert!(close(
                generic.coords(),
                &[rotated.re(), rotated.im()],
                1e-13
            ));
        }
    }

    #[test]
    fn gyration_matrix_identity_and_disc_rotation() {
        let a = bv(&[0.4, 0.2, -0.1], 1.0);
        let zero = BallVector::zero(a.params());
        let m = gyr_matrix(&Model::Einstein, &a, &zero).unwrap();
        assert!((m - DMatrix::<f64>::identity(3, 3)).amax() < 1e-9);

        let a = bv(&[0.5, 0.0], 1.0);
        let b = bv(&[0.0, 0.3], 1.0);
        let theta = mob_gyr_disc(
            DiscComplex::from_ball(&a).unwrap(),
            DiscComplex::from_ball(&b).unwrap(),
        )
        .angle();
        let m = gyr_matrix(&Model::Mobius, &a, &b).unwrap();
        let rot =
            DMatrix::from_row_slice(2, 2, &[theta.cos(), -theta.sin(), theta.sin(), theta.cos()]);
        assert!((m - rot).amax() < 1e-6);
    }

    #[test]
    fn gyration_matrices_are_rotations() {
        for model in Model::ALL {
            for (a, b, _) in samples(3, 2.0, 32, 100) {
                let m = gyr_matrix(&model, &a, &b).unwrap();
                let defect = (m.transpose() * &m - DMatrix::<f64>::identity(3, 3)).amax();
                assert!(defect <= 1e-6, "{model}: orthogonality defect {defect}");
                assert!((m.determinant() - 1.0).abs() <= 1e-6);
                assert!(gyr_linearity_defect(&model, &a, &b).unwrap() <= 1e-6);
            }
        }
    }

    #[test]
    fn gyration_is_linear_for_small_arguments() {
        for model in Model::ALL {
            for (a, b, z) in samples(4, 1.0, 33, 50) {
                let small = scalar_mul(1e-3, &z).unwrap();
                let alpha = 0.37;
                let scaled = a
                    .sibling(small.coords().iter().map(|x| alpha * x).collect())
                    .unwrap();
                let lhs = gyr(&model, &a, &b, &scaled).unwrap();
                let rhs: Vec<f64> = gyr(&model, &a, &b, &small)
                    .unwrap()
                    .coords()
                    .iter()
                    .map(|x| alpha * x)
                    .collect();
                assert!(close(lhs.coords(), &rhs, 1e-13));
            }
        }
    }

    #[test]
    fn definitional_cooperation_matches_closed_forms() {
        let a = bv(&[0.2, 0.3], 1.0);
        let zero = BallVector::zero(a.params());
        for model in Model::ALL {
            assert!(close(
                coadd(&model, &a, &zero).unwrap().coords(),
                a.coords(),
                1e-15
            ));
            for (a, b, _) in samples(3, 1.3, 34, 200) {
                let generic = coadd(&model, &a, &b).unwrap();
                let closed = model.coadd(&a, &b).unwrap();
                assert!(close(generic.coords(), closed.coords(), 1e-12), "{model}");
            }
        }
    }

    #[test]
    fn loop_equation_solutions() {
        for model in Model::ALL {
            let a = bv(&[0.1, 0.5, -0.2], 1.0);
            assert!(solve_left(&model, &a, &a).unwrap().norm() < 1e-15);
            assert!(solve_right(&model, &a, &a).unwrap().norm() < 1e-15);
            assert!(solve_co_left(&model, &a, &a).unwrap().norm() < 1e-15);
            assert!(solve_co_right(&model, &a, &a).unwrap().norm() < 1e-15);

            for (a, b, _) in samples(3, 1.0, 35, 200) {
                let x = solve_left(&model, &a, &b).unwrap();
                assert!(model.add(&a, &x).unwrap().euclidean_distance(&b) <= 1e-12);
                let y = solve_right(&model, &a, &b).unwrap();
                assert!(model.add(&y, &a).unwrap().euclidean_distance(&b) <= 1e-12);
                let xc = solve_co_left(&model, &a, &b).unwrap();
                assert!(model.coadd(&a, &xc).unwrap().euclidean_distance(&b) <= 1e-12);
                let yc = solve_co_right(&model, &a, &b).unwrap();
                assert!(model.coadd(&yc, &a).unwrap().euclidean_distance(&b) <= 1e-12);
                assert!(xc.euclidean_distance(&yc) <= 1e-12);
            }
        }
    }

    #[test]
    fn left_solution_is_unique_under_perturbation() {
        let model = Model::Mobius;
        for (a, b, z) in samples(3, 1.0, 36, 50) {
            let x = solve_left(&model, &a, &b).unwrap();
            let dir = z.coords().iter().map(|c| c / z.norm()).collect::<Vec<_>>();
            let mut last = 0.0;
            for k in 1..=3 {
                let h = 1e-6 * f64::from(k);
                let xp = x
                    .sibling(
                        x.coords()
                            .iter()
                            .zip(&dir)
                            .map(|(c, d)| c + h * d)
                            .collect(),
                    )
                    .unwrap();
                let residual = model.add(&a, &xp).unwrap().euclidean_distance(&b);
                assert!(residual > last);
                assert!(residual > 1e-2 * h);
                last = residual;
            }
        }
    }

    #[test]
    fn model_parsing() {
        assert_eq!("Mobius".parse::<Model>().unwrap(), Model::Mobius);
        assert_eq!("einstein".parse::<Model>().unwrap(), Model::Einstein);
        assert!("klein".parse::<Model>().is_err());
    }

    #[test]
    fn audit_examples() {
        for model in Model::ALL {
            let cfg = AuditConfig::new(BallParams::unit(3).unwrap(), 300, 42);
            let report = audit(&model, &cfg);
            assert!(
                report.all_pass(),
                "{model}: {:?}",
                report.failures().collect::<Vec<_>>()
            );
            assert_eq!(report.identities.len(), IDENTITIES.len());
            assert_eq!(report.get("closure").unwrap().max_residual, 0.0);
        }
    }

    #[test]
    fn audit_negative_control_reports_closure() {
        let cfg = AuditConfig::new(BallParams::unit(3).unwrap(), 200, 42);
        let report = audit(&VectorAddition, &cfg);
        assert!(!report.all_pass());
        let closure = report.get("closure").unwrap();
        assert!(!closure.pass);
        assert!(closure.max_residual >= 1.0);
        // gyrations of an associative operation are trivial
        assert!(report.get("G3_left_gyroassociative").unwrap().pass);
        assert!(report.get("G5_left_loop").unwrap().pass);
    }

    #[test]
    fn sequential_and_parallel_audits_agree() {
        let cfg = AuditConfig::new(BallParams::new(2.0, 2).unwrap(), 120, 7);
        let seq = audit(&Model::Einstein, &cfg.with_execution(Execution::Sequential));
        let par = audit(&Model::Einstein, &cfg.with_execution(Execution::Parallel));
        assert_eq!(seq, par);
        let nc_seq = audit(&VectorAddition, &cfg.with_execution(Execution::Sequential));
        let nc_par = audit(&VectorAddition, &cfg.with_execution(Execution::Parallel));
        assert_eq!(nc_seq, nc_par);
    }

    #[test]
    fn report_serializes_to_documented_schema() {
        let cfg = AuditConfig::new(BallParams::unit(2).unwrap(), 5, 1);
        let report = audit(&Model::Mobius, &cfg);
        let v: serde_json::Value = serde_json::to_value(&report).unwrap();
        assert_eq!(v["op"], "mobius");
        assert_eq!(v["dim"], 2);
        assert_eq!(v["s"], 1.0);
        assert_eq!(v["seed"], 1);
        let first = &v["identities"][0];
        for key in ["name", "samples", "max_residual", "pass"] {
            assert!(first.get(key).is_some(), "missing {key}");
        }
    }
}
