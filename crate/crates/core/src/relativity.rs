//! Invariant mass of particle systems and stellar aberration, both in the
//! Einstein ball.

use serde::{Deserialize, Serialize};

use crate::ball::{gamma, BallParams, BallVector};
use crate::einstein::ein_add;
use crate::error::{GyroError, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Particle {
    mass: f64,
    velocity: BallVector,
}

impl Particle {
    pub fn new(mass: f64, velocity: BallVector) -> Result<Self> {
        if !(mass.is_finite() && mass >= 0.0) {
            return Err(GyroError::InvalidParams(format!(
                "particle mass must be finite and nonnegative, got {mass}"
            )));
        }
        Ok(Self { mass, velocity })
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn velocity(&self) -> &BallVector {
        &self.velocity
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct RawParticle {
    m: f64,
    v: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct RawSystem {
    s: f64,
    particles: Vec<RawParticle>,
}

/// A nonempty collection of particles sharing one ball.
///
/// Serializes as `{"s": .., "particles": [{"m": .., "v": [..]}, ..]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSystem", into = "RawSystem")]
pub struct ParticleSystem {
    params: BallParams,
    particles: Vec<Particle>,
}

impl TryFrom<RawSystem> for ParticleSystem {
    type Error = GyroError;

    fn try_from(raw: RawSystem) -> Result<Self> {
        let dim =
            raw.particles.first().map(|p| p.v.len()).ok_or_else(|| {
                GyroError::InvalidParams("a particle system needs a particle".into())
            })?;
        let params = BallParams::new(raw.s, dim)?;
        let particles = raw
            .particles
            .into_iter()
            .map(|p| Particle::new(p.m, BallVector::new(p.v, params)?))
            .collect::<Result<Vec<_>>>()?;
        Self::new(particles)
    }
}

impl From<ParticleSystem> for RawSystem {
    fn from(sys: ParticleSystem) -> Self {
        RawSystem {
            s: sys.params.s(),
            particles: sys
                .particles
                .into_iter()
                .map(|p| RawParticle {
                    m: p.mass,
                    v: p.velocity.into_coords(),
                })
                .collect(),
        }
    }
}

impl ParticleSystem {
    pub fn new(particles: Vec<Particle>) -> Result<Self> {
        let first = particles
            .first()
            .ok_or_else(|| GyroError::InvalidParams("a particle system needs a particle".into()))?;
        let params = first.velocity.params();
        for p in &particles[1..] {
            first.velocity.ensure_same_ball(&p.velocity)?;
        }
        Ok(Self { params, particles })
    }

    pub fn particles(&self) -> &[Particle] {
        &self.particles
    }

    pub fn params(&self) -> BallParams {
        self.params
    }

    pub fn total_rest_mass(&self) -> f64 {
        neumaier_sum(self.particles.iter().map(|p| p.mass))
    }
}

/// Compensated sum, insensitive to the order of magnitudes of the terms.
fn neumaier_sum(terms: impl IntoIterator<Item = f64>) -> f64 {
    let (mut sum, mut comp) = (0.0f64, 0.0f64);
    for x in terms {
        let t = sum + x;
        comp += if sum.abs() >= x.abs() {
            (sum - t) + x
        } else {
            (x - t) + sum
        };
        sum = t;
    }
    sum + comp
}

/// `Σ_{j<k} m_j m_k (γ(⊖v_j ⊕ v_k) − 1)`, over pairs in lexicographic order.
fn pair_excess(sys: &ParticleSystem) -> Result<f64> {
    let ps = &sys.particles;
    let mut terms = Vec::with_capacity(ps.len() * ps.len().saturating_sub(1) / 2);
    for (j, pj) in ps.iter().enumerate() {
        let neg = pj.velocity.negated();
        for pk in &ps[j + 1..] {
            // γ − 1 through γ_j γ_k (1 − v_j.v_k/s²) − 1 loses digits for
            // nearly equal velocities, so use the relative velocity's norm
            let rel = ein_add(&neg, &pk.velocity)?;
            terms.push(pj.mass * pk.mass * gamma_minus_one(&rel));
        }
    }
    Ok(neumaier_sum(terms))
}

/// `γ(v) − 1 = (‖v‖²/s²) / (√(1 − ‖v‖²/s²) (1 + √(1 − ‖v‖²/s²)))`,
/// accurate for small velocities.
fn gamma_minus_one(v: &BallVector) -> f64 {
    let r = v.norm() / v.s();
    let root = ((1.0 - r) * (1.0 + r)).sqrt();
    r * r / (root * (1.0 + root))
}

/// Invariant mass `m0 = √(M² + 2 Σ_{j<k} m_j m_k (γ(⊖v_j ⊕ v_k) − 1))`
/// with `M` the total rest mass. Satisfies `m0 >= M` exactly.
pub fn invariant_mass(sys: &ParticleSystem) -> Result<f64> {
    let m = sys.total_rest_mass();
    Ok(m + fictitious_from(m, pair_excess(sys)?))
}

/// `m0 − M`, computed as `2E / (m0 + M)` to avoid cancellation.
pub fn fictitious_mass(sys: &ParticleSystem) -> Result<f64> {
    let m = sys.total_rest_mass();
    Ok(fictitious_from(m, pair_excess(sys)?))
}

fn fictitious_from(m: f64, excess: f64) -> f64 {
    let two_e = 2.0 * excess.max(0.0);
    if two_e == 0.0 {
        return 0.0;
    }
    let m0 = (m * m + two_e).sqrt();
    two_e / (m0 + m)
}

/// Lorentz factor of each particle in order.
pub fn gammas(sys: &ParticleSystem) -> Vec<f64> {
    sys.particles.iter().map(|p| gamma(&p.velocity)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AberrationMode {
    /// Galilean difference `u − v_obs`.
    Classical,
    /// Einstein relative velocity `⊖v_obs ⊕ u`.
    Relativistic,
}

impl std::str::FromStr for AberrationMode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "classical" | "galilean" => Ok(AberrationMode::Classical),
            "relativistic" | "einstein" => Ok(AberrationMode::Relativistic),
            other => Err(format!(
                "unknown aberration mode '{other}' (expected classical or relativistic)"
            )),
        }
    }
}

/// Apparent motion of a source seen from a moving observer.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Aberration {
    pub mode: AberrationMode,
    /// Apparent velocity; may leave the ball in classical mode.
    pub velocity: Vec<f64>,
    /// Unit direction of the apparent velocity, zeros for zero speed.
    pub direction: Vec<f64>,
    pub speed: f64,
    /// Set when the apparent speed reaches or exceeds `s`.
    pub exceeds_s: bool,
}

/// Apparent velocity of `u` for an observer moving with `v_obs`.
pub fn aberrate(u: &BallVector, v_obs: &BallVector, mode: AberrationMode) -> Result<Aberration> {
    u.ensure_same_ball(v_obs)?;
    let velocity: Vec<f64> = match mode {
        AberrationMode::Classical => u
            .coords()
            .iter()
            .zip(v_obs.coords())
            .map(|(a, b)| a - b)
            .collect(),
        AberrationMode::Relativistic => ein_add(&v_obs.negated(), u)?.into_coords(),
    };
    let speed = velocity.iter().map(|x| x * x).sum::<f64>().sqrt();
    let direction = if speed > 0.0 {
        velocity.iter().map(|x| x / speed).collect()
    } else {
        vec![0.0; velocity.len()]
    };
    Ok(Aberration {
        mode,
        exceeds_s: speed >= u.s(),
        velocity,
        direction,
        speed,
    })
}

/// Angle between the classical and the relativistic apparent directions.
pub fn aberration_gap(u: &BallVector, v_obs: &BallVector) -> Result<f64> {
    let c = aberrate(u, v_obs, AberrationMode::Classical)?;
    let r = aberrate(u, v_obs, AberrationMode::Relativistic)?;
    if c.speed == 0.0 || r.speed == 0.0 {
        return Ok(0.0);
    }
    let chord2: f64 = c
        .direction
        .iter()
        .zip(&r.direction)
        .map(|(a, b)| (a - b).powi(2))
        .sum();
    // chord length gives the angle without acos cancellation near zero
    Ok(2.0 * (chord2.sqrt() / 2.0).min(1.0).asin())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::{SampleRng, DEFAULT_NORM_CAP};

    fn bv(c: &[f64], s: f64) -> BallVector {
        BallVector::new(c.to_vec(), BallParams::new(s, c.len()).unwrap()).unwrap()
    }

    fn system(s: f64, ps: &[(f64, &[f64])]) -> ParticleSystem {
        ParticleSystem::new(
            ps.iter()
                .map(|(m, v)| Particle::new(*m, bv(v, s)).unwrap())
                .collect(),
        )
        .unwrap()
    }

    fn random_system(seed: u64, i: u64, n: usize) -> ParticleSystem {
        let mut rng = SampleRng::new(seed, i);
        let p = BallParams::new(1.0, 3).unwrap();
        ParticleSystem::new(
            (0..n)
                .map(|_| {
                    let m = rng.uniform_in(0.1, 5.0);
                    Particle::new(m, rng.ball_vector(p, DEFAULT_NORM_CAP)).unwrap()
                })
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn two_body_example() {
        // γ(⊖v ⊕ −v) for v = 0.6 is 2.125, so m0² = 4 + 2(1.125) = 6.25
        let sys = system(1.0, &[(1.0, &[0.6, 0.0, 0.0]), (1.0, &[-0.6, 0.0, 0.0])]);
        assert!((invariant_mass(&sys).unwrap() - 2.5).abs() <= 1e-12);
        assert!((fictitious_mass(&sys).unwrap() - 0.5).abs() <= 1e-12);
    }

    #[test]
    fn rigid_systems_have_no_fictitious_mass() {
        let sys = system(
            2.0,
            &[(1.5, &[0.3, 0.2]), (0.7, &[0.3, 0.2]), (2.0, &[0.3, 0.2])],
        );
        assert!((invariant_mass(&sys).unwrap() - 4.2).abs() <= 1e-12);
        assert!(fictitious_mass(&sys).unwrap() <= 1e-15);
        let single = system(1.0, &[(3.0, &[0.9])]);
        assert_eq!(invariant_mass(&single).unwrap(), 3.0);
    }

    #[test]
    fn invariant_mass_dominates_rest_mass() {
        for i in 0..300 {
            let sys = random_system(61, i, 2 + (i % 5) as usize);
            let m0 = invariant_mass(&sys).unwrap();
            assert!(m0 >= sys.total_rest_mass());
        }
    }

    /// Oracle: the norm of the total four-momentum `(Σ m γ, Σ m γ v/s)`.
    #[test]
    fn matches_four_momentum_norm() {
        for i in 0..200 {
            let sys = random_system(62, i, 4);
            let s = sys.params().s();
            let mut e = 0.0;
            let mut p = [0.0; 3];
            for q in sys.particles() {
                let g = gamma(q.velocity());
                e += q.mass() * g;
                for (pk, x) in p.iter_mut().zip(q.velocity().coords()) {
                    *pk += q.mass() * g * x / s;
                }
            }
            let oracle = (e * e - p.iter().map(|x| x * x).sum::<f64>()).sqrt();
            let m0 = invariant_mass(&sys).unwrap();
            assert!((m0 - oracle).abs() <= 1e-9 * oracle);
        }
    }

    #[test]
    fn invariant_under_boosts() {
        let sys = random_system(63, 0, 5);
        let m0 = invariant_mass(&sys).unwrap();
        let boost = bv(&[0.2, -0.5, 0.4], 1.0);
        // the left gyrotranslation is an Einstein boost of every velocity
        let boosted = ParticleSystem::new(
            sys.particles()
                .iter()
                .map(|p| Particle::new(p.mass(), ein_add(&boost, p.velocity()).unwrap()).unwrap())
                .collect(),
        )
        .unwrap();
        assert!((invariant_mass(&boosted).unwrap() - m0).abs() <= 1e-9 * m0);
    }

    #[test]
    fn slow_systems_keep_precision() {
        let sys = system(1.0, &[(1.0, &[1e-9, 0.0]), (1.0, &[-1e-9, 0.0])]);
        // γ(2e-9) − 1 = 2e-18 to leading order, so m0 − M = 2(2e-18)/4
        let f = fictitious_mass(&sys).unwrap();
        assert!((f - 1e-18).abs() <= 1e-27, "{f}");
    }

    #[test]
    fn serde_roundtrip_and_validation() {
        let json = r#"{"s":1.0,"particles":[{"m":1.0,"v":[0.6,0.0]},{"m":2.0,"v":[0.0,-0.3]}]}"#;
        let sys: ParticleSystem = serde_json::from_str(json).unwrap();
        assert_eq!(sys.particles().len(), 2);
        assert_eq!(serde_json::to_string(&sys).unwrap(), json);
        for bad in [
            r#"{"s":1.0,"particles":[]}"#,
            r#"{"s":1.0,"particles":[{"m":1.0,"v":[1.5,0.0]}]}"#,
            r#"{"s":1.0,"particles":[{"m":-1.0,"v":[0.5,0.0]}]}"#,
            r#"{"s":1.0,"particles":[{"m":1.0,"v":[0.5,0.0]},{"m":1.0,"v":[0.5]}]}"#,
            r#"{"s":-1.0,"particles":[{"m":1.0,"v":[0.5]}]}"#,
        ] {
            assert!(
                serde_json::from_str::<ParticleSystem>(bad).is_err(),
                "{bad}"
            );
        }
    }

    #[test]
    fn aberration_examples() {
        let u = bv(&[0.0, 0.5], 1.0);
        let zero = BallVector::zero(u.params());
        for mode in [AberrationMode::Classical, AberrationMode::Relativistic] {
            let a = aberrate(&u, &zero, mode).unwrap();
            assert!((a.speed - 0.5).abs() < 1e-16);
            assert_eq!(a.direction, vec![0.0, 1.0]);
        }
        let same = aberrate(&u, &u, AberrationMode::Relativistic).unwrap();
        assert!(same.speed < 1e-15);
        let same = aberrate(&u, &u, AberrationMode::Classical).unwrap();
        assert_eq!(same.speed, 0.0);
        assert_eq!(same.direction, vec![0.0, 0.0]);

        // classical differences escape the ball, relativistic ones do not
        let v = bv(&[-0.9, 0.0], 1.0);
        let w = bv(&[0.9, 0.0], 1.0);
        let c = aberrate(&w, &v, AberrationMode::Classical).unwrap();
        let r = aberrate(&w, &v, AberrationMode::Relativistic).unwrap();
        assert!(c.exceeds_s);
        assert!(!r.exceeds_s && r.speed < 1.0);
        assert!((r.speed - 1.8 / 1.81).abs() < 1e-15);
    }

    #[test]
    fn aberration_modes_agree_as_s_grows() {
        let mut last = None;
        for s in [10.0, 100.0, 1000.0] {
            let u = bv(&[1.0, 0.0], s);
            let v = bv(&[0.0, 1.0], s);
            let gap = aberration_gap(&u, &v).unwrap();
            assert!(gap > 0.0);
            if let Some(prev) = last {
                let ratio: f64 = prev / gap;
                assert!((50.0..=200.0).contains(&ratio), "{ratio}");
            }
            last = Some(gap);
        }
    }
}
