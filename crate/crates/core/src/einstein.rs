//! Einstein velocity addition in the s-ball and its bridge to the Möbius model.

use crate::ball::{gamma, lincomb, BallVector};
use crate::error::Result;
use crate::mobius::{mob_add, scalar_mul};

/// Einstein addition
/// `(1/(1 + u.v/s^2)) * (u + v/g_u + (1/s^2) (g_u/(1 + g_u)) (u.v) u)`.
pub fn ein_add(u: &BallVector, v: &BallVector) -> Result<BallVector> {
    u.ensure_same_ball(v)?;
    let s2 = u.s() * u.s();
    let gu = gamma(u);
    let uv = u.dot(v);
    let den = 1.0 + uv / s2;
    debug_assert!(den > 0.0);
    let cu = (1.0 + (gu / (1.0 + gu)) * uv / s2) / den;
    let cv = 1.0 / (gu * den);
    u.sibling(lincomb(cu, u.coords(), cv, v.coords()))
}

/// Gamma of an Einstein sum through `g_u g_v (1 + u.v/s^2)`.
pub fn ein_gamma_of_sum(u: &BallVector, v: &BallVector) -> Result<f64> {
    u.ensure_same_ball(v)?;
    let g = gamma(u) * gamma(v) * (1.0 + u.dot(v) / (u.s() * u.s()));
    Ok(g.max(1.0))
}

/// Einstein half `(g_v/(1 + g_v)) v`, equal to `0.5 ⊗ v`.
pub fn ein_half(v: &BallVector) -> BallVector {
    let g = gamma(v);
    let k = g / (1.0 + g);
    v.sibling(v.coords().iter().map(|x| k * x).collect())
        .expect("halving shrinks the norm")
}

/// Einstein coaddition `2 ⊗ (g_u u + g_v v)/(g_u + g_v)`.
pub fn ein_coadd(u: &BallVector, v: &BallVector) -> Result<BallVector> {
    u.ensure_same_ball(v)?;
    let gu = gamma(u);
    let gv = gamma(v);
    let den = gu + gv;
    // convex combination of two ball points, still inside
    let mid = u.sibling(lincomb(gu / den, u.coords(), gv / den, v.coords()))?;
    scalar_mul(2.0, &mid)
}

/// Isomorphism from the Möbius to the Einstein gyrovector space: `v -> 2 ⊗ v`.
pub fn mobius_to_einstein(v: &BallVector) -> Result<BallVector> {
    scalar_mul(2.0, v)
}

/// Inverse isomorphism, the Einstein half.
pub fn einstein_to_mobius(v: &BallVector) -> BallVector {
    ein_half(v)
}

/// Einstein addition evaluated through the Möbius model,
/// `u ⊕_E v = 2 ⊗ (½ ⊗ u ⊕_M ½ ⊗ v)`.
pub fn ein_add_via_mobius(u: &BallVector, v: &BallVector) -> Result<BallVector> {
    u.ensure_same_ball(v)?;
    mobius_to_einstein(&mob_add(&einstein_to_mobius(u), &einstein_to_mobius(v))?)
}

/// Möbius addition evaluated through the Einstein model,
/// `u ⊕_M v = ½ ⊗ (2 ⊗ u ⊕_E 2 ⊗ v)`.
pub fn mob_add_via_einstein(u: &BallVector, v: &BallVector) -> Result<BallVector> {
    u.ensure_same_ball(v)?;
    Ok(einstein_to_mobius(&ein_add(
        &mobius_to_einstein(u)?,
        &mobius_to_einstein(v)?,
    )?))
}
