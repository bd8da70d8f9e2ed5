//! Gyrogroup and gyrovector space algebra in the Möbius and Einstein models of
//! the open `s`-ball, with hyperbolic geometry, relativistic mass and qubit
//! fidelity built on top.
//!
//! Every vector is a [`BallVector`], which can only be constructed strictly
//! inside its ball. Operations return [`Result`] and fail with [`GyroError`]
//! instead of producing points on or outside the boundary.

// NaN-rejecting checks are written as negated comparisons
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod ball;
pub mod einstein;
pub mod error;
pub mod geometry;
pub mod gyro;
pub mod mobius;
pub mod qic;
pub mod relativity;
pub mod sampling;

pub use ball::{gamma, BallParams, BallVector, Tolerance};
pub use error::{GyroError, Result};
pub use gyro::{
    audit, gyr, AuditConfig, AxiomReport, Execution, GyroGroup, IdentityResult, Model,
    VectorAddition,
};
