//! Symmetry analysis toolkit for the three-dimensional 2-Hessian equation
//! `S2[u] = f(x, y, z)`.
//!
//! The crate is layered: [`expr`] is a small exact computer-algebra kernel,
//! [`lie`] handles vector fields and the eight-dimensional algebra used for
//! the optimal system, [`jet`] computes prolongations and invariance
//! residuals, [`classify`] checks the group classification, [`flows`]
//! integrates one-parameter groups and transforms solutions, and [`report`]
//! assembles everything into verification suites.

pub mod expr;
pub mod lie;
pub mod jet;
pub mod classify;
pub mod flows;
pub mod report;
