//! Computational geometry of three-dimensional Killing submersions.
//!
//! The crate evaluates the canonical metrics
//! `λ²(dx² + dy²) + (dz − λ(a dx + b dy))²` on `Ω × ℝ`: their orthonormal
//! frame, Levi-Civita connection, curvature and Ricci tensors. On top of
//! that it analyses immersed surfaces (shape operator, mean curvature,
//! angle with the vertical Killing field) and evaluates the residual
//! systems that characterise biharmonic constant mean curvature surfaces
//! and biharmonic Hopf cylinders.
//!
//! Module map:
//! - [`expr`]: expression parser and second-order jets,
//! - [`geometry`]: canonical models, connection, curvature, Ricci,
//! - [`surface`]: immersed surfaces and their Gauss–Codazzi identities,
//! - [`biharmonic`]: bitension residuals and branch classification,
//! - [`hopf`]: base curves, Hopf cylinders and the warped-product example,
//! - [`verify`]: the numerical verification suite.

pub mod biharmonic;
pub mod config;
mod error;
pub mod expr;
pub mod fd;
pub mod geometry;
pub mod hopf;
pub mod linalg;
pub mod quad;
pub mod roots;
pub mod surface;
pub mod verify;

pub use error::{Error, Result};
