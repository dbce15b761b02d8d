use thiserror::Error;

use crate::expr::ExprError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error("point ({x}, {y}) lies outside the domain")]
    OutsideDomain { x: f64, y: f64 },
    #[error("invalid domain: {0}")]
    InvalidDomain(String),
    #[error("conformal factor is not positive at ({x}, {y}): λ = {value}")]
    NonPositiveLambda { x: f64, y: f64, value: f64 },
    #[error("finite-difference stencil of half-width {needed:e} leaves the domain")]
    InsufficientMargin { needed: f64 },
    #[error("degenerate immersion: Gram determinant {det:e}")]
    DegenerateImmersion { det: f64 },
    #[error("angle function is singular: sin φ = {sin_phi:e}")]
    AngleSingular { sin_phi: f64 },
    #[error("surface is not CMC near the probe point: deviation {deviation:e} > {tol:e}")]
    NotCmc { deviation: f64, tol: f64 },
    #[error("|grad r| = {norm:e} vanishes; use the constant-r system")]
    ZeroGradR { norm: f64 },
    #[error("G − 4r² = {value:e} vanishes while |grad r| = {grad_norm:e}: no proper biharmonic surface")]
    G4r2Degenerate { value: f64, grad_norm: f64 },
    #[error("curve is degenerate: squared speed {speed_sq:e} at parameter {t}")]
    DegenerateCurve { t: f64, speed_sq: f64 },
    #[error("curve is not parametrised by arc length: |α'|² = {speed_sq}")]
    NotArcLength { speed_sq: f64 },
    #[error("curve leaves the domain at parameter {t}")]
    CurveExitsDomain { t: f64 },
    #[error("no sign change of the root condition found on the scanned interval")]
    NoSignChange,
    #[error("root condition vanishes identically on a subinterval: no isolated root")]
    NoIsolatedRoot,
    #[error("warping function is not positive at t = {t}: f = {value}")]
    NonPositiveWarp { t: f64, value: f64 },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}
