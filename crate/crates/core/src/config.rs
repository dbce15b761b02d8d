//! Numerical tolerances and step sizes.
//!
//! Every check reports its raw residual; these values only decide the
//! pass/fail verdict.

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Gauss, Codazzi and compatibility identities (finite-difference limited).
    pub identity: f64,
    /// Maximum spread of `H` over the CMC probe stencil.
    pub cmc: f64,
    /// "Residual vanishes" threshold for the biharmonicity systems.
    pub residual: f64,
    /// Separates `φ = π/2` from the interior branch and guards `φ = 0`.
    pub eps_phi: f64,
    /// Threshold below which `|grad r|` or `G − 4r²` count as zero.
    pub degenerate: f64,
    /// Constancy of `κ_g`, `r`, `G` along a Hopf cylinder (standard deviation).
    pub constancy: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            identity: 1e-4,
            cmc: 1e-4,
            residual: 1e-4,
            eps_phi: 1e-6,
            degenerate: 1e-6,
            constancy: 1e-5,
        }
    }
}

impl Tolerances {
    /// Every threshold set to the same value.
    pub fn uniform(tol: f64) -> Self {
        Tolerances {
            identity: tol,
            cmc: tol,
            residual: tol,
            eps_phi: Tolerances::default().eps_phi,
            degenerate: tol,
            constancy: tol,
        }
    }
}

/// Finite-difference steps for surface fields.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FdConfig {
    /// Step relative to the parameter-domain diameter.
    pub rel_step: f64,
    /// Multiplier applied to the step when differentiating fields that are
    /// built on the shape operator (`H`, `A`).
    pub outer_factor: f64,
}

impl Default for FdConfig {
    fn default() -> Self {
        FdConfig {
            rel_step: 1e-3,
            outer_factor: 10.0,
        }
    }
}
