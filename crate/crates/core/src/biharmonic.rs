//! Biharmonicity of CMC surfaces: the normal/tangential split of the
//! bitension field, the frame-component system it reduces to, and the
//! pointwise branch classification (Hopf tube, constant `r`, gradient of
//! `r` tangent to the surface).
//!
//! Scalar-level entry points ([`AmbientScalars`], [`PointInvariants`]) take
//! plain numbers so the algebra can be exercised on synthetic data without
//! a surface that realises it.

use crate::config::Tolerances;
use crate::geometry::{ricci_at, rotate_j, BaseData, CanonicalModel};
use crate::linalg::Vec3;
use crate::surface::{SurfacePatch, SurfacePointData};
use crate::{Error, Result};

/// Half-width (in stencil steps) of the 5×5 CMC probe.
const PROBE_HALF: i32 = 2;

/// Normal and tangential parts of the bitension field of a CMC surface.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BitensionResidual {
    /// `ΔH + H|A|² − H Ric(η, η)`.
    pub normal: f64,
    /// `2A(grad H) + H grad H − 2H Ric(η)^⊤` in the basis `(t1, t2)`.
    pub tangential: [f64; 2],
    /// `max |H − H(q)|` over the probe stencil.
    pub cmc_deviation: f64,
    pub mean_curvature: f64,
}

impl BitensionResidual {
    pub fn max_abs(&self) -> f64 {
        self.normal.abs().max(self.tangential[0].hypot(self.tangential[1]))
    }
}

/// Ambient scalars at a point of the base.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AmbientScalars {
    pub r: f64,
    pub gauss: f64,
    pub grad_r_norm: f64,
}

impl From<&BaseData> for AmbientScalars {
    fn from(b: &BaseData) -> Self {
        AmbientScalars {
            r: b.r,
            gauss: b.gauss,
            grad_r_norm: b.grad_r_norm(),
        }
    }
}

impl AmbientScalars {
    /// `G − 4r²`.
    pub fn hopf_defect(&self) -> f64 {
        self.gauss - 4.0 * self.r * self.r
    }
}

/// Surface scalars at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointInvariants {
    pub phi: f64,
    pub norm_sq_a: f64,
    pub mean_curvature: f64,
}

impl From<&SurfacePointData> for PointInvariants {
    fn from(d: &SurfacePointData) -> Self {
        PointInvariants {
            phi: d.phi,
            norm_sq_a: d.norm_sq_a,
            mean_curvature: d.mean_curvature,
        }
    }
}

/// The system in the frame adapted to `grad r`:
/// `G − 2r² + (4r² − G) cos²φ + |grad r| sin 2φ − |A|²` and
/// `(G − 4r²) sin 2φ / 2 + |grad r| cos 2φ`, plus
/// `tan 2φ − 2|grad r| / (4r² − G)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GradientFrameSystem {
    pub first: f64,
    pub second: f64,
    pub tan_relation: f64,
}

/// Which part of the classification a point falls into.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    /// `φ = π/2`: vertical surface, locally a Hopf tube.
    HopfTube,
    /// `grad r = 0`.
    ConstantR,
    /// `grad r ≠ 0`, `φ ∉ {0, π/2}`.
    GradientR,
    /// `φ = 0`, or `r` constant with `G ≠ 4r²` (only minimal surfaces).
    None,
    /// `G = 4r²` with `grad r ≠ 0`: no proper biharmonic CMC surface.
    ContradictionGEquals4r2,
}

impl Branch {
    pub fn tag(&self) -> &'static str {
        match self {
            Branch::HopfTube => "a",
            Branch::ConstantR => "b1",
            Branch::GradientR => "b2",
            Branch::None => "none",
            Branch::ContradictionGEquals4r2 => "contradiction-g-equals-4r2",
        }
    }
}

/// Diagnostics computed for the branch a point falls into.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct BranchDiagnostics {
    /// `tan 2φ − 2|grad r| / (4r² − G)` (branch b2).
    pub tan2phi_residual: Option<f64>,
    /// `|A|² − 2r² − |grad r| tan φ` (branch b2).
    pub reduced_norm_residual: Option<f64>,
    /// `2|A|² − tan φ Δφ − |grad φ|²` (branch b2, surface input only).
    pub angle_laplacian_residual: Option<f64>,
    /// `|A|² − 2r²` (branch b1 with `G = 4r²`).
    pub sphere_condition_residual: Option<f64>,
    /// `|A|² − (G − 2r²)` (branch a).
    pub hopf_norm_residual: Option<f64>,
    /// `H² − (G − 4r²)` (branch a).
    pub hopf_condition_residual: Option<f64>,
    /// Largest standard deviation of `r` and `G` over the probe stencil (branch a).
    pub ambient_variation: Option<f64>,
    /// `|A|² − (G − 2r² + (4r² − G) cos²φ)` when `r` is constant and `G ≠ 4r²`.
    pub constant_r_residual: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BranchReport {
    pub branch: Branch,
    pub diagnostics: BranchDiagnostics,
}

/// `Ric(η, η) − |A|²`, `Ric(η, e1)`, `Ric(η, e2)` written with the
/// components `a_i`, `b_i`, `c_i` of `e1`, `e2`, `η` in `{E1, E2, E3}`.
pub fn frame_system(base: &BaseData, norm_sq_a: f64, e1: &Vec3, e2: &Vec3, eta: &Vec3) -> [f64; 3] {
    let (r, g, l) = (base.r, base.gauss, base.lambda);
    let [rx, ry] = base.r_grad;
    let c = eta;
    let k = 4.0 * r * r - g;
    let line1 = (g - 2.0 * r * r) + k * c[2] * c[2] + 2.0 * c[2] * (c[1] * rx - c[0] * ry) / l - norm_sq_a;
    let tangent = |a: &Vec3| {
        k * c[2] * a[2] + (rx * (c[1] * a[2] + c[2] * a[1]) - ry * (c[0] * a[2] + c[2] * a[0])) / l
    };
    [line1, tangent(e1), tangent(e2)]
}

/// Frame-independent content of [`frame_system`]: line 1 and the
/// length of the tangential pair.
pub fn frame_system_invariant(res: &[f64; 3]) -> (f64, f64) {
    (res[0], res[1].hypot(res[2]))
}

/// Frame `(e1, e2, η)` with `e2 = w`, `e1 = −cos φ Jw + sin φ ξ`,
/// `η = sin φ Jw + cos φ ξ` for a unit horizontal `w`.
pub fn gradient_adapted_frame(w: &Vec3, phi: f64) -> (Vec3, Vec3, Vec3) {
    let jw = rotate_j(w);
    let (s, c) = phi.sin_cos();
    (jw * (-c) + Vec3::E3 * s, *w, jw * s + Vec3::E3 * c)
}

fn angle_guard(phi: f64, tol: &Tolerances) -> Result<()> {
    let (s, c) = phi.sin_cos();
    if s < tol.eps_phi || c.abs() < tol.eps_phi {
        return Err(Error::AngleSingular { sin_phi: s });
    }
    Ok(())
}

/// Residuals of the system in the frame adapted to `grad r`.
pub fn gradient_frame_residuals(amb: &AmbientScalars, pt: &PointInvariants, tol: &Tolerances) -> Result<GradientFrameSystem> {
    angle_guard(pt.phi, tol)?;
    let (r, g, grad) = (amb.r, amb.gauss, amb.grad_r_norm);
    if grad <= tol.degenerate {
        return Err(Error::ZeroGradR { norm: grad });
    }
    let k = 4.0 * r * r - g;
    if k.abs() < tol.degenerate {
        return Err(Error::G4r2Degenerate {
            value: -k,
            grad_norm: grad,
        });
    }
    let phi = pt.phi;
    let cos = phi.cos();
    Ok(GradientFrameSystem {
        first: g - 2.0 * r * r + k * cos * cos + grad * (2.0 * phi).sin() - pt.norm_sq_a,
        second: -k * (2.0 * phi).sin() / 2.0 + grad * (2.0 * phi).cos(),
        tan_relation: (2.0 * phi).tan() - 2.0 * grad / k,
    })
}

/// First line of the reduced system with `G` eliminated:
/// `|A|² − 2r² − |grad r| tan φ`.
pub fn reduced_norm_residual(amb: &AmbientScalars, pt: &PointInvariants) -> f64 {
    pt.norm_sq_a - 2.0 * amb.r * amb.r - amb.grad_r_norm * pt.phi.tan()
}

/// Classification from scalar data only (no derivatives of `φ`).
pub fn classify_scalars(amb: &AmbientScalars, pt: &PointInvariants, tol: &Tolerances) -> BranchReport {
    let (r, g) = (amb.r, amb.gauss);
    let (s, c) = pt.phi.sin_cos();
    let mut diag = BranchDiagnostics::default();
    let branch = if c.abs() < tol.eps_phi {
        diag.hopf_norm_residual = Some(pt.norm_sq_a - (g - 2.0 * r * r));
        diag.hopf_condition_residual = Some(pt.mean_curvature.powi(2) - amb.hopf_defect());
        Branch::HopfTube
    } else if s < tol.eps_phi {
        Branch::None
    } else if amb.grad_r_norm <= tol.degenerate {
        if amb.hopf_defect().abs() <= tol.degenerate {
            diag.sphere_condition_residual = Some(pt.norm_sq_a - 2.0 * r * r);
            Branch::ConstantR
        } else {
            diag.constant_r_residual = Some(pt.norm_sq_a - (g - 2.0 * r * r + (4.0 * r * r - g) * c * c));
            Branch::None
        }
    } else if amb.hopf_defect().abs() < tol.degenerate {
        Branch::ContradictionGEquals4r2
    } else {
        match gradient_frame_residuals(amb, pt, tol) {
            Ok(eq) => {
                diag.tan2phi_residual = Some(eq.tan_relation);
                diag.reduced_norm_residual = Some(reduced_norm_residual(amb, pt));
                Branch::GradientR
            }
            Err(_) => Branch::None,
        }
    };
    BranchReport { branch, diagnostics: diag }
}

impl<M: CanonicalModel> SurfacePatch<M> {
    /// `max |H − H(q)|` over a 5×5 stencil of spacing [`SurfacePatch::outer_step`].
    pub fn cmc_deviation(&self, q: [f64; 2]) -> Result<f64> {
        let h0 = self.mean_curvature(q)?;
        let step = self.outer_step();
        let mut worst: f64 = 0.0;
        for i in -PROBE_HALF..=PROBE_HALF {
            for j in -PROBE_HALF..=PROBE_HALF {
                let p = [q[0] + i as f64 * step, q[1] + j as f64 * step];
                let h = self.analyze_at(p)?.mean_curvature;
                worst = worst.max((h - h0).abs());
            }
        }
        Ok(worst)
    }

    fn require_cmc(&self, q: [f64; 2]) -> Result<f64> {
        let deviation = self.cmc_deviation(q)?;
        if deviation > self.tol.cmc {
            return Err(Error::NotCmc {
                deviation,
                tol: self.tol.cmc,
            });
        }
        Ok(deviation)
    }

    fn mean_curvature_field(&self, u: f64, v: f64) -> Result<f64> {
        Ok(self.analyze_at([u, v])?.mean_curvature)
    }

    /// Bitension split for a CMC surface; `ΔH` and `grad H` are computed,
    /// not assumed zero.
    pub fn bitension_cmc(&self, q: [f64; 2]) -> Result<BitensionResidual> {
        let cmc_deviation = self.require_cmc(q)?;
        let d = self.analyze_point(q)?;
        let outer = self.outer_step();
        let lap_h = self.surface_laplacian_with(|u, v| self.mean_curvature_field(u, v), q, outer, outer)?;
        let dh = self.param_grad(|u, v| self.mean_curvature_field(u, v), q, outer)?;
        let grad_h = d.gradient(dh);
        let ric = ricci_at(&d.base);
        let h = d.mean_curvature;
        let normal = lap_h + h * d.norm_sq_a - h * ric.apply(&d.normal, &d.normal);
        let ric_eta = ric.vector(&d.normal);
        let tangential = d.shape_apply(&grad_h) * 2.0 + grad_h * h - ric_eta * (2.0 * h);
        Ok(BitensionResidual {
            normal,
            tangential: [tangential.dot(&d.basis[0]), tangential.dot(&d.basis[1])],
            cmc_deviation,
            mean_curvature: h,
        })
    }

    /// The three-line system in the tangent basis `(t1, t2)` of
    /// [`SurfacePointData::basis`].
    pub fn frame_system_residuals(&self, q: [f64; 2]) -> Result<[f64; 3]> {
        self.require_cmc(q)?;
        let d = self.analyze_point(q)?;
        Ok(frame_system(&d.base, d.norm_sq_a, &d.basis[0], &d.basis[1], &d.normal))
    }

    /// `cos φ ⟨grad r, η⟩` and its component form `c3 (c1 r_x + c2 r_y) / λ`.
    pub fn normality_identity(&self, q: [f64; 2]) -> Result<(f64, f64)> {
        let d = self.analyze_point(q)?;
        let b = &d.base;
        let c = &d.normal;
        let assembled = c[2] * (c[0] * b.r_grad[0] + c[1] * b.r_grad[1]) / b.lambda;
        Ok((d.normality_identity(), assembled))
    }

    /// [`gradient_frame_residuals`] at a surface point.
    pub fn gradient_frame_residuals(&self, q: [f64; 2]) -> Result<GradientFrameSystem> {
        let d = self.analyze_point(q)?;
        gradient_frame_residuals(&AmbientScalars::from(&d.base), &PointInvariants::from(&d), &self.tol)
    }

    /// `2|A|² − tan φ Δφ − |grad φ|²`.
    pub fn angle_laplacian_residual(&self, q: [f64; 2]) -> Result<f64> {
        let d = self.analyze_point(q)?;
        angle_guard(d.phi, &self.tol)?;
        let lap = self.surface_laplacian(|u, v| self.phi([u, v]), q)?;
        let p = self.phi_derivatives(q)?;
        Ok(2.0 * d.norm_sq_a - d.phi.tan() * lap - p.grad_sq())
    }

    /// `2|A|² − tan φ (e1e1(φ) + e2e2(φ)) − 2r e2(φ) − H e1(φ)`.
    pub fn angle_hessian_residual(&self, q: [f64; 2]) -> Result<f64> {
        let d = self.analyze_point(q)?;
        angle_guard(d.phi, &self.tol)?;
        let p = self.phi_derivatives(q)?;
        let [s11, s22] = self.phi_second_derivatives(q)?;
        Ok(2.0 * d.norm_sq_a - d.phi.tan() * (s11 + s22) - 2.0 * d.base.r * p.e2 - d.mean_curvature * p.e1)
    }

    /// Standard deviation of `r` and `G` over the CMC probe stencil.
    fn ambient_variation(&self, q: [f64; 2]) -> Result<f64> {
        let step = self.outer_step();
        let (mut rs, mut gs) = (Vec::new(), Vec::new());
        for i in -PROBE_HALF..=PROBE_HALF {
            for j in -PROBE_HALF..=PROBE_HALF {
                let p = self.point([q[0] + i as f64 * step, q[1] + j as f64 * step])?;
                let b = crate::geometry::base_data(self.model(), p[0], p[1])?;
                rs.push(b.r);
                gs.push(b.gauss);
            }
        }
        Ok(std_dev(&rs).max(std_dev(&gs)))
    }

    /// Branch of the classification at `q`, with the diagnostics of that branch.
    pub fn classify_point(&self, q: [f64; 2]) -> Result<BranchReport> {
        self.require_cmc(q)?;
        let d = self.analyze_point(q)?;
        let mut report = classify_scalars(&AmbientScalars::from(&d.base), &PointInvariants::from(&d), &self.tol);
        match report.branch {
            Branch::HopfTube => report.diagnostics.ambient_variation = Some(self.ambient_variation(q)?),
            Branch::GradientR => report.diagnostics.angle_laplacian_residual = Some(self.angle_laplacian_residual(q)?),
            _ => {}
        }
        Ok(report)
    }
}

/// Overall answer to "is this CMC surface proper biharmonic at `q`".
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    /// `H = 0`: biharmonic but not proper.
    Harmonic,
    ProperBiharmonic,
    NotBiharmonic,
    /// `H` varies on the probe stencil; only CMC surfaces are analysed.
    NotCmc,
}

impl Verdict {
    pub fn tag(&self) -> &'static str {
        match self {
            Verdict::Harmonic => "harmonic (not proper)",
            Verdict::ProperBiharmonic => "yes",
            Verdict::NotBiharmonic => "no",
            Verdict::NotCmc => "no (not cmc)",
        }
    }
}

impl<M: CanonicalModel> SurfacePatch<M> {
    /// Verdict at `q` from the bitension residual and `tol.residual`;
    /// `|H| ≤ tol.degenerate` counts as harmonic.
    pub fn verdict(&self, q: [f64; 2]) -> Result<Verdict> {
        match self.bitension_cmc(q) {
            Err(Error::NotCmc { .. }) => Ok(Verdict::NotCmc),
            Err(e) => Err(e),
            Ok(b) if b.mean_curvature.abs() <= self.tol.degenerate => Ok(Verdict::Harmonic),
            Ok(b) if b.max_abs() <= self.tol.residual => Ok(Verdict::ProperBiharmonic),
            Ok(_) => Ok(Verdict::NotBiharmonic),
        }
    }
}

/// Population standard deviation.
pub fn std_dev(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return 0.0;
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    (xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n).sqrt()
}
