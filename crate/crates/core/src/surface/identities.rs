//! Fundamental-equation residuals: Gauss, Codazzi, the compatibility
//! relations for `T`, the adapted-frame shape matrix and connection.

use super::{SurfacePatch, SurfacePointData};
use crate::fd;
use crate::geometry::{connection, CanonicalModel};
use crate::linalg::{det2, det3, inv2, Mat2, Vec3};
use crate::{Error, Result};

/// `e1(φ)`, `e2(φ)` in the adapted frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhiDerivatives {
    pub e1: f64,
    pub e2: f64,
}

impl PhiDerivatives {
    pub fn grad_sq(&self) -> f64 {
        self.e1 * self.e1 + self.e2 * self.e2
    }
}

/// Residuals of `∇_X T = cos φ (A X − r η∧X)` (vector norm) and
/// `⟨A X − r η∧X, T⟩ = −X(cos φ)`, maximised over `X ∈ {e1, e2}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CompatibilityResiduals {
    pub tangent_part: f64,
    pub angle_part: f64,
}

/// Intrinsic connection of the surface in the adapted frame:
/// `table[i][j][k] = ⟨∇_{e_i} e_j, e_k⟩`, from the induced-metric
/// Christoffel symbols.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdaptedConnection {
    pub table: [[[f64; 2]; 2]; 2],
}

/// Christoffel symbols `Γ^i_{jk}` of a 2×2 metric with first derivatives
/// `dg[k] = ∂_k g`.
fn christoffel(g: &Mat2, dg: &[Mat2; 2]) -> Result<[[[f64; 2]; 2]; 2]> {
    let inv = inv2(g).ok_or(Error::DegenerateImmersion { det: det2(g) })?;
    Ok(std::array::from_fn(|i| {
        std::array::from_fn(|j| {
            std::array::from_fn(|k| {
                0.5 * (0..2)
                    .map(|l| inv[i][l] * (dg[j][l][k] + dg[k][j][l] - dg[l][j][k]))
                    .sum::<f64>()
            })
        })
    }))
}

fn mat_from(a: [f64; 3]) -> Mat2 {
    [[a[0], a[1]], [a[1], a[2]]]
}

impl<M: CanonicalModel> SurfacePatch<M> {
    fn metric_entries(&self, u: f64, v: f64) -> Result<[f64; 3]> {
        let g = self.local(u, v)?.metric;
        Ok([g[0][0], g[0][1], g[1][1]])
    }

    /// Christoffel symbols `Γ^i_{jk}` of the induced metric in parameters.
    pub fn induced_christoffel(&self, q: [f64; 2]) -> Result<[[[f64; 2]; 2]; 2]> {
        let [u, v] = q;
        let [du, dv] = fd::grad2(|a, b| self.metric_entries(a, b), u, v, self.step())?;
        christoffel(&self.local(u, v)?.metric, &[mat_from(du), mat_from(dv)])
    }

    /// Gaussian curvature of the induced metric (Brioschi formula).
    pub fn intrinsic_curvature(&self, q: [f64; 2]) -> Result<f64> {
        self.check_param(q)?;
        let [u, v] = q;
        let h = self.step();
        let g0 = self.metric_entries(u, v)?;
        let [e, f, g] = g0;
        let [du, dv] = fd::grad2(|a, b| self.metric_entries(a, b), u, v, h)?;
        let duu = fd::d2(|s| self.metric_entries(s, v), u, g0, h)?;
        let dvv = fd::d2(|s| self.metric_entries(u, s), v, g0, h)?;
        let duv = fd::d11(|a, b| self.metric_entries(a, b), u, v, h)?;
        let (e_u, f_u, g_u) = (du[0], du[1], du[2]);
        let (e_v, f_v, g_v) = (dv[0], dv[1], dv[2]);
        let m1 = [
            [-0.5 * dvv[0] + duv[1] - 0.5 * duu[2], 0.5 * e_u, f_u - 0.5 * e_v],
            [f_v - 0.5 * g_u, e, f],
            [0.5 * g_v, f, g],
        ];
        let m2 = [[0.0, 0.5 * e_v, 0.5 * g_u], [0.5 * e_v, e, f], [0.5 * g_u, f, g]];
        let w = e * g - f * f;
        Ok((det3(&m1) - det3(&m2)) / (w * w))
    }

    fn phi_derivatives_local(&self, u: f64, v: f64) -> Result<PhiDerivatives> {
        let loc = self.local(u, v)?;
        let t = loc.t_vec();
        let sin_phi = t.norm();
        if sin_phi < self.tol.eps_phi {
            return Err(Error::AngleSingular { sin_phi });
        }
        let e1 = t * (1.0 / sin_phi);
        let e2 = loc.normal.wedge(&e1);
        let dcos = fd::grad2(|a, b| Ok::<_, Error>(self.local(a, b)?.cos_phi()), u, v, self.step())?;
        let along = |x: &Vec3| {
            let [a, b] = loc.param_coeffs(x);
            a * dcos[0] + b * dcos[1]
        };
        // e_i(φ) = −e_i(cos φ)/sin φ
        Ok(PhiDerivatives {
            e1: -along(&e1) / sin_phi,
            e2: -along(&e2) / sin_phi,
        })
    }

    /// `e1(φ)`, `e2(φ)` at `q`.
    pub fn phi_derivatives(&self, q: [f64; 2]) -> Result<PhiDerivatives> {
        self.check_param(q)?;
        self.phi_derivatives_local(q[0], q[1])
    }

    /// `e1 e1(φ)` and `e2 e2(φ)`: the adapted-frame derivatives of `φ`
    /// differentiated once more along the same field.
    pub fn phi_second_derivatives(&self, q: [f64; 2]) -> Result<[f64; 2]> {
        let d = self.analyze_point(q)?;
        let (e1, e2) = d.adapted_frame()?;
        let outer = self.outer_step();
        let g1 = fd::grad2(|a, b| Ok::<_, Error>(self.phi_derivatives_local(a, b)?.e1), q[0], q[1], outer)?;
        let g2 = fd::grad2(|a, b| Ok::<_, Error>(self.phi_derivatives_local(a, b)?.e2), q[0], q[1], outer)?;
        Ok([d.derivative(&e1, g1), d.derivative(&e2, g2)])
    }

    /// Shape operator in the adapted frame assembled from `φ`:
    /// `[[e1(φ), e2(φ) − r], [e2(φ) − r, H − e1(φ)]]`.
    pub fn shape_matrix_adapted(&self, q: [f64; 2]) -> Result<Mat2> {
        let d = self.analyze_point(q)?;
        d.adapted_frame()?;
        let p = self.phi_derivatives_local(q[0], q[1])?;
        let r = d.base.r;
        Ok([[p.e1, p.e2 - r], [p.e2 - r, d.mean_curvature - p.e1]])
    }

    /// Largest entry of (φ-assembled shape matrix) − (shape operator in `(e1, e2)`).
    pub fn shape_matrix_residual(&self, q: [f64; 2]) -> Result<f64> {
        let assembled = self.shape_matrix_adapted(q)?;
        let direct = self.analyze_point(q)?.shape_adapted()?;
        Ok(assembled
            .iter()
            .flatten()
            .zip(direct.iter().flatten())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max))
    }

    /// `|A|²` from the entries of `A` minus
    /// `2(e1(φ)² + e2(φ)²) + H² + 2r² − 4r e2(φ) − 2H e1(φ)`.
    pub fn norm_sq_residual(&self, q: [f64; 2]) -> Result<f64> {
        let d = self.analyze_point(q)?;
        d.adapted_frame()?;
        let p = self.phi_derivatives_local(q[0], q[1])?;
        let (h, r) = (d.mean_curvature, d.base.r);
        let formula = 2.0 * p.grad_sq() + h * h + 2.0 * r * r - 4.0 * r * p.e2 - 2.0 * h * p.e1;
        Ok(d.norm_sq_a - formula)
    }

    /// `K − [det A + r² + (G − 4r²) cos²φ − sin(2φ) e2(r)]` with `K` from
    /// the induced metric.
    pub fn gauss_residual(&self, q: [f64; 2]) -> Result<f64> {
        let d = self.analyze_point(q)?;
        let (_, e2) = d.adapted_frame()?;
        let k = self.intrinsic_curvature(q)?;
        let b = &d.base;
        let (r, g) = (b.r, b.gauss);
        let cos = d.cos_phi;
        let rhs = d.det_shape() + r * r + (g - 4.0 * r * r) * cos * cos - (2.0 * d.phi).sin() * b.dr(&e2);
        Ok(k - rhs)
    }

    /// `(∇_{e1} A) e2 − (∇_{e2} A) e1` minus
    /// `[(4r² − G) cos φ sin φ − cos(2φ) e2(r)] e2 − e1(r) e1`, as
    /// `(e1, e2)` components.
    pub fn codazzi_residual(&self, q: [f64; 2]) -> Result<[f64; 2]> {
        let d = self.analyze_point(q)?;
        let (e1, e2) = d.adapted_frame()?;
        let gamma = self.induced_christoffel(q)?;
        // A^i_j with A(∂_j) = A^i_j ∂_i, flattened as i + 2j
        let components = |s: &SurfacePointData| -> [f64; 4] {
            let cu = s.param_coeffs(&s.shape_apply(&s.tu));
            let cv = s.param_coeffs(&s.shape_apply(&s.tv));
            [cu[0], cu[1], cv[0], cv[1]]
        };
        let a0 = components(&d);
        let da = fd::grad2(|a, b| Ok::<_, Error>(components(&self.analyze_at([a, b])?)), q[0], q[1], self.outer_step())?;
        let comp = |i: usize, j: usize| a0[i + 2 * j];
        // cov[k][i][j] = (∇_k A)^i_j
        let cov: [[[f64; 2]; 2]; 2] = std::array::from_fn(|k| {
            std::array::from_fn(|i| {
                std::array::from_fn(|j| {
                    da[k][i + 2 * j]
                        + (0..2).map(|l| gamma[i][k][l] * comp(l, j) - gamma[l][k][j] * comp(i, l)).sum::<f64>()
                })
            })
        });
        let apply = |x: &Vec3, y: &Vec3| -> Vec3 {
            let (xc, yc) = (d.param_coeffs(x), d.param_coeffs(y));
            let mut out = [0.0; 2];
            for (i, o) in out.iter_mut().enumerate() {
                for k in 0..2 {
                    for j in 0..2 {
                        *o += xc[k] * yc[j] * cov[k][i][j];
                    }
                }
            }
            d.tu * out[0] + d.tv * out[1]
        };
        let lhs = apply(&e1, &e2) - apply(&e2, &e1);
        let b = &d.base;
        let (r, g, phi) = (b.r, b.gauss, d.phi);
        let c2 = (4.0 * r * r - g) * d.cos_phi * d.sin_phi - (2.0 * phi).cos() * b.dr(&e2);
        let rhs = e2 * c2 - e1 * b.dr(&e1);
        let res = lhs - rhs;
        Ok([res.dot(&e1), res.dot(&e2)])
    }

    pub fn compatibility_residuals(&self, q: [f64; 2]) -> Result<CompatibilityResiduals> {
        let d = self.analyze_point(q)?;
        let (e1, e2) = d.adapted_frame()?;
        let table = connection(self.model(), d.point)?;
        let h = self.step();
        let dt = fd::grad2(|a, b| Ok::<_, Error>(self.local(a, b)?.t_vec()), q[0], q[1], h)?;
        let dcos = fd::grad2(|a, b| Ok::<_, Error>(self.local(a, b)?.cos_phi()), q[0], q[1], h)?;
        let r = d.base.r;
        let mut out = CompatibilityResiduals { tangent_part: 0.0, angle_part: 0.0 };
        for x in [e1, e2] {
            let [alpha, beta] = d.param_coeffs(&x);
            let ambient = dt[0] * alpha + dt[1] * beta + table.nabla(&x, &d.t_vec);
            let nabla_t = ambient - d.normal * ambient.dot(&d.normal);
            let twisted = d.shape_apply(&x) - d.normal.wedge(&x) * r;
            let tangent_part = (nabla_t - twisted * d.cos_phi).norm();
            let angle_part = (twisted.dot(&d.t_vec) + d.derivative(&x, dcos)).abs();
            out.tangent_part = out.tangent_part.max(tangent_part);
            out.angle_part = out.angle_part.max(angle_part);
        }
        Ok(out)
    }

    /// Levi-Civita connection of the surface in the adapted frame, from
    /// the induced-metric Christoffel symbols.
    pub fn adapted_connection(&self, q: [f64; 2]) -> Result<AdaptedConnection> {
        let d = self.analyze_point(q)?;
        let frame = d.adapted_frame()?;
        let gamma = self.induced_christoffel(q)?;
        let fields = |u: f64, v: f64| -> Result<[f64; 4]> {
            let loc = self.local(u, v)?;
            let t = loc.t_vec();
            let sin_phi = t.norm();
            if sin_phi < self.tol.eps_phi {
                return Err(Error::AngleSingular { sin_phi });
            }
            let e1 = t * (1.0 / sin_phi);
            let (c1, c2) = (loc.param_coeffs(&e1), loc.param_coeffs(&loc.normal.wedge(&e1)));
            Ok([c1[0], c1[1], c2[0], c2[1]])
        };
        let y0 = fields(q[0], q[1])?;
        let dy = fd::grad2(fields, q[0], q[1], self.step())?;
        let e = [frame.0, frame.1];
        let mut table = [[[0.0; 2]; 2]; 2];
        for i in 0..2 {
            let xc = d.param_coeffs(&e[i]);
            for j in 0..2 {
                let mut comps = [0.0; 2];
                for (m, c) in comps.iter_mut().enumerate() {
                    for k in 0..2 {
                        *c += xc[k] * dy[k][2 * j + m];
                        for l in 0..2 {
                            *c += gamma[m][k][l] * xc[k] * y0[2 * j + l];
                        }
                    }
                }
                let vec = d.tu * comps[0] + d.tv * comps[1];
                for k in 0..2 {
                    table[i][j][k] = vec.dot(&e[k]);
                }
            }
        }
        Ok(AdaptedConnection { table })
    }

    /// Largest deviation of [`Self::adapted_connection`] from
    /// `∇_{e1}e1 = cot φ (e2(φ) − 2r) e2`, `∇_{e2}e1 = a22 cot φ e2`,
    /// `∇_{e1}e2 = −cot φ (e2(φ) − 2r) e1`, `∇_{e2}e2 = −a22 cot φ e1`,
    /// with `a22 = H − e1(φ)` the `(e2, e2)` entry of `A`.
    pub fn adapted_connection_residual(&self, q: [f64; 2]) -> Result<f64> {
        let d = self.analyze_point(q)?;
        let conn = self.adapted_connection(q)?.table;
        let p = self.phi_derivatives_local(q[0], q[1])?;
        let cot = d.cos_phi / d.sin_phi;
        let a22 = d.mean_curvature - p.e1;
        let first = cot * (p.e2 - 2.0 * d.base.r);
        let expected = [[[0.0, first], [-first, 0.0]], [[0.0, a22 * cot], [-a22 * cot, 0.0]]];
        let mut worst: f64 = 0.0;
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    worst = worst.max((conn[i][j][k] - expected[i][j][k]).abs());
                }
            }
        }
        Ok(worst)
    }

    /// `Δφ` minus `e1e1(φ) + e2e2(φ) − cot φ [|grad φ|² − (2r e2(φ) + H e1(φ))]`.
    pub fn phi_laplacian_residual(&self, q: [f64; 2]) -> Result<f64> {
        let d = self.analyze_point(q)?;
        d.adapted_frame()?;
        let lap = self.surface_laplacian(|a, b| self.phi([a, b]), q)?;
        let p = self.phi_derivatives_local(q[0], q[1])?;
        let [s11, s22] = self.phi_second_derivatives(q)?;
        let cot = d.cos_phi / d.sin_phi;
        let assembled = s11 + s22 - cot * (p.grad_sq() - (2.0 * d.base.r * p.e2 + d.mean_curvature * p.e1));
        Ok(lap - assembled)
    }
}

#[cfg(test)]
mod tests {
    use crate::expr::Expr;
    use crate::geometry::{bcv, KillingData, Rect};
    use crate::surface::SurfacePatch;

    fn heis_graph() -> SurfacePatch {
        SurfacePatch::graph(bcv(0.0, 0.5), "0.3*x^2 - x*y + 0.2*sin(y)", Rect::square(1.0)).unwrap()
    }

    fn bcv_circle_cylinder() -> SurfacePatch {
        let vars = ["t"];
        let x = Expr::parse("0.7*cos(t)", &vars).unwrap();
        let y = Expr::parse("0.7*sin(t)", &vars).unwrap();
        SurfacePatch::hopf_cylinder(bcv(1.0, 0.6), &x, &y, (0.0, 3.0), (-1.0, 1.0)).unwrap()
    }

    #[test]
    fn intrinsic_curvature_of_sphere_cap() {
        let s = SurfacePatch::graph(KillingData::flat(2.0), "sqrt(4 - x^2 - y^2)", Rect::square(1.0)).unwrap();
        let k = s.intrinsic_curvature([0.2, -0.3]).unwrap();
        assert!((k - 0.25).abs() < 1e-7, "{k}");
    }

    #[test]
    fn hopf_cylinder_identities() {
        let s = bcv_circle_cylinder();
        let q = [1.2, 0.3];
        let d = s.analyze_point(q).unwrap();
        assert!(d.cos_phi.abs() < 1e-12);
        assert!((d.det_shape() + 0.36).abs() < 1e-8);
        assert!(s.intrinsic_curvature(q).unwrap().abs() < 1e-6);
        assert!(s.gauss_residual(q).unwrap().abs() < 1e-5);
        let c = s.codazzi_residual(q).unwrap();
        assert!(c[0].abs() < 1e-4 && c[1].abs() < 1e-4, "{c:?}");
        let comp = s.compatibility_residuals(q).unwrap();
        assert!(comp.tangent_part < 1e-5 && comp.angle_part < 1e-5, "{comp:?}");
        let a = s.shape_matrix_adapted(q).unwrap();
        assert!(a[0][0].abs() < 1e-8 && (a[0][1] + 0.6).abs() < 1e-8);
        assert!(s.shape_matrix_residual(q).unwrap() < 1e-5);
    }

    #[test]
    fn graph_identities_in_heisenberg() {
        let s = heis_graph();
        for q in [[0.3, -0.4], [-0.5, 0.2]] {
            assert!(s.gauss_residual(q).unwrap().abs() < 1e-4);
            let c = s.codazzi_residual(q).unwrap();
            assert!(c[0].abs() < 1e-4 && c[1].abs() < 1e-4, "{c:?}");
            let comp = s.compatibility_residuals(q).unwrap();
            assert!(comp.tangent_part < 1e-4 && comp.angle_part < 1e-4, "{comp:?}");
            assert!(s.shape_matrix_residual(q).unwrap() < 1e-5);
            assert!(s.norm_sq_residual(q).unwrap().abs() < 1e-4);
            assert!(s.adapted_connection_residual(q).unwrap() < 1e-3);
            assert!(s.phi_laplacian_residual(q).unwrap().abs() < 1e-3);
        }
    }

    #[test]
    fn residuals_survive_normal_flip() {
        let s = SurfacePatch::graph(
            KillingData::from_strs("exp(-(x^2+y^2)/4)", "0", "x", Rect::square(1.5)).unwrap(),
            "0.2*x*y + 0.3*y",
            Rect::square(1.0),
        )
        .unwrap();
        let f = s.clone().flipped();
        let q = [0.2, 0.1];
        assert!((s.gauss_residual(q).unwrap() - f.gauss_residual(q).unwrap()).abs() < 1e-10);
        let (a, b) = (s.codazzi_residual(q).unwrap(), f.codazzi_residual(q).unwrap());
        assert!((a[0] - b[0]).abs() < 1e-10 && (a[1] + b[1]).abs() < 1e-10);
    }
}
