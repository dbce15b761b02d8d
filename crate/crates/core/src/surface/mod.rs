//! Immersed surfaces in a canonical model: induced metric, unit normal,
//! shape operator `A = −∇̄η`, angle function `φ` with `cos φ = ⟨ξ, η⟩`,
//! and the adapted frame `e1 = T/sin φ`, `e2 = η∧T/sin φ`.
//!
//! Immersions are given by expressions `(X, Y, Z)` in two parameters.
//! The tangent plane, normal and shape operator come from second-order jets
//! of the immersion and first-order jets of `λ, a, b`; derivatives of fields
//! built on them (`φ`, `H`, `A`) are central differences in parameter space.

mod identities;

use crate::config::{FdConfig, Tolerances};
use crate::expr::Expr;
use crate::fd;
use crate::geometry::{base_data, connection, coords_to_frame, BaseData, CanonicalModel, KillingData, Rect};
use crate::linalg::{det2, frobenius_sq2, inv2, Mat2, Vec3};
use crate::{Error, Result};

pub use identities::{AdaptedConnection, CompatibilityResiduals, PhiDerivatives};

/// Gram determinant below which the immersion counts as singular.
pub const MIN_GRAM_DET: f64 = 1e-10;

const VALIDATION_GRID: usize = 8;

/// A parametrised surface `(u, v) ↦ (X, Y, Z)` in the model `M`.
#[derive(Debug, Clone)]
pub struct SurfacePatch<M = KillingData> {
    model: M,
    immersion: [Expr; 3],
    domain: Rect,
    flip: bool,
    pub fd: FdConfig,
    pub tol: Tolerances,
}

/// Jet-level data at one parameter point.
#[derive(Debug, Clone, Copy)]
struct Local {
    point: [f64; 3],
    tu: Vec3,
    tv: Vec3,
    metric: Mat2,
    normal: Vec3,
    /// `∂_u` and `∂_v` of the frame components of the normal.
    dnormal: [Vec3; 2],
}

impl Local {
    fn cos_phi(&self) -> f64 {
        self.normal[2].clamp(-1.0, 1.0)
    }

    fn t_vec(&self) -> Vec3 {
        Vec3::E3 - self.normal * self.cos_phi()
    }

    fn param_coeffs(&self, x: &Vec3) -> [f64; 2] {
        param_coeffs(&self.metric, &self.tu, &self.tv, x)
    }
}

fn param_coeffs(metric: &Mat2, tu: &Vec3, tv: &Vec3, x: &Vec3) -> [f64; 2] {
    // metric was checked to be non-singular when it was built
    let inv = inv2(metric).unwrap_or([[0.0; 2]; 2]);
    let rhs = [x.dot(tu), x.dot(tv)];
    [
        inv[0][0] * rhs[0] + inv[0][1] * rhs[1],
        inv[1][0] * rhs[0] + inv[1][1] * rhs[1],
    ]
}

/// Everything `analyze_point` knows about the surface at one parameter point.
#[derive(Debug, Clone, Copy)]
pub struct SurfacePointData {
    pub param: [f64; 2],
    pub point: [f64; 3],
    /// `∂_u`, `∂_v` in frame components.
    pub tu: Vec3,
    pub tv: Vec3,
    /// First fundamental form in `(∂_u, ∂_v)`.
    pub metric: Mat2,
    pub normal: Vec3,
    /// Orthonormal tangent basis `t1 = ∂_u/|∂_u|`, `t2 = η∧t1`.
    pub basis: [Vec3; 2],
    /// `A(t1)`, `A(t2)`.
    pub shape_images: [Vec3; 2],
    /// `A` in the basis `(t1, t2)`: `shape[i][j] = ⟨A t_j, t_i⟩`.
    pub shape: Mat2,
    /// `H = trace A`.
    pub mean_curvature: f64,
    pub norm_sq_a: f64,
    pub cos_phi: f64,
    pub sin_phi: f64,
    pub phi: f64,
    /// Tangent part `T` of `ξ`.
    pub t_vec: Vec3,
    pub adapted: Option<(Vec3, Vec3)>,
    pub base: BaseData,
}

impl SurfacePointData {
    /// `A(X)` for a tangent vector `X`.
    pub fn shape_apply(&self, x: &Vec3) -> Vec3 {
        self.shape_images[0] * x.dot(&self.basis[0]) + self.shape_images[1] * x.dot(&self.basis[1])
    }

    /// Matrix of `A` in an orthonormal tangent basis `(f1, f2)`.
    pub fn shape_in(&self, f1: &Vec3, f2: &Vec3) -> Mat2 {
        let f = [f1, f2];
        std::array::from_fn(|i| std::array::from_fn(|j| self.shape_apply(f[j]).dot(f[i])))
    }

    /// Coefficients `(α, β)` of a tangent vector `X = α ∂_u + β ∂_v`.
    pub fn param_coeffs(&self, x: &Vec3) -> [f64; 2] {
        param_coeffs(&self.metric, &self.tu, &self.tv, x)
    }

    /// `X(f)` from the parameter gradient `(f_u, f_v)`.
    pub fn derivative(&self, x: &Vec3, param_grad: [f64; 2]) -> f64 {
        let [a, b] = self.param_coeffs(x);
        a * param_grad[0] + b * param_grad[1]
    }

    /// Surface gradient of a function from its parameter gradient.
    pub fn gradient(&self, param_grad: [f64; 2]) -> Vec3 {
        self.basis[0] * self.derivative(&self.basis[0], param_grad)
            + self.basis[1] * self.derivative(&self.basis[1], param_grad)
    }

    pub fn adapted_frame(&self) -> Result<(Vec3, Vec3)> {
        self.adapted.ok_or(Error::AngleSingular { sin_phi: self.sin_phi })
    }

    /// `A` in the adapted frame `(e1, e2)`.
    pub fn shape_adapted(&self) -> Result<Mat2> {
        let (e1, e2) = self.adapted_frame()?;
        Ok(self.shape_in(&e1, &e2))
    }

    pub fn det_shape(&self) -> f64 {
        det2(&self.shape)
    }

    /// `cos φ ⟨grad r, η⟩`.
    pub fn normality_identity(&self) -> f64 {
        self.cos_phi * self.base.dr(&self.normal)
    }
}

impl<M: CanonicalModel> SurfacePatch<M> {
    /// Builds a patch and checks regularity on a grid of parameter points.
    pub fn new(model: M, immersion: [Expr; 3], domain: Rect) -> Result<Self> {
        let vars = immersion[0].vars().to_vec();
        if vars.len() != 2 || immersion.iter().any(|e| e.vars() != vars.as_slice()) {
            return Err(Error::InvalidConfig(
                "immersion components must share the same two parameters".into(),
            ));
        }
        let patch = SurfacePatch {
            model,
            immersion,
            domain: Rect::new(domain.xmin, domain.xmax, domain.ymin, domain.ymax)?,
            flip: false,
            fd: FdConfig::default(),
            tol: Tolerances::default(),
        };
        for (u, v) in patch.domain.cell_centres(VALIDATION_GRID, VALIDATION_GRID) {
            patch.local(u, v)?;
        }
        Ok(patch)
    }

    pub fn from_strs(model: M, immersion: [&str; 3], params: [&str; 2], domain: Rect) -> Result<Self> {
        let parse = |s: &str| Expr::parse(s, &params);
        SurfacePatch::new(model, [parse(immersion[0])?, parse(immersion[1])?, parse(immersion[2])?], domain)
    }

    /// Graph `(x, y) ↦ (x, y, height(x, y))` over `domain`.
    pub fn graph(model: M, height: &str, domain: Rect) -> Result<Self> {
        SurfacePatch::from_strs(model, ["x", "y", height], ["x", "y"], domain)
    }

    /// Hopf cylinder `(u, v) ↦ (x(u), y(u), v)` over a base curve given by
    /// one-variable expressions, oriented so that `η = J(∂_u)/|∂_u|`.
    pub fn hopf_cylinder(model: M, x: &Expr, y: &Expr, u_range: (f64, f64), v_range: (f64, f64)) -> Result<Self> {
        let lift = |e: &Expr| -> Result<Expr> {
            let var = e.vars().first().cloned().unwrap_or_else(|| "u".into());
            Ok(e.rebind(&["u", "v"], &[(var.as_str(), "u")])?)
        };
        let z = Expr::parse("v", &["u", "v"])?;
        let domain = Rect::new(u_range.0, u_range.1, v_range.0, v_range.1)?;
        Ok(SurfacePatch::new(model, [lift(x)?, lift(y)?, z], domain)?.flipped())
    }

    /// The same patch with the opposite unit normal.
    pub fn flipped(mut self) -> Self {
        self.flip = !self.flip;
        self
    }

    pub fn with_fd(mut self, fd: FdConfig) -> Self {
        self.fd = fd;
        self
    }

    pub fn with_tolerances(mut self, tol: Tolerances) -> Self {
        self.tol = tol;
        self
    }

    pub fn model(&self) -> &M {
        &self.model
    }

    pub fn domain(&self) -> &Rect {
        &self.domain
    }

    pub fn immersion(&self) -> &[Expr; 3] {
        &self.immersion
    }

    pub fn is_flipped(&self) -> bool {
        self.flip
    }

    /// Parameter step for fields known in closed form.
    pub fn step(&self) -> f64 {
        self.fd.rel_step * self.domain.diameter()
    }

    /// Parameter step for fields that are themselves finite-difference outputs.
    pub fn outer_step(&self) -> f64 {
        self.step() * self.fd.outer_factor
    }

    fn local(&self, u: f64, v: f64) -> Result<Local> {
        let q = [u, v];
        let [x, y, z] = [
            self.immersion[0].eval_jet(&q)?,
            self.immersion[1].eval_jet(&q)?,
            self.immersion[2].eval_jet(&q)?,
        ];
        let (px, py) = (x.value(), y.value());
        if !self.model.domain().contains(px, py) {
            return Err(Error::OutsideDomain { x: px, y: py });
        }
        let f = self.model.fields(px, py)?;
        let (l, a, b) = (f.lambda.value(), f.a.value(), f.b.value());
        let tangent = |i: usize| [x.d(i), y.d(i), z.d(i)];
        let tu = coords_to_frame(l, a, b, tangent(0));
        let tv = coords_to_frame(l, a, b, tangent(1));
        let metric = [[tu.dot(&tu), tu.dot(&tv)], [tv.dot(&tu), tv.dot(&tv)]];
        let det = det2(&metric);
        if !(det > MIN_GRAM_DET) {
            return Err(Error::DegenerateImmersion { det });
        }
        // derivative of the frame components of ∂_i along ∂_k
        let d_tangent = |i: usize, k: usize| {
            let along = |j: &crate::expr::Jet| j.d(0) * x.d(k) + j.d(1) * y.d(k);
            let (lk, ak, bk) = (along(&f.lambda), along(&f.a), along(&f.b));
            let (xi, yi) = (x.d(i), y.d(i));
            let (xik, yik, zik) = (x.dd(i, k), y.dd(i, k), z.dd(i, k));
            Vec3::new(
                lk * xi + l * xik,
                lk * yi + l * yik,
                zik - lk * (a * xi + b * yi) - l * (ak * xi + a * xik + bk * yi + b * yik),
            )
        };
        let norm = det.sqrt();
        let n = tu.wedge(&tv) * (1.0 / norm);
        let dn = |k: usize| {
            let dw = d_tangent(0, k).wedge(&tv) + tu.wedge(&d_tangent(1, k));
            (dw - n * n.dot(&dw)) * (1.0 / norm)
        };
        let sign = if self.flip { -1.0 } else { 1.0 };
        Ok(Local {
            point: [px, py, z.value()],
            tu,
            tv,
            metric,
            normal: n * sign,
            dnormal: [dn(0) * sign, dn(1) * sign],
        })
    }

    fn check_param(&self, q: [f64; 2]) -> Result<()> {
        if self.domain.contains(q[0], q[1]) {
            Ok(())
        } else {
            Err(Error::OutsideDomain { x: q[0], y: q[1] })
        }
    }

    /// Point of the surface.
    pub fn point(&self, q: [f64; 2]) -> Result<[f64; 3]> {
        Ok(self.local(q[0], q[1])?.point)
    }

    /// Unit normal in frame components (from jets, no differentiation).
    pub fn normal(&self, q: [f64; 2]) -> Result<Vec3> {
        Ok(self.local(q[0], q[1])?.normal)
    }

    /// `cos φ = ⟨ξ, η⟩` (from jets).
    pub fn cos_phi(&self, q: [f64; 2]) -> Result<f64> {
        Ok(self.local(q[0], q[1])?.cos_phi())
    }

    /// `φ ∈ [0, π]`.
    pub fn phi(&self, q: [f64; 2]) -> Result<f64> {
        let l = self.local(q[0], q[1])?;
        Ok(l.t_vec().norm().atan2(l.cos_phi()))
    }

    /// First fundamental form (from jets).
    pub fn metric(&self, q: [f64; 2]) -> Result<Mat2> {
        Ok(self.local(q[0], q[1])?.metric)
    }

    pub fn analyze_point(&self, q: [f64; 2]) -> Result<SurfacePointData> {
        self.check_param(q)?;
        self.analyze_at(q)
    }

    /// [`Self::analyze_point`] without the parameter-domain check, for stencils.
    pub(crate) fn analyze_at(&self, q: [f64; 2]) -> Result<SurfacePointData> {
        let [u, v] = q;
        let loc = self.local(u, v)?;
        let [x, y, _] = loc.point;
        let base = base_data(&self.model, x, y)?;
        let table = connection(&self.model, loc.point)?;
        let a_u = -(loc.dnormal[0] + table.nabla(&loc.tu, &loc.normal));
        let a_v = -(loc.dnormal[1] + table.nabla(&loc.tv, &loc.normal));

        let t1 = loc.tu.normalized();
        let t2 = loc.normal.wedge(&t1);
        let image = |t: &Vec3| {
            let [alpha, beta] = loc.param_coeffs(t);
            a_u * alpha + a_v * beta
        };
        let shape_images = [image(&t1), image(&t2)];
        let basis = [t1, t2];
        let shape: Mat2 = std::array::from_fn(|i| std::array::from_fn(|j| shape_images[j].dot(&basis[i])));

        let cos_phi = loc.cos_phi();
        let t_vec = loc.t_vec();
        let sin_phi = t_vec.norm();
        let adapted = (sin_phi >= self.tol.eps_phi).then(|| {
            let e1 = t_vec * (1.0 / sin_phi);
            (e1, loc.normal.wedge(&e1))
        });
        Ok(SurfacePointData {
            param: q,
            point: loc.point,
            tu: loc.tu,
            tv: loc.tv,
            metric: loc.metric,
            normal: loc.normal,
            basis,
            shape_images,
            shape,
            mean_curvature: shape[0][0] + shape[1][1],
            norm_sq_a: frobenius_sq2(&shape),
            cos_phi,
            sin_phi,
            phi: sin_phi.atan2(cos_phi),
            t_vec,
            adapted,
            base,
        })
    }

    /// Adapted frame `e1 = T/sin φ`, `e2 = η∧T/sin φ` at `q`.
    pub fn adapted_frame(&self, q: [f64; 2]) -> Result<(Vec3, Vec3)> {
        self.analyze_point(q)?.adapted_frame()
    }

    /// Mean curvature `H = trace A` at `q`.
    pub fn mean_curvature(&self, q: [f64; 2]) -> Result<f64> {
        Ok(self.analyze_point(q)?.mean_curvature)
    }

    /// `(f_u, f_v)` of a parameter-space field by central differences.
    pub fn param_grad(&self, f: impl Fn(f64, f64) -> Result<f64>, q: [f64; 2], h: f64) -> Result<[f64; 2]> {
        fd::grad2(f, q[0], q[1], h)
    }

    /// Laplace–Beltrami operator `Δ = div grad` of a field, in divergence
    /// form `(1/√g) ∂_i(√g g^{ij} ∂_j f)`, with separate steps for the inner
    /// gradient and the outer divergence.
    pub fn surface_laplacian_with(
        &self,
        field: impl Fn(f64, f64) -> Result<f64>,
        q: [f64; 2],
        inner: f64,
        outer: f64,
    ) -> Result<f64> {
        self.check_param(q)?;
        let flux = |u: f64, v: f64| -> Result<[f64; 2]> {
            let g = self.local(u, v)?.metric;
            let sqrt_g = det2(&g).sqrt();
            let inv = inv2(&g).ok_or(Error::DegenerateImmersion { det: det2(&g) })?;
            let df = fd::grad2(&field, u, v, inner)?;
            Ok([
                sqrt_g * (inv[0][0] * df[0] + inv[0][1] * df[1]),
                sqrt_g * (inv[1][0] * df[0] + inv[1][1] * df[1]),
            ])
        };
        let [u, v] = q;
        let div_u = fd::d1(|s| Ok::<_, Error>(flux(s, v)?[0]), u, outer)?;
        let div_v = fd::d1(|s| Ok::<_, Error>(flux(u, s)?[1]), v, outer)?;
        let sqrt_g = det2(&self.local(u, v)?.metric).sqrt();
        Ok((div_u + div_v) / sqrt_g)
    }

    /// [`Self::surface_laplacian_with`] with the closed-form step for both levels.
    pub fn surface_laplacian(&self, field: impl Fn(f64, f64) -> Result<f64>, q: [f64; 2]) -> Result<f64> {
        let h = self.step();
        self.surface_laplacian_with(field, q, h, h)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::bcv;

    fn flat() -> KillingData {
        KillingData::flat(3.0)
    }

    #[test]
    fn vertical_plane_is_totally_geodesic() {
        let s = SurfacePatch::from_strs(flat(), ["u", "0", "v"], ["u", "v"], Rect::square(1.0)).unwrap();
        let d = s.analyze_point([0.2, 0.3]).unwrap();
        assert!(d.shape.iter().flatten().all(|a| a.abs() < 1e-12));
        assert!((d.phi - std::f64::consts::FRAC_PI_2).abs() < 1e-12);
        assert_eq!(d.mean_curvature, 0.0);
    }

    #[test]
    fn horizontal_slice_has_no_adapted_frame() {
        let s = SurfacePatch::graph(flat(), "0.5", Rect::square(1.0)).unwrap();
        let d = s.analyze_point([0.0, 0.1]).unwrap();
        assert_eq!(d.phi, 0.0);
        assert!(d.shape.iter().flatten().all(|a| a.abs() < 1e-12));
        assert!(matches!(d.adapted_frame(), Err(Error::AngleSingular { .. })));
    }

    #[test]
    fn round_cylinder_in_flat_product() {
        let vars = ["t"];
        let (x, y) = (Expr::parse("cos(t)", &vars).unwrap(), Expr::parse("sin(t)", &vars).unwrap());
        let s = SurfacePatch::hopf_cylinder(flat(), &x, &y, (0.0, 3.0), (-1.0, 1.0)).unwrap();
        let d = s.analyze_point([1.0, 0.2]).unwrap();
        assert!((d.mean_curvature - 1.0).abs() < 1e-10);
        assert!((d.phi - std::f64::consts::FRAC_PI_2).abs() < 1e-12);
        let (e1, e2) = d.adapted_frame().unwrap();
        assert!((e1 - Vec3::E3).norm() < 1e-12);
        assert!(e2.vertical().abs() < 1e-12);
        let a = d.shape_adapted().unwrap();
        let want = [[0.0, 0.0], [0.0, 1.0]];
        for i in 0..2 {
            for j in 0..2 {
                assert!((a[i][j] - want[i][j]).abs() < 1e-10, "{a:?}");
            }
        }
    }

    #[test]
    fn point_data_invariants_on_heisenberg_graph() {
        let s = SurfacePatch::graph(bcv(0.0, 0.5), "0.3*x^2 - x*y + 0.2*sin(y)", Rect::square(1.0)).unwrap();
        let d = s.analyze_point([0.3, -0.4]).unwrap();
        assert!((d.normal.norm() - 1.0).abs() < 1e-12);
        assert!(d.normal.dot(&d.tu).abs() < 1e-10 && d.normal.dot(&d.tv).abs() < 1e-10);
        assert!((d.shape[0][1] - d.shape[1][0]).abs() < 1e-8);
        let xi = d.t_vec + d.normal * d.cos_phi;
        assert!((xi - Vec3::E3).norm() < 1e-10);
        assert!((d.t_vec.dot(&d.t_vec) - d.sin_phi.powi(2)).abs() < 1e-10);
        let (e1, e2) = d.adapted_frame().unwrap();
        assert!((e1 * d.sin_phi + d.normal * d.cos_phi - Vec3::E3).norm() < 1e-10);
        assert!((e1.dot(&e1) - 1.0).abs() < 1e-10 && (e2.dot(&e2) - 1.0).abs() < 1e-10 && e1.dot(&e2).abs() < 1e-10);
    }

    #[test]
    fn flipping_the_normal_negates_a() {
        let s = SurfacePatch::graph(bcv(1.0, 1.0), "0.4*x*y + 0.1*x", Rect::square(0.8)).unwrap();
        let q = [0.1, 0.2];
        let d = s.analyze_point(q).unwrap();
        let f = s.clone().flipped().analyze_point(q).unwrap();
        assert!((d.mean_curvature + f.mean_curvature).abs() < 1e-10);
        assert!((d.cos_phi + f.cos_phi).abs() < 1e-12);
        let (da, fa) = (d.shape_adapted().unwrap(), f.shape_adapted().unwrap());
        // e2 flips with η, so the off-diagonal entries keep their sign
        assert!((da[0][0] + fa[0][0]).abs() < 1e-10);
        assert!((da[0][1] - fa[0][1]).abs() < 1e-10);
        assert!((da[1][1] + fa[1][1]).abs() < 1e-10);
    }

    #[test]
    fn laplacian_of_simple_fields() {
        let s = SurfacePatch::from_strs(flat(), ["u", "0", "v"], ["u", "v"], Rect::square(1.0)).unwrap();
        let lap = s.surface_laplacian(|u, _| Ok(u * u), [0.3, 0.1]).unwrap();
        assert!((lap - 2.0).abs() < 1e-8);
        assert_eq!(s.surface_laplacian(|_, _| Ok(4.0), [0.3, 0.1]).unwrap(), 0.0);
    }

    #[test]
    fn degenerate_immersion_is_rejected() {
        let r = SurfacePatch::from_strs(flat(), ["u", "u", "0"], ["u", "v"], Rect::square(1.0));
        assert!(matches!(r, Err(Error::DegenerateImmersion { .. })));
    }
}
