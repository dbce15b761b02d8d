//! Canonical Killing submersions `π : (Ω × ℝ, ds²_{λ,a,b}) → (Ω, λ²|dx|²)`.
//!
//! A model is determined by three functions `λ > 0`, `a`, `b` on an open
//! rectangle `Ω`. The metric
//!
//! ```text
//! ds² = λ²(dx² + dy²) + (dz − λ(a dx + b dy))²
//! ```
//!
//! has the orthonormal frame `E1 = ∂x/λ + a∂z`, `E2 = ∂y/λ + b∂z`,
//! `E3 = ∂z`, where `E3 = ξ` is the unit vertical Killing field. All
//! tensors in this module are expressed in that frame.

mod connection;
mod curvature;
mod oracle;

use crate::expr::{Expr, Jet};
use crate::fd;
use crate::linalg::{Mat3, Vec3};
use crate::{Error, Result};

pub use connection::{bracket_closed, bracket_fd, connection, Brackets, ConnectionTable};
pub use curvature::{
    ricci, ricci_at, ricci_contraction, riemann_closed, riemann_closed_at, riemann_direct,
    riemann_tensor_direct, RicciMatrix, RiemannTensor,
};
pub use oracle::{connection_oracle, coordinate_metric};

/// Relative step used by the geometry finite-difference oracles.
pub const ORACLE_STEP: f64 = 1e-4;

/// Open axis-aligned rectangle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect {
    pub xmin: f64,
    pub xmax: f64,
    pub ymin: f64,
    pub ymax: f64,
}

impl Rect {
    pub fn new(xmin: f64, xmax: f64, ymin: f64, ymax: f64) -> Result<Rect> {
        let r = Rect { xmin, xmax, ymin, ymax };
        if !(xmin < xmax && ymin < ymax) || [xmin, xmax, ymin, ymax].iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidDomain(format!(
                "[{xmin}, {xmax}] × [{ymin}, {ymax}] has no interior"
            )));
        }
        Ok(r)
    }

    pub fn square(half: f64) -> Rect {
        Rect {
            xmin: -half,
            xmax: half,
            ymin: -half,
            ymax: half,
        }
    }

    pub fn contains(&self, x: f64, y: f64) -> bool {
        x > self.xmin && x < self.xmax && y > self.ymin && y < self.ymax
    }

    pub fn contains_with_margin(&self, x: f64, y: f64, margin: f64) -> bool {
        x - margin > self.xmin && x + margin < self.xmax && y - margin > self.ymin && y + margin < self.ymax
    }

    pub fn diameter(&self) -> f64 {
        (self.xmax - self.xmin).hypot(self.ymax - self.ymin)
    }

    /// Point at fractional position `(s, t) ∈ [0, 1]²`.
    pub fn lerp(&self, s: f64, t: f64) -> (f64, f64) {
        (
            self.xmin + s * (self.xmax - self.xmin),
            self.ymin + t * (self.ymax - self.ymin),
        )
    }

    /// Centres of an `n × m` grid of cells.
    pub fn cell_centres(&self, n: usize, m: usize) -> Vec<(f64, f64)> {
        let mut out = Vec::with_capacity(n * m);
        for i in 0..n {
            for j in 0..m {
                out.push(self.lerp((i as f64 + 0.5) / n as f64, (j as f64 + 0.5) / m as f64));
            }
        }
        out
    }
}

/// Second-order jets of `λ`, `a`, `b` in `(x, y)`.
#[derive(Debug, Clone, Copy)]
pub struct FieldJets {
    pub lambda: Jet,
    pub a: Jet,
    pub b: Jet,
}

/// Source of the defining functions of a canonical model.
pub trait CanonicalModel {
    fn domain(&self) -> &Rect;

    fn label(&self) -> &str;

    /// Jets of `(λ, a, b)` at `(x, y)`. No domain check.
    fn fields(&self, x: f64, y: f64) -> Result<FieldJets>;

    /// Plain values of `(λ, a, b)`; the finite-difference oracles only use
    /// this entry point.
    fn values(&self, x: f64, y: f64) -> Result<[f64; 3]> {
        let f = self.fields(x, y)?;
        Ok([f.lambda.value(), f.a.value(), f.b.value()])
    }
}

/// The canonical example given by expressions `λ, a, b` in `x, y`.
#[derive(Debug, Clone)]
pub struct KillingData {
    pub lambda: Expr,
    pub a: Expr,
    pub b: Expr,
    pub domain: Rect,
    pub label: String,
}

const VALIDATION_GRID: usize = 12;

impl KillingData {
    /// Validates `λ > 0` on a grid of sample points of `domain`.
    pub fn new(lambda: Expr, a: Expr, b: Expr, domain: Rect, label: impl Into<String>) -> Result<Self> {
        for e in [&lambda, &a, &b] {
            if e.vars().len() != 2 {
                return Err(Error::InvalidConfig(format!(
                    "model functions must be declared in (x, y), got {:?}",
                    e.vars()
                )));
            }
        }
        let data = KillingData {
            lambda,
            a,
            b,
            domain: Rect::new(domain.xmin, domain.xmax, domain.ymin, domain.ymax)?,
            label: label.into(),
        };
        for (x, y) in data.domain.cell_centres(VALIDATION_GRID, VALIDATION_GRID) {
            let value = data.lambda.eval(&[x, y])?;
            if !(value > 0.0) {
                return Err(Error::NonPositiveLambda { x, y, value });
            }
        }
        Ok(data)
    }

    pub fn from_strs(lambda: &str, a: &str, b: &str, domain: Rect) -> Result<Self> {
        let vars = ["x", "y"];
        KillingData::new(
            Expr::parse(lambda, &vars)?,
            Expr::parse(a, &vars)?,
            Expr::parse(b, &vars)?,
            domain,
            format!("λ = {lambda}, a = {a}, b = {b}"),
        )
    }

    /// Flat product `ℝ² × ℝ`.
    pub fn flat(half: f64) -> Self {
        KillingData::from_strs("1", "0", "0", Rect::square(half)).expect("flat model is valid")
    }
}

impl CanonicalModel for KillingData {
    fn domain(&self) -> &Rect {
        &self.domain
    }

    fn label(&self) -> &str {
        &self.label
    }

    fn fields(&self, x: f64, y: f64) -> Result<FieldJets> {
        let p = [x, y];
        Ok(FieldJets {
            lambda: self.lambda.eval_jet(&p)?,
            a: self.a.eval_jet(&p)?,
            b: self.b.eval_jet(&p)?,
        })
    }

    fn values(&self, x: f64, y: f64) -> Result<[f64; 3]> {
        let p = [x, y];
        Ok([self.lambda.eval(&p)?, self.a.eval(&p)?, self.b.eval(&p)?])
    }
}

/// Default half-width of the rectangle used for `c ≥ 0`.
pub const BCV_DEFAULT_HALF: f64 = 2.0;

/// Bianchi–Cartan–Vranceanu space `E(c, μ)`: `λ = (1 + c(x² + y²)/4)⁻¹`,
/// `a = −μy`, `b = μx`.
///
/// For `c < 0` the disk `x² + y² < −4/c` is replaced by the square
/// inscribed in 95% of it.
pub fn bcv(c: f64, mu: f64) -> KillingData {
    let half = if c < 0.0 {
        0.95 * (2.0 / (-c).sqrt()) / std::f64::consts::SQRT_2
    } else {
        BCV_DEFAULT_HALF
    };
    bcv_on(c, mu, Rect::square(half)).expect("BCV data are valid")
}

/// [`bcv`] on an explicit rectangle.
pub fn bcv_on(c: f64, mu: f64, domain: Rect) -> Result<KillingData> {
    let vars = ["x", "y"];
    let lambda = Expr::parse(&format!("1/(1 + ({c:?}/4)*(x^2 + y^2))"), &vars)?;
    let a = Expr::parse(&format!("-({mu:?})*y"), &vars)?;
    let b = Expr::parse(&format!("({mu:?})*x"), &vars)?;
    KillingData::new(lambda, a, b, domain, format!("BCV(c = {c}, μ = {mu})"))
}

/// Scalars of the base at one point: conformal factor, bundle curvature,
/// its gradient and the Gaussian curvature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BaseData {
    pub lambda: f64,
    pub lambda_x: f64,
    pub lambda_y: f64,
    pub r: f64,
    /// `(r_x, r_y)` in coordinates.
    pub r_grad: [f64; 2],
    pub gauss: f64,
}

impl BaseData {
    /// `(E1(r), E2(r)) = (r_x/λ, r_y/λ)`.
    pub fn frame_dr(&self) -> [f64; 2] {
        [self.r_grad[0] / self.lambda, self.r_grad[1] / self.lambda]
    }

    /// Ambient gradient of `r` (horizontal).
    pub fn grad_r(&self) -> Vec3 {
        let [e1, e2] = self.frame_dr();
        Vec3::new(e1, e2, 0.0)
    }

    pub fn grad_r_norm(&self) -> f64 {
        self.grad_r().norm()
    }

    /// Directional derivative `v(r)` for a frame vector `v`.
    pub fn dr(&self, v: &Vec3) -> f64 {
        self.grad_r().dot(v)
    }
}

fn check_domain<M: CanonicalModel + ?Sized>(model: &M, x: f64, y: f64) -> Result<()> {
    if model.domain().contains(x, y) {
        Ok(())
    } else {
        Err(Error::OutsideDomain { x, y })
    }
}

/// `r = ((λb)_x − (λa)_y) / (2λ²)` from exact jets, without domain check.
fn r_formula(f: &FieldJets) -> f64 {
    let (l, a, b) = (&f.lambda, &f.a, &f.b);
    let lb_x = l.d(0) * b.value() + l.value() * b.d(0);
    let la_y = l.d(1) * a.value() + l.value() * a.d(1);
    (lb_x - la_y) / (2.0 * l.value() * l.value())
}

fn gauss_formula(f: &FieldJets) -> f64 {
    let l = &f.lambda;
    let v = l.value();
    let lap_log = (l.dd(0, 0) + l.dd(1, 1)) / v - (l.d(0) * l.d(0) + l.d(1) * l.d(1)) / (v * v);
    -lap_log / (v * v)
}

/// Bundle curvature `r` and its coordinate gradient `(r_x, r_y)`.
///
/// The gradient differentiates the closed form of `r` numerically so the
/// jets stay second order.
pub fn bundle_curvature<M: CanonicalModel + ?Sized>(model: &M, x: f64, y: f64) -> Result<(f64, [f64; 2])> {
    check_domain(model, x, y)?;
    let r = r_formula(&model.fields(x, y)?);
    let r_at = |px: f64, py: f64| -> Result<f64> { Ok(r_formula(&model.fields(px, py)?)) };
    let rx = fd::d1(|s| r_at(s, y), x, fd::scaled_step(ORACLE_STEP, x))?;
    let ry = fd::d1(|s| r_at(x, s), y, fd::scaled_step(ORACLE_STEP, y))?;
    Ok((r, [rx, ry]))
}

/// Gaussian curvature `G = −Δ₀(log λ)/λ²` of the base.
pub fn gauss_curvature<M: CanonicalModel + ?Sized>(model: &M, x: f64, y: f64) -> Result<f64> {
    check_domain(model, x, y)?;
    Ok(gauss_formula(&model.fields(x, y)?))
}

/// All base scalars at `(x, y)`.
pub fn base_data<M: CanonicalModel + ?Sized>(model: &M, x: f64, y: f64) -> Result<BaseData> {
    check_domain(model, x, y)?;
    let f = model.fields(x, y)?;
    let (r, r_grad) = bundle_curvature(model, x, y)?;
    Ok(BaseData {
        lambda: f.lambda.value(),
        lambda_x: f.lambda.d(0),
        lambda_y: f.lambda.d(1),
        r,
        r_grad,
        gauss: gauss_formula(&f),
    })
}

/// The frame `{E1, E2, E3}` at a point, in coordinate components.
#[derive(Debug, Clone, Copy)]
pub struct FramePoint {
    pub point: [f64; 3],
    pub lambda: Jet,
    pub a: Jet,
    pub b: Jet,
    /// `e[i]` holds the `(∂x, ∂y, ∂z)` components of `E_{i+1}`.
    pub e: [[f64; 3]; 3],
}

impl FramePoint {
    /// Gram matrix of the frame under the coordinate metric.
    pub fn gram(&self) -> Mat3 {
        let g = coordinate_metric_from(self.lambda.value(), self.a.value(), self.b.value());
        std::array::from_fn(|i| {
            std::array::from_fn(|j| {
                (0..3)
                    .flat_map(|k| (0..3).map(move |l| (k, l)))
                    .map(|(k, l)| self.e[i][k] * g[k][l] * self.e[j][l])
                    .sum()
            })
        })
    }
}

pub(crate) fn frame_components(lambda: f64, a: f64, b: f64) -> [[f64; 3]; 3] {
    [[1.0 / lambda, 0.0, a], [0.0, 1.0 / lambda, b], [0.0, 0.0, 1.0]]
}

pub(crate) fn coordinate_metric_from(lambda: f64, a: f64, b: f64) -> Mat3 {
    let l2 = lambda * lambda;
    [
        [l2 + l2 * a * a, l2 * a * b, -lambda * a],
        [l2 * a * b, l2 + l2 * b * b, -lambda * b],
        [-lambda * a, -lambda * b, 1.0],
    ]
}

pub fn frame<M: CanonicalModel + ?Sized>(model: &M, p: [f64; 3]) -> Result<FramePoint> {
    check_domain(model, p[0], p[1])?;
    let f = model.fields(p[0], p[1])?;
    Ok(FramePoint {
        point: p,
        lambda: f.lambda,
        a: f.a,
        b: f.b,
        e: frame_components(f.lambda.value(), f.a.value(), f.b.value()),
    })
}

/// Frame components of the coordinate vector `v^x ∂x + v^y ∂y + v^z ∂z`.
pub fn coords_to_frame(lambda: f64, a: f64, b: f64, v: [f64; 3]) -> Vec3 {
    Vec3::new(
        lambda * v[0],
        lambda * v[1],
        v[2] - lambda * (a * v[0] + b * v[1]),
    )
}

/// Coordinate components of a frame vector.
pub fn frame_to_coords(lambda: f64, a: f64, b: f64, v: &Vec3) -> [f64; 3] {
    [v[0] / lambda, v[1] / lambda, a * v[0] + b * v[1] + v[2]]
}

/// Anticlockwise quarter turn of the horizontal part: `(v1, v2, v3) ↦ (−v2, v1, 0)`.
pub fn rotate_j(v: &Vec3) -> Vec3 {
    Vec3::new(-v[1], v[0], 0.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn assert_close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "{a} vs {b} (tol {tol})");
    }

    #[test]
    fn bcv_bundle_curvature_is_mu() {
        for (c, mu) in [(1.0, 1.0), (-1.0, 0.3), (0.0, 0.5)] {
            let m = bcv(c, mu);
            for (x, y) in [(0.0, 0.0), (0.3, -0.4), (-0.7, 0.2)] {
                let (r, g) = bundle_curvature(&m, x, y).unwrap();
                assert_close(r, mu, 1e-12);
                assert_close(g[0], 0.0, 1e-9);
                assert_close(g[1], 0.0, 1e-9);
                assert_close(gauss_curvature(&m, x, y).unwrap(), c, 1e-12);
            }
        }
    }

    #[test]
    fn integrable_models_have_zero_bundle_curvature() {
        let m = bcv(2.0, 0.0);
        assert_eq!(bundle_curvature(&m, 0.5, 0.5).unwrap().0, 0.0);
        let flat = KillingData::flat(1.0);
        assert_eq!(bundle_curvature(&flat, 0.2, 0.1).unwrap().0, 0.0);
        assert_eq!(gauss_curvature(&flat, 0.2, 0.1).unwrap(), 0.0);
    }

    #[test]
    fn constant_half_bundle_curvature() {
        let m = KillingData::from_strs("1", "0", "x", Rect::square(1.0)).unwrap();
        let (r, g) = bundle_curvature(&m, 0.3, 0.7).unwrap();
        assert_eq!(r, 0.5);
        assert_close(g[0], 0.0, 1e-12);
        assert_close(g[1], 0.0, 1e-12);
    }

    #[test]
    fn gaussian_conformal_factor() {
        let m = KillingData::from_strs("exp(-(x^2+y^2)/4)", "0", "0", Rect::square(2.0)).unwrap();
        let (x, y) = (0.4, -1.1);
        assert_close(gauss_curvature(&m, x, y).unwrap(), ((x * x + y * y) / 2.0f64).exp(), 1e-12);
        // finite-difference Laplacian of log λ as an independent route
        let h = 1e-3;
        let log_l = |px: f64, py: f64| -> f64 { m.lambda.eval(&[px, py]).unwrap().ln() };
        let lap = (log_l(x + h, y) + log_l(x - h, y) + log_l(x, y + h) + log_l(x, y - h) - 4.0 * log_l(x, y)) / (h * h);
        let lam = m.lambda.eval(&[x, y]).unwrap();
        assert_close(gauss_curvature(&m, x, y).unwrap(), -lap / (lam * lam), 1e-5);
    }

    #[test]
    fn domain_is_enforced() {
        let m = bcv(1.0, 1.0);
        assert!(matches!(bundle_curvature(&m, 3.0, 0.0), Err(Error::OutsideDomain { .. })));
        assert!(frame(&m, [0.0, 5.0, 0.0]).is_err());
        assert!(Rect::new(1.0, 1.0, 0.0, 1.0).is_err());
        assert!(matches!(
            KillingData::from_strs("x", "0", "0", Rect::square(1.0)),
            Err(Error::NonPositiveLambda { .. })
        ));
    }

    #[test]
    fn frames_of_simple_models() {
        let flat = KillingData::flat(1.0);
        let f = frame(&flat, [0.1, 0.2, 3.0]).unwrap();
        assert_eq!(f.e, [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]);
        let heis = bcv(0.0, 0.5);
        let f = frame(&heis, [0.0, 0.0, 0.0]).unwrap();
        assert_eq!(f.e, [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]);
        let m = KillingData::from_strs("2", "1", "0", Rect::square(1.0)).unwrap();
        let f = frame(&m, [0.0, 0.0, 0.0]).unwrap();
        assert_eq!(f.e[0], [0.5, 0.0, 1.0]);
    }

    #[test]
    fn frame_is_orthonormal() {
        let m = KillingData::from_strs("exp(-(x^2+y^2)/4)", "sin(y)", "x*y", Rect::square(1.5)).unwrap();
        for p in [[0.3, -0.2, 1.0], [-1.2, 1.0, -4.0]] {
            let g = frame(&m, p).unwrap().gram();
            for i in 0..3 {
                for j in 0..3 {
                    assert_close(g[i][j], if i == j { 1.0 } else { 0.0 }, 1e-12);
                }
            }
        }
    }

    #[test]
    fn rotation_j() {
        assert_eq!(rotate_j(&Vec3::E1), Vec3::E2);
        assert_eq!(rotate_j(&Vec3::E3), Vec3::ZERO);
        let (x, y) = (Vec3::new(0.3, -1.2, 0.7), Vec3::new(2.0, 0.5, -0.4));
        assert_close(x.dot(&rotate_j(&y.horizontal())), -y.dot(&rotate_j(&x.horizontal())), 1e-15);
    }

    #[test]
    fn coordinate_frame_conversion_round_trips() {
        let v = [0.3, -0.5, 1.25];
        let f = coords_to_frame(1.7, -0.2, 0.9, v);
        let back = frame_to_coords(1.7, -0.2, 0.9, &f);
        for i in 0..3 {
            assert_close(back[i], v[i], 1e-15);
        }
    }
}
