//! Base curves, their geodesic curvature, and Hopf cylinders
//! `π⁻¹(α)` over them.
//!
//! Orientation: the curve normal is `n = Jα'` (anticlockwise rotation in
//! the chart), so anticlockwise circles have positive geodesic curvature.
//! On the Hopf cylinder this corresponds to the frame `e1` = horizontal lift
//! of `α'`, `e2 = −ξ`, `η = J e1`, which is positively oriented and gives
//! `H = κ_g` and `τ_g = −r`.

mod report;
mod warped;

use crate::expr::Expr;
use crate::geometry::{CanonicalModel, Rect};
use crate::linalg::{det2, Mat2};
use crate::quad;
use crate::roots;
use crate::{Error, Result};

pub use report::{classify_hopf, hopf_residuals, HopfReport, HopfSample, HopfVerdict, DEFAULT_SAMPLES};
pub use warped::{example_construct, ExampleReport, ExampleRoot, WarpedChart, WarpedModel, WarpedProfile};

/// Squared speed below which a curve counts as singular.
pub const MIN_SPEED_SQ: f64 = 1e-12;

/// Allowed deviation of `|α'|²` from 1 for an arc-length curve.
pub const ARC_LENGTH_TOL: f64 = 1e-8;

const ARC_PANELS: usize = 256;

/// A two-dimensional chart with a Riemannian metric.
pub trait BaseChart {
    fn contains(&self, x: f64, y: f64) -> bool;

    fn metric(&self, x: f64, y: f64) -> Result<Mat2>;

    /// `Γ^k_{ij}` as `gamma[k][i][j]`.
    fn christoffel(&self, x: f64, y: f64) -> Result<[[[f64; 2]; 2]; 2]>;
}

/// The base `(Ω, λ²(dx² + dy²))` of a canonical model.
#[derive(Debug, Clone, Copy)]
pub struct ConformalChart<'a, M: ?Sized>(pub &'a M);

impl<M: CanonicalModel + ?Sized> BaseChart for ConformalChart<'_, M> {
    fn contains(&self, x: f64, y: f64) -> bool {
        self.0.domain().contains(x, y)
    }

    fn metric(&self, x: f64, y: f64) -> Result<Mat2> {
        let l = self.0.values(x, y)?[0];
        Ok([[l * l, 0.0], [0.0, l * l]])
    }

    fn christoffel(&self, x: f64, y: f64) -> Result<[[[f64; 2]; 2]; 2]> {
        let f = self.0.fields(x, y)?;
        let l = &f.lambda;
        let dlog = [l.d(0) / l.value(), l.d(1) / l.value()];
        // Γ^k_ij = δ^k_i ∂_j log λ + δ^k_j ∂_i log λ − δ_ij ∂_k log λ
        let delta = |a: usize, b: usize| if a == b { 1.0 } else { 0.0 };
        Ok(std::array::from_fn(|k| {
            std::array::from_fn(|i| {
                std::array::from_fn(|j| delta(k, i) * dlog[j] + delta(k, j) * dlog[i] - delta(i, j) * dlog[k])
            })
        }))
    }
}

/// A curve `t ↦ (x(t), y(t))` in a chart, given by one-variable expressions.
#[derive(Debug, Clone)]
pub struct BaseCurve {
    pub x: Expr,
    pub y: Expr,
    pub interval: (f64, f64),
}

/// Position, velocity and acceleration in chart coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurveJet {
    pub pos: [f64; 2],
    pub vel: [f64; 2],
    pub acc: [f64; 2],
}

impl BaseCurve {
    pub fn new(x: Expr, y: Expr, interval: (f64, f64)) -> Result<Self> {
        if x.vars().len() != 1 || x.vars() != y.vars() {
            return Err(Error::InvalidConfig("curve components must share one parameter".into()));
        }
        if !(interval.0 < interval.1) {
            return Err(Error::InvalidDomain(format!("empty parameter interval {interval:?}")));
        }
        Ok(BaseCurve { x, y, interval })
    }

    pub fn from_strs(x: &str, y: &str, var: &str, interval: (f64, f64)) -> Result<Self> {
        BaseCurve::new(Expr::parse(x, &[var])?, Expr::parse(y, &[var])?, interval)
    }

    /// Anticlockwise circle of Euclidean radius `radius` about `centre`,
    /// over one full turn.
    pub fn circle(centre: [f64; 2], radius: f64) -> Result<Self> {
        BaseCurve::from_strs(
            &format!("{:?} + {radius:?}*cos(t)", centre[0]),
            &format!("{:?} + {radius:?}*sin(t)", centre[1]),
            "t",
            (0.0, 2.0 * std::f64::consts::PI),
        )
    }

    pub fn eval(&self, t: f64) -> Result<CurveJet> {
        let (x, y) = (self.x.eval_jet(&[t])?, self.y.eval_jet(&[t])?);
        Ok(CurveJet {
            pos: [x.value(), y.value()],
            vel: [x.d(0), y.d(0)],
            acc: [x.dd(0, 0), y.dd(0, 0)],
        })
    }

    pub fn length(&self) -> f64 {
        self.interval.1 - self.interval.0
    }
}

fn quadratic(g: &Mat2, v: &[f64; 2], w: &[f64; 2]) -> f64 {
    (0..2).flat_map(|i| (0..2).map(move |j| (i, j))).map(|(i, j)| g[i][j] * v[i] * w[j]).sum()
}

/// Speed `|α'(t)|` in the chart metric; errors if the curve leaves the
/// chart or is singular.
pub fn speed<C: BaseChart + ?Sized>(chart: &C, curve: &BaseCurve, t: f64) -> Result<f64> {
    let j = curve.eval(t)?;
    if !chart.contains(j.pos[0], j.pos[1]) {
        return Err(Error::CurveExitsDomain { t });
    }
    let speed_sq = quadratic(&chart.metric(j.pos[0], j.pos[1])?, &j.vel, &j.vel);
    if !(speed_sq > MIN_SPEED_SQ) {
        return Err(Error::DegenerateCurve { t, speed_sq });
    }
    Ok(speed_sq.sqrt())
}

/// Signed geodesic curvature `⟨D_t α', Jα'⟩ / |α'|³` at parameter `t`
/// (any regular parametrisation).
pub fn geodesic_curvature_at<C: BaseChart + ?Sized>(chart: &C, curve: &BaseCurve, t: f64) -> Result<f64> {
    let j = curve.eval(t)?;
    let sigma = speed(chart, curve, t)?;
    let (x, y) = (j.pos[0], j.pos[1]);
    let g = chart.metric(x, y)?;
    let gamma = chart.christoffel(x, y)?;
    let v = j.vel;
    let acc: [f64; 2] = std::array::from_fn(|k| j.acc[k] + quadratic(&gamma[k], &v, &v));
    Ok(det2(&g).sqrt() * (v[0] * acc[1] - v[1] * acc[0]) / sigma.powi(3))
}

/// A curve together with its arc-length function `s(t)`, tabulated by
/// composite Gauss–Legendre quadrature and inverted by Newton's method.
#[derive(Debug, Clone)]
pub struct ArcLengthCurve<'c, C: ?Sized> {
    chart: &'c C,
    curve: BaseCurve,
    nodes: Vec<f64>,
    cumulative: Vec<f64>,
}

/// Reparametrises `curve` by arc length in `chart`.
pub fn arclength_reparam<'c, C: BaseChart + ?Sized>(curve: &BaseCurve, chart: &'c C) -> Result<ArcLengthCurve<'c, C>> {
    let (a, b) = curve.interval;
    let width = (b - a) / ARC_PANELS as f64;
    let nodes: Vec<f64> = (0..=ARC_PANELS).map(|k| a + k as f64 * width).collect();
    let mut cumulative = Vec::with_capacity(nodes.len());
    cumulative.push(0.0);
    for w in nodes.windows(2) {
        let piece = quad::integrate(|t| speed(chart, curve, t), w[0], w[1], width)?;
        cumulative.push(cumulative.last().copied().unwrap_or(0.0) + piece);
    }
    Ok(ArcLengthCurve {
        chart,
        curve: curve.clone(),
        nodes,
        cumulative,
    })
}

impl<C: BaseChart + ?Sized> ArcLengthCurve<'_, C> {
    pub fn length(&self) -> f64 {
        self.cumulative.last().copied().unwrap_or(0.0)
    }

    pub fn curve(&self) -> &BaseCurve {
        &self.curve
    }

    pub fn chart(&self) -> &C {
        self.chart
    }

    /// Original parameter `t` at arc length `s ∈ [0, L]`.
    pub fn t_of_s(&self, s: f64) -> Result<f64> {
        let total = self.length();
        if !(0.0..=total).contains(&s) {
            return Err(Error::InvalidConfig(format!("arc length {s} outside [0, {total}]")));
        }
        let k = self.cumulative.partition_point(|&c| c <= s).clamp(1, self.nodes.len() - 1) - 1;
        let (s0, s1) = (self.cumulative[k], self.cumulative[k + 1]);
        let (t0, t1) = (self.nodes[k], self.nodes[k + 1]);
        let mut t = t0 + (s - s0) / (s1 - s0) * (t1 - t0);
        for _ in 0..20 {
            let f = s0 + quad::integrate(|x| speed(self.chart, &self.curve, x), t0, t, t1 - t0)? - s;
            let step = f / speed(self.chart, &self.curve, t)?;
            t = (t - step).clamp(t0, t1);
            if step.abs() <= 1e-15 * (1.0 + t.abs()) {
                break;
            }
        }
        Ok(t)
    }

    /// Point, unit tangent and speed factor at arc length `s`.
    pub fn at(&self, s: f64) -> Result<ArcPoint> {
        let t = self.t_of_s(s)?;
        let j = self.curve.eval(t)?;
        let sigma = speed(self.chart, &self.curve, t)?;
        Ok(ArcPoint {
            s,
            t,
            pos: j.pos,
            tangent: [j.vel[0] / sigma, j.vel[1] / sigma],
            sigma,
        })
    }

    /// `|dα/ds|²` at arc length `s` (1 up to quadrature error).
    pub fn speed_sq(&self, s: f64) -> Result<f64> {
        let p = self.at(s)?;
        Ok(quadratic(&self.chart.metric(p.pos[0], p.pos[1])?, &p.tangent, &p.tangent))
    }

    /// Geodesic curvature at arc length `s`.
    pub fn geodesic_curvature(&self, s: f64) -> Result<f64> {
        let speed_sq = self.speed_sq(s)?;
        if (speed_sq - 1.0).abs() > ARC_LENGTH_TOL {
            return Err(Error::NotArcLength { speed_sq });
        }
        geodesic_curvature_at(self.chart, &self.curve, self.t_of_s(s)?)
    }
}

/// A point of an arc-length curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArcPoint {
    pub s: f64,
    pub t: f64,
    pub pos: [f64; 2],
    /// `dα/ds` in chart coordinates.
    pub tangent: [f64; 2],
    /// `ds/dt`.
    pub sigma: f64,
}

/// Centred circle in `model` whose geodesic curvature is `kappa`, found by
/// root finding on the Euclidean radius inside the largest centred disk
/// of the domain.
pub fn circle_with_kg<M: CanonicalModel + ?Sized>(model: &M, kappa: f64) -> Result<BaseCurve> {
    let d: &Rect = model.domain();
    let reach = [-d.xmin, d.xmax, -d.ymin, d.ymax].into_iter().fold(f64::INFINITY, f64::min);
    if !(reach > 0.0) {
        return Err(Error::InvalidDomain("domain does not contain the origin".into()));
    }
    let chart = ConformalChart(model);
    let defect = |rho: f64| -> Result<f64> {
        let c = BaseCurve::circle([0.0, 0.0], rho)?;
        Ok(geodesic_curvature_at(&chart, &c, 0.0)? - kappa)
    };
    let samples = 256;
    let lo = reach * 1e-3;
    let hi = reach * 0.999;
    let mut prev = (lo, defect(lo)?);
    for k in 1..=samples {
        let rho = lo + (hi - lo) * k as f64 / samples as f64;
        let val = defect(rho)?;
        if val == 0.0 {
            return BaseCurve::circle([0.0, 0.0], rho);
        }
        if prev.1.signum() != val.signum() {
            let rho = roots::brent(defect, prev.0, rho, 1e-14)?;
            return BaseCurve::circle([0.0, 0.0], rho);
        }
        prev = (rho, val);
    }
    Err(Error::NoSignChange)
}
