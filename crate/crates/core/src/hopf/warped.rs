//! Rotationally symmetric bases `dt² + f(t)² dθ²` with constant bundle
//! curvature, and the parallel circles `t = t0` that give proper
//! biharmonic Hopf cylinders.

use super::report::{hopf_residuals, HopfReport};
use super::{arclength_reparam, BaseChart, BaseCurve};
use crate::config::Tolerances;
use crate::expr::{Expr, Jet};
use crate::geometry::{CanonicalModel, FieldJets, Rect};
use crate::linalg::Mat2;
use crate::quad;
use crate::roots;
use crate::{Error, Result};
use std::f64::consts::PI;

const PROFILE_CHECKS: usize = 256;
const ROOT_SAMPLES: usize = 1024;
const TABLE_PANELS: usize = 512;
/// Fraction of the interval trimmed from each end before tabulating.
const END_TRIM: f64 = 1e-3;

/// A positive warping function `f(t)` on an open interval.
#[derive(Debug, Clone)]
pub struct WarpedProfile {
    pub f: Expr,
    pub interval: (f64, f64),
}

impl WarpedProfile {
    pub fn new(f: Expr, interval: (f64, f64)) -> Result<Self> {
        if f.vars().len() != 1 {
            return Err(Error::InvalidConfig("warping function must have one variable".into()));
        }
        let (lo, hi) = interval;
        if !(lo < hi) {
            return Err(Error::InvalidDomain(format!("empty interval {interval:?}")));
        }
        for i in 0..PROFILE_CHECKS {
            let t = lo + (i as f64 + 0.5) * (hi - lo) / PROFILE_CHECKS as f64;
            let value = f.eval(&[t])?;
            if !(value > 0.0) {
                return Err(Error::NonPositiveWarp { t, value });
            }
        }
        Ok(WarpedProfile { f, interval })
    }

    pub fn from_str(f: &str, var: &str, interval: (f64, f64)) -> Result<Self> {
        WarpedProfile::new(Expr::parse(f, &[var])?, interval)
    }

    /// `(f, f', f'')` at `t`.
    pub fn jet(&self, t: f64) -> Result<[f64; 3]> {
        let j = self.f.eval_jet(&[t])?;
        let value = j.value();
        if !(value > 0.0) {
            return Err(Error::NonPositiveWarp { t, value });
        }
        Ok([value, j.d(0), j.dd(0, 0)])
    }

    /// `f (f'' + 4r² f) + f'²`, whose zeros are the biharmonic parallels.
    pub fn condition(&self, t: f64, r: f64) -> Result<f64> {
        let [f, f1, f2] = self.jet(t)?;
        Ok(f * (f2 + 4.0 * r * r * f) + f1 * f1)
    }

    fn trimmed(&self) -> (f64, f64) {
        let (lo, hi) = self.interval;
        let d = END_TRIM * (hi - lo);
        (lo + d, hi - d)
    }
}

/// The base in the chart `(t, θ)` itself.
#[derive(Debug, Clone)]
pub struct WarpedChart {
    pub profile: WarpedProfile,
}

impl BaseChart for WarpedChart {
    fn contains(&self, t: f64, _theta: f64) -> bool {
        self.profile.interval.0 < t && t < self.profile.interval.1
    }

    fn metric(&self, t: f64, _theta: f64) -> Result<Mat2> {
        let f = self.profile.jet(t)?[0];
        Ok([[1.0, 0.0], [0.0, f * f]])
    }

    fn christoffel(&self, t: f64, _theta: f64) -> Result<[[[f64; 2]; 2]; 2]> {
        let [f, f1, _] = self.profile.jet(t)?;
        Ok([[[0.0, 0.0], [0.0, -f * f1]], [[0.0, f1 / f], [f1 / f, 0.0]]])
    }
}

/// Canonical model over `dt² + f² dθ²` with constant bundle curvature `r`,
/// written in isothermal coordinates `(u, θ)`, `u = ∫_{t_ref}^t dτ/f`:
/// `λ = f`, `a = 0`, `b = 2r F / f` with `F = ∫_{t_ref}^t f`.
#[derive(Debug, Clone)]
pub struct WarpedModel {
    profile: WarpedProfile,
    r: f64,
    t_ref: f64,
    nodes: Vec<f64>,
    u_nodes: Vec<f64>,
    area_nodes: Vec<f64>,
    domain: Rect,
    label: String,
}

impl WarpedModel {
    pub fn new(profile: WarpedProfile, r: f64, t_ref: f64) -> Result<Self> {
        let (lo, hi) = profile.trimmed();
        if !(lo < t_ref && t_ref < hi) {
            return Err(Error::InvalidConfig(format!("reference point {t_ref} outside ({lo}, {hi})")));
        }
        let width = (hi - lo) / TABLE_PANELS as f64;
        let nodes: Vec<f64> = (0..=TABLE_PANELS).map(|k| lo + k as f64 * width).collect();
        let inv_f = |t: f64| Ok::<f64, Error>(1.0 / profile.jet(t)?[0]);
        let f = |t: f64| Ok::<f64, Error>(profile.jet(t)?[0]);
        let u0 = quad::integrate(inv_f, lo, t_ref, width)?;
        let a0 = quad::integrate(f, lo, t_ref, width)?;
        let (mut u_nodes, mut area_nodes) = (vec![-u0], vec![-a0]);
        for w in nodes.windows(2) {
            u_nodes.push(u_nodes[u_nodes.len() - 1] + quad::integrate(inv_f, w[0], w[1], width)?);
            area_nodes.push(area_nodes[area_nodes.len() - 1] + quad::integrate(f, w[0], w[1], width)?);
        }
        let domain = Rect::new(u_nodes[0], u_nodes[TABLE_PANELS], 0.0, 2.0 * PI)?;
        let label = format!("warped(f = {}, r = {r})", profile.f);
        Ok(WarpedModel {
            profile,
            r,
            t_ref,
            nodes,
            u_nodes,
            area_nodes,
            domain,
            label,
        })
    }

    pub fn profile(&self) -> &WarpedProfile {
        &self.profile
    }

    pub fn t_ref(&self) -> f64 {
        self.t_ref
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    fn panel(&self, table: &[f64], value: f64) -> usize {
        table.partition_point(|&v| v <= value).clamp(1, table.len() - 1) - 1
    }

    /// `t` with `u(t) = u`.
    pub fn t_of_u(&self, u: f64) -> Result<f64> {
        let k = self.panel(&self.u_nodes, u);
        let (t0, t1) = (self.nodes[k], self.nodes[k + 1]);
        let (u0, u1) = (self.u_nodes[k], self.u_nodes[k + 1]);
        let mut t = t0 + (u - u0) / (u1 - u0) * (t1 - t0);
        for _ in 0..30 {
            let ut = u0 + quad::integrate(|x| Ok::<f64, Error>(1.0 / self.profile.jet(x)?[0]), t0, t, t1 - t0)?;
            let step = (ut - u) * self.profile.jet(t)?[0];
            t -= step;
            if step.abs() <= 1e-15 * (1.0 + t.abs()) {
                break;
            }
        }
        Ok(t)
    }

    /// `F(t) = ∫_{t_ref}^t f`.
    pub fn area(&self, t: f64) -> Result<f64> {
        let k = self.panel(&self.nodes, t);
        let t0 = self.nodes[k];
        let w = self.nodes[1] - self.nodes[0];
        Ok(self.area_nodes[k] + quad::integrate(|x| Ok::<f64, Error>(self.profile.jet(x)?[0]), t0, t, w)?)
    }
}

impl CanonicalModel for WarpedModel {
    fn domain(&self) -> &Rect {
        &self.domain
    }

    fn label(&self) -> &str {
        &self.label
    }

    fn fields(&self, u: f64, _theta: f64) -> Result<FieldJets> {
        let t = self.t_of_u(u)?;
        let [f, f1, f2] = self.profile.jet(t)?;
        let area = self.area(t)?;
        let r = self.r;
        // d/du = f d/dt
        let lambda = Jet::from_parts(f, &[f * f1, 0.0], &[&[f * (f * f2 + f1 * f1), 0.0], &[0.0, 0.0]]);
        let b = Jet::from_parts(
            2.0 * r * area / f,
            &[2.0 * r * (f * f - area * f1) / f, 0.0],
            &[&[-2.0 * r * area * (f2 * f - f1 * f1) / f, 0.0], &[0.0, 0.0]],
        );
        Ok(FieldJets {
            lambda,
            a: Jet::constant(2, 0.0),
            b,
        })
    }
}

/// One biharmonic parallel `t = t0`.
#[derive(Debug, Clone)]
pub struct ExampleRoot {
    pub t0: f64,
    /// `f'(t0)/f(t0)`.
    pub kappa_closed: f64,
    /// Geodesic curvature computed in the `(t, θ)` chart.
    pub kappa_chart: f64,
    /// `−f''(t0)/f(t0)`.
    pub gauss_closed: f64,
    /// `κ² − (G − 4r²)` from the closed values.
    pub kappa_sq_residual: f64,
    /// The parallel as an arc-length curve in the isothermal chart.
    pub curve: BaseCurve,
    pub report: HopfReport,
}

#[derive(Debug, Clone)]
pub struct ExampleReport {
    pub r: f64,
    pub roots: Vec<ExampleRoot>,
}

/// Finds every zero of `f(f'' + 4r²f) + f'²` in the interval and checks
/// the Hopf cylinder over each parallel.
pub fn example_construct(profile: &WarpedProfile, r: f64, samples: usize, tol: &Tolerances) -> Result<ExampleReport> {
    let (lo, hi) = profile.trimmed();
    let ts = roots::scan_roots(|t| profile.condition(t, r), lo, hi, ROOT_SAMPLES, 1e-15)?;
    let mut out = Vec::with_capacity(ts.len());
    for t0 in ts {
        let [f, f1, f2] = profile.jet(t0)?;
        let (kappa_closed, gauss_closed) = (f1 / f, -f2 / f);
        let length = PI * f;
        let theta = format!("s/{f:?} + {:?}", PI / 2.0);

        let chart = WarpedChart {
            profile: profile.clone(),
        };
        let direct = BaseCurve::from_strs(&format!("{t0:?}"), &theta, "s", (0.0, length))?;
        let kappa_chart = arclength_reparam(&direct, &chart)?.geodesic_curvature(0.5 * length)?;

        let model = WarpedModel::new(profile.clone(), r, t0)?;
        let curve = BaseCurve::from_strs("0", &theta, "s", (0.0, length))?;
        let report = hopf_residuals(&model, &curve, samples, tol)?;
        out.push(ExampleRoot {
            t0,
            kappa_closed,
            kappa_chart,
            gauss_closed,
            kappa_sq_residual: kappa_closed * kappa_closed - (gauss_closed - 4.0 * r * r),
            curve,
            report,
        });
    }
    Ok(ExampleReport { r, roots: out })
}
