use super::{arclength_reparam, geodesic_curvature_at, speed, BaseCurve, ConformalChart};
use crate::config::Tolerances;
use crate::fd;
use crate::geometry::{base_data, connection, ricci_at, rotate_j, CanonicalModel};
use crate::linalg::Vec3;
use crate::surface::SurfacePatch;
use crate::{Error, Result};

/// Number of arc-length samples used when none is given.
pub const DEFAULT_SAMPLES: usize = 64;

const T_STEP: f64 = 1e-3;

/// Everything evaluated at one arc-length sample of a Hopf cylinder.
#[derive(Debug, Clone, PartialEq)]
pub struct HopfSample {
    pub s: f64,
    pub t: f64,
    pub pos: [f64; 2],
    pub kappa: f64,
    pub kappa_s: f64,
    pub kappa_ss: f64,
    /// `τ_g = −⟨∇̄_{e1} e2, η⟩` from the connection table.
    pub tau: f64,
    /// Derivative of `τ_g` along the curve.
    pub tau_s: f64,
    pub r: f64,
    pub gauss: f64,
    /// `x' r_x + y' r_y`.
    pub r_along: f64,
    pub ric_eta: [f64; 3],
    /// Biharmonicity system specialised to Killing submersions:
    /// `[κ'' − κ³ + (G − 4r²)κ, κκ', r κ' + (x' r_x + y' r_y) κ]`.
    pub reduced: [f64; 3],
    /// The same system for a horizontal lift in a general Riemannian submersion:
    /// `[κ'' − κ(κ² + 2τ²) + κ Ric(η,η), 3κ'κ − κ Ric(η,e1), κ'τ' + κ Ric(η,e2)]`.
    pub general: [f64; 3],
    /// `[general₁ − reduced₁, general₂ − 3 reduced₂, general₃ + reduced₃ − κ'(τ' + r)]`,
    /// zero when the two systems are consistent.
    pub consistency: [f64; 3],
    /// Mean curvature of the Hopf cylinder from the surface module.
    pub surface_mean_curvature: Option<f64>,
}

/// Verdict on whether a Hopf cylinder is proper biharmonic.
#[derive(Debug, Clone, PartialEq)]
pub struct HopfVerdict {
    pub pass: bool,
    /// Whether `G − 4r² > 0`, i.e. some nonzero `κ_g` could satisfy `κ² = G − 4r²`.
    pub admissible: bool,
    pub kappa_mean: f64,
    pub r_mean: f64,
    pub gauss_mean: f64,
    /// Mean of `G − 4r²`.
    pub target: f64,
    /// `max |κ² − (G − 4r²)|`.
    pub defect: f64,
    /// Standard deviations of `κ`, `r`, `G`.
    pub spread: [f64; 3],
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HopfReport {
    pub length: f64,
    pub samples: Vec<HopfSample>,
    pub verdict: HopfVerdict,
    pub max_reduced: f64,
    pub max_consistency: f64,
    /// `max |τ_g + r|`.
    pub max_tau_defect: f64,
    /// `max |H − κ|` over samples where the surface check ran.
    pub max_mean_curvature_defect: Option<f64>,
}

fn max_abs<'a>(it: impl IntoIterator<Item = &'a f64>) -> f64 {
    it.into_iter().fold(0.0, |m, v| m.max(v.abs()))
}

fn mean_std(v: &[f64]) -> (f64, f64) {
    let n = v.len().max(1) as f64;
    let mean = v.iter().sum::<f64>() / n;
    (mean, (v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n).sqrt())
}

/// Samples the biharmonicity systems along `curve` at `samples` cell
/// midpoints of its arc length and classifies the Hopf cylinder.
pub fn hopf_residuals<M: CanonicalModel + Clone>(
    model: &M,
    curve: &BaseCurve,
    samples: usize,
    tol: &Tolerances,
) -> Result<HopfReport> {
    if samples < 2 {
        return Err(Error::InvalidConfig("at least two samples are needed".into()));
    }
    let chart = ConformalChart(model);
    let arc = arclength_reparam(curve, &chart)?;
    let length = arc.length();
    let h = T_STEP * curve.length();
    let kappa_t = |t: f64| geodesic_curvature_at(&chart, curve, t);
    let sigma_t = |t: f64| speed(&chart, curve, t);
    let tau_t = |t: f64| -> Result<f64> {
        let p = curve.eval(t)?.pos;
        Ok(-base_data(model, p[0], p[1])?.r)
    };
    let surface = SurfacePatch::hopf_cylinder(model.clone(), &curve.x, &curve.y, curve.interval, (-0.5, 0.5)).ok();

    let mut out = Vec::with_capacity(samples);
    for i in 0..samples {
        let s = (i as f64 + 0.5) * length / samples as f64;
        let p = arc.at(s)?;
        let t = p.t;
        let (sigma, sigma_1) = (p.sigma, fd::d1(sigma_t, t, h)?);
        let k = kappa_t(t)?;
        let k1 = fd::d1(kappa_t, t, h)?;
        let k2 = fd::d2(kappa_t, t, k, h)?;
        let kappa_s = k1 / sigma;
        let kappa_ss = (k2 * sigma - k1 * sigma_1) / sigma.powi(3);
        let tau_s = fd::d1(tau_t, t, h)? / sigma;

        let [x, y] = p.pos;
        let base = base_data(model, x, y)?;
        let l = base.lambda;
        let e1 = Vec3::new(l * p.tangent[0], l * p.tangent[1], 0.0);
        let e2 = -Vec3::E3;
        let eta = rotate_j(&e1);
        let table = connection(model, [x, y, 0.0])?;
        let tau = -table.nabla(&e1, &e2).dot(&eta);
        let ric = ricci_at(&base);
        let ric_eta = [ric.apply(&eta, &eta), ric.apply(&eta, &e1), ric.apply(&eta, &e2)];
        let (r, g) = (base.r, base.gauss);
        let r_along = p.tangent[0] * base.r_grad[0] + p.tangent[1] * base.r_grad[1];

        let reduced = [
            kappa_ss - k.powi(3) + (g - 4.0 * r * r) * k,
            k * kappa_s,
            r * kappa_s + r_along * k,
        ];
        let general = [
            kappa_ss - k * (k * k + 2.0 * tau * tau) + k * ric_eta[0],
            3.0 * kappa_s * k - k * ric_eta[1],
            kappa_s * tau_s + k * ric_eta[2],
        ];
        let consistency = [general[0] - reduced[0], general[1] - 3.0 * reduced[1], general[2] + reduced[2] - kappa_s * (tau_s + r)];
        let surface_mean_curvature = surface.as_ref().and_then(|sp| sp.mean_curvature([t, 0.0]).ok());
        out.push(HopfSample {
            s,
            t,
            pos: p.pos,
            kappa: k,
            kappa_s,
            kappa_ss,
            tau,
            tau_s,
            r,
            gauss: g,
            r_along,
            ric_eta,
            reduced,
            general,
            consistency,
            surface_mean_curvature,
        });
    }

    let verdict = classify_hopf(&out, tol);
    let h_defects: Vec<f64> = out
        .iter()
        .filter_map(|s| s.surface_mean_curvature.map(|hm| (hm - s.kappa).abs()))
        .collect();
    Ok(HopfReport {
        length,
        max_reduced: max_abs(out.iter().flat_map(|s| s.reduced.iter())),
        max_consistency: max_abs(out.iter().flat_map(|s| s.consistency.iter())),
        max_tau_defect: out.iter().map(|s| (s.tau + s.r).abs()).fold(0.0, f64::max),
        max_mean_curvature_defect: (h_defects.len() == out.len()).then(|| max_abs(&h_defects)),
        samples: out,
        verdict,
    })
}

/// A Hopf cylinder is proper biharmonic iff `κ`, `r`, `G` are constant
/// along the curve, `κ ≠ 0`, and `κ² = G − 4r²`.
pub fn classify_hopf(samples: &[HopfSample], tol: &Tolerances) -> HopfVerdict {
    let col = |f: fn(&HopfSample) -> f64| samples.iter().map(f).collect::<Vec<f64>>();
    let (kappa_mean, sk) = mean_std(&col(|s| s.kappa));
    let (r_mean, sr) = mean_std(&col(|s| s.r));
    let (gauss_mean, sg) = mean_std(&col(|s| s.gauss));
    let (target, _) = mean_std(&col(|s| s.gauss - 4.0 * s.r * s.r));
    let defect = samples
        .iter()
        .map(|s| (s.kappa * s.kappa - (s.gauss - 4.0 * s.r * s.r)).abs())
        .fold(0.0, f64::max);
    let admissible = target > tol.degenerate;
    let spread = [sk, sr, sg];
    let reason = if samples.is_empty() {
        "no samples".to_string()
    } else if let Some(i) = spread.iter().position(|&v| v > tol.constancy) {
        format!("{} is not constant along the curve", ["kappa", "r", "G"][i])
    } else if kappa_mean.abs() <= tol.residual {
        "geodesic base curve gives a minimal cylinder".to_string()
    } else if !admissible {
        format!("G - 4r^2 = {target:.6} admits no nonzero geodesic curvature")
    } else if defect > tol.residual {
        format!("kappa^2 misses G - 4r^2 by {defect:.6}")
    } else {
        "proper biharmonic".to_string()
    };
    HopfVerdict {
        pass: reason == "proper biharmonic",
        admissible,
        kappa_mean,
        r_mean,
        gauss_mean,
        target,
        defect,
        spread,
        reason,
    }
}
