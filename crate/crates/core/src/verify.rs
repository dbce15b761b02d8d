//! The numerical verification suite: every check reports its raw residual
//! and the tolerance it was judged against.
//!
//! Randomised checks draw from a seeded ChaCha generator, so a given seed
//! always reproduces the same report.

use crate::biharmonic::{classify_scalars, AmbientScalars, Branch, PointInvariants, Verdict};
use crate::config::Tolerances;
use crate::expr::Expr;
use crate::geometry::{
    base_data, bcv, connection, connection_oracle, ricci, riemann_closed_at, riemann_tensor_direct, CanonicalModel,
    KillingData, Rect, RicciMatrix,
};
use crate::hopf::{circle_with_kg, example_construct, hopf_residuals, WarpedProfile, DEFAULT_SAMPLES};
use crate::linalg::Vec3;
use crate::surface::SurfacePatch;
use crate::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

pub const DEFAULT_SEED: u64 = 20_240_611;

/// Names of the criteria, in suite order.
pub const CRITERIA: [&str; 9] = [
    "connection_oracle",
    "curvature_formula",
    "ricci",
    "bcv_constants",
    "hopf_tube_theorem",
    "final_example",
    "surface_identities",
    "biharmonic_sanity",
    "branch_logic",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

impl Status {
    pub fn as_str(&self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Skipped => "skipped",
        }
    }
}

/// Whether the residual must stay below or reach the tolerance.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Bound {
    AtMost,
    AtLeast,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckReport {
    pub name: String,
    pub status: Status,
    pub residual: f64,
    pub tol: f64,
    pub bound: Bound,
    /// Where the worst residual occurred.
    pub location: Option<String>,
    pub note: Option<String>,
}

impl CheckReport {
    /// `residual ≤ tol` passes; NaN fails.
    pub fn at_most(name: &str, residual: f64, tol: f64) -> Self {
        CheckReport::with_bound(name, residual, tol, Bound::AtMost)
    }

    /// `residual ≥ tol` passes; NaN fails.
    pub fn at_least(name: &str, residual: f64, tol: f64) -> Self {
        CheckReport::with_bound(name, residual, tol, Bound::AtLeast)
    }

    fn with_bound(name: &str, residual: f64, tol: f64, bound: Bound) -> Self {
        let ok = match bound {
            Bound::AtMost => residual <= tol,
            Bound::AtLeast => residual >= tol,
        };
        CheckReport {
            name: name.to_string(),
            status: if ok { Status::Pass } else { Status::Fail },
            residual,
            tol,
            bound,
            location: None,
            note: None,
        }
    }

    /// A check that does not apply; residual and tolerance are NaN.
    pub fn skipped(name: &str, note: impl Into<String>) -> Self {
        CheckReport {
            name: name.to_string(),
            status: Status::Skipped,
            residual: f64::NAN,
            tol: f64::NAN,
            bound: Bound::AtMost,
            location: None,
            note: Some(note.into()),
        }
    }

    /// A check that could not be evaluated.
    pub fn error(name: &str, err: &Error) -> Self {
        CheckReport {
            note: Some(err.to_string()),
            ..CheckReport::at_most(name, f64::NAN, 0.0)
        }
    }

    pub fn at(mut self, location: Option<String>) -> Self {
        self.location = location;
        self
    }

    /// Fails the check unless `cond` holds.
    pub fn require(mut self, cond: bool, note: impl Into<String>) -> Self {
        if !cond {
            self.status = Status::Fail;
            self.note = Some(note.into());
        }
        self
    }

    pub fn passed(&self) -> bool {
        self.status != Status::Fail
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CriterionReport {
    pub name: String,
    pub checks: Vec<CheckReport>,
}

impl CriterionReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(CheckReport::passed)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyOptions {
    /// Replaces every upper-bound tolerance.
    pub tol: Option<f64>,
    /// Runs only criteria whose name contains this string.
    pub only: Option<String>,
    pub seed: u64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            tol: None,
            only: None,
            seed: DEFAULT_SEED,
        }
    }
}

impl VerifyOptions {
    fn tol(&self, default: f64) -> f64 {
        self.tol.unwrap_or(default)
    }

    pub fn selects(&self, name: &str) -> bool {
        self.only.as_deref().map_or(true, |o| name.contains(o))
    }

    fn rng(&self, criterion: usize) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed.wrapping_add(criterion as u64))
    }
}

/// Runs the selected criteria in order.
pub fn run_suite(opts: &VerifyOptions) -> Vec<CriterionReport> {
    CRITERIA
        .iter()
        .filter(|n| opts.selects(n))
        .filter_map(|n| run_criterion(n, opts))
        .collect()
}

/// Runs one criterion by name; `None` for an unknown name.
pub fn run_criterion(name: &str, opts: &VerifyOptions) -> Option<CriterionReport> {
    let checks = match name {
        "connection_oracle" => connection_oracle_checks(opts),
        "curvature_formula" => curvature_checks(opts),
        "ricci" => ricci_checks(opts),
        "bcv_constants" => bcv_checks(opts),
        "hopf_tube_theorem" => hopf_checks(opts),
        "final_example" => example_checks(opts),
        "surface_identities" => surface_checks(opts),
        "biharmonic_sanity" => sanity_checks(opts),
        "branch_logic" => branch_checks(opts),
        _ => return None,
    };
    Some(CriterionReport {
        name: name.to_string(),
        checks,
    })
}

/// Tracks the largest residual and where it happened.
#[derive(Debug, Default)]
struct Worst {
    value: f64,
    location: Option<String>,
    error: Option<Error>,
}

impl Worst {
    fn record(&mut self, value: f64, location: impl FnOnce() -> String) {
        // a NaN residual is sticky so that it always fails the check
        if self.value.is_nan() {
            return;
        }
        if value.is_nan() || value > self.value || self.location.is_none() {
            self.value = value;
            self.location = Some(location());
        }
    }

    fn take(&mut self, r: Result<f64>, location: impl FnOnce() -> String) {
        match r {
            Ok(v) => self.record(v, location),
            Err(e) => {
                if self.error.is_none() {
                    self.location = Some(location());
                    self.error = Some(e);
                }
            }
        }
    }

    fn report(self, name: &str, tol: f64) -> CheckReport {
        match self.error {
            Some(e) => CheckReport::error(name, &e).at(self.location),
            None => CheckReport::at_most(name, self.value, tol).at(self.location),
        }
    }
}

fn loc(label: &str, p: &[f64]) -> String {
    let coords: Vec<String> = p.iter().map(|v| format!("{v:.6e}")).collect();
    format!("{label} at ({})", coords.join(", "))
}

fn geometry_families() -> Vec<KillingData> {
    let mut out = vec![
        KillingData::flat(2.0),
        bcv(0.0, 0.5),
        bcv(1.0, 1.0),
        bcv(-1.0, 0.3),
    ];
    if let Ok(m) = KillingData::new(
        Expr::parse("exp(-(x^2+y^2)/4)", &["x", "y"]).expect("fixed expression"),
        Expr::parse("0", &["x", "y"]).expect("fixed expression"),
        Expr::parse("x", &["x", "y"]).expect("fixed expression"),
        Rect::square(2.0),
        "exp(-(x^2+y^2)/4), a = 0, b = x",
    ) {
        out.push(m);
    }
    out
}

/// Uniform point in the central 80% of `d`.
fn random_point(rng: &mut impl Rng, d: &Rect) -> [f64; 3] {
    let (x, y) = d.lerp(rng.gen_range(0.1..0.9), rng.gen_range(0.1..0.9));
    [x, y, rng.gen_range(-1.0..1.0)]
}

fn random_vec(rng: &mut impl Rng) -> Vec3 {
    Vec3::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
}

fn connection_oracle_checks(opts: &VerifyOptions) -> Vec<CheckReport> {
    let mut rng = opts.rng(1);
    let families = geometry_families();
    let per = 100 / families.len();
    let mut worst = Worst::default();
    for m in &families {
        for _ in 0..per {
            let p = random_point(&mut rng, m.domain());
            let r = connection(m, p).and_then(|c| Ok(c.max_abs_diff(&connection_oracle(m, p)?)));
            worst.take(r, || loc(m.label(), &p));
        }
    }
    vec![worst.report("connection_vs_koszul", opts.tol(1e-6))]
}

fn curvature_checks(opts: &VerifyOptions) -> Vec<CheckReport> {
    let mut rng = opts.rng(2);
    let families = geometry_families();
    let (points, tuples) = (8, 5);
    let (mut rel, mut r1, mut r2, mut r3) = (Worst::default(), Worst::default(), Worst::default(), Worst::default());
    for m in &families {
        for _ in 0..points {
            let p = random_point(&mut rng, m.domain());
            let at = || loc(m.label(), &p);
            let (tensor, d) = match riemann_tensor_direct(m, p).and_then(|t| Ok((t, base_data(m, p[0], p[1])?))) {
                Ok(v) => v,
                Err(e) => {
                    rel.take(Err(e), at);
                    continue;
                }
            };
            for _ in 0..tuples {
                let [x, y, z, w] = [0; 4].map(|_| random_vec(&mut rng));
                let direct = tensor.eval(&x, &y, &z, &w);
                let closed = riemann_closed_at(&d, &x, &y, &z, &w);
                rel.record((closed - direct).abs() / direct.abs().max(1.0), at);
            }
            let e = [Vec3::E1, Vec3::E2, Vec3::E3];
            let er = d.frame_dr();
            for j in 0..2 {
                r1.record((tensor.eval(&e[j], &e[2], &e[j], &e[2]) + d.r * d.r).abs(), at);
                r3.record((tensor.eval(&e[0], &e[1], &e[j], &e[2]) + er[j]).abs(), at);
            }
            r2.record(
                (tensor.eval(&e[0], &e[1], &e[0], &e[1]) - (3.0 * d.r * d.r - d.gauss)).abs(),
                at,
            );
        }
    }
    vec![
        rel.report("closed_vs_direct_relative", opts.tol(1e-5)),
        r1.report("vertical_sectional", opts.tol(1e-5)),
        r2.report("horizontal_sectional", opts.tol(1e-5)),
        r3.report("mixed_component", opts.tol(1e-5)),
    ]
}

fn ricci_checks(opts: &VerifyOptions) -> Vec<CheckReport> {
    let mut rng = opts.rng(3);
    let mut contraction = Worst::default();
    for m in &geometry_families() {
        for _ in 0..10 {
            let p = random_point(&mut rng, m.domain());
            let r = ricci(m, p[0], p[1])
                .and_then(|closed| Ok(closed.max_abs_diff(&riemann_tensor_direct(m, p)?.ricci())));
            contraction.take(r, || loc(m.label(), &p));
        }
    }
    let heis = bcv(0.0, 0.5);
    let want = RicciMatrix([[-0.5, 0.0, 0.0], [0.0, -0.5, 0.0], [0.0, 0.0, 0.5]]);
    let mut h = Worst::default();
    for (x, y) in heis.domain().cell_centres(5, 5) {
        h.take(ricci(&heis, x, y).map(|rc| rc.max_abs_diff(&want)), || loc(heis.label(), &[x, y]));
    }
    vec![
        contraction.report("closed_vs_contraction", opts.tol(1e-5)),
        h.report("heisenberg_diagonal", opts.tol(1e-8)),
    ]
}

fn bcv_checks(opts: &VerifyOptions) -> Vec<CheckReport> {
    let (mut rw, mut gw) = (Worst::default(), Worst::default());
    for (c, mu) in [(1.0, 1.0), (-1.0, 0.3), (0.0, 0.5), (4.0, 1.0)] {
        let m = bcv(c, mu);
        for (x, y) in m.domain().cell_centres(20, 20) {
            match base_data(&m, x, y) {
                Ok(d) => {
                    rw.record((d.r - mu).abs(), || loc(m.label(), &[x, y]));
                    gw.record((d.gauss - c).abs(), || loc(m.label(), &[x, y]));
                }
                Err(e) => rw.take(Err(e), || loc(m.label(), &[x, y])),
            }
        }
    }
    vec![
        rw.report("bundle_curvature_is_mu", opts.tol(1e-10)),
        gw.report("gauss_curvature_is_c", opts.tol(1e-8)),
    ]
}

fn hopf_checks(opts: &VerifyOptions) -> Vec<CheckReport> {
    let tol = Tolerances::default();
    let sphere = bcv(1.0, 0.0);
    let run = |m: &KillingData, k: f64| circle_with_kg(m, k).and_then(|c| hopf_residuals(m, &c, DEFAULT_SAMPLES, &tol));
    let mut out = Vec::new();
    match run(&sphere, 1.0) {
        Ok(rep) => out.push(
            CheckReport::at_most("kappa_1_passes", rep.max_reduced, opts.tol(1e-5))
                .require(rep.verdict.pass, rep.verdict.reason.clone()),
        ),
        Err(e) => out.push(CheckReport::error("kappa_1_passes", &e)),
    }
    for (name, k) in [("kappa_0.5_fails", 0.5), ("kappa_2_fails", 2.0)] {
        match run(&sphere, k) {
            Ok(rep) => out.push(
                CheckReport::at_least(name, rep.verdict.defect, 0.1).require(!rep.verdict.pass, "classified as passing"),
            ),
            Err(e) => out.push(CheckReport::error(name, &e)),
        }
    }
    match run(&bcv(0.0, 0.5), 1.0) {
        Ok(rep) => out.push(
            CheckReport::at_most("heisenberg_inadmissible", (rep.verdict.target + 1.0).abs(), opts.tol(1e-8))
                .require(!rep.verdict.admissible && !rep.verdict.pass, "reported an admissible curvature"),
        ),
        Err(e) => out.push(CheckReport::error("heisenberg_inadmissible", &e)),
    }
    out
}

fn example_checks(opts: &VerifyOptions) -> Vec<CheckReport> {
    let tol = Tolerances::default();
    let profile = match WarpedProfile::from_str("cos(t)", "t", (0.0, PI / 2.0)) {
        Ok(p) => p,
        Err(e) => return vec![CheckReport::error("profile", &e)],
    };
    let mut out = Vec::new();
    match example_construct(&profile, 0.0, DEFAULT_SAMPLES, &tol) {
        Ok(rep) if rep.roots.len() == 1 => {
            let root = &rep.roots[0];
            let at = Some(format!("t0 = {:.12e}", root.t0));
            out.push(CheckReport::at_most("root_is_quarter_pi", (root.t0 - PI / 4.0).abs(), opts.tol(1e-8)).at(at.clone()));
            out.push(CheckReport::at_most("kappa_sq_is_one", (root.kappa_chart.powi(2) - 1.0).abs(), opts.tol(1e-8)));
            out.push(CheckReport::at_most("gauss_is_one", (root.report.verdict.gauss_mean - 1.0).abs(), opts.tol(1e-8)));
            out.push(
                CheckReport::at_most("cylinder_residuals", root.report.max_reduced, opts.tol(1e-5))
                    .require(root.report.verdict.pass, root.report.verdict.reason.clone()),
            );
        }
        Ok(rep) => out.push(
            CheckReport::at_most("root_is_quarter_pi", f64::NAN, opts.tol(1e-8))
                .require(false, format!("expected one root, found {}", rep.roots.len())),
        ),
        Err(e) => out.push(CheckReport::error("root_is_quarter_pi", &e)),
    }
    match example_construct(&profile, 0.25, DEFAULT_SAMPLES, &tol) {
        Ok(rep) if !rep.roots.is_empty() => {
            let root = &rep.roots[0];
            let v = &root.report.verdict;
            let k2 = root.kappa_chart.powi(2);
            out.push(CheckReport::at_most("quarter_r_kappa_sq", (k2 - 0.75).abs(), opts.tol(1e-8)));
            out.push(CheckReport::at_most(
                "quarter_r_matches_g_minus_4r2",
                (k2 - (v.gauss_mean - 4.0 * v.r_mean * v.r_mean)).abs(),
                opts.tol(1e-8),
            ));
        }
        Ok(_) => out.push(CheckReport::at_most("quarter_r_kappa_sq", f64::NAN, 0.0).require(false, "no root found")),
        Err(e) => out.push(CheckReport::error("quarter_r_kappa_sq", &e)),
    }
    out
}

fn random_height(rng: &mut impl Rng) -> String {
    let c: Vec<f64> = (0..6).map(|_| rng.gen_range(-0.5..0.5)).collect();
    format!(
        "{:?}*x + {:?}*y + {:?}*x^2 + {:?}*x*y + {:?}*y^2 + {:?}*sin(x)*cos(y)",
        c[0], c[1], c[2], c[3], c[4], c[5]
    )
}

fn surface_checks(opts: &VerifyOptions) -> Vec<CheckReport> {
    let mut rng = opts.rng(7);
    let families = [bcv(0.0, 0.5), bcv(1.0, 1.0), geometry_families().pop().unwrap_or_else(|| bcv(-1.0, 0.3))];
    let (mut gauss, mut codazzi, mut compat, mut norm_sq) =
        (Worst::default(), Worst::default(), Worst::default(), Worst::default());
    let mut norma_points = 0;
    for m in &families {
        for _ in 0..10 {
            let height = random_height(&mut rng);
            let q = [rng.gen_range(-0.3..0.3), rng.gen_range(-0.3..0.3)];
            let at = || loc(&format!("{} graph z = {height}", m.label()), &q);
            let s = match SurfacePatch::graph(m.clone(), &height, Rect::square(0.5)) {
                Ok(s) => s,
                Err(e) => {
                    gauss.take(Err(e), at);
                    continue;
                }
            };
            gauss.take(s.gauss_residual(q).map(f64::abs), at);
            codazzi.take(s.codazzi_residual(q).map(|c| c[0].abs().max(c[1].abs())), at);
            compat.take(s.compatibility_residuals(q).map(|c| c.tangent_part.abs().max(c.angle_part.abs())), at);
            match s.analyze_point(q) {
                Ok(d) if d.sin_phi >= 0.1 => {
                    norma_points += 1;
                    norm_sq.take(s.norm_sq_residual(q).map(f64::abs), at);
                }
                Ok(_) => {}
                Err(e) => norm_sq.take(Err(e), at),
            }
        }
    }
    let tol = opts.tol(1e-4);
    vec![
        gauss.report("gauss", tol),
        codazzi.report("codazzi", tol),
        compat.report("compatibility", tol),
        if norma_points > 0 {
            norm_sq.report("norm_sq_a", tol)
        } else {
            CheckReport::skipped("norm_sq_a", "no sample with sin(phi) >= 0.1")
        },
    ]
}

fn cylinder(model: KillingData, x: &str, y: &str, range: (f64, f64)) -> Result<SurfacePatch> {
    let (x, y) = (Expr::parse(x, &["t"])?, Expr::parse(y, &["t"])?);
    SurfacePatch::hopf_cylinder(model, &x, &y, range, (-1.0, 1.0))
}

fn circle_cylinder(model: KillingData, kappa: f64) -> Result<SurfacePatch> {
    let c = circle_with_kg(&model, kappa)?;
    SurfacePatch::hopf_cylinder(model, &c.x, &c.y, (0.0, 3.0), (-1.0, 1.0))
}

fn minimal_candidates() -> Vec<(String, Result<SurfacePatch>)> {
    let flat = || KillingData::flat(2.0);
    vec![
        (
            "horizontal plane in flat product".into(),
            SurfacePatch::graph(flat(), "0", Rect::square(1.0)),
        ),
        ("vertical plane in flat product".into(), cylinder(flat(), "t", "0.3", (-1.0, 1.0))),
        (
            "vertical plane over radial line, heisenberg".into(),
            cylinder(bcv(0.0, 0.5), "0.6*t", "0.8*t", (-1.0, 1.0)),
        ),
        (
            "vertical plane over radial line, bcv(1, 0.5)".into(),
            cylinder(bcv(1.0, 0.5), "t", "0", (-1.0, 1.0)),
        ),
        (
            "vertical plane over radial line, bcv(-1, 0.3)".into(),
            cylinder(bcv(-1.0, 0.3), "0", "t", (-0.8, 0.8)),
        ),
    ]
}

fn verdict_of(s: &SurfacePatch, q: [f64; 2]) -> Result<String> {
    let v = s.verdict(q)?;
    if v == Verdict::NotCmc {
        return Ok(v.tag().to_string());
    }
    Ok(format!("{} / {}", v.tag(), s.classify_point(q)?.branch.tag()))
}

fn sanity_checks(opts: &VerifyOptions) -> Vec<CheckReport> {
    let points = [[0.1, 0.2], [-0.3, 0.5], [0.4, -0.4]];
    let mut harmonic = Worst::default();
    let mut qualifying = 0;
    let mut skipped = Vec::new();
    for (label, s) in minimal_candidates() {
        let s = match s {
            Ok(s) => s,
            Err(e) => {
                harmonic.take(Err(e), || label.clone());
                continue;
            }
        };
        for q in points {
            match s.mean_curvature(q) {
                Ok(h) if h.abs() <= 1e-8 => {
                    qualifying += 1;
                    harmonic.take(s.bitension_cmc(q).map(|b| b.max_abs()), || loc(&label, &q));
                }
                Ok(h) => skipped.push(format!("{label}: |H| = {:.3e}", h.abs())),
                Err(e) => harmonic.take(Err(e), || loc(&label, &q)),
            }
        }
    }
    let mut harmonic_check = if qualifying > 0 {
        harmonic.report("harmonic_implies_biharmonic", opts.tol(1e-6))
    } else {
        CheckReport::skipped("harmonic_implies_biharmonic", "no surface with |H| <= 1e-8")
    };
    if !skipped.is_empty() && harmonic_check.note.is_none() {
        harmonic_check.note = Some(format!("not minimal: {}", skipped.join("; ")));
    }

    let mut surfaces = minimal_candidates();
    surfaces.push(("kappa 1 cylinder in bcv(1, 0)".into(), circle_cylinder(bcv(1.0, 0.0), 1.0)));
    surfaces.push(("kappa 0.5 cylinder in bcv(1, 0)".into(), circle_cylinder(bcv(1.0, 0.0), 0.5)));
    surfaces.push((
        "graph z = x y in heisenberg".into(),
        SurfacePatch::graph(bcv(0.0, 0.5), "x*y", Rect::square(1.0)),
    ));
    let mut mismatches = 0.0;
    let mut first = None;
    let mut error = None;
    for (label, s) in surfaces {
        let s = match s {
            Ok(s) => s,
            Err(e) => {
                error.get_or_insert((label, e));
                continue;
            }
        };
        let f = s.clone().flipped();
        let q = [1.0, 0.2];
        let q = if s.domain().contains(q[0], q[1]) { q } else { [0.1, 0.2] };
        match (verdict_of(&s, q), verdict_of(&f, q)) {
            (Ok(a), Ok(b)) => {
                if a != b {
                    mismatches += 1.0;
                    first.get_or_insert(format!("{label}: {a} vs {b}"));
                }
            }
            (Err(e), _) | (_, Err(e)) => {
                error.get_or_insert((label, e));
            }
        }
    }
    let flip = match error {
        Some((label, e)) => CheckReport::error("flip_invariance", &e).at(Some(label)),
        None => CheckReport::at_most("flip_invariance", mismatches, 0.0).at(first),
    };
    vec![harmonic_check, flip]
}

fn branch_checks(opts: &VerifyOptions) -> Vec<CheckReport> {
    let tol = Tolerances::default();
    let mut out = Vec::new();

    let mut wrong = 0.0;
    let mut first = None;
    let mut error = None;
    for (c, mu, k) in [(1.0, 0.0, 1.0), (1.0, 0.0, 0.5), (1.0, 0.25, 0.75f64.sqrt()), (4.0, 0.5, 3f64.sqrt())] {
        let label = format!("kappa {k:.4} cylinder in bcv({c}, {mu})");
        match circle_cylinder(bcv(c, mu), k).and_then(|s| s.classify_point([1.0, 0.0])) {
            Ok(rep) if rep.branch == Branch::HopfTube => {}
            Ok(rep) => {
                wrong += 1.0;
                first.get_or_insert(format!("{label}: {}", rep.branch.tag()));
            }
            Err(e) => {
                error.get_or_insert((label, e));
            }
        }
    }
    out.push(match error {
        Some((label, e)) => CheckReport::error("hopf_cylinders_are_branch_a", &e).at(Some(label)),
        None => CheckReport::at_most("hopf_cylinders_are_branch_a", wrong, 0.0).at(first),
    });

    let mut rng = opts.rng(9);
    let mut wrong = 0.0;
    let mut first = None;
    for _ in 0..50 {
        let r = rng.gen_range(0.1..1.0);
        let delta = rng.gen_range(-1e-8..1e-8);
        let amb = AmbientScalars {
            r,
            gauss: 4.0 * r * r + delta,
            grad_r_norm: rng.gen_range(0.1..1.0),
        };
        let pt = PointInvariants {
            phi: rng.gen_range(0.1..1.4),
            norm_sq_a: rng.gen_range(0.0..2.0),
            mean_curvature: rng.gen_range(0.1..2.0),
        };
        if classify_scalars(&amb, &pt, &tol).branch != Branch::ContradictionGEquals4r2 {
            wrong += 1.0;
            first.get_or_insert(format!("{amb:?}, {pt:?}"));
        }
    }
    out.push(CheckReport::at_most("contradiction_when_g_equals_4r2", wrong, 0.0).at(first));

    let mut worst = Worst::default();
    let mut wrong_branch = 0;
    for _ in 0..50 {
        let r: f64 = rng.gen_range(0.1..1.0);
        let g: f64 = 4.0 * r * r + rng.gen_range(0.1..2.0) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
        let grad: f64 = rng.gen_range(0.1..1.0);
        let phi = 0.5 * (2.0 * grad).atan2(4.0 * r * r - g);
        let norm_sq_a = g - 2.0 * r * r + (4.0 * r * r - g) * phi.cos().powi(2) + grad * (2.0 * phi).sin();
        let amb = AmbientScalars { r, gauss: g, grad_r_norm: grad };
        let pt = PointInvariants {
            phi,
            norm_sq_a,
            mean_curvature: 1.0,
        };
        let rep = classify_scalars(&amb, &pt, &tol);
        match rep.diagnostics.reduced_norm_residual {
            Some(v) if rep.branch == Branch::GradientR => worst.record(v.abs(), || loc("synthetic b2", &[r, g, grad, phi])),
            _ => wrong_branch += 1,
        }
    }
    out.push(
        worst
            .report("synthetic_b2_norm_sq_a", opts.tol(1e-12))
            .require(wrong_branch == 0, format!("{wrong_branch} samples not classified as b2")),
    );
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn status_follows_bound() {
        assert_eq!(CheckReport::at_most("a", 1.0, 2.0).status, Status::Pass);
        assert_eq!(CheckReport::at_most("a", f64::NAN, 2.0).status, Status::Fail);
        assert_eq!(CheckReport::at_least("a", 1.0, 2.0).status, Status::Fail);
        assert_eq!(CheckReport::at_most("a", 1.0, 2.0).require(false, "x").status, Status::Fail);
        assert!(CheckReport::skipped("a", "n").passed());
    }

    #[test]
    fn only_filters_by_substring() {
        let opts = VerifyOptions {
            only: Some("hopf".into()),
            ..VerifyOptions::default()
        };
        assert!(opts.selects("hopf_tube_theorem") && !opts.selects("ricci"));
        assert!(run_criterion("nonexistent", &opts).is_none());
    }

    #[test]
    fn bcv_constants_pass() {
        let rep = run_criterion("bcv_constants", &VerifyOptions::default()).unwrap();
        assert!(rep.passed(), "{rep:?}");
    }
}
