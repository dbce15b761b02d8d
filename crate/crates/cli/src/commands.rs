use crate::output::{check_json, csv_string, document, emit, json_string, num, nums, opt_num, Row};
use crate::{Command, Expect, ExampleArgs, Format, HopfCheckArgs, HopfCommand, InfoArgs, MetricArgs, OutputArgs, SurfaceArgs, VerifyArgs};
use killsub::biharmonic::Branch;
use killsub::config::Tolerances;
use killsub::geometry::{base_data, bcv, bcv_on, ricci, CanonicalModel, KillingData, Rect};
use killsub::hopf::{circle_with_kg, example_construct, hopf_residuals, BaseCurve, HopfReport, HopfVerdict, WarpedProfile};
use killsub::surface::SurfacePatch;
use killsub::verify::{run_suite, CheckReport, CriterionReport, VerifyOptions, CRITERIA};
use killsub::Error;
use serde_json::{json, Map, Value};
use std::f64::consts::PI;
use std::fmt;

#[derive(Debug)]
pub enum CliError {
    Input(String),
    Core(Error),
    Io(std::io::Error),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Input(m) => write!(f, "{m}"),
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Io(e) => write!(f, "{e}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

type CliResult<T> = Result<T, CliError>;

fn input<T>(msg: impl Into<String>) -> CliResult<T> {
    Err(CliError::Input(msg.into()))
}

/// Runs one subcommand; `Ok(false)` means a check failed.
pub fn run(cmd: &Command) -> CliResult<bool> {
    match cmd {
        Command::Info(a) => info(a),
        Command::CheckSurface(a) => check_surface(a),
        Command::Hopf(HopfCommand::Check(a)) => hopf_check(a),
        Command::Hopf(HopfCommand::Example(a)) => hopf_example(a),
        Command::VerifyPaper(a) => verify_paper(a),
    }
}

fn write(out: &OutputArgs, doc: &Value, rows: &[Row]) -> CliResult<()> {
    let text = match out.format {
        Format::Json => json_string(doc),
        Format::Csv => csv_string(rows)?,
    };
    emit(&text, out.out.as_deref())?;
    Ok(())
}

fn rect(v: &[f64]) -> CliResult<Rect> {
    match v {
        [a, b, c, d] => Ok(Rect::new(*a, *b, *c, *d)?),
        _ => input("a domain needs four numbers"),
    }
}

fn build_metric(m: &MetricArgs) -> CliResult<KillingData> {
    let domain = m.domain.as_deref().map(rect).transpose()?;
    match (&m.bcv, &m.lambda) {
        (Some(_), Some(_)) => input("give either --bcv or --lambda, not both"),
        (Some(cm), None) => {
            if m.a.is_some() || m.b.is_some() {
                return input("--a and --b need --lambda");
            }
            let (c, mu) = (cm[0], cm[1]);
            match domain {
                Some(d) => Ok(bcv_on(c, mu, d)?),
                None => Ok(bcv(c, mu)),
            }
        }
        (None, Some(l)) => Ok(KillingData::from_strs(
            l,
            m.a.as_deref().unwrap_or("0"),
            m.b.as_deref().unwrap_or("0"),
            domain.unwrap_or_else(|| Rect::square(2.0)),
        )?),
        (None, None) => input("a metric is required: --bcv C MU or --lambda EXPR [--a EXPR --b EXPR]"),
    }
}

fn tolerances(tol: Option<f64>) -> CliResult<Tolerances> {
    match tol {
        None => Ok(Tolerances::default()),
        Some(t) if t > 0.0 && t.is_finite() => Ok(Tolerances::uniform(t)),
        Some(t) => input(format!("tolerance must be positive, got {t}")),
    }
}

fn grid(g: &[usize]) -> CliResult<(usize, usize)> {
    match g {
        [n, m] if *n >= 2 && *m >= 2 => Ok((*n, *m)),
        _ => input("grid resolutions must be at least 2"),
    }
}

fn rect_json(r: &Rect) -> Value {
    nums(&[r.xmin, r.xmax, r.ymin, r.ymax])
}

fn metric_json(m: &KillingData) -> Value {
    json!({
        "label": m.label(),
        "lambda": m.lambda.to_string(),
        "a": m.a.to_string(),
        "b": m.b.to_string(),
        "domain": rect_json(m.domain()),
    })
}

fn tolerances_json(t: &Tolerances) -> Value {
    json!({
        "identity": num(t.identity),
        "cmc": num(t.cmc),
        "residual": num(t.residual),
        "eps_phi": num(t.eps_phi),
        "degenerate": num(t.degenerate),
        "constancy": num(t.constancy),
    })
}

fn expectation(expect: Option<Expect>, pass: bool, default: bool) -> bool {
    match expect {
        Some(Expect::Pass) => pass,
        Some(Expect::Fail) => !pass,
        None => default,
    }
}

fn info(a: &InfoArgs) -> CliResult<bool> {
    let model = build_metric(&a.metric)?;
    let points: Vec<(f64, f64)> = match (&a.at, &a.grid) {
        (Some(p), _) => vec![(p[0], p[1])],
        (None, Some(g)) => {
            let (n, m) = grid(g)?;
            model.domain().cell_centres(n, m)
        }
        (None, None) => vec![model.domain().lerp(0.5, 0.5)],
    };
    let mut out = Vec::new();
    let mut rows = Vec::new();
    for (x, y) in points {
        let d = base_data(&model, x, y)?;
        let rc = ricci(&model, x, y)?;
        out.push(json!({
            "x": num(x),
            "y": num(y),
            "r": num(d.r),
            "G": num(d.gauss),
            "grad_r": nums(&d.r_grad),
            "ricci": Value::Array(rc.0.iter().map(|row| nums(row)).collect()),
        }));
        let mut push = |check: String, value: f64| {
            rows.push(Row {
                s_or_u: Some(x),
                v: Some(y),
                check,
                residual: Some(value),
                ..Row::default()
            })
        };
        push("r".into(), d.r);
        push("G".into(), d.gauss);
        push("grad_r_x".into(), d.r_grad[0]);
        push("grad_r_y".into(), d.r_grad[1]);
        for (i, row) in rc.0.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                push(format!("ricci_{}{}", i + 1, j + 1), *v);
            }
        }
    }
    let doc = document("info", json!({ "metric": metric_json(&model), "points": out }));
    write(&a.output, &doc, &rows)?;
    Ok(true)
}

fn split_components<const N: usize>(s: &str, what: &str) -> CliResult<[String; N]> {
    let parts: Vec<String> = s.split(';').map(|p| p.trim().to_string()).collect();
    parts
        .try_into()
        .or_else(|_| input(format!("{what} needs {N} components separated by ';'")))
}

fn branch_residual(rep: &killsub::biharmonic::BranchReport) -> Option<f64> {
    let d = &rep.diagnostics;
    match rep.branch {
        Branch::HopfTube => d.hopf_condition_residual,
        Branch::ConstantR => d.sphere_condition_residual,
        Branch::GradientR => d.reduced_norm_residual,
        Branch::None => d.constant_r_residual,
        Branch::ContradictionGEquals4r2 => None,
    }
}

fn surface_point_checks(s: &SurfacePatch, q: [f64; 2], tol: &Tolerances) -> (Vec<CheckReport>, Option<String>) {
    let check = |name: &str, r: Result<f64, Error>, t: f64| match r {
        Ok(v) => CheckReport::at_most(name, v, t),
        // the adapted frame does not exist where the surface is horizontal
        Err(Error::AngleSingular { sin_phi }) => {
            CheckReport::skipped(name, format!("angle-degenerate: sin(phi) = {sin_phi:.3e}"))
        }
        Err(e) => CheckReport::error(name, &e),
    };
    let mut checks = vec![
        check("gauss", s.gauss_residual(q).map(f64::abs), tol.identity),
        check("codazzi", s.codazzi_residual(q).map(|c| c[0].abs().max(c[1].abs())), tol.identity),
        check(
            "compatibility",
            s.compatibility_residuals(q).map(|c| c.tangent_part.abs().max(c.angle_part.abs())),
            tol.identity,
        ),
    ];
    match s.analyze_point(q) {
        Ok(d) if d.sin_phi < 0.1 => checks.push(CheckReport::skipped("norm_sq_a", "sin(phi) < 0.1")),
        Ok(_) => checks.push(check("norm_sq_a", s.norm_sq_residual(q).map(f64::abs), tol.identity)),
        Err(e) => checks.push(CheckReport::error("norm_sq_a", &e)),
    }
    let mut branch = None;
    match s.bitension_cmc(q) {
        Err(Error::NotCmc { deviation, tol: t }) => {
            checks.push(CheckReport::at_most("bitension", deviation, t).require(false, "surface is not CMC near this point"));
            checks.push(CheckReport::skipped("frame_system", "surface is not CMC"));
            checks.push(CheckReport::skipped("branch", "surface is not CMC"));
        }
        Err(e) => checks.push(CheckReport::error("bitension", &e)),
        Ok(b) => {
            checks.push(CheckReport::at_most("bitension", b.max_abs(), tol.residual));
            checks.push(check(
                "frame_system",
                s.frame_system_residuals(q).map(|v| v.iter().fold(0.0, |m: f64, x| m.max(x.abs()))),
                tol.residual,
            ));
            match s.classify_point(q) {
                Ok(rep) => {
                    branch = Some(rep.branch.tag().to_string());
                    checks.push(match branch_residual(&rep) {
                        _ if b.mean_curvature.abs() <= tol.degenerate => {
                            CheckReport::skipped("branch", "minimal surface")
                        }
                        Some(v) => CheckReport::at_most("branch", v.abs(), tol.residual),
                        None => CheckReport::skipped("branch", rep.branch.tag()),
                    });
                }
                Err(e) => checks.push(CheckReport::error("branch", &e)),
            }
        }
    }
    (checks, branch)
}

fn check_surface(a: &SurfaceArgs) -> CliResult<bool> {
    let model = build_metric(&a.metric)?;
    let tol = tolerances(a.tol)?;
    let (n, m) = grid(&a.grid)?;
    let pd = match &a.param_domain {
        Some(d) => rect(d)?,
        None => Rect::square(0.5),
    };
    let patch = match (&a.surface, &a.graph) {
        (Some(s), _) => {
            let [x, y, z] = split_components::<3>(s, "--surface")?;
            SurfacePatch::from_strs(model.clone(), [&x, &y, &z], ["u", "v"], pd)?
        }
        (None, Some(g)) => SurfacePatch::graph(model.clone(), g, pd)?,
        (None, None) => return input("give --surface \"X;Y;Z\" or --graph EXPR"),
    }
    .with_tolerances(tol);

    let mut points = Vec::new();
    let mut rows = Vec::new();
    let mut verdicts: Vec<String> = Vec::new();
    let mut all_pass = true;
    for (u, v) in pd.cell_centres(n, m) {
        let q = [u, v];
        let (mut checks, branch) = surface_point_checks(&patch, q, &tol);
        if let Some(only) = &a.only {
            checks.retain(|c| c.name.contains(only.as_str()));
        }
        let verdict = match patch.verdict(q) {
            Ok(v) => v.tag().to_string(),
            Err(e) => format!("error: {e}"),
        };
        if !verdicts.contains(&verdict) {
            verdicts.push(verdict.clone());
        }
        all_pass &= checks.iter().all(CheckReport::passed);
        rows.extend(checks.iter().map(|c| Row::from_check(Some(u), Some(v), "", c)));
        points.push(json!({
            "u": num(u),
            "v": num(v),
            "verdict": verdict,
            "branch": branch,
            "checks": checks.iter().map(check_json).collect::<Vec<_>>(),
        }));
    }
    let doc = document(
        "check-surface",
        json!({
            "metric": metric_json(&model),
            "surface": {
                "immersion": patch.immersion().iter().map(|e| e.to_string()).collect::<Vec<_>>(),
                "param_domain": rect_json(&pd),
            },
            "tolerances": tolerances_json(&tol),
            "points": points,
            "summary": {
                "status": if all_pass { "pass" } else { "fail" },
                "verdicts": verdicts,
            },
        }),
    );
    write(&a.output, &doc, &rows)?;
    Ok(expectation(a.expect, all_pass, all_pass))
}

fn verdict_json(v: &HopfVerdict) -> Value {
    json!({
        "pass": v.pass,
        "admissible": v.admissible,
        "reason": v.reason,
        "kappa": num(v.kappa_mean),
        "r": num(v.r_mean),
        "G": num(v.gauss_mean),
        "G_minus_4r2": num(v.target),
        "defect": num(v.defect),
        "spread": { "kappa": num(v.spread[0]), "r": num(v.spread[1]), "G": num(v.spread[2]) },
    })
}

fn hopf_checks(rep: &HopfReport, tol: &Tolerances) -> Vec<CheckReport> {
    let mut out = vec![
        CheckReport::at_most("proper_biharmonic", rep.verdict.defect, tol.residual)
            .require(rep.verdict.pass, rep.verdict.reason.clone()),
        CheckReport::at_most("reduced_system", rep.max_reduced, tol.residual),
        CheckReport::at_most("general_system_consistency", rep.max_consistency, tol.residual),
        CheckReport::at_most("torsion_is_minus_r", rep.max_tau_defect, tol.residual),
    ];
    out.push(match rep.max_mean_curvature_defect {
        Some(v) => CheckReport::at_most("mean_curvature_is_kappa", v, tol.identity),
        None => CheckReport::skipped("mean_curvature_is_kappa", "surface evaluation failed"),
    });
    out
}

fn report_json(rep: &HopfReport, tol: &Tolerances) -> (Map<String, Value>, Vec<CheckReport>) {
    let checks = hopf_checks(rep, tol);
    let mut m = Map::new();
    m.insert("length".into(), num(rep.length));
    m.insert("verdict".into(), verdict_json(&rep.verdict));
    m.insert("max_reduced".into(), num(rep.max_reduced));
    m.insert("max_consistency".into(), num(rep.max_consistency));
    m.insert("max_tau_defect".into(), num(rep.max_tau_defect));
    m.insert("max_mean_curvature_defect".into(), opt_num(rep.max_mean_curvature_defect));
    m.insert("checks".into(), Value::Array(checks.iter().map(check_json).collect()));
    m.insert(
        "samples".into(),
        Value::Array(
            rep.samples
                .iter()
                .map(|s| {
                    json!({
                        "s": num(s.s),
                        "x": num(s.pos[0]),
                        "y": num(s.pos[1]),
                        "kappa": num(s.kappa),
                        "kappa_s": num(s.kappa_s),
                        "kappa_ss": num(s.kappa_ss),
                        "tau": num(s.tau),
                        "r": num(s.r),
                        "G": num(s.gauss),
                        "reduced": nums(&s.reduced),
                        "general": nums(&s.general),
                        "mean_curvature": opt_num(s.surface_mean_curvature),
                    })
                })
                .collect(),
        ),
    );
    (m, checks)
}

fn sample_rows(rep: &HopfReport, tol: &Tolerances, prefix: &str) -> Vec<Row> {
    let mut rows = Vec::new();
    for s in &rep.samples {
        for (i, v) in s.reduced.iter().enumerate() {
            rows.push(Row {
                s_or_u: Some(s.s),
                v: None,
                check: format!("{prefix}last_{}", i + 1),
                residual: Some(*v),
                tol: Some(tol.residual),
                status: if v.abs() <= tol.residual { "pass" } else { "fail" }.into(),
            });
        }
    }
    rows
}

fn hopf_check(a: &HopfCheckArgs) -> CliResult<bool> {
    let model = build_metric(&a.metric)?;
    let tol = tolerances(a.tol)?;
    let curve = match (&a.curve, a.circle, a.circle_kg) {
        (Some(c), _, _) => {
            let [x, y] = split_components::<2>(c, "--curve")?;
            let interval = match a.interval.as_deref() {
                Some([t0, t1]) => (*t0, *t1),
                Some(_) => return input("--interval needs two numbers"),
                None => (0.0, 2.0 * PI),
            };
            BaseCurve::from_strs(&x, &y, "t", interval)?
        }
        (None, Some(radius), _) => BaseCurve::circle([0.0, 0.0], radius)?,
        (None, None, Some(k)) => circle_with_kg(&model, k)?,
        (None, None, None) => return input("give --curve, --circle or --circle-kg"),
    };
    let rep = hopf_residuals(&model, &curve, a.samples, &tol)?;
    let (body, checks) = report_json(&rep, &tol);
    let mut rows = sample_rows(&rep, &tol, "");
    rows.extend(checks.iter().map(|c| Row::from_check(None, None, "", c)));
    let mut m = Map::new();
    m.insert("metric".into(), metric_json(&model));
    m.insert(
        "curve".into(),
        json!({
            "x": curve.x.to_string(),
            "y": curve.y.to_string(),
            "interval": nums(&[curve.interval.0, curve.interval.1]),
        }),
    );
    m.insert("tolerances".into(), tolerances_json(&tol));
    m.extend(body);
    write(&a.output, &document("hopf check", Value::Object(m)), &rows)?;
    Ok(expectation(a.expect, rep.verdict.pass, true))
}

fn hopf_example(a: &ExampleArgs) -> CliResult<bool> {
    let tol = tolerances(a.tol)?;
    let interval = match a.interval.as_slice() {
        [t0, t1] => (*t0, *t1),
        _ => return input("--interval needs two numbers"),
    };
    let profile = WarpedProfile::from_str(&a.f, "t", interval)?;
    let rep = example_construct(&profile, a.r, a.samples, &tol)?;
    let mut roots = Vec::new();
    let mut rows = Vec::new();
    let mut all_pass = true;
    for (i, root) in rep.roots.iter().enumerate() {
        let (body, checks) = report_json(&root.report, &tol);
        all_pass &= root.report.verdict.pass;
        let prefix = format!("root_{}/", i + 1);
        rows.extend(sample_rows(&root.report, &tol, &prefix));
        rows.extend(checks.iter().map(|c| Row::from_check(None, None, &format!("root_{}", i + 1), c)));
        let mut m = Map::new();
        m.insert("t0".into(), num(root.t0));
        m.insert("kappa".into(), num(root.kappa_chart));
        m.insert("kappa_closed".into(), num(root.kappa_closed));
        m.insert("G".into(), num(root.gauss_closed));
        m.insert("kappa_sq_minus_g_plus_4r2".into(), num(root.kappa_sq_residual));
        m.extend(body);
        roots.push(Value::Object(m));
    }
    let doc = document(
        "hopf example",
        json!({
            "profile": { "f": profile.f.to_string(), "interval": nums(&[interval.0, interval.1]) },
            "r": num(a.r),
            "tolerances": tolerances_json(&tol),
            "roots": roots,
        }),
    );
    write(&a.output, &doc, &rows)?;
    Ok(expectation(a.expect, all_pass, true))
}

const DETERMINISM: &str = "cli_determinism";

fn criteria_json(reports: &[CriterionReport]) -> Value {
    Value::Array(
        reports
            .iter()
            .map(|c| {
                json!({
                    "name": c.name,
                    "status": if c.passed() { "pass" } else { "fail" },
                    "checks": c.checks.iter().map(check_json).collect::<Vec<_>>(),
                })
            })
            .collect(),
    )
}

fn verify_paper(a: &VerifyArgs) -> CliResult<bool> {
    if let Some(t) = a.tol {
        tolerances(Some(t))?;
    }
    let opts = VerifyOptions {
        tol: a.tol,
        only: a.only.clone(),
        seed: a.seed,
    };
    let with_determinism = opts.selects(DETERMINISM);
    if !with_determinism && !CRITERIA.iter().any(|n| opts.selects(n)) {
        return input(format!("--only {:?} matches no criterion", a.only.as_deref().unwrap_or("")));
    }
    let mut reports = run_suite(&opts);
    if with_determinism {
        let first = json_string(&criteria_json(&reports));
        let second = json_string(&criteria_json(&run_suite(&opts)));
        let differing = if first == second { 0.0 } else { 1.0 };
        reports.push(CriterionReport {
            name: DETERMINISM.into(),
            checks: vec![CheckReport::at_most("repeat_run_identical", differing, 0.0)],
        });
    }
    let passed = reports.iter().filter(|c| c.passed()).count();
    let failed = reports.len() - passed;
    let rows: Vec<Row> = reports
        .iter()
        .flat_map(|c| c.checks.iter().map(move |k| Row::from_check(None, None, &c.name, k)))
        .collect();
    let doc = document(
        "verify-paper",
        json!({
            "seed": a.seed,
            "tol_override": opt_num(a.tol),
            "criteria": criteria_json(&reports),
            "summary": {
                "status": if failed == 0 { "pass" } else { "fail" },
                "passed": passed,
                "failed": failed,
            },
        }),
    );
    write(&a.output, &doc, &rows)?;
    Ok(failed == 0)
}
