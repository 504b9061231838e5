//! Command-line surface for the cubiclab toolkit.
//!
//! Every subcommand supports `--json`, which emits a single object
//! `{op, inputs, outputs, residuals, warnings}`.  Exit codes: 0 success,
//! 1 domain error (the error name appears in the output), 2 argument error.
//! Points and forms parse as comma-separated decimals or rationals `p/q`.
//! `--tol name=value` overrides a tolerance field by name; the env var
//! `CUBICLAB_SEED` sets the default seed of `verify`.

use clap::{Args, Parser, Subcommand};
use cubiclab_core::cone_atlas::ConeAtlas;
use cubiclab_core::curve_geometry::{self, CurvePair};
use cubiclab_core::forms::{self, TernaryCubic};
use cubiclab_core::ray::{LinearForm3, RayVector, B3};
use cubiclab_core::render;
use cubiclab_core::scenario::{self, RegionSpec};
use cubiclab_core::steinian::{self, GroupLawContext};
use cubiclab_core::verify;
use cubiclab_core::visibility::VisibilityCtx;
use cubiclab_core::{Error, Tolerances};
use serde_json::{json, Value};

#[derive(Parser, Debug)]
#[command(name = "cubiclab", version, about = "Real plane cubics in Hesse form: cone geometry toolkit", disable_help_subcommand = true)]
struct Cli {
    /// Emit a single JSON object instead of human-readable text.
    #[arg(long, global = true)]
    json: bool,
    /// Override a tolerance by name, e.g. --tol on_curve_abs=1e-10 (repeatable).
    #[arg(long, global = true, value_name = "NAME=VALUE")]
    tol: Vec<String>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Evaluate F_k or its Hessian at a point.
    Eval(EvalArgs),
    /// Hessian form of F_k (or of explicit coefficients) plus the parameter k'.
    Hessian(HessianArgs),
    /// The three parameters whose Hessian is a multiple of F_{k'}.
    Siblings(SiblingsArgs),
    /// Positive-index-cone component atlas for one k.
    Components(KArgs),
    /// Steinian involution image of a Hessian point.
    Steinian(PointArgs),
    /// Chord-tangent sum of two Hessian points (zero defaults to B3).
    Group(GroupArgs),
    /// Real 2-torsion points of the Hessian group law.
    TwoTorsion(TwoTorsionArgs),
    /// Boundary zero counts of the polar conic G_A.
    Zeros(ZerosArgs),
    /// Segment visibility of a boundary ray from a viewpoint.
    Visible(VisibleArgs),
    /// Case table classification for the Fermat parameter k = 0.
    ClassifyFermat(FermatArgs),
    /// k = −2 special functions and fact checks (plus the optional
    /// multiple-bound inequality on user data).
    Km2(Km2Args),
    /// Certificate bound λ0 for classes D − λE.
    LambdaBound(LambdaArgs),
    /// Solve the double-polar equation T(D,D,·) = l on the bounded cone.
    Pole(PoleArgs),
    /// Integer classes in a region with F(E) inside a closed range.
    Enumerate(EnumArgs),
    /// Render a figure preset (or an explicit specification) to SVG.
    Figure(FigureArgs),
    /// Run the acceptance criteria and print one pass/fail line each.
    Verify(VerifyArgs),
}

#[derive(Args, Debug)]
struct KArgs {
    #[arg(long, allow_hyphen_values = true)]
    k: String,
}

#[derive(Args, Debug)]
struct EvalArgs {
    #[arg(long, allow_hyphen_values = true)]
    k: String,
    /// F (the cubic) or H (its Hessian).
    #[arg(long, default_value = "F")]
    form: String,
    /// Comma-separated coordinates x,y,z (or x,y for an affine point).
    #[arg(long, allow_hyphen_values = true)]
    point: String,
    /// Allow parameters inside the degenerate band (k = 1 splits the curve).
    #[arg(long)]
    allow_degenerate: bool,
}

#[derive(Args, Debug)]
struct HessianArgs {
    #[arg(long, allow_hyphen_values = true)]
    k: Option<String>,
    /// Ten comma-separated coefficients (x3,x2y,x2z,xy2,xyz,xz2,y3,y2z,yz2,z3).
    #[arg(long, allow_hyphen_values = true)]
    coeffs: Option<String>,
}

#[derive(Args, Debug)]
struct SiblingsArgs {
    #[arg(long, allow_hyphen_values = true)]
    kprime: String,
    /// Accept the boundary k' = 1 (double root −2).
    #[arg(long)]
    allow_boundary: bool,
}

#[derive(Args, Debug)]
struct PointArgs {
    #[arg(long, allow_hyphen_values = true)]
    k: String,
    #[arg(long, allow_hyphen_values = true)]
    point: String,
}

#[derive(Args, Debug)]
struct GroupArgs {
    #[arg(long, allow_hyphen_values = true)]
    k: String,
    #[arg(long, allow_hyphen_values = true)]
    p1: String,
    #[arg(long, allow_hyphen_values = true)]
    p2: String,
    #[arg(long, allow_hyphen_values = true)]
    zero: Option<String>,
}

#[derive(Args, Debug)]
struct TwoTorsionArgs {
    #[arg(long, allow_hyphen_values = true)]
    k: String,
    #[arg(long, allow_hyphen_values = true)]
    zero: Option<String>,
}

#[derive(Args, Debug)]
struct ZerosArgs {
    #[arg(long, allow_hyphen_values = true)]
    k: String,
    /// Viewpoint A.
    #[arg(long, allow_hyphen_values = true)]
    a: String,
}

#[derive(Args, Debug)]
struct VisibleArgs {
    #[arg(long, allow_hyphen_values = true)]
    k: String,
    /// Viewpoint A.
    #[arg(long, allow_hyphen_values = true)]
    a: String,
    /// Boundary ray (on the component boundary or its negative).
    #[arg(long, allow_hyphen_values = true)]
    d0: String,
    /// Component id (defaults to the standard hybrid component).
    #[arg(long)]
    component: Option<usize>,
}

#[derive(Args, Debug)]
struct FermatArgs {
    #[arg(long, allow_hyphen_values = true)]
    a: String,
}

#[derive(Args, Debug)]
struct Km2Args {
    #[arg(long, allow_hyphen_values = true)]
    mu: String,
    #[arg(long, default_value_t = 120)]
    samples: usize,
    /// Check r·(c2·E) ≤ m·(c2·D): pass m,r here with --c2/--d/--e.
    #[arg(long, value_name = "M,R")]
    check_bound: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    c2: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    d: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    e: Option<String>,
}

#[derive(Args, Debug)]
struct LambdaArgs {
    #[arg(long, allow_hyphen_values = true)]
    k: String,
    #[arg(long, allow_hyphen_values = true)]
    e: String,
    #[arg(long, allow_hyphen_values = true)]
    d: String,
    #[arg(long)]
    component: Option<usize>,
}

#[derive(Args, Debug)]
struct PoleArgs {
    #[arg(long, allow_hyphen_values = true)]
    k: String,
    /// Covector of the linear form, three comma-separated values.
    #[arg(long, allow_hyphen_values = true)]
    l: String,
    #[arg(long)]
    component: Option<usize>,
}

#[derive(Args, Debug)]
struct EnumArgs {
    #[arg(long, allow_hyphen_values = true)]
    k: String,
    #[arg(long)]
    bound: i64,
    /// Closed range lo,hi for F(E).
    #[arg(long, allow_hyphen_values = true)]
    range: String,
    /// all | component:<id> | hessian-half-cone | ray:x,y,z
    #[arg(long, default_value = "all", allow_hyphen_values = true)]
    region: String,
}

#[derive(Args, Debug)]
struct FigureArgs {
    /// fig1 | fig2 | fig3 | fig4 | fig5.
    #[arg(long)]
    preset: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    k: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    a: Option<String>,
    /// xmin,xmax,ymin,ymax.
    #[arg(long, allow_hyphen_values = true)]
    viewport: Option<String>,
    /// Comma-separated subset of cubic,hessian,asymptotes,shade,marks.
    #[arg(long)]
    layers: Option<String>,
    /// Write the SVG here instead of stdout.
    #[arg(long)]
    out: Option<String>,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    /// all or a single criterion id 1..14.
    #[arg(long, default_value = "all")]
    suite: String,
    /// Defaults to the CUBICLAB_SEED env var, then a fixed constant.
    #[arg(long)]
    seed: Option<u64>,
}

/// Parse a decimal or a rational "p/q".
fn parse_real(s: &str) -> Result<f64, Error> {
    let s = s.trim();
    if let Some((p, q)) = s.split_once('/') {
        let p: f64 = p
            .trim()
            .parse()
            .map_err(|_| Error::InvalidInput(format!("bad rational numerator {p}")))?;
        let q: f64 = q
            .trim()
            .parse()
            .map_err(|_| Error::InvalidInput(format!("bad rational denominator {q}")))?;
        if q == 0.0 {
            return Err(Error::InvalidInput("zero denominator".into()));
        }
        Ok(p / q)
    } else {
        s.parse()
            .map_err(|_| Error::InvalidInput(format!("bad number {s}")))
    }
}

fn parse_reals(s: &str) -> Result<Vec<f64>, Error> {
    s.split(',').map(parse_real).collect()
}

fn parse_point(s: &str) -> Result<RayVector, Error> {
    let v = parse_reals(s)?;
    match v.len() {
        2 => Ok(RayVector::affine(v[0], v[1])),
        3 => Ok(RayVector::new(v[0], v[1], v[2])),
        n => Err(Error::InvalidInput(format!("expected 2 or 3 coordinates, got {n}"))),
    }
}

struct Output {
    op: &'static str,
    inputs: Value,
    outputs: Value,
    residuals: Value,
    warnings: Vec<String>,
    human: String,
}

impl Output {
    fn render(self, json_mode: bool) -> String {
        if json_mode {
            let obj = json!({
                "op": self.op,
                "inputs": self.inputs,
                "outputs": self.outputs,
                "residuals": self.residuals,
                "warnings": self.warnings,
            });
            serde_json::to_string_pretty(&obj).expect("serializable") + "\n"
        } else {
            let mut out = self.human;
            if !out.ends_with('\n') {
                out.push('\n');
            }
            for w in &self.warnings {
                out.push_str(&format!("warning: {w}\n"));
            }
            out
        }
    }
}

/// Run the CLI on argv (without the program name); returns
/// (exit code, output text).
pub fn run<I, S>(argv: I) -> (i32, String)
where
    I: IntoIterator<Item = S>,
    S: Into<String>,
{
    let mut args: Vec<String> = argv.into_iter().map(Into::into).collect();
    args.insert(0, "cubiclab".to_string());
    let cli = match Cli::try_parse_from(&args) {
        Ok(c) => c,
        Err(e) => {
            // clap help/version requests are successful output
            let code = if e.use_stderr() { 2 } else { 0 };
            return (code, e.to_string());
        }
    };

    let mut tol = Tolerances::default();
    for ov in &cli.tol {
        let Some((name, value)) = ov.split_once('=') else {
            return (2, format!("bad --tol override {ov}: expected NAME=VALUE\n"));
        };
        let value = match parse_real(value) {
            Ok(v) => v,
            Err(e) => return (2, format!("bad --tol value: {e}\n")),
        };
        if let Err(e) = tol.set(name.trim(), value) {
            return (2, format!("{e}\n"));
        }
    }

    match dispatch(&cli.cmd, &tol) {
        Ok(out) => (0, out.render(cli.json)),
        Err(e) => {
            let name = error_name(&e);
            if cli.json {
                let obj = json!({"error": name, "message": e.to_string()});
                (1, serde_json::to_string_pretty(&obj).expect("serializable") + "\n")
            } else {
                (1, format!("error: {e}\n"))
            }
        }
    }
}

fn error_name(e: &Error) -> &'static str {
    match e {
        Error::DegenerateParameter(_) => "DegenerateParameter",
        Error::DomainError(_) => "DomainError",
        Error::RankError(_) => "RankError",
        Error::NotOnHessian(_) => "NotOnHessian",
        Error::NotOnCurve(_) => "NotOnCurve",
        Error::NotOnBoundary => "NotOnBoundary",
        Error::UnknownBranch(_) => "UnknownBranch",
        Error::IdenticalPoints => "IdenticalPoints",
        Error::HypothesisFailed(_) => "HypothesisFailed",
        Error::NoConvergence(_) => "NoConvergence",
        Error::AtInfinity => "AtInfinity",
        Error::InvalidInput(_) => "InvalidInput",
    }
}

fn dispatch(cmd: &Cmd, tol: &Tolerances) -> Result<Output, Error> {
    match cmd {
        Cmd::Eval(a) => {
            let k = parse_real(&a.k)?;
            let point = parse_point(&a.point)?;
            let f = TernaryCubic::hesse(k, tol, a.allow_degenerate)?;
            let (form, value) = match a.form.to_ascii_uppercase().as_str() {
                "F" => ("F", f.evaluate(&point)),
                "H" => ("H", f.hessian_cubic().evaluate(&point)),
                other => {
                    return Err(Error::InvalidInput(format!("form must be F or H, got {other}")))
                }
            };
            Ok(Output {
                op: "eval",
                inputs: json!({"k": k, "form": form, "point": point}),
                outputs: json!({"value": value}),
                residuals: json!({}),
                warnings: vec![],
                human: format!("{form}_{k}({:?}) = {value}", point.coords),
            })
        }
        Cmd::Hessian(a) => {
            let (cubic, k_in) = match (&a.k, &a.coeffs) {
                (Some(ks), None) => {
                    let k = parse_real(ks)?;
                    (TernaryCubic::hesse(k, tol, false)?, Some(k))
                }
                (None, Some(cs)) => {
                    let v = parse_reals(cs)?;
                    if v.len() != 10 {
                        return Err(Error::InvalidInput(format!(
                            "expected 10 coefficients, got {}",
                            v.len()
                        )));
                    }
                    let mut c = [0.0; 10];
                    c.copy_from_slice(&v);
                    (TernaryCubic::from_coeffs(c), None)
                }
                _ => {
                    return Err(Error::InvalidInput(
                        "pass exactly one of --k or --coeffs".into(),
                    ))
                }
            };
            let h = cubic.hessian_cubic();
            let kp = k_in.and_then(|k| forms::hessian_parameter(k, tol).ok());
            Ok(Output {
                op: "hessian",
                inputs: json!({"k": k_in, "coeffs": cubic.coeffs}),
                outputs: json!({"hessian_coeffs": h.coeffs, "k_prime": kp}),
                residuals: json!({}),
                warnings: vec![],
                human: match kp {
                    Some(kp) => format!("H coefficients: {:?}\nk' = {kp}", h.coeffs),
                    None => format!("H coefficients: {:?}", h.coeffs),
                },
            })
        }
        Cmd::Siblings(a) => {
            let kp = parse_real(&a.kprime)?;
            let s = forms::siblings(kp, a.allow_boundary)?;
            let round_trip: Vec<f64> = s
                .iter()
                .map(|k| forms::hessian_parameter(*k, tol).map(|b| (b - kp).abs()).unwrap_or(f64::NAN))
                .collect();
            Ok(Output {
                op: "siblings",
                inputs: json!({"kprime": kp, "allow_boundary": a.allow_boundary}),
                outputs: json!({"siblings": s}),
                residuals: json!({"round_trip": round_trip}),
                warnings: vec![],
                human: format!("siblings of k' = {kp}: {:?}", s),
            })
        }
        Cmd::Components(a) => {
            let k = parse_real(&a.k)?;
            let atlas = ConeAtlas::new(k, tol)?;
            let summary = atlas.summary_json();
            Ok(Output {
                op: "components",
                inputs: json!({"k": k}),
                outputs: summary.clone(),
                residuals: json!({}),
                warnings: vec![],
                human: format!(
                    "{} components at k = {k}\n{}",
                    atlas.components.len(),
                    serde_json::to_string_pretty(&summary).expect("serializable")
                ),
            })
        }
        Cmd::Steinian(a) => {
            let k = parse_real(&a.k)?;
            let u = parse_point(&a.point)?;
            let pair = CurvePair::new(k, tol)?;
            let image = steinian::steinian_map(&pair, &u, tol)?;
            let (line_res, tangency) = steinian::verify_steinian_tangency(&pair, &u, tol)?;
            Ok(Output {
                op: "steinian",
                inputs: json!({"k": k, "point": u}),
                outputs: json!({"image": image}),
                residuals: json!({"line_value": line_res, "tangency_defect": tangency}),
                warnings: vec![],
                human: format!("alpha({:?}) = {:?}", u.coords, image.coords),
            })
        }
        Cmd::Group(a) => {
            let k = parse_real(&a.k)?;
            let p1 = parse_point(&a.p1)?;
            let p2 = parse_point(&a.p2)?;
            let zero = a.zero.as_deref().map(parse_point).transpose()?.unwrap_or(B3);
            let pair = CurvePair::new(k, tol)?;
            let ctx = GroupLawContext::new(pair.h.clone(), zero, tol)?;
            let sum = ctx.add(&p1, &p2)?;
            Ok(Output {
                op: "group",
                inputs: json!({"k": k, "p1": p1, "p2": p2, "zero": zero}),
                outputs: json!({"sum": sum}),
                residuals: json!({"on_curve": pair.h.evaluate(&sum).abs() / pair.h.max_coeff()}),
                warnings: vec![],
                human: format!("sum = {:?}", sum.coords),
            })
        }
        Cmd::TwoTorsion(a) => {
            let k = parse_real(&a.k)?;
            let zero = a.zero.as_deref().map(parse_point).transpose()?.unwrap_or(B3);
            let pair = CurvePair::new(k, tol)?;
            let ctx = GroupLawContext::new(pair.h.clone(), zero, tol)?;
            let arcs = steinian::hessian_scan_arcs(k, tol, &curve_geometry::TraceConfig::default())?;
            let torsion = ctx.two_torsion_on(&arcs);
            Ok(Output {
                op: "two-torsion",
                inputs: json!({"k": k, "zero": zero}),
                outputs: json!({"points": torsion, "count": torsion.len()}),
                residuals: json!({}),
                warnings: vec![],
                human: format!(
                    "{} real 2-torsion point(s): {:?}",
                    torsion.len(),
                    torsion.iter().map(|p| p.coords).collect::<Vec<_>>()
                ),
            })
        }
        Cmd::Zeros(a) => {
            let k = parse_real(&a.k)?;
            let ap = parse_point(&a.a)?;
            let ctx = VisibilityCtx::new(k, tol)?;
            let report = ctx.ga_zero_count(&ap)?;
            let human = format!(
                "zeros on closed C1: {}  B1R: {}  at R: {}  RB2: {}{}{}",
                report.sampled.c1_closed,
                report.sampled.b1r,
                report.sampled.at_r,
                report.sampled.rb2,
                report
                    .analytic_case
                    .as_ref()
                    .map(|c| format!("\nanalytic case: {c}, agree: {:?}", report.agree))
                    .unwrap_or_default(),
                report
                    .line_pair
                    .map(|p| format!("\nline pair, singular point {:?}", p.coords))
                    .unwrap_or_default(),
            );
            Ok(Output {
                op: "zeros",
                inputs: json!({"k": k, "a": ap}),
                outputs: serde_json::to_value(&report).expect("serializable"),
                residuals: json!({}),
                warnings: vec![report.note.to_string()],
                human,
            })
        }
        Cmd::Visible(a) => {
            let k = parse_real(&a.k)?;
            let ap = parse_point(&a.a)?;
            let d0 = parse_point(&a.d0)?;
            let ctx = VisibilityCtx::new(k, tol)?;
            let comp = a.component.unwrap_or_else(|| ctx.atlas.standard_hybrid_id());
            if comp >= ctx.atlas.components.len() {
                return Err(Error::InvalidInput(format!("no component {comp}")));
            }
            let v = ctx.visible(comp, &ap, &d0)?;
            let tangent = ctx.visible_tangent_test(comp, &ap, &d0).ok().flatten();
            Ok(Output {
                op: "visible",
                inputs: json!({"k": k, "a": ap, "d0": d0, "component": comp}),
                outputs: json!({"visible": v, "tangent_test": tangent}),
                residuals: json!({}),
                warnings: vec![],
                human: format!("visible: {v} (tangent test: {tangent:?})"),
            })
        }
        Cmd::ClassifyFermat(a) => {
            let ap = parse_point(&a.a)?;
            let case = scenario::fermat_classify(&ap)?;
            Ok(Output {
                op: "classify-fermat",
                inputs: json!({"a": ap}),
                outputs: serde_json::to_value(&case).expect("serializable"),
                residuals: json!({}),
                warnings: if case.tie {
                    vec!["boundary tie: lowest matching case returned".into()]
                } else {
                    vec![]
                },
                human: format!(
                    "case {}{}{}: {:?}",
                    case.case_id,
                    if case.mirrored { " (mirrored)" } else { "" },
                    if case.tie { " (tie)" } else { "" },
                    case.facts
                ),
            })
        }
        Cmd::Km2(a) => {
            let mu = parse_real(&a.mu)?;
            let report = scenario::km2_fact_check(mu, a.samples, tol)?;
            let mut outputs = serde_json::to_value(&report).expect("serializable");
            let mut human = format!(
                "t({mu}) = {}  s({mu}) = {:?}\nmissing-line {}  splitting-line {}  t-intersection {}  e2-negativity {}  q-regions {}",
                report.t_mu,
                report.s_mu,
                report.missing_line_ok,
                report.splitting_line_ok,
                report.t_intersection_ok,
                report.e2_negativity_ok,
                report.q_region_count
            );
            if let Some(mr) = &a.check_bound {
                let v = parse_reals(mr)?;
                if v.len() != 2 {
                    return Err(Error::InvalidInput("--check-bound expects M,R".into()));
                }
                let c2 = LinearForm3::new(
                    parse_point(a.c2.as_deref().ok_or_else(|| {
                        Error::InvalidInput("--check-bound requires --c2".into())
                    })?)?
                    .coords,
                );
                let d = parse_point(a.d.as_deref().ok_or_else(|| {
                    Error::InvalidInput("--check-bound requires --d".into())
                })?)?;
                let e = parse_point(a.e.as_deref().ok_or_else(|| {
                    Error::InvalidInput("--check-bound requires --e".into())
                })?)?;
                let (lhs, rhs, ok) = scenario::multiple_bound_check(v[0], v[1], &c2, &d, &e);
                outputs["bound_check"] = json!({"lhs": lhs, "rhs": rhs, "holds": ok});
                human.push_str(&format!("\nbound check: {lhs} <= {rhs}: {ok}"));
            }
            Ok(Output {
                op: "km2",
                inputs: json!({"mu": mu, "samples": a.samples}),
                outputs,
                residuals: json!({}),
                warnings: vec![],
                human,
            })
        }
        Cmd::LambdaBound(a) => {
            let k = parse_real(&a.k)?;
            let e = parse_point(&a.e)?;
            let d = parse_point(&a.d)?;
            let atlas = ConeAtlas::new(k, tol)?;
            let comp = match a.component {
                Some(c) => c,
                None => atlas
                    .bounded_positive_id()
                    .unwrap_or_else(|| atlas.standard_hybrid_id()),
            };
            let res = scenario::lambda_bound(&atlas, comp, &e, &d)?;
            Ok(Output {
                op: "lambda-bound",
                inputs: json!({"k": k, "e": e, "d": d, "component": comp}),
                outputs: json!({
                    "lambda0": res.lambda0,
                    "method": res.method,
                    "certificate_count": res.certificates.len(),
                    "cubic_roots": res.cubic_roots,
                }),
                residuals: json!({}),
                warnings: vec![],
                human: format!(
                    "lambda0 = {} ({:?}, {} certificates)",
                    res.lambda0,
                    res.method,
                    res.certificates.len()
                ),
            })
        }
        Cmd::Pole(a) => {
            let k = parse_real(&a.k)?;
            let lv = parse_reals(&a.l)?;
            if lv.len() != 3 {
                return Err(Error::InvalidInput("pole form needs 3 covector entries".into()));
            }
            let l = LinearForm3::new([lv[0], lv[1], lv[2]]);
            let atlas = ConeAtlas::new(k, tol)?;
            let comp = match a.component {
                Some(c) => c,
                None => atlas.bounded_positive_id().ok_or_else(|| {
                    Error::DomainError("no bounded positive component at this k".into())
                })?,
            };
            let d = scenario::pole_solve(&atlas, comp, &l, tol)?;
            let tri = atlas.pair.f.trilinear();
            let back = tri.contract2(&d, &d);
            let res = (0..3)
                .map(|i| (back.covector[i] - l.covector[i]).abs())
                .fold(0.0f64, f64::max);
            Ok(Output {
                op: "pole",
                inputs: json!({"k": k, "l": l, "component": comp}),
                outputs: json!({"d": d}),
                residuals: json!({"covector_sup": res}),
                warnings: vec![],
                human: format!("D = {:?} (residual {res:.3e})", d.coords),
            })
        }
        Cmd::Enumerate(a) => {
            let k = parse_real(&a.k)?;
            let rv = parse_reals(&a.range)?;
            if rv.len() != 2 {
                return Err(Error::InvalidInput("--range expects lo,hi".into()));
            }
            let atlas = ConeAtlas::new(k, tol)?;
            let region = parse_region(&a.region, &atlas)?;
            let found = scenario::enumerate_integral(&atlas, &region, a.bound, (rv[0], rv[1]))?;
            Ok(Output {
                op: "enumerate",
                inputs: json!({"k": k, "bound": a.bound, "range": rv, "region": a.region}),
                outputs: json!({"classes": found, "count": found.len()}),
                residuals: json!({}),
                warnings: vec![],
                human: format!("{} classes: {:?}", found.len(), found),
            })
        }
        Cmd::Figure(a) => {
            let spec = match (&a.preset, &a.k) {
                (Some(name), _) => render::preset(name)?,
                (None, Some(ks)) => {
                    let k = parse_real(ks)?;
                    let vp = match &a.viewport {
                        Some(v) => {
                            let vv = parse_reals(v)?;
                            if vv.len() != 4 {
                                return Err(Error::InvalidInput(
                                    "--viewport expects xmin,xmax,ymin,ymax".into(),
                                ));
                            }
                            (vv[0], vv[1], vv[2], vv[3])
                        }
                        None => (-2.0, 2.0, -2.0, 2.0),
                    };
                    let layers = match &a.layers {
                        None => vec![
                            render::Layer::Cubic,
                            render::Layer::Hessian,
                            render::Layer::Asymptotes,
                        ],
                        Some(ls) => ls
                            .split(',')
                            .map(|l| match l.trim().to_ascii_lowercase().as_str() {
                                "cubic" => Ok(render::Layer::Cubic),
                                "hessian" => Ok(render::Layer::Hessian),
                                "asymptotes" => Ok(render::Layer::Asymptotes),
                                "shade" => Ok(render::Layer::ShadeQ),
                                "marks" => Ok(render::Layer::MarkPoints),
                                other => {
                                    Err(Error::InvalidInput(format!("unknown layer {other}")))
                                }
                            })
                            .collect::<Result<Vec<_>, _>>()?,
                    };
                    render::FigureSpec {
                        k,
                        a_point: a.a.as_deref().map(parse_point).transpose()?,
                        viewport: vp,
                        layers,
                        width_px: 800,
                        height_px: 800,
                        shade_grid: 420,
                        style: render::Style::default(),
                    }
                }
                _ => return Err(Error::InvalidInput("pass --preset or --k".into())),
            };
            let svg = render::render_figure(&spec, tol)?;
            let human = match &a.out {
                Some(path) => {
                    std::fs::write(path, &svg)
                        .map_err(|e| Error::InvalidInput(format!("cannot write {path}: {e}")))?;
                    format!("wrote {} bytes to {path}", svg.len())
                }
                None => svg.clone(),
            };
            Ok(Output {
                op: "figure",
                inputs: json!({"preset": a.preset, "out": a.out}),
                outputs: json!({"bytes": svg.len(), "written": a.out}),
                residuals: json!({}),
                warnings: vec![],
                human,
            })
        }
        Cmd::Verify(a) => {
            let seed = a
                .seed
                .or_else(|| {
                    std::env::var("CUBICLAB_SEED")
                        .ok()
                        .and_then(|s| s.parse().ok())
                })
                .unwrap_or(0xC0B1C1AB5EED);
            let results = if a.suite == "all" {
                verify::run_all(seed, tol)
            } else {
                let id: u8 = a
                    .suite
                    .parse()
                    .map_err(|_| Error::InvalidInput(format!("bad suite {}", a.suite)))?;
                vec![verify::run_criterion(id, seed, tol)]
            };
            let all_pass = results.iter().all(|r| r.passed);
            let mut human = String::new();
            for r in &results {
                human.push_str(&r.line());
                human.push('\n');
            }
            human.push_str(&format!(
                "{}: {}/{} criteria passed (seed {seed})\n",
                if all_pass { "OK" } else { "FAILED" },
                results.iter().filter(|r| r.passed).count(),
                results.len()
            ));
            if !all_pass {
                return Err(Error::DomainError(format!("verification failed\n{human}")));
            }
            Ok(Output {
                op: "verify",
                inputs: json!({"suite": a.suite, "seed": seed}),
                outputs: serde_json::to_value(&results).expect("serializable"),
                residuals: json!({}),
                warnings: vec![],
                human,
            })
        }
    }
}

fn parse_region(s: &str, atlas: &ConeAtlas) -> Result<RegionSpec, Error> {
    let s = s.trim();
    if s == "all" {
        return Ok(RegionSpec::All);
    }
    if s == "hessian-half-cone" {
        return Ok(RegionSpec::HessianHalfConeBounded);
    }
    if let Some(id) = s.strip_prefix("component:") {
        let id: usize = id
            .parse()
            .map_err(|_| Error::InvalidInput(format!("bad component id {id}")))?;
        if id >= atlas.components.len() {
            return Err(Error::InvalidInput(format!("no component {id}")));
        }
        return Ok(RegionSpec::Component(id));
    }
    if let Some(ray) = s.strip_prefix("ray:") {
        return Ok(RegionSpec::Ray(parse_point(ray)?));
    }
    Err(Error::InvalidInput(format!("unknown region spec {s}")))
}
