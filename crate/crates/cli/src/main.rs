//! `qmf`: command-line front end for the qmodular library.
//!
//! Every subcommand prints one JSON document on stdout. Exit status is 0 on
//! success, 1 when a mathematical check fails or no object with the requested
//! property exists, and 2 on usage or I/O errors.

use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context};
use clap::{Parser, Subcommand, ValueEnum};
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{json, Value};

use qmodular::exact::{rational_roots, Coefficient, QSeries, Rational, SymCoeff};
use qmodular::formsdb::{self, EvalPoint, GroupElement, VerifyStatus};
use qmodular::laplacian::{self, LiftProblem};
use qmodular::nhform::NHForm;
use qmodular::quasimod::{QMForm, VVTuple};
use qmodular::rankincohen::{self, RCParams};
use qmodular::vvops::{self, TripleParams};
use qmodular::{random, Complex64, Error};

#[derive(Parser)]
#[command(name = "qmf", version, about = "Exact computations with quasi-modular and vector-valued modular forms")]
struct Cli {
    /// Seed for randomized symbolic inputs.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// q-expansion truncation order.
    #[arg(long, global = true, default_value_t = 40)]
    order: usize,
    /// Tolerance for numeric checks.
    #[arg(long, global = true, default_value_t = 1e-6)]
    tol: f64,
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args, Clone)]
struct Triple {
    #[arg(long, allow_hyphen_values = true)]
    a: Rational,
    #[arg(long, allow_hyphen_values = true)]
    b: Rational,
    #[arg(long, allow_hyphen_values = true)]
    c: Rational,
}

impl Triple {
    fn params(&self) -> anyhow::Result<TripleParams> {
        Ok(TripleParams::new(self.a.clone(), self.b.clone(), self.c.clone())?)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Apply an operator to a tuple or quasi-modular form read from JSON.
    Apply {
        #[arg(long, value_enum)]
        op: Op,
        /// Index l for tilde-delta.
        #[arg(long, allow_hyphen_values = true)]
        l: Option<Rational>,
        #[arg(long, allow_hyphen_values = true)]
        a: Option<Rational>,
        #[arg(long, allow_hyphen_values = true)]
        b: Option<Rational>,
        #[arg(long, allow_hyphen_values = true)]
        c: Option<Rational>,
        /// Input file, or "-" for stdin.
        input: PathBuf,
    },
    /// Rankin–Cohen coefficients, optionally applied to two forms.
    Rc {
        #[arg(long)]
        n: usize,
        #[arg(long, allow_hyphen_values = true)]
        k: Rational,
        #[arg(long)]
        d: usize,
        #[arg(long, allow_hyphen_values = true)]
        l: Rational,
        #[arg(long)]
        e: usize,
        /// Basis element to use in the excluded case.
        #[arg(long, default_value_t = 0)]
        which: usize,
        #[arg(long, num_args = 2, value_names = ["F", "G"])]
        apply: Option<Vec<PathBuf>>,
    },
    /// Eigenvalue polynomial of the Laplacian on lifts from weight k−2d.
    Eigenpoly {
        #[command(flatten)]
        triple: Triple,
        #[arg(long, allow_hyphen_values = true)]
        k: Rational,
        #[arg(long)]
        d: usize,
        /// Laplace eigenvalue of φ (only meaningful when (1−a)(k−2) = d).
        #[arg(long, allow_hyphen_values = true)]
        mu: Option<Rational>,
    },
    /// Build the lift of φ at eigenvalue λ and verify it.
    Lift {
        #[command(flatten)]
        triple: Triple,
        #[arg(long, allow_hyphen_values = true)]
        k: Rational,
        #[arg(long)]
        d: usize,
        #[arg(long, allow_hyphen_values = true)]
        lambda: Rational,
        /// Symbolic NHForm JSON for φ; defaults to a generic meromorphic φ.
        #[arg(long)]
        phi: Option<PathBuf>,
    },
    /// Check ΔT + λT = 0 for a tuple T.
    VerifyEigen {
        #[command(flatten)]
        triple: Triple,
        #[arg(long, allow_hyphen_values = true)]
        lambda: Rational,
        input: PathBuf,
    },
    /// Numeric check of the quasi-modular transformation law.
    VerifyTransform {
        /// QMForm or NHForm JSON over q-series, or an array of QMForms.
        input: PathBuf,
        /// "a,b,c,d"
        #[arg(long, allow_hyphen_values = true, default_value = "0,-1,1,0")]
        gamma: String,
        /// "x+yi"
        #[arg(long, allow_hyphen_values = true, default_value = "2i")]
        tau: String,
        /// JSON matrix of [re, im] pairs for ρ(γ).
        #[arg(long)]
        rho: Option<PathBuf>,
    },
    /// The built-in q-expansions.
    Forms {
        #[command(subcommand)]
        action: FormsAction,
    },
    /// Randomized verification suites.
    Suite {
        #[arg(long, value_enum)]
        name: SuiteName,
        #[arg(long, default_value_t = 4)]
        depth: usize,
        #[arg(long, default_value_t = 20)]
        draws: usize,
        /// Random constraint-satisfying triples to add to the sl2 suite.
        #[arg(long, default_value_t = 0)]
        random_triples: usize,
    },
}

#[derive(Subcommand)]
enum FormsAction {
    /// Print E2, E4, E6 or Delta as JSON.
    Emit {
        #[arg(long)]
        name: String,
        /// Emit a quasi-modular form (E2 with its companion) instead of an NHForm.
        #[arg(long)]
        qm: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Op {
    Raise,
    TildeDelta,
    Lower4,
    Lower,
    Ibar,
    D,
    Weight,
    Sl2E,
    Sl2F,
    Laplacian,
    ToQm,
    QmDerive,
    QmDelta,
    QmDivY,
    QmLower,
    QmShift1,
    ToTuple,
}

#[derive(Clone, Copy, ValueEnum)]
enum SuiteName {
    Sl2,
    Commutators,
    RcGrid,
    Eigen,
}

/// A failure with its exit status.
enum Failure {
    Math(anyhow::Error),
    Usage(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        match e.downcast_ref::<Error>() {
            Some(Error::NotARoot(_) | Error::NoLift(_) | Error::Misclassified(_) | Error::Degenerate(_)) => {
                Failure::Math(e)
            }
            _ => Failure::Usage(e),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::from(anyhow::Error::new(e))
    }
}

/// JSON output and whether every check in it passed.
struct Output {
    json: Value,
    ok: bool,
}

impl Output {
    fn ok(json: Value) -> Self {
        Output { json, ok: true }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(out) => {
            let text = serde_json::to_string_pretty(&out.json).expect("serializable output");
            // a closed pipe downstream is not an error of ours
            let _ = writeln!(std::io::stdout(), "{text}");
            ExitCode::from(if out.ok { 0 } else { 1 })
        }
        Err(Failure::Math(e)) => {
            println!("{}", json!({ "error": format!("{e:#}") }));
            eprintln!("qmf: {e:#}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(e)) => {
            eprintln!("qmf: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: &Cli) -> Result<Output, Failure> {
    match &cli.command {
        Command::Apply { op, l, a, b, c, input } => {
            let triple = match (a, b, c) {
                (Some(a), Some(b), Some(c)) => Some(TripleParams::new(a.clone(), b.clone(), c.clone())?),
                (None, None, None) => None,
                _ => return Err(Failure::Usage(anyhow!("--a, --b and --c must be given together"))),
            };
            let value = read_json(input)?;
            let out = match as_qseries_or_sym(&value)? {
                Coeffs::Q => apply_op::<QSeries>(*op, l.as_ref(), triple.as_ref(), value)?,
                Coeffs::Sym => apply_op::<SymCoeff>(*op, l.as_ref(), triple.as_ref(), value)?,
            };
            Ok(Output::ok(out))
        }
        Command::Rc { n, k, d, l, e, which, apply } => {
            cmd_rc(RCParams::new(*n, k.clone(), *d, l.clone(), *e), *which, apply.as_deref())
        }
        Command::Eigenpoly { triple, k, d, mu } => cmd_eigenpoly(&triple.params()?, k, *d, mu.as_ref()),
        Command::Lift { triple, k, d, lambda, phi } => cmd_lift(&triple.params()?, k, *d, lambda, phi.as_deref()),
        Command::VerifyEigen { triple, lambda, input } => {
            let p = triple.params()?;
            let mut value = read_json(input)?;
            // accept the report written by `lift`
            if let Some(t) = value.get_mut("tuple").map(Value::take) {
                value = t;
            }
            let (passed, residual) = match as_qseries_or_sym(&value)? {
                Coeffs::Q => eigen_check::<QSeries>(&p, lambda, value)?,
                Coeffs::Sym => eigen_check::<SymCoeff>(&p, lambda, value)?,
            };
            Ok(Output {
                json: json!({ "lambda": lambda, "passed": passed, "residual": residual }),
                ok: passed,
            })
        }
        Command::VerifyTransform { input, gamma, tau, rho } => {
            cmd_verify_transform(input, gamma, tau, rho.as_deref(), cli.tol)
        }
        Command::Forms {
            action: FormsAction::Emit { name, qm },
        } => {
            let json = if *qm {
                to_value(&formsdb::qmform_by_name(name, cli.order)?)?
            } else {
                to_value(&formsdb::form_by_name(name, cli.order)?)?
            };
            Ok(Output::ok(json))
        }
        Command::Suite {
            name,
            depth,
            draws,
            random_triples,
        } => cmd_suite(*name, *depth, *draws, *random_triples, cli.seed),
    }
}

fn read_json(path: &Path) -> anyhow::Result<Value> {
    let text = if path == Path::new("-") {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s).context("reading stdin")?;
        s
    } else {
        fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?
    };
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

fn to_value<T: Serialize>(x: &T) -> anyhow::Result<Value> {
    Ok(serde_json::to_value(x)?)
}

fn parse<T: DeserializeOwned>(v: Value, what: &str) -> anyhow::Result<T> {
    serde_json::from_value(v).with_context(|| format!("input is not a valid {what}"))
}

enum Coeffs {
    Q,
    Sym,
}

/// Decide the coefficient ring from the first stored coefficient.
fn as_qseries_or_sym(v: &Value) -> anyhow::Result<Coeffs> {
    fn first_coeff(v: &Value) -> Option<&Value> {
        match v {
            Value::Object(m) => {
                if let Some(parts) = m.get("parts").and_then(Value::as_object) {
                    return parts.values().next();
                }
                m.get("components")
                    .and_then(Value::as_array)
                    .and_then(|cs| cs.iter().find_map(first_coeff))
            }
            Value::Array(xs) => xs.iter().find_map(first_coeff),
            _ => None,
        }
    }
    match first_coeff(v) {
        Some(c) if c.get("order").is_some() => Ok(Coeffs::Q),
        Some(c) if c.get("terms").is_some() => Ok(Coeffs::Sym),
        Some(_) => bail!("unrecognized coefficient encoding"),
        None => Ok(Coeffs::Sym),
    }
}

fn apply_op<C: Coefficient + Serialize + DeserializeOwned>(
    op: Op,
    l: Option<&Rational>,
    triple: Option<&TripleParams>,
    value: Value,
) -> anyhow::Result<Value> {
    let need_triple = || triple.ok_or_else(|| anyhow!("this operator needs --a, --b and --c"));
    let is_qm = value.get("kind").and_then(Value::as_str) == Some("qmform");
    let qm_ops = matches!(
        op,
        Op::QmDerive | Op::QmDelta | Op::QmDivY | Op::QmLower | Op::QmShift1 | Op::ToTuple
    );
    if qm_ops {
        if !is_qm {
            bail!("operator expects a qmform input");
        }
        let f: QMForm<C> = parse(value, "qmform")?;
        return match op {
            Op::QmDerive => to_value(&f.derive()),
            Op::QmDelta => to_value(&f.delta()),
            Op::QmDivY => to_value(&f.div_neg2iy()),
            Op::QmLower => to_value(&f.lower()),
            Op::QmShift1 => {
                if f.depth() == 0 {
                    to_value(&QMForm::<C>::zero(f.weight() - Rational::integer(2)))
                } else {
                    to_value(&f.shift1())
                }
            }
            _ => to_value(&f.to_tuple()),
        };
    }
    if is_qm {
        bail!("operator expects a vvtuple input");
    }
    let t: VVTuple<C> = parse(value, "vvtuple")?;
    match op {
        Op::Raise => to_value(&vvops::vv_raise(&t)),
        Op::TildeDelta => {
            let l = l.ok_or_else(|| anyhow!("tilde-delta needs --l"))?;
            to_value(&vvops::vv_tilde_delta(&t, l))
        }
        Op::Lower4 => to_value(&vvops::vv_lower4(&t)),
        Op::Lower => to_value(&vvops::vv_lower(&t)),
        Op::Ibar => to_value(&vvops::vv_ibar_over(&t)),
        Op::D => to_value(&vvops::vv_d(&t)),
        Op::Weight => to_value(&vvops::vv_weight(&t)),
        Op::Sl2E => to_value(&vvops::sl2_e(&t, need_triple()?)),
        Op::Sl2F => to_value(&vvops::sl2_f(&t, need_triple()?)),
        Op::Laplacian => to_value(&laplacian::lap_closed(&t, need_triple()?)),
        _ => to_value(&t.to_qm()),
    }
}

fn eigen_check<C: Coefficient + Serialize + DeserializeOwned>(
    p: &TripleParams,
    lambda: &Rational,
    value: Value,
) -> anyhow::Result<(bool, Value)> {
    let t: VVTuple<C> = parse(value, "vvtuple")?;
    let r = laplacian::eigen_residual(&t, p, lambda);
    Ok((r.is_zero(), to_value(&r)?))
}

/// Accept a QMForm, an NHForm (depth 0) or an array of QMForms.
fn read_forms(value: Value) -> anyhow::Result<Vec<QMForm<QSeries>>> {
    match value {
        Value::Array(xs) => xs.into_iter().map(|x| read_forms(x).map(|mut v| v.remove(0))).collect(),
        v if v.get("kind").is_some() => Ok(vec![parse(v, "qmform")?]),
        v => Ok(vec![QMForm::modular(parse::<NHForm<QSeries>>(v, "nhform")?)]),
    }
}

fn cmd_verify_transform(
    input: &Path,
    gamma: &str,
    tau: &str,
    rho: Option<&Path>,
    tol: f64,
) -> Result<Output, Failure> {
    let forms = read_forms(read_json(input)?)?;
    let gamma: GroupElement = gamma.parse()?;
    let tau: EvalPoint = tau.parse()?;
    let rho = match rho {
        None => None,
        Some(path) => {
            let m: Vec<Vec<[f64; 2]>> = parse(read_json(path)?, "matrix of [re, im] pairs")?;
            Some(
                m.into_iter()
                    .map(|row| row.into_iter().map(|[re, im]| Complex64::new(re, im)).collect())
                    .collect::<Vec<Vec<Complex64>>>(),
            )
        }
    };
    let report = formsdb::verify_transformation(&forms, gamma, rho.as_deref(), tau, tol)?;
    Ok(Output {
        ok: report.status == VerifyStatus::Pass,
        json: to_value(&report)?,
    })
}

fn cmd_rc(p: RCParams, which: usize, apply: Option<&[PathBuf]>) -> Result<Output, Failure> {
    let coeffs = rankincohen::rc_solve(&p)?;
    if which >= coeffs.basis.len() {
        return Err(Failure::Usage(anyhow!(
            "--which {which} out of range: the solution space has dimension {}",
            coeffs.basis.len()
        )));
    }
    let certificates: Vec<_> = (0..coeffs.basis.len())
        .map(|i| rankincohen::rc_holomorphy_certificate(&p, &coeffs, i))
        .collect();
    let mut ok = certificates.iter().all(|c| c.passed);
    let mut out = json!({
        "params": p,
        "excluded": rankincohen::rc_is_excluded(&p),
        "kernel_dim": coeffs.kernel_dim,
        "coefficients": coeffs.bracket_coefficients(which),
        "basis": coeffs.basis,
        "certificates": certificates,
    });
    if let Some([f, g]) = apply {
        let f = read_forms(read_json(f)?)?.remove(0);
        let g = read_forms(read_json(g)?)?.remove(0);
        let bracket = rankincohen::rc_apply(&p, &f, &g, &coeffs, which)?;
        ok &= bracket.depth() <= p.d + p.e;
        out["bracket"] = to_value(&bracket)?;
    }
    Ok(Output { json: out, ok })
}

fn cmd_eigenpoly(p: &TripleParams, k: &Rational, d: usize, mu: Option<&Rational>) -> Result<Output, Failure> {
    let prob = LiftProblem::new(p.clone(), k.clone(), d);
    let mut out = json!({ "params": p, "k": k, "d": d, "branch": prob.branch });
    if prob.branch.b_zero {
        let sol = laplacian::solve_beta(&prob)?;
        out["poly"] = json!(qmodular::exact::UniPoly::linear_root(&sol.lambda).to_string());
        out["roots"] = json!([sol.lambda.to_string()]);
        out["rational_roots"] = json!([{ "value": sol.lambda, "multiplicity": 1 }]);
        out["beta"] = to_value(&sol.beta)?;
        out["annihilation_order"] = json!(sol.annihilation_order);
        return Ok(Output::ok(out));
    }
    let mu = mu.cloned().unwrap_or_else(Rational::zero);
    let sol = laplacian::solve_alpha_at(&prob, &mu)?;
    let poly = laplacian::char_poly(&prob, &mu);
    let report = rational_roots(&poly)?;
    let info = laplacian::classify_roots(&prob, &poly, &mu)?;
    out["mu"] = json!(mu);
    out["alpha_table"] = to_value(&sol.table)?;
    out["poly"] = json!(poly.to_string());
    out["lift_poly"] = json!(sol.poly.monic.to_string());
    out["liftable"] = json!(info.iter().filter(|r| r.liftable).map(|r| r.lambda.to_string()).collect::<Vec<_>>());
    out["roots"] = json!(report.values().iter().map(|r| r.to_string()).collect::<Vec<_>>());
    out["rational_roots"] = json!(report
        .roots
        .iter()
        .map(|(r, m)| json!({ "value": r, "multiplicity": m }))
        .collect::<Vec<_>>());
    out["residual_factor"] = json!(report.residual.to_string());
    out["root_info"] = to_value(&info)?;
    Ok(Output::ok(out))
}

fn cmd_lift(
    p: &TripleParams,
    k: &Rational,
    d: usize,
    lambda: &Rational,
    phi: Option<&Path>,
) -> Result<Output, Failure> {
    let prob = LiftProblem::new(p.clone(), k.clone(), d);
    let phi: NHForm<SymCoeff> = match phi {
        Some(path) => parse(read_json(path)?, "symbolic nhform")?,
        None => {
            let w = prob.phi_weight();
            NHForm::holomorphic(w.clone(), SymCoeff::generator(0, w))
        }
    };
    let alpha = laplacian::lift_alpha(&prob, lambda, &phi)?;
    let t = laplacian::assemble_lift(&prob, &alpha, &phi);
    let verified = laplacian::verify_eigen(&t, p, lambda);
    let json = json!({
        "lambda": lambda,
        "coefficients": alpha,
        "tuple": to_value(&t)?,
        "qmform": to_value(&t.to_qm())?,
        "verified": verified,
    });
    Ok(Output { json, ok: verified })
}

fn cmd_suite(name: SuiteName, depth: usize, draws: usize, random_triples: usize, seed: u64) -> Result<Output, Failure> {
    let reports: Vec<Value> = match name {
        SuiteName::Commutators => vvops::check_commutators(depth, draws, seed)
            .into_iter()
            .map(|r| to_value(&r))
            .collect::<anyhow::Result<_>>()?,
        SuiteName::Sl2 => {
            let mut triples = vec![TripleParams::shimura_maass(), TripleParams::holomorphic()];
            let mut rng = random::rng(seed);
            triples.extend((0..random_triples).map(|_| random::triple(&mut rng)));
            triples
                .iter()
                .flat_map(|p| vvops::check_sl2(p, depth, draws, seed))
                .map(|r| to_value(&r))
                .collect::<anyhow::Result<_>>()?
        }
        SuiteName::RcGrid => {
            let ns: Vec<usize> = (0..=depth.max(1) + 2).collect();
            let depths: Vec<usize> = (0..=depth.min(3)).collect();
            let weights: Vec<Rational> = [
                Rational::integer(-2),
                Rational::zero(),
                Rational::integer(1),
                Rational::integer(4),
                Rational::new(1, 2),
                Rational::new(-7, 3),
            ]
            .into();
            let grid = rankincohen::rc_grid(&ns, &depths, &weights);
            let bad: Vec<_> = grid.iter().filter(|g| !g.consistent()).collect();
            vec![json!({
                "relation": "kernel dimension 1 off the excluded set, 2 on it; all brackets Y-free",
                "status": if bad.is_empty() { "pass" } else { "fail" },
                "cases": grid.len(),
                "excluded_cases": grid.iter().filter(|g| g.excluded).count(),
                "counterexamples": to_value(&bad)?,
            })]
        }
        SuiteName::Eigen => {
            let mut rng = random::rng(seed);
            let mut out = Vec::new();
            for _ in 0..draws.max(1) {
                let p = random::triple(&mut rng);
                let k = random::non_integer(&mut rng);
                let levels = laplacian::enumerate_eigenvalues(&p, &k, depth)?;
                let mut failures = Vec::new();
                for lv in &levels {
                    let prob = LiftProblem::new(p.clone(), k.clone(), lv.d);
                    let w = prob.phi_weight();
                    let phi = NHForm::holomorphic(w.clone(), SymCoeff::generator(0, w));
                    for lambda in lv.liftable() {
                        let ok = laplacian::build_lift(&prob, &lambda, &phi)
                            .map(|t| laplacian::verify_eigen(&t, &p, &lambda))
                            .unwrap_or(false);
                        if !ok {
                            failures.push(json!({ "d": lv.d, "lambda": lambda }));
                        }
                    }
                }
                out.push(json!({
                    "relation": "every liftable root yields a verified eigen-lift",
                    "params": { "a": p.a, "b": p.b, "c": p.c, "k": k, "depth_bound": depth },
                    "status": if failures.is_empty() { "pass" } else { "fail" },
                    "counterexamples": failures,
                }));
            }
            out
        }
    };
    let ok = reports.iter().all(|r| r["status"] == "pass");
    Ok(Output {
        json: json!({ "suite": format!("{}", suite_label(name)), "seed": seed, "passed": ok, "reports": reports }),
        ok,
    })
}

fn suite_label(name: SuiteName) -> &'static str {
    match name {
        SuiteName::Sl2 => "sl2",
        SuiteName::Commutators => "commutators",
        SuiteName::RcGrid => "rc-grid",
        SuiteName::Eigen => "eigen",
    }
}
