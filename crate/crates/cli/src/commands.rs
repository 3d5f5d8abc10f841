use std::path::Path;

use hm_core::modelspace::{invariance_residual_refined, reduces, reducing_residual};
use hm_core::operators::{adjoint_section, composition_section, cowen_adjoint_check, cowen_sections, shapiro_for_symbol};
use hm_core::series::TruncatedSeries;
use hm_core::theorems::{self, Q1Params};
use hm_core::{BlaschkeProduct, MoebiusMap, Symbol, Verdict};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::args::{AdjointArgs, CheckArgs, Command, Subject, TheoremCmd};
use crate::spec::{SymbolSpec, ThetaSpec};
use crate::{CliError, Outcome, RunConfig, EXIT_INPUT};

/// Monomials `z^k`, `1 ≤ k ≤ SHAPIRO_PROBES`, used in the Shapiro cross-check.
pub const SHAPIRO_PROBES: usize = 3;

/// Default adjoint truncation when none is configured.
pub const ADJOINT_DEGREE: usize = 64;

pub fn exit_code(v: Verdict) -> i32 {
    match v {
        Verdict::Invariant => 0,
        Verdict::NotInvariant => 1,
        Verdict::Indeterminate => 2,
    }
}

fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("report serializes")
}

pub fn parse_theta(field: &str, text: &str) -> Result<BlaschkeProduct, CliError> {
    let spec: ThetaSpec = text.parse().map_err(|e| CliError::input(field, e))?;
    spec.to_blaschke().map_err(|e| CliError::input(field, e))
}

pub fn parse_symbol(field: &str, text: &str) -> Result<Symbol, CliError> {
    let spec: SymbolSpec = text.parse().map_err(|e| CliError::input(field, e))?;
    spec.to_symbol().map_err(|e| CliError::input(field, e))
}

pub fn parse_lft(field: &str, text: &str) -> Result<MoebiusMap, CliError> {
    let spec: SymbolSpec = text.parse().map_err(|e| CliError::input(field, e))?;
    spec.to_lft().map_err(|e| CliError::input(field, e))
}

pub fn dispatch(cmd: &Command, cfg: &RunConfig) -> Result<Outcome, CliError> {
    match cmd {
        Command::Check(a) => check_command(a, cfg),
        Command::Theorem { id } => theorem(id, cfg),
        Command::Adjoint(a) => adjoint(a, cfg),
    }
}

fn check_command(a: &CheckArgs, cfg: &RunConfig) -> Result<Outcome, CliError> {
    match (&a.batch, &a.theta, &a.phi) {
        (Some(path), _, _) => check_batch(a.subject, path, cfg),
        (None, Some(t), Some(p)) => check(a.subject, t, p, cfg),
        _ => Err(CliError::input("arguments", "need --theta and --phi, or --batch")),
    }
}

/// One invariance check. Exit 0 invariant (or reduces), 1 not, 2 indeterminate.
pub fn check(subject: Subject, theta: &str, phi: &str, cfg: &RunConfig) -> Result<Outcome, CliError> {
    let theta = parse_theta("--theta", theta)?;
    let phi = parse_symbol("--phi", phi)?;
    phi.check_self_map(cfg.samples)?;
    let cc = cfg.check_config();
    let (verdict, report) = match subject {
        Subject::Beurling => {
            let rep = theorems::beurling_any(&theta, &phi, &cc)?;
            (rep.verdict, to_value(&rep))
        }
        Subject::Model => {
            let rep = invariance_residual_refined(&theta, &phi, &cc)?;
            (rep.verdict, to_value(&rep))
        }
        Subject::Reducing => {
            let (model, beur) = reducing_residual(&theta, &phi, &cc)?;
            let v = reduces(&model, &beur);
            (v, json!({ "reduces": v, "model_space": to_value(&model), "beurling_space": to_value(&beur) }))
        }
    };
    Ok(Outcome { code: exit_code(verdict), report: json!({ "subject": subject, "verdict": verdict, "result": report }) })
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct BatchFile {
    #[serde(rename = "case", default)]
    cases: Vec<BatchCase>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct BatchCase {
    label: Option<String>,
    subject: Option<Subject>,
    theta: String,
    phi: String,
}

/// Runs every `[[case]]` of a TOML file. Per-case input errors are recorded
/// with exit code 3; the overall code is the largest per-case code.
pub fn check_batch(default: Subject, path: &Path, cfg: &RunConfig) -> Result<Outcome, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    let file: BatchFile = toml::from_str(&text).map_err(|e| CliError::input(&format!("batch file {}", path.display()), e))?;
    if file.cases.is_empty() {
        return Err(CliError::input("batch file", "no [[case]] entries"));
    }
    let mut results = Vec::new();
    let mut code = 0;
    for (i, c) in file.cases.iter().enumerate() {
        let subject = c.subject.unwrap_or(default);
        let label = c.label.clone().unwrap_or_else(|| format!("case {}", i + 1));
        let entry = match check(subject, &c.theta, &c.phi, cfg) {
            Ok(o) => {
                code = code.max(o.code);
                json!({ "label": label, "theta": c.theta, "phi": c.phi, "exit_code": o.code, "report": o.report })
            }
            Err(e) => {
                code = EXIT_INPUT;
                json!({ "label": label, "theta": c.theta, "phi": c.phi, "exit_code": EXIT_INPUT, "error": e.to_string() })
            }
        };
        results.push(entry);
    }
    Ok(Outcome { code, report: json!({ "cases": results }) })
}

/// Runs a theorem harness; exit 0 iff it passes (`q1` always exits 0).
pub fn theorem(id: &TheoremCmd, cfg: &RunConfig) -> Result<Outcome, CliError> {
    let cc = cfg.check_config();
    let report = match id {
        TheoremCmd::Affine { alpha, n, trials } => theorems::verify_affine(*alpha, *n, *trials, cfg.seed, &cc)?,
        TheoremCmd::MobiusFamily { alpha, c1, c2 } => theorems::verify_example_mobius(*alpha, *c1, *c2, &cc)?,
        TheoremCmd::Flt { theta, a, b } => theorems::verify_flt_affine(&parse_theta("--theta", theta)?, *a, *b, &cc)?,
        TheoremCmd::Modelinv { theta, phi } => {
            theorems::verify_modelinv_lft(&parse_theta("--theta", theta)?, &parse_lft("--phi", phi)?, &cc)?
        }
        TheoremCmd::Constant { theta, c } => theorems::verify_constant_symbol(&parse_theta("--theta", theta)?, *c, &cc)?,
        TheoremCmd::Rigidity { phi, random } => {
            let grid = theorems::default_alpha_grid(cfg.seed, *random);
            theorems::verify_rigidity(&parse_symbol("--phi", phi)?, &grid, &theorems::default_theta_family(), &cc)?
        }
        TheoremCmd::Reducing { alpha, n, phi } => theorems::verify_reducing(*alpha, *n, &parse_symbol("--phi", phi)?, &cc)?,
        TheoremCmd::Q1 { alpha, beta, grid, refine, random_starts, solution_tol } => {
            let params = Q1Params { grid: *grid, refine: *refine, random_starts: *random_starts, seed: cfg.seed, solution_tol: *solution_tol };
            let rep = theorems::explore_question1(*alpha, *beta, &params)?;
            return Ok(Outcome { code: 0, report: json!({ "params": to_value(&params), "exploration": to_value(&rep) }) });
        }
    };
    Ok(Outcome { code: if report.pass { 0 } else { 1 }, report: to_value(&report) })
}

/// Cowen factorization distance and the Shapiro formula against the
/// transposed composition section on `z, z², z³` through degree `N/2`.
pub fn adjoint(a: &AdjointArgs, cfg: &RunConfig) -> Result<Outcome, CliError> {
    let phi = parse_lft("--phi", &a.phi)?;
    let test = phi.self_map_test();
    if !test.is_self_map {
        return Err(hm_core::Error::NotSelfMap(format!("{phi} has slack {:e}", test.slack)).into());
    }
    let n = cfg.truncation.unwrap_or(ADJOINT_DEGREE);
    let cowen = cowen_adjoint_check(&phi, n)?;
    let adj = adjoint_section(&composition_section(&phi.to_series(n)?, n)?);
    let mut shapiro = 0.0f64;
    for k in 1..=SHAPIRO_PROBES {
        let f = TruncatedSeries::monomial(k, n);
        let lhs = shapiro_for_symbol(&f, &phi, n)?;
        let rhs = adj.apply(&f);
        for j in 0..=n / 2 {
            shapiro = shapiro.max((lhs.coeff(j) - rhs.coeff(j)).norm());
        }
    }
    if let Some(path) = &a.export_sections {
        let (lhs, rhs) = cowen_sections(&phi, n)?;
        let doc = json!({ "phi": phi.to_string(), "degree": n, "adjoint": lhs.to_pairs(), "factorization": rhs.to_pairs() });
        let text = serde_json::to_string(&doc).expect("sections serialize");
        std::fs::write(path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    }
    let sigma = phi.normalize()?.cowen_sigma()?;
    let pass = cowen <= cfg.tol_accept && shapiro <= cfg.tol_accept;
    Ok(Outcome {
        code: if pass { 0 } else { 1 },
        report: json!({
            "phi": phi.to_string(),
            "sigma": sigma.to_string(),
            "degree": n,
            "cowen_discrepancy": cowen,
            "shapiro_discrepancy": shapiro,
            "shapiro_degrees": n / 2,
            "pass": pass,
        }),
    })
}
