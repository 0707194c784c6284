//! Per-document drivers for the analysis commands and the multi-route
//! crosscheck. Exit codes come in families: 1 validation failure, 2 parse
//! or schema failure, 3 assertion or hypothesis refuted, 4 internal
//! identity violation.

use std::path::Path;

use foliation_core::chains::{self, ChainError, ChainRecord};
use foliation_core::classify::{self, ClassifyError};
use foliation_core::contraction::ContractionError;
use foliation_core::divisor::QDivisor;
use foliation_core::indices;
use foliation_core::mmp::{self, MmpError, MmpOptions};
use foliation_core::model::{SurfaceModel, ValidationReport, Violation};
use foliation_core::rat;
use foliation_core::zariski::{self, ZariskiError};
use foliation_core::Rat;
use serde_json::{json, Value};

use crate::doc::SurfaceDocument;
use crate::report::Outcome;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_REFUTED: i32 = 3;
pub const EXIT_IDENTITY: i32 = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RunCmd {
    Chains,
    Mmp,
    Zariski,
    Theta,
    Classify,
    Vanishing,
    Perturb,
}

impl RunCmd {
    pub const ALL: [RunCmd; 7] = [
        RunCmd::Chains,
        RunCmd::Mmp,
        RunCmd::Zariski,
        RunCmd::Theta,
        RunCmd::Classify,
        RunCmd::Vanishing,
        RunCmd::Perturb,
    ];

    pub fn name(self) -> &'static str {
        match self {
            RunCmd::Chains => "chains",
            RunCmd::Mmp => "mmp",
            RunCmd::Zariski => "zariski",
            RunCmd::Theta => "theta",
            RunCmd::Classify => "classify",
            RunCmd::Vanishing => "vanishing",
            RunCmd::Perturb => "perturb",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Action {
    Validate,
    Run(RunCmd),
    Crosscheck,
}

#[derive(Debug, Clone)]
pub struct Task {
    pub action: Action,
    pub divisor: Option<String>,
    pub epsilon: Option<Rat>,
    pub strict: bool,
}

type Fallible = Result<(i32, String, Value), (i32, String)>;

pub fn drive(path: &Path, task: &Task) -> Outcome {
    let command = match task.action {
        Action::Validate => "validate",
        Action::Run(cmd) => cmd.name(),
        Action::Crosscheck => "crosscheck",
    };
    let file = path.display().to_string();
    let head = format!("== {file}: {command} ==\n");
    match drive_inner(path, task) {
        Ok((exit, text, mut json)) => {
            let obj = json.as_object_mut().expect("reports are objects");
            obj.insert("file".to_string(), json!(file));
            obj.insert("command".to_string(), json!(command));
            Outcome {
                path: path.to_path_buf(),
                command,
                exit,
                text: head + &text,
                json,
            }
        }
        Err((exit, msg)) => Outcome {
            path: path.to_path_buf(),
            command,
            exit,
            text: format!("{head}error: {msg}\n"),
            json: json!({
                "file": file,
                "command": command,
                "error": msg,
            }),
        },
    }
}

fn drive_inner(path: &Path, task: &Task) -> Fallible {
    let doc = crate::doc::load_document(path).map_err(|e| (EXIT_PARSE, e.to_string()))?;
    let m = doc
        .to_model()
        .map_err(|e| (EXIT_PARSE, format!("document does not assemble: {e}")))?;
    let report = m.validate();
    match task.action {
        Action::Validate => Ok(validate_outcome(&m, &report, task.strict)),
        Action::Run(cmd) => {
            if !report.is_valid() {
                return Err((
                    EXIT_VALIDATION,
                    format!("model failed validation: {}", violations_text(&report.violations)),
                ));
            }
            let (exit, mut text, json) = run_command(&doc, &m, cmd, task)?;
            let exit = apply_strict(task.strict, exit, &json, &mut text);
            Ok((exit, text, json))
        }
        Action::Crosscheck => {
            if !report.is_valid() {
                return Err((
                    EXIT_VALIDATION,
                    format!("model failed validation: {}", violations_text(&report.violations)),
                ));
            }
            crosscheck(&doc, &m, task)
        }
    }
}

/// Under --strict any reported warning refutes the run.
fn apply_strict(strict: bool, exit: i32, json: &Value, text: &mut String) -> i32 {
    if !strict || exit != EXIT_OK {
        return exit;
    }
    let count = json
        .get("warnings")
        .and_then(Value::as_array)
        .map(Vec::len)
        .unwrap_or(0);
    if count == 0 {
        return exit;
    }
    text.push_str(&format!("strict: {count} warning(s) treated as errors\n"));
    EXIT_REFUTED
}

fn validate_outcome(m: &SurfaceModel, report: &ValidationReport, strict: bool) -> (i32, String, Value) {
    let valid = report.is_valid();
    let mut text = String::new();
    if valid {
        text.push_str(&format!(
            "valid: {} curves, {} foliation singularities\n",
            m.curves().len(),
            m.fol_sings().len()
        ));
    } else {
        for v in &report.violations {
            text.push_str(&format!("violation [{}] {}: {}\n", v.clause, v.subject, v.detail));
        }
    }
    for w in &report.warnings {
        text.push_str(&format!("warning: {w}\n"));
    }
    let mut exit = if valid { EXIT_OK } else { EXIT_VALIDATION };
    if strict && valid && !report.warnings.is_empty() {
        text.push_str("strict: warnings treated as validation failures\n");
        exit = EXIT_VALIDATION;
    }
    let json = json!({
        "valid": valid,
        "violations": report
            .violations
            .iter()
            .map(|v| json!({"clause": v.clause, "subject": v.subject, "detail": v.detail}))
            .collect::<Vec<_>>(),
        "warnings": report.warnings,
    });
    (exit, text, json)
}

fn violations_text(violations: &[Violation]) -> String {
    violations
        .iter()
        .map(|v| format!("[{}] {}: {}", v.clause, v.subject, v.detail))
        .collect::<Vec<_>>()
        .join("; ")
}

/// The boundary divisor for a run: the named one when requested, the
/// document's "delta" when present, zero otherwise.
fn resolve_delta(doc: &SurfaceDocument, task: &Task) -> Result<(String, QDivisor), (i32, String)> {
    match &task.divisor {
        Some(name) => doc
            .divisor(name)
            .map(|d| (name.clone(), d))
            .ok_or_else(|| (EXIT_PARSE, format!("document has no divisor named {name:?}"))),
        None => Ok(doc
            .divisor("delta")
            .map(|d| ("delta".to_string(), d))
            .unwrap_or_else(|| ("zero".to_string(), QDivisor::zero()))),
    }
}

fn run_command(doc: &SurfaceDocument, m: &SurfaceModel, cmd: RunCmd, task: &Task) -> Fallible {
    match cmd {
        RunCmd::Chains => chains_cmd(doc, m, task),
        RunCmd::Zariski => zariski_cmd(doc, m, task),
        RunCmd::Theta => theta_cmd(doc, m, task),
        RunCmd::Mmp => mmp_cmd(doc, m, task),
        RunCmd::Classify => classify_cmd(doc, m, task),
        RunCmd::Vanishing => vanishing_cmd(doc, m, task),
        RunCmd::Perturb => perturb_cmd(doc, m, task),
    }
}

fn seq_text(ids: &[foliation_core::model::CurveId]) -> String {
    ids.iter()
        .map(|c| c.as_str().to_string())
        .collect::<Vec<_>>()
        .join("-")
}

fn rats_text(vals: &[Rat]) -> String {
    vals.iter()
        .map(Rat::to_string)
        .collect::<Vec<_>>()
        .join(", ")
}

fn divisor_text(d: &QDivisor) -> String {
    if d.is_zero() {
        return "0".to_string();
    }
    d.iter()
        .map(|(id, a)| format!("{a} {id}"))
        .collect::<Vec<_>>()
        .join(" + ")
}

fn chain_json(rec: &ChainRecord) -> Value {
    json!({
        "curves": rec.curves,
        "det_neg": rec.det_neg,
        "kind": format!("{:?}", rec.kind),
        "artificial": rec.artificial,
        "det_extrapolated": rec.det_extrapolated,
        "tail": rec.tail,
        "u": rec.u_seq,
        "s": rec.s_seq,
    })
}

fn chains_cmd(doc: &SurfaceDocument, m: &SurfaceModel, task: &Task) -> Fallible {
    let (dname, delta) = resolve_delta(doc, task)?;
    let strings = chains::find_strings(m);
    let recs = chains::maximal_kfd_chains(m, &delta).map_err(chain_err)?;
    let artificial = chains::maximal_artificial_chains(m, &delta).map_err(chain_err)?;
    let mut text = format!("boundary: {dname}\n");
    text.push_str(&format!("strings: {}\n", strings.len()));
    if recs.is_empty() {
        text.push_str("no maximal chains\n");
    }
    for rec in &recs {
        text.push_str(&format!(
            "chain {}: det {}, tail {}{}\n",
            seq_text(&rec.curves),
            rec.det_neg,
            rec.tail.as_ref().map(|t| t.as_str()).unwrap_or("none"),
            if rec.artificial { ", artificial" } else { "" },
        ));
    }
    for rec in &artificial {
        text.push_str(&format!("artificial prefix {}\n", seq_text(&rec.curves)));
    }
    let json = json!({
        "boundary": dname,
        "strings": strings,
        "chains": recs.iter().map(chain_json).collect::<Vec<_>>(),
        "artificial": artificial.iter().map(chain_json).collect::<Vec<_>>(),
        "warnings": [],
    });
    Ok((EXIT_OK, text, json))
}

fn zariski_cmd(doc: &SurfaceDocument, m: &SurfaceModel, task: &Task) -> Fallible {
    let (dname, delta) = resolve_delta(doc, task)?;
    let res = zariski::zariski_adjoint(m, &delta).map_err(zariski_err)?;
    let mut text = format!("boundary: {dname}\n");
    text.push_str(&format!("N = {}\n", divisor_text(&res.n)));
    text.push_str(&format!(
        "support: {}\n",
        if res.support.is_empty() {
            "empty".to_string()
        } else {
            seq_text(&res.support)
        }
    ));
    text.push_str("certificates: effective, negative definite support, nef positive part, orthogonal\n");
    for w in &res.warnings {
        text.push_str(&format!("warning: {w}\n"));
    }
    let json = json!({
        "boundary": dname,
        "n": res.n,
        "support": res.support,
        "p_degrees": res.p_dots,
        "negative_definite": res.neg_def_certificate,
        "orthogonality": res.orthogonality_certificate,
        "method": format!("{:?}", res.method),
        "warnings": res.warnings,
    });
    Ok((EXIT_OK, text, json))
}

fn theta_cmd(doc: &SurfaceDocument, m: &SurfaceModel, task: &Task) -> Fallible {
    let (dname, delta) = resolve_delta(doc, task)?;
    let recs = chains::maximal_kfd_chains(m, &delta).map_err(chain_err)?;
    let th = zariski::theta_divisor(m, &recs).map_err(zariski_err)?;
    let mut text = format!("boundary: {dname}\n");
    text.push_str(&format!("Theta = {}\n", divisor_text(&th.theta)));
    for c in &th.chains {
        text.push_str(&format!(
            "chain {}: lambdas {}; adjoint degrees {}\n",
            seq_text(&c.curves),
            rats_text(&c.lambdas),
            rats_text(&c.adjoint_degrees),
        ));
    }
    let json = json!({
        "boundary": dname,
        "theta": th.theta,
        "chains": th
            .chains
            .iter()
            .map(|c| json!({
                "curves": c.curves,
                "lambdas": c.lambdas,
                "adjoint_degrees": c.adjoint_degrees,
            }))
            .collect::<Vec<_>>(),
        "warnings": [],
    });
    Ok((EXIT_OK, text, json))
}

fn mmp_cmd(doc: &SurfaceDocument, m: &SurfaceModel, task: &Task) -> Fallible {
    let (dname, delta) = resolve_delta(doc, task)?;
    let res = mmp::run_mmp(m, &delta, &MmpOptions::default()).map_err(mmp_err)?;
    let mut text = format!("boundary: {dname}\n");
    if res.stages.is_empty() {
        text.push_str("no stages: the adjoint degree table is already nef\n");
    }
    for (i, stage) in res.stages.iter().enumerate() {
        text.push_str(&format!(
            "stage {} [{:?}]: {}\n",
            i + 1,
            stage.kind,
            stage
                .chains
                .iter()
                .map(|rec| seq_text(&rec.curves))
                .collect::<Vec<_>>()
                .join(", "),
        ));
    }
    for (i, (curve, r)) in res.contraction_rs.iter().enumerate() {
        text.push_str(&format!("step {}: contract {curve} (r = {r})\n", i + 1));
    }
    text.push_str(&format!("N = {}\n", divisor_text(&res.negative_part)));
    text.push_str(&format!(
        "final model: {} curves, nef certificate holds\n",
        res.final_model.curves().len()
    ));
    for w in &res.warnings {
        text.push_str(&format!("warning: {w}\n"));
    }
    let json = json!({
        "boundary": dname,
        "stages": res
            .stages
            .iter()
            .map(|stage| json!({
                "kind": format!("{:?}", stage.kind),
                "chains": stage.chains.iter().map(|rec| rec.curves.clone()).collect::<Vec<_>>(),
                "candidates": stage
                    .candidates
                    .iter()
                    .map(|c| json!({
                        "curve": c.curve,
                        "accepted": c.accepted,
                        "conditional": c.conditional,
                        "failed": c.failed,
                    }))
                    .collect::<Vec<_>>(),
            }))
            .collect::<Vec<_>>(),
        "steps": res
            .contraction_rs
            .iter()
            .map(|(curve, r)| json!({"curve": curve, "r": r}))
            .collect::<Vec<_>>(),
        "negative_part": res.negative_part,
        "nef_certificate": res.nef_certificate,
        "final_curves": res.final_model.curves().len(),
        "conditional": res.conditional,
        "warnings": res.warnings,
    });
    Ok((EXIT_OK, text, json))
}

fn classification(
    doc: &SurfaceDocument,
    m: &SurfaceModel,
    task: &Task,
) -> Result<(String, QDivisor, zariski::ZariskiResult, classify::NullClassification), (i32, String)>
{
    let (dname, delta) = resolve_delta(doc, task)?;
    let res = zariski::zariski_adjoint(m, &delta).map_err(zariski_err)?;
    let cls =
        classify::classify_null(m, &delta, &res, doc.assertions.big).map_err(classify_err)?;
    Ok((dname, delta, res, cls))
}

fn classify_cmd(doc: &SurfaceDocument, m: &SurfaceModel, task: &Task) -> Fallible {
    let (dname, _delta, _res, cls) = classification(doc, m, task)?;
    let mut text = format!("boundary: {dname}\n");
    if cls.null.is_empty() {
        text.push_str("null locus is empty\n");
    }
    for c in &cls.null {
        text.push_str(&format!("{c}: type {}\n", cls.types[c]));
    }
    for comp in &cls.gamma {
        text.push_str(&format!("gamma component: {}\n", seq_text(comp)));
    }
    for comp in &cls.r {
        text.push_str(&format!("r component: {}\n", seq_text(comp)));
    }
    let json = json!({
        "boundary": dname,
        "null": cls.null,
        "types": cls.types,
        "components": cls.components,
        "gamma": cls.gamma,
        "r": cls.r,
        "chains": cls.chains.iter().map(|rec| rec.curves.clone()).collect::<Vec<_>>(),
        "warnings": [],
    });
    Ok((EXIT_OK, text, json))
}

fn vanishing_cmd(doc: &SurfaceDocument, m: &SurfaceModel, task: &Task) -> Fallible {
    let (dname, _delta, res, cls) = classification(doc, m, task)?;
    let th = zariski::theta_divisor(m, &cls.chains).map_err(zariski_err)?;
    let rep = classify::check_vanishing_hypotheses(m, &res, &th, &cls).map_err(classify_err)?;
    let mut text = format!("boundary: {dname}\n");
    if rep.entries.is_empty() {
        text.push_str("null locus is empty; the degree hypotheses hold vacuously\n");
    }
    for e in &rep.entries {
        text.push_str(&format!(
            "{} ({}): Q.C = {}, {}\n",
            e.curve,
            e.branch,
            e.q_dot,
            if e.ok { "ok" } else { "FAILED" },
        ));
        for (label, ok) in &e.checks {
            if !ok {
                text.push_str(&format!("  failed check: {label}\n"));
            }
        }
    }
    if rep.side_condition.ok {
        text.push_str("side condition: no (-1)-curve inside a determinant-two chain\n");
    } else {
        for (curve, chain) in &rep.side_condition.offenders {
            text.push_str(&format!(
                "side condition offender: {curve} in chain {}\n",
                seq_text(chain)
            ));
        }
    }
    match (&rep.m_system.feasible, &rep.m_system.lower_bound) {
        (true, Some(bound)) => {
            text.push_str(&format!("m-system: feasible, lower bound {bound}\n"));
        }
        _ => text.push_str("m-system: infeasible\n"),
    }
    text.push_str(&format!(
        "all hypotheses: {}\n",
        if rep.all_ok { "hold" } else { "REFUTED" }
    ));
    let json = json!({
        "boundary": dname,
        "entries": rep
            .entries
            .iter()
            .map(|e| json!({
                "curve": e.curve,
                "type": e.null_type,
                "branch": e.branch,
                "q_dot": e.q_dot,
                "checks": e.checks.iter().map(|(l, ok)| json!([l, ok])).collect::<Vec<_>>(),
                "ok": e.ok,
            }))
            .collect::<Vec<_>>(),
        "side_condition": json!({
            "ok": rep.side_condition.ok,
            "offenders": rep
                .side_condition
                .offenders
                .iter()
                .map(|(c, chain)| json!({"curve": c, "chain": chain}))
                .collect::<Vec<_>>(),
        }),
        "m_system": json!({
            "inequalities": rep
                .m_system
                .inequalities
                .iter()
                .map(|i| json!({"curve": i.curve, "p": i.p_dot, "q": i.q_dot}))
                .collect::<Vec<_>>(),
            "feasible": rep.m_system.feasible,
            "lower_bound": rep.m_system.lower_bound,
        }),
        "all_ok": rep.all_ok,
        "warnings": [],
    });
    Ok((EXIT_OK, text, json))
}

fn perturb_cmd(doc: &SurfaceDocument, m: &SurfaceModel, task: &Task) -> Fallible {
    let (dname, delta) = resolve_delta(doc, task)?;
    let ample = doc.divisor("ample").ok_or_else(|| {
        (
            EXIT_PARSE,
            "perturb needs a document divisor named \"ample\"".to_string(),
        )
    })?;
    let eps = match &task.epsilon {
        Some(e) => vec![e.clone()],
        None => {
            let eps0 =
                zariski::perturbation_epsilon_zero(m, &delta, &ample).map_err(zariski_err)?;
            vec![&eps0 / &rat!(2), &eps0 / &rat!(4), &eps0 / &rat!(8)]
        }
    };
    let rep = zariski::perturbation_check(m, &delta, &ample, &eps).map_err(zariski_err)?;
    let mut text = format!("boundary: {dname}\n");
    text.push_str(&format!("epsilon threshold: {}\n", rep.epsilon_zero));
    text.push_str(&format!("base N = {}\n", divisor_text(&rep.base.n)));
    for e in &rep.entries {
        text.push_str(&format!(
            "epsilon {}: N = {}{}{}\n",
            e.epsilon,
            divisor_text(&e.result.n),
            if e.support_equal && e.dominated && e.shift_identity_ok {
                ", stable"
            } else {
                ", NOT stable"
            },
            if e.above_threshold {
                " (above threshold)"
            } else {
                ""
            },
        ));
    }
    text.push_str(&format!(
        "monotone convergence: {}\n",
        if rep.monotone { "holds" } else { "FAILS" }
    ));
    let json = json!({
        "boundary": dname,
        "epsilon_zero": rep.epsilon_zero,
        "base_n": rep.base.n,
        "entries": rep
            .entries
            .iter()
            .map(|e| json!({
                "epsilon": e.epsilon,
                "above_threshold": e.above_threshold,
                "support_equal": e.support_equal,
                "dominated": e.dominated,
                "shift_identity_ok": e.shift_identity_ok,
                "n": e.result.n,
            }))
            .collect::<Vec<_>>(),
        "monotone": rep.monotone,
        "all_ok": rep.all_ok,
        "warnings": [],
    });
    Ok((EXIT_OK, text, json))
}

/// Negative-part coefficients reconstructed per chain from prefix and
/// suffix continuants of the negated Gram matrix: the inverse of a
/// tridiagonal matrix in closed form, so each coefficient is a ratio of
/// chain determinants. The suffix continuants are the tail-drop
/// determinants of the stepwise contraction identity.
fn replay_negative_part(
    m: &SurfaceModel,
    delta: &QDivisor,
    recs: &[ChainRecord],
) -> Result<QDivisor, (i32, String)> {
    let mut n = QDivisor::zero();
    for rec in recs {
        let k = rec.curves.len();
        let t = rec.matrix.negated();
        let mut theta = Vec::with_capacity(k + 1);
        theta.push(Rat::one());
        for i in 1..=k {
            let mut v = t.get(i - 1, i - 1) * &theta[i - 1];
            if i >= 2 {
                let b = t.get(i - 2, i - 1);
                v = &v - &(&(b * b) * &theta[i - 2]);
            }
            theta.push(v);
        }
        let mut phi = vec![Rat::one(); k + 2];
        for j in (1..=k).rev() {
            let mut v = t.get(j - 1, j - 1) * &phi[j + 1];
            if j < k {
                let b = t.get(j - 1, j);
                v = &v - &(&(b * b) * &phi[j + 2]);
            }
            phi[j] = v;
        }
        let det = theta[k].clone();
        if det != rec.det_neg {
            return Err((
                EXIT_IDENTITY,
                format!(
                    "replay determinant {det} differs from the chain determinant {} on {}",
                    rec.det_neg,
                    seq_text(&rec.curves)
                ),
            ));
        }
        let degrees: Vec<Rat> = rec
            .curves
            .iter()
            .map(|c| indices::kfd_dot(m, delta, c))
            .collect::<Result<_, _>>()
            .map_err(|e| (EXIT_PARSE, e.to_string()))?;
        for i in 1..=k {
            let mut coef = Rat::zero();
            for (j, s) in degrees.iter().enumerate() {
                let j = j + 1;
                let (lo, hi) = if i <= j { (i, j) } else { (j, i) };
                let mut prod = Rat::one();
                for l in lo..hi {
                    prod = &prod * t.get(l - 1, l);
                }
                let signed = if (i + j) % 2 == 0 { prod } else { -&prod };
                let entry = &(&signed * &(&theta[lo - 1] * &phi[hi + 1])) / &det;
                coef = &coef - &(&entry * s);
            }
            if !coef.is_zero() {
                n.add_term(rec.curves[i - 1].clone(), coef);
            }
        }
    }
    Ok(n)
}

fn crosscheck(doc: &SurfaceDocument, m: &SurfaceModel, task: &Task) -> Fallible {
    let (dname, delta) = resolve_delta(doc, task)?;
    let iterative = zariski::zariski_adjoint(m, &delta).map_err(zariski_err)?;
    let assembled = zariski::zariski_chain_assembled(m, &delta).map_err(zariski_err)?;
    let mmp_run = mmp::run_mmp(m, &delta, &MmpOptions::default()).map_err(mmp_err)?;
    let recs = chains::maximal_kfd_chains(m, &delta).map_err(chain_err)?;
    let replay = replay_negative_part(m, &delta, &recs)?;
    let routes = [
        ("iterative", &iterative.n),
        ("chain-assembled", &assembled.n),
        ("mmp-pullback", &mmp_run.negative_part),
        ("continuant-replay", &replay),
    ];
    for pair in routes.windows(2) {
        let (a_name, a) = pair[0];
        let (b_name, b) = pair[1];
        if a != b {
            return Err((
                EXIT_IDENTITY,
                format!(
                    "mismatch: {a_name} N = {} but {b_name} N = {}",
                    divisor_text(a),
                    divisor_text(b)
                ),
            ));
        }
    }
    let mut warnings = iterative.warnings.clone();
    for w in assembled.warnings.iter().chain(&mmp_run.warnings) {
        if !warnings.contains(w) {
            warnings.push(w.clone());
        }
    }
    let mut text = format!("boundary: {dname}\n");
    text.push_str(&format!(
        "all four decomposition routes agree: N = {}\n",
        divisor_text(&iterative.n)
    ));
    for w in &warnings {
        text.push_str(&format!("warning: {w}\n"));
    }
    let json = json!({
        "boundary": dname,
        "agree": true,
        "n": iterative.n,
        "support": iterative.support,
        "routes": {
            "iterative": iterative.n,
            "chain_assembled": assembled.n,
            "mmp_pullback": mmp_run.negative_part,
            "continuant_replay": replay,
        },
        "warnings": warnings,
    });
    Ok((EXIT_OK, text, json))
}

fn chain_err(e: ChainError) -> (i32, String) {
    let code = match &e {
        ChainError::DivisionByZero { .. } | ChainError::AmbiguousTail { .. } => EXIT_REFUTED,
        ChainError::MaximalChainsIntersect { .. } | ChainError::DeterminantMismatch { .. } => {
            EXIT_IDENTITY
        }
        ChainError::Model(_) => EXIT_PARSE,
    };
    (code, e.to_string())
}

fn zariski_err(e: ZariskiError) -> (i32, String) {
    match e {
        ZariskiError::InvalidModel { violations } => (
            EXIT_VALIDATION,
            format!("model failed validation: {}", violations_text(&violations)),
        ),
        ZariskiError::InvalidDelta { violations } => (
            EXIT_VALIDATION,
            format!("boundary failed validation: {}", violations_text(&violations)),
        ),
        ZariskiError::Chain(c) => chain_err(c),
        ZariskiError::NotPseudoeffectiveAssert
        | ZariskiError::NotNegativeDefinite { .. }
        | ZariskiError::NegativeCoefficient { .. }
        | ZariskiError::NonPositiveLambda { .. }
        | ZariskiError::PositivityFailure { .. }
        | ZariskiError::CoefficientOutOfRange { .. }
        | ZariskiError::AmbientNotSmooth
        | ZariskiError::SupportCurveNotSmoothRational { .. }
        | ZariskiError::NotAmpleOnMarked { .. } => (EXIT_REFUTED, e.to_string()),
        ZariskiError::InvalidEpsilon { .. } => (EXIT_PARSE, e.to_string()),
        ZariskiError::MissingDegree { .. }
        | ZariskiError::IdentityViolation { .. }
        | ZariskiError::Linalg(_) => (EXIT_IDENTITY, e.to_string()),
        ZariskiError::Model(_) => (EXIT_PARSE, e.to_string()),
    }
}

fn contraction_err(e: ContractionError) -> (i32, String) {
    let code = match &e {
        ContractionError::NonNegativeSelfIntersection { .. }
        | ContractionError::NonContractible { .. }
        | ContractionError::NoMinusOneCurve { .. } => EXIT_REFUTED,
        ContractionError::ModelInconsistent { .. } | ContractionError::IdentityViolation { .. } => {
            EXIT_IDENTITY
        }
        ContractionError::BadSite { .. } | ContractionError::Model(_) => EXIT_PARSE,
    };
    (code, e.to_string())
}

fn mmp_err(e: MmpError) -> (i32, String) {
    match e {
        MmpError::InvalidModel { violations } => (
            EXIT_VALIDATION,
            format!("model failed validation: {}", violations_text(&violations)),
        ),
        MmpError::InvalidDelta { violations } => (
            EXIT_VALIDATION,
            format!("boundary failed validation: {}", violations_text(&violations)),
        ),
        MmpError::Chain(c) => chain_err(c),
        MmpError::Contraction(c) => contraction_err(c),
        MmpError::NotPseudoeffectiveAssert
        | MmpError::FanoBranch { .. }
        | MmpError::HypothesesRefuted { .. } => (EXIT_REFUTED, e.to_string()),
        MmpError::NonTermination { .. } | MmpError::IdentityViolation { .. } => {
            (EXIT_IDENTITY, e.to_string())
        }
        MmpError::Model(_) => (EXIT_PARSE, e.to_string()),
    }
}

fn classify_err(e: ClassifyError) -> (i32, String) {
    match e {
        ClassifyError::InvalidModel { violations } => (
            EXIT_VALIDATION,
            format!("model failed validation: {}", violations_text(&violations)),
        ),
        ClassifyError::InvalidDelta { violations } => (
            EXIT_VALIDATION,
            format!("boundary failed validation: {}", violations_text(&violations)),
        ),
        ClassifyError::Chain(c) => chain_err(c),
        ClassifyError::NotBigAssert
        | ClassifyError::BoundaryMeetsNull { .. }
        | ClassifyError::UnclassifiableCurve { .. }
        | ClassifyError::AmbientNotSmooth => (EXIT_REFUTED, e.to_string()),
        ClassifyError::IdentityViolation { .. } => (EXIT_IDENTITY, e.to_string()),
        ClassifyError::Model(_) => (EXIT_PARSE, e.to_string()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use foliation_core::corpus;

    #[test]
    fn replay_matches_the_iterative_decomposition() {
        for m in [
            corpus::x1(),
            corpus::x3(),
            corpus::single_minus_two(),
            corpus::nef_model(),
        ] {
            let delta = QDivisor::zero();
            let recs = chains::maximal_kfd_chains(&m, &delta).unwrap();
            let replay = replay_negative_part(&m, &delta, &recs).unwrap();
            let iterative = zariski::zariski_adjoint(&m, &delta).unwrap();
            assert_eq!(replay, iterative.n);
        }
    }

    #[test]
    fn replay_matches_on_boundary_models() {
        let m = corpus::x3_with_tail();
        let delta = QDivisor::single("W".into(), rat!(1, 3));
        let recs = chains::maximal_kfd_chains(&m, &delta).unwrap();
        let replay = replay_negative_part(&m, &delta, &recs).unwrap();
        let iterative = zariski::zariski_adjoint(&m, &delta).unwrap();
        assert_eq!(replay, iterative.n);
    }
}
