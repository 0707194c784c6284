//! Classification of the curves orthogonal to the positive part, and the
//! hypothesis checks behind the vanishing statement.
//!
//! Away from the support of the negative part, an orthogonal curve is an
//! isolated nodal curve, a member of a cycle, a curve of a plain string, or
//! the tail of one or two maximal chains. The classifier assigns one of the
//! six types A-F to every orthogonal curve and verifies that each component
//! off the support is a string whenever it contains a curve of type D, E
//! or F. On top of the classification, the hypothesis checker evaluates the
//! adjoint-degree bounds that feed the vanishing argument: the divisor
//! Q = K_X + Theta + R + Gamma must pair nonpositively with every
//! orthogonal curve, determinant-two chains must avoid (-1)-curves, and a
//! single rational multiplier m must clear Q against the positive part on
//! every marked curve.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::chains::{self, ChainError, ChainRecord};
use crate::divisor::QDivisor;
use crate::indices;
use crate::model::{self, CurveId, ModelError, SingKind, SurfaceModel, Violation};
use crate::rat;
use crate::rational::Rat;
use crate::zariski::{self, ThetaDivisor, ZariskiResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum NullType {
    A,
    B,
    C,
    D,
    E,
    F,
}

impl fmt::Display for NullType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            NullType::A => "A",
            NullType::B => "B",
            NullType::C => "C",
            NullType::D => "D",
            NullType::E => "E",
            NullType::F => "F",
        })
    }
}

/// Rule codes for classification failures. Each names the clause of the
/// classification statement that the offending curve fails.
pub mod clause {
    pub const INVARIANT: &str = "Lemma 3.7(2) (invariant)";
    pub const NEGATIVE: &str = "Lemma 3.7(2) (negative self-intersection)";
    pub const EULER: &str = "Lemma 3.7(2) (Euler characteristic)";
    pub const TYPE_B: &str = "Lemma 3.7(2) (type B)";
    pub const TYPE_C: &str = "Lemma 3.7(2) (type C)";
    pub const TYPE_D: &str = "Lemma 3.7(2) (type D)";
    pub const TYPE_E: &str = "Lemma 3.7(2) (type E)";
    pub const TYPE_F: &str = "Lemma 3.7(2) (type F)";
    pub const TAIL_COUNT: &str = "Lemma 3.7(2) (tail count)";
    pub const STRING: &str = "Lemma 3.7(2) (string conclusion)";
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ClassifyError {
    #[error("model failed validation with {} violation(s)", .violations.len())]
    InvalidModel { violations: Vec<Violation> },
    #[error("boundary failed validation with {} violation(s)", .violations.len())]
    InvalidDelta { violations: Vec<Violation> },
    #[error("bigness of the adjoint class is not asserted")]
    NotBigAssert,
    #[error("boundary component {curve} lies in the null locus")]
    BoundaryMeetsNull { curve: CurveId },
    #[error("curve {curve} violates {clause}: {detail}")]
    UnclassifiableCurve {
        curve: CurveId,
        clause: String,
        detail: String,
    },
    #[error("ambient surface is not smooth")]
    AmbientNotSmooth,
    #[error("identity violation: {detail}")]
    IdentityViolation { detail: String },
    #[error(transparent)]
    Chain(#[from] ChainError),
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
enum Shape {
    Lone,
    Path,
    Cycle,
    Irregular,
}

#[derive(Debug, Clone)]
struct Component {
    curves: Vec<CurveId>,
    shape: Shape,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NullClassification {
    /// Bigness is a user assertion; it is echoed here, never certified.
    pub big_asserted: bool,
    /// The null locus of the positive part, in model order.
    pub null: Vec<CurveId>,
    pub types: BTreeMap<CurveId, NullType>,
    /// Maximal chains decomposing the support of the negative part.
    pub chains: Vec<ChainRecord>,
    /// Connected components of the null locus away from the support:
    /// strings in path order, cycles in cycle order.
    pub components: Vec<Vec<CurveId>>,
    /// Components made of type B and type C curves.
    pub gamma: Vec<Vec<CurveId>>,
    /// Components made of type D, E and F curves.
    pub r: Vec<Vec<CurveId>>,
}

fn off_support_components(
    m: &SurfaceModel,
    off: &[CurveId],
) -> Result<Vec<Component>, ModelError> {
    let mut remaining: BTreeSet<CurveId> = off.iter().cloned().collect();
    let mut comps = Vec::new();
    while let Some(seed) = remaining.iter().next().cloned() {
        remaining.remove(&seed);
        let mut queue = vec![seed];
        let mut members: Vec<CurveId> = Vec::new();
        while let Some(c) = queue.pop() {
            let linked: Vec<CurveId> = remaining
                .iter()
                .filter(|o| {
                    m.pair_ids(&c, o)
                        .map(|v| !v.is_zero())
                        .unwrap_or(false)
                })
                .cloned()
                .collect();
            for o in linked {
                remaining.remove(&o);
                queue.push(o);
            }
            members.push(c);
        }
        members.sort();
        comps.push(shape_component(m, members)?);
    }
    comps.sort_by(|a, b| a.curves.cmp(&b.curves));
    Ok(comps)
}

/// Recognizes the component's dual graph: a single curve, a simple path
/// with unit intersections, a simple cycle with unit intersections, or
/// anything else. Paths and cycles come back canonically ordered.
fn shape_component(m: &SurfaceModel, members: Vec<CurveId>) -> Result<Component, ModelError> {
    let n = members.len();
    if n == 1 {
        return Ok(Component {
            curves: members,
            shape: Shape::Lone,
        });
    }
    let mut simple = true;
    let mut edges = 0usize;
    let mut adj: BTreeMap<CurveId, Vec<CurveId>> = members
        .iter()
        .map(|c| (c.clone(), Vec::new()))
        .collect();
    for (i, a) in members.iter().enumerate() {
        for b in members.iter().skip(i + 1) {
            let v = m.pair_ids(a, b)?;
            if v.is_zero() {
                continue;
            }
            if v != Rat::one() {
                simple = false;
            }
            edges += 1;
            adj.get_mut(a).expect("member is present").push(b.clone());
            adj.get_mut(b).expect("member is present").push(a.clone());
        }
    }
    let max_degree = adj.values().map(|v| v.len()).max().unwrap_or(0);
    if !simple || max_degree > 2 {
        return Ok(Component {
            curves: members,
            shape: Shape::Irregular,
        });
    }
    if edges == n - 1 {
        let start = members
            .iter()
            .find(|c| adj[*c].len() == 1)
            .expect("a connected simple path has an endpoint");
        let path = walk_order(&adj, start, n);
        let rev: Vec<CurveId> = path.iter().rev().cloned().collect();
        return Ok(Component {
            curves: if rev < path { rev } else { path },
            shape: Shape::Path,
        });
    }
    if edges == n && n >= 3 && adj.values().all(|v| v.len() == 2) {
        let start = members.first().expect("component is nonempty");
        let cycle = walk_order(&adj, start, n);
        return Ok(Component {
            curves: cycle,
            shape: Shape::Cycle,
        });
    }
    Ok(Component {
        curves: members,
        shape: Shape::Irregular,
    })
}

fn walk_order(adj: &BTreeMap<CurveId, Vec<CurveId>>, start: &CurveId, n: usize) -> Vec<CurveId> {
    let mut order = vec![start.clone()];
    let mut prev: Option<CurveId> = None;
    let mut here = start.clone();
    while order.len() < n {
        let next = adj[&here]
            .iter()
            .filter(|c| Some(*c) != prev.as_ref())
            .min()
            .expect("walk continues until all members are placed")
            .clone();
        prev = Some(here);
        order.push(next.clone());
        here = next;
    }
    order
}

fn unclassifiable(c: &CurveId, clause: &str, detail: impl Into<String>) -> ClassifyError {
    ClassifyError::UnclassifiableCurve {
        curve: c.clone(),
        clause: clause.to_string(),
        detail: detail.into(),
    }
}

fn classify_tail(
    m: &SurfaceModel,
    chains: &[ChainRecord],
    c: &CurveId,
) -> Result<NullType, ClassifyError> {
    let tails: Vec<&ChainRecord> = chains
        .iter()
        .filter(|r| r.tail.as_ref() == Some(c))
        .collect();
    match tails.len() {
        1 => {
            let mut seq = tails[0].curves.clone();
            seq.push(c.clone());
            if !chains::is_f_chain(m, &seq) {
                return Err(unclassifiable(
                    c,
                    clause::TYPE_E,
                    "the chain ending at this tail does not extend to an F-chain through it",
                ));
            }
            Ok(NullType::E)
        }
        2 => {
            for rec in &tails {
                if rec.det_neg != rat!(2) {
                    return Err(unclassifiable(
                        c,
                        clause::TYPE_F,
                        format!(
                            "chain starting at {} has determinant {}",
                            rec.curves[0], rec.det_neg
                        ),
                    ));
                }
            }
            for rec in chains {
                if tails.iter().any(|t| t.curves == rec.curves) {
                    continue;
                }
                for x in &rec.curves {
                    if !m.pair_ids(c, x)?.is_zero() {
                        return Err(unclassifiable(
                            c,
                            clause::TYPE_F,
                            format!("curve meets a third chain through {x}"),
                        ));
                    }
                }
            }
            let chain_curves: BTreeSet<&CurveId> =
                tails.iter().flat_map(|t| t.curves.iter()).collect();
            let mut outside = 0usize;
            for x in m.curves() {
                if &x.id == c || !x.invariant || chain_curves.contains(&x.id) {
                    continue;
                }
                if !m.pair_ids(c, &x.id)?.is_zero() {
                    outside += 1;
                }
            }
            if outside > 1 {
                return Err(unclassifiable(
                    c,
                    clause::TYPE_F,
                    format!("{outside} invariant curves outside the two chains meet it"),
                ));
            }
            Ok(NullType::F)
        }
        n => Err(unclassifiable(
            c,
            clause::TAIL_COUNT,
            format!("curve meets the support yet is the tail of {n} chain(s)"),
        )),
    }
}

fn check_type_b(
    m: &SurfaceModel,
    delta: &QDivisor,
    component: &Component,
    c: &CurveId,
) -> Result<(), ClassifyError> {
    let curve = m.curve(c)?;
    if !curve.nodal {
        return Err(unclassifiable(c, clause::TYPE_B, "curve is not nodal"));
    }
    let sings = m.sings_on(c);
    if sings.len() != 1 {
        return Err(unclassifiable(
            c,
            clause::TYPE_B,
            format!("curve carries {} singularities, expected one", sings.len()),
        ));
    }
    let s = sings[0];
    if s.kind != SingKind::Reduced {
        return Err(unclassifiable(
            c,
            clause::TYPE_B,
            "the singularity is not reduced",
        ));
    }
    if !s.incidence(c).map(|i| i.node).unwrap_or(false) {
        return Err(unclassifiable(
            c,
            clause::TYPE_B,
            "the node does not sit at the singularity",
        ));
    }
    let kf = indices::kf_dot(m, c)?;
    if !kf.is_zero() {
        return Err(unclassifiable(
            c,
            clause::TYPE_B,
            format!("foliated canonical degree {kf} is nonzero"),
        ));
    }
    let bd = delta.dot_curve(m, c)?;
    if !bd.is_zero() {
        return Err(unclassifiable(
            c,
            clause::TYPE_B,
            format!("boundary degree {bd} is nonzero"),
        ));
    }
    if component.curves.len() != 1 {
        return Err(unclassifiable(
            c,
            clause::TYPE_B,
            "curve is not a connected component on its own",
        ));
    }
    Ok(())
}

fn classify_off_support(
    m: &SurfaceModel,
    delta: &QDivisor,
    chains: &[ChainRecord],
    support: &BTreeSet<CurveId>,
    component: &Component,
    c: &CurveId,
) -> Result<NullType, ClassifyError> {
    let curve = m.curve(c)?;
    if !curve.invariant {
        return Err(unclassifiable(c, clause::INVARIANT, "curve is not invariant"));
    }
    if !curve.self_int.is_negative() {
        return Err(unclassifiable(
            c,
            clause::NEGATIVE,
            format!("self-intersection {} is not negative", curve.self_int),
        ));
    }
    let mut meets_support = false;
    for s in support {
        if !m.pair_ids(c, s)?.is_zero() {
            meets_support = true;
            break;
        }
    }
    if meets_support {
        return classify_tail(m, chains, c);
    }
    if curve.chi.is_zero() {
        check_type_b(m, delta, component, c)?;
        return Ok(NullType::B);
    }
    if curve.chi == rat!(2) && m.is_smooth_rational(c) {
        if component.shape == Shape::Cycle {
            let kf = indices::kf_dot(m, c)?;
            if !kf.is_zero() {
                return Err(unclassifiable(
                    c,
                    clause::TYPE_C,
                    format!("foliated canonical degree {kf} is nonzero"),
                ));
            }
            let bd = delta.dot_curve(m, c)?;
            if !bd.is_zero() {
                return Err(unclassifiable(
                    c,
                    clause::TYPE_C,
                    format!("boundary degree {bd} is nonzero"),
                ));
            }
            return Ok(NullType::C);
        }
        let z = m.z_total(c);
        if z != Rat::one() && z != rat!(2) {
            return Err(unclassifiable(
                c,
                clause::TYPE_D,
                format!("Z = {z} is neither 1 nor 2"),
            ));
        }
        return Ok(NullType::D);
    }
    Err(unclassifiable(
        c,
        clause::EULER,
        format!("Euler characteristic {} fits no type", curve.chi),
    ))
}

/// Assigns one of the types A-F to every curve orthogonal to the positive
/// part, verifies the string form of the components away from the support,
/// and splits those components into the nodal-or-cycle family Gamma and the
/// string family R. Bigness of the class is consumed as an assertion; the
/// boundary must avoid the null locus entirely.
pub fn classify_null(
    m: &SurfaceModel,
    delta: &QDivisor,
    result: &ZariskiResult,
    big: bool,
) -> Result<NullClassification, ClassifyError> {
    let report = m.validate();
    if !report.is_valid() {
        return Err(ClassifyError::InvalidModel {
            violations: report.violations,
        });
    }
    let delta_report = model::delta_validate(m, delta)?;
    if !delta_report.violations.is_empty() {
        return Err(ClassifyError::InvalidDelta {
            violations: delta_report.violations,
        });
    }
    if !big {
        return Err(ClassifyError::NotBigAssert);
    }
    let null_set = zariski::null_locus(result);
    for (id, a) in delta.iter() {
        if !a.is_zero() && null_set.contains(id) {
            return Err(ClassifyError::BoundaryMeetsNull { curve: id.clone() });
        }
    }
    let chains = chains::maximal_kfd_chains(m, delta)?;
    let support: BTreeSet<CurveId> = result.support.iter().cloned().collect();
    let chain_union: BTreeSet<CurveId> = chains
        .iter()
        .flat_map(|r| r.curves.iter().cloned())
        .collect();
    if support != chain_union {
        return Err(ClassifyError::IdentityViolation {
            detail: format!(
                "decomposition support {:?} differs from the union of maximal chains {:?}",
                support, chain_union
            ),
        });
    }

    let null: Vec<CurveId> = m
        .curves()
        .iter()
        .filter(|c| null_set.contains(&c.id))
        .map(|c| c.id.clone())
        .collect();
    let off: Vec<CurveId> = null
        .iter()
        .filter(|c| !support.contains(*c))
        .cloned()
        .collect();
    let comps = off_support_components(m, &off)?;
    let comp_of: BTreeMap<&CurveId, usize> = comps
        .iter()
        .enumerate()
        .flat_map(|(i, comp)| comp.curves.iter().map(move |c| (c, i)))
        .collect();

    let mut types: BTreeMap<CurveId, NullType> = BTreeMap::new();
    for c in &null {
        let ty = if support.contains(c) {
            NullType::A
        } else {
            classify_off_support(m, delta, &chains, &support, &comps[comp_of[c]], c)?
        };
        types.insert(c.clone(), ty);
    }

    for comp in &comps {
        let def = comp
            .curves
            .iter()
            .find(|c| matches!(types[*c], NullType::D | NullType::E | NullType::F));
        if let Some(c) = def {
            if !matches!(comp.shape, Shape::Lone | Shape::Path) {
                return Err(unclassifiable(
                    c,
                    clause::STRING,
                    format!(
                        "its component {} is not a string",
                        comp.curves
                            .iter()
                            .map(CurveId::as_str)
                            .collect::<Vec<_>>()
                            .join("-")
                    ),
                ));
            }
        }
    }

    let mut gamma = Vec::new();
    let mut r = Vec::new();
    for comp in &comps {
        let all_gamma = comp
            .curves
            .iter()
            .all(|c| matches!(types[c], NullType::B | NullType::C));
        if all_gamma {
            gamma.push(comp.curves.clone());
        } else {
            r.push(comp.curves.clone());
        }
    }

    Ok(NullClassification {
        big_asserted: big,
        null,
        types,
        chains,
        components: comps.into_iter().map(|c| c.curves).collect(),
        gamma,
        r,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HypothesisEntry {
    pub curve: CurveId,
    pub null_type: NullType,
    /// The case of the degree analysis this curve falls under.
    pub branch: String,
    pub q_dot: Rat,
    pub checks: Vec<(String, bool)>,
    pub ok: bool,
}

/// Determinant-two chains must not contain (-1)-curves; offenders are
/// listed with their chain.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SideCondition {
    pub ok: bool,
    pub offenders: Vec<(CurveId, Vec<CurveId>)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MInequality {
    pub curve: CurveId,
    pub p_dot: Rat,
    pub q_dot: Rat,
}

/// The system m * (P.C) >= Q.C over all marked curves, reported as data:
/// the choice of a sufficiently divisible m is left to the reader.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MSystem {
    pub inequalities: Vec<MInequality>,
    pub feasible: bool,
    /// Least rational multiplier at least one satisfying every inequality;
    /// absent when the system is infeasible.
    pub lower_bound: Option<Rat>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HypothesisReport {
    pub entries: Vec<HypothesisEntry>,
    pub side_condition: SideCondition,
    pub m_system: MSystem,
    pub all_ok: bool,
}

fn entry_for(
    m: &SurfaceModel,
    theta: &ThetaDivisor,
    gamma_div: &QDivisor,
    r_div: &QDivisor,
    ty: NullType,
    c: &CurveId,
) -> Result<HypothesisEntry, ClassifyError> {
    let curve = m.curve(c)?;
    let theta_dot = theta.theta.dot_curve(m, c)?;
    let r_dot = r_div.dot_curve(m, c)?;
    let gamma_dot = gamma_div.dot_curve(m, c)?;
    let q_dot = &(&(&curve.kx_dot + &theta_dot) + &r_dot) + &gamma_dot;
    let kx_theta = &curve.kx_dot + &theta_dot;
    let zero = Rat::zero();
    let mut checks: Vec<(String, bool)> = Vec::new();
    let mut check = |label: &str, ok: bool| checks.push((label.to_string(), ok));
    let branch = match ty {
        NullType::A if r_dot.is_zero() => {
            check("Gamma.C = 0", gamma_dot.is_zero());
            check("(K_X+Theta).C <= 0", kx_theta <= zero);
            check("Q.C <= 0", q_dot <= zero);
            "type A, no R contact"
        }
        NullType::A => {
            check("Gamma.C = 0", gamma_dot.is_zero());
            check("R.C = 1", r_dot == Rat::one());
            check("(K_X+Theta).C <= -1", kx_theta <= rat!(-1));
            check("Q.C <= 0", q_dot <= zero);
            "type A, R contact"
        }
        NullType::B => {
            check("R.C = 0", r_dot.is_zero());
            check("Gamma.C = C^2", gamma_dot == curve.self_int);
            check("Q.C = 0", q_dot.is_zero());
            "type B"
        }
        NullType::C => {
            check("R.C = 0", r_dot.is_zero());
            check("Gamma.C = C^2+2", gamma_dot == &curve.self_int + &rat!(2));
            check("Q.C = 0", q_dot.is_zero());
            "type C"
        }
        NullType::D => {
            check("Gamma.C = 0", gamma_dot.is_zero());
            check("R.C <= C^2+2", r_dot <= &curve.self_int + &rat!(2));
            check("Q.C <= 0", q_dot <= zero);
            "type D"
        }
        NullType::E => {
            check("Gamma.C = 0", gamma_dot.is_zero());
            check("Theta.C < 1", theta_dot < Rat::one());
            check("R.C <= C^2+1", r_dot <= &curve.self_int + &rat!(1));
            check("Q.C < 0", q_dot < zero);
            "type E"
        }
        NullType::F => {
            check("Gamma.C = 0", gamma_dot.is_zero());
            check("Theta.C = 1", theta_dot == Rat::one());
            check("R.C <= C^2+1", r_dot <= &curve.self_int + &rat!(1));
            check("Q.C <= 0", q_dot <= zero);
            "type F"
        }
    };
    let ok = checks.iter().all(|(_, b)| *b);
    Ok(HypothesisEntry {
        curve: c.clone(),
        null_type: ty,
        branch: branch.to_string(),
        q_dot,
        checks,
        ok,
    })
}

/// Evaluates the degree bounds behind the vanishing statement: Q pairs
/// nonpositively with every orthogonal curve (case by case over the six
/// types), determinant-two chains contain no (-1)-curves, and the
/// multiplier system m * (P.C) >= Q.C is feasible over the marked curves.
/// Failures are report entries, never errors.
pub fn check_vanishing_hypotheses(
    m: &SurfaceModel,
    result: &ZariskiResult,
    theta: &ThetaDivisor,
    cls: &NullClassification,
) -> Result<HypothesisReport, ClassifyError> {
    if !m.ambient_smooth() {
        return Err(ClassifyError::AmbientNotSmooth);
    }
    let gamma_div = QDivisor::from_pairs(
        cls.gamma
            .iter()
            .flatten()
            .map(|c| (c.clone(), Rat::one())),
    );
    let r_div = QDivisor::from_pairs(cls.r.iter().flatten().map(|c| (c.clone(), Rat::one())));

    let mut entries = Vec::with_capacity(cls.null.len());
    for c in &cls.null {
        entries.push(entry_for(m, theta, &gamma_div, &r_div, cls.types[c], c)?);
    }

    let mut offenders = Vec::new();
    for rec in &cls.chains {
        if rec.det_neg != rat!(2) {
            continue;
        }
        for c in &rec.curves {
            if m.curve(c)?.self_int == rat!(-1) {
                offenders.push((c.clone(), rec.curves.clone()));
            }
        }
    }
    let side_condition = SideCondition {
        ok: offenders.is_empty(),
        offenders,
    };

    let mut inequalities = Vec::new();
    let mut feasible = true;
    let mut lower = Rat::one();
    for curve in m.curves() {
        let c = &curve.id;
        let p_dot = result
            .p_dot(c)
            .ok_or_else(|| ClassifyError::IdentityViolation {
                detail: format!("no positive-part degree recorded for {c}"),
            })?
            .clone();
        let theta_dot = theta.theta.dot_curve(m, c)?;
        let r_dot = r_div.dot_curve(m, c)?;
        let gamma_dot = gamma_div.dot_curve(m, c)?;
        let q_dot = &(&(&curve.kx_dot + &theta_dot) + &r_dot) + &gamma_dot;
        if p_dot.is_positive() {
            let ratio = &q_dot / &p_dot;
            if ratio > lower {
                lower = ratio;
            }
        } else if p_dot.is_negative() || q_dot.is_positive() {
            feasible = false;
        }
        inequalities.push(MInequality {
            curve: c.clone(),
            p_dot,
            q_dot,
        });
    }
    let m_system = MSystem {
        inequalities,
        feasible,
        lower_bound: feasible.then_some(lower),
    };

    let all_ok = entries.iter().all(|e| e.ok) && side_condition.ok && m_system.feasible;
    Ok(HypothesisReport {
        entries,
        side_condition,
        m_system,
        all_ok,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::zariski::{theta_divisor, zariski_adjoint, ClassDots, zariski_iterative};

    fn id(s: &str) -> CurveId {
        CurveId::from(s)
    }

    fn classified(
        m: &SurfaceModel,
        delta: &QDivisor,
    ) -> (ZariskiResult, NullClassification) {
        let result = zariski_adjoint(m, delta).expect("decomposition succeeds");
        let cls = classify_null(m, delta, &result, true).expect("classification succeeds");
        (result, cls)
    }

    fn type_map(cls: &NullClassification) -> Vec<(&str, NullType)> {
        cls.types
            .iter()
            .map(|(c, t)| (c.as_str(), *t))
            .collect()
    }

    #[test]
    fn x3_curves_are_both_type_a() {
        let m = corpus::x3();
        let (_, cls) = classified(&m, &QDivisor::zero());
        assert_eq!(
            type_map(&cls),
            vec![("C1", NullType::A), ("C2", NullType::A)]
        );
        assert!(cls.components.is_empty());
        assert!(cls.gamma.is_empty());
        assert!(cls.r.is_empty());
    }

    #[test]
    fn nef_model_trivial_curve_is_type_d() {
        let m = corpus::nef_model();
        let (_, cls) = classified(&m, &QDivisor::zero());
        assert_eq!(type_map(&cls), vec![("C", NullType::D)]);
        assert_eq!(cls.components, vec![vec![id("C")]]);
        assert_eq!(cls.r, vec![vec![id("C")]]);
        assert!(cls.gamma.is_empty());
    }

    #[test]
    fn isolated_nodal_curve_is_type_b() {
        let m = corpus::nodal_model();
        let (result, cls) = classified(&m, &QDivisor::zero());
        assert!(result.n.is_zero());
        assert_eq!(type_map(&cls), vec![("N1", NullType::B)]);
        assert_eq!(cls.gamma, vec![vec![id("N1")]]);
        assert!(cls.r.is_empty());
    }

    #[test]
    fn cycle_members_are_type_c() {
        let m = corpus::cycle_model();
        let (_, cls) = classified(&m, &QDivisor::zero());
        assert_eq!(
            type_map(&cls),
            vec![
                ("Y1", NullType::C),
                ("Y2", NullType::C),
                ("Y3", NullType::C)
            ]
        );
        assert_eq!(cls.gamma, vec![vec![id("Y1"), id("Y2"), id("Y3")]]);
    }

    #[test]
    fn stopped_tail_is_type_e() {
        let m = corpus::x3_with_tail();
        let delta = QDivisor::single(id("W"), rat!(1, 3));
        let (result, cls) = classified(&m, &delta);
        assert_eq!(result.support, vec![id("C1"), id("C2")]);
        assert_eq!(
            type_map(&cls),
            vec![
                ("C1", NullType::A),
                ("C2", NullType::A),
                ("T", NullType::E)
            ]
        );
        assert_eq!(cls.r, vec![vec![id("T")]]);
    }

    #[test]
    fn shared_tail_of_two_determinant_two_chains_is_type_f() {
        let m = corpus::tail_cluster();
        let delta = QDivisor::single(id("W"), rat!(1, 2));
        let (result, cls) = classified(&m, &delta);
        assert_eq!(result.n, QDivisor::from_pairs([
            (id("F1"), rat!(1, 2)),
            (id("G1"), rat!(1, 2)),
        ]));
        assert_eq!(
            type_map(&cls),
            vec![
                ("C", NullType::F),
                ("F1", NullType::A),
                ("G1", NullType::A)
            ]
        );
        assert_eq!(cls.r, vec![vec![id("C")]]);
    }

    #[test]
    fn gallery_realizes_all_six_types() {
        let (m, delta) = corpus::gallery();
        let (_, cls) = classified(&m, &delta);
        assert_eq!(
            type_map(&cls),
            vec![
                ("C1", NullType::A),
                ("C2", NullType::A),
                ("D1", NullType::D),
                ("D2", NullType::D),
                ("F1", NullType::A),
                ("G1", NullType::A),
                ("H", NullType::F),
                ("N1", NullType::B),
                ("T", NullType::E),
                ("Y1", NullType::C),
                ("Y2", NullType::C),
                ("Y3", NullType::C),
            ]
        );
        assert_eq!(
            cls.gamma,
            vec![vec![id("N1")], vec![id("Y1"), id("Y2"), id("Y3")]]
        );
        assert_eq!(
            cls.r,
            vec![vec![id("D1"), id("D2")], vec![id("H")], vec![id("T")]]
        );
    }

    #[test]
    fn double_intersection_fails_the_string_conclusion() {
        let m = corpus::two_cycle();
        let result = zariski_adjoint(&m, &QDivisor::zero()).unwrap();
        let err = classify_null(&m, &QDivisor::zero(), &result, true).unwrap_err();
        match err {
            ClassifyError::UnclassifiableCurve { clause: cl, .. } => {
                assert_eq!(cl, clause::STRING);
            }
            other => panic!("expected a string-conclusion failure, got {other:?}"),
        }
    }

    #[test]
    fn tails_of_higher_determinant_chains_are_unclassifiable() {
        let mut b = corpus::ModelBuilder::new();
        let a = corpus::chain_component(&mut b, "A", &[rat!(-2), rat!(-2)], None);
        let d = corpus::chain_component(&mut b, "B", &[rat!(-3)], None);
        let c = b.invariant_curve("C", rat!(-1), rat!(2));
        corpus::attach_tail(&mut b, &a, &c);
        corpus::attach_tail(&mut b, &d, &c);
        let w = b.non_invariant_curve("W", rat!(-2), rat!(2), rat!(0));
        b.meet(&c, &w, rat!(2));
        let m = b.build();
        let delta = QDivisor::single(id("W"), rat!(1, 3));
        let result = zariski_adjoint(&m, &delta).unwrap();
        assert!(result.p_dot(&id("C")).unwrap().is_zero());
        let err = classify_null(&m, &delta, &result, true).unwrap_err();
        match err {
            ClassifyError::UnclassifiableCurve { curve, clause: cl, .. } => {
                assert_eq!(curve, id("C"));
                assert_eq!(cl, clause::TYPE_F);
            }
            other => panic!("expected a type F failure, got {other:?}"),
        }
    }

    #[test]
    fn missing_big_assertion_is_rejected() {
        let m = corpus::x3();
        let result = zariski_adjoint(&m, &QDivisor::zero()).unwrap();
        let err = classify_null(&m, &QDivisor::zero(), &result, false).unwrap_err();
        assert_eq!(err, ClassifyError::NotBigAssert);
    }

    fn flat_model() -> SurfaceModel {
        let mut b = corpus::ModelBuilder::new();
        b.non_invariant_curve("W", rat!(0), rat!(2), rat!(0));
        b.build()
    }

    #[test]
    fn boundary_component_in_the_null_locus_is_rejected() {
        let m = flat_model();
        let delta = QDivisor::single(id("W"), rat!(1, 2));
        let result = zariski_adjoint(&m, &delta).unwrap();
        let err = classify_null(&m, &delta, &result, true).unwrap_err();
        assert_eq!(err, ClassifyError::BoundaryMeetsNull { curve: id("W") });
    }

    #[test]
    fn non_invariant_null_curve_is_unclassifiable() {
        let m = flat_model();
        let result = zariski_adjoint(&m, &QDivisor::zero()).unwrap();
        let err = classify_null(&m, &QDivisor::zero(), &result, true).unwrap_err();
        match err {
            ClassifyError::UnclassifiableCurve { curve, clause: cl, .. } => {
                assert_eq!(curve, id("W"));
                assert_eq!(cl, clause::INVARIANT);
            }
            other => panic!("expected an invariance failure, got {other:?}"),
        }
    }

    #[test]
    fn foreign_decomposition_is_an_identity_violation() {
        let m = corpus::x3();
        let foreign = QDivisor::single(id("C1"), rat!(-1));
        let dots = ClassDots::divisor(&m, &foreign).unwrap();
        let result = zariski_iterative(&m, &dots).unwrap();
        let err = classify_null(&m, &QDivisor::zero(), &result, true).unwrap_err();
        assert!(matches!(err, ClassifyError::IdentityViolation { .. }));
    }

    #[test]
    fn hypothesis_report_on_x3() {
        let m = corpus::x3();
        let (result, cls) = classified(&m, &QDivisor::zero());
        let theta = theta_divisor(&m, &cls.chains).unwrap();
        let rep = check_vanishing_hypotheses(&m, &result, &theta, &cls).unwrap();
        assert!(rep.all_ok);
        assert_eq!(rep.entries.len(), 2);
        for e in &rep.entries {
            assert_eq!(e.branch, "type A, no R contact");
            assert!(e.ok);
        }
        assert_eq!(rep.entries[0].q_dot, rat!(0));
        assert_eq!(rep.entries[1].q_dot, rat!(-1));
        assert!(rep.side_condition.ok);
        assert_eq!(rep.m_system.lower_bound, Some(rat!(1)));
    }

    #[test]
    fn minus_one_curve_in_a_determinant_two_chain_is_flagged() {
        let mut b = corpus::ModelBuilder::new();
        corpus::chain_component(&mut b, "C", &[rat!(-1), rat!(-3)], None);
        let m = b.build();
        let (result, cls) = classified(&m, &QDivisor::zero());
        assert_eq!(cls.chains.len(), 1);
        assert_eq!(cls.chains[0].det_neg, rat!(2));
        let theta = theta_divisor(&m, &cls.chains).unwrap();
        let rep = check_vanishing_hypotheses(&m, &result, &theta, &cls).unwrap();
        assert!(!rep.side_condition.ok);
        assert_eq!(
            rep.side_condition.offenders,
            vec![(id("C1"), vec![id("C1"), id("C2")])]
        );
        assert!(rep.entries.iter().all(|e| e.ok));
        assert!(!rep.all_ok);
    }

    #[test]
    fn hypothesis_report_on_the_gallery() {
        let (m, delta) = corpus::gallery();
        let (result, cls) = classified(&m, &delta);
        let theta = theta_divisor(&m, &cls.chains).unwrap();
        let rep = check_vanishing_hypotheses(&m, &result, &theta, &cls).unwrap();
        assert!(rep.all_ok, "failing entries: {:?}", rep
            .entries
            .iter()
            .filter(|e| !e.ok)
            .collect::<Vec<_>>());
        let by_curve: BTreeMap<&str, &HypothesisEntry> = rep
            .entries
            .iter()
            .map(|e| (e.curve.as_str(), e))
            .collect();
        assert_eq!(by_curve["C2"].branch, "type A, R contact");
        assert_eq!(by_curve["C2"].q_dot, rat!(0));
        assert_eq!(by_curve["T"].branch, "type E");
        assert_eq!(by_curve["T"].q_dot, rat!(-4, 3));
        assert_eq!(by_curve["H"].branch, "type F");
        assert_eq!(by_curve["H"].q_dot, rat!(-1));
        assert_eq!(by_curve["N1"].q_dot, rat!(0));
        assert_eq!(by_curve["Y1"].q_dot, rat!(0));
        assert_eq!(by_curve["D1"].q_dot, rat!(-1));
        assert_eq!(rep.m_system.lower_bound, Some(rat!(2)));
    }

    #[test]
    fn positive_class_is_vacuously_fine() {
        let mut b = corpus::ModelBuilder::new();
        let c = b.invariant_curve("C", rat!(-3), rat!(2));
        b.reduced_sing("p", rat!(-1), &[(c.clone(), rat!(-1))]);
        b.reduced_sing("q", rat!(-1), &[(c.clone(), rat!(-1))]);
        b.reduced_sing("r", rat!(-1), &[(c, rat!(-1))]);
        let m = b.build();
        let (result, cls) = classified(&m, &QDivisor::zero());
        assert!(cls.null.is_empty());
        assert!(cls.types.is_empty());
        let theta = theta_divisor(&m, &cls.chains).unwrap();
        let rep = check_vanishing_hypotheses(&m, &result, &theta, &cls).unwrap();
        assert!(rep.entries.is_empty());
        assert!(rep.all_ok);
        assert_eq!(rep.m_system.lower_bound, Some(rat!(1)));
    }
}
