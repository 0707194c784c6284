//! The (K_F+Delta)-minimal model program by chain contraction.
//!
//! Phase 1 contracts all maximal artificial chains and repeats to a
//! fixpoint, because each round can expose new artificial chains. Phase 2
//! contracts all remaining maximal chains once. The result carries a nef
//! certificate over every surviving marked curve, the negative part N
//! pulled back to the starting model, and a full audit log: every stage's
//! chains, every extremal candidate checklist, every contraction step.
//!
//! Curves with negative degree but nonnegative self-intersection signal a
//! Fano or fibration structure; the run reports that branch and halts
//! rather than model it.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::chains::{self, ChainError, ChainRecord};
use crate::contraction::{contract_chain, ContractionError, ContractionStep};
use crate::divisor::QDivisor;
use crate::indices::{self, CandidateReport};
use crate::model::{self, CurveId, ModelError, SurfaceModel, Violation};
use crate::rational::Rat;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MmpError {
    #[error("model failed validation with {} violation(s)", .violations.len())]
    InvalidModel { violations: Vec<Violation> },
    #[error("boundary divisor failed validation with {} violation(s)", .violations.len())]
    InvalidDelta { violations: Vec<Violation> },
    #[error("the input does not assert that the adjoint divisor is pseudoeffective")]
    NotPseudoeffectiveAssert,
    #[error(
        "curve {curve} has degree {kfd} with self-intersection {self_int}: \
         Fano or fibration branch, outside this engine's scope"
    )]
    FanoBranch {
        curve: CurveId,
        kfd: Rat,
        self_int: Rat,
    },
    #[error(
        "curve {curve} still has negative degree {kfd} after both phases; \
         failed checklist items: {failed:?} (refutes the pseudoeffectivity assertion)"
    )]
    HypothesesRefuted {
        curve: CurveId,
        kfd: Rat,
        failed: Vec<String>,
    },
    #[error("performed {contractions} contractions against a budget of {budget}")]
    NonTermination { contractions: usize, budget: usize },
    #[error("identity violation: {detail}")]
    IdentityViolation { detail: String },
    #[error(transparent)]
    Chain(#[from] ChainError),
    #[error(transparent)]
    Contraction(#[from] ContractionError),
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum StageKind {
    ArtificialPhase,
    ChainPhase,
}

/// One MMP stage: the chains contracted, plus the extremal candidate
/// checklist of every degree-negative curve on the stage's input model.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MmpStage {
    pub kind: StageKind,
    pub chains: Vec<ChainRecord>,
    pub candidates: Vec<CandidateReport>,
}

#[derive(Debug, Clone, Default)]
pub struct MmpOptions {
    /// Certifies the wedge hypothesis between the boundary and the
    /// diminished base locus; without it every extremality conclusion is
    /// marked conditional.
    pub delta_wedge_certified: bool,
    /// Shuffles the per-stage chain contraction order; used by tests to
    /// confirm order independence. None keeps the deterministic lowest-id
    /// schedule.
    pub order_seed: Option<u64>,
}

#[derive(Debug, Clone)]
pub struct MmpResult {
    pub stages: Vec<MmpStage>,
    pub final_model: SurfaceModel,
    /// Degree of every surviving marked curve; all entries nonnegative.
    pub nef_certificate: Vec<(CurveId, Rat)>,
    /// N on the starting model, with the adjoint divisor equal to the
    /// pullback of its image plus N.
    pub negative_part: QDivisor,
    /// Per contracted curve, in contraction order: the coefficient r of
    /// the step's exceptional curve in the running decomposition.
    pub contraction_rs: Vec<(CurveId, Rat)>,
    pub steps: Vec<ContractionStep>,
    pub conditional: bool,
    pub warnings: Vec<String>,
}

fn fano_gate(m: &SurfaceModel, delta: &QDivisor) -> Result<(), MmpError> {
    for c in m.curves() {
        let kfd = indices::kfd_dot(m, delta, &c.id)?;
        if kfd.is_negative() && !c.self_int.is_negative() {
            return Err(MmpError::FanoBranch {
                curve: c.id.clone(),
                kfd,
                self_int: c.self_int.clone(),
            });
        }
    }
    Ok(())
}

fn candidate_log(
    m: &SurfaceModel,
    delta: &QDivisor,
    certified: bool,
) -> Result<Vec<CandidateReport>, MmpError> {
    let mut out = Vec::new();
    for c in m.curves() {
        if indices::kfd_dot(m, delta, &c.id)?.is_negative() {
            out.push(indices::extremal_candidate(m, delta, &c.id, certified)?);
        }
    }
    Ok(out)
}

fn order_records(recs: &mut [ChainRecord], seed: Option<u64>) {
    recs.sort_by(|a, b| a.curves[0].cmp(&b.curves[0]));
    if let Some(seed) = seed {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        recs.shuffle(&mut rng);
    }
}

fn contract_stage(
    current: &mut SurfaceModel,
    delta: &QDivisor,
    recs: &[ChainRecord],
    all_steps: &mut Vec<ContractionStep>,
    done: &mut usize,
    budget: usize,
) -> Result<(), MmpError> {
    for rec in recs {
        let steps = contract_chain(current, delta, rec)?;
        *done += steps.len();
        if *done > budget {
            return Err(MmpError::NonTermination {
                contractions: *done,
                budget,
            });
        }
        *current = steps.last().expect("chains are nonempty").post_model.clone();
        all_steps.extend(steps);
    }
    Ok(())
}

pub fn run_mmp(
    m: &SurfaceModel,
    delta: &QDivisor,
    options: &MmpOptions,
) -> Result<MmpResult, MmpError> {
    let report = m.validate();
    if !report.is_valid() {
        return Err(MmpError::InvalidModel {
            violations: report.violations,
        });
    }
    let delta_report = model::delta_validate(m, delta)?;
    if !delta_report.violations.is_empty() {
        return Err(MmpError::InvalidDelta {
            violations: delta_report.violations,
        });
    }
    if !m.pseudoeffective_assertion() {
        return Err(MmpError::NotPseudoeffectiveAssert);
    }

    let conditional = !options.delta_wedge_certified;
    let mut warnings = Vec::new();
    if conditional {
        warnings.push(
            "extremality conclusions are conditional: the boundary wedge hypothesis \
             on the diminished base locus is not certified"
                .to_string(),
        );
    }
    warnings.push(
        "nef means nonnegative degree against the marked curves of the model".to_string(),
    );

    // Every contraction removes at least one foliation singularity, so the
    // initial count bounds the total number of contractions.
    let budget = m.fol_sings().len();
    let mut current = m.clone();
    let mut stages = Vec::new();
    let mut all_steps: Vec<ContractionStep> = Vec::new();
    let mut done = 0usize;

    loop {
        fano_gate(&current, delta)?;
        let mut recs = chains::maximal_artificial_chains(&current, delta)?;
        if recs.is_empty() {
            break;
        }
        order_records(&mut recs, options.order_seed);
        let candidates = candidate_log(&current, delta, options.delta_wedge_certified)?;
        contract_stage(&mut current, delta, &recs, &mut all_steps, &mut done, budget)?;
        stages.push(MmpStage {
            kind: StageKind::ArtificialPhase,
            chains: recs,
            candidates,
        });
    }

    fano_gate(&current, delta)?;
    let mut recs = chains::maximal_kfd_chains(&current, delta)?;
    debug_assert!(recs.iter().all(|r| !r.artificial || r.det_extrapolated));
    if !recs.is_empty() {
        order_records(&mut recs, options.order_seed);
        let candidates = candidate_log(&current, delta, options.delta_wedge_certified)?;
        contract_stage(&mut current, delta, &recs, &mut all_steps, &mut done, budget)?;
        stages.push(MmpStage {
            kind: StageKind::ChainPhase,
            chains: recs,
            candidates,
        });
    }

    let mut nef_certificate = Vec::new();
    for c in current.curves() {
        let kfd = indices::kfd_dot(&current, delta, &c.id)?;
        if kfd.is_negative() {
            if !c.self_int.is_negative() {
                return Err(MmpError::FanoBranch {
                    curve: c.id.clone(),
                    kfd,
                    self_int: c.self_int.clone(),
                });
            }
            let cand =
                indices::extremal_candidate(&current, delta, &c.id, options.delta_wedge_certified)?;
            return Err(MmpError::HypothesesRefuted {
                curve: c.id.clone(),
                kfd,
                failed: cand.failed,
            });
        }
        nef_certificate.push((c.id.clone(), kfd));
    }

    let negative_part = pullback_decomposition(&all_steps, delta)?;
    if !negative_part.is_effective() {
        return Err(MmpError::IdentityViolation {
            detail: format!("pulled-back negative part {negative_part:?} is not effective"),
        });
    }

    let mut contraction_rs = Vec::new();
    for step in &all_steps {
        let r = step_coefficient(step, delta)?;
        contraction_rs.push((step.contracted.clone(), r));
    }

    Ok(MmpResult {
        stages,
        final_model: current,
        nef_certificate,
        negative_part,
        contraction_rs,
        steps: all_steps,
        conditional,
        warnings,
    })
}

/// The coefficient r of the step's exceptional curve E in
/// (adjoint on pre-model) = (pullback of adjoint on post-model) + r E:
/// pairing both sides with E gives r = degree(E) / E^2, positive on every
/// accepted chain step.
fn step_coefficient(step: &ContractionStep, delta: &QDivisor) -> Result<Rat, MmpError> {
    let pre = &step.pre_model;
    let e = &step.contracted;
    let e2 = &pre.curve(e)?.self_int;
    let r = indices::kfd_dot(pre, delta, e)? / e2;
    if !r.is_positive() {
        return Err(MmpError::IdentityViolation {
            detail: format!("contraction coefficient r = {r} for {e} is not positive"),
        });
    }
    Ok(r)
}

/// Accumulates N on the starting model by walking the contraction steps
/// backwards: each step pulls the running divisor back (zero intersection
/// with the exceptional curve) and adds r times the exceptional curve.
pub fn pullback_decomposition(
    steps: &[ContractionStep],
    delta: &QDivisor,
) -> Result<QDivisor, MmpError> {
    let mut n = QDivisor::zero();
    for step in steps.iter().rev() {
        let pre = &step.pre_model;
        let e = &step.contracted;
        let e2 = &pre.curve(e)?.self_int;
        let dot_e = n.dot_curve(pre, e)?;
        let r = step_coefficient(step, delta)?;
        let e_coeff = dot_e / &-e2 + r;
        n += &QDivisor::single(e.clone(), e_coeff);
    }
    Ok(n)
}
