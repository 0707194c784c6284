//! Zariski decomposition of the adjoint class by two independent routes:
//! a support-growing iterative solver over the exact Gram matrix, and
//! per-chain back-substitution assembled over the maximal chains. The
//! module also builds the fractional boundary divisor carried by the
//! negative support, derives the stable base loci, and checks stability
//! of the decomposition under small ample perturbations.
//!
//! The adjoint class is not supported on the marked curves, so classes
//! enter as degree tables and the positive part is reported the same way.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::chains::{self, ChainError, ChainRecord};
use crate::divisor::QDivisor;
use crate::indices;
use crate::linalg::{LinalgError, SymMatrix};
use crate::model::{self, CurveId, ModelError, SurfaceModel, Violation};
use crate::rat;
use crate::rational::Rat;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ZariskiError {
    #[error("model failed validation with {} violation(s)", .violations.len())]
    InvalidModel { violations: Vec<Violation> },
    #[error("boundary divisor failed validation with {} violation(s)", .violations.len())]
    InvalidDelta { violations: Vec<Violation> },
    #[error("the input does not assert that the adjoint divisor is pseudoeffective")]
    NotPseudoeffectiveAssert,
    #[error("no degree entry for marked curve {curve}")]
    MissingDegree { curve: CurveId },
    #[error(
        "support {support:?} has a Gram matrix that is not negative definite \
         (refutes the pseudoeffectivity assertion)"
    )]
    NotNegativeDefinite { support: Vec<CurveId> },
    #[error(
        "negative part carries coefficient {value} on {curve} \
         (refutes the pseudoeffectivity assertion)"
    )]
    NegativeCoefficient { curve: CurveId, value: Rat },
    #[error("chain {chain:?} yields lambda {index} = {value}, not positive (refutes acceptance)")]
    NonPositiveLambda {
        chain: Vec<CurveId>,
        index: usize,
        value: Rat,
    },
    #[error(
        "positive part pairs to {value} with {curve}: the negative support \
         is not covered by the maximal chains"
    )]
    PositivityFailure { curve: CurveId, value: Rat },
    #[error("boundary coefficient {value} on {curve} escapes the open unit interval")]
    CoefficientOutOfRange { curve: CurveId, value: Rat },
    #[error("the ambient surface is not smooth")]
    AmbientNotSmooth,
    #[error("support curve {curve} is not smooth rational")]
    SupportCurveNotSmoothRational { curve: CurveId },
    #[error("perturbation divisor pairs to {value} with {curve}, not positive")]
    NotAmpleOnMarked { curve: CurveId, value: Rat },
    #[error("perturbation size {value} is negative")]
    InvalidEpsilon { value: Rat },
    #[error("identity violation: {detail}")]
    IdentityViolation { detail: String },
    #[error(transparent)]
    Chain(#[from] ChainError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Degrees of a divisor class against every marked curve.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ClassDots {
    dots: BTreeMap<CurveId, Rat>,
}

impl ClassDots {
    pub fn from_pairs(pairs: impl IntoIterator<Item = (CurveId, Rat)>) -> Self {
        ClassDots {
            dots: pairs.into_iter().collect(),
        }
    }

    /// Degree table of K_F + Delta.
    pub fn adjoint(m: &SurfaceModel, delta: &QDivisor) -> Result<Self, ModelError> {
        Self::adjoint_perturbed(m, delta, &Rat::zero(), &QDivisor::zero())
    }

    /// Degree table of K_F + Delta + eps A.
    pub fn adjoint_perturbed(
        m: &SurfaceModel,
        delta: &QDivisor,
        eps: &Rat,
        a: &QDivisor,
    ) -> Result<Self, ModelError> {
        let mut dots = BTreeMap::new();
        for c in m.curves() {
            let mut v = indices::kfd_dot(m, delta, &c.id)?;
            if !eps.is_zero() {
                v += &(eps * &a.dot_curve(m, &c.id)?);
            }
            dots.insert(c.id.clone(), v);
        }
        Ok(ClassDots { dots })
    }

    /// Degree table of a plain divisor.
    pub fn divisor(m: &SurfaceModel, d: &QDivisor) -> Result<Self, ModelError> {
        let mut dots = BTreeMap::new();
        for c in m.curves() {
            dots.insert(c.id.clone(), d.dot_curve(m, &c.id)?);
        }
        Ok(ClassDots { dots })
    }

    pub fn get(&self, c: &CurveId) -> Option<&Rat> {
        self.dots.get(c)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Method {
    ChainSolve,
    IterativeSolve,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ZariskiResult {
    /// The negative part, an effective divisor on the support.
    pub n: QDivisor,
    /// The positive part as its degree against every marked curve; the
    /// class itself is the input class minus `n`.
    pub p_dots: Vec<(CurveId, Rat)>,
    pub support: Vec<CurveId>,
    pub neg_def_certificate: bool,
    /// Support curves with their positive-part degree, each exactly zero.
    pub orthogonality_certificate: Vec<(CurveId, Rat)>,
    pub method: Method,
    pub warnings: Vec<String>,
}

impl ZariskiResult {
    pub fn p_dot(&self, c: &CurveId) -> Option<&Rat> {
        self.p_dots
            .iter()
            .find(|(id, _)| id == c)
            .map(|(_, v)| v)
    }
}

fn validate_gates(m: &SurfaceModel, delta: &QDivisor) -> Result<(), ZariskiError> {
    let report = m.validate();
    if !report.is_valid() {
        return Err(ZariskiError::InvalidModel {
            violations: report.violations,
        });
    }
    let delta_report = model::delta_validate(m, delta)?;
    if !delta_report.violations.is_empty() {
        return Err(ZariskiError::InvalidDelta {
            violations: delta_report.violations,
        });
    }
    Ok(())
}

fn solve_on_support(
    m: &SurfaceModel,
    d: &ClassDots,
    ids: &[CurveId],
) -> Result<QDivisor, ZariskiError> {
    let gram = m.gram(ids)?;
    if !gram.is_negative_definite() {
        return Err(ZariskiError::NotNegativeDefinite {
            support: ids.to_vec(),
        });
    }
    let mut rhs = Vec::with_capacity(ids.len());
    for c in ids {
        rhs.push(d.get(c).expect("degree table covers the support").clone());
    }
    let x = gram.solve(&rhs)?;
    Ok(QDivisor::from_pairs(ids.iter().cloned().zip(x)))
}

fn iterative_core(
    m: &SurfaceModel,
    d: &ClassDots,
    seed: Option<u64>,
) -> Result<ZariskiResult, ZariskiError> {
    if !m.pseudoeffective_assertion() {
        return Err(ZariskiError::NotPseudoeffectiveAssert);
    }
    let all: Vec<CurveId> = m.curves().iter().map(|c| c.id.clone()).collect();
    for c in &all {
        if d.get(c).is_none() {
            return Err(ZariskiError::MissingDegree { curve: c.clone() });
        }
    }
    let mut rng = seed.map(ChaCha8Rng::seed_from_u64);
    let mut support: BTreeSet<CurveId> = all
        .iter()
        .filter(|c| d.get(c).unwrap().is_negative())
        .cloned()
        .collect();
    // A seeded run starts from one random negative curve and grows one
    // curve at a time; the fixpoint is the same because every dropped
    // negative curve keeps a negative residual degree until added.
    if let Some(rng) = rng.as_mut() {
        let mut start: Vec<CurveId> = support.iter().cloned().collect();
        start.shuffle(rng);
        start.truncate(1);
        support = start.into_iter().collect();
    }
    let mut n;
    loop {
        let ids: Vec<CurveId> = support.iter().cloned().collect();
        n = solve_on_support(m, d, &ids)?;
        let mut violators = Vec::new();
        for c in &all {
            if support.contains(c) {
                continue;
            }
            let residual = d.get(c).unwrap() - &n.dot_curve(m, c)?;
            if residual.is_negative() {
                violators.push(c.clone());
            }
        }
        if violators.is_empty() {
            break;
        }
        match rng.as_mut() {
            None => support.extend(violators),
            Some(rng) => {
                violators.shuffle(rng);
                support.insert(violators.into_iter().next().unwrap());
            }
        }
    }
    for c in &support {
        let v = n.coeff(c);
        if v.is_negative() {
            return Err(ZariskiError::NegativeCoefficient {
                curve: c.clone(),
                value: v,
            });
        }
    }
    // A zero coefficient means the curve never belonged to the support.
    // Dropping it leaves the solution unchanged, so one shrink suffices.
    support.retain(|c| !n.coeff(c).is_zero());
    let ids: Vec<CurveId> = support.iter().cloned().collect();
    n = solve_on_support(m, d, &ids)?;
    let neg_def = m.gram(&ids)?.is_negative_definite();
    let mut p_dots = Vec::with_capacity(all.len());
    let mut orthogonality = Vec::new();
    for c in &all {
        let p = d.get(c).unwrap() - &n.dot_curve(m, c)?;
        if support.contains(c) {
            if !p.is_zero() {
                return Err(ZariskiError::IdentityViolation {
                    detail: format!("positive part pairs to {p} with support curve {c}"),
                });
            }
            orthogonality.push((c.clone(), p.clone()));
        } else if p.is_negative() {
            return Err(ZariskiError::IdentityViolation {
                detail: format!("fixpoint left a negative residual degree {p} on {c}"),
            });
        }
        p_dots.push((c.clone(), p));
    }
    Ok(ZariskiResult {
        n,
        p_dots,
        support: ids,
        neg_def_certificate: neg_def,
        orthogonality_certificate: orthogonality,
        method: Method::IterativeSolve,
        warnings: Vec::new(),
    })
}

/// Support-growing decomposition of the class given by its degree table:
/// seed the support with the degree-negative curves, solve the negative
/// part exactly on the support Gram matrix, grow the support wherever the
/// residual degree is negative, and repeat to the fixpoint.
pub fn zariski_iterative(m: &SurfaceModel, d: &ClassDots) -> Result<ZariskiResult, ZariskiError> {
    iterative_core(m, d, None)
}

/// Same fixpoint as `zariski_iterative`, reached through a seeded random
/// insertion order; used to confirm order independence.
pub fn zariski_iterative_seeded(
    m: &SurfaceModel,
    d: &ClassDots,
    seed: u64,
) -> Result<ZariskiResult, ZariskiError> {
    iterative_core(m, d, Some(seed))
}

/// Decomposition of K_F + Delta through the iterative solver.
pub fn zariski_adjoint(m: &SurfaceModel, delta: &QDivisor) -> Result<ZariskiResult, ZariskiError> {
    validate_gates(m, delta)?;
    let d = ClassDots::adjoint(m, delta)?;
    zariski_iterative(m, &d)
}

/// Coefficients of the negative part along an accepted chain, by
/// back-substitution against the chain recursions: the last coefficient
/// is S_n / u_n and each earlier one is (S_i - lambda_{i+1}) / u_i.
pub fn chain_lambdas(
    m: &SurfaceModel,
    delta: &QDivisor,
    chain: &ChainRecord,
) -> Result<Vec<Rat>, ZariskiError> {
    let (u, s) = chains::chain_recursions(m, delta, &chain.curves)?;
    let k = u.len();
    let mut lambdas = vec![Rat::zero(); k];
    lambdas[k - 1] = &s[k - 1] / &u[k - 1];
    for i in (0..k - 1).rev() {
        lambdas[i] = &(&s[i] - &lambdas[i + 1]) / &u[i];
    }
    for (i, l) in lambdas.iter().enumerate() {
        if !l.is_positive() {
            return Err(ZariskiError::NonPositiveLambda {
                chain: chain.curves.clone(),
                index: i + 1,
                value: l.clone(),
            });
        }
    }
    Ok(lambdas)
}

/// Decomposition of K_F + Delta assembled chain by chain: the negative
/// part is the lambda-weighted sum over every maximal chain. Sound
/// exactly when the maximal chains cover the negative support; a leftover
/// degree-negative curve is reported as a positivity failure.
pub fn zariski_chain_assembled(
    m: &SurfaceModel,
    delta: &QDivisor,
) -> Result<ZariskiResult, ZariskiError> {
    validate_gates(m, delta)?;
    if !m.pseudoeffective_assertion() {
        return Err(ZariskiError::NotPseudoeffectiveAssert);
    }
    let recs = chains::maximal_kfd_chains(m, delta)?;
    let mut n = QDivisor::zero();
    let mut support = Vec::new();
    let mut warnings = Vec::new();
    for rec in &recs {
        let lambdas = chain_lambdas(m, delta, rec)?;
        if lambdas.iter().any(|l| l >= &Rat::one()) {
            warnings.push(format!(
                "chain starting at {} has a coefficient at or above one: \
                 artificial chains remain, so the model is not minimal",
                rec.curves[0]
            ));
        }
        for (c, l) in rec.curves.iter().zip(&lambdas) {
            n += &QDivisor::single(c.clone(), l.clone());
            support.push(c.clone());
        }
    }
    support.sort();
    let gram = m.gram(&support)?;
    if !gram.is_negative_definite() {
        return Err(ZariskiError::NotNegativeDefinite { support });
    }
    let d = ClassDots::adjoint(m, delta)?;
    let support_set: BTreeSet<&CurveId> = support.iter().collect();
    let mut p_dots = Vec::new();
    let mut orthogonality = Vec::new();
    for c in m.curves() {
        let p = d.get(&c.id).unwrap() - &n.dot_curve(m, &c.id)?;
        if support_set.contains(&c.id) {
            if !p.is_zero() {
                return Err(ZariskiError::IdentityViolation {
                    detail: format!("positive part pairs to {p} with support curve {}", c.id),
                });
            }
            orthogonality.push((c.id.clone(), p.clone()));
        } else if p.is_negative() {
            return Err(ZariskiError::PositivityFailure {
                curve: c.id.clone(),
                value: p,
            });
        }
        p_dots.push((c.id.clone(), p));
    }
    Ok(ZariskiResult {
        n,
        p_dots,
        support,
        neg_def_certificate: true,
        orthogonality_certificate: orthogonality,
        method: Method::ChainSolve,
        warnings,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ThetaChainSolve {
    pub curves: Vec<CurveId>,
    pub matrix: SymMatrix,
    pub rhs: Vec<Rat>,
    pub lambdas: Vec<Rat>,
    /// Canonical-plus-boundary degree against each chain curve; at most 0
    /// everywhere and at most -1 on the last curve.
    pub adjoint_degrees: Vec<Rat>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ThetaDivisor {
    pub theta: QDivisor,
    pub chains: Vec<ThetaChainSolve>,
}

/// Fractional boundary on the negative support: per chain, solve the
/// tridiagonal system with diagonal c_i - 2, off-diagonal 1, and right
/// side (c_1, ..., c_{n-1}, c_n - 1), where c_i = min(2 + C_i^2, 0).
/// Coefficients land in the open unit interval, and the canonical class
/// plus the boundary pairs nonpositively with every chain curve, at most
/// -1 with the last one.
pub fn theta_divisor(
    m: &SurfaceModel,
    n_support: &[ChainRecord],
) -> Result<ThetaDivisor, ZariskiError> {
    if !m.ambient_smooth() {
        return Err(ZariskiError::AmbientNotSmooth);
    }
    for rec in n_support {
        for c in &rec.curves {
            if !m.is_smooth_rational(c) {
                return Err(ZariskiError::SupportCurveNotSmoothRational { curve: c.clone() });
            }
        }
    }
    let mut theta = QDivisor::zero();
    let mut solves = Vec::new();
    for rec in n_support {
        let k = rec.curves.len();
        let mut c_vals = Vec::with_capacity(k);
        for c in &rec.curves {
            let t = rat!(2) + &m.curve(c)?.self_int;
            c_vals.push(if t.is_positive() { Rat::zero() } else { t });
        }
        let mut a = SymMatrix::zero(k);
        for (i, base) in c_vals.iter().enumerate() {
            a.set(i, i, base - &rat!(2));
            if i + 1 < k {
                a.set(i, i + 1, rat!(1));
            }
        }
        let mut rhs = c_vals.clone();
        rhs[k - 1] = &c_vals[k - 1] - &rat!(1);
        let lambdas = a.solve(&rhs)?;
        for (c, l) in rec.curves.iter().zip(&lambdas) {
            if !l.is_positive() || l >= &Rat::one() {
                return Err(ZariskiError::CoefficientOutOfRange {
                    curve: c.clone(),
                    value: l.clone(),
                });
            }
            theta += &QDivisor::single(c.clone(), l.clone());
        }
        solves.push(ThetaChainSolve {
            curves: rec.curves.clone(),
            matrix: a,
            rhs,
            lambdas,
            adjoint_degrees: Vec::new(),
        });
    }
    for solve in &mut solves {
        let k = solve.curves.len();
        for (i, c) in solve.curves.iter().enumerate() {
            let deg = &m.curve(c)?.kx_dot + &theta.dot_curve(m, c)?;
            let bound = if i + 1 == k { rat!(-1) } else { rat!(0) };
            if deg > bound {
                return Err(ZariskiError::IdentityViolation {
                    detail: format!(
                        "canonical-plus-boundary degree {deg} on {c} exceeds {bound}"
                    ),
                });
            }
            solve.adjoint_degrees.push(deg);
        }
    }
    Ok(ThetaDivisor {
        theta,
        chains: solves,
    })
}

/// Curves on which the positive part has degree zero.
pub fn null_locus(result: &ZariskiResult) -> BTreeSet<CurveId> {
    result
        .p_dots
        .iter()
        .filter(|(_, v)| v.is_zero())
        .map(|(c, _)| c.clone())
        .collect()
}

/// The restricted base locus is the support of the negative part; the
/// augmented base locus is the null locus of the positive part, defined
/// only when the class is asserted big.
pub fn stable_base_loci(
    result: &ZariskiResult,
    big: bool,
) -> (BTreeSet<CurveId>, Option<BTreeSet<CurveId>>) {
    let bminus: BTreeSet<CurveId> = result.support.iter().cloned().collect();
    let bplus = big.then(|| null_locus(result));
    (bminus, bplus)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PerturbEntry {
    pub epsilon: Rat,
    /// Set when epsilon is at or above the certified threshold; the
    /// stability guarantees below do not apply to such entries.
    pub above_threshold: bool,
    pub support_equal: bool,
    /// The unperturbed negative part dominates the perturbed one.
    pub dominated: bool,
    /// On the common support, (N - N_eps) . C = -eps (A . C) exactly.
    pub shift_identity_ok: bool,
    pub result: ZariskiResult,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PerturbReport {
    pub epsilon_zero: Rat,
    pub base: ZariskiResult,
    pub entries: Vec<PerturbEntry>,
    /// Along decreasing epsilon below the threshold, the perturbed
    /// negative parts grow monotonically toward the unperturbed one.
    pub monotone: bool,
    pub all_ok: bool,
}

/// Largest certified perturbation size, halved for safety: the smallest
/// epsilon at which some chain recursion value S_k + eps T_k reaches
/// zero, where T is the recursion driven by the ample degrees. Defaults
/// to one when no chain constrains it.
pub fn perturbation_epsilon_zero(
    m: &SurfaceModel,
    delta: &QDivisor,
    a: &QDivisor,
) -> Result<Rat, ZariskiError> {
    let recs = chains::maximal_kfd_chains(m, delta)?;
    let mut least: Option<Rat> = None;
    for rec in &recs {
        let (u, s) = chains::chain_recursions(m, delta, &rec.curves)?;
        let mut t: Vec<Rat> = Vec::with_capacity(rec.curves.len());
        for (k, c) in rec.curves.iter().enumerate() {
            let adot = a.dot_curve(m, c)?;
            let tk = if k == 0 {
                adot
            } else {
                adot - &(&t[k - 1] / &u[k - 1])
            };
            t.push(tk);
        }
        for k in 0..rec.curves.len() {
            if !t[k].is_positive() {
                return Err(ZariskiError::IdentityViolation {
                    detail: format!(
                        "ample recursion value {} at step {} of the chain at {} is not positive",
                        t[k],
                        k + 1,
                        rec.curves[0]
                    ),
                });
            }
            let vanish = -&s[k] / &t[k];
            if least.as_ref().is_none_or(|b| &vanish < b) {
                least = Some(vanish);
            }
        }
    }
    Ok(least.map(|v| v / rat!(2)).unwrap_or_else(Rat::one))
}

/// Decomposes K_F + Delta + eps A for each listed epsilon and compares
/// with the unperturbed decomposition: equal support, dominated negative
/// part, the exact degree-shift identity on the support, and monotone
/// convergence along decreasing epsilon.
pub fn perturbation_check(
    m: &SurfaceModel,
    delta: &QDivisor,
    a: &QDivisor,
    eps_seq: &[Rat],
) -> Result<PerturbReport, ZariskiError> {
    validate_gates(m, delta)?;
    for c in m.curves() {
        let v = a.dot_curve(m, &c.id)?;
        if !v.is_positive() {
            return Err(ZariskiError::NotAmpleOnMarked {
                curve: c.id.clone(),
                value: v,
            });
        }
    }
    for e in eps_seq {
        if e.is_negative() {
            return Err(ZariskiError::InvalidEpsilon { value: e.clone() });
        }
    }
    let epsilon_zero = perturbation_epsilon_zero(m, delta, a)?;
    let base = zariski_iterative(m, &ClassDots::adjoint(m, delta)?)?;
    let mut entries = Vec::with_capacity(eps_seq.len());
    for eps in eps_seq {
        let d = ClassDots::adjoint_perturbed(m, delta, eps, a)?;
        let result = zariski_iterative(m, &d)?;
        let above_threshold = eps >= &epsilon_zero;
        let support_equal = result.support == base.support;
        let dominated = base.n.dominates(&result.n);
        let shift_identity_ok = support_equal && {
            let diff = &base.n - &result.n;
            let mut ok = true;
            for c in &base.support {
                let want = -&(eps * &a.dot_curve(m, c)?);
                if diff.dot_curve(m, c)? != want {
                    ok = false;
                    break;
                }
            }
            ok
        };
        entries.push(PerturbEntry {
            epsilon: eps.clone(),
            above_threshold,
            support_equal,
            dominated,
            shift_identity_ok,
            result,
        });
    }
    let mut below: Vec<&PerturbEntry> = entries.iter().filter(|e| !e.above_threshold).collect();
    below.sort_by(|x, y| y.epsilon.cmp(&x.epsilon));
    let mut monotone = true;
    for w in below.windows(2) {
        if !w[1].result.n.dominates(&w[0].result.n) {
            monotone = false;
        }
    }
    let all_ok = monotone
        && entries
            .iter()
            .filter(|e| !e.above_threshold)
            .all(|e| e.support_equal && e.dominated && e.shift_identity_ok);
    Ok(PerturbReport {
        epsilon_zero,
        base,
        entries,
        monotone,
        all_ok,
    })
}
