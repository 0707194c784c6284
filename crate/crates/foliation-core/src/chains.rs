//! Chain detection and the u/S recursions.
//!
//! A string is an ordered run of smooth rational negative curves meeting
//! consecutively once and otherwise not at all. An F-chain refines this:
//! invariant curves, all singularities on them reduced, Z pattern
//! (1, 2, ..., 2), junction singularities shared between consecutive curves,
//! one extra terminal singularity on the last curve, at most one ambient
//! point on the first curve and none later. A (K_F+Delta)-chain is an
//! F-chain whose u/S recursion stays strictly negative; it is artificial
//! exactly when det(-||C||) = 1.

use serde::{Deserialize, Serialize};

use crate::divisor::QDivisor;
use crate::indices;
use crate::linalg::SymMatrix;
use crate::model::{Curve, CurveId, ModelError, SingKind, SurfaceModel};
use crate::rat;
use crate::rational::Rat;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ChainKind {
    FChain,
    KFDChain,
    KFDArtificialChain,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainRecord {
    pub curves: Vec<CurveId>,
    pub matrix: SymMatrix,
    /// det(-||C||), computed by two independent routes.
    pub det_neg: Rat,
    pub tail: Option<CurveId>,
    pub u_seq: Vec<Rat>,
    pub s_seq: Vec<Rat>,
    pub artificial: bool,
    pub kind: ChainKind,
    /// The artificiality criterion det(-||C||) = 1 is proved for smooth
    /// ambients; set when this chain touches an ambient singularity.
    pub det_extrapolated: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ChainError {
    #[error("u_{step} = 0: degenerate configuration")]
    DivisionByZero { step: usize },
    #[error("chain ending at {end} has multiple tail candidates: {candidates:?}")]
    AmbiguousTail {
        end: CurveId,
        candidates: Vec<CurveId>,
    },
    #[error("maximal chains {a:?} and {b:?} intersect")]
    MaximalChainsIntersect { a: Vec<CurveId>, b: Vec<CurveId> },
    #[error("determinant crosscheck failed on {chain:?}: continuant {continuant}, elimination {elimination}")]
    DeterminantMismatch {
        chain: Vec<CurveId>,
        continuant: Rat,
        elimination: Rat,
    },
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Why an F-chain fails the (K_F+Delta)-chain test: the first index (1-based)
/// whose u or S value leaves the negative range.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainReject {
    pub step: usize,
    pub quantity: RejectedQuantity,
    pub value: Rat,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RejectedQuantity {
    U,
    S,
}

fn eligible_for_string(m: &SurfaceModel, c: &Curve) -> bool {
    c.self_int.is_negative() && m.is_smooth_rational(&c.id)
}

/// All maximal strings, each in a canonical orientation. A string is maximal
/// when no eligible curve extends it at either end.
pub fn find_strings(m: &SurfaceModel) -> Vec<Vec<CurveId>> {
    let eligible: Vec<&Curve> = m.curves().iter().filter(|c| eligible_for_string(m, c)).collect();
    let pair = |a: &CurveId, b: &CurveId| m.pair_ids(a, b).expect("ids from model");
    let extends = |seq: &[CurveId], next: &CurveId| -> bool {
        if seq.iter().any(|c| c == next) {
            return false;
        }
        let last = seq.last().unwrap();
        if pair(last, next) != Rat::one() {
            return false;
        }
        seq[..seq.len() - 1]
            .iter()
            .all(|c| pair(c, next).is_zero())
    };

    let mut out: std::collections::BTreeSet<Vec<CurveId>> = Default::default();
    let mut stack: Vec<Vec<CurveId>> = eligible.iter().map(|c| vec![c.id.clone()]).collect();
    while let Some(seq) = stack.pop() {
        let mut extended = false;
        for c in &eligible {
            if extends(&seq, &c.id) {
                let mut next = seq.clone();
                next.push(c.id.clone());
                stack.push(next);
                extended = true;
            }
        }
        if extended {
            continue;
        }
        // Maximal at the tail end; require maximality at the head end too,
        // which is maximality of the reversed sequence's tail.
        let rev: Vec<CurveId> = seq.iter().rev().cloned().collect();
        if eligible.iter().any(|c| extends(&rev, &c.id)) {
            continue;
        }
        out.insert(if rev < seq { rev } else { seq });
    }
    out.into_iter().collect()
}

fn all_sings_reduced(m: &SurfaceModel, id: &CurveId) -> bool {
    m.sings_on(id).iter().all(|s| s.kind == SingKind::Reduced)
}

fn qualifies_as_head(m: &SurfaceModel, c: &Curve) -> bool {
    c.invariant
        && eligible_for_string(m, c)
        && all_sings_reduced(m, &c.id)
        && m.z_total(&c.id) == Rat::one()
        && m.sings_on(&c.id).len() == 1
        && m.amb_on(&c.id).len() <= 1
}

fn qualifies_as_link(m: &SurfaceModel, c: &Curve) -> bool {
    c.invariant
        && eligible_for_string(m, c)
        && all_sings_reduced(m, &c.id)
        && m.z_total(&c.id) == rat!(2)
        && m.sings_on(&c.id).len() == 2
        && m.amb_on(&c.id).is_empty()
}

/// Checklist form of the F-chain conditions for an explicit sequence.
pub fn is_f_chain(m: &SurfaceModel, seq: &[CurveId]) -> bool {
    if seq.is_empty() {
        return false;
    }
    let Ok(head) = m.curve(&seq[0]) else {
        return false;
    };
    if !qualifies_as_head(m, head) {
        return false;
    }
    for id in &seq[1..] {
        let Ok(c) = m.curve(id) else { return false };
        if !qualifies_as_link(m, c) {
            return false;
        }
    }
    for (i, a) in seq.iter().enumerate() {
        for b in seq.iter().skip(i + 1) {
            let want = if seq[i + 1..].first() == Some(b) {
                Rat::one()
            } else {
                Rat::zero()
            };
            match m.pair_ids(a, b) {
                Ok(v) if v == want => {}
                _ => return false,
            }
        }
    }
    seq.windows(2).all(|w| {
        m.shared_sings(&w[0], &w[1])
            .iter()
            .filter(|s| {
                let za = s.incidence(&w[0]).map(|i| i.z.clone());
                let zb = s.incidence(&w[1]).map(|i| i.z.clone());
                za == Some(Rat::one()) && zb == Some(Rat::one())
            })
            .count()
            == 1
    })
}

/// The longest F-chain walk starting at a qualifying head curve.
fn walk_from_head(m: &SurfaceModel, head: &Curve) -> Vec<CurveId> {
    let mut seq = vec![head.id.clone()];
    let mut forward = m.sings_on(&head.id)[0].id.clone();
    loop {
        let current = seq.last().unwrap().clone();
        let sing = m.fol_sing(&forward).expect("walk singularity exists");
        let next = sing.incidences.iter().find_map(|inc| {
            if inc.curve == current || seq.contains(&inc.curve) {
                return None;
            }
            let c = m.curve(&inc.curve).ok()?;
            if !qualifies_as_link(m, c) {
                return None;
            }
            if inc.z != Rat::one() {
                return None;
            }
            if m.pair_ids(&current, &c.id).expect("ids from model") != Rat::one() {
                return None;
            }
            let disjoint = seq[..seq.len() - 1]
                .iter()
                .all(|e| m.pair_ids(e, &c.id).expect("ids from model").is_zero());
            if !disjoint {
                return None;
            }
            Some(c.id.clone())
        });
        match next {
            None => return seq,
            Some(id) => {
                let other = m
                    .sings_on(&id)
                    .iter()
                    .find(|s| s.id != forward)
                    .expect("link curve has a second singularity")
                    .id
                    .clone();
                seq.push(id);
                forward = other;
            }
        }
    }
}

/// det(-||C||) via the continuant recurrence for tridiagonal matrices with
/// unit off-diagonal, cross-checked against fraction-free elimination.
fn chain_det_neg(matrix: &SymMatrix, curves: &[CurveId]) -> Result<Rat, ChainError> {
    let n = matrix.size();
    let mut prev2 = Rat::one();
    let mut prev1 = Rat::one();
    for k in 0..n {
        let next = -matrix.get(k, k) * &prev1 - if k == 0 { Rat::zero() } else { prev2.clone() };
        prev2 = std::mem::replace(&mut prev1, next);
    }
    let continuant = prev1;
    let elimination = matrix.negated().determinant();
    if continuant != elimination {
        return Err(ChainError::DeterminantMismatch {
            chain: curves.to_vec(),
            continuant,
            elimination,
        });
    }
    Ok(continuant)
}

fn f_chain_record(m: &SurfaceModel, curves: &[CurveId]) -> Result<ChainRecord, ChainError> {
    let matrix = m.gram(curves)?;
    let det_neg = chain_det_neg(&matrix, curves)?;
    let tail = tail_of(m, curves)?;
    let det_extrapolated = curves.iter().any(|c| m.meets_ambient_singularity(c));
    Ok(ChainRecord {
        curves: curves.to_vec(),
        matrix,
        artificial: det_neg == Rat::one(),
        det_neg,
        tail,
        u_seq: Vec::new(),
        s_seq: Vec::new(),
        kind: ChainKind::FChain,
        det_extrapolated,
    })
}

/// All F-chains: every prefix of every maximal head walk.
pub fn find_f_chains(m: &SurfaceModel) -> Result<Vec<ChainRecord>, ChainError> {
    let mut out = Vec::new();
    for c in m.curves() {
        if !qualifies_as_head(m, c) {
            continue;
        }
        let walk = walk_from_head(m, c);
        for k in 1..=walk.len() {
            out.push(f_chain_record(m, &walk[..k])?);
        }
    }
    Ok(out)
}

/// The u/S recursions along a string:
/// u_1 = C_1², u_{k+1} = a_{k+1} - 1/u_k;
/// S_1 = (K_F+Delta)·C_1, S_{k+1} = Delta·C_{k+1} - S_k/u_k.
pub fn chain_recursions(
    m: &SurfaceModel,
    delta: &QDivisor,
    chain: &[CurveId],
) -> Result<(Vec<Rat>, Vec<Rat>), ChainError> {
    assert!(!chain.is_empty());
    let mut u = Vec::with_capacity(chain.len());
    let mut s = Vec::with_capacity(chain.len());
    u.push(m.curve(&chain[0]).map_err(ChainError::Model)?.self_int.clone());
    s.push(
        indices::kfd_dot(m, delta, &chain[0]).map_err(ChainError::Model)?,
    );
    for (k, id) in chain.iter().enumerate().skip(1) {
        let prev_u = u[k - 1].clone();
        if prev_u.is_zero() {
            return Err(ChainError::DivisionByZero { step: k });
        }
        let a = &m.curve(id).map_err(ChainError::Model)?.self_int;
        let r = delta.dot_curve(m, id).map_err(ChainError::Model)?;
        u.push(a - &(Rat::one() / &prev_u));
        let next_s = r - &(&s[k - 1] / &prev_u);
        s.push(next_s);
    }
    Ok((u, s))
}

/// Tests an F-chain against the negativity conditions and assembles the full
/// record on acceptance.
pub fn is_kfd_chain(
    m: &SurfaceModel,
    delta: &QDivisor,
    chain: &[CurveId],
) -> Result<Result<ChainRecord, ChainReject>, ChainError> {
    let (u, s) = chain_recursions(m, delta, chain)?;
    for (k, (uk, sk)) in u.iter().zip(&s).enumerate() {
        if !uk.is_negative() {
            return Ok(Err(ChainReject {
                step: k + 1,
                quantity: RejectedQuantity::U,
                value: uk.clone(),
            }));
        }
        if !sk.is_negative() {
            return Ok(Err(ChainReject {
                step: k + 1,
                quantity: RejectedQuantity::S,
                value: sk.clone(),
            }));
        }
    }
    let mut rec = f_chain_record(m, chain)?;
    rec.kind = if rec.artificial {
        ChainKind::KFDArtificialChain
    } else {
        ChainKind::KFDChain
    };
    rec.u_seq = u;
    rec.s_seq = s;
    Ok(Ok(rec))
}

/// The unique invariant curve outside the chain meeting its last curve at a
/// foliation singularity, if any.
pub fn tail_of(m: &SurfaceModel, chain: &[CurveId]) -> Result<Option<CurveId>, ChainError> {
    let end = chain.last().expect("chain is nonempty");
    let mut candidates = Vec::new();
    for s in m.sings_on(end) {
        for inc in &s.incidences {
            if chain.contains(&inc.curve) || candidates.contains(&inc.curve) {
                continue;
            }
            if m.curve(&inc.curve).map(|c| c.invariant).unwrap_or(false) {
                candidates.push(inc.curve.clone());
            }
        }
    }
    match candidates.len() {
        0 => Ok(None),
        1 => Ok(Some(candidates.pop().unwrap())),
        _ => {
            candidates.sort();
            Err(ChainError::AmbiguousTail {
                end: end.clone(),
                candidates,
            })
        }
    }
}

/// Accepted prefixes of a head walk, in length order. Acceptance is closed
/// under truncation, so the scan stops at the first rejection.
fn accepted_prefixes(
    m: &SurfaceModel,
    delta: &QDivisor,
    walk: &[CurveId],
) -> Result<Vec<ChainRecord>, ChainError> {
    let mut recs = Vec::new();
    for k in 1..=walk.len() {
        match is_kfd_chain(m, delta, &walk[..k])? {
            Ok(mut rec) => {
                // A stopped prefix keeps its in-walk successor as tail;
                // recompute against the walk, not the model, to preserve
                // that convention.
                if k < walk.len() {
                    rec.tail = Some(walk[k].clone());
                }
                recs.push(rec);
            }
            Err(_) => break,
        }
    }
    Ok(recs)
}

/// Maximal chains must be disjoint as configurations: no shared curve and
/// no intersection point between curves of different chains.
fn assert_disjoint(m: &SurfaceModel, out: &[ChainRecord]) -> Result<(), ChainError> {
    for i in 0..out.len() {
        for j in (i + 1)..out.len() {
            let mut meet = false;
            'scan: for a in &out[i].curves {
                for b in &out[j].curves {
                    if a == b || !m.pair_ids(a, b)?.is_zero() {
                        meet = true;
                        break 'scan;
                    }
                }
            }
            if meet {
                return Err(ChainError::MaximalChainsIntersect {
                    a: out[i].curves.clone(),
                    b: out[j].curves.clone(),
                });
            }
        }
    }
    Ok(())
}

/// For each head walk, the longest accepted prefix. Accepted prefixes form
/// an initial segment, so this is the per-walk maximal (K_F+Delta)-chain.
/// Pairwise disjointness of the results is asserted.
pub fn maximal_kfd_chains(
    m: &SurfaceModel,
    delta: &QDivisor,
) -> Result<Vec<ChainRecord>, ChainError> {
    let mut out: Vec<ChainRecord> = Vec::new();
    for c in m.curves() {
        if !qualifies_as_head(m, c) {
            continue;
        }
        let walk = walk_from_head(m, c);
        if let Some(rec) = accepted_prefixes(m, delta, &walk)?.pop() {
            out.push(rec);
        }
    }
    assert_disjoint(m, &out)?;
    Ok(out)
}

/// For each head walk, the longest accepted prefix that contracts to a
/// smooth point: determinant one and no ambient-singularity contact.
/// Determinant-one prefixes need not be contiguous, hence the filter scan.
pub fn maximal_artificial_chains(
    m: &SurfaceModel,
    delta: &QDivisor,
) -> Result<Vec<ChainRecord>, ChainError> {
    let mut out: Vec<ChainRecord> = Vec::new();
    for c in m.curves() {
        if !qualifies_as_head(m, c) {
            continue;
        }
        let walk = walk_from_head(m, c);
        let best = accepted_prefixes(m, delta, &walk)?
            .into_iter()
            .rfind(|rec| rec.artificial && !rec.det_extrapolated);
        if let Some(rec) = best {
            out.push(rec);
        }
    }
    assert_disjoint(m, &out)?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::model::ModelParts;

    fn ids(list: &[&str]) -> Vec<CurveId> {
        list.iter().map(|s| CurveId::from(*s)).collect()
    }

    #[test]
    fn strings_on_disjoint_and_joined_curves() {
        let mut b = corpus::ModelBuilder::new();
        let a = b.invariant_curve("A", rat!(-2), rat!(2));
        let c = b.invariant_curve("B", rat!(-2), rat!(2));
        b.reduced_sing("p", rat!(-1), &[(a.clone(), rat!(-1))]);
        b.reduced_sing("p2", rat!(-1), &[(a, rat!(-1))]);
        b.reduced_sing("q", rat!(-1), &[(c.clone(), rat!(-1))]);
        b.reduced_sing("q2", rat!(-1), &[(c, rat!(-1))]);
        let m = b.build();
        assert_eq!(find_strings(&m), vec![ids(&["A"]), ids(&["B"])]);

        let m = corpus::x3();
        assert_eq!(find_strings(&m), vec![ids(&["C1", "C2"])]);
    }

    #[test]
    fn cycle_is_not_a_string() {
        let mut b = corpus::ModelBuilder::new();
        let a = b.invariant_curve("A", rat!(-2), rat!(2));
        let c = b.invariant_curve("B", rat!(-2), rat!(2));
        let d = b.invariant_curve("D", rat!(-2), rat!(2));
        for (x, y, p) in [(&a, &c, "p"), (&c, &d, "q"), (&d, &a, "r")] {
            b.meet(x, y, rat!(1));
            b.reduced_sing(p, rat!(-1), &[(x.clone(), rat!(-1)), (y.clone(), rat!(-1))]);
        }
        let m = b.build();
        for s in find_strings(&m) {
            assert!(s.len() < 3, "cycle leaked into {s:?}");
        }
    }

    #[test]
    fn f_chains_on_x1_are_both_prefixes() {
        let m = corpus::x1();
        let chains = find_f_chains(&m).unwrap();
        assert_eq!(chains.len(), 2);
        assert_eq!(chains[0].curves, ids(&["C1"]));
        assert_eq!(chains[0].tail, Some(CurveId::from("C2")));
        assert_eq!(chains[0].det_neg, rat!(1));
        assert!(chains[0].artificial);
        assert_eq!(chains[1].curves, ids(&["C1", "C2"]));
        assert_eq!(chains[1].tail, None);
        assert_eq!(chains[1].det_neg, rat!(1));
    }

    #[test]
    fn poincare_dulac_on_string_excludes_chain() {
        let mut b = corpus::ModelBuilder::new();
        let c = b.invariant_curve("C", rat!(-2), rat!(2));
        b.sing_raw(crate::model::FoliationSingularity {
            id: crate::model::SingId::from("p"),
            kind: SingKind::PoincareDulacB,
            quotient: rat!(2),
            incidences: vec![crate::model::SingIncidence {
                curve: c.clone(),
                z: rat!(1),
                cs: rat!(2),
                node: false,
            }],
        });
        let m = b.build();
        assert!(find_f_chains(&m).unwrap().is_empty());
        assert_eq!(find_strings(&m), vec![ids(&["C"])]);
    }

    #[test]
    fn x3_chain_values() {
        let m = corpus::x3();
        let chain = ids(&["C1", "C2"]);
        let (u, s) = chain_recursions(&m, &QDivisor::zero(), &chain).unwrap();
        assert_eq!(u, vec![rat!(-2), rat!(-3, 2)]);
        assert_eq!(s, vec![rat!(-1), rat!(-1, 2)]);
        let rec = is_kfd_chain(&m, &QDivisor::zero(), &chain).unwrap().unwrap();
        assert_eq!(rec.det_neg, rat!(3));
        assert!(!rec.artificial);
        assert_eq!(rec.kind, ChainKind::KFDChain);
        assert!(rec.matrix.is_negative_definite());
    }

    #[test]
    fn single_curve_chain_values() {
        let m = corpus::single_minus_two();
        let chain = ids(&["C1"]);
        let (u, s) = chain_recursions(&m, &QDivisor::zero(), &chain).unwrap();
        assert_eq!(u, vec![rat!(-2)]);
        assert_eq!(s, vec![rat!(-1)]);
        let delta = QDivisor::single(CurveId::from("C1"), rat!(1, 2));
        let (_, s) = chain_recursions(&m, &delta, &chain).unwrap();
        assert_eq!(s, vec![rat!(-2)]);
    }

    #[test]
    fn division_by_zero_is_reported() {
        let m = corpus::x1();
        // Reversing the chain makes u_1 = -2, u_2 = -1 - 1/(-2) = -1/2; force
        // a zero by editing the second self-intersection to -1/2's killer.
        let mut parts: ModelParts = m.into_parts();
        parts.curves[0].self_int = rat!(-1);
        parts.curves[0].kx_dot = rat!(-1);
        parts.curves[1].self_int = rat!(-1);
        parts.curves[1].kx_dot = rat!(-1);
        let m = parts.build().unwrap();
        // u_1 = -1, u_2 = -1 + 1 = 0; a third step would divide by zero.
        let three = ids(&["C1", "C2", "C1"]);
        let err = chain_recursions(&m, &QDivisor::zero(), &three).unwrap_err();
        assert_eq!(err, ChainError::DivisionByZero { step: 2 });
    }

    #[test]
    fn rejection_reports_first_bad_step() {
        let m = corpus::x3_with_tail();
        let delta = QDivisor::single(CurveId::from("W"), rat!(1, 3));
        let chain = ids(&["C1", "C2", "T"]);
        let rej = is_kfd_chain(&m, &delta, &chain).unwrap().unwrap_err();
        assert_eq!(rej.step, 3);
        assert_eq!(rej.quantity, RejectedQuantity::S);
        assert_eq!(rej.value, rat!(0));
    }

    #[test]
    fn tails_follow_the_walk() {
        let m = corpus::x1();
        assert_eq!(
            tail_of(&m, &ids(&["C1"])).unwrap(),
            Some(CurveId::from("C2"))
        );
        assert_eq!(tail_of(&m, &ids(&["C1", "C2"])).unwrap(), None);

        let m = corpus::single_minus_two();
        assert_eq!(tail_of(&m, &ids(&["C1"])).unwrap(), None);
    }

    #[test]
    fn ambiguous_tail_flags_invalid_model() {
        let mut b = corpus::ModelBuilder::new();
        let c = b.invariant_curve("C", rat!(-2), rat!(2));
        let t1 = b.invariant_curve("T1", rat!(-2), rat!(2));
        let t2 = b.invariant_curve("T2", rat!(-2), rat!(2));
        b.reduced_sing(
            "p",
            rat!(-1),
            &[(c.clone(), rat!(-2)), (t1, rat!(-1)), (t2, rat!(-1))],
        );
        let m = b.build();
        assert!(matches!(
            tail_of(&m, &ids(&["C"])),
            Err(ChainError::AmbiguousTail { .. })
        ));
    }

    #[test]
    fn maximal_chains_on_x3_families() {
        let m = corpus::x3();
        let out = maximal_kfd_chains(&m, &QDivisor::zero()).unwrap();
        assert_eq!(out.len(), 1);
        assert_eq!(out[0].curves, ids(&["C1", "C2"]));
        assert_eq!(out[0].tail, None);

        let m = corpus::x3_with_tail();
        let out = maximal_kfd_chains(&m, &QDivisor::zero()).unwrap();
        assert_eq!(out.len(), 1);
        assert_eq!(out[0].curves, ids(&["C1", "C2", "T"]));

        let delta = QDivisor::single(CurveId::from("W"), rat!(1, 3));
        let out = maximal_kfd_chains(&m, &delta).unwrap();
        assert_eq!(out.len(), 1);
        assert_eq!(out[0].curves, ids(&["C1", "C2"]));
        assert_eq!(out[0].tail, Some(CurveId::from("T")));
    }

    #[test]
    fn two_disjoint_chains() {
        let mut b = corpus::ModelBuilder::new();
        corpus::chain_component(&mut b, "A", &[rat!(-2), rat!(-2)], None);
        corpus::chain_component(&mut b, "B", &[rat!(-2), rat!(-2)], None);
        let m = b.build();
        let out = maximal_kfd_chains(&m, &QDivisor::zero()).unwrap();
        assert_eq!(out.len(), 2);
        assert_eq!(out[0].curves, ids(&["A1", "A2"]));
        assert_eq!(out[1].curves, ids(&["B1", "B2"]));
    }

    #[test]
    fn prefix_closure_of_accepted_chains() {
        let m = corpus::x3_with_tail();
        let chain = ids(&["C1", "C2", "T"]);
        for k in 1..=3 {
            assert!(
                is_kfd_chain(&m, &QDivisor::zero(), &chain[..k])
                    .unwrap()
                    .is_ok(),
                "prefix of length {k} not accepted"
            );
        }
    }
}
