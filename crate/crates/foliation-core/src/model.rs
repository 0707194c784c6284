//! The combinatorial data model of a foliated surface pair and its validation.
//!
//! A `SurfaceModel` holds finitely many marked curves with exact invariants,
//! a symmetric intersection form, foliation singularities with per-curve
//! incidence records, and ambient cyclic-quotient singularities. Positivity
//! notions (nef, pseudoeffective) are always relative to the marked curves
//! plus explicit user assertions; every report downstream restates this.
//!
//! `build` rejects structurally malformed input (bad references, duplicates);
//! `validate` checks the semantic axioms and returns violations as data.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::linalg::SymMatrix;
use crate::rational::Rat;

macro_rules! id_newtype {
    ($name:ident) => {
        #[derive(
            Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
        )]
        #[serde(transparent)]
        pub struct $name(pub String);

        impl $name {
            pub fn new(s: impl Into<String>) -> Self {
                $name(s.into())
            }
            pub fn as_str(&self) -> &str {
                &self.0
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&self.0)
            }
        }

        impl From<&str> for $name {
            fn from(s: &str) -> Self {
                $name(s.to_string())
            }
        }
    };
}

id_newtype!(CurveId);
id_newtype!(SingId);
id_newtype!(AmbientId);

/// The two canonical foliation singularity kinds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SingKind {
    Reduced,
    PoincareDulacB,
}

/// One invariant curve passing through a foliation singularity, with its
/// local index contributions. A node incidence means the curve passes
/// through with both branches (the curve's node sits at the singularity)
/// and occupies both separatrix slots.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SingIncidence {
    pub curve: CurveId,
    pub z: Rat,
    pub cs: Rat,
    #[serde(default)]
    pub node: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FoliationSingularity {
    pub id: SingId,
    pub kind: SingKind,
    /// Eigenvalue quotient. Stored on the canonical branch: for a reduced
    /// non-degenerate singularity the value with absolute value >= 1 (both
    /// branches are <= 0 in-model), for Poincare-Dulac the positive integer.
    pub quotient: Rat,
    pub incidences: Vec<SingIncidence>,
}

impl FoliationSingularity {
    /// Separatrix slots used by the incidence list; a node incidence uses two.
    pub fn slots(&self) -> usize {
        self.incidences
            .iter()
            .map(|inc| if inc.node { 2 } else { 1 })
            .sum()
    }

    pub fn incidence(&self, curve: &CurveId) -> Option<&SingIncidence> {
        self.incidences.iter().find(|inc| &inc.curve == curve)
    }
}

/// A cyclic quotient singularity of the ambient surface.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AmbientSingularity {
    pub id: AmbientId,
    pub order: u64,
    pub on_curves: Vec<CurveId>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Curve {
    pub id: CurveId,
    pub self_int: Rat,
    pub chi: Rat,
    pub kx_dot: Rat,
    pub invariant: bool,
    /// Total tangency order; present exactly when the curve is not invariant.
    pub tang: Option<Rat>,
    #[serde(default)]
    pub nodal: bool,
}

/// Structural errors rejected at construction time.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ModelError {
    #[error("duplicate curve id {0}")]
    DuplicateCurve(CurveId),
    #[error("unknown curve id {0}")]
    UnknownCurve(CurveId),
    #[error("duplicate singularity id {0}")]
    DuplicateSingularity(SingId),
    #[error("duplicate ambient singularity id {0}")]
    DuplicateAmbient(AmbientId),
    #[error("singularity {0} lists curve {1} twice")]
    DuplicateIncidence(SingId, CurveId),
    #[error("ambient singularity {0} lists curve {1} twice")]
    DuplicateAmbientCurve(AmbientId, CurveId),
    #[error("intersection entry pairs curve {0} with itself")]
    SelfPairEntry(CurveId),
    #[error("duplicate intersection entry for {0}, {1}")]
    DuplicatePairEntry(CurveId, CurveId),
    #[error("curve {0} is invariant but records a tangency total")]
    TangOnInvariant(CurveId),
    #[error("curve {0} is not invariant and lacks a tangency total")]
    MissingTang(CurveId),
}

/// Raw constructor input; also the shape used for test-side surgery.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModelParts {
    pub curves: Vec<Curve>,
    /// Off-diagonal intersection numbers; unlisted pairs are zero.
    pub intersections: Vec<(CurveId, CurveId, Rat)>,
    pub fol_sings: Vec<FoliationSingularity>,
    pub amb_sings: Vec<AmbientSingularity>,
    pub ambient_smooth: bool,
    pub pseudoeffective: bool,
}

impl ModelParts {
    pub fn build(self) -> Result<SurfaceModel, ModelError> {
        SurfaceModel::build(self)
    }
}

/// A foliated surface pair as a finite combinatorial object.
///
/// Curves, singularities, and ambient singularities are kept sorted by id, so
/// equal mathematical content compares and serializes identically.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SurfaceModel {
    curves: Vec<Curve>,
    pairing: SymMatrix,
    fol_sings: Vec<FoliationSingularity>,
    amb_sings: Vec<AmbientSingularity>,
    ambient_smooth: bool,
    pseudoeffective: bool,
}

impl SurfaceModel {
    pub fn build(mut parts: ModelParts) -> Result<SurfaceModel, ModelError> {
        parts.curves.sort_by(|a, b| a.id.cmp(&b.id));
        for w in parts.curves.windows(2) {
            if w[0].id == w[1].id {
                return Err(ModelError::DuplicateCurve(w[0].id.clone()));
            }
        }
        for c in &parts.curves {
            match (c.invariant, &c.tang) {
                (true, Some(_)) => return Err(ModelError::TangOnInvariant(c.id.clone())),
                (false, None) => return Err(ModelError::MissingTang(c.id.clone())),
                _ => {}
            }
        }
        let index: BTreeMap<CurveId, usize> = parts
            .curves
            .iter()
            .enumerate()
            .map(|(i, c)| (c.id.clone(), i))
            .collect();
        let lookup = |id: &CurveId| -> Result<usize, ModelError> {
            index
                .get(id)
                .copied()
                .ok_or_else(|| ModelError::UnknownCurve(id.clone()))
        };

        let n = parts.curves.len();
        let mut pairing = SymMatrix::zero(n);
        for (i, c) in parts.curves.iter().enumerate() {
            pairing.set(i, i, c.self_int.clone());
        }
        let mut seen_pairs = BTreeSet::new();
        for (a, b, v) in &parts.intersections {
            let i = lookup(a)?;
            let j = lookup(b)?;
            if i == j {
                return Err(ModelError::SelfPairEntry(a.clone()));
            }
            let key = (i.min(j), i.max(j));
            if !seen_pairs.insert(key) {
                return Err(ModelError::DuplicatePairEntry(a.clone(), b.clone()));
            }
            pairing.set(i, j, v.clone());
        }

        parts.fol_sings.sort_by(|a, b| a.id.cmp(&b.id));
        for w in parts.fol_sings.windows(2) {
            if w[0].id == w[1].id {
                return Err(ModelError::DuplicateSingularity(w[0].id.clone()));
            }
        }
        for s in &mut parts.fol_sings {
            s.incidences.sort_by(|a, b| a.curve.cmp(&b.curve));
            for w in s.incidences.windows(2) {
                if w[0].curve == w[1].curve {
                    return Err(ModelError::DuplicateIncidence(
                        s.id.clone(),
                        w[0].curve.clone(),
                    ));
                }
            }
            for inc in &s.incidences {
                lookup(&inc.curve)?;
            }
            s.quotient = canonical_quotient(s.kind, &s.quotient);
        }

        parts.amb_sings.sort_by(|a, b| a.id.cmp(&b.id));
        for w in parts.amb_sings.windows(2) {
            if w[0].id == w[1].id {
                return Err(ModelError::DuplicateAmbient(w[0].id.clone()));
            }
        }
        for a in &mut parts.amb_sings {
            a.on_curves.sort();
            for w in a.on_curves.windows(2) {
                if w[0] == w[1] {
                    return Err(ModelError::DuplicateAmbientCurve(
                        a.id.clone(),
                        w[0].clone(),
                    ));
                }
            }
            for c in &a.on_curves {
                lookup(c)?;
            }
        }

        Ok(SurfaceModel {
            curves: parts.curves,
            pairing,
            fol_sings: parts.fol_sings,
            amb_sings: parts.amb_sings,
            ambient_smooth: parts.ambient_smooth,
            pseudoeffective: parts.pseudoeffective,
        })
    }

    pub fn into_parts(self) -> ModelParts {
        let mut intersections = Vec::new();
        for i in 0..self.curves.len() {
            for j in (i + 1)..self.curves.len() {
                let v = self.pairing.get(i, j);
                if !v.is_zero() {
                    intersections.push((
                        self.curves[i].id.clone(),
                        self.curves[j].id.clone(),
                        v.clone(),
                    ));
                }
            }
        }
        ModelParts {
            curves: self.curves,
            intersections,
            fol_sings: self.fol_sings,
            amb_sings: self.amb_sings,
            ambient_smooth: self.ambient_smooth,
            pseudoeffective: self.pseudoeffective,
        }
    }

    pub fn curves(&self) -> &[Curve] {
        &self.curves
    }

    pub fn fol_sings(&self) -> &[FoliationSingularity] {
        &self.fol_sings
    }

    pub fn amb_sings(&self) -> &[AmbientSingularity] {
        &self.amb_sings
    }

    pub fn ambient_smooth(&self) -> bool {
        self.ambient_smooth
    }

    pub fn pseudoeffective_assertion(&self) -> bool {
        self.pseudoeffective
    }

    pub fn index_of(&self, id: &CurveId) -> Result<usize, ModelError> {
        self.curves
            .binary_search_by(|c| c.id.cmp(id))
            .map_err(|_| ModelError::UnknownCurve(id.clone()))
    }

    pub fn curve(&self, id: &CurveId) -> Result<&Curve, ModelError> {
        Ok(&self.curves[self.index_of(id)?])
    }

    pub fn pair_ids(&self, a: &CurveId, b: &CurveId) -> Result<Rat, ModelError> {
        Ok(self
            .pairing
            .get(self.index_of(a)?, self.index_of(b)?)
            .clone())
    }

    pub fn pairing(&self) -> &SymMatrix {
        &self.pairing
    }

    pub fn fol_sing(&self, id: &SingId) -> Option<&FoliationSingularity> {
        self.fol_sings.iter().find(|s| &s.id == id)
    }

    /// Foliation singularities whose incidence list contains the curve.
    pub fn sings_on(&self, id: &CurveId) -> Vec<&FoliationSingularity> {
        self.fol_sings
            .iter()
            .filter(|s| s.incidence(id).is_some())
            .collect()
    }

    /// Ambient singularities the curve passes through.
    pub fn amb_on(&self, id: &CurveId) -> Vec<&AmbientSingularity> {
        self.amb_sings
            .iter()
            .filter(|a| a.on_curves.contains(id))
            .collect()
    }

    pub fn meets_ambient_singularity(&self, id: &CurveId) -> bool {
        self.amb_sings.iter().any(|a| a.on_curves.contains(id))
    }

    fn shares_ambient(&self, a: &CurveId, b: &CurveId) -> bool {
        self.amb_sings
            .iter()
            .any(|s| s.on_curves.contains(a) && s.on_curves.contains(b))
    }

    /// Singularities shared by two distinct curves, node incidences included.
    pub fn shared_sings(&self, a: &CurveId, b: &CurveId) -> Vec<&FoliationSingularity> {
        self.fol_sings
            .iter()
            .filter(|s| s.incidence(a).is_some() && s.incidence(b).is_some())
            .collect()
    }

    pub fn z_total(&self, id: &CurveId) -> Rat {
        self.sings_on(id)
            .iter()
            .map(|s| s.incidence(id).unwrap().z.clone())
            .sum()
    }

    pub fn cs_total(&self, id: &CurveId) -> Rat {
        self.sings_on(id)
            .iter()
            .map(|s| s.incidence(id).unwrap().cs.clone())
            .sum()
    }

    /// True for a smooth rational curve: the stored Euler characteristic
    /// matches the orbifold value for its ambient singularities and the
    /// curve carries no node.
    pub fn is_smooth_rational(&self, id: &CurveId) -> bool {
        let Ok(c) = self.curve(id) else { return false };
        if c.nodal {
            return false;
        }
        let mut expected = Rat::int(2);
        for a in self.amb_on(id) {
            expected += Rat::one() / Rat::int(a.order as i64) - Rat::one();
        }
        c.chi == expected
    }

    /// Principal submatrix of the pairing on the given curves, in order.
    pub fn gram(&self, ids: &[CurveId]) -> Result<SymMatrix, ModelError> {
        let idx = ids
            .iter()
            .map(|id| self.index_of(id))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(self.pairing.principal_submatrix(&idx))
    }

    pub fn validate(&self) -> ValidationReport {
        validate(self)
    }
}

fn canonical_quotient(kind: SingKind, q: &Rat) -> Rat {
    match kind {
        SingKind::Reduced => {
            if q.is_negative() {
                let inv = q.recip().expect("negative has reciprocal");
                if &inv < q {
                    inv
                } else {
                    q.clone()
                }
            } else {
                q.clone()
            }
        }
        SingKind::PoincareDulacB => {
            if q.is_positive() && !q.is_integer() {
                let inv = q.recip().expect("positive has reciprocal");
                if inv.is_integer() {
                    return inv;
                }
            }
            q.clone()
        }
    }
}

/// Axiom labels attached to validation findings. These are diagnostic rule
/// codes: stable strings consumed by reports and the test suite.
pub mod clause {
    pub const SMOOTHNESS_FLAG: &str = "Definition 2.1 (smoothness flag)";
    pub const AMBIENT_ORDER: &str = "Definition 2.3";
    pub const REDUCED_QUOTIENT: &str = "Definition 2.4 (reduced)";
    pub const PD_QUOTIENT: &str = "Definition 2.4 (Poincare-Dulac)";
    pub const TANG_RANGE: &str = "Definition 2.6";
    pub const CHI_DEFINITION: &str = "Definition 2.15";
    pub const Z_INTEGER: &str = "Lemma 2.2(1)";
    pub const Z_CANONICAL: &str = "Lemma 2.2(4)";
    pub const SADDLE_NODE: &str = "Lemma 2.5(1)";
    pub const CS_PAIRING: &str = "Lemma 2.5(2)";
    pub const CS_ADJUNCTION: &str = "Lemma 2.4(2)";
    pub const PAIRING_SIGN: &str = "model (pairing)";
    pub const PAIRING_INTEGRALITY: &str = "model (pairing integrality)";
    pub const SHARED_SINGULARITY: &str = "model (shared singularity)";
    pub const INVARIANT_INTERSECTIONS: &str = "model (invariant intersections)";
    pub const NODE_FLAG: &str = "model (node flag)";
    pub const NON_INVARIANT_INCIDENCE: &str = "model (incidence on non-invariant curve)";
    pub const DELTA_EFFECTIVE: &str = "delta (effective)";
    pub const DELTA_FRACTIONAL: &str = "delta (fractional part)";
    pub const DELTA_INVARIANT: &str = "delta (invariant component)";
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    /// The violated axiom's rule code (see the `clause` constants).
    pub clause: String,
    /// The curve or singularity the finding is about.
    pub subject: String,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
    pub warnings: Vec<String>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    /// The distinct rule codes present, sorted.
    pub fn clause_set(&self) -> BTreeSet<String> {
        self.violations.iter().map(|v| v.clause.clone()).collect()
    }

    fn push(&mut self, clause: &str, subject: impl fmt::Display, detail: impl Into<String>) {
        self.violations.push(Violation {
            clause: clause.to_string(),
            subject: subject.to_string(),
            detail: detail.into(),
        });
    }
}

fn validate(m: &SurfaceModel) -> ValidationReport {
    let mut rep = ValidationReport::default();

    if m.ambient_smooth && !m.amb_sings.is_empty() {
        rep.push(
            clause::SMOOTHNESS_FLAG,
            "model",
            "ambient marked smooth but ambient singularities are listed",
        );
    }
    for a in &m.amb_sings {
        if a.order < 2 {
            rep.push(
                clause::AMBIENT_ORDER,
                &a.id,
                format!("cyclic quotient order {} is below 2", a.order),
            );
        }
    }

    for s in &m.fol_sings {
        validate_singularity(m, s, &mut rep);
    }

    for c in &m.curves {
        validate_curve(m, c, &mut rep);
    }

    validate_pairing(m, &mut rep);
    rep
}

fn validate_singularity(m: &SurfaceModel, s: &FoliationSingularity, rep: &mut ValidationReport) {
    let q = &s.quotient;
    match s.kind {
        SingKind::Reduced => {
            if q.is_positive() {
                rep.push(
                    clause::REDUCED_QUOTIENT,
                    &s.id,
                    format!("reduced singularity with positive eigenvalue quotient {q}"),
                );
                return;
            }
        }
        SingKind::PoincareDulacB => {
            if !(q.is_positive() && q.is_integer()) {
                rep.push(
                    clause::PD_QUOTIENT,
                    &s.id,
                    format!("Poincare-Dulac quotient {q} is not a positive integer"),
                );
                return;
            }
            if s.slots() > 1 {
                rep.push(
                    clause::CS_PAIRING,
                    &s.id,
                    "more than one invariant curve through a Poincare-Dulac singularity",
                );
                return;
            }
        }
    }

    let max_slots = 2;
    if s.slots() > max_slots {
        rep.push(
            clause::CS_PAIRING,
            &s.id,
            format!("{} separatrix slots used, at most {max_slots} exist", s.slots()),
        );
        return;
    }

    let mut plain_cs: Vec<&Rat> = Vec::new();
    for inc in &s.incidences {
        let curve_ok = m.curve(&inc.curve).is_ok();
        if curve_ok {
            let c = m.curve(&inc.curve).unwrap();
            if !c.invariant {
                rep.push(
                    clause::NON_INVARIANT_INCIDENCE,
                    &s.id,
                    format!("curve {} is not invariant", inc.curve),
                );
                continue;
            }
            if inc.node && !c.nodal {
                rep.push(
                    clause::NODE_FLAG,
                    &s.id,
                    format!("node incidence on curve {} not flagged nodal", inc.curve),
                );
            }
        }

        if !inc.z.is_integer() {
            rep.push(
                clause::Z_INTEGER,
                &s.id,
                format!("Z contribution {} on {} is not an integer", inc.z, inc.curve),
            );
            continue;
        }
        if inc.z.is_negative() {
            rep.push(
                clause::Z_CANONICAL,
                &s.id,
                format!("Z contribution {} on {} is negative", inc.z, inc.curve),
            );
            continue;
        }

        if inc.node {
            if q.is_zero() {
                rep.push(
                    clause::SADDLE_NODE,
                    &s.id,
                    format!("node incidence on {} at a degenerate singularity", inc.curve),
                );
            } else {
                let expected = q + q.recip().expect("nonzero quotient");
                if inc.cs != expected {
                    rep.push(
                        clause::CS_PAIRING,
                        &s.id,
                        format!(
                            "node CS {} on {} differs from both-branch total {expected}",
                            inc.cs, inc.curve
                        ),
                    );
                }
            }
            continue;
        }

        if q.is_zero() {
            let central = inc.z == Rat::one() && inc.cs.is_zero();
            let strong = inc.z >= Rat::int(2);
            if !(central || strong) {
                rep.push(
                    clause::SADDLE_NODE,
                    &s.id,
                    format!(
                        "degenerate singularity incidence on {} has Z={}, CS={}",
                        inc.curve, inc.z, inc.cs
                    ),
                );
            }
        } else {
            if inc.z != Rat::one() {
                rep.push(
                    clause::Z_CANONICAL,
                    &s.id,
                    format!(
                        "Z contribution {} on {} must be 1 at nonzero quotient",
                        inc.z, inc.curve
                    ),
                );
            }
            plain_cs.push(&inc.cs);
        }
    }

    if q.is_zero() {
        return;
    }
    let inv = q.recip().expect("nonzero quotient");
    match plain_cs.len() {
        0 => {}
        1 => {
            if plain_cs[0] != q && *plain_cs[0] != inv {
                rep.push(
                    clause::CS_PAIRING,
                    &s.id,
                    format!(
                        "CS contribution {} is neither {q} nor {inv}",
                        plain_cs[0]
                    ),
                );
            }
        }
        _ => {
            let mut got = vec![plain_cs[0].clone(), plain_cs[1].clone()];
            got.sort();
            let mut want = vec![q.clone(), inv.clone()];
            want.sort();
            if got != want {
                rep.push(
                    clause::CS_PAIRING,
                    &s.id,
                    format!(
                        "CS pair {{{}, {}}} differs from {{{q}, {inv}}}",
                        got[0], got[1]
                    ),
                );
            }
        }
    }
}

fn validate_curve(m: &SurfaceModel, c: &Curve, rep: &mut ValidationReport) {
    let chi_expected = -&c.kx_dot - &c.self_int;
    if c.chi != chi_expected {
        rep.push(
            clause::CHI_DEFINITION,
            &c.id,
            format!(
                "chi {} differs from -K_X.C - C^2 = {chi_expected}",
                c.chi
            ),
        );
    }

    if let Some(t) = &c.tang {
        if t.is_negative() {
            rep.push(
                clause::TANG_RANGE,
                &c.id,
                format!("tangency total {t} is negative"),
            );
        } else if !m.meets_ambient_singularity(&c.id) && !t.is_integer() {
            rep.push(
                clause::TANG_RANGE,
                &c.id,
                format!("tangency total {t} must be an integer away from Sing(X)"),
            );
        }
    }

    if c.invariant {
        if !m.meets_ambient_singularity(&c.id) {
            let cs = m.cs_total(&c.id);
            if cs != c.self_int {
                rep.push(
                    clause::CS_ADJUNCTION,
                    &c.id,
                    format!("C^2 = {} but total CS = {cs}", c.self_int),
                );
            }
        }
        if c.nodal
            && !m.meets_ambient_singularity(&c.id)
            && !m
                .sings_on(&c.id)
                .iter()
                .any(|s| s.incidence(&c.id).unwrap().node)
        {
            rep.push(
                clause::NODE_FLAG,
                &c.id,
                "nodal invariant curve has no node incidence and avoids Sing(X)",
            );
        }
    }
}

fn validate_pairing(m: &SurfaceModel, rep: &mut ValidationReport) {
    let n = m.curves.len();
    for i in 0..n {
        let ci = &m.curves[i];
        if !m.meets_ambient_singularity(&ci.id) && !ci.self_int.is_integer() {
            rep.push(
                clause::PAIRING_INTEGRALITY,
                &ci.id,
                format!(
                    "self-intersection {} must be an integer away from Sing(X)",
                    ci.self_int
                ),
            );
        }
        for j in (i + 1)..n {
            let cj = &m.curves[j];
            let v = m.pairing.get(i, j);
            if v.is_negative() {
                rep.push(
                    clause::PAIRING_SIGN,
                    format!("{}, {}", ci.id, cj.id),
                    format!("distinct curves with negative intersection {v}"),
                );
                continue;
            }
            let shared_ambient = m.shares_ambient(&ci.id, &cj.id);
            if !shared_ambient && !v.is_integer() {
                rep.push(
                    clause::PAIRING_INTEGRALITY,
                    format!("{}, {}", ci.id, cj.id),
                    format!("intersection {v} must be an integer away from Sing(X)"),
                );
                continue;
            }
            let shared = m.shared_sings(&ci.id, &cj.id).len();
            if shared > 0 && *v < Rat::int(shared as i64) {
                rep.push(
                    clause::SHARED_SINGULARITY,
                    format!("{}, {}", ci.id, cj.id),
                    format!("{shared} shared singularities force intersection >= {shared}, got {v}"),
                );
                continue;
            }
            if ci.invariant && cj.invariant && !shared_ambient && *v != Rat::int(shared as i64)
            {
                rep.push(
                    clause::INVARIANT_INTERSECTIONS,
                    format!("{}, {}", ci.id, cj.id),
                    format!(
                        "invariant curves meet only at shared singularities: expected {shared}, got {v}"
                    ),
                );
            }
        }
    }
}

/// Validation findings for a boundary divisor against a model.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DeltaReport {
    pub effective: bool,
    /// True when every coefficient lies in [0, 1).
    pub fractional: bool,
    pub no_invariant_component: bool,
    pub violations: Vec<Violation>,
}

pub fn delta_validate(
    m: &SurfaceModel,
    delta: &crate::divisor::QDivisor,
) -> Result<DeltaReport, ModelError> {
    let mut rep = DeltaReport {
        effective: true,
        fractional: true,
        no_invariant_component: true,
        violations: Vec::new(),
    };
    for (id, a) in delta.iter() {
        let c = m.curve(id)?;
        if a.is_negative() {
            rep.effective = false;
            rep.violations.push(Violation {
                clause: clause::DELTA_EFFECTIVE.to_string(),
                subject: id.to_string(),
                detail: format!("coefficient {a} is negative"),
            });
        }
        if a.is_negative() || *a >= Rat::one() {
            rep.fractional = false;
            rep.violations.push(Violation {
                clause: clause::DELTA_FRACTIONAL.to_string(),
                subject: id.to_string(),
                detail: format!("coefficient {a} is outside [0, 1)"),
            });
        }
        if c.invariant {
            rep.no_invariant_component = false;
            rep.violations.push(Violation {
                clause: clause::DELTA_INVARIANT.to_string(),
                subject: id.to_string(),
                detail: "component is invariant".to_string(),
            });
        }
    }
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat;

    fn inv_curve(id: &str, self_int: i64, chi: Rat, kx: Rat) -> Curve {
        Curve {
            id: CurveId::from(id),
            self_int: rat!(self_int),
            chi,
            kx_dot: kx,
            invariant: true,
            tang: None,
            nodal: false,
        }
    }

    fn reduced(id: &str, q: Rat, incs: Vec<(&str, i64, Rat)>) -> FoliationSingularity {
        FoliationSingularity {
            id: SingId::from(id),
            kind: SingKind::Reduced,
            quotient: q,
            incidences: incs
                .into_iter()
                .map(|(c, z, cs)| SingIncidence {
                    curve: CurveId::from(c),
                    z: rat!(z),
                    cs,
                    node: false,
                })
                .collect(),
        }
    }

    /// The two-curve model with a (-1)-curve and its (-2) tail.
    fn x1() -> SurfaceModel {
        ModelParts {
            curves: vec![
                inv_curve("C1", -1, rat!(2), rat!(-1)),
                inv_curve("C2", -2, rat!(2), rat!(0)),
            ],
            intersections: vec![(CurveId::from("C1"), CurveId::from("C2"), rat!(1))],
            fol_sings: vec![
                reduced("p", rat!(-1), vec![("C1", 1, rat!(-1)), ("C2", 1, rat!(-1))]),
                reduced("q", rat!(-1), vec![("C2", 1, rat!(-1))]),
            ],
            amb_sings: vec![],
            ambient_smooth: true,
            pseudoeffective: true,
        }
        .build()
        .unwrap()
    }

    #[test]
    fn x1_is_valid() {
        let m = x1();
        let rep = m.validate();
        assert!(rep.is_valid(), "{:?}", rep.violations);
        assert_eq!(m.z_total(&CurveId::from("C1")), rat!(1));
        assert_eq!(m.z_total(&CurveId::from("C2")), rat!(2));
        assert_eq!(m.cs_total(&CurveId::from("C2")), rat!(-2));
        assert!(m.is_smooth_rational(&CurveId::from("C1")));
    }

    #[test]
    fn cs_adjunction_mismatch_is_flagged() {
        let mut parts = x1().into_parts();
        parts.curves[0].self_int = rat!(-2);
        parts.curves[0].kx_dot = rat!(0);
        let m = parts.build().unwrap();
        let clauses = m.validate().clause_set();
        assert!(clauses.contains(clause::CS_ADJUNCTION));
    }

    #[test]
    fn positive_reduced_quotient_is_flagged() {
        let mut parts = x1().into_parts();
        parts.fol_sings[1].quotient = rat!(3);
        let m = parts.build().unwrap();
        let clauses = m.validate().clause_set();
        assert_eq!(
            clauses.into_iter().collect::<Vec<_>>(),
            vec![clause::REDUCED_QUOTIENT.to_string()]
        );
    }

    #[test]
    fn quotients_are_normalized_on_build() {
        let mut parts = x1().into_parts();
        parts.fol_sings[0].quotient = rat!(-1, 2);
        let m = parts.build().unwrap();
        assert_eq!(m.fol_sings()[0].quotient, rat!(-2));
        let rep = m.validate();
        assert_eq!(rep.clause_set().len(), 1);
        assert!(rep.clause_set().contains(clause::CS_PAIRING));
    }

    #[test]
    fn delta_flags() {
        let m = x1();
        let d = crate::divisor::QDivisor::from_pairs(vec![(CurveId::from("C2"), rat!(1))]);
        let rep = delta_validate(&m, &d).unwrap();
        assert!(rep.effective);
        assert!(!rep.fractional);
        assert!(!rep.no_invariant_component);
    }

    #[test]
    fn validate_is_input_order_independent() {
        let m = x1();
        let mut parts = m.clone().into_parts();
        parts.curves.reverse();
        parts.fol_sings.reverse();
        let m2 = parts.build().unwrap();
        assert_eq!(m, m2);
        assert_eq!(m.validate(), m2.validate());
    }
}
