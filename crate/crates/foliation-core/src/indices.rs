//! Foliation intersection numbers and the extremal-candidate checklist.

use serde::{Deserialize, Serialize};

use crate::divisor::QDivisor;
use crate::model::{CurveId, ModelError, SingKind, SurfaceModel};
use crate::rational::Rat;

/// Which adjunction identity produced kf_dot for this curve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SourceFormula {
    #[serde(rename = "Lemma2.3")]
    Tangency,
    #[serde(rename = "Lemma2.4")]
    IndexSum,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndexReport {
    pub curve: CurveId,
    pub kf_dot: Rat,
    pub kfd_dot: Rat,
    pub z_total: Rat,
    pub cs_total: Rat,
    pub source_formula: SourceFormula,
}

/// K_F . C from the adjunction identity matching the curve's invariance.
pub fn kf_dot(m: &SurfaceModel, id: &CurveId) -> Result<Rat, ModelError> {
    let c = m.curve(id)?;
    if c.invariant {
        Ok(-&c.chi + m.z_total(id))
    } else {
        let tang = c.tang.clone().expect("non-invariant curve stores tangency");
        Ok(-&c.self_int + tang)
    }
}

/// (K_F + Delta) . C.
pub fn kfd_dot(m: &SurfaceModel, delta: &QDivisor, id: &CurveId) -> Result<Rat, ModelError> {
    Ok(kf_dot(m, id)? + delta.dot_curve(m, id)?)
}

pub fn index_report(
    m: &SurfaceModel,
    delta: &QDivisor,
    id: &CurveId,
) -> Result<IndexReport, ModelError> {
    let c = m.curve(id)?;
    Ok(IndexReport {
        curve: id.clone(),
        kf_dot: kf_dot(m, id)?,
        kfd_dot: kfd_dot(m, delta, id)?,
        z_total: m.z_total(id),
        cs_total: m.cs_total(id),
        source_formula: if c.invariant {
            SourceFormula::IndexSum
        } else {
            SourceFormula::Tangency
        },
    })
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum IndexError {
    #[error("orbifold order {0} is below 2")]
    BadOrder(u64),
}

/// Euler characteristic of a smooth rational curve through cyclic quotient
/// points of the given orders.
pub fn orbifold_chi(orders: &[u64]) -> Result<Rat, IndexError> {
    let mut chi = Rat::int(2);
    for &r in orders {
        if r < 2 {
            return Err(IndexError::BadOrder(r));
        }
        chi += Rat::new(1, r as i64) - Rat::one();
    }
    Ok(chi)
}

/// Outcome of the necessary-condition checklist for a negative extremal
/// contraction candidate. `failed` lists the violated conditions as rule
/// codes, in checklist order; `conditional` records that the caller could
/// not certify the divisorial-base-locus hypothesis the checklist presumes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CandidateReport {
    pub curve: CurveId,
    pub accepted: bool,
    pub conditional: bool,
    pub failed: Vec<String>,
}

pub fn extremal_candidate(
    m: &SurfaceModel,
    delta: &QDivisor,
    id: &CurveId,
    delta_wedge_certified: bool,
) -> Result<CandidateReport, ModelError> {
    let c = m.curve(id)?;
    let mut failed = Vec::new();

    if !kfd_dot(m, delta, id)?.is_negative() {
        failed.push("negativity".to_string());
    }
    if !c.self_int.is_negative() {
        failed.push("self-intersection".to_string());
    }
    if !m.is_smooth_rational(id) {
        failed.push("Lemma 3.1(1)".to_string());
    }
    if !c.invariant {
        failed.push("Lemma 3.1(2)".to_string());
    }
    let sings = m.sings_on(id);
    if m.z_total(id) != Rat::one() || sings.len() != 1 {
        failed.push("Lemma 3.1(3)".to_string());
    } else {
        let s = sings[0];
        let negative_rational = s.kind == SingKind::Reduced && s.quotient.is_negative();
        if !negative_rational {
            failed.push("Lemma 3.1(4)".to_string());
        }
    }
    if m.amb_on(id).len() > 1 {
        failed.push("Lemma 3.1(5)".to_string());
    }

    Ok(CandidateReport {
        curve: id.clone(),
        accepted: failed.is_empty(),
        conditional: !delta_wedge_certified,
        failed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Curve, FoliationSingularity, ModelParts, SingIncidence};
    use crate::model::{AmbientSingularity, AmbientId, SingId};
    use crate::rat;

    fn x1() -> SurfaceModel {
        let inv = |id: &str, self_int: i64, kx: i64| Curve {
            id: CurveId::from(id),
            self_int: rat!(self_int),
            chi: rat!(-kx - self_int),
            kx_dot: rat!(kx),
            invariant: true,
            tang: None,
            nodal: false,
        };
        let red = |id: &str, q: Rat, incs: Vec<(&str, Rat)>| FoliationSingularity {
            id: SingId::from(id),
            kind: SingKind::Reduced,
            quotient: q,
            incidences: incs
                .into_iter()
                .map(|(c, cs)| SingIncidence {
                    curve: CurveId::from(c),
                    z: rat!(1),
                    cs,
                    node: false,
                })
                .collect(),
        };
        ModelParts {
            curves: vec![inv("C1", -1, -1), inv("C2", -2, 0)],
            intersections: vec![(CurveId::from("C1"), CurveId::from("C2"), rat!(1))],
            fol_sings: vec![
                red("p", rat!(-1), vec![("C1", rat!(-1)), ("C2", rat!(-1))]),
                red("q", rat!(-1), vec![("C2", rat!(-1))]),
            ],
            amb_sings: vec![],
            ambient_smooth: true,
            pseudoeffective: true,
        }
        .build()
        .unwrap()
    }

    #[test]
    fn kf_dot_uses_matching_formula() {
        let m = x1();
        assert_eq!(kf_dot(&m, &CurveId::from("C1")).unwrap(), rat!(-1));
        assert_eq!(kf_dot(&m, &CurveId::from("C2")).unwrap(), rat!(0));

        let mut parts = m.into_parts();
        parts.curves.push(Curve {
            id: CurveId::from("T"),
            self_int: rat!(-3),
            chi: rat!(2),
            kx_dot: rat!(1),
            invariant: false,
            tang: Some(rat!(1)),
            nodal: false,
        });
        let m = parts.build().unwrap();
        assert_eq!(kf_dot(&m, &CurveId::from("T")).unwrap(), rat!(4));
        let rep = index_report(&m, &QDivisor::zero(), &CurveId::from("T")).unwrap();
        assert_eq!(rep.source_formula, SourceFormula::Tangency);
        assert_eq!(
            serde_json::to_value(rep.source_formula).unwrap(),
            serde_json::json!("Lemma2.3")
        );
    }

    #[test]
    fn kfd_dot_adds_boundary_pairing() {
        let m = x1();
        let c1 = CurveId::from("C1");
        assert_eq!(
            kfd_dot(&m, &QDivisor::zero(), &c1).unwrap(),
            kf_dot(&m, &c1).unwrap()
        );
        let delta = QDivisor::single(CurveId::from("C2"), rat!(1, 2));
        assert_eq!(kfd_dot(&m, &delta, &c1).unwrap(), rat!(-1, 2));
        let away = QDivisor::single(CurveId::from("C2"), rat!(1, 2));
        let c2_dot = kfd_dot(&m, &away, &CurveId::from("C2")).unwrap();
        assert_eq!(c2_dot, kf_dot(&m, &CurveId::from("C2")).unwrap() - rat!(1));
    }

    #[test]
    fn orbifold_chi_values() {
        assert_eq!(orbifold_chi(&[]).unwrap(), rat!(2));
        assert_eq!(orbifold_chi(&[2]).unwrap(), rat!(3, 2));
        assert_eq!(orbifold_chi(&[2, 2]).unwrap(), rat!(1));
        assert_eq!(orbifold_chi(&[1]), Err(IndexError::BadOrder(1)));
    }

    #[test]
    fn candidate_checklist_on_x1() {
        let m = x1();
        let rep = extremal_candidate(&m, &QDivisor::zero(), &CurveId::from("C1"), true).unwrap();
        assert!(rep.accepted, "{:?}", rep.failed);
        assert!(!rep.conditional);

        let rep = extremal_candidate(&m, &QDivisor::zero(), &CurveId::from("C2"), true).unwrap();
        assert!(!rep.accepted);
        assert_eq!(rep.failed, vec!["negativity", "Lemma 3.1(3)"]);
    }

    #[test]
    fn candidate_rejects_non_invariant() {
        let mut parts = x1().into_parts();
        parts.curves.push(Curve {
            id: CurveId::from("T"),
            self_int: rat!(-2),
            chi: rat!(2),
            kx_dot: rat!(0),
            invariant: false,
            tang: Some(rat!(1)),
            nodal: false,
        });
        let m = parts.build().unwrap();
        let rep = extremal_candidate(&m, &QDivisor::zero(), &CurveId::from("T"), false).unwrap();
        assert!(!rep.accepted);
        assert!(rep.conditional);
        assert!(rep.failed.contains(&"Lemma 3.1(2)".to_string()));
        assert!(rep.failed.contains(&"Lemma 3.1(3)".to_string()));
    }

    #[test]
    fn candidate_counts_ambient_points() {
        let mut parts = x1().into_parts();
        parts.ambient_smooth = false;
        parts.amb_sings = vec![
            AmbientSingularity {
                id: AmbientId::from("s1"),
                order: 2,
                on_curves: vec![CurveId::from("C1")],
            },
            AmbientSingularity {
                id: AmbientId::from("s2"),
                order: 3,
                on_curves: vec![CurveId::from("C1")],
            },
        ];
        parts.curves[0].chi = rat!(2) + rat!(1, 2) - rat!(1) + rat!(1, 3) - rat!(1);
        parts.curves[0].kx_dot = -&parts.curves[0].chi - rat!(-1);
        let m = parts.build().unwrap();
        let rep = extremal_candidate(&m, &QDivisor::zero(), &CurveId::from("C1"), true).unwrap();
        // Two ambient points force kf_dot >= 0 for a Z=1 smooth rational
        // curve, so the negativity gate fails alongside the point count.
        assert_eq!(rep.failed, vec!["negativity", "Lemma 3.1(5)"]);
    }
}
