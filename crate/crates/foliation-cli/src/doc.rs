//! Versioned JSON schema for surface documents: the combinatorial model,
//! named divisors, and the pseudoeffectivity and bigness assertions.
//! Rationals travel as "p/q" strings or bare integers and round-trip
//! exactly.

use std::collections::BTreeMap;
use std::path::Path;

use foliation_core::divisor::QDivisor;
use foliation_core::model::{
    AmbientSingularity, Curve, CurveId, FoliationSingularity, ModelError, ModelParts, SurfaceModel,
};
use foliation_core::Rat;
use serde::{Deserialize, Serialize};

pub const SCHEMA_VERSION: &str = "1";

fn default_true() -> bool {
    true
}

fn is_true(v: &bool) -> bool {
    *v
}

fn is_false(v: &bool) -> bool {
    !*v
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SurfaceDocument {
    pub schema_version: String,
    pub model: DocumentModel,
    /// Named rational divisors on the marked curves. The analysis
    /// commands read the boundary from "delta" and the perturbation
    /// direction from "ample".
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub divisors: BTreeMap<String, BTreeMap<CurveId, Rat>>,
    #[serde(default)]
    pub assertions: Assertions,
    #[serde(default, skip_serializing_if = "serde_json::Map::is_empty")]
    pub metadata: serde_json::Map<String, serde_json::Value>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Assertions {
    /// The adjoint divisor of the described foliation is pseudoeffective.
    #[serde(default)]
    pub pseudoeffective: bool,
    /// The positive part of its decomposition is big.
    #[serde(default)]
    pub big: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DocumentModel {
    pub curves: Vec<DocCurve>,
    /// Off-diagonal intersection numbers; unlisted pairs are zero.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub intersections: Vec<(CurveId, CurveId, Rat)>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub foliation_singularities: Vec<FoliationSingularity>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub ambient_singularities: Vec<AmbientSingularity>,
    pub ambient_smooth: bool,
}

/// A curve as written in a document. The canonical degree is derived from
/// the Euler characteristic and the self-intersection on load, so it never
/// appears on disk.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DocCurve {
    pub id: CurveId,
    pub self_int: Rat,
    pub chi: Rat,
    #[serde(default = "default_true", skip_serializing_if = "is_true")]
    pub invariant: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tang: Option<Rat>,
    #[serde(default, skip_serializing_if = "is_false")]
    pub nodal: bool,
}

#[derive(Debug, thiserror::Error)]
pub enum LoadError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("parse error in {path}: {source}")]
    Parse {
        path: String,
        source: serde_json::Error,
    },
    #[error("{path} declares schema version {found:?}; this build reads version {SCHEMA_VERSION:?}")]
    Schema { path: String, found: String },
}

pub fn load_document(path: &Path) -> Result<SurfaceDocument, LoadError> {
    let name = path.display().to_string();
    let text = std::fs::read_to_string(path).map_err(|source| LoadError::Io {
        path: name.clone(),
        source,
    })?;
    let doc: SurfaceDocument =
        serde_json::from_str(&text).map_err(|source| LoadError::Parse {
            path: name.clone(),
            source,
        })?;
    if doc.schema_version != SCHEMA_VERSION {
        return Err(LoadError::Schema {
            path: name,
            found: doc.schema_version,
        });
    }
    Ok(doc)
}

impl SurfaceDocument {
    pub fn from_model(m: SurfaceModel, big: bool) -> SurfaceDocument {
        let pseudoeffective = m.pseudoeffective_assertion();
        let parts = m.into_parts();
        SurfaceDocument {
            schema_version: SCHEMA_VERSION.to_string(),
            model: DocumentModel {
                curves: parts
                    .curves
                    .into_iter()
                    .map(|c| DocCurve {
                        id: c.id,
                        self_int: c.self_int,
                        chi: c.chi,
                        invariant: c.invariant,
                        tang: c.tang,
                        nodal: c.nodal,
                    })
                    .collect(),
                intersections: parts.intersections,
                foliation_singularities: parts.fol_sings,
                ambient_singularities: parts.amb_sings,
                ambient_smooth: parts.ambient_smooth,
            },
            divisors: BTreeMap::new(),
            assertions: Assertions {
                pseudoeffective,
                big,
            },
            metadata: serde_json::Map::new(),
        }
    }

    pub fn to_model(&self) -> Result<SurfaceModel, ModelError> {
        let curves = self
            .model
            .curves
            .iter()
            .map(|c| Curve {
                id: c.id.clone(),
                self_int: c.self_int.clone(),
                chi: c.chi.clone(),
                kx_dot: -&(&c.chi + &c.self_int),
                invariant: c.invariant,
                tang: c.tang.clone(),
                nodal: c.nodal,
            })
            .collect();
        SurfaceModel::build(ModelParts {
            curves,
            intersections: self.model.intersections.clone(),
            fol_sings: self.model.foliation_singularities.clone(),
            amb_sings: self.model.ambient_singularities.clone(),
            ambient_smooth: self.model.ambient_smooth,
            pseudoeffective: self.assertions.pseudoeffective,
        })
    }

    pub fn divisor(&self, name: &str) -> Option<QDivisor> {
        self.divisors.get(name).map(|entries| {
            QDivisor::from_pairs(entries.iter().map(|(id, a)| (id.clone(), a.clone())))
        })
    }

    pub fn set_divisor(&mut self, name: &str, d: &QDivisor) {
        self.divisors.insert(
            name.to_string(),
            d.iter().map(|(id, a)| (id.clone(), a.clone())).collect(),
        );
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("document serializes");
        s.push('\n');
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use foliation_core::corpus;

    #[test]
    fn documents_round_trip_through_json() {
        let doc = SurfaceDocument::from_model(corpus::x3(), true);
        let text = doc.to_json();
        let back: SurfaceDocument = serde_json::from_str(&text).unwrap();
        assert_eq!(back, doc);
        assert_eq!(back.to_json(), text);
    }

    #[test]
    fn loaded_documents_rebuild_the_exact_model() {
        for m in [
            corpus::x1(),
            corpus::x3(),
            corpus::nef_model(),
            corpus::x3_with_tail(),
        ] {
            let doc = SurfaceDocument::from_model(m.clone(), false);
            assert_eq!(doc.to_model().unwrap(), m);
        }
    }

    #[test]
    fn unknown_fields_are_rejected() {
        let doc = SurfaceDocument::from_model(corpus::x3(), false);
        let mut v: serde_json::Value = serde_json::from_str(&doc.to_json()).unwrap();
        v.as_object_mut()
            .unwrap()
            .insert("surprise".to_string(), serde_json::json!(1));
        let text = serde_json::to_string(&v).unwrap();
        assert!(serde_json::from_str::<SurfaceDocument>(&text).is_err());
    }

    #[test]
    fn divisors_round_trip() {
        let mut doc = SurfaceDocument::from_model(corpus::x3(), false);
        let d = QDivisor::from_pairs([
            (CurveId::from("C1"), Rat::new(2, 3)),
            (CurveId::from("C2"), Rat::new(1, 3)),
        ]);
        doc.set_divisor("delta", &d);
        let back: SurfaceDocument = serde_json::from_str(&doc.to_json()).unwrap();
        assert_eq!(back.divisor("delta"), Some(d));
        assert_eq!(back.divisor("absent"), None);
    }
}
