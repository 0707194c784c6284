//! The built-in document corpus: every named model rendered as a JSON
//! document, plus one deliberately broken document for exercising the
//! validation gate.

use std::fs;
use std::io;
use std::path::Path;

use foliation_core::corpus;
use foliation_core::divisor::QDivisor;
use foliation_core::model::{CurveId, SurfaceModel};
use foliation_core::rat;
use foliation_core::Rat;
use serde_json::json;

use crate::doc::SurfaceDocument;

/// A divisor with degree one against every curve, solved exactly from the
/// full Gram matrix. Models whose Gram matrix is singular have no such
/// divisor supported on the marked curves.
pub fn uniform_ample(m: &SurfaceModel) -> Option<QDivisor> {
    let ids: Vec<CurveId> = m.curves().iter().map(|c| c.id.clone()).collect();
    if ids.is_empty() {
        return None;
    }
    let gram = m.gram(&ids).ok()?;
    let rhs = vec![Rat::one(); ids.len()];
    let coefs = gram.solve(&rhs).ok()?;
    let mut d = QDivisor::zero();
    for (id, a) in ids.into_iter().zip(coefs) {
        if !a.is_zero() {
            d.add_term(id, a);
        }
    }
    Some(d)
}

fn entry(name: &str, m: &SurfaceModel, big: bool, delta: Option<QDivisor>) -> (String, SurfaceDocument) {
    let mut doc = SurfaceDocument::from_model(m.clone(), big);
    doc.metadata.insert("name".to_string(), json!(name));
    if let Some(d) = delta {
        doc.set_divisor("delta", &d);
    }
    if let Some(a) = uniform_ample(m) {
        doc.set_divisor("ample", &a);
    }
    (name.to_string(), doc)
}

/// Document with one contact-sum incidence bumped off its valid value, so
/// validation reports the adjunction clause.
fn bad_cs_document() -> (String, SurfaceDocument) {
    let mut parts = corpus::x3().into_parts();
    let sing = parts
        .fol_sings
        .iter_mut()
        .find(|s| s.id.as_str() == "Cp2")
        .expect("x3 has a singularity Cp2");
    sing.incidences[0].cs = &sing.incidences[0].cs + &rat!(1);
    let m = SurfaceModel::build(parts).expect("the bump keeps the model assemblable");
    let mut doc = SurfaceDocument::from_model(m, false);
    doc.metadata.insert("name".to_string(), json!("bad-cs"));
    doc.metadata.insert(
        "note".to_string(),
        json!("one contact sum is off by one; validation must fail"),
    );
    ("bad-cs".to_string(), doc)
}

pub fn corpus_documents() -> Vec<(String, SurfaceDocument)> {
    let (gallery_model, gallery_delta) = corpus::gallery();
    vec![
        entry("x1", &corpus::x1(), false, None),
        entry("x3", &corpus::x3(), true, None),
        entry("single-minus-two", &corpus::single_minus_two(), true, None),
        entry("nef-model", &corpus::nef_model(), true, None),
        entry(
            "x3-with-tail",
            &corpus::x3_with_tail(),
            true,
            Some(QDivisor::single("W".into(), rat!(1, 3))),
        ),
        entry("nodal", &corpus::nodal_model(), true, None),
        entry("cycle", &corpus::cycle_model(), true, None),
        entry("two-cycle", &corpus::two_cycle(), true, None),
        entry(
            "tail-cluster",
            &corpus::tail_cluster(),
            true,
            Some(QDivisor::single("W".into(), rat!(1, 2))),
        ),
        entry("gallery", &gallery_model, true, Some(gallery_delta)),
        bad_cs_document(),
    ]
}

/// Writes every corpus document into `dir` as `{name}.json` and returns the
/// written file names in order.
pub fn write_corpus(dir: &Path) -> io::Result<Vec<String>> {
    fs::create_dir_all(dir)?;
    let mut names = Vec::new();
    for (name, doc) in corpus_documents() {
        let file = format!("{name}.json");
        fs::write(dir.join(&file), doc.to_json())?;
        names.push(file);
    }
    Ok(names)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn corpus_documents_round_trip_and_rebuild() {
        for (name, doc) in corpus_documents() {
            let text = doc.to_json();
            let back: SurfaceDocument = serde_json::from_str(&text).unwrap();
            assert_eq!(back, doc, "{name} must round-trip");
            assert_eq!(back.to_json(), text, "{name} must be byte-stable");
            back.to_model().unwrap_or_else(|e| panic!("{name} must assemble: {e}"));
        }
    }

    #[test]
    fn only_the_broken_document_fails_validation() {
        for (name, doc) in corpus_documents() {
            let m = doc.to_model().unwrap();
            let rep = m.validate();
            if name == "bad-cs" {
                assert!(!rep.is_valid());
                assert!(rep
                    .clause_set()
                    .contains(foliation_core::model::clause::CS_ADJUNCTION));
            } else {
                assert!(rep.is_valid(), "{name}: {:?}", rep.violations);
            }
        }
    }

    #[test]
    fn uniform_ample_has_degree_one_everywhere() {
        let m = corpus::x3_with_tail();
        let a = uniform_ample(&m).expect("nonsingular Gram matrix");
        for c in m.curves() {
            assert_eq!(a.dot_curve(&m, &c.id).unwrap(), Rat::one());
        }
    }

    #[test]
    fn cycle_models_have_no_uniform_ample_divisor() {
        assert!(uniform_ample(&corpus::cycle_model()).is_none());
        assert!(uniform_ample(&corpus::two_cycle()).is_none());
        assert!(uniform_ample(&corpus::gallery().0).is_none());
    }
}
