//! Re-ingesting a basis (normalize output or hand-built) and checking it without synthesis.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::basis::{ClassifiedBasis, ConditionReport, Mode, Morphism, MultiplicativeReport};
use crate::classify::{is_short, BasisMorphism, MorphismKind, Step};
use crate::linalg::{Matrix, Subspace};
use crate::monomial::{RadMonomial, Scale};
use crate::presentation::{Document, FieldDoc, PresentationError};
use crate::scalar::{ExactScalar, Field};
use crate::triangular::{rebase, TriangularBasis};

#[derive(Debug, Error)]
pub enum VerifyError {
    #[error(transparent)]
    Presentation(#[from] PresentationError),
    #[error("unknown object {0:?}")]
    UnknownObject(String),
    #[error("bad entry {0:?}")]
    Entry(String),
    #[error("{0}")]
    Shape(String),
    #[error("vectors of {0} are not a basis")]
    Singular(String),
    #[error("radical of {0} does not act strictly lower triangularly in the given vectors")]
    NotTriangular(String),
    #[error("morphisms {from}->{to}: {message}")]
    Span { from: String, to: String, message: String },
}

#[derive(Debug, Clone, Deserialize)]
pub struct VectorInput {
    pub object: String,
    pub vectors: Vec<Vec<String>>,
    #[serde(default)]
    pub scales: Vec<Scale>,
}

#[derive(Debug, Clone, Deserialize)]
pub struct MorphismInput {
    pub from: String,
    pub to: String,
    pub matrix: Vec<Vec<String>>,
    #[serde(default)]
    pub positions: Option<Vec<Step>>,
    #[serde(default)]
    pub parameter: Option<Scale>,
    #[serde(default)]
    pub scale: Option<Scale>,
}

/// A basis to check: the presentation, optional vectors (columns in its coordinates), and
/// morphism matrices in the coordinates of those vectors.
#[derive(Debug, Clone, Deserialize)]
pub struct BasisDocument {
    pub presentation: Document,
    #[serde(default)]
    pub mode: Option<Mode>,
    #[serde(default)]
    pub vectors: Vec<VectorInput>,
    pub morphisms: Vec<MorphismInput>,
    #[serde(default)]
    pub excluded: Vec<MorphismInput>,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerificationReport {
    pub conditions: ConditionReport,
    pub multiplicative: MultiplicativeReport,
    pub accepted: bool,
}

pub fn verify_basis(b: &ClassifiedBasis) -> VerificationReport {
    VerificationReport {
        conditions: b.check_conditions(),
        multiplicative: b.verify_multiplicative(),
        accepted: b.accepted(),
    }
}

fn parse_matrix(field: Field, rows: &[Vec<String>]) -> Result<Matrix, VerifyError> {
    let data = rows
        .iter()
        .map(|r| {
            r.iter()
                .map(|e| field.parse_entry(e).map_err(|_| VerifyError::Entry(e.clone())))
                .collect::<Result<Vec<_>, _>>()
        })
        .collect::<Result<Vec<_>, _>>()?;
    if data.iter().any(|r| r.len() != data.first().map_or(0, Vec::len)) {
        return Err(VerifyError::Shape("ragged matrix".into()));
    }
    Ok(Matrix::from_rows(field, data))
}

fn scale_of(s: &ExactScalar, one: &Scale) -> Scale {
    if s.is_one() {
        one.clone()
    } else {
        Scale::from_scalar(s).expect("nonzero entry")
    }
}

pub fn basis_from_document(doc: BasisDocument) -> Result<ClassifiedBasis, VerifyError> {
    let p = doc.presentation.into_presentation()?;
    let field = p.field;
    let mode = doc.mode.unwrap_or(Mode::Numeric);
    let one = if mode == Mode::Symbolic { Scale::Mono(RadMonomial::one()) } else { Scale::one_for(field) };
    let object = |name: &str| p.index(name).ok_or_else(|| VerifyError::UnknownObject(name.into()));

    let mut bases: Vec<TriangularBasis> = (0..p.len())
        .map(|a| TriangularBasis {
            object: a,
            vectors: (0..p.dim(a))
                .map(|i| (0..p.dim(a)).map(|r| if r == i { field.one() } else { field.zero() }).collect())
                .collect(),
        })
        .collect();
    let mut vector_scales: Vec<Vec<Scale>> = (0..p.len()).map(|a| vec![one.clone(); p.dim(a)]).collect();
    for v in &doc.vectors {
        let a = object(&v.object)?;
        let cols = v
            .vectors
            .iter()
            .map(|c| c.iter().map(|e| field.parse_entry(e).map_err(|_| VerifyError::Entry(e.clone()))).collect())
            .collect::<Result<Vec<Vec<ExactScalar>>, _>>()?;
        let d = p.dim(a);
        if cols.len() != d || cols.iter().any(|c| c.len() != d) {
            return Err(VerifyError::Shape(format!("{} needs {d} vectors of length {d}", v.object)));
        }
        let tb = TriangularBasis { object: a, vectors: cols };
        if tb.matrix().inverse().is_none() {
            return Err(VerifyError::Singular(v.object.clone()));
        }
        bases[a] = tb;
        if !v.scales.is_empty() {
            if v.scales.len() != d {
                return Err(VerifyError::Shape(format!("{} needs {d} scales", v.object)));
            }
            vector_scales[a] = v.scales.clone();
        }
    }
    let q = rebase(&p, &bases);
    for a in 0..q.len() {
        if q.matrices(a, a).iter().any(|m| m.support().iter().any(|&(r, c)| r <= c)) {
            return Err(VerifyError::NotTriangular(q.name(a).into()));
        }
    }

    let build = |input: &MorphismInput| -> Result<Morphism, VerifyError> {
        let (a, b) = (object(&input.from)?, object(&input.to)?);
        let matrix = parse_matrix(field, &input.matrix)?;
        if matrix.shape() != (q.dim(b), q.dim(a)) {
            return Err(VerifyError::Shape(format!(
                "morphism {}->{} must be {}x{}",
                input.from,
                input.to,
                q.dim(b),
                q.dim(a)
            )));
        }
        let support: Vec<Step> = matrix.support().into_iter().map(|(r, c)| Step::new(r, c)).collect();
        if support.is_empty() {
            return Err(VerifyError::Span { from: input.from.clone(), to: input.to.clone(), message: "zero morphism".into() });
        }
        let positions = input.positions.clone().unwrap_or_else(|| support.clone());
        if positions.iter().any(|s| !support.contains(s)) || positions.len() != support.len() {
            return Err(VerifyError::Shape(format!("positions of {}->{} do not match the support", input.from, input.to)));
        }
        let entry = |s: &Step| matrix.get(s.row, s.col).clone();
        let kind = if positions.len() == 2 { MorphismKind::Double } else { MorphismKind::Prime };
        let numeric = (positions.len() == 2).then(|| entry(&positions[1]).div(&entry(&positions[0])).unwrap());
        let parameter = match (&input.parameter, &numeric) {
            (Some(s), _) => s.clone(),
            (None, Some(l)) => scale_of(l, &one),
            (None, None) => one.clone(),
        };
        let scale = input.scale.clone().unwrap_or_else(|| scale_of(&entry(&positions[0]), &one));
        let short = is_short(&q, &matrix, a, b);
        Ok(Morphism {
            base: BasisMorphism { from: a, to: b, matrix, kind, positions, parameter: numeric, short },
            parameter,
            scale,
        })
    };
    let morphisms = doc.morphisms.iter().map(build).collect::<Result<Vec<_>, _>>()?;
    let excluded = doc.excluded.iter().map(build).collect::<Result<Vec<_>, _>>()?;

    let mut by_pair: BTreeMap<(usize, usize), Vec<&Matrix>> = BTreeMap::new();
    for m in &morphisms {
        by_pair.entry((m.from(), m.to())).or_default().push(&m.base.matrix);
    }
    for a in 0..q.len() {
        for b in 0..q.len() {
            let span = q.span(a, b);
            let given = by_pair.get(&(a, b)).cloned().unwrap_or_default();
            let got = Subspace::span_matrices(field, q.dim(b), q.dim(a), given.iter().copied());
            let err = |message: String| VerifyError::Span { from: q.name(a).into(), to: q.name(b).into(), message };
            if got.dim() != given.len() {
                return Err(err("morphisms are linearly dependent".into()));
            }
            if got != span {
                return Err(err(format!("morphisms span dimension {} but the radical image has dimension {}", got.dim(), span.dim())));
            }
        }
    }
    for m in &excluded {
        if !q.span(m.from(), m.to()).contains(m.base.matrix.as_vec()) {
            return Err(VerifyError::Span {
                from: q.name(m.from()).into(),
                to: q.name(m.to()).into(),
                message: "excluded morphism outside the radical image".into(),
            });
        }
    }
    Ok(ClassifiedBasis {
        presentation: q,
        bases,
        endo: Vec::new(),
        homs: BTreeMap::new(),
        morphisms,
        excluded,
        vector_scales,
        mode,
        notices: Vec::new(),
    })
}

/// Parses a JSON basis document and checks it, optionally reading its entries over `field`.
pub fn verify_document(text: &str, field: Option<Field>) -> Result<(ClassifiedBasis, VerificationReport), VerifyError> {
    let syntax = |e: serde_json::Error| {
        VerifyError::Presentation(PresentationError::Syntax { line: e.line(), column: e.column(), message: e.to_string() })
    };
    let mut value: serde_json::Value = serde_json::from_str(text).map_err(syntax)?;
    // a normalize report carries the basis under "final"
    if let Some(f) = value.get_mut("final") {
        value = f.take();
    }
    let mut doc: BasisDocument = serde_json::from_value(value).map_err(syntax)?;
    if let Some(f) = field {
        doc.presentation.field = FieldDoc::of(f);
    }
    let b = basis_from_document(doc)?;
    let r = verify_basis(&b);
    Ok((b, r))
}

#[cfg(test)]
mod tests {
    use super::*;

    const PRES: &str = r#"{"field": "Q", "objects": [{"name": "a", "dim": 2}, {"name": "b", "dim": 2}],
        "rad": [{"from": "a", "to": "a", "matrices": [[[0, 0], [1, 0]]]},
                {"from": "b", "to": "b", "matrices": [[[0, 0], [1, 0]]]},
                {"from": "a", "to": "b", "matrices": [[[1, 0], [0, 3]], [[0, 0], [1, 0]]]}]}"#;

    fn doc(morphisms: &str, extra: &str) -> String {
        format!(r#"{{"presentation": {PRES}, "morphisms": {morphisms}{extra}}}"#)
    }

    const CHAIN: &str = r#"{"from": "a", "to": "a", "matrix": [["0", "0"], ["1", "0"]]},
        {"from": "b", "to": "b", "matrix": [["0", "0"], ["1", "0"]]},
        {"from": "a", "to": "b", "matrix": [["0", "0"], ["1", "0"]]}"#;

    #[test]
    fn unscaled_double_is_not_multiplicative() {
        let text = doc(&format!(r#"[{CHAIN}, {{"from": "a", "to": "b", "matrix": [["1", "0"], ["0", "3"]]}}]"#), "");
        let (b, r) = verify_document(&text, None).unwrap();
        assert_eq!(b.rank(), 2);
        assert!(!r.accepted);
        assert!(r.conditions.b.pass && r.conditions.d.pass);
    }

    #[test]
    fn rescaled_vectors_accept() {
        let scales = r#", "vectors": [{"object": "a", "vectors": [["1", "0"], ["0", "1"]], "scales": ["+1", "+3^{1}"]}]"#;
        let double = r#"{"from": "a", "to": "b", "matrix": [["1", "0"], ["0", "3"]]}"#;
        let chain = r#"{"from": "a", "to": "a", "matrix": [["0", "0"], ["1", "0"]], "scale": "+3^{-1}"},
            {"from": "b", "to": "b", "matrix": [["0", "0"], ["1", "0"]]},
            {"from": "a", "to": "b", "matrix": [["0", "0"], ["1", "0"]]}"#;
        let (_, r) = verify_document(&doc(&format!("[{chain}, {double}]"), scales), None).unwrap();
        assert!(r.accepted, "{:?}", r.multiplicative);
    }

    #[test]
    fn missing_morphism_is_a_span_error() {
        let err = verify_document(&doc(&format!("[{CHAIN}]"), ""), None).unwrap_err();
        assert!(matches!(err, VerifyError::Span { .. }), "{err}");
    }

    #[test]
    fn dependent_morphisms() {
        let dup = r#"{"from": "a", "to": "b", "matrix": [["0", "0"], ["2", "0"]]}"#;
        let err = verify_document(&doc(&format!("[{CHAIN}, {dup}]"), ""), None).unwrap_err();
        assert!(err.to_string().contains("dependent"), "{err}");
    }

    #[test]
    fn non_triangular_vectors() {
        let swap = r#", "vectors": [{"object": "a", "vectors": [["0", "1"], ["1", "0"]]}]"#;
        let err = verify_document(&doc(&format!("[{CHAIN}]"), swap), None).unwrap_err();
        assert!(matches!(err, VerifyError::NotTriangular(_)), "{err}");
    }
}
