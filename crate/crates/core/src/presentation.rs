//! Matrix presentations of a module: objects, dimensions, and radical hom-images.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{Matrix, Subspace};
use crate::scalar::{ExactScalar, Field, ScalarError};

#[derive(Debug, Error)]
pub enum PresentationError {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("matrix {index} of pair ({from}, {to}) has shape {rows}x{cols}, expected {exp_rows}x{exp_cols}")]
    DimensionMismatch {
        from: String,
        to: String,
        index: usize,
        rows: usize,
        cols: usize,
        exp_rows: usize,
        exp_cols: usize,
    },
    #[error("unknown object {0:?}")]
    UnknownObject(String),
    #[error("duplicate object name {0:?}")]
    DuplicateObject(String),
    #[error("duplicate pair ({0}, {1})")]
    DuplicatePair(String, String),
    #[error("object {0:?} has dimension 0")]
    ZeroDimension(String),
    #[error("entry {entry:?} in pair ({from}, {to}): {source}")]
    Entry { from: String, to: String, entry: String, source: ScalarError },
    #[error(transparent)]
    Field(#[from] ScalarError),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ObjectSpec {
    pub name: String,
    pub dim: usize,
}

/// Objects with dim M(a), and for each ordered pair a basis (or spanning set) of M(R(a,b)).
///
/// Matrices for the pair (a, b) are dim M(b) × dim M(a) and act on column vectors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Presentation {
    pub field: Field,
    pub objects: Vec<ObjectSpec>,
    pub rad: BTreeMap<(usize, usize), Vec<Matrix>>,
}

/// A space (V, h, X): X is a list of object indices (with repetition), h maps V into M(X).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpaceOnM {
    pub target: Vec<usize>,
    pub h: Matrix,
}

impl SpaceOnM {
    pub fn v_dim(&self) -> usize {
        self.h.cols()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ValidationIssue {
    Dependent { from: String, to: String },
    Closure { a: String, b: String, c: String, left: usize, right: usize },
    Nilpotency { object: String },
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub issues: Vec<ValidationIssue>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.issues.is_empty()
    }
}

impl Presentation {
    pub fn new(field: Field, objects: Vec<(&str, usize)>) -> Self {
        Presentation {
            field,
            objects: objects
                .into_iter()
                .map(|(n, d)| ObjectSpec { name: n.to_string(), dim: d })
                .collect(),
            rad: BTreeMap::new(),
        }
    }

    /// Builder used by fixtures: add integer matrices for a pair named by object names.
    pub fn with_ints(mut self, from: &str, to: &str, mats: &[&[&[i64]]]) -> Self {
        let (a, b) = (self.index(from).unwrap(), self.index(to).unwrap());
        let field = self.field;
        self.rad
            .entry((a, b))
            .or_default()
            .extend(mats.iter().map(|m| Matrix::from_ints(field, m)));
        self
    }

    pub fn with_matrices(mut self, from: usize, to: usize, mats: Vec<Matrix>) -> Self {
        self.rad.entry((from, to)).or_default().extend(mats);
        self
    }

    pub fn index(&self, name: &str) -> Option<usize> {
        self.objects.iter().position(|o| o.name == name)
    }

    pub fn name(&self, i: usize) -> &str {
        &self.objects[i].name
    }

    pub fn dim(&self, i: usize) -> usize {
        self.objects[i].dim
    }

    pub fn len(&self) -> usize {
        self.objects.len()
    }

    pub fn is_empty(&self) -> bool {
        self.objects.is_empty()
    }

    pub fn matrices(&self, a: usize, b: usize) -> &[Matrix] {
        self.rad.get(&(a, b)).map_or(&[], Vec::as_slice)
    }

    /// Span of M(R(a,b)) as vectorized d(b) × d(a) matrices.
    pub fn span(&self, a: usize, b: usize) -> Subspace {
        Subspace::span_matrices(self.field, self.dim(b), self.dim(a), self.matrices(a, b))
    }

    /// Same presentation with every spanning set replaced by its RREF basis.
    pub fn canonicalize(&self) -> Presentation {
        let mut rad = BTreeMap::new();
        for &(a, b) in self.rad.keys() {
            let mats = self.span(a, b).matrices(self.dim(b), self.dim(a));
            if !mats.is_empty() {
                rad.insert((a, b), mats);
            }
        }
        Presentation { field: self.field, objects: self.objects.clone(), rad }
    }

    /// Products N·K for K in rad(a,b), N in rad(b,c).
    pub fn products(&self, a: usize, b: usize, c: usize) -> Vec<Matrix> {
        let mut out = Vec::new();
        for n in self.matrices(b, c) {
            for k in self.matrices(a, b) {
                out.push(n.mul(k));
            }
        }
        out
    }

    pub fn validate(&self) -> ValidationReport {
        let mut issues = Vec::new();
        for (&(a, b), mats) in &self.rad {
            if self.span(a, b).dim() < mats.len() {
                issues.push(ValidationIssue::Dependent {
                    from: self.name(a).into(),
                    to: self.name(b).into(),
                });
            }
        }
        let n = self.len();
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    let target = self.span(a, c);
                    'outer: for (right, n_mat) in self.matrices(b, c).iter().enumerate() {
                        for (left, k_mat) in self.matrices(a, b).iter().enumerate() {
                            if !target.contains(n_mat.mul(k_mat).as_vec()) {
                                issues.push(ValidationIssue::Closure {
                                    a: self.name(a).into(),
                                    b: self.name(b).into(),
                                    c: self.name(c).into(),
                                    left,
                                    right,
                                });
                                break 'outer;
                            }
                        }
                    }
                }
            }
        }
        for a in 0..n {
            if !self.endo_nilpotent(a) {
                issues.push(ValidationIssue::Nilpotency { object: self.name(a).into() });
            }
        }
        ValidationReport { issues }
    }

    fn endo_nilpotent(&self, a: usize) -> bool {
        let gens = self.matrices(a, a);
        let d = self.dim(a);
        let mut power: Vec<Matrix> = gens.to_vec();
        // the k-th power of a nilpotent ideal in d×d matrices vanishes for k ≥ d
        for _ in 0..d {
            let s = Subspace::span_matrices(self.field, d, d, &power);
            if s.dim() == 0 {
                return true;
            }
            let basis = s.matrices(d, d);
            power = basis.iter().flat_map(|p| gens.iter().map(move |g| g.mul(p))).collect();
        }
        Subspace::span_matrices(self.field, d, d, &power).dim() == 0
    }

    pub fn parse(text: &str) -> Result<Presentation, PresentationError> {
        let doc: Document = serde_json::from_str(text).map_err(|e| PresentationError::Syntax {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        doc.into_presentation()
    }

    pub fn to_document(&self) -> Document {
        let field = FieldDoc::of(self.field);
        let rad = self
            .rad
            .iter()
            .filter(|(_, mats)| !mats.is_empty())
            .map(|(&(a, b), mats)| PairDoc {
                from: self.name(a).into(),
                to: self.name(b).into(),
                matrices: mats
                    .iter()
                    .map(|m| {
                        m.to_strings()
                            .into_iter()
                            .map(|r| r.into_iter().map(EntryDoc::Str).collect())
                            .collect()
                    })
                    .collect(),
            })
            .collect();
        Document { field, objects: self.objects.clone(), rad }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_document()).expect("serializable")
    }
}

// ---------------------------------------------------------------------------
// JSON document
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Document {
    pub field: FieldDoc,
    pub objects: Vec<ObjectSpec>,
    #[serde(default)]
    pub rad: Vec<PairDoc>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FieldDoc {
    Name(String),
    Prime {
        #[serde(rename = "Fp")]
        fp: u64,
    },
}

impl FieldDoc {
    pub fn of(field: Field) -> Self {
        match field {
            Field::Rational => FieldDoc::Name("Q".into()),
            Field::Prime(p) => FieldDoc::Prime { fp: p },
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PairDoc {
    pub from: String,
    pub to: String,
    pub matrices: Vec<Vec<Vec<EntryDoc>>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum EntryDoc {
    Int(i64),
    Str(String),
}

impl Document {
    pub fn into_presentation(self) -> Result<Presentation, PresentationError> {
        let field = match self.field {
            FieldDoc::Name(n) if n == "Q" => Field::Rational,
            FieldDoc::Name(n) => {
                return Err(PresentationError::Syntax {
                    line: 0,
                    column: 0,
                    message: format!("unknown field {n:?}"),
                })
            }
            FieldDoc::Prime { fp } => Field::prime(fp)?,
        };
        let mut names = BTreeSet::new();
        for o in &self.objects {
            if !names.insert(o.name.clone()) {
                return Err(PresentationError::DuplicateObject(o.name.clone()));
            }
            if o.dim == 0 {
                return Err(PresentationError::ZeroDimension(o.name.clone()));
            }
        }
        let mut p = Presentation { field, objects: self.objects, rad: BTreeMap::new() };
        for pair in self.rad {
            let a = p.index(&pair.from).ok_or_else(|| PresentationError::UnknownObject(pair.from.clone()))?;
            let b = p.index(&pair.to).ok_or_else(|| PresentationError::UnknownObject(pair.to.clone()))?;
            if p.rad.contains_key(&(a, b)) {
                return Err(PresentationError::DuplicatePair(pair.from, pair.to));
            }
            let (er, ec) = (p.dim(b), p.dim(a));
            let mut mats = Vec::new();
            for (index, m) in pair.matrices.into_iter().enumerate() {
                let rows = m.len();
                let cols = m.first().map_or(0, Vec::len);
                if rows != er || m.iter().any(|r| r.len() != ec) {
                    return Err(PresentationError::DimensionMismatch {
                        from: pair.from,
                        to: pair.to,
                        index,
                        rows,
                        cols,
                        exp_rows: er,
                        exp_cols: ec,
                    });
                }
                let mut data = Vec::with_capacity(er * ec);
                for e in m.into_iter().flatten() {
                    let text = match e {
                        EntryDoc::Int(i) => i.to_string(),
                        EntryDoc::Str(s) => s,
                    };
                    let v = field.parse_entry(&text).map_err(|source| PresentationError::Entry {
                        from: pair.from.clone(),
                        to: pair.to.clone(),
                        entry: text.clone(),
                        source,
                    })?;
                    data.push(v);
                }
                mats.push(Matrix::from_vec(field, er, ec, data));
            }
            p.rad.insert((a, b), mats);
        }
        Ok(p)
    }
}

/// Applies `f` to every rad matrix, e.g. for change of basis.
pub fn map_matrices<F>(p: &Presentation, mut f: F) -> Presentation
where
    F: FnMut(usize, usize, &Matrix) -> Matrix,
{
    let rad = p
        .rad
        .iter()
        .map(|(&(a, b), mats)| ((a, b), mats.iter().map(|m| f(a, b, m)).collect()))
        .collect();
    Presentation { field: p.field, objects: p.objects.clone(), rad }
}

pub fn entry(field: Field, text: &str) -> ExactScalar {
    field.parse_entry(text).expect("valid entry")
}
