//! Radical filtrations and triangular bases of each M(a).

use serde::Serialize;

use crate::certificate::Certificate;
use crate::linalg::{Matrix, Subspace};
use crate::presentation::{map_matrices, Presentation};
use crate::scalar::ExactScalar;

/// chain[i] spans rad(a,a)^i M(a); the last entry is zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Filtration {
    pub object: usize,
    pub chain: Vec<Subspace>,
}

impl Filtration {
    pub fn dims(&self) -> Vec<usize> {
        self.chain.iter().map(Subspace::dim).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TriangularBasis {
    pub object: usize,
    /// m_1, ..., m_d as coordinate columns in the original basis of M(a).
    pub vectors: Vec<Vec<ExactScalar>>,
}

impl TriangularBasis {
    pub fn d(&self) -> usize {
        self.vectors.len()
    }

    /// Change-of-basis matrix whose columns are the m_i.
    pub fn matrix(&self) -> Matrix {
        let field = self.vectors[0][0].field();
        Matrix::from_rows(field, self.vectors.clone()).transpose()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct TriangularSummary {
    pub object: String,
    pub dims: Vec<usize>,
    pub vectors: Vec<Vec<String>>,
}

pub fn radical_filtration(p: &Presentation, a: usize) -> Filtration {
    let d = p.dim(a);
    let gens = p.matrices(a, a);
    let mut chain = vec![Subspace::full(p.field, d)];
    while chain.last().unwrap().dim() > 0 {
        let last = chain.last().unwrap();
        let next = Subspace::span(
            p.field,
            d,
            last.basis().iter().flat_map(|v| gens.iter().map(move |g| g.mul_vec(v))),
        );
        if next.dim() == last.dim() {
            // not nilpotent; validate reports this
            break;
        }
        chain.push(next);
    }
    Filtration { object: a, chain }
}

pub fn triangular_basis(p: &Presentation, f: &Filtration) -> Result<TriangularBasis, Certificate> {
    let name = p.name(f.object).to_string();
    let d = p.dim(f.object);
    if d > 3 {
        return Err(Certificate::new("dimension", vec![name]).with_detail(format!("d = {d} exceeds 3")));
    }
    let dims = f.dims();
    if dims.last() != Some(&0) || dims.windows(2).any(|w| w[0] - w[1] != 1) {
        return Err(Certificate::new("dimension", vec![name])
            .with_detail(format!("radical filtration dimensions {dims:?} do not drop by one")));
    }
    let vectors = f
        .chain
        .windows(2)
        .map(|w| {
            w[0].basis()
                .iter()
                .find(|v| !w[1].contains(v))
                .expect("quotient of dimension one")
                .clone()
        })
        .collect();
    Ok(TriangularBasis { object: f.object, vectors })
}

/// Conjugate every rad matrix into m-coordinates and re-canonicalize the spans.
pub fn rebase(p: &Presentation, bases: &[TriangularBasis]) -> Presentation {
    let fwd: Vec<Matrix> = bases.iter().map(TriangularBasis::matrix).collect();
    let inv: Vec<Matrix> = fwd.iter().map(|m| m.inverse().expect("basis")).collect();
    map_matrices(p, |a, b, n| inv[b].mul(n).mul(&fwd[a])).canonicalize()
}

/// All filtrations and triangular bases; the first failing object stops with its certificate list.
pub fn triangular_bases(p: &Presentation) -> Result<Vec<TriangularBasis>, Vec<Certificate>> {
    let mut out = Vec::new();
    let mut certs = Vec::new();
    for a in 0..p.len() {
        match triangular_basis(p, &radical_filtration(p, a)) {
            Ok(t) => out.push(t),
            Err(c) => certs.push(c),
        }
    }
    if certs.is_empty() {
        Ok(out)
    } else {
        Err(certs)
    }
}
