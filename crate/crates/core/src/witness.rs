//! Infinite families of pairwise nonisomorphic spaces and a desk-scale isomorphism solver.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::linalg::Matrix;
use crate::presentation::{Presentation, SpaceOnM};
use crate::scalar::{ExactScalar, Field};

pub const MAX_V_DIM: usize = 10;
pub const MAX_M_DIM: usize = 20;
const RETRIES: u64 = 5;
const EXHAUSTIVE_LIMIT: usize = 5;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WitnessError {
    #[error("context does not fit {kind}: {message}")]
    ContextMismatch { kind: String, message: String },
    #[error("space exceeds desk scale: dim V = {v_dim}, dim M(X) = {m_dim} (limits {MAX_V_DIM}, {MAX_M_DIM})")]
    ScaleExceeded { v_dim: usize, m_dim: usize },
    #[error("targets {0:?} and {1:?} are not the same multiset")]
    TargetMismatch(Vec<String>, Vec<String>),
    #[error("unknown family {0:?}")]
    UnknownFamily(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FamilyKind {
    Lemma2,
    Lemma3,
    /// one-based layers (i of a, j of b)
    Lemma6(usize, usize),
    Lemma7Two,
    Lemma7Three,
    Lemma8Case1,
    Lemma8Case2,
}

impl FamilyKind {
    pub const ALL: [FamilyKind; 6] = [
        FamilyKind::Lemma2,
        FamilyKind::Lemma3,
        FamilyKind::Lemma7Two,
        FamilyKind::Lemma7Three,
        FamilyKind::Lemma8Case1,
        FamilyKind::Lemma8Case2,
    ];
}

impl fmt::Display for FamilyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FamilyKind::Lemma2 => write!(f, "lemma2"),
            FamilyKind::Lemma3 => write!(f, "lemma3"),
            FamilyKind::Lemma6(i, j) => write!(f, "lemma6({i},{j})"),
            FamilyKind::Lemma7Two => write!(f, "lemma7_two"),
            FamilyKind::Lemma7Three => write!(f, "lemma7_three"),
            FamilyKind::Lemma8Case1 => write!(f, "lemma8_case1"),
            FamilyKind::Lemma8Case2 => write!(f, "lemma8_case2"),
        }
    }
}

impl FromStr for FamilyKind {
    type Err = WitnessError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let kind = match s {
            "lemma2" => FamilyKind::Lemma2,
            "lemma3" => FamilyKind::Lemma3,
            "lemma6" => FamilyKind::Lemma6(3, 1),
            "lemma7_two" | "lemma7" => FamilyKind::Lemma7Two,
            "lemma7_three" => FamilyKind::Lemma7Three,
            "lemma8_case1" | "lemma8" => FamilyKind::Lemma8Case1,
            "lemma8_case2" => FamilyKind::Lemma8Case2,
            _ => {
                let inner = s
                    .strip_prefix("lemma6(")
                    .and_then(|r| r.strip_suffix(')'))
                    .ok_or_else(|| WitnessError::UnknownFamily(s.into()))?;
                let (i, j) = inner.split_once(',').ok_or_else(|| WitnessError::UnknownFamily(s.into()))?;
                let parse = |t: &str| t.trim().parse::<usize>().ok().filter(|v| (1..=3).contains(v));
                match (parse(i), parse(j)) {
                    (Some(i), Some(j)) => FamilyKind::Lemma6(i, j),
                    _ => return Err(WitnessError::UnknownFamily(s.into())),
                }
            }
        };
        Ok(kind)
    }
}

/// A family member: the matrix as printed (rows in layer order) and the space it defines.
#[derive(Debug, Clone)]
pub struct WitnessSpace {
    pub kind: FamilyKind,
    pub parameter: ExactScalar,
    pub printed: Matrix,
    /// (summand, zero-based layer) of each printed row
    pub rows: Vec<(usize, usize)>,
    pub space: SpaceOnM,
}

/// Objects of the context the family lives on, in the order the builder expects.
#[derive(Debug, Clone)]
pub struct WitnessContext {
    pub presentation: Presentation,
    pub objects: Vec<usize>,
}

fn ints(field: Field, rows: &[&[i64]]) -> Matrix {
    Matrix::from_ints(field, rows)
}

/// The default context presentation for a family, over `field`.
pub fn default_context(kind: FamilyKind, field: Field) -> WitnessContext {
    let lower3: &[&[&[i64]]] = &[
        &[&[0, 0, 0], &[1, 0, 0], &[0, 0, 0]],
        &[&[0, 0, 0], &[0, 0, 0], &[1, 0, 0]],
        &[&[0, 0, 0], &[0, 0, 0], &[0, 1, 0]],
    ];
    let lower2: &[&[&[i64]]] = &[&[&[0, 0], &[1, 0]]];
    let p = match kind {
        FamilyKind::Lemma2 => {
            let dbl: &[&[&[i64]]] = &[&[&[0, 0, 0], &[1, 0, 0], &[0, 1, 0]], &[&[0, 0, 0], &[0, 0, 0], &[1, 0, 0]]];
            let mut ab: Vec<&[&[i64]]> = vec![&[&[0, 1, 0], &[0, 0, 1], &[0, 0, 0]]];
            ab.extend_from_slice(&[
                &[&[1, 0, 0], &[0, 0, 0], &[0, 0, 0]],
                &[&[0, 0, 0], &[1, 0, 0], &[0, 0, 0]],
                &[&[0, 0, 0], &[0, 1, 0], &[0, 0, 0]],
                &[&[0, 0, 0], &[0, 0, 0], &[1, 0, 0]],
                &[&[0, 0, 0], &[0, 0, 0], &[0, 1, 0]],
                &[&[0, 0, 0], &[0, 0, 0], &[0, 0, 1]],
            ]);
            Presentation::new(field, vec![("a", 3), ("b", 3)])
                .with_ints("a", "a", dbl)
                .with_ints("b", "b", dbl)
                .with_ints("a", "b", &ab)
        }
        FamilyKind::Lemma3 => Presentation::new(field, vec![("a", 3), ("b", 3)])
            .with_ints("a", "a", lower3)
            .with_ints("b", "b", lower3)
            .with_ints("a", "b", &[&[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1]]])
            .with_ints("a", "b", lower3)
            .with_ints("b", "a", lower3),
        FamilyKind::Lemma6(..) => Presentation::new(field, vec![("a", 3), ("b", 3)])
            .with_ints("a", "a", lower3)
            .with_ints("b", "b", lower3),
        FamilyKind::Lemma7Two => Presentation::new(field, vec![("a", 2), ("b", 2)])
            .with_ints("a", "a", lower2)
            .with_ints("b", "b", lower2),
        FamilyKind::Lemma7Three => Presentation::new(field, vec![("a", 2), ("b", 2), ("c", 2)])
            .with_ints("a", "a", lower2)
            .with_ints("b", "b", lower2)
            .with_ints("c", "c", lower2),
        FamilyKind::Lemma8Case1 | FamilyKind::Lemma8Case2 => {
            let ab: &[&[&[i64]]] = &[
                &[&[1, 0, 0], &[0, 0, 0]],
                &[&[0, 0, 0], &[1, 0, 0]],
                &[&[0, 0, 0], &[0, 1, 0]],
                &[&[0, 0, 0], &[0, 0, 1]],
            ];
            let p = Presentation::new(
                field,
                if kind == FamilyKind::Lemma8Case1 { vec![("a", 3), ("b", 2), ("c", 2)] } else { vec![("a", 3), ("b", 2)] },
            )
            .with_ints("a", "a", lower3)
            .with_ints("b", "b", lower2)
            .with_ints("a", "b", ab);
            if kind == FamilyKind::Lemma8Case1 {
                p.with_ints("c", "c", lower2).with_ints("a", "c", ab)
            } else {
                p
            }
        }
    };
    let objects = (0..p.len()).collect();
    WitnessContext { presentation: p, objects }
}

fn mismatch(kind: FamilyKind, message: impl Into<String>) -> WitnessError {
    WitnessError::ContextMismatch { kind: kind.to_string(), message: message.into() }
}

/// Places column blocks block-diagonally along groups of printed rows.
fn assemble(
    field: Field,
    groups: &[(Vec<(usize, usize)>, Matrix)],
) -> (Matrix, Vec<(usize, usize)>) {
    let rows: Vec<(usize, usize)> = groups.iter().flat_map(|(r, _)| r.iter().copied()).collect();
    let cols: usize = groups.iter().map(|(_, m)| m.cols()).sum();
    let mut h = Matrix::zeros(field, rows.len(), cols);
    let (mut r0, mut c0) = (0, 0);
    for (r, m) in groups {
        assert_eq!(r.len(), m.rows());
        for i in 0..m.rows() {
            for j in 0..m.cols() {
                h.set(r0 + i, c0 + j, m.get(i, j).clone());
            }
        }
        r0 += m.rows();
        c0 += m.cols();
    }
    (h, rows)
}

fn standard_rows(dims: &[usize]) -> Vec<(usize, usize)> {
    dims.iter().enumerate().flat_map(|(s, &d)| (0..d).map(move |l| (s, l))).collect()
}

/// Copies `copies` of layer `layer`.
fn layer_rows(copies: std::ops::Range<usize>, layer: usize) -> Vec<(usize, usize)> {
    copies.map(|s| (s, layer)).collect()
}

/// Reorders printed rows into summand-major coordinates of M(X).
fn to_space(target: Vec<usize>, dims: &[usize], printed: &Matrix, rows: &[(usize, usize)]) -> SpaceOnM {
    let offsets: Vec<usize> = dims.iter().scan(0, |acc, &d| {
        let o = *acc;
        *acc += d;
        Some(o)
    })
    .collect();
    let mut h = Matrix::zeros(printed.field(), rows.len(), printed.cols());
    for (r, &(s, l)) in rows.iter().enumerate() {
        for c in 0..printed.cols() {
            h.set(offsets[s] + l, c, printed.get(r, c).clone());
        }
    }
    SpaceOnM { target, h }
}

pub fn build_family(kind: FamilyKind, ctx: &WitnessContext, parameter: &ExactScalar) -> Result<WitnessSpace, WitnessError> {
    let p = &ctx.presentation;
    let field = p.field;
    if parameter.field() != field {
        return Err(mismatch(kind, format!("parameter over {} but context over {}", parameter.field(), field)));
    }
    let need = |n: usize, dims: &[usize]| -> Result<Vec<usize>, WitnessError> {
        if ctx.objects.len() < n {
            return Err(mismatch(kind, format!("needs {n} objects")));
        }
        let objs = ctx.objects[..n].to_vec();
        for (k, (&o, &d)) in objs.iter().zip(dims).enumerate() {
            if o >= p.len() || p.dim(o) != d {
                return Err(mismatch(kind, format!("object {} must have dimension {d}", k + 1)));
            }
        }
        Ok(objs)
    };
    let one = field.one();
    let zero = field.zero();
    let lam = parameter.clone();
    let col = |entries: &[&ExactScalar]| {
        Matrix::from_rows(field, entries.iter().map(|e| vec![(*e).clone()]).collect())
    };
    let (target, dims, printed, rows) = match kind {
        FamilyKind::Lemma2 | FamilyKind::Lemma6(..) => {
            let (i, j) = match kind {
                FamilyKind::Lemma6(i, j) => (i - 1, j - 1),
                _ => (2, 0),
            };
            let o = need(2, &[3, 3])?;
            let ra: Vec<usize> = (0..3).filter(|&l| l != i).collect();
            let rb: Vec<usize> = (0..3).filter(|&l| l != j).collect();
            let block = ints(field, &[&[1, 0], &[0, 1], &[1, 0], &[0, 1]]);
            let groups = vec![
                (layer_rows(0..2, ra[0]), col(&[&one, &zero])),
                (layer_rows(0..2, ra[1]), col(&[&zero, &one])),
                ([layer_rows(0..2, i), layer_rows(2..4, j)].concat(), block),
                (layer_rows(2..4, rb[0]), col(&[&one, &one])),
                (layer_rows(2..4, rb[1]), col(&[&one, &lam])),
            ];
            let (h, grouped) = assemble(field, &groups);
            // printed in layer order: rows of (m_1^a)^2, (m_2^a)^2, ..., (m_3^b)^2
            let order: Vec<(usize, usize)> = [layer_rows(0..2, 0), layer_rows(0..2, 1), layer_rows(0..2, 2)]
                .concat()
                .into_iter()
                .chain([layer_rows(2..4, 0), layer_rows(2..4, 1), layer_rows(2..4, 2)].concat())
                .collect();
            let printed = permute_rows(&h, &grouped, &order);
            (vec![o[0], o[0], o[1], o[1]], vec![3, 3, 3, 3], printed, order)
        }
        FamilyKind::Lemma3 => {
            let o = need(2, &[3, 3])?;
            let mut h = ints(field, &[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1], &[0, 0, 0], &[0, 1, 0], &[0, 0, 0]]);
            h.set(5, 2, lam);
            (vec![o[0], o[1]], vec![3, 3], h, standard_rows(&[3, 3]))
        }
        FamilyKind::Lemma7Two => {
            let o = need(2, &[2, 2])?;
            // i = 1, i' = 2 in a; j = 1, j' = 2 in b
            let mut h = ints(field, &[&[1, 0], &[0, 0], &[0, 1], &[1, 0]]);
            h.set(1, 1, lam);
            (vec![o[0], o[1]], vec![2, 2], h, standard_rows(&[2, 2]))
        }
        FamilyKind::Lemma7Three => {
            let o = need(3, &[2, 2, 2])?;
            let mut h = ints(field, &[&[1, 0, 0], &[0, 0, 0], &[0, 1, 0], &[1, 0, 0], &[0, 0, 1], &[0, 1, 0]]);
            h.set(1, 2, lam);
            (vec![o[0], o[1], o[2]], vec![2, 2, 2], h, standard_rows(&[2, 2, 2]))
        }
        FamilyKind::Lemma8Case1 | FamilyKind::Lemma8Case2 => {
            let (target, b2, c2) = if kind == FamilyKind::Lemma8Case1 {
                let o = need(3, &[3, 2, 2])?;
                (vec![o[0], o[0], o[0], o[0], o[1], o[1], o[2], o[2]], 4..6, 6..8)
            } else {
                let o = need(2, &[3, 2])?;
                (vec![o[0], o[0], o[0], o[0], o[1], o[1], o[1], o[1]], 4..6, 6..8)
            };
            let e = e7_representation(field, &lam);
            let groups = vec![
                (layer_rows(0..4, 0), e.a1),
                ([layer_rows(0..4, 1), layer_rows(b2.clone(), 0)].concat(), stack(&e.a2, &e.b1)),
                ([layer_rows(0..4, 2), layer_rows(c2.clone(), 0)].concat(), stack(&e.a3, &e.c1)),
                (layer_rows(b2, 1), e.b2),
                (layer_rows(c2, 1), e.c2),
            ];
            let (h, rows) = assemble(field, &groups);
            let dims = target.iter().map(|&o| p.dim(o)).collect();
            (target, dims, h, rows)
        }
    };
    let space = to_space(target, &dims, &printed, &rows);
    Ok(WitnessSpace { kind, parameter: parameter.clone(), printed, rows, space })
}

fn permute_rows(h: &Matrix, from: &[(usize, usize)], to: &[(usize, usize)]) -> Matrix {
    let mut out = Matrix::zeros(h.field(), h.rows(), h.cols());
    for (r, key) in to.iter().enumerate() {
        let src = from.iter().position(|k| k == key).expect("row present");
        for c in 0..h.cols() {
            out.set(r, c, h.get(src, c).clone());
        }
    }
    out
}

fn stack(top: &Matrix, bottom: &Matrix) -> Matrix {
    let mut rows: Vec<Vec<ExactScalar>> = (0..top.rows()).map(|r| top.row(r).to_vec()).collect();
    rows.extend((0..bottom.rows()).map(|r| bottom.row(r).to_vec()));
    Matrix::from_rows(top.field(), rows)
}

/// Matrices of the Ẽ7 representation with parameter α.
pub struct E7Representation {
    pub a1: Matrix,
    pub a2: Matrix,
    pub a3: Matrix,
    pub b1: Matrix,
    pub b2: Matrix,
    pub c1: Matrix,
    pub c2: Matrix,
}

pub fn e7_representation(field: Field, alpha: &ExactScalar) -> E7Representation {
    let mut a1 = ints(field, &[&[1, 0], &[1, 1], &[1, 0], &[0, 1]]);
    a1.set(0, 1, alpha.clone());
    let b = ints(field, &[&[0, 1, 0], &[0, 0, 1]]);
    let b2 = ints(field, &[&[1], &[0]]);
    E7Representation {
        a1,
        a2: ints(field, &[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1], &[0, 0, 0]]),
        a3: ints(field, &[&[0, 0, 0], &[0, 0, 1], &[0, 1, 0], &[1, 0, 0]]),
        b1: b.clone(),
        b2: b2.clone(),
        c1: b,
        c2: b2,
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IsoWitness {
    pub phi: Matrix,
    pub xi: Matrix,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum IsoOutcome {
    Isomorphic(IsoWitness),
    NotIsomorphic,
}

impl IsoOutcome {
    pub fn is_isomorphic(&self) -> bool {
        matches!(self, IsoOutcome::Isomorphic(_))
    }
}

fn m_dim(p: &Presentation, target: &[usize]) -> usize {
    target.iter().map(|&o| p.dim(o)).sum()
}

/// Basis of M(𝒜(x, y)): the identity (when x = y) and the radical span.
fn hom_basis(p: &Presentation, x: usize, y: usize) -> Vec<Matrix> {
    let mut out = Vec::new();
    if x == y {
        out.push(Matrix::identity(p.field, p.dim(x)));
    }
    out.extend(p.matrices(x, y).iter().cloned());
    out
}

/// Checks h'·φ = ξ·h, det φ ≠ 0 and det ξ ≠ 0.
pub fn verify_iso(h: &SpaceOnM, h2: &SpaceOnM, w: &IsoWitness) -> bool {
    w.phi.rows() == w.phi.cols()
        && w.xi.rows() == w.xi.cols()
        && h2.h.mul(&w.phi) == w.xi.mul(&h.h)
        && !w.phi.determinant().is_zero()
        && !w.xi.determinant().is_zero()
}

/// Decides whether two spaces on the same object multiset are isomorphic.
pub fn spaces_isomorphic(h: &SpaceOnM, h2: &SpaceOnM, p: &Presentation, seed: u64) -> Result<IsoOutcome, WitnessError> {
    let names = |t: &[usize]| t.iter().map(|&o| p.name(o).to_string()).collect::<Vec<_>>();
    let (mut s1, mut s2) = (h.target.clone(), h2.target.clone());
    s1.sort();
    s2.sort();
    if s1 != s2 {
        return Err(WitnessError::TargetMismatch(names(&h.target), names(&h2.target)));
    }
    let md = m_dim(p, &h.target);
    let v = h.v_dim();
    if v > MAX_V_DIM || md > MAX_M_DIM || h2.v_dim() > MAX_V_DIM {
        return Err(WitnessError::ScaleExceeded { v_dim: v.max(h2.v_dim()), m_dim: md });
    }
    if v != h2.v_dim() || h.h.rank() != h2.h.rank() {
        return Ok(IsoOutcome::NotIsomorphic);
    }
    let field = p.field;
    if h == h2 {
        return Ok(IsoOutcome::Isomorphic(IsoWitness {
            phi: Matrix::identity(field, v),
            xi: Matrix::identity(field, md),
        }));
    }
    let off = |t: &[usize]| -> Vec<usize> {
        t.iter().scan(0, |acc, &o| {
            let x = *acc;
            *acc += p.dim(o);
            Some(x)
        })
        .collect()
    };
    let (off1, off2) = (off(&h.target), off(&h2.target));
    // unknowns: φ entries (v×v), then one coefficient per hom basis matrix per block.
    // Each generator is sparse: entries of φ and of ξ.
    type Entries = Vec<(usize, usize, ExactScalar)>;
    let mut generators: Vec<(Entries, Entries)> = Vec::new();
    for r in 0..v {
        for c in 0..v {
            generators.push((vec![(r, c, field.one())], Vec::new()));
        }
    }
    for (j, &x) in h.target.iter().enumerate() {
        for (i, &y) in h2.target.iter().enumerate() {
            for b in hom_basis(p, x, y) {
                let xi = b
                    .support()
                    .into_iter()
                    .map(|(r, c)| (off2[i] + r, off1[j] + c, b.get(r, c).clone()))
                    .collect();
                generators.push((Vec::new(), xi));
            }
        }
    }
    // column k of the system: vec(h'·φ_k − ξ_k·h)
    let mut system = Matrix::zeros(field, md * v, generators.len());
    for (k, (phi, xi)) in generators.iter().enumerate() {
        let mut col = vec![field.zero(); md * v];
        for (r, c, e) in phi {
            // h'·E_rc puts column r of h' into column c
            for i in 0..md {
                let x = h2.h.get(i, *r);
                if !x.is_zero() {
                    col[i * v + c] = &col[i * v + c] + &(x * e);
                }
            }
        }
        for (r, c, e) in xi {
            // E_rc·h puts row c of h into row r
            for t in 0..v {
                let x = h.h.get(*c, t);
                if !x.is_zero() {
                    col[r * v + t] = &col[r * v + t] - &(x * e);
                }
            }
        }
        for (idx, e) in col.into_iter().enumerate() {
            if !e.is_zero() {
                system.set(idx, k, e);
            }
        }
    }
    let kernel = system.nullspace();
    if kernel.is_empty() {
        return Ok(IsoOutcome::NotIsomorphic);
    }
    let combine = |coeffs: &[ExactScalar]| -> IsoWitness {
        let mut weights = vec![field.zero(); generators.len()];
        for (vec, c) in kernel.iter().zip(coeffs) {
            if c.is_zero() {
                continue;
            }
            for (k, e) in vec.iter().enumerate() {
                if !e.is_zero() {
                    weights[k] = &weights[k] + &(e * c);
                }
            }
        }
        let mut phi = Matrix::zeros(field, v, v);
        let mut xi = Matrix::zeros(field, md, md);
        for (w, (gp, gx)) in weights.iter().zip(&generators) {
            if w.is_zero() {
                continue;
            }
            for (r, c, e) in gp {
                let val = phi.get(*r, *c) + &(e * w);
                phi.set(*r, *c, val);
            }
            for (r, c, e) in gx {
                let val = xi.get(*r, *c) + &(e * w);
                xi.set(*r, *c, val);
            }
        }
        IsoWitness { phi, xi }
    };
    let invertible = |w: &IsoWitness| !w.phi.determinant().is_zero() && !w.xi.determinant().is_zero();
    for attempt in 0..RETRIES {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_mul(1_000_003).wrapping_add(attempt));
        let coeffs: Vec<ExactScalar> = kernel
            .iter()
            .map(|_| match field {
                Field::Rational => field.from_int(rng.random_range(-1000..=1000)),
                Field::Prime(q) => field.from_int(rng.random_range(0..q as i64)),
            })
            .collect();
        let w = combine(&coeffs);
        if invertible(&w) {
            debug_assert!(verify_iso(h, h2, &w));
            return Ok(IsoOutcome::Isomorphic(w));
        }
    }
    if kernel.len() <= EXHAUSTIVE_LIMIT {
        let n = kernel.len() as u32;
        for code in 1..5u64.pow(n) {
            let coeffs: Vec<ExactScalar> =
                (0..n).map(|k| field.from_int(((code / 5u64.pow(k)) % 5) as i64)).collect();
            let w = combine(&coeffs);
            if invertible(&w) {
                return Ok(IsoOutcome::Isomorphic(w));
            }
        }
    }
    Ok(IsoOutcome::NotIsomorphic)
}

#[derive(Debug, Clone, Serialize)]
pub struct FamilyMember {
    pub parameter: String,
    pub target: Vec<String>,
    pub matrix: Vec<Vec<String>>,
}

#[derive(Debug, Clone, Serialize)]
pub struct PairResult {
    pub left: String,
    pub right: String,
    pub isomorphic: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct FamilyReport {
    pub family: String,
    pub context: crate::presentation::Document,
    pub members: Vec<FamilyMember>,
    pub results: Vec<PairResult>,
}

impl FamilyReport {
    /// Distinct parameters nonisomorphic, equal parameters isomorphic.
    pub fn separates(&self) -> bool {
        self.results.iter().all(|r| r.isomorphic == (r.left == r.right))
    }
}

/// Builds the members at `params` and tests every pair (including each member with itself).
pub fn family_report(kind: FamilyKind, ctx: &WitnessContext, params: &[ExactScalar], seed: u64) -> Result<FamilyReport, WitnessError> {
    let p = &ctx.presentation;
    let spaces = params
        .iter()
        .map(|l| build_family(kind, ctx, l))
        .collect::<Result<Vec<_>, _>>()?;
    let mut results = Vec::new();
    for (i, x) in spaces.iter().enumerate() {
        for y in &spaces[i..] {
            let outcome = spaces_isomorphic(&x.space, &y.space, p, seed)?;
            results.push(PairResult {
                left: x.parameter.entry_string(),
                right: y.parameter.entry_string(),
                isomorphic: outcome.is_isomorphic(),
            });
        }
    }
    let members = spaces
        .iter()
        .map(|s| FamilyMember {
            parameter: s.parameter.entry_string(),
            target: s.space.target.iter().map(|&o| p.name(o).to_string()).collect(),
            matrix: s.printed.to_strings(),
        })
        .collect();
    Ok(FamilyReport { family: kind.to_string(), context: p.to_document(), members, results })
}
