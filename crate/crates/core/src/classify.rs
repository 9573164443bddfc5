//! Steps of hom-spaces, endomorphism and hom-space normal forms, and basis morphisms.

use std::collections::BTreeMap;

use serde::ser::SerializeSeq;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::certificate::Certificate;
use crate::linalg::{Matrix, Subspace};
use crate::presentation::Presentation;
use crate::scalar::{ExactScalar, Field};

/// Matrix position, zero-based internally, printed one-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Step {
    pub row: usize,
    pub col: usize,
}

impl Step {
    pub fn new(row: usize, col: usize) -> Self {
        Step { row, col }
    }

    /// (i,j) ≥ (l,r) iff i ≤ l and j ≥ r.
    pub fn geq(self, other: Step) -> bool {
        self.row <= other.row && self.col >= other.col
    }

    pub fn gt(self, other: Step) -> bool {
        self != other && self.geq(other)
    }

    pub fn label(self) -> String {
        format!("e{}{}", self.row + 1, self.col + 1)
    }
}

impl Serialize for Step {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(2))?;
        seq.serialize_element(&(self.row + 1))?;
        seq.serialize_element(&(self.col + 1))?;
        seq.end()
    }
}

impl<'de> Deserialize<'de> for Step {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let [l, r] = <[usize; 2]>::deserialize(d)?;
        if l == 0 || r == 0 {
            return Err(serde::de::Error::custom("positions are one-based"));
        }
        Ok(Step::new(l - 1, r - 1))
    }
}

fn unit_index(cols: usize, s: Step) -> usize {
    s.row * cols + s.col
}

fn maximal(support: &[Step]) -> Vec<Step> {
    let mut out: Vec<Step> = support
        .iter()
        .copied()
        .filter(|&s| !support.iter().any(|&t| t.gt(s)))
        .collect();
    out.sort();
    out.dedup();
    out
}

pub fn steps_of_map(phi: &Matrix) -> Vec<Step> {
    let support: Vec<Step> = phi.support().into_iter().map(|(r, c)| Step::new(r, c)).collect();
    maximal(&support)
}

/// Steps of a span of rows × cols matrices given as a subspace of vectorized matrices.
pub fn steps_of_space(space: &Subspace, rows: usize, cols: usize) -> Vec<Step> {
    let mut support = Vec::new();
    for r in 0..rows {
        for c in 0..cols {
            let idx = r * cols + c;
            if space.basis().iter().any(|v| !v[idx].is_zero()) {
                support.push(Step::new(r, c));
            }
        }
    }
    maximal(&support)
}

/// Units strictly below some step (S) and at or below some step (S̄).
pub fn lower_sets(steps: &[Step], rows: usize, cols: usize) -> (Vec<Step>, Vec<Step>) {
    let mut s = Vec::new();
    let mut sbar = Vec::new();
    for r in 0..rows {
        for c in 0..cols {
            let u = Step::new(r, c);
            if steps.iter().any(|&t| t.gt(u)) {
                s.push(u);
            }
            if steps.iter().any(|&t| t.geq(u)) {
                sbar.push(u);
            }
        }
    }
    (s, sbar)
}

pub fn unit_vector(field: Field, rows: usize, cols: usize, s: Step) -> Vec<ExactScalar> {
    Matrix::unit(field, rows, cols, s.row, s.col).as_vec().to_vec()
}

fn units_span(field: Field, rows: usize, cols: usize, units: &[Step]) -> Subspace {
    Subspace::span(field, rows * cols, units.iter().map(|&u| unit_vector(field, rows, cols, u)))
}

// ---------------------------------------------------------------------------
// Endomorphisms
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum EndoType {
    D1,
    D2,
    /// rad spanned by e21 and e32 only.
    D3Chain,
    /// rad spanned by e21, e31, e32.
    D3Full,
    D3Double { lambda: ExactScalar },
}

pub fn classify_endo(p: &Presentation, a: usize) -> Result<EndoType, Certificate> {
    let d = p.dim(a);
    let f = p.field;
    let rad = p.span(a, a);
    let units = |us: &[(usize, usize)]| {
        units_span(f, d, d, &us.iter().map(|&(r, c)| Step::new(r, c)).collect::<Vec<_>>())
    };
    let fail = || {
        Certificate::new("lemma1", vec![p.name(a).to_string()])
            .with_detail("radical endomorphisms match no admissible normal form")
    };
    match d {
        1 if rad.dim() == 0 => Ok(EndoType::D1),
        2 if rad == units(&[(1, 0)]) => Ok(EndoType::D2),
        3 => {
            if rad == units(&[(1, 0), (2, 0), (2, 1)]) {
                return Ok(EndoType::D3Full);
            }
            if rad == units(&[(1, 0), (2, 1)]) {
                return Ok(EndoType::D3Chain);
            }
            // RREF basis of span{e21 + λ e32, e31}: pivots at e21 and e31
            let e32 = unit_index(3, Step::new(2, 1));
            let e21 = unit_index(3, Step::new(1, 0));
            let e31 = unit_index(3, Step::new(2, 0));
            if rad.dim() == 2 && rad.pivots() == [e21, e31] {
                let lambda = rad.basis()[0][e32].clone();
                let mut g = Matrix::unit(f, 3, 3, 1, 0);
                g.set(2, 1, lambda.clone());
                let expect = Subspace::span_matrices(f, 3, 3, &[g, Matrix::unit(f, 3, 3, 2, 0)]);
                if !lambda.is_zero() && rad == expect {
                    return Ok(EndoType::D3Double { lambda });
                }
            }
            Err(fail())
        }
        _ => Err(fail()),
    }
}

// ---------------------------------------------------------------------------
// Hom-spaces between distinct objects
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum HomCase {
    Saturated,
    TwoStep { lambda: ExactScalar },
    DiagOneDouble { variant: String, lambda: ExactScalar },
    DiagTwoDouble { lambda: ExactScalar, mu: ExactScalar },
}

#[derive(Debug, Clone, Serialize)]
pub struct HomClassification {
    pub from: String,
    pub to: String,
    pub steps: Vec<Step>,
    pub case: HomCase,
    #[serde(serialize_with = "ser_units")]
    pub s_basis: Vec<Step>,
    #[serde(serialize_with = "ser_units")]
    pub sbar_basis: Vec<Step>,
}

fn ser_units<S: Serializer>(units: &[Step], s: S) -> Result<S::Ok, S::Error> {
    let labels: Vec<String> = units.iter().map(|u| u.label()).collect();
    labels.serialize(s)
}

/// Classifies M(a,b) for a ≠ b; certificates for the failed necessary conditions.
pub fn classify_hom(p: &Presentation, a: usize, b: usize) -> Result<HomClassification, Vec<Certificate>> {
    let f = p.field;
    let (rows, cols) = (p.dim(b), p.dim(a));
    let space = p.span(a, b);
    let steps = steps_of_space(&space, rows, cols);
    let (s_units, sbar_units) = lower_sets(&steps, rows, cols);
    let names = vec![p.name(a).to_string(), p.name(b).to_string()];
    let mut certs = Vec::new();

    if !space.contains_subspace(&units_span(f, rows, cols, &s_units)) {
        certs.push(
            Certificate::new("lemma4", names.clone())
                .with_detail("S(a,b) is not contained in M(a,b)"),
        );
    }

    let lemma2_steps = steps == [Step::new(0, 1), Step::new(1, 2)] && rows == 3 && cols == 3;
    if lemma2_steps {
        let back = p.span(b, a);
        let e31 = units_span(f, 3, 3, &[Step::new(2, 0)]);
        if back.dim() == 0 {
            certs.push(
                Certificate::new("lemma2", names.clone())
                    .with_handle("lemma2")
                    .with_detail("steps (1,2),(2,3) with M(b,a) = 0"),
            );
        } else if back != e31 {
            certs.push(
                Certificate::new("lemma2", names.clone())
                    .with_detail("steps (1,2),(2,3) require M(b,a) = k e31"),
            );
        }
    }

    // projection onto step coordinates
    let t = steps.len();
    let w = Subspace::span(
        f,
        t,
        space.basis().iter().map(|v| steps.iter().map(|&s| v[unit_index(cols, s)].clone()).collect()),
    );
    let case = if w.dim() == t {
        Some(HomCase::Saturated)
    } else if t == 2 && w.dim() == 1 {
        let v = &w.basis()[0];
        if v[0].is_zero() || v[1].is_zero() {
            None
        } else {
            Some(HomCase::TwoStep { lambda: v[1].div(&v[0]).unwrap() })
        }
    } else if t == 3 && w.dim() == 1 {
        certs.push(
            Certificate::new("lemma3", names.clone())
                .with_handle("lemma3")
                .with_detail("M(a,b) = k psi + S(a,b) with steps (1,1),(2,2),(3,3)"),
        );
        None
    } else if t == 3 && w.dim() == 2 {
        // kernel functional c with W = ker c
        let c = Matrix::from_rows(f, w.basis().to_vec()).nullspace().remove(0);
        let support: Vec<usize> = (0..3).filter(|&i| !c[i].is_zero()).collect();
        match support.as_slice() {
            [i, j] => {
                let lambda = (-&c[*i]).div(&c[*j]).unwrap();
                Some(HomCase::DiagOneDouble { variant: format!("{}{}", i + 1, j + 1), lambda })
            }
            [_, _, _] => {
                let lambda = (-&c[0]).div(&c[1]).unwrap();
                let mu = (-&c[0]).div(&c[2]).unwrap();
                Some(HomCase::DiagTwoDouble { lambda, mu })
            }
            _ => None,
        }
    } else {
        None
    };

    let case = match case {
        Some(c) => c,
        None => {
            if certs.is_empty() {
                certs.push(
                    Certificate::new("lemma5", names)
                        .with_detail(format!("steps {:?} admit none of the three normal forms", steps.iter().map(|s| (s.row + 1, s.col + 1)).collect::<Vec<_>>())),
                );
            }
            return Err(certs);
        }
    };
    if !certs.is_empty() {
        return Err(certs);
    }
    Ok(HomClassification {
        from: p.name(a).into(),
        to: p.name(b).into(),
        steps,
        case,
        s_basis: s_units,
        sbar_basis: sbar_units,
    })
}

// ---------------------------------------------------------------------------
// Basis morphisms
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MorphismKind {
    Prime,
    Double,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BasisMorphism {
    pub from: usize,
    pub to: usize,
    pub matrix: Matrix,
    pub kind: MorphismKind,
    /// One position for a prime, two (leading first) for a double.
    pub positions: Vec<Step>,
    /// λ of e_ij + λ e_i'j'; None for primes.
    pub parameter: Option<ExactScalar>,
    pub short: bool,
}

impl BasisMorphism {
    fn prime(field: Field, from: usize, to: usize, rows: usize, cols: usize, s: Step) -> Self {
        BasisMorphism {
            from,
            to,
            matrix: Matrix::unit(field, rows, cols, s.row, s.col),
            kind: MorphismKind::Prime,
            positions: vec![s],
            parameter: None,
            short: false,
        }
    }

    fn double(
        field: Field,
        (from, to): (usize, usize),
        (rows, cols): (usize, usize),
        first: Step,
        second: Step,
        lambda: ExactScalar,
    ) -> Self {
        let mut matrix = Matrix::unit(field, rows, cols, first.row, first.col);
        matrix.set(second.row, second.col, lambda.clone());
        BasisMorphism {
            from,
            to,
            matrix,
            kind: MorphismKind::Double,
            positions: vec![first, second],
            parameter: Some(lambda),
            short: false,
        }
    }

    pub fn label(&self) -> String {
        match self.kind {
            MorphismKind::Prime => self.positions[0].label(),
            MorphismKind::Double => format!(
                "{}+{}*{}",
                self.positions[0].label(),
                self.parameter.as_ref().unwrap().entry_string(),
                self.positions[1].label()
            ),
        }
    }
}

/// Span of composites N·K over all intermediate objects c.
pub fn composite_span(p: &Presentation, a: usize, b: usize) -> Subspace {
    let mats: Vec<Matrix> = (0..p.len()).flat_map(|c| p.products(a, c, b)).collect();
    Subspace::span_matrices(p.field, p.dim(b), p.dim(a), &mats)
}

pub fn is_short(p: &Presentation, f: &Matrix, a: usize, b: usize) -> bool {
    !composite_span(p, a, b).contains(f.as_vec())
}

/// All prime and double morphisms of the pair; `case` is None for endomorphisms.
pub fn enumerate_basis_morphisms(
    p: &Presentation,
    a: usize,
    b: usize,
    endo: Option<&EndoType>,
    case: Option<&HomCase>,
) -> Vec<BasisMorphism> {
    let f = p.field;
    let (rows, cols) = (p.dim(b), p.dim(a));
    let space = p.span(a, b);
    let mut out = Vec::new();
    for r in 0..rows {
        for c in 0..cols {
            let s = Step::new(r, c);
            if space.contains(&unit_vector(f, rows, cols, s)) {
                out.push(BasisMorphism::prime(f, a, b, rows, cols, s));
            }
        }
    }
    let st = Step::new;
    let shape = (rows, cols);
    let pair = (a, b);
    match (endo, case) {
        (Some(EndoType::D3Double { lambda }), _) => {
            out.push(BasisMorphism::double(f, pair, shape, st(1, 0), st(2, 1), lambda.clone()));
        }
        (_, Some(HomCase::TwoStep { lambda })) => {
            let steps = steps_of_space(&space, rows, cols);
            out.push(BasisMorphism::double(f, pair, shape, steps[0], steps[1], lambda.clone()));
        }
        (_, Some(HomCase::DiagOneDouble { variant, lambda })) => {
            let v: Vec<usize> = variant.bytes().map(|c| (c - b'1') as usize).collect();
            out.push(BasisMorphism::double(f, pair, shape, st(v[0], v[0]), st(v[1], v[1]), lambda.clone()));
        }
        (_, Some(HomCase::DiagTwoDouble { lambda, mu })) => {
            let nu = (-mu).div(lambda).unwrap();
            out.push(BasisMorphism::double(f, pair, shape, st(0, 0), st(1, 1), lambda.clone()));
            out.push(BasisMorphism::double(f, pair, shape, st(0, 0), st(2, 2), mu.clone()));
            out.push(BasisMorphism::double(f, pair, shape, st(1, 1), st(2, 2), nu));
        }
        _ => {}
    }
    let comp = composite_span(p, a, b);
    for m in &mut out {
        m.short = !comp.contains(m.matrix.as_vec());
    }
    out
}

/// Per-pair double counts must be 0, 1 or 3, and a 3-count pair needs a short double.
pub fn check_counts(p: &Presentation, morphisms: &[BasisMorphism], a: usize, b: usize) -> Option<Certificate> {
    let doubles: Vec<&BasisMorphism> =
        morphisms.iter().filter(|m| m.kind == MorphismKind::Double).collect();
    let names = vec![p.name(a).to_string(), p.name(b).to_string()];
    if ![0, 1, 3].contains(&doubles.len()) {
        return Some(
            Certificate::new("count", names).with_detail(format!("{} double directions", doubles.len())),
        );
    }
    if doubles.len() == 3 && !doubles.iter().any(|d| d.short) {
        return Some(Certificate::new("count", names).with_detail("three doubles and none is short"));
    }
    None
}

/// Everything the classifier learns about a rebased presentation.
#[derive(Debug, Clone)]
pub struct Classification {
    pub endo: Vec<EndoType>,
    pub homs: BTreeMap<(usize, usize), HomClassification>,
    /// All prime and double morphisms per ordered pair (including a = b).
    pub morphisms: BTreeMap<(usize, usize), Vec<BasisMorphism>>,
}

pub fn classify_all(p: &Presentation) -> Result<Classification, Vec<Certificate>> {
    let n = p.len();
    let mut certs = Vec::new();
    let mut endo = Vec::new();
    for a in 0..n {
        match classify_endo(p, a) {
            Ok(e) => endo.push(e),
            Err(c) => {
                certs.push(c);
                endo.push(EndoType::D1);
            }
        }
    }
    let mut homs = BTreeMap::new();
    for a in 0..n {
        for b in 0..n {
            if a == b || p.span(a, b).dim() == 0 {
                continue;
            }
            match classify_hom(p, a, b) {
                Ok(h) => {
                    homs.insert((a, b), h);
                }
                Err(mut cs) => certs.append(&mut cs),
            }
        }
    }
    if !certs.is_empty() {
        return Err(certs);
    }
    let mut morphisms = BTreeMap::new();
    for a in 0..n {
        for b in 0..n {
            let ms = if a == b {
                enumerate_basis_morphisms(p, a, a, Some(&endo[a]), None)
            } else if let Some(h) = homs.get(&(a, b)) {
                enumerate_basis_morphisms(p, a, b, None, Some(&h.case))
            } else {
                continue;
            };
            if let Some(c) = check_counts(p, &ms, a, b) {
                certs.push(c);
            }
            if !ms.is_empty() {
                morphisms.insert((a, b), ms);
            }
        }
    }
    if !certs.is_empty() {
        return Err(certs);
    }
    Ok(Classification { endo, homs, morphisms })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q() -> Field {
        Field::Rational
    }

    #[test]
    fn steps_of_maps() {
        let e21 = Matrix::unit(q(), 3, 3, 1, 0);
        assert_eq!(steps_of_map(&e21), vec![Step::new(1, 0)]);
        let diag = Matrix::from_ints(q(), &[&[1, 0, 0], &[0, 1, 0], &[0, 0, 0]]);
        assert_eq!(steps_of_map(&diag), vec![Step::new(0, 0), Step::new(1, 1)]);
        assert!(steps_of_map(&Matrix::zeros(q(), 3, 3)).is_empty());
    }

    #[test]
    fn lower_sets_of_single_step() {
        let (s, sbar) = lower_sets(&[Step::new(0, 0)], 3, 3);
        assert_eq!(s, vec![Step::new(1, 0), Step::new(2, 0)]);
        assert_eq!(sbar, vec![Step::new(0, 0), Step::new(1, 0), Step::new(2, 0)]);
        let (s, sbar) = lower_sets(&[Step::new(1, 0)], 3, 3);
        assert_eq!(s, vec![Step::new(2, 0)]);
        assert_eq!(sbar, vec![Step::new(1, 0), Step::new(2, 0)]);
        let (s, sbar) = lower_sets(&[], 3, 3);
        assert!(s.is_empty() && sbar.is_empty());
    }

    #[test]
    fn endo_forms() {
        let p = Presentation::new(q(), vec![("a", 2)]).with_ints("a", "a", &[&[&[0, 0], &[1, 0]]]);
        assert_eq!(classify_endo(&p, 0).unwrap(), EndoType::D2);
        let p = Presentation::new(q(), vec![("a", 3)]).with_ints(
            "a",
            "a",
            &[&[&[0, 0, 0], &[1, 0, 0], &[0, 2, 0]], &[&[0, 0, 0], &[0, 0, 0], &[1, 0, 0]]],
        );
        assert_eq!(
            classify_endo(&p.canonicalize(), 0).unwrap(),
            EndoType::D3Double { lambda: q().from_int(2) }
        );
        let p = Presentation::new(q(), vec![("a", 3)]).with_ints(
            "a",
            "a",
            &[
                &[&[0, 0, 0], &[1, 0, 0], &[0, 0, 0]],
                &[&[0, 0, 0], &[0, 0, 0], &[1, 0, 0]],
                &[&[0, 0, 0], &[0, 0, 0], &[0, 1, 0]],
            ],
        );
        assert_eq!(classify_endo(&p, 0).unwrap(), EndoType::D3Full);
    }

    #[test]
    fn two_step_parameter() {
        let p = Presentation::new(q(), vec![("a", 2), ("b", 2)])
            .with_ints("a", "a", &[&[&[0, 0], &[1, 0]]])
            .with_ints("b", "b", &[&[&[0, 0], &[1, 0]]])
            .with_ints("a", "b", &[&[&[1, 0], &[0, 3]], &[&[0, 0], &[1, 0]]]);
        let h = classify_hom(&p, 0, 1).unwrap();
        assert_eq!(h.steps, vec![Step::new(0, 0), Step::new(1, 1)]);
        assert_eq!(h.case, HomCase::TwoStep { lambda: q().from_int(3) });
    }

    #[test]
    fn lemma2_steps_need_back_map() {
        let full = [
            &[&[0i64, 0, 0][..], &[1, 0, 0], &[0, 0, 0]][..],
            &[&[0, 0, 0], &[0, 0, 0], &[1, 0, 0]],
            &[&[0, 0, 0], &[0, 0, 0], &[0, 1, 0]],
        ];
        let p = Presentation::new(q(), vec![("a", 3), ("b", 3)])
            .with_ints("a", "a", &full)
            .with_ints("b", "b", &full)
            .with_ints(
                "a",
                "b",
                &[
                    &[&[0, 1, 0], &[0, 0, 0], &[0, 0, 0]],
                    &[&[0, 0, 0], &[0, 0, 1], &[0, 0, 0]],
                    &[&[1, 0, 0], &[0, 0, 0], &[0, 0, 0]],
                    &[&[0, 0, 0], &[1, 0, 0], &[0, 0, 0]],
                    &[&[0, 0, 0], &[0, 1, 0], &[0, 0, 0]],
                    &[&[0, 0, 0], &[0, 0, 0], &[1, 0, 0]],
                    &[&[0, 0, 0], &[0, 0, 0], &[0, 1, 0]],
                    &[&[0, 0, 0], &[0, 0, 0], &[0, 0, 1]],
                ],
            );
        let certs = classify_hom(&p, 0, 1).unwrap_err();
        assert_eq!(certs[0].lemma, "lemma2");
        assert_eq!(certs[0].witness_handle.as_deref(), Some("lemma2"));
    }

    #[test]
    fn two_double_third_direction() {
        let lower = [
            &[&[0i64, 0, 0][..], &[1, 0, 0], &[0, 0, 0]][..],
            &[&[0, 0, 0], &[0, 0, 0], &[1, 0, 0]],
            &[&[0, 0, 0], &[0, 0, 0], &[0, 1, 0]],
        ];
        let p = Presentation::new(q(), vec![("a", 3), ("b", 3)])
            .with_ints("a", "a", &lower)
            .with_ints("b", "b", &lower)
            .with_ints("a", "b", &lower)
            .with_ints("a", "b", &[&[&[1, 0, 0], &[0, 2, 0], &[0, 0, 0]], &[&[1, 0, 0], &[0, 0, 0], &[0, 0, -3]]])
            .canonicalize();
        let h = classify_hom(&p, 0, 1).unwrap();
        assert_eq!(h.case, HomCase::DiagTwoDouble { lambda: q().from_int(2), mu: q().from_int(-3) });
        let ms = enumerate_basis_morphisms(&p, 0, 1, None, Some(&h.case));
        let doubles: Vec<_> = ms.iter().filter(|m| m.kind == MorphismKind::Double).collect();
        assert_eq!(doubles.len(), 3);
        assert_eq!(doubles[2].parameter, Some(q().parse_entry("3/2").unwrap()));
        assert!(doubles.iter().all(|d| d.short));
    }
}
