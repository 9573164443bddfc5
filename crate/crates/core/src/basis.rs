//! Reduced normed bases {m_i^a, f_l^ba}, their product tables, and the conditions a)–e).

use std::collections::{BTreeMap, BTreeSet};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::classify::{
    lower_sets, steps_of_space, unit_vector, BasisMorphism, Classification, EndoType, HomClassification,
    MorphismKind, Step,
};
use crate::linalg::{Matrix, Subspace};
use crate::monomial::{RadMonomial, Scale};
use crate::presentation::Presentation;
use crate::scalar::{ExactScalar, Field};
use crate::triangular::TriangularBasis;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Numeric,
    Symbolic,
}

impl FromStr for Mode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "numeric" => Ok(Mode::Numeric),
            "symbolic" => Ok(Mode::Symbolic),
            other => Err(format!("unknown mode {other:?}")),
        }
    }
}

/// A basis morphism together with its coefficient data.
///
/// As a map it equals `scale * (e_ij + parameter * e_i'j')`, where the field
/// matrix `base.matrix` carries the numeric parameter.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Morphism {
    pub base: BasisMorphism,
    pub parameter: Scale,
    pub scale: Scale,
}

impl Morphism {
    pub fn from(&self) -> usize {
        self.base.from
    }

    pub fn to(&self) -> usize {
        self.base.to
    }

    pub fn kind(&self) -> MorphismKind {
        self.base.kind
    }

    pub fn rank(&self) -> usize {
        self.base.matrix.rank()
    }
}

/// f m_source = coefficient · m_target (layers zero-based).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Product {
    pub source: usize,
    pub target: usize,
    pub coefficient: Scale,
}

#[derive(Debug, Clone)]
pub struct ClassifiedBasis {
    pub presentation: Presentation,
    pub bases: Vec<TriangularBasis>,
    pub endo: Vec<EndoType>,
    pub homs: BTreeMap<(usize, usize), HomClassification>,
    pub morphisms: Vec<Morphism>,
    /// Short doubles left out of 3-double pairs.
    pub excluded: Vec<Morphism>,
    /// x_i^a with m_i = x_i m_i'.
    pub vector_scales: Vec<Vec<Scale>>,
    pub mode: Mode,
    pub notices: Vec<String>,
}

fn positive_rational(s: &ExactScalar) -> bool {
    use num_traits::Signed;
    s.as_rational().is_some_and(|q| q.is_positive())
}

pub fn build_reduced_basis(
    p: &Presentation,
    bases: Vec<TriangularBasis>,
    cls: Classification,
    mode: Mode,
) -> ClassifiedBasis {
    let field = p.field;
    let mut notices = Vec::new();
    let mut mode = mode;
    // (morphism, kept) in pair order
    let mut chosen: Vec<(&BasisMorphism, bool)> = Vec::new();
    for ms in cls.morphisms.values() {
        let doubles = ms.iter().filter(|m| m.kind == MorphismKind::Double).count();
        let dropped = if doubles == 3 {
            ms.iter()
                .filter(|m| m.kind == MorphismKind::Double && m.short)
                .min_by(|x, y| x.positions.cmp(&y.positions))
        } else {
            None
        };
        chosen.extend(ms.iter().map(|m| (m, dropped != Some(m))));
    }
    if mode == Mode::Numeric && field == Field::Rational {
        let bad = chosen
            .iter()
            .find(|(m, kept)| *kept && m.parameter.as_ref().is_some_and(|l| !positive_rational(l)));
        if let Some((m, _)) = bad {
            notices.push(format!(
                "parameter {} of {} is not a positive rational; switching to symbolic mode",
                m.parameter.as_ref().unwrap().entry_string(),
                m.label()
            ));
            mode = Mode::Symbolic;
        }
    }
    let one = if mode == Mode::Symbolic { Scale::Mono(RadMonomial::one()) } else { Scale::one_for(field) };

    let mut morphisms = Vec::new();
    let mut excluded = Vec::new();
    let mut symbol = 0;
    let mut unresolved = Vec::new();
    for (m, kept) in chosen {
        let parameter = match (&m.parameter, mode) {
            (None, _) => one.clone(),
            (Some(_), Mode::Symbolic) if kept && !m.short => {
                unresolved.push(morphisms.len());
                one.clone()
            }
            (Some(_), Mode::Symbolic) => {
                symbol += 1;
                Scale::Mono(RadMonomial::symbol(&format!("λ_{symbol}")))
            }
            (Some(l), Mode::Numeric) => Scale::from_scalar(l).expect("nonzero parameter"),
        };
        let entry = Morphism { base: m.clone(), parameter, scale: one.clone() };
        if kept {
            morphisms.push(entry);
        } else {
            excluded.push(entry);
        }
    }
    // long doubles inherit the product of their factors' symbols
    loop {
        let before = unresolved.len();
        let mut k = 0;
        while k < unresolved.len() {
            let idx = unresolved[k];
            let found = (0..morphisms.len())
                .filter(|i| !unresolved.contains(i))
                .flat_map(|g| (0..morphisms.len()).map(move |h| (g, h)))
                .filter(|(g, h)| !unresolved.contains(h) && g != &idx && h != &idx)
                .find_map(|(g, h)| factor_parameter(&morphisms[h], &morphisms[g], &morphisms[idx]));
            if let Some(param) = found {
                morphisms[idx].parameter = param;
                unresolved.remove(k);
            } else {
                k += 1;
            }
        }
        if unresolved.len() == before {
            break;
        }
    }
    for idx in unresolved {
        symbol += 1;
        morphisms[idx].parameter = Scale::Mono(RadMonomial::symbol(&format!("λ_{symbol}")));
        notices.push(format!(
            "long double {} has no factorization through basis morphisms; given a free symbol",
            morphisms[idx].base.label()
        ));
    }
    let vector_scales = bases.iter().map(|b| vec![one.clone(); b.d()]).collect();
    ClassifiedBasis {
        presentation: p.clone(),
        bases,
        endo: cls.endo,
        homs: cls.homs,
        morphisms,
        excluded,
        vector_scales,
        mode,
        notices,
    }
}

/// Parameter of `target` as a formal product h·g, if the matrices multiply to it exactly.
fn factor_parameter(h: &Morphism, g: &Morphism, target: &Morphism) -> Option<Scale> {
    if g.to() != h.from() || g.from() != target.from() || h.to() != target.to() {
        return None;
    }
    if h.base.matrix.mul(&g.base.matrix) != target.base.matrix {
        return None;
    }
    let terms = |m: &Morphism| -> Vec<(Step, Scale)> {
        m.base
            .positions
            .iter()
            .enumerate()
            .map(|(k, &pos)| (pos, if k == 1 { m.parameter.clone() } else { Scale::Mono(RadMonomial::one()) }))
            .collect()
    };
    let mut coefficients: BTreeMap<Step, Scale> = BTreeMap::new();
    for (hp, hc) in terms(h) {
        for (gp, gc) in terms(g) {
            if hp.col == gp.row {
                let pos = Step::new(hp.row, gp.col);
                if coefficients.insert(pos, hc.mul(&gc)).is_some() {
                    return None;
                }
            }
        }
    }
    let lead = coefficients.get(&target.base.positions[0])?;
    if !lead.is_one() {
        return None;
    }
    coefficients.get(&target.base.positions[1]).cloned()
}

impl ClassifiedBasis {
    pub fn field(&self) -> Field {
        self.presentation.field
    }

    pub fn doubles(&self) -> impl Iterator<Item = (usize, &Morphism)> {
        self.morphisms.iter().enumerate().filter(|(_, m)| m.kind() == MorphismKind::Double)
    }

    pub fn pair_morphisms(&self, a: usize, b: usize) -> Vec<&Morphism> {
        self.morphisms.iter().filter(|m| m.from() == a && m.to() == b).collect()
    }

    /// Number of double directions of the pair, counting any excluded one.
    pub fn double_count(&self, a: usize, b: usize) -> usize {
        self.morphisms
            .iter()
            .chain(&self.excluded)
            .filter(|m| m.from() == a && m.to() == b && m.kind() == MorphismKind::Double)
            .count()
    }

    pub fn products(&self, m: &Morphism) -> Vec<Product> {
        let (a, b) = (m.from(), m.to());
        let mut out: Vec<Product> = m
            .base
            .matrix
            .support()
            .into_iter()
            .map(|(i, j)| {
                let pos = Step::new(i, j);
                let mut coefficient = m.scale.clone();
                if m.base.positions.len() == 2 && m.base.positions[1] == pos {
                    coefficient = coefficient.mul(&m.parameter);
                } else if m.base.positions[0] != pos {
                    // entries of hand-built morphisms relative to the leading one
                    let lead = &m.base.positions[0];
                    let ratio = m.base.matrix.get(i, j).div(m.base.matrix.get(lead.row, lead.col)).unwrap();
                    if !ratio.is_one() {
                        coefficient = coefficient.mul(&Scale::from_scalar(&ratio).unwrap());
                    }
                }
                let coefficient = coefficient
                    .mul(&self.vector_scales[b][i])
                    .div(&self.vector_scales[a][j]);
                Product { source: j, target: i, coefficient }
            })
            .collect();
        out.sort_by_key(|p| p.source);
        out
    }

    pub fn rank(&self) -> usize {
        self.morphisms.iter().map(Morphism::rank).max().unwrap_or(0)
    }

    pub fn check_conditions(&self) -> ConditionReport {
        ConditionReport {
            a: self.check_thin(),
            b: self.check_pattern(true),
            c: self.check_pattern(false),
            d: self.check_normed(),
            e: self.check_rank_additivity(),
        }
    }

    fn check_thin(&self) -> ConditionResult {
        let p = &self.presentation;
        let mut w = Vec::new();
        for m in &self.morphisms {
            let (a, b) = (m.from(), m.to());
            let (rows, cols) = (p.dim(b), p.dim(a));
            let steps = steps_of_space(&p.span(a, b), rows, cols);
            let (s, _) = lower_sets(&steps, rows, cols);
            let f = p.field;
            let units: Vec<Matrix> = s.iter().map(|&u| Matrix::unit(f, rows, cols, u.row, u.col)).collect();
            let mut perturb: Vec<Matrix> = units.clone();
            for i in 0..units.len() {
                for j in i + 1..units.len() {
                    perturb.push(units[i].add(&units[j]));
                }
            }
            let r = m.rank();
            if let Some(s) = perturb.iter().find(|s| {
                let g = m.base.matrix.add(s);
                !g.is_zero() && g.rank() < r
            }) {
                w.push(format!("{} drops rank when perturbed by {:?}", self.morphism_label(m), s));
            }
        }
        ConditionResult::from_witnesses(w)
    }

    fn check_pattern(&self, columns: bool) -> ConditionResult {
        let mut w = Vec::new();
        for m in &self.morphisms {
            let mut seen = BTreeSet::new();
            for (i, j) in m.base.matrix.support() {
                let key = if columns { j } else { i };
                if !seen.insert(key) {
                    w.push(format!(
                        "{} has two nonzero entries in {} {}",
                        self.morphism_label(m),
                        if columns { "column" } else { "row" },
                        key + 1
                    ));
                }
            }
        }
        ConditionResult::from_witnesses(w)
    }

    fn check_normed(&self) -> ConditionResult {
        let mut w = Vec::new();
        for m in &self.morphisms {
            let prods = self.products(m);
            for (k, pr) in prods.iter().enumerate() {
                if !pr.coefficient.is_one() && !prods[..k].iter().any(|q| q.coefficient.is_one()) {
                    w.push(format!(
                        "{} m_{} has coefficient {} and no earlier product has coefficient 1",
                        self.morphism_label(m),
                        pr.source + 1,
                        pr.coefficient
                    ));
                }
            }
        }
        ConditionResult::from_witnesses(w)
    }

    /// Nonzero products of two or more composable basis morphisms, deduplicated.
    pub fn composite_products(&self) -> Vec<(usize, usize, Matrix)> {
        let mut seen: BTreeSet<(usize, usize, Vec<String>)> = BTreeSet::new();
        let key = |a: usize, c: usize, m: &Matrix| (a, c, m.as_vec().iter().map(|x| x.entry_string()).collect());
        let mut frontier: Vec<(usize, usize, Matrix)> =
            self.morphisms.iter().map(|m| (m.from(), m.to(), m.base.matrix.clone())).collect();
        let mut out = Vec::new();
        let depth: usize = (0..self.presentation.len()).map(|a| self.presentation.dim(a)).sum();
        for _ in 1..depth.max(1) {
            let mut next = Vec::new();
            for (a, b, pm) in &frontier {
                for g in self.morphisms.iter().filter(|g| g.from() == *b) {
                    let prod = g.base.matrix.mul(pm);
                    if prod.is_zero() {
                        continue;
                    }
                    if seen.insert(key(*a, g.to(), &prod)) {
                        next.push((*a, g.to(), prod));
                    }
                }
            }
            if next.is_empty() {
                break;
            }
            out.extend(next.iter().cloned());
            frontier = next;
        }
        out
    }

    fn check_rank_additivity(&self) -> ConditionResult {
        let mut w = Vec::new();
        let p = &self.presentation;
        for (a, c, phi) in self.composite_products() {
            let ms = self.pair_morphisms(a, c);
            let (rows, cols) = (p.dim(c), p.dim(a));
            let basis = Matrix::from_rows(p.field, ms.iter().map(|m| m.base.matrix.as_vec().to_vec()).collect());
            let coords = solve_combination(&basis, phi.as_vec(), rows * cols);
            match coords {
                None => w.push(format!(
                    "product {:?} from {} to {} is not spanned by basis morphisms",
                    phi,
                    p.name(a),
                    p.name(c)
                )),
                Some(coef) => {
                    let total: usize =
                        ms.iter().zip(&coef).filter(|(_, x)| !x.is_zero()).map(|(m, _)| m.rank()).sum();
                    if total != phi.rank() {
                        w.push(format!(
                            "product {:?} from {} to {} has rank {} but its basis expansion has rank sum {}",
                            phi,
                            p.name(a),
                            p.name(c),
                            phi.rank(),
                            total
                        ));
                    }
                }
            }
        }
        ConditionResult::from_witnesses(w)
    }

    /// Every nonzero product f m_i is a basis vector.
    pub fn verify_multiplicative(&self) -> MultiplicativeReport {
        let mut failures = Vec::new();
        for m in &self.morphisms {
            for pr in self.products(m) {
                if !pr.coefficient.is_one() {
                    failures.push(format!(
                        "{} m_{}^{} = {} m_{}^{}",
                        self.morphism_label(m),
                        pr.source + 1,
                        self.presentation.name(m.from()),
                        pr.coefficient,
                        pr.target + 1,
                        self.presentation.name(m.to())
                    ));
                }
            }
        }
        let rank = self.rank();
        MultiplicativeReport { multiplicative: failures.is_empty() && rank <= 2, rank, failures }
    }

    /// Multiplicative, and reduced unless the characteristic is 2.
    pub fn accepted(&self) -> bool {
        self.verify_multiplicative().multiplicative
            && (self.check_conditions().e.pass || self.field().characteristic() == 2)
    }

    pub fn morphism_label(&self, m: &Morphism) -> String {
        format!(
            "{}:{}->{}",
            m.base.label(),
            self.presentation.name(m.from()),
            self.presentation.name(m.to())
        )
    }

    pub fn summary(&self) -> BasisSummary {
        let p = &self.presentation;
        let vectors = self
            .bases
            .iter()
            .map(|t| {
                let a = t.object;
                VectorSummary {
                    object: p.name(a).into(),
                    vectors: t.vectors.iter().map(|v| v.iter().map(|x| x.entry_string()).collect()).collect(),
                    scales: self.vector_scales[a].clone(),
                }
            })
            .collect();
        let morphisms = self.morphisms.iter().map(|m| self.morphism_summary(m)).collect();
        let excluded = self.excluded.iter().map(|m| self.morphism_summary(m)).collect();
        BasisSummary { mode: self.mode, vectors, morphisms, excluded, rank: self.rank() }
    }

    fn morphism_summary(&self, m: &Morphism) -> MorphismSummary {
        let p = &self.presentation;
        MorphismSummary {
            from: p.name(m.from()).into(),
            to: p.name(m.to()).into(),
            matrix: m.base.matrix.to_strings(),
            kind: m.kind(),
            positions: m.base.positions.clone(),
            parameter: (m.kind() == MorphismKind::Double).then(|| m.parameter.clone()),
            scale: m.scale.clone(),
            short: m.base.short,
            products: self
                .products(m)
                .into_iter()
                .map(|pr| ProductSummary {
                    source: pr.source + 1,
                    target: pr.target + 1,
                    coefficient: pr.coefficient,
                })
                .collect(),
        }
    }
}

fn solve_combination(basis: &Matrix, target: &[ExactScalar], n: usize) -> Option<Vec<ExactScalar>> {
    let k = basis.rows();
    if k == 0 {
        return target.iter().all(ExactScalar::is_zero).then(Vec::new);
    }
    // columns of the system are basis vectors, last column is the target
    let field = basis.field();
    let mut rows = Vec::with_capacity(n);
    for i in 0..n {
        let mut r: Vec<ExactScalar> = (0..k).map(|l| basis.get(l, i).clone()).collect();
        r.push(target[i].clone());
        rows.push(r);
    }
    let (red, pivots) = Matrix::from_rows(field, rows).rref();
    if pivots.contains(&k) {
        return None;
    }
    let mut x = vec![field.zero(); k];
    for (r, &c) in pivots.iter().enumerate() {
        x[c] = red.get(r, k).clone();
    }
    Some(x)
}

/// Coordinates of a hom matrix in the span of given matrices, if it lies there.
pub fn decompose(field: Field, mats: &[Matrix], target: &Matrix) -> Option<Vec<ExactScalar>> {
    let basis = Matrix::from_rows(field, mats.iter().map(|m| m.as_vec().to_vec()).collect());
    if mats.is_empty() {
        return target.is_zero().then(Vec::new);
    }
    solve_combination(&basis, target.as_vec(), target.rows() * target.cols())
}

pub fn unit_span(field: Field, rows: usize, cols: usize, units: &[Step]) -> Subspace {
    Subspace::span(field, rows * cols, units.iter().map(|&u| unit_vector(field, rows, cols, u)))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConditionResult {
    pub pass: bool,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub witnesses: Vec<String>,
}

impl ConditionResult {
    fn from_witnesses(witnesses: Vec<String>) -> Self {
        ConditionResult { pass: witnesses.is_empty(), witnesses }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConditionReport {
    pub a: ConditionResult,
    pub b: ConditionResult,
    pub c: ConditionResult,
    pub d: ConditionResult,
    pub e: ConditionResult,
}

impl ConditionReport {
    pub fn all_pass(&self) -> bool {
        [&self.a, &self.b, &self.c, &self.d, &self.e].iter().all(|c| c.pass)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MultiplicativeReport {
    pub multiplicative: bool,
    pub rank: usize,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub failures: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ProductSummary {
    pub source: usize,
    pub target: usize,
    pub coefficient: Scale,
}

#[derive(Debug, Clone, Serialize)]
pub struct MorphismSummary {
    pub from: String,
    pub to: String,
    pub matrix: Vec<Vec<String>>,
    pub kind: MorphismKind,
    pub positions: Vec<Step>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub parameter: Option<Scale>,
    pub scale: Scale,
    pub short: bool,
    pub products: Vec<ProductSummary>,
}

#[derive(Debug, Clone, Serialize)]
pub struct VectorSummary {
    pub object: String,
    pub vectors: Vec<Vec<String>>,
    pub scales: Vec<Scale>,
}

#[derive(Debug, Clone, Serialize)]
pub struct BasisSummary {
    pub mode: Mode,
    pub vectors: Vec<VectorSummary>,
    pub morphisms: Vec<MorphismSummary>,
    pub excluded: Vec<MorphismSummary>,
    pub rank: usize,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classify::classify_all;
    use crate::triangular::{rebase, triangular_bases};

    fn build(text: &str, mode: Mode) -> ClassifiedBasis {
        let p = Presentation::parse(text).unwrap();
        let bases = triangular_bases(&p).unwrap();
        let q = rebase(&p, &bases);
        let cls = classify_all(&q).unwrap();
        build_reduced_basis(&q, bases, cls, mode)
    }

    #[test]
    fn two_step_has_one_double() {
        let b = build(include_str!("../corpus/two_step.json"), Mode::Numeric);
        assert_eq!(b.doubles().count(), 1);
        assert_eq!(b.rank(), 2);
        assert!(b.excluded.is_empty());
        assert!(b.check_conditions().all_pass());
        // λ = 2 sits on the second product before rescaling
        let (_, d) = b.doubles().next().unwrap();
        let coeffs: Vec<String> = b.products(d).iter().map(|p| p.coefficient.to_string()).collect();
        assert_eq!(coeffs, ["+1", "+2^{1}"]);
        assert!(!b.accepted());
    }

    #[test]
    fn norming_fails_when_rescaled_badly() {
        let mut b = build(include_str!("../corpus/two_step.json"), Mode::Numeric);
        let k = b.morphisms.iter().position(|m| m.kind() == MorphismKind::Double).unwrap();
        b.morphisms[k].scale = Scale::from_scalar(&b.field().from_int(3)).unwrap();
        let c = b.check_conditions();
        assert!(!c.d.pass);
        assert!(c.a.pass && c.b.pass && c.c.pass);
    }

    #[test]
    fn three_doubles_drop_one_short() {
        let b = build(include_str!("../corpus/three_doubles.json"), Mode::Numeric);
        assert_eq!(b.excluded.len(), 1);
        let x = &b.excluded[0];
        assert!(x.base.short);
        assert_eq!(x.base.positions, [Step::new(0, 0), Step::new(2, 2)]);
        assert_eq!(b.double_count(0, 2), 3);
        assert_eq!(b.pair_morphisms(0, 2).iter().filter(|m| m.kind() == MorphismKind::Double).count(), 2);
    }

    #[test]
    fn long_double_parameter_is_a_product() {
        let b = build(include_str!("../corpus/three_doubles.json"), Mode::Symbolic);
        let long: Vec<&Morphism> = b.doubles().map(|(_, m)| m).filter(|m| !m.base.short).collect();
        assert_eq!(long.len(), 1);
        let shorts: Vec<Scale> = b
            .doubles()
            .map(|(_, m)| m)
            .filter(|m| m.base.short && m.from() != m.to() && !(m.from() == 0 && m.to() == 2))
            .map(|m| m.parameter.clone())
            .collect();
        assert_eq!(shorts.len(), 2);
        assert_eq!(long[0].parameter, shorts[0].mul(&shorts[1]));
        assert!(b.notices.is_empty());
    }

    #[test]
    fn composites_of_chain() {
        let b = build(include_str!("../corpus/d2_chain.json"), Mode::Numeric);
        assert!(b.composite_products().is_empty());
        let b = build(include_str!("../corpus/d3_double.json"), Mode::Numeric);
        // (e21 + 2 e32)^2 = 2 e31
        assert_eq!(b.composite_products().len(), 1);
    }
}
