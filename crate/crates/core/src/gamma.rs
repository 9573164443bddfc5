//! The arrow graph Γ of short double basis morphisms and its local conditions.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt::Write as _;

use serde::Serialize;

use crate::basis::ClassifiedBasis;
use crate::certificate::Certificate;
use crate::classify::MorphismKind;
use crate::poset::{Element, Poset};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Arrow {
    pub source: Element,
    pub target: Element,
    pub pair: usize,
    pub weak: bool,
    /// The coefficient-1 member of its pair.
    pub leading: bool,
}

/// One connected pair per short double basis morphism.
#[derive(Debug, Clone)]
pub struct ArrowGraph {
    pub arrows: Vec<Arrow>,
    /// Index into `ClassifiedBasis::morphisms` of each pair's double, if it came from one.
    pub pair_morphism: Vec<Option<usize>>,
}

impl ArrowGraph {
    pub fn pairs(&self) -> usize {
        self.pair_morphism.len()
    }

    /// The two arrows of a pair, leading member first.
    pub fn pair_arrows(&self, pair: usize) -> (&Arrow, &Arrow) {
        let mut it = self.arrows.iter().filter(|a| a.pair == pair);
        let x = it.next().expect("pair has two arrows");
        let y = it.next().expect("pair has two arrows");
        if x.leading {
            (x, y)
        } else {
            (y, x)
        }
    }

    pub fn partner(&self, arrow: &Arrow) -> &Arrow {
        let (x, y) = self.pair_arrows(arrow.pair);
        if x == arrow {
            y
        } else {
            x
        }
    }

    /// Adds a connected pair that no basis morphism backs (used to build mutated graphs).
    pub fn add_pair(&mut self, first: (Element, Element), second: (Element, Element), weak: bool) {
        let pair = self.pair_morphism.len();
        self.pair_morphism.push(None);
        self.arrows.push(Arrow { source: first.0, target: first.1, pair, weak, leading: true });
        self.arrows.push(Arrow { source: second.0, target: second.1, pair, weak, leading: false });
        self.sort();
    }

    fn sort(&mut self) {
        self.arrows.sort_by_key(|a| (a.source, a.target, a.pair));
    }

    pub fn to_dot(&self, poset: &Poset) -> String {
        let mut s = String::from("digraph gamma {\n");
        for &e in &poset.elements {
            let _ = writeln!(s, "  \"{}\";", poset.label(e));
        }
        for a in &self.arrows {
            let _ = writeln!(
                s,
                "  \"{}\" -> \"{}\" [label=\"{}\", style={}];",
                poset.label(a.source),
                poset.label(a.target),
                a.pair,
                if a.weak { "dashed" } else { "solid" }
            );
        }
        s.push_str("}\n");
        s
    }

    pub fn summary(&self, poset: &Poset) -> GammaSummary {
        GammaSummary {
            arrows: self
                .arrows
                .iter()
                .map(|a| ArrowSummary {
                    source: poset.label(a.source),
                    target: poset.label(a.target),
                    pair: a.pair,
                    weak: a.weak,
                })
                .collect(),
        }
    }
}

pub fn build_gamma(b: &ClassifiedBasis) -> ArrowGraph {
    let mut g = ArrowGraph { arrows: Vec::new(), pair_morphism: Vec::new() };
    for (idx, m) in b.morphisms.iter().enumerate() {
        if m.kind() != MorphismKind::Double || !m.base.short {
            continue;
        }
        let (a, c) = (m.from(), m.to());
        let weak = b.double_count(a, c) == 3;
        let pair = g.pair_morphism.len();
        g.pair_morphism.push(Some(idx));
        for (k, pos) in m.base.positions.iter().enumerate() {
            g.arrows.push(Arrow {
                source: Element { object: a, layer: pos.col },
                target: Element { object: c, layer: pos.row },
                pair,
                weak,
                leading: k == 0,
            });
        }
    }
    g.sort();
    g
}

pub fn check_gamma_conditions(g: &ArrowGraph, p: &Poset, b: &ClassifiedBasis) -> Vec<Certificate> {
    let mut out = check_through_paths(g, p, b);
    out.extend(check_partner_ends(g, p));
    out.extend(check_vertex_degrees(g, p));
    out.extend(check_triple_pairs(g, p));
    out
}

/// Strong connected paths from (main, partner) states; true if main reaches `goal`
/// through `via` while the partner ends in `goal`'s object after passing `via`'s object.
fn strong_paths_exist(g: &ArrowGraph, p: &Poset, start: Element, via: Element, goal: Element) -> bool {
    let starts: Vec<Element> = p.layers(start.object).into_iter().filter(|&e| e != start).collect();
    let mut seen = BTreeSet::new();
    let mut queue = VecDeque::new();
    for s in starts {
        let st = (start, s, start == via, s.object == via.object);
        seen.insert(st);
        queue.push_back(st);
    }
    while let Some((m, q, mv, qv)) = queue.pop_front() {
        if m == goal && q.object == goal.object && mv && qv {
            return true;
        }
        for a in g.arrows.iter().filter(|a| !a.weak && a.source == m) {
            let partner = g.partner(a);
            if partner.source != q {
                continue;
            }
            let next = (a.target, partner.target, mv || a.target == via, qv || partner.target.object == via.object);
            if seen.insert(next) {
                queue.push_back(next);
            }
        }
    }
    false
}

pub fn check_through_paths(g: &ArrowGraph, p: &Poset, b: &ClassifiedBasis) -> Vec<Certificate> {
    let mut out = Vec::new();
    for arrow in &g.arrows {
        let (ai, cr) = (arrow.source, arrow.target);
        for &bj in &p.elements {
            if !(p.lt(ai, bj) && p.lt(bj, cr)) {
                continue;
            }
            let (a, bo, c) = (ai.object, bj.object, cr.object);
            let mut failures = Vec::new();
            if a == bo || bo == c || a == c {
                failures.push("objects not pairwise distinct".to_string());
            } else {
                if ai.layer != cr.layer {
                    failures.push("layers differ".into());
                }
                let counts = (b.double_count(a, bo), b.double_count(bo, c), b.double_count(a, c));
                if counts != (1, 1, 3) {
                    failures.push(format!("double counts {counts:?}"));
                }
                if !arrow.weak {
                    failures.push("arrow is strong".into());
                }
                if !strong_paths_exist(g, p, ai, bj, cr) {
                    failures.push("no pair of connected strong paths".into());
                }
                let pairs: BTreeSet<usize> =
                    g.arrows.iter().filter(|x| x.source.object == a && x.target.object == c).map(|x| x.pair).collect();
                if pairs.len() != 1 {
                    failures.push(format!("{} arrow pairs between the objects", pairs.len()));
                }
            }
            if !failures.is_empty() {
                out.push(
                    Certificate::new("lemma9", vec![p.label(ai), p.label(bj), p.label(cr)])
                        .with_detail(failures.join("; ")),
                );
            }
        }
    }
    out
}

pub fn check_partner_ends(g: &ArrowGraph, p: &Poset) -> Vec<Certificate> {
    let mut out = Vec::new();
    let mut seen = BTreeSet::new();
    for (i, x) in g.arrows.iter().enumerate() {
        for y in &g.arrows[i + 1..] {
            if x.pair == y.pair {
                continue;
            }
            let (px, py) = (g.partner(x), g.partner(y));
            let kinds = [
                (x.source == y.source && px.source == py.source, "source", x.source, px.source),
                (x.target == y.target && px.target == py.target, "target", x.target, px.target),
            ];
            for (bad, kind, shared, partner) in kinds {
                if bad && seen.insert((kind, shared, partner)) {
                    out.push(
                        Certificate::new("lemma10", vec![p.label(shared), p.label(partner)])
                            .with_detail(format!("two pairs share the {kind} at both ends")),
                    );
                }
            }
        }
    }
    out
}

pub fn check_vertex_degrees(g: &ArrowGraph, p: &Poset) -> Vec<Certificate> {
    let mut out = Vec::new();
    let mut outdeg: BTreeMap<Element, usize> = BTreeMap::new();
    let mut indeg: BTreeMap<Element, usize> = BTreeMap::new();
    for a in &g.arrows {
        *outdeg.entry(a.source).or_default() += 1;
        *indeg.entry(a.target).or_default() += 1;
    }
    for (dir, degs) in [("out", &outdeg), ("in", &indeg)] {
        for (&v, &k) in degs {
            let limit = match p.dims[v.object] {
                2 => 1,
                3 => 2,
                _ => continue,
            };
            if k > limit {
                out.push(
                    Certificate::new("lemma11", vec![p.label(v)])
                        .with_detail(format!("{k} arrows {dir} of a vertex allowing {limit}")),
                );
            }
        }
    }
    out
}

pub fn check_triple_pairs(g: &ArrowGraph, p: &Poset) -> Vec<Certificate> {
    let mut out = Vec::new();
    for t in (0..p.dims.len()).filter(|&a| p.dims[a] == 3) {
        for (dir, leaving) in [("leaving", true), ("entering", false)] {
            let pairs: BTreeSet<usize> = g
                .arrows
                .iter()
                .filter(|a| if leaving { a.source.object == t } else { a.target.object == t })
                .map(|a| a.pair)
                .collect();
            if pairs.len() > 2 {
                out.push(
                    Certificate::new("lemma12", vec![p.names[t].clone()])
                        .with_detail(format!("{} pairs {dir} the triple", pairs.len())),
                );
            }
        }
    }
    out
}

#[derive(Debug, Clone, Serialize)]
pub struct ArrowSummary {
    pub source: String,
    pub target: String,
    pub pair: usize,
    pub weak: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct GammaSummary {
    pub arrows: Vec<ArrowSummary>,
}
