//! The poset of layers a_i and the comparability conditions on doubles and triples.

use serde::Serialize;

use crate::basis::ClassifiedBasis;
use crate::certificate::Certificate;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Element {
    pub object: usize,
    /// zero-based layer
    pub layer: usize,
}

#[derive(Debug, Clone)]
pub struct Poset {
    pub names: Vec<String>,
    pub dims: Vec<usize>,
    pub elements: Vec<Element>,
    /// leq[x][y] iff elements[x] ≤ elements[y]
    pub leq: Vec<Vec<bool>>,
}

impl Poset {
    /// Poset on the given layers with the reflexive-transitive closure of `relations`.
    pub fn from_relations(names: Vec<String>, dims: Vec<usize>, relations: &[(Element, Element)]) -> Result<Self, Certificate> {
        let elements: Vec<Element> = dims
            .iter()
            .enumerate()
            .flat_map(|(object, &d)| (0..d).map(move |layer| Element { object, layer }))
            .collect();
        let n = elements.len();
        let mut leq = vec![vec![false; n]; n];
        for (i, row) in leq.iter_mut().enumerate() {
            row[i] = true;
        }
        let mut p = Poset { names, dims, elements, leq };
        for (x, y) in relations {
            let (i, j) = (p.index(*x), p.index(*y));
            p.leq[i][j] = true;
        }
        for k in 0..n {
            for i in 0..n {
                if p.leq[i][k] {
                    for j in 0..n {
                        if p.leq[k][j] {
                            p.leq[i][j] = true;
                        }
                    }
                }
            }
        }
        for i in 0..n {
            for j in i + 1..n {
                if p.leq[i][j] && p.leq[j][i] {
                    return Err(Certificate::new(
                        "cycle",
                        vec![p.label(p.elements[i]), p.label(p.elements[j])],
                    )
                    .with_detail("the closure of the product relation is not antisymmetric"));
                }
            }
        }
        Ok(p)
    }

    pub fn index(&self, e: Element) -> usize {
        self.dims[..e.object].iter().sum::<usize>() + e.layer
    }

    pub fn label(&self, e: Element) -> String {
        format!("{}_{}", self.names[e.object], e.layer + 1)
    }

    pub fn le(&self, x: Element, y: Element) -> bool {
        self.leq[self.index(x)][self.index(y)]
    }

    pub fn lt(&self, x: Element, y: Element) -> bool {
        x != y && self.le(x, y)
    }

    pub fn comparable(&self, x: Element, y: Element) -> bool {
        self.le(x, y) || self.le(y, x)
    }

    pub fn layers(&self, object: usize) -> Vec<Element> {
        (0..self.dims[object]).map(|layer| Element { object, layer }).collect()
    }

    fn objects_of_dim(&self, d: usize) -> Vec<usize> {
        (0..self.dims.len()).filter(|&a| self.dims[a] == d).collect()
    }

    pub fn check_conditions(&self) -> Vec<Certificate> {
        let mut out = self.check_triples_total();
        out.extend(self.check_crossings());
        out.extend(self.check_triples_against_doubles());
        out
    }

    /// All triples together are totally ordered.
    pub fn check_triples_total(&self) -> Vec<Certificate> {
        let triples = self.objects_of_dim(3);
        let mut out = Vec::new();
        for (k, &a) in triples.iter().enumerate() {
            for &b in &triples[k + 1..] {
                for x in self.layers(a) {
                    for y in self.layers(b) {
                        if !self.comparable(x, y) {
                            out.push(
                                Certificate::new("lemma6", vec![self.label(x), self.label(y)])
                                    .with_handle(format!("lemma6({},{})", x.layer + 1, y.layer + 1)),
                            );
                        }
                    }
                }
            }
        }
        out
    }

    fn crossing(&self, a: usize, b: usize) -> Option<[Element; 4]> {
        for ai in self.layers(a) {
            for ai2 in self.layers(a) {
                if ai == ai2 {
                    continue;
                }
                for bj in self.layers(b) {
                    for bj2 in self.layers(b) {
                        if bj != bj2 && !self.comparable(ai, bj2) && !self.comparable(bj, ai2) {
                            return Some([ai, bj2, bj, ai2]);
                        }
                    }
                }
            }
        }
        None
    }

    fn three_crossing(&self, a: usize, b: usize, c: usize) -> Option<[Element; 6]> {
        let pairs = |o: usize| {
            let ls = self.layers(o);
            let mut v = Vec::new();
            for &x in &ls {
                for &y in &ls {
                    if x != y {
                        v.push((x, y));
                    }
                }
            }
            v
        };
        for (ai, ai2) in pairs(a) {
            for (bj, bj2) in pairs(b) {
                if self.comparable(ai, bj2) {
                    continue;
                }
                for (cl, cl2) in pairs(c) {
                    if !self.comparable(bj, cl2) && !self.comparable(cl, ai2) {
                        return Some([ai, bj2, bj, cl2, cl, ai2]);
                    }
                }
            }
        }
        None
    }

    /// No crossing incomparabilities between two or three objects.
    pub fn check_crossings(&self) -> Vec<Certificate> {
        let n = self.dims.len();
        let mut out = Vec::new();
        for a in 0..n {
            for b in a + 1..n {
                if let Some(es) = self.crossing(a, b) {
                    out.push(
                        Certificate::new("lemma7", es.iter().map(|&e| self.label(e)).collect())
                            .with_handle("lemma7_two"),
                    );
                }
            }
        }
        for a in 0..n {
            for b in a + 1..n {
                for c in b + 1..n {
                    let found = [(a, b, c), (a, c, b)]
                        .into_iter()
                        .find_map(|(x, y, z)| self.three_crossing(x, y, z));
                    if let Some(es) = found {
                        out.push(
                            Certificate::new("lemma7", es.iter().map(|&e| self.label(e)).collect())
                                .with_handle("lemma7_three"),
                        );
                    }
                }
            }
        }
        out
    }

    /// Each triple has at least two elements comparable with every element of every double.
    pub fn check_triples_against_doubles(&self) -> Vec<Certificate> {
        let doubles = self.objects_of_dim(2);
        let mut out = Vec::new();
        for a in self.objects_of_dim(3) {
            // for each layer, the first double element it fails to compare with
            let bad: Vec<(Element, Element)> = self
                .layers(a)
                .into_iter()
                .filter_map(|x| {
                    doubles
                        .iter()
                        .flat_map(|&b| self.layers(b))
                        .find(|&y| !self.comparable(x, y))
                        .map(|y| (x, y))
                })
                .collect();
            if bad.len() >= 2 {
                let (x1, y1) = bad[0];
                // prefer two different doubles when possible
                let (x2, y2) = bad[1..]
                    .iter()
                    .copied()
                    .find(|&(x, y)| {
                        y.object != y1.object
                            || doubles.iter().any(|&c| c != y1.object && self.layers(c).iter().any(|&z| !self.comparable(x, z)))
                    })
                    .map(|(x, y)| {
                        if y.object != y1.object {
                            (x, y)
                        } else {
                            let z = doubles
                                .iter()
                                .flat_map(|&c| self.layers(c))
                                .find(|&z| z.object != y1.object && !self.comparable(x, z))
                                .unwrap();
                            (x, z)
                        }
                    })
                    .unwrap_or(bad[1]);
                let handle = if y1.object != y2.object { "lemma8_case1" } else { "lemma8_case2" };
                out.push(
                    Certificate::new(
                        "lemma8",
                        vec![self.label(x1), self.label(y1), self.label(x2), self.label(y2)],
                    )
                    .with_handle(handle),
                );
            }
        }
        out
    }

    pub fn summary(&self) -> PosetSummary {
        let mut covers = Vec::new();
        for &x in &self.elements {
            for &y in &self.elements {
                if self.lt(x, y) && !self.elements.iter().any(|&z| self.lt(x, z) && self.lt(z, y)) {
                    covers.push((self.label(x), self.label(y)));
                }
            }
        }
        PosetSummary { elements: self.elements.iter().map(|&e| self.label(e)).collect(), covers }
    }
}

pub fn build_poset(b: &ClassifiedBasis) -> Result<Poset, Certificate> {
    let p = &b.presentation;
    let mut rel = Vec::new();
    for m in &b.morphisms {
        for pr in b.products(m) {
            rel.push((
                Element { object: m.from(), layer: pr.source },
                Element { object: m.to(), layer: pr.target },
            ));
        }
    }
    Poset::from_relations(
        p.objects.iter().map(|o| o.name.clone()).collect(),
        p.objects.iter().map(|o| o.dim).collect(),
        &rel,
    )
}

#[derive(Debug, Clone, Serialize)]
pub struct PosetSummary {
    pub elements: Vec<String>,
    pub covers: Vec<(String, String)>,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(object: usize, layer: usize) -> Element {
        Element { object, layer }
    }

    fn names(n: &[&str]) -> Vec<String> {
        n.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn closure_and_order_laws() {
        let p = Poset::from_relations(
            names(&["a", "b", "c"]),
            vec![1, 1, 1],
            &[(e(0, 0), e(1, 0)), (e(1, 0), e(2, 0))],
        )
        .unwrap();
        assert!(p.lt(e(0, 0), e(2, 0)));
        assert!(!p.comparable(e(0, 0), e(0, 0)) || p.le(e(0, 0), e(0, 0)));
    }

    #[test]
    fn cycle_is_certified() {
        let c = Poset::from_relations(names(&["a", "b"]), vec![1, 1], &[(e(0, 0), e(1, 0)), (e(1, 0), e(0, 0))])
            .unwrap_err();
        assert_eq!(c.lemma, "cycle");
    }

    #[test]
    fn incomparable_triples() {
        let mut rel = vec![(e(0, 0), e(0, 1)), (e(0, 1), e(0, 2)), (e(1, 0), e(1, 1)), (e(1, 1), e(1, 2))];
        rel.extend([(e(0, 0), e(1, 0)), (e(0, 1), e(1, 1)), (e(1, 2), e(0, 2))]);
        let p = Poset::from_relations(names(&["a", "b"]), vec![3, 3], &rel).unwrap();
        let certs = p.check_conditions();
        assert_eq!(certs.len(), 1);
        assert_eq!(certs[0].lemma, "lemma6");
        assert_eq!(certs[0].elements, vec!["a_2", "b_1"]);
        assert_eq!(certs[0].witness_handle.as_deref(), Some("lemma6(2,1)"));
    }

    #[test]
    fn crossing_doubles() {
        let rel = [(e(0, 0), e(0, 1)), (e(1, 0), e(1, 1))];
        let p = Poset::from_relations(names(&["a", "b"]), vec![2, 2], &rel).unwrap();
        let certs = p.check_crossings();
        assert_eq!(certs.len(), 1);
        assert_eq!(certs[0].witness_handle.as_deref(), Some("lemma7_two"));
    }
}
