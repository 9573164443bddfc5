//! The multiplicative system over Γ: weight-function obstructions and rescaling solutions.

use std::collections::BTreeMap;

use num_integer::Integer;
use serde::Serialize;
use thiserror::Error;

use crate::basis::ClassifiedBasis;
use crate::gamma::{Arrow, ArrowGraph};
use crate::lattice::{hermite, left_kernel, smith, IntMatrix};
use crate::monomial::{Exponent, RadMonomial, Scale};
use crate::poset::{Element, Poset};
use crate::scalar::{DiscreteLog, ExactScalar};

/// One row per connected pair: λ_j x_{p(j1)} / x_{p(j2)} = x_{q(j1)} / x_{q(j2)}.
#[derive(Debug, Clone)]
pub struct ExponentSystem {
    pub vertices: Vec<Element>,
    pub labels: Vec<String>,
    pub rows: IntMatrix,
    pub rhs: Vec<Scale>,
    /// (p1, p2, q1, q2) vertex indices per row
    pub index: Vec<[usize; 4]>,
    /// arrow labels (leading, second) per row
    pub arrows: Vec<(String, String)>,
    /// identity of the coefficient group in use
    pub one: Scale,
}

fn arrow_label(p: &Poset, a: &Arrow) -> String {
    format!("{}->{}#{}", p.label(a.source), p.label(a.target), a.pair)
}

/// Builds the system from Γ with one parameter per pair (indexed by pair id).
pub fn system_from_graph(p: &Poset, g: &ArrowGraph, params: &[Scale], one: Scale) -> ExponentSystem {
    let vertices = p.elements.clone();
    let labels = vertices.iter().map(|&e| p.label(e)).collect();
    let mut rows = Vec::new();
    let mut index = Vec::new();
    let mut arrows = Vec::new();
    for pair in 0..g.pairs() {
        let (lead, second) = g.pair_arrows(pair);
        let ix = [
            p.index(lead.source),
            p.index(second.source),
            p.index(lead.target),
            p.index(second.target),
        ];
        let mut row = vec![0i128; vertices.len()];
        row[ix[2]] += 1;
        row[ix[1]] += 1;
        row[ix[0]] -= 1;
        row[ix[3]] -= 1;
        rows.push(row);
        index.push(ix);
        arrows.push((arrow_label(p, lead), arrow_label(p, second)));
    }
    ExponentSystem { vertices, labels, rows, rhs: params.to_vec(), index, arrows, one }
}

pub fn exponent_system(b: &ClassifiedBasis, p: &Poset, g: &ArrowGraph) -> ExponentSystem {
    let params: Vec<Scale> = g
        .pair_morphism
        .iter()
        .map(|m| b.morphisms[m.expect("pair from a basis double")].parameter.clone())
        .collect();
    let one = b.vector_scales.iter().flatten().next().cloned().unwrap_or_else(|| Scale::one_for(b.field()));
    system_from_graph(p, g, &params, one)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WeightFunction {
    pub z: BTreeMap<String, i64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ObstructionCertificate {
    pub z: BTreeMap<String, i64>,
    pub residual: Scale,
    pub kernel: Vec<i64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RescalingSolution {
    pub x: BTreeMap<String, Scale>,
    #[serde(skip)]
    pub values: Vec<Scale>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RescaleError {
    #[error("weight function with residual {}", .0.residual)]
    Obstructed(ObstructionCertificate),
    #[error("no root in the prime field: {congruence}")]
    UnsolvableRoot { congruence: String },
}

impl ExponentSystem {
    pub fn weight_function(&self, kernel: &[i64]) -> WeightFunction {
        let mut z = BTreeMap::new();
        for (j, &k) in kernel.iter().enumerate() {
            if k == 0 {
                continue;
            }
            let (lead, second) = &self.arrows[j];
            *z.entry(lead.clone()).or_insert(0) += k;
            *z.entry(second.clone()).or_insert(0) -= k;
        }
        z.retain(|_, v| *v != 0);
        WeightFunction { z }
    }

    /// Conservation of flow at every vertex, with z(second) = -z(leading) on every pair.
    pub fn weight_axioms_hold(&self, kernel: &[i64]) -> bool {
        let mut flow = vec![0i128; self.vertices.len()];
        for (j, &k) in kernel.iter().enumerate() {
            let [p1, p2, q1, q2] = self.index[j];
            let k = k as i128;
            flow[p1] -= k;
            flow[q1] += k;
            flow[p2] += k;
            flow[q2] -= k;
        }
        flow.iter().all(|&f| f == 0)
    }

    pub fn residual(&self, kernel: &[i64]) -> Scale {
        kernel
            .iter()
            .zip(&self.rhs)
            .fold(self.one.clone(), |acc, (&k, l)| acc.mul(&l.pow_int(k)))
    }

    /// Integer left-kernel generators with their residuals ∏ λ_j^{z_j}.
    pub fn weight_kernel(&self) -> Vec<(Vec<i64>, WeightFunction, Scale)> {
        if self.rows.is_empty() {
            return Vec::new();
        }
        left_kernel(&self.rows)
            .into_iter()
            .map(|z| {
                let z: Vec<i64> = z.into_iter().map(|v| v as i64).collect();
                let wf = self.weight_function(&z);
                let r = self.residual(&z);
                (z, wf, r)
            })
            .collect()
    }

    pub fn obstructions(&self) -> Vec<ObstructionCertificate> {
        self.weight_kernel()
            .into_iter()
            .filter(|(_, _, r)| !r.is_one())
            .map(|(kernel, wf, residual)| ObstructionCertificate { z: wf.z, residual, kernel })
            .collect()
    }

    /// Checks λ_j x_{p1} / x_{p2} = x_{q1} / x_{q2} for every row.
    pub fn verify(&self, x: &[Scale]) -> bool {
        self.index.iter().zip(&self.rhs).all(|(&[p1, p2, q1, q2], l)| {
            l.mul(&x[p1]).div(&x[p2]) == x[q1].div(&x[q2])
        })
    }

    pub fn solve(&self) -> Result<RescalingSolution, RescaleError> {
        if let Some(o) = self.obstructions().into_iter().next() {
            return Err(RescaleError::Obstructed(o));
        }
        let values = if self.rows.is_empty() {
            vec![self.one.clone(); self.vertices.len()]
        } else if let Some(Scale::Residue(r)) = self.rhs.first() {
            self.solve_prime(r.field().characteristic())?
        } else {
            self.solve_monomial()?
        };
        assert!(self.verify(&values), "rescaling solution fails substitution");
        let x = self.labels.iter().cloned().zip(values.iter().cloned()).collect();
        Ok(RescalingSolution { x, values })
    }

    fn solve_monomial(&self) -> Result<Vec<Scale>, RescaleError> {
        let (u, h) = hermite(&self.rows);
        let n = self.vertices.len();
        let mono = |s: &Scale| match s {
            Scale::Mono(m) => m.clone(),
            Scale::Residue(_) => unreachable!("mixed coefficient kinds"),
        };
        let ub: Vec<RadMonomial> = u
            .iter()
            .map(|row| {
                row.iter()
                    .zip(&self.rhs)
                    .fold(RadMonomial::one(), |acc, (&k, l)| acc.mul(&mono(l).pow_int(k as i64)))
            })
            .collect();
        let mut y = vec![RadMonomial::one(); n];
        for k in (0..h.len()).rev() {
            let Some(c) = h[k].iter().position(|&v| v != 0) else {
                continue;
            };
            let mut rest = ub[k].clone();
            for l in c + 1..n {
                if h[k][l] != 0 {
                    rest = rest.div(&y[l].pow_int(h[k][l] as i64));
                }
            }
            y[c] = rest.pow(Exponent::new(1, h[k][c] as i64)).map_err(|e| RescaleError::UnsolvableRoot {
                congruence: format!("{}-th root of {}: {e}", h[k][c], rest),
            })?;
        }
        Ok(y.into_iter().map(Scale::Mono).collect())
    }

    fn solve_prime(&self, p: u64) -> Result<Vec<Scale>, RescaleError> {
        let dl = DiscreteLog::new(p);
        let n_mod = (p - 1) as i128;
        let logs: Vec<i128> = self
            .rhs
            .iter()
            .map(|s| match s {
                Scale::Residue(ExactScalar::Prime { residue, .. }) => dl.log(*residue).unwrap() as i128,
                _ => unreachable!("mixed coefficient kinds"),
            })
            .collect();
        let (u, d, v) = smith(&self.rows);
        let ul: Vec<i128> = u.iter().map(|row| row.iter().zip(&logs).map(|(a, b)| a * b).sum::<i128>()).collect();
        let cols = self.vertices.len();
        let mut z = vec![0i128; cols];
        for (i, rhs) in ul.iter().enumerate() {
            let di = if i < cols { d[i][i] } else { 0 };
            let r = rhs.rem_euclid(n_mod);
            let g = di.gcd(&n_mod);
            if r % g != 0 {
                return Err(RescaleError::UnsolvableRoot {
                    congruence: format!("{di}·z ≡ {r} (mod {n_mod})"),
                });
            }
            if di != 0 {
                // (di/g) z ≡ r/g mod n/g
                let m = n_mod / g;
                let inv = mod_inverse((di / g).rem_euclid(m), m);
                z[i] = ((r / g) * inv).rem_euclid(m);
            }
        }
        let y: Vec<i128> = v.iter().map(|row| row.iter().zip(&z).map(|(a, b)| a * b).sum()).collect();
        Ok(y.into_iter()
            .map(|e| Scale::Residue(ExactScalar::Prime { residue: dl.exp(e), modulus: p }))
            .collect())
    }
}

fn mod_inverse(a: i128, m: i128) -> i128 {
    if m == 1 {
        return 0;
    }
    let (mut old_r, mut r) = (a, m);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    old_s.rem_euclid(m)
}

/// Rescales vectors by x and each morphism so that its leading product has coefficient 1.
pub fn apply_rescaling(b: &ClassifiedBasis, p: &Poset, sol: &RescalingSolution) -> ClassifiedBasis {
    let mut out = b.clone();
    for (a, scales) in out.vector_scales.iter_mut().enumerate() {
        for (i, s) in scales.iter_mut().enumerate() {
            *s = sol.values[p.index(Element { object: a, layer: i })].clone();
        }
    }
    let xs = out.vector_scales.clone();
    for m in out.morphisms.iter_mut().chain(out.excluded.iter_mut()) {
        let lead = m.base.positions[0];
        m.scale = xs[m.base.from][lead.col].div(&xs[m.base.to][lead.row]);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{parse_rational, Field};

    fn e(object: usize, layer: usize) -> Element {
        Element { object, layer }
    }

    fn two_doubles() -> Poset {
        Poset::from_relations(
            vec!["a".into(), "b".into()],
            vec![2, 2],
            &[(e(0, 0), e(0, 1)), (e(1, 0), e(1, 1)), (e(0, 0), e(1, 0)), (e(0, 1), e(1, 1))],
        )
        .unwrap()
    }

    fn mono(s: &str) -> Scale {
        Scale::Mono(RadMonomial::from_rational(&parse_rational(s).unwrap()).unwrap())
    }

    #[test]
    fn single_pair_row() {
        let p = two_doubles();
        let mut g = ArrowGraph { arrows: vec![], pair_morphism: vec![] };
        g.add_pair((e(0, 0), e(1, 0)), (e(0, 1), e(1, 1)), false);
        let sys = system_from_graph(&p, &g, &[mono("2")], mono("1"));
        assert_eq!(sys.rows, vec![vec![-1, 1, 1, -1]]);
        let sol = sys.solve().unwrap();
        assert!(sys.verify(&sol.values));
        assert!(sys.weight_kernel().is_empty());
    }

    #[test]
    fn opposite_rows_obstruct_unless_product_is_one() {
        let p = two_doubles();
        let mut g = ArrowGraph { arrows: vec![], pair_morphism: vec![] };
        g.add_pair((e(0, 0), e(1, 0)), (e(0, 1), e(1, 1)), false);
        g.add_pair((e(0, 1), e(1, 1)), (e(0, 0), e(1, 0)), false);
        let ok = system_from_graph(&p, &g, &[mono("2"), mono("1/2")], mono("1"));
        let k = ok.weight_kernel();
        assert_eq!(k.len(), 1);
        assert!(k[0].0 == vec![1, 1] || k[0].0 == vec![-1, -1]);
        assert!(ok.obstructions().is_empty());
        assert!(ok.solve().is_ok());
        let bad = system_from_graph(&p, &g, &[mono("2"), mono("1")], mono("1"));
        let o = bad.obstructions();
        assert_eq!(o.len(), 1);
        assert!(o[0].residual == mono("2") || o[0].residual == mono("1/2"));
        assert!(bad.weight_axioms_hold(&o[0].kernel));
        assert!(matches!(bad.solve(), Err(RescaleError::Obstructed(_))));
    }

    #[test]
    fn prime_field_roots() {
        let f7 = Field::prime(7).unwrap();
        let p = two_doubles();
        let mut g = ArrowGraph { arrows: vec![], pair_morphism: vec![] };
        g.add_pair((e(0, 0), e(1, 0)), (e(0, 1), e(1, 1)), false);
        let sys = system_from_graph(&p, &g, &[Scale::Residue(f7.from_int(3))], Scale::one_for(f7));
        let sol = sys.solve().unwrap();
        assert!(sys.verify(&sol.values));
    }

    #[test]
    fn mod_inverse_small() {
        assert_eq!(mod_inverse(3, 7), 5);
        assert_eq!(mod_inverse(1, 1), 0);
    }
}
