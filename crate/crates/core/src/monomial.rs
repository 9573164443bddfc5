//! Formal radical monomials `±∏ g^{n/d}` and the coefficient group used for rescaling.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::{factorize, is_prime, ExactScalar, Field};

pub type Exponent = Ratio<i64>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MonomialError {
    #[error("fractional power with even denominator of a negative monomial")]
    NegativeBaseFractionalPower,
    #[error("zero has no monomial form")]
    Zero,
    #[error("rational {0} is too large to factor")]
    TooLarge(String),
    #[error("cannot parse monomial {0:?}")]
    Parse(String),
    #[error("mixed coefficient kinds: {0} and {1}")]
    Mixed(String, String),
}

/// A generator of the free part: a prime or a named symbol such as `λ_3`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Generator {
    Prime(u64),
    Symbol(String),
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Generator::Prime(p) => write!(f, "{p}"),
            Generator::Symbol(s) => write!(f, "{s}"),
        }
    }
}

/// Element of the multiplicative group `{±1} × ⊕_g g^ℚ`, kept in canonical form
/// (no zero exponents).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RadMonomial {
    negative: bool,
    factors: BTreeMap<Generator, Exponent>,
}

impl Default for RadMonomial {
    fn default() -> Self {
        Self::one()
    }
}

impl RadMonomial {
    pub fn one() -> Self {
        RadMonomial { negative: false, factors: BTreeMap::new() }
    }

    pub fn minus_one() -> Self {
        RadMonomial { negative: true, factors: BTreeMap::new() }
    }

    pub fn symbol(name: &str) -> Self {
        Self::generator(Generator::Symbol(name.to_string()), Exponent::one())
    }

    pub fn generator(g: Generator, e: Exponent) -> Self {
        let mut m = Self::one();
        if !e.is_zero() {
            m.factors.insert(g, e);
        }
        m
    }

    pub fn is_one(&self) -> bool {
        !self.negative && self.factors.is_empty()
    }

    pub fn is_negative(&self) -> bool {
        self.negative
    }

    pub fn factors(&self) -> &BTreeMap<Generator, Exponent> {
        &self.factors
    }

    /// Prime factorization of a nonzero rational.
    pub fn from_rational(q: &BigRational) -> Result<Self, MonomialError> {
        if q.is_zero() {
            return Err(MonomialError::Zero);
        }
        let too_large = || MonomialError::TooLarge(q.to_string());
        let num = q.numer().abs().to_u64().ok_or_else(too_large)?;
        let den = q.denom().to_u64().ok_or_else(too_large)?;
        let mut m = RadMonomial { negative: q.is_negative(), factors: BTreeMap::new() };
        for (p, e) in factorize(num) {
            m.factors.insert(Generator::Prime(p), Exponent::from_integer(e as i64));
        }
        for (p, e) in factorize(den) {
            m.factors.insert(Generator::Prime(p), Exponent::from_integer(-(e as i64)));
        }
        Ok(m)
    }

    /// Back to ℚ when only primes with integer exponents occur.
    pub fn to_rational(&self) -> Option<BigRational> {
        let mut acc = BigRational::one();
        for (g, e) in &self.factors {
            let Generator::Prime(p) = g else { return None };
            if !e.is_integer() {
                return None;
            }
            let base = BigRational::from_integer(BigInt::from(*p));
            let k = e.to_integer();
            let pw = num_traits::pow(base, k.unsigned_abs() as usize);
            acc = if k >= 0 { acc * pw } else { acc / pw };
        }
        Some(if self.negative { -acc } else { acc })
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        let mut factors = self.factors.clone();
        for (g, e) in &rhs.factors {
            let slot = factors.entry(g.clone()).or_insert_with(Exponent::zero);
            *slot += *e;
            if slot.is_zero() {
                factors.remove(g);
            }
        }
        RadMonomial { negative: self.negative ^ rhs.negative, factors }
    }

    pub fn inverse(&self) -> Self {
        RadMonomial {
            negative: self.negative,
            factors: self.factors.iter().map(|(g, e)| (g.clone(), -*e)).collect(),
        }
    }

    pub fn div(&self, rhs: &Self) -> Self {
        self.mul(&rhs.inverse())
    }

    /// Rational power. Negative monomials only admit exponents with odd denominator.
    pub fn pow(&self, q: Exponent) -> Result<Self, MonomialError> {
        if q.is_zero() {
            return Ok(Self::one());
        }
        if self.negative && q.denom() % 2 == 0 {
            return Err(MonomialError::NegativeBaseFractionalPower);
        }
        let negative = self.negative && q.numer() % 2 != 0;
        let factors = self.factors.iter().map(|(g, e)| (g.clone(), *e * q)).collect();
        Ok(RadMonomial { negative, factors })
    }

    pub fn pow_int(&self, k: i64) -> Self {
        self.pow(Exponent::from_integer(k)).expect("integer powers are total")
    }
}

fn exponent_string(e: &Exponent) -> String {
    if e.is_integer() {
        e.numer().to_string()
    } else {
        format!("{}/{}", e.numer(), e.denom())
    }
}

impl fmt::Display for RadMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(if self.negative { "-" } else { "+" })?;
        if self.factors.is_empty() {
            return f.write_str("1");
        }
        let parts: Vec<String> = self
            .factors
            .iter()
            .map(|(g, e)| format!("{g}^{{{}}}", exponent_string(e)))
            .collect();
        f.write_str(&parts.join("*"))
    }
}

impl FromStr for RadMonomial {
    type Err = MonomialError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || MonomialError::Parse(s.to_string());
        let (negative, body) = match s.chars().next() {
            Some('+') => (false, &s[1..]),
            Some('-') => (true, &s[1..]),
            _ => return Err(err()),
        };
        let mut m = RadMonomial { negative, factors: BTreeMap::new() };
        if body == "1" {
            return Ok(m);
        }
        for part in body.split('*') {
            let (name, exp) = part.split_once("^{").ok_or_else(err)?;
            let exp = exp.strip_suffix('}').ok_or_else(err)?;
            let g = if name.chars().all(|c| c.is_ascii_digit()) && !name.is_empty() {
                let p: u64 = name.parse().map_err(|_| err())?;
                if !is_prime(p) {
                    return Err(err());
                }
                Generator::Prime(p)
            } else {
                if name.is_empty()
                    || name.starts_with(|c: char| c.is_ascii_digit())
                    || name.contains(|c: char| c.is_whitespace() || "^*{}+-/".contains(c))
                {
                    return Err(err());
                }
                Generator::Symbol(name.to_string())
            };
            let e = match exp.split_once('/') {
                Some((n, d)) => {
                    let n: i64 = n.parse().map_err(|_| err())?;
                    let d: i64 = d.parse().map_err(|_| err())?;
                    if d == 0 {
                        return Err(err());
                    }
                    Exponent::new(n, d)
                }
                None => Exponent::from_integer(exp.parse().map_err(|_| err())?),
            };
            if e.is_zero() || m.factors.insert(g, e).is_some() {
                return Err(err());
            }
        }
        // canonical input lists generators sorted; reject anything else so strings round-trip
        if m.to_string() != s {
            return Err(err());
        }
        Ok(m)
    }
}

impl Serialize for RadMonomial {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for RadMonomial {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A nonzero coefficient: a radical monomial (ℚ and symbolic runs) or a residue (F_p runs).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Scale {
    Mono(RadMonomial),
    Residue(ExactScalar),
}

impl Scale {
    pub fn one_for(field: Field) -> Self {
        match field {
            Field::Rational => Scale::Mono(RadMonomial::one()),
            Field::Prime(_) => Scale::Residue(field.one()),
        }
    }

    pub fn from_scalar(s: &ExactScalar) -> Result<Self, MonomialError> {
        match s {
            ExactScalar::Rational(q) => Ok(Scale::Mono(RadMonomial::from_rational(q)?)),
            ExactScalar::Prime { .. } if s.is_zero() => Err(MonomialError::Zero),
            ExactScalar::Prime { .. } => Ok(Scale::Residue(s.clone())),
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Scale::Mono(m) => m.is_one(),
            Scale::Residue(r) => r.is_one(),
        }
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        match (self, rhs) {
            (Scale::Mono(a), Scale::Mono(b)) => Scale::Mono(a.mul(b)),
            (Scale::Residue(a), Scale::Residue(b)) => Scale::Residue(a * b),
            // a unit residue and the trivial monomial are interchangeable
            (Scale::Mono(m), r @ Scale::Residue(_)) | (r @ Scale::Residue(_), Scale::Mono(m))
                if m.is_one() =>
            {
                r.clone()
            }
            (a, b) => panic!("{}", MonomialError::Mixed(a.to_string(), b.to_string())),
        }
    }

    pub fn inverse(&self) -> Self {
        match self {
            Scale::Mono(m) => Scale::Mono(m.inverse()),
            Scale::Residue(r) => Scale::Residue(r.inv().expect("scales are nonzero")),
        }
    }

    pub fn div(&self, rhs: &Self) -> Self {
        self.mul(&rhs.inverse())
    }

    pub fn pow_int(&self, k: i64) -> Self {
        match self {
            Scale::Mono(m) => Scale::Mono(m.pow_int(k)),
            Scale::Residue(r) => {
                let ExactScalar::Prime { residue, modulus } = r else { unreachable!() };
                let base = if k < 0 {
                    crate::scalar::inv_mod(*residue, *modulus).unwrap()
                } else {
                    *residue
                };
                Scale::Residue(ExactScalar::Prime {
                    residue: crate::scalar::pow_mod(base, k.unsigned_abs(), *modulus),
                    modulus: *modulus,
                })
            }
        }
    }
}

impl fmt::Display for Scale {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scale::Mono(m) => write!(f, "{m}"),
            Scale::Residue(r) => write!(f, "{r}"),
        }
    }
}

impl FromStr for Scale {
    type Err = MonomialError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.contains(" mod ") {
            let r: ExactScalar = s.parse().map_err(|_| MonomialError::Parse(s.into()))?;
            return Ok(Scale::Residue(r));
        }
        Ok(Scale::Mono(s.parse()?))
    }
}

impl Serialize for Scale {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Scale {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::parse_rational;
    use proptest::prelude::*;

    fn q(s: &str) -> RadMonomial {
        RadMonomial::from_rational(&parse_rational(s).unwrap()).unwrap()
    }

    #[test]
    fn square_roots_multiply_out() {
        let r2 = q("2").pow(Exponent::new(1, 2)).unwrap();
        assert_eq!(r2.mul(&r2), q("2"));
        let l = Generator::Symbol("λ_1".into());
        let a = RadMonomial::generator(l.clone(), Exponent::new(1, 3));
        let b = RadMonomial::generator(l.clone(), Exponent::new(2, 3));
        assert_eq!(a.mul(&b), RadMonomial::generator(l, Exponent::one()));
        assert!(q("3/2").mul(&q("2/3")).is_one());
    }

    #[test]
    fn powers() {
        assert_eq!(q("4").pow(Exponent::new(1, 2)).unwrap(), q("2"));
        let l2 = RadMonomial::symbol("λ_2");
        assert_eq!(l2.pow_int(-1).to_string(), "+λ_2^{-1}");
        assert_eq!(
            RadMonomial::minus_one().pow(Exponent::new(1, 2)),
            Err(MonomialError::NegativeBaseFractionalPower)
        );
        assert_eq!(q("-8").pow(Exponent::new(1, 3)).unwrap(), q("-2"));
    }

    #[test]
    fn string_form() {
        let m = q("12").mul(&RadMonomial::symbol("λ_1").pow_int(-1));
        assert_eq!(m.to_string(), "+2^{2}*3^{1}*λ_1^{-1}");
        assert_eq!(m.to_string().parse::<RadMonomial>().unwrap(), m);
        assert_eq!(RadMonomial::one().to_string(), "+1");
        assert!("+3^{1}*2^{1}".parse::<RadMonomial>().is_err());
        assert!("+4^{1}".parse::<RadMonomial>().is_err());
        assert!("2^{1}".parse::<RadMonomial>().is_err());
    }

    #[test]
    fn scale_residues() {
        let f7 = Field::prime(7).unwrap();
        let three = Scale::from_scalar(&f7.from_int(3)).unwrap();
        assert!(three.mul(&three.inverse()).is_one());
        assert_eq!(three.pow_int(6), Scale::one_for(f7));
        assert_eq!(three.to_string().parse::<Scale>().unwrap(), three);
    }

    fn monomial() -> impl Strategy<Value = RadMonomial> {
        (
            any::<bool>(),
            proptest::collection::btree_map(
                prop_oneof![
                    prop::sample::select(vec![2u64, 3, 5, 7, 11]).prop_map(Generator::Prime),
                    prop::sample::select(vec!["λ_1", "λ_2", "μ"])
                        .prop_map(|s| Generator::Symbol(s.to_string())),
                ],
                (-6i64..6, 1i64..5).prop_map(|(n, d)| Exponent::new(n, d)),
                0..4,
            ),
        )
            .prop_map(|(negative, f)| RadMonomial {
                negative,
                factors: f.into_iter().filter(|(_, e)| !e.is_zero()).collect(),
            })
    }

    proptest! {
        #[test]
        fn group_laws(a in monomial(), b in monomial()) {
            prop_assert_eq!(a.mul(&b), b.mul(&a));
            prop_assert!(a.mul(&a.inverse()).is_one());
            prop_assert_eq!(a.to_string().parse::<RadMonomial>().unwrap(), a);
        }

        #[test]
        fn power_round_trip(a in monomial(), n in 1i64..6, d in 1i64..6, neg in any::<bool>()) {
            let e = Exponent::new(if neg { -n } else { n }, d);
            // an even numerator forgets the sign, as over the reals
            prop_assume!(!a.is_negative() || e.numer() % 2 != 0);
            if let Ok(p) = a.pow(e) {
                if let Ok(back) = p.pow(e.recip()) {
                    prop_assert_eq!(back, a);
                }
            }
        }

        #[test]
        fn rational_embedding(n in -5000i64..5000, d in 1i64..5000) {
            prop_assume!(n != 0);
            let r = BigRational::new(n.into(), d.into());
            prop_assert_eq!(RadMonomial::from_rational(&r).unwrap().to_rational().unwrap(), r);
        }
    }
}
