//! Exact field elements over ℚ and prime fields F_p.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Largest modulus accepted for prime-field arithmetic.
pub const MAX_PRIME: u64 = 1 << 20;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScalarError {
    #[error("mixed-field arithmetic between {0} and {1}")]
    FieldMismatch(Field, Field),
    #[error("{0} is not a prime modulus in [2, 2^20]")]
    BadModulus(u64),
    #[error("cannot parse scalar {0:?}")]
    Parse(String),
    #[error("denominator of {0} vanishes modulo {1}")]
    DenominatorVanishes(String, u64),
}

/// The ground field of a computation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Field {
    Rational,
    Prime(u64),
}

impl Field {
    pub fn prime(p: u64) -> Result<Self, ScalarError> {
        if !(2..=MAX_PRIME).contains(&p) || !is_prime(p) {
            return Err(ScalarError::BadModulus(p));
        }
        Ok(Field::Prime(p))
    }

    pub fn characteristic(self) -> u64 {
        match self {
            Field::Rational => 0,
            Field::Prime(p) => p,
        }
    }

    pub fn zero(self) -> ExactScalar {
        self.from_int(0)
    }

    pub fn one(self) -> ExactScalar {
        self.from_int(1)
    }

    pub fn from_int(self, n: i64) -> ExactScalar {
        match self {
            Field::Rational => ExactScalar::Rational(BigRational::from_integer(BigInt::from(n))),
            Field::Prime(p) => ExactScalar::Prime {
                residue: n.rem_euclid(p as i64) as u64,
                modulus: p,
            },
        }
    }

    /// Maps a rational into this field; fails when the denominator is divisible by p.
    pub fn from_rational(self, q: &BigRational) -> Result<ExactScalar, ScalarError> {
        match self {
            Field::Rational => Ok(ExactScalar::Rational(q.clone())),
            Field::Prime(p) => {
                let pb = BigInt::from(p);
                let num = q.numer().mod_floor(&pb).to_u64().unwrap();
                let den = q.denom().mod_floor(&pb).to_u64().unwrap();
                if den == 0 {
                    return Err(ScalarError::DenominatorVanishes(q.to_string(), p));
                }
                let r = mul_mod(num, inv_mod(den, p).unwrap(), p);
                Ok(ExactScalar::Prime { residue: r, modulus: p })
            }
        }
    }

    /// Parses an entry written as an integer or "a/b" and maps it into this field.
    pub fn parse_entry(self, text: &str) -> Result<ExactScalar, ScalarError> {
        let q = parse_rational(text)?;
        self.from_rational(&q)
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Field::Rational => write!(f, "Q"),
            Field::Prime(p) => write!(f, "F_{p}"),
        }
    }
}

/// An element of ℚ (always in lowest terms) or of F_p (residue in [0, p)).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum ExactScalar {
    Rational(BigRational),
    Prime { residue: u64, modulus: u64 },
}

impl ExactScalar {
    pub fn field(&self) -> Field {
        match self {
            ExactScalar::Rational(_) => Field::Rational,
            ExactScalar::Prime { modulus, .. } => Field::Prime(*modulus),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            ExactScalar::Rational(q) => q.is_zero(),
            ExactScalar::Prime { residue, .. } => *residue == 0,
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            ExactScalar::Rational(q) => q.is_one(),
            ExactScalar::Prime { residue, .. } => *residue == 1,
        }
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        match self {
            ExactScalar::Rational(q) => Some(q),
            ExactScalar::Prime { .. } => None,
        }
    }

    pub fn checked_add(&self, rhs: &Self) -> Result<Self, ScalarError> {
        match (self, rhs) {
            (ExactScalar::Rational(a), ExactScalar::Rational(b)) => Ok(ExactScalar::Rational(a + b)),
            (
                ExactScalar::Prime { residue: a, modulus: p },
                ExactScalar::Prime { residue: b, modulus: q },
            ) if p == q => Ok(ExactScalar::Prime { residue: (a + b) % p, modulus: *p }),
            _ => Err(ScalarError::FieldMismatch(self.field(), rhs.field())),
        }
    }

    pub fn checked_mul(&self, rhs: &Self) -> Result<Self, ScalarError> {
        match (self, rhs) {
            (ExactScalar::Rational(a), ExactScalar::Rational(b)) => Ok(ExactScalar::Rational(a * b)),
            (
                ExactScalar::Prime { residue: a, modulus: p },
                ExactScalar::Prime { residue: b, modulus: q },
            ) if p == q => Ok(ExactScalar::Prime { residue: mul_mod(*a, *b, *p), modulus: *p }),
            _ => Err(ScalarError::FieldMismatch(self.field(), rhs.field())),
        }
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        Some(match self {
            ExactScalar::Rational(q) => ExactScalar::Rational(q.recip()),
            ExactScalar::Prime { residue, modulus } => ExactScalar::Prime {
                residue: inv_mod(*residue, *modulus).unwrap(),
                modulus: *modulus,
            },
        })
    }

    pub fn div(&self, rhs: &Self) -> Option<Self> {
        rhs.inv().map(|r| self * &r)
    }

    /// Canonical entry text inside a presentation document ("a/b", "a", or the residue).
    pub fn entry_string(&self) -> String {
        match self {
            ExactScalar::Rational(q) => rational_string(q),
            ExactScalar::Prime { residue, .. } => residue.to_string(),
        }
    }
}

fn rational_string(q: &BigRational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

impl fmt::Display for ExactScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExactScalar::Rational(q) => write!(f, "{}", rational_string(q)),
            ExactScalar::Prime { residue, modulus } => write!(f, "{residue} mod {modulus}"),
        }
    }
}

impl FromStr for ExactScalar {
    type Err = ScalarError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if let Some((r, p)) = s.split_once(" mod ") {
            let p: u64 = p.trim().parse().map_err(|_| ScalarError::Parse(s.into()))?;
            let field = Field::prime(p)?;
            return field.parse_entry(r);
        }
        Ok(ExactScalar::Rational(parse_rational(s)?))
    }
}

impl Serialize for ExactScalar {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for ExactScalar {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

pub fn parse_rational(text: &str) -> Result<BigRational, ScalarError> {
    let t = text.trim();
    let err = || ScalarError::Parse(text.to_string());
    let (n, d) = match t.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (t, "1"),
    };
    let n: BigInt = n.parse().map_err(|_| err())?;
    let d: BigInt = d.parse().map_err(|_| err())?;
    if d.is_zero() {
        return Err(err());
    }
    Ok(BigRational::new(n, d))
}

macro_rules! binop {
    ($tr:ident, $m:ident, $checked:ident) => {
        impl $tr<&ExactScalar> for &ExactScalar {
            type Output = ExactScalar;
            fn $m(self, rhs: &ExactScalar) -> ExactScalar {
                self.$checked(rhs).expect("mixed-field arithmetic")
            }
        }
        impl $tr<ExactScalar> for ExactScalar {
            type Output = ExactScalar;
            fn $m(self, rhs: ExactScalar) -> ExactScalar {
                (&self).$m(&rhs)
            }
        }
    };
}

binop!(Add, add, checked_add);
binop!(Mul, mul, checked_mul);

impl Neg for &ExactScalar {
    type Output = ExactScalar;
    fn neg(self) -> ExactScalar {
        match self {
            ExactScalar::Rational(q) => ExactScalar::Rational(-q),
            ExactScalar::Prime { residue, modulus } => ExactScalar::Prime {
                residue: (modulus - residue) % modulus,
                modulus: *modulus,
            },
        }
    }
}

impl Neg for ExactScalar {
    type Output = ExactScalar;
    fn neg(self) -> ExactScalar {
        -&self
    }
}

impl Sub<&ExactScalar> for &ExactScalar {
    type Output = ExactScalar;
    fn sub(self, rhs: &ExactScalar) -> ExactScalar {
        self + &(-rhs)
    }
}

impl Sub<ExactScalar> for ExactScalar {
    type Output = ExactScalar;
    fn sub(self, rhs: ExactScalar) -> ExactScalar {
        &self - &rhs
    }
}

// ---------------------------------------------------------------------------
// modular helpers

pub fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

pub fn pow_mod(mut base: u64, mut exp: u64, p: u64) -> u64 {
    let mut acc = 1 % p;
    base %= p;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, p);
        }
        base = mul_mod(base, base, p);
        exp >>= 1;
    }
    acc
}

pub fn inv_mod(a: u64, p: u64) -> Option<u64> {
    let g = (a as i128).extended_gcd(&(p as i128));
    if g.gcd != 1 {
        return None;
    }
    Some(g.x.rem_euclid(p as i128) as u64)
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Prime factorization by trial division, ascending primes.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        let mut e = 0;
        while n.is_multiple_of(d) {
            n /= d;
            e += 1;
        }
        if e > 0 {
            out.push((d, e));
        }
        d += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// Smallest primitive root modulo the prime p.
pub fn primitive_root(p: u64) -> u64 {
    if p == 2 {
        return 1;
    }
    let order = p - 1;
    let factors = factorize(order);
    (2..p)
        .find(|&g| factors.iter().all(|&(q, _)| pow_mod(g, order / q, p) != 1))
        .expect("every prime has a primitive root")
}

/// Discrete logarithm table: `log[r]` is the exponent of the smallest primitive root giving r.
#[derive(Debug, Clone)]
pub struct DiscreteLog {
    pub modulus: u64,
    pub generator: u64,
    log: Vec<u64>,
}

impl DiscreteLog {
    pub fn new(p: u64) -> Self {
        let g = primitive_root(p);
        let mut log = vec![0u64; p as usize];
        let mut x = 1u64;
        for e in 0..(p - 1) {
            log[x as usize] = e;
            x = mul_mod(x, g, p);
        }
        DiscreteLog { modulus: p, generator: g, log }
    }

    pub fn log(&self, residue: u64) -> Option<u64> {
        if residue.is_multiple_of(self.modulus) {
            None
        } else {
            Some(self.log[(residue % self.modulus) as usize])
        }
    }

    pub fn exp(&self, e: i128) -> u64 {
        let n = (self.modulus - 1) as i128;
        pow_mod(self.generator, e.rem_euclid(n) as u64, self.modulus)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rationals_stay_reduced() {
        let a: ExactScalar = "6/4".parse().unwrap();
        assert_eq!(a.to_string(), "3/2");
        let b: ExactScalar = "-2/-4".parse().unwrap();
        assert_eq!(b.to_string(), "1/2");
        assert!((&a * &a.inv().unwrap()).is_one());
    }

    #[test]
    fn prime_residues_reduce() {
        let f5 = Field::prime(5).unwrap();
        assert_eq!(f5.parse_entry("7").unwrap().to_string(), "2 mod 5");
        assert_eq!(f5.parse_entry("-1").unwrap().entry_string(), "4");
        assert_eq!(f5.parse_entry("1/2").unwrap().entry_string(), "3");
        assert!(f5.parse_entry("1/5").is_err());
        let s: ExactScalar = "12 mod 7".parse().unwrap();
        assert_eq!(s.to_string(), "5 mod 7");
    }

    #[test]
    fn mixed_fields_rejected() {
        let a = Field::prime(5).unwrap().one();
        let b = Field::prime(7).unwrap().one();
        assert!(matches!(a.checked_add(&b), Err(ScalarError::FieldMismatch(..))));
        assert!(Field::Rational.one().checked_mul(&a).is_err());
    }

    #[test]
    fn moduli_validated() {
        assert!(Field::prime(4).is_err());
        assert!(Field::prime((1 << 20) + 7).is_err());
        assert!(Field::prime(1_048_573).is_ok());
    }

    #[test]
    fn primitive_roots_and_logs() {
        assert_eq!(primitive_root(5), 2);
        assert_eq!(primitive_root(7), 3);
        let dl = DiscreteLog::new(11);
        for r in 1..11 {
            assert_eq!(dl.exp(dl.log(r).unwrap() as i128), r);
        }
    }
}
