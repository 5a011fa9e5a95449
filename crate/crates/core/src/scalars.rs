//! Exact coefficient arithmetic over the rationals and over prime fields.
//!
//! Every value is kept in canonical form: rationals in lowest terms with a
//! positive denominator (guaranteed by `BigRational`), residues in `[0, p)`.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScalarError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("mixed-field operation: {0} and {1}")]
    FieldMismatch(FieldSpec, FieldSpec),
    #[error("modulus {0} is not prime")]
    NotPrime(u64),
    #[error("cannot parse scalar {0:?}")]
    Parse(String),
    #[error("denominator of {0} is not invertible modulo {1}")]
    NonInvertibleDenominator(String, u64),
}

/// The working coefficient field.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "kind", content = "p")]
pub enum FieldSpec {
    Rationals,
    PrimeField(u64),
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldSpec::Rationals => write!(f, "Q"),
            FieldSpec::PrimeField(p) => write!(f, "F_{p}"),
        }
    }
}

impl FromStr for FieldSpec {
    type Err = ScalarError;

    /// Accepts `Q`, `QQ`, `rationals` for the rationals and `q7`, `F7`,
    /// `F_7`, `GF7`, `p7` for the prime field with 7 elements.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        if matches!(t, "Q" | "QQ" | "rationals" | "rational") {
            return Ok(FieldSpec::Rationals);
        }
        let digits = t
            .trim_start_matches("GF")
            .trim_start_matches(['F', 'q', 'p'])
            .trim_start_matches('_');
        if digits.is_empty() || !digits.bytes().all(|c| c.is_ascii_digit()) {
            return Err(ScalarError::Parse(s.to_string()));
        }
        let p: u64 = digits.parse().map_err(|_| ScalarError::Parse(s.to_string()))?;
        FieldSpec::prime(p)
    }
}

impl FieldSpec {
    /// Prime field F_p; fails unless `p` is prime.
    pub fn prime(p: u64) -> Result<Self, ScalarError> {
        if is_prime(p) {
            Ok(FieldSpec::PrimeField(p))
        } else {
            Err(ScalarError::NotPrime(p))
        }
    }

    /// 0 for the rationals, p for F_p.
    pub fn characteristic(&self) -> u64 {
        match self {
            FieldSpec::Rationals => 0,
            FieldSpec::PrimeField(p) => *p,
        }
    }

    pub fn zero(&self) -> Scalar {
        match self {
            FieldSpec::Rationals => Scalar::Rational(BigRational::zero()),
            FieldSpec::PrimeField(p) => Scalar::Modular { value: 0, modulus: *p },
        }
    }

    pub fn one(&self) -> Scalar {
        self.from_i64(1)
    }

    pub fn from_i64(&self, v: i64) -> Scalar {
        match self {
            FieldSpec::Rationals => Scalar::Rational(BigRational::from_integer(BigInt::from(v))),
            FieldSpec::PrimeField(p) => Scalar::Modular {
                value: (v as i128).rem_euclid(*p as i128) as u64,
                modulus: *p,
            },
        }
    }

    pub fn from_bigint(&self, v: &BigInt) -> Scalar {
        match self {
            FieldSpec::Rationals => Scalar::Rational(BigRational::from_integer(v.clone())),
            FieldSpec::PrimeField(p) => Scalar::Modular {
                value: reduce_bigint(v, *p),
                modulus: *p,
            },
        }
    }

    /// Maps a rational into this field; over F_p the denominator must be a unit.
    pub fn from_rational(&self, q: &BigRational) -> Result<Scalar, ScalarError> {
        match self {
            FieldSpec::Rationals => Ok(Scalar::Rational(q.clone())),
            FieldSpec::PrimeField(p) => {
                let num = reduce_bigint(q.numer(), *p);
                let den = reduce_bigint(q.denom(), *p);
                if den == 0 {
                    return Err(ScalarError::NonInvertibleDenominator(q.to_string(), *p));
                }
                Ok(Scalar::Modular {
                    value: mul_mod(num, inv_mod(den, *p), *p),
                    modulus: *p,
                })
            }
        }
    }

    /// Parses `"a"`, `"a/b"` or `"-a/b"` into this field.
    pub fn parse_scalar(&self, s: &str) -> Result<Scalar, ScalarError> {
        let q = parse_rational(s)?;
        self.from_rational(&q)
    }

    pub fn contains(&self, s: &Scalar) -> bool {
        s.field() == *self
    }
}

/// An exact field element.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Scalar {
    Rational(BigRational),
    Modular { value: u64, modulus: u64 },
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Rational(q) => write!(f, "{q}"),
            Scalar::Modular { value, .. } => write!(f, "{value}"),
        }
    }
}

impl Scalar {
    /// Builds a rational `num/den` in lowest terms.
    pub fn rational(num: i64, den: i64) -> Result<Scalar, ScalarError> {
        if den == 0 {
            return Err(ScalarError::DivisionByZero);
        }
        Ok(Scalar::Rational(BigRational::new(num.into(), den.into())))
    }

    /// Residue `v mod p`; `p` must be prime.
    pub fn modular(v: i64, p: u64) -> Result<Scalar, ScalarError> {
        Ok(FieldSpec::prime(p)?.from_i64(v))
    }

    pub fn field(&self) -> FieldSpec {
        match self {
            Scalar::Rational(_) => FieldSpec::Rationals,
            Scalar::Modular { modulus, .. } => FieldSpec::PrimeField(*modulus),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Rational(q) => q.is_zero(),
            Scalar::Modular { value, .. } => *value == 0,
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Scalar::Rational(q) => q.is_one(),
            Scalar::Modular { value, .. } => *value == 1,
        }
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        match self {
            Scalar::Rational(q) => Some(q),
            Scalar::Modular { .. } => None,
        }
    }

    /// Decimal string: `"num/den"` for rationals, the residue for F_p.
    pub fn to_decimal_string(&self) -> String {
        match self {
            Scalar::Rational(q) => format!("{}/{}", q.numer(), q.denom()),
            Scalar::Modular { value, .. } => value.to_string(),
        }
    }

    /// Integer value if the scalar is an integral rational that fits in `i64`,
    /// or any residue.
    pub fn to_i64(&self) -> Option<i64> {
        match self {
            Scalar::Rational(q) if q.is_integer() => q.numer().to_i64(),
            Scalar::Rational(_) => None,
            Scalar::Modular { value, .. } => i64::try_from(*value).ok(),
        }
    }

    fn same_field(&self, other: &Scalar) -> Result<(), ScalarError> {
        let (a, b) = (self.field(), other.field());
        if a == b {
            Ok(())
        } else {
            Err(ScalarError::FieldMismatch(a, b))
        }
    }

    pub fn add(&self, other: &Scalar) -> Result<Scalar, ScalarError> {
        self.same_field(other)?;
        Ok(self.add_unchecked(other))
    }

    pub fn sub(&self, other: &Scalar) -> Result<Scalar, ScalarError> {
        self.same_field(other)?;
        Ok(self.sub_unchecked(other))
    }

    pub fn mul(&self, other: &Scalar) -> Result<Scalar, ScalarError> {
        self.same_field(other)?;
        Ok(self.mul_unchecked(other))
    }

    pub fn div(&self, other: &Scalar) -> Result<Scalar, ScalarError> {
        self.same_field(other)?;
        let inv = other.inv()?;
        Ok(self.mul_unchecked(&inv))
    }

    pub fn inv(&self) -> Result<Scalar, ScalarError> {
        match self {
            Scalar::Rational(q) if q.is_zero() => Err(ScalarError::DivisionByZero),
            Scalar::Rational(q) => Ok(Scalar::Rational(q.recip())),
            Scalar::Modular { value: 0, .. } => Err(ScalarError::DivisionByZero),
            Scalar::Modular { value, modulus } => Ok(Scalar::Modular {
                value: inv_mod(*value, *modulus),
                modulus: *modulus,
            }),
        }
    }

    pub fn neg(&self) -> Scalar {
        match self {
            Scalar::Rational(q) => Scalar::Rational(-q),
            Scalar::Modular { value, modulus } => Scalar::Modular {
                value: if *value == 0 { 0 } else { modulus - value },
                modulus: *modulus,
            },
        }
    }

    /// `self^e` for a non-negative exponent.
    pub fn pow(&self, mut e: u64) -> Scalar {
        let mut base = self.clone();
        let mut acc = self.field().one();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul_unchecked(&base);
            }
            base = base.mul_unchecked(&base);
            e >>= 1;
        }
        acc
    }

    // Unchecked variants: callers guarantee both operands share a field.
    // Containers (polynomials, matrices, subspaces) enforce that invariant.

    pub(crate) fn add_unchecked(&self, other: &Scalar) -> Scalar {
        match (self, other) {
            (Scalar::Rational(a), Scalar::Rational(b)) => Scalar::Rational(a + b),
            (Scalar::Modular { value: a, modulus }, Scalar::Modular { value: b, .. }) => {
                Scalar::Modular {
                    value: add_mod(*a, *b, *modulus),
                    modulus: *modulus,
                }
            }
            _ => panic!("field mismatch in scalar arithmetic"),
        }
    }

    pub(crate) fn sub_unchecked(&self, other: &Scalar) -> Scalar {
        self.add_unchecked(&other.neg())
    }

    pub(crate) fn mul_unchecked(&self, other: &Scalar) -> Scalar {
        match (self, other) {
            (Scalar::Rational(a), Scalar::Rational(b)) => Scalar::Rational(a * b),
            (Scalar::Modular { value: a, modulus }, Scalar::Modular { value: b, .. }) => {
                Scalar::Modular {
                    value: mul_mod(*a, *b, *modulus),
                    modulus: *modulus,
                }
            }
            _ => panic!("field mismatch in scalar arithmetic"),
        }
    }

    /// `self -= factor * x`, the inner step of every elimination.
    pub(crate) fn sub_assign_product(&mut self, factor: &Scalar, x: &Scalar) {
        match (self, factor, x) {
            (Scalar::Rational(a), Scalar::Rational(f), Scalar::Rational(b)) => {
                *a -= f * b;
            }
            (
                Scalar::Modular { value, modulus },
                Scalar::Modular { value: f, .. },
                Scalar::Modular { value: b, .. },
            ) => {
                let prod = mul_mod(*f, *b, *modulus);
                *value = add_mod(*value, *modulus - prod, *modulus);
            }
            _ => panic!("field mismatch in scalar arithmetic"),
        }
    }

    /// Multiplies by a small integer (used for derivative coefficients).
    pub(crate) fn scale_by_int(&self, k: u64) -> Scalar {
        match self {
            Scalar::Rational(q) => Scalar::Rational(q * BigInt::from(k)),
            Scalar::Modular { value, modulus } => Scalar::Modular {
                value: mul_mod(*value, k % modulus, *modulus),
                modulus: *modulus,
            },
        }
    }
}

pub fn parse_rational(s: &str) -> Result<BigRational, ScalarError> {
    let t = s.trim();
    let err = || ScalarError::Parse(s.to_string());
    match t.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| err())?;
            let d: BigInt = d.trim().parse().map_err(|_| err())?;
            if d.is_zero() {
                return Err(ScalarError::DivisionByZero);
            }
            Ok(BigRational::new(n, d))
        }
        None => {
            let n: BigInt = t.parse().map_err(|_| err())?;
            Ok(BigRational::from_integer(n))
        }
    }
}

fn reduce_bigint(v: &BigInt, p: u64) -> u64 {
    let r = v.mod_floor(&BigInt::from(p));
    r.abs().to_u64().expect("residue fits in u64")
}

#[inline]
fn add_mod(a: u64, b: u64, p: u64) -> u64 {
    let s = a as u128 + b as u128;
    (s % p as u128) as u64
}

#[inline]
fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn pow_mod(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1 % p;
    a %= p;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, a, p);
        }
        a = mul_mod(a, a, p);
        e >>= 1;
    }
    acc
}

fn inv_mod(a: u64, p: u64) -> u64 {
    pow_mod(a, p - 2, p)
}

/// Deterministic Miller-Rabin for all `u64`.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const SMALL: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for p in SMALL {
        if n % p == 0 {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for a in SMALL {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn rational_sum() {
        let a = Scalar::rational(1, 2).unwrap();
        let b = Scalar::rational(1, 3).unwrap();
        assert_eq!(a.add(&b).unwrap(), Scalar::rational(5, 6).unwrap());
    }

    #[test]
    fn modular_product() {
        let a = Scalar::modular(3, 5).unwrap();
        let b = Scalar::modular(4, 5).unwrap();
        assert_eq!(a.mul(&b).unwrap(), Scalar::modular(2, 5).unwrap());
    }

    #[test]
    fn canonical_on_construction() {
        let a = Scalar::rational(2, 4).unwrap();
        assert_eq!(a.to_decimal_string(), "1/2");
        let b = Scalar::rational(3, -6).unwrap();
        assert_eq!(b.to_decimal_string(), "-1/2");
        assert_eq!(Scalar::modular(-1, 7).unwrap(), Scalar::modular(6, 7).unwrap());
    }

    #[test]
    fn division_by_zero_is_an_error() {
        let a = Scalar::rational(1, 2).unwrap();
        let z = FieldSpec::Rationals.zero();
        assert_eq!(a.div(&z), Err(ScalarError::DivisionByZero));
        let m = Scalar::modular(3, 7).unwrap();
        assert_eq!(m.div(&FieldSpec::PrimeField(7).zero()), Err(ScalarError::DivisionByZero));
        assert!(Scalar::rational(1, 0).is_err());
    }

    #[test]
    fn mixed_fields_rejected() {
        let a = Scalar::rational(1, 2).unwrap();
        let b = Scalar::modular(1, 5).unwrap();
        assert!(matches!(a.add(&b), Err(ScalarError::FieldMismatch(..))));
        let c = Scalar::modular(1, 7).unwrap();
        assert!(matches!(b.mul(&c), Err(ScalarError::FieldMismatch(..))));
    }

    #[test]
    fn prime_moduli_checked() {
        assert!(FieldSpec::prime(4).is_err());
        assert!(FieldSpec::prime(1).is_err());
        assert!(FieldSpec::prime(2).is_ok());
        assert!(FieldSpec::prime(1_000_000_007).is_ok());
        assert!(is_prime(18_446_744_073_709_551_557));
        assert!(!is_prime(3_215_031_751));
    }

    #[test]
    fn field_flags() {
        assert_eq!("Q".parse::<FieldSpec>().unwrap(), FieldSpec::Rationals);
        assert_eq!("q7".parse::<FieldSpec>().unwrap(), FieldSpec::PrimeField(7));
        assert_eq!("F_5".parse::<FieldSpec>().unwrap(), FieldSpec::PrimeField(5));
        assert_eq!("GF101".parse::<FieldSpec>().unwrap(), FieldSpec::PrimeField(101));
        assert!("q9".parse::<FieldSpec>().is_err());
        assert!("x".parse::<FieldSpec>().is_err());
    }

    #[test]
    fn rational_into_prime_field() {
        let f = FieldSpec::PrimeField(7);
        assert_eq!(f.parse_scalar("1/2").unwrap(), Scalar::modular(4, 7).unwrap());
        assert!(f.parse_scalar("1/14").is_err());
        assert_eq!(f.parse_scalar("-3").unwrap(), Scalar::modular(4, 7).unwrap());
    }

    fn small_rational() -> impl Strategy<Value = Scalar> {
        (-50i64..50, 1i64..30).prop_map(|(n, d)| Scalar::rational(n, d).unwrap())
    }

    fn residue() -> impl Strategy<Value = Scalar> {
        (0i64..101).prop_map(|v| Scalar::modular(v, 101).unwrap())
    }

    fn check_axioms(a: &Scalar, b: &Scalar, c: &Scalar) {
        let ab_c = a.add(b).unwrap().add(c).unwrap();
        let a_bc = a.add(&b.add(c).unwrap()).unwrap();
        assert_eq!(ab_c, a_bc);
        let m1 = a.mul(b).unwrap().mul(c).unwrap();
        let m2 = a.mul(&b.mul(c).unwrap()).unwrap();
        assert_eq!(m1, m2);
        let lhs = a.mul(&b.add(c).unwrap()).unwrap();
        let rhs = a.mul(b).unwrap().add(&a.mul(c).unwrap()).unwrap();
        assert_eq!(lhs, rhs);
        assert!(a.add(&a.neg()).unwrap().is_zero());
        if !a.is_zero() {
            assert!(a.mul(&a.inv().unwrap()).unwrap().is_one());
            assert_eq!(b.div(a).unwrap().mul(a).unwrap(), *b);
        }
    }

    proptest! {
        #[test]
        fn rational_field_axioms(a in small_rational(), b in small_rational(), c in small_rational()) {
            check_axioms(&a, &b, &c);
        }

        #[test]
        fn prime_field_axioms(a in residue(), b in residue(), c in residue()) {
            check_axioms(&a, &b, &c);
        }

        #[test]
        fn normalization_idempotent(n in -1000i64..1000, d in 1i64..1000) {
            let once = Scalar::rational(n, d).unwrap();
            let text = once.to_decimal_string();
            let twice = FieldSpec::Rationals.parse_scalar(&text).unwrap();
            prop_assert_eq!(&once, &twice);
            prop_assert_eq!(twice.to_decimal_string(), text);
        }
    }
}
