//! Closed-form dimension counts, in exact integer arithmetic.
//!
//! Evaluators are total: binomials with a top smaller than the bottom are 0,
//! so shifted arguments at small `l` need no special casing. Hypotheses on
//! `(n, b, d, l)` are enforced by the checkers in [`crate::bounds`].

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormulaError {
    #[error("binomial C({0}, {1}) needs a nonnegative bottom")]
    NegativeBottom(i64, i64),
    #[error("restricted Hilbert scheme dimension needs d >= 2, got {0}")]
    DegreeTooSmall(i64),
    #[error("need n >= 3 and 1 <= b <= n - 1, got n = {n}, b = {b}")]
    BadParams { n: i64, b: i64 },
}

/// `(n, b, d, l)` with `n >= 3` and `1 <= b <= n - 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Params {
    pub n: i64,
    pub b: i64,
    pub d: i64,
    pub l: i64,
}

impl Params {
    pub fn new(n: i64, b: i64, d: i64, l: i64) -> Result<Self, FormulaError> {
        check_nb(n, b)?;
        Ok(Params { n, b, d, l })
    }
}

pub fn check_nb(n: i64, b: i64) -> Result<(), FormulaError> {
    if n < 3 || b < 1 || b > n - 1 {
        return Err(FormulaError::BadParams { n, b });
    }
    Ok(())
}

/// `C(m, k)`, zero when `m < k` (including every negative `m`).
pub fn binom(m: i64, k: i64) -> Result<BigInt, FormulaError> {
    if k < 0 {
        return Err(FormulaError::NegativeBottom(m, k));
    }
    Ok(c(m, k))
}

pub(crate) fn c(m: i64, k: i64) -> BigInt {
    if k < 0 || m < k {
        return BigInt::zero();
    }
    let k = k.min(m - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(m - i) / BigInt::from(i + 1);
    }
    acc
}

/// `C(l+b, b) + (n-b) C(l-1+b, b) + 1 - (b+1)(n-b)`.
pub fn a_formula(n: i64, b: i64, l: i64) -> BigInt {
    c(l + b, b) + (n - b) * c(l - 1 + b, b) + 1 - (b + 1) * (n - b)
}

/// Codimension of the forms singular along a b-plane.
pub fn linear_codim(n: i64, b: i64, l: i64) -> BigInt {
    c(l + b, b) + (n - b) * c(l - 1 + b, b)
}

/// Lower bound for the codimension of the forms singular along `d` b-planes
/// through a common (b-1)-plane.
pub fn union_bound(n: i64, b: i64, d: i64, l: i64) -> BigInt {
    let tail: BigInt = (1..=d).map(|e| c(l - 2 * e + 1 + b, b)).sum();
    c(l + b, b) + (n - b) * tail
}

/// Codimension of `(f, x_{b+2}, ..., x_n)^2` in degree `l`, `deg f = d`.
pub fn beta(n: i64, b: i64, d: i64, l: i64) -> BigInt {
    c(l + b + 1, b + 1) - c(l - 2 * d + b + 1, b + 1) + (n - b - 1) * (c(l + b, b + 1) - c(l - d + b, b + 1))
}

/// `beta_2(l) + 1 - (b+2) n + b(b+1)/2`, the codimension of the locus of
/// forms singular along some quadric of dimension `b`.
pub fn gamma2(n: i64, b: i64, l: i64) -> BigInt {
    beta(n, b, 2, l) + 1 - (b + 2) * n + b * (b + 1) / 2
}

/// Hilbert polynomial of a quadric hypersurface in `P^{b+1}`, at `z`.
pub fn hilb2_poly(b: i64, z: i64) -> BigInt {
    c(z + b + 1, b + 1) - c(z - 1 + b, b + 1)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RHilbDim {
    pub value: BigInt,
    /// True when the value rests on the conjectural formula (`b >= 2`).
    pub conditional: bool,
}

/// Dimension of the restricted Hilbert scheme of degree-`d`, dimension-`b`
/// subschemes. Proven for `b = 1`; conjectural for `b >= 2`.
pub fn rhilb_dim(n: i64, b: i64, d: i64) -> Result<RHilbDim, FormulaError> {
    if d < 2 {
        return Err(FormulaError::DegreeTooSmall(d));
    }
    if b == 1 {
        return Ok(RHilbDim {
            value: BigInt::from(3 * (n - 2) + d * (d + 3) / 2),
            conditional: false,
        });
    }
    Ok(RHilbDim {
        value: rhilb_conjectural(n, b, d),
        conditional: true,
    })
}

/// `(b+2)(n-b-1) - 1 + C(d+b+1, b+1)`, evaluated for any `b`.
pub fn rhilb_conjectural(n: i64, b: i64, d: i64) -> BigInt {
    (b + 2) * (n - b - 1) - 1 + c(d + b + 1, b + 1)
}

/// `dim G(b, n) = (b+1)(n-b)`.
pub fn grassmannian_dim(n: i64, b: i64) -> i64 {
    (b + 1) * (n - b)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DimX1 {
    pub total: BigInt,
    /// `dim P(W_L)` for a single b-plane `L`.
    pub fiber: BigInt,
    pub grassmannian: i64,
}

/// Dimension of the closure of the forms singular along some b-plane,
/// `C(l+n, n) - a_{n,b}(l)`, split as fiber plus base.
pub fn dim_x1(n: i64, b: i64, l: i64) -> DimX1 {
    let total = c(l + n, n) - a_formula(n, b, l);
    let fiber = c(l + n, n) - linear_codim(n, b, l) - 1;
    DimX1 {
        total,
        fiber,
        grassmannian: grassmannian_dim(n, b),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(v: i64) -> BigInt {
        BigInt::from(v)
    }

    /// `b`-th forward difference of `f` at `z`.
    fn forward_diff(f: impl Fn(i64) -> BigInt, b: i64, z: i64) -> BigInt {
        (0..=b)
            .map(|j| {
                let s = if (b - j) % 2 == 0 { big(1) } else { big(-1) };
                s * c(b, j) * f(z + j)
            })
            .sum()
    }

    #[test]
    fn binomials() {
        assert_eq!(binom(6, 3).unwrap(), big(20));
        assert_eq!(binom(2, 5).unwrap(), big(0));
        assert_eq!(binom(-1, 1).unwrap(), big(0));
        assert_eq!(binom(0, 0).unwrap(), big(1));
        assert_eq!(binom(-3, 0).unwrap(), big(0));
        assert!(binom(4, -1).is_err());
        assert_eq!(binom(100, 50).unwrap().to_string(), "100891344545564193334812497256");
    }

    #[test]
    fn pascal_rule() {
        for m in 1..40 {
            for k in 1..=m {
                assert_eq!(c(m, k), c(m - 1, k - 1) + c(m - 1, k));
            }
        }
    }

    #[test]
    fn a_values() {
        assert_eq!(a_formula(3, 1, 4), big(10));
        assert_eq!(a_formula(3, 1, 3), big(7));
    }

    #[test]
    fn a_leading_coefficient() {
        // b-th difference of a polynomial with leading term (n-b+1)/b! l^b.
        for (n, b) in [(3, 1), (4, 2), (5, 3), (6, 2)] {
            assert_eq!(forward_diff(|l| a_formula(n, b, l), b, 10), big(n - b + 1));
        }
    }

    #[test]
    fn linear_and_union() {
        assert_eq!(linear_codim(3, 1, 4), big(13));
        assert_eq!(linear_codim(3, 1, 5), big(16));
        for l in 1..12 {
            assert_eq!(union_bound(3, 1, 1, l), linear_codim(3, 1, l));
            assert_eq!(union_bound(5, 2, 1, l), linear_codim(5, 2, l));
        }
        assert_eq!(union_bound(3, 1, 2, 5), big(22));
        assert_eq!(union_bound(3, 1, 3, 5), big(24));
    }

    #[test]
    fn beta_values() {
        assert_eq!(beta(3, 1, 2, 4), big(21));
        assert_eq!(beta(3, 1, 2, 5), big(27));
        // b = n - 1: only the first two binomials survive.
        for l in 4..10 {
            assert_eq!(beta(4, 3, 2, l), c(l + 4, 4) - c(l, 4));
        }
    }

    #[test]
    fn beta_leading_coefficient() {
        for (n, b, d) in [(3, 1, 2), (4, 2, 3), (5, 2, 2), (5, 3, 4)] {
            assert_eq!(forward_diff(|l| beta(n, b, d, l), b, 2 * d + 1), big((n - b + 1) * d));
        }
    }

    #[test]
    fn gamma_values() {
        // (b+2)n = 9 at n = 3, b = 1.
        assert_eq!(gamma2(3, 1, 5), big(20));
        assert_eq!(gamma2(3, 1, 4), big(14));
        for (n, b) in [(3, 1), (4, 2), (6, 3)] {
            for l in 4..12 {
                let dim_x2 = c(l + n, n) - gamma2(n, b, l);
                let rearranged = c(l + n, n) - beta(n, b, 2, l) - 1 + (b + 2) * n - b * (b + 1) / 2;
                assert_eq!(dim_x2, rearranged);
            }
        }
    }

    #[test]
    fn conic_hilbert_polynomial() {
        for z in 0..20 {
            assert_eq!(hilb2_poly(1, z), big(2 * z + 1));
        }
        for b in 1..6 {
            assert_eq!(hilb2_poly(b, 0), big(1));
            assert_eq!(forward_diff(|z| hilb2_poly(b, z), b, 3), big(2));
        }
    }

    #[test]
    fn restricted_hilbert_dims() {
        let r = rhilb_dim(3, 1, 2).unwrap();
        assert_eq!(r.value, big(8));
        assert!(!r.conditional);
        let r = rhilb_dim(4, 2, 2).unwrap();
        assert_eq!(r.value, big(13));
        assert!(r.conditional);
        assert_eq!(rhilb_dim(3, 1, 1), Err(FormulaError::DegreeTooSmall(1)));
    }

    #[test]
    fn conjectural_formula_specializes_at_b1() {
        for n in 3..=10 {
            for d in 2..=10 {
                assert_eq!(rhilb_conjectural(n, 1, d), rhilb_dim(n, 1, d).unwrap().value);
            }
        }
    }

    #[test]
    fn x1_accounting() {
        let x = dim_x1(3, 1, 4);
        assert_eq!(x.total, big(25));
        assert_eq!(x.fiber, big(21));
        assert_eq!(x.grassmannian, 4);
        assert_eq!(dim_x1(3, 1, 3).total, big(13));
        for n in 3..8 {
            for b in 1..n {
                for l in 1..10 {
                    let x = dim_x1(n, b, l);
                    assert_eq!(x.total, &x.fiber + x.grassmannian);
                }
            }
        }
    }

    #[test]
    fn params_domain() {
        assert!(Params::new(3, 1, 2, 5).is_ok());
        assert!(Params::new(2, 1, 2, 5).is_err());
        assert!(Params::new(4, 4, 2, 5).is_err());
        assert!(Params::new(4, 0, 2, 5).is_err());
    }
}
