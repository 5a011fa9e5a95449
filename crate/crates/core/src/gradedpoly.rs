//! Monomials, graded bases of `S_l = k[x_0..x_n]_l`, and homogeneous
//! polynomials with multiplication and formal partial derivatives.
//!
//! Graded pieces are laid out in graded-lexicographic order with
//! `x_0 > x_1 > ... > x_n`: index 0 of a basis is always `x_0^l`.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalars::{FieldSpec, Scalar, ScalarError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolyError {
    #[error("degree must be non-negative, got {0}")]
    NegativeDegree(i64),
    #[error("need at least two variables (n >= 1), got n = {0}")]
    TooFewVariables(usize),
    #[error("variable count mismatch: n = {0} vs n = {1}")]
    VariableMismatch(usize, usize),
    #[error("monomial {got:?} does not have degree {expected}")]
    DegreeMismatch { expected: u32, got: Vec<u32> },
    #[error("exponent vector has length {got}, expected {expected}")]
    ExponentLength { expected: usize, got: usize },
    #[error("variable index {index} out of range for n = {n}")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("coefficient field mismatch: {0} vs {1}")]
    FieldMismatch(FieldSpec, FieldSpec),
    #[error("vector length {got} does not match basis size {expected}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("cannot parse polynomial: {0}")]
    Parse(String),
    #[error(transparent)]
    Scalar(#[from] ScalarError),
}

/// Exponent vector of a monomial in `n + 1` variables.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Monomial(Vec<u32>);

impl Monomial {
    pub fn new(exponents: Vec<u32>) -> Self {
        Monomial(exponents)
    }

    pub fn one(n: usize) -> Self {
        Monomial(vec![0; n + 1])
    }

    pub fn var(n: usize, i: usize) -> Self {
        let mut e = vec![0; n + 1];
        e[i] = 1;
        Monomial(e)
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn nvars(&self) -> usize {
        self.0.len()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }
}

impl Ord for Monomial {
    /// Graded lexicographic with `x_0 > x_1 > ... > x_n`.
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, &e) in self.0.iter().enumerate() {
            if e == 0 {
                continue;
            }
            if !first {
                write!(f, "*")?;
            }
            first = false;
            if e == 1 {
                write!(f, "x{i}")?;
            } else {
                write!(f, "x{i}^{e}")?;
            }
        }
        if first {
            write!(f, "1")?;
        }
        Ok(())
    }
}

/// All monomials of degree `l` in `n + 1` variables, largest first.
pub fn monomials(n: usize, l: u32) -> Vec<Monomial> {
    fn rec(pos: usize, nvars: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Monomial>) {
        if pos == nvars - 1 {
            cur[pos] = left;
            out.push(Monomial(cur.clone()));
            return;
        }
        for e in (0..=left).rev() {
            cur[pos] = e;
            rec(pos + 1, nvars, left - e, cur, out);
        }
        cur[pos] = 0;
    }
    let mut out = Vec::new();
    let mut cur = vec![0; n + 1];
    rec(0, n + 1, l, &mut cur, &mut out);
    out
}

#[derive(Debug)]
struct BasisInner {
    n: usize,
    degree: u32,
    monomials: Vec<Monomial>,
    index: HashMap<Monomial, usize>,
}

/// Ordered basis of the graded piece `S_l`. Cheap to clone.
#[derive(Debug, Clone)]
pub struct GradedBasis(Arc<BasisInner>);

impl PartialEq for GradedBasis {
    fn eq(&self, other: &Self) -> bool {
        self.n() == other.n() && self.degree() == other.degree()
    }
}

impl Eq for GradedBasis {}

impl GradedBasis {
    pub fn new(n: usize, l: i64) -> Result<Self, PolyError> {
        if n < 1 {
            return Err(PolyError::TooFewVariables(n));
        }
        if l < 0 {
            return Err(PolyError::NegativeDegree(l));
        }
        Ok(Self::of(n, l as u32))
    }

    /// Infallible constructor for validated arguments.
    pub fn of(n: usize, degree: u32) -> Self {
        let monomials = monomials(n, degree);
        let index = monomials
            .iter()
            .enumerate()
            .map(|(i, m)| (m.clone(), i))
            .collect();
        GradedBasis(Arc::new(BasisInner {
            n,
            degree,
            monomials,
            index,
        }))
    }

    pub fn n(&self) -> usize {
        self.0.n
    }

    pub fn degree(&self) -> u32 {
        self.0.degree
    }

    pub fn len(&self) -> usize {
        self.0.monomials.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.monomials.is_empty()
    }

    pub fn monomials(&self) -> &[Monomial] {
        &self.0.monomials
    }

    pub fn monomial(&self, i: usize) -> &Monomial {
        &self.0.monomials[i]
    }

    pub fn index_of(&self, m: &Monomial) -> Option<usize> {
        self.0.index.get(m).copied()
    }
}

/// A homogeneous polynomial stored sparsely; never holds zero coefficients.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HomPoly {
    field: FieldSpec,
    n: usize,
    degree: u32,
    terms: BTreeMap<Monomial, Scalar>,
}

impl HomPoly {
    pub fn zero(field: FieldSpec, n: usize, degree: u32) -> Self {
        HomPoly {
            field,
            n,
            degree,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(field: FieldSpec, n: usize, c: Scalar) -> Self {
        let mut p = HomPoly::zero(field, n, 0);
        if !c.is_zero() {
            p.terms.insert(Monomial::one(n), c);
        }
        p
    }

    /// The variable `x_i`.
    pub fn var(field: FieldSpec, n: usize, i: usize) -> Self {
        let mut p = HomPoly::zero(field, n, 1);
        p.terms.insert(Monomial::var(n, i), field.one());
        p
    }

    pub fn monomial(field: FieldSpec, m: Monomial, coeff: Scalar) -> Self {
        let n = m.nvars() - 1;
        let mut p = HomPoly::zero(field, n, m.degree());
        if !coeff.is_zero() {
            p.terms.insert(m, coeff);
        }
        p
    }

    /// Builds a polynomial from `(exponents, coefficient)` pairs, summing
    /// repeated monomials.
    pub fn from_terms<I>(field: FieldSpec, n: usize, degree: u32, terms: I) -> Result<Self, PolyError>
    where
        I: IntoIterator<Item = (Vec<u32>, Scalar)>,
    {
        let mut p = HomPoly::zero(field, n, degree);
        for (exps, c) in terms {
            if exps.len() != n + 1 {
                return Err(PolyError::ExponentLength {
                    expected: n + 1,
                    got: exps.len(),
                });
            }
            if exps.iter().sum::<u32>() != degree {
                return Err(PolyError::DegreeMismatch {
                    expected: degree,
                    got: exps,
                });
            }
            if c.field() != field {
                return Err(PolyError::FieldMismatch(field, c.field()));
            }
            p.add_term(Monomial(exps), &c);
        }
        Ok(p)
    }

    /// Parses expressions like `"x0*x2 - x1^2"` or `"3/2*x0^2 + x1*x3"`.
    /// Each term is an optional rational coefficient followed by
    /// `*`-separated powers of variables `x<i>`.
    pub fn parse(field: FieldSpec, n: usize, text: &str) -> Result<Self, PolyError> {
        let err = |m: &str| PolyError::Parse(format!("{m} in {text:?}"));
        let compact: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        if compact.is_empty() {
            return Err(err("empty input"));
        }
        let mut pieces: Vec<(bool, String)> = Vec::new();
        let mut cur = String::new();
        let mut negative = false;
        for (i, ch) in compact.chars().enumerate() {
            if (ch == '+' || ch == '-') && i > 0 && !cur.ends_with('^') {
                pieces.push((negative, std::mem::take(&mut cur)));
                negative = ch == '-';
            } else if (ch == '+' || ch == '-') && i == 0 {
                negative = ch == '-';
            } else {
                cur.push(ch);
            }
        }
        pieces.push((negative, cur));

        let mut terms: Vec<(Vec<u32>, Scalar)> = Vec::new();
        let mut degree: Option<u32> = None;
        for (neg, piece) in pieces {
            if piece.is_empty() {
                return Err(err("empty term"));
            }
            let mut coeff = field.one();
            let mut exps = vec![0u32; n + 1];
            for factor in piece.split('*') {
                if let Some(var) = factor.strip_prefix('x') {
                    let (idx, pow) = match var.split_once('^') {
                        Some((i, e)) => (i, e.parse::<u32>().map_err(|_| err("bad exponent"))?),
                        None => (var, 1),
                    };
                    let idx: usize = idx.parse().map_err(|_| err("bad variable index"))?;
                    if idx > n {
                        return Err(PolyError::IndexOutOfRange { index: idx, n });
                    }
                    exps[idx] += pow;
                } else {
                    let c = field.parse_scalar(factor)?;
                    coeff = coeff.mul_unchecked(&c);
                }
            }
            if neg {
                coeff = coeff.neg();
            }
            let d: u32 = exps.iter().sum();
            match degree {
                None => degree = Some(d),
                Some(prev) if prev != d => {
                    return Err(PolyError::DegreeMismatch {
                        expected: prev,
                        got: exps,
                    })
                }
                _ => {}
            }
            terms.push((exps, coeff));
        }
        HomPoly::from_terms(field, n, degree.unwrap_or(0), terms)
    }

    fn add_term(&mut self, m: Monomial, c: &Scalar) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(existing) => {
                *existing = existing.add_unchecked(c);
                if existing.is_zero() {
                    self.terms.remove(&m);
                }
            }
            None => {
                self.terms.insert(m, c.clone());
            }
        }
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Terms in increasing monomial order.
    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Scalar)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &Monomial) -> Scalar {
        self.terms.get(m).cloned().unwrap_or_else(|| self.field.zero())
    }

    /// Largest monomial present, if any.
    pub fn leading_monomial(&self) -> Option<&Monomial> {
        self.terms.keys().next_back()
    }

    fn compatible(&self, other: &HomPoly) -> Result<(), PolyError> {
        if self.field != other.field {
            return Err(PolyError::FieldMismatch(self.field, other.field));
        }
        if self.n != other.n {
            return Err(PolyError::VariableMismatch(self.n, other.n));
        }
        Ok(())
    }

    pub fn add(&self, other: &HomPoly) -> Result<HomPoly, PolyError> {
        self.compatible(other)?;
        if self.degree != other.degree && !(self.is_zero() || other.is_zero()) {
            return Err(PolyError::DegreeMismatch {
                expected: self.degree,
                got: vec![other.degree],
            });
        }
        if other.is_zero() {
            return Ok(self.clone());
        }
        if self.is_zero() {
            return Ok(other.clone());
        }
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c);
        }
        Ok(out)
    }

    pub fn sub(&self, other: &HomPoly) -> Result<HomPoly, PolyError> {
        self.add(&other.scale(&self.field.from_i64(-1)))
    }

    pub fn scale(&self, c: &Scalar) -> HomPoly {
        let mut out = HomPoly::zero(self.field, self.n, self.degree);
        if c.is_zero() {
            return out;
        }
        for (m, a) in &self.terms {
            out.terms.insert(m.clone(), a.mul_unchecked(c));
        }
        out
    }

    pub fn mul(&self, other: &HomPoly) -> Result<HomPoly, PolyError> {
        self.compatible(other)?;
        let mut out = HomPoly::zero(self.field, self.n, self.degree + other.degree);
        for (ma, a) in &self.terms {
            for (mb, b) in &other.terms {
                out.add_term(ma.mul(mb), &a.mul_unchecked(b));
            }
        }
        Ok(out)
    }

    pub fn mul_monomial(&self, m: &Monomial) -> HomPoly {
        let mut out = HomPoly::zero(self.field, self.n, self.degree + m.degree());
        for (ma, a) in &self.terms {
            out.terms.insert(ma.mul(m), a.clone());
        }
        out
    }

    pub fn pow(&self, e: u32) -> HomPoly {
        let mut acc = HomPoly::constant(self.field, self.n, self.field.one());
        for _ in 0..e {
            acc = acc.mul(self).expect("same ring");
        }
        acc
    }

    /// Formal partial derivative with respect to `x_i`.
    pub fn partial(&self, i: usize) -> Result<HomPoly, PolyError> {
        if i > self.n {
            return Err(PolyError::IndexOutOfRange { index: i, n: self.n });
        }
        let mut out = HomPoly::zero(self.field, self.n, self.degree.saturating_sub(1));
        for (m, c) in &self.terms {
            let e = m.0[i];
            if e == 0 {
                continue;
            }
            let mut exps = m.0.clone();
            exps[i] -= 1;
            out.add_term(Monomial(exps), &c.scale_by_int(e as u64));
        }
        Ok(out)
    }

    /// Substitutes `x_j -> a * x_j` for each `j` in `vars`.
    pub fn scale_variables(&self, vars: &[usize], a: &Scalar) -> HomPoly {
        let mut out = HomPoly::zero(self.field, self.n, self.degree);
        for (m, c) in &self.terms {
            let e: u32 = vars.iter().map(|&j| m.0[j]).sum();
            out.add_term(m.clone(), &c.mul_unchecked(&a.pow(e as u64)));
        }
        out
    }

    /// Evaluates at a point of `F_p^{n+1}`; only meaningful over `F_p`.
    pub fn eval_mod(&self, point: &[u64]) -> u64 {
        let FieldSpec::PrimeField(p) = self.field else {
            panic!("eval_mod requires a prime field");
        };
        let p128 = p as u128;
        let mut acc: u128 = 0;
        for (m, c) in &self.terms {
            let Scalar::Modular { value, .. } = c else {
                unreachable!()
            };
            let mut t = *value as u128;
            for (x, &e) in point.iter().zip(&m.0) {
                for _ in 0..e {
                    t = t * (*x as u128) % p128;
                }
            }
            acc = (acc + t) % p128;
        }
        acc as u64
    }

    /// Dense coordinates against `basis`.
    pub fn to_dense(&self, basis: &GradedBasis) -> Result<Vec<Scalar>, PolyError> {
        if basis.n() != self.n {
            return Err(PolyError::VariableMismatch(basis.n(), self.n));
        }
        let mut v = vec![self.field.zero(); basis.len()];
        if self.is_zero() {
            return Ok(v);
        }
        if basis.degree() != self.degree {
            return Err(PolyError::DegreeMismatch {
                expected: basis.degree(),
                got: vec![self.degree],
            });
        }
        for (m, c) in &self.terms {
            let i = basis.index_of(m).expect("monomial of basis degree");
            v[i] = c.clone();
        }
        Ok(v)
    }

    pub fn from_dense(field: FieldSpec, basis: &GradedBasis, v: &[Scalar]) -> Result<HomPoly, PolyError> {
        if v.len() != basis.len() {
            return Err(PolyError::LengthMismatch {
                expected: basis.len(),
                got: v.len(),
            });
        }
        let mut p = HomPoly::zero(field, basis.n(), basis.degree());
        for (i, c) in v.iter().enumerate() {
            if c.field() != field {
                return Err(PolyError::FieldMismatch(field, c.field()));
            }
            if !c.is_zero() {
                p.terms.insert(basis.monomial(i).clone(), c.clone());
            }
        }
        Ok(p)
    }

    /// Sparse `(basis index, coefficient)` pairs in increasing index order.
    pub(crate) fn to_sparse_indices(&self, basis: &GradedBasis) -> Vec<(usize, Scalar)> {
        let mut v: Vec<(usize, Scalar)> = self
            .terms
            .iter()
            .map(|(m, c)| (basis.index_of(m).expect("monomial of basis degree"), c.clone()))
            .collect();
        v.sort_by_key(|(i, _)| *i);
        v
    }

    pub fn to_json(&self) -> PolyJson {
        PolyJson {
            n: self.n,
            degree: self.degree,
            terms: self
                .terms
                .iter()
                .rev()
                .map(|(m, c)| TermJson {
                    coeff: CoeffJson::from_scalar(c),
                    exps: m.0.clone(),
                })
                .collect(),
        }
    }

    pub fn from_json(field: FieldSpec, json: &PolyJson) -> Result<HomPoly, PolyError> {
        let terms = json
            .terms
            .iter()
            .map(|t| Ok((t.exps.clone(), t.coeff.to_scalar(field)?)))
            .collect::<Result<Vec<_>, PolyError>>()?;
        HomPoly::from_terms(field, json.n, json.degree, terms)
    }
}

impl fmt::Display for HomPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (m, c)) in self.terms.iter().rev().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            if c.is_one() && m.degree() > 0 {
                write!(f, "{m}")?;
            } else if m.degree() == 0 {
                write!(f, "{c}")?;
            } else {
                write!(f, "{c}*{m}")?;
            }
        }
        Ok(())
    }
}

/// Wire format of a coefficient: a JSON integer or a `"a/b"` string.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CoeffJson {
    Int(i64),
    Str(String),
}

impl CoeffJson {
    pub fn from_scalar(c: &Scalar) -> CoeffJson {
        match c.to_i64() {
            Some(v) => CoeffJson::Int(v),
            None => CoeffJson::Str(c.to_decimal_string()),
        }
    }

    pub fn to_scalar(&self, field: FieldSpec) -> Result<Scalar, ScalarError> {
        match self {
            CoeffJson::Int(v) => Ok(field.from_i64(*v)),
            CoeffJson::Str(s) => field.parse_scalar(s),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TermJson {
    pub coeff: CoeffJson,
    pub exps: Vec<u32>,
}

/// `{"n": .., "degree": .., "terms": [{"coeff": .., "exps": [..]}]}`
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolyJson {
    pub n: usize,
    pub degree: u32,
    pub terms: Vec<TermJson>,
}
