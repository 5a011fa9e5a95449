//! Dimension inequalities between the loci of singular hypersurfaces, and
//! certified thresholds `l0(n, b)` beyond which they hold.
//!
//! A threshold is found in two phases. For large `d` the right-hand side at
//! the smallest admissible `l = 2d - 1` is a polynomial in `d` that
//! eventually dominates; past a Cauchy root bound `d0` positivity is
//! automatic and the sum only grows with `l`. For each `d <= d0` the margin
//! is non-decreasing in `l`, so a scan finds the first good `l`.
//! Certificates record all of this and can be replayed independently.

use std::fmt::Display;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::formulas::{self, c, check_nb, FormulaError, Params};

/// Scans give up after this many steps; reaching it indicates a bug.
const SCAN_LIMIT: i64 = 10_000_000;
/// Width of the replay window and of the positivity check past `d0`.
pub const REPLAY_WINDOW: i64 = 100;
pub const TAIL_WINDOW: i64 = 50;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BoundsError {
    #[error("hypothesis violated: {0}")]
    Hypothesis(String),
    #[error("scan for {0} did not terminate")]
    SearchExhausted(String),
    #[error("difference polynomial for {0} has non-positive leading coefficient")]
    NotDominant(String),
    #[error(transparent)]
    Formula(#[from] FormulaError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Inequality {
    /// Small-degree inequality via the conjectural Hilbert scheme dimension.
    SmallDegree,
    /// Small-degree inequality for `b = 1`, where the dimension is proven.
    SmallDegreeUnconditional,
    SecondComponent,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GapReport {
    pub params: Params,
    #[serde(with = "as_string")]
    pub lhs: BigInt,
    #[serde(with = "as_string")]
    pub rhs: BigInt,
    #[serde(with = "as_string")]
    pub margin: BigInt,
    pub holds: bool,
    pub inequality: Inequality,
    pub conditional: bool,
}

impl GapReport {
    fn new(params: Params, lhs: BigInt, rhs: BigInt, inequality: Inequality, conditional: bool) -> Self {
        let margin = &rhs - &lhs;
        GapReport {
            params,
            holds: margin.is_positive(),
            lhs,
            rhs,
            margin,
            inequality,
            conditional,
        }
    }
}

/// `(b+2)(n-b-1) - 1 - (b+1)(n-b)`.
pub fn small_degree_constant(n: i64, b: i64) -> i64 {
    (b + 2) * (n - b - 1) - 1 - (b + 1) * (n - b)
}

/// `-(b+1)(b+4)/2 - 1`.
pub fn second_component_constant(b: i64) -> i64 {
    -(b + 1) * (b + 4) / 2 - 1
}

/// `(n-b) * sum_{e=from}^{d} C(l - 2e + 1 + b, b)`, zero when empty.
pub fn tail_sum(n: i64, b: i64, from: i64, d: i64, l: i64) -> BigInt {
    let s: BigInt = (from..=d).map(|e| c(l - 2 * e + 1 + b, b)).sum();
    (n - b) * s
}

/// Left side of the small-degree inequality, a function of `d` only.
pub fn small_degree_lhs(n: i64, b: i64, d: i64) -> BigInt {
    small_degree_constant(n, b) + c(d + b + 1, b + 1)
}

/// `c + (n-b) C(l+b-3, b-1) + C(l+b-3, b)`, the `l`-dependent part of the
/// second-component left side.
pub fn second_component_head(n: i64, b: i64, l: i64) -> BigInt {
    second_component_constant(b) + (n - b) * c(l + b - 3, b - 1) + c(l + b - 3, b)
}

/// The small-degree inequality at `(n, b, d, l)`. For `b = 1` the left side
/// is the proven dimension of the restricted Hilbert scheme minus
/// `dim G(1, n)`; for `b >= 2` it is the conjectural one.
pub fn gap_small_degree(n: i64, b: i64, d: i64, l: i64) -> Result<GapReport, BoundsError> {
    let params = Params::new(n, b, d, l)?;
    if d < 2 {
        return Err(BoundsError::Hypothesis(format!("d >= 2 (got d = {d})")));
    }
    let rhs = tail_sum(n, b, 2, d, l);
    if b == 1 {
        let lhs = formulas::rhilb_dim(n, b, d)?.value - formulas::grassmannian_dim(n, b);
        return Ok(GapReport::new(params, lhs, rhs, Inequality::SmallDegreeUnconditional, false));
    }
    Ok(GapReport::new(params, small_degree_lhs(n, b, d), rhs, Inequality::SmallDegree, true))
}

/// Smallest `d` the second-component inequality is stated for.
pub fn second_component_min_d(n: i64, b: i64) -> i64 {
    if n - b > 1 {
        3
    } else {
        4
    }
}

/// The second-component inequality at `(n, b, d, l)`.
pub fn gap_second_component(n: i64, b: i64, d: i64, l: i64) -> Result<GapReport, BoundsError> {
    let params = Params::new(n, b, d, l)?;
    if d < 3 {
        return Err(BoundsError::Hypothesis(format!("d >= 3 (got d = {d})")));
    }
    if b == n - 1 && d < 4 {
        return Err(BoundsError::Hypothesis(format!("d >= 4 when b = n - 1 (got d = {d})")));
    }
    let lhs = second_component_head(n, b, l) + c(d + b + 1, b + 1);
    let rhs = tail_sum(n, b, 3, d, l);
    Ok(GapReport::new(params, lhs, rhs, Inequality::SecondComponent, true))
}

/// What a threshold certificate guarantees.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum Target {
    /// Small-degree inequality for all `2 <= d <= (l+1)/2`.
    SmallDegree,
    /// Second-component inequality for all admissible `d <= (l+1)/2`.
    SecondComponent,
    /// Small-degree inequality for `2 <= d <= max_d` only, no tail.
    DegreeRange {
        #[serde(with = "as_string")]
        max_d: i64,
    },
}

/// A polynomial in one integer variable with rational coefficients
/// (ascending), agreeing with some margin function from `valid_from` on.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolyCertificate {
    pub variable: String,
    #[serde(with = "as_string")]
    pub valid_from: i64,
    #[serde(with = "vec_as_string")]
    pub coefficients: Vec<BigRational>,
    /// Ceiling of the Cauchy bound `1 + max |a_i / a_deg|`.
    #[serde(with = "as_string")]
    pub root_bound: BigInt,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PieceKind {
    /// Full second-component margin at the smallest admissible `d`.
    FirstDegree,
    /// `(n-b) sum_{e=3}^{s} C(l-2e+1+b, b)` minus the head.
    Head,
}

/// A threshold in `l` for a margin that is polynomial in `l`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LPiece {
    pub kind: PieceKind,
    #[serde(with = "as_string")]
    pub l_min: i64,
    pub poly: PolyCertificate,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DEntry {
    #[serde(with = "as_string")]
    pub d: i64,
    #[serde(with = "as_string")]
    pub min_l: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct L0Certificate {
    #[serde(with = "as_string")]
    pub n: i64,
    #[serde(with = "as_string")]
    pub b: i64,
    pub target: Target,
    pub conditional: bool,
    /// First `d` covered by `table` and `tail`.
    #[serde(with = "as_string")]
    pub d_first: i64,
    #[serde(with = "as_string")]
    pub d0: i64,
    /// A valid threshold; not necessarily the smallest one.
    #[serde(with = "as_string")]
    pub l0: i64,
    pub table: Vec<DEntry>,
    pub tail: Option<PolyCertificate>,
    pub pieces: Vec<LPiece>,
}

/// Margin that `table` and `tail` refer to: for the second component this
/// is the part `C(d+b+1, b+1) < (n-b) sum_{e=s+1}^d` only.
fn table_margin(target: Target, n: i64, b: i64, d: i64, l: i64) -> BigInt {
    match target {
        Target::SmallDegree | Target::DegreeRange { .. } => tail_sum(n, b, 2, d, l) - small_degree_lhs(n, b, d),
        Target::SecondComponent => {
            let s = second_component_min_d(n, b);
            tail_sum(n, b, s + 1, d, l) - c(d + b + 1, b + 1)
        }
    }
}

/// The table margin at the smallest admissible `l = 2d - 1`.
fn tail_value(target: Target, n: i64, b: i64, d: i64) -> BigInt {
    table_margin(target, n, b, d, 2 * d - 1)
}

fn piece_margin(kind: PieceKind, n: i64, b: i64, l: i64) -> BigInt {
    let s = second_component_min_d(n, b);
    match kind {
        PieceKind::FirstDegree => gap_second_component(n, b, s, l).expect("s is admissible").margin,
        PieceKind::Head => tail_sum(n, b, 3, s, l) - second_component_head(n, b, l),
    }
}

fn piece_valid_from(kind: PieceKind, n: i64, b: i64) -> i64 {
    let s = second_component_min_d(n, b);
    match kind {
        PieceKind::FirstDegree => 2 * s - 1,
        PieceKind::Head => 2 * s + 1,
    }
}

/// Smallest `d` and, for the second component, the first `d` handled by
/// the tail argument.
fn d_first(target: Target, n: i64, b: i64) -> i64 {
    match target {
        Target::SmallDegree | Target::DegreeRange { .. } => 2,
        Target::SecondComponent => second_component_min_d(n, b) + 1,
    }
}

/// Minimal `l >= 2d - 1` with positive table margin.
fn min_l_for(target: Target, n: i64, b: i64, d: i64) -> Result<i64, BoundsError> {
    let mut l = 2 * d - 1;
    while !table_margin(target, n, b, d, l).is_positive() {
        l += 1;
        if l - 2 * d > SCAN_LIMIT {
            return Err(BoundsError::SearchExhausted(format!("d = {d}")));
        }
    }
    Ok(l)
}

fn poly_certificate(
    variable: &str,
    valid_from: i64,
    degree: usize,
    f: impl Fn(i64) -> BigInt,
) -> Result<PolyCertificate, BoundsError> {
    let xs: Vec<i64> = (valid_from..valid_from + degree as i64 + 2).collect();
    let ys: Vec<BigInt> = xs.iter().map(|&x| f(x)).collect();
    let coefficients = poly::interpolate(&xs, &ys);
    match coefficients.last() {
        Some(lead) if lead.is_positive() => {}
        _ => return Err(BoundsError::NotDominant(variable.to_string())),
    }
    let root_bound = poly::cauchy_bound(&coefficients);
    Ok(PolyCertificate {
        variable: variable.to_string(),
        valid_from,
        coefficients,
        root_bound,
    })
}

fn l_piece(kind: PieceKind, n: i64, b: i64) -> Result<LPiece, BoundsError> {
    let from = piece_valid_from(kind, n, b);
    let poly = poly_certificate("l", from, b as usize, |l| piece_margin(kind, n, b, l))?;
    let top = poly.root_bound.clone().max(BigInt::from(from));
    let top = i64::try_from(top).map_err(|_| BoundsError::SearchExhausted(format!("{kind:?}")))?;
    let mut l_min = from;
    for l in from..=top {
        if !piece_margin(kind, n, b, l).is_positive() {
            l_min = l + 1;
        }
    }
    Ok(LPiece { kind, l_min, poly })
}

/// Computes a certified threshold `l0(n, b)` for `target`.
pub fn compute_l0(n: i64, b: i64, target: Target) -> Result<L0Certificate, BoundsError> {
    check_nb(n, b)?;
    let first = d_first(target, n, b);
    let (d0, tail) = match target {
        Target::DegreeRange { max_d } => {
            if max_d < 2 {
                return Err(BoundsError::Hypothesis(format!("B >= 2 (got B = {max_d})")));
            }
            (max_d, None)
        }
        _ => {
            let tail = poly_certificate("d", first, b as usize + 1, |d| tail_value(target, n, b, d))?;
            let bound = i64::try_from(&tail.root_bound).map_err(|_| BoundsError::SearchExhausted("d0".into()))?;
            (bound.max(first - 1), Some(tail))
        }
    };
    let mut table = Vec::new();
    for d in first..=d0 {
        table.push(DEntry {
            d,
            min_l: min_l_for(target, n, b, d)?,
        });
    }
    let mut pieces = Vec::new();
    if target == Target::SecondComponent {
        pieces.push(l_piece(PieceKind::FirstDegree, n, b)?);
        pieces.push(l_piece(PieceKind::Head, n, b)?);
    }
    let mut l0 = 2 * first - 1;
    if let Target::DegreeRange { max_d } = target {
        l0 = l0.max(2 * max_d - 1);
    }
    l0 = table
        .iter()
        .map(|e| e.min_l)
        .chain(pieces.iter().map(|p| p.l_min))
        .fold(l0, i64::max);
    Ok(L0Certificate {
        n,
        b,
        target,
        conditional: b >= 2 || target == Target::SecondComponent,
        d_first: first,
        d0,
        l0,
        table,
        tail,
        pieces,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub ok: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub ok: bool,
    pub checks: Vec<Check>,
}

fn check_poly(cert: &PolyCertificate, f: impl Fn(i64) -> BigInt) -> Result<(), String> {
    let deg = cert.coefficients.len().saturating_sub(1) as i64;
    for x in cert.valid_from..cert.valid_from + deg + 3 {
        if poly::eval(&cert.coefficients, x) != BigRational::from_integer(f(x)) {
            return Err(format!("polynomial disagrees with the margin at {} = {x}", cert.variable));
        }
    }
    match cert.coefficients.last() {
        Some(lead) if lead.is_positive() => {}
        _ => return Err("leading coefficient is not positive".into()),
    }
    if poly::cauchy_bound(&cert.coefficients) != cert.root_bound {
        return Err("root bound does not match the coefficients".into());
    }
    Ok(())
}

/// Replays a certificate from scratch: the window `[l0, l0 + 100]` across
/// all admissible `d`, every table entry, the tail polynomial with its root
/// bound and the `l`-pieces.
pub fn verify_certificate(cert: &L0Certificate) -> Result<VerifyReport, BoundsError> {
    let (n, b, target) = (cert.n, cert.b, cert.target);
    check_nb(n, b)?;
    let mut checks = Vec::new();
    let mut push = |name: &str, r: Result<(), String>| {
        checks.push(Check {
            name: name.to_string(),
            ok: r.is_ok(),
            detail: r.err().unwrap_or_default(),
        })
    };

    let d_lo = match target {
        Target::SecondComponent => second_component_min_d(n, b),
        _ => 2,
    };
    let d_hi_cap = match target {
        Target::DegreeRange { max_d } => max_d,
        _ => i64::MAX,
    };
    let mut replay = Ok(());
    'outer: for l in cert.l0..=cert.l0 + REPLAY_WINDOW {
        // The sum over e grows by one term per step in d.
        let (from, head) = match target {
            Target::SecondComponent => (3, second_component_head(n, b, l)),
            _ => (2, BigInt::from(small_degree_constant(n, b))),
        };
        let mut sum: BigInt = (from..d_lo).map(|e| c(l - 2 * e + 1 + b, b)).sum();
        for d in d_lo..=((l + 1) / 2).min(d_hi_cap) {
            sum += c(l - 2 * d + 1 + b, b);
            let m = (n - b) * &sum - &head - c(d + b + 1, b + 1);
            if !m.is_positive() {
                replay = Err(format!("margin {m} at d = {d}, l = {l}"));
                break 'outer;
            }
        }
    }
    push("replay window", replay);

    let first = d_first(target, n, b);
    let mut table = Ok(());
    let expected: Vec<i64> = (first..=cert.d0).collect();
    if cert.d_first != first || cert.table.iter().map(|e| e.d).collect::<Vec<_>>() != expected {
        table = Err("table does not cover d_first..=d0".to_string());
    }
    for e in &cert.table {
        if table.is_err() {
            break;
        }
        if !table_margin(target, n, b, e.d, e.min_l).is_positive() {
            table = Err(format!("margin not positive at d = {}, l = {}", e.d, e.min_l));
        } else if e.min_l > 2 * e.d - 1 && table_margin(target, n, b, e.d, e.min_l - 1).is_positive() {
            table = Err(format!("min_l for d = {} is not minimal", e.d));
        } else if e.min_l > cert.l0 || e.min_l < 2 * e.d - 1 {
            table = Err(format!("min_l for d = {} outside [2d - 1, l0]", e.d));
        }
    }
    push("per-d table", table);

    match (&cert.tail, target) {
        (None, Target::DegreeRange { .. }) => {}
        (Some(tail), Target::SmallDegree | Target::SecondComponent) => {
            let mut r = check_poly(tail, |d| tail_value(target, n, b, d));
            if r.is_ok() && tail.valid_from != first {
                r = Err("tail starts at the wrong degree".into());
            }
            if r.is_ok() && tail.root_bound > BigInt::from(cert.d0) {
                r = Err(format!("root bound {} exceeds d0 = {}", tail.root_bound, cert.d0));
            }
            if r.is_ok() {
                for d in cert.d0 + 1..=cert.d0 + TAIL_WINDOW {
                    if !tail_value(target, n, b, d).is_positive() {
                        r = Err(format!("tail not positive at d = {d}"));
                        break;
                    }
                }
            }
            push("tail polynomial", r);
        }
        _ => push("tail polynomial", Err("tail presence does not match the target".into())),
    }

    if target == Target::SecondComponent {
        for kind in [PieceKind::FirstDegree, PieceKind::Head] {
            let name = format!("{kind:?} piece");
            let Some(piece) = cert.pieces.iter().find(|p| p.kind == kind) else {
                push(&name, Err("missing".into()));
                continue;
            };
            let mut r = check_poly(&piece.poly, |l| piece_margin(kind, n, b, l));
            let from = piece_valid_from(kind, n, b);
            if r.is_ok() && (piece.poly.valid_from != from || piece.l_min < from || piece.l_min > cert.l0) {
                r = Err("l_min outside [valid_from, l0]".into());
            }
            if r.is_ok() {
                let top = i64::try_from(&piece.poly.root_bound).unwrap_or(i64::MAX).max(piece.l_min);
                if let Some(l) = (piece.l_min..=top).find(|&l| !piece_margin(kind, n, b, l).is_positive()) {
                    r = Err(format!("margin not positive at l = {l}"));
                }
            }
            push(&name, r);
        }
    } else if !cert.pieces.is_empty() {
        push("pieces", Err("unexpected l-pieces".into()));
    }

    let ok = checks.iter().all(|c| c.ok);
    Ok(VerifyReport { ok, checks })
}

mod poly {
    use super::*;

    fn mul_linear(p: &[BigRational], root: &BigRational) -> Vec<BigRational> {
        let mut out = vec![BigRational::zero(); p.len() + 1];
        for (i, a) in p.iter().enumerate() {
            out[i + 1] += a;
            out[i] -= a * root;
        }
        out
    }

    /// Coefficients (ascending) of the Lagrange interpolant, trimmed.
    pub fn interpolate(xs: &[i64], ys: &[BigInt]) -> Vec<BigRational> {
        let mut out = vec![BigRational::zero(); xs.len()];
        for (i, (&xi, yi)) in xs.iter().zip(ys).enumerate() {
            let mut basis = vec![BigRational::one()];
            let mut denom = BigInt::one();
            for (j, &xj) in xs.iter().enumerate() {
                if j != i {
                    basis = mul_linear(&basis, &BigRational::from_integer(xj.into()));
                    denom *= xi - xj;
                }
            }
            let scale = BigRational::new(yi.clone(), denom);
            for (k, a) in basis.iter().enumerate() {
                out[k] += a * &scale;
            }
        }
        while out.len() > 1 && out.last().is_some_and(Zero::is_zero) {
            out.pop();
        }
        out
    }

    pub fn eval(coeffs: &[BigRational], x: i64) -> BigRational {
        let x = BigRational::from_integer(x.into());
        coeffs.iter().rev().fold(BigRational::zero(), |acc, a| acc * &x + a)
    }

    /// `ceil(1 + max_{i < deg} |a_i / a_deg|)`; every real root is below it.
    pub fn cauchy_bound(coeffs: &[BigRational]) -> BigInt {
        let Some((lead, rest)) = coeffs.split_last() else {
            return BigInt::one();
        };
        let m = rest
            .iter()
            .map(|a| (a / lead).abs())
            .fold(BigRational::zero(), |m, v| if v > m { v } else { m });
        let v = BigRational::one() + m;
        let (q, r) = v.numer().div_rem(v.denom());
        if r.is_zero() {
            q
        } else {
            q + 1
        }
    }
}

/// Serializes any `Display + FromStr` value as a JSON string.
mod as_string {
    use super::*;
    use serde::{de::Error, Deserializer, Serializer};

    pub fn serialize<T: Display, S: Serializer>(v: &T, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(v)
    }

    pub fn deserialize<'de, T, D>(d: D) -> Result<T, D::Error>
    where
        T: FromStr,
        T::Err: Display,
        D: Deserializer<'de>,
    {
        let s = String::deserialize(d)?;
        s.parse().map_err(D::Error::custom)
    }
}

mod vec_as_string {
    use super::*;
    use serde::{de::Error, Deserializer, Serializer};

    pub fn serialize<T: Display, S: Serializer>(v: &[T], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(|x| x.to_string()))
    }

    pub fn deserialize<'de, T, D>(d: D) -> Result<Vec<T>, D::Error>
    where
        T: FromStr,
        T::Err: Display,
        D: Deserializer<'de>,
    {
        let v = Vec::<String>::deserialize(d)?;
        v.iter().map(|s| s.parse().map_err(D::Error::custom)).collect()
    }
}
