//! Point scans over prime fields: zero sets, singular points, the support of
//! the flat limit under `x_j -> a x_j` for the last `b` coordinates, and a
//! sampled check that generic forms in `(I^2)_l` are singular exactly along
//! `V(I)`.

use std::collections::BTreeSet;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gradedpoly::{GradedBasis, HomPoly, PolyError, PolyJson};
use crate::ideals::IdealPresentation;
use crate::scalars::{is_prime, FieldSpec, Scalar};

/// Largest projective space that `enumerate_points` will list.
pub const POINT_LIMIT: u64 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SpecializeError {
    #[error("{0} is not prime; only prime fields are supported")]
    NotPrime(u64),
    #[error("P^{n}(F_{q}) has more than {limit} points")]
    TooManyPoints { n: usize, q: u64, limit: u64 },
    #[error("polynomial is over {got}, the scan is over F_{q}")]
    FieldMismatch { q: u64, got: FieldSpec },
    #[error("polynomial lives in n = {got}, the scan is in P^{expected}")]
    VariableMismatch { expected: usize, got: usize },
    #[error("need 1 <= b <= n - 1, got n = {n}, b = {b}")]
    BadDimension { n: usize, b: usize },
    #[error("transversality hypothesis failed: C meets H in {got} points, expected {expected}")]
    Transversality { expected: usize, got: usize },
    #[error("degree l = {l} is below 2d + 1 = {min}")]
    DegreeTooLow { l: u32, min: u32 },
    #[error("the space of forms to sample from is zero")]
    ZeroSpace,
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// A point of `P^n(F_q)`, scaled so its first nonzero coordinate is 1.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ProjPoint(Vec<u64>);

impl ProjPoint {
    /// Normalizes a nonzero vector; `None` for the zero vector.
    pub fn normalize(coords: &[u64], q: u64) -> Option<ProjPoint> {
        let lead = coords.iter().position(|&x| x % q != 0)?;
        let inv = inv_mod(coords[lead] % q, q);
        Some(ProjPoint(
            coords.iter().map(|&x| ((x % q) as u128 * inv as u128 % q as u128) as u64).collect(),
        ))
    }

    pub fn coords(&self) -> &[u64] {
        &self.0
    }
}

impl fmt::Display for ProjPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(u64::to_string).collect();
        write!(f, "[{}]", parts.join(":"))
    }
}

pub type ZeroSet = BTreeSet<ProjPoint>;

fn inv_mod(a: u64, q: u64) -> u64 {
    let mut r = 1u128;
    let (mut base, mut e) = (a as u128, q - 2);
    while e > 0 {
        if e & 1 == 1 {
            r = r * base % q as u128;
        }
        base = base * base % q as u128;
        e >>= 1;
    }
    r as u64
}

fn check_prime(q: u64) -> Result<(), SpecializeError> {
    if !is_prime(q) {
        return Err(SpecializeError::NotPrime(q));
    }
    Ok(())
}

/// `|P^n(F_q)| = (q^{n+1} - 1)/(q - 1)`, or `None` past the limit.
pub fn point_count(n: usize, q: u64) -> Option<u64> {
    let mut total: u64 = 0;
    let mut power: u64 = 1;
    for _ in 0..=n {
        total = total.checked_add(power)?;
        power = power.checked_mul(q)?;
        if total > POINT_LIMIT {
            return None;
        }
    }
    Some(total)
}

/// All of `P^n(F_q)` in lexicographic order of normalized coordinates.
pub fn enumerate_points(n: usize, q: u64) -> Result<Vec<ProjPoint>, SpecializeError> {
    check_prime(q)?;
    let count = point_count(n, q).ok_or(SpecializeError::TooManyPoints { n, q, limit: POINT_LIMIT })?;
    let mut out = Vec::with_capacity(count as usize);
    // Points whose first nonzero coordinate sits at `lead`, in lex order:
    // leading zeros sort before leading ones, so larger `lead` comes first.
    for lead in (0..=n).rev() {
        let free = (n - lead) as u32;
        for idx in 0..q.pow(free) {
            let mut c = vec![0u64; n + 1];
            c[lead] = 1;
            let mut rest = idx;
            for j in (lead + 1..=n).rev() {
                c[j] = rest % q;
                rest /= q;
            }
            out.push(ProjPoint(c));
        }
    }
    Ok(out)
}

fn check_polys(gens: &[HomPoly], n: usize, q: u64) -> Result<(), SpecializeError> {
    for g in gens {
        if g.field() != FieldSpec::PrimeField(q) {
            return Err(SpecializeError::FieldMismatch { q, got: g.field() });
        }
        if g.n() != n {
            return Err(SpecializeError::VariableMismatch { expected: n, got: g.n() });
        }
    }
    Ok(())
}

/// Points of `P^n(F_q)` where every generator vanishes.
pub fn zero_set(gens: &[HomPoly], n: usize, q: u64) -> Result<ZeroSet, SpecializeError> {
    check_polys(gens, n, q)?;
    let points = enumerate_points(n, q)?;
    Ok(points
        .into_iter()
        .filter(|p| gens.iter().all(|g| g.eval_mod(p.coords()) == 0))
        .collect())
}

/// `V(F, dF/dx_0, ..., dF/dx_n)` over `F_q`.
pub fn singular_points(f: &HomPoly, n: usize, q: u64) -> Result<ZeroSet, SpecializeError> {
    zero_set(&singular_equations(f)?, n, q)
}

fn singular_equations(f: &HomPoly) -> Result<Vec<HomPoly>, SpecializeError> {
    let mut eqs = vec![f.clone()];
    for i in 0..=f.n() {
        let d = f.partial(i)?;
        if !d.is_zero() {
            eqs.push(d);
        }
    }
    Ok(eqs)
}

/// Substitutes `x_j -> a x_j` for `j = n-b+1, ..., n`.
pub fn specialize_generators(gens: &[HomPoly], n: usize, b: usize, a: &Scalar) -> Vec<HomPoly> {
    let vars: Vec<usize> = (n - b + 1..=n).collect();
    gens.iter().map(|g| g.scale_variables(&vars, a)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    Equal,
    /// The union of the linear spaces is strictly inside the limit's zero set.
    ProperContainment,
    /// Some point of the union is missing from the limit's zero set.
    Mismatch,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlatLimitReport {
    pub n: usize,
    pub b: usize,
    pub q: u64,
    /// Points of `C ∩ V(x_{n-b+1}, ..., x_n)`.
    pub intersection: Vec<ProjPoint>,
    /// Whether a caller-supplied count was compared against `intersection`.
    pub transversality_checked: bool,
    pub limit_points: usize,
    pub union_points: usize,
    /// Points of the union missing from the limit.
    pub missing: Vec<ProjPoint>,
    /// Points of the limit outside the union.
    pub extra: Vec<ProjPoint>,
    pub verdict: Verdict,
}

/// Whether `p` lies on the b-plane spanned by `V(x_0, ..., x_{n-b})` and
/// `qpt`: the first `n-b+1` coordinates must be a multiple (possibly 0) of
/// those of `qpt`.
fn on_span(p: &ProjPoint, qpt: &ProjPoint, head: usize, q: u64) -> bool {
    let hp = &p.coords()[..head];
    if hp.iter().all(|&x| x == 0) {
        return true;
    }
    let hq = &qpt.coords()[..head];
    let Some(i) = hq.iter().position(|&x| x != 0) else {
        return false;
    };
    let lambda = hp[i] as u128 * inv_mod(hq[i], q) as u128 % q as u128;
    hp.iter()
        .zip(hq)
        .all(|(&x, &y)| x as u128 == lambda * y as u128 % q as u128)
}

/// Compares the zero set of `limit_gens` with the union of the b-planes
/// through `V(x_0, ..., x_{n-b})` and each point of `centers`.
pub fn compare_limit_support(
    limit_gens: &[HomPoly],
    centers: &[ProjPoint],
    n: usize,
    b: usize,
    q: u64,
) -> Result<FlatLimitReport, SpecializeError> {
    if b < 1 || b >= n {
        return Err(SpecializeError::BadDimension { n, b });
    }
    let head = n - b + 1;
    let limit = zero_set(limit_gens, n, q)?;
    let union: ZeroSet = enumerate_points(n, q)?
        .into_iter()
        .filter(|p| centers.iter().any(|c| on_span(p, c, head, q)))
        .collect();
    let missing: Vec<ProjPoint> = union.difference(&limit).cloned().collect();
    let extra: Vec<ProjPoint> = limit.difference(&union).cloned().collect();
    let verdict = if !missing.is_empty() {
        Verdict::Mismatch
    } else if !extra.is_empty() {
        Verdict::ProperContainment
    } else {
        Verdict::Equal
    };
    Ok(FlatLimitReport {
        n,
        b,
        q,
        intersection: centers.to_vec(),
        transversality_checked: false,
        limit_points: limit.len(),
        union_points: union.len(),
        missing,
        extra,
        verdict,
    })
}

/// Specializes `gens` at `a = 0` and compares the support of the limit with
/// the union of the b-planes through `P = V(x_0, ..., x_{n-b})` and the
/// points `Q_i` of `C ∩ H`, `H = V(x_{n-b+1}, ..., x_n)`. When `expected_d`
/// is given, `|C ∩ H|` must match it.
pub fn check_flat_limit_support(
    gens: &[HomPoly],
    n: usize,
    b: usize,
    q: u64,
    expected_d: Option<usize>,
) -> Result<FlatLimitReport, SpecializeError> {
    if b < 1 || b >= n {
        return Err(SpecializeError::BadDimension { n, b });
    }
    check_prime(q)?;
    let field = FieldSpec::PrimeField(q);
    let mut cut = gens.to_vec();
    cut.extend((n - b + 1..=n).map(|j| HomPoly::var(field, n, j)));
    let centers: Vec<ProjPoint> = zero_set(&cut, n, q)?.into_iter().collect();
    if let Some(d) = expected_d {
        if centers.len() != d {
            return Err(SpecializeError::Transversality {
                expected: d,
                got: centers.len(),
            });
        }
    }
    let limit_gens = specialize_generators(gens, n, b, &field.zero());
    let mut report = compare_limit_support(&limit_gens, &centers, n, b, q)?;
    report.transversality_checked = expected_d.is_some();
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenericSingularReport {
    pub n: usize,
    pub l: u32,
    pub q: u64,
    pub seed: u64,
    pub trials: usize,
    /// `dim (I^2)_l` over `F_q`.
    pub space_dim: usize,
    pub c_points: usize,
    /// Samples whose singular points are exactly `V(I)(F_q)`.
    pub exact: usize,
    /// Samples with `V(I)(F_q)` inside their singular points.
    pub contained: usize,
    /// `None` when no trials were run.
    pub exact_fraction: Option<f64>,
    pub witness: Option<PolyJson>,
}

impl GenericSingularReport {
    pub fn witness_found(&self) -> bool {
        self.witness.is_some()
    }

    pub fn containment_holds(&self) -> bool {
        self.contained == self.trials
    }
}

/// Samples `trials` uniform elements `F` of `(I^2)_l` over `F_q` and compares
/// `V(F)_sing` with `V(I)` point by point. Requires `l >= 2d + 1` with `d`
/// the largest generator degree.
pub fn generic_singular_support_check(
    ideal: &IdealPresentation,
    l: u32,
    q: u64,
    trials: usize,
    seed: u64,
) -> Result<GenericSingularReport, SpecializeError> {
    check_prime(q)?;
    let n = ideal.n();
    check_polys(ideal.generators(), n, q)?;
    let d = ideal.generators().iter().map(HomPoly::degree).max().unwrap_or(0);
    if l < 2 * d + 1 {
        return Err(SpecializeError::DegreeTooLow { l, min: 2 * d + 1 });
    }
    let w = ideal.square().graded_piece(l);
    if w.dim() == 0 {
        return Err(SpecializeError::ZeroSpace);
    }
    let field = ideal.field();
    let basis = GradedBasis::of(n, l);
    let rows = w.sparse_basis();
    let points = enumerate_points(n, q)?;
    let c_set: ZeroSet = points
        .iter()
        .filter(|p| ideal.generators().iter().all(|g| g.eval_mod(p.coords()) == 0))
        .cloned()
        .collect();

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut exact, mut contained, mut witness) = (0, 0, None);
    for _ in 0..trials {
        let mut v = vec![field.zero(); basis.len()];
        for row in &rows {
            let t = field.from_i64(rng.gen_range(0..q) as i64);
            for (j, x) in row {
                v[*j] = v[*j].add_unchecked(&x.mul_unchecked(&t));
            }
        }
        let f = HomPoly::from_dense(field, &basis, &v)?;
        let eqs = singular_equations(&f)?;
        let sing: ZeroSet = points
            .iter()
            .filter(|p| eqs.iter().all(|g| g.eval_mod(p.coords()) == 0))
            .cloned()
            .collect();
        if c_set.is_subset(&sing) {
            contained += 1;
        }
        if sing == c_set {
            exact += 1;
            if witness.is_none() {
                witness = Some(f.to_json());
            }
        }
    }
    Ok(GenericSingularReport {
        n,
        l,
        q,
        seed,
        trials,
        space_dim: w.dim(),
        c_points: c_set.len(),
        exact,
        contained,
        exact_fraction: (trials > 0).then(|| exact as f64 / trials as f64),
        witness,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fp(q: u64) -> FieldSpec {
        FieldSpec::PrimeField(q)
    }

    fn p(q: u64, n: usize, s: &str) -> HomPoly {
        HomPoly::parse(fp(q), n, s).unwrap()
    }

    fn pt(c: &[u64]) -> ProjPoint {
        ProjPoint(c.to_vec())
    }

    #[test]
    fn point_counts() {
        assert_eq!(enumerate_points(1, 3).unwrap().len(), 4);
        assert_eq!(enumerate_points(3, 3).unwrap().len(), 40);
        assert_eq!(enumerate_points(2, 5).unwrap().len(), 31);
        assert!(matches!(enumerate_points(2, 4), Err(SpecializeError::NotPrime(4))));
        assert!(matches!(enumerate_points(6, 11), Err(SpecializeError::TooManyPoints { .. })));
    }

    #[test]
    fn enumeration_is_canonical() {
        for (n, q) in [(1, 2), (2, 3), (3, 5), (4, 3)] {
            let pts = enumerate_points(n, q).unwrap();
            let expected = (q.pow(n as u32 + 1) - 1) / (q - 1);
            assert_eq!(pts.len() as u64, expected);
            assert!(pts.windows(2).all(|w| w[0] < w[1]));
            for p in &pts {
                assert_eq!(ProjPoint::normalize(p.coords(), q).as_ref(), Some(p));
            }
        }
    }

    #[test]
    fn normalization() {
        assert_eq!(ProjPoint::normalize(&[0, 2, 4], 5), Some(pt(&[0, 1, 2])));
        assert_eq!(ProjPoint::normalize(&[0, 0, 0], 5), None);
        assert_eq!(ProjPoint::normalize(&[3, 6], 7), ProjPoint::normalize(&[1, 2], 7));
        assert_eq!(pt(&[0, 1, 2]).to_string(), "[0:1:2]");
    }

    #[test]
    fn zero_sets() {
        let z = zero_set(&[p(3, 1, "x0")], 1, 3).unwrap();
        assert_eq!(z.into_iter().collect::<Vec<_>>(), vec![pt(&[0, 1])]);
        let z = zero_set(&[p(3, 3, "x2"), p(3, 3, "x0*x1")], 3, 3).unwrap();
        assert_eq!(z.len(), 7);
        assert!(z.contains(&pt(&[0, 0, 0, 1])));
        assert_eq!(zero_set(&[], 2, 5).unwrap().len(), 31);
        assert!(zero_set(&[HomPoly::parse(FieldSpec::Rationals, 1, "x0").unwrap()], 1, 3).is_err());
    }

    #[test]
    fn singular_point_examples() {
        let s = singular_points(&p(5, 1, "x0^2"), 1, 5).unwrap();
        assert_eq!(s.into_iter().collect::<Vec<_>>(), vec![pt(&[0, 1])]);
        assert!(singular_points(&p(5, 2, "x0*x2 - x1^2"), 2, 5).unwrap().is_empty());
        let f = p(7, 2, "x0*x1 + x2^2 - 3*x0^2");
        let zf = zero_set(std::slice::from_ref(&f), 2, 7).unwrap();
        let sq = singular_points(&f.mul(&f).unwrap(), 2, 7).unwrap();
        assert!(zf.is_subset(&sq));
    }

    #[test]
    fn specialization_of_generators() {
        let gens = vec![p(3, 3, "x2"), p(3, 3, "x0*x1 - x3^2")];
        let zero = fp(3).zero();
        assert_eq!(specialize_generators(&gens, 3, 1, &zero), vec![p(3, 3, "x2"), p(3, 3, "x0*x1")]);
        assert_eq!(specialize_generators(&gens, 3, 1, &fp(3).one()), gens);
        let a = fp(3).from_i64(2);
        let c = fp(3).from_i64(2);
        let scaled: Vec<HomPoly> = gens.iter().map(|g| g.scale(&c)).collect();
        let lhs: Vec<HomPoly> = specialize_generators(&scaled, 3, 1, &a);
        let rhs: Vec<HomPoly> = specialize_generators(&gens, 3, 1, &a).iter().map(|g| g.scale(&c)).collect();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn conic_flat_limit_is_two_lines() {
        let gens = vec![p(3, 3, "x2"), p(3, 3, "x0*x1 - x3^2")];
        let r = check_flat_limit_support(&gens, 3, 1, 3, Some(2)).unwrap();
        assert_eq!(r.intersection, vec![pt(&[0, 1, 0, 0]), pt(&[1, 0, 0, 0])]);
        assert_eq!(r.limit_points, 7);
        assert_eq!(r.union_points, 7);
        assert_eq!(r.verdict, Verdict::Equal);
        assert!(r.transversality_checked);
        assert!(matches!(
            check_flat_limit_support(&gens, 3, 1, 3, Some(3)),
            Err(SpecializeError::Transversality { expected: 3, got: 2 })
        ));
    }

    #[test]
    fn single_line_is_its_own_limit() {
        let gens = vec![p(5, 3, "x1 - 2*x0"), p(5, 3, "x2 + x0")];
        let r = check_flat_limit_support(&gens, 3, 1, 5, Some(1)).unwrap();
        assert_eq!(r.verdict, Verdict::Equal);
        assert_eq!(r.union_points, 6);
    }

    #[test]
    fn limit_with_extra_component_is_flagged() {
        // Dropping x2 from the limit adds the planes x0 = 0 and x1 = 0.
        let centers = vec![pt(&[0, 1, 0, 0]), pt(&[1, 0, 0, 0])];
        let r = compare_limit_support(&[p(3, 3, "x0*x1")], &centers, 3, 1, 3).unwrap();
        assert_eq!(r.verdict, Verdict::ProperContainment);
        assert!(!r.extra.is_empty() && r.missing.is_empty());
        // An extra equation cuts the lines down to points.
        let r = compare_limit_support(&[p(3, 3, "x2"), p(3, 3, "x0*x1"), p(3, 3, "x3")], &centers, 3, 1, 3).unwrap();
        assert_eq!(r.verdict, Verdict::Mismatch);
    }

    #[test]
    fn generic_quadric_witness() {
        let f = p(7, 3, "x0*x2 - x1^2");
        let ideal = IdealPresentation::hypersurface_in_plane(f, 1).unwrap();
        let r = generic_singular_support_check(&ideal, 5, 7, 20, 11).unwrap();
        assert_eq!(r.c_points, 8);
        assert!(r.containment_holds());
        assert!(r.witness_found());
        let again = generic_singular_support_check(&ideal, 5, 7, 20, 11).unwrap();
        assert_eq!(r, again);
    }

    #[test]
    fn generic_check_edge_cases() {
        let f = p(7, 3, "x0*x2 - x1^2");
        let ideal = IdealPresentation::hypersurface_in_plane(f, 1).unwrap();
        let r = generic_singular_support_check(&ideal, 5, 7, 0, 1).unwrap();
        assert_eq!(r.exact_fraction, None);
        assert!(!r.witness_found());
        assert!(matches!(
            generic_singular_support_check(&ideal, 4, 7, 5, 1),
            Err(SpecializeError::DegreeTooLow { l: 4, min: 5 })
        ));
    }
}
