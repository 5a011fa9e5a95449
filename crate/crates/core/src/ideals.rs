//! Graded pieces of homogeneous ideals, their squares, and the space
//! `W_C = {F in S_l : C ⊂ V(F)_sing}`.
//!
//! Graded pieces come straight from the presented generators; nothing is
//! saturated. For the families used here (ideals of linear spaces, of
//! `(f, x_{b+2}, ..., x_n)` and of their squares) the presented and saturated
//! pieces agree in the degrees that matter. For any other input the caller
//! is computing with the presented ideal.

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gradedpoly::{monomials, CoeffJson, GradedBasis, HomPoly, PolyError, PolyJson};
use crate::linalg::{kernel_of_stacked, Ambient, LinalgError, Subspace};
use crate::scalars::{FieldSpec, Scalar, ScalarError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IdealError {
    #[error("generator {0} is the zero polynomial")]
    ZeroGenerator(usize),
    #[error("generator {index} lives in n = {got}, ideal has n = {expected}")]
    VariableMismatch { index: usize, expected: usize, got: usize },
    #[error("generator {index} has coefficients in {got}, ideal is over {expected}")]
    FieldMismatch { index: usize, expected: FieldSpec, got: FieldSpec },
    #[error("degree must be at least {min}, got {got}")]
    DegreeTooLow { min: u32, got: u32 },
    #[error("a configuration needs at least one linear space (d >= 1)")]
    EmptyConfiguration,
    #[error("need 1 <= b <= n - 1, got n = {n}, b = {b}")]
    BadDimension { n: usize, b: usize },
    #[error("direction {index} has {got} coordinates, expected n - b = {expected}")]
    DirectionLength { index: usize, expected: usize, got: usize },
    #[error("directions {0} and {1} coincide; the linear spaces must be distinct")]
    DuplicateDirection(usize, usize),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Scalar(#[from] ScalarError),
}

/// Homogeneous generators of an ideal of `k[x_0..x_n]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IdealPresentation {
    field: FieldSpec,
    n: usize,
    generators: Vec<HomPoly>,
}

impl IdealPresentation {
    pub fn new(field: FieldSpec, n: usize, generators: Vec<HomPoly>) -> Result<Self, IdealError> {
        for (index, g) in generators.iter().enumerate() {
            if g.is_zero() {
                return Err(IdealError::ZeroGenerator(index));
            }
            if g.n() != n {
                return Err(IdealError::VariableMismatch {
                    index,
                    expected: n,
                    got: g.n(),
                });
            }
            if g.field() != field {
                return Err(IdealError::FieldMismatch {
                    index,
                    expected: field,
                    got: g.field(),
                });
            }
        }
        Ok(IdealPresentation { field, n, generators })
    }

    /// `(x_{b+1}, ..., x_n)`, the ideal of the coordinate b-plane.
    pub fn coordinate_linear_space(field: FieldSpec, n: usize, b: usize) -> Result<Self, IdealError> {
        if b < 1 || b >= n {
            return Err(IdealError::BadDimension { n, b });
        }
        let gens = (b + 1..=n).map(|i| HomPoly::var(field, n, i)).collect();
        Self::new(field, n, gens)
    }

    /// `(f, x_{b+2}, ..., x_n)`: a hypersurface of the `(b+1)`-plane
    /// `V(x_{b+2}, ..., x_n)`. `f` should only involve `x_0..x_{b+1}`.
    pub fn hypersurface_in_plane(f: HomPoly, b: usize) -> Result<Self, IdealError> {
        let n = f.n();
        if b < 1 || b >= n {
            return Err(IdealError::BadDimension { n, b });
        }
        let field = f.field();
        let mut gens = vec![f];
        gens.extend((b + 2..=n).map(|i| HomPoly::var(field, n, i)));
        Self::new(field, n, gens)
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn generators(&self) -> &[HomPoly] {
        &self.generators
    }

    /// Generators of `I^2`: all products `g_i g_j` with `i <= j`.
    pub fn square(&self) -> IdealPresentation {
        let mut gens = Vec::new();
        for i in 0..self.generators.len() {
            for j in i..self.generators.len() {
                let p = self.generators[i]
                    .mul(&self.generators[j])
                    .expect("generators share a ring");
                gens.push(p);
            }
        }
        IdealPresentation {
            field: self.field,
            n: self.n,
            generators: gens,
        }
    }

    /// Span of `g * m` over generators `g` of degree `e <= l` and monomials
    /// `m` of degree `l - e`, as a subspace of `S_l`.
    pub fn graded_piece(&self, l: u32) -> Subspace {
        let basis = GradedBasis::of(self.n, l);
        let ambient = Ambient::graded(self.n, l, basis.len());
        let mut rows = Vec::new();
        for g in &self.generators {
            if g.degree() > l {
                continue;
            }
            for m in monomials(self.n, l - g.degree()) {
                rows.push(g.mul_monomial(&m).to_sparse_indices(&basis));
            }
        }
        Subspace::from_sparse_rows(self.field, ambient, rows)
    }

    /// `{F in S_l : F in I_l and dF/dx_i in I_{l-1} for all i}`, the kernel
    /// of `S_l -> S_l/I_l ⊕ (S_{l-1}/I_{l-1})^{n+1}`.
    pub fn w_space(&self, l: u32) -> Result<Subspace, IdealError> {
        if l < 1 {
            return Err(IdealError::DegreeTooLow { min: 1, got: l });
        }
        let top = GradedBasis::of(self.n, l);
        let low = GradedBasis::of(self.n, l - 1);
        let piece = self.graded_piece(l);
        let lower = self.graded_piece(l - 1);
        let mut blocks = vec![(piece.quotient_columns(), piece.codim())];
        let lower_cols = lower.quotient_columns();
        for i in 0..=self.n {
            let cols = top
                .monomials()
                .iter()
                .map(|m| {
                    let e = m.exponents()[i];
                    if e == 0 {
                        return Vec::new();
                    }
                    let mut exps = m.exponents().to_vec();
                    exps[i] -= 1;
                    let j = low
                        .index_of(&crate::gradedpoly::Monomial::new(exps))
                        .expect("monomial of degree l - 1");
                    let c = self.field.from_i64(e as i64);
                    if c.is_zero() {
                        return Vec::new();
                    }
                    lower_cols[j]
                        .iter()
                        .map(|(k, x)| (*k, x.mul_unchecked(&c)))
                        .collect()
                })
                .collect();
            blocks.push((cols, lower.codim()));
        }
        Ok(kernel_of_stacked(self.field, piece.ambient(), &blocks))
    }

    pub fn to_json(&self) -> IdealJson {
        IdealJson {
            n: self.n,
            generators: self.generators.iter().map(HomPoly::to_json).collect(),
        }
    }

    pub fn from_json(field: FieldSpec, json: &IdealJson) -> Result<Self, IdealError> {
        let gens = json
            .generators
            .iter()
            .map(|g| HomPoly::from_json(field, g))
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(field, json.n, gens)
    }
}

/// `{"n": int, "generators": [HomPoly...]}`
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdealJson {
    pub n: usize,
    pub generators: Vec<PolyJson>,
}

/// `d` distinct b-planes `L_i = V(x_{b+1} - p_{b+1} x_0, ..., x_n - p_n x_0)`,
/// all containing the (b-1)-plane `V(x_0, x_{b+1}, ..., x_n)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearSpaceConfig {
    field: FieldSpec,
    n: usize,
    b: usize,
    directions: Vec<Vec<Scalar>>,
}

impl LinearSpaceConfig {
    pub fn new(field: FieldSpec, n: usize, b: usize, directions: Vec<Vec<Scalar>>) -> Result<Self, IdealError> {
        if b < 1 || b >= n {
            return Err(IdealError::BadDimension { n, b });
        }
        if directions.is_empty() {
            return Err(IdealError::EmptyConfiguration);
        }
        for (index, p) in directions.iter().enumerate() {
            if p.len() != n - b {
                return Err(IdealError::DirectionLength {
                    index,
                    expected: n - b,
                    got: p.len(),
                });
            }
            if let Some(x) = p.iter().find(|x| x.field() != field) {
                return Err(IdealError::Scalar(ScalarError::FieldMismatch(field, x.field())));
            }
        }
        for i in 0..directions.len() {
            for j in i + 1..directions.len() {
                if directions[i] == directions[j] {
                    return Err(IdealError::DuplicateDirection(i, j));
                }
            }
        }
        Ok(LinearSpaceConfig {
            field,
            n,
            b,
            directions,
        })
    }

    pub fn from_i64(field: FieldSpec, n: usize, b: usize, directions: &[Vec<i64>]) -> Result<Self, IdealError> {
        let dirs = directions
            .iter()
            .map(|p| p.iter().map(|&x| field.from_i64(x)).collect())
            .collect();
        Self::new(field, n, b, dirs)
    }

    /// `d` distinct directions with entries drawn from `rng`.
    pub fn random<R: Rng>(field: FieldSpec, n: usize, b: usize, d: usize, rng: &mut R) -> Result<Self, IdealError> {
        if b < 1 || b >= n {
            return Err(IdealError::BadDimension { n, b });
        }
        let mut dirs: Vec<Vec<Scalar>> = Vec::with_capacity(d);
        while dirs.len() < d {
            let p: Vec<Scalar> = (0..n - b).map(|_| random_scalar(field, rng)).collect();
            if !dirs.contains(&p) {
                dirs.push(p);
            }
        }
        Self::new(field, n, b, dirs)
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn b(&self) -> usize {
        self.b
    }

    pub fn d(&self) -> usize {
        self.directions.len()
    }

    pub fn directions(&self) -> &[Vec<Scalar>] {
        &self.directions
    }

    /// Ideal of the `i`-th linear space.
    pub fn ideal(&self, i: usize) -> IdealPresentation {
        let x0 = HomPoly::var(self.field, self.n, 0);
        let gens = (self.b + 1..=self.n)
            .zip(&self.directions[i])
            .map(|(j, p)| {
                HomPoly::var(self.field, self.n, j)
                    .sub(&x0.scale(p))
                    .expect("same ring")
            })
            .collect();
        IdealPresentation::new(self.field, self.n, gens).expect("linear generators are nonzero")
    }

    /// `(I_1^2 ∩ ... ∩ I_d^2)_l`, the forms singular along every `L_i`.
    pub fn union_squared_piece(&self, l: u32) -> Result<Subspace, IdealError> {
        if l < 1 {
            return Err(IdealError::DegreeTooLow { min: 1, got: l });
        }
        let pieces: Vec<Subspace> = (0..self.d())
            .map(|i| self.ideal(i).square().graded_piece(l))
            .collect();
        Ok(Subspace::intersect_all(&pieces)?)
    }

    pub fn to_json(&self) -> ConfigJson {
        ConfigJson {
            n: self.n,
            b: self.b,
            directions: self
                .directions
                .iter()
                .map(|p| p.iter().map(CoeffJson::from_scalar).collect())
                .collect(),
        }
    }

    pub fn from_json(field: FieldSpec, json: &ConfigJson) -> Result<Self, IdealError> {
        let dirs = json
            .directions
            .iter()
            .map(|p| p.iter().map(|c| c.to_scalar(field)).collect::<Result<Vec<_>, _>>())
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(field, json.n, json.b, dirs)
    }
}

/// `{"n": int, "b": int, "directions": [[...], ...]}`
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigJson {
    pub n: usize,
    pub b: usize,
    pub directions: Vec<Vec<CoeffJson>>,
}

/// Small integers over the rationals, uniform residues over `F_p`.
pub fn random_scalar<R: Rng>(field: FieldSpec, rng: &mut R) -> Scalar {
    match field {
        FieldSpec::Rationals => field.from_i64(rng.gen_range(-5..=5)),
        FieldSpec::PrimeField(p) => field.from_i64(rng.gen_range(0..p) as i64),
    }
}

/// A random nonzero form of degree `d` in the variables `x_0..x_k`.
pub fn random_form<R: Rng>(field: FieldSpec, n: usize, k: usize, d: u32, rng: &mut R) -> HomPoly {
    let sub = GradedBasis::of(k, d);
    loop {
        let terms = sub.monomials().iter().map(|m| {
            let mut exps = m.exponents().to_vec();
            exps.resize(n + 1, 0);
            (exps, random_scalar(field, rng))
        });
        let f = HomPoly::from_terms(field, n, d, terms).expect("consistent degrees");
        if !f.is_zero() {
            return f;
        }
    }
}

/// Whether `f` divides `p`, decided by solving `p = f * q` linearly: `p` must
/// lie in the degree-`deg p` piece of the principal ideal `(f)`.
pub fn divides(f: &HomPoly, p: &HomPoly) -> Result<bool, IdealError> {
    if p.is_zero() {
        return Ok(true);
    }
    if f.degree() > p.degree() {
        return Ok(false);
    }
    let principal = IdealPresentation::new(f.field(), f.n(), vec![f.clone()])?;
    let piece = principal.graded_piece(p.degree());
    let basis = GradedBasis::of(p.n(), p.degree());
    Ok(piece.contains(&p.to_dense(&basis)?)?)
}
