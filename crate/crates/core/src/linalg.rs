//! Exact linear algebra over [`Scalar`]s.
//!
//! Two engines live here. [`ExactMatrix::echelon`] is a dense elimination:
//! fraction-free Bareiss over the rationals (pivots normalized only at the
//! end) and plain Gaussian elimination over `F_p`. [`Subspace`] is built by a
//! sparse incremental echelon builder, which is what the graded-ideal code
//! uses: rows of `g * m` products are very sparse and most of them are unit
//! vectors. Both engines pivot deterministically on the first nonzero entry
//! in column order.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::scalars::{FieldSpec, Scalar};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LinalgError {
    #[error("ambient mismatch: {0:?} vs {1:?}")]
    AmbientMismatch(Ambient, Ambient),
    #[error("field mismatch: {0} vs {1}")]
    FieldMismatch(FieldSpec, FieldSpec),
    #[error("vector of length {got} in ambient of dimension {expected}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("ragged matrix: row {row} has {got} entries, expected {expected}")]
    Ragged { row: usize, expected: usize, got: usize },
}

/// Dense rectangular matrix, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactMatrix {
    field: FieldSpec,
    rows: usize,
    cols: usize,
    entries: Vec<Scalar>,
}

impl ExactMatrix {
    pub fn zeros(field: FieldSpec, rows: usize, cols: usize) -> Self {
        ExactMatrix {
            field,
            rows,
            cols,
            entries: vec![field.zero(); rows * cols],
        }
    }

    pub fn identity(field: FieldSpec, n: usize) -> Self {
        let mut m = Self::zeros(field, n, n);
        for i in 0..n {
            m.set(i, i, field.one());
        }
        m
    }

    pub fn from_rows(field: FieldSpec, rows: Vec<Vec<Scalar>>, cols: usize) -> Result<Self, LinalgError> {
        let nrows = rows.len();
        let mut entries = Vec::with_capacity(nrows * cols);
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != cols {
                return Err(LinalgError::Ragged {
                    row: i,
                    expected: cols,
                    got: row.len(),
                });
            }
            for x in &row {
                if x.field() != field {
                    return Err(LinalgError::FieldMismatch(field, x.field()));
                }
            }
            entries.extend(row);
        }
        Ok(ExactMatrix {
            field,
            rows: nrows,
            cols,
            entries,
        })
    }

    pub fn from_i64(field: FieldSpec, rows: &[Vec<i64>]) -> Result<Self, LinalgError> {
        let cols = rows.first().map_or(0, |r| r.len());
        let conv = rows
            .iter()
            .map(|r| r.iter().map(|&x| field.from_i64(x)).collect())
            .collect();
        Self::from_rows(field, conv, cols)
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Scalar {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Scalar) {
        assert_eq!(v.field(), self.field, "entry from a different field");
        self.entries[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[Scalar] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<Scalar>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    /// Reduced row-echelon form and rank. Zero rows are kept at the bottom so
    /// the shape is unchanged.
    pub fn echelon(&self) -> (ExactMatrix, usize) {
        match self.field {
            FieldSpec::Rationals => self.echelon_bareiss(),
            FieldSpec::PrimeField(_) => self.echelon_gauss(),
        }
    }

    pub fn rank(&self) -> usize {
        self.echelon().1
    }

    fn echelon_gauss(&self) -> (ExactMatrix, usize) {
        let mut m = self.clone();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = (r..m.rows).find(|&i| !m.get(i, c).is_zero()) else {
                continue;
            };
            m.swap_rows(r, p);
            let inv = m.get(r, c).inv().expect("nonzero pivot");
            for j in c..m.cols {
                let v = m.get(r, j).mul_unchecked(&inv);
                m.set(r, j, v);
            }
            for i in 0..m.rows {
                if i == r || m.get(i, c).is_zero() {
                    continue;
                }
                let f = m.get(i, c).clone();
                for j in c..m.cols {
                    let x = m.get(r, j).clone();
                    m.entries[i * m.cols + j].sub_assign_product(&f, &x);
                }
            }
            r += 1;
        }
        (m, r)
    }

    /// Fraction-free elimination on the denominator-cleared integer matrix;
    /// every intermediate entry is a minor of the input, so the division by
    /// the previous pivot is exact.
    fn echelon_bareiss(&self) -> (ExactMatrix, usize) {
        let mut a: Vec<Vec<BigInt>> = (0..self.rows)
            .map(|i| {
                let row = self.row(i);
                let lcm = row.iter().fold(BigInt::one(), |acc, x| {
                    acc.lcm(x.as_rational().expect("rational entry").denom())
                });
                row.iter()
                    .map(|x| {
                        let q = x.as_rational().expect("rational entry");
                        q.numer() * (&lcm / q.denom())
                    })
                    .collect()
            })
            .collect();

        let (rows, cols) = (self.rows, self.cols);
        let mut prev = BigInt::one();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..cols {
            if r == rows {
                break;
            }
            let Some(p) = (r..rows).find(|&i| !a[i][c].is_zero()) else {
                continue;
            };
            a.swap(r, p);
            let (top, rest) = a.split_at_mut(r + 1);
            let pivot_row = &top[r];
            for row in rest.iter_mut() {
                let lead = row[c].clone();
                for j in c + 1..cols {
                    let v = &pivot_row[c] * &row[j] - &lead * &pivot_row[j];
                    row[j] = v / &prev;
                }
                row[c] = BigInt::zero();
            }
            prev = pivot_row[c].clone();
            pivots.push(c);
            r += 1;
        }

        // Back to the rationals: normalize pivots, then clear above them.
        let mut q: Vec<Vec<BigRational>> = a
            .into_iter()
            .map(|row| row.into_iter().map(BigRational::from_integer).collect())
            .collect();
        for (i, &c) in pivots.iter().enumerate() {
            let inv = q[i][c].recip();
            for x in q[i][c..].iter_mut() {
                *x *= &inv;
            }
        }
        for (i, &c) in pivots.iter().enumerate().rev() {
            let (upper, lower) = q.split_at_mut(i);
            let prow = &lower[0];
            for row in upper.iter_mut() {
                if row[c].is_zero() {
                    continue;
                }
                let f = row[c].clone();
                for j in c..cols {
                    if !prow[j].is_zero() {
                        let d = &f * &prow[j];
                        row[j] -= d;
                    }
                }
            }
        }
        let entries = q.into_iter().flatten().map(Scalar::Rational).collect();
        (
            ExactMatrix {
                field: self.field,
                rows,
                cols,
                entries,
            },
            r,
        )
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.entries.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    /// Right null space `{v : M v = 0}`.
    pub fn kernel(&self) -> Subspace {
        let (rref, rank) = self.echelon();
        let mut pivot_cols = Vec::with_capacity(rank);
        for i in 0..rank {
            let c = (0..self.cols)
                .find(|&j| !rref.get(i, j).is_zero())
                .expect("nonzero echelon row");
            pivot_cols.push(c);
        }
        let mut is_pivot = vec![false; self.cols];
        for &c in &pivot_cols {
            is_pivot[c] = true;
        }
        let ambient = Ambient::plain(self.cols);
        let vectors = (0..self.cols).filter(|&f| !is_pivot[f]).map(|f| {
            let mut v: Vec<(usize, Scalar)> = vec![(f, self.field.one())];
            for (i, &c) in pivot_cols.iter().enumerate() {
                let x = rref.get(i, f);
                if !x.is_zero() {
                    v.push((c, x.neg()));
                }
            }
            v.sort_by_key(|(j, _)| *j);
            v
        });
        Subspace::from_sparse_rows(self.field, ambient, vectors)
    }
}

/// The space a [`Subspace`] lives in: `k^dim`, optionally tagged as the
/// graded piece `S_l` of `k[x_0..x_n]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Ambient {
    pub dim: usize,
    pub graded: Option<(usize, u32)>,
}

impl Ambient {
    pub fn plain(dim: usize) -> Self {
        Ambient { dim, graded: None }
    }

    pub fn graded(n: usize, degree: u32, dim: usize) -> Self {
        Ambient {
            dim,
            graded: Some((n, degree)),
        }
    }
}

/// One echelon row: sorted `(column, value)` pairs whose first entry is the
/// pivot, equal to 1.
#[derive(Debug, Clone, PartialEq, Eq)]
struct Row {
    entries: Vec<(usize, Scalar)>,
}

impl Row {
    fn pivot(&self) -> usize {
        self.entries[0].0
    }
}

type Work = BTreeMap<usize, Scalar>;

fn axpy(work: &mut Work, factor: &Scalar, row: &Row) {
    for (j, x) in &row.entries {
        match work.get_mut(j) {
            Some(v) => {
                v.sub_assign_product(factor, x);
                if v.is_zero() {
                    work.remove(j);
                }
            }
            None => {
                let v = x.mul_unchecked(factor).neg();
                work.insert(*j, v);
            }
        }
    }
}

/// Incremental echelon builder over `k^dim`.
#[derive(Debug, Clone)]
struct Builder {
    field: FieldSpec,
    rows: Vec<Row>,
    pivot_row: Vec<Option<usize>>,
}

impl Builder {
    fn new(field: FieldSpec, dim: usize) -> Self {
        Builder {
            field,
            rows: Vec::new(),
            pivot_row: vec![None; dim],
        }
    }

    /// Reduces until the leading entry sits in a free column; adds the
    /// result as a new pivot row. Returns false if `work` reduced to zero.
    fn insert(&mut self, mut work: Work) -> bool {
        loop {
            let Some((&c, lead)) = work.iter().next() else {
                return false;
            };
            match self.pivot_row[c] {
                Some(r) => {
                    let f = lead.clone();
                    axpy(&mut work, &f, &self.rows[r]);
                }
                None => {
                    let inv = lead.inv().expect("nonzero lead");
                    let entries = work
                        .into_iter()
                        .map(|(j, x)| (j, if j == c { self.field.one() } else { x.mul_unchecked(&inv) }))
                        .collect();
                    self.pivot_row[c] = Some(self.rows.len());
                    self.rows.push(Row { entries });
                    return true;
                }
            }
        }
    }

    /// Full reduction: the residual has zeros in every pivot column.
    fn reduce(&self, mut work: Work) -> Work {
        let mut cursor = 0;
        loop {
            let next = work.range(cursor..).find(|(c, _)| self.pivot_row[**c].is_some());
            let Some((&c, lead)) = next else {
                return work;
            };
            let r = self.pivot_row[c].expect("pivot");
            let f = lead.clone();
            axpy(&mut work, &f, &self.rows[r]);
            cursor = c + 1;
        }
    }

    fn finish(mut self, ambient: Ambient) -> Subspace {
        self.rows.sort_by_key(Row::pivot);
        Subspace {
            field: self.field,
            ambient,
            rows: self.rows,
        }
    }
}

fn to_work(v: impl IntoIterator<Item = (usize, Scalar)>) -> Work {
    let mut w = Work::new();
    for (j, x) in v {
        if x.is_zero() {
            continue;
        }
        match w.get_mut(&j) {
            Some(y) => {
                *y = y.add_unchecked(&x);
                if y.is_zero() {
                    w.remove(&j);
                }
            }
            None => {
                w.insert(j, x);
            }
        }
    }
    w
}

fn dense_to_work(v: &[Scalar]) -> Work {
    v.iter()
        .enumerate()
        .filter(|(_, x)| !x.is_zero())
        .map(|(j, x)| (j, x.clone()))
        .collect()
}

/// A linear subspace of `k^dim`, held as echelon rows with monic pivots in
/// strictly increasing columns. Rows need not be fully reduced; use
/// [`Subspace::rref`] for the canonical basis.
#[derive(Debug, Clone)]
pub struct Subspace {
    field: FieldSpec,
    ambient: Ambient,
    rows: Vec<Row>,
}

impl PartialEq for Subspace {
    /// Equality of row spaces.
    fn eq(&self, other: &Self) -> bool {
        self.field == other.field
            && self.ambient == other.ambient
            && self.dim() == other.dim()
            && other.contains_subspace(self).unwrap_or(false)
    }
}

impl Eq for Subspace {}

impl Subspace {
    pub fn zero(field: FieldSpec, ambient: Ambient) -> Self {
        Subspace {
            field,
            ambient,
            rows: Vec::new(),
        }
    }

    pub fn full(field: FieldSpec, ambient: Ambient) -> Self {
        Subspace {
            field,
            ambient,
            rows: (0..ambient.dim)
                .map(|j| Row {
                    entries: vec![(j, field.one())],
                })
                .collect(),
        }
    }

    /// Span of sparse vectors given as `(column, value)` pairs (any order,
    /// repeated columns are summed).
    pub fn from_sparse_rows<I, R>(field: FieldSpec, ambient: Ambient, rows: I) -> Self
    where
        I: IntoIterator<Item = R>,
        R: IntoIterator<Item = (usize, Scalar)>,
    {
        let mut works: Vec<Work> = rows.into_iter().map(to_work).collect();
        // Sparsest first: unit vectors clear whole columns before the dense
        // rows arrive. Ties keep input order, so results are deterministic.
        works.sort_by_key(|w| w.len());
        let mut b = Builder::new(field, ambient.dim);
        for w in works {
            debug_assert!(w.keys().all(|&j| j < ambient.dim));
            b.insert(w);
        }
        b.finish(ambient)
    }

    pub fn from_dense_rows(field: FieldSpec, ambient: Ambient, rows: &[Vec<Scalar>]) -> Result<Self, LinalgError> {
        for r in rows {
            if r.len() != ambient.dim {
                return Err(LinalgError::LengthMismatch {
                    expected: ambient.dim,
                    got: r.len(),
                });
            }
            if let Some(x) = r.iter().find(|x| x.field() != field) {
                return Err(LinalgError::FieldMismatch(field, x.field()));
            }
        }
        Ok(Self::from_sparse_rows(
            field,
            ambient,
            rows.iter().map(|r| dense_to_work(r)),
        ))
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }

    pub fn ambient(&self) -> Ambient {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn codim(&self) -> usize {
        self.ambient.dim - self.rows.len()
    }

    pub fn pivots(&self) -> Vec<usize> {
        self.rows.iter().map(Row::pivot).collect()
    }

    /// Basis vectors in dense form, in pivot order.
    pub fn basis(&self) -> Vec<Vec<Scalar>> {
        self.rows
            .iter()
            .map(|r| {
                let mut v = vec![self.field.zero(); self.ambient.dim];
                for (j, x) in &r.entries {
                    v[*j] = x.clone();
                }
                v
            })
            .collect()
    }

    /// Basis vectors as sparse `(column, value)` lists.
    pub fn sparse_basis(&self) -> Vec<Vec<(usize, Scalar)>> {
        self.rows.iter().map(|r| r.entries.clone()).collect()
    }

    fn builder(&self) -> Builder {
        let mut pivot_row = vec![None; self.ambient.dim];
        for (i, r) in self.rows.iter().enumerate() {
            pivot_row[r.pivot()] = Some(i);
        }
        Builder {
            field: self.field,
            rows: self.rows.clone(),
            pivot_row,
        }
    }

    fn check_vector(&self, v: &[Scalar]) -> Result<(), LinalgError> {
        if v.len() != self.ambient.dim {
            return Err(LinalgError::LengthMismatch {
                expected: self.ambient.dim,
                got: v.len(),
            });
        }
        if let Some(x) = v.iter().find(|x| x.field() != self.field) {
            return Err(LinalgError::FieldMismatch(self.field, x.field()));
        }
        Ok(())
    }

    fn check_compatible(&self, other: &Subspace) -> Result<(), LinalgError> {
        if self.field != other.field {
            return Err(LinalgError::FieldMismatch(self.field, other.field));
        }
        if self.ambient != other.ambient {
            return Err(LinalgError::AmbientMismatch(self.ambient, other.ambient));
        }
        Ok(())
    }

    /// Residual of `v` modulo the subspace; zero exactly when `v` is inside.
    pub fn reduce(&self, v: &[Scalar]) -> Result<Vec<Scalar>, LinalgError> {
        self.check_vector(v)?;
        let work = self.builder().reduce(dense_to_work(v));
        let mut out = vec![self.field.zero(); self.ambient.dim];
        for (j, x) in work {
            out[j] = x;
        }
        Ok(out)
    }

    pub fn contains(&self, v: &[Scalar]) -> Result<bool, LinalgError> {
        self.check_vector(v)?;
        Ok(self.contains_sparse(dense_to_work(v)))
    }

    fn contains_sparse(&self, v: Work) -> bool {
        // Reduction never needs a row whose pivot precedes the lead of `v`,
        // so a fresh builder view over the shared rows is enough.
        let pivot_of = self.pivot_lookup();
        let mut work = v;
        loop {
            let Some((&c, lead)) = work.iter().next() else {
                return true;
            };
            let Some(r) = pivot_of[c] else {
                return false;
            };
            let f = lead.clone();
            axpy(&mut work, &f, &self.rows[r]);
        }
    }

    fn pivot_lookup(&self) -> Vec<Option<usize>> {
        let mut pivot_of = vec![None; self.ambient.dim];
        for (i, r) in self.rows.iter().enumerate() {
            pivot_of[r.pivot()] = Some(i);
        }
        pivot_of
    }

    pub fn contains_subspace(&self, other: &Subspace) -> Result<bool, LinalgError> {
        self.check_compatible(other)?;
        Ok(other
            .rows
            .iter()
            .all(|r| self.contains_sparse(r.entries.iter().cloned().collect())))
    }

    /// Canonical reduced row-echelon basis of the same space.
    pub fn rref(&self) -> Subspace {
        let pivot_of = self.pivot_lookup();
        let mut rows: Vec<Row> = self.rows.clone();
        for i in (0..rows.len()).rev() {
            let mut work: Work = rows[i].entries.iter().cloned().collect();
            let piv = rows[i].pivot();
            let mut cursor = piv + 1;
            loop {
                let next = work.range(cursor..).find(|(c, _)| pivot_of[**c].is_some());
                let Some((&c, x)) = next else { break };
                let f = x.clone();
                let r = pivot_of[c].expect("pivot");
                axpy(&mut work, &f, &rows[r]);
                cursor = c + 1;
            }
            rows[i].entries = work.into_iter().collect();
        }
        Subspace {
            field: self.field,
            ambient: self.ambient,
            rows,
        }
    }

    /// Coordinates of `v` in `k^dim / self`, indexed by the non-pivot columns
    /// in increasing order. Returns sparse `(quotient index, value)` pairs.
    pub fn quotient_coords(&self, v: &[(usize, Scalar)]) -> Vec<(usize, Scalar)> {
        let free_index = self.free_index();
        self.quotient_with(&free_index, v)
    }

    fn free_index(&self) -> Vec<Option<usize>> {
        let mut is_pivot = vec![false; self.ambient.dim];
        for r in &self.rows {
            is_pivot[r.pivot()] = true;
        }
        let mut k = 0;
        is_pivot
            .into_iter()
            .map(|p| {
                if p {
                    None
                } else {
                    k += 1;
                    Some(k - 1)
                }
            })
            .collect()
    }

    fn quotient_with(&self, free_index: &[Option<usize>], v: &[(usize, Scalar)]) -> Vec<(usize, Scalar)> {
        let work = self.builder().reduce(to_work(v.iter().cloned()));
        work.into_iter()
            .map(|(j, x)| (free_index[j].expect("residual lives on free columns"), x))
            .collect()
    }

    /// Matrix of the projection `k^dim -> k^dim / self`, as one sparse column
    /// per ambient basis vector.
    pub fn quotient_columns(&self) -> Vec<Vec<(usize, Scalar)>> {
        let canonical = self.rref();
        let free_index = canonical.free_index();
        let pivot_of = canonical.pivot_lookup();
        (0..self.ambient.dim)
            .map(|j| match pivot_of[j] {
                None => vec![(free_index[j].expect("free"), self.field.one())],
                Some(r) => canonical.rows[r].entries[1..]
                    .iter()
                    .map(|(c, x)| (free_index[*c].expect("reduced row"), x.neg()))
                    .collect(),
            })
            .collect()
    }

    /// `self + other` via echelonizing the stacked generators.
    pub fn sum(&self, other: &Subspace) -> Result<Subspace, LinalgError> {
        self.check_compatible(other)?;
        let mut b = self.builder();
        for r in &other.rows {
            b.insert(r.entries.iter().cloned().collect());
        }
        Ok(b.finish(self.ambient))
    }

    /// `self ∩ other` by the Zassenhaus construction: echelonize the stacked
    /// rows `[a | a]` and `[b | 0]`; rows whose left half vanishes carry a
    /// basis of the intersection in their right half.
    pub fn intersect(&self, other: &Subspace) -> Result<Subspace, LinalgError> {
        self.check_compatible(other)?;
        let n = self.ambient.dim;
        let mut b = Builder::new(self.field, 2 * n);
        for r in &self.rows {
            let doubled = r
                .entries
                .iter()
                .cloned()
                .chain(r.entries.iter().map(|(j, x)| (j + n, x.clone())));
            b.insert(doubled.collect());
        }
        for r in &other.rows {
            b.insert(r.entries.iter().cloned().collect());
        }
        let mut rows: Vec<Row> = b
            .rows
            .into_iter()
            .filter(|r| r.pivot() >= n)
            .map(|r| Row {
                entries: r.entries.into_iter().map(|(j, x)| (j - n, x)).collect(),
            })
            .collect();
        rows.sort_by_key(Row::pivot);
        Ok(Subspace {
            field: self.field,
            ambient: self.ambient,
            rows,
        })
    }

    /// Intersection of several subspaces as the kernel of the stacked
    /// quotient maps `v -> (v mod A_1, ..., v mod A_k)`.
    pub fn intersect_all(spaces: &[Subspace]) -> Result<Subspace, LinalgError> {
        let first = spaces.first().expect("at least one subspace");
        for s in &spaces[1..] {
            first.check_compatible(s)?;
        }
        let mut maps = Vec::with_capacity(spaces.len());
        for s in spaces {
            maps.push((s.quotient_columns(), s.codim()));
        }
        Ok(kernel_of_stacked(first.field, first.ambient, &maps))
    }
}

/// Kernel of a linear map `k^dim -> k^m` given column by column (each column
/// a sparse vector of length `m`).
pub fn kernel_of_columns(field: FieldSpec, ambient: Ambient, columns: &[Vec<(usize, Scalar)>], m: usize) -> Subspace {
    kernel_of_stacked(field, ambient, &[(columns.to_vec(), m)])
}

/// Kernel of the map whose matrix is the vertical stack of the given blocks;
/// each block is `(columns, row count)`.
pub fn kernel_of_stacked(field: FieldSpec, ambient: Ambient, blocks: &[(Vec<Vec<(usize, Scalar)>>, usize)]) -> Subspace {
    let dim = ambient.dim;
    let total: usize = blocks.iter().map(|(_, m)| m).sum();
    let mut rows: Vec<Vec<(usize, Scalar)>> = vec![Vec::new(); total];
    let mut offset = 0;
    for (cols, m) in blocks {
        assert_eq!(cols.len(), dim, "one column per ambient basis vector");
        for (j, col) in cols.iter().enumerate() {
            for (i, x) in col {
                rows[offset + i].push((j, x.clone()));
            }
        }
        offset += m;
    }
    let echelon = Subspace::from_sparse_rows(field, Ambient::plain(dim), rows).rref();
    let pivot_of = echelon.pivot_lookup();
    let mut kernel_rows = Vec::with_capacity(dim - echelon.dim());
    // Column view of the reduced matrix restricted to free columns.
    let mut free_cols: BTreeMap<usize, Vec<(usize, Scalar)>> = BTreeMap::new();
    for f in (0..dim).filter(|&f| pivot_of[f].is_none()) {
        free_cols.insert(f, vec![(f, field.one())]);
    }
    for r in &echelon.rows {
        let c = r.pivot();
        for (j, x) in &r.entries[1..] {
            if let Some(v) = free_cols.get_mut(j) {
                v.push((c, x.neg()));
            }
        }
    }
    for (_, mut v) in free_cols {
        v.sort_by_key(|(j, _)| *j);
        kernel_rows.push(v);
    }
    Subspace::from_sparse_rows(field, ambient, kernel_rows)
}

/// Integer content-free check used by tests: the rank of an integer matrix
/// over `F_p` by direct reduction of the integer entries.
pub fn rank_mod_p(rows: &[Vec<BigInt>], p: u64) -> usize {
    let field = FieldSpec::PrimeField(p);
    let conv: Vec<Vec<Scalar>> = rows
        .iter()
        .map(|r| r.iter().map(|x| field.from_bigint(x)).collect())
        .collect();
    let cols = rows.first().map_or(0, |r| r.len());
    ExactMatrix::from_rows(field, conv, cols)
        .expect("rectangular")
        .rank()
}

/// Rank over the rationals of an integer matrix.
pub fn rank_over_q(rows: &[Vec<BigInt>]) -> usize {
    let conv: Vec<Vec<Scalar>> = rows
        .iter()
        .map(|r| r.iter().map(|x| FieldSpec::Rationals.from_bigint(x)).collect())
        .collect();
    let cols = rows.first().map_or(0, |r| r.len());
    ExactMatrix::from_rows(FieldSpec::Rationals, conv, cols)
        .expect("rectangular")
        .rank()
}
