//! Exact sparse linear algebra over a field of characteristic zero.
//!
//! Vectors are sorted lists of `(index, value)` pairs with no stored zeros.
//! Matrices store one sparse vector per column, which is the natural layout
//! for linear maps assembled from the images of basis vectors.
//!
//! Elimination is deterministic: rows are consumed in index order and each
//! new pivot sits in the smallest column of the reduced row.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Sparse vector, sorted by index, zero entries never stored.
pub type Vector<S> = Vec<(usize, S)>;

/// Accumulates a sparse linear combination.
///
/// Terms are appended and merged lazily, which beats a tree map for the
/// short combinations that dominate bracket evaluation.
#[derive(Debug, Clone)]
pub struct LinComb<S> {
    terms: Vec<(usize, S)>,
    merged: usize,
}

impl<S: Scalar> Default for LinComb<S> {
    fn default() -> Self {
        Self::new()
    }
}

impl<S: Scalar> LinComb<S> {
    pub fn new() -> Self {
        LinComb { terms: Vec::new(), merged: 0 }
    }

    pub fn add(&mut self, index: usize, value: S) {
        if value.is_zero() {
            return;
        }
        self.terms.push((index, value));
        if self.terms.len() > 4 * self.merged + 256 {
            self.normalize();
        }
    }

    /// `self += c * v`.
    pub fn add_scaled(&mut self, v: &[(usize, S)], c: &S) {
        if c.is_zero() {
            return;
        }
        if c.is_one() {
            return self.add_vector(v);
        }
        for (i, x) in v {
            self.add(*i, c.mul_ref(x));
        }
    }

    pub fn add_vector(&mut self, v: &[(usize, S)]) {
        self.terms.extend(v.iter().cloned());
        if self.terms.len() > 4 * self.merged + 256 {
            self.normalize();
        }
    }

    fn normalize(&mut self) {
        self.terms.sort_by_key(|t| t.0);
        let mut out: Vec<(usize, S)> = Vec::with_capacity(self.terms.len());
        for (i, x) in self.terms.drain(..) {
            match out.last_mut() {
                Some((j, y)) if *j == i => *y += x,
                _ => {
                    if out.last().is_some_and(|(_, y)| y.is_zero()) {
                        out.pop();
                    }
                    out.push((i, x));
                }
            }
        }
        if out.last().is_some_and(|(_, y)| y.is_zero()) {
            out.pop();
        }
        self.merged = out.len();
        self.terms = out;
    }

    pub fn is_zero(&mut self) -> bool {
        self.normalize();
        self.terms.is_empty()
    }

    pub fn into_vector(mut self) -> Vector<S> {
        self.normalize();
        self.terms
    }
}

/// Builds a normalized vector from unsorted, possibly repeated entries.
pub fn vector_from<S: Scalar>(entries: impl IntoIterator<Item = (usize, S)>) -> Vector<S> {
    let mut acc = LinComb::new();
    for (i, v) in entries {
        acc.add(i, v);
    }
    acc.into_vector()
}

pub fn scale<S: Scalar>(v: &[(usize, S)], c: &S) -> Vector<S> {
    if c.is_zero() {
        return Vec::new();
    }
    v.iter().map(|(i, x)| (*i, x.mul_ref(c))).collect()
}

pub fn add<S: Scalar>(a: &[(usize, S)], b: &[(usize, S)]) -> Vector<S> {
    axpy(a, &S::one(), b)
}

pub fn sub<S: Scalar>(a: &[(usize, S)], b: &[(usize, S)]) -> Vector<S> {
    axpy(a, &-S::one(), b)
}

/// `a + c * b` by a sorted merge.
pub fn axpy<S: Scalar>(a: &[(usize, S)], c: &S, b: &[(usize, S)]) -> Vector<S> {
    if c.is_zero() {
        return a.to_vec();
    }
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        if j >= b.len() || (i < a.len() && a[i].0 < b[j].0) {
            out.push(a[i].clone());
            i += 1;
        } else if i >= a.len() || b[j].0 < a[i].0 {
            out.push((b[j].0, c.mul_ref(&b[j].1)));
            j += 1;
        } else {
            let mut v = a[i].1.clone();
            v.add_product(c, &b[j].1);
            if !v.is_zero() {
                out.push((a[i].0, v));
            }
            i += 1;
            j += 1;
        }
    }
    out
}

pub fn entry<S: Scalar>(v: &[(usize, S)], index: usize) -> Option<&S> {
    v.binary_search_by_key(&index, |(i, _)| *i).ok().map(|k| &v[k].1)
}

/// A sparse `rows x cols` matrix stored column by column.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matrix<S> {
    rows: usize,
    cols: usize,
    columns: Vec<Vector<S>>,
}

impl<S: Scalar> Matrix<S> {
    pub fn zero(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, columns: vec![Vec::new(); cols] }
    }

    pub fn identity(n: usize) -> Self {
        Matrix { rows: n, cols: n, columns: (0..n).map(|i| vec![(i, S::one())]).collect() }
    }

    /// Builds from columns; entries are normalized and bounds-checked.
    pub fn from_columns(rows: usize, columns: Vec<Vector<S>>) -> Self {
        let cols = columns.len();
        let columns = columns
            .into_iter()
            .map(|c| {
                let c = vector_from(c);
                assert!(c.iter().all(|(i, _)| *i < rows), "row index out of bounds");
                c
            })
            .collect();
        Matrix { rows, cols, columns }
    }

    /// Builds from dense rows of integers; convenient in tests.
    pub fn from_int_rows(rows: &[&[i64]]) -> Self {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, |r| r.len());
        let mut columns = vec![Vec::new(); ncols];
        for (i, r) in rows.iter().enumerate() {
            assert_eq!(r.len(), ncols, "ragged rows");
            for (j, x) in r.iter().enumerate() {
                if *x != 0 {
                    columns[j].push((i, S::from_int(*x)));
                }
            }
        }
        Matrix { rows: nrows, cols: ncols, columns }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn column(&self, j: usize) -> &[(usize, S)] {
        &self.columns[j]
    }

    pub fn columns(&self) -> &[Vector<S>] {
        &self.columns
    }

    pub fn get(&self, i: usize, j: usize) -> S {
        entry(&self.columns[j], i).cloned().unwrap_or_else(S::zero)
    }

    pub fn nnz(&self) -> usize {
        self.columns.iter().map(Vec::len).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.columns.iter().all(Vec::is_empty)
    }

    /// Sets a single entry; zero removes it.
    pub fn set(&mut self, i: usize, j: usize, value: S) {
        assert!(i < self.rows && j < self.cols);
        let col = &mut self.columns[j];
        match col.binary_search_by_key(&i, |(r, _)| *r) {
            Ok(k) => {
                if value.is_zero() {
                    col.remove(k);
                } else {
                    col[k].1 = value;
                }
            }
            Err(k) => {
                if !value.is_zero() {
                    col.insert(k, (i, value));
                }
            }
        }
    }

    /// The rows as sparse vectors over column indices.
    pub fn row_vectors(&self) -> Vec<Vector<S>> {
        let mut rows = vec![Vec::new(); self.rows];
        for (j, col) in self.columns.iter().enumerate() {
            for (i, v) in col {
                rows[*i].push((j, v.clone()));
            }
        }
        rows
    }

    pub fn transpose(&self) -> Self {
        Matrix { rows: self.cols, cols: self.rows, columns: self.row_vectors() }
    }

    pub fn apply(&self, v: &[(usize, S)]) -> Vector<S> {
        let mut acc = LinComb::new();
        for (j, x) in v {
            acc.add_scaled(&self.columns[*j], x);
        }
        acc.into_vector()
    }

    pub fn mul(&self, other: &Matrix<S>) -> Result<Matrix<S>> {
        if self.cols != other.rows {
            return Err(Error::LengthMismatch {
                what: "matrix product inner dimension",
                left: self.cols,
                right: other.rows,
            });
        }
        Ok(Matrix { rows: self.rows, cols: other.cols, columns: other.columns.iter().map(|c| self.apply(c)).collect() })
    }

    fn to_dense(&self) -> Vec<Vec<S>> {
        let mut d = vec![vec![S::zero(); self.cols]; self.rows];
        for (j, col) in self.columns.iter().enumerate() {
            for (i, v) in col {
                d[*i][j] = v.clone();
            }
        }
        d
    }
}

/// Tuning for elimination. Small blocks are eliminated densely.
#[derive(Debug, Clone, Copy)]
pub struct EliminationConfig {
    /// Matrices with `rows * cols` at most this use dense elimination.
    pub dense_threshold: usize,
}

impl Default for EliminationConfig {
    fn default() -> Self {
        EliminationConfig { dense_threshold: 256 }
    }
}

/// Reduced row echelon form built incrementally.
///
/// Pivot rows are kept fully reduced: each has a one in its pivot column and
/// zeros in every other pivot column.
#[derive(Debug, Clone)]
pub struct Echelon<S> {
    ncols: usize,
    pivots: BTreeMap<usize, Vector<S>>,
}

impl<S: Scalar> Echelon<S> {
    pub fn new(ncols: usize) -> Self {
        Echelon { ncols, pivots: BTreeMap::new() }
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn pivot_columns(&self) -> impl Iterator<Item = usize> + '_ {
        self.pivots.keys().copied()
    }

    pub fn pivot_row(&self, col: usize) -> Option<&Vector<S>> {
        self.pivots.get(&col)
    }

    /// Residual of `row` after eliminating all pivot columns.
    pub fn reduce(&self, row: &[(usize, S)]) -> Vector<S> {
        let hits: Vec<(usize, S)> = row.iter().filter(|(c, _)| self.pivots.contains_key(c)).cloned().collect();
        let mut r = row.to_vec();
        for (c, v) in hits {
            r = axpy(&r, &-v, &self.pivots[&c]);
        }
        r
    }

    /// Adds a row; returns the new pivot column if the row was independent.
    pub fn insert(&mut self, row: &[(usize, S)]) -> Option<usize> {
        let r = self.reduce(row);
        let (lead, lv) = r.first()?.clone();
        let inv = S::one() / lv;
        let r = scale(&r, &inv);
        for p in self.pivots.values_mut() {
            if let Some(x) = entry(p, lead).cloned() {
                *p = axpy(p, &-x, &r);
            }
        }
        self.pivots.insert(lead, r);
        Some(lead)
    }

    pub fn contains(&self, row: &[(usize, S)]) -> bool {
        self.reduce(row).is_empty()
    }

    /// Basis of the null space of the row space, indexed by free columns.
    pub fn null_space(&self) -> Vec<Vector<S>> {
        let mut out = Vec::new();
        for f in 0..self.ncols {
            if self.pivots.contains_key(&f) {
                continue;
            }
            let mut v = vec![(f, S::one())];
            for (c, p) in &self.pivots {
                if let Some(x) = entry(p, f) {
                    v.push((*c, -x.clone()));
                }
            }
            v.sort_by_key(|(i, _)| *i);
            out.push(v);
        }
        out
    }
}

/// Coordinates with respect to a fixed list of (possibly dependent) vectors.
///
/// Pivot rows remember how they were assembled from the inserted vectors, so
/// any element of the span can be written back in terms of them.
#[derive(Debug, Clone)]
pub struct SpanSolver<S> {
    echelon: Echelon<S>,
    combos: BTreeMap<usize, Vector<S>>,
    independent: Vec<usize>,
    inserted: usize,
}

impl<S: Scalar> SpanSolver<S> {
    pub fn new(ncols: usize) -> Self {
        SpanSolver { echelon: Echelon::new(ncols), combos: BTreeMap::new(), independent: Vec::new(), inserted: 0 }
    }

    /// Builds a solver from vectors; indices of the inserted vectors are
    /// their positions in the iterator.
    pub fn from_vectors<'a>(ncols: usize, vectors: impl IntoIterator<Item = &'a Vector<S>>) -> Self {
        let mut s = SpanSolver::new(ncols);
        for v in vectors {
            s.push(v);
        }
        s
    }

    pub fn rank(&self) -> usize {
        self.echelon.rank()
    }

    /// Indices of inserted vectors that were independent of their predecessors.
    pub fn independent(&self) -> &[usize] {
        &self.independent
    }

    /// Returns `(residual, combination)` with `v = sum(combination) + residual`.
    fn decompose(&self, v: &[(usize, S)]) -> (Vector<S>, Vector<S>) {
        let mut r = v.to_vec();
        let mut comb = LinComb::new();
        let hits: Vec<(usize, S)> = v.iter().filter(|(c, _)| self.echelon.pivots.contains_key(c)).cloned().collect();
        for (c, x) in hits {
            r = axpy(&r, &-x.clone(), &self.echelon.pivots[&c]);
            comb.add_scaled(&self.combos[&c], &x);
        }
        (r, comb.into_vector())
    }

    pub fn push(&mut self, v: &[(usize, S)]) -> bool {
        let id = self.inserted;
        self.inserted += 1;
        let (r, comb) = self.decompose(v);
        let Some((lead, lv)) = r.first().cloned() else {
            return false;
        };
        // r = v - comb, so r / lv expressed in inserted vectors:
        let mut own = LinComb::new();
        own.add(id, S::one());
        own.add_scaled(&comb, &-S::one());
        let inv = S::one() / lv;
        let r = scale(&r, &inv);
        let own = scale(&own.into_vector(), &inv);
        let cols: Vec<usize> = self.echelon.pivots.keys().copied().collect();
        for c in cols {
            let p = &self.echelon.pivots[&c];
            if let Some(x) = entry(p, lead).cloned() {
                let np = axpy(p, &-x.clone(), &r);
                let nc = axpy(&self.combos[&c], &-x, &own);
                self.echelon.pivots.insert(c, np);
                self.combos.insert(c, nc);
            }
        }
        self.echelon.pivots.insert(lead, r);
        self.combos.insert(lead, own);
        self.independent.push(id);
        true
    }

    /// Coefficients over inserted vectors, or `None` when `v` is not in the span.
    pub fn solve(&self, v: &[(usize, S)]) -> Option<Vector<S>> {
        let (r, comb) = self.decompose(v);
        r.is_empty().then_some(comb)
    }

    /// Like [`SpanSolver::solve`] but with coordinates renumbered over the
    /// independent vectors only (position in [`SpanSolver::independent`]).
    pub fn coordinates(&self, v: &[(usize, S)]) -> Option<Vector<S>> {
        let comb = self.solve(v)?;
        let pos: BTreeMap<usize, usize> = self.independent.iter().enumerate().map(|(k, id)| (*id, k)).collect();
        Some(vector_from(comb.into_iter().map(|(id, x)| (pos[&id], x))))
    }
}

fn dense_rank<S: Scalar>(mut d: Vec<Vec<S>>, cols: usize) -> usize {
    let rows = d.len();
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..rows).find(|&r| !d[r][c].is_zero()) else {
            continue;
        };
        d.swap(rank, p);
        let inv = S::one() / d[rank][c].clone();
        for r in rank + 1..rows {
            if d[r][c].is_zero() {
                continue;
            }
            let f = d[r][c].mul_ref(&inv);
            let (top, bottom) = d.split_at_mut(r);
            for (x, p) in bottom[0][c..cols].iter_mut().zip(&top[rank][c..cols]) {
                *x = x.clone() - f.mul_ref(p);
            }
        }
        rank += 1;
    }
    rank
}

pub fn rank<S: Scalar>(m: &Matrix<S>) -> usize {
    rank_with(m, &EliminationConfig::default())
}

pub fn rank_with<S: Scalar>(m: &Matrix<S>, cfg: &EliminationConfig) -> usize {
    if m.rows == 0 || m.cols == 0 || m.is_zero() {
        return 0;
    }
    if m.rows * m.cols <= cfg.dense_threshold {
        return dense_rank(m.to_dense(), m.cols);
    }
    // eliminate along the shorter side
    let rows = if m.rows <= m.cols { m.row_vectors() } else { m.columns.clone() };
    let width = m.rows.max(m.cols);
    let mut e = Echelon::new(width);
    for r in &rows {
        e.insert(r);
    }
    e.rank()
}

/// Basis of `ker(m)`; `m * v = 0` for every returned vector.
pub fn kernel_basis<S: Scalar>(m: &Matrix<S>) -> Vec<Vector<S>> {
    let mut e = Echelon::new(m.cols);
    for r in m.row_vectors() {
        e.insert(&r);
    }
    e.null_space()
}

/// `dim ker(d_out) - rank(d_in)` for composable `d_out ∘ d_in = 0`.
pub fn homology_dim<S: Scalar>(d_out: &Matrix<S>, d_in: &Matrix<S>) -> Result<usize> {
    homology_dim_at(d_out, d_in, 0)
}

/// As [`homology_dim`], tagging errors with the degree being computed.
pub fn homology_dim_at<S: Scalar>(d_out: &Matrix<S>, d_in: &Matrix<S>, degree: i32) -> Result<usize> {
    if d_out.cols != d_in.rows {
        return Err(Error::LengthMismatch {
            what: "middle dimension of a two-step complex",
            left: d_out.cols,
            right: d_in.rows,
        });
    }
    if !d_out.mul(d_in)?.is_zero() {
        return Err(Error::CompositionNotZero { degree });
    }
    let z = d_out.cols - rank(d_out);
    Ok(z - rank(d_in))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;
    use proptest::prelude::*;

    type Q = BigRational;
    type M = Matrix<Q>;

    #[test]
    fn rank_examples() {
        assert_eq!(rank(&M::zero(0, 0)), 0);
        assert_eq!(rank(&M::from_int_rows(&[&[1, 0], &[0, 0]])), 1);
        assert_eq!(rank(&M::from_int_rows(&[&[1, 2], &[2, 4]])), 1);
    }

    #[test]
    fn kernel_examples() {
        assert!(kernel_basis(&M::identity(2)).is_empty());
        assert_eq!(kernel_basis(&M::zero(2, 3)).len(), 3);
        let m = M::from_int_rows(&[&[1, 2], &[2, 4]]);
        let k = kernel_basis(&m);
        assert_eq!(k.len(), 1);
        assert!(m.apply(&k[0]).is_empty());
        // proportional to (-2, 1)
        assert_eq!(k[0][0].1.clone() / k[0][1].1.clone(), Q::from_int(-2));
    }

    #[test]
    fn homology_examples() {
        let z12 = M::zero(1, 2);
        let z21 = M::zero(2, 1);
        assert_eq!(homology_dim(&z12, &z21).unwrap(), 2);
        assert_eq!(homology_dim(&M::from_int_rows(&[&[1, 0]]), &z21).unwrap(), 1);
        assert_eq!(homology_dim(&z12, &M::from_int_rows(&[&[1], &[0]])).unwrap(), 1);
        let bad = homology_dim(&M::from_int_rows(&[&[1, 0]]), &M::from_int_rows(&[&[1], &[0]]));
        assert_eq!(bad, Err(Error::CompositionNotZero { degree: 0 }));
    }

    #[test]
    fn span_solver_coordinates() {
        let vs: Vec<Vector<Q>> = vec![
            vec![(0, Q::from_int(1)), (1, Q::from_int(1))],
            vec![(0, Q::from_int(2)), (1, Q::from_int(2))],
            vec![(1, Q::from_int(1)), (2, Q::from_int(3))],
        ];
        let s = SpanSolver::from_vectors(3, &vs);
        assert_eq!(s.independent(), &[0, 2]);
        let target = vec![(0, Q::from_int(1)), (1, Q::from_int(2)), (2, Q::from_int(3))];
        let c = s.coordinates(&target).unwrap();
        assert_eq!(c, vec![(0, Q::from_int(1)), (1, Q::from_int(1))]);
        assert!(s.solve(&[(2, Q::from_int(1))]).is_none());
    }

    #[test]
    fn sparse_and_dense_paths_agree() {
        let m = M::from_int_rows(&[&[1, 2, 3, 4, 5], &[2, 4, 6, 8, 10], &[0, 1, 0, 1, 0], &[1, 3, 3, 5, 5]]);
        let dense = rank_with(&m, &EliminationConfig { dense_threshold: 1000 });
        let sparse = rank_with(&m, &EliminationConfig { dense_threshold: 0 });
        assert_eq!(dense, 2);
        assert_eq!(sparse, 2);
    }

    fn small_matrix() -> impl Strategy<Value = Vec<Vec<i64>>> {
        (1usize..6, 1usize..6)
            .prop_flat_map(|(r, c)| proptest::collection::vec(proptest::collection::vec(-2i64..=2, c), r))
    }

    fn to_matrix(rows: &[Vec<i64>]) -> M {
        let refs: Vec<&[i64]> = rows.iter().map(Vec::as_slice).collect();
        M::from_int_rows(&refs)
    }

    proptest! {
        #[test]
        fn rank_nullity(rows in small_matrix()) {
            let m = to_matrix(&rows);
            let k = kernel_basis(&m);
            prop_assert_eq!(rank(&m) + k.len(), m.cols());
            for v in &k {
                prop_assert!(m.apply(v).is_empty());
            }
            prop_assert_eq!(rank(&m), rank(&m.transpose()));
        }

        #[test]
        fn homology_invariant_under_base_change(
            a in proptest::collection::vec(-2i64..=2, 9),
            u in proptest::collection::vec(-3i64..=3, 3),
        ) {
            // complex Q^3 -> Q^3 -> Q^3 with d_out = A (rank-limited), d_in = 0 or compatible
            let d_in = M::from_int_rows(&[&[a[0], a[1], 0], &[0, 0, 0], &[0, 0, 0]]);
            let d_out = M::from_int_rows(&[&[0, a[3], a[4]], &[0, a[5], a[6]], &[0, a[7], a[8]]]);
            prop_assume!(d_out.mul(&d_in).unwrap().is_zero());
            let base = homology_dim(&d_out, &d_in).unwrap();
            // unipotent change of basis on the middle space
            let p = M::from_int_rows(&[&[1, u[0], u[1]], &[0, 1, u[2]], &[0, 0, 1]]);
            let pinv = {
                // inverse of a unitriangular 3x3
                let (x, y, z) = (u[0], u[1], u[2]);
                M::from_int_rows(&[&[1, -x, x * z - y], &[0, 1, -z], &[0, 0, 1]])
            };
            prop_assert_eq!(p.mul(&pinv).unwrap(), M::identity(3));
            let d_out2 = d_out.mul(&pinv).unwrap();
            let d_in2 = p.mul(&d_in).unwrap();
            prop_assert_eq!(homology_dim(&d_out2, &d_in2).unwrap(), base);
        }
    }
}
