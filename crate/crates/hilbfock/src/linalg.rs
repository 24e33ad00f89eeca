//! Dense exact matrices and incremental row reduction.

use std::fmt;

use thiserror::Error;

use crate::scalar::{Rational, RationalFunction, Scalar, ScalarError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LinalgError {
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("linear system has no solution")]
    NoSolution,
    #[error("linear system solution is not unique (rank {rank} < {unknowns})")]
    NotUnique { rank: usize, unknowns: usize },
    #[error(transparent)]
    Scalar(#[from] ScalarError),
}

/// Row-major dense matrix.
#[derive(Clone, PartialEq)]
pub struct Matrix<S> {
    rows: usize,
    cols: usize,
    data: Vec<S>,
}

impl<S: fmt::Display> fmt::Debug for Matrix<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for r in 0..self.rows {
            if r > 0 {
                write!(f, ", ")?;
            }
            write!(f, "[")?;
            for c in 0..self.cols {
                if c > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}", self.data[r * self.cols + c])?;
            }
            write!(f, "]")?;
        }
        write!(f, "]")
    }
}

impl<S: Scalar> Matrix<S> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![S::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = S::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<S>>) -> Result<Self, LinalgError> {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        if rows.iter().any(|x| x.len() != c) {
            return Err(LinalgError::Shape("ragged rows".into()));
        }
        Ok(Matrix {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        })
    }

    /// Build from columns, each of length `rows`.
    pub fn from_columns(rows: usize, columns: Vec<Vec<S>>) -> Self {
        let cols = columns.len();
        let mut m = Self::zeros(rows, cols);
        for (c, col) in columns.into_iter().enumerate() {
            assert_eq!(col.len(), rows, "column length");
            for (r, x) in col.into_iter().enumerate() {
                m.data[r * cols + c] = x;
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &S {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: S) {
        self.data[r * self.cols + c] = v;
    }

    pub fn entries(&self) -> &[S] {
        &self.data
    }

    pub fn column(&self, c: usize) -> Vec<S> {
        (0..self.rows).map(|r| self.get(r, c).clone()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    pub fn mul(&self, o: &Matrix<S>) -> Result<Matrix<S>, LinalgError> {
        if self.cols != o.rows {
            return Err(LinalgError::Shape(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, o.rows, o.cols
            )));
        }
        let mut out = Self::zeros(self.rows, o.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self.data[i * self.cols + k];
                if a.is_zero() {
                    continue;
                }
                for j in 0..o.cols {
                    let b = &o.data[k * o.cols + j];
                    if !b.is_zero() {
                        let idx = i * o.cols + j;
                        let t = std::mem::replace(&mut out.data[idx], S::zero());
                        out.data[idx] = t + &(a.clone() * b);
                    }
                }
            }
        }
        Ok(out)
    }

    fn zip(&self, o: &Matrix<S>, f: impl Fn(S, &S) -> S) -> Result<Matrix<S>, LinalgError> {
        if self.rows != o.rows || self.cols != o.cols {
            return Err(LinalgError::Shape(format!(
                "{}x{} against {}x{}",
                self.rows, self.cols, o.rows, o.cols
            )));
        }
        let data = self.data.iter().zip(&o.data).map(|(a, b)| f(a.clone(), b)).collect();
        Ok(Matrix {
            rows: self.rows,
            cols: self.cols,
            data,
        })
    }

    pub fn add(&self, o: &Matrix<S>) -> Result<Matrix<S>, LinalgError> {
        self.zip(o, |a, b| a + b)
    }

    pub fn sub(&self, o: &Matrix<S>) -> Result<Matrix<S>, LinalgError> {
        self.zip(o, |a, b| a - b)
    }

    pub fn scale(&self, s: &S) -> Matrix<S> {
        self.map(|x| x.clone() * s)
    }

    pub fn map<T>(&self, f: impl Fn(&S) -> T) -> Matrix<T> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }

    pub fn try_map<T, E>(&self, f: impl Fn(&S) -> Result<T, E>) -> Result<Matrix<T>, E> {
        let data = self.data.iter().map(f).collect::<Result<Vec<_>, E>>()?;
        Ok(Matrix {
            rows: self.rows,
            cols: self.cols,
            data,
        })
    }

    pub fn apply(&self, v: &[S]) -> Vec<S> {
        assert_eq!(v.len(), self.cols, "vector length");
        (0..self.rows)
            .map(|r| {
                let mut acc = S::zero();
                for (c, x) in v.iter().enumerate() {
                    let a = &self.data[r * self.cols + c];
                    if !a.is_zero() && !x.is_zero() {
                        acc = acc + &(a.clone() * x);
                    }
                }
                acc
            })
            .collect()
    }
}

impl Matrix<RationalFunction> {
    /// Entrywise value at λ = 0; any pole is an error.
    pub fn limit_at_zero(&self) -> Result<Matrix<Rational>, ScalarError> {
        self.try_map(|x| x.limit_at_zero())
    }

    pub fn eval(&self, x: &Rational) -> Result<Matrix<Rational>, ScalarError> {
        self.try_map(|f| f.eval(x))
    }
}

/// Row space kept in reduced row echelon form, grown one vector at a time.
#[derive(Clone, Debug)]
pub struct Echelon<S> {
    len: usize,
    rows: Vec<(usize, Vec<S>)>,
}

impl<S: Scalar> Echelon<S> {
    pub fn new(len: usize) -> Self {
        Echelon { len, rows: Vec::new() }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn vector_len(&self) -> usize {
        self.len
    }

    /// Remainder of `v` after elimination against the stored rows.
    pub fn reduce(&self, v: &[S]) -> Vec<S> {
        assert_eq!(v.len(), self.len, "vector length");
        let mut w = v.to_vec();
        for (p, row) in &self.rows {
            if w[*p].is_zero() {
                continue;
            }
            let c = w[*p].clone();
            for (x, r) in w.iter_mut().zip(row) {
                if !r.is_zero() {
                    let t = std::mem::replace(x, S::zero());
                    *x = t - &(c.clone() * r);
                }
            }
        }
        w
    }

    pub fn contains(&self, v: &[S]) -> bool {
        self.reduce(v).iter().all(|x| x.is_zero())
    }

    /// Adds `v` to the span; returns whether the rank grew.
    pub fn insert(&mut self, v: &[S]) -> bool {
        let mut w = self.reduce(v);
        let Some(p) = w.iter().position(|x| !x.is_zero()) else {
            return false;
        };
        let inv = w[p].inv().expect("pivot is nonzero");
        for x in w.iter_mut() {
            if !x.is_zero() {
                *x = x.clone() * &inv;
            }
        }
        for (_, row) in self.rows.iter_mut() {
            if row[p].is_zero() {
                continue;
            }
            let c = row[p].clone();
            for (x, r) in row.iter_mut().zip(&w) {
                if !r.is_zero() {
                    let t = std::mem::replace(x, S::zero());
                    *x = t - &(c.clone() * r);
                }
            }
        }
        let pos = self.rows.partition_point(|(q, _)| *q < p);
        self.rows.insert(pos, (p, w));
        true
    }

    pub fn rows(&self) -> impl Iterator<Item = &Vec<S>> {
        self.rows.iter().map(|(_, r)| r)
    }

    /// Equality of row spaces (canonical forms coincide).
    pub fn same_span(&self, o: &Echelon<S>) -> bool {
        self.len == o.len && self.rows == o.rows
    }
}

/// Solves `Σ x_k columns[k] = b` and insists on a unique solution.
pub fn solve_unique<S: Scalar>(columns: &[Vec<S>], b: &[S]) -> Result<Vec<S>, LinalgError> {
    let n = columns.len();
    let m = b.len();
    if columns.iter().any(|c| c.len() != m) {
        return Err(LinalgError::Shape("column length differs from right-hand side".into()));
    }
    // Augmented matrix, one row per equation.
    let mut a: Vec<Vec<S>> = (0..m)
        .map(|r| {
            let mut row: Vec<S> = columns.iter().map(|c| c[r].clone()).collect();
            row.push(b[r].clone());
            row
        })
        .collect();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..n {
        let Some(p) = (r..m).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(r, p);
        let inv = a[r][c].inv()?;
        for x in a[r].iter_mut() {
            *x = x.clone() * &inv;
        }
        let pivot_row = a[r].clone();
        for (i, row) in a.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (x, y) in row.iter_mut().zip(&pivot_row) {
                if !y.is_zero() {
                    *x = x.clone() - &(f.clone() * y);
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == m {
            break;
        }
    }
    if a[r..].iter().any(|row| !row[n].is_zero()) {
        return Err(LinalgError::NoSolution);
    }
    if pivots.len() < n {
        return Err(LinalgError::NotUnique {
            rank: pivots.len(),
            unknowns: n,
        });
    }
    let mut x = vec![S::zero(); n];
    for (row, &c) in pivots.iter().enumerate() {
        x[c] = a[row][n].clone();
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;
    use proptest::prelude::*;

    fn m(rows: &[&[i64]]) -> Matrix<Rational> {
        Matrix::from_rows(rows.iter().map(|r| r.iter().map(|&x| rat(x, 1)).collect()).collect()).unwrap()
    }

    #[test]
    fn product() {
        let a = m(&[&[1, 2], &[3, 4]]);
        let b = m(&[&[0, 1], &[1, 0]]);
        assert_eq!(a.mul(&b).unwrap(), m(&[&[2, 1], &[4, 3]]));
    }

    #[test]
    fn solve_and_failures() {
        let cols = vec![vec![rat(1, 1), rat(0, 1)], vec![rat(1, 1), rat(2, 1)]];
        let x = solve_unique(&cols, &[rat(3, 1), rat(4, 1)]).unwrap();
        assert_eq!(x, vec![rat(1, 1), rat(2, 1)]);
        let dep = vec![vec![rat(1, 1), rat(1, 1)], vec![rat(2, 1), rat(2, 1)]];
        assert_eq!(
            solve_unique(&dep, &[rat(1, 1), rat(1, 1)]),
            Err(LinalgError::NotUnique { rank: 1, unknowns: 2 })
        );
        assert_eq!(
            solve_unique(&dep, &[rat(1, 1), rat(0, 1)]),
            Err(LinalgError::NoSolution)
        );
    }

    #[test]
    fn echelon_rank_and_membership() {
        let mut e = Echelon::new(3);
        assert!(e.insert(&[rat(1, 1), rat(2, 1), rat(3, 1)]));
        assert!(e.insert(&[rat(0, 1), rat(1, 1), rat(1, 1)]));
        assert!(!e.insert(&[rat(1, 1), rat(3, 1), rat(4, 1)]));
        assert_eq!(e.rank(), 2);
        assert!(e.contains(&[rat(2, 1), rat(5, 1), rat(7, 1)]));
        assert!(!e.contains(&[rat(0, 1), rat(0, 1), rat(1, 1)]));
    }

    proptest! {
        #[test]
        fn echelon_is_canonical(rows in prop::collection::vec(prop::collection::vec(-3i64..4, 4), 1..5)) {
            let vs: Vec<Vec<Rational>> = rows.iter().map(|r| r.iter().map(|&x| rat(x, 1)).collect()).collect();
            let mut a = Echelon::new(4);
            let mut b = Echelon::new(4);
            for v in &vs { a.insert(v); }
            for v in vs.iter().rev() { b.insert(v); }
            prop_assert!(a.same_span(&b));
            for v in &vs { prop_assert!(a.contains(v)); }
        }
    }
}
