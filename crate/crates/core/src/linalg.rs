//! Dense matrices and exact elimination.

use num_bigint::BigInt;
use num_traits::Zero;

use crate::field::Field;

/// Row-major dense matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix<E> {
    rows: usize,
    cols: usize,
    data: Vec<E>,
}

impl<E: Clone> Matrix<E> {
    pub fn filled(rows: usize, cols: usize, value: E) -> Self {
        Self {
            rows,
            cols,
            data: vec![value; rows * cols],
        }
    }

    /// Panics if the rows are ragged.
    pub fn from_rows(cols: usize, rows: Vec<Vec<E>>) -> Self {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * cols);
        for r in rows {
            assert_eq!(r.len(), cols, "ragged matrix row");
            data.extend(r);
        }
        Self {
            rows: n,
            cols,
            data,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, r: usize) -> &[E] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn get(&self, r: usize, c: usize) -> &E {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: E) {
        self.data[r * self.cols + c] = v;
    }

    pub fn push_row(&mut self, row: Vec<E>) {
        assert_eq!(row.len(), self.cols, "ragged matrix row");
        self.data.extend(row);
        self.rows += 1;
    }

    /// Stacks `other` below `self`.
    pub fn vstack(&self, other: &Matrix<E>) -> Matrix<E> {
        assert_eq!(self.cols, other.cols);
        let mut data = self.data.clone();
        data.extend(other.data.iter().cloned());
        Matrix {
            rows: self.rows + other.rows,
            cols: self.cols,
            data,
        }
    }

    pub fn transpose(&self) -> Matrix<E> {
        let mut data = Vec::with_capacity(self.data.len());
        for c in 0..self.cols {
            for r in 0..self.rows {
                data.push(self.get(r, c).clone());
            }
        }
        Matrix {
            rows: self.cols,
            cols: self.rows,
            data,
        }
    }

    pub fn map<T, G: Fn(&E) -> T>(&self, g: G) -> Matrix<T> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(g).collect(),
        }
    }

    pub fn into_rows(self) -> Vec<Vec<E>> {
        let cols = self.cols;
        let mut out = Vec::with_capacity(self.rows);
        let mut it = self.data.into_iter();
        for _ in 0..self.rows {
            out.push(it.by_ref().take(cols).collect());
        }
        out
    }
}

/// Reduced row echelon form in place; returns the pivot columns.
pub fn rref<F: Field>(field: &F, m: &mut Matrix<F::Elem>) -> Vec<usize> {
    let (rows, cols) = (m.rows, m.cols);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !field.is_zero(m.get(i, c))) else {
            continue;
        };
        if p != r {
            for k in 0..cols {
                m.data.swap(p * cols + k, r * cols + k);
            }
        }
        let inv = field.inv(m.get(r, c)).expect("pivot is nonzero");
        for k in c..cols {
            let v = field.mul(m.get(r, k), &inv);
            m.set(r, k, v);
        }
        for i in 0..rows {
            if i == r || field.is_zero(m.get(i, c)) {
                continue;
            }
            let factor = m.get(i, c).clone();
            for k in c..cols {
                let v = field.sub(m.get(i, k), &field.mul(&factor, m.get(r, k)));
                m.set(i, k, v);
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

/// Rank by forward elimination.
pub fn gauss_rank<F: Field>(field: &F, m: &Matrix<F::Elem>) -> usize {
    let (rows, cols) = (m.rows, m.cols);
    let mut a = m.data.clone();
    let mut rank = 0;
    for c in 0..cols {
        if rank == rows {
            break;
        }
        let Some(p) = (rank..rows).find(|&i| !field.is_zero(&a[i * cols + c])) else {
            continue;
        };
        if p != rank {
            for k in c..cols {
                a.swap(p * cols + k, rank * cols + k);
            }
        }
        let inv = field.inv(&a[rank * cols + c]).expect("pivot is nonzero");
        let (head, tail) = a.split_at_mut((rank + 1) * cols);
        let pivot_row = &head[rank * cols..];
        for row in tail.chunks_mut(cols) {
            if field.is_zero(&row[c]) {
                continue;
            }
            let factor = field.mul(&row[c], &inv);
            for k in c..cols {
                row[k] = field.sub(&row[k], &field.mul(&factor, &pivot_row[k]));
            }
        }
        rank += 1;
    }
    rank
}

/// Fraction-free (Bareiss) elimination over the integers.
pub fn bareiss_rank(mut rows: Vec<Vec<BigInt>>, cols: usize) -> usize {
    let n = rows.len();
    let mut prev = BigInt::from(1);
    let mut rank = 0;
    for c in 0..cols {
        if rank == n {
            break;
        }
        let Some(p) = (rank..n).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(p, rank);
        let (head, tail) = rows.split_at_mut(rank + 1);
        let pivot_row = &head[rank];
        let pivot = pivot_row[c].clone();
        for row in tail.iter_mut() {
            let lead = row[c].clone();
            for k in c..cols {
                // Exact division by the previous pivot (Sylvester's identity).
                let v = (&pivot * &row[k] - &lead * &pivot_row[k]) / &prev;
                row[k] = v;
            }
            for k in 0..c {
                row[k] = BigInt::zero();
            }
        }
        prev = pivot;
        rank += 1;
    }
    rank
}

/// A basis of the right kernel {x : M x = 0}.
pub fn kernel_basis<F: Field>(field: &F, m: &Matrix<F::Elem>) -> Vec<Vec<F::Elem>> {
    let mut a = m.clone();
    let pivots = rref(field, &mut a);
    let mut is_pivot = vec![false; m.cols];
    for &p in &pivots {
        is_pivot[p] = true;
    }
    let mut basis = Vec::new();
    for free in (0..m.cols).filter(|&c| !is_pivot[c]) {
        let mut v = vec![field.zero(); m.cols];
        v[free] = field.one();
        for (r, &p) in pivots.iter().enumerate() {
            v[p] = field.neg(a.get(r, free));
        }
        basis.push(v);
    }
    basis
}

/// Determinant of a square matrix.
pub fn determinant<F: Field>(field: &F, m: &Matrix<F::Elem>) -> F::Elem {
    assert_eq!(m.rows, m.cols, "determinant of a non-square matrix");
    let n = m.rows;
    let mut a = m.data.clone();
    let mut det = field.one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| !field.is_zero(&a[i * n + c])) else {
            return field.zero();
        };
        if p != c {
            for k in 0..n {
                a.swap(p * n + k, c * n + k);
            }
            det = field.neg(&det);
        }
        det = field.mul(&det, &a[c * n + c]);
        let inv = field.inv(&a[c * n + c]).expect("pivot is nonzero");
        for i in c + 1..n {
            if field.is_zero(&a[i * n + c]) {
                continue;
            }
            let factor = field.mul(&a[i * n + c], &inv);
            for k in c..n {
                let v = field.sub(&a[i * n + k], &field.mul(&factor, &a[c * n + k]));
                a[i * n + k] = v;
            }
        }
    }
    det
}

/// Solves the square system `m x = b`; `None` if `m` is singular.
pub fn solve<F: Field>(field: &F, m: &Matrix<F::Elem>, b: &[F::Elem]) -> Option<Vec<F::Elem>> {
    let n = m.rows;
    assert_eq!(n, m.cols);
    let mut aug = Matrix::filled(n, n + 1, field.zero());
    for r in 0..n {
        for c in 0..n {
            aug.set(r, c, m.get(r, c).clone());
        }
        aug.set(r, n, b[r].clone());
    }
    let pivots = rref(field, &mut aug);
    if pivots.len() < n || pivots[n - 1] != n - 1 {
        return None;
    }
    Some((0..n).map(|r| aug.get(r, n).clone()).collect())
}

/// Matrix-vector product.
pub fn apply<F: Field>(field: &F, m: &Matrix<F::Elem>, x: &[F::Elem]) -> Vec<F::Elem> {
    (0..m.rows)
        .map(|r| {
            m.row(r)
                .iter()
                .zip(x)
                .fold(field.zero(), |acc, (a, b)| field.add(&acc, &field.mul(a, b)))
        })
        .collect()
}
