//! Small dense vector/matrix helpers.
//!
//! The solver's state vectors are short (problem dimension and constraint
//! counts are single digits in the canonical setup) and the mixing matrices
//! are `m x m` with `m` in the tens at most. All sums here accumulate in a
//! fixed index-ascending order; that order is part of the crate's
//! determinism contract (identical inputs produce bitwise identical
//! outputs), which general-purpose BLAS backends do not promise.

use serde::{Deserialize, Serialize};

use crate::scalar::Scalar;

/// Dot product with index-ascending accumulation.
pub fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    debug_assert_eq!(a.len(), b.len());
    let mut acc = T::zero();
    for j in 0..a.len() {
        acc += a[j] * b[j];
    }
    acc
}

/// Euclidean norm.
pub fn norm<T: Scalar>(a: &[T]) -> T {
    dot(a, a).sqrt()
}

/// Euclidean distance between two equal-length vectors.
pub fn dist<T: Scalar>(a: &[T], b: &[T]) -> T {
    debug_assert_eq!(a.len(), b.len());
    let mut acc = T::zero();
    for j in 0..a.len() {
        let d = a[j] - b[j];
        acc += d * d;
    }
    acc.sqrt()
}

/// `dst += s * src` componentwise.
pub fn add_scaled<T: Scalar>(dst: &mut [T], s: T, src: &[T]) {
    debug_assert_eq!(dst.len(), src.len());
    for j in 0..dst.len() {
        dst[j] += s * src[j];
    }
}

/// Componentwise mean of a non-empty set of equal-length vectors.
pub fn mean<T: Scalar>(rows: &[Vec<T>]) -> Vec<T> {
    assert!(!rows.is_empty(), "mean of zero vectors");
    let dim = rows[0].len();
    let mut out = vec![T::zero(); dim];
    for row in rows {
        for j in 0..dim {
            out[j] += row[j];
        }
    }
    let inv = T::one() / T::from_usize_c(rows.len());
    for v in &mut out {
        *v *= inv;
    }
    out
}

/// Square dense matrix in row-major storage.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Mat<T> {
    size: usize,
    data: Vec<T>,
}

impl<T: Scalar> Mat<T> {
    pub fn zeros(size: usize) -> Self {
        Mat { size, data: vec![T::zero(); size * size] }
    }

    pub fn identity(size: usize) -> Self {
        let mut m = Self::zeros(size);
        for i in 0..size {
            m.set(i, i, T::one());
        }
        m
    }

    pub fn from_rows(rows: &[Vec<T>]) -> Self {
        let size = rows.len();
        let mut m = Self::zeros(size);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), size, "matrix rows must be square");
            for j in 0..size {
                m.set(i, j, row[j]);
            }
        }
        m
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        self.data[i * self.size + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.data[i * self.size + j] = v;
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.size..(i + 1) * self.size]
    }

    pub fn row_sums(&self) -> Vec<T> {
        (0..self.size).map(|i| self.row(i).iter().fold(T::zero(), |a, &v| a + v)).collect()
    }

    pub fn col_sums(&self) -> Vec<T> {
        let mut out = vec![T::zero(); self.size];
        for i in 0..self.size {
            for j in 0..self.size {
                out[j] += self.get(i, j);
            }
        }
        out
    }

    /// `self * other`, j-ascending accumulation.
    pub fn matmul(&self, other: &Mat<T>) -> Mat<T> {
        assert_eq!(self.size, other.size);
        let n = self.size;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                let mut acc = T::zero();
                for t in 0..n {
                    acc += self.get(i, t) * other.get(t, j);
                }
                out.set(i, j, acc);
            }
        }
        out
    }

    /// `self * v` for a plain vector.
    pub fn mul_vec(&self, v: &[T]) -> Vec<T> {
        assert_eq!(v.len(), self.size);
        (0..self.size).map(|i| dot(self.row(i), v)).collect()
    }

    /// Mixes a stack of per-node vectors: `out[i] = sum_j self[i][j] * rows[j]`.
    ///
    /// Skips exact zeros so a node's output never touches values it has no
    /// edge to, and accumulates j-ascending.
    pub fn mix_rows(&self, rows: &[Vec<T>]) -> Vec<Vec<T>> {
        assert_eq!(rows.len(), self.size);
        let dim = rows.first().map_or(0, Vec::len);
        let mut out = vec![vec![T::zero(); dim]; self.size];
        for i in 0..self.size {
            for j in 0..self.size {
                let w = self.get(i, j);
                if w != T::zero() {
                    add_scaled(&mut out[i], w, &rows[j]);
                }
            }
        }
        out
    }

    /// Largest column-wise spread `max_i m[i][j] - min_i m[i][j]` over j.
    pub fn max_row_spread(&self) -> T {
        let mut worst = T::zero();
        for j in 0..self.size {
            let mut lo = self.get(0, j);
            let mut hi = lo;
            for i in 1..self.size {
                let v = self.get(i, j);
                lo = lo.min(v);
                hi = hi.max(v);
            }
            worst = worst.max(hi - lo);
        }
        worst
    }
}
