//! Dense matrices over a `Ring`, with unit-pivot elimination for inverses.
//!
//! All rings in this crate are local, so a square matrix is invertible iff
//! every elimination step finds a unit pivot in its column.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ring::Ring;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Matrix<E> {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<E>,
}

impl<E: Clone> Matrix<E> {
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> E) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    pub fn from_rows(rows: Vec<Vec<E>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Matrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    pub fn get(&self, i: usize, j: usize) -> &E {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, x: E) {
        self.data[i * self.cols + j] = x;
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn map<F: Clone>(&self, f: impl FnMut(&E) -> F) -> Matrix<F> {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    pub fn try_map<F: Clone>(&self, f: impl FnMut(&E) -> Result<F>) -> Result<Matrix<F>> {
        Ok(Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect::<Result<Vec<_>>>()?,
        })
    }

    pub fn transpose(&self) -> Self {
        Matrix::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    pub fn block(&self, r0: usize, r1: usize, c0: usize, c1: usize) -> Self {
        Matrix::from_fn(r1 - r0, c1 - c0, |i, j| self.get(r0 + i, c0 + j).clone())
    }

    /// Assemble [[a, b], [c, d]]; empty blocks are allowed.
    pub fn from_blocks(a: &Self, b: &Self, c: &Self, d: &Self) -> Self {
        let (r0, c0) = (a.rows.max(b.rows), a.cols.max(c.cols));
        let (r1, c1) = (c.rows.max(d.rows), b.cols.max(d.cols));
        Matrix::from_fn(r0 + r1, c0 + c1, |i, j| match (i < r0, j < c0) {
            (true, true) => a.get(i, j).clone(),
            (true, false) => b.get(i, j - c0).clone(),
            (false, true) => c.get(i - r0, j).clone(),
            (false, false) => d.get(i - r0, j - c0).clone(),
        })
    }

    pub fn column(&self, j: usize) -> Vec<E> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.data.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }

    /// Conjugate by the permutation that exchanges the leading `k` rows and
    /// columns with the trailing ones: rows/cols (0..k, k..h) become (k..h, 0..k).
    pub fn swap_leading_block(&self, k: usize) -> Self {
        let h = self.rows;
        assert!(self.is_square() && k <= h);
        let perm = |i: usize| if i < h - k { i + k } else { i - (h - k) };
        Matrix::from_fn(h, h, |i, j| self.get(perm(i), perm(j)).clone())
    }
}

pub fn zero<R: Ring>(ring: &R, rows: usize, cols: usize) -> Matrix<R::Elem> {
    Matrix::from_fn(rows, cols, |_, _| ring.zero())
}

pub fn identity<R: Ring>(ring: &R, n: usize) -> Matrix<R::Elem> {
    Matrix::from_fn(n, n, |i, j| if i == j { ring.one() } else { ring.zero() })
}

pub fn diagonal<R: Ring>(ring: &R, diag: &[R::Elem]) -> Matrix<R::Elem> {
    let n = diag.len();
    Matrix::from_fn(n, n, |i, j| if i == j { diag[i].clone() } else { ring.zero() })
}

pub fn map_ring<R: Ring>(m: &Matrix<R::Elem>, f: impl Fn(&R::Elem) -> R::Elem) -> Matrix<R::Elem> {
    m.map(f)
}

pub fn add<R: Ring>(ring: &R, a: &Matrix<R::Elem>, b: &Matrix<R::Elem>) -> Matrix<R::Elem> {
    assert_eq!((a.rows, a.cols), (b.rows, b.cols), "matrix add shape");
    Matrix {
        rows: a.rows,
        cols: a.cols,
        data: a.data.iter().zip(&b.data).map(|(x, y)| ring.add(x, y)).collect(),
    }
}

pub fn sub<R: Ring>(ring: &R, a: &Matrix<R::Elem>, b: &Matrix<R::Elem>) -> Matrix<R::Elem> {
    assert_eq!((a.rows, a.cols), (b.rows, b.cols), "matrix sub shape");
    Matrix {
        rows: a.rows,
        cols: a.cols,
        data: a.data.iter().zip(&b.data).map(|(x, y)| ring.sub(x, y)).collect(),
    }
}

pub fn neg<R: Ring>(ring: &R, a: &Matrix<R::Elem>) -> Matrix<R::Elem> {
    a.map(|x| ring.neg(x))
}

pub fn scale<R: Ring>(ring: &R, s: &R::Elem, a: &Matrix<R::Elem>) -> Matrix<R::Elem> {
    a.map(|x| ring.mul(s, x))
}

pub fn mul<R: Ring>(ring: &R, a: &Matrix<R::Elem>, b: &Matrix<R::Elem>) -> Matrix<R::Elem> {
    assert_eq!(a.cols, b.rows, "matrix mul shape");
    Matrix::from_fn(a.rows, b.cols, |i, j| {
        let mut acc = ring.zero();
        for k in 0..a.cols {
            acc = ring.add(&acc, &ring.mul(a.get(i, k), b.get(k, j)));
        }
        acc
    })
}

pub fn mul_vec<R: Ring>(ring: &R, a: &Matrix<R::Elem>, v: &[R::Elem]) -> Vec<R::Elem> {
    assert_eq!(a.cols, v.len(), "matrix-vector shape");
    (0..a.rows)
        .map(|i| {
            let mut acc = ring.zero();
            for k in 0..a.cols {
                acc = ring.add(&acc, &ring.mul(a.get(i, k), &v[k]));
            }
            acc
        })
        .collect()
}

pub fn equal<R: Ring>(ring: &R, a: &Matrix<R::Elem>, b: &Matrix<R::Elem>) -> bool {
    a.rows == b.rows && a.cols == b.cols && a.data.iter().zip(&b.data).all(|(x, y)| ring.eq(x, y))
}

pub fn is_zero<R: Ring>(ring: &R, a: &Matrix<R::Elem>) -> bool {
    a.data.iter().all(|x| ring.is_zero(x))
}

/// Gauss-Jordan inversion with unit pivots. Returns `None` if some column has
/// no unit at or below the diagonal, which over a local ring means the matrix
/// is singular.
pub fn inverse<R: Ring>(ring: &R, a: &Matrix<R::Elem>) -> Option<Matrix<R::Elem>> {
    assert!(a.is_square(), "inverse of non-square matrix");
    let n = a.rows;
    let mut m = a.clone();
    let mut inv = identity(ring, n);
    for col in 0..n {
        let pivot = (col..n).find(|&r| ring.is_unit(m.get(r, col)))?;
        m.swap_rows(col, pivot);
        inv.swap_rows(col, pivot);
        let pinv = ring.inv(m.get(col, col))?;
        for j in 0..n {
            m.set(col, j, ring.mul(&pinv, m.get(col, j)));
            inv.set(col, j, ring.mul(&pinv, inv.get(col, j)));
        }
        for r in 0..n {
            if r == col || ring.is_zero(m.get(r, col)) {
                continue;
            }
            let f = m.get(r, col).clone();
            for j in 0..n {
                let mj = ring.sub(m.get(r, j), &ring.mul(&f, m.get(col, j)));
                m.set(r, j, mj);
                let ij = ring.sub(inv.get(r, j), &ring.mul(&f, inv.get(col, j)));
                inv.set(r, j, ij);
            }
        }
    }
    Some(inv)
}

pub fn try_inverse<R: Ring>(ring: &R, a: &Matrix<R::Elem>) -> Result<Matrix<R::Elem>> {
    inverse(ring, a).ok_or_else(|| Error::NotUnit("matrix is not invertible".into()))
}

/// Determinant by cofactor expansion along the first row. Matrices here have
/// rank at most a handful, so this avoids needing division.
pub fn det<R: Ring>(ring: &R, a: &Matrix<R::Elem>) -> R::Elem {
    assert!(a.is_square());
    let n = a.rows;
    match n {
        0 => ring.one(),
        1 => a.get(0, 0).clone(),
        2 => ring.sub(&ring.mul(a.get(0, 0), a.get(1, 1)), &ring.mul(a.get(0, 1), a.get(1, 0))),
        _ => {
            let mut acc = ring.zero();
            for j in 0..n {
                let minor = Matrix::from_fn(n - 1, n - 1, |r, c| {
                    a.get(r + 1, if c < j { c } else { c + 1 }).clone()
                });
                let term = ring.mul(a.get(0, j), &det(ring, &minor));
                acc = if j % 2 == 0 { ring.add(&acc, &term) } else { ring.sub(&acc, &term) };
            }
            acc
        }
    }
}

/// Adjugate matrix, so that adj(a) * a = det(a) * 1.
pub fn adjugate<R: Ring>(ring: &R, a: &Matrix<R::Elem>) -> Matrix<R::Elem> {
    let n = a.rows;
    if n == 1 {
        return identity(ring, 1);
    }
    Matrix::from_fn(n, n, |i, j| {
        let minor = Matrix::from_fn(n - 1, n - 1, |r, c| {
            a.get(if r < j { r } else { r + 1 }, if c < i { c } else { c + 1 }).clone()
        });
        let d = det(ring, &minor);
        if (i + j) % 2 == 0 {
            d
        } else {
            ring.neg(&d)
        }
    })
}

pub fn random<R: Ring>(ring: &R, rows: usize, cols: usize, rng: &mut dyn rand::RngCore) -> Matrix<R::Elem> {
    Matrix::from_fn(rows, cols, |_, _| ring.random(rng))
}

/// A random invertible matrix, drawn by rejection.
pub fn random_invertible<R: Ring>(ring: &R, n: usize, rng: &mut dyn rand::RngCore) -> Matrix<R::Elem> {
    loop {
        let m = random(ring, n, n, rng);
        if ring.is_unit(&det(ring, &m)) {
            return m;
        }
    }
}
