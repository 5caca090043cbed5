//! Row-major dense real matrices. Everything at desk scale is at most
//! 2^12 x 2^12, so no sparse formats.

use crate::scalar::Scalar;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix<S> {
    rows: usize,
    cols: usize,
    entries: Vec<S>,
}

impl<S: Scalar> DenseMatrix<S> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            entries: vec![S::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = S::one();
        }
        m
    }

    pub fn from_rows(rows: &[&[S]]) -> Self {
        let nr = rows.len();
        let nc = rows[0].len();
        let mut m = Self::zeros(nr, nc);
        for (i, r) in rows.iter().enumerate() {
            assert_eq!(r.len(), nc);
            m.entries[i * nc..(i + 1) * nc].copy_from_slice(r);
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[S] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    /// Largest absolute entry.
    pub fn max_abs(&self) -> S {
        self.entries
            .iter()
            .fold(S::zero(), |acc, &x| acc.max(x.abs()))
    }

    /// Frobenius norm.
    pub fn frobenius_norm(&self) -> S {
        self.entries
            .iter()
            .map(|&x| x * x)
            .fold(S::zero(), |a, b| a + b)
            .sqrt()
    }

    pub fn trace(&self) -> S {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    /// max |A - A^T|; zero for symmetric matrices.
    pub fn asymmetry(&self) -> S {
        let mut worst = S::zero();
        for i in 0..self.rows {
            for j in (i + 1)..self.cols {
                worst = worst.max((self[(i, j)] - self[(j, i)]).abs());
            }
        }
        worst
    }

    pub fn check_symmetric(&self, tol: S) -> Result<()> {
        if self.rows != self.cols {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} matrix is not square",
                self.rows, self.cols
            )));
        }
        let asym = self.asymmetry();
        if asym > tol {
            return Err(Error::NotSymmetric(asym.to_f64().unwrap_or(f64::NAN)));
        }
        Ok(())
    }

    pub fn matvec(&self, v: &[S]) -> Vec<S> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(v).map(|(&a, &x)| a * x).sum())
            .collect()
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows);
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let aik = self[(i, k)];
                if aik == S::zero() {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += aik * other[(k, j)];
                }
            }
        }
        out
    }

    pub fn kron(&self, other: &Self) -> Self {
        let mut out = Self::zeros(self.rows * other.rows, self.cols * other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let aij = self[(i, j)];
                if aij == S::zero() {
                    continue;
                }
                for k in 0..other.rows {
                    for l in 0..other.cols {
                        out[(i * other.rows + k, j * other.cols + l)] = aij * other[(k, l)];
                    }
                }
            }
        }
        out
    }

    pub fn scale(&self, c: S) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|&x| c * x).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Self {
            rows: self.rows,
            cols: self.cols,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(&a, &b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(-S::one()))
    }
}

impl<S: Scalar> std::ops::Index<(usize, usize)> for DenseMatrix<S> {
    type Output = S;
    fn index(&self, (i, j): (usize, usize)) -> &S {
        &self.entries[i * self.cols + j]
    }
}

impl<S: Scalar> std::ops::IndexMut<(usize, usize)> for DenseMatrix<S> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut S {
        &mut self.entries[i * self.cols + j]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kron_matches_hand_example() {
        let a = DenseMatrix::from_rows(&[&[1.0, 2.0], &[3.0, 4.0]]);
        let i = DenseMatrix::<f64>::identity(2);
        let k = i.kron(&a);
        assert_eq!(k[(0, 1)], 2.0);
        assert_eq!(k[(2, 2)], 1.0);
        assert_eq!(k[(3, 2)], 3.0);
        assert_eq!(k[(0, 2)], 0.0);
    }

    #[test]
    fn matmul_identity() {
        let a = DenseMatrix::from_rows(&[&[1.0, 2.0], &[3.0, 4.0]]);
        let i = DenseMatrix::<f64>::identity(2);
        assert_eq!(a.matmul(&i), a);
    }

    #[test]
    fn asymmetry_detects() {
        let mut a = DenseMatrix::<f64>::identity(3);
        a[(0, 1)] = 1e-3;
        assert!(a.check_symmetric(1e-12).is_err());
    }
}
