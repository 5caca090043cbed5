//! Dense symmetric eigensolver used as the classical reference: cyclic Jacobi
//! rotations with accumulated eigenvectors. Simple and provably convergent;
//! desk-scale sizes make the O(n^3)-per-sweep cost acceptable.

use crate::matrix::DenseMatrix;
use crate::qsim::StateVector;
use crate::scalar::Scalar;
use crate::{Error, Result};

const MAX_SWEEPS: usize = 100;
const SIZE_CAP: usize = 1 << 12;

#[derive(Debug, Clone)]
pub struct EigenDecomposition<S> {
    values: Vec<S>,
    /// Orthonormal eigenvectors as matrix columns, same order as `values`.
    vectors: DenseMatrix<S>,
}

impl<S: Scalar> EigenDecomposition<S> {
    /// Eigenvalues in ascending order.
    pub fn values(&self) -> &[S] {
        &self.values
    }

    pub fn vectors(&self) -> &DenseMatrix<S> {
        &self.vectors
    }

    /// Column `i` of the eigenvector matrix.
    pub fn vector(&self, i: usize) -> Vec<S> {
        (0..self.vectors.rows()).map(|r| self.vectors[(r, i)]).collect()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Indices of all eigenvalues within `tol` of `lambda` (a degenerate
    /// eigenspace when more than one).
    pub fn eigenspace_indices(&self, lambda: S, tol: S) -> Vec<usize> {
        self.values
            .iter()
            .enumerate()
            .filter(|(_, &v)| (v - lambda).abs() < tol)
            .map(|(i, _)| i)
            .collect()
    }

    /// Index of the eigenvalue closest to `lambda`.
    pub fn nearest_index(&self, lambda: S) -> usize {
        let mut best = 0;
        let mut dist = S::infinity();
        for (i, &v) in self.values.iter().enumerate() {
            let d = (v - lambda).abs();
            if d < dist {
                dist = d;
                best = i;
            }
        }
        best
    }
}

/// Full spectrum and orthonormal eigenvectors of a symmetric matrix.
pub fn eigensolve_symmetric<S: Scalar>(m: &DenseMatrix<S>) -> Result<EigenDecomposition<S>> {
    let n = m.rows();
    if n > SIZE_CAP {
        return Err(Error::SizeCap(n, SIZE_CAP));
    }
    m.check_symmetric(S::lit(1e-12).max(S::epsilon() * S::lit(100.0) * m.max_abs()))?;

    let mut a = m.clone();
    let mut v = DenseMatrix::identity(n);
    let norm = m.frobenius_norm();
    // f32 cannot reach 1e-12 relative; fall back to an epsilon-scaled floor.
    let target = norm * S::lit(1e-12).max(S::epsilon() * S::lit(16.0));

    let mut residual = off_diagonal_norm(&a);
    let mut sweeps = 0;
    while residual > target && sweeps < MAX_SWEEPS {
        for p in 0..n {
            for q in (p + 1)..n {
                jacobi_rotate(&mut a, &mut v, p, q);
            }
        }
        residual = off_diagonal_norm(&a);
        sweeps += 1;
    }
    if residual > target && norm > S::zero() {
        return Err(Error::NoConvergence {
            residual: (residual / norm).to_f64().unwrap_or(f64::NAN),
            sweeps,
        });
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].partial_cmp(&a[(j, j)]).unwrap());
    let values: Vec<S> = order.iter().map(|&i| a[(i, i)]).collect();
    let mut vectors = DenseMatrix::zeros(n, n);
    for (col, &src) in order.iter().enumerate() {
        for row in 0..n {
            vectors[(row, col)] = v[(row, src)];
        }
    }
    Ok(EigenDecomposition { values, vectors })
}

fn off_diagonal_norm<S: Scalar>(a: &DenseMatrix<S>) -> S {
    let n = a.rows();
    let mut sum = S::zero();
    for i in 0..n {
        for j in (i + 1)..n {
            sum += a[(i, j)] * a[(i, j)];
        }
    }
    (sum + sum).sqrt()
}

/// One Jacobi rotation annihilating A[p][q], accumulated into V.
fn jacobi_rotate<S: Scalar>(a: &mut DenseMatrix<S>, v: &mut DenseMatrix<S>, p: usize, q: usize) {
    let apq = a[(p, q)];
    if apq == S::zero() {
        return;
    }
    let app = a[(p, p)];
    let aqq = a[(q, q)];
    let tau = (aqq - app) / (S::lit(2.0) * apq);
    // smaller-magnitude root of t^2 + 2 tau t - 1 = 0
    let t = if tau >= S::zero() {
        S::one() / (tau + (S::one() + tau * tau).sqrt())
    } else {
        -S::one() / (-tau + (S::one() + tau * tau).sqrt())
    };
    let c = S::one() / (S::one() + t * t).sqrt();
    let s = t * c;
    let n = a.rows();

    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = c * akp - s * akq;
        a[(k, q)] = s * akp + c * akq;
    }
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = c * apk - s * aqk;
        a[(q, k)] = s * apk + c * aqk;
    }
    // symmetrize round-off on the annihilated pair
    a[(p, q)] = S::zero();
    a[(q, p)] = S::zero();
    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = c * vkp - s * vkq;
        v[(k, q)] = s * vkp + c * vkq;
    }
}

/// |<v|s>|^2 for a real reference eigenvector.
pub fn fidelity<S: Scalar>(s: &StateVector<S>, v: &[S]) -> Result<S> {
    if s.dim() != v.len() {
        return Err(Error::DimensionMismatch(format!(
            "state dim {} vs vector len {}",
            s.dim(),
            v.len()
        )));
    }
    let mut re = S::zero();
    let mut im = S::zero();
    for (a, &x) in s.amplitudes().iter().zip(v) {
        re += x * a.re;
        im += x * a.im;
    }
    Ok(re * re + im * im)
}

/// Fidelity against the span of all eigenvectors whose eigenvalue lies within
/// `tol` of `lambda`: the projected norm squared.
pub fn eigenspace_fidelity<S: Scalar>(
    s: &StateVector<S>,
    eig: &EigenDecomposition<S>,
    lambda: S,
    tol: S,
) -> Result<S> {
    let idx = eig.eigenspace_indices(lambda, tol);
    let mut total = S::zero();
    for i in idx {
        total += fidelity(s, &eig.vector(i))?;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fdm::{build_1d_operator, closed_form_1d_spectrum, BoundaryCondition};
    use approx::assert_relative_eq;

    #[test]
    fn diagonal_matrix_sorted() {
        let m = DenseMatrix::from_rows(&[
            &[5.0, 0.0, 0.0],
            &[0.0, 1.0, 0.0],
            &[0.0, 0.0, 3.0],
        ]);
        let eig = eigensolve_symmetric(&m).unwrap();
        assert_eq!(eig.values(), &[1.0, 3.0, 5.0]);
    }

    #[test]
    fn two_by_two_hand_solve() {
        let m: DenseMatrix<f64> = DenseMatrix::from_rows(&[&[3.0, -1.0], &[-1.0, 3.0]]);
        let eig = eigensolve_symmetric(&m).unwrap();
        assert_relative_eq!(eig.values()[0], 2.0, epsilon = 1e-12);
        assert_relative_eq!(eig.values()[1], 4.0, epsilon = 1e-12);
        let v0 = eig.vector(0);
        // (1,1)/sqrt(2) up to sign
        assert_relative_eq!((v0[0] * v0[1]).abs(), 0.5, epsilon = 1e-12);
    }

    #[test]
    fn neumann_8x8_closed_form() {
        let m = build_1d_operator::<f64>(3, BoundaryCondition::Neumann).unwrap();
        let eig = eigensolve_symmetric(&m).unwrap();
        let closed = closed_form_1d_spectrum::<f64>(3, BoundaryCondition::Neumann);
        for (got, want) in eig.values().iter().zip(closed) {
            assert_relative_eq!(*got, want, epsilon = 1e-10);
        }
    }

    #[test]
    fn reconstruction_and_trace() {
        let spec = crate::fdm::WaveguideSpec::new(1.0, 1.0, 2, 2, crate::fdm::ModeFamily::Tm).unwrap();
        let m = crate::fdm::assemble_2d::<f64>(&spec).unwrap();
        let eig = eigensolve_symmetric(&m).unwrap();
        let n = m.rows();
        // V diag(l) V^T = A
        let norm = m.frobenius_norm();
        let mut recon = DenseMatrix::zeros(n, n);
        for k in 0..n {
            let v = eig.vector(k);
            let lam = eig.values()[k];
            for i in 0..n {
                for j in 0..n {
                    recon[(i, j)] += lam * v[i] * v[j];
                }
            }
        }
        assert!(recon.sub(&m).max_abs() < 1e-9 * norm);
        let sum: f64 = eig.values().iter().sum();
        assert_relative_eq!(sum, m.trace(), epsilon = 1e-10 * m.trace().abs());
    }

    #[test]
    fn vectors_orthonormal() {
        let m = build_1d_operator::<f64>(3, BoundaryCondition::Dirichlet).unwrap();
        let eig = eigensolve_symmetric(&m).unwrap();
        for i in 0..eig.len() {
            for j in 0..eig.len() {
                let dot: f64 = eig.vector(i).iter().zip(eig.vector(j)).map(|(a, b)| a * b).sum();
                let want = if i == j { 1.0 } else { 0.0 };
                assert_relative_eq!(dot, want, epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn asymmetric_rejected() {
        let m = DenseMatrix::from_rows(&[&[1.0, 2.0], &[0.0, 1.0]]);
        assert!(eigensolve_symmetric(&m).is_err());
    }

    #[test]
    fn degenerate_subspace_fidelity() {
        // square TE guide: (1,0) and (0,1) modes are degenerate; any state in
        // the span scores fidelity 1 against the eigenspace projector.
        let spec = crate::fdm::WaveguideSpec::new(1.0, 1.0, 2, 2, crate::fdm::ModeFamily::Te).unwrap();
        let m = crate::fdm::assemble_2d::<f64>(&spec).unwrap();
        let eig = eigensolve_symmetric(&m).unwrap();
        let lam = eig.values()[1];
        assert_relative_eq!(eig.values()[2], lam, epsilon = 1e-9 * m.max_abs());
        let v1 = eig.vector(1);
        let v2 = eig.vector(2);
        let mixed: Vec<f64> = v1
            .iter()
            .zip(&v2)
            .map(|(a, b)| (a + b) / 2f64.sqrt())
            .collect();
        let s = StateVector::from_real(&mixed).unwrap();
        let tol = 1e-6 * m.max_abs();
        let f_space = eigenspace_fidelity(&s, &eig, lam, tol).unwrap();
        assert_relative_eq!(f_space, 1.0, epsilon = 1e-10);
        // against a single vector it is only 1/2
        let f_single = fidelity(&s, &v1).unwrap();
        assert_relative_eq!(f_single, 0.5, epsilon = 1e-10);
    }
}
