//! Cyclic Jacobi eigensolver for Hermitian matrices.
//!
//! Each rotation first removes the phase of the pivot `a[p][q]` with a
//! diagonal unitary, then applies the real symmetric Jacobi rotation that
//! annihilates it. Rotations are accumulated into the eigenvector matrix.

use num_complex::Complex;

use super::matrix::Matrix;
use crate::error::{Error, Result};
use crate::scalar::{Cplx, Real};
use crate::tolerance::Tolerances;

const MAX_SWEEPS: usize = 100;

/// Eigenvalues in ascending order with orthonormal eigenvector columns.
#[derive(Clone, Debug)]
pub struct SpectralDecomposition<T> {
    pub eigenvalues: Vec<T>,
    pub eigenvectors: Matrix<T>,
}

impl<T: Real> SpectralDecomposition<T> {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn eigenvector(&self, j: usize) -> Vec<Cplx<T>> {
        self.eigenvectors.column(j)
    }

    pub fn min_eigenvalue(&self) -> T {
        self.eigenvalues[0]
    }

    pub fn max_eigenvalue(&self) -> T {
        self.eigenvalues[self.eigenvalues.len() - 1]
    }

    /// `V diag(lambda) V^dagger`.
    pub fn reconstruct(&self) -> Matrix<T> {
        let n = self.dim();
        let v = &self.eigenvectors;
        Matrix::from_fn(n, |r, c| {
            (0..n).fold(Complex::new(T::zero(), T::zero()), |acc, k| {
                acc + v[(r, k)] * v[(c, k)].conj() * self.eigenvalues[k]
            })
        })
    }

    /// `||V^dagger V - I||_max`.
    pub fn orthonormality_error(&self) -> T {
        let v = &self.eigenvectors;
        let gram = &v.adjoint() * v;
        gram.distance(&Matrix::identity(self.dim())).expect("same dimension")
    }
}

/// Diagonalizes a Hermitian matrix.
///
/// Fails with [`Error::NotHermitian`] when `||a - a^dagger||_max` exceeds
/// `tol.hermitian`. The input is symmetrized before the sweeps start, so the
/// result is the decomposition of the Hermitian part of `a`.
pub fn hermitian_eig<T: Real>(a: &Matrix<T>, tol: &Tolerances<T>) -> Result<SpectralDecomposition<T>> {
    let deviation = a.hermitian_deviation();
    if deviation > tol.hermitian {
        return Err(Error::NotHermitian {
            deviation: deviation.as_f64(),
        });
    }
    if !a.is_finite() {
        return Err(Error::NonFinite);
    }
    jacobi(a.hermitian_part())
}

fn jacobi<T: Real>(mut m: Matrix<T>) -> Result<SpectralDecomposition<T>> {
    let n = m.dim();
    let mut v = Matrix::identity(n);
    for i in 0..n {
        m[(i, i)].im = T::zero();
    }

    let frob = m.frobenius_norm();
    let threshold = T::epsilon() * frob * T::from_usize(n.max(1)).unwrap();
    let two = T::lit(2.0);

    let mut converged = frob == T::zero();
    for _ in 0..MAX_SWEEPS {
        if converged {
            break;
        }
        if off_diagonal_norm(&m) <= threshold {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let g = m[(p, q)];
                let ag = g.norm();
                if ag == T::zero() {
                    continue;
                }
                let app = m[(p, p)].re;
                let aqq = m[(q, q)].re;
                let theta = (aqq - app) / (two * ag);
                let t = if theta.abs() > T::lit(1e150) {
                    T::one() / (two * theta)
                } else {
                    let t = T::one() / (theta.abs() + (theta * theta + T::one()).sqrt());
                    if theta < T::zero() {
                        -t
                    } else {
                        t
                    }
                };
                let c = T::one() / (t * t + T::one()).sqrt();
                let s = t * c;
                let phase = (g / ag).conj();

                let jpp = Complex::new(c, T::zero());
                let jpq = Complex::new(s, T::zero());
                let jqp = phase.scale(-s);
                let jqq = phase.scale(c);

                rotate_columns(&mut m, p, q, jpp, jpq, jqp, jqq);
                rotate_rows(&mut m, p, q, jpp, jpq, jqp, jqq);
                rotate_columns(&mut v, p, q, jpp, jpq, jqp, jqq);

                let zero = Complex::new(T::zero(), T::zero());
                m[(p, q)] = zero;
                m[(q, p)] = zero;
                m[(p, p)].im = T::zero();
                m[(q, q)].im = T::zero();
            }
        }
    }
    if !converged && off_diagonal_norm(&m) > threshold {
        return Err(Error::NoConvergence { sweeps: MAX_SWEEPS });
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[(i, i)].re.partial_cmp(&m[(j, j)].re).expect("finite eigenvalues"));
    let eigenvalues = order.iter().map(|&i| m[(i, i)].re).collect();
    let eigenvectors = Matrix::from_fn(n, |r, c| v[(r, order[c])]);
    Ok(SpectralDecomposition {
        eigenvalues,
        eigenvectors,
    })
}

fn off_diagonal_norm<T: Real>(m: &Matrix<T>) -> T {
    let n = m.dim();
    let mut acc = T::zero();
    for r in 0..n {
        for c in 0..n {
            if r != c {
                acc += m[(r, c)].norm_sqr();
            }
        }
    }
    acc.sqrt()
}

/// `m <- m J` restricted to columns `p`, `q`.
fn rotate_columns<T: Real>(
    m: &mut Matrix<T>,
    p: usize,
    q: usize,
    jpp: Cplx<T>,
    jpq: Cplx<T>,
    jqp: Cplx<T>,
    jqq: Cplx<T>,
) {
    for k in 0..m.dim() {
        let x = m[(k, p)];
        let y = m[(k, q)];
        m[(k, p)] = x * jpp + y * jqp;
        m[(k, q)] = x * jpq + y * jqq;
    }
}

/// `m <- J^dagger m` restricted to rows `p`, `q`.
fn rotate_rows<T: Real>(
    m: &mut Matrix<T>,
    p: usize,
    q: usize,
    jpp: Cplx<T>,
    jpq: Cplx<T>,
    jqp: Cplx<T>,
    jqq: Cplx<T>,
) {
    for k in 0..m.dim() {
        let x = m[(p, k)];
        let y = m[(q, k)];
        m[(p, k)] = jpp.conj() * x + jqp.conj() * y;
        m[(q, k)] = jpq.conj() * x + jqq.conj() * y;
    }
}
