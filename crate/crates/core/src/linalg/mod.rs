//! Dense complex linear algebra: matrices, the Hermitian eigensolver,
//! Gram–Schmidt and the positive semidefinite test.

mod eig;
mod matrix;

pub use eig::{hermitian_eig, SpectralDecomposition};
pub use matrix::{adjoint, basis_vector, inner, mat_mul, norm, trace, Matrix};

use crate::error::Result;
use crate::scalar::{Cplx, Real};
use crate::tolerance::Tolerances;

/// Orthonormal basis of the span of `vectors`.
///
/// Modified Gram–Schmidt with one reorthogonalization pass; a vector whose
/// residual norm falls below `rank_tol` is dropped.
///
/// # Panics
///
/// If the vectors do not all have the same length.
pub fn orthonormalize<T: Real>(vectors: &[Vec<Cplx<T>>], rank_tol: T) -> Vec<Vec<Cplx<T>>> {
    let mut basis: Vec<Vec<Cplx<T>>> = Vec::new();
    let n = vectors.first().map_or(0, Vec::len);
    for v in vectors {
        assert_eq!(v.len(), n, "orthonormalize: vectors of different dimension");
        let mut w = v.clone();
        for _pass in 0..2 {
            for q in &basis {
                let c = inner(q, &w);
                for (wi, qi) in w.iter_mut().zip(q) {
                    *wi -= qi * c;
                }
            }
        }
        let len = norm(&w);
        if len < rank_tol {
            continue;
        }
        let inv = T::one() / len;
        basis.push(w.into_iter().map(|z| z.scale(inv)).collect());
    }
    basis
}

/// Outcome of [`is_positive_semidefinite`].
#[derive(Clone, Debug)]
pub struct PsdCheck<T> {
    pub is_psd: bool,
    pub min_eigenvalue: T,
    /// Unit eigenvector of the most negative eigenvalue when the test fails.
    pub witness: Option<Vec<Cplx<T>>>,
}

/// Decides `a >= 0` as `min eig(a) >= -psd_tol`.
pub fn is_positive_semidefinite<T: Real>(a: &Matrix<T>, tol: &Tolerances<T>) -> Result<PsdCheck<T>> {
    let spectral = hermitian_eig(a, tol)?;
    let min_eigenvalue = spectral.min_eigenvalue();
    let is_psd = min_eigenvalue >= -tol.psd;
    Ok(PsdCheck {
        is_psd,
        min_eigenvalue,
        witness: (!is_psd).then(|| spectral.eigenvector(0)),
    })
}
