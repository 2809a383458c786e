//! Numerical tolerances.

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Tolerances used to decide the approximate predicates of the library
/// (Hermitian, positive, rank, idempotent).
///
/// Defaults are `hermitian = 1e-10`, `eig = 1e-9`, `psd = 1e-9`,
/// `rank = 1e-8`, `proj = 1e-9`, `eig_group = 1e-8`, each floored at
/// `1000 * epsilon` of the scalar type so that `f32` stays usable.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances<T> {
    pub hermitian: T,
    pub eig: T,
    pub psd: T,
    pub rank: T,
    pub proj: T,
    pub eig_group: T,
}

impl<T: Real> Default for Tolerances<T> {
    fn default() -> Self {
        let floor = |x: f64| T::lit(x).max(T::tol_floor());
        Self {
            hermitian: floor(1e-10),
            eig: floor(1e-9),
            psd: floor(1e-9),
            rank: floor(1e-8),
            proj: floor(1e-9),
            eig_group: floor(1e-8),
        }
    }
}

impl<T: Real> Tolerances<T> {
    pub fn validate(&self) -> Result<()> {
        let all = [
            ("hermitian", self.hermitian),
            ("eig", self.eig),
            ("psd", self.psd),
            ("rank", self.rank),
            ("proj", self.proj),
            ("eig_group", self.eig_group),
        ];
        for (name, v) in all {
            if !(v.is_finite() && v > T::zero()) {
                return Err(Error::Config(format!("{name} tolerance must be positive, got {v}")));
            }
        }
        Ok(())
    }
}
