//! Seeded random generators for vectors, unitaries, Hermitian matrices,
//! partial density operators and subspaces.
//!
//! All generators draw from [`ChaCha8Rng`] so that a seed reproduces the
//! same sample on every platform.

use num_complex::Complex;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::density::PartialDensityOperator;
use crate::linalg::{norm, orthonormalize, Matrix};
use crate::logic::ClosedSubspace;
use crate::scalar::{Cplx, Real};

pub type SeededRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Derives an independent seed for trial `index` of a run seeded by `base`.
pub fn trial_seed(base: u64, index: u64) -> u64 {
    // splitmix64 finalizer
    let mut z = base ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn gaussian<T: Real, R: Rng + ?Sized>(rng: &mut R) -> T {
    T::lit(rng.sample::<f64, _>(StandardNormal))
}

/// Standard complex Gaussian vector.
pub fn gaussian_vector<T: Real>(rng: &mut impl Rng, n: usize) -> Vec<Cplx<T>> {
    let half = T::lit(std::f64::consts::FRAC_1_SQRT_2);
    (0..n)
        .map(|_| Complex::new(gaussian::<T, _>(rng), gaussian::<T, _>(rng)).scale(half))
        .collect()
}

pub fn unit_vector<T: Real>(rng: &mut impl Rng, n: usize) -> Vec<Cplx<T>> {
    loop {
        let v = gaussian_vector::<T>(rng, n);
        let len = norm(&v);
        if len > T::lit(1e-6) {
            return v.into_iter().map(|z| z.unscale(len)).collect();
        }
    }
}

/// Matrix with i.i.d. complex Gaussian entries (not Hermitian).
pub fn gaussian_matrix<T: Real>(rng: &mut impl Rng, n: usize) -> Matrix<T> {
    let entries = gaussian_vector::<T>(rng, n * n);
    Matrix::from_fn(n, |r, c| entries[r * n + c])
}

/// `(G + G^dagger) / 2` for a Gaussian `G`.
pub fn random_hermitian<T: Real>(rng: &mut impl Rng, n: usize) -> Matrix<T> {
    gaussian_matrix::<T>(rng, n).hermitian_part()
}

/// Random unitary built as a product of `n` Householder reflections followed
/// by a diagonal of random phases.
pub fn random_unitary<T: Real>(rng: &mut impl Rng, n: usize) -> Matrix<T> {
    let mut u = Matrix::<T>::identity(n);
    let two = T::lit(2.0);
    for _ in 0..n {
        let v = unit_vector::<T>(rng, n);
        // u <- (I - 2 v v^dagger) u
        for c in 0..n {
            let col = u.column(c);
            let proj = v
                .iter()
                .zip(&col)
                .fold(Complex::new(T::zero(), T::zero()), |acc, (a, b)| acc + a.conj() * b);
            for r in 0..n {
                u[(r, c)] = col[r] - v[r] * proj.scale(two);
            }
        }
    }
    for r in 0..n {
        let phase = Complex::from_polar(T::one(), T::lit(rng.random_range(0.0..std::f64::consts::TAU)));
        for c in 0..n {
            u[(r, c)] *= phase;
        }
    }
    u
}

/// Hermitian matrix with the given spectrum in a random eigenbasis.
pub fn with_spectrum<T: Real>(rng: &mut impl Rng, spectrum: &[T]) -> Matrix<T> {
    let u = random_unitary::<T>(rng, spectrum.len());
    u.conjugate(&Matrix::from_diag(spectrum))
        .expect("same dimension")
        .hermitian_part()
}

/// Random eigenvalue weights summing to `trace`; roughly one draw in four is
/// rank deficient.
pub fn random_weights<T: Real>(rng: &mut impl Rng, n: usize, trace: T) -> Vec<T> {
    let mut w: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
    if n > 1 && rng.random_bool(0.25) {
        let zeros = rng.random_range(1..n);
        let mut idx: Vec<usize> = (0..n).collect();
        idx.shuffle(rng);
        for &i in &idx[..zeros] {
            w[i] = 0.0;
        }
    }
    let total: f64 = w.iter().sum();
    if total == 0.0 {
        return vec![T::zero(); n];
    }
    w.into_iter().map(|x| T::lit(x / total) * trace).collect()
}

/// Random partial density operator with trace exactly `trace` (up to
/// rounding), `0 <= trace <= 1`.
pub fn partial_density_with_trace<T: Real>(
    rng: &mut impl Rng,
    n: usize,
    trace: T,
) -> PartialDensityOperator<T> {
    let weights = random_weights(rng, n, trace);
    PartialDensityOperator::new_unchecked(with_spectrum(rng, &weights))
}

/// Random partial density operator with trace uniform in `[0, 1)`.
pub fn partial_density<T: Real>(rng: &mut impl Rng, n: usize) -> PartialDensityOperator<T> {
    let trace = T::lit(rng.random::<f64>());
    partial_density_with_trace(rng, n, trace)
}

/// Random positive semidefinite matrix of the given trace.
pub fn psd_with_trace<T: Real>(rng: &mut impl Rng, n: usize, trace: T) -> Matrix<T> {
    let weights = random_weights(rng, n, trace);
    with_spectrum(rng, &weights)
}

/// Random subspace of the given rank spanned by Gaussian vectors.
pub fn subspace<T: Real>(rng: &mut impl Rng, n: usize, rank: usize) -> ClosedSubspace<T> {
    let vectors: Vec<_> = (0..rank).map(|_| gaussian_vector::<T>(rng, n)).collect();
    ClosedSubspace::from_orthonormal(n, orthonormalize(&vectors, T::lit(1e-8)))
}

/// Random subspace with rank uniform in `0..=n`.
pub fn any_subspace<T: Real>(rng: &mut impl Rng, n: usize) -> ClosedSubspace<T> {
    let rank = rng.random_range(0..=n);
    subspace(rng, n, rank)
}

/// Random family of mutually orthogonal subspaces: the columns of a random
/// unitary are split into a random partition of blocks.
pub fn orthogonal_family<T: Real>(rng: &mut impl Rng, n: usize) -> Vec<ClosedSubspace<T>> {
    let u = random_unitary::<T>(rng, n);
    let mut columns: Vec<usize> = (0..n).collect();
    columns.shuffle(rng);
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    let mut current = Vec::new();
    for c in columns {
        current.push(c);
        if rng.random_bool(0.5) {
            blocks.push(std::mem::take(&mut current));
        }
    }
    if !current.is_empty() {
        blocks.push(current);
    }
    // occasionally leave part of the space uncovered by dropping a block
    if blocks.len() > 1 && rng.random_bool(0.3) {
        blocks.pop();
    }
    blocks
        .into_iter()
        .map(|block| ClosedSubspace::from_orthonormal(n, block.into_iter().map(|c| u.column(c)).collect()))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unitary_is_unitary() {
        let mut r = rng(0);
        for n in 1..9 {
            let u = random_unitary::<f64>(&mut r, n);
            let gram = &u.adjoint() * &u;
            assert!(gram.distance(&Matrix::identity(n)).unwrap() < 1e-12);
        }
    }

    #[test]
    fn seeds_reproduce() {
        let a = random_hermitian::<f64>(&mut rng(17), 4);
        let b = random_hermitian::<f64>(&mut rng(17), 4);
        assert_eq!(a, b);
        assert_ne!(trial_seed(1, 0), trial_seed(1, 1));
    }

    #[test]
    fn partial_density_traces() {
        let mut r = rng(5);
        for _ in 0..20 {
            let f = partial_density_with_trace::<f64>(&mut r, 4, 0.3);
            assert!((f.trace() - 0.3).abs() < 1e-12);
        }
    }

    #[test]
    fn orthogonal_family_is_orthogonal() {
        let mut r = rng(6);
        let tol = crate::tolerance::Tolerances::default();
        for _ in 0..20 {
            let family = orthogonal_family::<f64>(&mut r, 5);
            for (i, a) in family.iter().enumerate() {
                for b in &family[i + 1..] {
                    assert!(a.is_orthogonal_to(b, &tol).unwrap());
                }
            }
        }
    }
}
