//! Quantum events (closed subspaces) and the measure view `K -> tr(P^K f)`
//! of a partial density operator.

use rand::Rng;
use serde::Serialize;

use crate::density::PartialDensityOperator;
use crate::error::{Error, Result};
use crate::linalg::{hermitian_eig, orthonormalize, Matrix};
use crate::random;
use crate::scalar::{Cplx, Real};
use crate::tolerance::Tolerances;

/// A closed subspace `K` of `C^n`, held as its orthogonal projection `P^K`
/// together with an orthonormal basis.
#[derive(Clone, Debug, PartialEq)]
pub struct ClosedSubspace<T> {
    dim: usize,
    projection: Matrix<T>,
    basis: Vec<Vec<Cplx<T>>>,
}

impl<T: Real> ClosedSubspace<T> {
    /// The event `{0}`.
    pub fn zero(dim: usize) -> Self {
        Self {
            dim,
            projection: Matrix::zeros(dim),
            basis: Vec::new(),
        }
    }

    /// The whole space.
    pub fn full(dim: usize) -> Self {
        Self::from_orthonormal(dim, (0..dim).map(|i| crate::linalg::basis_vector(dim, i)).collect())
    }

    /// Builds the subspace from an orthonormal basis (not checked).
    pub fn from_orthonormal(dim: usize, basis: Vec<Vec<Cplx<T>>>) -> Self {
        let mut projection = Matrix::zeros(dim);
        for v in &basis {
            debug_assert_eq!(v.len(), dim);
            for r in 0..dim {
                for c in 0..dim {
                    projection[(r, c)] += v[r] * v[c].conj();
                }
            }
        }
        Self { dim, projection, basis }
    }

    /// Span of arbitrary vectors of length `dim`.
    pub fn from_vectors(dim: usize, vectors: &[Vec<Cplx<T>>], tol: &Tolerances<T>) -> Result<Self> {
        if let Some(v) = vectors.iter().find(|v| v.len() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: v.len(),
            });
        }
        Ok(Self::from_orthonormal(dim, orthonormalize(vectors, tol.rank)))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn projection(&self) -> &Matrix<T> {
        &self.projection
    }

    pub fn basis(&self) -> &[Vec<Cplx<T>>] {
        &self.basis
    }

    /// `span(self ∪ other)`.
    pub fn join(&self, other: &Self, tol: &Tolerances<T>) -> Result<Self> {
        self.check_dim(other)?;
        let vectors: Vec<_> = self.basis.iter().chain(&other.basis).cloned().collect();
        Ok(Self::from_orthonormal(self.dim, orthonormalize(&vectors, tol.rank)))
    }

    /// `self ∩ other`, as the complement of the join of the complements.
    pub fn meet(&self, other: &Self, tol: &Tolerances<T>) -> Result<Self> {
        self.check_dim(other)?;
        Ok(self
            .orthocomplement()
            .join(&other.orthocomplement(), tol)?
            .orthocomplement())
    }

    /// Subspace with projection `I - P`.
    pub fn orthocomplement(&self) -> Self {
        let complement = &Matrix::identity(self.dim) - &self.projection;
        // Projections built from an orthonormal basis are Hermitian to rounding.
        let loose = Tolerances {
            hermitian: T::lit(1e-6).max(T::tol_floor()),
            ..Tolerances::default()
        };
        let spectral = hermitian_eig(&complement, &loose).expect("projection is Hermitian");
        let half = T::lit(0.5);
        let basis = (0..self.dim)
            .filter(|&j| spectral.eigenvalues[j] > half)
            .map(|j| spectral.eigenvector(j))
            .collect();
        Self::from_orthonormal(self.dim, basis)
    }

    /// `||P_self P_other||_max <= proj_tol`.
    pub fn is_orthogonal_to(&self, other: &Self, tol: &Tolerances<T>) -> Result<bool> {
        Ok(self.projection.mat_mul(&other.projection)?.max_abs() <= tol.proj)
    }

    /// `self ⊆ other`, decided as `P_other P_self = P_self`.
    pub fn is_subspace_of(&self, other: &Self, tol: &Tolerances<T>) -> Result<bool> {
        let prod = other.projection.mat_mul(&self.projection)?;
        Ok(prod.distance(&self.projection)? <= tol.proj)
    }

    /// Max-norm distance between the projections.
    pub fn distance(&self, other: &Self) -> Result<T> {
        self.projection.distance(&other.projection)
    }

    fn check_dim(&self, other: &Self) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: other.dim,
            });
        }
        Ok(())
    }
}

pub fn subspace_from_vectors<T: Real>(
    dim: usize,
    vectors: &[Vec<Cplx<T>>],
    tol: &Tolerances<T>,
) -> Result<ClosedSubspace<T>> {
    ClosedSubspace::from_vectors(dim, vectors, tol)
}

pub fn join<T: Real>(a: &ClosedSubspace<T>, b: &ClosedSubspace<T>, tol: &Tolerances<T>) -> Result<ClosedSubspace<T>> {
    a.join(b, tol)
}

pub fn meet<T: Real>(a: &ClosedSubspace<T>, b: &ClosedSubspace<T>, tol: &Tolerances<T>) -> Result<ClosedSubspace<T>> {
    a.meet(b, tol)
}

pub fn orthocomplement<T: Real>(k: &ClosedSubspace<T>) -> ClosedSubspace<T> {
    k.orthocomplement()
}

pub fn are_orthogonal<T: Real>(a: &ClosedSubspace<T>, b: &ClosedSubspace<T>, tol: &Tolerances<T>) -> Result<bool> {
    a.is_orthogonal_to(b, tol)
}

/// `tr(P^K f)`, the probability the partial state of `f` assigns to `K`.
///
/// Values within `psd_tol` outside `[0, 1]` are clamped onto it.
pub fn gleason_measure<T: Real>(
    f: &PartialDensityOperator<T>,
    k: &ClosedSubspace<T>,
    tol: &Tolerances<T>,
) -> Result<T> {
    if f.dim() != k.dim() {
        return Err(Error::DimensionMismatch {
            expected: k.dim(),
            found: f.dim(),
        });
    }
    if k.rank() == 0 {
        return Ok(T::zero());
    }
    let t = k.projection().trace_product(f.matrix())?;
    if t.im.abs() > T::lit(1e-9).max(T::tol_floor()) {
        return Err(Error::ImaginaryTrace { imag: t.im.as_f64() });
    }
    let v = t.re;
    Ok(if v < T::zero() && v >= -tol.psd {
        T::zero()
    } else if v > T::one() && v <= T::one() + tol.psd {
        T::one()
    } else {
        v
    })
}

/// The sub-probability measure `G(f)` induced by a partial density operator.
#[derive(Clone, Debug)]
pub struct PartialStateView<T> {
    source: PartialDensityOperator<T>,
}

impl<T: Real> PartialStateView<T> {
    pub fn new(source: PartialDensityOperator<T>) -> Self {
        Self { source }
    }

    pub fn source(&self) -> &PartialDensityOperator<T> {
        &self.source
    }

    pub fn value(&self, k: &ClosedSubspace<T>, tol: &Tolerances<T>) -> Result<T> {
        gleason_measure(&self.source, k, tol)
    }

    /// `p(H)`.
    pub fn total(&self, tol: &Tolerances<T>) -> Result<T> {
        self.value(&ClosedSubspace::full(self.source.dim()), tol)
    }

    /// Probability of non-termination, `1 - p(H)`.
    pub fn deficit(&self, tol: &Tolerances<T>) -> Result<T> {
        Ok(T::one() - self.total(tol)?)
    }
}

/// Outcome of [`check_subprobability_axioms`].
#[derive(Clone, Debug, Serialize)]
pub struct AxiomReport {
    pub passed: bool,
    pub trials: usize,
    pub seed: u64,
    /// Worst `|p(join of family) - sum of p(member)|`.
    pub worst_additivity_deviation: f64,
    pub empty_event_measure: f64,
    pub full_space_measure: f64,
}

/// Additivity threshold for orthogonal families.
pub const ADDITIVITY_TOL: f64 = 1e-8;

/// Checks `p({0}) = 0`, `p(H) <= 1` and finite additivity over random
/// mutually orthogonal families for `p = G(f)`.
pub fn check_subprobability_axioms<T: Real>(
    f: &PartialDensityOperator<T>,
    trials: usize,
    seed: u64,
    tol: &Tolerances<T>,
) -> Result<AxiomReport> {
    let n = f.dim();
    let mut rng = random::rng(seed);
    let empty = gleason_measure(f, &ClosedSubspace::zero(n), tol)?;
    let full = gleason_measure(f, &ClosedSubspace::full(n), tol)?;
    let mut worst = T::zero();
    for _ in 0..trials.max(1) {
        worst = worst.max(additivity_deviation(f, &mut rng, tol)?);
    }
    let worst = worst.as_f64();
    Ok(AxiomReport {
        passed: empty == T::zero() && full <= T::one() + tol.psd && worst <= ADDITIVITY_TOL,
        trials: trials.max(1),
        seed,
        worst_additivity_deviation: worst,
        empty_event_measure: empty.as_f64(),
        full_space_measure: full.as_f64(),
    })
}

/// One additivity trial over a random orthogonal family.
pub fn additivity_deviation<T: Real>(
    f: &PartialDensityOperator<T>,
    rng: &mut impl Rng,
    tol: &Tolerances<T>,
) -> Result<T> {
    let n = f.dim();
    let family = random::orthogonal_family::<T>(rng, n);
    let mut joined = ClosedSubspace::zero(n);
    let mut sum = T::zero();
    for member in &family {
        joined = joined.join(member, tol)?;
        sum += gleason_measure(f, member, tol)?;
    }
    Ok((gleason_measure(f, &joined, tol)? - sum).abs())
}

/// Decision of `G(f) <= G(g)` in the pointwise measure order.
#[derive(Clone, Debug)]
pub struct StateOrder<T> {
    pub leq: bool,
    /// Rank-one event `K` with `G(f)(K) > G(g)(K)` when `leq` is false.
    pub witness: Option<ClosedSubspace<T>>,
}

/// Decides `G(f) <= G(g)` through the Löwner test `g - f >= 0`; a failing
/// test yields the line spanned by a negative direction of `g - f` as the
/// separating event.
pub fn state_leq<T: Real>(
    f: &PartialDensityOperator<T>,
    g: &PartialDensityOperator<T>,
    tol: &Tolerances<T>,
) -> Result<StateOrder<T>> {
    let check = f.loewner_leq(g, tol)?;
    let witness = check
        .witness
        .map(|x| ClosedSubspace::from_orthonormal(f.dim(), vec![x]));
    Ok(StateOrder {
        leq: check.leq,
        witness,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::basis_vector;
    use crate::scalar::cplx;

    type K = ClosedSubspace<f64>;
    type Pdo = PartialDensityOperator<f64>;

    fn tol() -> Tolerances<f64> {
        Tolerances::default()
    }

    fn e(n: usize, i: usize) -> Vec<Cplx<f64>> {
        basis_vector(n, i)
    }

    fn line(n: usize, i: usize) -> K {
        K::from_orthonormal(n, vec![e(n, i)])
    }

    fn diag(d: &[f64]) -> Pdo {
        Pdo::new(Matrix::from_diag(d), &tol()).unwrap()
    }

    #[test]
    fn from_vectors_cases() {
        let k = K::from_vectors(3, &[e(3, 0)], &tol()).unwrap();
        assert_eq!(k.projection(), &Matrix::from_diag(&[1.0, 0.0, 0.0]));

        let empty = K::from_vectors(3, &[], &tol()).unwrap();
        assert_eq!(empty.rank(), 0);
        assert_eq!(empty.projection(), &Matrix::zeros(3));

        let s = std::f64::consts::FRAC_1_SQRT_2;
        let k = K::from_vectors(2, &[e(2, 0), vec![cplx(s, 0.0), cplx(s, 0.0)]], &tol()).unwrap();
        assert!(k.projection().distance(&Matrix::identity(2)).unwrap() < 1e-12);

        assert!(K::from_vectors(3, &[e(2, 0)], &tol()).is_err());
    }

    #[test]
    fn join_cases() {
        let t = tol();
        let k = line(3, 1);
        assert!(k.join(&K::zero(3), &t).unwrap().distance(&k).unwrap() < 1e-14);
        let j = line(4, 0).join(&line(4, 1), &t).unwrap();
        assert_eq!(j.projection(), &Matrix::from_diag(&[1.0, 1.0, 0.0, 0.0]));
        assert!(line(3, 0).join(&line(4, 0), &t).is_err());

        let mut rng = random::rng(21);
        for _ in 0..30 {
            let a = random::any_subspace::<f64>(&mut rng, 4);
            let b = random::any_subspace::<f64>(&mut rng, 4);
            let j = a.join(&b, &t).unwrap();
            let all: Vec<_> = a.basis().iter().chain(b.basis()).cloned().collect();
            assert_eq!(j.rank(), orthonormalize(&all, 1e-8).len());
            assert!(a.is_subspace_of(&j, &t).unwrap());
            assert!(b.is_subspace_of(&j, &t).unwrap());
        }
    }

    #[test]
    fn meet_cases() {
        let t = tol();
        let k = line(3, 2);
        assert!(k.meet(&K::full(3), &t).unwrap().distance(&k).unwrap() < 1e-12);
        assert_eq!(line(3, 0).meet(&line(3, 1), &t).unwrap().rank(), 0);

        let mut rng = random::rng(22);
        for _ in 0..30 {
            let a = random::subspace::<f64>(&mut rng, 3, 2);
            let b = random::subspace::<f64>(&mut rng, 3, 2);
            let m = a.meet(&b, &t).unwrap();
            assert_eq!(m.rank(), 1);
            let x = &m.basis()[0];
            assert!(crate::linalg::norm(&a.projection().mat_vec(x).iter().zip(x).map(|(p, q)| p - q).collect::<Vec<_>>()) < 1e-8);
            assert!(crate::linalg::norm(&b.projection().mat_vec(x).iter().zip(x).map(|(p, q)| p - q).collect::<Vec<_>>()) < 1e-8);
        }
    }

    #[test]
    fn orthocomplement_cases() {
        assert_eq!(K::zero(3).orthocomplement().rank(), 3);
        let c = K::from_vectors(2, &[e(2, 0)], &tol()).unwrap().orthocomplement();
        assert!(c.projection().distance(&Matrix::from_diag(&[0.0, 1.0])).unwrap() < 1e-14);

        let mut rng = random::rng(23);
        for _ in 0..20 {
            let k = random::any_subspace::<f64>(&mut rng, 5);
            let back = k.orthocomplement().orthocomplement();
            assert!(back.distance(&k).unwrap() < 1e-12);
        }
    }

    #[test]
    fn orthogonality_cases() {
        let t = tol();
        assert!(line(2, 0).is_orthogonal_to(&line(2, 1), &t).unwrap());
        let mut rng = random::rng(24);
        let k = random::any_subspace::<f64>(&mut rng, 4);
        assert!(k.is_orthogonal_to(&k.orthocomplement(), &t).unwrap());
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let diagonal = K::from_orthonormal(2, vec![vec![cplx(s, 0.0), cplx(s, 0.0)]]);
        assert!(!line(2, 0).is_orthogonal_to(&diagonal, &t).unwrap());
        let prod = line(2, 0).projection() * diagonal.projection();
        assert!((prod[(0, 0)].re - 0.5).abs() < 1e-15);
    }

    #[test]
    fn lattice_laws() {
        let t = tol();
        let mut rng = random::rng(25);
        for _ in 0..20 {
            let a = random::any_subspace::<f64>(&mut rng, 4);
            let b = random::any_subspace::<f64>(&mut rng, 4);
            assert!(a.join(&b, &t).unwrap().distance(&b.join(&a, &t).unwrap()).unwrap() < 1e-9);
            assert!(a.meet(&b, &t).unwrap().distance(&b.meet(&a, &t).unwrap()).unwrap() < 1e-9);
            assert!(a.join(&a, &t).unwrap().distance(&a).unwrap() < 1e-9);
            assert!(a.meet(&a, &t).unwrap().distance(&a).unwrap() < 1e-9);
            let lhs = a.join(&b, &t).unwrap().orthocomplement();
            let rhs = a.orthocomplement().meet(&b.orthocomplement(), &t).unwrap();
            assert!(lhs.distance(&rhs).unwrap() < 1e-9);
        }
    }

    #[test]
    fn gleason_measure_cases() {
        let t = tol();
        let mut rng = random::rng(26);
        let f = random::partial_density::<f64>(&mut rng, 3);
        assert_eq!(gleason_measure(&f, &K::zero(3), &t).unwrap(), 0.0);

        let state = random::partial_density_with_trace::<f64>(&mut rng, 3, 1.0);
        assert!((gleason_measure(&state, &K::full(3), &t).unwrap() - 1.0).abs() < 1e-12);

        let f = diag(&[0.5, 0.25]);
        assert_eq!(gleason_measure(&f, &line(2, 0), &t).unwrap(), 0.5);

        assert!(gleason_measure(&f, &K::full(3), &t).is_err());
    }

    #[test]
    fn axioms_hold() {
        let t = tol();
        let r = check_subprobability_axioms(&Pdo::zero(3), 10, 1, &t).unwrap();
        assert!(r.passed);
        assert_eq!(r.full_space_measure, 0.0);

        let mixed = Pdo::new(Matrix::identity(4).scale(0.25), &t).unwrap();
        let r = check_subprobability_axioms(&mixed, 10, 2, &t).unwrap();
        assert!(r.passed);
        assert!((r.full_space_measure - 1.0).abs() < 1e-15);

        let mut rng = random::rng(27);
        let f = random::partial_density::<f64>(&mut rng, 4);
        let r = check_subprobability_axioms(&f, 100, 3, &t).unwrap();
        assert!(r.passed, "{r:?}");
        assert!(r.worst_additivity_deviation < 1e-8);
    }

    #[test]
    fn state_leq_cases() {
        let t = tol();
        let f = diag(&[0.3, 0.3]);
        assert!(state_leq(&f, &f, &t).unwrap().leq);
        assert!(state_leq(&f, &diag(&[0.5, 0.4]), &t).unwrap().leq);

        let f = diag(&[0.5, 0.0]);
        let g = diag(&[0.0, 0.5]);
        let order = state_leq(&f, &g, &t).unwrap();
        assert!(!order.leq);
        let k = order.witness.unwrap();
        assert!(k.distance(&line(2, 0)).unwrap() < 1e-12);
        assert!((gleason_measure(&f, &k, &t).unwrap() - 0.5).abs() < 1e-12);
        assert!(gleason_measure(&g, &k, &t).unwrap().abs() < 1e-12);
    }

    #[test]
    fn view_total_and_deficit() {
        let t = tol();
        let view = PartialStateView::new(diag(&[0.5, 0.25]));
        assert_eq!(view.total(&t).unwrap(), 0.75);
        assert_eq!(view.deficit(&t).unwrap(), 0.25);
        assert_eq!(view.value(&line(2, 1), &t).unwrap(), 0.25);
    }
}
