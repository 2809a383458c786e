//! Bounded observables as Hermitian operators with their projection-valued
//! measures, and interval-valued expectations with respect to partial
//! density operators.
//!
//! For an observable `A` with spectrum bounds `m`, `M` and a partial density
//! operator `f`, the expectation is the interval
//!
//! ```text
//! E(A | f) = tr(A f) + (1 - tr f) [m, M]
//! ```
//!
//! The missing mass `1 - tr f` may land anywhere on the spectrum, so the
//! interval holds every expectation of a total state above `f`.

use serde::Serialize;

use crate::density::PartialDensityOperator;
use crate::error::{Error, Result};
use crate::interval::CompactInterval;
use crate::linalg::{hermitian_eig, Matrix};
use crate::logic::{gleason_measure, ClosedSubspace};
use crate::scalar::Real;
use crate::tolerance::Tolerances;

/// Largest tolerated gap between `sum_j lambda_j w_j` and `tr(A f)`.
pub const CROSS_CHECK_TOL: f64 = 1e-7;

/// One spectral value with its eigenprojection.
#[derive(Clone, Debug)]
pub struct Eigenspace<T> {
    pub value: T,
    pub subspace: ClosedSubspace<T>,
}

/// Self-adjoint operator with its grouped spectral decomposition, computed
/// once at construction.
#[derive(Clone, Debug)]
pub struct BoundedObservable<T> {
    operator: Matrix<T>,
    spectrum: Vec<Eigenspace<T>>,
}

impl<T: Real> BoundedObservable<T> {
    /// Diagonalizes `a`; eigenvalues closer than `tol.eig_group` to their
    /// neighbour share one eigenprojection.
    pub fn from_hermitian(a: Matrix<T>, tol: &Tolerances<T>) -> Result<Self> {
        let spectral = hermitian_eig(&a, tol)?;
        let n = a.dim();
        let mut spectrum = Vec::new();
        let mut j = 0;
        while j < n {
            let mut end = j + 1;
            while end < n && spectral.eigenvalues[end] - spectral.eigenvalues[end - 1] <= tol.eig_group {
                end += 1;
            }
            let group = &spectral.eigenvalues[j..end];
            let value = group.iter().copied().sum::<T>() / T::from_usize(group.len()).unwrap();
            let basis = (j..end).map(|k| spectral.eigenvector(k)).collect();
            spectrum.push(Eigenspace {
                value,
                subspace: ClosedSubspace::from_orthonormal(n, basis),
            });
            j = end;
        }
        Ok(Self { operator: a, spectrum })
    }

    pub fn dim(&self) -> usize {
        self.operator.dim()
    }

    pub fn operator(&self) -> &Matrix<T> {
        &self.operator
    }

    /// Distinct spectral values in ascending order with eigenprojections.
    pub fn spectrum(&self) -> &[Eigenspace<T>] {
        &self.spectrum
    }

    /// `(inf Spec, sup Spec)`.
    pub fn spectrum_bounds(&self) -> (T, T) {
        let first = self.spectrum.first().map_or(T::zero(), |e| e.value);
        let last = self.spectrum.last().map_or(T::zero(), |e| e.value);
        (first, last)
    }

    /// The event "the observable takes a value in `u`".
    pub fn pvm(&self, u: &BorelSet<T>) -> ClosedSubspace<T> {
        let basis = self
            .spectrum
            .iter()
            .filter(|e| u.contains(e.value))
            .flat_map(|e| e.subspace.basis().iter().cloned())
            .collect();
        ClosedSubspace::from_orthonormal(self.dim(), basis)
    }

    /// `Q(U) = tr(P_{r(U)} f)` restricted to the spectrum.
    pub fn distribution(&self, f: &PartialDensityOperator<T>, tol: &Tolerances<T>) -> Result<SubDistribution<T>> {
        self.check_dim(f)?;
        let support = self
            .spectrum
            .iter()
            .map(|e| Ok((e.value, gleason_measure(f, &e.subspace, tol)?)))
            .collect::<Result<Vec<_>>>()?;
        let total = support.iter().map(|&(_, w)| w).sum();
        Ok(SubDistribution { support, total })
    }

    /// `E_0 = sum_j lambda_j tr(P_j f)`, cross-checked against `tr(A f)`.
    pub fn e0(&self, f: &PartialDensityOperator<T>, tol: &Tolerances<T>) -> Result<T> {
        let spectral = self.distribution(f, tol)?.first_moment();
        let direct = self.operator.trace_product(f.matrix())?.re;
        let deviation = (spectral - direct).abs();
        if deviation > T::lit(CROSS_CHECK_TOL).max(T::tol_floor()) {
            return Err(Error::CrossCheck {
                deviation: deviation.as_f64(),
            });
        }
        Ok(spectral)
    }

    /// `E_0 + (1 - tr f) [m, M]`.
    pub fn expected_interval(&self, f: &PartialDensityOperator<T>, tol: &Tolerances<T>) -> Result<CompactInterval<T>> {
        Ok(self.expectation(f, tol)?.interval)
    }

    /// The expectation interval with its ingredients.
    pub fn expectation(&self, f: &PartialDensityOperator<T>, tol: &Tolerances<T>) -> Result<Expectation<T>> {
        let e0 = self.e0(f, tol)?;
        let missing = f.nontermination_probability();
        let (m, big_m) = self.spectrum_bounds();
        let interval = CompactInterval::new(m, big_m)?.scale(missing).translate(e0);
        Ok(Expectation {
            interval,
            e0,
            missing,
            m,
            big_m,
        })
    }

    /// `E(A^2 | f) = tr(A^2 f) + (1 - tr f) [k^2, K^2]` with `k`, `K` the
    /// smallest and largest `|lambda|`.
    pub fn square_interval(&self, f: &PartialDensityOperator<T>, tol: &Tolerances<T>) -> Result<CompactInterval<T>> {
        let dist = self.distribution(f, tol)?;
        let second_moment: T = dist.support.iter().map(|&(l, w)| l * l * w).sum();
        let abs = self.spectrum.iter().map(|e| e.value.abs());
        let k = abs.clone().fold(T::infinity(), T::min);
        let big_k = abs.fold(T::zero(), T::max);
        let missing = f.nontermination_probability();
        Ok(CompactInterval::new(k * k, big_k * big_k)?
            .scale(missing)
            .translate(second_moment))
    }

    fn check_dim(&self, f: &PartialDensityOperator<T>) -> Result<()> {
        if self.dim() != f.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: f.dim(),
            });
        }
        Ok(())
    }
}

/// Interval expectation `interval = e0 + missing * [m, M]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Expectation<T> {
    pub interval: CompactInterval<T>,
    pub e0: T,
    pub missing: T,
    pub m: T,
    pub big_m: T,
}

/// JSON form of an [`Expectation`].
#[derive(Clone, Debug, PartialEq, Serialize, serde::Deserialize)]
pub struct ExpectationJson {
    pub lo: f64,
    pub hi: f64,
    pub e0: f64,
    pub missing: f64,
    pub m: f64,
    #[serde(rename = "M")]
    pub big_m: f64,
}

impl<T: Real> From<&Expectation<T>> for ExpectationJson {
    fn from(e: &Expectation<T>) -> Self {
        Self {
            lo: e.interval.lo().as_f64(),
            hi: e.interval.hi().as_f64(),
            e0: e.e0.as_f64(),
            missing: e.missing.as_f64(),
            m: e.m.as_f64(),
            big_m: e.big_m.as_f64(),
        }
    }
}

/// Finitely supported sub-probability distribution on the reals.
#[derive(Clone, Debug, PartialEq)]
pub struct SubDistribution<T> {
    pub support: Vec<(T, T)>,
    pub total: T,
}

impl<T: Real> SubDistribution<T> {
    /// `Q(U)`.
    pub fn measure(&self, u: &BorelSet<T>) -> T {
        self.support.iter().filter(|(l, _)| u.contains(*l)).map(|&(_, w)| w).sum()
    }

    /// `sum_j lambda_j w_j`.
    pub fn first_moment(&self) -> T {
        self.support.iter().map(|&(l, w)| l * w).sum()
    }
}

/// One piece of a [`BorelSet`]; endpoints may be infinite.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Segment<T> {
    pub lo: T,
    pub hi: T,
    pub lo_closed: bool,
    pub hi_closed: bool,
}

impl<T: Real> Segment<T> {
    pub fn contains(&self, x: T) -> bool {
        let above = if self.lo_closed { x >= self.lo } else { x > self.lo };
        let below = if self.hi_closed { x <= self.hi } else { x < self.hi };
        above && below
    }

    fn is_empty(&self) -> bool {
        self.lo > self.hi || (self.lo == self.hi && !(self.lo_closed && self.hi_closed))
    }

    fn intersect(&self, other: &Self) -> Self {
        let (lo, lo_closed) = if self.lo > other.lo {
            (self.lo, self.lo_closed)
        } else if other.lo > self.lo {
            (other.lo, other.lo_closed)
        } else {
            (self.lo, self.lo_closed && other.lo_closed)
        };
        let (hi, hi_closed) = if self.hi < other.hi {
            (self.hi, self.hi_closed)
        } else if other.hi < self.hi {
            (other.hi, other.hi_closed)
        } else {
            (self.hi, self.hi_closed && other.hi_closed)
        };
        Self {
            lo,
            hi,
            lo_closed,
            hi_closed,
        }
    }
}

/// Finite union of disjoint intervals, sorted; stands in for a Borel set
/// since a finite-dimensional observable only sees which eigenvalues a set
/// contains.
#[derive(Clone, Debug, PartialEq)]
pub struct BorelSet<T> {
    segments: Vec<Segment<T>>,
}

impl<T: Real> BorelSet<T> {
    pub fn empty() -> Self {
        Self { segments: Vec::new() }
    }

    pub fn real_line() -> Self {
        Self::from_segments(vec![Segment {
            lo: T::neg_infinity(),
            hi: T::infinity(),
            lo_closed: false,
            hi_closed: false,
        }])
    }

    /// `[lo, hi]`.
    pub fn closed(lo: T, hi: T) -> Self {
        Self::from_segments(vec![Segment {
            lo,
            hi,
            lo_closed: true,
            hi_closed: true,
        }])
    }

    /// `(lo, hi)`.
    pub fn open(lo: T, hi: T) -> Self {
        Self::from_segments(vec![Segment {
            lo,
            hi,
            lo_closed: false,
            hi_closed: false,
        }])
    }

    /// Normalizes arbitrary segments into sorted disjoint form, merging
    /// overlapping or touching pieces and dropping empty ones.
    pub fn from_segments(mut segments: Vec<Segment<T>>) -> Self {
        segments.retain(|s| !s.is_empty() && !s.lo.is_nan() && !s.hi.is_nan());
        segments.sort_by(|a, b| {
            a.lo.partial_cmp(&b.lo)
                .expect("no NaN endpoints")
                .then(b.lo_closed.cmp(&a.lo_closed))
        });
        let mut merged: Vec<Segment<T>> = Vec::new();
        for s in segments {
            if let Some(last) = merged.last_mut() {
                let overlaps = s.lo < last.hi || (s.lo == last.hi && (last.hi_closed || s.lo_closed));
                if overlaps {
                    if s.hi > last.hi {
                        last.hi = s.hi;
                        last.hi_closed = s.hi_closed;
                    } else if s.hi == last.hi {
                        last.hi_closed |= s.hi_closed;
                    }
                    continue;
                }
            }
            merged.push(s);
        }
        Self { segments: merged }
    }

    pub fn segments(&self) -> &[Segment<T>] {
        &self.segments
    }

    pub fn is_empty(&self) -> bool {
        self.segments.is_empty()
    }

    pub fn contains(&self, x: T) -> bool {
        self.segments.iter().any(|s| s.contains(x))
    }

    pub fn union(&self, other: &Self) -> Self {
        Self::from_segments(self.segments.iter().chain(&other.segments).copied().collect())
    }

    pub fn intersection(&self, other: &Self) -> Self {
        let mut pieces = Vec::new();
        for a in &self.segments {
            for b in &other.segments {
                pieces.push(a.intersect(b));
            }
        }
        Self::from_segments(pieces)
    }

    pub fn is_disjoint(&self, other: &Self) -> bool {
        self.intersection(other).is_empty()
    }
}

pub fn observable_from_hermitian<T: Real>(a: Matrix<T>, tol: &Tolerances<T>) -> Result<BoundedObservable<T>> {
    BoundedObservable::from_hermitian(a, tol)
}

pub fn pvm_map<T: Real>(r: &BoundedObservable<T>, u: &BorelSet<T>) -> ClosedSubspace<T> {
    r.pvm(u)
}

pub fn spectrum_bounds<T: Real>(r: &BoundedObservable<T>) -> (T, T) {
    r.spectrum_bounds()
}

pub fn distribution<T: Real>(
    r: &BoundedObservable<T>,
    f: &PartialDensityOperator<T>,
    tol: &Tolerances<T>,
) -> Result<SubDistribution<T>> {
    r.distribution(f, tol)
}

pub fn e0<T: Real>(r: &BoundedObservable<T>, f: &PartialDensityOperator<T>, tol: &Tolerances<T>) -> Result<T> {
    r.e0(f, tol)
}

pub fn expected_interval<T: Real>(
    r: &BoundedObservable<T>,
    f: &PartialDensityOperator<T>,
    tol: &Tolerances<T>,
) -> Result<CompactInterval<T>> {
    r.expected_interval(f, tol)
}

/// [`expected_interval`] for an operator given as a matrix.
pub fn expected_interval_op<T: Real>(
    a: &Matrix<T>,
    f: &PartialDensityOperator<T>,
    tol: &Tolerances<T>,
) -> Result<CompactInterval<T>> {
    BoundedObservable::from_hermitian(a.clone(), tol)?.expected_interval(f, tol)
}

pub fn observable_square_interval<T: Real>(
    a: &Matrix<T>,
    f: &PartialDensityOperator<T>,
    tol: &Tolerances<T>,
) -> Result<CompactInterval<T>> {
    BoundedObservable::from_hermitian(a.clone(), tol)?.square_interval(f, tol)
}

/// `||ab - ba||_max <= tol`.
pub fn commutes<T: Real>(a: &Matrix<T>, b: &Matrix<T>, tol: T) -> Result<bool> {
    let ab = a.mat_mul(b)?;
    let ba = b.mat_mul(a)?;
    Ok(ab.distance(&ba)? <= tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::basis_vector;
    use crate::random;
    use crate::scalar::cplx;

    type Obs = BoundedObservable<f64>;
    type Pdo = PartialDensityOperator<f64>;

    fn tol() -> Tolerances<f64> {
        Tolerances::default()
    }

    fn pauli_z() -> Matrix<f64> {
        Matrix::from_diag(&[1.0, -1.0])
    }

    fn pauli_x() -> Matrix<f64> {
        Matrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]).unwrap()
    }

    fn diag(d: &[f64]) -> Pdo {
        Pdo::new(Matrix::from_diag(d), &tol()).unwrap()
    }

    fn line(n: usize, i: usize) -> ClosedSubspace<f64> {
        ClosedSubspace::from_orthonormal(n, vec![basis_vector(n, i)])
    }

    #[test]
    fn pauli_z_spectrum() {
        let z = Obs::from_hermitian(pauli_z(), &tol()).unwrap();
        let s = z.spectrum();
        assert_eq!(s.len(), 2);
        assert_eq!(s[0].value, -1.0);
        assert!(s[0].subspace.distance(&line(2, 1)).unwrap() < 1e-14);
        assert_eq!(s[1].value, 1.0);
        assert!(s[1].subspace.distance(&line(2, 0)).unwrap() < 1e-14);
    }

    #[test]
    fn identity_single_eigenspace() {
        let id = Obs::from_hermitian(Matrix::identity(3), &tol()).unwrap();
        assert_eq!(id.spectrum().len(), 1);
        assert_eq!(id.spectrum()[0].value, 1.0);
        assert_eq!(id.spectrum()[0].subspace.rank(), 3);
    }

    #[test]
    fn random_spectral_invariants() {
        let t = tol();
        let mut rng = random::rng(30);
        for _ in 0..10 {
            let a = random::random_hermitian::<f64>(&mut rng, 6);
            let obs = Obs::from_hermitian(a.clone(), &t).unwrap();
            let mut resolution = Matrix::zeros(6);
            let mut recon = Matrix::zeros(6);
            for e in obs.spectrum() {
                resolution = &resolution + e.subspace.projection();
                recon = &recon + &e.subspace.projection().scale(e.value);
            }
            assert!(resolution.distance(&Matrix::identity(6)).unwrap() < 1e-9);
            assert!(recon.distance(&a).unwrap() < 1e-9);
            for (i, a) in obs.spectrum().iter().enumerate() {
                for b in &obs.spectrum()[i + 1..] {
                    assert!(a.subspace.is_orthogonal_to(&b.subspace, &t).unwrap());
                }
            }
        }
    }

    #[test]
    fn rejects_non_hermitian() {
        let mut a = Matrix::<f64>::zeros(2);
        a[(0, 1)] = cplx(1.0, 0.0);
        assert!(Obs::from_hermitian(a.clone(), &tol()).is_err());
        assert!(expected_interval_op(&a, &Pdo::zero(2), &tol()).is_err());
    }

    #[test]
    fn pvm_cases() {
        let z = Obs::from_hermitian(pauli_z(), &tol()).unwrap();
        assert_eq!(z.pvm(&BorelSet::empty()).rank(), 0);
        assert_eq!(z.pvm(&BorelSet::real_line()).rank(), 2);
        assert_eq!(z.pvm(&BorelSet::closed(-1e300, 1e300)).rank(), 2);
        let up = z.pvm(&BorelSet::closed(0.0, 2.0));
        assert!(up.distance(&line(2, 0)).unwrap() < 1e-14);
        assert_eq!(z.pvm(&BorelSet::open(-1.0, 1.0)).rank(), 0);
    }

    #[test]
    fn pvm_axioms_on_random_observables() {
        let t = tol();
        let mut rng = random::rng(31);
        for _ in 0..10 {
            let a = random::random_hermitian::<f64>(&mut rng, 5);
            let obs = Obs::from_hermitian(a, &t).unwrap();
            let (m, big_m) = obs.spectrum_bounds();
            let bound = m.abs().max(big_m.abs());
            assert_eq!(obs.pvm(&BorelSet::closed(-bound, bound)).rank(), 5);
            let u = BorelSet::closed(m - 1.0, (m + big_m) / 2.0);
            let v = BorelSet::open((m + big_m) / 2.0, big_m + 1.0);
            assert!(u.is_disjoint(&v));
            let (pu, pv) = (obs.pvm(&u), obs.pvm(&v));
            assert!(pu.is_orthogonal_to(&pv, &t).unwrap());
            let joined = pu.join(&pv, &t).unwrap();
            assert!(obs.pvm(&u.union(&v)).distance(&joined).unwrap() < 1e-9);
        }
    }

    #[test]
    fn borel_set_normalization() {
        let s = BorelSet::closed(0.0, 1.0).union(&BorelSet::open(1.0, 2.0));
        assert_eq!(s.segments().len(), 1);
        assert!(s.contains(1.0) && s.contains(1.5) && !s.contains(2.0));
        let gap = BorelSet::open(0.0, 1.0).union(&BorelSet::open(1.0, 2.0));
        assert_eq!(gap.segments().len(), 2);
        assert!(!gap.contains(1.0));
        assert!(BorelSet::closed(0.0, 1.0).intersection(&BorelSet::closed(1.0, 2.0)).contains(1.0));
        assert!(BorelSet::open(0.0, 1.0).is_disjoint(&BorelSet::closed(1.0, 2.0)));
    }

    #[test]
    fn spectrum_bound_cases() {
        let t = tol();
        assert_eq!(Obs::from_hermitian(pauli_z(), &t).unwrap().spectrum_bounds(), (-1.0, 1.0));
        assert_eq!(Obs::from_hermitian(Matrix::identity(2), &t).unwrap().spectrum_bounds(), (1.0, 1.0));
        let d = Obs::from_hermitian(Matrix::from_diag(&[2.0, 5.0, 3.0]), &t).unwrap();
        assert_eq!(d.spectrum_bounds(), (2.0, 5.0));
    }

    #[test]
    fn distribution_cases() {
        let t = tol();
        let z = Obs::from_hermitian(pauli_z(), &t).unwrap();
        let d = z.distribution(&Pdo::zero(2), &t).unwrap();
        assert!(d.support.iter().all(|&(_, w)| w == 0.0));
        assert_eq!(d.total, 0.0);

        let d = z.distribution(&diag(&[0.5, 0.25]), &t).unwrap();
        assert_eq!(d.support, vec![(-1.0, 0.25), (1.0, 0.5)]);
        assert_eq!(d.total, 0.75);
        assert_eq!(d.measure(&BorelSet::closed(0.0, 2.0)), 0.5);

        let mut rng = random::rng(32);
        let state = random::partial_density_with_trace::<f64>(&mut rng, 4, 1.0);
        let obs = Obs::from_hermitian(random::random_hermitian(&mut rng, 4), &t).unwrap();
        assert!((obs.distribution(&state, &t).unwrap().total - 1.0).abs() < 1e-12);

        assert!(z.distribution(&Pdo::zero(3), &t).is_err());
    }

    #[test]
    fn e0_cases() {
        let t = tol();
        let z = Obs::from_hermitian(pauli_z(), &t).unwrap();
        assert_eq!(z.e0(&Pdo::zero(2), &t).unwrap(), 0.0);
        assert_eq!(z.e0(&diag(&[0.5, 0.25]), &t).unwrap(), 0.25);
        let mut rng = random::rng(33);
        let f = random::partial_density::<f64>(&mut rng, 3);
        let id = Obs::from_hermitian(Matrix::identity(3), &t).unwrap();
        assert!((id.e0(&f, &t).unwrap() - f.trace()).abs() < 1e-12);
    }

    #[test]
    fn expected_interval_cases() {
        let t = tol();
        let z = Obs::from_hermitian(pauli_z(), &t).unwrap();
        let zero = z.expected_interval(&Pdo::zero(2), &t).unwrap();
        assert_eq!((zero.lo(), zero.hi()), (-1.0, 1.0));

        let state = diag(&[0.75, 0.25]);
        let e = z.expected_interval(&state, &t).unwrap();
        assert_eq!((e.lo(), e.hi()), (0.5, 0.5));

        let e = z.expected_interval(&diag(&[0.5, 0.25]), &t).unwrap();
        assert_eq!((e.lo(), e.hi()), (0.0, 0.5));

        let ex = z.expectation(&diag(&[0.5, 0.25]), &t).unwrap();
        let json = ExpectationJson::from(&ex);
        assert_eq!(
            serde_json::to_string(&json).unwrap(),
            r#"{"lo":0.0,"hi":0.5,"e0":0.25,"missing":0.25,"m":-1.0,"M":1.0}"#
        );
    }

    #[test]
    fn scalar_observable_degenerates() {
        let t = tol();
        let c = Obs::from_hermitian(Matrix::identity(2).scale(3.0), &t).unwrap();
        let e = c.expected_interval(&diag(&[0.2, 0.3]), &t).unwrap();
        assert!((e.lo() - 3.0).abs() < 1e-12 && (e.hi() - 3.0).abs() < 1e-12);
    }

    #[test]
    fn square_interval_cases() {
        let t = tol();
        let mut rng = random::rng(34);
        let f = random::partial_density::<f64>(&mut rng, 2);
        let sq = observable_square_interval(&pauli_z(), &f, &t).unwrap();
        assert!((sq.lo() - 1.0).abs() < 1e-12 && (sq.hi() - 1.0).abs() < 1e-12);

        let sq = observable_square_interval(&Matrix::from_diag(&[0.0, 2.0]), &Pdo::zero(2), &t).unwrap();
        assert_eq!((sq.lo(), sq.hi()), (0.0, 4.0));

        for _ in 0..20 {
            let a = random::random_hermitian::<f64>(&mut rng, 4);
            let f = random::partial_density::<f64>(&mut rng, 4);
            let lhs = observable_square_interval(&a, &f, &t).unwrap();
            let rhs = expected_interval_op(&(&a * &a), &f, &t).unwrap();
            assert!(lhs.distance(&rhs) < 1e-9);
        }
    }

    #[test]
    fn commutation_cases() {
        let t = 1e-12;
        assert!(commutes(&Matrix::from_diag(&[1.0, 2.0]), &Matrix::from_diag(&[3.0, -1.0]), t).unwrap());
        assert!(!commutes(&pauli_x(), &pauli_z(), t).unwrap());
        let mut rng = random::rng(35);
        let a = random::random_hermitian::<f64>(&mut rng, 4);
        assert!(commutes(&a, &(&a * &a), 1e-10).unwrap());
    }

    #[test]
    fn grouping_granularity_does_not_change_expectations() {
        let mut rng = random::rng(36);
        let a = random::with_spectrum::<f64>(&mut rng, &[1.0, 1.0, -0.5, 2.0, 2.0]);
        let f = random::partial_density::<f64>(&mut rng, 5);
        let coarse = tol();
        let fine = Tolerances {
            eig_group: 1e-300,
            ..tol()
        };
        let c = Obs::from_hermitian(a.clone(), &coarse).unwrap();
        let r = Obs::from_hermitian(a, &fine).unwrap();
        assert_eq!(c.spectrum().len(), 3);
        assert!(r.spectrum().len() >= 3);
        assert!((c.e0(&f, &coarse).unwrap() - r.e0(&f, &fine).unwrap()).abs() < 1e-12);
        let (ic, ir) = (c.expected_interval(&f, &coarse).unwrap(), r.expected_interval(&f, &fine).unwrap());
        assert!(ic.distance(&ir) < 1e-12);
    }

    #[test]
    fn scaling_law_holds_for_negative_factors() {
        let t = tol();
        let mut rng = random::rng(37);
        for _ in 0..20 {
            let a = random::random_hermitian::<f64>(&mut rng, 3);
            let f = random::partial_density::<f64>(&mut rng, 3);
            let k = -2.5;
            let lhs = expected_interval_op(&a.scale(k), &f, &t).unwrap();
            let rhs = expected_interval_op(&a, &f, &t).unwrap().scale(k);
            assert!(lhs.distance(&rhs) < 1e-9);
        }
    }

    #[test]
    fn commuting_sum_is_contained_in_sum_of_intervals() {
        // Spec(A + B) sits inside Spec(A) + Spec(B) but is usually smaller:
        // A = diag(0, 1), B = diag(1, 0) gives A + B = I.
        let t = tol();
        let a = Matrix::from_diag(&[0.0, 1.0]);
        let b = Matrix::from_diag(&[1.0, 0.0]);
        let f = Pdo::zero(2);
        let lhs = expected_interval_op(&(&a + &b), &f, &t).unwrap();
        let rhs = expected_interval_op(&a, &f, &t)
            .unwrap()
            .add(&expected_interval_op(&b, &f, &t).unwrap());
        assert_eq!((lhs.lo(), lhs.hi()), (1.0, 1.0));
        assert_eq!((rhs.lo(), rhs.hi()), (0.0, 2.0));
        assert!(rhs.below(&lhs));
    }
}
