//! Partial density operators: positive operators of trace at most one,
//! ordered by the Löwner order, with suprema of increasing chains.

use num_rational::Ratio;

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eig, is_positive_semidefinite, Matrix};
use crate::scalar::{cplx, Cplx, Real};
use crate::tolerance::Tolerances;

/// Hermitian positive semidefinite matrix with `0 <= tr <= 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct PartialDensityOperator<T> {
    matrix: Matrix<T>,
}

impl<T: Real> PartialDensityOperator<T> {
    /// Validates `m`; rejects rather than repairs small negative eigenvalues.
    pub fn new(m: Matrix<T>, tol: &Tolerances<T>) -> Result<Self> {
        validate(&m, tol)?;
        Ok(Self { matrix: m })
    }

    /// Like [`new`](Self::new), but eigenvalues in `[-psd_tol, 0)` are
    /// clamped to zero by projecting onto the positive cone.
    pub fn repaired(m: Matrix<T>, tol: &Tolerances<T>) -> Result<Self> {
        let spectral = hermitian_eig(&m, tol)?;
        if spectral.min_eigenvalue() >= T::zero() {
            return Self::new(m, tol);
        }
        if spectral.min_eigenvalue() < -tol.psd {
            return Err(not_positive(spectral.min_eigenvalue(), &spectral.eigenvector(0)));
        }
        let clamped = crate::linalg::SpectralDecomposition {
            eigenvalues: spectral.eigenvalues.iter().map(|&l| l.max(T::zero())).collect(),
            eigenvectors: spectral.eigenvectors,
        };
        Self::new(clamped.reconstruct(), tol)
    }

    pub(crate) fn new_unchecked(m: Matrix<T>) -> Self {
        Self { matrix: m }
    }

    /// The bottom element.
    pub fn zero(dim: usize) -> Self {
        Self {
            matrix: Matrix::zeros(dim),
        }
    }

    /// `|psi><psi|` for a unit (or sub-unit) vector.
    pub fn pure(psi: &[Cplx<T>], tol: &Tolerances<T>) -> Result<Self> {
        Self::new(Matrix::projector(psi), tol)
    }

    /// `|i><i|`.
    pub fn basis_state(dim: usize, i: usize) -> Self {
        let mut m = Matrix::zeros(dim);
        m[(i, i)] = cplx(1.0, 0.0);
        Self { matrix: m }
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn matrix(&self) -> &Matrix<T> {
        &self.matrix
    }

    pub fn into_matrix(self) -> Matrix<T> {
        self.matrix
    }

    /// Real part of the trace.
    pub fn trace(&self) -> T {
        self.matrix.trace().re
    }

    /// Re-runs the validation of [`new`](Self::new).
    pub fn validate(&self, tol: &Tolerances<T>) -> Result<()> {
        validate(&self.matrix, tol)
    }

    /// Largest eigenvalue, i.e. the operator norm.
    pub fn operator_norm(&self, tol: &Tolerances<T>) -> Result<T> {
        Ok(hermitian_eig(&self.matrix, tol)?.max_eigenvalue())
    }

    /// Decides `self <= other` in the Löwner order.
    pub fn loewner_leq(&self, other: &Self, tol: &Tolerances<T>) -> Result<LoewnerCheck<T>> {
        let diff = other.matrix.try_sub(&self.matrix)?;
        let check = is_positive_semidefinite(&diff, tol)?;
        Ok(LoewnerCheck {
            leq: check.is_psd,
            min_eigenvalue: check.min_eigenvalue,
            witness: check.witness,
        })
    }

    /// `r * self` for `0 <= r <= 1`.
    pub fn scale(&self, r: T) -> Result<Self> {
        if !(r >= T::zero() && r <= T::one()) {
            return Err(Error::OutOfRange {
                value: r.as_f64(),
                lo: 0.0,
                hi: 1.0,
            });
        }
        Ok(Self {
            matrix: self.matrix.scale(r),
        })
    }

    /// `1 - tr(self)` clamped to `[0, 1]`.
    pub fn nontermination_probability(&self) -> T {
        (T::one() - self.trace()).max(T::zero()).min(T::one())
    }

    pub fn to_f64(&self) -> PartialDensityOperator<f64> {
        PartialDensityOperator {
            matrix: self.matrix.to_f64(),
        }
    }
}

fn validate<T: Real>(m: &Matrix<T>, tol: &Tolerances<T>) -> Result<()> {
    if !m.is_finite() {
        return Err(Error::NonFinite);
    }
    let check = is_positive_semidefinite(m, tol)?;
    if !check.is_psd {
        return Err(not_positive(check.min_eigenvalue, check.witness.as_deref().unwrap_or(&[])));
    }
    let trace = m.trace().re;
    if trace > T::one() + tol.psd {
        return Err(Error::TraceExceedsOne { trace: trace.as_f64() });
    }
    Ok(())
}

fn not_positive<T: Real>(min_eigenvalue: T, witness: &[Cplx<T>]) -> Error {
    Error::NotPositive {
        min_eigenvalue: min_eigenvalue.as_f64(),
        witness: to_pairs(witness),
    }
}

pub(crate) fn to_pairs<T: Real>(v: &[Cplx<T>]) -> Vec<(f64, f64)> {
    v.iter().map(|z| (z.re.as_f64(), z.im.as_f64())).collect()
}

/// Result of a Löwner comparison `f <= g`.
#[derive(Clone, Debug)]
pub struct LoewnerCheck<T> {
    pub leq: bool,
    /// Smallest eigenvalue of `g - f`.
    pub min_eigenvalue: T,
    /// Unit vector `x` with `<x|(g - f) x> < 0` when `leq` is false.
    pub witness: Option<Vec<Cplx<T>>>,
}

pub fn new_partial_density<T: Real>(m: Matrix<T>, tol: &Tolerances<T>) -> Result<PartialDensityOperator<T>> {
    PartialDensityOperator::new(m, tol)
}

pub fn loewner_leq<T: Real>(
    f: &PartialDensityOperator<T>,
    g: &PartialDensityOperator<T>,
    tol: &Tolerances<T>,
) -> Result<LoewnerCheck<T>> {
    f.loewner_leq(g, tol)
}

pub fn scale<T: Real>(f: &PartialDensityOperator<T>, r: T) -> Result<PartialDensityOperator<T>> {
    f.scale(r)
}

pub fn nontermination_probability<T: Real>(f: &PartialDensityOperator<T>) -> T {
    f.nontermination_probability()
}

/// Stopping rules for chain suprema.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FixpointConfig<T> {
    pub max_iterations: usize,
    /// The chain is considered converged once a step raises the trace by
    /// less than this.
    pub trace_tol: T,
    /// Check every step of the chain in the Löwner order.
    pub monotonicity_check: bool,
}

impl<T: Real> Default for FixpointConfig<T> {
    fn default() -> Self {
        Self {
            max_iterations: 10_000,
            trace_tol: T::lit(1e-9).max(T::tol_floor()),
            monotonicity_check: true,
        }
    }
}

impl<T: Real> FixpointConfig<T> {
    pub fn validate(&self) -> Result<()> {
        if self.max_iterations < 1 {
            return Err(Error::Config("max_iterations must be at least 1".into()));
        }
        if !(self.trace_tol > T::zero()) {
            return Err(Error::Config(format!("trace_tol must be positive, got {}", self.trace_tol)));
        }
        Ok(())
    }
}

/// Approximation of the supremum of an increasing chain.
#[derive(Clone, Debug)]
pub struct ChainLimit<T> {
    pub value: PartialDensityOperator<T>,
    /// Number of chain steps taken; element `iterations` of the chain
    /// (counting from 0) is `value`.
    pub iterations: usize,
    pub converged: bool,
    /// Trace of every element consumed, starting with element 0.
    pub trace_log: Vec<T>,
}

/// Supremum of an increasing chain `f_0 <= f_1 <= ...`.
///
/// Walks the chain until a step `f_{i-1} -> f_i` raises the trace by less
/// than `cfg.trace_tol` and returns `f_i`. Because the differences are
/// positive, the trace gap bounds the operator-norm gap. After
/// `cfg.max_iterations` steps the last element is returned with
/// `converged = false`. A finite chain converges to its last element.
pub fn chain_supremum<T: Real, I>(chain: I, cfg: &FixpointConfig<T>, tol: &Tolerances<T>) -> Result<ChainLimit<T>>
where
    I: IntoIterator<Item = PartialDensityOperator<T>>,
{
    try_chain_supremum(chain.into_iter().map(Ok), cfg, tol)
}

/// [`chain_supremum`] over a fallible generator; the first error aborts.
pub fn try_chain_supremum<T: Real, I>(chain: I, cfg: &FixpointConfig<T>, tol: &Tolerances<T>) -> Result<ChainLimit<T>>
where
    I: IntoIterator<Item = Result<PartialDensityOperator<T>>>,
{
    try_chain_supremum_certified(chain, cfg, tol, || true)
}

/// [`try_chain_supremum`] where a small trace gap only ends the iteration if
/// `certify` also agrees. `certify` is called right after the element that
/// produced the gap has been pulled from the chain.
pub fn try_chain_supremum_certified<T: Real, I, C>(
    chain: I,
    cfg: &FixpointConfig<T>,
    tol: &Tolerances<T>,
    mut certify: C,
) -> Result<ChainLimit<T>>
where
    I: IntoIterator<Item = Result<PartialDensityOperator<T>>>,
    C: FnMut() -> bool,
{
    cfg.validate()?;
    let mut chain = chain.into_iter();
    let mut current = chain.next().ok_or(Error::EmptyChain)??;
    current.validate(tol)?;
    let mut trace_log = vec![current.trace()];

    for step in 1..=cfg.max_iterations {
        let next = match chain.next() {
            Some(next) => next?,
            None => {
                return Ok(ChainLimit {
                    value: current,
                    iterations: step - 1,
                    converged: true,
                    trace_log,
                })
            }
        };
        next.validate(tol)?;
        if cfg.monotonicity_check {
            let check = current.loewner_leq(&next, tol)?;
            if !check.leq {
                return Err(Error::NotIncreasing {
                    index: step,
                    min_eigenvalue: check.min_eigenvalue.as_f64(),
                    witness: to_pairs(check.witness.as_deref().unwrap_or(&[])),
                });
            }
        }
        let gap = next.trace() - current.trace();
        trace_log.push(next.trace());
        current = next;
        if gap < cfg.trace_tol && certify() {
            return Ok(ChainLimit {
                value: current,
                iterations: step,
                converged: true,
                trace_log,
            });
        }
    }
    Ok(ChainLimit {
        value: current,
        iterations: cfg.max_iterations,
        converged: false,
        trace_log,
    })
}

/// Exact weights `a_i / 2^(i+1)` of the binary digits `a_i`.
///
/// # Panics
///
/// If a digit is not 0 or 1, or there are more than 127 digits.
pub fn dyadic_weights(bits: &[u8]) -> Vec<Ratio<u128>> {
    assert!(bits.len() < 128, "at most 127 binary digits");
    bits.iter()
        .enumerate()
        .map(|(i, &b)| {
            assert!(b <= 1, "binary digit must be 0 or 1");
            Ratio::new(u128::from(b), 1u128 << (i + 1))
        })
        .collect()
}

/// Exact `sum_i a_i / 2^(i+1)`.
pub fn dyadic_value(bits: &[u8]) -> Ratio<u128> {
    dyadic_weights(bits)
        .into_iter()
        .fold(Ratio::from_integer(0), |acc, w| acc + w)
}

/// Diagonal operator with entry `a_i / 2^(i+1)` at position `i`, padded with
/// zeros up to `dim`.
pub fn dyadic_diagonal_state<T: Real>(bits: &[u8], dim: usize) -> Result<PartialDensityOperator<T>> {
    if bits.len() > dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: bits.len(),
        });
    }
    if let Some(&b) = bits.iter().find(|&&b| b > 1) {
        return Err(Error::OutOfRange {
            value: f64::from(b),
            lo: 0.0,
            hi: 1.0,
        });
    }
    let mut diag = vec![T::zero(); dim];
    let mut weight = T::one();
    for (i, &b) in bits.iter().enumerate() {
        weight *= T::lit(0.5);
        if b == 1 {
            diag[i] = weight;
        }
    }
    Ok(PartialDensityOperator::new_unchecked(Matrix::from_diag(&diag)))
}
