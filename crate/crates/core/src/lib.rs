//! Partial density operators and the quantum logic of partial states.
//!
//! A computation that may fail to terminate produces a *partial* density
//! operator `f`: positive, with `tr f <= 1`, where `1 - tr f` is the
//! probability of non-termination. This crate provides
//!
//! * [`linalg`]: dense complex matrices and a Jacobi Hermitian eigensolver;
//! * [`logic`]: closed subspaces (quantum events) and the sub-probability
//!   measure `K -> tr(P^K f)`, including the Löwner/measure order test with
//!   separating events;
//! * [`density`]: validated partial density operators, the Löwner order and
//!   suprema of increasing chains;
//! * [`interval`] and [`observable`]: compact intervals and interval-valued
//!   expectations of bounded observables;
//! * [`qlang`]: a small quantum while-language whose loops are evaluated as
//!   increasing chains of partial density operators;
//! * [`verify`]: randomized property suites used by the CLI.
//!
//! All numeric code is generic over [`Real`] (`f32` or `f64`); the aliases at
//! the crate root fix the scalar to `f64`.

pub mod density;
pub mod error;
pub mod interval;
pub mod io;
pub mod linalg;
pub mod logic;
pub mod observable;
pub mod qlang;
pub mod random;
pub mod scalar;
pub mod tolerance;
pub mod verify;

pub use error::{Error, Result};
pub use scalar::{Cplx, Real};

pub type Complex64 = scalar::Cplx<f64>;
pub type ComplexMatrix = linalg::Matrix<f64>;
pub type SpectralDecomposition = linalg::SpectralDecomposition<f64>;
pub type Tolerances = tolerance::Tolerances<f64>;
pub type ClosedSubspace = logic::ClosedSubspace<f64>;
pub type PartialStateView = logic::PartialStateView<f64>;
pub type PartialDensityOperator = density::PartialDensityOperator<f64>;
pub type FixpointConfig = density::FixpointConfig<f64>;
pub type CompactInterval = interval::CompactInterval<f64>;
pub type BoundedObservable = observable::BoundedObservable<f64>;
pub type BorelSet = observable::BorelSet<f64>;
pub type SubDistribution = observable::SubDistribution<f64>;
pub type Program = qlang::Program<f64>;
pub type RunReport = qlang::RunReport<f64>;



pub type ComplexMatrixF32 = linalg::Matrix<f32>;
pub type PartialDensityOperatorF32 = density::PartialDensityOperator<f32>;
