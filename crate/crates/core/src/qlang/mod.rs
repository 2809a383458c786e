//! A small quantum while-language with projective guards.
//!
//! ```text
//! qubit q;
//! h q;
//! while q in |1> { h q; }
//! ```
//!
//! Programs denote maps on partial density operators. Guards test a qubit
//! against a ket and split the state as `P rho P + P' rho P'` without
//! renormalizing, so a loop that may run forever yields an output of trace
//! below one. A loop's meaning is the supremum of its unrollings, computed
//! by Kleene iteration.

mod gates;
mod interp;
mod parser;

pub use gates::{denote_unitary, guard_subspace, GateKind, Ket};
pub use interp::{interpret, RunReport};
pub use parser::{parse, parse_with};

use crate::linalg::Matrix;
use crate::logic::ClosedSubspace;
use crate::scalar::Real;

/// Maximum number of qubits; keeps matrices at most 64x64.
pub const MAX_QUBITS: usize = 6;

#[derive(Clone, Debug)]
pub struct Program<T> {
    /// Register names with their sizes (always 1 in the current grammar).
    pub declarations: Vec<(String, usize)>,
    pub body: Statement<T>,
}

impl<T: Real> Program<T> {
    pub fn num_qubits(&self) -> usize {
        self.declarations.iter().map(|(_, size)| size).sum()
    }

    /// Hilbert space dimension `2^qubits`.
    pub fn dim(&self) -> usize {
        1 << self.num_qubits()
    }
}

#[derive(Clone, Debug)]
pub enum Gate<T> {
    Named(GateKind),
    /// Inline `2^k x 2^k` unitary acting on `k` targets.
    Matrix(Matrix<T>),
}

impl<T: Real> Gate<T> {
    pub fn arity(&self) -> usize {
        match self {
            Gate::Named(kind) => kind.arity(),
            Gate::Matrix(m) => m.dim().trailing_zeros() as usize,
        }
    }

    pub fn matrix(&self) -> Matrix<T> {
        match self {
            Gate::Named(kind) => kind.matrix(),
            Gate::Matrix(m) => m.clone(),
        }
    }
}

#[derive(Clone, Debug)]
pub enum Statement<T> {
    Skip,
    Seq(Vec<Statement<T>>),
    ApplyUnitary {
        gate: Gate<T>,
        targets: Vec<usize>,
    },
    Branch {
        guard: ClosedSubspace<T>,
        then_branch: Box<Statement<T>>,
        else_branch: Box<Statement<T>>,
    },
    While {
        guard: ClosedSubspace<T>,
        body: Box<Statement<T>>,
    },
}

impl<T: Real> Statement<T> {
    /// Nesting depth; `Skip` and gates have depth 0.
    pub fn depth(&self) -> usize {
        match self {
            Statement::Skip | Statement::ApplyUnitary { .. } => 0,
            Statement::Seq(items) => items.iter().map(Statement::depth).max().unwrap_or(0),
            Statement::Branch {
                then_branch,
                else_branch,
                ..
            } => 1 + then_branch.depth().max(else_branch.depth()),
            Statement::While { body, .. } => 1 + body.depth(),
        }
    }
}
