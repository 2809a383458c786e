use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4};

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::logic::ClosedSubspace;
use crate::scalar::{cplx, Cplx, Real};
use crate::tolerance::Tolerances;

use super::{Gate, MAX_QUBITS};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GateKind {
    X,
    Y,
    Z,
    H,
    S,
    T,
    Cnot,
}

impl GateKind {
    pub fn from_name(name: &str) -> Option<Self> {
        Some(match name.to_ascii_lowercase().as_str() {
            "x" => Self::X,
            "y" => Self::Y,
            "z" => Self::Z,
            "h" => Self::H,
            "s" => Self::S,
            "t" => Self::T,
            "cnot" | "cx" => Self::Cnot,
            _ => return None,
        })
    }

    pub fn arity(self) -> usize {
        match self {
            Self::Cnot => 2,
            _ => 1,
        }
    }

    pub fn matrix<T: Real>(self) -> Matrix<T> {
        let z = cplx::<T>(0.0, 0.0);
        let o = cplx::<T>(1.0, 0.0);
        let rows: Vec<Vec<Cplx<T>>> = match self {
            Self::X => vec![vec![z, o], vec![o, z]],
            Self::Y => vec![vec![z, cplx(0.0, -1.0)], vec![cplx(0.0, 1.0), z]],
            Self::Z => vec![vec![o, z], vec![z, cplx(-1.0, 0.0)]],
            Self::H => {
                let h = cplx(FRAC_1_SQRT_2, 0.0);
                vec![vec![h, h], vec![h, -h]]
            }
            Self::S => vec![vec![o, z], vec![z, cplx(0.0, 1.0)]],
            Self::T => vec![vec![o, z], vec![z, Complex::from_polar(T::one(), T::lit(FRAC_PI_4))]],
            Self::Cnot => vec![
                vec![o, z, z, z],
                vec![z, o, z, z],
                vec![z, z, z, o],
                vec![z, z, o, z],
            ],
        };
        Matrix::from_rows(rows).expect("square gate table")
    }
}

/// Single-qubit states usable in guards.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Ket {
    Zero,
    One,
    Plus,
    Minus,
}

impl Ket {
    pub fn vector<T: Real>(self) -> [Cplx<T>; 2] {
        let s = FRAC_1_SQRT_2;
        match self {
            Ket::Zero => [cplx(1.0, 0.0), cplx(0.0, 0.0)],
            Ket::One => [cplx(0.0, 0.0), cplx(1.0, 0.0)],
            Ket::Plus => [cplx(s, 0.0), cplx(s, 0.0)],
            Ket::Minus => [cplx(s, 0.0), cplx(-s, 0.0)],
        }
    }
}

/// Embeds a `2^k`-dimensional operator acting on `targets` into the full
/// `2^n` space. Qubit 0 is the most significant tensor factor, and
/// `targets[0]` is the most significant qubit of the operator.
fn embed<T: Real>(op: &Matrix<T>, targets: &[usize], n: usize) -> Matrix<T> {
    let dim = 1usize << n;
    let k = targets.len();
    let bit = |q: usize| n - 1 - q;
    let sub_index = |idx: usize| {
        targets
            .iter()
            .fold(0usize, |acc, &q| (acc << 1) | ((idx >> bit(q)) & 1))
    };
    let with_sub = |idx: usize, sub: usize| {
        targets.iter().enumerate().fold(idx, |acc, (j, &q)| {
            let b = (sub >> (k - 1 - j)) & 1;
            (acc & !(1 << bit(q))) | (b << bit(q))
        })
    };
    let mut full = Matrix::zeros(dim);
    for col in 0..dim {
        let s_col = sub_index(col);
        for s_row in 0..(1 << k) {
            let entry = op[(s_row, s_col)];
            if entry.re != T::zero() || entry.im != T::zero() {
                full[(with_sub(col, s_row), col)] = entry;
            }
        }
    }
    full
}

fn check_targets(targets: &[usize], arity: usize, n: usize) -> Result<()> {
    if n > MAX_QUBITS {
        return Err(Error::BadTargets(format!("{n} qubits exceeds the limit of {MAX_QUBITS}")));
    }
    if targets.len() != arity {
        return Err(Error::BadTargets(format!(
            "gate acts on {arity} qubit(s) but {} target(s) given",
            targets.len()
        )));
    }
    for (i, &q) in targets.iter().enumerate() {
        if q >= n {
            return Err(Error::BadTargets(format!("qubit {q} out of range for {n} qubit(s)")));
        }
        if targets[..i].contains(&q) {
            return Err(Error::BadTargets(format!("qubit {q} targeted twice")));
        }
    }
    Ok(())
}

/// Full-dimension unitary for `gate` applied to `targets` of an
/// `total_qubits`-qubit register.
pub fn denote_unitary<T: Real>(
    gate: &Gate<T>,
    targets: &[usize],
    total_qubits: usize,
    tol: &Tolerances<T>,
) -> Result<Matrix<T>> {
    let u = gate.matrix();
    if !u.dim().is_power_of_two() {
        return Err(Error::BadTargets(format!("gate dimension {} is not a power of two", u.dim())));
    }
    check_targets(targets, gate.arity(), total_qubits)?;
    let deviation = (&u.adjoint() * &u).distance(&Matrix::identity(u.dim()))?;
    if deviation > T::lit(1e-10).max(tol.hermitian) {
        return Err(Error::NotUnitary {
            deviation: deviation.as_f64(),
        });
    }
    Ok(embed(&u, targets, total_qubits))
}

/// The event "qubit `target` is in state `ket`" in the full space.
pub fn guard_subspace<T: Real>(ket: Ket, target: usize, total_qubits: usize) -> Result<ClosedSubspace<T>> {
    check_targets(&[target], 1, total_qubits)?;
    let v = ket.vector::<T>();
    let local = Matrix::projector(&v);
    let projection = embed(&local, &[target], total_qubits);
    // basis: |ket> on the target tensored with every basis state of the rest
    let dim = 1usize << total_qubits;
    let bit = total_qubits - 1 - target;
    let basis = (0..dim)
        .filter(|idx| (idx >> bit) & 1 == 0)
        .map(|idx| {
            let mut e = vec![cplx::<T>(0.0, 0.0); dim];
            e[idx] = v[0];
            e[idx | (1 << bit)] = v[1];
            e
        })
        .collect();
    let k = ClosedSubspace::from_orthonormal(dim, basis);
    debug_assert!(k.projection().distance(&projection).unwrap().as_f64() < 1e-12);
    Ok(k)
}
