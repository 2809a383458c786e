use std::cell::Cell;
use std::collections::VecDeque;
use std::rc::Rc;

use crate::density::{try_chain_supremum_certified, FixpointConfig, PartialDensityOperator};
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::scalar::Real;
use crate::tolerance::Tolerances;

use super::gates::denote_unitary;
use super::{Program, Statement};

/// How many past loop states are compared against the current one. Once the
/// state repeats, the exits it produces repeat too, and since their total is
/// bounded they must vanish.
const CYCLE_WINDOW: usize = 64;

/// Outcome of running a program on one input.
#[derive(Clone, Debug)]
pub struct RunReport<T> {
    pub output: PartialDensityOperator<T>,
    /// One entry per `while` in source order: the largest number of chain
    /// steps taken over all of that loop's executions.
    pub iterations_per_loop: Vec<usize>,
    /// Nontermination probability `1 - tr(output)`.
    pub residual: T,
    /// False if any loop execution hit `max_iterations`.
    pub converged: bool,
    /// Accumulator traces of the last loop execution to finish; empty
    /// without loops.
    pub chain_trace_log: Vec<T>,
}

/// Statement tree with every gate and guard turned into a full-dimension
/// matrix.
enum Compiled<T> {
    Skip,
    Seq(Vec<Compiled<T>>),
    Unitary(Matrix<T>),
    Branch {
        p: Matrix<T>,
        p_perp: Matrix<T>,
        then_branch: Box<Compiled<T>>,
        else_branch: Box<Compiled<T>>,
    },
    While {
        id: usize,
        p: Matrix<T>,
        p_perp: Matrix<T>,
        body: Box<Compiled<T>>,
    },
}

fn compile<T: Real>(stmt: &Statement<T>, n: usize, tol: &Tolerances<T>, loops: &mut usize) -> Result<Compiled<T>> {
    let dim = 1usize << n;
    let split = |guard: &crate::logic::ClosedSubspace<T>| -> Result<(Matrix<T>, Matrix<T>)> {
        let p = guard.projection().clone();
        if p.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: p.dim(),
            });
        }
        let p_perp = Matrix::identity(dim).try_sub(&p)?;
        Ok((p, p_perp))
    };
    Ok(match stmt {
        Statement::Skip => Compiled::Skip,
        Statement::Seq(items) => Compiled::Seq(
            items
                .iter()
                .map(|s| compile(s, n, tol, loops))
                .collect::<Result<_>>()?,
        ),
        Statement::ApplyUnitary { gate, targets } => Compiled::Unitary(denote_unitary(gate, targets, n, tol)?),
        Statement::Branch {
            guard,
            then_branch,
            else_branch,
        } => {
            let (p, p_perp) = split(guard)?;
            Compiled::Branch {
                p,
                p_perp,
                then_branch: Box::new(compile(then_branch, n, tol, loops)?),
                else_branch: Box::new(compile(else_branch, n, tol, loops)?),
            }
        }
        Statement::While { guard, body } => {
            let (p, p_perp) = split(guard)?;
            let id = *loops;
            *loops += 1;
            Compiled::While {
                id,
                p,
                p_perp,
                body: Box::new(compile(body, n, tol, loops)?),
            }
        }
    })
}

struct Run<'a, T> {
    cfg: &'a FixpointConfig<T>,
    tol: &'a Tolerances<T>,
    iterations: Vec<usize>,
    converged: bool,
    last_log: Vec<T>,
}

impl<T: Real> Run<'_, T> {
    /// `m rho m†`, symmetrized so rounding never accumulates into a
    /// non-Hermitian part.
    fn sandwich(&self, m: &Matrix<T>, rho: &Matrix<T>) -> Result<Matrix<T>> {
        Ok(m.conjugate(rho)?.hermitian_part())
    }

    fn checked(&self, m: Matrix<T>) -> Result<Matrix<T>> {
        PartialDensityOperator::new(m, self.tol).map(PartialDensityOperator::into_matrix)
    }

    fn exec(&mut self, stmt: &Compiled<T>, rho: Matrix<T>) -> Result<Matrix<T>> {
        match stmt {
            Compiled::Skip => Ok(rho),
            Compiled::Seq(items) => items.iter().try_fold(rho, |acc, s| self.exec(s, acc)),
            Compiled::Unitary(u) => {
                let out = self.sandwich(u, &rho)?;
                self.checked(out)
            }
            Compiled::Branch {
                p,
                p_perp,
                then_branch,
                else_branch,
            } => {
                let yes = self.sandwich(p, &rho)?;
                let no = self.sandwich(p_perp, &rho)?;
                let a = self.exec(then_branch, yes)?;
                let b = self.exec(else_branch, no)?;
                self.checked(a.try_add(&b)?)
            }
            Compiled::While { id, p, p_perp, body } => self.exec_while(*id, p, p_perp, body, rho),
        }
    }

    fn exec_while(
        &mut self,
        id: usize,
        p: &Matrix<T>,
        p_perp: &Matrix<T>,
        body: &Compiled<T>,
        rho: Matrix<T>,
    ) -> Result<Matrix<T>> {
        let dim = rho.dim();
        let cfg = self.cfg;
        let tol = self.tol;
        // (trace of the loop state still in flight, loop state revisits a recent one)
        let status = Rc::new(Cell::new((T::one(), false)));
        let probe = Rc::clone(&status);

        let mut acc = Matrix::zeros(dim);
        let mut sigma = rho;
        let mut recent: VecDeque<Matrix<T>> = VecDeque::with_capacity(CYCLE_WINDOW);
        let mut started = false;
        let mut failed = false;
        let run = &mut *self;
        let chain = std::iter::from_fn(|| {
            if failed {
                return None;
            }
            if !started {
                started = true;
                return Some(PartialDensityOperator::new(acc.clone(), tol));
            }
            let step = (|| -> Result<PartialDensityOperator<T>> {
                let mut exit = run.sandwich(p_perp, &sigma)?;
                // a PSD matrix has a nonnegative diagonal; removing rounding
                // noise there keeps the accumulator trace monotone
                for i in 0..dim {
                    exit[(i, i)].re = exit[(i, i)].re.max(T::zero());
                }
                acc = run.checked(acc.try_add(&exit)?)?;
                let stay = run.sandwich(p, &sigma)?;
                let next = run.exec(body, stay)?;
                if recent.len() == CYCLE_WINDOW {
                    recent.pop_front();
                }
                recent.push_back(std::mem::replace(&mut sigma, run.checked(next)?));
                let mut cycles = false;
                for old in &recent {
                    cycles |= old.distance(&sigma)? <= cfg.trace_tol;
                }
                status.set((sigma.trace().re, cycles));
                PartialDensityOperator::new(acc.clone(), tol)
            })();
            failed = step.is_err();
            Some(step)
        });
        let certify = || {
            let (remaining, stationary) = probe.get();
            remaining < cfg.trace_tol || stationary
        };
        let limit = try_chain_supremum_certified(chain, cfg, tol, certify)?;

        self.iterations[id] = self.iterations[id].max(limit.iterations);
        self.converged &= limit.converged;
        self.last_log = limit.trace_log;
        Ok(limit.value.into_matrix())
    }
}

/// Runs `prog` on `input`.
///
/// Loops are evaluated by Kleene iteration on the exit accumulator. A trace
/// gap below `cfg.trace_tol` ends a loop only once the mass still inside the
/// loop is below `trace_tol` or the loop state repeats a recent one, so a
/// loop whose first exits are delayed is not cut off early.
pub fn interpret<T: Real>(
    prog: &Program<T>,
    input: &PartialDensityOperator<T>,
    cfg: &FixpointConfig<T>,
    tol: &Tolerances<T>,
) -> Result<RunReport<T>> {
    cfg.validate()?;
    tol.validate()?;
    if input.dim() != prog.dim() {
        return Err(Error::DimensionMismatch {
            expected: prog.dim(),
            found: input.dim(),
        });
    }
    input.validate(tol)?;
    let mut loops = 0;
    let compiled = compile(&prog.body, prog.num_qubits(), tol, &mut loops)?;
    let mut run = Run {
        cfg,
        tol,
        iterations: vec![0; loops],
        converged: true,
        last_log: Vec::new(),
    };
    let out = run.exec(&compiled, input.matrix().clone())?;
    let output = PartialDensityOperator::new(out, tol)?;
    Ok(RunReport {
        residual: output.nontermination_probability(),
        output,
        iterations_per_loop: run.iterations,
        converged: run.converged,
        chain_trace_log: run.last_log,
    })
}
