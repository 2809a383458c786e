//! JSON forms of operators and run reports.
//!
//! Matrices are `{"dim": n, "re": [[..]], "im": [[..]]}` with row-major
//! arrays; `im` may be omitted for real matrices.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::density::PartialDensityOperator;
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::qlang::RunReport;
use crate::scalar::{Cplx, Real};
use crate::tolerance::Tolerances;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatrixJson {
    pub dim: usize,
    pub re: Vec<Vec<f64>>,
    #[serde(default)]
    pub im: Option<Vec<Vec<f64>>>,
}

impl MatrixJson {
    pub fn from_matrix<T: Real>(m: &Matrix<T>) -> Self {
        let n = m.dim();
        let part = |f: fn(&Cplx<T>) -> T| -> Vec<Vec<f64>> {
            (0..n).map(|r| (0..n).map(|c| f(&m[(r, c)]).as_f64()).collect()).collect()
        };
        Self {
            dim: n,
            re: part(|z| z.re),
            im: Some(part(|z| z.im)),
        }
    }

    pub fn to_matrix<T: Real>(&self) -> Result<Matrix<T>> {
        let n = self.dim;
        let shape_ok = |rows: &Vec<Vec<f64>>| rows.len() == n && rows.iter().all(|r| r.len() == n);
        if n == 0 || !shape_ok(&self.re) || !self.im.as_ref().is_none_or(shape_ok) {
            return Err(Error::Json(format!("arrays do not match dim {n}")));
        }
        let rows = (0..n)
            .map(|r| {
                (0..n)
                    .map(|c| {
                        let im = self.im.as_ref().map_or(0.0, |im| im[r][c]);
                        Cplx::new(T::lit(self.re[r][c]), T::lit(im))
                    })
                    .collect()
            })
            .collect();
        Matrix::from_rows(rows)
    }
}

pub fn matrix_from_str<T: Real>(text: &str) -> Result<Matrix<T>> {
    let json: MatrixJson = serde_json::from_str(text).map_err(|e| Error::Json(e.to_string()))?;
    json.to_matrix()
}

/// Reads and validates a partial density operator.
pub fn state_from_str<T: Real>(text: &str, tol: &Tolerances<T>) -> Result<PartialDensityOperator<T>> {
    PartialDensityOperator::new(matrix_from_str(text)?, tol)
}

pub fn read_matrix<T: Real>(path: &Path) -> Result<Matrix<T>> {
    matrix_from_str(&read(path)?)
}

pub fn read_state<T: Real>(path: &Path, tol: &Tolerances<T>) -> Result<PartialDensityOperator<T>> {
    state_from_str(&read(path)?, tol)
}

pub fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
}

pub fn to_json_string<S: Serialize>(value: &S) -> Result<String> {
    serde_json::to_string_pretty(value).map_err(|e| Error::Json(e.to_string()))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReportJson {
    pub output: MatrixJson,
    pub iterations_per_loop: Vec<usize>,
    pub residual: f64,
    pub converged: bool,
    pub chain_trace_log: Vec<f64>,
}

impl<T: Real> From<&RunReport<T>> for RunReportJson {
    fn from(r: &RunReport<T>) -> Self {
        Self {
            output: MatrixJson::from_matrix(r.output.matrix()),
            iterations_per_loop: r.iterations_per_loop.clone(),
            residual: r.residual.as_f64(),
            converged: r.converged,
            chain_trace_log: r.chain_trace_log.iter().map(|t| t.as_f64()).collect(),
        }
    }
}
