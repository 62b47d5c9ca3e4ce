//! Operator determinants by truncation doubling.
//!
//! Infinite operators of the form `I + K` with rapidly decaying `K` are
//! evaluated as determinants of growing finite sections until two
//! consecutive doublings agree. The log determinant is the primary value;
//! the determinant itself is exposed for convenience.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;
use crate::operators::hankel_finite;
use crate::symbol::{invert_symbol_auto, BlockSymbol, DoublingPolicy};
use crate::C64;

/// Default initial truncation for operator determinants.
pub const DEFAULT_M0: usize = 16;

/// A determinant obtained from a convergent truncation sequence.
#[derive(Debug, Clone)]
pub struct ConvergedValue {
    pub value: C64,
    pub log_value: C64,
    /// Truncation sizes that were evaluated, in order.
    pub schedule: Vec<usize>,
    /// Absolute change of the log value between consecutive truncations.
    pub deltas: Vec<f64>,
    /// The last observed delta.
    pub achieved_tol: f64,
}

/// Evaluates `log det` of matrices produced by `builder` at doubling
/// truncations until two consecutive deltas fall below `tol`.
pub fn operator_determinant(
    builder: &mut dyn FnMut(usize) -> Result<DenseMatrix>,
    tol: f64,
    m0: usize,
    policy: DoublingPolicy,
) -> Result<ConvergedValue> {
    if tol <= 0.0 {
        return Err(Error::InvalidInput("tolerance must be positive"));
    }
    let mut m = m0.max(2);
    let mut schedule = Vec::new();
    let mut deltas = Vec::new();
    let mut last_log: Option<C64> = None;
    let mut small_streak = 0usize;
    for _ in 0..=policy.max_doublings {
        let mat = builder(m)?;
        let log_det = mat.lu()?.log_det();
        schedule.push(m);
        if let Some(prev) = last_log {
            let delta = (log_det - prev).norm();
            deltas.push(delta);
            if delta <= tol {
                small_streak += 1;
                if small_streak >= 2 {
                    return Ok(ConvergedValue {
                        value: log_det.exp(),
                        log_value: log_det,
                        schedule,
                        deltas: deltas.clone(),
                        achieved_tol: delta,
                    });
                }
            } else {
                small_streak = 0;
            }
        }
        last_log = Some(log_det);
        m *= 2;
    }
    Err(Error::NoConvergence {
        last_delta: deltas.last().copied().unwrap_or(f64::INFINITY),
        truncation: schedule.last().copied().unwrap_or(m0),
    })
}

/// The constant `E(phi) = det(I - H(phi) H(reflect(phi^{-1})))`.
pub fn e_constant(sym: &BlockSymbol, tol: f64, policy: DoublingPolicy) -> Result<ConvergedValue> {
    let inv = invert_symbol_auto(sym, policy)?.symbol;
    let inv_reflected = inv.reflect();
    let n = sym.block_size();
    let mut builder = move |m: usize| -> Result<DenseMatrix> {
        let h1 = hankel_finite(sym, m, m);
        let h2 = hankel_finite(&inv_reflected, m, m);
        let prod = h1.mul(&h2)?;
        DenseMatrix::identity(m * n).sub(&prod)
    };
    operator_determinant(&mut builder, tol, DEFAULT_M0, policy)
}

/// Closed form `exp(sum_{k>=1} k (log phi)_k (log phi)_{-k})` for scalar
/// symbols with zero winding, given the log series.
pub fn scalar_szego_e(log_series: &BlockSymbol) -> Result<C64> {
    log_series.ensure_scalar()?;
    let hi = log_series.max_index().unwrap_or(0).max(0);
    let mut acc = C64::new(0.0, 0.0);
    for k in 1..=hi {
        acc += log_series.scalar_coeff(k) * log_series.scalar_coeff(-k) * C64::new(k as f64, 0.0);
    }
    Ok(acc.exp())
}

/// Relative residual of the finite-section determinant identity
/// `det P_n A P_n = det A * det Q_n A^{-1} Q_n` for an invertible matrix.
pub fn jacobi_identity_check(a: &DenseMatrix, n: usize) -> Result<f64> {
    if a.rows() != a.cols() {
        return Err(Error::SizeMismatch { expected: a.rows(), got: a.cols() });
    }
    if n == 0 || n > a.rows() {
        return Err(Error::OutOfRange { index: n, bound: a.rows() });
    }
    let corner = crate::operators::corner(a, n, n)?;
    let lhs = corner.lu()?.log_det();
    let inv = a.inverse()?;
    let trailing = crate::operators::qn_compress(&inv, n)?;
    let rhs = if trailing.rows() == 0 {
        a.lu()?.log_det()
    } else {
        a.lu()?.log_det() + trailing.lu()?.log_det()
    };
    Ok(((lhs - rhs).exp() - C64::new(1.0, 0.0)).norm())
}
