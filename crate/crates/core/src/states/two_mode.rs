use nalgebra::DMatrix;

use super::State;
use crate::error::{Error, Result};

/// Largest Schmidt tail `tanh(z)^dim / cosh(z)` accepted for a TMSV truncation.
pub const TMSV_TAIL: f64 = 1e-8;

/// Two-mode squeezed vacuum `sum_n tanh(z)^n/cosh(z) |nn>`.
///
/// Moments are evaluated from the analytic Gaussian covariance; the Schmidt
/// form at `dim` is available for Fock-basis cross-checks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tmsv {
    zeta: f64,
    dim: usize,
}

impl Tmsv {
    pub fn zeta(&self) -> f64 {
        self.zeta
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Schmidt coefficients on `|nn>` for `n < dim`.
    pub fn schmidt(&self) -> Vec<f64> {
        let t = self.zeta.tanh();
        let c = self.zeta.cosh();
        let mut out = Vec::with_capacity(self.dim);
        let mut v = 1.0 / c;
        for _ in 0..self.dim {
            out.push(v);
            v *= t;
        }
        out
    }

    /// Covariance of `(X1, P1, X2, P2)`.
    pub fn covariance(&self) -> DMatrix<f64> {
        let a = (2.0 * self.zeta).cosh() / 2.0;
        let c = (2.0 * self.zeta).sinh() / 2.0;
        DMatrix::from_row_slice(
            4,
            4,
            &[a, 0.0, c, 0.0, 0.0, a, 0.0, -c, c, 0.0, a, 0.0, 0.0, -c, 0.0, a],
        )
    }
}

fn tmsv_required_dim(zeta: f64) -> usize {
    let t = zeta.tanh();
    if t == 0.0 {
        return 1;
    }
    // smallest d with t^d / cosh < tail
    let d = ((TMSV_TAIL * zeta.cosh()).ln() / t.ln()).floor() as usize + 1;
    d.max(1)
}

pub fn make_tmsv(zeta: f64, dim: Option<usize>) -> Result<TwoModeState> {
    if !(zeta >= 0.0) || !zeta.is_finite() {
        return Err(Error::InvalidParameter(format!("zeta = {zeta} must be >= 0")));
    }
    let required = tmsv_required_dim(zeta);
    let dim = match dim {
        Some(d) if d < required => return Err(Error::DimTooSmall { dim: d, required }),
        Some(d) => d,
        None => required,
    };
    Ok(TwoModeState::Tmsv(Tmsv { zeta, dim }))
}

pub fn make_two_mode_fock(n1: usize, n2: usize, dim: Option<usize>) -> Result<TwoModeState> {
    Ok(TwoModeState::Product(
        State::Fock(super::make_fock(n1, dim)?),
        State::Fock(super::make_fock(n2, dim)?),
    ))
}

/// A two-mode state: an uncorrelated product, or a two-mode squeezed vacuum.
#[derive(Debug, Clone)]
pub enum TwoModeState {
    Product(State, State),
    Tmsv(Tmsv),
}
