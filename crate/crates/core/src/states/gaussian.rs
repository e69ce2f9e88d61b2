use nalgebra::{Matrix2, Vector2};

use crate::error::{Error, Result};

/// Parameters a Gaussian state was built from, kept for reporting.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianParams {
    pub mu: f64,
    pub lam: f64,
    pub angle: f64,
}

/// A single-mode Gaussian state held analytically as mean and covariance.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianState {
    mean: Vector2<f64>,
    cov: Matrix2<f64>,
    params: Option<GaussianParams>,
}

pub fn rotation(angle: f64) -> Matrix2<f64> {
    let (s, c) = angle.sin_cos();
    Matrix2::new(c, -s, s, c)
}

/// Builds `G = O(angle) (mu/2) diag(lam, 1/lam) O(angle)^T` with mean `disp`.
pub fn make_gaussian(mu: f64, lam: f64, angle: f64, disp: [f64; 2]) -> Result<GaussianState> {
    if !(mu >= 1.0) || !mu.is_finite() {
        return Err(Error::InvalidParameter(format!("temperature mu = {mu} must be >= 1")));
    }
    if !(lam >= 1.0) || !lam.is_finite() {
        return Err(Error::InvalidParameter(format!("squeezing lam = {lam} must be >= 1")));
    }
    let o = rotation(angle);
    let d = Matrix2::new(lam, 0.0, 0.0, 1.0 / lam) * (mu / 2.0);
    let cov = o * d * o.transpose();
    Ok(GaussianState {
        mean: Vector2::new(disp[0], disp[1]),
        cov,
        params: Some(GaussianParams { mu, lam, angle }),
    })
}

impl GaussianState {
    /// Builds a state from raw moments, checking symmetry and the HRS bound.
    pub fn from_moments(mean: Vector2<f64>, cov: Matrix2<f64>) -> Result<Self> {
        if (cov[(0, 1)] - cov[(1, 0)]).abs() > 1e-12 {
            return Err(Error::InvalidState("covariance is not symmetric".into()));
        }
        if cov[(0, 0)] <= 0.0 || cov.determinant() < 0.25 - 1e-12 {
            return Err(Error::InvalidState(format!(
                "covariance violates det G >= 1/4 (det = {})",
                cov.determinant()
            )));
        }
        Ok(GaussianState { mean, cov, params: None })
    }

    pub fn vacuum() -> Self {
        make_gaussian(1.0, 1.0, 0.0, [0.0, 0.0]).expect("vacuum parameters are valid")
    }

    /// Coherent state `|alpha>`; the mean is `sqrt(2) (Re alpha, Im alpha)`.
    pub fn coherent(re: f64, im: f64) -> Self {
        let s = std::f64::consts::SQRT_2;
        make_gaussian(1.0, 1.0, 0.0, [s * re, s * im]).expect("coherent parameters are valid")
    }

    pub fn mean(&self) -> Vector2<f64> {
        self.mean
    }

    pub fn cov(&self) -> Matrix2<f64> {
        self.cov
    }

    pub fn params(&self) -> Option<GaussianParams> {
        self.params
    }

    /// Mean and variance of the rotated quadrature `X cos t + P sin t`.
    pub fn quadrature_stats(&self, theta: f64) -> (f64, f64) {
        let u = Vector2::new(theta.cos(), theta.sin());
        (u.dot(&self.mean), (u.transpose() * self.cov * u)[(0, 0)])
    }
}
