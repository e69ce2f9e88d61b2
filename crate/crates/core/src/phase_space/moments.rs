//! Rotated-quadrature moments `<X_t^k>`.
//!
//! For a Fock-basis state, `X_t = e^{itN} X e^{-itN}`, so
//! `<X_t^k> = sum_{m,n} rho_{nm} (X^k)_{mn} e^{it(m-n)}`: a trigonometric
//! polynomial of degree `k`. Its coefficients are computed once per state
//! from `X^k` built in a dimension padded by `k` levels, after which every
//! phase costs `O(k)`.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{gaussian_moment, normal_moment};
use crate::states::{State, TwoModeState};

pub const MAX_ORDER: usize = 8;

/// Fourier coefficients of `<X_t^k>` for `k <= MAX_ORDER`.
#[derive(Debug, Clone)]
pub struct QuadratureSeries {
    // harmonics[k][delta + k], delta in -k..=k
    harmonics: Vec<Vec<Complex64>>,
}

/// Position quadrature `(a + a^dag)/sqrt(2)` in dimension `dim`.
pub fn position_matrix(dim: usize) -> DMatrix<f64> {
    let mut x = DMatrix::zeros(dim, dim);
    for n in 0..dim.saturating_sub(1) {
        let v = ((n + 1) as f64 / 2.0).sqrt();
        x[(n, n + 1)] = v;
        x[(n + 1, n)] = v;
    }
    x
}

impl QuadratureSeries {
    pub fn from_density(rho: &DMatrix<Complex64>) -> Self {
        let d = rho.nrows();
        let x = position_matrix(d + MAX_ORDER);
        let mut power = DMatrix::<f64>::identity(d + MAX_ORDER, d + MAX_ORDER);
        let mut harmonics = Vec::with_capacity(MAX_ORDER + 1);
        for k in 0..=MAX_ORDER {
            if k > 0 {
                power = &power * &x;
            }
            let ki = k as isize;
            let mut coeffs = vec![Complex64::new(0.0, 0.0); 2 * k + 1];
            for delta in -ki..=ki {
                if (delta - ki).rem_euclid(2) != 0 {
                    continue;
                }
                let mut acc = Complex64::new(0.0, 0.0);
                for n in 0..d {
                    let m = n as isize + delta;
                    if m < 0 || m as usize >= d {
                        continue;
                    }
                    let m = m as usize;
                    acc += rho[(n, m)] * power[(m, n)];
                }
                coeffs[(delta + ki) as usize] = acc;
            }
            harmonics.push(coeffs);
        }
        QuadratureSeries { harmonics }
    }

    pub fn eval(&self, theta: f64, k: usize) -> f64 {
        let c = &self.harmonics[k];
        let ki = k as isize;
        let mut acc = 0.0;
        for (i, coeff) in c.iter().enumerate() {
            let delta = i as isize - ki;
            if coeff.re == 0.0 && coeff.im == 0.0 {
                continue;
            }
            let (s, co) = (delta as f64 * theta).sin_cos();
            acc += coeff.re * co - coeff.im * s;
        }
        acc
    }
}

/// `<X_t^k>` for `X_t = X cos t + P sin t`.
pub fn quad_moment(state: &State, theta: f64, k: usize) -> Result<f64> {
    if k > MAX_ORDER {
        return Err(Error::UnsupportedOrder(k));
    }
    Ok(match state {
        State::Gaussian(g) => {
            let (m, v) = g.quadrature_stats(theta);
            normal_moment(m, v, k)
        }
        State::Fock(f) => f.series().eval(theta, k),
    })
}

/// `<X_t^{2M}> - <X_t^M>^2`, the per-phase variance of the order-`M` statistic.
pub fn quad_variance_of_power(state: &State, theta: f64, order: usize) -> Result<f64> {
    if order == 0 || order > MAX_ORDER / 2 {
        return Err(Error::UnsupportedOrder(2 * order));
    }
    let hi = quad_moment(state, theta, 2 * order)?;
    let lo = quad_moment(state, theta, order)?;
    let v = hi - lo * lo;
    if !(v > 0.0) {
        return Err(Error::NonPositiveVariance { theta, value: v });
    }
    Ok(v)
}

/// `<X_{1,t1}^j X_{2,t2}^k>`.
pub fn joint_quad_moment(state: &TwoModeState, t1: f64, t2: f64, j: usize, k: usize) -> Result<f64> {
    if j + k > MAX_ORDER {
        return Err(Error::UnsupportedOrder(j + k));
    }
    match state {
        TwoModeState::Product(a, b) => Ok(quad_moment(a, t1, j)? * quad_moment(b, t2, k)?),
        TwoModeState::Tmsv(t) => {
            let z = t.zeta();
            let s = (2.0 * z).cosh() / 2.0;
            let c = (2.0 * z).sinh() / 2.0 * (t1 + t2).cos();
            let cov = DMatrix::from_row_slice(2, 2, &[s, c, c, s]);
            Ok(gaussian_moment(&[0.0, 0.0], &cov, &[j, k]))
        }
    }
}

/// Marginal state of one mode, when it is available as a single-mode state.
pub(crate) fn marginal(state: &TwoModeState, mode: usize) -> State {
    match state {
        TwoModeState::Product(a, b) => {
            if mode == 0 { a.clone() } else { b.clone() }
        }
        TwoModeState::Tmsv(t) => {
            let mu = (2.0 * t.zeta()).cosh();
            State::Gaussian(
                crate::states::make_gaussian(mu, 1.0, 0.0, [0.0, 0.0]).expect("cosh >= 1"),
            )
        }
    }
}
