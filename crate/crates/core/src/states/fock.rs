//! Truncated Fock-basis states.
//!
//! Every constructor checks the truncation: the population of the top three
//! levels must stay below `1e-10`. When no dimension is given the default
//! `max(16, n_max + 8 + ceil(4|a0|^2))` is grown in steps of four until the
//! check passes.

use std::sync::{Arc, OnceLock};

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::phase_space::moments::QuadratureSeries;

const TAIL_TOLERANCE: f64 = 1e-10;
const MAX_DIM: usize = 2048;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn sign(self) -> f64 {
        match self {
            Parity::Even => 1.0,
            Parity::Odd => -1.0,
        }
    }
}

/// A density matrix in a truncated Fock basis.
#[derive(Debug, Clone)]
pub struct FockState {
    rho: DMatrix<Complex64>,
    psi: Option<DVector<Complex64>>,
    series: OnceLock<Arc<QuadratureSeries>>,
}

impl FockState {
    /// Normalizes `psi` and validates the truncation.
    pub fn pure(psi: DVector<Complex64>) -> Result<Self> {
        let norm = psi.norm();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::InvalidState("state vector has zero norm".into()));
        }
        let psi = psi / Complex64::new(norm, 0.0);
        let rho = &psi * psi.adjoint();
        let state = FockState { rho, psi: Some(psi), series: OnceLock::new() };
        state.check_truncation()?;
        Ok(state)
    }

    /// Validates Hermiticity, unit trace, positivity and truncation.
    pub fn mixed(rho: DMatrix<Complex64>) -> Result<Self> {
        if !rho.is_square() || rho.nrows() < 3 {
            return Err(Error::InvalidState("density matrix must be square with dim >= 3".into()));
        }
        let herm_err = (&rho - rho.adjoint()).camax();
        if herm_err > 1e-12 {
            return Err(Error::InvalidState(format!("not Hermitian (deviation {herm_err:e})")));
        }
        let tr = rho.trace();
        if (tr.re - 1.0).abs() > 1e-12 || tr.im.abs() > 1e-12 {
            return Err(Error::InvalidState(format!("trace {tr} differs from 1")));
        }
        let eig = SymmetricEigen::new(rho.clone());
        let min = eig.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min);
        if min < -1e-10 {
            return Err(Error::InvalidState(format!("negative eigenvalue {min:e}")));
        }
        let state = FockState { rho, psi: None, series: OnceLock::new() };
        state.check_truncation()?;
        Ok(state)
    }

    fn check_truncation(&self) -> Result<()> {
        let tail = self.tail_population();
        if tail >= TAIL_TOLERANCE {
            return Err(Error::InvalidState(format!(
                "population {tail:e} in the top three Fock levels of dim {}",
                self.dim()
            )));
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.rho.nrows()
    }

    pub fn rho(&self) -> &DMatrix<Complex64> {
        &self.rho
    }

    /// State vector, when the state was built as a pure state.
    pub fn amplitudes(&self) -> Option<&DVector<Complex64>> {
        self.psi.as_ref()
    }

    pub fn tail_population(&self) -> f64 {
        let d = self.dim();
        (d.saturating_sub(3)..d).map(|i| self.rho[(i, i)].re).sum()
    }

    pub fn populations(&self) -> Vec<f64> {
        (0..self.dim()).map(|i| self.rho[(i, i)].re).collect()
    }

    pub(crate) fn series(&self) -> &QuadratureSeries {
        self.series.get_or_init(|| Arc::new(QuadratureSeries::from_density(&self.rho)))
    }
}

/// Default truncation before tail growth.
pub fn default_dim(n_max: usize, alpha_abs: f64) -> usize {
    16usize.max(n_max + 8 + (4.0 * alpha_abs * alpha_abs).ceil() as usize)
}

/// Builds a pure state at `dim`, or grows from `start` until the tail check passes.
fn build_pure<F>(dim: Option<usize>, start: usize, amplitudes: F) -> Result<FockState>
where
    F: Fn(usize) -> DVector<Complex64>,
{
    match dim {
        Some(d) => FockState::pure(amplitudes(d)),
        None => {
            let mut d = start;
            loop {
                match FockState::pure(amplitudes(d)) {
                    Ok(s) => return Ok(s),
                    Err(Error::InvalidState(_)) if d < MAX_DIM => d += 4,
                    Err(e) => return Err(e),
                }
            }
        }
    }
}

/// Coherent-state amplitudes `e^{-|a|^2/2} a^n / sqrt(n!)` for `n < dim`.
pub fn coherent_amplitudes(alpha: Complex64, dim: usize) -> DVector<Complex64> {
    let mut v = DVector::from_element(dim, Complex64::new(0.0, 0.0));
    let mut c = Complex64::new((-0.5 * alpha.norm_sqr()).exp(), 0.0);
    for n in 0..dim {
        if n > 0 {
            c = c * alpha / (n as f64).sqrt();
        }
        v[n] = c;
    }
    v
}

pub fn make_fock(n: usize, dim: Option<usize>) -> Result<FockState> {
    let d = dim.unwrap_or_else(|| default_dim(n, 0.0));
    if d < n + 8 {
        return Err(Error::DimTooSmall { dim: d, required: n + 8 });
    }
    let mut psi = DVector::from_element(d, Complex64::new(0.0, 0.0));
    psi[n] = Complex64::new(1.0, 0.0);
    FockState::pure(psi)
}

/// Even (`+`) or odd (`-`) superposition of `|a0>` and `|-a0>`.
///
/// The amplitudes are summed level by level and normalized numerically, so
/// small `a0` does not suffer from the cancellation in `1/sqrt(2 - 2e^{-2a0^2})`.
pub fn make_cat(parity: Parity, a0: f64, dim: Option<usize>) -> Result<FockState> {
    if !(a0 >= 0.0) || !a0.is_finite() {
        return Err(Error::InvalidParameter(format!("a0 = {a0} must be >= 0")));
    }
    if parity == Parity::Odd && a0 == 0.0 {
        return Err(Error::InvalidParameter(
            "odd cat with a0 = 0 is the null vector; use make_cat_limit".into(),
        ));
    }
    let keep = match parity {
        Parity::Even => 0,
        Parity::Odd => 1,
    };
    build_pure(dim, default_dim(0, a0), |d| {
        let mut v = coherent_amplitudes(Complex64::new(a0, 0.0), d);
        for n in 0..d {
            v[n] = if n % 2 == keep { v[n] * 2.0 } else { Complex64::new(0.0, 0.0) };
        }
        v
    })
}

/// The `a0 -> 0` limit of the cat family: `|0>` for even, `|1>` for odd.
pub fn make_cat_limit(parity: Parity, dim: Option<usize>) -> Result<FockState> {
    match parity {
        Parity::Even => make_fock(0, dim),
        Parity::Odd => make_fock(1, dim),
    }
}

/// Generalized Laguerre polynomial `L_k^{(a)}(x)` by three-term recurrence.
fn laguerre(k: usize, a: f64, x: f64) -> f64 {
    let mut prev = 1.0;
    if k == 0 {
        return prev;
    }
    let mut cur = 1.0 + a - x;
    for j in 1..k {
        let jf = j as f64;
        let next = ((2.0 * jf + 1.0 + a - x) * cur - (jf + a) * prev) / (jf + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

/// Overlap `<n| D(alpha) |m>` in closed form.
pub fn displaced_fock_overlap(alpha: Complex64, n: usize, m: usize) -> Complex64 {
    let x = alpha.norm_sqr();
    let gauss = (-0.5 * x).exp();
    if n >= m {
        // sqrt(m!/n!) alpha^{n-m}
        let mut pre = Complex64::new(1.0, 0.0);
        for j in (m + 1)..=n {
            pre = pre * alpha / (j as f64).sqrt();
        }
        pre * gauss * laguerre(m, (n - m) as f64, x)
    } else {
        let beta = -alpha.conj();
        let mut pre = Complex64::new(1.0, 0.0);
        for j in (n + 1)..=m {
            pre = pre * beta / (j as f64).sqrt();
        }
        pre * gauss * laguerre(n, (m - n) as f64, x)
    }
}

/// Displaced Fock state `D(alpha)|m>`.
pub fn make_displaced_fock(alpha: Complex64, m: usize, dim: Option<usize>) -> Result<FockState> {
    let required = m + (8.0 + 4.0 * alpha.norm_sqr()).ceil() as usize;
    if let Some(d) = dim {
        if d < required {
            return Err(Error::DimTooSmall { dim: d, required });
        }
    }
    build_pure(dim, default_dim(m, alpha.norm()), |d| {
        DVector::from_iterator(d, (0..d).map(|n| displaced_fock_overlap(alpha, n, m)))
    })
}

/// Photon-added coherent state, `a^dag^m |alpha>` normalized.
pub fn make_photon_added(alpha: Complex64, m: usize, dim: Option<usize>) -> Result<FockState> {
    let required = m + (8.0 + 4.0 * alpha.norm_sqr()).ceil() as usize;
    if let Some(d) = dim {
        if d < required {
            return Err(Error::DimTooSmall { dim: d, required });
        }
    }
    build_pure(dim, default_dim(m, alpha.norm()), |d| {
        let coh = coherent_amplitudes(alpha, d);
        let mut v = DVector::from_element(d, Complex64::new(0.0, 0.0));
        for n in m..d {
            // sqrt(n!/(n-m)!)
            let raise: f64 = ((n - m + 1)..=n).map(|j| (j as f64).sqrt()).product();
            v[n] = coh[n - m] * raise;
        }
        v
    })
}

/// Thermal state `sum_n nbar^n/(1+nbar)^{n+1} |n><n|` in the Fock basis.
///
/// Used for cross-checking the analytic Gaussian backend.
pub fn make_thermal_fock(nbar: f64, dim: usize) -> Result<FockState> {
    if !(nbar >= 0.0) {
        return Err(Error::InvalidParameter(format!("mean photon number {nbar} < 0")));
    }
    let q = nbar / (1.0 + nbar);
    let mut pops: Vec<f64> = (0..dim).map(|n| q.powi(n as i32) / (1.0 + nbar)).collect();
    let total: f64 = pops.iter().sum();
    pops.iter_mut().for_each(|p| *p /= total);
    let rho = DMatrix::from_fn(dim, dim, |i, j| {
        if i == j { Complex64::new(pops[i], 0.0) } else { Complex64::new(0.0, 0.0) }
    });
    FockState::mixed(rho)
}
