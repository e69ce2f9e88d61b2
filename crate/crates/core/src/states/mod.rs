//! State families and their first/second moment structure.

mod fock;
mod gaussian;
pub mod spec;
pub use spec::{ParsedState, StateSpec};
mod two_mode;

use std::f64::consts::FRAC_PI_2;
use std::f64::consts::FRAC_PI_4;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

pub use fock::{
    coherent_amplitudes, default_dim, displaced_fock_overlap, make_cat, make_cat_limit,
    make_displaced_fock, make_fock, make_photon_added, make_thermal_fock, FockState, Parity,
};
pub use gaussian::{make_gaussian, rotation, GaussianParams, GaussianState};
pub use two_mode::{make_tmsv, make_two_mode_fock, Tmsv, TwoModeState, TMSV_TAIL};

use crate::error::{Error, Result};
use crate::phase_space::{joint_quad_moment, quad_moment};

/// A single-mode state with either backend.
#[derive(Debug, Clone)]
pub enum State {
    Gaussian(GaussianState),
    Fock(FockState),
}

impl From<GaussianState> for State {
    fn from(g: GaussianState) -> Self {
        State::Gaussian(g)
    }
}

impl From<FockState> for State {
    fn from(f: FockState) -> Self {
        State::Fock(f)
    }
}

/// A state of either mode count, as produced by the spec grammar.
#[derive(Debug, Clone)]
pub enum AnyState {
    Single(State),
    Two(TwoModeState),
}

/// First moments `r`, raw second moments `G2` and covariance `G = G2 - r r^T`.
///
/// Quadrature ordering is `(X, P)` for one mode and `(X1, P1, X2, P2)` for two.
#[derive(Debug, Clone, PartialEq)]
pub struct CovMatrix {
    pub r: DVector<f64>,
    pub g2: DMatrix<f64>,
    pub g: DMatrix<f64>,
}

impl CovMatrix {
    fn from_raw(r: DVector<f64>, g2: DMatrix<f64>) -> Self {
        let g = &g2 - &r * r.transpose();
        CovMatrix { r, g2, g }
    }

    pub fn modes(&self) -> usize {
        self.r.len() / 2
    }

    /// Covariance block of mode `l` (0 or 1).
    pub fn block(&self, l: usize) -> DMatrix<f64> {
        self.g.view((2 * l, 2 * l), (2, 2)).into_owned()
    }

    /// Cross block `A12` of the raw second moments.
    pub fn cross(&self) -> Option<DMatrix<f64>> {
        (self.modes() == 2).then(|| self.g2.view((0, 2), (2, 2)).into_owned())
    }

    /// Smallest eigenvalue of `G + (i/2) Omega` (block-diagonal symplectic form).
    pub fn uncertainty_margin(&self) -> f64 {
        let n = self.g.nrows();
        let m = DMatrix::from_fn(n, n, |i, j| {
            let mut v = Complex64::new(self.g[(i, j)], 0.0);
            if i / 2 == j / 2 && i != j {
                let omega = if i % 2 == 0 { 1.0 } else { -1.0 };
                v += Complex64::new(0.0, 0.5 * omega);
            }
            v
        });
        SymmetricEigen::new(m).eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    pub fn validate(&self) -> Result<()> {
        if self.modes() == 1 {
            let det = self.g.determinant();
            if det < 0.25 - 1e-10 {
                return Err(Error::InvalidState(format!("det G = {det} < 1/4")));
            }
        } else if self.uncertainty_margin() < -1e-10 {
            return Err(Error::InvalidState("G + i Omega/2 is not positive".into()));
        }
        Ok(())
    }
}

/// Moments of a single-mode state assembled from rotated-quadrature moments.
pub fn covariance(state: &State) -> CovMatrix {
    if let State::Gaussian(g) = state {
        let m = g.mean();
        let r = DVector::from_column_slice(m.as_slice());
        let g2 = DMatrix::from_column_slice(2, 2, g.cov().as_slice()) + &r * r.transpose();
        return CovMatrix::from_raw(r, g2);
    }
    let x = quad_moment(state, 0.0, 1).expect("order 1 supported");
    let p = quad_moment(state, FRAC_PI_2, 1).expect("order 1 supported");
    let xx = quad_moment(state, 0.0, 2).expect("order 2 supported");
    let pp = quad_moment(state, FRAC_PI_2, 2).expect("order 2 supported");
    let diag = quad_moment(state, FRAC_PI_4, 2).expect("order 2 supported");
    let xp = diag - 0.5 * (xx + pp);
    CovMatrix::from_raw(DVector::from_vec(vec![x, p]), DMatrix::from_row_slice(2, 2, &[xx, xp, xp, pp]))
}

/// Two-mode moments; the cross block is filled from joint quadrature moments.
pub fn covariance_two_mode(state: &TwoModeState) -> CovMatrix {
    let (c1, c2) = match state {
        TwoModeState::Product(a, b) => (covariance(a), covariance(b)),
        TwoModeState::Tmsv(t) => {
            let g = t.covariance();
            return CovMatrix::from_raw(DVector::zeros(4), g);
        }
    };
    let mut r = DVector::zeros(4);
    r.rows_mut(0, 2).copy_from(&c1.r);
    r.rows_mut(2, 2).copy_from(&c2.r);
    let mut g2 = DMatrix::zeros(4, 4);
    g2.view_mut((0, 0), (2, 2)).copy_from(&c1.g2);
    g2.view_mut((2, 2), (2, 2)).copy_from(&c2.g2);
    for (i, t1) in [0.0, FRAC_PI_2].into_iter().enumerate() {
        for (j, t2) in [0.0, FRAC_PI_2].into_iter().enumerate() {
            let v = joint_quad_moment(state, t1, t2, 1, 1).expect("order 2 supported");
            g2[(i, 2 + j)] = v;
            g2[(2 + j, i)] = v;
        }
    }
    CovMatrix::from_raw(r, g2)
}
