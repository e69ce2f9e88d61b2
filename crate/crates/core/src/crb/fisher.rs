//! Homodyne Fisher matrices by uniform periodic quadrature over `[0, pi)`.
//!
//! The integrands are smooth and pi-periodic, so the trapezoid rule converges
//! exponentially in the node count. Values are per sample (the factor `N`
//! cancels in every scaled bound).

use std::f64::consts::PI;

use nalgebra::{DMatrix, SymmetricEigen};
use rayon::prelude::*;

use super::{Order, Sector};
use crate::error::{Error, Result};
use crate::linalg::{inverse_trace, pairwise_sum};
use crate::phase_space::moments::marginal;
use crate::phase_space::{joint_quad_moment, quad_variance_of_power};
use crate::states::{State, TwoModeState};

pub const MIN_NODES: usize = 8;

#[derive(Debug, Clone, PartialEq)]
pub struct FisherMatrix {
    pub order: Order,
    pub sector: Sector,
    pub matrix: DMatrix<f64>,
    pub nodes: usize,
}

impl FisherMatrix {
    /// `Tr F^{-1}`, the scaled bound of this sector (before any multiplicity).
    pub fn inverse_trace(&self) -> Result<f64> {
        inverse_trace(&self.matrix)
    }

    pub fn condition_number(&self) -> f64 {
        let eig = SymmetricEigen::new(self.matrix.clone());
        eig.eigenvalues.max() / eig.eigenvalues.min()
    }
}

/// Moment-parameter direction: `u_t` for first moments, `vec(u_t u_t^T)` for second.
pub fn kernel_vector(order: Order, theta: f64) -> Vec<f64> {
    let (s, c) = theta.sin_cos();
    match order {
        Order::First => vec![c, s],
        Order::Second => vec![c * c, std::f64::consts::SQRT_2 * s * c, s * s],
    }
}

fn check_nodes(nodes: usize) -> Result<()> {
    if nodes < MIN_NODES {
        return Err(Error::InvalidParameter(format!("{nodes} quadrature nodes; need >= {MIN_NODES}")));
    }
    Ok(())
}

/// Sums `w_i v_i v_i^T` over nodes with a fixed pairwise tree per entry.
fn accumulate(dim: usize, terms: &[(Vec<f64>, f64)]) -> DMatrix<f64> {
    DMatrix::from_fn(dim, dim, |a, b| {
        let vals: Vec<f64> = terms.iter().map(|(v, w)| w * v[a] * v[b]).collect();
        pairwise_sum(&vals)
    })
}

pub fn fisher_hom(state: &State, order: Order, nodes: usize) -> Result<FisherMatrix> {
    check_nodes(nodes)?;
    let terms = (0..nodes)
        .map(|i| {
            let theta = PI * i as f64 / nodes as f64;
            let var = quad_variance_of_power(state, theta, order.as_usize())?;
            Ok((kernel_vector(order, theta), 1.0 / var))
        })
        .collect::<Result<Vec<_>>>()?;
    let matrix = accumulate(order.dim(), &terms) / nodes as f64;
    Ok(FisherMatrix { order, sector: Sector::Mode1, matrix, nodes })
}

/// Fisher matrix at a finite phase design with weights `N_k / N`.
pub fn fisher_hom_design(state: &State, order: Order, phases: &[f64], weights: &[f64]) -> Result<DMatrix<f64>> {
    let terms = phases
        .iter()
        .zip(weights)
        .map(|(&t, &w)| {
            let var = quad_variance_of_power(state, t, order.as_usize())?;
            Ok((kernel_vector(order, t), w / var))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(accumulate(order.dim(), &terms))
}

/// Single-mode sector `mode` (0 or 1) of a two-mode state.
pub fn fisher_hom_sector(state: &TwoModeState, mode: usize, order: Order, nodes: usize) -> Result<FisherMatrix> {
    let mut f = fisher_hom(&marginal(state, mode), order, nodes)?;
    f.sector = if mode == 0 { Sector::Mode1 } else { Sector::Mode2 };
    Ok(f)
}

/// `u_{t1} (x) u_{t2}`, ordered `(X1X2, X1P2, P1X2, P1P2)`.
pub fn cross_kernel_vector(t1: f64, t2: f64) -> Vec<f64> {
    let (s1, c1) = t1.sin_cos();
    let (s2, c2) = t2.sin_cos();
    vec![c1 * c2, c1 * s2, s1 * c2, s1 * s2]
}

pub fn cross_denominator(state: &TwoModeState, t1: f64, t2: f64) -> Result<f64> {
    let hi = joint_quad_moment(state, t1, t2, 2, 2)?;
    let lo = joint_quad_moment(state, t1, t2, 1, 1)?;
    let v = hi - lo * lo;
    if !(v > 0.0) {
        return Err(Error::NonPositiveVariance { theta: t1 + t2, value: v });
    }
    Ok(v)
}

/// Cross-mode Fisher matrix on a `nodes x nodes` periodic grid.
pub fn fisher_hom_cross(state: &TwoModeState, nodes: usize) -> Result<FisherMatrix> {
    check_nodes(nodes)?;
    let rows: Vec<DMatrix<f64>> = (0..nodes)
        .into_par_iter()
        .map(|i| {
            let t1 = PI * i as f64 / nodes as f64;
            let terms = (0..nodes)
                .map(|j| {
                    let t2 = PI * j as f64 / nodes as f64;
                    Ok((cross_kernel_vector(t1, t2), 1.0 / cross_denominator(state, t1, t2)?))
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(accumulate(4, &terms))
        })
        .collect::<Result<Vec<_>>>()?;
    let matrix = crate::linalg::pairwise_sum_matrices(&rows) / (nodes * nodes) as f64;
    Ok(FisherMatrix { order: Order::Second, sector: Sector::Cross, matrix, nodes })
}
