//! Small dense helpers shared by the moment and bound computations.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};

/// Sums a sequence with a fixed pairwise tree, so the result depends only on
/// the order of the input and not on how it was produced.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    match values.len() {
        0 => 0.0,
        1 => values[0],
        n if n <= 8 => values.iter().sum(),
        n => {
            let (lo, hi) = values.split_at(n / 2);
            pairwise_sum(lo) + pairwise_sum(hi)
        }
    }
}

/// Element-wise pairwise sum of equally shaped matrices.
pub fn pairwise_sum_matrices(mats: &[DMatrix<f64>]) -> DMatrix<f64> {
    match mats.len() {
        0 => panic!("pairwise_sum_matrices on empty slice"),
        1 => mats[0].clone(),
        n => {
            let (lo, hi) = mats.split_at(n / 2);
            pairwise_sum_matrices(lo) + pairwise_sum_matrices(hi)
        }
    }
}

/// Trace of the inverse of a symmetric positive-definite matrix.
///
/// When the Cholesky factorization fails the eigenvector of the smallest
/// eigenvalue is reported as the null direction.
pub fn inverse_trace(m: &DMatrix<f64>) -> Result<f64> {
    let sym = (m + m.transpose()) * 0.5;
    match sym.clone().cholesky() {
        Some(ch) => {
            let inv = ch.inverse();
            Ok(inv.trace())
        }
        None => Err(Error::Singular(null_direction(&sym))),
    }
}

pub fn null_direction(m: &DMatrix<f64>) -> String {
    let eig = SymmetricEigen::new(m.clone());
    let (idx, val) = eig
        .eigenvalues
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, v)| (i, *v))
        .unwrap_or((0, 0.0));
    let v: Vec<String> = eig
        .eigenvectors
        .column(idx)
        .iter()
        .map(|x| format!("{x:.4}"))
        .collect();
    format!("[{}] (eigenvalue {val:e})", v.join(", "))
}

/// Solves `m x = b` for symmetric positive-definite `m`.
pub fn spd_solve(m: &DMatrix<f64>, b: &DVector<f64>) -> Result<DVector<f64>> {
    let sym = (m + m.transpose()) * 0.5;
    match sym.clone().cholesky() {
        Some(ch) => Ok(ch.solve(b)),
        None => Err(Error::Singular(null_direction(&sym))),
    }
}

pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut acc = 1.0;
    for i in 0..k {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
    }
    acc
}

/// `(2m-1)!!`, the even central moment `E[Z^{2m}]` of a standard normal.
fn odd_double_factorial(m: usize) -> f64 {
    (1..=m).map(|i| (2 * i - 1) as f64).product()
}

/// Raw moment `E[Y^k]` of `Y ~ N(mean, var)`.
pub fn normal_moment(mean: f64, var: f64, k: usize) -> f64 {
    let mut acc = 0.0;
    for j in (0..=k).step_by(2) {
        acc += binomial(k, j) * mean.powi((k - j) as i32) * var.powi((j / 2) as i32)
            * odd_double_factorial(j / 2);
    }
    acc
}

/// Raw monomial moment `E[prod_i z_i^{e_i}]` of a multivariate normal,
/// by the Stein recursion `E[z_i f] = m_i E[f] + sum_j C_ij E[d_j f]`.
pub fn gaussian_moment(mean: &[f64], cov: &DMatrix<f64>, exps: &[usize]) -> f64 {
    debug_assert_eq!(mean.len(), exps.len());
    let Some(i) = exps.iter().position(|&e| e > 0) else {
        return 1.0;
    };
    let mut rest = exps.to_vec();
    rest[i] -= 1;
    let mut acc = mean[i] * gaussian_moment(mean, cov, &rest);
    for j in 0..rest.len() {
        if rest[j] == 0 || cov[(i, j)] == 0.0 {
            continue;
        }
        let c = rest[j] as f64;
        let mut lower = rest.clone();
        lower[j] -= 1;
        acc += cov[(i, j)] * c * gaussian_moment(mean, cov, &lower);
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normal_moments_match_known_values() {
        assert_eq!(normal_moment(0.0, 1.0, 4), 3.0);
        assert_eq!(normal_moment(0.0, 2.0, 6), 15.0 * 8.0);
        // E[(m+Z)^3] = m^3 + 3m
        assert!((normal_moment(1.5, 1.0, 3) - (1.5f64.powi(3) + 4.5)).abs() < 1e-14);
    }

    #[test]
    fn multivariate_moment_reduces_to_isserlis() {
        let cov = DMatrix::from_row_slice(2, 2, &[2.0, 0.5, 0.5, 1.0]);
        // E[x^2 y^2] = s_xx s_yy + 2 s_xy^2
        let v = gaussian_moment(&[0.0, 0.0], &cov, &[2, 2]);
        assert!((v - (2.0 + 2.0 * 0.25)).abs() < 1e-14);
        let v = gaussian_moment(&[0.3, 0.0], &cov, &[4, 0]);
        assert!((v - normal_moment(0.3, 2.0, 4)).abs() < 1e-13);
    }

    #[test]
    fn pairwise_sum_is_exact_on_integers() {
        let v: Vec<f64> = (1..=1000).map(|i| i as f64).collect();
        assert_eq!(pairwise_sum(&v), 500500.0);
    }

    #[test]
    fn singular_matrix_reports_direction() {
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 1.0, 1.0]);
        match inverse_trace(&m) {
            Err(Error::Singular(msg)) => assert!(msg.contains("0.7071")),
            other => panic!("expected singular, got {other:?}"),
        }
    }
}
