//! Independent reference computations: Gauss–Hermite quadrature, wavefunction
//! and phase-space integrals, matrix exponentials and Schmidt-form two-mode
//! moments.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

/// Gauss–Hermite rule for weight `exp(-t^2)`: Golub–Welsch nodes polished by
/// Newton steps, Christoffel weights `1 / sum_k phi_k(t)^2`.
pub fn gauss_hermite(n: usize) -> (Vec<f64>, Vec<f64>) {
    let jacobi = DMatrix::from_fn(n, n, |i, j| {
        if i + 1 == j || j + 1 == i {
            (i.max(j) as f64 / 2.0).sqrt()
        } else {
            0.0
        }
    });
    let mut nodes: Vec<f64> = SymmetricEigen::new(jacobi).eigenvalues.iter().cloned().collect();
    nodes.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut weights = Vec::with_capacity(n);
    for t in nodes.iter_mut() {
        for _ in 0..3 {
            let h = scaled_hermite(*t, n + 1);
            let deriv = (2.0 * n as f64).sqrt() * h[n - 1];
            *t -= h[n] / deriv;
        }
        let h = scaled_hermite(*t, n);
        weights.push(1.0 / h.iter().map(|v| v * v).sum::<f64>());
    }
    (nodes, weights)
}

/// `exp(t^2/2) psi_n(t)` for the oscillator eigenfunctions with `<X^2> = 1/2` in the vacuum.
fn scaled_hermite(t: f64, count: usize) -> Vec<f64> {
    let mut h = vec![0.0; count];
    if count == 0 {
        return h;
    }
    h[0] = std::f64::consts::PI.powf(-0.25);
    if count > 1 {
        h[1] = 2f64.sqrt() * t * h[0];
    }
    for n in 2..count {
        h[n] = (2.0 / n as f64).sqrt() * t * h[n - 1] - ((n as f64 - 1.0) / n as f64).sqrt() * h[n - 2];
    }
    h
}

/// `<X_theta^k>` of a pure Fock-basis state from its position wavefunction.
pub fn wavefunction_moment(amps: &[Complex64], theta: f64, k: i32) -> f64 {
    let (ts, ws) = gauss_hermite(90);
    let rotated: Vec<Complex64> =
        amps.iter().enumerate().map(|(n, c)| c * Complex64::from_polar(1.0, -(n as f64) * theta)).collect();
    ts.iter()
        .zip(&ws)
        .map(|(&t, &w)| {
            let h = scaled_hermite(t, amps.len());
            let psi: Complex64 = rotated.iter().zip(&h).map(|(c, hn)| c * hn).sum();
            w * psi.norm_sqr() * t.powi(k)
        })
        .sum()
}

/// `E_Q[x^j p^k]` by 2D Gauss–Hermite integration of `|<alpha|psi>|^2 / (2 pi)`.
pub fn husimi_quadrature_moment(amps: &[Complex64], j: i32, k: i32) -> f64 {
    let (ts, ws) = gauss_hermite(61);
    let mut acc = 0.0;
    for (&tx, &wx) in ts.iter().zip(&ws) {
        for (&tp, &wp) in ts.iter().zip(&ws) {
            // x = sqrt2 tx, p = sqrt2 tp absorbs exp(-|alpha|^2) into the weights
            let alpha = Complex64::new(tx, tp);
            let mut overlap = Complex64::new(0.0, 0.0);
            let mut coh = Complex64::new(1.0, 0.0);
            for (n, c) in amps.iter().enumerate() {
                if n > 0 {
                    coh = coh * alpha.conj() / (n as f64).sqrt();
                }
                overlap += coh * c;
            }
            let x = std::f64::consts::SQRT_2 * tx;
            let p = std::f64::consts::SQRT_2 * tp;
            acc += wx * wp * overlap.norm_sqr() * x.powi(j) * p.powi(k);
        }
    }
    acc / std::f64::consts::PI
}

pub fn annihilation(dim: usize) -> DMatrix<Complex64> {
    DMatrix::from_fn(dim, dim, |i, j| {
        if j == i + 1 {
            Complex64::new((j as f64).sqrt(), 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    })
}

/// Displacement operator by matrix exponential in a large truncation.
pub fn displacement(alpha: Complex64, dim: usize) -> DMatrix<Complex64> {
    let a = annihilation(dim);
    let gen = a.adjoint() * alpha - &a * alpha.conj();
    gen.exp()
}

/// Squeezed vacuum `exp((r/2)(a^2 - a^dag^2))|0>` truncated to `keep` levels.
pub fn squeezed_vacuum(r: f64, dim: usize, keep: usize) -> DVector<Complex64> {
    let a = annihilation(dim);
    let a2 = &a * &a;
    let gen = (&a2 - a2.adjoint()) * Complex64::new(r / 2.0, 0.0);
    let s = gen.exp();
    DVector::from_fn(keep, |n, _| s[(n, 0)])
}

/// Table of `E_Q[x^j p^k]`, `j + k <= 4`, for a density matrix by 2D Gauss–Hermite
/// integration of `<alpha|rho|alpha>`.
pub fn husimi_quadrature_table_rho(rho: &DMatrix<Complex64>, points: usize) -> [[f64; 5]; 5] {
    let (ts, ws) = gauss_hermite(points);
    let d = rho.nrows();
    let mut table = [[0.0; 5]; 5];
    let mut u = DVector::from_element(d, Complex64::new(1.0, 0.0));
    for (&tx, &wx) in ts.iter().zip(&ws) {
        for (&tp, &wp) in ts.iter().zip(&ws) {
            let alpha = Complex64::new(tx, tp);
            // u_n = alpha^n / sqrt(n!), the Gaussian factor lives in the weights
            for n in 1..d {
                u[n] = u[n - 1] * alpha / (n as f64).sqrt();
            }
            let q = wx * wp * u.dotc(&(rho * &u)).re / std::f64::consts::PI;
            let x = std::f64::consts::SQRT_2 * tx;
            let p = std::f64::consts::SQRT_2 * tp;
            for (j, row) in table.iter_mut().enumerate() {
                for (k, v) in row.iter_mut().enumerate().take(5 - j) {
                    *v += q * x.powi(j as i32) * p.powi(k as i32);
                }
            }
        }
    }
    table
}

/// Gaussian state `D(alpha) R(phi) S(r) rho_th S^dag R^dag D^dag` built by matrix
/// exponentials in dimension `dim` and truncated to `keep` levels.
pub fn gaussian_density(nbar: f64, r: f64, phi: f64, alpha: Complex64, dim: usize, keep: usize) -> DMatrix<Complex64> {
    let a = annihilation(dim);
    let a2 = &a * &a;
    let sq = ((&a2 - a2.adjoint()) * Complex64::new(r / 2.0, 0.0)).exp();
    let rot = DMatrix::from_fn(dim, dim, |i, j| {
        if i == j {
            Complex64::from_polar(1.0, -(i as f64) * phi)
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    let u = displacement(alpha, dim) * rot * sq;
    let thermal = DMatrix::from_fn(dim, dim, |i, j| {
        if i == j {
            Complex64::new(nbar.powi(i as i32) / (nbar + 1.0).powi(i as i32 + 1), 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    let full = &u * thermal * u.adjoint();
    full.view((0, 0), (keep, keep)).into_owned()
}

/// First moments and covariance of a single-mode density matrix.
pub fn moments_of_density(rho: &DMatrix<Complex64>) -> ([f64; 2], [[f64; 2]; 2]) {
    let d = rho.nrows();
    let a = annihilation(d);
    let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let i = Complex64::new(0.0, 1.0);
    let x = (&a + a.adjoint()) * h;
    let p = (&a - a.adjoint()) * (h / i);
    let tr = |m: &DMatrix<Complex64>| (rho * m).trace().re;
    let (mx, mp) = (tr(&x), tr(&p));
    let xx = tr(&(&x * &x));
    let pp = tr(&(&p * &p));
    let xp = tr(&((&x * &p + &p * &x) * Complex64::new(0.5, 0.0)));
    ([mx, mp], [[xx - mx * mx, xp - mx * mp], [xp - mx * mp, pp - mp * mp]])
}

/// Two-mode state vector `sum_n c_n |n, n>` in a `dim x dim` product basis,
/// index `n1 * dim + n2`.
pub fn schmidt_vector(coeffs: &[f64], dim: usize) -> DVector<Complex64> {
    let mut v = DVector::zeros(dim * dim);
    for (n, c) in coeffs.iter().enumerate() {
        v[n * dim + n] = Complex64::new(*c, 0.0);
    }
    v
}

/// TMSV Schmidt coefficients `tanh^n / cosh` for `n < count`.
pub fn tmsv_coeffs(zeta: f64, count: usize) -> Vec<f64> {
    (0..count).map(|n| zeta.tanh().powi(n as i32) / zeta.cosh()).collect()
}

/// Ladder operator on one mode of a product-basis vector.
pub fn ladder(v: &DVector<Complex64>, dim: usize, mode: usize, raise: bool) -> DVector<Complex64> {
    let mut out = DVector::zeros(v.len());
    for n1 in 0..dim {
        for n2 in 0..dim {
            let c = v[n1 * dim + n2];
            if c == Complex64::new(0.0, 0.0) {
                continue;
            }
            let n = if mode == 0 { n1 } else { n2 };
            let (m, amp) = if raise {
                if n + 1 >= dim {
                    continue;
                }
                (n + 1, ((n + 1) as f64).sqrt())
            } else {
                if n == 0 {
                    continue;
                }
                (n - 1, (n as f64).sqrt())
            };
            let idx = if mode == 0 { m * dim + n2 } else { n1 * dim + m };
            out[idx] += c * amp;
        }
    }
    out
}

/// `X_theta` on one mode: `(a e^{-i theta} + a^dag e^{i theta}) / sqrt2`.
pub fn rotated_quadrature(v: &DVector<Complex64>, dim: usize, mode: usize, theta: f64) -> DVector<Complex64> {
    let lo = ladder(v, dim, mode, false) * Complex64::from_polar(1.0, -theta);
    let hi = ladder(v, dim, mode, true) * Complex64::from_polar(1.0, theta);
    (lo + hi) * Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0)
}

/// `<X1_t1^j X2_t2^k>`.
pub fn joint_moment(v: &DVector<Complex64>, dim: usize, t1: f64, t2: f64, j: usize, k: usize) -> f64 {
    let mut w = v.clone();
    for _ in 0..k {
        w = rotated_quadrature(&w, dim, 1, t2);
    }
    for _ in 0..j {
        w = rotated_quadrature(&w, dim, 0, t1);
    }
    v.dotc(&w).re
}

/// Antinormally ordered `<a1^p a1dag^q a2^r a2dag^s>`, i.e. `E_Q[alpha1^p conj^q alpha2^r conj^s]`.
pub fn antinormal_two_mode(v: &DVector<Complex64>, dim: usize, p: usize, q: usize, r: usize, s: usize) -> Complex64 {
    let raise = |mut w: DVector<Complex64>, mode: usize, k: usize| {
        for _ in 0..k {
            w = ladder(&w, dim, mode, true);
        }
        w
    };
    let right = raise(raise(v.clone(), 0, q), 1, s);
    let left = raise(raise(v.clone(), 0, p), 1, r);
    left.dotc(&right)
}

/// Heterodyne second-moment matrix `E_Q[q_i q_j]` over `(x1, p1, x2, p2)`.
pub fn husimi_second_moments_two_mode(v: &DVector<Complex64>, dim: usize) -> DMatrix<f64> {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let i = Complex64::new(0.0, 1.0);
    // each quadrature as (coefficient of alpha, coefficient of conj(alpha)) on its mode
    let lin = [
        (0, Complex64::new(h, 0.0), Complex64::new(h, 0.0)),
        (0, -i * h, i * h),
        (1, Complex64::new(h, 0.0), Complex64::new(h, 0.0)),
        (1, -i * h, i * h),
    ];
    DMatrix::from_fn(4, 4, |a, b| {
        let mut acc = Complex64::new(0.0, 0.0);
        for (ua, ca) in [(true, lin[a].1), (false, lin[a].2)] {
            for (ub, cb) in [(true, lin[b].1), (false, lin[b].2)] {
                let mut e = [0usize; 4];
                let slot = |mode: usize, un: bool| 2 * mode + usize::from(!un);
                e[slot(lin[a].0, ua)] += 1;
                e[slot(lin[b].0, ub)] += 1;
                acc += ca * cb * antinormal_two_mode(v, dim, e[0], e[1], e[2], e[3]);
            }
        }
        acc.re
    })
}

pub fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}
