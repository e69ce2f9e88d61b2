//! Husimi (Q-function) moments in heterodyne data coordinates
//! `x = sqrt(2) Re(alpha)`, `p = sqrt(2) Im(alpha)`.
//!
//! Q-function moments are antinormally ordered: `E_Q[alpha^P conj(alpha)^Q] =
//! <a^P a^dag^Q>`. Monomials in `(x, p)` are expanded into that basis and the
//! operator averages are taken with exact ladder coefficients.

use nalgebra::{DMatrix, Matrix2};
use num_complex::Complex64;

use crate::linalg::{binomial, gaussian_moment};
use crate::states::{FockState, State, TwoModeState};

/// Largest total degree tabulated.
pub const MAX_DEGREE: usize = 4;

/// `<a^p a^dag^q>` for a Fock-basis density matrix.
pub fn antinormal_moment(rho: &DMatrix<Complex64>, p: usize, q: usize) -> Complex64 {
    let d = rho.nrows();
    let mut acc = Complex64::new(0.0, 0.0);
    for n in 0..d {
        if n + q < p {
            continue;
        }
        let m = n + q - p;
        if m >= d {
            continue;
        }
        // sqrt((n+q)!/n!) * sqrt((n+q)!/(n+q-p)!)
        let raise: f64 = ((n + 1)..=(n + q)).map(|j| j as f64).product::<f64>().sqrt();
        let lower: f64 = ((n + q - p + 1)..=(n + q)).map(|j| j as f64).product::<f64>().sqrt();
        acc += rho[(n, m)] * (raise * lower);
    }
    acc
}

/// `E_Q[x^j p^k]` for a Fock-basis state.
fn fock_q_moment(f: &FockState, j: usize, k: usize) -> f64 {
    let rho = f.rho();
    let mut acc = Complex64::new(0.0, 0.0);
    for s in 0..=j {
        for t in 0..=k {
            let sign = if (k - t) % 2 == 0 { 1.0 } else { -1.0 };
            let coeff = binomial(j, s) * binomial(k, t) * sign;
            let pw = s + t;
            let qw = (j - s) + (k - t);
            acc += antinormal_moment(rho, pw, qw) * coeff;
        }
    }
    // (-i)^k 2^{-(j+k)/2}
    let phase = Complex64::new(0.0, -1.0).powu(k as u32);
    (acc * phase * 2f64.powf(-((j + k) as f64) / 2.0)).re
}

/// `E_Q[x^j p^k]` for any single-mode state.
pub fn husimi_moment(state: &State, j: usize, k: usize) -> f64 {
    match state {
        State::Gaussian(g) => {
            let m = g.mean();
            let c = g.cov() + Matrix2::identity() * 0.5;
            let cov = DMatrix::from_column_slice(2, 2, c.as_slice());
            gaussian_moment(&[m[0], m[1]], &cov, &[j, k])
        }
        State::Fock(f) => fock_q_moment(f, j, k),
    }
}

/// Table of `E_Q[x^j p^k]` for `j + k <= 4`.
#[derive(Debug, Clone, PartialEq)]
pub struct HusimiMoments {
    table: [[f64; MAX_DEGREE + 1]; MAX_DEGREE + 1],
}

impl HusimiMoments {
    pub fn moment(&self, j: usize, k: usize) -> f64 {
        assert!(j + k <= MAX_DEGREE, "degree {} not tabulated", j + k);
        self.table[j][k]
    }

    pub fn mean(&self) -> [f64; 2] {
        [self.table[1][0], self.table[0][1]]
    }

    pub fn var_x(&self) -> f64 {
        self.table[2][0] - self.table[1][0].powi(2)
    }

    pub fn var_p(&self) -> f64 {
        self.table[0][2] - self.table[0][1].powi(2)
    }

    pub fn var_x2(&self) -> f64 {
        self.table[4][0] - self.table[2][0].powi(2)
    }

    pub fn var_p2(&self) -> f64 {
        self.table[0][4] - self.table[0][2].powi(2)
    }

    pub fn var_xp(&self) -> f64 {
        self.table[2][2] - self.table[1][1].powi(2)
    }

    /// Central covariance of the heterodyne outcomes.
    pub fn g_het(&self) -> Matrix2<f64> {
        let [mx, mp] = self.mean();
        let c = self.table[1][1] - mx * mp;
        Matrix2::new(self.var_x(), c, c, self.var_p())
    }

    /// Raw second-moment matrix `E_Q[(x,p)(x,p)^T]`.
    pub fn second_moments(&self) -> Matrix2<f64> {
        Matrix2::new(self.table[2][0], self.table[1][1], self.table[1][1], self.table[0][2])
    }
}

pub fn husimi_moments(state: &State) -> HusimiMoments {
    let mut table = [[0.0; MAX_DEGREE + 1]; MAX_DEGREE + 1];
    for (j, row) in table.iter_mut().enumerate() {
        for (k, v) in row.iter_mut().enumerate() {
            if j + k <= MAX_DEGREE {
                *v = husimi_moment(state, j, k);
            }
        }
    }
    HusimiMoments { table }
}

/// Two-mode Q moments `E_Q[x1^a p1^b x2^c p2^d]` for `a+b+c+d <= 4`.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoModeHusimi {
    table: Vec<f64>,
}

const SIDE: usize = MAX_DEGREE + 1;

fn index(e: [usize; 4]) -> usize {
    ((e[0] * SIDE + e[1]) * SIDE + e[2]) * SIDE + e[3]
}

impl TwoModeHusimi {
    pub fn moment(&self, e: [usize; 4]) -> f64 {
        assert!(e.iter().sum::<usize>() <= MAX_DEGREE);
        self.table[index(e)]
    }

    fn var_of(&self, a: [usize; 4]) -> f64 {
        let sq = a.map(|x| 2 * x);
        self.moment(sq) - self.moment(a).powi(2)
    }

    /// Per-sample variances entering the first-moment heterodyne bound,
    /// ordered `x1, p1, x2, p2`.
    pub fn first_moment_variances(&self) -> [f64; 4] {
        [
            self.var_of([1, 0, 0, 0]),
            self.var_of([0, 1, 0, 0]),
            self.var_of([0, 0, 1, 0]),
            self.var_of([0, 0, 0, 1]),
        ]
    }

    /// The ten weighted variance terms of the second-moment heterodyne bound,
    /// as `(label, weight, variance)`.
    pub fn second_moment_terms(&self) -> Vec<(&'static str, f64, f64)> {
        vec![
            ("x1^2", 1.0, self.var_of([2, 0, 0, 0])),
            ("p1^2", 1.0, self.var_of([0, 2, 0, 0])),
            ("x1p1", 2.0, self.var_of([1, 1, 0, 0])),
            ("x2^2", 1.0, self.var_of([0, 0, 2, 0])),
            ("p2^2", 1.0, self.var_of([0, 0, 0, 2])),
            ("x2p2", 2.0, self.var_of([0, 0, 1, 1])),
            ("x1x2", 2.0, self.var_of([1, 0, 1, 0])),
            ("x1p2", 2.0, self.var_of([1, 0, 0, 1])),
            ("x2p1", 2.0, self.var_of([0, 1, 1, 0])),
            ("p1p2", 2.0, self.var_of([0, 1, 0, 1])),
        ]
    }

    /// Central 4x4 covariance of the heterodyne outcomes.
    pub fn g_het(&self) -> DMatrix<f64> {
        let unit = |i: usize| {
            let mut e = [0; 4];
            e[i] = 1;
            e
        };
        DMatrix::from_fn(4, 4, |i, j| {
            let mut e = unit(i);
            e[j] += 1;
            self.moment(e) - self.moment(unit(i)) * self.moment(unit(j))
        })
    }
}

pub fn husimi_moments_two_mode(state: &TwoModeState) -> TwoModeHusimi {
    let mut table = vec![0.0; SIDE.pow(4)];
    let single = match state {
        TwoModeState::Product(a, b) => Some((husimi_moments(a), husimi_moments(b))),
        TwoModeState::Tmsv(_) => None,
    };
    for a in 0..SIDE {
        for b in 0..SIDE - a {
            for c in 0..SIDE - a - b {
                for d in 0..SIDE - a - b - c {
                    let e = [a, b, c, d];
                    table[index(e)] = match (&single, state) {
                        (Some((m1, m2)), _) => m1.moment(a, b) * m2.moment(c, d),
                        (None, TwoModeState::Tmsv(t)) => {
                            let cov = t.covariance() + DMatrix::identity(4, 4) * 0.5;
                            gaussian_moment(&[0.0; 4], &cov, &e)
                        }
                        _ => unreachable!(),
                    };
                }
            }
        }
    }
    TwoModeHusimi { table }
}
