//! Two-mode experiments: joint homodyne on a phase-pair grid and joint
//! heterodyne, with block estimates of `A1`, `A2` and `A12`.

use nalgebra::{DMatrix, DVector, Matrix2, Matrix4};
use rand::Rng;
use rand_distr::StandardNormal;

use super::hom::{allocate, estimate_first_from_stats, estimate_second_from_stats, phase_grid, solve_weighted, PhaseStats};
use crate::crb::{cross_kernel_vector, Order};
use crate::error::{Error, Result};
use crate::phase_space::{HetSampler, QuadSampler};
use crate::states::TwoModeState;

/// Joint homodyne sampler for `(X1_t1, X2_t2)`.
#[derive(Debug)]
pub enum HomSampler2 {
    Product(QuadSampler, QuadSampler),
    /// Bivariate normal with variance `s` per mode and correlation `c cos(t1 + t2)`.
    Tmsv { s: f64, c: f64 },
}

impl HomSampler2 {
    pub fn new(state: &TwoModeState) -> Self {
        match state {
            TwoModeState::Product(a, b) => HomSampler2::Product(QuadSampler::new(a.clone()), QuadSampler::new(b.clone())),
            TwoModeState::Tmsv(t) => {
                let z = 2.0 * t.zeta();
                HomSampler2::Tmsv { s: z.cosh() / 2.0, c: z.sinh() / 2.0 }
            }
        }
    }

    pub fn sample_n<R: Rng + ?Sized>(&self, t1: f64, t2: f64, n: usize, rng: &mut R) -> Vec<[f64; 2]> {
        match self {
            HomSampler2::Product(a, b) => {
                let xs = a.sample_n(t1, n, rng);
                let ys = b.sample_n(t2, n, rng);
                xs.into_iter().zip(ys).map(|(x, y)| [x, y]).collect()
            }
            HomSampler2::Tmsv { s, c } => {
                let rho = c * (t1 + t2).cos() / s;
                let sd = s.sqrt();
                let tail = (1.0 - rho * rho).max(0.0).sqrt();
                (0..n)
                    .map(|_| {
                        let z1: f64 = rng.sample(StandardNormal);
                        let z2: f64 = rng.sample(StandardNormal);
                        [sd * z1, sd * (rho * z1 + tail * z2)]
                    })
                    .collect()
            }
        }
    }
}

/// Joint homodyne data on the `n_theta x n_theta` phase-pair grid.
#[derive(Debug, Clone, PartialEq)]
pub struct HomDataset2 {
    phases: Vec<f64>,
    /// Row-major over `(i, j)` phase-index pairs.
    samples: Vec<Vec<[f64; 2]>>,
}

impl HomDataset2 {
    pub fn phases(&self) -> &[f64] {
        &self.phases
    }

    pub fn total(&self) -> usize {
        self.samples.iter().map(Vec::len).sum()
    }

    fn n_theta(&self) -> usize {
        self.phases.len()
    }

    /// Pooled single-mode statistics of `mode`, grouped by that mode's phase.
    pub fn mode_stats(&self, mode: usize) -> Vec<PhaseStats> {
        let n = self.n_theta();
        (0..n)
            .map(|k| {
                let xs: Vec<f64> = (0..n)
                    .flat_map(|other| {
                        let idx = if mode == 0 { k * n + other } else { other * n + k };
                        self.samples[idx].iter().map(move |q| q[mode])
                    })
                    .collect();
                PhaseStats::from_samples(self.phases[k], &xs)
            })
            .collect()
    }

    /// Per-pair `(t1, t2, count, mean, variance)` of the product `x1 x2`.
    pub fn cross_stats(&self) -> Vec<(f64, f64, f64, f64, f64)> {
        let n = self.n_theta();
        (0..n * n)
            .map(|idx| {
                let data = &self.samples[idx];
                let m = data.len() as f64;
                let (s1, s2) = data.iter().fold((0.0, 0.0), |(a, b), q| {
                    let y = q[0] * q[1];
                    (a + y, b + y * y)
                });
                let mean = s1 / m;
                (self.phases[idx / n], self.phases[idx % n], m, mean, s2 / m - mean * mean)
            })
            .collect()
    }
}

pub fn simulate_hom2<R: Rng + ?Sized>(sampler: &HomSampler2, n_theta: usize, n: usize, rng: &mut R) -> Result<HomDataset2> {
    let phases = phase_grid(n_theta);
    let counts = allocate(n, n_theta * n_theta)?;
    let samples = counts
        .iter()
        .enumerate()
        .map(|(idx, &c)| sampler.sample_n(phases[idx / n_theta], phases[idx % n_theta], c, rng))
        .collect();
    Ok(HomDataset2 { phases, samples })
}

/// Weighted estimate of `A12`, rows `(X1, P1)` and columns `(X2, P2)`.
pub fn estimate_cross_hom(ds: &HomDataset2) -> Result<Matrix2<f64>> {
    let mut w = DMatrix::zeros(4, 4);
    let mut b = DVector::zeros(4);
    for (t1, t2, count, mean, var) in ds.cross_stats() {
        if !(var > 0.0) {
            return Err(Error::Estimation(format!("product variance {var:e} at phases ({t1}, {t2})")));
        }
        let u = DVector::from_vec(cross_kernel_vector(t1, t2));
        let scale = count / var;
        w += &u * u.transpose() * scale;
        b += &u * (scale * mean);
    }
    let a = solve_weighted(w, b, || "cross-sector weight matrix".into())?;
    Ok(Matrix2::new(a[0], a[1], a[2], a[3]))
}

/// Two-mode moment estimate: the 4-vector `r` or the 4x4 matrix `G2`.
#[derive(Debug, Clone, PartialEq)]
pub enum Estimate2 {
    First(DVector<f64>),
    Second(DMatrix<f64>),
}

fn assemble(a1: Matrix2<f64>, a2: Matrix2<f64>, a12: Matrix2<f64>) -> DMatrix<f64> {
    let mut g = DMatrix::zeros(4, 4);
    g.view_mut((0, 0), (2, 2)).copy_from(&a1);
    g.view_mut((2, 2), (2, 2)).copy_from(&a2);
    g.view_mut((0, 2), (2, 2)).copy_from(&a12);
    g.view_mut((2, 0), (2, 2)).copy_from(&a12.transpose());
    g
}

pub fn estimate_hom2(ds: &HomDataset2, order: Order) -> Result<Estimate2> {
    match order {
        Order::First => {
            let r1 = estimate_first_from_stats(&ds.mode_stats(0))?;
            let r2 = estimate_first_from_stats(&ds.mode_stats(1))?;
            Ok(Estimate2::First(DVector::from_vec(vec![r1[0], r1[1], r2[0], r2[1]])))
        }
        Order::Second => {
            let a1 = estimate_second_from_stats(&ds.mode_stats(0))?;
            let a2 = estimate_second_from_stats(&ds.mode_stats(1))?;
            Ok(Estimate2::Second(assemble(a1, a2, estimate_cross_hom(ds)?)))
        }
    }
}

/// Joint heterodyne sampler over `(x1, p1, x2, p2)`.
#[derive(Debug, Clone)]
pub enum HetSampler2 {
    Product(HetSampler, HetSampler),
    Gaussian { chol: Matrix4<f64> },
}

impl HetSampler2 {
    pub fn new(state: &TwoModeState) -> Result<Self> {
        match state {
            TwoModeState::Product(a, b) => Ok(HetSampler2::Product(HetSampler::new(a)?, HetSampler::new(b)?)),
            TwoModeState::Tmsv(t) => {
                let g = Matrix4::from_iterator(t.covariance().iter().cloned()) + Matrix4::identity() * 0.5;
                let chol = g
                    .cholesky()
                    .ok_or_else(|| Error::InvalidState("heterodyne covariance not positive".into()))?
                    .l();
                Ok(HetSampler2::Gaussian { chol })
            }
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<[f64; 4]> {
        match self {
            HetSampler2::Product(a, b) => {
                let p = a.sample(rng)?;
                let q = b.sample(rng)?;
                Ok([p[0], p[1], q[0], q[1]])
            }
            HetSampler2::Gaussian { chol } => {
                let z = nalgebra::Vector4::from_fn(|_, _| rng.sample::<f64, _>(StandardNormal));
                let v = chol * z;
                Ok([v[0], v[1], v[2], v[3]])
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HetDataset2 {
    points: Vec<[f64; 4]>,
}

impl HetDataset2 {
    pub fn new(points: Vec<[f64; 4]>) -> Self {
        HetDataset2 { points }
    }

    pub fn points(&self) -> &[[f64; 4]] {
        &self.points
    }
}

pub fn simulate_het2<R: Rng + ?Sized>(sampler: &HetSampler2, n: usize, rng: &mut R) -> Result<HetDataset2> {
    let points = (0..n).map(|_| sampler.sample(rng)).collect::<Result<Vec<_>>>()?;
    Ok(HetDataset2::new(points))
}

/// Sample means; at second order the outer-product mean minus `I/2`.
pub fn estimate_het2(ds: &HetDataset2, order: Order) -> Result<Estimate2> {
    if ds.points.is_empty() {
        return Err(Error::Estimation("empty heterodyne dataset".into()));
    }
    let n = ds.points.len() as f64;
    match order {
        Order::First => {
            let mut r = DVector::zeros(4);
            for q in &ds.points {
                r += DVector::from_column_slice(q);
            }
            Ok(Estimate2::First(r / n))
        }
        Order::Second => {
            let mut m = Matrix4::zeros();
            for q in &ds.points {
                let v = nalgebra::Vector4::from_column_slice(q);
                m += v * v.transpose();
            }
            let g = m / n - Matrix4::identity() * 0.5;
            Ok(Estimate2::Second(DMatrix::from_iterator(4, 4, g.iter().cloned())))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phase_space::stream_rng;
    use crate::states::{covariance_two_mode, make_tmsv, make_two_mode_fock};

    #[test]
    fn product_state_has_no_cross_block() {
        let st = make_two_mode_fock(1, 2, None).unwrap();
        let s = HomSampler2::new(&st);
        let n = 200_000;
        let ds = simulate_hom2(&s, 4, n, &mut stream_rng(21, 0)).unwrap();
        let a12 = estimate_cross_hom(&ds).unwrap();
        // Var(x1 x2) = 1.5 * 2.5 per pair; with kernel weights each entry has variance ~4 * 3.75 / n
        let se = (4.0 * 3.75 / n as f64).sqrt();
        assert!(a12.amax() < 5.0 * se, "{a12}");
    }

    #[test]
    fn tmsv_joint_samples_have_expected_correlation() {
        let st = make_tmsv(0.5, None).unwrap();
        let s = HomSampler2::new(&st);
        let ds = simulate_hom2(&s, 3, 90_000, &mut stream_rng(2, 0)).unwrap();
        let Estimate2::Second(g) = estimate_hom2(&ds, Order::Second).unwrap() else { unreachable!() };
        let truth = covariance_two_mode(&st).g2;
        assert!((g - truth).amax() < 0.06);
    }

    #[test]
    fn het_exact_offset() {
        let st = make_tmsv(0.3, None).unwrap();
        let s = HetSampler2::new(&st).unwrap();
        let ds = simulate_het2(&s, 100_000, &mut stream_rng(4, 0)).unwrap();
        let Estimate2::Second(g) = estimate_het2(&ds, Order::Second).unwrap() else { unreachable!() };
        assert!((g - covariance_two_mode(&st).g2).amax() < 0.03);
    }
}
