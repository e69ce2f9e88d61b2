//! Homodyne data and the optimal weighted moment estimators.

use std::f64::consts::{PI, SQRT_2};

use nalgebra::{DMatrix, DVector, Matrix2, SymmetricEigen, Vector2};
use rand::Rng;

use crate::crb::{kernel_vector, Order};
use crate::error::{Error, Result};
use crate::phase_space::{quad_moment, QuadSampler};
use crate::states::State;

/// Relative eigenvalue floor below which a weight matrix counts as singular.
const RCOND_FLOOR: f64 = 1e-12;

/// Sufficient statistics of one phase: count and raw moments of orders 1, 2, 4.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseStats {
    pub theta: f64,
    pub count: f64,
    pub m1: f64,
    pub m2: f64,
    pub m4: f64,
}

impl PhaseStats {
    pub fn from_samples(theta: f64, xs: &[f64]) -> Self {
        let n = xs.len() as f64;
        let (mut s1, mut s2, mut s4) = (0.0, 0.0, 0.0);
        for &x in xs {
            let x2 = x * x;
            s1 += x;
            s2 += x2;
            s4 += x2 * x2;
        }
        PhaseStats { theta, count: n, m1: s1 / n, m2: s2 / n, m4: s4 / n }
    }

    /// Moments of a histogram with bin centers standing in for the data.
    pub fn from_histogram(theta: f64, centers: &[f64], counts: &[usize]) -> Self {
        let n: usize = counts.iter().sum();
        let (mut s1, mut s2, mut s4) = (0.0, 0.0, 0.0);
        for (&x, &c) in centers.iter().zip(counts) {
            let c = c as f64;
            let x2 = x * x;
            s1 += c * x;
            s2 += c * x2;
            s4 += c * x2 * x2;
        }
        let n_f = n as f64;
        PhaseStats { theta, count: n_f, m1: s1 / n_f, m2: s2 / n_f, m4: s4 / n_f }
    }

    /// Population moments of `state` at `theta`, weighted by `count`.
    pub fn exact(state: &State, theta: f64, count: f64) -> Result<Self> {
        Ok(PhaseStats {
            theta,
            count,
            m1: quad_moment(state, theta, 1)?,
            m2: quad_moment(state, theta, 2)?,
            m4: quad_moment(state, theta, 4)?,
        })
    }

    fn variance(&self, order: Order) -> f64 {
        match order {
            Order::First => self.m2 - self.m1 * self.m1,
            Order::Second => self.m4 - self.m2 * self.m2,
        }
    }

    fn datum(&self, order: Order) -> f64 {
        match order {
            Order::First => self.m1,
            Order::Second => self.m2,
        }
    }
}

/// Homodyne samples grouped by phase, with an optional `n_x`-bin histogram mode.
#[derive(Debug, Clone, PartialEq)]
pub struct HomDataset {
    phases: Vec<f64>,
    samples: Vec<Vec<f64>>,
    bins: Option<usize>,
}

impl HomDataset {
    pub fn new(phases: Vec<f64>, samples: Vec<Vec<f64>>) -> Result<Self> {
        if phases.len() != samples.len() {
            return Err(Error::InvalidParameter(format!(
                "{} phases but {} sample lists",
                phases.len(),
                samples.len()
            )));
        }
        for (i, &t) in phases.iter().enumerate() {
            if !(0.0..PI).contains(&t) {
                return Err(Error::InvalidParameter(format!("phase {t} outside [0, pi)")));
            }
            if phases[..i].contains(&t) {
                return Err(Error::InvalidParameter(format!("repeated phase {t}")));
            }
        }
        Ok(HomDataset { phases, samples, bins: None })
    }

    /// Same data, reduced to `n_x`-bin histograms per phase.
    pub fn binned(mut self, n_x: usize) -> Result<Self> {
        if n_x == 0 {
            return Err(Error::InvalidParameter("zero bins".into()));
        }
        self.bins = Some(n_x);
        Ok(self)
    }

    pub fn phases(&self) -> &[f64] {
        &self.phases
    }

    pub fn samples(&self, k: usize) -> &[f64] {
        &self.samples[k]
    }

    /// Per-phase totals `N_k`.
    pub fn counts(&self) -> Vec<usize> {
        self.samples.iter().map(Vec::len).collect()
    }

    pub fn total(&self) -> usize {
        self.samples.iter().map(Vec::len).sum()
    }

    pub fn bins(&self) -> Option<usize> {
        self.bins
    }

    /// Histogram `(centers, n_jk)` of phase `k` over the sample range.
    pub fn histogram(&self, k: usize, n_x: usize) -> (Vec<f64>, Vec<usize>) {
        let xs = &self.samples[k];
        let lo = xs.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let width = if hi > lo { (hi - lo) / n_x as f64 } else { 1.0 };
        let mut counts = vec![0usize; n_x];
        for &x in xs {
            let j = (((x - lo) / width) as usize).min(n_x - 1);
            counts[j] += 1;
        }
        let centers = (0..n_x).map(|j| lo + (j as f64 + 0.5) * width).collect();
        (centers, counts)
    }

    pub fn stats(&self) -> Vec<PhaseStats> {
        (0..self.phases.len())
            .map(|k| match self.bins {
                None => PhaseStats::from_samples(self.phases[k], &self.samples[k]),
                Some(n_x) => {
                    let (c, n) = self.histogram(k, n_x);
                    PhaseStats::from_histogram(self.phases[k], &c, &n)
                }
            })
            .collect()
    }
}

/// Mid-point offset phases `(k - 1/2) pi / n_theta`.
pub fn phase_grid(n_theta: usize) -> Vec<f64> {
    (1..=n_theta).map(|k| (k as f64 - 0.5) * PI / n_theta as f64).collect()
}

/// Equal split of `n` over `parts`, remainder to the earliest parts.
pub fn allocate(n: usize, parts: usize) -> Result<Vec<usize>> {
    if parts == 0 || n < parts {
        return Err(Error::InvalidParameter(format!("{n} samples cannot cover {parts} settings")));
    }
    let (base, rem) = (n / parts, n % parts);
    Ok((0..parts).map(|k| base + usize::from(k < rem)).collect())
}

pub fn simulate_hom<R: Rng + ?Sized>(sampler: &QuadSampler, n_theta: usize, n: usize, rng: &mut R) -> Result<HomDataset> {
    let phases = phase_grid(n_theta);
    let counts = allocate(n, n_theta)?;
    let samples = phases.iter().zip(&counts).map(|(&t, &c)| sampler.sample_n(t, c, rng)).collect();
    HomDataset::new(phases, samples)
}

/// Solves `W x = b` after rejecting ill-conditioned `W`.
pub(crate) fn solve_weighted(w: DMatrix<f64>, b: DVector<f64>, what: impl Fn() -> String) -> Result<DVector<f64>> {
    let eig = SymmetricEigen::new(w.clone());
    let (lo, hi) = (eig.eigenvalues.min(), eig.eigenvalues.max());
    if !(lo > RCOND_FLOOR * hi) {
        return Err(Error::Singular(what()));
    }
    w.cholesky().map(|c| c.solve(&b)).ok_or_else(|| Error::Singular(what()))
}

/// Weight matrix `W` and right-hand side of the optimal estimator.
pub fn weighted_system(stats: &[PhaseStats], order: Order) -> Result<(DMatrix<f64>, DVector<f64>)> {
    let d = order.dim();
    let mut w = DMatrix::zeros(d, d);
    let mut b = DVector::zeros(d);
    for s in stats {
        let var = s.variance(order);
        if !(var > 0.0) {
            return Err(Error::Estimation(format!("sample variance {var:e} at phase {}", s.theta)));
        }
        let u = DVector::from_vec(kernel_vector(order, s.theta));
        let scale = s.count / var;
        w += &u * u.transpose() * scale;
        b += &u * (scale * s.datum(order));
    }
    Ok((w, b))
}

fn phase_list(stats: &[PhaseStats]) -> String {
    let list: Vec<String> = stats.iter().map(|s| format!("{:.6}", s.theta)).collect();
    format!("weight matrix for phases [{}]", list.join(", "))
}

pub fn estimate_first_from_stats(stats: &[PhaseStats]) -> Result<Vector2<f64>> {
    let (w, b) = weighted_system(stats, Order::First)?;
    let r = solve_weighted(w, b, || phase_list(stats))?;
    Ok(Vector2::new(r[0], r[1]))
}

pub fn estimate_second_from_stats(stats: &[PhaseStats]) -> Result<Matrix2<f64>> {
    let (w, b) = weighted_system(stats, Order::Second)?;
    let g = solve_weighted(w, b, || phase_list(stats))?;
    Ok(unvec(&g))
}

/// `(g11, sqrt2 g12, g22)` back to a symmetric matrix.
pub fn unvec(g: &DVector<f64>) -> Matrix2<f64> {
    let off = g[1] / SQRT_2;
    Matrix2::new(g[0], off, off, g[2])
}

pub fn estimate_first_hom(ds: &HomDataset) -> Result<Vector2<f64>> {
    estimate_first_from_stats(&ds.stats())
}

pub fn estimate_second_hom(ds: &HomDataset) -> Result<Matrix2<f64>> {
    estimate_second_from_stats(&ds.stats())
}

/// Scaled bound of the finite phase design, `N Tr W^{-1}` at population moments.
pub fn design_scrb(state: &State, order: Order, n_theta: usize) -> Result<f64> {
    let stats = phase_grid(n_theta)
        .into_iter()
        .map(|t| PhaseStats::exact(state, t, 1.0 / n_theta as f64))
        .collect::<Result<Vec<_>>>()?;
    let (w, _) = weighted_system(&stats, order)?;
    crate::linalg::inverse_trace(&w)
}
