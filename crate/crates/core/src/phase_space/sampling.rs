//! Exact samplers for the two measurement schemes.
//!
//! Homodyne outcomes at phase `t` are drawn from the quadrature density by
//! inverse-CDF interpolation on a 4096-point grid; Gaussian states are drawn
//! from their normal marginal directly. Heterodyne outcomes of Fock-basis
//! states use rejection sampling from an isotropic Gaussian proposal.
//!
//! RNG streams: `stream_rng(seed, index)` seeds ChaCha8 from `seed` and
//! selects stream `index`, so distinct indices give independent sequences.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, RwLock};

use nalgebra::{Matrix2, SymmetricEigen};
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::husimi::husimi_moments;
use super::moments::quad_moment;
use crate::error::{Error, Result};
use crate::states::{FockState, State};

pub type StreamRng = ChaCha8Rng;

pub fn stream_rng(seed: u64, stream: u64) -> StreamRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

pub const GRID_POINTS: usize = 4096;

/// Hermite functions `psi_n(x)` for `n < count`, normalized for `X = (a + a^dag)/sqrt(2)`.
pub fn hermite_functions(x: f64, count: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(count);
    let psi0 = PI.powf(-0.25) * (-0.5 * x * x).exp();
    out.push(psi0);
    if count > 1 {
        out.push(std::f64::consts::SQRT_2 * x * psi0);
    }
    for n in 1..count.saturating_sub(1) {
        let nf = n as f64;
        let next = (2.0 / (nf + 1.0)).sqrt() * x * out[n] - (nf / (nf + 1.0)).sqrt() * out[n - 1];
        out.push(next);
    }
    out.truncate(count);
    out
}

/// Density of the homodyne outcome `x` at phase `theta`.
pub fn quadrature_density(state: &State, theta: f64, x: f64) -> f64 {
    match state {
        State::Gaussian(g) => {
            let (m, v) = g.quadrature_stats(theta);
            (-(x - m).powi(2) / (2.0 * v)).exp() / (2.0 * PI * v).sqrt()
        }
        State::Fock(f) => fock_quadrature_density(f, theta, x),
    }
}

fn fock_quadrature_density(f: &FockState, theta: f64, x: f64) -> f64 {
    let d = f.dim();
    let psi = hermite_functions(x, d);
    // phi_n = e^{i theta n} psi_n(x); density = phi^H rho phi
    let phi: Vec<Complex64> =
        (0..d).map(|n| Complex64::from_polar(psi[n], theta * n as f64)).collect();
    if let Some(amp) = f.amplitudes() {
        let overlap: Complex64 = (0..d).map(|n| phi[n].conj() * amp[n]).sum();
        return overlap.norm_sqr();
    }
    let rho = f.rho();
    let mut acc = Complex64::new(0.0, 0.0);
    for m in 0..d {
        let mut row = Complex64::new(0.0, 0.0);
        for n in 0..d {
            row += rho[(m, n)] * phi[n];
        }
        acc += phi[m].conj() * row;
    }
    acc.re.max(0.0)
}

/// Tabulated homodyne density at one phase, with its cumulative table.
#[derive(Debug, Clone)]
pub struct QuadPdf {
    pub theta: f64,
    pub half_width: f64,
    pub xs: Vec<f64>,
    pub density: Vec<f64>,
    /// Unnormalized trapezoid cumulative integral; `cdf[0] = 0`.
    pub cdf: Vec<f64>,
    /// Trapezoid integral of the raw density before normalization.
    pub raw_mass: f64,
}

impl QuadPdf {
    pub fn new(state: &State, theta: f64) -> Self {
        let m1 = quad_moment(state, theta, 1).expect("order 1 supported");
        let m2 = quad_moment(state, theta, 2).expect("order 2 supported");
        let half_width = 6.0 * m2.sqrt() + m1.abs();
        let h = 2.0 * half_width / (GRID_POINTS - 1) as f64;
        let xs: Vec<f64> = (0..GRID_POINTS).map(|i| -half_width + i as f64 * h).collect();
        let density: Vec<f64> = xs.iter().map(|&x| quadrature_density(state, theta, x)).collect();
        let mut cdf = Vec::with_capacity(GRID_POINTS);
        cdf.push(0.0);
        for i in 1..GRID_POINTS {
            cdf.push(cdf[i - 1] + 0.5 * h * (density[i - 1] + density[i]));
        }
        let raw_mass = *cdf.last().unwrap();
        QuadPdf { theta, half_width, xs, density, cdf, raw_mass }
    }

    /// Normalized cumulative probability at `x`, linear within grid cells.
    pub fn cdf_at(&self, x: f64) -> f64 {
        if x <= self.xs[0] {
            return 0.0;
        }
        if x >= *self.xs.last().unwrap() {
            return 1.0;
        }
        let h = self.xs[1] - self.xs[0];
        let i = (((x - self.xs[0]) / h).floor() as usize).min(GRID_POINTS - 2);
        let frac = (x - self.xs[i]) / h;
        (self.cdf[i] + frac * (self.cdf[i + 1] - self.cdf[i])) / self.raw_mass
    }

    /// Inverse CDF at `u` in `[0, 1)`.
    pub fn quantile(&self, u: f64) -> f64 {
        let target = u * self.raw_mass;
        let i = self.cdf.partition_point(|&c| c <= target).clamp(1, GRID_POINTS - 1) - 1;
        let span = self.cdf[i + 1] - self.cdf[i];
        let frac = if span > 0.0 { (target - self.cdf[i]) / span } else { 0.5 };
        self.xs[i] + frac * (self.xs[i + 1] - self.xs[i])
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.quantile(rng.random::<f64>())
    }

    /// Grid moment `sum x^k p(x)` by trapezoid on the normalized density.
    pub fn grid_moment(&self, k: i32) -> f64 {
        let h = self.xs[1] - self.xs[0];
        let f: Vec<f64> = self.xs.iter().zip(&self.density).map(|(x, p)| x.powi(k) * p).collect();
        let inner: f64 = f[1..f.len() - 1].iter().sum();
        h * (inner + 0.5 * (f[0] + f[f.len() - 1])) / self.raw_mass
    }
}

/// Homodyne sampler with per-phase density tables memoized by phase.
#[derive(Debug)]
pub struct QuadSampler {
    state: State,
    cache: RwLock<HashMap<i64, Arc<QuadPdf>>>,
}

fn phase_key(theta: f64) -> i64 {
    (theta * 1e12).round() as i64
}

impl QuadSampler {
    pub fn new(state: State) -> Self {
        QuadSampler { state, cache: RwLock::new(HashMap::new()) }
    }

    pub fn state(&self) -> &State {
        &self.state
    }

    pub fn pdf(&self, theta: f64) -> Arc<QuadPdf> {
        let key = phase_key(theta);
        if let Some(p) = self.cache.read().expect("cache lock").get(&key) {
            return Arc::clone(p);
        }
        let pdf = Arc::new(QuadPdf::new(&self.state, theta));
        let mut w = self.cache.write().expect("cache lock");
        Arc::clone(w.entry(key).or_insert(pdf))
    }

    pub fn sample<R: Rng + ?Sized>(&self, theta: f64, rng: &mut R) -> f64 {
        match &self.state {
            State::Gaussian(g) => {
                let (m, v) = g.quadrature_stats(theta);
                let z: f64 = rng.sample(StandardNormal);
                m + v.sqrt() * z
            }
            State::Fock(_) => self.pdf(theta).sample(rng),
        }
    }

    pub fn sample_n<R: Rng + ?Sized>(&self, theta: f64, n: usize, rng: &mut R) -> Vec<f64> {
        match &self.state {
            State::Gaussian(_) => (0..n).map(|_| self.sample(theta, rng)).collect(),
            State::Fock(_) => {
                let pdf = self.pdf(theta);
                (0..n).map(|_| pdf.sample(rng)).collect()
            }
        }
    }
}

/// Q-function density in `(x, p)` coordinates: `<alpha|rho|alpha> / (2 pi)`.
pub fn husimi_density(f: &FockState, x: f64, p: f64) -> f64 {
    let alpha = Complex64::new(x, p) / std::f64::consts::SQRT_2;
    let d = f.dim();
    let gauss = (-0.5 * alpha.norm_sqr()).exp();
    // v_n = <n|alpha>
    let mut v = Vec::with_capacity(d);
    let mut c = Complex64::new(gauss, 0.0);
    for n in 0..d {
        if n > 0 {
            c = c * alpha / (n as f64).sqrt();
        }
        v.push(c);
    }
    let val = if let Some(amp) = f.amplitudes() {
        let overlap: Complex64 = (0..d).map(|n| v[n].conj() * amp[n]).sum();
        overlap.norm_sqr()
    } else {
        let rho = f.rho();
        let mut acc = Complex64::new(0.0, 0.0);
        for m in 0..d {
            let mut row = Complex64::new(0.0, 0.0);
            for n in 0..d {
                row += rho[(m, n)] * v[n];
            }
            acc += v[m].conj() * row;
        }
        acc.re
    };
    val / (2.0 * PI)
}

/// Heterodyne sampler.
#[derive(Debug, Clone)]
pub enum HetSampler {
    Gaussian { mean: [f64; 2], chol: Matrix2<f64> },
    Rejection { state: FockState, center: [f64; 2], sigma: f64, bound: f64 },
}

impl HetSampler {
    /// Prepares a sampler; for Fock-basis states the envelope constant is
    /// fitted on a 161x161 grid spanning seven proposal widths.
    pub fn new(state: &State) -> Result<Self> {
        let h = husimi_moments(state);
        let mean = h.mean();
        match state {
            State::Gaussian(_) => {
                let chol = h
                    .g_het()
                    .cholesky()
                    .ok_or_else(|| Error::InvalidState("heterodyne covariance not positive".into()))?
                    .l();
                Ok(HetSampler::Gaussian { mean, chol })
            }
            State::Fock(f) => {
                let eig = SymmetricEigen::new(h.g_het());
                let var = eig.eigenvalues.max() + 0.5;
                let sigma = var.sqrt();
                let span = 7.0 * sigma;
                let steps = 160;
                let mut max_ratio: f64 = 0.0;
                for i in 0..=steps {
                    for j in 0..=steps {
                        let x = mean[0] - span + 2.0 * span * i as f64 / steps as f64;
                        let p = mean[1] - span + 2.0 * span * j as f64 / steps as f64;
                        let r = husimi_density(f, x, p) / proposal_density(mean, sigma, x, p);
                        max_ratio = max_ratio.max(r);
                    }
                }
                Ok(HetSampler::Rejection {
                    state: f.clone(),
                    center: mean,
                    sigma,
                    bound: 1.25 * max_ratio,
                })
            }
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<[f64; 2]> {
        match self {
            HetSampler::Gaussian { mean, chol } => {
                let z0: f64 = rng.sample(StandardNormal);
                let z1: f64 = rng.sample(StandardNormal);
                Ok([
                    mean[0] + chol[(0, 0)] * z0,
                    mean[1] + chol[(1, 0)] * z0 + chol[(1, 1)] * z1,
                ])
            }
            HetSampler::Rejection { state, center, sigma, bound } => loop {
                let z0: f64 = rng.sample(StandardNormal);
                let z1: f64 = rng.sample(StandardNormal);
                let x = center[0] + sigma * z0;
                let p = center[1] + sigma * z1;
                let ratio = husimi_density(state, x, p) / proposal_density(*center, *sigma, x, p);
                if ratio > *bound {
                    return Err(Error::EnvelopeViolation { ratio, bound: *bound });
                }
                if rng.random::<f64>() * bound < ratio {
                    return Ok([x, p]);
                }
            },
        }
    }
}

fn proposal_density(center: [f64; 2], sigma: f64, x: f64, p: f64) -> f64 {
    let s2 = sigma * sigma;
    let r2 = (x - center[0]).powi(2) + (p - center[1]).powi(2);
    (-r2 / (2.0 * s2)).exp() / (2.0 * PI * s2)
}
