//! Finite-sample homodyne and heterodyne experiments and their scaled MSE.

pub mod het;
pub mod hom;
pub mod two_mode;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

pub use het::{estimate_first_het, estimate_second_het, simulate_het, HetDataset};
pub use hom::{
    allocate, design_scrb, estimate_first_from_stats, estimate_first_hom, estimate_second_from_stats,
    estimate_second_hom, phase_grid, simulate_hom, HomDataset, PhaseStats,
};
pub use two_mode::{
    estimate_cross_hom, estimate_het2, estimate_hom2, simulate_het2, simulate_hom2, Estimate2, HetDataset2,
    HetSampler2, HomDataset2, HomSampler2,
};

use crate::crb::{scrb_het, scrb_het_two_mode, scrb_hom, scrb_hom_two_mode, Order, Scheme, DEFAULT_CROSS_NODES, DEFAULT_NODES};
use crate::error::{Error, Result};
use crate::linalg::pairwise_sum;
use crate::phase_space::{stream_rng, HetSampler, QuadSampler, StreamRng};
use crate::states::{covariance, covariance_two_mode, CovMatrix, State, TwoModeState};

/// Largest tolerated fraction of failed trials.
pub const MAX_FAILURE_RATE: f64 = 0.05;

/// Default number of homodyne phases per mode.
pub fn default_phases(order: Order) -> usize {
    match order {
        Order::First => 4,
        Order::Second => 6,
    }
}

/// Settings of one Monte-Carlo experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct MseConfig {
    pub scheme: Scheme,
    pub order: Order,
    pub n: usize,
    pub trials: usize,
    pub seed: u64,
    /// Homodyne phases per mode; `None` takes [`default_phases`].
    pub n_theta: Option<usize>,
    /// Histogram bins per phase for homodyne data; `None` uses raw samples.
    pub bins: Option<usize>,
}

impl MseConfig {
    pub fn new(scheme: Scheme, order: Order, n: usize, trials: usize, seed: u64) -> Self {
        MseConfig { scheme, order, n, trials, seed, n_theta: None, bins: None }
    }

    fn phases(&self) -> usize {
        self.n_theta.unwrap_or_else(|| default_phases(self.order))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MseResult {
    pub scheme: Scheme,
    pub order: Order,
    pub n: usize,
    pub trials: usize,
    pub failures: usize,
    /// `N` times the mean squared error over successful trials.
    pub scaled_mse: f64,
    pub std_err: f64,
    pub scrb: f64,
    pub ratio: f64,
    /// Homodyne phases per mode, if applicable.
    pub n_theta: Option<usize>,
}

/// Squared Frobenius error of a moment estimate.
fn sq_error(est: &DMatrix<f64>, truth: &DMatrix<f64>) -> f64 {
    (est - truth).norm_squared()
}

fn run_trials<F>(cfg: &MseConfig, scrb: f64, n_theta: Option<usize>, trial: F) -> Result<MseResult>
where
    F: Fn(&mut StreamRng) -> Result<Result<f64>> + Sync,
{
    if cfg.trials < 2 {
        return Err(Error::InvalidParameter(format!("{} trials; need at least 2", cfg.trials)));
    }
    if cfg.n == 0 {
        return Err(Error::InvalidParameter("zero samples per trial".into()));
    }
    let outcomes: Vec<Result<Result<f64>>> = (0..cfg.trials)
        .into_par_iter()
        .map(|t| trial(&mut stream_rng(cfg.seed, t as u64)))
        .collect();
    let mut errors = Vec::with_capacity(cfg.trials);
    let mut failures = 0;
    for o in outcomes {
        match o? {
            Ok(e) => errors.push(e),
            Err(_) => failures += 1,
        }
    }
    if failures as f64 > MAX_FAILURE_RATE * cfg.trials as f64 || errors.len() < 2 {
        return Err(Error::Estimation(format!("{failures} of {} trials failed", cfg.trials)));
    }
    let r = errors.len() as f64;
    let mean = pairwise_sum(&errors) / r;
    let dev: Vec<f64> = errors.iter().map(|e| (e - mean).powi(2)).collect();
    let sd = (pairwise_sum(&dev) / (r - 1.0)).sqrt();
    let scale = cfg.n as f64;
    let scaled_mse = scale * mean;
    Ok(MseResult {
        scheme: cfg.scheme,
        order: cfg.order,
        n: cfg.n,
        trials: cfg.trials,
        failures,
        scaled_mse,
        std_err: scale * sd / r.sqrt(),
        scrb,
        ratio: scaled_mse / scrb,
        n_theta,
    })
}

fn single_truth(c: &CovMatrix, order: Order) -> DMatrix<f64> {
    match order {
        Order::First => DMatrix::from_column_slice(2, 1, c.r.as_slice()),
        Order::Second => c.g2.clone(),
    }
}

/// Default-configured single-mode experiment.
pub fn mse_experiment(state: &State, scheme: Scheme, order: Order, n: usize, trials: usize, seed: u64) -> Result<MseResult> {
    mse_experiment_with(state, &MseConfig::new(scheme, order, n, trials, seed))
}

pub fn mse_experiment_with(state: &State, cfg: &MseConfig) -> Result<MseResult> {
    let truth = single_truth(&covariance(state), cfg.order);
    let order = cfg.order;
    match cfg.scheme {
        Scheme::Hom => {
            let n_theta = cfg.phases();
            allocate(cfg.n, n_theta)?;
            let sampler = QuadSampler::new(state.clone());
            for t in phase_grid(n_theta) {
                if let State::Fock(_) = state {
                    sampler.pdf(t);
                }
            }
            let scrb = scrb_hom(state, order, DEFAULT_NODES)?;
            run_trials(cfg, scrb, Some(n_theta), |rng| {
                let mut ds = simulate_hom(&sampler, n_theta, cfg.n, rng)?;
                if let Some(b) = cfg.bins {
                    ds = ds.binned(b)?;
                }
                let est = match order {
                    Order::First => estimate_first_hom(&ds).map(|r| DMatrix::from_column_slice(2, 1, r.as_slice())),
                    Order::Second => estimate_second_hom(&ds).map(|g| DMatrix::from_column_slice(2, 2, g.as_slice())),
                };
                Ok(est.map(|e| sq_error(&e, &truth)))
            })
        }
        Scheme::Het => {
            let sampler = HetSampler::new(state)?;
            let scrb = scrb_het(state, order);
            run_trials(cfg, scrb, None, |rng| {
                let ds = simulate_het(&sampler, cfg.n, rng)?;
                let est = match order {
                    Order::First => estimate_first_het(&ds).map(|r| DMatrix::from_column_slice(2, 1, r.as_slice())),
                    Order::Second => estimate_second_het(&ds).map(|g| DMatrix::from_column_slice(2, 2, g.as_slice())),
                };
                Ok(est.map(|e| sq_error(&e, &truth)))
            })
        }
    }
}

fn estimate_matrix(e: Estimate2) -> DMatrix<f64> {
    match e {
        Estimate2::First(r) => DMatrix::from_column_slice(4, 1, r.as_slice()),
        Estimate2::Second(g) => g,
    }
}

/// Two-mode experiment. Every sector is estimated from the same `N` joint
/// shots, so the total error is the Frobenius error of the full 4x4 block
/// matrix (the cross block counted twice).
pub fn mse_experiment2(state: &TwoModeState, cfg: &MseConfig) -> Result<MseResult> {
    let c = covariance_two_mode(state);
    let truth = match cfg.order {
        Order::First => DMatrix::from_column_slice(4, 1, DVector::clone(&c.r).as_slice()),
        Order::Second => c.g2.clone(),
    };
    let order = cfg.order;
    match cfg.scheme {
        Scheme::Hom => {
            let n_theta = cfg.phases();
            allocate(cfg.n, n_theta * n_theta)?;
            let sampler = HomSampler2::new(state);
            let scrb = scrb_hom_two_mode(state, order, DEFAULT_NODES, DEFAULT_CROSS_NODES)?.total;
            run_trials(cfg, scrb, Some(n_theta), |rng| {
                let ds = simulate_hom2(&sampler, n_theta, cfg.n, rng)?;
                Ok(estimate_hom2(&ds, order).map(|e| sq_error(&estimate_matrix(e), &truth)))
            })
        }
        Scheme::Het => {
            let sampler = HetSampler2::new(state)?;
            let scrb = scrb_het_two_mode(state, order).total;
            run_trials(cfg, scrb, None, |rng| {
                let ds = simulate_het2(&sampler, cfg.n, rng)?;
                Ok(estimate_het2(&ds, order).map(|e| sq_error(&estimate_matrix(e), &truth)))
            })
        }
    }
}
