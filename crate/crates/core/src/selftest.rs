//! Battery of closed-form, numeric and statistical consistency checks.
//!
//! The report hash covers check names, verdicts and details, not timings.

use std::fmt::Write as _;
use std::time::{Duration, Instant};

use rand::Rng;
use sha2::{Digest, Sha256};

use crate::crb::{
    closed_form_scrb, find_crossover, gamma2, scrb_het, scrb_het_two_mode, scrb_hom, scrb_hom_two_mode, Family, Order,
    Scheme, DEFAULT_NODES,
};
use crate::error::Result;
use crate::estimation::{mse_experiment, MseConfig};
use crate::phase_space::{husimi_moments, stream_rng};
use crate::states::{covariance, make_cat, make_fock, make_gaussian, make_tmsv, make_two_mode_fock, Parity, State};

pub const DEFAULT_SEED: u64 = 2017;

/// Relative tolerance for numeric bounds against closed forms.
const REL_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SelftestConfig {
    pub nodes: usize,
    pub seed: u64,
}

impl Default for SelftestConfig {
    fn default() -> Self {
        SelftestConfig { nodes: DEFAULT_NODES, seed: DEFAULT_SEED }
    }
}

#[derive(Debug, Clone)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub elapsed: Duration,
}

#[derive(Debug, Clone)]
pub struct SelftestReport {
    pub config: SelftestConfig,
    pub checks: Vec<CheckResult>,
}

impl SelftestReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failing(&self) -> Vec<&'static str> {
        self.checks.iter().filter(|c| !c.passed).map(|c| c.name).collect()
    }

    /// SHA-256 over `name|verdict|detail` lines.
    pub fn hash(&self) -> String {
        let mut h = Sha256::new();
        for c in &self.checks {
            h.update(format!("{}|{}|{}\n", c.name, c.passed, c.detail).as_bytes());
        }
        h.finalize().iter().fold(String::new(), |mut s, b| {
            let _ = write!(s, "{b:02x}");
            s
        })
    }
}

type Outcome = Result<(bool, String)>;

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

/// Worst relative error of numeric against closed-form bounds.
fn against_closed_form(cases: &[(State, Family)], nodes: usize) -> Outcome {
    let mut worst: f64 = 0.0;
    for (s, f) in cases {
        for order in [Order::First, Order::Second] {
            worst = worst.max(rel(scrb_hom(s, order, nodes)?, closed_form_scrb(f, Scheme::Hom, order)?));
            worst = worst.max(rel(scrb_het(s, order), closed_form_scrb(f, Scheme::Het, order)?));
        }
    }
    Ok((worst < REL_TOL, format!("max rel err {worst:.3e}")))
}

fn check_gaussian(nodes: usize) -> Outcome {
    let cases = [(1.0, 1.0), (3.0, 1.0), (2.0, 2.0), (4.0, 1.7)]
        .into_iter()
        .map(|(mu, lam)| Ok((make_gaussian(mu, lam, 0.3, [0.0, 0.0])?.into(), Family::Gaussian { mu, lam })))
        .collect::<Result<Vec<_>>>()?;
    against_closed_form(&cases, nodes)
}

fn check_fock(nodes: usize) -> Outcome {
    let cases = (0..6)
        .map(|n| Ok((make_fock(n, None)?.into(), Family::Fock { n })))
        .collect::<Result<Vec<_>>>()?;
    against_closed_form(&cases, nodes)
}

fn check_cat(nodes: usize) -> Outcome {
    let mut cases = Vec::new();
    for parity in [Parity::Even, Parity::Odd] {
        for a0 in [0.5, 1.0, 1.5] {
            cases.push((make_cat(parity, a0, None)?.into(), Family::Cat { parity, a0 }));
        }
    }
    against_closed_form(&cases, nodes)
}

fn check_two_mode(nodes: usize) -> Outcome {
    let cross = (nodes / 2).max(8);
    let mut worst: f64 = 0.0;
    let cases = [
        (make_two_mode_fock(1, 2, None)?, Family::TwoModeFock { n1: 1, n2: 2 }),
        (make_tmsv(0.5, None)?, Family::Tmsv { zeta: 0.5 }),
    ];
    for (s, f) in &cases {
        let hom = scrb_hom_two_mode(s, Order::Second, nodes, cross)?.total;
        let het = scrb_het_two_mode(s, Order::Second).total;
        worst = worst.max(rel(hom, closed_form_scrb(f, Scheme::Hom, Order::Second)?));
        worst = worst.max(rel(het, closed_form_scrb(f, Scheme::Het, Order::Second)?));
    }
    Ok((worst < REL_TOL, format!("max rel err {worst:.3e}")))
}

/// The bound must not move when the node count doubles.
fn check_convergence(nodes: usize) -> Outcome {
    let s: State = make_cat(Parity::Even, 1.5, None)?.into();
    let coarse = scrb_hom(&s, Order::Second, nodes)?;
    let fine = scrb_hom(&s, Order::Second, 2 * nodes)?;
    let d = rel(coarse, fine);
    Ok((d < 1e-10, format!("rel change {d:.3e} from {nodes} to {} nodes", 2 * nodes)))
}

fn check_het_offset() -> Outcome {
    let states: Vec<State> = vec![
        make_gaussian(2.0, 1.5, 0.4, [0.3, -0.2])?.into(),
        make_fock(3, None)?.into(),
        make_cat(Parity::Odd, 1.2, None)?.into(),
    ];
    let mut worst: f64 = 0.0;
    for s in &states {
        let g = covariance(s).g;
        let gh = husimi_moments(s).g_het();
        for i in 0..2 {
            for j in 0..2 {
                let off = if i == j { 0.5 } else { 0.0 };
                worst = worst.max((gh[(i, j)] - g[(i, j)] - off).abs());
            }
        }
    }
    Ok((worst < 1e-8, format!("max |G_het - G - I/2| {worst:.3e}")))
}

fn check_first_moment_inequality(nodes: usize, seed: u64) -> Outcome {
    let mut rng = stream_rng(seed, u64::MAX);
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..50 {
        let mu = 1.0 + 4.0 * rng.random::<f64>();
        let lam = 1.0 + 4.0 * rng.random::<f64>();
        let angle = std::f64::consts::PI * rng.random::<f64>();
        let s: State = make_gaussian(mu, lam, angle, [0.0, 0.0])?.into();
        worst = worst.max(scrb_het(&s, Order::First) - scrb_hom(&s, Order::First, nodes)?);
    }
    Ok((worst <= 1e-9, format!("max HET - HOM {worst:.3e}")))
}

fn check_thermal_crossover(nodes: usize) -> Outcome {
    let mu = find_crossover(
        |mu| gamma2(&make_gaussian(mu, 1.0, 0.0, [0.0, 0.0])?.into(), nodes),
        1.0 + 1e-9,
        3.0,
        1e-10,
    )?;
    let want = (30f64.sqrt() + 3.0) / 7.0;
    Ok(((mu - want).abs() < 1e-6, format!("mu* = {mu:.9}")))
}

fn check_monte_carlo(seed: u64) -> Outcome {
    let v: State = crate::states::GaussianState::vacuum().into();
    let cfg = MseConfig::new(Scheme::Het, Order::First, 10_000, 100, seed);
    let a = crate::estimation::mse_experiment_with(&v, &cfg)?;
    let b = mse_experiment(&v, Scheme::Het, Order::First, 10_000, 100, seed)?;
    let z = (a.scaled_mse - a.scrb) / a.std_err;
    Ok((a == b && z.abs() < 3.0, format!("scaled MSE {:.12e}, z = {z:.3}", a.scaled_mse)))
}

pub fn run_selftest(cfg: SelftestConfig) -> SelftestReport {
    let nodes = cfg.nodes;
    let seed = cfg.seed;
    let battery: Vec<(&'static str, Box<dyn Fn() -> Outcome>)> = vec![
        ("gaussian-closed-form", Box::new(move || check_gaussian(nodes))),
        ("fock-closed-form", Box::new(move || check_fock(nodes))),
        ("cat-closed-form", Box::new(move || check_cat(nodes))),
        ("two-mode-closed-form", Box::new(move || check_two_mode(nodes))),
        ("fisher-node-convergence", Box::new(move || check_convergence(nodes))),
        ("heterodyne-offset", Box::new(check_het_offset)),
        ("first-moment-inequality", Box::new(move || check_first_moment_inequality(nodes, seed))),
        ("thermal-crossover", Box::new(move || check_thermal_crossover(nodes))),
        ("monte-carlo-het-vacuum", Box::new(move || check_monte_carlo(seed))),
    ];
    let checks = battery
        .into_iter()
        .map(|(name, f)| {
            let start = Instant::now();
            let (passed, detail) = match f() {
                Ok(v) => v,
                Err(e) => (false, format!("error: {e}")),
            };
            CheckResult { name, passed, detail, elapsed: start.elapsed() }
        })
        .collect();
    SelftestReport { config: cfg, checks }
}
