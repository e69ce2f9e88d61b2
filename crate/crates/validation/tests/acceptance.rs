//! Acceptance battery. Each test prints one verdict line, then asserts it.
//!
//! Run with `cargo test -p hetcrb-validation --test acceptance -- --nocapture`
//! to see the per-row notes; the verdict lines print either way.

use std::f64::consts::PI;
use std::sync::{Mutex, MutexGuard};
use std::time::{Duration, Instant};

use nalgebra::{DMatrix, DVector, Matrix2, Vector2};
use num_complex::Complex64;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use hetcrb::crb::{
    closed_form_gamma2, closed_form_scrb, find_crossover, find_minimum, gamma2, gamma2_two_mode, scrb_het,
    scrb_het_two_mode, scrb_hom, scrb_hom_two_mode, Family, Order, Scheme, DEFAULT_CROSS_NODES, DEFAULT_NODES,
};
use hetcrb::estimation::{mse_experiment2, mse_experiment_with, MseConfig, MseResult};
use hetcrb::phase_space::{husimi_moment, husimi_moments, husimi_moments_two_mode};
use hetcrb::states::{
    covariance, covariance_two_mode, make_cat, make_displaced_fock, make_fock, make_gaussian, make_photon_added,
    make_thermal_fock, make_tmsv, make_two_mode_fock, FockState, GaussianState, Parity, State, TwoModeState,
};
use hetcrb_oracles::{
    gaussian_density, husimi_quadrature_table_rho, husimi_second_moments_two_mode, moments_of_density, rel,
    schmidt_vector, tmsv_coeffs,
};
use hetcrb_validation::{note, report, Checks};

const NODES: usize = DEFAULT_NODES;
const CROSS: usize = DEFAULT_CROSS_NODES;
const SEED: u64 = 2017;

// Runtime budgets are per criterion, so criteria run one at a time.
static SERIAL: Mutex<()> = Mutex::new(());

fn serial() -> MutexGuard<'static, ()> {
    SERIAL.lock().unwrap_or_else(|e| e.into_inner())
}

fn finish(id: u8, title: &str, checks: &mut Checks, start: Instant, budget: Duration) {
    let elapsed = start.elapsed();
    checks.check(format!("runtime {:.2} s within {:.0} s", elapsed.as_secs_f64(), budget.as_secs_f64()), elapsed < budget);
    report(id, title, checks.passed(), elapsed, &checks.summary());
    assert!(checks.passed(), "criterion {id}: {}", checks.summary());
}

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

#[test]
fn criterion_1_fock_closed_forms() {
    let _guard = serial();
    let start = Instant::now();
    let mut checks = Checks::default();
    for n in 0..=30usize {
        let nf = n as f64;
        let f = Family::Fock { n };
        let hom = closed_form_scrb(&f, Scheme::Hom, Order::Second).unwrap();
        let het = closed_form_scrb(&f, Scheme::Het, Order::Second).unwrap();
        checks.check(format!("hom n={n}"), rel(hom, 5.0 * (nf * nf + nf + 1.0)) < 1e-12);
        checks.check(format!("het n={n}"), rel(het, 2.0 * (nf + 1.0) * (nf + 3.0)) < 1e-12);
    }
    let g = |n| closed_form_gamma2(&Family::Fock { n }).unwrap();
    checks.check("gamma(0) = 6/5", (g(0) - 6.0 / 5.0).abs() < 1e-12);
    checks.check("gamma(1) = 16/15", (g(1) - 16.0 / 15.0).abs() < 1e-12);
    let tail: Vec<f64> = [1_000usize, 100_000, 10_000_000].iter().map(|&n| (g(n) - 0.4).abs()).collect();
    checks.check("gamma(n) -> 2/5", tail.windows(2).all(|w| w[1] < w[0]) && tail[2] < 1e-6);
    finish(1, "Fock closed forms", &mut checks, start, Duration::from_secs(1));
}

fn numeric_vs_closed(checks: &mut Checks, label: &str, family: &Family, state: &State) {
    for order in [Order::First, Order::Second] {
        let m = order.as_usize();
        let hom = scrb_hom(state, order, NODES).unwrap();
        let het = scrb_het(state, order);
        let hom_cf = closed_form_scrb(family, Scheme::Hom, order).unwrap();
        let het_cf = closed_form_scrb(family, Scheme::Het, order).unwrap();
        checks.check(format!("{label} hom M={m} rel {:.1e}", rel(hom, hom_cf)), rel(hom, hom_cf) < 1e-8);
        checks.check(format!("{label} het M={m} rel {:.1e}", rel(het, het_cf)), rel(het, het_cf) < 1e-8);
    }
}

fn numeric_vs_closed_two_mode(checks: &mut Checks, label: &str, family: &Family, state: &TwoModeState) {
    for order in [Order::First, Order::Second] {
        let m = order.as_usize();
        let hom = scrb_hom_two_mode(state, order, NODES, CROSS).unwrap().total;
        let het = scrb_het_two_mode(state, order).total;
        let hom_cf = closed_form_scrb(family, Scheme::Hom, order).unwrap();
        let het_cf = closed_form_scrb(family, Scheme::Het, order).unwrap();
        checks.check(format!("{label} hom M={m} rel {:.1e}", rel(hom, hom_cf)), rel(hom, hom_cf) < 1e-8);
        checks.check(format!("{label} het M={m} rel {:.1e}", rel(het, het_cf)), rel(het, het_cf) < 1e-8);
    }
}

#[test]
fn criterion_2_numeric_integration_matches_closed_forms() {
    let _guard = serial();
    let start = Instant::now();
    let mut checks = Checks::default();
    for (mu, lam, angle) in [(1.0, 1.0, 0.0), (2.0, 1.5, 0.4), (3.5, 2.5, 1.1), (1.2, 4.0, 2.0)] {
        let s = make_gaussian(mu, lam, angle, [0.0, 0.0]).unwrap().into();
        numeric_vs_closed(&mut checks, &format!("gauss({mu},{lam})"), &Family::Gaussian { mu, lam }, &s);
    }
    for n in [0usize, 1, 2, 5, 10] {
        numeric_vs_closed(&mut checks, &format!("fock({n})"), &Family::Fock { n }, &make_fock(n, None).unwrap().into());
    }
    for parity in [Parity::Even, Parity::Odd] {
        for a0 in [0.3, 1.0, 1.5, 2.0] {
            let s = make_cat(parity, a0, None).unwrap().into();
            numeric_vs_closed(&mut checks, &format!("cat{parity:?}({a0})"), &Family::Cat { parity, a0 }, &s);
        }
    }
    for (n1, n2) in [(0usize, 0usize), (1, 2), (3, 3)] {
        let s = make_two_mode_fock(n1, n2, None).unwrap();
        numeric_vs_closed_two_mode(&mut checks, &format!("tmfock({n1},{n2})"), &Family::TwoModeFock { n1, n2 }, &s);
    }
    for zeta in [0.1, 0.5, 1.0] {
        let s = make_tmsv(zeta, None).unwrap();
        numeric_vs_closed_two_mode(&mut checks, &format!("tmsv({zeta})"), &Family::Tmsv { zeta }, &s);
    }
    finish(2, "numeric vs closed-form bounds", &mut checks, start, Duration::from_secs(30));
}

fn gamma_single(s: State) -> hetcrb::Result<f64> {
    gamma2(&s, NODES)
}

#[test]
fn criterion_3_transition_points_and_optima() {
    let _guard = serial();
    let start = Instant::now();
    let mut checks = Checks::default();
    let mut close = |name: &str, got: f64, want: f64, tol: f64| {
        note(&format!("{name}: {got:.7} (target {want}, tol {tol:.0e})"));
        checks.check(format!("{name} = {got:.6} vs {want}"), (got - want).abs() <= tol);
    };

    let thermal = |mu: f64| gamma_single(make_gaussian(mu, 1.0, 0.0, [0.0, 0.0])?.into());
    let mu_star = find_crossover(thermal, 1.0, 3.0, 1e-12).unwrap();
    close("thermal crossover", mu_star, (30f64.sqrt() + 3.0) / 7.0, 1e-6);

    let squeezed = |mu: f64| gamma_single(make_gaussian(mu, mu, 0.0, [0.0, 0.0])?.into());
    let (x, g) = find_minimum(squeezed, 1.5, 6.0, 1e-9).unwrap();
    close("mu=lam minimum gamma", g, 0.652, 1e-3);
    close("mu=lam minimum location", x, 3.124, 1e-3);

    for (parity, cross, gmin, xmin) in [(Parity::Even, 0.693, 0.77096, 1.148), (Parity::Odd, 1.128, 0.86796, 1.980)] {
        let f = |a0: f64| gamma_single(make_cat(parity, a0, None)?.into());
        let x0 = find_crossover(f, 0.05, xmin, 1e-10).unwrap();
        close(&format!("{parity:?} cat crossover"), x0, cross, 1e-3);
        let (x, g) = find_minimum(f, xmin - 0.6, xmin + 0.6, 1e-9).unwrap();
        close(&format!("{parity:?} cat minimum gamma"), g, gmin, 1e-3);
        close(&format!("{parity:?} cat minimum location"), x, xmin, 1e-3);
    }

    let tmsv = |z: f64| gamma2_two_mode(&make_tmsv(z, None)?, NODES, CROSS);
    close("tmsv crossover", find_crossover(tmsv, 0.01, 1.0, 1e-10).unwrap(), 0.2063, 1e-3);
    close("tmsv at zeta=6", tmsv(6.0).unwrap(), 6.0 / (13.0 + 6.0 * 2f64.sqrt()), 1e-3);

    let tmfock = |n: usize| gamma2_two_mode(&make_two_mode_fock(n, n, None).unwrap(), NODES, CROSS).unwrap();
    close("two-mode Fock (0,0)", tmfock(0), 10.0 / 9.0, 1e-3);
    close("two-mode Fock (200,200)", tmfock(200), 2.0 / 7.0, 1e-3);
    finish(3, "transition points and optima", &mut checks, start, Duration::from_secs(60));
}

fn random_pure(rng: &mut StdRng) -> FockState {
    let d = rng.random_range(2..=8);
    // three empty levels on top keep the truncation guard quiet
    let v = DVector::from_fn(d + 3, |i, _| {
        if i < d {
            Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
        } else {
            c(0.0)
        }
    });
    FockState::pure(v.unscale(v.norm())).unwrap()
}

fn random_mixed(rng: &mut StdRng) -> FockState {
    let d = rng.random_range(2..=8);
    let k = rng.random_range(1..=3);
    let a = DMatrix::from_fn(d + 3, k, |i, _| {
        if i < d {
            Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
        } else {
            c(0.0)
        }
    });
    let rho = &a * a.adjoint();
    let tr = rho.trace();
    FockState::mixed(rho / tr).unwrap()
}

#[test]
fn criterion_4_first_moment_inequality() {
    let _guard = serial();
    let start = Instant::now();
    let mut checks = Checks::default();
    let mut rng = StdRng::seed_from_u64(SEED);
    let mut states: Vec<State> = Vec::with_capacity(500);
    for i in 0..150 {
        let mu = if i % 2 == 0 { 1.0 } else { rng.random_range(1.0..5.0) };
        let lam = rng.random_range(1.0..4.0);
        let angle = rng.random_range(0.0..PI);
        let disp = [rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0)];
        states.push(make_gaussian(mu, lam, angle, disp).unwrap().into());
    }
    for _ in 0..50 {
        let alpha = Complex64::from_polar(rng.random_range(0.0..2.0), rng.random_range(0.0..2.0 * PI));
        states.push(make_displaced_fock(alpha, 0, None).unwrap().into());
    }
    for _ in 0..200 {
        states.push(random_pure(&mut rng).into());
    }
    for _ in 0..100 {
        states.push(random_mixed(&mut rng).into());
    }

    let (mut saturating, mut worst_gap) = (0, 0.0f64);
    for (i, s) in states.iter().enumerate() {
        let det = covariance(s).g.determinant();
        let hom = scrb_hom(s, Order::First, NODES).unwrap();
        let het = scrb_het(s, Order::First);
        if (det - 0.25).abs() < 1e-12 {
            saturating += 1;
            worst_gap = worst_gap.max((hom - het).abs());
            checks.check(format!("state {i}: equality at det G = 1/4"), (hom - het).abs() <= 1e-9);
        } else {
            checks.check(format!("state {i}: strict at det G = {det:.6}"), hom - het > 1e-9);
        }
    }
    note(&format!("{saturating} of {} states on det G = 1/4, largest gap there {worst_gap:.1e}", states.len()));
    checks.check("both subsets populated", saturating > 0 && saturating < states.len());
    finish(4, "first-moment inequality", &mut checks, start, Duration::from_secs(30));
}

fn law_single(checks: &mut Checks, label: &str, s: &State) {
    let d = husimi_moments(s).g_het() - {
        let g = covariance(s).g;
        Matrix2::new(g[(0, 0)], g[(0, 1)], g[(1, 0)], g[(1, 1)])
    };
    let err = (d - Matrix2::identity() * 0.5).amax();
    checks.check(format!("{label} law {err:.1e}"), err < 1e-8);
}

/// Compares every tabulated Husimi moment with the phase-space integral of `rho`.
fn oracle_single(checks: &mut Checks, label: &str, s: &State, rho: &DMatrix<Complex64>) {
    let table = husimi_quadrature_table_rho(rho, rho.nrows() + 6);
    let mut err = 0.0f64;
    for (j, row) in table.iter().enumerate() {
        for (k, want) in row.iter().enumerate().take(5 - j) {
            err = err.max((husimi_moment(s, j, k) - want).abs() / want.abs().max(1.0));
        }
    }
    checks.check(format!("{label} oracle {err:.1e}"), err < 1e-6);
}

#[test]
fn criterion_5_heterodyne_noise_law() {
    let _guard = serial();
    let start = Instant::now();
    let mut checks = Checks::default();

    // Gaussians built in the Fock basis by matrix exponentials; the library state
    // only receives their first and second moments.
    for (nbar, r, phi, alpha) in [
        (0.0, 0.0, 0.0, Complex64::new(0.0, 0.0)),
        (0.0, 0.4, 0.3, Complex64::new(0.5, -0.2)),
        (0.5, 0.0, 0.0, Complex64::new(0.0, 0.0)),
        (0.3, 0.3, 1.0, Complex64::new(0.2, 0.7)),
        (0.2, 0.5, 2.0, Complex64::new(-0.8, 0.4)),
    ] {
        let rho = gaussian_density(nbar, r, phi, alpha, 160, 60);
        let (m, g) = moments_of_density(&rho);
        let s: State =
            GaussianState::from_moments(Vector2::new(m[0], m[1]), Matrix2::new(g[0][0], g[0][1], g[1][0], g[1][1]))
                .unwrap()
                .into();
        let label = format!("gauss(nbar={nbar},r={r})");
        checks.check(format!("{label} truncation"), (rho.trace().re - 1.0).abs() < 1e-12);
        law_single(&mut checks, &label, &s);
        oracle_single(&mut checks, &label, &s, &rho);
    }

    let mut fock_family: Vec<(String, FockState)> = Vec::new();
    for n in [0usize, 1, 2, 4, 7] {
        fock_family.push((format!("fock({n})"), make_fock(n, None).unwrap()));
    }
    for parity in [Parity::Even, Parity::Odd] {
        for a0 in [0.2, 0.7, 1.0, 1.5, 2.0] {
            fock_family.push((format!("cat{parity:?}({a0})"), make_cat(parity, a0, None).unwrap()));
        }
    }
    for (a0, m) in [(0.0, 1usize), (0.5, 2), (1.0, 0), (1.3, 3), (2.0, 4)] {
        fock_family.push((format!("dfock({a0},{m})"), make_displaced_fock(c(a0), m, None).unwrap()));
        fock_family.push((format!("padd({a0},{m})"), make_photon_added(c(a0), m, None).unwrap()));
    }
    for nbar in [0.1, 0.3, 0.5, 1.0, 1.5] {
        fock_family.push((format!("thermal({nbar})"), make_thermal_fock(nbar, 120).unwrap()));
    }
    for (label, f) in &fock_family {
        let rho = f.rho().clone();
        let s: State = f.clone().into();
        law_single(&mut checks, label, &s);
        oracle_single(&mut checks, label, &s, &rho);
    }

    for (n1, n2) in [(0usize, 0usize), (0, 1), (1, 2), (3, 3), (2, 5)] {
        let s = make_two_mode_fock(n1, n2, None).unwrap();
        let err = (husimi_moments_two_mode(&s).g_het() - covariance_two_mode(&s).g - DMatrix::identity(4, 4) * 0.5).amax();
        checks.check(format!("tmfock({n1},{n2}) law {err:.1e}"), err < 1e-8);
        // the cross moments of a product factorize into single-mode integrals
        let (f1, f2) = (make_fock(n1, None).unwrap(), make_fock(n2, None).unwrap());
        let t1 = husimi_quadrature_table_rho(f1.rho(), f1.dim() + 6);
        let t2 = husimi_quadrature_table_rho(f2.rho(), f2.dim() + 6);
        let h = husimi_moments_two_mode(&s);
        let mut err = 0.0f64;
        for e in [[2, 0, 2, 0], [1, 1, 1, 1], [0, 2, 0, 2], [2, 0, 0, 2], [4, 0, 0, 0], [0, 0, 0, 4]] {
            let want = t1[e[0]][e[1]] * t2[e[2]][e[3]];
            err = err.max((h.moment(e) - want).abs() / want.abs().max(1.0));
        }
        checks.check(format!("tmfock({n1},{n2}) oracle {err:.1e}"), err < 1e-6);
    }
    for zeta in [0.0, 0.2, 0.5, 0.8, 1.2] {
        let s = make_tmsv(zeta, None).unwrap();
        let h = husimi_moments_two_mode(&s);
        let err = (h.g_het() - covariance_two_mode(&s).g - DMatrix::identity(4, 4) * 0.5).amax();
        checks.check(format!("tmsv({zeta}) law {err:.1e}"), err < 1e-8);
        let dim = 60;
        let v = schmidt_vector(&tmsv_coeffs(zeta, dim), dim);
        let want = husimi_second_moments_two_mode(&v, dim);
        let got = DMatrix::from_fn(4, 4, |i, j| {
            let mut e = [0; 4];
            e[i] += 1;
            e[j] += 1;
            h.moment(e)
        });
        let err = (got - want).amax();
        checks.check(format!("tmsv({zeta}) oracle {err:.1e}"), err < 1e-6);
    }
    finish(5, "heterodyne noise law", &mut checks, start, Duration::from_secs(600));
}

fn efficiency_ok(r: &MseResult) -> bool {
    if r.scheme == Scheme::Het && r.order == Order::First {
        (r.scaled_mse - r.scrb).abs() <= 3.0 * r.std_err
    } else {
        (r.ratio - 1.0).abs() <= 0.05
    }
}

#[test]
fn criterion_6_monte_carlo_efficiency() {
    let _guard = serial();
    let start = Instant::now();
    let mut checks = Checks::default();
    let singles: Vec<(&str, State)> = vec![
        ("vacuum", GaussianState::vacuum().into()),
        ("fock(1)", make_fock(1, None).unwrap().into()),
        ("thermal(mu=3)", make_gaussian(3.0, 1.0, 0.0, [0.0, 0.0]).unwrap().into()),
        ("cat+(1)", make_cat(Parity::Even, 1.0, None).unwrap().into()),
    ];
    let tmsv = make_tmsv(0.5, None).unwrap();
    for scheme in [Scheme::Hom, Scheme::Het] {
        for order in [Order::First, Order::Second] {
            let cfg = MseConfig::new(scheme, order, 100_000, 200, SEED);
            let mut rows: Vec<(&str, MseResult)> =
                singles.iter().map(|(l, s)| (*l, mse_experiment_with(s, &cfg).unwrap())).collect();
            rows.push(("tmsv(0.5)", mse_experiment2(&tmsv, &cfg).unwrap()));
            for (label, r) in rows {
                let ok = efficiency_ok(&r);
                let name = format!("{label} {scheme} M={}", order.as_usize());
                note(&format!(
                    "{name}: scaled mse {:.4} +- {:.4}, scrb {:.4}, ratio {:.4}, failures {} {}",
                    r.scaled_mse,
                    r.std_err,
                    r.scrb,
                    r.ratio,
                    r.failures,
                    if ok { "ok" } else { "OUT" }
                ));
                checks.check(format!("{name} ratio {:.4}", r.ratio), ok);
            }
        }
    }
    finish(6, "Monte-Carlo efficiency", &mut checks, start, Duration::from_secs(600));
}

#[test]
fn criterion_7_displaced_and_photon_added_slices() {
    let _guard = serial();
    let start = Instant::now();
    let mut checks = Checks::default();
    let grid: Vec<f64> = (0..=60).map(|i| 0.05 * i as f64).collect();
    type Maker = fn(Complex64, usize, Option<usize>) -> hetcrb::Result<FockState>;
    for (family, make) in [("dfock", make_displaced_fock as Maker), ("padd", make_photon_added as Maker)] {
        for m in 0..=4usize {
            let f = |a0: f64| gamma_single(make(c(a0), m, None)?.into());
            let values: Vec<f64> = grid.iter().map(|&a| f(a).unwrap()).collect();
            let name = format!("{family} m={m}");
            let below = values.iter().filter(|&&g| g < 1.0).count();
            if m >= 2 {
                checks.check(format!("{name} gamma < 1 everywhere"), below == values.len());
            } else {
                checks.check(format!("{name} sign change"), below > 0 && below < values.len());
            }
            let k = values.iter().enumerate().min_by(|a, b| a.1.total_cmp(b.1)).unwrap().0;
            let interior = k > 0 && k + 1 < grid.len();
            let refined = interior && find_minimum(f, grid[k - 1], grid[k + 1], 1e-8).is_ok();
            if refined {
                let (x, g) = find_minimum(f, grid[k - 1], grid[k + 1], 1e-8).unwrap();
                note(&format!("{name}: minimum gamma {g:.6} at a0 = {x:.5}"));
            }
            checks.check(format!("{name} interior minimum"), refined);
        }
    }
    finish(7, "displaced and photon-added slices", &mut checks, start, Duration::from_secs(120));
}

#[test]
fn criterion_8_selftest_determinism() {
    let _guard = serial();
    let start = Instant::now();
    let mut checks = Checks::default();
    let cli = hetcrb_cli::Cli::parse_canonical(&format!("selftest --seed {SEED}")).unwrap();
    let hash = || {
        let out = hetcrb_cli::cmd_selftest(&cli).unwrap();
        out.text.lines().find_map(|l| l.strip_prefix("report hash: ").map(str::to_string)).unwrap()
    };
    let (a, b) = (hash(), hash());
    note(&format!("report hash {a}"));
    checks.check("identical report hashes", a == b);
    finish(8, "selftest determinism", &mut checks, start, Duration::from_secs(600));
}
