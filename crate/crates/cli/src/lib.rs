//! Command-line front end: bound tables, parameter sweeps, Monte-Carlo MSE
//! runs and the self-test battery, all written as CSV.

use std::fmt::{self, Write as _};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use hetcrb::crb::{
    closed_form_scrb, compare, find_crossover, find_minimum, Family, Method, Order, Scheme, DEFAULT_CROSS_NODES,
    DEFAULT_NODES,
};
use hetcrb::estimation::{default_phases, mse_experiment2, mse_experiment_with, MseConfig, MseResult};
use hetcrb::selftest::{run_selftest, SelftestConfig, DEFAULT_SEED};
use hetcrb::states::{AnyState, ParsedState, StateSpec};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Errors split by exit status: configuration (2) and runtime (1).
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error(transparent)]
    Compute(#[from] hetcrb::Error),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Compute(hetcrb::Error::Parse { .. } | hetcrb::Error::InvalidParameter(_)) => 2,
            _ => 1,
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SchemeArg {
    Hom,
    Het,
    Both,
}

impl SchemeArg {
    fn schemes(self) -> Vec<Scheme> {
        match self {
            SchemeArg::Hom => vec![Scheme::Hom],
            SchemeArg::Het => vec![Scheme::Het],
            SchemeArg::Both => vec![Scheme::Hom, Scheme::Het],
        }
    }

    fn as_str(self) -> &'static str {
        match self {
            SchemeArg::Hom => "hom",
            SchemeArg::Het => "het",
            SchemeArg::Both => "both",
        }
    }
}

/// `var=lo:hi:step`.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub var: String,
    pub lo: f64,
    pub hi: f64,
    pub step: f64,
}

impl SweepSpec {
    pub fn values(&self) -> Vec<f64> {
        let count = ((self.hi - self.lo) / self.step + 1e-9).floor() as usize;
        (0..=count).map(|i| self.lo + i as f64 * self.step).collect()
    }
}

impl std::str::FromStr for SweepSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let (var, range) = s.split_once('=').ok_or("expected var=lo:hi:step")?;
        let parts: Vec<&str> = range.split(':').collect();
        if parts.len() != 3 {
            return Err("expected var=lo:hi:step".into());
        }
        let num = |t: &str| t.trim().parse::<f64>().map_err(|_| format!("bad number `{t}`"));
        let (lo, hi, step) = (num(parts[0])?, num(parts[1])?, num(parts[2])?);
        if !(step > 0.0) || !(hi >= lo) || !lo.is_finite() || !hi.is_finite() {
            return Err("need lo <= hi and step > 0".into());
        }
        if var.trim().is_empty() {
            return Err("empty sweep variable".into());
        }
        Ok(SweepSpec { var: var.trim().to_string(), lo, hi, step })
    }
}

impl fmt::Display for SweepSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}={}:{}:{}", self.var, self.lo, self.hi, self.step)
    }
}

/// Options shared by every subcommand.
#[derive(Debug, Clone, PartialEq, Args)]
pub struct RunConfig {
    /// State description, e.g. `fock:n=1` or `gauss:mu=2,lam=mu`
    #[arg(long, global = true, default_value = "gauss:mu=1,lam=1")]
    pub state: String,
    /// Moment order (1 or 2)
    #[arg(long, global = true, default_value_t = 2, value_parser = clap::value_parser!(u8).range(1..=2))]
    pub order: u8,
    #[arg(long, global = true, value_enum, default_value_t = SchemeArg::Both)]
    pub scheme: SchemeArg,
    /// Sweep variable and range, `var=lo:hi:step`
    #[arg(long, global = true)]
    pub sweep: Option<SweepSpec>,
    /// Samples per experiment; a comma list runs an N-sweep
    #[arg(long, global = true, value_delimiter = ',', default_value = "100000")]
    pub n: Vec<usize>,
    #[arg(long, global = true, default_value_t = 200)]
    pub trials: usize,
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Trapezoid nodes for single-mode Fisher integrals
    #[arg(long, global = true, default_value_t = DEFAULT_NODES)]
    pub nodes: usize,
    /// Nodes per axis for the cross-mode Fisher integral
    #[arg(long, global = true, default_value_t = DEFAULT_CROSS_NODES)]
    pub cross_nodes: usize,
    /// Homodyne phases per mode (defaults: 4 for M=1, 6 for M=2)
    #[arg(long, global = true)]
    pub n_theta: Option<usize>,
    /// Histogram bins per phase for homodyne data
    #[arg(long, global = true)]
    pub bins: Option<usize>,
    /// Use closed forms where available instead of numeric integration
    #[arg(long, global = true)]
    pub closed_form: bool,
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum CommandKind {
    /// Scaled bounds and gamma for one state
    Crb,
    /// Gamma along a parameter sweep, with crossovers and minima
    Sweep,
    /// Monte-Carlo scaled MSE of the optimal estimators
    Mse,
    /// Consistency battery
    Selftest,
}

impl CommandKind {
    fn as_str(self) -> &'static str {
        match self {
            CommandKind::Crb => "crb",
            CommandKind::Sweep => "sweep",
            CommandKind::Mse => "mse",
            CommandKind::Selftest => "selftest",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Parser)]
#[command(name = "hetcrb", version, about = "Homodyne versus heterodyne moment tomography bounds")]
pub struct Cli {
    #[command(subcommand)]
    pub command: CommandKind,
    #[command(flatten)]
    pub config: RunConfig,
}

impl Cli {
    /// Canonical argument string; parsing it yields the same configuration.
    pub fn canonical(&self) -> String {
        let c = &self.config;
        let mut s = format!(
            "{} --state {} --order {} --scheme {}",
            self.command.as_str(),
            c.state,
            c.order,
            c.scheme.as_str()
        );
        if let Some(sw) = &c.sweep {
            let _ = write!(s, " --sweep {sw}");
        }
        let ns: Vec<String> = c.n.iter().map(usize::to_string).collect();
        let _ = write!(
            s,
            " --n {} --trials {} --seed {} --nodes {} --cross-nodes {}",
            ns.join(","),
            c.trials,
            c.seed,
            c.nodes,
            c.cross_nodes
        );
        if let Some(t) = c.n_theta {
            let _ = write!(s, " --n-theta {t}");
        }
        if let Some(b) = c.bins {
            let _ = write!(s, " --bins {b}");
        }
        if c.closed_form {
            s.push_str(" --closed-form");
        }
        if let Some(o) = &c.out {
            let _ = write!(s, " --out {}", o.display());
        }
        s
    }

    pub fn parse_canonical(s: &str) -> Result<Self, clap::Error> {
        Cli::try_parse_from(std::iter::once("hetcrb").chain(s.split_whitespace()))
    }

    fn order(&self) -> Order {
        if self.config.order == 1 {
            Order::First
        } else {
            Order::Second
        }
    }
}

/// Command output and whether any check failed.
#[derive(Debug, Clone, PartialEq)]
pub struct Output {
    pub text: String,
    pub failed: bool,
}

/// Full-precision CSV number.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

/// RFC 4180 quoting for fields that contain separators.
pub fn field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Six significant digits for human-facing summaries.
pub fn sig6(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let decimals = (5 - x.abs().log10().floor() as i32).clamp(0, 17) as usize;
    format!("{x:.decimals$}")
}

fn metadata(cli: &Cli) -> String {
    let c = &cli.config;
    let mut m = String::new();
    let _ = writeln!(m, "# hetcrb {VERSION}");
    let _ = writeln!(m, "# command: {}", cli.canonical());
    let _ = writeln!(m, "# seed: {}", c.seed);
    let _ = writeln!(m, "# nodes: {}, cross_nodes: {}", c.nodes, c.cross_nodes);
    let n_theta = c.n_theta.unwrap_or_else(|| default_phases(cli.order()));
    let _ = writeln!(
        m,
        "# allocation: {n_theta} phases (k-1/2)pi/n_theta per mode, equal samples per phase, remainder to earliest; two-mode sectors share all shots"
    );
    m
}

fn parse_state(input: &str, vars: &[(&str, f64)]) -> CliResult<ParsedState> {
    Ok(ParsedState::parse_with(input, vars)?)
}

fn family_of(p: &ParsedState) -> Option<Family> {
    Some(match p.spec {
        StateSpec::Gauss { mu, lam, x, p: mom, .. } if x == 0.0 && mom == 0.0 => Family::Gaussian { mu, lam },
        StateSpec::Fock { n } => Family::Fock { n },
        StateSpec::Cat { parity, a0, .. } => Family::Cat { parity, a0 },
        StateSpec::Tmsv { zeta } => Family::Tmsv { zeta },
        StateSpec::TwoModeFock { n1, n2 } => Family::TwoModeFock { n1, n2 },
        _ => return None,
    })
}

struct Bounds {
    hom: f64,
    het: f64,
    method: Method,
}

fn bounds(cli: &Cli, parsed: &ParsedState) -> CliResult<Bounds> {
    let order = cli.order();
    let c = &cli.config;
    if c.closed_form {
        let fam = family_of(parsed)
            .ok_or_else(|| CliError::Compute(hetcrb::Error::NoClosedForm(parsed.to_string())))?;
        return Ok(Bounds {
            hom: closed_form_scrb(&fam, Scheme::Hom, order)?,
            het: closed_form_scrb(&fam, Scheme::Het, order)?,
            method: Method::ClosedForm,
        });
    }
    let state: AnyState = parsed.build()?;
    let cmp = compare(&state, order, c.nodes, c.cross_nodes)?;
    Ok(Bounds { hom: cmp.hom.total, het: cmp.het.total, method: Method::Numeric })
}

fn bound_cells(cli: &Cli, b: &Bounds) -> String {
    let schemes = cli.config.scheme;
    let hom = if schemes != SchemeArg::Het { num(b.hom) } else { String::new() };
    let het = if schemes != SchemeArg::Hom { num(b.het) } else { String::new() };
    let gamma = if schemes == SchemeArg::Both { num(b.het / b.hom) } else { String::new() };
    format!("{hom},{het},{gamma},{}", b.method)
}

pub fn cmd_crb(cli: &Cli) -> CliResult<Output> {
    let parsed = parse_state(&cli.config.state, &[])?;
    let b = bounds(cli, &parsed)?;
    let mut text = metadata(cli);
    text.push_str("state,order,scrb_hom,scrb_het,gamma,method\n");
    let _ = writeln!(text, "{},{},{}", field(&parsed.to_string()), cli.config.order, bound_cells(cli, &b));
    Ok(Output { text, failed: false })
}

fn gamma_at(cli: &Cli, var: &str, x: f64) -> hetcrb::Result<f64> {
    let parsed = ParsedState::parse_with(&cli.config.state, &[(var, x)])?;
    let cmp = compare(&parsed.build()?, cli.order(), cli.config.nodes, cli.config.cross_nodes)?;
    Ok(cmp.ratio)
}

pub fn cmd_sweep(cli: &Cli) -> CliResult<Output> {
    let sweep = cli
        .config
        .sweep
        .clone()
        .ok_or_else(|| CliError::Config("sweep needs --sweep var=lo:hi:step".into()))?;
    let var = sweep.var.as_str();
    let xs = sweep.values();
    // validate every point before any heavy work
    let parsed = xs
        .iter()
        .map(|&x| parse_state(&cli.config.state, &[(var, x)]))
        .collect::<CliResult<Vec<_>>>()?;
    let rows = parsed.par_iter().map(|p| bounds(cli, p)).collect::<Vec<_>>();
    let rows = rows.into_iter().collect::<CliResult<Vec<_>>>()?;

    let mut text = metadata(cli);
    let _ = writeln!(text, "{var},state,scrb_hom,scrb_het,gamma,method");
    for ((x, p), b) in xs.iter().zip(&parsed).zip(&rows) {
        let _ = writeln!(text, "{},{},{}", num(*x), field(&p.to_string()), bound_cells(cli, b));
    }

    let gammas: Vec<f64> = rows.iter().map(|b| b.het / b.hom).collect();
    text.push_str("# summary\n");
    for i in 0..xs.len().saturating_sub(1) {
        let (a, b) = (gammas[i] - 1.0, gammas[i + 1] - 1.0);
        if a == 0.0 || a.signum() != b.signum() {
            match find_crossover(|x| gamma_at(cli, var, x), xs[i], xs[i + 1], 1e-10) {
                Ok(x) => {
                    let _ = writeln!(text, "# crossover: {var} = {}", sig6(x));
                }
                // integer-valued variables cannot be refined off the grid
                Err(_) => {
                    let _ = writeln!(text, "# crossover: {var} in [{}, {}]", sig6(xs[i]), sig6(xs[i + 1]));
                }
            }
        }
    }
    for i in 1..xs.len().saturating_sub(1) {
        if gammas[i] < gammas[i - 1] && gammas[i] <= gammas[i + 1] {
            let (x, g) = find_minimum(|x| gamma_at(cli, var, x), xs[i - 1], xs[i + 1], 1e-9)
                .unwrap_or((xs[i], gammas[i]));
            let _ = writeln!(text, "# minimum: gamma = {} at {var} = {}", sig6(g), sig6(x));
        }
    }
    if let (Some(first), Some(last)) = (gammas.first(), gammas.last()) {
        let _ = writeln!(text, "# endpoints: gamma = {} .. {}", sig6(*first), sig6(*last));
    }
    Ok(Output { text, failed: false })
}

pub fn cmd_mse(cli: &Cli) -> CliResult<Output> {
    let c = &cli.config;
    let parsed = parse_state(&c.state, &[])?;
    let state = parsed.build()?;
    let mut text = metadata(cli);
    text.push_str("n,scheme,order,scaled_mse,std_err,scrb,ratio,trials,failures,n_theta\n");
    for &n in &c.n {
        for scheme in c.scheme.schemes() {
            let mut cfg = MseConfig::new(scheme, cli.order(), n, c.trials, c.seed);
            cfg.n_theta = c.n_theta;
            cfg.bins = c.bins;
            let r: MseResult = match &state {
                AnyState::Single(s) => mse_experiment_with(&s, &cfg)?,
                AnyState::Two(t) => mse_experiment2(&t, &cfg)?,
            };
            let _ = writeln!(
                text,
                "{},{},{},{},{},{},{},{},{},{}",
                r.n,
                r.scheme,
                c.order,
                num(r.scaled_mse),
                num(r.std_err),
                num(r.scrb),
                num(r.ratio),
                r.trials,
                r.failures,
                r.n_theta.map(|t| t.to_string()).unwrap_or_default()
            );
        }
    }
    Ok(Output { text, failed: false })
}

pub fn cmd_selftest(cli: &Cli) -> CliResult<Output> {
    let report = run_selftest(SelftestConfig { nodes: cli.config.nodes, seed: cli.config.seed });
    let mut text = String::new();
    let _ = writeln!(text, "# hetcrb {VERSION} selftest, nodes {}, seed {}", cli.config.nodes, cli.config.seed);
    for c in &report.checks {
        let verdict = if c.passed { "PASS" } else { "FAIL" };
        let _ = writeln!(text, "{verdict} {:<26} {} ({:.1} ms)", c.name, c.detail, c.elapsed.as_secs_f64() * 1e3);
    }
    let failing = report.failing();
    if failing.is_empty() {
        let _ = writeln!(text, "all {} checks passed", report.checks.len());
    } else {
        let _ = writeln!(text, "failed: {}", failing.join(", "));
    }
    let _ = writeln!(text, "report hash: {}", report.hash());
    Ok(Output { text, failed: !report.passed() })
}

pub fn execute(cli: &Cli) -> CliResult<Output> {
    if cli.config.trials < 2 && cli.command == CommandKind::Mse {
        return Err(CliError::Config("--trials must be at least 2".into()));
    }
    let out = match cli.command {
        CommandKind::Crb => cmd_crb(cli),
        CommandKind::Sweep => cmd_sweep(cli),
        CommandKind::Mse => cmd_mse(cli),
        CommandKind::Selftest => cmd_selftest(cli),
    }?;
    if let Some(path) = &cli.config.out {
        std::fs::write(path, &out.text)?;
    }
    Ok(out)
}

/// Parses arguments, runs, prints, and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli) {
        Ok(out) => {
            if cli.config.out.is_none() || cli.command == CommandKind::Selftest {
                print!("{}", out.text);
            }
            i32::from(out.failed)
        }
        Err(e) => {
            eprintln!("hetcrb: {e}");
            e.exit_code()
        }
    }
}
