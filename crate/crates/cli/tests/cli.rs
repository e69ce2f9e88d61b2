use std::process::Command;

use hetcrb_cli::{run, Cli};

fn hetcrb(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_hetcrb")).args(args).output().expect("binary runs");
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

fn reader(csv: &str) -> csv::Reader<&[u8]> {
    csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(csv.as_bytes())
}

/// Data rows split into cells.
fn rows(csv: &str) -> Vec<Vec<String>> {
    reader(csv).records().map(|r| r.unwrap().iter().map(str::to_string).collect()).collect()
}

fn header(csv: &str) -> Vec<String> {
    reader(csv).headers().unwrap().iter().map(str::to_string).collect()
}

fn column(csv: &str, name: &str) -> Vec<f64> {
    let idx = header(csv).iter().position(|h| h == name).unwrap();
    rows(csv).iter().map(|r| r[idx].parse().unwrap()).collect()
}

/// Numbers after `key` in `# ...` summary lines.
fn summary_numbers(csv: &str, key: &str) -> Vec<Vec<f64>> {
    csv.lines()
        .filter(|l| l.starts_with(&format!("# {key}:")))
        .map(|l| {
            l.split(|c: char| c == '=' || c == ' ' || c == ',' || c == '[' || c == ']')
                .filter_map(|t| t.parse::<f64>().ok())
                .collect()
        })
        .collect()
}

#[test]
fn one_photon_row() {
    let (code, out, _) = hetcrb(&["crb", "--state", "fock:n=1", "--order", "2"]);
    assert_eq!(code, 0);
    assert!((column(&out, "scrb_hom")[0] - 15.0).abs() < 1e-10);
    assert!((column(&out, "scrb_het")[0] - 16.0).abs() < 1e-10);
    assert!((column(&out, "gamma")[0] - 16.0 / 15.0).abs() < 1e-10);
}

#[test]
fn vacuum_first_order_row() {
    let (_, out, _) = hetcrb(&["crb", "--state", "gauss:mu=1,lam=1", "--order", "1"]);
    assert_eq!(rows(&out)[0][0], "gauss:mu=1,lam=1,angle=0");
    assert!((column(&out, "scrb_hom")[0] - 2.0).abs() < 1e-12);
    assert!((column(&out, "scrb_het")[0] - 2.0).abs() < 1e-12);
    assert!((column(&out, "gamma")[0] - 1.0).abs() < 1e-12);
}

#[test]
fn tmsv_transition_row() {
    let (_, out, _) = hetcrb(&["crb", "--state", "tmsv:zeta=0.2063", "--order", "2"]);
    assert!((column(&out, "gamma")[0] - 1.0).abs() < 1e-3);
}

#[test]
fn closed_form_flag_matches_numeric() {
    let (_, a, _) = hetcrb(&["crb", "--state", "cat:+,a0=1.3", "--closed-form"]);
    let (_, b, _) = hetcrb(&["crb", "--state", "cat:+,a0=1.3"]);
    assert_eq!(rows(&a)[0].last().unwrap(), "closed-form");
    assert!((column(&a, "gamma")[0] - column(&b, "gamma")[0]).abs() < 1e-9);
}

#[test]
fn squeezed_sweep_minimum() {
    let (code, out, _) = hetcrb(&["sweep", "--state", "gauss:lam=mu", "--sweep", "mu=1:10:0.1"]);
    assert_eq!(code, 0);
    let minima = summary_numbers(&out, "minimum");
    assert_eq!(minima.len(), 1);
    assert!((minima[0][0] - 0.652).abs() < 1e-3 && (minima[0][1] - 3.124).abs() < 1e-3, "{minima:?}");
}

#[test]
fn fock_sweep_is_monotone_toward_two_fifths() {
    let (_, out, _) = hetcrb(&["sweep", "--state", "fock:", "--sweep", "n=0:30:1"]);
    let g = column(&out, "gamma");
    assert_eq!(g.len(), 31);
    assert!((g[0] - 1.2).abs() < 1e-12);
    assert!(g.windows(2).all(|w| w[1] < w[0]));
    assert!(g[30] > 0.4 && g[30] < 0.45);
    assert!(out.contains("# crossover: n in [1.00000, 2.00000]"), "{out}");
}

#[test]
fn odd_cat_sweep_summary() {
    let (_, out, _) = hetcrb(&["sweep", "--state", "cat:-,limit", "--sweep", "a0=0:4:0.05"]);
    let cross = summary_numbers(&out, "crossover");
    assert_eq!(cross.len(), 1);
    assert!((cross[0][0] - 1.128).abs() < 1e-3);
    let min = summary_numbers(&out, "minimum");
    assert!((min[0][0] - 0.86796).abs() < 1e-3 && (min[0][1] - 1.980).abs() < 1e-3, "{min:?}");
}

#[test]
fn vacuum_het_n_sweep_ratio() {
    // exactly chi-square: many cheap trials pin the ratio to about 1%
    let (code, out, _) = hetcrb(&[
        "mse", "--state", "gauss:mu=1,lam=1", "--scheme", "het", "--order", "1", "--n", "100,1000", "--trials", "20000",
    ]);
    assert_eq!(code, 0);
    for r in column(&out, "ratio") {
        assert!((r - 1.0).abs() < 0.03, "{r}");
    }
}

#[test]
fn one_photon_hom_second_order_ratio() {
    let (_, out, _) = hetcrb(&["mse", "--state", "fock:n=1", "--scheme", "hom", "--order", "2", "--trials", "1000"]);
    let r = column(&out, "ratio")[0];
    assert!((r - 1.0).abs() < 0.05, "{r}");
}

#[test]
fn tmsv_het_second_order_ratio() {
    let (_, out, _) = hetcrb(&["mse", "--state", "tmsv:zeta=0.5", "--scheme", "het", "--order", "2", "--trials", "1000"]);
    let r = column(&out, "ratio")[0];
    assert!((r - 1.0).abs() < 0.05, "{r}");
}

#[test]
fn csv_is_byte_stable() {
    let args = ["mse", "--state", "cat:+,a0=1", "--n", "2000", "--trials", "20", "--seed", "9"];
    assert_eq!(hetcrb(&args).1, hetcrb(&args).1);
}

#[test]
fn csv_has_metadata_and_header() {
    for args in [
        vec!["crb", "--state", "fock:n=2"],
        vec!["sweep", "--state", "tmsv:", "--sweep", "zeta=0:0.2:0.1"],
        vec!["mse", "--state", "fock:n=0", "--n", "500", "--trials", "4"],
    ] {
        let (code, out, _) = hetcrb(&args);
        assert_eq!(code, 0);
        for key in ["# hetcrb ", "# command: ", "# seed: ", "# nodes: ", "# allocation: "] {
            assert!(out.contains(key), "{key} missing in {out}");
        }
        assert!(!header(&out).is_empty());
        assert!(!out.contains('\r'));
    }
}

#[test]
fn selftest_passes_by_default() {
    let (code, out, _) = hetcrb(&["selftest"]);
    assert_eq!(code, 0, "{out}");
}

#[test]
fn selftest_fails_at_eight_nodes() {
    let (code, out, _) = hetcrb(&["selftest", "--nodes", "8"]);
    assert_eq!(code, 1);
    assert!(out.contains("FAIL fisher-node-convergence"), "{out}");
}

#[test]
fn selftest_hash_repeats_with_seed() {
    let hash = |o: String| o.lines().find(|l| l.starts_with("report hash")).unwrap().to_string();
    let a = hash(hetcrb(&["selftest", "--seed", "31"]).1);
    let b = hash(hetcrb(&["selftest", "--seed", "31"]).1);
    assert_eq!(a, b);
}

#[test]
fn config_errors_exit_with_two() {
    assert_eq!(hetcrb(&["crb", "--state", "fock:n=-1"]).0, 2);
    assert_eq!(hetcrb(&["crb", "--state", "nonsense"]).0, 2);
    assert_eq!(hetcrb(&["crb", "--order", "3"]).0, 2);
    assert_eq!(hetcrb(&["sweep", "--state", "fock:"]).0, 2);
    assert_eq!(hetcrb(&["sweep", "--sweep", "mu=3:1:0.1"]).0, 2);
    assert_eq!(hetcrb(&["mse", "--trials", "1"]).0, 2);
    assert_eq!(run(["hetcrb", "frobnicate"]), 2);
}

#[test]
fn canonical_config_round_trips() {
    let cli = Cli::parse_canonical(
        "sweep --state gauss:lam=mu --order 1 --sweep mu=1:10:0.25 --n 10,100 --seed 4 --n-theta 8 --closed-form",
    )
    .unwrap();
    let text = cli.canonical();
    let again = Cli::parse_canonical(&text).unwrap();
    assert_eq!(again, cli);
    assert_eq!(again.canonical(), text);
}

#[test]
fn out_flag_writes_file() {
    let path = std::env::temp_dir().join(format!("hetcrb-out-{}.csv", std::process::id()));
    let p = path.to_str().unwrap();
    let (code, stdout, _) = hetcrb(&["crb", "--state", "fock:n=3", "--out", p]);
    assert_eq!(code, 0);
    assert!(stdout.is_empty());
    let written = std::fs::read_to_string(&path).unwrap();
    assert!((column(&written, "scrb_het")[0] - 48.0).abs() < 1e-9);
    std::fs::remove_file(path).unwrap();
}
