//! The textual state grammar used by the command line.
//!
//! ```text
//! gauss:mu=2,lam=2,angle=0.3[,x=..,p=..]
//! fock:n=3
//! cat:+,a0=1.0            cat:-,a0=0,limit
//! dfock:a0=1.0,m=2[,phi=..]
//! padd:a0=1.0,m=2[,phi=..]
//! tmsv:zeta=0.5
//! tmfock:n1=1,n2=2
//! ```
//!
//! Every family also accepts `dim=..`. A value may name a bound variable
//! (for sweeps), e.g. `gauss:lam=mu` with `mu` bound. A bound variable named
//! after a primary parameter (not angle, x, p or phi) also sets that
//! parameter when it is not given.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;

use super::{
    make_cat, make_cat_limit, make_displaced_fock, make_fock, make_gaussian, make_photon_added,
    make_tmsv, make_two_mode_fock, AnyState, Parity, State,
};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum StateSpec {
    Gauss { mu: f64, lam: f64, angle: f64, x: f64, p: f64 },
    Fock { n: usize },
    Cat { parity: Parity, a0: f64, limit: bool },
    DisplacedFock { a0: f64, phi: f64, m: usize },
    PhotonAdded { a0: f64, phi: f64, m: usize },
    Tmsv { zeta: f64 },
    TwoModeFock { n1: usize, n2: usize },
}

/// A parsed state description with optional truncation override.
#[derive(Debug, Clone, PartialEq)]
pub struct ParsedState {
    pub spec: StateSpec,
    pub dim: Option<usize>,
}

fn parse_err(input: &str, reason: impl Into<String>) -> Error {
    Error::Parse { input: input.to_string(), reason: reason.into() }
}

struct Fields<'a> {
    input: &'a str,
    map: BTreeMap<String, f64>,
    flags: Vec<String>,
}

impl Fields<'_> {
    fn real(&mut self, key: &str, default: Option<f64>) -> Result<f64> {
        match self.map.remove(key) {
            Some(v) => Ok(v),
            None => default.ok_or_else(|| parse_err(self.input, format!("missing `{key}`"))),
        }
    }

    fn count(&mut self, key: &str, default: Option<usize>) -> Result<usize> {
        let v = self.real(key, default.map(|d| d as f64))?;
        if v < 0.0 || v.fract() != 0.0 || v > 1e6 {
            return Err(parse_err(self.input, format!("`{key}` must be a non-negative integer")));
        }
        Ok(v as usize)
    }

    fn finish(self) -> Result<()> {
        if let Some(k) = self.map.keys().next() {
            return Err(parse_err(self.input, format!("unknown field `{k}`")));
        }
        if let Some(f) = self.flags.first() {
            return Err(parse_err(self.input, format!("unexpected token `{f}`")));
        }
        Ok(())
    }
}

impl ParsedState {
    pub fn parse(input: &str) -> Result<Self> {
        Self::parse_with(input, &[])
    }

    /// Parses with named variables that field values may refer to.
    pub fn parse_with(input: &str, vars: &[(&str, f64)]) -> Result<Self> {
        let (family, rest) = input
            .split_once(':')
            .ok_or_else(|| parse_err(input, "expected `family:fields`"))?;
        let mut fields = Fields { input, map: BTreeMap::new(), flags: Vec::new() };
        for tok in rest.split(',').map(str::trim).filter(|t| !t.is_empty()) {
            match tok.split_once('=') {
                Some((k, v)) => {
                    let k = k.trim();
                    let v = v.trim();
                    let val = match vars.iter().find(|(name, _)| *name == v) {
                        Some((_, x)) => *x,
                        None => v
                            .parse::<f64>()
                            .map_err(|_| parse_err(input, format!("bad number `{v}` for `{k}`")))?,
                    };
                    if fields.map.insert(k.to_string(), val).is_some() {
                        return Err(parse_err(input, format!("duplicate field `{k}`")));
                    }
                }
                None => fields.flags.push(tok.to_string()),
            }
        }
        for (name, val) in vars {
            if !fields.map.contains_key(*name) && is_primary(family.trim(), name) {
                fields.map.insert(name.to_string(), *val);
            }
        }
        let dim = match fields.map.contains_key("dim") {
            true => Some(fields.count("dim", None)?),
            false => None,
        };
        let spec = match family.trim() {
            "gauss" => StateSpec::Gauss {
                mu: fields.real("mu", Some(1.0))?,
                lam: fields.real("lam", Some(1.0))?,
                angle: fields.real("angle", Some(0.0))?,
                x: fields.real("x", Some(0.0))?,
                p: fields.real("p", Some(0.0))?,
            },
            "fock" => StateSpec::Fock { n: fields.count("n", None)? },
            "cat" => {
                let parity = match fields.flags.iter().position(|f| f == "+" || f == "-") {
                    Some(i) => match fields.flags.remove(i).as_str() {
                        "+" => Parity::Even,
                        _ => Parity::Odd,
                    },
                    None => return Err(parse_err(input, "cat needs a parity `+` or `-`")),
                };
                let limit = match fields.flags.iter().position(|f| f == "limit") {
                    Some(i) => {
                        fields.flags.remove(i);
                        true
                    }
                    None => false,
                };
                StateSpec::Cat { parity, a0: fields.real("a0", Some(0.0))?, limit }
            }
            "dfock" => StateSpec::DisplacedFock {
                a0: fields.real("a0", None)?,
                phi: fields.real("phi", Some(0.0))?,
                m: fields.count("m", None)?,
            },
            "padd" => StateSpec::PhotonAdded {
                a0: fields.real("a0", None)?,
                phi: fields.real("phi", Some(0.0))?,
                m: fields.count("m", None)?,
            },
            "tmsv" => StateSpec::Tmsv { zeta: fields.real("zeta", None)? },
            "tmfock" => StateSpec::TwoModeFock {
                n1: fields.count("n1", None)?,
                n2: fields.count("n2", None)?,
            },
            other => return Err(parse_err(input, format!("unknown family `{other}`"))),
        };
        fields.finish()?;
        Ok(ParsedState { spec, dim })
    }

    pub fn build(&self) -> Result<AnyState> {
        let dim = self.dim;
        Ok(match self.spec {
            StateSpec::Gauss { mu, lam, angle, x, p } => {
                AnyState::Single(State::Gaussian(make_gaussian(mu, lam, angle, [x, p])?))
            }
            StateSpec::Fock { n } => AnyState::Single(make_fock(n, dim)?.into()),
            StateSpec::Cat { parity, a0, limit } => {
                let s = if limit && a0 == 0.0 {
                    make_cat_limit(parity, dim)?
                } else {
                    make_cat(parity, a0, dim)?
                };
                AnyState::Single(s.into())
            }
            StateSpec::DisplacedFock { a0, phi, m } => {
                AnyState::Single(make_displaced_fock(Complex64::from_polar(a0, phi), m, dim)?.into())
            }
            StateSpec::PhotonAdded { a0, phi, m } => {
                AnyState::Single(make_photon_added(Complex64::from_polar(a0, phi), m, dim)?.into())
            }
            StateSpec::Tmsv { zeta } => AnyState::Two(make_tmsv(zeta, dim)?),
            StateSpec::TwoModeFock { n1, n2 } => AnyState::Two(make_two_mode_fock(n1, n2, dim)?),
        })
    }
}

/// Parameters an unassigned variable of the same name fills implicitly.
/// Orientation, displacement and phase only take a variable when named.
fn is_primary(family: &str, key: &str) -> bool {
    let keys: &[&str] = match family {
        "gauss" => &["mu", "lam"],
        "fock" => &["n"],
        "cat" => &["a0"],
        "dfock" | "padd" => &["a0", "m"],
        "tmsv" => &["zeta"],
        "tmfock" => &["n1", "n2"],
        _ => &[],
    };
    keys.contains(&key)
}

impl fmt::Display for ParsedState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.spec {
            StateSpec::Gauss { mu, lam, angle, x, p } => {
                write!(f, "gauss:mu={mu},lam={lam},angle={angle}")?;
                if *x != 0.0 || *p != 0.0 {
                    write!(f, ",x={x},p={p}")?;
                }
            }
            StateSpec::Fock { n } => write!(f, "fock:n={n}")?,
            StateSpec::Cat { parity, a0, limit } => {
                let s = if *parity == Parity::Even { '+' } else { '-' };
                write!(f, "cat:{s},a0={a0}")?;
                if *limit {
                    write!(f, ",limit")?;
                }
            }
            StateSpec::DisplacedFock { a0, phi, m } => write!(f, "dfock:a0={a0},m={m},phi={phi}")?,
            StateSpec::PhotonAdded { a0, phi, m } => write!(f, "padd:a0={a0},m={m},phi={phi}")?,
            StateSpec::Tmsv { zeta } => write!(f, "tmsv:zeta={zeta}")?,
            StateSpec::TwoModeFock { n1, n2 } => write!(f, "tmfock:n1={n1},n2={n2}")?,
        }
        if let Some(d) = self.dim {
            write!(f, ",dim={d}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_every_family() {
        for s in [
            "gauss:mu=2,lam=3,angle=0.25",
            "fock:n=3",
            "cat:+,a0=1.5",
            "cat:-,a0=0,limit",
            "dfock:a0=1,m=2",
            "padd:a0=0.5,m=1,phi=0.3",
            "tmsv:zeta=0.5",
            "tmfock:n1=1,n2=2,dim=20",
        ] {
            let p = ParsedState::parse(s).unwrap();
            p.build().unwrap();
            let again = ParsedState::parse(&p.to_string()).unwrap();
            assert_eq!(p, again, "{s}");
        }
    }

    #[test]
    fn variables_substitute() {
        let p = ParsedState::parse_with("gauss:lam=mu", &[("mu", 3.0)]).unwrap();
        assert_eq!(p.spec, StateSpec::Gauss { mu: 3.0, lam: 3.0, angle: 0.0, x: 0.0, p: 0.0 });
        let p = ParsedState::parse_with("fock:", &[("n", 4.0)]).unwrap();
        assert_eq!(p.spec, StateSpec::Fock { n: 4 });
    }

    #[test]
    fn referenced_variable_does_not_fill_same_named_field() {
        let p = ParsedState::parse_with("gauss:mu=x,lam=x", &[("x", 3.0)]).unwrap();
        assert_eq!(p.spec, StateSpec::Gauss { mu: 3.0, lam: 3.0, angle: 0.0, x: 0.0, p: 0.0 });
    }

    #[test]
    fn rejects_garbage() {
        assert!(ParsedState::parse("fock").is_err());
        assert!(ParsedState::parse("fock:n=1.5").is_err());
        assert!(ParsedState::parse("fock:n=1,q=2").is_err());
        assert!(ParsedState::parse("cat:a0=1").is_err());
        assert!(ParsedState::parse("blob:x=1").is_err());
        assert!(ParsedState::parse("gauss:mu=abc").is_err());
    }
}
