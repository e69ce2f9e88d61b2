//! Scaled Cramér–Rao bounds for homodyne (HOM) and heterodyne (HET)
//! moment tomography.

pub mod closed_form;
pub mod fisher;
pub mod search;

use std::fmt;

pub use closed_form::{closed_form_gamma2, closed_form_scrb, Family};
pub use fisher::{
    cross_denominator, cross_kernel_vector, fisher_hom, fisher_hom_cross, fisher_hom_design,
    fisher_hom_sector, kernel_vector, FisherMatrix,
};
pub use search::{find_crossover, find_minimum};

use crate::error::{Error, Result};
use crate::phase_space::{husimi_moments, husimi_moments_two_mode};
use crate::states::{AnyState, State, TwoModeState};

pub const DEFAULT_NODES: usize = 512;
pub const DEFAULT_CROSS_NODES: usize = 256;

/// Moment order `M`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Order {
    First,
    Second,
}

impl Order {
    pub fn from_usize(m: usize) -> Result<Self> {
        match m {
            1 => Ok(Order::First),
            2 => Ok(Order::Second),
            _ => Err(Error::InvalidParameter(format!("moment order {m}; only 1 and 2 are supported"))),
        }
    }

    pub fn as_usize(self) -> usize {
        match self {
            Order::First => 1,
            Order::Second => 2,
        }
    }

    /// Number of independent moment parameters per mode.
    pub fn dim(self) -> usize {
        self.as_usize() + 1
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sector {
    Mode1,
    Mode2,
    Cross,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scheme {
    Hom,
    Het,
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scheme::Hom => "hom",
            Scheme::Het => "het",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    ClosedForm,
    Numeric,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::ClosedForm => "closed-form",
            Method::Numeric => "numeric",
        })
    }
}

/// Sector-resolved bound. Two-mode totals are sums over sectors.
#[derive(Debug, Clone, PartialEq)]
pub struct CrbReport {
    pub scheme: Scheme,
    pub order: Order,
    pub sectors: Vec<(Sector, f64)>,
    pub total: f64,
    pub method: Method,
}

impl CrbReport {
    fn from_sectors(scheme: Scheme, order: Order, sectors: Vec<(Sector, f64)>) -> Self {
        let total = sectors.iter().map(|(_, v)| v).sum();
        CrbReport { scheme, order, sectors, total, method: Method::Numeric }
    }
}

/// HOM bound `Tr F^{-1}`.
pub fn scrb_hom(state: &State, order: Order, nodes: usize) -> Result<f64> {
    fisher_hom(state, order, nodes)?.inverse_trace()
}

/// HET bound from Husimi variances.
pub fn scrb_het(state: &State, order: Order) -> f64 {
    let h = husimi_moments(state);
    match order {
        Order::First => h.var_x() + h.var_p(),
        Order::Second => h.var_x2() + h.var_p2() + 2.0 * h.var_xp(),
    }
}

/// `sCRB_2,HET / sCRB_2,HOM`.
pub fn gamma2(state: &State, nodes: usize) -> Result<f64> {
    Ok(scrb_het(state, Order::Second) / scrb_hom(state, Order::Second, nodes)?)
}

/// Product-HOM bound, sector by sector. The cross sector enters twice since
/// `A12` and its transpose both sit in the second-moment matrix.
pub fn scrb_hom_two_mode(state: &TwoModeState, order: Order, nodes: usize, cross_nodes: usize) -> Result<CrbReport> {
    let mut sectors = vec![
        (Sector::Mode1, fisher_hom_sector(state, 0, order, nodes)?.inverse_trace()?),
        (Sector::Mode2, fisher_hom_sector(state, 1, order, nodes)?.inverse_trace()?),
    ];
    if order == Order::Second {
        sectors.push((Sector::Cross, 2.0 * fisher_hom_cross(state, cross_nodes)?.inverse_trace()?));
    }
    Ok(CrbReport::from_sectors(Scheme::Hom, order, sectors))
}

/// Product-HET bound from two-mode Husimi variances.
pub fn scrb_het_two_mode(state: &TwoModeState, order: Order) -> CrbReport {
    let h = husimi_moments_two_mode(state);
    let sectors = match order {
        Order::First => {
            let v = h.first_moment_variances();
            vec![(Sector::Mode1, v[0] + v[1]), (Sector::Mode2, v[2] + v[3])]
        }
        Order::Second => {
            let t = h.second_moment_terms();
            let sum = |r: std::ops::Range<usize>| t[r].iter().map(|(_, w, v)| w * v).sum::<f64>();
            vec![(Sector::Mode1, sum(0..3)), (Sector::Mode2, sum(3..6)), (Sector::Cross, sum(6..10))]
        }
    };
    CrbReport::from_sectors(Scheme::Het, order, sectors)
}

pub fn gamma2_two_mode(state: &TwoModeState, nodes: usize, cross_nodes: usize) -> Result<f64> {
    let hom = scrb_hom_two_mode(state, Order::Second, nodes, cross_nodes)?;
    let het = scrb_het_two_mode(state, Order::Second);
    Ok(het.total / hom.total)
}

/// Both schemes at one order, with their ratio.
#[derive(Debug, Clone, PartialEq)]
pub struct Comparison {
    pub hom: CrbReport,
    pub het: CrbReport,
    pub ratio: f64,
}

pub fn compare(state: &AnyState, order: Order, nodes: usize, cross_nodes: usize) -> Result<Comparison> {
    let (hom, het) = match state {
        AnyState::Single(s) => {
            let hom = CrbReport::from_sectors(Scheme::Hom, order, vec![(Sector::Mode1, scrb_hom(s, order, nodes)?)]);
            let het = CrbReport::from_sectors(Scheme::Het, order, vec![(Sector::Mode1, scrb_het(s, order))]);
            (hom, het)
        }
        AnyState::Two(t) => (scrb_hom_two_mode(t, order, nodes, cross_nodes)?, scrb_het_two_mode(t, order)),
    };
    let ratio = het.total / hom.total;
    Ok(Comparison { hom, het, ratio })
}
