//! Closed-form scaled bounds, used as oracles for the numeric path.

use nalgebra::Matrix2;

use super::{Order, Scheme};
use crate::error::{Error, Result};
use crate::states::Parity;

/// State families with closed-form bounds.
#[derive(Debug, Clone, PartialEq)]
pub enum Family {
    /// Centered Gaussian `O (mu/2) diag(lam, 1/lam) O^T`.
    Gaussian { mu: f64, lam: f64 },
    /// Any single-mode state with covariance `G`; first moments only.
    Covariance(Matrix2<f64>),
    Fock { n: usize },
    Cat { parity: Parity, a0: f64 },
    TwoModeFock { n1: usize, n2: usize },
    Tmsv { zeta: f64 },
    DisplacedFock { a0: f64, m: usize },
    PhotonAdded { a0: f64, m: usize },
}

/// `Tr G + 2 sqrt(det G)`.
pub fn first_moment_hom(g: &Matrix2<f64>) -> f64 {
    g.trace() + 2.0 * g.determinant().max(0.0).sqrt()
}

/// `Tr G + 1`.
pub fn first_moment_het(g: &Matrix2<f64>) -> f64 {
    g.trace() + 1.0
}

/// `x / tanh(x)`, continuous at zero.
fn x_coth_x(x: f64) -> f64 {
    if x == 0.0 { 1.0 } else { x / x.tanh() }
}

/// `x / sinh(x)`, continuous at zero.
fn x_csch_x(x: f64) -> f64 {
    if x == 0.0 { 1.0 } else { x / x.sinh() }
}

/// Cat-state pieces: `(2 a0^2 tanh^{+-1}(a0^2), sign * 4a0^4 / (e^{a0^2} +- e^{-a0^2})^2)`.
fn cat_terms(parity: Parity, a0: f64) -> (f64, f64) {
    let x = a0 * a0;
    match parity {
        Parity::Even => (2.0 * x * x.tanh(), (x / x.cosh()).powi(2)),
        Parity::Odd => (2.0 * x_coth_x(x), -x_csch_x(x).powi(2)),
    }
}

/// `m_+-` of the cat-state homodyne variance `m + l cos 2t`.
pub fn cat_m(parity: Parity, a0: f64) -> f64 {
    let (photon, interference) = cat_terms(parity, a0);
    0.5 + photon + interference
}

fn cat_covariance(parity: Parity, a0: f64) -> Matrix2<f64> {
    let x = a0 * a0;
    // <a^dag a> = a0^2 tanh^{+-1}(a0^2), <a^2> = a0^2
    let n = cat_terms(parity, a0).0 / 2.0;
    Matrix2::new(x + n + 0.5, 0.0, 0.0, -x + n + 0.5)
}

fn gaussian_cov(mu: f64, lam: f64) -> Matrix2<f64> {
    Matrix2::new(lam, 0.0, 0.0, 1.0 / lam) * (mu / 2.0)
}

pub fn closed_form_scrb(family: &Family, scheme: Scheme, order: Order) -> Result<f64> {
    use Family::*;
    use Order::*;
    use Scheme::*;
    Ok(match (family, order) {
        (Gaussian { mu, lam }, First) => {
            let g = gaussian_cov(*mu, *lam);
            match scheme {
                Hom => first_moment_hom(&g),
                Het => first_moment_het(&g),
            }
        }
        (Gaussian { mu, lam }, Second) => {
            let g = gaussian_cov(*mu, *lam);
            match scheme {
                Hom => 2.0 * g.trace() * (g.trace() + 3.0 * g.determinant().sqrt()),
                Het => {
                    let gh = g + Matrix2::identity() * 0.5;
                    2.0 * (gh.trace().powi(2) - gh.determinant())
                }
            }
        }
        (Covariance(g), First) => match scheme {
            Hom => first_moment_hom(g),
            Het => first_moment_het(g),
        },
        (Covariance(_), Second) => {
            return Err(Error::NoClosedForm("arbitrary covariance at second order".into()))
        }
        (Fock { n }, First) => {
            let v = *n as f64 + 0.5;
            match scheme {
                Hom => 4.0 * v,
                Het => 2.0 * v + 1.0,
            }
        }
        (Fock { n }, Second) => {
            let n = *n as f64;
            match scheme {
                Hom => 5.0 * (n * n + n + 1.0),
                Het => 2.0 * (n + 1.0) * (n + 3.0),
            }
        }
        (Cat { parity, a0 }, First) => {
            let g = cat_covariance(*parity, *a0);
            match scheme {
                Hom => first_moment_hom(&g),
                Het => first_moment_het(&g),
            }
        }
        (Cat { parity, a0 }, Second) => {
            let (photon, interference) = cat_terms(*parity, *a0);
            match scheme {
                Hom => {
                    let m = 0.5 + photon + interference;
                    let l = 2.0 * a0 * a0;
                    6.0 * m + 4.0 * (m * m - l * l).sqrt()
                }
                Het => 6.0 + 6.0 * photon + 2.0 * interference,
            }
        }
        (TwoModeFock { n1, n2 }, First) => {
            closed_form_scrb(&Fock { n: *n1 }, scheme, First)?
                + closed_form_scrb(&Fock { n: *n2 }, scheme, First)?
        }
        (TwoModeFock { n1, n2 }, Second) => {
            let (a, b) = (*n1 as f64, *n2 as f64);
            // includes the n1*n2 terms from the cross sector of a product state
            match scheme {
                Hom => 5.0 * (a * a + b * b) + 32.0 * a * b + 21.0 * (a + b) + 18.0,
                Het => 2.0 * (a * a + b * b) + 8.0 * a * b + 16.0 * (a + b) + 20.0,
            }
        }
        (Tmsv { zeta }, First) => {
            let c = (2.0 * zeta).cosh();
            match scheme {
                Hom => 4.0 * c,
                Het => 2.0 * c + 2.0,
            }
        }
        (Tmsv { zeta }, Second) => match scheme {
            Hom => {
                let c4 = (4.0 * zeta).cosh();
                5.5 + 6.5 * c4 + 6.0 * (2.0 * zeta).cosh() * c4.sqrt()
            }
            Het => 4.0 * zeta.cosh().powi(2) * (2.0 + 3.0 * (2.0 * zeta).cosh()),
        },
        (DisplacedFock { .. }, _) => return Err(Error::NoClosedForm("displaced Fock states".into())),
        (PhotonAdded { .. }, _) => {
            return Err(Error::NoClosedForm("photon-added coherent states".into()))
        }
    })
}

/// Closed-form `gamma_2`.
pub fn closed_form_gamma2(family: &Family) -> Result<f64> {
    Ok(closed_form_scrb(family, Scheme::Het, Order::Second)?
        / closed_form_scrb(family, Scheme::Hom, Order::Second)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_photon_het_is_sixteen() {
        assert_eq!(closed_form_scrb(&Family::Fock { n: 1 }, Scheme::Het, Order::Second).unwrap(), 16.0);
        assert_eq!(closed_form_scrb(&Family::Fock { n: 1 }, Scheme::Hom, Order::Second).unwrap(), 15.0);
    }

    #[test]
    fn odd_cat_limit_matches_one_photon() {
        let f = Family::Cat { parity: Parity::Odd, a0: 0.0 };
        assert!((closed_form_scrb(&f, Scheme::Het, Order::Second).unwrap() - 16.0).abs() < 1e-15);
        assert!((closed_form_scrb(&f, Scheme::Hom, Order::Second).unwrap() - 15.0).abs() < 1e-15);
        let g = Family::Cat { parity: Parity::Odd, a0: 1e-5 };
        assert!((closed_form_gamma2(&g).unwrap() - 16.0 / 15.0).abs() < 1e-9);
        let e = Family::Cat { parity: Parity::Even, a0: 0.0 };
        assert!((closed_form_gamma2(&e).unwrap() - 1.2).abs() < 1e-15);
    }

    #[test]
    fn tmsv_second_order_known_values() {
        let f = Family::Tmsv { zeta: 0.0 };
        assert!((closed_form_scrb(&f, Scheme::Hom, Order::Second).unwrap() - 18.0).abs() < 1e-12);
        assert!((closed_form_scrb(&f, Scheme::Het, Order::Second).unwrap() - 20.0).abs() < 1e-12);
    }

    #[test]
    fn gaussian_thermal_ratio() {
        let mu = 4.0;
        let g = closed_form_gamma2(&Family::Gaussian { mu, lam: 1.0 }).unwrap();
        assert!((g - 3.0 * (mu + 1.0f64).powi(2) / (10.0 * mu * mu)).abs() < 1e-14);
    }

    #[test]
    fn squeezed_ratio_matches_rational_form() {
        for mu in [1.0f64, 2.0, 3.124, 7.5] {
            let g = closed_form_gamma2(&Family::Gaussian { mu, lam: mu }).unwrap();
            let m2 = mu * mu;
            let want = (m2 * m2 + 4.0 * m2 + 7.0) / ((m2 + 1.0) * (m2 + 3.0 * mu + 1.0));
            assert!((g - want).abs() < 1e-13, "mu={mu}");
        }
    }

    #[test]
    fn families_without_closed_form() {
        let e = closed_form_scrb(&Family::DisplacedFock { a0: 1.0, m: 2 }, Scheme::Hom, Order::Second);
        assert!(matches!(e, Err(Error::NoClosedForm(_))));
        let e = closed_form_scrb(&Family::PhotonAdded { a0: 1.0, m: 2 }, Scheme::Het, Order::First);
        assert!(matches!(e, Err(Error::NoClosedForm(_))));
    }
}
