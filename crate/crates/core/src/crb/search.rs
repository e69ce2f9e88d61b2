//! Bracketed root finding and minimization of `gamma_2` along a family.

use crate::error::{Error, Result};

/// Parameter where `f` crosses 1, by bisection to `tol`.
pub fn find_crossover<F>(mut f: F, lo: f64, hi: f64, tol: f64) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    let (mut a, mut b) = (lo, hi);
    let mut fa = f(a)? - 1.0;
    let fb = f(b)? - 1.0;
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(Error::NoBracket(format!(
            "gamma_2 - 1 has the same sign at {lo} ({fa:e}) and {hi} ({fb:e})"
        )));
    }
    while b - a > tol {
        let mid = 0.5 * (a + b);
        let fm = f(mid)? - 1.0;
        if fm == 0.0 {
            return Ok(mid);
        }
        if fm.signum() == fa.signum() {
            a = mid;
            fa = fm;
        } else {
            b = mid;
        }
    }
    Ok(0.5 * (a + b))
}

/// Interior minimum of `f` on `[lo, hi]` by golden-section search.
pub fn find_minimum<F>(mut f: F, lo: f64, hi: f64, tol: f64) -> Result<(f64, f64)>
where
    F: FnMut(f64) -> Result<f64>,
{
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (lo, hi);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c)?;
    let mut fd = f(d)?;
    while b - a > tol {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d)?;
        }
    }
    let x = 0.5 * (a + b);
    let fx = f(x)?;
    let (flo, fhi) = (f(lo)?, f(hi)?);
    if !(fx < flo && fx < fhi) {
        return Err(Error::NoBracket(format!("no interior minimum in [{lo}, {hi}]")));
    }
    Ok((x, fx))
}
