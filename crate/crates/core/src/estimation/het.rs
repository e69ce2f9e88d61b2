//! Heterodyne data and sample-mean estimators.

use nalgebra::{Matrix2, Vector2};
use rand::Rng;

use crate::error::{Error, Result};
use crate::phase_space::HetSampler;

/// Heterodyne outcomes `(x_j, p_j)`.
#[derive(Debug, Clone, PartialEq)]
pub struct HetDataset {
    points: Vec<[f64; 2]>,
}

impl HetDataset {
    pub fn new(points: Vec<[f64; 2]>) -> Self {
        HetDataset { points }
    }

    pub fn points(&self) -> &[[f64; 2]] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    fn check(&self) -> Result<f64> {
        if self.points.is_empty() {
            return Err(Error::Estimation("empty heterodyne dataset".into()));
        }
        Ok(self.points.len() as f64)
    }

    /// Mean outcome, unbiased for the first moments.
    pub fn mean(&self) -> Result<Vector2<f64>> {
        let n = self.check()?;
        let (sx, sp) = self.points.iter().fold((0.0, 0.0), |(a, b), q| (a + q[0], b + q[1]));
        Ok(Vector2::new(sx / n, sp / n))
    }

    /// Mean outer product: the Husimi second-moment matrix, before offset.
    pub fn husimi_second_moments(&self) -> Result<Matrix2<f64>> {
        let n = self.check()?;
        let (mut xx, mut xp, mut pp) = (0.0, 0.0, 0.0);
        for q in &self.points {
            xx += q[0] * q[0];
            xp += q[0] * q[1];
            pp += q[1] * q[1];
        }
        Ok(Matrix2::new(xx, xp, xp, pp) / n)
    }
}

pub fn simulate_het<R: Rng + ?Sized>(sampler: &HetSampler, n: usize, rng: &mut R) -> Result<HetDataset> {
    let points = (0..n).map(|_| sampler.sample(rng)).collect::<Result<Vec<_>>>()?;
    Ok(HetDataset::new(points))
}

pub fn estimate_first_het(ds: &HetDataset) -> Result<Vector2<f64>> {
    ds.mean()
}

/// `G2` estimate: Husimi second moments minus the vacuum offset `I/2`.
pub fn estimate_second_het(ds: &HetDataset) -> Result<Matrix2<f64>> {
    Ok(ds.husimi_second_moments()? - Matrix2::identity() * 0.5)
}
