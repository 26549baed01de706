//! Remote rate-distortion through the modified distortion
//! `d*(y, x̂) = Var(X|Y=y) + (v(y) - x̂)²`, `v(y) = E[X|Y=y]`.

use super::ba::{blahut_arimoto, discretize, rd_for_matrix, zero_rate_distortion, BASolution, DistortionMatrix};
use crate::dist::AdditiveNoiseModel;
use crate::error::{Error, Result};
use crate::quad::linspace;

/// Default signal and observation grid size.
pub const REMOTE_GRID: usize = 512;

/// The discretized observation model.
#[derive(Debug, Clone)]
pub struct RemoteGrid {
    pub y: Vec<f64>,
    pub pmf: Vec<f64>,
    pub posterior_mean: Vec<f64>,
    pub posterior_var: Vec<f64>,
    /// Reconstruction points (the signal grid).
    pub reconstruction: Vec<f64>,
    /// `E[Var(X|Y)]` of the discretized model.
    pub delta0: f64,
}

impl RemoteGrid {
    /// Signal on `n` cells over its mean ± `k_sigma`·std; observations on
    /// `n` points covering the signal grid plus ± `k_sigma` noise deviations.
    pub fn new(model: &AdditiveNoiseModel, n: usize, k_sigma: f64) -> Result<Self> {
        let x = discretize(model.signal(), n, k_sigma)?;
        let noise = model.noise();
        let (zm, zs) = (noise.mean(), noise.variance()?.sqrt());
        let (zlo, zhi) = noise.support();
        let (zlo, zhi) = ((zm - k_sigma * zs).max(zlo), (zm + k_sigma * zs).min(zhi));
        let (xs, px) = (x.points(), x.pmf());
        let y = linspace(xs[0] + zlo, xs[xs.len() - 1] + zhi, n);

        let mut pmf = vec![0.0; n];
        let mut mean = vec![0.0; n];
        let mut var = vec![0.0; n];
        for (j, &yj) in y.iter().enumerate() {
            let (mut m0, mut m1, mut m2) = (0.0, 0.0, 0.0);
            for (&xi, &pi) in xs.iter().zip(px) {
                let w = pi * noise.pdf(yj - xi);
                m0 += w;
                m1 += w * xi;
                m2 += w * xi * xi;
            }
            if m0 > 0.0 {
                pmf[j] = m0;
                mean[j] = m1 / m0;
                var[j] = (m2 / m0 - mean[j] * mean[j]).max(0.0);
            }
        }
        let total: f64 = pmf.iter().sum();
        if !(total > 0.0 && total.is_finite()) {
            return Err(Error::numerical("remote_rd_oracle", "observation grid carries no mass"));
        }
        pmf.iter_mut().for_each(|p| *p /= total);
        let delta0 = pmf.iter().zip(&var).map(|(p, v)| p * v).sum();
        Ok(Self {
            y,
            pmf,
            posterior_mean: mean,
            posterior_var: var,
            reconstruction: xs.to_vec(),
            delta0,
        })
    }

    pub fn distortion(&self) -> DistortionMatrix {
        let (v, s2, xr) = (&self.posterior_mean, &self.posterior_var, &self.reconstruction);
        DistortionMatrix::from_fn(self.y.len(), xr.len(), |j, k| s2[j] + (v[j] - xr[k]).powi(2))
    }
}

/// Remote rate in nats at distortion `delta` on the default grid.
pub fn remote_rd_oracle(model: &AdditiveNoiseModel, delta: f64) -> Result<f64> {
    remote_rd_oracle_with(model, delta, REMOTE_GRID, 8.0).map(|s| s.rate)
}

/// Blahut-Arimoto on the observation pmf with the modified distortion.
/// Targets at or beyond the zero-rate distortion give rate zero.
pub fn remote_rd_oracle_with(
    model: &AdditiveNoiseModel,
    delta: f64,
    n: usize,
    k_sigma: f64,
) -> Result<BASolution> {
    let grid = RemoteGrid::new(model, n, k_sigma)?;
    if !(delta > grid.delta0) {
        return Err(Error::InfeasibleDistortion(format!(
            "distortion {delta} is not above the estimation error {:.6}",
            grid.delta0
        )));
    }
    let d = grid.distortion();
    if delta >= zero_rate_distortion(&grid.pmf, &d) {
        return blahut_arimoto(&grid.pmf, &d, 0.0, None);
    }
    rd_for_matrix(&grid.pmf, &d, delta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::ScalarSource;
    use approx::assert_abs_diff_eq;

    fn unit_gaussian() -> AdditiveNoiseModel {
        let g = ScalarSource::gaussian(0.0, 1.0).unwrap();
        AdditiveNoiseModel::new(g.clone(), g).unwrap()
    }

    #[test]
    fn gaussian_grid_statistics() {
        let g = RemoteGrid::new(&unit_gaussian(), 256, 8.0).unwrap();
        assert_abs_diff_eq!(g.delta0, 0.5, epsilon = 1e-3);
        let mid = g.y.len() / 2;
        assert_abs_diff_eq!(g.posterior_mean[mid], 0.5 * g.y[mid], epsilon = 1e-4);
    }

    #[test]
    fn gaussian_example() {
        let r = remote_rd_oracle_with(&unit_gaussian(), 0.75, 256, 8.0).unwrap();
        assert_abs_diff_eq!(r.rate, 0.5 * 2.0f64.ln(), epsilon = 1e-2);
    }

    #[test]
    fn zero_rate_and_infeasible() {
        let m = unit_gaussian();
        assert!(remote_rd_oracle_with(&m, 1.2, 128, 8.0).unwrap().rate.abs() < 1e-12);
        assert!(matches!(
            remote_rd_oracle_with(&m, 0.4, 128, 8.0),
            Err(Error::InfeasibleDistortion(_))
        ));
    }
}
