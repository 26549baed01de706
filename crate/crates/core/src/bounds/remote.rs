//! Remote (indirect) source coding through the posterior-mean reduction.
//!
//! With `V = E[X|Y]` and `Δ₀ = E[(X - V)²]`, coding `X` from `Y` at
//! distortion `Δ` is ordinary coding of `V` at distortion `Δ - Δ₀`.

use rayon::prelude::*;

use super::{check_delta, log_plus, BoundPair};
use crate::dist::{AdditiveNoiseModel, Family, GridDensity, ScalarSource, TWO_PI_E};
use crate::error::{Error, Result};
use crate::quad::{self, integrate_pieces, linspace, xlogx};

/// Observation grid size for the numerical reduction.
pub const REDUCTION_POINTS: usize = 4097;
/// Histogram cells for the pushforward density of `V`.
pub const PUSHFORWARD_CELLS: usize = 4096;

/// How the density of `V` was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Construction {
    /// Gaussian signal and noise: `V` is Gaussian.
    ClosedForm,
    /// Gaussian noise: `v` is increasing with `v'(y) = Var(X|Y=y)/σ_Z²`,
    /// so `h(V) = h(Y) + E[log v'(Y)]`.
    ChangeOfVariables,
    /// Histogram of `v(Y)` on a fixed grid; `monotone` records whether `v`
    /// was increasing on the observation grid.
    Pushforward { monotone: bool },
}

impl std::fmt::Display for Construction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Construction::ClosedForm => f.write_str("closed form"),
            Construction::ChangeOfVariables => f.write_str("monotone change of variables"),
            Construction::Pushforward { .. } => {
                write!(f, "gridded pushforward ({PUSHFORWARD_CELLS} cells)")
            }
        }
    }
}

/// Entropy powers and variances of signal, noise and observation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObservationStats {
    pub signal_ep: f64,
    pub signal_var: f64,
    pub noise_ep: f64,
    pub noise_var: f64,
    pub observation_ep: f64,
    pub observation_var: f64,
}

impl ObservationStats {
    pub fn new(model: &AdditiveNoiseModel) -> Result<Self> {
        let (x, z) = (model.signal(), model.noise());
        let y = model.observation()?;
        Ok(Self {
            signal_ep: x.entropy_power()?,
            signal_var: x.variance()?,
            noise_ep: z.entropy_power()?,
            noise_var: z.variance()?,
            observation_ep: y.entropy_power()?,
            observation_var: y.variance()?,
        })
    }

    /// Bounds for a Gaussian-noise observation, using only `X` and `Y`.
    pub fn awgn_bounds(&self, delta: f64) -> Result<BoundPair> {
        check_delta(delta)?;
        let (nx, vx, ny, vy, vz) = (
            self.signal_ep,
            self.signal_var,
            self.observation_ep,
            self.observation_var,
            self.noise_var,
        );
        let lower_threshold = nx * vz / ny;
        let upper_threshold = vx * vz / vy;
        let mut b = BoundPair::new(f64::NAN, f64::NAN);
        b.lower_valid = delta > lower_threshold;
        b.upper_valid = delta > upper_threshold;
        if b.lower_valid {
            b.lower = 0.5 * log_plus(nx / delta) + 0.5 * log_plus(nx / (ny - nx / delta * vz));
        }
        if b.upper_valid {
            b.upper = 0.5 * log_plus(vx / delta) + 0.5 * log_plus(vx / (vy - vx / delta * vz));
        }
        b.lower_threshold = Some(lower_threshold);
        b.upper_threshold = Some(upper_threshold);
        Ok(b)
    }
}

/// The posterior-mean reduction of an additive-noise model.
#[derive(Debug, Clone)]
pub struct RemoteReduction {
    v_source: ScalarSource,
    delta0: f64,
    construction: Construction,
    v_entropy_power: f64,
    v_variance: f64,
    stats: ObservationStats,
}

impl RemoteReduction {
    /// Distribution of `V = E[X|Y]`.
    pub fn v_source(&self) -> &ScalarSource {
        &self.v_source
    }

    /// `Δ₀ = E[(X - E[X|Y])²]`.
    pub fn delta0(&self) -> f64 {
        self.delta0
    }

    pub fn construction(&self) -> Construction {
        self.construction
    }

    /// Set when `v` was not monotone and the histogram path was used.
    pub fn warning(&self) -> bool {
        matches!(self.construction, Construction::Pushforward { monotone: false })
    }

    pub fn v_entropy_power(&self) -> f64 {
        self.v_entropy_power
    }

    pub fn v_variance(&self) -> f64 {
        self.v_variance
    }

    pub fn stats(&self) -> &ObservationStats {
        &self.stats
    }

    /// The reduction-form bounds, see [`remote_rd_bounds`].
    pub fn bounds(&self, delta: f64) -> Result<BoundPair> {
        remote_rd_bounds(self, delta)
    }

    /// The explicit additive-noise bounds, see [`additive_noise_remote_bounds`].
    pub fn additive_noise_bounds(&self, delta: f64) -> Result<BoundPair> {
        check_delta(delta)?;
        let s = &self.stats;
        let lower_threshold = s.signal_ep * s.noise_ep / s.observation_ep;
        let upper_threshold = s.signal_var * s.noise_var / s.observation_var;
        let mut b = BoundPair::new(f64::NAN, f64::NAN);
        b.lower_valid = delta > lower_threshold;
        b.upper_valid = delta > upper_threshold;
        if b.lower_valid {
            let ny = s.observation_ep;
            b.lower = 0.5 * log_plus(self.v_entropy_power / delta)
                + 0.5 * log_plus(ny / (ny - s.signal_ep / delta * s.noise_ep));
        }
        if b.upper_valid {
            let vy = s.observation_var;
            b.upper = 0.5 * log_plus(self.v_variance / delta)
                + 0.5 * log_plus(vy / (vy - s.signal_var / delta * s.noise_var));
        }
        b.lower_threshold = Some(lower_threshold);
        b.upper_threshold = Some(upper_threshold);
        Ok(b)
    }
}

/// `(f_Y(y), E[X|Y=y], Var(X|Y=y))` at each `y`.
pub(crate) fn posterior_moments(
    model: &AdditiveNoiseModel,
    ys: &[f64],
) -> Result<Vec<(f64, f64, f64)>> {
    let (x, z) = (model.signal(), model.noise());
    let (xlo, xhi) = x.effective_support();
    let (zlo, zhi) = z.effective_support();
    let xb = x.breakpoints();
    let zb = z.breakpoints();
    let nodes = match x.family() {
        Family::Gridded(g) => Some((g.x().to_vec(), quad::trapezoid_weights(g.x()), g.pdf_values().to_vec())),
        _ => None,
    };
    ys.par_iter()
        .map(|&y| {
            if let Some((xs, w, p)) = &nodes {
                // Tabulated signal: sums over its own nodes.
                let mut m = [0.0; 3];
                for i in 0..xs.len() {
                    let f = w[i] * p[i] * z.pdf(y - xs[i]);
                    m[0] += f;
                    m[1] += f * xs[i];
                }
                if m[0] <= 0.0 {
                    return Ok((0.0, f64::NAN, f64::NAN));
                }
                let v = m[1] / m[0];
                for i in 0..xs.len() {
                    m[2] += w[i] * p[i] * z.pdf(y - xs[i]) * (xs[i] - v).powi(2);
                }
                return Ok((m[0], v, m[2] / m[0]));
            }
            let lo = xlo.max(y - zhi);
            let hi = xhi.min(y - zlo);
            if hi <= lo {
                return Ok((0.0, f64::NAN, f64::NAN));
            }
            let mut cuts = xb.clone();
            cuts.extend(zb.iter().map(|b| y - b));
            let moment = |g: &dyn Fn(f64) -> f64| {
                integrate_pieces(|t| g(t) * x.pdf(t) * z.pdf(y - t), lo, hi, &cuts, 1e-300, 1e-11)
                    .map(|q| q.value)
                    .map_err(|e| match e {
                        Error::NumericalFailure { reason, .. } => {
                            Error::numerical("posterior_mean_reduction", reason)
                        }
                        other => other,
                    })
            };
            let m0 = moment(&|_| 1.0)?;
            if m0 <= 0.0 {
                return Ok((0.0, f64::NAN, f64::NAN));
            }
            let v = moment(&|t| t)? / m0;
            let var = moment(&|t| (t - v) * (t - v))? / m0;
            Ok((m0, v, var))
        })
        .collect()
}

/// Computes `V = E[X|Y]`, `Δ₀` and the entropy power and variance of `V`.
pub fn posterior_mean_reduction(model: &AdditiveNoiseModel) -> Result<RemoteReduction> {
    let stats = ObservationStats::new(model)?;
    let (x, z) = (model.signal(), model.noise());
    if let (
        Family::Gaussian { mean: mx, variance: vx },
        Family::Gaussian { variance: vz, .. },
    ) = (x.family(), z.family())
    {
        let vy = vx + vz;
        let v_var = vx * vx / vy;
        return Ok(RemoteReduction {
            v_source: ScalarSource::gaussian(*mx, v_var)?,
            delta0: vx * vz / vy,
            construction: Construction::ClosedForm,
            v_entropy_power: v_var,
            v_variance: v_var,
            stats,
        });
    }

    let (xlo, xhi) = x.effective_support();
    let (zlo, zhi) = z.effective_support();
    let ys_all = linspace(xlo + zlo, xhi + zhi, REDUCTION_POINTS);
    let moments = posterior_moments(model, &ys_all)?;
    let peak = moments.iter().map(|m| m.0).fold(0.0, f64::max);
    let keep: Vec<usize> = (0..ys_all.len())
        .filter(|&i| moments[i].0 > 1e-16 * peak && moments[i].2.is_finite())
        .collect();
    let (first, last) = match (keep.first(), keep.last()) {
        (Some(&a), Some(&b)) if b > a + 2 => (a, b),
        _ => return Err(Error::numerical("posterior_mean_reduction", "observation density vanished")),
    };
    let ys = &ys_all[first..=last];
    let m = &moments[first..=last];
    let f_raw: Vec<f64> = m.iter().map(|t| t.0).collect();
    let mass = quad::trapezoid(ys, &f_raw);
    let fy: Vec<f64> = f_raw.iter().map(|f| f / mass).collect();
    let v: Vec<f64> = m.iter().map(|t| t.1).collect();
    let cvar: Vec<f64> = m.iter().map(|t| t.2.max(0.0)).collect();
    if cvar.iter().all(|&c| c <= 0.0) {
        return Err(Error::DegenerateReduction(
            "Var(X|Y=y) vanishes everywhere; X is a function of Y".into(),
        ));
    }
    let weighted = |g: &dyn Fn(usize) -> f64| {
        let vals: Vec<f64> = (0..ys.len()).map(|i| fy[i] * g(i)).collect();
        quad::trapezoid(ys, &vals)
    };
    let delta0 = weighted(&|i| cvar[i]);
    let v_mean = weighted(&|i| v[i]);
    let v_variance = weighted(&|i| (v[i] - v_mean).powi(2));
    let monotone = v.windows(2).all(|w| w[1] > w[0]);

    if model.noise_is_gaussian() {
        let vz = stats.noise_var;
        if cvar.iter().any(|&c| c <= 0.0) {
            return Err(Error::DegenerateReduction(
                "Var(X|Y=y) vanished on part of the observation range".into(),
            ));
        }
        let h_y = -quad::trapezoid(ys, &fy.iter().map(|&f| xlogx(f)).collect::<Vec<_>>());
        let e_log_slope = weighted(&|i| (cvar[i] / vz).ln());
        let h_v = h_y + e_log_slope;
        let (vx, vf): (Vec<f64>, Vec<f64>) = (0..ys.len())
            .map(|i| (v[i], fy[i] * vz / cvar[i]))
            .fold((Vec::new(), Vec::new()), |(mut a, mut b), (vi, fi)| {
                if a.last().map_or(true, |&l: &f64| vi > l) {
                    a.push(vi);
                    b.push(fi);
                }
                (a, b)
            });
        return Ok(RemoteReduction {
            v_source: ScalarSource::from_grid(GridDensity::from_unnormalized(vx, vf)?),
            delta0,
            construction: Construction::ChangeOfVariables,
            v_entropy_power: (2.0 * h_v).exp() / TWO_PI_E,
            v_variance,
            stats,
        });
    }

    // Histogram of v(Y): each observation interval spreads its mass evenly
    // over the v-range it maps to.
    let vmin = v.iter().copied().fold(f64::INFINITY, f64::min);
    let vmax = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let width = (vmax - vmin) / PUSHFORWARD_CELLS as f64;
    if !(width > 0.0) {
        return Err(Error::DegenerateReduction("E[X|Y] is constant".into()));
    }
    let mut cells = vec![0.0; PUSHFORWARD_CELLS];
    let cell_of = |t: f64| (((t - vmin) / width) as usize).min(PUSHFORWARD_CELLS - 1);
    for i in 0..ys.len() - 1 {
        let w = 0.5 * (fy[i] + fy[i + 1]) * (ys[i + 1] - ys[i]);
        let (a, b) = if v[i] <= v[i + 1] { (v[i], v[i + 1]) } else { (v[i + 1], v[i]) };
        let (ca, cb) = (cell_of(a), cell_of(b));
        if ca == cb || b - a <= 0.0 {
            cells[ca] += w;
            continue;
        }
        for (c, cell) in cells.iter_mut().enumerate().take(cb + 1).skip(ca) {
            let lo = (vmin + c as f64 * width).max(a);
            let hi = (vmin + (c + 1) as f64 * width).min(b);
            *cell += w * (hi - lo).max(0.0) / (b - a);
        }
    }
    let total: f64 = cells.iter().sum();
    let h_v: f64 = cells
        .iter()
        .map(|&c| c / total)
        .filter(|&p| p > 0.0)
        .map(|p| -p * (p / width).ln())
        .sum();
    let centers: Vec<f64> = (0..PUSHFORWARD_CELLS)
        .map(|c| vmin + (c as f64 + 0.5) * width)
        .collect();
    let dens: Vec<f64> = cells.iter().map(|c| c / (total * width)).collect();
    Ok(RemoteReduction {
        v_source: ScalarSource::from_grid(GridDensity::from_unnormalized(centers, dens)?),
        delta0,
        construction: Construction::Pushforward { monotone },
        v_entropy_power: (2.0 * h_v).exp() / TWO_PI_E,
        v_variance,
        stats,
    })
}

/// `[½ log⁺(N(V)/(Δ-Δ₀)), ½ log⁺(σ_V²/(Δ-Δ₀))]`, defined for `Δ > Δ₀`.
pub fn remote_rd_bounds(reduction: &RemoteReduction, delta: f64) -> Result<BoundPair> {
    check_delta(delta)?;
    let excess = delta - reduction.delta0;
    if !(excess > 0.0) {
        return Err(Error::InfeasibleDistortion(format!(
            "distortion {delta} is not above the MMSE {}",
            reduction.delta0
        )));
    }
    let mut b = BoundPair::new(
        0.5 * log_plus(reduction.v_entropy_power / excess),
        0.5 * log_plus(reduction.v_variance / excess),
    );
    b.lower_threshold = Some(reduction.delta0);
    b.upper_threshold = Some(reduction.delta0);
    Ok(b)
}

/// Explicit bounds for `Y = X + Z` written in terms of `V`, `X`, `Z` and `Y`.
///
/// The lower side needs `Δ > N(X)N(Z)/N(Y)` and the upper side
/// `Δ > σ_X²σ_Z²/σ_Y²`. Each `log⁺` term is clamped separately, so above
/// `σ_V²` the first term vanishes while the second does not; the result is
/// then larger than the reduction-form value.
pub fn additive_noise_remote_bounds(model: &AdditiveNoiseModel, delta: f64) -> Result<BoundPair> {
    check_delta(delta)?;
    posterior_mean_reduction(model)?.additive_noise_bounds(delta)
}

/// Bounds for Gaussian observation noise of the given variance.
pub fn awgn_remote_bounds(signal: &ScalarSource, noise_variance: f64, delta: f64) -> Result<BoundPair> {
    check_delta(delta)?;
    if !(noise_variance > 0.0 && noise_variance.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "noise variance must be positive (got {noise_variance})"
        )));
    }
    let model = AdditiveNoiseModel::new(signal.clone(), ScalarSource::gaussian(0.0, noise_variance)?)?;
    ObservationStats::new(&model)?.awgn_bounds(delta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::LN_2;

    fn gauss(v: f64) -> ScalarSource {
        ScalarSource::gaussian(0.0, v).unwrap()
    }

    #[test]
    fn gaussian_reductions() {
        let r = posterior_mean_reduction(&AdditiveNoiseModel::new(gauss(1.0), gauss(1.0)).unwrap())
            .unwrap();
        assert_eq!(r.construction(), Construction::ClosedForm);
        assert_abs_diff_eq!(r.delta0(), 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(r.v_variance(), 0.5, epsilon = 1e-15);
        let b = remote_rd_bounds(&r, 0.75).unwrap();
        assert_abs_diff_eq!(b.lower, 0.5 * LN_2, epsilon = 1e-12);
        assert_abs_diff_eq!(b.upper, 0.5 * LN_2, epsilon = 1e-12);
        assert!(remote_rd_bounds(&r, 0.5).is_err());
        let b = remote_rd_bounds(&r, 1.0).unwrap();
        assert_eq!(b.upper, 0.0);

        let r = posterior_mean_reduction(&AdditiveNoiseModel::new(gauss(1.0), gauss(4.0)).unwrap())
            .unwrap();
        assert_abs_diff_eq!(r.v_variance(), 0.2, epsilon = 1e-15);
        assert_abs_diff_eq!(r.delta0(), 0.8, epsilon = 1e-15);
    }

    #[test]
    fn numerical_path_matches_gaussian_closed_form() {
        // A one-component mixture takes the numerical path but is Gaussian.
        let x = ScalarSource::gaussian_mixture(vec![1.0], vec![0.0], vec![1.0]).unwrap();
        let r = posterior_mean_reduction(&AdditiveNoiseModel::new(x, gauss(1.0)).unwrap()).unwrap();
        assert_eq!(r.construction(), Construction::ChangeOfVariables);
        assert_abs_diff_eq!(r.delta0(), 0.5, epsilon = 1e-9);
        assert_abs_diff_eq!(r.v_variance(), 0.5, epsilon = 1e-9);
        assert_abs_diff_eq!(r.v_entropy_power(), 0.5, epsilon = 1e-8);
    }

    #[test]
    fn total_variance_for_uniform_signal() {
        let x = ScalarSource::uniform(0.0, 1.0).unwrap();
        let r = posterior_mean_reduction(&AdditiveNoiseModel::new(x, gauss(0.1)).unwrap()).unwrap();
        assert_abs_diff_eq!(r.v_variance() + r.delta0(), 1.0 / 12.0, epsilon = 1e-6);
        assert!(r.v_entropy_power() <= r.v_variance());
        let b = remote_rd_bounds(&r, 0.06).unwrap();
        assert!(b.lower <= b.upper);
    }

    #[test]
    fn pushforward_for_non_gaussian_noise() {
        let x = gauss(1.0);
        let z = ScalarSource::uniform(-0.5, 0.5).unwrap();
        let r = posterior_mean_reduction(&AdditiveNoiseModel::new(x, z).unwrap()).unwrap();
        assert!(matches!(r.construction(), Construction::Pushforward { .. }));
        assert_abs_diff_eq!(r.v_variance() + r.delta0(), 1.0, epsilon = 1e-6);
        assert!(r.v_entropy_power() <= r.v_variance() * (1.0 + 1e-3));
    }

    #[test]
    fn explicit_forms_at_gaussian_point() {
        let m = AdditiveNoiseModel::new(gauss(1.0), gauss(1.0)).unwrap();
        let b = additive_noise_remote_bounds(&m, 0.75).unwrap();
        assert_abs_diff_eq!(b.lower, 0.5 * 3.0f64.ln(), epsilon = 1e-12);
        assert_abs_diff_eq!(b.upper, 0.5 * 3.0f64.ln(), epsilon = 1e-12);
        let a = awgn_remote_bounds(&gauss(1.0), 1.0, 0.75).unwrap();
        assert_abs_diff_eq!(a.lower, 0.5 * LN_2, epsilon = 1e-12);
        assert_abs_diff_eq!(a.upper, 0.5 * LN_2, epsilon = 1e-12);
        let a = awgn_remote_bounds(&gauss(1.0), 1.0, 0.4).unwrap();
        assert!(!a.lower_valid && !a.upper_valid);
        let a = awgn_remote_bounds(&gauss(1.0), 1.0, 1e6).unwrap();
        assert_abs_diff_eq!(a.upper, 0.0, epsilon = 1e-6);
    }
}
