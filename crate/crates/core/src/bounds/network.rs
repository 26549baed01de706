//! Symmetric Gray-Wyner and AWGN CEO bounds.

use std::f64::consts::PI;

use super::remote::ObservationStats;
use super::{check_delta, log_plus, BoundPair, Regime};
use crate::dist::{AdditiveNoiseModel, BivariateSource, ScalarSource, TWO_PI_E};
use crate::error::{Error, Result};

/// A symmetric Gray-Wyner query: common distortion `delta` on both branches
/// and total private rate `r_p` (nats).
#[derive(Debug, Clone)]
pub struct GrayWynerQuery {
    source: BivariateSource,
    delta: f64,
    r_p: f64,
}

impl GrayWynerQuery {
    pub fn new(source: BivariateSource, delta: f64, r_p: f64) -> Result<Self> {
        check_delta(delta)?;
        if !(r_p >= 0.0 && r_p.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "private rate must be nonnegative (got {r_p})"
            )));
        }
        let c = source.covariance();
        if (c.s11 - c.s22).abs() > 1e-12 * c.s11.max(c.s22) {
            return Err(Error::Precondition(format!(
                "Gray-Wyner bounds need equal component variances (got {} and {})",
                c.s11, c.s22
            )));
        }
        Ok(Self { source, delta, r_p })
    }

    pub fn source(&self) -> &BivariateSource {
        &self.source
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn r_p(&self) -> f64 {
        self.r_p
    }

    /// Common component variance `σ²`.
    pub fn variance(&self) -> f64 {
        let c = self.source.covariance();
        0.5 * (c.s11 + c.s22)
    }

    /// `Δ e^{R_p} / σ²`.
    pub fn normalized_load(&self) -> f64 {
        self.delta * self.r_p.exp() / self.variance()
    }
}

/// Bounds on the common rate.
///
/// Everything is evaluated on the unit-variance pair `X/σ`, whose squared
/// joint entropy power is `N²(X₁,X₂)/σ⁴`. With `t = Δe^{R_p}/σ²` and
/// `a = |ρ|`, the low regime `t ≤ 1-a` gives `[½ log⁺(N²/(Δ²e^{2R_p})),
/// ½ log⁺(σ⁴(1-ρ²)/(Δ²e^{2R_p}))]`. For `t > 1` the distortion constraint is
/// vacuous and both sides are 0.
pub fn gray_wyner_bounds(query: &GrayWynerQuery) -> Result<BoundPair> {
    let t = query.normalized_load();
    let a = query.source.correlation().abs();
    if t > 1.0 {
        return Ok(BoundPair::new(0.0, 0.0).with_regime(Regime::Trivial));
    }
    let sigma2 = query.variance();
    let n2 = if query.source.is_gaussian() {
        query.source.covariance().det()
    } else {
        query.source.joint_entropy_power()?.powi(2)
    } / (sigma2 * sigma2);
    let lmmse = 1.0 - a * a;
    let (denominator, regime) = if t <= 1.0 - a {
        (t * t, Regime::Low)
    } else {
        ((1.0 - a) * (2.0 * t + a - 1.0), Regime::High)
    };
    Ok(BoundPair::new(
        0.5 * log_plus(n2 / denominator),
        0.5 * log_plus(lmmse / denominator),
    )
    .with_regime(regime))
}

/// The Lagrangian `ℓ(ν)` on unit-variance inputs, with `t = Δ̃e^{R_p}` and
/// `n2 = N²(X̃₁,X̃₂)`.
pub fn gw_lagrangian(nu: f64, rho: f64, t: f64, n2: f64) -> Result<f64> {
    if !(nu > 0.5 && nu <= 1.0) {
        return Err(Error::InvalidParameter(format!("nu must lie in (1/2, 1] (got {nu})")));
    }
    if !(0.0..1.0).contains(&rho) {
        return Err(Error::InvalidParameter(format!("rho must lie in [0, 1) (got {rho})")));
    }
    if !(t > 0.0 && n2 > 0.0) {
        return Err(Error::InvalidParameter("t and N² must be positive".into()));
    }
    let c = TWO_PI_E;
    Ok(0.5 * (c * c * n2).ln() - nu * (c * t).ln() + 0.5 * nu * (nu * nu / (2.0 * nu - 1.0)).ln()
        - 0.5 * (1.0 - nu) * (c * c * (1.0 - rho).powi(2) / (2.0 * nu - 1.0)).ln())
}

/// Stationary point `t/(2t-1+ρ)` of the Lagrangian.
pub fn gw_nu_star(rho: f64, t: f64) -> f64 {
    t / (2.0 * t - 1.0 + rho)
}

/// `½ log(1/(1-λ²)) - (λ/2) log((2πe)²(1-ρ)²(1+λ)/(1-λ))`.
pub fn gw_covariance_floor(lambda: f64, rho: f64) -> Result<f64> {
    if !(lambda > 0.0 && lambda <= rho && rho < 1.0) {
        return Err(Error::Precondition(format!(
            "needs 0 < lambda <= rho < 1 (got lambda = {lambda}, rho = {rho})"
        )));
    }
    let c = 2.0 * PI * std::f64::consts::E;
    Ok(0.5 * (1.0 / (1.0 - lambda * lambda)).ln()
        - 0.5 * lambda * (c * c * (1.0 - rho).powi(2) * (1.0 + lambda) / (1.0 - lambda)).ln())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConstructionKind {
    /// `W = α(X₁ + X₂) + N`.
    Scalar,
    /// `W₁ = αX₁ + βX₂ + N₁`, `W₂ = βX₁ + αX₂ + N₂`.
    TwoDimensional,
}

/// A Gaussian auxiliary for the unit-variance Gray-Wyner problem.
#[derive(Debug, Clone, PartialEq)]
pub struct GWConstruction {
    pub kind: ConstructionKind,
    pub alpha: f64,
    /// Zero for the scalar kind.
    pub beta: f64,
    pub noise_variance: f64,
    /// Largest per-branch error of the linear estimator from `W`.
    pub achieved_mmse: f64,
    /// `I(X₁,X₂; W)` for jointly Gaussian inputs.
    pub achieved_common_rate: f64,
}

/// Builds the auxiliary of the natural kind for `t = Δe^{R_p}` (unit variance):
/// scalar when `t ≥ 1-|ρ|`, two-dimensional otherwise.
pub fn gw_construction(rho: f64, delta: f64, r_p: f64) -> Result<GWConstruction> {
    let t = delta * r_p.exp();
    let kind = if t >= 1.0 - rho.abs() {
        ConstructionKind::Scalar
    } else {
        ConstructionKind::TwoDimensional
    };
    gw_construction_of_kind(kind, rho, delta, r_p)
}

pub fn gw_construction_of_kind(
    kind: ConstructionKind,
    rho: f64,
    delta: f64,
    r_p: f64,
) -> Result<GWConstruction> {
    check_delta(delta)?;
    if !(rho.abs() < 1.0) {
        return Err(Error::InvalidParameter(format!("|rho| must be below 1 (got {rho})")));
    }
    let t = delta * r_p.exp();
    let a = rho.abs();
    let (alpha, beta, noise) = match kind {
        ConstructionKind::Scalar => {
            if !(t >= 1.0 - a && t <= 1.0) {
                return Err(Error::InfeasibleConstruction(format!(
                    "scalar auxiliary needs 1-|rho| <= t <= 1 (t = {t})"
                )));
            }
            ((1.0 - t).sqrt() / (1.0 + a), 0.0, (2.0 * t + a - 1.0) / (1.0 + a))
        }
        ConstructionKind::TwoDimensional => {
            if !(t < 1.0 - a) {
                return Err(Error::InfeasibleConstruction(format!(
                    "two-dimensional auxiliary needs t < 1-|rho| (t = {t})"
                )));
            }
            let sum2 = 1.0 - t / (1.0 + a);
            let diff2 = 1.0 - t / (1.0 - a);
            if !(sum2 >= 0.0 && diff2 >= 0.0) {
                return Err(Error::InfeasibleConstruction("complex (alpha, beta) roots".into()));
            }
            let (s, d) = (sum2.sqrt(), diff2.sqrt());
            (0.5 * (s + d), 0.5 * (s - d), t)
        }
    };
    // Coefficients acting on (X1, X2); negative correlation flips the sign of X2.
    let sign = if rho < 0.0 { -1.0 } else { 1.0 };
    let rows: Vec<[f64; 2]> = match kind {
        ConstructionKind::Scalar => vec![[alpha, sign * alpha]],
        ConstructionKind::TwoDimensional => vec![[alpha, sign * beta], [beta, sign * alpha]],
    };
    let (mmse, rate) = linear_gaussian_auxiliary(rho, &rows, noise)?;
    Ok(GWConstruction {
        kind,
        alpha,
        beta,
        noise_variance: noise,
        achieved_mmse: mmse,
        achieved_common_rate: rate,
    })
}

/// For `W = A X + N` with `Cov X = [[1,ρ],[ρ,1]]` and `N ~ N(0, noise·I)`:
/// the larger per-coordinate linear-estimation error and `½ log(det Cov W / det Cov N)`.
fn linear_gaussian_auxiliary(rho: f64, rows: &[[f64; 2]], noise: f64) -> Result<(f64, f64)> {
    let k = [[1.0, rho], [rho, 1.0]];
    let m = rows.len();
    // cross[i][r] = Cov(X_i, W_r) = (K Aᵀ)[i][r]
    let cross: Vec<[f64; 2]> = rows
        .iter()
        .map(|a| [k[0][0] * a[0] + k[0][1] * a[1], k[1][0] * a[0] + k[1][1] * a[1]])
        .collect();
    let mut kw = vec![vec![0.0; m]; m];
    for r in 0..m {
        for q in 0..m {
            kw[r][q] = rows[r][0] * cross[q][0] + rows[r][1] * cross[q][1];
            if r == q {
                kw[r][q] += noise;
            }
        }
    }
    let (det_w, inv) = match m {
        1 => (kw[0][0], vec![vec![1.0 / kw[0][0]]]),
        2 => {
            let det = kw[0][0] * kw[1][1] - kw[0][1] * kw[1][0];
            (
                det,
                vec![
                    vec![kw[1][1] / det, -kw[0][1] / det],
                    vec![-kw[1][0] / det, kw[0][0] / det],
                ],
            )
        }
        _ => unreachable!("auxiliaries have one or two components"),
    };
    if !(det_w > 0.0 && noise > 0.0) {
        return Err(Error::InfeasibleConstruction("singular auxiliary covariance".into()));
    }
    let mut worst: f64 = 0.0;
    for i in 0..2 {
        let mut explained = 0.0;
        for r in 0..m {
            for q in 0..m {
                explained += cross[r][i] * inv[r][q] * cross[q][i];
            }
        }
        worst = worst.max(k[i][i] - explained);
    }
    let rate = 0.5 * (det_w / noise.powi(m as i32)).ln();
    Ok((worst, rate))
}

/// The symmetric AWGN CEO problem: `M` agents observe `X + Z_m`, with
/// independent `Z_m ~ N(0, σ_Z²)`.
#[derive(Debug, Clone)]
pub struct CEOQuery {
    pub signal: ScalarSource,
    pub noise_variance: f64,
    pub agents: u32,
    pub delta: f64,
}

/// Delta-independent quantities of a CEO problem, for sweeps.
#[derive(Debug, Clone, Copy)]
pub struct CEOStats {
    agents: u32,
    noise_variance: f64,
    stats: ObservationStats,
}

impl CEOStats {
    pub fn new(signal: &ScalarSource, noise_variance: f64, agents: u32) -> Result<Self> {
        if agents == 0 {
            return Err(Error::InvalidParameter("need at least one agent".into()));
        }
        if !(noise_variance > 0.0 && noise_variance.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "noise variance must be positive (got {noise_variance})"
            )));
        }
        let m = agents as f64;
        let model = AdditiveNoiseModel::new(
            signal.clone(),
            ScalarSource::gaussian(0.0, noise_variance / m)?,
        )?;
        Ok(Self {
            agents,
            noise_variance,
            stats: ObservationStats::new(&model)?,
        })
    }

    pub fn bounds(&self, delta: f64) -> Result<BoundPair> {
        check_delta(delta)?;
        let m = self.agents as f64;
        let vz = self.noise_variance;
        let s = &self.stats;
        let (nx, vx, ny, vy) = (s.signal_ep, s.signal_var, s.observation_ep, s.observation_var);
        let lower_threshold = nx * vz / (m * ny);
        let upper_threshold = vx * vz / (m * vy);
        let mut b = BoundPair::new(f64::NAN, f64::NAN);
        b.lower_valid = delta > lower_threshold;
        b.upper_valid = delta > upper_threshold;
        if b.lower_valid {
            b.lower = 0.5 * log_plus(nx / delta)
                + 0.5 * m * log_plus(m * nx / (m * ny - nx / delta * vz));
        }
        if b.upper_valid {
            b.upper = 0.5 * log_plus(vx / delta)
                + 0.5 * m * log_plus(m * vx / (m * vy - vx / delta * vz));
        }
        b.lower_threshold = Some(lower_threshold);
        b.upper_threshold = Some(upper_threshold);
        Ok(b)
    }
}

/// Sum-rate bounds for the symmetric AWGN CEO problem.
pub fn ceo_sum_rate_bounds(query: &CEOQuery) -> Result<BoundPair> {
    CEOStats::new(&query.signal, query.noise_variance, query.agents)?.bounds(query.delta)
}
