//! Point-to-point bounds: estimation, classic, vector, conditional, Wyner-Ziv.

use super::{check_delta, log_plus, BoundPair, Regime};
use crate::dist::{AdditiveNoiseModel, Axis, BivariateSource, Cov2, ScalarSource};
use crate::error::{Error, Result};
use crate::quad::golden_max;

/// `[½ log⁺(N/Δ), ½ log⁺(Var/Δ)]`.
pub fn classic_rd_bounds(source: &ScalarSource, delta: f64) -> Result<BoundPair> {
    check_delta(delta)?;
    let n = source.entropy_power()?;
    let v = source.variance()?;
    Ok(BoundPair::new(0.5 * log_plus(n / delta), 0.5 * log_plus(v / delta)))
}

/// Bounds on the MMSE of `X` from `Y = X + Z`: `[N(X)N(Z)/N(Y), σ_X²σ_Z²/σ_Y²]`.
/// The values are distortions, not rates.
pub fn mmse_estimation_bounds(model: &AdditiveNoiseModel) -> Result<BoundPair> {
    let (x, z) = (model.signal(), model.noise());
    let y = model.observation()?;
    let lower = x.entropy_power()? * z.entropy_power()? / y.entropy_power()?;
    let upper = x.variance()? * z.variance()? / y.variance()?;
    Ok(BoundPair::new(lower, upper).with_regime(Regime::Mmse))
}

/// `[N(X|Y), σ_X²(1-ρ²)]` for the MMSE of the first coordinate given the
/// second. The lower side only applies when the MMSE is at most `N(X)`.
pub fn raw_estimation_bounds(source: &BivariateSource) -> Result<BoundPair> {
    let lower = source.conditional_entropy_power(Axis::Second)?;
    let upper = source.lmmse(Axis::First);
    let mmse = source.mmse(Axis::First, Axis::Second)?;
    let nx = source.marginal(Axis::First)?.entropy_power()?;
    let mut b = BoundPair::new(lower, upper).with_regime(Regime::Mmse);
    b.lower_valid = mmse <= nx;
    Ok(b)
}

/// The distortion matrix `D` with `0 ≼ D ≼ Σ`, `D_ii ≤ Δ_i` of largest
/// determinant.
///
/// For fixed diagonal `(d1, d2)` the best off-diagonal entry is the
/// feasible value closest to zero, `sign(Σ12)·max(0, |Σ12| - r)` with
/// `r = √((Σ11-d1)(Σ22-d2))`. The remaining two-variable problem is
/// concave in `log det` and is solved by nested golden-section search.
pub fn optimal_distortion_matrix(sigma: Cov2, delta1: f64, delta2: f64) -> Result<Cov2> {
    check_delta(delta1)?;
    check_delta(delta2)?;
    if !(sigma.s11 > 0.0 && sigma.s22 > 0.0 && sigma.det() > 0.0) {
        return Err(Error::Precondition("covariance must be full rank".into()));
    }
    let (s11, s22) = (sigma.s11, sigma.s22);
    if delta1 >= s11 && delta2 >= s22 {
        return Ok(sigma);
    }
    let s = sigma.s12.abs();
    let cap1 = delta1.min(s11);
    let cap2 = delta2.min(s22);
    let scale = s11.max(s22);
    let tol = 1e-14 * scale;

    let offdiag = |d1: f64, d2: f64| (s - ((s11 - d1).max(0.0) * (s22 - d2).max(0.0)).sqrt()).max(0.0);
    let log_det = |d1: f64, d2: f64| {
        let c = offdiag(d1, d2);
        let det = d1 * d2 - c * c;
        if det > 0.0 {
            det.ln()
        } else {
            f64::NEG_INFINITY
        }
    };
    // Feasible d2 for fixed d1 is where h(d2) >= 0; h is concave with its
    // peak at d1·Σ22/Σ11, where it is positive.
    let h = |d1: f64, d2: f64| {
        (d1 * d2).sqrt() + ((s11 - d1).max(0.0) * (s22 - d2).max(0.0)).sqrt() - s
    };
    let root = |d1: f64, mut inside: f64, mut outside: f64| {
        for _ in 0..200 {
            let mid = 0.5 * (inside + outside);
            if h(d1, mid) >= 0.0 {
                inside = mid;
            } else {
                outside = mid;
            }
            if (outside - inside).abs() <= tol {
                break;
            }
        }
        inside
    };
    let d2_range = |d1: f64| {
        let peak = d1 * s22 / s11;
        let lo = if h(d1, 0.0) >= 0.0 { 0.0 } else { root(d1, peak, 0.0) };
        let hi = if h(d1, s22) >= 0.0 { s22 } else { root(d1, peak, s22) };
        (lo, hi.min(cap2))
    };
    let d1_max = if d2_range(cap1).0 <= cap2 {
        cap1
    } else {
        let (mut ok, mut bad) = (0.0, cap1);
        while bad - ok > tol {
            let mid = 0.5 * (ok + bad);
            if d2_range(mid).0 <= cap2 {
                ok = mid;
            } else {
                bad = mid;
            }
        }
        ok
    };
    let best_d2 = |d1: f64| {
        let (lo, hi) = d2_range(d1);
        if hi <= lo {
            return (lo, log_det(d1, lo));
        }
        golden_max(|d2| log_det(d1, d2), lo, hi, tol)
    };
    let (d1, _) = golden_max(|d1| best_d2(d1).1, 0.0, d1_max, tol);
    let (d2, value) = best_d2(d1);
    if !value.is_finite() {
        return Err(Error::numerical(
            "vector_rd_bounds",
            "no distortion matrix with positive determinant found",
        ));
    }
    let c = offdiag(d1, d2).copysign(sigma.s12);
    Ok(Cov2::new(d1, c, d2))
}

fn vector_pair(source: &BivariateSource, det_d: f64) -> Result<BoundPair> {
    let sigma = source.covariance();
    let n2 = if source.is_gaussian() {
        sigma.det()
    } else {
        source.joint_entropy_power()?.powi(2)
    };
    Ok(BoundPair::new(
        0.5 * log_plus(n2 / det_d),
        0.5 * log_plus(sigma.det() / det_d),
    ))
}

/// Bounds for the pair under separate per-coordinate distortions.
pub fn vector_rd_bounds(source: &BivariateSource, delta1: f64, delta2: f64) -> Result<BoundPair> {
    let d = optimal_distortion_matrix(source.covariance(), delta1, delta2)?;
    vector_pair(source, d.det())
}

/// Best split `(Δ1, Δ2)` of a total distortion budget together with the
/// corresponding distortion matrix.
pub fn sum_distortion_split(sigma: Cov2, delta_total: f64) -> Result<((f64, f64), Cov2)> {
    check_delta(delta_total)?;
    let mut failure = None;
    let mut objective = |d1: f64| {
        let d2 = delta_total - d1;
        if d1 <= 0.0 || d2 <= 0.0 {
            return f64::NEG_INFINITY;
        }
        match optimal_distortion_matrix(sigma, d1, d2) {
            Ok(d) => d.det().ln(),
            Err(e) => {
                failure = Some(e);
                f64::NEG_INFINITY
            }
        }
    };
    let (d1, _) = golden_max(&mut objective, 0.0, delta_total, 1e-13 * delta_total);
    if let Some(e) = failure {
        return Err(e);
    }
    let d2 = delta_total - d1;
    Ok(((d1, d2), optimal_distortion_matrix(sigma, d1, d2)?))
}

/// Bounds under a total distortion budget `Δ1 + Δ2 ≤ delta_total`.
pub fn sum_distortion_rd_bounds(source: &BivariateSource, delta_total: f64) -> Result<BoundPair> {
    let (_, d) = sum_distortion_split(source.covariance(), delta_total)?;
    vector_pair(source, d.det())
}

/// Reverse water-filling on the eigenvalues of `Σ`: the Gaussian rate for a
/// total distortion budget.
pub fn water_filling_rate(sigma: Cov2, delta_total: f64) -> f64 {
    let (l1, l2) = sigma.eigenvalues();
    if delta_total >= l1 + l2 {
        0.0
    } else if 0.5 * delta_total <= l2 {
        0.5 * (l1 * l2 / (0.25 * delta_total * delta_total)).ln()
    } else {
        0.5 * (l1 / (delta_total - l2)).ln()
    }
}

/// Side information at both ends: `[½ log⁺(N(X|W)/Δ), ½ log⁺(Var(X|W)/Δ)]`.
/// The source is `(X, W)`.
pub fn conditional_rd_bounds(source: &BivariateSource, delta: f64) -> Result<BoundPair> {
    check_delta(delta)?;
    let n = source.conditional_entropy_power(Axis::Second)?;
    let m = source.mmse(Axis::First, Axis::Second)?;
    Ok(BoundPair::new(0.5 * log_plus(n / delta), 0.5 * log_plus(m / delta)))
}

/// Side information at the decoder only. The upper side uses the linear
/// MMSE `σ_X²(1-ρ²)`.
pub fn wyner_ziv_rd_bounds(source: &BivariateSource, delta: f64) -> Result<BoundPair> {
    check_delta(delta)?;
    let n = source.conditional_entropy_power(Axis::Second)?;
    let l = source.lmmse(Axis::First);
    Ok(BoundPair::new(0.5 * log_plus(n / delta), 0.5 * log_plus(l / delta)))
}

/// Rate and distortion achieved by the auxiliary `U = ρ̃X + √(1-ρ̃²)Z`
/// combined with the side information by maximum-ratio combining.
pub fn wz_auxiliary_rate_distortion(source: &BivariateSource, rho_tilde: f64) -> Result<(f64, f64)> {
    if !(rho_tilde > 0.0 && rho_tilde < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "auxiliary correlation must lie in (0, 1) (got {rho_tilde})"
        )));
    }
    let rho = source.correlation();
    let var = source.covariance().s11;
    let gamma = rho * rho / (1.0 - rho * rho);
    let gamma_t = rho_tilde * rho_tilde / (1.0 - rho_tilde * rho_tilde);
    let distortion = var / (1.0 + gamma + gamma_t);
    let rate = 0.5 * (1.0 + (1.0 - rho * rho) * gamma_t).ln();
    Ok((rate, distortion))
}

/// The auxiliary correlation whose construction meets distortion `delta`
/// exactly. Only defined below the linear MMSE.
pub fn wz_auxiliary_for_distortion(source: &BivariateSource, delta: f64) -> Result<f64> {
    check_delta(delta)?;
    let rho = source.correlation();
    let var = source.covariance().s11;
    let gamma = rho * rho / (1.0 - rho * rho);
    let gamma_t = var / delta - 1.0 - gamma;
    if !(gamma_t > 0.0) {
        return Err(Error::InfeasibleDistortion(format!(
            "distortion {delta} is not below the linear MMSE {}",
            source.lmmse(Axis::First)
        )));
    }
    Ok((gamma_t / (1.0 + gamma_t)).sqrt())
}
