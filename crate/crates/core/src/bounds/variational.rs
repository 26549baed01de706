//! Lower bounds from a variational certificate `(s, λ)`.
//!
//! For `s ≤ 0` and `λ ≥ 0` with `∫ λ(x) p(x) e^{s (x-y)²} dx ≤ 1` for every
//! `y`, the value `sΔ + ∫ p log λ` is a lower bound on `R(Δ)`.

use std::fmt;
use std::sync::Arc;

use super::check_delta;
use crate::dist::ScalarSource;
use crate::error::{Error, Result};
use crate::quad::{self, integrate_pieces, linspace};

/// Points at which the membership constraint is checked.
pub const CHECK_POINTS: usize = 257;
/// Largest accepted constraint slack.
pub const SLACK_TOLERANCE: f64 = 1e-8;

/// The weighting function of a certificate.
#[derive(Clone)]
pub enum Lambda {
    /// `λ(x) = K / p(x)` with `K = √(-s/π)`.
    BergerDefault,
    /// A user-supplied `λ`.
    Custom(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
}

impl fmt::Debug for Lambda {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Lambda::BergerDefault => f.write_str("K/p(x)"),
            Lambda::Custom(_) => f.write_str("custom"),
        }
    }
}

/// A candidate certificate to be checked.
#[derive(Debug, Clone)]
pub struct Certificate {
    pub s: f64,
    pub lambda: Lambda,
}

/// A checked certificate and the bound it certifies.
#[derive(Debug, Clone)]
pub struct VariationalCertificate {
    pub s: f64,
    pub lambda: Lambda,
    /// `max_y ∫ λ p e^{s d} dx - 1`.
    pub constraint_slack: f64,
    /// Smallest and largest constraint integral over the check grid.
    pub constraint_range: (f64, f64),
    /// `sΔ + ∫ p log λ`, not clamped at zero.
    pub value: f64,
}

/// Checks a certificate (Berger's default when `certificate` is `None`,
/// with `s = -1/(2Δ)`) and evaluates the bound it yields.
pub fn variational_lower_bound(
    source: &ScalarSource,
    delta: f64,
    certificate: Option<Certificate>,
) -> Result<VariationalCertificate> {
    check_delta(delta)?;
    let cert = certificate.unwrap_or(Certificate {
        s: -0.5 / delta,
        lambda: Lambda::BergerDefault,
    });
    let s = cert.s;
    if !(s <= 0.0 && s.is_finite()) {
        return Err(Error::InvalidParameter(format!("slope s must be <= 0 (got {s})")));
    }
    let k = (-s / std::f64::consts::PI).sqrt();
    if matches!(cert.lambda, Lambda::BergerDefault) && s == 0.0 {
        return Err(Error::InvalidParameter(
            "the default certificate needs s < 0".into(),
        ));
    }

    // λ(x) p(x), with the default written out so it stays exact where p is tiny.
    let lambda_p = |x: f64| -> f64 {
        let p = source.pdf(x);
        match &cert.lambda {
            Lambda::BergerDefault => {
                if p > 0.0 {
                    k
                } else {
                    0.0
                }
            }
            Lambda::Custom(f) => f(x) * p,
        }
    };
    let p_log_lambda = |x: f64| -> f64 {
        let lp = source.ln_pdf(x);
        if lp == f64::NEG_INFINITY {
            return 0.0;
        }
        let log_lambda = match &cert.lambda {
            Lambda::BergerDefault => k.ln() - lp,
            Lambda::Custom(f) => f(x).ln(),
        };
        lp.exp() * log_lambda
    };

    let (support_lo, support_hi) = source.support();
    let (eff_lo, eff_hi) = source.effective_support();
    let breaks = source.breakpoints();
    let pad = 4.0 * delta.sqrt();
    let ys = linspace(eff_lo - pad, eff_hi + pad, CHECK_POINTS);
    // e^{s (x-y)²} < e^{-50} outside this window.
    let window = (50.0 / -s).sqrt();
    let mut range = (f64::INFINITY, f64::NEG_INFINITY);
    for &y in &ys {
        let (lo, hi) = if s < 0.0 {
            (support_lo.max(y - window), support_hi.min(y + window))
        } else {
            (eff_lo, eff_hi)
        };
        let integral = if hi > lo {
            let mut cuts = breaks.clone();
            cuts.push(y);
            integrate_pieces(|x| lambda_p(x) * (s * (x - y) * (x - y)).exp(), lo, hi, &cuts, 1e-12, 1e-12)
                .map_err(|e| relabel(e, "variational constraint"))?
                .value
        } else {
            0.0
        };
        range = (range.0.min(integral), range.1.max(integral));
    }
    let slack = range.1 - 1.0;
    if slack > SLACK_TOLERANCE {
        return Err(Error::InvalidCertificate {
            slack,
            tolerance: SLACK_TOLERANCE,
        });
    }

    let expectation = match source.family() {
        crate::dist::Family::Gridded(g) => {
            let vals: Vec<f64> = g.x().iter().map(|&x| p_log_lambda(x)).collect();
            quad::trapezoid(g.x(), &vals)
        }
        _ => integrate_pieces(p_log_lambda, eff_lo, eff_hi, &breaks, 1e-12, 1e-13)
            .map_err(|e| relabel(e, "variational value"))?
            .value,
    };
    Ok(VariationalCertificate {
        s,
        lambda: cert.lambda,
        constraint_slack: slack,
        constraint_range: range,
        value: s * delta + expectation,
    })
}

fn relabel(e: Error, functional: &'static str) -> Error {
    match e {
        Error::NumericalFailure { reason, .. } => Error::numerical(functional, reason),
        other => other,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::classic_rd_bounds;
    use approx::assert_abs_diff_eq;

    #[test]
    fn default_certificate_reproduces_the_lower_bound() {
        let g = ScalarSource::gaussian(0.0, 1.0).unwrap();
        let c = variational_lower_bound(&g, 0.25, None).unwrap();
        assert_abs_diff_eq!(c.value, 0.5 * 4.0f64.ln(), epsilon = 1e-9);
        assert_abs_diff_eq!(c.constraint_range.0, 1.0, epsilon = 1e-8);
        assert_abs_diff_eq!(c.constraint_range.1, 1.0, epsilon = 1e-8);

        let u = ScalarSource::uniform(0.0, 1.0).unwrap();
        let c = variational_lower_bound(&u, 0.01, None).unwrap();
        let classic = classic_rd_bounds(&u, 0.01).unwrap();
        assert_abs_diff_eq!(c.value, classic.lower, epsilon = 1e-9);
        // Bounded support: the constraint integral drops below 1 near the edges.
        assert!(c.constraint_range.0 < 1.0 && c.constraint_slack <= 1e-8);
    }

    #[test]
    fn rejects_violating_certificate() {
        let g = ScalarSource::gaussian(0.0, 1.0).unwrap();
        let s = -2.0;
        let k = (-s / std::f64::consts::PI).sqrt();
        let src = g.clone();
        let lambda = Lambda::Custom(Arc::new(move |x| 1.1 * k / src.pdf(x)));
        let r = variational_lower_bound(&g, 0.25, Some(Certificate { s, lambda }));
        assert!(matches!(r, Err(Error::InvalidCertificate { .. })));
        assert!(variational_lower_bound(
            &g,
            0.25,
            Some(Certificate { s: 0.5, lambda: Lambda::BergerDefault })
        )
        .is_err());
    }

    #[test]
    fn scaled_down_certificate_gives_weaker_bound() {
        let g = ScalarSource::laplace(0.0, 1.0).unwrap();
        let delta = 0.1;
        let s = -0.5 / delta;
        let k = (-s / std::f64::consts::PI).sqrt();
        let src = g.clone();
        let lambda = Lambda::Custom(Arc::new(move |x| 0.5 * k / src.pdf(x)));
        let weak = variational_lower_bound(&g, delta, Some(Certificate { s, lambda })).unwrap();
        let best = variational_lower_bound(&g, delta, None).unwrap();
        assert_abs_diff_eq!(best.value - weak.value, 2.0f64.ln(), epsilon = 1e-8);
        assert!(weak.constraint_slack < -0.4);
    }
}
