//! Shannon lower/upper bound pairs.
//!
//! Every bound is reported in nats. Sides whose applicability condition
//! fails are returned with their `*_valid` flag cleared instead of as an
//! error, so a sweep can keep going across the invalid part of a curve.

use std::fmt;

mod network;
mod point;
mod remote;
mod variational;

pub use network::{
    ceo_sum_rate_bounds, gray_wyner_bounds, gw_construction, gw_construction_of_kind,
    gw_lagrangian, gw_covariance_floor, gw_nu_star, CEOQuery, CEOStats, ConstructionKind,
    GWConstruction, GrayWynerQuery,
};
pub use point::{
    classic_rd_bounds, conditional_rd_bounds, mmse_estimation_bounds, optimal_distortion_matrix,
    raw_estimation_bounds, sum_distortion_rd_bounds, sum_distortion_split, vector_rd_bounds,
    water_filling_rate, wyner_ziv_rd_bounds, wz_auxiliary_for_distortion,
    wz_auxiliary_rate_distortion,
};
pub use remote::{
    additive_noise_remote_bounds, awgn_remote_bounds, posterior_mean_reduction,
    remote_rd_bounds, Construction, ObservationStats, RemoteReduction,
};
pub use variational::{variational_lower_bound, Certificate, Lambda, VariationalCertificate};

use crate::error::{Error, Result};

/// `max(0, ln x)`.
pub fn log_plus(x: f64) -> f64 {
    if x > 1.0 {
        x.ln()
    } else {
        0.0
    }
}

/// Which formula produced a bound pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    /// Estimation bounds on the MMSE; values are distortions, not rates.
    Mmse,
    High,
    Low,
    Trivial,
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Regime::Mmse => "mmse",
            Regime::High => "high",
            Regime::Low => "low",
            Regime::Trivial => "trivial",
        })
    }
}

/// A lower/upper bound pair. An invalid side carries `NaN`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundPair {
    pub lower: f64,
    pub upper: f64,
    pub lower_valid: bool,
    pub upper_valid: bool,
    pub regime: Option<Regime>,
    /// Distortion above which the lower side applies, when it has one.
    pub lower_threshold: Option<f64>,
    pub upper_threshold: Option<f64>,
}

impl BoundPair {
    pub fn new(lower: f64, upper: f64) -> Self {
        Self {
            lower,
            upper,
            lower_valid: true,
            upper_valid: true,
            regime: None,
            lower_threshold: None,
            upper_threshold: None,
        }
    }

    pub fn with_regime(mut self, regime: Regime) -> Self {
        self.regime = Some(regime);
        self
    }

    /// `upper - lower` when both sides are valid.
    pub fn gap(&self) -> Option<f64> {
        (self.lower_valid && self.upper_valid).then(|| self.upper - self.lower)
    }

    /// Scales every value, e.g. by `1/ln 2` for bits.
    pub fn scaled(mut self, factor: f64) -> Self {
        self.lower *= factor;
        self.upper *= factor;
        self
    }
}

pub(crate) fn check_delta(delta: f64) -> Result<()> {
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "distortion must be positive and finite (got {delta})"
        )));
    }
    Ok(())
}
