//! Validation suites over a built-in source corpus. Each check reports the
//! worst deviation it saw against a tolerance.

use std::fmt;
use std::io::Write;

use clap::ValueEnum;
use rayon::prelude::*;

use crate::bounds::{
    awgn_remote_bounds, ceo_sum_rate_bounds, classic_rd_bounds, conditional_rd_bounds,
    gray_wyner_bounds, gw_construction, gw_lagrangian, gw_covariance_floor, gw_nu_star,
    posterior_mean_reduction, remote_rd_bounds, sum_distortion_rd_bounds, variational_lower_bound,
    vector_rd_bounds, wyner_ziv_rd_bounds, BoundPair, CEOQuery, GrayWynerQuery,
};
use crate::dist::{AdditiveNoiseModel, BivariateComponent, BivariateSource, Cov2, ScalarSource};
use crate::error::{Error, Result};
use crate::oracle::{
    conditional_rd_oracle_with, discretize, gw_covariance_search, rd_at_distortion,
    remote_rd_oracle_with,
};
use crate::quad::linspace;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Tightness,
    Sandwich,
    Identities,
    Constructions,
    All,
}

/// Scalar BA grid for the sandwich suite.
pub const SANDWICH_GRID: usize = 1024;
pub const SANDWICH_TOLERANCE: f64 = 5e-3;
/// Tolerance for the conditional and remote oracles.
pub const NETWORK_TOLERANCE: f64 = 1e-2;
const CONDITIONAL_CELLS: usize = 64;
const CONDITIONAL_JOINT: usize = 256;
const REMOTE_ORACLE_GRID: usize = 256;

#[derive(Debug, Clone)]
pub struct Check {
    pub name: String,
    /// Largest deviation seen; `NaN` or infinite if some case failed outright.
    pub worst: f64,
    pub tolerance: f64,
    pub cases: usize,
}

impl Check {
    pub fn passed(&self) -> bool {
        self.worst <= self.tolerance
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {} (cases {}, worst {:.3e}, tol {:.0e})",
            if self.passed() { "PASS" } else { "FAIL" },
            self.name,
            self.cases,
            self.worst,
            self.tolerance
        )
    }
}

/// Accumulates deviations for one named check. A failed evaluation poisons
/// the check instead of aborting the suite.
struct Tally {
    name: String,
    tolerance: f64,
    worst: f64,
    cases: usize,
}

impl Tally {
    fn new(name: &str, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            tolerance,
            worst: 0.0,
            cases: 0,
        }
    }

    fn add(&mut self, deviation: Result<f64>) {
        self.cases += 1;
        match deviation {
            Ok(d) if d.is_nan() => self.worst = f64::NAN,
            Ok(d) => {
                if !self.worst.is_nan() {
                    self.worst = self.worst.max(d)
                }
            }
            Err(_) => self.worst = f64::NAN,
        }
    }

    fn finish(self) -> Check {
        Check {
            name: self.name,
            worst: self.worst,
            tolerance: self.tolerance,
            cases: self.cases,
        }
    }
}

fn gap_of(b: Result<BoundPair>) -> Result<f64> {
    let b = b?;
    b.gap()
        .map(f64::abs)
        .ok_or_else(|| Error::Precondition("a bound side is invalid".into()))
}

/// How far `value` falls outside `[lower - 0, upper + 0]`.
fn outside(value: f64, b: &BoundPair) -> f64 {
    if !(b.lower_valid && b.upper_valid) {
        return f64::NAN;
    }
    (b.lower - value).max(value - b.upper).max(0.0)
}

/// Named scalar sources of the corpus with the truncation width their
/// oracle grid uses.
pub fn scalar_corpus() -> Result<Vec<(&'static str, ScalarSource, f64)>> {
    let x = linspace(-1.0, 1.0, 401);
    let tri = x.iter().map(|t| 1.0 - t.abs()).collect();
    Ok(vec![
        ("gaussian", ScalarSource::gaussian(0.0, 1.0)?, 8.0),
        ("uniform", ScalarSource::uniform(0.0, 1.0)?, 8.0),
        ("laplace", ScalarSource::laplace(0.0, 1.0)?, 12.0),
        (
            "mixture",
            ScalarSource::gaussian_mixture(vec![0.5, 0.5], vec![-1.0, 1.0], vec![0.25, 0.25])?,
            8.0,
        ),
        ("gridded", ScalarSource::gridded(x, tri)?, 8.0),
    ])
}

/// A symmetric non-Gaussian joint: two correlated blobs on the diagonal,
/// tabulated on a grid.
pub fn symmetric_gridded_joint() -> Result<BivariateSource> {
    let c = Cov2::new(0.5, 0.1, 0.5);
    let mix = BivariateSource::mixture(
        vec![0.5, 0.5],
        vec![
            BivariateComponent { mean: [-0.7, -0.7], covariance: c },
            BivariateComponent { mean: [0.7, 0.7], covariance: c },
        ],
    )?;
    BivariateSource::from_grid(mix.to_grid(257)?)
}

pub fn checks(suite: Suite) -> Result<Vec<Check>> {
    Ok(match suite {
        Suite::Tightness => tightness(),
        Suite::Sandwich => sandwich()?,
        Suite::Identities => identities()?,
        Suite::Constructions => constructions()?,
        Suite::All => {
            let mut all = tightness();
            all.extend(identities()?);
            all.extend(constructions()?);
            all.extend(sandwich()?);
            all
        }
    })
}

/// Prints one line per check and returns whether all passed.
pub fn run_suite(suite: Suite, out: &mut impl Write) -> Result<bool> {
    let checks = checks(suite)?;
    let mut ok = true;
    for c in &checks {
        writeln!(out, "{c}").map_err(|e| Error::Io(e.to_string()))?;
        ok &= c.passed();
    }
    Ok(ok)
}

/// Gaussian inputs: lower = upper within 1e-9.
pub fn tightness() -> Vec<Check> {
    const TOL: f64 = 1e-9;
    let mut out = Vec::new();

    let mut t = Tally::new("tightness/classic", TOL);
    for var in [1.0, 2.5] {
        for d in linspace(0.01 * var, 1.5 * var, 20) {
            t.add(gap_of(ScalarSource::gaussian(0.0, var).and_then(|s| classic_rd_bounds(&s, d))));
        }
    }
    out.push(t.finish());

    let mut t = Tally::new("tightness/vector", TOL);
    let mut s = Tally::new("tightness/sum", TOL);
    for rho in [0.0, 0.5, -0.3] {
        let src = BivariateSource::gaussian(1.0, 2.0, rho);
        for d in linspace(0.02, 1.5, 20) {
            t.add(gap_of(src.clone().and_then(|x| vector_rd_bounds(&x, d, 0.7 * d))));
            s.add(gap_of(src.clone().and_then(|x| sum_distortion_rd_bounds(&x, 2.0 * d))));
        }
    }
    out.push(t.finish());
    out.push(s.finish());

    let mut c = Tally::new("tightness/conditional", TOL);
    let mut w = Tally::new("tightness/wyner-ziv", TOL);
    for rho in [0.5, -0.8] {
        let src = BivariateSource::gaussian(1.0, 1.5, rho);
        for d in linspace(0.01, 1.0, 20) {
            c.add(gap_of(src.clone().and_then(|x| conditional_rd_bounds(&x, d))));
            w.add(gap_of(src.clone().and_then(|x| wyner_ziv_rd_bounds(&x, d))));
        }
    }
    out.push(c.finish());
    out.push(w.finish());

    let mut r = Tally::new("tightness/remote", TOL);
    let mut a = Tally::new("tightness/awgn-remote", TOL);
    for noise in [1.0, 0.25] {
        let signal = ScalarSource::gaussian(0.0, 1.0).expect("valid");
        let d0 = noise / (1.0 + noise);
        let reduction = ScalarSource::gaussian(0.0, noise)
            .and_then(|z| AdditiveNoiseModel::new(signal.clone(), z))
            .and_then(|m| posterior_mean_reduction(&m));
        for d in linspace(d0 + 0.01, 1.2, 20) {
            r.add(match &reduction {
                Ok(red) => gap_of(remote_rd_bounds(red, d)),
                Err(e) => Err(e.clone()),
            });
            a.add(gap_of(awgn_remote_bounds(&signal, noise, d)));
        }
    }
    out.push(r.finish());
    out.push(a.finish());

    let mut g = Tally::new("tightness/gray-wyner", TOL);
    for rho in [0.5, -0.5, 0.2] {
        for rp in [0.0, 0.2, 0.5] {
            for d in linspace(0.05, 1.2, 20) {
                g.add(gap_of(
                    BivariateSource::gaussian(1.0, 1.0, rho)
                        .and_then(|s| GrayWynerQuery::new(s, d, rp))
                        .and_then(|q| gray_wyner_bounds(&q)),
                ));
            }
        }
    }
    out.push(g.finish());

    let mut e = Tally::new("tightness/ceo", TOL);
    for agents in [1, 2, 4] {
        for d in linspace(0.55, 1.2, 20) {
            e.add(gap_of(ceo_sum_rate_bounds(&CEOQuery {
                signal: ScalarSource::gaussian(0.0, 1.0).expect("valid"),
                noise_variance: 1.0,
                agents,
                delta: d,
            })));
        }
    }
    out.push(e.finish());
    out
}

/// Numerical oracles against the bound pairs.
pub fn sandwich() -> Result<Vec<Check>> {
    let mut out = Vec::new();
    let fractions = [0.1, 0.3, 0.6, 0.9];
    let corpus = scalar_corpus()?;
    let jobs: Vec<_> = corpus
        .iter()
        .flat_map(|(name, src, k)| fractions.iter().map(move |&f| (*name, src, *k, f)))
        .collect();
    let results: Vec<(&str, f64, Result<f64>)> = jobs
        .par_iter()
        .map(|&(name, src, k, f)| {
            let run = || -> Result<f64> {
                let delta = f * src.variance()?;
                let grid = discretize(src, SANDWICH_GRID, k)?;
                let rate = rd_at_distortion(&grid, delta)?.rate;
                Ok(outside(rate, &classic_rd_bounds(src, delta)?))
            };
            (name, f, run())
        })
        .collect();
    for (name, _, _) in &corpus {
        let mut t = Tally::new(&format!("sandwich/ba-{name}"), SANDWICH_TOLERANCE);
        for (_, _, r) in results.iter().filter(|r| r.0 == *name) {
            t.add(r.clone());
        }
        out.push(t.finish());
    }

    let mut g = Tally::new("sandwich/ba-gaussian-closed-form", SANDWICH_TOLERANCE);
    let gauss = ScalarSource::gaussian(0.0, 1.0)?;
    let grid = discretize(&gauss, SANDWICH_GRID, 8.0)?;
    let deltas = [0.05, 0.1, 0.25, 0.5, 0.75, 0.9];
    let devs: Vec<Result<f64>> = deltas
        .par_iter()
        .map(|&d| Ok((rd_at_distortion(&grid, d)?.rate - 0.5 * (1.0 / d).ln()).abs()))
        .collect();
    devs.into_iter().for_each(|d| g.add(d));
    out.push(g.finish());

    let mut c = Tally::new("sandwich/conditional", NETWORK_TOLERANCE);
    let blobs = BivariateSource::mixture(
        vec![0.5, 0.5],
        vec![
            BivariateComponent { mean: [-1.0, -0.5], covariance: Cov2::new(0.4, 0.1, 0.6) },
            BivariateComponent { mean: [1.0, 0.5], covariance: Cov2::new(0.4, 0.1, 0.6) },
        ],
    )?;
    let cases = [
        (BivariateSource::gaussian(1.0, 1.0, 0.5)?, 0.1),
        (BivariateSource::gaussian(1.0, 1.0, 0.5)?, 0.4),
        (blobs.clone(), 0.05),
        (blobs, 0.2),
    ];
    for (src, d) in &cases {
        c.add((|| {
            let r = conditional_rd_oracle_with(src, *d, CONDITIONAL_CELLS, CONDITIONAL_JOINT)?.rate;
            Ok(outside(r, &conditional_rd_bounds(src, *d)?))
        })());
    }
    out.push(c.finish());

    let mut r = Tally::new("sandwich/remote", NETWORK_TOLERANCE);
    let gauss_model = AdditiveNoiseModel::new(gauss.clone(), gauss.clone())?;
    let uniform_model = AdditiveNoiseModel::new(
        ScalarSource::uniform(-3f64.sqrt(), 3f64.sqrt())?,
        ScalarSource::gaussian(0.0, 0.5)?,
    )?;
    for (model, d) in [(&gauss_model, 0.6), (&gauss_model, 0.75), (&uniform_model, 0.5)] {
        r.add((|| {
            let rate = remote_rd_oracle_with(model, d, REMOTE_ORACLE_GRID, 8.0)?.rate;
            let red = posterior_mean_reduction(model)?;
            Ok(outside(rate, &remote_rd_bounds(&red, d)?))
        })());
    }
    out.push(r.finish());
    Ok(out)
}

/// KL-gap identities and structural reductions.
pub fn identities() -> Result<Vec<Check>> {
    let mut out = Vec::new();
    let mut kl = Tally::new("identities/classic-kl-gap", 1e-6);
    for (name, src, _) in scalar_corpus()? {
        if !matches!(name, "uniform" | "laplace" | "mixture") {
            continue;
        }
        let n = src.entropy_power()?;
        let d_kl = src.kl_to_gaussian()?;
        for d in linspace(0.02 * n, n, 12) {
            kl.add(gap_of(classic_rd_bounds(&src, d)).map(|g| (g - d_kl).abs()));
        }
    }
    out.push(kl.finish());

    let mut gw = Tally::new("identities/gray-wyner-gap", 1e-4);
    let joint = symmetric_gridded_joint()?;
    let cov = joint.covariance();
    let n = joint.joint_entropy_power()?;
    let expected = 0.5 * (cov.det() / (n * n)).ln();
    let sigma2 = cov.s11;
    let low_edge = sigma2 * (1.0 - joint.correlation().abs());
    for frac in linspace(0.05, 0.95, 10) {
        gw.add(
            GrayWynerQuery::new(joint.clone(), frac * low_edge, 0.0)
                .and_then(|q| gap_of(gray_wyner_bounds(&q)))
                .map(|g| (g - expected).abs()),
        );
    }
    out.push(gw.finish());

    let mut ceo = Tally::new("identities/ceo-single-agent", 1e-12);
    for (name, src, _) in scalar_corpus()? {
        if name == "gridded" {
            continue;
        }
        let var = src.variance()?;
        for d in linspace(0.5 * var, 1.2 * var, 8) {
            let single = ceo_sum_rate_bounds(&CEOQuery {
                signal: src.clone(),
                noise_variance: 0.5,
                agents: 1,
                delta: d,
            });
            let awgn = awgn_remote_bounds(&src, 0.5, d);
            ceo.add(match (single, awgn) {
                (Ok(a), Ok(b)) => Ok(pair_distance(&a, &b)),
                (Err(e), _) | (_, Err(e)) => Err(e),
            });
        }
    }
    out.push(ceo.finish());

    let mut ind = Tally::new("identities/independent-side-information", 1e-12);
    for var in [1.0, 3.0] {
        let joint = BivariateSource::gaussian(var, 2.0, 0.0)?;
        let marginal = ScalarSource::gaussian(0.0, var)?;
        for d in linspace(0.05, 1.5 * var, 10) {
            let classic = classic_rd_bounds(&marginal, d)?;
            ind.add(conditional_rd_bounds(&joint, d).map(|b| pair_distance(&b, &classic)));
            ind.add(wyner_ziv_rd_bounds(&joint, d).map(|b| pair_distance(&b, &classic)));
        }
    }
    out.push(ind.finish());

    let mut vec = Tally::new("identities/vector-uncorrelated", 1e-9);
    let joint = BivariateSource::gaussian(1.0, 2.0, 0.0)?;
    let (a, b) = (ScalarSource::gaussian(0.0, 1.0)?, ScalarSource::gaussian(0.0, 2.0)?);
    for d in linspace(0.01, 0.9, 12) {
        vec.add((|| {
            let v = vector_rd_bounds(&joint, d, d)?;
            let (ca, cb) = (classic_rd_bounds(&a, d)?, classic_rd_bounds(&b, d)?);
            Ok((v.lower - ca.lower - cb.lower).abs().max((v.upper - ca.upper - cb.upper).abs()))
        })());
    }
    out.push(vec.finish());

    let mut flip = Tally::new("identities/gray-wyner-sign-flip", 1e-12);
    let sources = [BivariateSource::gaussian(1.0, 1.0, 0.6)?, symmetric_gridded_joint()?];
    for src in &sources {
        let flipped = src.negate_second()?;
        for d in linspace(0.05, 1.0, 10) {
            for rp in [0.0, 0.3] {
                flip.add((|| {
                    let a = gray_wyner_bounds(&GrayWynerQuery::new(src.clone(), d, rp)?)?;
                    let b = gray_wyner_bounds(&GrayWynerQuery::new(flipped.clone(), d, rp)?)?;
                    Ok(pair_distance(&a, &b))
                })());
            }
        }
    }
    out.push(flip.finish());
    Ok(out)
}

fn pair_distance(a: &BoundPair, b: &BoundPair) -> f64 {
    if a.lower_valid != b.lower_valid || a.upper_valid != b.upper_valid {
        return f64::INFINITY;
    }
    let side = |x: f64, y: f64, valid: bool| if valid { (x - y).abs() } else { 0.0 };
    side(a.lower, b.lower, a.lower_valid).max(side(a.upper, b.upper, a.upper_valid))
}

/// Gray-Wyner constructions and Lagrangian, the covariance floor inequality, and
/// the variational certificate.
pub fn constructions() -> Result<Vec<Check>> {
    const TOL: f64 = 1e-9;
    let mut out = Vec::new();

    let mut mmse = Tally::new("constructions/gray-wyner-mmse", TOL);
    let mut rate = Tally::new("constructions/gray-wyner-rate", TOL);
    for rho in [0.3, 0.5, 0.8] {
        for rp in [0.0f64, 0.25] {
            for d in linspace(0.05, 0.95 * (-rp).exp(), 12) {
                let t = d * rp.exp();
                match gw_construction(rho, d, rp) {
                    Ok(c) => {
                        mmse.add(Ok((c.achieved_mmse - t).abs()));
                        rate.add(
                            BivariateSource::gaussian(1.0, 1.0, rho)
                                .and_then(|s| GrayWynerQuery::new(s, d, rp))
                                .and_then(|q| gray_wyner_bounds(&q))
                                .map(|b| (b.upper - c.achieved_common_rate).abs()),
                        );
                    }
                    Err(e) => {
                        mmse.add(Err(e.clone()));
                        rate.add(Err(e));
                    }
                }
            }
        }
    }
    out.push(mmse.finish());
    out.push(rate.finish());

    let mut cont = Tally::new("constructions/gray-wyner-regime-continuity", TOL);
    for rho in [0.2, 0.5, -0.7] {
        let src = BivariateSource::gaussian(2.0, 2.0, rho)?;
        let edge = 2.0 * (1.0 - f64::abs(rho));
        cont.add((|| {
            let below = gray_wyner_bounds(&GrayWynerQuery::new(src.clone(), edge * (1.0 - 1e-13), 0.0)?)?;
            let above = gray_wyner_bounds(&GrayWynerQuery::new(src.clone(), edge * (1.0 + 1e-13), 0.0)?)?;
            Ok(pair_distance(&below, &above))
        })());
    }
    out.push(cont.finish());

    let mut concave = Tally::new("constructions/lagrangian-concavity", 1e-8);
    let mut optimal = Tally::new("constructions/lagrangian-optimum", 1e-8);
    for rho in [0.3, 0.6] {
        for t in linspace(1.0 - rho + 0.02, 0.98, 5) {
            let n2 = 1.0 - rho * rho;
            let nus = linspace(0.5 + 1e-3, 1.0, 400);
            let l: Result<Vec<f64>> = nus.iter().map(|&nu| gw_lagrangian(nu, rho, t, n2)).collect();
            let star = gw_lagrangian(gw_nu_star(rho, t), rho, t, n2);
            match (l, star) {
                (Ok(l), Ok(star)) => {
                    let bend = l.windows(3).map(|w| w[0] - 2.0 * w[1] + w[2]).fold(f64::MIN, f64::max);
                    concave.add(Ok(bend.max(0.0)));
                    let top = l.iter().cloned().fold(f64::MIN, f64::max);
                    optimal.add(Ok((top - star).max(0.0)));
                }
                (Err(e), _) | (_, Err(e)) => {
                    concave.add(Err(e.clone()));
                    optimal.add(Err(e));
                }
            }
        }
    }
    out.push(concave.finish());
    out.push(optimal.finish());

    let mut floor = Tally::new("constructions/covariance-floor-search", 1e-3);
    for rho in [0.3, 0.5, 0.8] {
        for frac in [0.25, 0.5, 1.0] {
            let lambda = frac * rho;
            floor.add((|| {
                let rhs = gw_covariance_floor(lambda, rho)?;
                let searched = gw_covariance_search(rho, lambda, 16)?;
                Ok((rhs - searched).max(0.0))
            })());
        }
    }
    out.push(floor.finish());

    let mut value = Tally::new("constructions/variational-value", TOL);
    // On bounded support the integral falls below 1 wherever the kernel
    // reaches past an edge, so equality is only asked of full-support sources.
    let mut constraint = Tally::new("constructions/variational-constraint", 1e-8);
    let mut feasible = Tally::new("constructions/variational-feasible", 1e-8);
    for (name, src, _) in scalar_corpus()? {
        let n = src.entropy_power()?;
        let (lo, hi) = src.support();
        let full = lo.is_infinite() && hi.is_infinite();
        for d in linspace(0.05 * n, n, 6) {
            match (variational_lower_bound(&src, d, None), classic_rd_bounds(&src, d)) {
                (Ok(v), Ok(b)) => {
                    if name != "gridded" {
                        value.add(Ok((v.value - b.lower).abs()));
                    }
                    if full {
                        let (a, b) = v.constraint_range;
                        constraint.add(Ok((a - 1.0).abs().max((b - 1.0).abs())));
                    }
                    feasible.add(Ok(v.constraint_slack.max(0.0)));
                }
                (Err(e), _) | (_, Err(e)) => {
                    value.add(Err(e.clone()));
                    feasible.add(Err(e));
                }
            }
        }
    }
    out.push(value.finish());
    out.push(constraint.finish());
    out.push(feasible.finish());
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tightness_suite_passes() {
        for c in tightness() {
            assert!(c.passed(), "{c}");
        }
    }

    #[test]
    fn identities_suite_passes() {
        for c in identities().unwrap() {
            assert!(c.passed(), "{c}");
        }
    }

    #[test]
    fn constructions_suite_passes() {
        for c in constructions().unwrap() {
            assert!(c.passed(), "{c}");
        }
    }

    #[test]
    fn poisoned_tally_fails() {
        let mut t = Tally::new("x", 1.0);
        t.add(Ok(0.5));
        t.add(Err(Error::Precondition("no".into())));
        t.add(Ok(0.1));
        assert!(!t.finish().passed());
    }
}
