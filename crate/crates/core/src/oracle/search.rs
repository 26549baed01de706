//! Brute-force searches over 2×2 covariance-like matrices.

use crate::dist::Cov2;
use crate::error::{Error, Result};

/// Default points per axis.
pub const SEARCH_GRID: usize = 64;
/// Zoom rounds stop once the box is this narrow (in unit coordinates).
const ZOOM_WIDTH: f64 = 1e-12;

/// Maximizes `f` over the unit square by a full grid that includes the
/// edges, then repeatedly re-grids a box of half the previous width around
/// the best point. Infeasible points return `NEG_INFINITY`. With one point
/// per axis only the centre is evaluated.
fn zoom_max(n: usize, f: impl Fn([f64; 2]) -> f64) -> ([f64; 2], f64) {
    let mut lo = [0.0; 2];
    let mut hi = [1.0; 2];
    let mut best = ([0.5; 2], f64::NEG_INFINITY);
    loop {
        let at = |k: usize, i: usize| {
            if n == 1 {
                0.5 * (lo[k] + hi[k])
            } else {
                lo[k] + (hi[k] - lo[k]) * i as f64 / (n - 1) as f64
            }
        };
        for i in 0..n {
            for j in 0..n {
                let u = [at(0, i), at(1, j)];
                let v = f(u);
                if v > best.1 {
                    best = (u, v);
                }
            }
        }
        if n < 3 || (0..2).all(|k| hi[k] - lo[k] <= ZOOM_WIDTH) || !best.1.is_finite() {
            return best;
        }
        // Halve the box around the incumbent, shifted to stay in the square.
        for k in 0..2 {
            let half = 0.25 * (hi[k] - lo[k]);
            let centre = best.0[k].clamp(half, 1.0 - half);
            lo[k] = centre - half;
            hi[k] = centre + half;
        }
    }
}

/// The matrix `[[a, c], [c, b]]` with `0 ≼ · ≼ K` whose off-diagonal `c`
/// is closest to zero, if any `c` is feasible. Both searched objectives
/// increase with `ab - c²` at fixed diagonal, so this `c` is optimal.
fn best_offdiag(k: Cov2, a: f64, b: f64) -> Option<Cov2> {
    let inner = (a * b).sqrt();
    let r = ((k.s11 - a) * (k.s22 - b)).max(0.0).sqrt();
    let lo = (-inner).max(k.s12 - r);
    let hi = inner.min(k.s12 + r);
    (lo <= hi && a <= k.s11 && b <= k.s22).then(|| Cov2::new(a, 0f64.clamp(lo, hi), b))
}

/// Largest `det D` over `0 ≼ D ≼ Σ` with `D_ii ≤ Δ_i`, by exhaustive
/// gridding of the diagonal with zoom refinement.
pub fn d_matrix_search(sigma: Cov2, delta1: f64, delta2: f64, grid_n: usize) -> Result<(f64, Cov2)> {
    if !(sigma.s11 > 0.0 && sigma.s22 > 0.0 && sigma.det() > 0.0) {
        return Err(Error::Precondition("covariance must be full rank".into()));
    }
    if !(delta1 > 0.0 && delta2 > 0.0) || grid_n == 0 {
        return Err(Error::InvalidParameter("distortions and grid size must be positive".into()));
    }
    let (cap1, cap2) = (delta1.min(sigma.s11), delta2.min(sigma.s22));
    let point = |u: [f64; 2]| best_offdiag(sigma, u[0] * cap1, u[1] * cap2);
    let (u, det) = zoom_max(grid_n, |u| point(u).map_or(f64::NEG_INFINITY, |d| d.det()));
    let d = point(u).ok_or_else(|| Error::numerical("d_matrix_search", "no feasible point"))?;
    Ok((det, d))
}

/// Grid minimum of `h(X') + h(Y') - (1+λ) h(X', Y')` over Gaussian
/// `(X', Y')` with `0 ≼ K' ≼ [[1, ρ], [ρ, 1]]`, in nats.
pub fn gw_covariance_search(rho: f64, lambda: f64, grid_n: usize) -> Result<f64> {
    if !(lambda > 0.0 && lambda <= rho && rho < 1.0) {
        return Err(Error::Precondition(format!(
            "needs 0 < lambda <= rho < 1 (got lambda = {lambda}, rho = {rho})"
        )));
    }
    if grid_n == 0 {
        return Err(Error::InvalidParameter("grid size must be positive".into()));
    }
    let k = Cov2::new(1.0, rho, 1.0);
    let ln2pie = (2.0 * std::f64::consts::PI * std::f64::consts::E).ln();
    let objective = |kp: Cov2| {
        let det = kp.det();
        if !(det > 0.0) {
            return f64::INFINITY;
        }
        let hx = 0.5 * (ln2pie + kp.s11.ln());
        let hy = 0.5 * (ln2pie + kp.s22.ln());
        let hxy = ln2pie + 0.5 * det.ln();
        hx + hy - (1.0 + lambda) * hxy
    };
    // Unit coordinates scaled so that a single point is K itself.
    let point = |u: [f64; 2]| {
        let (a, b) = (2.0 * u[0], 2.0 * u[1]);
        if a > 1.0 || b > 1.0 {
            return None;
        }
        best_offdiag(k, a, b)
    };
    let n = if grid_n == 1 { 1 } else { 2 * grid_n };
    let (_, v) = zoom_max(n, |u| point(u).map_or(f64::NEG_INFINITY, |kp| -objective(kp)));
    Ok(-v)
}
