//! Conditional rate-distortion with the side information at both ends.
//!
//! The second coordinate `W` is cut into cells of roughly equal
//! probability; each cell is a separate scalar problem for `X`. The
//! distortion budget is shared by running every cell at a common slope.

use rayon::prelude::*;

use super::ba::{blahut_arimoto, search_slope, zero_rate_distortion, DistortionMatrix, SlopeHit};
use crate::dist::BivariateSource;
use crate::error::{Error, Result};
use crate::quad::trapezoid_weights;

/// Raster size per axis for non-gridded joints.
pub const JOINT_GRID: usize = 256;
pub const MIN_CELLS: usize = 8;

/// One cell of the side information: its probability and the conditional
/// pmf of `X` on a trimmed grid.
struct Cell {
    weight: f64,
    pmf: Vec<f64>,
    d: DistortionMatrix,
    dmax: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConditionalSolution {
    pub rate: f64,
    pub distortion_achieved: f64,
    /// Common slope of the cells (interpolated when two slopes are shared).
    pub slope: f64,
    /// Cells that carry probability.
    pub cells: usize,
    pub converged: bool,
}

fn cells(source: &BivariateSource, w_cells: usize, joint_n: usize) -> Result<Vec<Cell>> {
    let grid = source.to_grid(joint_n)?;
    let (x, w) = (grid.x(), grid.y());
    let (wx, ww) = (trapezoid_weights(x), trapezoid_weights(w));
    let mass = |i: usize, j: usize| wx[i] * ww[j] * grid.at(i, j);
    let column: Vec<f64> = (0..w.len()).map(|j| (0..x.len()).map(|i| mass(i, j)).sum()).collect();
    let total: f64 = column.iter().sum();

    let mut out = Vec::new();
    let mut start = 0;
    let mut cum = 0.0;
    let mut next = 1;
    for j in 0..w.len() {
        cum += column[j] / total;
        let last = j + 1 == w.len();
        if !(last || cum >= next as f64 / w_cells as f64) {
            continue;
        }
        while next < w_cells && cum >= next as f64 / w_cells as f64 {
            next += 1;
        }
        let cols = start..j + 1;
        start = j + 1;
        let pmf: Vec<f64> = (0..x.len()).map(|i| cols.clone().map(|c| mass(i, c)).sum()).collect();
        let weight: f64 = pmf.iter().sum();
        if !(weight > 0.0) {
            continue;
        }
        let lo = pmf.iter().position(|&p| p > 0.0).unwrap_or(0);
        let hi = pmf.iter().rposition(|&p| p > 0.0).unwrap_or(0);
        let points = x[lo..=hi].to_vec();
        let pmf: Vec<f64> = pmf[lo..=hi].iter().map(|p| p / weight).collect();
        let d = DistortionMatrix::squared_error(&points, &points);
        let dmax = zero_rate_distortion(&pmf, &d);
        out.push(Cell {
            weight: weight / total,
            pmf,
            d,
            dmax,
        });
    }
    Ok(out)
}

/// `R_{X|W}(Δ)` in nats for the joint `(X, W)` with the default raster.
pub fn conditional_rd_oracle(source: &BivariateSource, delta: f64, w_cells: usize) -> Result<f64> {
    conditional_rd_oracle_with(source, delta, w_cells, JOINT_GRID).map(|s| s.rate)
}

pub fn conditional_rd_oracle_with(
    source: &BivariateSource,
    delta: f64,
    w_cells: usize,
    joint_n: usize,
) -> Result<ConditionalSolution> {
    if !(delta > 0.0) {
        return Err(Error::InvalidParameter(format!("distortion must be positive (got {delta})")));
    }
    if w_cells < MIN_CELLS {
        return Err(Error::InvalidParameter(format!(
            "need at least {MIN_CELLS} side-information cells (got {w_cells})"
        )));
    }
    let cells = cells(source, w_cells, joint_n)?;
    let dmax: f64 = cells.iter().map(|c| c.weight * c.dmax).sum();
    if delta >= dmax {
        return Ok(ConditionalSolution {
            rate: 0.0,
            distortion_achieved: dmax,
            slope: 0.0,
            cells: cells.len(),
            converged: true,
        });
    }

    #[derive(Clone)]
    struct Point {
        rate: f64,
        dist: f64,
        slope: f64,
        converged: bool,
    }
    let mut warm: Vec<Option<Vec<f64>>> = vec![None; cells.len()];
    let hit = search_slope(
        delta,
        |slope| {
            let sols: Vec<_> = cells
                .par_iter()
                .zip(warm.par_iter())
                .map(|(c, w)| blahut_arimoto(&c.pmf, &c.d, slope, w.as_deref()))
                .collect::<Result<_>>()?;
            let mut p = Point {
                rate: 0.0,
                dist: 0.0,
                slope,
                converged: true,
            };
            for ((c, s), w) in cells.iter().zip(sols).zip(warm.iter_mut()) {
                p.rate += c.weight * s.rate;
                p.dist += c.weight * s.distortion_achieved;
                p.converged &= s.converged;
                *w = Some(s.output);
            }
            Ok(p)
        },
        |p: &Point| p.dist,
    )?;
    let p = match hit {
        SlopeHit::Exact(p) => p,
        SlopeHit::Shared { weight: t, a, b } => Point {
            rate: t * a.rate + (1.0 - t) * b.rate,
            dist: delta,
            slope: t * a.slope + (1.0 - t) * b.slope,
            converged: a.converged && b.converged,
        },
    };
    Ok(ConditionalSolution {
        rate: p.rate,
        distortion_achieved: p.dist,
        slope: p.slope,
        cells: cells.len(),
        converged: p.converged,
    })
}
