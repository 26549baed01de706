//! Two-component sources: per-coordinate distortions through the optimal
//! distortion matrix, and a total budget through reverse water-filling.

use shannon_bounds::bounds::{
    optimal_distortion_matrix, sum_distortion_rd_bounds, vector_rd_bounds, water_filling_rate,
};
use shannon_bounds::dist::{BivariateSource, Cov2};

fn main() -> shannon_bounds::Result<()> {
    let src = BivariateSource::gaussian(1.0, 1.0, 0.5)?;
    for (d1, d2) in [(0.1, 0.1), (0.3, 0.05), (0.6, 0.6)] {
        let d = optimal_distortion_matrix(src.covariance(), d1, d2)?;
        let b = vector_rd_bounds(&src, d1, d2)?;
        println!("D = [[{:.4}, {:.4}], [{:.4}, {:.4}]]  R = {:.6}", d.s11, d.s12, d.s12, d.s22, b.upper);
    }

    let sigma = Cov2::new(1.0, 0.0, 4.0);
    println!("water-filling, variances 1 and 4, total 1: {:.6}", water_filling_rate(sigma, 1.0));
    let pair = BivariateSource::gaussian(1.0, 4.0, 0.0)?;
    let b = sum_distortion_rd_bounds(&pair, 1.0)?;
    println!("sum-distortion bounds: [{:.6}, {:.6}]", b.lower, b.upper);
    Ok(())
}
