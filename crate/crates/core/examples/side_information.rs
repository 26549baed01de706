//! Conditional and Wyner-Ziv bounds for a correlated pair, with the
//! second coordinate as side information.

use shannon_bounds::bounds::{conditional_rd_bounds, wyner_ziv_rd_bounds};
use shannon_bounds::dist::{BivariateComponent, BivariateSource, Cov2};

fn main() -> shannon_bounds::Result<()> {
    let gauss = BivariateSource::gaussian(1.0, 1.0, 0.5)?;
    let c = Cov2::new(0.4, 0.1, 0.6);
    let blobs = BivariateSource::mixture(
        vec![0.5, 0.5],
        vec![
            BivariateComponent { mean: [-1.0, -0.5], covariance: c },
            BivariateComponent { mean: [1.0, 0.5], covariance: c },
        ],
    )?;
    for (name, src) in [("gaussian", gauss), ("two blobs", blobs)] {
        for delta in [0.05, 0.2] {
            let cond = conditional_rd_bounds(&src, delta)?;
            let wz = wyner_ziv_rd_bounds(&src, delta)?;
            println!(
                "{name} Δ={delta}: conditional [{:.5}, {:.5}]  wyner-ziv [{:.5}, {:.5}]",
                cond.lower, cond.upper, wz.lower, wz.upper
            );
        }
    }
    Ok(())
}
