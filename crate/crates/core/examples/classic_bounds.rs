//! Shannon bounds for a few scalar sources, and the gap against the
//! KL divergence to the matched Gaussian.

use shannon_bounds::bounds::classic_rd_bounds;
use shannon_bounds::dist::ScalarSource;

fn main() -> shannon_bounds::Result<()> {
    let sources = [
        ("gaussian", ScalarSource::gaussian(0.0, 1.0)?),
        ("uniform", ScalarSource::uniform(0.0, 1.0)?),
        ("laplace", ScalarSource::laplace(0.0, 1.0)?),
        ("mixture", ScalarSource::gaussian_mixture(vec![0.5, 0.5], vec![-1.0, 1.0], vec![0.25, 0.25])?),
    ];
    for (name, src) in &sources {
        let b = classic_rd_bounds(src, 0.01)?;
        println!(
            "{name:>9}: N = {:.6}, lower = {:.6}, upper = {:.6}, gap = {:.6}, KL = {:.6}",
            src.entropy_power()?,
            b.lower,
            b.upper,
            b.upper - b.lower,
            src.kl_to_gaussian()?
        );
    }
    Ok(())
}
