//! Conditional rate-distortion by per-cell Blahut-Arimoto at a shared slope.

use shannon_bounds::bounds::conditional_rd_bounds;
use shannon_bounds::dist::BivariateSource;
use shannon_bounds::oracle::conditional_rd_oracle_with;

fn main() -> shannon_bounds::Result<()> {
    let src = BivariateSource::gaussian(1.0, 1.0, 0.5)?;
    let delta = 0.25;
    let b = conditional_rd_bounds(&src, delta)?;
    for cells in [8, 16, 32] {
        let sol = conditional_rd_oracle_with(&src, delta, cells, 128)?;
        println!(
            "{cells:>2} cells: R = {:.6} (closed form {:.6}), slope {:.4}",
            sol.rate, b.upper, sol.slope
        );
    }
    Ok(())
}
