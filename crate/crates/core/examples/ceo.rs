//! Sum-rate bounds of the AWGN CEO problem as agents are added.

use shannon_bounds::bounds::CEOStats;
use shannon_bounds::dist::ScalarSource;

fn main() -> shannon_bounds::Result<()> {
    let laplace = ScalarSource::laplace(0.0, 1.0)?;
    for agents in [1, 2, 4, 8] {
        let stats = CEOStats::new(&laplace, 1.0, agents)?;
        let b = stats.bounds(1.0)?;
        println!(
            "M={agents}: valid above {:.4} / {:.4}, sum rate at Δ=1 in [{:.5}, {:.5}]",
            b.lower_threshold.unwrap_or(f64::NAN),
            b.upper_threshold.unwrap_or(f64::NAN),
            b.lower,
            b.upper
        );
    }
    Ok(())
}
