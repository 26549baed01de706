//! The default variational certificate, and a deliberately infeasible one.

use std::sync::Arc;

use shannon_bounds::bounds::{variational_lower_bound, Certificate, Lambda};
use shannon_bounds::dist::ScalarSource;

fn main() -> shannon_bounds::Result<()> {
    let src = ScalarSource::laplace(0.0, 1.0)?;
    let c = variational_lower_bound(&src, 0.5, None)?;
    println!(
        "default: s = {}, value = {:.6}, constraint in [{:.12}, {:.12}]",
        c.s, c.value, c.constraint_range.0, c.constraint_range.1
    );

    let s = -1.0;
    let k = (-s / std::f64::consts::PI).sqrt();
    let p = src.clone();
    let lambda = Lambda::Custom(Arc::new(move |x| 1.05 * k / p.pdf(x)));
    match variational_lower_bound(&src, 0.5, Some(Certificate { s, lambda })) {
        Ok(c) => println!("scaled: accepted with value {:.6}", c.value),
        Err(e) => println!("scaled: {e}"),
    }
    Ok(())
}
