//! Remote coding of a uniform signal seen through Gaussian noise: the
//! posterior-mean reduction, the noise-only forms, and the BA oracle.

use shannon_bounds::bounds::{
    additive_noise_remote_bounds, awgn_remote_bounds, posterior_mean_reduction, remote_rd_bounds,
};
use shannon_bounds::dist::{AdditiveNoiseModel, ScalarSource};
use shannon_bounds::oracle::remote_rd_oracle_with;

fn main() -> shannon_bounds::Result<()> {
    let signal = ScalarSource::uniform(-3f64.sqrt(), 3f64.sqrt())?;
    let model = AdditiveNoiseModel::new(signal.clone(), ScalarSource::gaussian(0.0, 0.5)?)?;
    let red = posterior_mean_reduction(&model)?;
    println!("estimation error Δ₀ = {:.6} ({:?})", red.delta0(), red.construction());

    for delta in [0.4, 0.5, 0.7] {
        let b = remote_rd_bounds(&red, delta)?;
        let an = additive_noise_remote_bounds(&model, delta)?;
        let awgn = awgn_remote_bounds(&signal, 0.5, delta)?;
        let oracle = remote_rd_oracle_with(&model, delta, 192, 8.0)?.rate;
        println!(
            "Δ={delta}: reduction [{:.5}, {:.5}]  additive-noise lower {:.5}  awgn lower {:.5}  oracle {:.5}",
            b.lower, b.upper, an.lower, awgn.lower, oracle
        );
    }
    Ok(())
}
