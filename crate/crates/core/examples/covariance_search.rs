//! Brute-force searches over 2×2 covariances next to their closed forms.

use shannon_bounds::bounds::{gw_covariance_floor, optimal_distortion_matrix};
use shannon_bounds::dist::Cov2;
use shannon_bounds::oracle::{d_matrix_search, gw_covariance_search};

fn main() -> shannon_bounds::Result<()> {
    let sigma = Cov2::from_correlation(1.0, 2.0, 0.6);
    for (d1, d2) in [(0.1, 0.1), (0.5, 0.2), (0.9, 1.5)] {
        let (det, _) = d_matrix_search(sigma, d1, d2, 32)?;
        let closed = optimal_distortion_matrix(sigma, d1, d2)?;
        println!("Δ=({d1}, {d2}): search det {det:.9}, closed det {:.9}", closed.det());
    }
    for (rho, lambda) in [(0.5, 0.25), (0.5, 0.5), (0.8, 0.4)] {
        let searched = gw_covariance_search(rho, lambda, 16)?;
        println!(
            "ρ={rho} λ={lambda}: search {searched:.6} ≥ closed form {:.6}",
            gw_covariance_floor(lambda, rho)?
        );
    }
    Ok(())
}
