//! Independent numerical oracles for the bounds.

mod ba;
mod conditional;
mod remote;
mod search;

pub use ba::{
    blahut_arimoto, blahut_arimoto_capped, blahut_arimoto_rd, discretize, rd_at_distortion, rd_at_distortion_with,
    rd_for_matrix, zero_rate_distortion, BASolution, DiscretizedSource, DistortionMatrix,
    Reconstruction, DISTORTION_TOLERANCE, GAP_TOLERANCE, MAX_ITERATIONS, RATE_TOLERANCE, TRUNCATION_LIMIT,
};
pub use conditional::{conditional_rd_oracle, conditional_rd_oracle_with, ConditionalSolution, JOINT_GRID, MIN_CELLS};
pub use remote::{remote_rd_oracle, remote_rd_oracle_with, RemoteGrid, REMOTE_GRID};
pub use search::{d_matrix_search, gw_covariance_search, SEARCH_GRID};
