//! Shannon lower/upper bound pairs for quadratic rate-distortion problems.

pub mod bounds;
pub mod cli;
pub mod dist;
pub mod error;
pub mod oracle;
pub mod quad;
pub mod validate;

pub use error::{Error, Result};
