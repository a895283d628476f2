//! Information-theoretically secure channels from pre-distributed secret bits.

pub mod adversary;
pub mod amplify;
pub mod error;
pub mod gf2;
pub mod multipath;
pub mod predistribution;
pub mod rates;
pub mod secure_check;
pub mod seed;

pub use error::{Error, Result};
