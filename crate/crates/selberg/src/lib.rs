pub mod cli;
pub mod clt;
pub mod error;
pub mod esseen1d;
pub mod esseen_multi;
pub mod interpolation;
pub mod kernels;
pub mod quad;
pub mod rng;
pub mod special;
pub mod verify;

pub use error::{Error, Result};
