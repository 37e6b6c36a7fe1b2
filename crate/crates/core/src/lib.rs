pub mod base;
pub mod diagnostics;
pub mod error;
pub mod grassmannian;
pub mod inducing;
pub mod o2;
pub mod reducibility;
pub mod scalar;
pub mod skew;
pub mod stats;

pub use error::{Error, Result};
