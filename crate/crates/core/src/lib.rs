// `!(x > 0.0)` is used on purpose so NaN fails validation
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod asymptotics;
pub mod dynamics;
pub mod error;
pub mod export;
pub mod measures;
pub mod oscquad;
pub mod series;
pub mod spectral;
pub mod verify;

pub use error::{Error, Result};
