//! Potential meridional vector fields in four dimensions built from
//! quaternionic function theory.

pub mod cli;
pub mod dynsys;
pub mod error;
pub mod fields;
pub mod holomorphic;
pub mod quaternion;
pub mod spectral;
pub mod specfun;
pub mod transforms;

pub use error::{Error, Result};
pub use quaternion::Quaternion;
