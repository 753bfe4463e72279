pub mod bekolle_bonami;
pub mod domain;
pub mod error;
pub mod gauss;
pub mod harness;
pub mod ibp;
pub mod kernels;
pub mod operators;
pub mod quadrature;
pub mod region;
pub mod sobolev;
pub mod weights;

pub use error::{Error, Result};
