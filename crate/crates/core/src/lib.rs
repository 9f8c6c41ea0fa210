pub mod analysis;
pub mod cli;
pub mod ddouble;
pub mod error;
pub mod linalg;
pub mod precond;
pub mod probgen;
pub mod scalar;
pub mod solver;

pub use error::{Error, Result};
