//! Iterated finite Blaschke products `f` with `f(0) = 0`, series
//! `F = sum a_n f^n` and the norm functionals used to test them.

pub mod blaschke;
pub mod coefficients;
pub mod config;
pub mod disc;
pub mod dynamics;
pub mod emit;
pub mod error;
pub mod grid;
pub mod norms;
pub mod series;
pub mod tolerances;
pub mod verify;

pub use blaschke::{named_test_function, FiniteBlaschkeProduct};
pub use error::{Error, Result};
