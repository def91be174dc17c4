//! Discrete Darboux and Crum transformations for second-order difference
//! operators `H = -Δ² + V(n)`, with exact rational verification.

pub mod cli;
pub mod crum;
pub mod darboux;
pub mod error;
pub mod expr;
pub mod io;
pub mod operators;
pub mod reproduce;
pub mod scalar;
pub mod seq;
pub mod solvers;
pub mod verify;

pub use crum::{CasoratianTable, Chain};
pub use darboux::{DarbouxStep, Seed};
pub use error::{Error, Result};
pub use expr::Expr;
pub use operators::{Hamiltonian, LadderOp, LadderSign, Residual, ResidualReport, DEFAULT_FLOAT_TOL};
pub use scalar::{rational, Backend, Rational, Scalar};
pub use seq::{Seq, Window};
