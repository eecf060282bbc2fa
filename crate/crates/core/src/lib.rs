#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod curve;
pub mod error;
pub mod functionals;
pub mod geometry;
pub mod integrator;
pub mod io;
pub mod profile;
pub mod quadrature;
pub mod shooting;
pub mod verify;

pub use error::{Error, Result};
