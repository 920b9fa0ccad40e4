//! Volterra-Hamilton production models of coral/alga symbiosis: stage
//! dynamics, competition classification, intrinsic-time geometry, a
//! conserved production-cost functional and KCC invariants.

#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod conservation;
pub mod dynamics;
pub mod error;
pub mod integrator;
pub mod kcc;
pub mod model;
pub mod production;
mod util;

pub use error::{Error, Result};
