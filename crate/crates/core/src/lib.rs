//! Exact counting of fixed-rank integral matrices over number fields.

pub mod counting;
pub mod error;
pub mod grassmann;
pub mod harness;
pub mod hecke;
pub mod matrix;
pub mod lattice;
pub mod numfield;
pub mod poly;

pub use error::{Error, Result};
