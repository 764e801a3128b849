//! Exact homotopy transfer of curved L∞ structures along filtered contractions.

pub mod calculus;
pub mod cli;
pub mod context;
pub mod error;
pub mod fixtures;
pub mod interchange;
pub mod linalg;
pub mod linmap;
pub mod scalar;
pub mod selftest;
pub mod space;
pub mod structure;
pub mod symop;
pub mod transfer;

pub use error::{Error, Result};
pub use scalar::Q;
