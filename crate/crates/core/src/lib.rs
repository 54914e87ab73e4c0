//! Robust composite pulse sequences for parallel single-qubit control.

pub mod analysis;
pub mod cli;
pub mod error;
pub mod jet;
pub mod numsearch;
pub mod parallel;
pub mod robust;
pub mod sequences;
pub mod solve;
pub mod su2;
pub mod tables;

pub use error::{Error, Result};
