//! Executable machinery for countable shuffle linear orders.

pub mod check;
pub mod cli;
pub mod csb;
pub mod error;
pub mod order;
pub mod skolem;
pub mod trees;

pub use error::{Error, Result};
