pub mod algebraic;
pub mod cli;
pub mod complex;
pub mod error;
pub mod interval;
pub mod kfib;
pub mod matveev;
pub mod poly;
pub mod properties;
pub mod reduction;
pub mod search;

pub use error::{Error, Result};
