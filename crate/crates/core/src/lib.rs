pub mod cli;
pub mod domain;
pub mod error;
pub mod framecore;
pub mod multiplication;
pub mod pointset;
pub mod translates;

pub use error::{Error, Result};
