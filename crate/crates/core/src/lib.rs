pub mod causality;
pub mod cone;
pub mod criterion;
pub mod error;
pub mod interval;
pub mod punctured;
pub mod report;
pub mod surface;

pub use error::{Error, Result};
