pub mod error;
pub mod harvestctl;
pub mod matrix_elements;
pub mod negativity;
pub mod oracle;
pub mod protocol;
pub mod specfun;
pub mod states;

pub use error::{Error, Result};
