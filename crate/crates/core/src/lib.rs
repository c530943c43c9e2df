pub mod branch;
pub mod count;
pub mod error;
pub mod model;
pub mod oracle;
pub mod semiring;
pub mod simplify;
pub mod toolkit;

pub use error::{Error, Result};
