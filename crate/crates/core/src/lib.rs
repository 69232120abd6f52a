pub mod dispersion;
pub mod error;
pub mod grid;
pub mod hom;
pub mod lens;
pub mod oracle;
pub mod source;

pub use error::{Error, Result};
