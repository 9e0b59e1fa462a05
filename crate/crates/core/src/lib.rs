pub mod bryant;
pub mod contact;
pub mod error;
pub mod exterior;
pub mod flags;
pub mod format;
pub mod poly;
pub mod sample;

pub use error::{PflError, Result};
