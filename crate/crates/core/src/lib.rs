pub mod bounds;
pub mod circuit;
pub mod error;
pub mod exact;
pub mod forge;
pub mod gale;
pub mod io;
pub mod oracle;
pub mod report;

pub use error::{Error, Result};
