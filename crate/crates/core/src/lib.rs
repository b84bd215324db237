pub mod assembly;
pub mod error;
pub mod fem;
pub mod harness;
pub mod io;
pub mod linsolve;
pub mod mesh;
pub mod scheme;

pub use error::{Error, Result};
