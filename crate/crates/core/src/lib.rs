pub mod adaptation;
pub mod basis;
pub mod dg;
pub mod driver;
pub mod error;
mod linalg;
pub mod mesh;
pub mod physics;
pub mod shock_capturing;
pub mod tensor;
pub mod time_integration;

pub use error::{Error, Result};
