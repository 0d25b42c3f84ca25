pub mod commands;
pub mod contexts;
pub mod dasein;
pub mod error;
pub mod kochen;
pub mod linalg;
pub mod presheaf;
pub mod probability;
pub mod scenario;
pub mod truth;

pub use error::{Error, Result};
