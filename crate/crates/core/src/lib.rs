pub mod base_rings;
pub mod breuil;
pub mod error;
pub mod kappa;
pub mod lifting;
pub mod linear;
pub mod matrix;
pub mod ring;
pub mod windows;
pub mod witt;

pub use error::{Error, Result};
pub mod frames;
pub mod report;
pub mod acceptance;
pub mod oracles;
