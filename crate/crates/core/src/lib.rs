pub mod cf;
pub mod config;
pub mod conv;
pub mod ergodicity;
pub mod error;
pub mod forbidden;
pub mod frame;
pub mod hamiltonian;
pub mod quad;
pub mod report;
pub mod stability;
pub mod word;
pub mod zeta;

pub use error::{Error, Result};
