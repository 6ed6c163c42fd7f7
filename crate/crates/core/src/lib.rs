//! Cache-aided multiuser private information retrieval over GF(2).
//!
//! Several users with private caches fetch one message each from `N`
//! replicated databases over a shared broadcast link, so that no single
//! database learns anything about the demand vector.

pub mod audit;
pub mod bounds;
pub mod catalog;
pub mod cia;
pub mod cli;
pub mod compose;
pub mod distinct;
pub mod error;
pub mod gf2;
pub mod product;
pub mod randomness;
pub mod rational;
pub mod sjpir;
pub mod system;
pub mod verify;

pub use error::{Error, Result};
