pub mod action;
pub mod dsl;
pub mod error;
pub mod field;
pub mod gallery;
pub mod json;
pub mod ga_slice;
pub mod localize;
pub mod pipeline;
pub mod poly;
pub mod random;
pub mod torus_slice;
pub mod verify;

pub use error::{Error, Result};
