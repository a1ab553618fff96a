pub mod config;
pub mod descriptors;
pub mod error;
pub mod harness;
pub mod learning;
pub mod pipeline;
pub mod regions;
pub mod rng;
pub mod synthetic;
pub mod tos;
pub mod video;

pub use error::{Error, Result};
