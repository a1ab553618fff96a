#![allow(dead_code)]

pub mod lbptop;
pub mod metrics;
pub mod tos;
