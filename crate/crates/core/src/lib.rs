#![no_std]
extern crate alloc;

pub mod dist;
pub mod error;
pub mod forecast;
pub mod hypothesis;
pub mod linalg;
pub mod ols;
pub mod series;
pub mod stationarity;
pub mod var;
