//! Rigid-body attitude control with an axis–angle formulation of the error.
//!
//! The crate covers quaternion and rotation algebra ([`so3`]), rigid-body
//! dynamics ([`dynamics`]), three attitude control laws ([`controllers`]),
//! predictive selection of the rotation direction ([`mps`]) and a fixed-step
//! closed-loop simulator with its metrics ([`sim`]).
//!
//! Builds without `std`; only `alloc` is needed for trajectory logs.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod controllers;
pub mod dynamics;
pub mod linalg;
pub mod mps;
pub mod sim;
pub mod so3;

/// Crate version, recorded in run metadata.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
