//! Deterministic acceptance-rejection sampling driven by Sobol digital nets.
//!
//! The crate is organised bottom-up:
//!
//! - [`nets`] builds base-2 Sobol nets and sequences from Joe–Kuo direction
//!   numbers and audits their quality parameter `t` by exhaustive
//!   elementary-interval counting.
//! - [`densities`] holds the target/proposal abstractions and the three
//!   reference models used by the experiments.
//! - [`transforms`] is the inverse Rosenblatt map from the unit cube onto the
//!   region under a proposal density.
//! - [`samplers`] implements random, deterministic (cube and real space) and
//!   reduced acceptance-rejection.
//! - [`discrepancy`] measures samples against their target: exact 1-D star
//!   discrepancy, grid (δ-cover) estimates in higher dimension, isotropic
//!   lower estimates and log-log rate fits.
//!
//! Everything here is `no_std` with `alloc`. File IO, CSV output and the
//! command line live in the companion `detar` crate.
//!
//! ```
//! use detar_core::densities::example1_density;
//! use detar_core::nets::DirectionNumberTable;
//! use detar_core::samplers::dar_cube;
//!
//! let table = DirectionNumberTable::bundled();
//! let density = example1_density();
//! let samples = dar_cube(&density, 512, &table).unwrap();
//! assert!(samples.len() >= 460);
//! ```
#![no_std]
#![warn(missing_debug_implementations)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod densities;
pub mod discrepancy;
mod error;
pub mod nets;
mod points;
pub mod quadrature;
pub mod samplers;
pub mod transforms;

pub use error::{Error, Result};
pub use points::PointSet;
