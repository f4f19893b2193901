//! Exact p-adic computations for congruences of families of Galois
//! representations.

pub mod cli;
pub mod domain;
pub mod error;
pub mod family;
pub mod galois;
pub mod group;
pub mod lattice;
pub mod linalg;
pub mod series;
pub mod spec;
pub mod padic;
pub mod pseudorep;
pub mod report;

pub use error::{Error, Result};
