//! Matrices over rings, over the chain rings O/π^m and over residue fields.

mod chain;
pub mod fq;
mod matrix;

pub use chain::{ChainRing, RowSpan, SmithForm};
pub use matrix::{Matrix, Ring};
