//! Desk-scale computations for graphs of groups acting on trees: Bass-Serre
//! ball expansion, coarse-geometry checks on finite hosts, rafts and
//! crossing graphs, Dunwoody-style tracks, quasi-edges, and projective
//! pattern invariants. All arithmetic is exact.

pub mod bassserre;
pub mod cli;
pub mod coarse;
pub mod crossing;
pub mod error;
pub mod fixtures;
pub mod formats;
pub mod gog;
pub mod linalg;
pub mod patterns;
pub mod quasiedges;
pub mod rafts;
pub mod tracks;
pub mod tree;
pub mod unionfind;

pub use error::{Error, Result};
