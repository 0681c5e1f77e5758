//! Normalization of Artin-Schreier-Witt equations of degree p and p² over
//! equal-characteristic complete discrete valuation rings, degeneration types,
//! vanishing-cycle genera and degeneration-data trees.

pub mod error;
pub mod ffseries;
pub mod cli;
pub mod degen_tree;
pub mod genus;
pub mod torsor_p;
pub mod torsor_p2;
pub mod witt;

pub use error::{Error, Result};
