//! Longest common substring and longest palindromic substring by Grover
//! search over circular windows, with an exact sparse simulator for the
//! oracle circuits.

pub mod circuit;
pub mod cli;
pub mod driver;
pub mod error;
pub mod grover;
pub mod operators;
pub mod resources;
pub mod selftest;
pub mod sim;
pub mod strings;

pub use error::{Error, Result};
