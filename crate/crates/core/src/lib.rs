//! Post-quantum signatures from graph k-colorability.
//!
//! The public key is a random graph with a planted ("quiet") k-coloring; the
//! secret key is that coloring. Signing runs `t` rounds of the GMW
//! zero-knowledge proof of colorability, made non-interactive with
//! Fiat–Shamir, optionally compressing each round's vertex commitments under
//! a Merkle root. The [`attacks`] module holds the key-recovery harness.

pub mod attacks;
pub mod challenge;
pub mod commitment;
pub mod encoding;
pub mod error;
pub mod graph;
pub mod io;
pub mod merkle;
pub mod par;
pub mod protocol;
pub mod sig;

pub use error::{Error, Result};
pub use graph::{Coloring, Edge, Graph, PartitionSpec};
pub use par::Execution;
