#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod error;
pub mod fock;
pub mod many_body;
pub mod minkowski;
pub mod sl2c;
pub mod spin_algebra;
pub mod wavepacket;

pub use error::{Error, Result};
