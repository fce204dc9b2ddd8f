//! Truncated Fock space on one leaf of the foliation: creation and
//! annihilation operators, lattice fields and the on-shell reduction.

pub mod lattice;
pub mod onshell;
pub mod space;

pub use lattice::{lattice_field, Lattice};
pub use onshell::{band_measure, convergence_order, on_shell_error, on_shell_reduce};
pub use space::{fock_dimension, fock_space, Config, FockOperator, FockSpace, ModeBasis, ModeFunction, ModeLabel};
