//! Identical particles sharing one `n`: spin coupling, (anti)symmetrized
//! tensor products and the rotation/exchange comparison.

pub mod cg;
pub mod coupling;
pub mod half;
pub mod spin;
pub mod state;

pub use cg::{cg_half, cg_table, clebsch_gordan, coupled_values, CgRow};
pub use coupling::{couple_spins, reachable_totals, CoupledState, CouplingScheme, SpinState};
pub use half::HalfInt;
pub use spin::{foliated_generator, foliated_rotation_matrix, foliated_triad, spin_generators, CMat};
pub use state::{
    exchange_pair, exchange_phase_check, foliated_rotation, inner_product, product, symmetrize, ExchangeCheck,
    NBodyState, Normalization, OneBodyBasis, OneParticleState, Statistics,
};
