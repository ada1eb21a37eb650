//! Lindblad dynamics with detailed-balance rates on the eigenmodes.

mod integrate;
mod liouvillian;
mod populations;
mod rates;

pub use integrate::{evolve, Diagnostics, Engine, Evolution, StepControl};
pub use liouvillian::{liouvillian_apply, ModeLiouvillian};
pub use populations::{
    antiparallel_probability, classical_populations_evolve, gibbs_state, mode_occupations, populations,
    single_particle_probability, stationary_state,
};
pub use rates::{RateModel, RatePreset, Temperature};

#[cfg(test)]
mod tests;
