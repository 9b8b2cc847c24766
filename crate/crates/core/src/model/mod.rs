//! Potentials, initial states and run configuration.

mod config;
mod potential;
mod wavefunction;

pub use config::{
    BathSection, GridSection, InchwormSection, OutputSection, PotentialKind, PotentialSection,
    Psi0Kind, Psi0Section, SimConfig, TimeSection,
};
pub(crate) use config::whole_steps;
pub use potential::Potential;
pub use wavefunction::{two_peak_normalization, GaussianMixture, GaussianTerm, InitialState};

use crate::bath::BathSpec;

/// The potential felt by beam centers once the bath counter-term
/// `sum_j c_j^2 / (2 w_j^2) x^2` is folded in.
pub fn effective_potential(v: &Potential, bath: &BathSpec) -> Potential {
    v.with_quadratic_shift(bath.counterterm())
}
