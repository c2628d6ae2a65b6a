//! Exact classical Casimir energies and forces between spheres and between a
//! sphere and a plane, for Dirichlet and Drude boundary conditions.
//!
//! All energies are reported in units of `k_B T` and forces in units of
//! `k_B T / R1`, where `R1` is the radius of the (first) sphere.

// Negated comparisons below double as NaN rejection.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod energies;
pub mod expansions;
pub mod geometry;
pub mod numeric;
pub mod oracle;
pub mod verify;

pub use energies::{
    beta, casimir_energy, casimir_force, casimir_force_fd, dirichlet_energy, drude_energy,
    pfa_energy, EnergyOptions, EnergyResult, ForceMethod, ForceResult, Model,
};
pub use geometry::{BisphericalParams, Configuration};

/// Boltzmann constant in J/K (exact SI value).
pub const BOLTZMANN: f64 = 1.380649e-23;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("series did not converge: bound {achieved:e} after {terms} terms")]
    Convergence { achieved: f64, terms: usize },
    #[error("numerical instability: {0}")]
    Instability(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("internal consistency check failed: {0}")]
    Consistency(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
