//! Rescaled needle-domain energies E_ε, their thin-needle limits E₀ and the limit minimizers.
//!
//! Modules are layered bottom-up: [`domain`] and [`specfun`] feed the energy evaluators
//! [`energy_eps`] and [`limit_energy`], which feed [`limit_solvers`] and [`asymptotics`].

pub mod asymptotics;
pub mod config;
pub mod domain;
pub mod energy_eps;
pub mod error;
pub mod limit_energy;
pub mod limit_solvers;
pub mod quad;
pub mod spectral;
pub mod specfun;

pub use domain::{
    AxisymShape, EnergyBreakdown, GammaConvention, LimitSolution, ModelParams, PaperValues,
    Profile1D, QuadratureMeta, Signal1D,
};
pub use error::{Error, Result};
