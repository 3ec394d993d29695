//! Simulation of four-pulse Ramsey-Borde matter-wave interferometers with a modified
//! energy dispersion E(p) = p^2/2m + xi1 m c |p| / 2M_p + xi2 p^2 / 2M_p.
//!
//! The crate evaluates closed-pair phases, enumerates all interferometer paths, averages
//! their interference over a thermal initial state and derives metrology bounds and
//! noise visibilities. All quantities are SI unless a name says otherwise.

pub mod analysis;
pub mod bounds;
pub mod constants;
pub mod dispersion;
pub mod error;
pub mod model;
pub mod noise;
pub mod numerics;
pub mod paths;
pub mod phase;
pub mod stability;
pub mod thermal;

/// Cartesian vector in SI units.
pub type Vec3 = nalgebra::Vector3<f64>;

pub use constants::{PhysicalConstants, HBAR};
pub use dispersion::{Dispersion, DispersionParams, EnergyTerms};
pub use error::{Result, SimError};
pub use model::{
    DimensionlessGroups, Detuning, EnvironmentSpec, GasSpec, LaserSpec, ParticleKind, ParticleSpec, RecoilSpec,
    TimingSpec,
};
pub use paths::{Internal, Path, PathPair, PathUnitary, PhaseContext, Xi1Model};
pub use phase::{ClosedPair, MomentumSchedule, PhaseResult};
pub use thermal::{ElementOptions, InterferenceElement, ThermalState};
