//! Numerical laboratory for the stochastic Zakharov-L'vov model of wave turbulence.
//!
//! The model lives on the truncated dual lattice `Z^d_L`. The core provides the
//! Ornstein-Uhlenbeck zeroth-order field, the cubic interaction operator and its
//! chaos expansion, the resonant collision integral and its lattice analogues,
//! a solver for the damped/driven wave kinetic equation, and the combinatorics
//! of interaction trees and Feynman diagrams.
//!
//! Floating-point code is generic over [`Real`]; the aliases at the bottom of
//! this file fix `f64`, which every experiment uses.

pub mod diagrams;
pub mod error;
pub mod kinetic;
pub mod lattice;
pub mod ou;
pub mod quasi;
pub mod rng;
pub mod scalar;
pub mod stats;
pub mod wke;

pub use error::{Error, Result};
pub use lattice::{
    delta_prime, norm_sq, omega, DampingProfile, ForcingKind, ForcingProfile, LatticeSpec,
    Profiles, SpectralField,
};
pub use scalar::Real;

pub use stats::{ComplexEstimate, Estimate};

/// Version of this crate, recorded in run manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub type Lattice = LatticeSpec<f64>;
pub type Field = SpectralField<f64>;
pub type Damping = DampingProfile<f64>;
pub type Forcing = ForcingProfile<f64>;
pub type Profiles64 = Profiles<f64>;
pub type Path = ou::OuPath<f64>;
