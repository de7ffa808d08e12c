//! The resonant quadric, the collision integral and its lattice and
//! Lorentzian relatives.

pub mod collision;
pub mod density;
pub mod lattice_sum;
pub mod lorentz;
pub mod quadrature;

pub use collision::{bracket, i0_integral, kinetic_integral};
pub use density::SpectralDensity;
pub use lattice_sum::j_lattice_sum;
pub use lorentz::{i_integral, lorentz_integrand, McParams};
pub use quadrature::QuadricQuadrature;
