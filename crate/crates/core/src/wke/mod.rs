//! Wave kinetic equation on a radial grid and comparison with Monte-Carlo spectra.

pub mod compare;
pub mod grid;
pub mod solver;

pub use compare::{compare_spectra, SeminormReport, SeminormRow};
pub use grid::{RadialGrid, RadialInterpolant};
pub use solver::{steady_state, wke_solve, SteadyState, WkeProblem, WkeState, WkeTrajectory};
