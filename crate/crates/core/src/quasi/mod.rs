//! Chaos expansion of the stochastic model: the interaction operator, the
//! Duhamel chain, Monte-Carlo spectra of quasisolutions and the full SDE.

pub mod chain;
pub mod interaction;
pub mod sde;
pub mod spectrum;

pub use chain::{assemble_quasisolution, integrate_chain, max_step, rho, ChainStepper, ChaosPath};
pub use interaction::{y_operator, y_operator_bruteforce, YOperator};
pub use sde::{full_sde_integrate, BalanceReport, BalanceRow, SdeConfig};
pub use spectrum::{
    mc_energy_spectrum, sample_chaos_ensemble, ChaosEnsemble, EnergySpectrumEstimate,
    SpectrumConfig,
};
