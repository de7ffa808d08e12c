//! Monte-Carlo energy spectra of quasisolutions.
//!
//! Each realization keeps `(a0, a1, a2)` at the report time, so one ensemble
//! yields `N_s = E|a0 + rho a1 + rho^2 a2|^2` for any `epsilon` with common
//! random numbers.

use std::sync::Arc;

use num_complex::Complex;
use rayon::prelude::*;

use crate::error::{invalid, Result};
use crate::lattice::{LatticeSpec, Profiles};
use crate::ou::{OuNoise, TimeGrid};
use crate::quasi::chain::{rho, ChainStepper};
use crate::scalar::Real;
use crate::stats::{jackknife_mean, jackknife_mean_complex, ComplexEstimate, Estimate};

#[derive(Debug, Clone)]
pub struct SpectrumConfig<T> {
    pub lattice: Arc<LatticeSpec<T>>,
    pub profiles: Profiles<T>,
    pub nu: T,
    /// Horizon `T`; the field starts from zero at `-T`.
    pub horizon: T,
    /// Report time `tau` (rounded up to the grid).
    pub tau: T,
    pub h: T,
    pub n_realizations: usize,
    pub seed: u64,
}

/// `(a0, a1, a2)` at the report time for every realization, realization-major.
#[derive(Debug, Clone)]
pub struct ChaosEnsemble<T> {
    pub lattice: Arc<LatticeSpec<T>>,
    pub nu: T,
    pub tau: T,
    pub grid: TimeGrid<T>,
    samples: Vec<[Complex<T>; 3]>,
}

/// Runs one realization forward and returns its chain values at the end of the grid.
pub fn sample_chain_realization<T: Real>(
    cfg: &SpectrumConfig<T>,
    grid: &TimeGrid<T>,
    realization: u32,
) -> Result<Vec<[Complex<T>; 3]>> {
    let lat = &cfg.lattice;
    let n = lat.len();
    let mut noise = OuNoise::new(lat, &cfg.profiles, grid.step, cfg.seed, realization);
    let mut stepper = ChainStepper::new(lat.clone(), &cfg.profiles, grid.step, cfg.nu)?;
    let zero = Complex::new(T::zero(), T::zero());
    let (mut a0, mut a1, mut a2) = (vec![zero; n], vec![zero; n], vec![zero; n]);
    for k in 0..grid.n_steps {
        stepper.step(grid.time(k), &a0, &mut a1, &mut a2);
        noise.step(&mut a0);
    }
    Ok((0..n).map(|s| [a0[s], a1[s], a2[s]]).collect())
}

pub fn sample_chaos_ensemble<T: Real>(cfg: &SpectrumConfig<T>) -> Result<ChaosEnsemble<T>> {
    if cfg.n_realizations < 2 {
        return Err(invalid("n_realizations", "need at least two realizations"));
    }
    let grid = TimeGrid::new(cfg.horizon, cfg.tau, cfg.h)?;
    crate::quasi::chain::check_step(&cfg.lattice, cfg.nu, grid.step)?;
    let per: Vec<Vec<[Complex<T>; 3]>> = (0..cfg.n_realizations as u32)
        .into_par_iter()
        .map(|r| sample_chain_realization(cfg, &grid, r))
        .collect::<Result<_>>()?;
    Ok(ChaosEnsemble {
        lattice: cfg.lattice.clone(),
        nu: cfg.nu,
        tau: grid.end(),
        grid,
        samples: per.into_iter().flatten().collect(),
    })
}

impl<T: Real> ChaosEnsemble<T> {
    pub fn n_realizations(&self) -> usize {
        self.samples.len() / self.lattice.len()
    }

    /// `(a0, a1, a2)` of site `s` in realization `r`.
    pub fn sample(&self, r: usize, s: usize) -> &[Complex<T>; 3] {
        &self.samples[r * self.lattice.len() + s]
    }

    /// Per-site estimate of `E f(a0, a1, a2)`.
    pub fn moment(&self, f: impl Fn(&[Complex<T>; 3]) -> T) -> Vec<Estimate<T>> {
        let (n, r) = (self.lattice.len(), self.n_realizations());
        (0..n)
            .map(|s| {
                let xs: Vec<T> = (0..r).map(|k| f(self.sample(k, s))).collect();
                jackknife_mean(&xs)
            })
            .collect()
    }

    pub fn complex_moment(
        &self,
        f: impl Fn(&[Complex<T>; 3]) -> Complex<T>,
    ) -> Vec<ComplexEstimate<T>> {
        let (n, r) = (self.lattice.len(), self.n_realizations());
        (0..n)
            .map(|s| {
                let zs: Vec<Complex<T>> = (0..r).map(|k| f(self.sample(k, s))).collect();
                jackknife_mean_complex(&zs)
            })
            .collect()
    }

    /// Energy spectrum of `A = a0 + rho a1 + rho^2 a2` with `rho = (epsilon/nu)^{1/2}`.
    pub fn spectrum(&self, epsilon: T) -> Result<EnergySpectrumEstimate<T>> {
        let r = rho(epsilon, self.nu)?;
        let r2 = r * r;
        let total = self.moment(|a| (a[0] + a[1] * r + a[2] * r2).norm_sqr());
        let two = T::one() + T::one();
        let terms = [
            self.moment(|a| a[0].norm_sqr()),
            self.moment(|a| two * (a[0] * a[1].conj()).re),
            self.moment(|a| a[1].norm_sqr() + two * (a[0] * a[2].conj()).re),
            self.moment(|a| two * (a[1] * a[2].conj()).re),
            self.moment(|a| a[2].norm_sqr()),
        ];
        Ok(EnergySpectrumEstimate {
            lattice: self.lattice.clone(),
            nu: self.nu,
            epsilon,
            rho: r,
            tau: self.tau,
            n_realizations: self.n_realizations(),
            mean: total.iter().map(|e| e.mean).collect(),
            stderr: total.iter().map(|e| e.stderr).collect(),
            terms,
        })
    }
}

/// `N_s(tau) = E|A_s(tau)|^2` with its expansion `N = sum_j rho^j n^j`.
#[derive(Debug, Clone)]
pub struct EnergySpectrumEstimate<T> {
    pub lattice: Arc<LatticeSpec<T>>,
    pub nu: T,
    pub epsilon: T,
    pub rho: T,
    pub tau: T,
    pub n_realizations: usize,
    pub mean: Vec<T>,
    pub stderr: Vec<T>,
    /// `n^0 .. n^4` per site; `n^3`, `n^4` are diagnostics only.
    pub terms: [Vec<Estimate<T>>; 5],
}

/// Samples an ensemble and returns its spectrum at `epsilon`.
pub fn mc_energy_spectrum<T: Real>(
    cfg: &SpectrumConfig<T>,
    epsilon: T,
) -> Result<EnergySpectrumEstimate<T>> {
    sample_chaos_ensemble(cfg)?.spectrum(epsilon)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{DampingProfile, ForcingProfile};
    use crate::ou::sample_ou_realization;
    use crate::quasi::chain::integrate_chain;

    fn config(n: usize) -> SpectrumConfig<f64> {
        SpectrumConfig {
            lattice: Arc::new(LatticeSpec::new(2, 1.0, 1.0).unwrap()),
            profiles: Profiles::new(
                DampingProfile::new(1.0).unwrap(),
                ForcingProfile::gaussian(1.0, 1.0).unwrap(),
            ),
            nu: 0.5,
            horizon: 2.0,
            tau: 0.0,
            h: 0.01,
            n_realizations: n,
            seed: 5,
        }
    }

    #[test]
    fn streaming_matches_stored_path() {
        let cfg = config(2);
        let ens = sample_chaos_ensemble(&cfg).unwrap();
        let path = sample_ou_realization(cfg.lattice.clone(), &cfg.profiles, 2.0, 0.0, 0.01, 5, 1)
            .unwrap();
        let (c1, c2) = integrate_chain(&path, &cfg.profiles, 0.5).unwrap();
        let k = path.grid().n_steps;
        for s in 0..cfg.lattice.len() {
            let a = ens.sample(1, s);
            assert_eq!(a[0], path.states()[k].values()[s]);
            assert_eq!(a[1], c1.states[k].values()[s]);
            assert_eq!(a[2], c2.states[k].values()[s]);
        }
    }

    #[test]
    fn zero_epsilon_gives_ou_variance() {
        let cfg = config(400);
        let spec = mc_energy_spectrum(&cfg, 0.0).unwrap();
        for s in 0..cfg.lattice.len() {
            let x = cfg.lattice.abs_sq(s);
            let g = cfg.profiles.gamma(x);
            let theory = cfg.profiles.big_b(x) * (1.0 - (-2.0 * g * 2.0f64).exp());
            assert!((spec.mean[s] - theory).abs() < 4.0 * spec.stderr[s]);
            assert_eq!(spec.mean[s], spec.terms[0][s].mean);
        }
    }

    #[test]
    fn expansion_terms_recombine() {
        let cfg = config(8);
        let spec = mc_energy_spectrum(&cfg, 0.3).unwrap();
        for s in 0..cfg.lattice.len() {
            let sum: f64 = (0..5)
                .map(|j| spec.rho.powi(j as i32) * spec.terms[j][s].mean)
                .sum();
            assert!((sum - spec.mean[s]).abs() < 1e-12 * spec.mean[s].max(1e-12));
        }
    }
}
