//! Full truncated system `da + gamma a dtau = i rho Y(a; tau/nu) dtau + b d beta`
//! and its energy balance.
//!
//! The scheme is exponential Euler-Maruyama: the OU part is advanced exactly
//! with the same noise streams as [`crate::ou`], and the nonlinearity is frozen at
//! the left grid point. With `rho = 0` the trajectory reproduces the OU path.
//!
//! Itô's formula gives `d E|a_s|^2 = (-2 gamma_s E|a_s|^2 + 2 b_s^2) dtau`, and
//! the nonlinear term drops out because `Re <a, i Y(a)> = 0`. Hence
//! `E||u(tau)||^2 + 2 int_0^tau E D = E||u(0)||^2 + 2 B tau` with the dissipation
//! `D = L^{-d} sum gamma_s |a_s|^2` and `B = L^{-d} sum b_s^2`.

use std::sync::Arc;

use num_complex::Complex;
use rayon::prelude::*;

use crate::error::{invalid, Error, Result};
use crate::lattice::{LatticeSpec, Profiles, SpectralField};
use crate::ou::{OuNoise, TimeGrid};
use crate::quasi::chain::{check_step, linear_factors, rho};
use crate::quasi::interaction::YOperator;
use crate::scalar::Real;
use crate::stats::{jackknife_mean, Estimate};

/// Blow-up threshold factor applied to `B` times the run length.
pub const BLOW_UP_FACTOR: f64 = 1e6;

#[derive(Debug, Clone)]
pub struct SdeConfig<T> {
    pub lattice: Arc<LatticeSpec<T>>,
    pub profiles: Profiles<T>,
    pub nu: T,
    pub epsilon: T,
    pub horizon: T,
    /// Times `tau > 0` at which the balance is reported (rounded to the grid).
    pub report_times: Vec<T>,
    pub h: T,
    pub n_realizations: usize,
    pub seed: u64,
}

/// Balance terms at one report time, averaged over the ensemble.
#[derive(Debug, Clone, Copy)]
pub struct BalanceRow<T> {
    pub tau: T,
    /// `E||u(tau)||^2 + 2 E int_0^tau D`
    pub lhs: Estimate<T>,
    /// `E||u(0)||^2 + 2 B tau`
    pub rhs: Estimate<T>,
    pub energy: Estimate<T>,
    /// `(lhs - rhs) / E rhs`, estimated per realization.
    pub relative_residual: Estimate<T>,
}

#[derive(Debug, Clone)]
pub struct BalanceReport<T> {
    pub injection_rate: T,
    pub rho: T,
    pub rows: Vec<BalanceRow<T>>,
}

impl<T: Real> BalanceReport<T> {
    /// Every relative residual within `k` standard errors of zero.
    pub fn within(&self, k: T) -> bool {
        self.rows
            .iter()
            .all(|r| r.relative_residual.mean.abs() <= k * r.relative_residual.stderr)
    }
}

struct Trace<T> {
    final_state: Vec<Complex<T>>,
    /// `(||u(tau)||^2, int_0^tau D)` at each report index
    rows: Vec<(T, T)>,
    energy0: T,
}

fn run_realization<T: Real>(
    cfg: &SdeConfig<T>,
    grid: &TimeGrid<T>,
    report_idx: &[usize],
    r: T,
    realization: u32,
) -> Result<Trace<T>> {
    let lat = &cfg.lattice;
    let n = lat.len();
    let vol = lat.cell_volume();
    let gamma: Vec<T> = (0..n).map(|s| cfg.profiles.gamma(lat.abs_sq(s))).collect();
    let (decay, gain) = linear_factors(lat, &cfg.profiles, grid.step);
    let mut noise = OuNoise::new(lat, &cfg.profiles, grid.step, cfg.seed, realization);
    let mut op = YOperator::new(lat.clone());
    let zero = Complex::new(T::zero(), T::zero());
    let (mut a, mut y, mut z) = (vec![zero; n], vec![zero; n], vec![zero; n]);
    let guard =
        T::of(BLOW_UP_FACTOR) * cfg.profiles.injection_rate(lat) * (grid.end() + grid.horizon);
    let dissipation = |a: &[Complex<T>]| {
        a.iter()
            .zip(&gamma)
            .map(|(v, &g)| g * v.norm_sqr())
            .sum::<T>()
            * vol
    };
    let energy = |a: &[Complex<T>]| a.iter().map(|v| v.norm_sqr()).sum::<T>() * vol;
    let k0 = grid.index_of(T::zero())?;
    let half = T::of(0.5) * grid.step;
    let mut integral = T::zero();
    let mut prev_d = T::zero();
    let mut energy0 = T::zero();
    let mut rows = Vec::with_capacity(report_idx.len());
    let mut next = 0;
    let i_rho = Complex::new(T::zero(), r);
    for k in 0..=grid.n_steps {
        if k >= k0 {
            let d = dissipation(&a);
            if k == k0 {
                energy0 = energy(&a);
            } else {
                integral += half * (prev_d + d);
            }
            prev_d = d;
            while next < report_idx.len() && report_idx[next] == k {
                rows.push((energy(&a), integral));
                next += 1;
            }
        }
        if k == grid.n_steps {
            break;
        }
        if r != T::zero() {
            op.apply_raw(&a, &a, &a, grid.time(k) / cfg.nu, &mut y);
        }
        noise.fill(&mut z);
        for s in 0..n {
            a[s] = a[s] * decay[s] + i_rho * y[s] * gain[s] + z[s];
        }
        let e = energy(&a);
        if !e.is_finite() || e > guard {
            return Err(Error::BlowUp {
                time: grid.time(k + 1).to_f64_lossy(),
                norm_sq: e.to_f64_lossy(),
                guard: guard.to_f64_lossy(),
            });
        }
    }
    Ok(Trace {
        final_state: a,
        rows,
        energy0,
    })
}

/// Integrates the ensemble and returns the final states with the balance report.
pub fn full_sde_integrate<T: Real>(
    cfg: &SdeConfig<T>,
) -> Result<(Vec<SpectralField<T>>, BalanceReport<T>)> {
    if cfg.n_realizations < 2 {
        return Err(invalid("n_realizations", "need at least two realizations"));
    }
    if cfg.report_times.is_empty() || cfg.report_times.iter().any(|&t| !(t > T::zero())) {
        return Err(invalid("report_times", "need at least one report time > 0"));
    }
    let r = rho(cfg.epsilon, cfg.nu)?;
    let tau_end = cfg.report_times.iter().copied().fold(T::zero(), T::max);
    let grid = TimeGrid::new(cfg.horizon, tau_end, cfg.h)?;
    check_step(&cfg.lattice, cfg.nu, grid.step)?;
    let mut report_idx = Vec::with_capacity(cfg.report_times.len());
    for &t in &cfg.report_times {
        let x = (t + grid.horizon) / grid.step - T::of(1e-9);
        report_idx.push(x.ceil().to_usize().unwrap_or(0).min(grid.n_steps));
    }
    let mut sorted = report_idx;
    sorted.sort_unstable();
    let traces: Vec<Trace<T>> = (0..cfg.n_realizations as u32)
        .into_par_iter()
        .map(|k| run_realization(cfg, &grid, &sorted, r, k))
        .collect::<Result<_>>()?;
    let b = cfg.profiles.injection_rate(&cfg.lattice);
    let two = T::one() + T::one();
    let rows = (0..sorted.len())
        .map(|j| {
            let tau = grid.time(sorted[j]);
            let lhs: Vec<T> = traces
                .iter()
                .map(|t| t.rows[j].0 + two * t.rows[j].1)
                .collect();
            let rhs: Vec<T> = traces.iter().map(|t| t.energy0 + two * b * tau).collect();
            let energy: Vec<T> = traces.iter().map(|t| t.rows[j].0).collect();
            let rhs_est = jackknife_mean(&rhs);
            let rel: Vec<T> = lhs
                .iter()
                .zip(&rhs)
                .map(|(&l, &q)| (l - q) / rhs_est.mean)
                .collect();
            BalanceRow {
                tau,
                lhs: jackknife_mean(&lhs),
                rhs: rhs_est,
                energy: jackknife_mean(&energy),
                relative_residual: jackknife_mean(&rel),
            }
        })
        .collect();
    let finals = traces
        .into_iter()
        .map(|t| SpectralField::from_values(cfg.lattice.clone(), t.final_state))
        .collect::<Result<_>>()?;
    Ok((
        finals,
        BalanceReport {
            injection_rate: b,
            rho: r,
            rows,
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{DampingProfile, ForcingProfile};
    use crate::ou::sample_ou_realization;

    fn config(epsilon: f64, n: usize) -> SdeConfig<f64> {
        SdeConfig {
            lattice: Arc::new(LatticeSpec::new(2, 1.0, 1.0).unwrap()),
            profiles: Profiles::new(
                DampingProfile::new(1.0).unwrap(),
                ForcingProfile::gaussian(1.0, 1.0).unwrap(),
            ),
            nu: 0.5,
            epsilon,
            horizon: 3.0,
            report_times: vec![0.5, 1.0],
            h: 0.01,
            n_realizations: n,
            seed: 11,
        }
    }

    #[test]
    fn linear_case_reproduces_ou_path() {
        let cfg = config(0.0, 2);
        let (finals, _) = full_sde_integrate(&cfg).unwrap();
        let p = sample_ou_realization(cfg.lattice.clone(), &cfg.profiles, 3.0, 1.0, 0.01, 11, 1)
            .unwrap();
        assert_eq!(finals[1].values(), p.states().last().unwrap().values());
    }

    #[test]
    fn linear_stationary_energy() {
        let cfg = config(0.0, 1000);
        let (_, rep) = full_sde_integrate(&cfg).unwrap();
        let lat = &cfg.lattice;
        let expect: f64 = (0..lat.len())
            .map(|s| {
                let x = lat.abs_sq(s);
                let g = cfg.profiles.gamma(x);
                cfg.profiles.big_b(x) * (1.0 - (-2.0 * g * 4.0f64).exp())
            })
            .sum();
        let row = rep.rows.last().unwrap();
        assert!((row.energy.mean - expect).abs() < 3.5 * row.energy.stderr);
        assert!(rep.within(3.5));
    }

    #[test]
    fn nonlinear_balance_holds() {
        let (_, rep) = full_sde_integrate(&config(0.4, 300)).unwrap();
        assert!(rep.rho > 0.0);
        assert!(rep.within(3.5), "{:?}", rep.rows);
    }

    #[test]
    fn rejects_bad_reports() {
        let mut cfg = config(0.1, 4);
        cfg.report_times = vec![-0.5];
        assert!(full_sde_integrate(&cfg).is_err());
        cfg.report_times = vec![0.5];
        cfg.h = 0.5;
        assert!(matches!(
            full_sde_integrate(&cfg),
            Err(Error::StepTooLarge { .. })
        ));
    }
}
