//! Duhamel terms `a^(1)`, `a^(2)` of the chaos expansion, integrated as ODEs
//!
//! `d a^(1)/dtau = -gamma a^(1) + i Y(a0, a0, a0; tau/nu)`,
//! `d a^(2)/dtau = -gamma a^(2) + i [Y(a1, a0, a0) + Y(a0, a1, a0) + Y(a0, a0, a1)]`
//!
//! by exponential Euler: the linear part is exact over a step and the forcing is
//! frozen at the left grid point, where the driving path is known exactly.

use std::sync::Arc;

use num_complex::Complex;

use crate::error::{invalid, Error, Result};
use crate::lattice::{LatticeSpec, Profiles, SpectralField};
use crate::ou::{OuPath, TimeGrid};
use crate::quasi::interaction::YOperator;
use crate::scalar::Real;

/// Fraction of `nu / omega_max` allowed as time step.
pub const PHASE_RESOLUTION: f64 = 0.1;

/// Largest step resolving every phase `e^{i omega tau / nu}` on the lattice.
pub fn max_step<T: Real>(lattice: &LatticeSpec<T>, nu: T) -> T {
    T::of(PHASE_RESOLUTION) * nu / lattice.omega_max()
}

pub(crate) fn check_step<T: Real>(lattice: &LatticeSpec<T>, nu: T, step: T) -> Result<()> {
    if !(nu.is_finite() && nu > T::zero()) {
        return Err(invalid("nu", format!("must be > 0, got {nu}")));
    }
    let required = max_step(lattice, nu);
    // grid steps are derived by division and may exceed h by rounding
    if step > required * T::of(1.0 + 1e-9) {
        return Err(Error::StepTooLarge {
            step: step.to_f64_lossy(),
            required: required.to_f64_lossy(),
        });
    }
    Ok(())
}

/// `a^(n)` on the grid of the driving path.
#[derive(Debug, Clone)]
pub struct ChaosPath<T> {
    pub order: usize,
    pub grid: TimeGrid<T>,
    pub states: Vec<SpectralField<T>>,
}

impl<T: Real> ChaosPath<T> {
    pub fn state_at(&self, tau: T) -> Result<&SpectralField<T>> {
        Ok(&self.states[self.grid.index_of(tau)?])
    }
}

/// One exponential-Euler step of both chain orders, reusable across realizations.
pub struct ChainStepper<T: Real> {
    op: YOperator<T>,
    decay: Vec<T>,
    /// `(1 - e^{-gamma h}) / gamma`
    gain: Vec<T>,
    nu: T,
    y1: Vec<Complex<T>>,
    y2: Vec<Complex<T>>,
}

impl<T: Real> ChainStepper<T> {
    pub fn new(
        lattice: Arc<LatticeSpec<T>>,
        profiles: &Profiles<T>,
        step: T,
        nu: T,
    ) -> Result<Self> {
        check_step(&lattice, nu, step)?;
        let (decay, gain) = linear_factors(&lattice, profiles, step);
        let n = lattice.len();
        Ok(Self {
            op: YOperator::new(lattice),
            decay,
            gain,
            nu,
            y1: vec![Complex::new(T::zero(), T::zero()); n],
            y2: vec![Complex::new(T::zero(), T::zero()); n],
        })
    }

    /// Advances `(a1, a2)` from `tau` to `tau + h` given `a0(tau)`.
    pub fn step(
        &mut self,
        tau: T,
        a0: &[Complex<T>],
        a1: &mut [Complex<T>],
        a2: &mut [Complex<T>],
    ) {
        self.op
            .chain_forcing(a0, a1, tau / self.nu, &mut self.y1, &mut self.y2);
        let i = Complex::new(T::zero(), T::one());
        for s in 0..a1.len() {
            a1[s] = a1[s] * self.decay[s] + i * self.y1[s] * self.gain[s];
            a2[s] = a2[s] * self.decay[s] + i * self.y2[s] * self.gain[s];
        }
    }
}

pub(crate) fn linear_factors<T: Real>(
    lattice: &LatticeSpec<T>,
    profiles: &Profiles<T>,
    step: T,
) -> (Vec<T>, Vec<T>) {
    (0..lattice.len())
        .map(|s| {
            let g = profiles.gamma(lattice.abs_sq(s));
            let em1 = (-g * step).exp_m1();
            (em1 + T::one(), -em1 / g)
        })
        .unzip()
}

/// Integrates `a^(1)` and `a^(2)` along a stored OU path, both from zero at `-T`.
pub fn integrate_chain<T: Real>(
    ou: &OuPath<T>,
    profiles: &Profiles<T>,
    nu: T,
) -> Result<(ChaosPath<T>, ChaosPath<T>)> {
    let lattice = ou.lattice().clone();
    let grid = *ou.grid();
    let mut stepper = ChainStepper::new(lattice.clone(), profiles, grid.step, nu)?;
    let mut a1 = SpectralField::zeros(lattice.clone());
    let mut a2 = SpectralField::zeros(lattice);
    let mut p1 = Vec::with_capacity(grid.n_steps + 1);
    let mut p2 = Vec::with_capacity(grid.n_steps + 1);
    p1.push(a1.clone());
    p2.push(a2.clone());
    for (k, a0) in ou.states()[..grid.n_steps].iter().enumerate() {
        stepper.step(grid.time(k), a0.values(), a1.values_mut(), a2.values_mut());
        p1.push(a1.clone());
        p2.push(a2.clone());
    }
    Ok((
        ChaosPath {
            order: 1,
            grid,
            states: p1,
        },
        ChaosPath {
            order: 2,
            grid,
            states: p2,
        },
    ))
}

/// `rho = (epsilon / nu)^{1/2}`.
pub fn rho<T: Real>(epsilon: T, nu: T) -> Result<T> {
    if !(epsilon.is_finite() && epsilon >= T::zero() && epsilon <= T::one()) {
        return Err(invalid(
            "epsilon",
            format!("must lie in [0, 1], got {epsilon}"),
        ));
    }
    if !(nu.is_finite() && nu > T::zero() && nu <= T::of(0.5)) {
        return Err(invalid("nu", format!("must lie in (0, 1/2], got {nu}")));
    }
    Ok((epsilon / nu).sqrt())
}

/// `A = a0 + rho a1 + rho^2 a2`.
pub fn assemble_quasisolution<T: Real>(
    a0: &SpectralField<T>,
    a1: &SpectralField<T>,
    a2: &SpectralField<T>,
    epsilon: T,
    nu: T,
) -> Result<SpectralField<T>> {
    if epsilon <= T::zero() {
        return Err(invalid("epsilon", format!("must be > 0, got {epsilon}")));
    }
    let r = rho(epsilon, nu)?;
    a0.check_same(a1)?;
    a0.check_same(a2)?;
    let values = a0
        .values()
        .iter()
        .zip(a1.values())
        .zip(a2.values())
        .map(|((&x, &y), &z)| x + y * r + z * (r * r))
        .collect();
    SpectralField::from_values(a0.lattice().clone(), values)
}
