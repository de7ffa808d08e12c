//! The damped/driven wave kinetic equation `dm/dtau = -2 gamma m + 2 b^2 + eps K(m)`
//! on a radial grid.
//!
//! Time stepping is exponential time differencing of first order,
//! `m <- e^{-2 gamma dt} m + (1 - e^{-2 gamma dt}) / (2 gamma) (2 b^2 + eps K(m))`,
//! which is exact when `eps = 0` and leaves every steady state fixed.

use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{invalid, Error, Result};
use crate::kinetic::collision::kinetic_integral;
use crate::kinetic::quadrature::QuadricQuadrature;
use crate::lattice::Profiles;
use crate::scalar::Real;
use crate::wke::grid::{RadialGrid, RadialInterpolant};

/// Default upper bound on `eps`.
pub const EPSILON_CAP: f64 = 0.5;

/// Damping of the steady-state fixed point.
pub const THETA: f64 = 0.5;

#[derive(Debug, Clone)]
pub struct WkeProblem<T> {
    pub profiles: Profiles<T>,
    pub epsilon: T,
    pub epsilon_cap: T,
    pub grid: Arc<RadialGrid<T>>,
    pub quad: QuadricQuadrature<T>,
}

/// `m(tau)` at the grid radii.
#[derive(Debug, Clone)]
pub struct WkeState<T> {
    pub tau: T,
    pub grid: Arc<RadialGrid<T>>,
    pub values: Vec<T>,
}

impl<T: Real> WkeState<T> {
    pub fn interpolant(&self) -> Result<RadialInterpolant<T>> {
        RadialInterpolant::new(self.grid.clone(), self.values.clone())
    }
}

impl<T: Real> WkeProblem<T> {
    pub fn new(
        profiles: Profiles<T>,
        epsilon: T,
        grid: Arc<RadialGrid<T>>,
        quad: QuadricQuadrature<T>,
    ) -> Result<Self> {
        let p = Self {
            profiles,
            epsilon,
            epsilon_cap: T::of(EPSILON_CAP),
            grid,
            quad,
        };
        p.validate()?;
        Ok(p)
    }

    fn validate(&self) -> Result<()> {
        if !(self.epsilon >= T::zero() && self.epsilon <= self.epsilon_cap) {
            return Err(invalid(
                "epsilon",
                format!(
                    "must lie in [0, {}], got {}",
                    self.epsilon_cap, self.epsilon
                ),
            ));
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.quad.dim()
    }

    fn point(&self, r: T) -> Vec<T> {
        let mut p = vec![T::zero(); self.dim()];
        p[0] = r;
        p
    }

    pub fn gamma(&self) -> Vec<T> {
        self.grid
            .radii()
            .iter()
            .map(|&r| self.profiles.gamma(r * r))
            .collect()
    }

    /// `2 b^2` at the radii.
    pub fn source(&self) -> Vec<T> {
        self.grid
            .radii()
            .iter()
            .map(|&r| {
                let b = self.profiles.b(r * r);
                b * b + b * b
            })
            .collect()
    }

    /// `m^0 = b^2 / gamma`.
    pub fn linear_steady_state(&self) -> Vec<T> {
        self.grid
            .radii()
            .iter()
            .map(|&r| self.profiles.big_b(r * r))
            .collect()
    }

    /// `sup 2 b^2`, the unit in which residuals are measured.
    pub fn residual_scale(&self) -> T {
        self.source().into_iter().fold(T::zero(), T::max)
    }

    /// `K(m)` at every radius, with `m` extended radially by its interpolant.
    pub fn collision(&self, values: &[T]) -> Result<Vec<T>> {
        let it = RadialInterpolant::new(self.grid.clone(), values.to_vec())?;
        self.grid
            .radii()
            .par_iter()
            .map(|&r| kinetic_integral(&it, &self.point(r), &self.quad))
            .collect()
    }

    /// `-2 gamma m + 2 b^2 + eps K(m)`.
    pub fn rhs(&self, values: &[T]) -> Result<Vec<T>> {
        let k = if self.epsilon == T::zero() {
            vec![T::zero(); values.len()]
        } else {
            self.collision(values)?
        };
        let g = self.gamma();
        let src = self.source();
        Ok((0..values.len())
            .map(|j| -(g[j] + g[j]) * values[j] + src[j] + self.epsilon * k[j])
            .collect())
    }
}

/// Solution sampled at the requested report times.
#[derive(Debug, Clone)]
pub struct WkeTrajectory<T> {
    pub dt: T,
    pub states: Vec<WkeState<T>>,
}

/// Integrates from `m(-T) = 0`; report times are rounded up to the step grid.
pub fn wke_solve<T: Real>(
    problem: &WkeProblem<T>,
    horizon: T,
    report_times: &[T],
    dt: T,
) -> Result<WkeTrajectory<T>> {
    problem.validate()?;
    if !(dt.is_finite() && dt > T::zero()) {
        return Err(invalid("dt", format!("must be > 0, got {dt}")));
    }
    if !(horizon.is_finite() && horizon > T::zero()) {
        return Err(invalid("T", format!("must be > 0, got {horizon}")));
    }
    if report_times
        .iter()
        .any(|&t| !(t >= -horizon && t.is_finite()))
    {
        return Err(invalid(
            "report_times",
            "report times must be finite and >= -T",
        ));
    }
    let mut idx: Vec<usize> = report_times
        .iter()
        .map(|&t| {
            ((t + horizon) / dt - T::of(1e-9))
                .ceil()
                .max(T::zero())
                .to_usize()
                .unwrap_or(0)
        })
        .collect();
    idx.sort_unstable();
    let n = problem.grid.len();
    let g = problem.gamma();
    let src = problem.source();
    let decay: Vec<T> = g.iter().map(|&g| (-(g + g) * dt).exp()).collect();
    let gain: Vec<T> = g
        .iter()
        .map(|&g| -(-(g + g) * dt).exp_m1() / (g + g))
        .collect();
    let floor = -T::of(1e-8)
        * problem
            .linear_steady_state()
            .into_iter()
            .fold(T::zero(), T::max);
    let mut m = vec![T::zero(); n];
    let mut states = Vec::with_capacity(idx.len());
    let mut next = 0;
    let last = idx.last().copied().unwrap_or(0);
    let time = |k: usize| -horizon + T::of_usize(k) * dt;
    for k in 0..=last {
        while next < idx.len() && idx[next] == k {
            states.push(WkeState {
                tau: time(k),
                grid: problem.grid.clone(),
                values: m.clone(),
            });
            next += 1;
        }
        if k == last {
            break;
        }
        let kin = if problem.epsilon == T::zero() {
            None
        } else {
            Some(problem.collision(&m)?)
        };
        for j in 0..n {
            let force = src[j] + kin.as_ref().map_or(T::zero(), |k| problem.epsilon * k[j]);
            m[j] = decay[j] * m[j] + gain[j] * force;
        }
        if m.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("kinetic equation state"));
        }
        if let Some(j) = (0..n).find(|&j| m[j] < floor) {
            return Err(Error::NegativeDensity {
                value: m[j].to_f64_lossy(),
                radius: problem.grid.radii()[j].to_f64_lossy(),
                time: time(k + 1).to_f64_lossy(),
            });
        }
    }
    Ok(WkeTrajectory { dt, states })
}

#[derive(Debug, Clone)]
pub struct SteadyState<T> {
    pub state: WkeState<T>,
    /// Sup-norm residual before each update; the last entry meets the tolerance.
    pub residuals: Vec<T>,
}

/// Damped fixed point `m <- (1 - theta) m + theta (2 b^2 + eps K(m)) / (2 gamma)` from `m^0`.
pub fn steady_state<T: Real>(
    problem: &WkeProblem<T>,
    tol: T,
    max_iter: usize,
) -> Result<SteadyState<T>> {
    problem.validate()?;
    if !(tol > T::zero()) {
        return Err(invalid("tol", format!("must be > 0, got {tol}")));
    }
    let theta = T::of(THETA);
    let g = problem.gamma();
    let src = problem.source();
    let mut m = problem.linear_steady_state();
    let mut residuals = Vec::new();
    for _ in 0..=max_iter {
        let kin = if problem.epsilon == T::zero() {
            vec![T::zero(); m.len()]
        } else {
            problem.collision(&m)?
        };
        let res = (0..m.len())
            .map(|j| (-(g[j] + g[j]) * m[j] + src[j] + problem.epsilon * kin[j]).abs())
            .fold(T::zero(), T::max);
        residuals.push(res);
        if !res.is_finite() {
            break;
        }
        if res <= tol {
            return Ok(SteadyState {
                state: WkeState {
                    tau: T::infinity(),
                    grid: problem.grid.clone(),
                    values: m,
                },
                residuals,
            });
        }
        for j in 0..m.len() {
            let target = (src[j] + problem.epsilon * kin[j]) / (g[j] + g[j]);
            m[j] = (T::one() - theta) * m[j] + theta * target;
        }
    }
    Err(Error::NoConvergence {
        iterations: residuals.len(),
        residuals: residuals.iter().map(|r| r.to_f64_lossy()).collect(),
    })
}
