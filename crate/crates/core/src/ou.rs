//! Zeroth-order Gaussian field: one Ornstein-Uhlenbeck process per mode.
//!
//! `a_s(tau) = b_s int_{-T}^{tau} e^{-gamma_s (tau - l)} d beta_s(l)` is sampled
//! exactly on a uniform grid: `a(tau + h) = e^{-gamma h} a(tau) + zeta` with
//! `E|zeta|^2 = (b^2 / gamma)(1 - e^{-2 gamma h})`. The complex Wiener process
//! has `E|d beta|^2 = 2 dt`, which makes the stationary variance `b^2 / gamma`.

use std::sync::Arc;

use num_complex::Complex;
use rand_chacha::ChaCha8Rng;

use crate::error::{invalid, Error, Result};
use crate::lattice::{LatticeSpec, Profiles, SpectralField};
use crate::rng;
use crate::scalar::Real;
use crate::stats::{jackknife_mean_complex, ComplexEstimate};

/// Uniform grid `tau_k = -T + k h`, `k = 0..=n_steps`, with `tau = 0` on the grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid<T> {
    pub horizon: T,
    pub step: T,
    pub n_steps: usize,
}

impl<T: Real> TimeGrid<T> {
    /// The step is shrunk to divide `T` exactly; `tau_end` is rounded up to the grid.
    pub fn new(horizon: T, tau_end: T, h: T) -> Result<Self> {
        if !(horizon.is_finite() && tau_end.is_finite() && h.is_finite()) {
            return Err(Error::NonFinite("time grid"));
        }
        if horizon <= T::zero() {
            return Err(invalid("T", format!("horizon must be > 0, got {horizon}")));
        }
        if h <= T::zero() {
            return Err(invalid("h", format!("step must be > 0, got {h}")));
        }
        if tau_end <= -horizon {
            return Err(invalid("tau_end", format!("must exceed -T = {}", -horizon)));
        }
        let per_horizon = (horizon / h - T::of(1e-9)).ceil().max(T::one());
        let step = horizon / per_horizon;
        let n_steps = ((tau_end + horizon) / step - T::of(1e-9))
            .ceil()
            .to_usize()
            .ok_or_else(|| invalid("h", "too many steps"))?;
        Ok(Self {
            horizon,
            step,
            n_steps,
        })
    }

    pub fn time(&self, k: usize) -> T {
        -self.horizon + T::of_usize(k) * self.step
    }

    pub fn end(&self) -> T {
        self.time(self.n_steps)
    }

    /// Index of a grid time, tolerating rounding of order `1e-9 h`.
    pub fn index_of(&self, tau: T) -> Result<usize> {
        let x = (tau + self.horizon) / self.step;
        let k = x.round();
        if (x - k).abs() > T::of(1e-6) || k < T::zero() || k > T::of_usize(self.n_steps) {
            return Err(Error::OffGrid {
                time: tau.to_f64_lossy(),
            });
        }
        Ok(k.to_usize().unwrap_or(0))
    }
}

/// Exact per-step OU increments for every mode of one realization.
pub struct OuNoise<T> {
    decay: Vec<T>,
    variance: Vec<T>,
    streams: Vec<ChaCha8Rng>,
}

impl<T: Real> OuNoise<T> {
    pub fn new(
        lattice: &LatticeSpec<T>,
        profiles: &Profiles<T>,
        step: T,
        seed: u64,
        realization: u32,
    ) -> Self {
        let n = lattice.len();
        let mut decay = Vec::with_capacity(n);
        let mut variance = Vec::with_capacity(n);
        for i in 0..n {
            let s2 = lattice.abs_sq(i);
            let g = profiles.gamma(s2);
            decay.push((-g * step).exp());
            // 1 - e^{-2 gamma h} without cancellation
            variance.push(profiles.big_b(s2) * -(-(g + g) * step).exp_m1());
        }
        let streams = (0..n as u32)
            .map(|m| rng::mode_stream(seed, realization, m))
            .collect();
        Self {
            decay,
            variance,
            streams,
        }
    }

    /// `e^{-gamma_s h}` per mode.
    pub fn decay(&self) -> &[T] {
        &self.decay
    }

    /// Writes the next step's increments `zeta_s`.
    pub fn fill(&mut self, out: &mut [Complex<T>]) {
        for ((z, rng), &var) in out.iter_mut().zip(&mut self.streams).zip(&self.variance) {
            *z = rng::complex_normal(rng, var);
        }
    }

    /// One exact OU step in place.
    pub fn step(&mut self, state: &mut [Complex<T>]) {
        for (((a, rng), &var), &dec) in state
            .iter_mut()
            .zip(&mut self.streams)
            .zip(&self.variance)
            .zip(&self.decay)
        {
            *a = *a * dec + rng::complex_normal(rng, var);
        }
    }
}

/// A sampled path `a^(0)(tau_k)`, `k = 0..=n_steps`, starting from zero at `-T`.
#[derive(Debug, Clone)]
pub struct OuPath<T> {
    lattice: Arc<LatticeSpec<T>>,
    grid: TimeGrid<T>,
    states: Vec<SpectralField<T>>,
    seed: u64,
}

impl<T: Real> OuPath<T> {
    /// Wraps externally supplied states (e.g. a deterministic driver).
    pub fn from_states(
        lattice: Arc<LatticeSpec<T>>,
        grid: TimeGrid<T>,
        states: Vec<SpectralField<T>>,
    ) -> Result<Self> {
        if states.len() != grid.n_steps + 1 {
            return Err(invalid("states", "one state per grid time required"));
        }
        for s in &states {
            if !s.lattice().same_as(&lattice) {
                return Err(Error::LatticeMismatch);
            }
        }
        Ok(Self {
            lattice,
            grid,
            states,
            seed: 0,
        })
    }

    pub fn lattice(&self) -> &Arc<LatticeSpec<T>> {
        &self.lattice
    }

    pub fn grid(&self) -> &TimeGrid<T> {
        &self.grid
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn states(&self) -> &[SpectralField<T>] {
        &self.states
    }

    pub fn times(&self) -> impl Iterator<Item = T> + '_ {
        (0..=self.grid.n_steps).map(|k| self.grid.time(k))
    }

    pub fn state_at(&self, tau: T) -> Result<&SpectralField<T>> {
        Ok(&self.states[self.grid.index_of(tau)?])
    }

    /// Path with every state multiplied by a real factor.
    pub fn scaled(&self, factor: T) -> Self {
        let f = Complex::new(factor, T::zero());
        Self {
            states: self.states.iter().map(|s| s.scale(f)).collect(),
            ..self.clone()
        }
    }
}

/// Samples realization 0 of the OU field; see [`sample_ou_realization`].
pub fn sample_ou_path<T: Real>(
    lattice: Arc<LatticeSpec<T>>,
    profiles: &Profiles<T>,
    horizon: T,
    tau_end: T,
    h: T,
    seed: u64,
) -> Result<OuPath<T>> {
    sample_ou_realization(lattice, profiles, horizon, tau_end, h, seed, 0)
}

/// Samples one realization exactly; bit-reproducible for a fixed
/// `(seed, realization)` and independent of any other realization.
pub fn sample_ou_realization<T: Real>(
    lattice: Arc<LatticeSpec<T>>,
    profiles: &Profiles<T>,
    horizon: T,
    tau_end: T,
    h: T,
    seed: u64,
    realization: u32,
) -> Result<OuPath<T>> {
    let grid = TimeGrid::new(horizon, tau_end, h)?;
    let mut noise = OuNoise::new(&lattice, profiles, grid.step, seed, realization);
    let mut states = Vec::with_capacity(grid.n_steps + 1);
    let mut current = SpectralField::zeros(lattice.clone());
    states.push(current.clone());
    for _ in 0..grid.n_steps {
        noise.step(current.values_mut());
        states.push(current.clone());
    }
    Ok(OuPath {
        lattice,
        grid,
        states,
        seed,
    })
}

/// `B(s) = b(s)^2 / gamma(s)`.
pub fn stationary_covariance<T: Real>(abs_sq: T, profiles: &Profiles<T>) -> T {
    profiles.big_b(abs_sq)
}

/// `T = 5 / gamma_min`, leaving the state within `e^{-10}` of stationarity at `tau = 0`.
pub fn default_horizon<T: Real>(lattice: &LatticeSpec<T>, profiles: &Profiles<T>) -> T {
    T::of(5.0) / profiles.gamma_min(lattice)
}

/// Empirical two-time correlations over an ensemble.
#[derive(Debug, Clone)]
pub struct CorrelationTable<T> {
    pub n_modes: usize,
    /// `E a_s(tau1) a_{s'}(tau2)`, row-major in `(s, s')`.
    pub pair: Vec<ComplexEstimate<T>>,
    /// `E a_s(tau1) conj(a_{s'}(tau2))`, row-major in `(s, s')`.
    pub cross: Vec<ComplexEstimate<T>>,
}

impl<T: Real> CorrelationTable<T> {
    pub fn pair(&self, s: usize, s2: usize) -> &ComplexEstimate<T> {
        &self.pair[s * self.n_modes + s2]
    }

    pub fn cross(&self, s: usize, s2: usize) -> &ComplexEstimate<T> {
        &self.cross[s * self.n_modes + s2]
    }
}

pub fn estimate_correlations<T: Real>(
    ensemble: &[OuPath<T>],
    tau1: T,
    tau2: T,
) -> Result<CorrelationTable<T>> {
    if ensemble.len() < 2 {
        return Err(invalid("ensemble", "need at least two paths"));
    }
    let first = &ensemble[0];
    let a: Vec<&[Complex<T>]> = ensemble
        .iter()
        .map(|p| p.state_at(tau1).map(|s| s.values()))
        .collect::<Result<_>>()?;
    let b: Vec<&[Complex<T>]> = ensemble
        .iter()
        .map(|p| p.state_at(tau2).map(|s| s.values()))
        .collect::<Result<_>>()?;
    let n = first.lattice().len();
    let mut pair = Vec::with_capacity(n * n);
    let mut cross = Vec::with_capacity(n * n);
    let mut buf_p = vec![Complex::new(T::zero(), T::zero()); ensemble.len()];
    let mut buf_c = buf_p.clone();
    for s in 0..n {
        for s2 in 0..n {
            for r in 0..ensemble.len() {
                buf_p[r] = a[r][s] * b[r][s2];
                buf_c[r] = a[r][s] * b[r][s2].conj();
            }
            pair.push(jackknife_mean_complex(&buf_p));
            cross.push(jackknife_mean_complex(&buf_c));
        }
    }
    Ok(CorrelationTable {
        n_modes: n,
        pair,
        cross,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{DampingProfile, ForcingProfile};

    fn setup() -> (Arc<LatticeSpec<f64>>, Profiles<f64>) {
        let l = Arc::new(LatticeSpec::new(2, 1.0, 1.0).unwrap());
        let p = Profiles::new(
            DampingProfile::new(1.0).unwrap(),
            ForcingProfile::gaussian(1.0, 1.0).unwrap(),
        );
        (l, p)
    }

    #[test]
    fn grid_contains_zero() {
        let g = TimeGrid::new(5.0, 0.3, 0.7).unwrap();
        assert!(g.step <= 0.7);
        assert_eq!(g.time(g.index_of(0.0).unwrap()), 0.0);
        assert!(g.end() >= 0.3 - 1e-12);
        assert!(TimeGrid::new(5.0, -6.0, 0.1).is_err());
        assert!(TimeGrid::new(5.0, 0.0, 0.0).is_err());
        assert!(g.index_of(0.1234).is_err());
    }

    #[test]
    fn initial_state_is_zero_and_reproducible() {
        let (l, p) = setup();
        let a = sample_ou_path(l.clone(), &p, 2.0, 0.0, 0.1, 42).unwrap();
        let b = sample_ou_path(l, &p, 2.0, 0.0, 0.1, 42).unwrap();
        assert!(a.states()[0].values().iter().all(|z| z.norm() == 0.0));
        for (x, y) in a.states().iter().zip(b.states()) {
            assert_eq!(x.values(), y.values());
        }
    }

    #[test]
    fn stationary_covariance_examples() {
        let p = Profiles::new(
            DampingProfile::new(1.0).unwrap(),
            ForcingProfile::gaussian(2.0, 1.5).unwrap(),
        );
        let expect = (-2.0f64 / 2.25).exp() * 4.0 / 2.0;
        assert!((stationary_covariance(1.0, &p) - expect).abs() < 1e-15);
        let (_, p) = setup();
        assert_eq!(stationary_covariance(0.0, &p), 1.0);
    }

    #[test]
    fn variance_and_lag_correlation() {
        // single mode s = 0: b = 1, gamma = 1
        let (l, p) = setup();
        let ens: Vec<_> = (0..3000)
            .map(|r| sample_ou_realization(l.clone(), &p, 6.0, 0.5, 0.25, 9, r).unwrap())
            .collect();
        let c = estimate_correlations(&ens, 0.0, 0.5).unwrap();
        let s0 = l.ordinal(&[0, 0]).unwrap();
        let var = estimate_correlations(&ens, 0.0, 0.0).unwrap();
        let v = var.cross(s0, s0);
        assert!((v.mean.re - 1.0).abs() < 3.0 * v.stderr);
        let lag = c.cross(s0, s0);
        assert!((lag.mean.re - (-0.5f64).exp()).abs() < 3.0 * lag.stderr);
        assert!(var.pair(s0, s0).mean.norm() < 3.0 * var.pair(s0, s0).stderr);
        assert!(estimate_correlations(&ens, 0.1, 0.0).is_err());
    }
}
