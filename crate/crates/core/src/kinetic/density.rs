//! Real densities on `R^d` fed to the collision integral.

use crate::lattice::{ForcingProfile, Profiles};
use crate::scalar::{self, Real};

/// A real, finite, fast-decaying function on `R^d`.
pub trait SpectralDensity<T: Real>: Sync {
    /// Value at a point given by its leading `d` coordinates.
    fn eval(&self, p: &[T]) -> T;

    /// `true` when the value depends on `|p|` only.
    fn is_radial(&self) -> bool {
        false
    }
}

/// `y = c`.
#[derive(Debug, Clone, Copy)]
pub struct Constant<T>(pub T);

impl<T: Real> SpectralDensity<T> for Constant<T> {
    fn eval(&self, _: &[T]) -> T {
        self.0
    }

    fn is_radial(&self) -> bool {
        true
    }
}

/// `y = amplitude * exp(-|p|^2 / width^2)`.
#[derive(Debug, Clone, Copy)]
pub struct Gaussian<T> {
    pub amplitude: T,
    pub width: T,
}

impl<T: Real> SpectralDensity<T> for Gaussian<T> {
    fn eval(&self, p: &[T]) -> T {
        self.amplitude * (-scalar::norm_sq(p) / (self.width * self.width)).exp()
    }

    fn is_radial(&self) -> bool {
        true
    }
}

/// Rayleigh-Jeans family `y = 1 / (alpha + beta.p + gamma |p|^2)`.
///
/// `1/y` is a combination of conserved quantities, so the collision bracket
/// vanishes pointwise on the resonant quadric.
#[derive(Debug, Clone, Copy)]
pub struct RayleighJeans<T> {
    pub alpha: T,
    pub beta: [T; 3],
    pub gamma: T,
}

impl<T: Real> SpectralDensity<T> for RayleighJeans<T> {
    fn eval(&self, p: &[T]) -> T {
        let lin = scalar::dot(&self.beta[..p.len()], p);
        T::one() / (self.alpha + lin + self.gamma * scalar::norm_sq(p))
    }

    fn is_radial(&self) -> bool {
        self.beta.iter().all(|b| b.is_zero())
    }
}

/// `y = B(p) = b(p)^2 / gamma(p)`, the zeroth-order stationary spectrum.
#[derive(Debug, Clone, Copy)]
pub struct Stationary<T>(pub Profiles<T>);

impl<T: Real> SpectralDensity<T> for Stationary<T> {
    fn eval(&self, p: &[T]) -> T {
        self.0.big_b(scalar::norm_sq(p))
    }

    fn is_radial(&self) -> bool {
        true
    }
}

/// `y = b(p)^2`.
#[derive(Debug, Clone, Copy)]
pub struct ForcingSquared<T>(pub ForcingProfile<T>);

impl<T: Real> SpectralDensity<T> for ForcingSquared<T> {
    fn eval(&self, p: &[T]) -> T {
        let b = self.0.b_at(p);
        b * b
    }

    fn is_radial(&self) -> bool {
        true
    }
}

/// Adapter for closures.
pub struct FnDensity<F> {
    pub f: F,
    pub radial: bool,
}

impl<T: Real, F: Fn(&[T]) -> T + Sync> SpectralDensity<T> for FnDensity<F> {
    fn eval(&self, p: &[T]) -> T {
        (self.f)(p)
    }

    fn is_radial(&self) -> bool {
        self.radial
    }
}

impl<T: Real, D: SpectralDensity<T> + ?Sized> SpectralDensity<T> for &D {
    fn eval(&self, p: &[T]) -> T {
        (**self).eval(p)
    }

    fn is_radial(&self) -> bool {
        (**self).is_radial()
    }
}
