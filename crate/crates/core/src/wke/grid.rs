//! Radial representation of spectra: Chebyshev radii with a monotone cubic
//! (PCHIP) interpolant, extended by zero beyond `r_max`.

use std::sync::Arc;

use crate::error::{invalid, Error, Result};
use crate::kinetic::density::SpectralDensity;
use crate::scalar::{self, Real};

#[derive(Debug, Clone, PartialEq)]
pub struct RadialGrid<T> {
    radii: Vec<T>,
}

impl<T: Real> RadialGrid<T> {
    /// `n` Chebyshev-Lobatto radii `r_j = r_max (1 - cos(pi j / (n - 1))) / 2`.
    pub fn chebyshev(n: usize, r_max: T) -> Result<Self> {
        if n < 4 {
            return Err(invalid(
                "n_radii",
                format!("need at least 4 radii, got {n}"),
            ));
        }
        if !(r_max.is_finite() && r_max > T::zero()) {
            return Err(invalid(
                "r_max",
                format!("must be finite and > 0, got {r_max}"),
            ));
        }
        let last = T::of_usize(n - 1);
        let half = T::of(0.5) * r_max;
        let mut radii: Vec<T> = (0..n)
            .map(|j| half * (T::one() - (T::PI() * T::of_usize(j) / last).cos()))
            .collect();
        radii[0] = T::zero();
        radii[n - 1] = r_max;
        Ok(Self { radii })
    }

    /// Arbitrary increasing radii starting at zero.
    pub fn from_radii(radii: Vec<T>) -> Result<Self> {
        if radii.len() < 4 || radii[0] != T::zero() {
            return Err(invalid("radii", "need at least 4 radii starting at 0"));
        }
        if radii.windows(2).any(|w| !(w[1] > w[0])) || radii.iter().any(|r| !r.is_finite()) {
            return Err(invalid(
                "radii",
                "radii must be finite and strictly increasing",
            ));
        }
        Ok(Self { radii })
    }

    pub fn radii(&self) -> &[T] {
        &self.radii
    }

    pub fn len(&self) -> usize {
        self.radii.len()
    }

    pub fn is_empty(&self) -> bool {
        self.radii.is_empty()
    }

    pub fn r_max(&self) -> T {
        self.radii[self.radii.len() - 1]
    }

    /// Index `j` with `r_j <= r < r_{j+1}`.
    fn interval(&self, r: T) -> usize {
        let n = self.radii.len();
        self.radii.partition_point(|&x| x <= r).clamp(1, n - 1) - 1
    }
}

/// Piecewise cubic Hermite interpolant with Fritsch-Carlson slopes.
///
/// The slope at `r = 0` is pinned to zero, as for any smooth radial function.
#[derive(Debug, Clone)]
pub struct RadialInterpolant<T> {
    grid: Arc<RadialGrid<T>>,
    values: Vec<T>,
    slopes: Vec<T>,
}

impl<T: Real> RadialInterpolant<T> {
    pub fn new(grid: Arc<RadialGrid<T>>, values: Vec<T>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(invalid("values", "one value per radius required"));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("radial values"));
        }
        let r = grid.radii();
        let n = r.len();
        let h: Vec<T> = r.windows(2).map(|w| w[1] - w[0]).collect();
        let delta: Vec<T> = (0..n - 1)
            .map(|j| (values[j + 1] - values[j]) / h[j])
            .collect();
        let mut slopes = vec![T::zero(); n];
        for j in 1..n - 1 {
            let (a, b) = (delta[j - 1], delta[j]);
            if a * b > T::zero() {
                let w1 = T::of(2.0) * h[j] + h[j - 1];
                let w2 = h[j] + T::of(2.0) * h[j - 1];
                slopes[j] = (w1 + w2) / (w1 / a + w2 / b);
            }
        }
        // three-point end formula, limited to keep monotonicity
        let (h0, h1) = (h[n - 2], h[n - 3]);
        let (d0, d1) = (delta[n - 2], delta[n - 3]);
        let mut end = ((T::of(2.0) * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
        if end * d0 <= T::zero() {
            end = T::zero();
        } else if d0 * d1 <= T::zero() && end.abs() > T::of(3.0) * d0.abs() {
            end = T::of(3.0) * d0;
        }
        slopes[n - 1] = end;
        Ok(Self {
            grid,
            values,
            slopes,
        })
    }

    pub fn grid(&self) -> &Arc<RadialGrid<T>> {
        &self.grid
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    /// Value at radius `r >= 0`; zero beyond `r_max`.
    pub fn at(&self, r: T) -> T {
        let g = &self.grid;
        if r > g.r_max() {
            return T::zero();
        }
        let j = g.interval(r);
        let r = r.max(T::zero());
        let (x0, x1) = (g.radii[j], g.radii[j + 1]);
        let h = x1 - x0;
        let t = (r - x0) / h;
        let t2 = t * t;
        let t3 = t2 * t;
        let two = T::of(2.0);
        let three = T::of(3.0);
        let h00 = two * t3 - three * t2 + T::one();
        let h10 = t3 - two * t2 + t;
        let h01 = three * t2 - two * t3;
        let h11 = t3 - t2;
        h00 * self.values[j]
            + h10 * h * self.slopes[j]
            + h01 * self.values[j + 1]
            + h11 * h * self.slopes[j + 1]
    }
}

impl<T: Real> SpectralDensity<T> for RadialInterpolant<T> {
    fn eval(&self, p: &[T]) -> T {
        self.at(scalar::norm_sq(p).sqrt())
    }

    fn is_radial(&self) -> bool {
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chebyshev_radii() {
        let g = RadialGrid::chebyshev(64, 6.0).unwrap();
        assert_eq!(g.len(), 64);
        assert_eq!(g.radii()[0], 0.0);
        assert_eq!(g.r_max(), 6.0);
        assert!(g.radii().windows(2).all(|w| w[1] > w[0]));
        assert!(RadialGrid::chebyshev(3, 6.0).is_err());
    }

    #[test]
    fn interpolates_nodes_and_gaussians() {
        let g = Arc::new(RadialGrid::chebyshev(64, 6.0).unwrap());
        let f = |r: f64| (-r * r).exp();
        let vals = g.radii().iter().map(|&r| f(r)).collect();
        let it = RadialInterpolant::new(g.clone(), vals).unwrap();
        for &r in g.radii() {
            assert_eq!(it.at(r), f(r));
        }
        let err = (0..600)
            .map(|k| k as f64 * 0.01)
            .map(|r| (it.at(r) - f(r)).abs())
            .fold(0.0, f64::max);
        assert!(err < 1e-4, "{err}");
        assert_eq!(it.at(6.5), 0.0);
        assert_eq!(it.eval(&[3.0, 4.0]), it.at(5.0));
    }

    #[test]
    fn monotone_data_stays_monotone() {
        let g = Arc::new(RadialGrid::from_radii(vec![0.0, 1.0, 2.0, 3.0, 4.0]).unwrap());
        let it = RadialInterpolant::new(g, vec![5.0, 4.9, 1.0, 0.9, 0.0]).unwrap();
        let xs: Vec<f64> = (0..=400).map(|k| it.at(k as f64 * 0.01)).collect();
        assert!(xs.windows(2).all(|w| w[1] <= w[0] + 1e-15));
    }
}
