//! Quadrature for the measure `|z|^{-1} dz` on the quadric `Sigma = {(x, y): x.y = 0}`.
//!
//! The measure disintegrates as `int |x|^{-1} (int_{x-perp} f(x, y) dy) dx`. The
//! outer integral is taken in polar/spherical coordinates, where `|x|^{-1}`
//! combines with the Jacobian into `r^{d-2} dr dOmega`; Gauss-Legendre nodes on
//! `(0, r_max]` handle the radius. The inner integral is a tensor Gauss-Legendre
//! rule on `[-r_max, r_max]^{d-1}` in an orthonormal basis of `x-perp`.
//!
//! Nodes are generated on the fly: in three dimensions a converged rule has
//! tens of millions of them.

use std::num::NonZeroUsize;

use gauss_quad::legendre::GaussLegendre;
use rayon::prelude::*;

use crate::error::{invalid, Result};
use crate::lattice::Point;
use crate::scalar::Real;

#[derive(Debug, Clone)]
struct Direction<T> {
    dir: Point<T>,
    /// Orthonormal basis of `dir-perp`; the second vector is unused for `d = 2`.
    perp: [Point<T>; 2],
    weight: T,
}

#[derive(Debug, Clone)]
pub struct QuadricQuadrature<T> {
    dim: usize,
    r_max: T,
    counts: [usize; 3],
    /// `(r, w r^{d-2})`
    radial: Vec<(T, T)>,
    directions: Vec<Direction<T>>,
    inner: Vec<(T, T)>,
}

/// Gauss-Legendre rule on `[a, b]`.
pub fn gauss_legendre<T: Real>(n: usize, a: T, b: T) -> Vec<(T, T)> {
    let rule = GaussLegendre::new(NonZeroUsize::new(n).expect("rule size"));
    let half = T::of(0.5) * (b - a);
    let mid = T::of(0.5) * (a + b);
    rule.nodes()
        .zip(rule.weights())
        .map(|(&x, &w)| (mid + half * T::of(x), half * T::of(w)))
        .collect()
}

fn cross<T: Real>(a: &Point<T>, b: &Point<T>) -> Point<T> {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

fn normalised<T: Real>(a: Point<T>) -> Point<T> {
    let n = (a[0] * a[0] + a[1] * a[1] + a[2] * a[2]).sqrt();
    [a[0] / n, a[1] / n, a[2] / n]
}

impl<T: Real> QuadricQuadrature<T> {
    /// `n_angular` is the number of angles in `d = 2`; in `d = 3` it is the
    /// number of polar Gauss-Legendre nodes, with `2 n_angular` azimuths.
    pub fn new(
        dim: usize,
        r_max: T,
        n_radial: usize,
        n_angular: usize,
        n_inner: usize,
    ) -> Result<Self> {
        if !(2..=3).contains(&dim) {
            return Err(invalid("d", format!("dimension must be 2 or 3, got {dim}")));
        }
        if !(r_max.is_finite() && r_max > T::zero()) {
            return Err(invalid(
                "r_max",
                format!("must be finite and > 0, got {r_max}"),
            ));
        }
        for (name, c) in [
            ("n_radial", n_radial),
            ("n_angular", n_angular),
            ("n_inner", n_inner),
        ] {
            if c < 4 {
                return Err(invalid(name, format!("need at least 4 nodes, got {c}")));
            }
        }
        let radial = gauss_legendre(n_radial, T::zero(), r_max)
            .into_iter()
            .map(|(r, w)| (r, if dim == 2 { w } else { w * r }))
            .collect();
        let tau = T::TAU();
        let mut directions = Vec::new();
        if dim == 2 {
            let w = tau / T::of_usize(n_angular);
            for j in 0..n_angular {
                let (s, c) = ((T::of_usize(j) + T::of(0.5)) * w).sin_cos();
                directions.push(Direction {
                    dir: [c, s, T::zero()],
                    perp: [[-s, c, T::zero()], [T::zero(); 3]],
                    weight: w,
                });
            }
        } else {
            let n_phi = 2 * n_angular;
            let w_phi = tau / T::of_usize(n_phi);
            for (mu, w_mu) in gauss_legendre(n_angular, -T::one(), T::one()) {
                let sin_t = (T::one() - mu * mu).sqrt();
                for j in 0..n_phi {
                    let (s, c) = ((T::of_usize(j) + T::of(0.5)) * w_phi).sin_cos();
                    let dir = [sin_t * c, sin_t * s, mu];
                    // cross with the coordinate axis least aligned with dir
                    let k = (0..3)
                        .min_by(|&a, &b| dir[a].abs().partial_cmp(&dir[b].abs()).unwrap())
                        .unwrap();
                    let mut axis = [T::zero(); 3];
                    axis[k] = T::one();
                    let e1 = normalised(cross(&dir, &axis));
                    let e2 = cross(&dir, &e1);
                    directions.push(Direction {
                        dir,
                        perp: [e1, e2],
                        weight: w_mu * w_phi,
                    });
                }
            }
        }
        Ok(Self {
            dim,
            r_max,
            counts: [n_radial, n_angular, n_inner],
            radial,
            directions,
            inner: gauss_legendre(n_inner, -r_max, r_max),
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn r_max(&self) -> T {
        self.r_max
    }

    /// `(n_radial, n_angular, n_inner)`.
    pub fn counts(&self) -> [usize; 3] {
        self.counts
    }

    /// Same rule with every count multiplied by `factor`.
    pub fn refined(&self, factor: usize) -> Result<Self> {
        let [a, b, c] = self.counts;
        Self::new(self.dim, self.r_max, a * factor, b * factor, c * factor)
    }

    pub fn len(&self) -> usize {
        let inner = self.inner.len().pow(self.dim as u32 - 1);
        self.radial.len() * self.directions.len() * inner
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn visit_direction(&self, d: &Direction<T>, mut f: impl FnMut(&Point<T>, &Point<T>, T)) {
        let [e1, e2] = &d.perp;
        for &(r, wr) in &self.radial {
            let x = [r * d.dir[0], r * d.dir[1], r * d.dir[2]];
            let w0 = wr * d.weight;
            for &(u, wu) in &self.inner {
                let y1 = [u * e1[0], u * e1[1], u * e1[2]];
                if self.dim == 2 {
                    f(&x, &y1, w0 * wu);
                    continue;
                }
                for &(v, wv) in &self.inner {
                    let y = [y1[0] + v * e2[0], y1[1] + v * e2[1], y1[2] + v * e2[2]];
                    f(&x, &y, w0 * wu * wv);
                }
            }
        }
    }

    /// Every node `(x, y, weight)`, padded to three components.
    pub fn nodes(&self) -> Vec<(Point<T>, Point<T>, T)> {
        let mut out = Vec::with_capacity(self.len());
        for d in &self.directions {
            self.visit_direction(d, |x, y, w| out.push((*x, *y, w)));
        }
        out
    }

    /// `sum_nodes w f(x, y)`, i.e. the integral of `f` against `|z|^{-1} dz` on `Sigma`.
    ///
    /// Directions are processed in parallel and reduced in a fixed order.
    pub fn integrate(&self, f: impl Fn(&Point<T>, &Point<T>) -> T + Sync) -> T {
        let partial: Vec<T> = self
            .directions
            .par_iter()
            .map(|d| {
                let mut acc = T::zero();
                self.visit_direction(d, |x, y, w| acc += w * f(x, y));
                acc
            })
            .collect();
        partial.into_iter().sum()
    }
}
