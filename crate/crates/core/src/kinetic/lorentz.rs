//! Monte-Carlo evaluation of the Lorentzian integral
//!
//! `I_s = (2 nu^2 / gamma_s) int int Gamma B1 B2 B3 / (4 (x.y)^2 + (nu Gamma)^2) dx dy`
//!
//! with `x = s1 - s`, `y = s2 - s`, `Gamma = gamma_1 + gamma_2 + gamma_3 + gamma_s`.
//!
//! As `nu -> 0` the mass concentrates within `O(nu)` of the quadric `x.y = 0`, so
//! `y` is split into `y_par = y.x/|x|`, drawn from a Cauchy law of scale
//! `nu gamma_ref / (2|x|)`, and `y_perp`, drawn from a Gaussian. The outer `x` is
//! drawn with density proportional to `|x|^{-1} exp(-|x|^2 / 2 sigma^2)`, which
//! cancels the `1/|x|` of the inner Lorentzian mass; a plain Gaussian leaves a
//! divergent second moment in `d = 2`.

use rand::RngCore;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{invalid, Result};
use crate::lattice::{Point, Profiles};
use crate::rng::{mc_stream, normal_pair, open_unit};
use crate::scalar::Real;
use crate::stats::Estimate;

/// Samples per independent random stream.
pub const CHUNK: usize = 1 << 16;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McParams {
    pub samples: usize,
    pub seed: u64,
    /// Proposal width as a multiple of the forcing width.
    pub sigma_factor: f64,
}

impl McParams {
    pub fn new(samples: usize, seed: u64) -> Self {
        Self {
            samples,
            seed,
            sigma_factor: 0.6,
        }
    }
}

struct Sampler {
    dim: usize,
    sigma: f64,
    /// `int |x|^{-1} exp(-|x|^2 / 2 sigma^2) dx`
    norm_x: f64,
}

impl Sampler {
    fn new(dim: usize, sigma: f64) -> Self {
        let pi = std::f64::consts::PI;
        let norm_x = if dim == 2 {
            2.0 * pi * sigma * (pi / 2.0).sqrt()
        } else {
            4.0 * pi * sigma * sigma
        };
        Self { dim, sigma, norm_x }
    }

    fn unit_vector(&self, rng: &mut ChaCha8Rng) -> Point<f64> {
        let tau = std::f64::consts::TAU;
        if self.dim == 2 {
            let (s, c) = (tau * open_unit(rng.next_u64())).sin_cos();
            [c, s, 0.0]
        } else {
            let mu = 2.0 * open_unit(rng.next_u64()) - 1.0;
            let (s, c) = (tau * open_unit(rng.next_u64())).sin_cos();
            let st = (1.0 - mu * mu).max(0.0).sqrt();
            [st * c, st * s, mu]
        }
    }

    /// Draws `x` and returns it with `1/p(x)`.
    fn draw_x(&self, rng: &mut ChaCha8Rng) -> (Point<f64>, f64) {
        loop {
            let r = if self.dim == 2 {
                normal_pair(rng).0.abs() * self.sigma
            } else {
                self.sigma * (-2.0 * open_unit(rng.next_u64()).ln()).sqrt()
            };
            if r < 1e-300 {
                continue;
            }
            let u = self.unit_vector(rng);
            let x = [r * u[0], r * u[1], r * u[2]];
            let dens = (-r * r / (2.0 * self.sigma * self.sigma)).exp() / (r * self.norm_x);
            return (x, 1.0 / dens);
        }
    }
}

/// Orthonormal basis of `x-perp` (one vector in `d = 2`, two in `d = 3`).
fn perp_basis(x: &Point<f64>, dim: usize) -> [Point<f64>; 2] {
    let n = (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt();
    let u = [x[0] / n, x[1] / n, x[2] / n];
    if dim == 2 {
        return [[-u[1], u[0], 0.0], [0.0; 3]];
    }
    let k = (0..3)
        .min_by(|&a, &b| u[a].abs().partial_cmp(&u[b].abs()).unwrap())
        .unwrap();
    let mut axis = [0.0; 3];
    axis[k] = 1.0;
    let c = |a: &Point<f64>, b: &Point<f64>| {
        [
            a[1] * b[2] - a[2] * b[1],
            a[2] * b[0] - a[0] * b[2],
            a[0] * b[1] - a[1] * b[0],
        ]
    };
    let e1 = c(&u, &axis);
    let m = (e1[0] * e1[0] + e1[1] * e1[1] + e1[2] * e1[2]).sqrt();
    let e1 = [e1[0] / m, e1[1] / m, e1[2] / m];
    [e1, c(&u, &e1)]
}

/// The integrand of `I_s` at `(x, y)`, including the prefactor `2 nu^2 / gamma_s`.
pub fn lorentz_integrand<T: Real>(profiles: &Profiles<T>, s: &[T], nu: T, x: &[T], y: &[T]) -> T {
    let d = s.len();
    let (mut p1, mut p2, mut p3) = ([T::zero(); 3], [T::zero(); 3], [T::zero(); 3]);
    let mut xy = T::zero();
    for k in 0..d {
        p1[k] = s[k] + x[k];
        p2[k] = s[k] + y[k];
        p3[k] = s[k] + x[k] + y[k];
        xy += x[k] * y[k];
    }
    let q = |p: &Point<T>| crate::scalar::norm_sq(&p[..d]);
    let (g1, g2, g3) = (
        profiles.gamma(q(&p1)),
        profiles.gamma(q(&p2)),
        profiles.gamma(q(&p3)),
    );
    let gs = profiles.damping.gamma_at(s);
    let big_gamma = g1 + g2 + g3 + gs;
    let b = profiles.big_b(q(&p1)) * profiles.big_b(q(&p2)) * profiles.big_b(q(&p3));
    let four = T::of(4.0);
    let den = four * xy * xy + nu * nu * big_gamma * big_gamma;
    (nu + nu) * nu / gs * big_gamma * b / den
}

fn chunk_sums(
    profiles: &Profiles<f64>,
    s: &[f64],
    nu: f64,
    sampler: &Sampler,
    seed: u64,
    chunk: u64,
    n: usize,
) -> (f64, f64) {
    let d = sampler.dim;
    let mut rng = mc_stream(seed, chunk);
    let gamma_ref = profiles.damping.gamma_at(s) + 3.0;
    let pi = std::f64::consts::PI;
    let sig = sampler.sigma;
    let (mut sum, mut sum_sq) = (0.0, 0.0);
    for _ in 0..n {
        let (x, inv_px) = sampler.draw_x(&mut rng);
        let r = (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt();
        let c = nu * gamma_ref / (2.0 * r);
        let par = c * (pi * (open_unit(rng.next_u64()) - 0.5)).tan();
        let inv_ppar = pi * (par * par + c * c) / c;
        let basis = perp_basis(&x, d);
        let (g1, g2) = normal_pair(&mut rng);
        let mut y = [0.0; 3];
        for k in 0..3 {
            y[k] = par * x[k] / r + sig * g1 * basis[0][k];
        }
        let mut inv_pperp = (2.0 * pi).sqrt() * sig * (g1 * g1 / 2.0).exp();
        if d == 3 {
            for k in 0..3 {
                y[k] += sig * g2 * basis[1][k];
            }
            inv_pperp *= (2.0 * pi).sqrt() * sig * (g2 * g2 / 2.0).exp();
        }
        let f = lorentz_integrand(profiles, s, nu, &x[..d], &y[..d]);
        let w = f * inv_px * inv_ppar * inv_pperp;
        sum += w;
        sum_sq += w * w;
    }
    (sum, sum_sq)
}

/// Importance-sampled estimate of `I_s` with its standard error.
pub fn i_integral(
    profiles: &Profiles<f64>,
    s: &[f64],
    nu: f64,
    mc: &McParams,
) -> Result<Estimate<f64>> {
    if !(2..=3).contains(&s.len()) {
        return Err(invalid("s", "point must have 2 or 3 components"));
    }
    if !(nu > 0.0 && nu <= 0.5) {
        return Err(invalid("nu", format!("must lie in (0, 1/2], got {nu}")));
    }
    if mc.samples < 10_000 {
        return Err(invalid(
            "samples",
            format!("need at least 1e4 samples, got {}", mc.samples),
        ));
    }
    if !(mc.sigma_factor > 0.0 && mc.sigma_factor.is_finite()) {
        return Err(invalid("sigma_factor", "must be finite and > 0"));
    }
    let sampler = Sampler::new(s.len(), mc.sigma_factor * profiles.forcing.width);
    let n_chunks = mc.samples.div_ceil(CHUNK);
    let sums: Vec<(f64, f64)> = (0..n_chunks)
        .into_par_iter()
        .map(|c| {
            let n = CHUNK.min(mc.samples - c * CHUNK);
            chunk_sums(profiles, s, nu, &sampler, mc.seed, c as u64, n)
        })
        .collect();
    let (sum, sum_sq) = sums.iter().fold((0.0, 0.0), |a, b| (a.0 + b.0, a.1 + b.1));
    let n = mc.samples as f64;
    let mean = sum / n;
    let var = (sum_sq / n - mean * mean).max(0.0) * n / (n - 1.0);
    Ok(Estimate {
        mean,
        stderr: (var / n).sqrt(),
    })
}
