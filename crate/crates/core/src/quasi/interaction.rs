//! The cubic interaction operator
//! `Y_s(a1, a2, a3; t) = L^{-d} sum delta'(12|3s) a1_{s1} a2_{s2} conj(a3_{s3}) e^{i t omega}`.
//!
//! The phase factorises as `e^{it|s1|^2} e^{it|s2|^2} e^{-it|s3|^2} e^{-it|s|^2}`, so
//! after twisting each field by `e^{it|.|^2}` the unrestricted sum is a triple
//! convolution `f1 * f2 * conj(f3)(-.)`. It is evaluated with FFTs on a grid
//! padded to `P >= 4m + 1` points per axis (the support of `s1 + s2 - s3` spans
//! `[-3m, 3m]`), then the excluded pairs `{s1, s2} = {s3, s}` are removed in
//! closed form.

use std::sync::Arc;

use num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::lattice::{LatticeSpec, SpectralField};
use crate::scalar::Real;

/// Term budget for the brute-force oracle.
pub const BRUTE_FORCE_LIMIT: u128 = 1_000_000_000;

/// Reusable FFT plan and scratch space for one lattice.
pub struct YOperator<T: Real> {
    lattice: Arc<LatticeSpec<T>>,
    pad: usize,
    /// Padded-grid index of each lattice site.
    slot: Vec<usize>,
    abs_sq: Vec<T>,
    fwd: Arc<dyn Fft<T>>,
    inv: Arc<dyn Fft<T>>,
    scratch: Vec<Complex<T>>,
    lines: Vec<Complex<T>>,
    buf: [Vec<Complex<T>>; 3],
    twist: Vec<Complex<T>>,
}

fn zero<T: Real>() -> Complex<T> {
    Complex::new(T::zero(), T::zero())
}

impl<T: Real> YOperator<T> {
    pub fn new(lattice: Arc<LatticeSpec<T>>) -> Self {
        let m = lattice.half_width() as usize;
        // twice the per-axis mode count, which is >= 4m + 1
        let pad = 2 * (2 * m + 1);
        let d = lattice.dim();
        let total = pad.pow(d as u32);
        let slot = (0..lattice.len())
            .map(|i| {
                lattice.coords(i).iter().fold(0usize, |acc, &n| {
                    acc * pad + n.rem_euclid(pad as i32) as usize
                })
            })
            .collect();
        let abs_sq = (0..lattice.len()).map(|i| lattice.abs_sq(i)).collect();
        let mut planner = FftPlanner::new();
        let fwd = planner.plan_fft_forward(pad);
        let inv = planner.plan_fft_inverse(pad);
        let scratch_len = fwd
            .get_inplace_scratch_len()
            .max(inv.get_inplace_scratch_len());
        let n = lattice.len();
        Self {
            lattice,
            pad,
            slot,
            abs_sq,
            fwd,
            inv,
            scratch: vec![zero(); scratch_len],
            lines: vec![zero(); total],
            buf: [
                vec![zero(); total],
                vec![zero(); total],
                vec![zero(); total],
            ],
            twist: vec![zero(); n],
        }
    }

    pub fn lattice(&self) -> &Arc<LatticeSpec<T>> {
        &self.lattice
    }

    /// Points per axis of the padded FFT grid.
    pub fn padded_len(&self) -> usize {
        self.pad
    }

    /// `Y(a1, a2, a3; t)` for fields on this operator's lattice.
    pub fn apply(
        &mut self,
        a1: &SpectralField<T>,
        a2: &SpectralField<T>,
        a3: &SpectralField<T>,
        t: T,
    ) -> Result<SpectralField<T>> {
        for a in [a1, a2, a3] {
            if !a.lattice().same_as(&self.lattice) {
                return Err(Error::LatticeMismatch);
            }
        }
        if !t.is_finite() {
            return Err(Error::NonFinite("interaction time"));
        }
        let mut out = vec![zero(); self.lattice.len()];
        self.apply_raw(a1.values(), a2.values(), a3.values(), t, &mut out);
        SpectralField::from_values(self.lattice.clone(), out)
    }

    /// Slice form of [`apply`](Self::apply); inputs must have the lattice length.
    pub fn apply_raw(
        &mut self,
        a1: &[Complex<T>],
        a2: &[Complex<T>],
        a3: &[Complex<T>],
        t: T,
        out: &mut [Complex<T>],
    ) {
        self.set_twist(t);
        let mut bufs = std::mem::take(&mut self.buf);
        self.scatter_twisted(a1, &mut bufs[0]);
        self.scatter_twisted(a2, &mut bufs[1]);
        self.scatter_twisted(a3, &mut bufs[2]);
        for b in bufs.iter_mut() {
            self.transform(b, false);
        }
        let [b1, b2, b3] = &mut bufs;
        for ((x, y), z) in b1.iter_mut().zip(b2.iter()).zip(b3.iter()) {
            *x = *x * *y * z.conj();
        }
        self.transform(b1, true);
        self.gather(b1, out);
        self.buf = bufs;
        self.finish(out, &[(a1, a2, a3)]);
    }

    /// Forcing terms of the first two chaos orders at fast time `t`:
    /// `y1 = Y(a0, a0, a0)` and `y2 = Y(a1, a0, a0) + Y(a0, a1, a0) + Y(a0, a0, a1)`.
    ///
    /// In Fourier space the second is `F0 (2 F1 conj(F0) + F0 conj(F1))`, so both
    /// need only two forward and two inverse transforms.
    pub fn chain_forcing(
        &mut self,
        a0: &[Complex<T>],
        a1: &[Complex<T>],
        t: T,
        y1: &mut [Complex<T>],
        y2: &mut [Complex<T>],
    ) {
        self.set_twist(t);
        let mut bufs = std::mem::take(&mut self.buf);
        self.scatter_twisted(a0, &mut bufs[0]);
        self.scatter_twisted(a1, &mut bufs[1]);
        self.transform(&mut bufs[0], false);
        self.transform(&mut bufs[1], false);
        let [f0, f1, c2] = &mut bufs;
        let two = T::one() + T::one();
        for ((x, y), z) in f0.iter_mut().zip(f1.iter_mut()).zip(c2.iter_mut()) {
            let (u, v) = (*x, *y);
            *z = u * (v * u.conj() * two + u * v.conj());
            *x = u * u * u.conj();
        }
        self.transform(f0, true);
        self.transform(c2, true);
        self.gather(f0, y1);
        self.gather(c2, y2);
        self.buf = bufs;
        self.finish(y1, &[(a0, a0, a0)]);
        self.finish(y2, &[(a1, a0, a0), (a0, a1, a0), (a0, a0, a1)]);
    }

    fn set_twist(&mut self, t: T) {
        for (w, &s2) in self.twist.iter_mut().zip(&self.abs_sq) {
            let (sin, cos) = (t * s2).sin_cos();
            *w = Complex::new(cos, sin);
        }
    }

    fn scatter_twisted(&self, a: &[Complex<T>], buf: &mut [Complex<T>]) {
        buf.fill(zero());
        for ((&slot, &v), &w) in self.slot.iter().zip(a).zip(&self.twist) {
            buf[slot] = v * w;
        }
    }

    /// Un-normalised multi-dimensional DFT, axis by axis.
    fn transform(&mut self, buf: &mut [Complex<T>], inverse: bool) {
        let fft = if inverse { &self.inv } else { &self.fwd };
        let p = self.pad;
        let total = buf.len();
        // last axis is contiguous
        fft.process_with_scratch(buf, &mut self.scratch);
        let mut stride = p;
        while stride < total {
            let block = stride * p;
            let mut k = 0;
            for outer in (0..total).step_by(block) {
                for inner in 0..stride {
                    for j in 0..p {
                        self.lines[k] = buf[outer + inner + j * stride];
                        k += 1;
                    }
                }
            }
            fft.process_with_scratch(&mut self.lines, &mut self.scratch);
            let mut k = 0;
            for outer in (0..total).step_by(block) {
                for inner in 0..stride {
                    for j in 0..p {
                        buf[outer + inner + j * stride] = self.lines[k];
                        k += 1;
                    }
                }
            }
            stride = block;
        }
    }

    /// Reads the convolution back at lattice sites, undoing the output twist
    /// `e^{it|s|^2}` and the `P^d` of the inverse transform.
    fn gather(&self, buf: &[Complex<T>], out: &mut [Complex<T>]) {
        let norm = T::one() / T::of_usize(buf.len());
        for ((o, &slot), &w) in out.iter_mut().zip(&self.slot).zip(&self.twist) {
            *o = buf[slot] * w.conj() * norm;
        }
    }

    /// Subtracts the excluded terms and applies `L^{-d}`.
    fn finish(
        &self,
        out: &mut [Complex<T>],
        terms: &[(&[Complex<T>], &[Complex<T>], &[Complex<T>])],
    ) {
        let vol = self.lattice.cell_volume();
        for &(a1, a2, a3) in terms {
            let s13: Complex<T> = a1
                .iter()
                .zip(a3)
                .fold(zero(), |acc, (x, z)| acc + x * z.conj());
            let s23: Complex<T> = a2
                .iter()
                .zip(a3)
                .fold(zero(), |acc, (y, z)| acc + y * z.conj());
            for s in 0..out.len() {
                out[s] -= a2[s] * s13 + a1[s] * s23 - a1[s] * a2[s] * a3[s].conj();
            }
        }
        for o in out.iter_mut() {
            *o *= vol;
        }
    }
}

/// `Y_s(a1, a2, a3; t)` via FFT. `t` is the fast time `tau / nu`.
pub fn y_operator<T: Real>(
    a1: &SpectralField<T>,
    a2: &SpectralField<T>,
    a3: &SpectralField<T>,
    t: T,
) -> Result<SpectralField<T>> {
    YOperator::new(a1.lattice().clone()).apply(a1, a2, a3, t)
}

/// Direct double sum over `(s1, s2)` with the `delta'` filter.
pub fn y_operator_bruteforce<T: Real>(
    a1: &SpectralField<T>,
    a2: &SpectralField<T>,
    a3: &SpectralField<T>,
    t: T,
) -> Result<SpectralField<T>> {
    a1.check_same(a2)?;
    a1.check_same(a3)?;
    if !t.is_finite() {
        return Err(Error::NonFinite("interaction time"));
    }
    let lat = a1.lattice().clone();
    let n = lat.len();
    let work = (n as u128).pow(3);
    if work > BRUTE_FORCE_LIMIT {
        return Err(Error::WorkGuard {
            work,
            limit: BRUTE_FORCE_LIMIT,
        });
    }
    let d = lat.dim();
    let (v1, v2, v3) = (a1.values(), a2.values(), a3.values());
    let mut out = vec![zero(); n];
    let mut n3 = [0i32; 3];
    for (s, o) in out.iter_mut().enumerate() {
        let ns = lat.coords(s);
        let ps = lat.point(s);
        let mut acc = zero();
        for s1 in 0..n {
            let n1 = lat.coords(s1);
            let p1 = lat.point(s1);
            for s2 in 0..n {
                let n2 = lat.coords(s2);
                for k in 0..d {
                    n3[k] = n1[k] + n2[k] - ns[k];
                }
                let Some(s3) = lat.ordinal(&n3[..d]) else {
                    continue;
                };
                if crate::lattice::delta_prime(n1, n2, &n3[..d], ns) == 0 {
                    continue;
                }
                let p2 = lat.point(s2);
                let w = crate::lattice::omega(&p1[..d], &p2[..d], &ps[..d]);
                let (sin, cos) = (t * w).sin_cos();
                acc += v1[s1] * v2[s2] * v3[s3].conj() * Complex::new(cos, sin);
            }
        }
        *o = acc * lat.cell_volume();
    }
    SpectralField::from_values(lat, out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::norm_sq;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};

    fn random_field(lat: &Arc<LatticeSpec<f64>>, seed: u64) -> SpectralField<f64> {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        SpectralField::from_fn(lat.clone(), |_| {
            Complex::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        })
    }

    fn max_rel(a: &SpectralField<f64>, b: &SpectralField<f64>) -> f64 {
        let scale = b.values().iter().map(|z| z.norm()).fold(0.0, f64::max);
        a.values()
            .iter()
            .zip(b.values())
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max)
            / scale
    }

    #[test]
    fn zero_field_gives_zero() {
        let lat = Arc::new(LatticeSpec::new(2, 1.0, 1.0).unwrap());
        let z = SpectralField::zeros(lat);
        let y = y_operator(&z, &z, &z, 0.3).unwrap();
        assert!(y.values().iter().all(|v| v.norm() == 0.0));
    }

    #[test]
    fn single_mode_is_annihilated() {
        let lat = Arc::new(LatticeSpec::new(2, 2.0, 1.0).unwrap());
        let s0 = lat.ordinal(&[1, -2]).unwrap();
        let a = SpectralField::from_fn(lat, |i| {
            if i == s0 {
                Complex::new(0.7, -1.3)
            } else {
                Complex::new(0.0, 0.0)
            }
        });
        let y = y_operator(&a, &a, &a, 1.7).unwrap();
        assert!(y.values().iter().all(|v| v.norm() < 1e-14));
        let yb = y_operator_bruteforce(&a, &a, &a, 1.7).unwrap();
        assert!(yb.values().iter().all(|v| v.norm() == 0.0));
    }

    #[test]
    fn matches_bruteforce_in_two_and_three_dimensions() {
        for (d, l, k) in [(2, 1.0, 1.0), (2, 2.0, 1.5), (3, 1.0, 1.0), (3, 2.0, 0.5)] {
            let lat = Arc::new(LatticeSpec::new(d, l, k).unwrap());
            let (a, b, c) = (
                random_field(&lat, 1),
                random_field(&lat, 2),
                random_field(&lat, 3),
            );
            let fast = y_operator(&a, &b, &c, 2.3).unwrap();
            let slow = y_operator_bruteforce(&a, &b, &c, 2.3).unwrap();
            assert!(max_rel(&fast, &slow) < 1e-12, "d={d} L={l}");
        }
    }

    #[test]
    fn chain_forcing_matches_three_applications() {
        let lat = Arc::new(LatticeSpec::new(2, 2.0, 1.0).unwrap());
        let (a0, a1) = (random_field(&lat, 4), random_field(&lat, 5));
        let mut op = YOperator::new(lat.clone());
        let n = lat.len();
        let (mut y1, mut y2) = (vec![zero(); n], vec![zero(); n]);
        op.chain_forcing(a0.values(), a1.values(), 0.9, &mut y1, &mut y2);
        let e1 = y_operator_bruteforce(&a0, &a0, &a0, 0.9).unwrap();
        let e2: Vec<_> = [
            y_operator_bruteforce(&a1, &a0, &a0, 0.9).unwrap(),
            y_operator_bruteforce(&a0, &a1, &a0, 0.9).unwrap(),
            y_operator_bruteforce(&a0, &a0, &a1, 0.9).unwrap(),
        ]
        .iter()
        .fold(vec![zero(); n], |mut acc, f| {
            acc.iter_mut().zip(f.values()).for_each(|(x, y)| *x += y);
            acc
        });
        let e2 = SpectralField::from_values(lat.clone(), e2).unwrap();
        let y1 = SpectralField::from_values(lat.clone(), y1).unwrap();
        let y2 = SpectralField::from_values(lat, y2).unwrap();
        assert!(max_rel(&y1, &e1) < 1e-12);
        assert!(max_rel(&y2, &e2) < 1e-12);
    }

    #[test]
    fn single_precision_agrees_with_double() {
        let lat64 = Arc::new(LatticeSpec::new(2, 1.0, 1.0).unwrap());
        let lat32 = Arc::new(LatticeSpec::<f32>::new(2, 1.0, 1.0).unwrap());
        let a = random_field(&lat64, 6);
        let a32 = SpectralField::from_fn(lat32, |i| {
            let z = a.values()[i];
            Complex::new(z.re as f32, z.im as f32)
        });
        let y = y_operator(&a, &a, &a, 0.4).unwrap();
        let y32 = y_operator(&a32, &a32, &a32, 0.4).unwrap();
        for (x, z) in y.values().iter().zip(y32.values()) {
            assert!((x.re - z.re as f64).abs() < 1e-4 && (x.im - z.im as f64).abs() < 1e-4);
        }
    }

    #[test]
    fn rejects_mismatched_lattices_and_large_work() {
        let a = random_field(&Arc::new(LatticeSpec::new(2, 1.0, 1.0).unwrap()), 1);
        let b = random_field(&Arc::new(LatticeSpec::new(2, 2.0, 1.0).unwrap()), 1);
        assert_eq!(
            y_operator(&a, &b, &a, 0.0).unwrap_err(),
            Error::LatticeMismatch
        );
        let big = SpectralField::zeros(Arc::new(LatticeSpec::new(3, 4.0, 2.0).unwrap()));
        assert!(matches!(
            y_operator_bruteforce(&big, &big, &big, 0.0),
            Err(Error::WorkGuard { .. })
        ));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn nonlinearity_preserves_norm(seed in any::<u64>(), t in -20.0f64..20.0) {
            let lat = Arc::new(LatticeSpec::new(2, 2.0, 1.0).unwrap());
            let a = random_field(&lat, seed);
            let y = y_operator(&a, &a, &a, t).unwrap();
            let i = Complex::new(0.0, 1.0);
            let pairing: f64 = a.values().iter().zip(y.values())
                .map(|(x, v)| (x.conj() * i * v).re).sum::<f64>() * lat.cell_volume();
            prop_assert!(pairing.abs() < 1e-10 * norm_sq(&a).powi(2).max(1.0));
        }

        #[test]
        fn trilinear_and_symmetric(seed in any::<u64>(), alpha in -3.0f64..3.0, t in -5.0f64..5.0) {
            let lat = Arc::new(LatticeSpec::new(2, 1.0, 1.0).unwrap());
            let (a, b, c) = (random_field(&lat, seed), random_field(&lat, seed ^ 1), random_field(&lat, seed ^ 2));
            let y = y_operator_bruteforce(&a, &b, &c, t).unwrap();
            let ys = y_operator_bruteforce(&a.scale(Complex::new(alpha, 0.0)), &b, &c, t).unwrap();
            let yw = y_operator_bruteforce(&b, &a, &c, t).unwrap();
            for ((u, v), w) in y.values().iter().zip(ys.values()).zip(yw.values()) {
                prop_assert!((u * alpha - v).norm() < 1e-12);
                prop_assert!((u - w).norm() < 1e-12);
            }
        }
    }
}
