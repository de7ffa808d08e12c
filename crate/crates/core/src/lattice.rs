//! Truncated dual lattice, damping/forcing profiles and spectral fields.
//!
//! The dual lattice `Z^d_L = L^{-1} Z^d` is truncated to the box `|s|_inf <= K`.
//! Sites are kept as integer coordinates `n` with `s = n / L`, stored in
//! lexicographic order so iteration is reproducible.

use std::sync::Arc;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::scalar::{self, Real};

/// Largest supported dimension; points are padded with zeros up to it.
pub const MAX_DIM: usize = 3;

/// A point of `R^d` padded to [`MAX_DIM`] components.
pub type Point<T> = [T; MAX_DIM];

#[derive(Debug, Clone, PartialEq)]
pub struct LatticeSpec<T> {
    dim: usize,
    box_size: T,
    cutoff: T,
    half_width: i32,
    coords: Vec<i32>,
}

impl<T: Real> LatticeSpec<T> {
    /// Builds the lattice `{ s in L^{-1} Z^d : |s|_inf <= cutoff }`.
    pub fn new(dim: usize, box_size: T, cutoff: T) -> Result<Self> {
        if !(2..=3).contains(&dim) {
            return Err(invalid("d", format!("dimension must be 2 or 3, got {dim}")));
        }
        if !box_size.is_finite() || !cutoff.is_finite() {
            return Err(Error::NonFinite("lattice parameters"));
        }
        if box_size < T::one() {
            return Err(invalid(
                "L",
                format!("box size must be >= 1, got {box_size}"),
            ));
        }
        if cutoff * box_size < T::one() - T::of(1e-9) {
            return Err(invalid(
                "cutoff",
                format!("cutoff must be >= 1/L, got {cutoff}"),
            ));
        }
        // KL is frequently an integer computed with rounding noise.
        let kl = (cutoff * box_size + T::of(1e-9)).floor();
        let half_width = kl
            .to_i32()
            .filter(|&m| m <= 4096)
            .ok_or_else(|| invalid("cutoff", "lattice too large"))?;
        let axis = (2 * half_width + 1) as usize;
        let count = axis.pow(dim as u32);
        let mut coords = Vec::with_capacity(count * dim);
        for ordinal in 0..count {
            let mut rem = ordinal;
            let mut site = [0i32; MAX_DIM];
            for k in (0..dim).rev() {
                site[k] = (rem % axis) as i32 - half_width;
                rem /= axis;
            }
            coords.extend_from_slice(&site[..dim]);
        }
        Ok(Self {
            dim,
            box_size,
            cutoff,
            half_width,
            coords,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `L`.
    pub fn box_size(&self) -> T {
        self.box_size
    }

    pub fn cutoff(&self) -> T {
        self.cutoff
    }

    /// `m = floor(K L)`; integer coordinates range over `-m..=m`.
    pub fn half_width(&self) -> i32 {
        self.half_width
    }

    /// Modes per axis, `2 floor(K L) + 1`.
    pub fn axis_len(&self) -> usize {
        (2 * self.half_width + 1) as usize
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    /// `L^{-d}`, the weight of one lattice site.
    pub fn cell_volume(&self) -> T {
        self.box_size.powi(-(self.dim as i32))
    }

    /// Integer coordinates of the site with the given ordinal.
    pub fn coords(&self, ordinal: usize) -> &[i32] {
        &self.coords[ordinal * self.dim..(ordinal + 1) * self.dim]
    }

    /// Ordinal of the site with integer coordinates `n`, if it lies in the box.
    pub fn ordinal(&self, n: &[i32]) -> Option<usize> {
        debug_assert_eq!(n.len(), self.dim);
        let axis = self.axis_len();
        let mut idx = 0usize;
        for &c in n {
            if c.abs() > self.half_width {
                return None;
            }
            idx = idx * axis + (c + self.half_width) as usize;
        }
        Some(idx)
    }

    /// The site `s = n / L` as a padded point.
    pub fn point(&self, ordinal: usize) -> Point<T> {
        let mut p = [T::zero(); MAX_DIM];
        let inv = self.box_size.recip();
        for (k, &c) in self.coords(ordinal).iter().enumerate() {
            p[k] = T::of(c as f64) * inv;
        }
        p
    }

    /// `|s|^2` of a site.
    pub fn abs_sq(&self, ordinal: usize) -> T {
        scalar::norm_sq(&self.point(ordinal))
    }

    pub fn points(&self) -> impl Iterator<Item = Point<T>> + '_ {
        (0..self.len()).map(move |i| self.point(i))
    }

    /// Same geometry (dimension, spacing and truncation).
    pub fn same_as(&self, other: &Self) -> bool {
        self.dim == other.dim
            && self.half_width == other.half_width
            && self.box_size == other.box_size
    }

    /// Largest `|omega|` over quartets `s, s1, s2, s3 = s1 + s2 - s` that all
    /// lie inside the truncated box.
    ///
    /// `omega = -2 (s1 - s).(s2 - s)` separates over axes and the box
    /// constraint is per-axis, so the extremes are sums of 1-D extremes.
    pub fn omega_max(&self) -> T {
        let m = self.half_width;
        let (mut lo, mut hi) = (0i64, 0i64);
        for (s, x, y) in (-m..=m).flat_map(|s| {
            (-2 * m..=2 * m).flat_map(move |x| (-2 * m..=2 * m).map(move |y| (s, x, y)))
        }) {
            let inside = |v: i32| v.abs() <= m;
            if inside(s + x) && inside(s + y) && inside(s + x + y) {
                let p = (x as i64) * (y as i64);
                lo = lo.min(p);
                hi = hi.max(p);
            }
        }
        let per_axis = hi.max(-lo) as f64;
        let l2 = self.box_size * self.box_size;
        T::of(2.0 * per_axis * self.dim as f64) / l2
    }
}

/// Damping `gamma_s = (1 + |s|^2)^{r_*}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DampingProfile<T> {
    pub r_star: T,
}

impl<T: Real> DampingProfile<T> {
    pub fn new(r_star: T) -> Result<Self> {
        if !(r_star.is_finite() && r_star > T::zero()) {
            return Err(invalid(
                "r_star",
                format!("must be finite and > 0, got {r_star}"),
            ));
        }
        Ok(Self { r_star })
    }

    /// `gamma` as a function of `|s|^2`.
    #[inline]
    pub fn gamma(&self, abs_sq: T) -> T {
        (T::one() + abs_sq).powf(self.r_star)
    }

    #[inline]
    pub fn gamma_at(&self, p: &[T]) -> T {
        self.gamma(scalar::norm_sq(p))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ForcingKind {
    Gaussian,
}

/// Forcing amplitude `b(s) = amplitude * exp(-|s|^2 / width^2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ForcingProfile<T> {
    pub kind: ForcingKind,
    pub amplitude: T,
    pub width: T,
}

impl<T: Real> ForcingProfile<T> {
    pub fn gaussian(amplitude: T, width: T) -> Result<Self> {
        if !(amplitude.is_finite() && amplitude > T::zero()) {
            return Err(invalid(
                "amplitude",
                format!("must be > 0, got {amplitude}"),
            ));
        }
        if !(width.is_finite() && width > T::zero()) {
            return Err(invalid("width", format!("must be > 0, got {width}")));
        }
        Ok(Self {
            kind: ForcingKind::Gaussian,
            amplitude,
            width,
        })
    }

    /// `b` as a function of `|s|^2`.
    #[inline]
    pub fn b(&self, abs_sq: T) -> T {
        match self.kind {
            ForcingKind::Gaussian => self.amplitude * (-abs_sq / (self.width * self.width)).exp(),
        }
    }

    #[inline]
    pub fn b_at(&self, p: &[T]) -> T {
        self.b(scalar::norm_sq(p))
    }

    /// Returns a copy with the amplitude multiplied by `factor`.
    pub fn scaled(&self, factor: T) -> Self {
        Self {
            amplitude: self.amplitude * factor,
            ..*self
        }
    }
}

impl<T: Real> Default for ForcingProfile<T> {
    fn default() -> Self {
        Self::gaussian(T::one(), T::one()).expect("default forcing")
    }
}

/// Damping and forcing together; houses `B(s) = b_s^2 / gamma_s`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Profiles<T> {
    pub damping: DampingProfile<T>,
    pub forcing: ForcingProfile<T>,
}

impl<T: Real> Profiles<T> {
    pub fn new(damping: DampingProfile<T>, forcing: ForcingProfile<T>) -> Self {
        Self { damping, forcing }
    }

    #[inline]
    pub fn gamma(&self, abs_sq: T) -> T {
        self.damping.gamma(abs_sq)
    }

    #[inline]
    pub fn b(&self, abs_sq: T) -> T {
        self.forcing.b(abs_sq)
    }

    /// `B(s) = b_s^2 / gamma_s`, the stationary variance of a zeroth-order mode.
    #[inline]
    pub fn big_b(&self, abs_sq: T) -> T {
        let b = self.b(abs_sq);
        b * b / self.gamma(abs_sq)
    }

    /// Smallest damping rate over the lattice.
    pub fn gamma_min(&self, lattice: &LatticeSpec<T>) -> T {
        (0..lattice.len())
            .map(|i| self.gamma(lattice.abs_sq(i)))
            .fold(T::infinity(), T::min)
    }

    /// `B = L^{-d} sum_s b_s^2`, the energy injection rate.
    pub fn injection_rate(&self, lattice: &LatticeSpec<T>) -> T {
        let sum: T = (0..lattice.len())
            .map(|i| {
                let b = self.b(lattice.abs_sq(i));
                b * b
            })
            .sum();
        sum * lattice.cell_volume()
    }
}

/// Complex amplitudes on a lattice.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField<T> {
    lattice: Arc<LatticeSpec<T>>,
    values: Vec<Complex<T>>,
}

impl<T: Real> SpectralField<T> {
    pub fn zeros(lattice: Arc<LatticeSpec<T>>) -> Self {
        let n = lattice.len();
        Self {
            lattice,
            values: vec![Complex::new(T::zero(), T::zero()); n],
        }
    }

    pub fn from_values(lattice: Arc<LatticeSpec<T>>, values: Vec<Complex<T>>) -> Result<Self> {
        if values.len() != lattice.len() {
            return Err(invalid(
                "values",
                format!("expected {} entries, got {}", lattice.len(), values.len()),
            ));
        }
        if values
            .iter()
            .any(|v| !(v.re.is_finite() && v.im.is_finite()))
        {
            return Err(Error::NonFinite("spectral field"));
        }
        Ok(Self { lattice, values })
    }

    pub fn from_fn(lattice: Arc<LatticeSpec<T>>, f: impl FnMut(usize) -> Complex<T>) -> Self {
        let values = (0..lattice.len()).map(f).collect();
        Self { lattice, values }
    }

    pub fn lattice(&self) -> &Arc<LatticeSpec<T>> {
        &self.lattice
    }

    pub fn values(&self) -> &[Complex<T>] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex<T>] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<Complex<T>> {
        self.values
    }

    pub fn scale(&self, factor: Complex<T>) -> Self {
        Self {
            lattice: self.lattice.clone(),
            values: self.values.iter().map(|&v| v * factor).collect(),
        }
    }

    pub(crate) fn check_same(&self, other: &Self) -> Result<()> {
        if Arc::ptr_eq(&self.lattice, &other.lattice) || self.lattice.same_as(&other.lattice) {
            Ok(())
        } else {
            Err(Error::LatticeMismatch)
        }
    }
}

/// Four-wave frequency mismatch `|s1|^2 + |s2|^2 - |s3|^2 - |s|^2` with
/// `s3 = s1 + s2 - s`, computed in the factored form `-2 (s1 - s).(s2 - s)`.
#[inline]
pub fn omega<T: Real>(s1: &[T], s2: &[T], s: &[T]) -> T {
    let mut acc = T::zero();
    for k in 0..s.len() {
        acc += (s1[k] - s[k]) * (s2[k] - s[k]);
    }
    -(acc + acc)
}

/// `||v||^2 = L^{-d} sum_s |v_s|^2`.
pub fn norm_sq<T: Real>(v: &SpectralField<T>) -> T {
    let sum: T = v.values.iter().map(|z| z.norm_sqr()).sum();
    sum * v.lattice.cell_volume()
}

/// Resonance indicator: 1 iff `s1 + s2 = s3 + s` and `{s1, s2} != {s3, s}`.
/// Arguments are integer lattice coordinates.
pub fn delta_prime(s1: &[i32], s2: &[i32], s3: &[i32], s: &[i32]) -> u8 {
    let conserved = (0..s.len()).all(|k| s1[k] + s2[k] == s3[k] + s[k]);
    let same_pairs = (s1 == s3 && s2 == s) || (s1 == s && s2 == s3);
    u8::from(conserved && !same_pairs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn site_counts() {
        let l = LatticeSpec::<f64>::new(2, 1.0, 1.0).unwrap();
        assert_eq!(l.len(), 9);
        let l = LatticeSpec::<f64>::new(2, 2.0, 1.0).unwrap();
        assert_eq!(l.len(), 25);
        assert_eq!(l.point(1)[1], -0.5);
        let l = LatticeSpec::<f64>::new(3, 1.0, 2.0).unwrap();
        assert_eq!(l.len(), 125);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(LatticeSpec::<f64>::new(1, 1.0, 1.0).is_err());
        assert!(LatticeSpec::<f64>::new(4, 1.0, 1.0).is_err());
        assert!(LatticeSpec::<f64>::new(2, 0.5, 4.0).is_err());
        assert!(LatticeSpec::<f64>::new(2, f64::NAN, 1.0).is_err());
        assert!(LatticeSpec::<f64>::new(2, 2.0, f64::INFINITY).is_err());
        assert!(LatticeSpec::<f64>::new(2, 2.0, 0.25).is_err());
    }

    #[test]
    fn lexicographic_order_and_bijection() {
        let l = LatticeSpec::<f64>::new(3, 2.0, 1.0).unwrap();
        for i in 0..l.len() {
            assert_eq!(l.ordinal(l.coords(i)), Some(i));
            if i > 0 {
                assert!(l.coords(i - 1) < l.coords(i));
            }
        }
        assert_eq!(l.ordinal(&[3, 0, 0]), None);
    }

    #[test]
    fn omega_examples() {
        let o = [0.0, 0.0];
        assert_eq!(omega(&[1.0, 0.0], &[0.0, 1.0], &o), 0.0);
        assert_eq!(omega(&[1.0, 0.0], &[1.0, 0.0], &o), -2.0);
        assert_eq!(omega(&[0.3, 0.7], &[-1.0, 2.0], &[0.3, 0.7]), 0.0);
    }

    #[test]
    fn norm_examples() {
        let l = Arc::new(LatticeSpec::<f64>::new(2, 1.0, 1.0).unwrap());
        assert_eq!(norm_sq(&SpectralField::zeros(l.clone())), 0.0);
        let ones = SpectralField::from_fn(l, |_| Complex::new(1.0, 0.0));
        assert_eq!(norm_sq(&ones), 9.0);
        let l = Arc::new(LatticeSpec::<f64>::new(2, 2.0, 1.0).unwrap());
        let ones = SpectralField::from_fn(l, |_| Complex::new(1.0, 0.0));
        assert_eq!(norm_sq(&ones), 25.0 / 4.0);
    }

    #[test]
    fn delta_prime_examples() {
        assert_eq!(delta_prime(&[1, 0], &[0, 1], &[1, 1], &[0, 0]), 1);
        assert_eq!(delta_prime(&[1, 0], &[0, 1], &[1, 0], &[0, 1]), 0);
        assert_eq!(delta_prime(&[1, 0], &[0, 1], &[0, 1], &[1, 0]), 0);
        assert_eq!(delta_prime(&[1, 0], &[0, 1], &[2, 1], &[0, 0]), 0);
    }

    #[test]
    fn omega_max_matches_enumeration() {
        let l = LatticeSpec::<f64>::new(2, 2.0, 1.0).unwrap();
        let mut best = 0.0f64;
        for i in 0..l.len() {
            for j in 0..l.len() {
                for k in 0..l.len() {
                    let (s, s1, s2) = (l.coords(i), l.coords(j), l.coords(k));
                    let s3: Vec<i32> = (0..2).map(|a| s1[a] + s2[a] - s[a]).collect();
                    if l.ordinal(&s3).is_some() {
                        best = best.max(omega(&l.point(j), &l.point(k), &l.point(i)).abs());
                    }
                }
            }
        }
        assert!((l.omega_max() - best).abs() < 1e-12);
    }

    #[test]
    fn gaussian_forcing_decays_faster_than_polynomials() {
        let f = ForcingProfile::<f64>::default();
        for p in [0, 4, 8, 12] {
            let tail = |r: f64| f.b(r * r) * (1.0 + r).powi(p);
            assert!(tail(40.0) < 1e-100);
            assert!(f.b(0.3) <= f.amplitude);
        }
        assert!(DampingProfile::new(0.0).is_err());
    }

    proptest! {
        #[test]
        fn omega_symmetry_and_expanded_form(
            a in prop::array::uniform3(-3.0f64..3.0),
            b in prop::array::uniform3(-3.0f64..3.0),
            c in prop::array::uniform3(-3.0f64..3.0),
        ) {
            prop_assert!((omega(&a, &b, &c) - omega(&b, &a, &c)).abs() < 1e-12);
            let s3: Vec<f64> = (0..3).map(|k| a[k] + b[k] - c[k]).collect();
            let expanded = scalar::norm_sq(&a) + scalar::norm_sq(&b) - scalar::norm_sq(&s3) - scalar::norm_sq(&c);
            prop_assert!((omega(&a, &b, &c) - expanded).abs() < 1e-10);
        }

        #[test]
        fn norm_invariant_under_global_phase(theta in 0.0f64..6.3, seed in 0u64..1000) {
            let l = Arc::new(LatticeSpec::<f64>::new(2, 2.0, 1.0).unwrap());
            let v = SpectralField::from_fn(l, |i| {
                let x = ((i as u64 * 2654435761 + seed) % 1000) as f64 / 500.0 - 1.0;
                Complex::new(x, 0.5 - x * x)
            });
            let rotated = v.scale(Complex::from_polar(1.0, theta));
            prop_assert!((norm_sq(&v) - norm_sq(&rotated)).abs() < 1e-12);
        }
    }
}
