//! Sample means with standard errors.

use num_complex::Complex;

use crate::scalar::Real;

/// Mean and standard error of a real sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate<T> {
    pub mean: T,
    pub stderr: T,
}

/// Mean and standard error of a complex sample; `stderr^2 = E|mean - mu|^2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexEstimate<T> {
    pub mean: Complex<T>,
    pub stderr: T,
}

/// Leave-one-out jackknife for the sample mean.
///
/// For the mean the jackknife variance coincides with `s^2 / n`; it is written
/// out so that the estimator is the same one used for derived statistics.
pub fn jackknife_mean<T: Real>(xs: &[T]) -> Estimate<T> {
    let n = xs.len();
    assert!(n >= 2, "jackknife needs at least two samples");
    let nf = T::of_usize(n);
    let total: T = xs.iter().copied().sum();
    let mean = total / nf;
    let nm1 = nf - T::one();
    let mut acc = T::zero();
    for &x in xs {
        let loo = (total - x) / nm1;
        acc += (loo - mean) * (loo - mean);
    }
    Estimate {
        mean,
        stderr: (acc * nm1 / nf).sqrt(),
    }
}

pub fn jackknife_mean_complex<T: Real>(zs: &[Complex<T>]) -> ComplexEstimate<T> {
    let re: Vec<T> = zs.iter().map(|z| z.re).collect();
    let im: Vec<T> = zs.iter().map(|z| z.im).collect();
    let (r, i) = (jackknife_mean(&re), jackknife_mean(&im));
    ComplexEstimate {
        mean: Complex::new(r.mean, i.mean),
        stderr: (r.stderr * r.stderr + i.stderr * i.stderr).sqrt(),
    }
}
