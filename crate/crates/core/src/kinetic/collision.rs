//! The cubic wave kinetic integral and the asymptotic integral `I^0`.

use crate::error::{invalid, Error, Result};
use crate::kinetic::density::SpectralDensity;
use crate::kinetic::quadrature::QuadricQuadrature;
use crate::lattice::{Point, Profiles};
use crate::scalar::{self, Real};

fn shifted<T: Real>(s: &[T], v: &Point<T>) -> Point<T> {
    let mut p = [T::zero(); 3];
    for k in 0..s.len() {
        p[k] = s[k] + v[k];
    }
    p
}

fn shifted2<T: Real>(s: &[T], x: &Point<T>, y: &Point<T>) -> Point<T> {
    let mut p = [T::zero(); 3];
    for k in 0..s.len() {
        p[k] = s[k] + x[k] + y[k];
    }
    p
}

fn check_point<T: Real>(s: &[T], quad: &QuadricQuadrature<T>) -> Result<()> {
    if s.len() != quad.dim() {
        return Err(invalid("s", format!("expected {} components", quad.dim())));
    }
    if s.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("point"));
    }
    Ok(())
}

/// The division-free collision bracket
/// `y1 y2 y3 + y1 y2 ys - y2 y3 ys - y1 y3 ys`
/// `= y1 y2 y3 ys (1/ys + 1/y3 - 1/y1 - 1/y2)`.
#[inline]
pub fn bracket<T: Real>(y1: T, y2: T, y3: T, ys: T) -> T {
    y1 * y2 * (y3 + ys) - y3 * ys * (y1 + y2)
}

/// `K_s(y) = 2 pi int_Sigma [y1 y2 y3 + y1 y2 ys - y2 y3 ys - y1 y3 ys] |z|^{-1} dz`
/// with `y1 = y(s + x)`, `y2 = y(s + y)`, `y3 = y(s + x + y)`.
pub fn kinetic_integral<T: Real, D: SpectralDensity<T> + ?Sized>(
    y: &D,
    s: &[T],
    quad: &QuadricQuadrature<T>,
) -> Result<T> {
    check_point(s, quad)?;
    let d = s.len();
    let ys = y.eval(s);
    let sum = quad.integrate(|x, v| {
        let y1 = y.eval(&shifted(s, x)[..d]);
        let y2 = y.eval(&shifted(s, v)[..d]);
        let y3 = y.eval(&shifted2(s, x, v)[..d]);
        bracket(y1, y2, y3, ys)
    });
    let k = T::TAU() * sum;
    if !k.is_finite() {
        return Err(Error::NonFinite("kinetic integral"));
    }
    Ok(k)
}

/// `I^0_s = (pi / gamma_s) int_Sigma B(s + x) B(s + y) B(s + x + y) |z|^{-1} dz`.
pub fn i0_integral<T: Real>(
    profiles: &Profiles<T>,
    s: &[T],
    quad: &QuadricQuadrature<T>,
) -> Result<T> {
    check_point(s, quad)?;
    let d = s.len();
    let big_b = |p: &Point<T>| profiles.big_b(scalar::norm_sq(&p[..d]));
    let sum = quad.integrate(|x, v| {
        big_b(&shifted(s, x)) * big_b(&shifted(s, v)) * big_b(&shifted2(s, x, v))
    });
    Ok(T::PI() / profiles.damping.gamma_at(s) * sum)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kinetic::density::{Constant, Gaussian, RayleighJeans};
    use crate::lattice::{DampingProfile, ForcingProfile};
    use proptest::prelude::*;

    fn quad2() -> QuadricQuadrature<f64> {
        QuadricQuadrature::new(2, 6.0, 24, 24, 48).unwrap()
    }

    #[test]
    fn constant_density_is_a_null() {
        let k = kinetic_integral(&Constant(2.5), &[0.3, -0.1], &quad2()).unwrap();
        assert!(k.abs() < 1e-12);
    }

    #[test]
    fn rayleigh_jeans_is_a_null() {
        let rj = RayleighJeans {
            alpha: 1.0,
            beta: [0.2, -0.1, 0.0],
            gamma: 0.5,
        };
        let g = Gaussian {
            amplitude: 1.0,
            width: 1.0,
        };
        let q = quad2();
        let scale = kinetic_integral(&g, &[0.0, 0.0], &q).unwrap().abs();
        let k = kinetic_integral(&rj, &[0.4, 0.2], &q).unwrap();
        assert!(k.abs() < 1e-8 * scale, "{k} vs {scale}");
    }

    #[test]
    fn cubic_homogeneity() {
        let q = quad2();
        let g = Gaussian {
            amplitude: 1.0,
            width: 1.0,
        };
        let g3 = Gaussian {
            amplitude: 3.0,
            width: 1.0,
        };
        let k = kinetic_integral(&g, &[0.5, 0.0], &q).unwrap();
        let k3 = kinetic_integral(&g3, &[0.5, 0.0], &q).unwrap();
        assert!((k3 - 27.0 * k).abs() <= 1e-13 * k3.abs());
    }

    #[test]
    fn i0_scales_with_sixth_power_of_forcing() {
        let q = quad2();
        let p = Profiles::new(
            DampingProfile::new(1.0).unwrap(),
            ForcingProfile::gaussian(1.0, 1.0).unwrap(),
        );
        let p2 = Profiles::new(p.damping, p.forcing.scaled(2.0));
        let a = i0_integral(&p, &[0.0, 0.0], &q).unwrap();
        let b = i0_integral(&p2, &[0.0, 0.0], &q).unwrap();
        assert!((b - 64.0 * a).abs() <= 1e-13 * b);
        let tiny = Profiles::new(p.damping, ForcingProfile::gaussian(1e-120, 1.0).unwrap());
        assert_eq!(i0_integral(&tiny, &[0.0, 0.0], &q).unwrap(), 0.0);
    }

    #[test]
    fn rotation_equivariance_for_radial_density() {
        let q = quad2();
        let g = Gaussian {
            amplitude: 1.0,
            width: 1.0,
        };
        let a = kinetic_integral(&g, &[0.6, 0.0], &q).unwrap();
        let b = kinetic_integral(&g, &[0.6 * 0.6, 0.6 * 0.8], &q).unwrap();
        assert!((a - b).abs() < 1e-8 * a.abs());
    }

    proptest! {
        #[test]
        fn bracket_identity(y in prop::array::uniform4(1e-3f64..10.0)) {
            let [a, b, c, d] = y;
            let div = a * b * c * d * (1.0 / d + 1.0 / c - 1.0 / a - 1.0 / b);
            let scale = a * b * c + a * b * d + b * c * d + a * c * d;
            prop_assert!((bracket(a, b, c, d) - div).abs() <= 1e-10 * scale);
        }

        #[test]
        fn bracket_symmetric_in_first_pair(y in prop::array::uniform4(-5.0f64..5.0)) {
            let [a, b, c, d] = y;
            prop_assert_eq!(bracket(a, b, c, d), bracket(b, a, c, d));
        }
    }
}
