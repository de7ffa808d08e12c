//! The lattice sum
//! `J_s = (2 nu^2 / gamma_s) L^{-2d} sum' Gamma B1 B2 B3 / (omega^2 + (nu Gamma)^2)`
//! over pairs `(s1, s2)` with `s3 = s1 + s2 - s` in the lattice and
//! `{s1, s2} != {s3, s}`.

use crate::error::{invalid, Error, Result};
use crate::lattice::{LatticeSpec, Profiles};
use crate::scalar::Real;

/// Pair budget for [`j_lattice_sum`].
pub const PAIR_LIMIT: u128 = 1_000_000_000;

pub fn j_lattice_sum<T: Real>(
    profiles: &Profiles<T>,
    s: &[i32],
    nu: T,
    lattice: &LatticeSpec<T>,
) -> Result<T> {
    let d = lattice.dim();
    if s.len() != d {
        return Err(invalid("s", format!("expected {d} integer coordinates")));
    }
    let Some(s_ord) = lattice.ordinal(s) else {
        return Err(invalid("s", "site outside the lattice"));
    };
    if !(nu.is_finite() && nu > T::zero()) {
        return Err(invalid("nu", format!("must be > 0, got {nu}")));
    }
    let n = lattice.len();
    let work = (n as u128) * (n as u128);
    if work > PAIR_LIMIT {
        return Err(Error::WorkGuard {
            work,
            limit: PAIR_LIMIT,
        });
    }
    let gamma: Vec<T> = (0..n).map(|i| profiles.gamma(lattice.abs_sq(i))).collect();
    let big_b: Vec<T> = (0..n).map(|i| profiles.big_b(lattice.abs_sq(i))).collect();
    let m = lattice.half_width();
    let axis = lattice.axis_len() as i64;
    let inv_l2 = T::one() / (lattice.box_size() * lattice.box_size());
    let gs = gamma[s_ord];
    let mut total = T::zero();
    let mut n3 = [0i32; 3];
    for i1 in 0..n {
        let c1 = lattice.coords(i1);
        let x: Vec<i32> = (0..d).map(|k| c1[k] - s[k]).collect();
        let mut row = T::zero();
        'pairs: for i2 in 0..n {
            if i1 == s_ord || i2 == s_ord {
                // s1 = s forces s3 = s2 and s2 = s forces s3 = s1: excluded pairs
                continue;
            }
            let c2 = lattice.coords(i2);
            let mut dot = 0i64;
            let mut i3 = 0i64;
            for k in 0..d {
                n3[k] = c1[k] + c2[k] - s[k];
                if n3[k].abs() > m {
                    continue 'pairs;
                }
                i3 = i3 * axis + (n3[k] + m) as i64;
                dot += x[k] as i64 * (c2[k] - s[k]) as i64;
            }
            let i3 = i3 as usize;
            let big_gamma = gamma[i1] + gamma[i2] + gamma[i3] + gs;
            let omega = T::of(-2.0 * dot as f64) * inv_l2;
            let nug = nu * big_gamma;
            row += big_gamma * big_b[i1] * big_b[i2] * big_b[i3] / (omega * omega + nug * nug);
        }
        total += row;
    }
    let vol = lattice.cell_volume();
    Ok((nu + nu) * nu / gs * vol * vol * total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{delta_prime, omega, DampingProfile, ForcingProfile};

    fn profiles() -> Profiles<f64> {
        Profiles::new(
            DampingProfile::new(1.0).unwrap(),
            ForcingProfile::gaussian(1.0, 1.0).unwrap(),
        )
    }

    /// Loops in the opposite order with explicit `delta'` and `omega`.
    fn swapped(p: &Profiles<f64>, s: &[i32], nu: f64, lat: &LatticeSpec<f64>) -> f64 {
        let so = lat.ordinal(s).unwrap();
        let ps = lat.point(so);
        let mut acc = 0.0;
        for i2 in 0..lat.len() {
            for i1 in 0..lat.len() {
                let (c1, c2) = (lat.coords(i1), lat.coords(i2));
                let n3: Vec<i32> = (0..2).map(|k| c1[k] + c2[k] - s[k]).collect();
                let Some(i3) = lat.ordinal(&n3) else { continue };
                if delta_prime(c1, c2, &n3, s) == 0 {
                    continue;
                }
                let g: f64 = [i1, i2, i3, so]
                    .iter()
                    .map(|&i| p.gamma(lat.abs_sq(i)))
                    .sum();
                let w = omega(&lat.point(i1)[..2], &lat.point(i2)[..2], &ps[..2]);
                let b: f64 = [i1, i2, i3]
                    .iter()
                    .map(|&i| p.big_b(lat.abs_sq(i)))
                    .product();
                acc += g * b / (w * w + nu * nu * g * g);
            }
        }
        2.0 * nu * nu / p.gamma(lat.abs_sq(so)) * lat.cell_volume().powi(2) * acc
    }

    #[test]
    fn matches_swapped_loop_oracle() {
        let lat = LatticeSpec::new(2, 2.0, 2.0).unwrap();
        for s in [[0, 0], [1, -2], [4, 4]] {
            let a = j_lattice_sum(&profiles(), &s, 0.2, &lat).unwrap();
            let b = swapped(&profiles(), &s, 0.2, &lat);
            assert!((a - b).abs() <= 1e-13 * b, "{a} vs {b}");
        }
    }

    #[test]
    fn vanishes_without_forcing() {
        let lat = LatticeSpec::new(2, 2.0, 1.0).unwrap();
        let p = Profiles::new(
            DampingProfile::new(1.0).unwrap(),
            ForcingProfile::gaussian(1e-120, 1.0).unwrap(),
        );
        assert_eq!(j_lattice_sum(&p, &[0, 0], 0.2, &lat).unwrap(), 0.0);
    }

    #[test]
    fn guards() {
        let lat = LatticeSpec::new(2, 2.0, 1.0).unwrap();
        assert!(j_lattice_sum(&profiles(), &[9, 0], 0.2, &lat).is_err());
        assert!(j_lattice_sum(&profiles(), &[0, 0], 0.0, &lat).is_err());
        let big = LatticeSpec::new(3, 8.0, 2.0).unwrap();
        assert!(matches!(
            j_lattice_sum(&profiles(), &[0, 0, 0], 0.2, &big),
            Err(Error::WorkGuard { .. })
        ));
    }
}
