//! Weighted sup-norm distances between Monte-Carlo spectra and kinetic solutions.

use crate::error::{invalid, Error, Result};
use crate::quasi::spectrum::EnergySpectrumEstimate;
use crate::scalar::Real;
use crate::wke::solver::WkeState;

/// `|x|_r = sup_s (1 + |s|)^r |x(s)|` for one weight exponent.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeminormRow<T> {
    pub r: i32,
    pub value: T,
    /// Same sup with each `|N_s - m_s|` reduced by one standard error, floored at zero.
    pub noise_floored: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SeminormReport<T> {
    pub tau: T,
    pub rows: Vec<SeminormRow<T>>,
}

impl<T: Real> SeminormReport<T> {
    pub fn row(&self, r: i32) -> Option<&SeminormRow<T>> {
        self.rows.iter().find(|row| row.r == r)
    }
}

/// Weighted distances between `N_s` and `m(|s|)` over the lattice sites.
pub fn compare_spectra<T: Real>(
    n: &EnergySpectrumEstimate<T>,
    m: &WkeState<T>,
    r_list: &[i32],
) -> Result<SeminormReport<T>> {
    let tol = T::of(1e-9) * T::one().max(n.tau.abs());
    if (n.tau - m.tau).abs() > tol {
        return Err(Error::TimeMismatch {
            left: n.tau.to_f64_lossy(),
            right: m.tau.to_f64_lossy(),
        });
    }
    let lat = &n.lattice;
    let it = m.interpolant()?;
    let r_max = m.grid.r_max();
    let mut diffs = Vec::with_capacity(lat.len());
    for s in 0..lat.len() {
        let rad = lat.abs_sq(s).sqrt();
        if rad > r_max {
            return Err(invalid("lattice", "lattice radii exceed the kinetic grid"));
        }
        let d = (n.mean[s] - it.at(rad)).abs();
        diffs.push((rad, d, (d - n.stderr[s]).max(T::zero())));
    }
    let rows = r_list
        .iter()
        .map(|&r| {
            let w = |rad: T| (T::one() + rad).powi(r);
            SeminormRow {
                r,
                value: diffs
                    .iter()
                    .map(|&(x, d, _)| w(x) * d)
                    .fold(T::zero(), T::max),
                noise_floored: diffs
                    .iter()
                    .map(|&(x, _, f)| w(x) * f)
                    .fold(T::zero(), T::max),
            }
        })
        .collect();
    Ok(SeminormReport { tau: n.tau, rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{LatticeSpec, Profiles};
    use crate::stats::Estimate;
    use crate::wke::grid::RadialGrid;
    use std::sync::Arc;

    fn estimate(mean: Vec<f64>, stderr: Vec<f64>, tau: f64) -> EnergySpectrumEstimate<f64> {
        let lattice = Arc::new(LatticeSpec::new(2, 1.0, 1.0).unwrap());
        let z = vec![
            Estimate {
                mean: 0.0,
                stderr: 0.0
            };
            lattice.len()
        ];
        EnergySpectrumEstimate {
            lattice,
            nu: 0.1,
            epsilon: 0.0,
            rho: 0.0,
            tau,
            n_realizations: 2,
            mean,
            stderr,
            terms: [z.clone(), z.clone(), z.clone(), z.clone(), z],
        }
    }

    #[test]
    fn identical_inputs_give_zero_and_mismatch_is_rejected() {
        let p = Profiles::<f64>::new(
            crate::lattice::DampingProfile::new(1.0).unwrap(),
            crate::lattice::ForcingProfile::default(),
        );
        let grid = Arc::new(RadialGrid::chebyshev(64, 6.0).unwrap());
        let values: Vec<f64> = grid.radii().iter().map(|&r| p.big_b(r * r)).collect();
        let m = WkeState {
            tau: 0.0,
            grid,
            values,
        };
        let it = m.interpolant().unwrap();
        let lat = LatticeSpec::<f64>::new(2, 1.0, 1.0).unwrap();
        let mean: Vec<f64> = (0..9).map(|s| it.at(lat.abs_sq(s).sqrt())).collect();
        let rep =
            compare_spectra(&estimate(mean.clone(), vec![0.01; 9], 0.0), &m, &[0, 2, 4]).unwrap();
        assert!(rep
            .rows
            .iter()
            .all(|r| r.value == 0.0 && r.noise_floored == 0.0));
        let shifted: Vec<f64> = mean.iter().map(|v| v + 0.1).collect();
        let rep = compare_spectra(&estimate(shifted, vec![0.04; 9], 0.0), &m, &[0, 2]).unwrap();
        assert!((rep.row(0).unwrap().value - 0.1).abs() < 1e-12);
        assert!((rep.row(0).unwrap().noise_floored - 0.06).abs() < 1e-12);
        let corner = (1.0 + 2f64.sqrt()).powi(2);
        assert!((rep.row(2).unwrap().value - 0.1 * corner).abs() < 1e-12);
        assert!(compare_spectra(&estimate(mean, vec![0.0; 9], 1.0), &m, &[0]).is_err());
    }
}
