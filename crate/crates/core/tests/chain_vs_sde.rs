//! The Duhamel chain against the full equation driven by the same noise:
//! path by path, `a = a0 + rho a1 + rho^2 a2 + O(rho^3)`.

use std::sync::Arc;

use num_complex::Complex64;
use wavekin_core::quasi::{
    full_sde_integrate, max_step, sample_chaos_ensemble, SdeConfig, SpectrumConfig,
};
use wavekin_core::{Damping, Forcing, Lattice, Profiles64};

const NU: f64 = 0.1;
const SEED: u64 = 31;

fn setup() -> (Arc<Lattice>, Profiles64, f64) {
    let lat = Arc::new(Lattice::new(2, 2.0, 2.0).unwrap());
    let p = Profiles64::new(
        Damping::new(1.0).unwrap(),
        Forcing::gaussian(1.0, 1.0).unwrap(),
    );
    let h = max_step(&lat, NU);
    (lat, p, h)
}

/// Largest `|a - (a0 + rho a1 + rho^2 a2)|` over sites and realizations.
fn remainder(rho: f64) -> f64 {
    let (lat, p, h) = setup();
    let n = 3;
    let sde = SdeConfig {
        lattice: lat.clone(),
        profiles: p,
        nu: NU,
        epsilon: rho * rho * NU,
        horizon: 1.0,
        report_times: vec![0.25],
        h,
        n_realizations: n,
        seed: SEED,
    };
    let (finals, _) = full_sde_integrate(&sde).unwrap();
    let ens = sample_chaos_ensemble(&SpectrumConfig {
        lattice: lat.clone(),
        profiles: p,
        nu: NU,
        horizon: 1.0,
        tau: 0.25,
        h,
        n_realizations: n,
        seed: SEED,
    })
    .unwrap();
    let mut worst = 0.0f64;
    for (r, fin) in finals.iter().enumerate() {
        for s in 0..lat.len() {
            let [a0, a1, a2] = *ens.sample(r, s);
            let q: Complex64 = a0 + a1 * rho + a2 * (rho * rho);
            worst = worst.max((fin.values()[s] - q).norm());
        }
    }
    worst
}

#[test]
fn chain_is_the_taylor_expansion_of_the_full_equation() {
    assert_eq!(remainder(0.0), 0.0);
    let (r1, r2, r3) = (remainder(0.2), remainder(0.1), remainder(0.05));
    // third order: halving rho divides the remainder by about 8
    for (a, b) in [(r1, r2), (r2, r3)] {
        let ratio = a / b;
        assert!((6.0..10.0).contains(&ratio), "{a:e} / {b:e} = {ratio}");
    }
}
