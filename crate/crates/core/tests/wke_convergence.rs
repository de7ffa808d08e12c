use std::sync::Arc;

use wavekin_core::kinetic::QuadricQuadrature;
use wavekin_core::wke::{steady_state, wke_solve, RadialGrid, WkeProblem};
use wavekin_core::{Damping, Forcing, Profiles64};

fn problem(eps: f64) -> WkeProblem<f64> {
    let p = Profiles64::new(
        Damping::new(1.0).unwrap(),
        Forcing::gaussian(1.0, 1.0).unwrap(),
    );
    WkeProblem::new(
        p,
        eps,
        Arc::new(RadialGrid::chebyshev(24, 6.0).unwrap()),
        QuadricQuadrature::new(2, 6.0, 12, 12, 24).unwrap(),
    )
    .unwrap()
}

fn sup_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

#[test]
fn time_stepping_is_first_order() {
    let pr = problem(0.3);
    let finals: Vec<Vec<f64>> = [0.1, 0.05, 0.025]
        .iter()
        .map(|&dt| {
            wke_solve(&pr, 2.0, &[0.0], dt).unwrap().states[0]
                .values
                .clone()
        })
        .collect();
    let ratio = sup_diff(&finals[0], &finals[1]) / sup_diff(&finals[1], &finals[2]);
    assert!((1.6..=2.4).contains(&ratio), "ratio {ratio}");
}

#[test]
fn long_solve_settles_on_the_fixed_point() {
    let pr = problem(0.3);
    let ss = steady_state(&pr, 1e-11, 500).unwrap();
    let tr = wke_solve(&pr, 12.0, &[0.0], 0.02).unwrap();
    let scale = ss.state.values.iter().cloned().fold(0.0, f64::max);
    let gap = sup_diff(&tr.states[0].values, &ss.state.values);
    assert!(gap <= 1e-8 * scale, "gap {gap:e}");
    // the nonlinear correction is visible at this eps
    assert!(sup_diff(&ss.state.values, &pr.linear_steady_state()) > 1e-3 * scale);
}
