//! The FFT interaction operator against the direct double sum, and the
//! orthogonality `Re<a, i Y(a, a, a; t)> = 0` that conserves the norm.

use std::sync::Arc;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use wavekin_core::quasi::{y_operator, y_operator_bruteforce};
use wavekin_core::{Field, Lattice};

use crate::config::Materialized;
use crate::error::Result;
use crate::output::{Check, Outcome, Table};

pub const TOL: f64 = 1e-10;

/// Largest lattice exercised: 13 sites per axis in `d = 2`.
const M_MAX_2D: i32 = 6;
const M_MAX_3D: i32 = 2;

fn random_lattice(rng: &mut ChaCha8Rng, first: bool) -> Result<Arc<Lattice>> {
    let (d, m) = if first {
        (2, M_MAX_2D)
    } else if rng.gen_bool(0.8) {
        (2, rng.gen_range(1..=M_MAX_2D))
    } else {
        (3, rng.gen_range(1..=M_MAX_3D))
    };
    let box_size = [1.0, 2.0, 3.0][rng.gen_range(0..3)];
    let cutoff = (f64::from(m) + 0.5) / box_size;
    Ok(Arc::new(Lattice::new(d, box_size, cutoff)?))
}

fn random_field(lat: &Arc<Lattice>, rng: &mut ChaCha8Rng) -> Field {
    Field::from_fn(lat.clone(), |_| {
        Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    })
}

fn sup(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn run(cfg: &Materialized) -> Result<Outcome> {
    let n_fields = cfg.numerics().n_fields.unwrap_or(1);
    let n_trials = cfg.numerics().n_trials.unwrap_or(1);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.rng_seed());

    let mut fields = Table::new(
        "convolution",
        &["field", "d", "L", "n_sites", "t", "rel_error"],
    );
    let (mut worst, mut largest) = (0.0f64, 0usize);
    for k in 0..n_fields {
        let lat = random_lattice(&mut rng, k == 0)?;
        let a: Vec<Field> = (0..3).map(|_| random_field(&lat, &mut rng)).collect();
        let t = rng.gen_range(-20.0..20.0);
        let fast = y_operator(&a[0], &a[1], &a[2], t)?;
        let slow = y_operator_bruteforce(&a[0], &a[1], &a[2], t)?;
        let diff: Vec<Complex64> = fast
            .values()
            .iter()
            .zip(slow.values())
            .map(|(x, y)| x - y)
            .collect();
        let rel = sup(&diff) / sup(slow.values());
        worst = worst.max(rel);
        largest = largest.max(lat.len());
        fields.push(vec![
            k.into(),
            lat.dim().into(),
            lat.box_size().into(),
            lat.len().into(),
            t.into(),
            rel.into(),
        ]);
    }

    let mut cons = Table::new(
        "conservation",
        &[
            "trial", "d", "L", "n_sites", "t", "re_inner", "scale", "rel",
        ],
    );
    let mut worst_c = 0.0f64;
    let i = Complex64::new(0.0, 1.0);
    for k in 0..n_trials {
        let lat = random_lattice(&mut rng, false)?;
        let amp = rng.gen_range(0.1..3.0);
        let a = random_field(&lat, &mut rng).scale(Complex64::new(amp, 0.0));
        let t = rng.gen_range(-50.0..50.0);
        let y = y_operator(&a, &a, &a, t)?;
        let inner: f64 = a
            .values()
            .iter()
            .zip(y.values())
            .map(|(x, v)| (x * (i * v).conj()).re)
            .sum();
        let scale: f64 = a
            .values()
            .iter()
            .zip(y.values())
            .map(|(x, v)| x.norm() * v.norm())
            .sum();
        let rel = inner.abs() / scale;
        worst_c = worst_c.max(rel);
        cons.push(vec![
            k.into(),
            lat.dim().into(),
            lat.box_size().into(),
            lat.len().into(),
            t.into(),
            inner.into(),
            scale.into(),
            rel.into(),
        ]);
    }

    let mut out = Outcome::default();
    out.checks.push(Check::new(
        "convolution",
        worst <= TOL,
        format!("{n_fields} random fields on up to {largest} sites: largest relative sup error {worst:e} (tolerance {TOL:e})"),
    ));
    out.checks.push(Check::new(
        "conservation",
        worst_c <= TOL,
        format!("{n_trials} random (a, t): largest |Re<a, iY>| / sum |a||Y| = {worst_c:e} (tolerance {TOL:e})"),
    ));
    out.summarize("largest_lattice", largest);
    out.tables.push(fields);
    out.tables.push(cons);
    Ok(out)
}
