use std::sync::Arc;

use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use wavekin_core::quasi::{y_operator, y_operator_bruteforce};
use wavekin_core::{Field, Lattice};

fn random_field(lat: &Arc<Lattice>, rng: &mut ChaCha8Rng) -> Field {
    Field::from_fn(lat.clone(), |_| {
        Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    })
}

fn sup(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

#[test]
fn fft_matches_direct_sum_on_random_lattices() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut sizes = Vec::new();
    for _ in 0..50 {
        // up to 13 sites per axis in d = 2, 5 in d = 3
        let (d, m_max) = if rng.gen_bool(0.8) { (2, 6) } else { (3, 2) };
        let box_size = [1.0, 2.0, 3.0][rng.gen_range(0..3)];
        let m = rng.gen_range(1..=m_max);
        let cutoff = (m as f64 + 0.5) / box_size;
        let lat = Arc::new(Lattice::new(d, box_size, cutoff).unwrap());
        assert_eq!(lat.half_width(), m);
        let (a1, a2, a3) = (
            random_field(&lat, &mut rng),
            random_field(&lat, &mut rng),
            random_field(&lat, &mut rng),
        );
        let t = rng.gen_range(-20.0..20.0);
        let fast = y_operator(&a1, &a2, &a3, t).unwrap();
        let slow = y_operator_bruteforce(&a1, &a2, &a3, t).unwrap();
        let diff: Vec<Complex64> = fast
            .values()
            .iter()
            .zip(slow.values())
            .map(|(a, b)| a - b)
            .collect();
        let rel = sup(&diff) / sup(slow.values());
        assert!(rel <= 1e-10, "d={d} L={box_size} m={m}: {rel:e}");
        sizes.push(lat.len());
    }
    assert!(sizes.contains(&169));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn interaction_is_orthogonal_to_i_a(seed in any::<u64>(), t in -50.0f64..50.0, scale in 0.1f64..3.0) {
        let lat = Arc::new(Lattice::new(2, 2.0, 1.0).unwrap());
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_field(&lat, &mut rng).scale(Complex64::new(scale, 0.0));
        let y = y_operator(&a, &a, &a, t).unwrap();
        let i = Complex64::new(0.0, 1.0);
        let inner: f64 = a.values().iter().zip(y.values()).map(|(x, v)| (x * (i * v).conj()).re).sum();
        let size: f64 = a.values().iter().zip(y.values()).map(|(x, v)| x.norm() * v.norm()).sum();
        prop_assert!(inner.abs() <= 1e-10 * size.max(1.0), "{inner:e}");
    }
}
