use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use wavekin_core::kinetic::density::Gaussian;
use wavekin_core::kinetic::quadrature::gauss_legendre;
use wavekin_core::kinetic::{
    i_integral, kinetic_integral, lorentz_integrand, McParams, QuadricQuadrature,
};
use wavekin_core::{Damping, Forcing, Profiles64};

fn gaussian(rng: &mut ChaCha8Rng) -> f64 {
    let u: f64 = rng.gen_range(f64::EPSILON..1.0);
    let v: f64 = rng.gen();
    (-2.0 * u.ln()).sqrt() * (std::f64::consts::TAU * v).cos()
}

fn mean_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let m = xs.iter().sum::<f64>() / n;
    let v = xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0);
    (m, (v / n).sqrt())
}

#[test]
fn quadric_measure_is_symmetric_under_swap() {
    let f = |x: &[f64; 3], y: &[f64; 3]| {
        let nx: f64 = x.iter().map(|v| v * v).sum();
        let ny: f64 = y.iter().map(|v| v * v).sum();
        (-nx - 2.0 * ny).exp() * (1.0 + 0.3 * x[0] + 0.2 * y[1] * y[1])
    };
    for (d, q) in [
        (2, QuadricQuadrature::new(2, 6.0, 32, 32, 64).unwrap()),
        (3, QuadricQuadrature::new(3, 6.0, 32, 8, 48).unwrap()),
    ] {
        let a = q.integrate(f);
        let b = q.integrate(|x, y| f(y, x));
        assert!((a - b).abs() <= 1e-9 * a.abs(), "d={d}: {a} vs {b}");
    }
}

/// `K` for `y = exp(-|p|^2)` from `delta(x.y) = (1/2 pi) int e^{i lambda x.y} d lambda`.
///
/// Each bracket term is a Gaussian in `(x, y)` that factorises over components,
/// so the inner integral is closed form and only the `lambda` integral is numeric.
fn kinetic_gaussian_fourier(s: &[f64]) -> f64 {
    let ys = (-s.iter().map(|v| v * v).sum::<f64>()).exp();
    // y(s + x), y(s + y), y(s + x + y) as coefficient vectors over (u, v)
    let c = [[1.0, 0.0], [0.0, 1.0], [1.0, 1.0]];
    let terms: [(&[usize], f64); 4] = [
        (&[0, 1, 2], 1.0),
        (&[0, 1], ys),
        (&[0, 2], -ys),
        (&[1, 2], -ys),
    ];
    let factor = |set: &[usize], sk: f64, lambda: f64| {
        let mut m = [[0.0; 2]; 2];
        let mut b = [0.0; 2];
        for &i in set {
            for p in 0..2 {
                b[p] -= 2.0 * sk * c[i][p];
                for q in 0..2 {
                    m[p][q] += c[i][p] * c[i][q];
                }
            }
        }
        let off = Complex64::new(m[0][1], -lambda / 2.0);
        let det = m[0][0] * m[1][1] - off * off;
        // b^T A^{-1} b with A = [[m00, off], [off, m11]]
        let quad = (b[0] * b[0] * m[1][1] - 2.0 * b[0] * b[1] * off + b[1] * b[1] * m[0][0]) / det;
        let cst = -(set.len() as f64) * sk * sk;
        std::f64::consts::PI / det.sqrt() * (quad / 4.0 + cst).exp()
    };
    let rule = gauss_legendre(
        2000,
        -std::f64::consts::FRAC_PI_2,
        std::f64::consts::FRAC_PI_2,
    );
    let mut total = 0.0;
    for (theta, w) in rule {
        let lambda = 2.0 * theta.tan();
        let jac = 2.0 / theta.cos().powi(2);
        let mut acc = Complex64::new(0.0, 0.0);
        for (set, coef) in terms {
            acc += coef
                * s.iter()
                    .map(|&sk| factor(set, sk, lambda))
                    .product::<Complex64>();
        }
        total += w * jac * acc.re;
    }
    // 2 pi * (1 / 2 pi) * int d lambda
    total
}

#[test]
fn kinetic_integral_matches_fourier_oracle() {
    let g = Gaussian {
        amplitude: 1.0,
        width: 1.0,
    };
    let quad = QuadricQuadrature::new(2, 6.0, 32, 32, 64).unwrap();
    for s in [[0.0, 0.0], [0.5, 0.0], [0.6, -0.9]] {
        let k = kinetic_integral(&g, &s, &quad).unwrap();
        let oracle = kinetic_gaussian_fourier(&s);
        assert!(
            (k - oracle).abs() <= 1e-9 * oracle.abs(),
            "s={s:?}: {k} vs {oracle}"
        );
    }
    let k3 = kinetic_integral(
        &g,
        &[0.4, 0.0, -0.3],
        &QuadricQuadrature::new(3, 6.0, 24, 12, 64).unwrap(),
    )
    .unwrap();
    let oracle3 = kinetic_gaussian_fourier(&[0.4, 0.0, -0.3]);
    assert!(
        (k3 - oracle3).abs() <= 1e-9 * oracle3.abs(),
        "d=3: {k3} vs {oracle3}"
    );
}

/// Importance-sampled `I_s` against plain Gaussian sampling of `(x, y)`.
#[test]
fn lorentz_integral_matches_plain_monte_carlo() {
    let profiles = Profiles64::new(
        Damping::new(1.0).unwrap(),
        Forcing::gaussian(1.0, 1.0).unwrap(),
    );
    let (s, nu) = ([0.3, -0.2], 0.2);
    let est = i_integral(&profiles, &s, nu, &McParams::new(1 << 20, 17)).unwrap();

    let sigma = 0.7f64;
    let norm = (std::f64::consts::TAU * sigma * sigma).powi(2);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let samples: Vec<f64> = (0..2_000_000)
        .map(|_| {
            let z: Vec<f64> = (0..4).map(|_| sigma * gaussian(&mut rng)).collect();
            let p = (-z.iter().map(|v| v * v).sum::<f64>() / (2.0 * sigma * sigma)).exp() / norm;
            lorentz_integrand(&profiles, &s, nu, &z[..2], &z[2..]) / p
        })
        .collect();
    let (m, se) = mean_se(&samples);
    let tol = 4.0 * (se * se + est.stderr * est.stderr).sqrt();
    assert!(
        (m - est.mean).abs() <= tol,
        "plain {m} +- {se}, importance {} +- {}",
        est.mean,
        est.stderr
    );
}

#[test]
fn gaussian_collision_converges_on_refinement() {
    let g = Gaussian {
        amplitude: 1.0,
        width: 1.0,
    };
    let q = QuadricQuadrature::new(2, 6.0, 32, 32, 64).unwrap();
    for s in [[0.0f64, 0.0], [0.7, 0.4], [1.5, 0.0]] {
        let a = kinetic_integral(&g, &s, &q).unwrap();
        let b = kinetic_integral(&g, &s, &q.refined(2).unwrap()).unwrap();
        let scale = kinetic_integral(&g, &[0.0, 0.0], &q).unwrap().abs();
        assert!((a - b).abs() < 1e-4 * scale, "s={s:?}: {a} vs {b}");
    }
}
