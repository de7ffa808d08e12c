//! Continuum integrals: `J_s` against `I_s` across box sizes, `I_s` against
//! `nu I^0_s` as `nu` decreases, and the nulls of the collision integral.

use wavekin_core::kinetic::density::{Constant, FnDensity, Gaussian, RayleighJeans};
use wavekin_core::kinetic::{
    i0_integral, i_integral, j_lattice_sum, kinetic_integral, McParams, QuadricQuadrature,
    SpectralDensity,
};
use wavekin_core::Estimate;

use super::coord_names;
use crate::config::Materialized;
use crate::error::{invalid, CliError, Result};
use crate::output::{Cell, Check, Outcome, Table};

/// Why the `I = nu I^0 + O(nu^2)` check is refused in two dimensions.
pub const LOG_CAVEAT: &str = "theorem1 needs d = 3: in d = 2 the remainder O(C_s^# nu^2) \
should be replaced by O(C_s^#(aleph) nu^(2 - aleph)) for any aleph > 0 (logarithmic correction), \
which this experiment does not implement";

/// Accepted decrease of `|J - I|` per doubling of `L` (the target is 4).
pub const GAP_FACTOR: (f64, f64) = (2.5, 6.0);

/// Accepted `I / (nu I^0)` at the largest `nu`.
pub const RATIO_BAND: (f64, f64) = (0.85, 1.15);

fn quadrature(cfg: &Materialized, d: usize) -> Result<QuadricQuadrature<f64>> {
    let (nr, na, ni, r_max) = cfg.quadrature();
    Ok(QuadricQuadrature::new(d, r_max, nr, na, ni)?)
}

fn mc(cfg: &Materialized, k: usize) -> McParams {
    let samples = cfg.numerics().mc_samples.unwrap_or(10_000);
    McParams::new(samples, cfg.rng_seed().wrapping_add(k as u64))
}

pub fn jsum_vs_i(cfg: &Materialized) -> Result<Outcome> {
    let d = cfg.d();
    let p = cfg.profiles()?;
    let quad = quadrature(cfg, d)?;
    let origin = vec![0.0; d];
    let site = vec![0i32; d];
    let i0 = i0_integral(&p, &origin, &quad)?;
    let sizes = cfg.sweep().box_sizes.clone().unwrap_or_default();
    let nus = cfg.sweep().nus.clone().unwrap_or_default();
    if sizes.len() < 2 {
        return Err(invalid("`sweep.box_sizes` needs at least two entries"));
    }
    let mut table = Table::new(
        "jsum_vs_i",
        &["L", "nu", "J", "I", "I_stderr", "nu_I0", "gap"],
    );
    let mut out = Outcome::default();
    for (k, &nu) in nus.iter().enumerate() {
        let i = i_integral(&p, &origin, nu, &mc(cfg, k))?;
        let mut gaps = Vec::with_capacity(sizes.len());
        for &l in &sizes {
            let lat = cfg.lattice_with(l)?;
            let j = j_lattice_sum(&p, &site, nu, &lat)?;
            let gap = (j - i.mean).abs();
            gaps.push(gap);
            table.push(vec![
                l.into(),
                nu.into(),
                j.into(),
                i.mean.into(),
                i.stderr.into(),
                (nu * i0).into(),
                gap.into(),
            ]);
        }
        for w in 0..sizes.len().saturating_sub(1) {
            let doublings = (sizes[w + 1] / sizes[w]).log2();
            let factor = (gaps[w] / gaps[w + 1]).powf(1.0 / doublings);
            let ok = doublings > 0.0 && factor >= GAP_FACTOR.0 && factor <= GAP_FACTOR.1;
            out.checks.push(Check::new(
                &format!("gap_decay_nu{nu}_L{}_{}", sizes[w], sizes[w + 1]),
                ok,
                format!(
                    "|J - I| {:.4e} -> {:.4e}: factor {factor:.3} per doubling (accepted [{}, {}]; I stderr {:.1e})",
                    gaps[w], gaps[w + 1], GAP_FACTOR.0, GAP_FACTOR.1, i.stderr
                ),
            ));
        }
    }
    out.summarize("I0", i0);
    out.tables.push(table);
    Ok(out)
}

/// `I_s / (nu I^0_s)` at `s = 0` for each `nu`.
pub fn theorem1(cfg: &Materialized) -> Result<Outcome> {
    let d = cfg.d();
    if d != 3 {
        return Err(CliError::Validation(LOG_CAVEAT.to_owned()));
    }
    let nus = cfg.sweep().nus.clone().unwrap_or_default();
    if nus.windows(2).any(|w| w[1] >= w[0]) {
        return Err(invalid("`sweep.nus` must be strictly decreasing"));
    }
    if nus.iter().any(|&nu| nu > 0.5) {
        return Err(invalid("`sweep.nus` entries must lie in (0, 1/2]"));
    }
    let p = cfg.profiles()?;
    let quad = quadrature(cfg, d)?;
    let origin = vec![0.0; d];
    let i0 = i0_integral(&p, &origin, &quad)?;
    let mut table = Table::new(
        "theorem1",
        &["nu", "I", "I_stderr", "I0", "ratio", "ratio_stderr"],
    );
    let mut ratios: Vec<Estimate<f64>> = Vec::new();
    for (k, &nu) in nus.iter().enumerate() {
        let i = i_integral(&p, &origin, nu, &mc(cfg, k))?;
        let r = Estimate {
            mean: i.mean / (nu * i0),
            stderr: i.stderr / (nu * i0),
        };
        table.push(vec![
            nu.into(),
            i.mean.into(),
            i.stderr.into(),
            i0.into(),
            r.mean.into(),
            r.stderr.into(),
        ]);
        ratios.push(r);
    }
    let mut out = Outcome::default();
    let first = ratios[0];
    out.checks.push(Check::new(
        "ratio_at_largest_nu",
        first.mean >= RATIO_BAND.0 && first.mean <= RATIO_BAND.1,
        format!(
            "I/(nu I0) = {:.4} +- {:.4} at nu = {} (accepted [{}, {}])",
            first.mean, first.stderr, nus[0], RATIO_BAND.0, RATIO_BAND.1
        ),
    ));
    // |1 - ratio| may not grow by more than two combined standard errors
    let mut ok = true;
    let mut trail = Vec::new();
    for w in ratios.windows(2) {
        let (a, b) = ((1.0 - w[0].mean).abs(), (1.0 - w[1].mean).abs());
        let slack = 2.0 * w[0].stderr.hypot(w[1].stderr);
        ok &= b <= a + slack;
        trail.push(format!("{b:.4}"));
    }
    out.checks.push(Check::new(
        "monotone_approach",
        ok,
        format!(
            "|1 - ratio| = {:.4} -> {} as nu decreases",
            (1.0 - first.mean).abs(),
            trail.join(" -> ")
        ),
    ));
    out.summarize("I0", i0);
    out.tables.push(table);
    Ok(out)
}

/// Tolerance of the nulls relative to the Gaussian scale.
pub const NULL_TOL: f64 = 1e-8;
/// Tolerance of the cubic scaling, relative to the Gaussian scale.
pub const HOMOGENEITY_TOL: f64 = 1e-12;
/// Tolerance of the change on doubling every quadrature count.
pub const REFINEMENT_TOL: f64 = 1e-4;
const LAMBDA: f64 = 1.7;

fn probe_points(d: usize) -> Vec<Vec<f64>> {
    let pts: [[f64; 3]; 4] = [
        [0.0, 0.0, 0.0],
        [0.5, 0.0, 0.25],
        [0.6, -0.9, 0.3],
        [1.2, 0.7, -0.4],
    ];
    pts.iter().map(|p| p[..d].to_vec()).collect()
}

pub fn null(cfg: &Materialized) -> Result<Outcome> {
    let d = cfg.d();
    let quad = quadrature(cfg, d)?;
    let fine = quad.refined(2)?;
    let constant = Constant(1.0);
    let rj = RayleighJeans {
        alpha: 1.0,
        beta: [0.3, -0.2, 0.1],
        gamma: 1.0,
    };
    let gauss = Gaussian {
        amplitude: 1.0,
        width: 1.0,
    };
    let scaled = FnDensity {
        f: move |p: &[f64]| LAMBDA * gauss.eval(p),
        radial: true,
    };
    let mut header = vec!["point"];
    header.extend_from_slice(coord_names(d));
    header.extend_from_slice(&[
        "k_const",
        "k_rj",
        "k_gauss",
        "k_gauss_refined",
        "k_gauss_scaled",
    ]);
    let mut table = Table::new("kinetic_null", &header);
    let mut rows = Vec::new();
    for (i, s) in probe_points(d).iter().enumerate() {
        let vals = [
            kinetic_integral(&constant, s, &quad)?,
            kinetic_integral(&rj, s, &quad)?,
            kinetic_integral(&gauss, s, &quad)?,
            kinetic_integral(&gauss, s, &fine)?,
            kinetic_integral(&scaled, s, &quad)?,
        ];
        let mut row = vec![Cell::from(i)];
        row.extend(s.iter().map(|&x| Cell::from(x)));
        row.extend(vals.iter().map(|&v| Cell::from(v)));
        table.push(row);
        rows.push(vals);
    }
    let scale = rows.iter().map(|v| v[2].abs()).fold(0.0, f64::max);
    let worst = |f: &dyn Fn(&[f64; 5]) -> f64| rows.iter().map(f).fold(0.0, f64::max) / scale;
    let c = worst(&|v| v[0].abs());
    let r = worst(&|v| v[1].abs());
    let h = worst(&|v| (v[4] - LAMBDA.powi(3) * v[2]).abs() / LAMBDA.powi(3));
    let q = worst(&|v| (v[3] - v[2]).abs());
    let mut out = Outcome::default();
    out.checks.push(Check::new(
        "constant_null",
        c <= NULL_TOL,
        format!("max |K(const)| / scale = {c:.2e} (tolerance {NULL_TOL:e})"),
    ));
    out.checks.push(Check::new(
        "rayleigh_jeans_null",
        r <= NULL_TOL,
        format!("max |K(RJ)| / scale = {r:.2e} (tolerance {NULL_TOL:e})"),
    ));
    out.checks.push(Check::new(
        "cubic_homogeneity",
        h <= HOMOGENEITY_TOL,
        format!("max |K(l y) - l^3 K(y)| / (l^3 scale) = {h:.2e} at l = {LAMBDA}"),
    ));
    out.checks.push(Check::new(
        "self_convergence",
        q <= REFINEMENT_TOL,
        format!(
            "max |K_2n - K_n| / scale = {q:.2e} on doubling {:?} (tolerance {REFINEMENT_TOL:e})",
            quad.counts()
        ),
    ));
    out.summarize("scale", scale);
    out.tables.push(table);
    Ok(out)
}
