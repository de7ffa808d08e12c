//! Zeroth-order statistics: `E|a_s|^2 = b_s^2 / gamma_s` and no other
//! second-order correlations at equal times.

use std::sync::Arc;

use rayon::prelude::*;
use wavekin_core::ou::{estimate_correlations, sample_ou_realization};
use wavekin_core::ComplexEstimate;

use super::{site_cells, site_header};
use crate::config::Materialized;
use crate::error::Result;
use crate::output::{Cell, Check, Outcome, Table};

const K: f64 = 3.0;

#[derive(Default)]
struct Tally {
    count: usize,
    exceed: usize,
    worst: f64,
}

impl Tally {
    fn add(&mut self, dev: f64, stderr: f64) {
        let z = if stderr > 0.0 {
            dev / stderr
        } else if dev == 0.0 {
            0.0
        } else {
            f64::INFINITY
        };
        self.count += 1;
        self.exceed += usize::from(z > K);
        self.worst = self.worst.max(z);
    }

    fn check(&self, name: &str, what: &str) -> Check {
        Check::new(
            name,
            self.exceed == 0,
            format!(
                "{} of {} {what} beyond {K} stderr (largest {:.2} stderr)",
                self.exceed, self.count, self.worst
            ),
        )
    }
}

pub fn run(cfg: &Materialized) -> Result<Outcome> {
    let lat = Arc::new(cfg.lattice_with(cfg.box_size())?);
    let p = cfg.profiles()?;
    let n = cfg.numerics().n_realizations.unwrap_or(2);
    let (horizon, tau_end) = (cfg.horizon(), cfg.tau_end());
    let h = cfg.numerics().h.unwrap_or(0.5);
    let seed = cfg.rng_seed();
    let paths = (0..n)
        .into_par_iter()
        .map(|r| sample_ou_realization(lat.clone(), &p, horizon, tau_end, h, seed, r as u32))
        .collect::<Result<Vec<_>, _>>()?;
    let tau = paths[0].grid().end();
    let table = estimate_correlations(&paths, tau, tau)?;
    let modes = lat.len();

    let mut spectrum = Table::new(
        "spectrum",
        &site_header(lat.dim(), &["mean", "stderr", "theory"]),
    );
    let mut corr = Table::new("correlations", &["kind", "s", "s2", "re", "im", "stderr"]);
    let (mut diag, mut pair, mut cross) = (Tally::default(), Tally::default(), Tally::default());
    let push = |t: &mut Table, kind: &str, s: usize, s2: usize, e: &ComplexEstimate<f64>| {
        t.push(vec![
            kind.into(),
            s.into(),
            s2.into(),
            e.mean.re.into(),
            e.mean.im.into(),
            e.stderr.into(),
        ])
    };
    for s in 0..modes {
        let e = table.cross(s, s);
        let theory = p.big_b(lat.abs_sq(s));
        diag.add((e.mean.re - theory).abs(), e.stderr);
        let mut row = site_cells(&lat, s);
        row.extend([Cell::from(e.mean.re), e.stderr.into(), theory.into()]);
        spectrum.push(row);
        // E a a' is symmetric and E a conj(a') Hermitian: one estimate per unordered pair
        for s2 in s..modes {
            let e = table.pair(s, s2);
            pair.add(e.mean.norm(), e.stderr);
            push(&mut corr, "pair", s, s2, e);
            if s2 != s {
                let e = table.cross(s, s2);
                cross.add(e.mean.norm(), e.stderr);
                push(&mut corr, "cross", s, s2, e);
            }
        }
    }

    let mut out = Outcome::default();
    out.checks
        .push(diag.check("variance", "modes with |E|a|^2 - b^2/gamma|"));
    out.checks
        .push(pair.check("pair_moment", "pairs with |E a_s a_s'|"));
    out.checks
        .push(cross.check("cross_covariance", "pairs s != s' with |E a_s conj(a_s')|"));
    out.notes.push(format!(
        "{} comparisons at {K} stderr; under the null about {:.2} exceedances are expected in total",
        diag.count + pair.count + cross.count,
        // |complex mean| / stderr is Rayleigh distributed, |real| / stderr half-normal
        diag.count as f64 * 0.0027 + (pair.count + cross.count) as f64 * (-K * K).exp()
    ));
    out.summarize("tau", tau);
    out.summarize("n_modes", modes);
    out.summarize("gamma_min", p.gamma_min(&lat));
    out.summarize("exceedances", [diag.exceed, pair.exceed, cross.exceed]);
    out.tables.push(spectrum);
    out.tables.push(corr);
    Ok(out)
}
