//! Monte-Carlo chaos terms against the lattice sum `J_s`, and the energy
//! balance of the full stochastic equation.

use std::sync::Arc;

use rayon::prelude::*;
use wavekin_core::kinetic::j_lattice_sum;
use wavekin_core::quasi::{full_sde_integrate, sample_chaos_ensemble, SdeConfig, SpectrumConfig};

use super::{site_cells, site_header};
use crate::config::Materialized;
use crate::error::{invalid, Result};
use crate::output::{Cell, Check, Outcome, Table};

const K: f64 = 3.0;

fn site_ints(lat: &wavekin_core::Lattice, s: usize) -> Vec<i32> {
    lat.coords(s).to_vec()
}

pub fn spectrum(cfg: &Materialized) -> Result<Outcome> {
    let lat = Arc::new(cfg.lattice_with(cfg.box_size())?);
    let p = cfg.profiles()?;
    let nu = cfg.nu();
    let eps = cfg.epsilon();
    let num = cfg.numerics();
    let sc = SpectrumConfig {
        lattice: lat.clone(),
        profiles: p,
        nu,
        horizon: cfg.horizon(),
        tau: cfg.tau_end(),
        h: num.h.unwrap_or(f64::NAN),
        n_realizations: num.n_realizations.unwrap_or(2),
        seed: cfg.rng_seed(),
    };
    let ens = sample_chaos_ensemble(&sc)?;
    let a1 = ens.moment(|a| a[1].norm_sqr());
    let spec = ens.spectrum(eps)?;
    let j: Vec<f64> = (0..lat.len())
        .into_par_iter()
        .map(|s| j_lattice_sum(&p, &site_ints(&lat, s), nu, &lat))
        .collect::<Result<_, _>>()?;

    let radius = num.s_radius.unwrap_or(1.0);
    let mut table = Table::new(
        "spectrum",
        &site_header(
            lat.dim(),
            &[
                "a1_sq",
                "a1_sq_stderr",
                "j",
                "N",
                "N_stderr",
                "n0",
                "n1",
                "n2",
                "n3",
                "n4",
            ],
        ),
    );
    let (mut checked, mut exceed, mut worst) = (0usize, 0usize, 0.0f64);
    for s in 0..lat.len() {
        let e = &a1[s];
        if lat.abs_sq(s).sqrt() <= radius + 1e-12 {
            let z = (e.mean - j[s]).abs() / e.stderr;
            checked += 1;
            exceed += usize::from(!(z <= K));
            worst = worst.max(z);
        }
        let mut row = site_cells(&lat, s);
        row.extend([
            Cell::from(e.mean),
            e.stderr.into(),
            j[s].into(),
            spec.mean[s].into(),
            spec.stderr[s].into(),
        ]);
        row.extend(spec.terms.iter().map(|t| Cell::from(t[s].mean)));
        table.push(row);
    }
    if checked == 0 {
        return Err(invalid("`s_radius` selects no lattice site"));
    }
    let mut out = Outcome::default();
    out.checks.push(Check::new(
        "first_order_vs_lattice_sum",
        exceed == 0,
        format!(
            "E|a1_s|^2 vs J_s at {checked} sites with |s| <= {radius}: {exceed} beyond {K} stderr (largest {worst:.2})"
        ),
    ));
    out.notes.push(
        "columns n3 and n4 are the rho^3 and rho^4 coefficients of the quasisolution spectrum; they are diagnostics only"
            .into(),
    );
    out.summarize("tau", ens.tau);
    out.summarize("h", ens.grid.step);
    out.summarize("rho", spec.rho);
    out.tables.push(table);
    Ok(out)
}

pub fn balance(cfg: &Materialized) -> Result<Outcome> {
    let lat = Arc::new(cfg.lattice_with(cfg.box_size())?);
    let num = cfg.numerics();
    let sc = SdeConfig {
        lattice: lat,
        profiles: cfg.profiles()?,
        nu: cfg.nu(),
        epsilon: cfg.epsilon(),
        horizon: cfg.horizon(),
        report_times: num.report_times.clone().unwrap_or_default(),
        h: num.h.unwrap_or(f64::NAN),
        n_realizations: num.n_realizations.unwrap_or(2),
        seed: cfg.rng_seed(),
    };
    let (_, report) = full_sde_integrate(&sc)?;
    let mut table = Table::new(
        "balance",
        &[
            "tau",
            "lhs",
            "lhs_stderr",
            "rhs",
            "rhs_stderr",
            "energy",
            "energy_stderr",
            "residual",
            "residual_stderr",
        ],
    );
    let mut worst = 0.0f64;
    for r in &report.rows {
        let e = &r.relative_residual;
        worst = worst.max(e.mean.abs() / e.stderr);
        table.push(vec![
            r.tau.into(),
            r.lhs.mean.into(),
            r.lhs.stderr.into(),
            r.rhs.mean.into(),
            r.rhs.stderr.into(),
            r.energy.mean.into(),
            r.energy.stderr.into(),
            e.mean.into(),
            e.stderr.into(),
        ]);
    }
    let mut out = Outcome::default();
    out.checks.push(Check::new(
        "energy_balance",
        report.within(K),
        format!(
            "relative residual within {K} stderr at all {} report times (largest {worst:.2} stderr)",
            report.rows.len()
        ),
    ));
    out.summarize("rho", report.rho);
    out.summarize("injection_rate", report.injection_rate);
    out.tables.push(table);
    Ok(out)
}
