//! One function per experiment; each returns an [`Outcome`] without touching the disk.

mod census;
mod chaos;
mod kinetic;
mod oracle;
mod ou_check;
mod wke;

use wavekin_core::Lattice;

use crate::config::{Experiment, Materialized};
use crate::error::Result;
use crate::output::{Cell, Outcome};

pub use kinetic::LOG_CAVEAT;
pub use wke::REGIME_NOTE;

pub fn run(cfg: &Materialized) -> Result<Outcome> {
    match cfg.experiment() {
        Experiment::OuCheck => ou_check::run(cfg),
        Experiment::YOracle => oracle::run(cfg),
        Experiment::ChaosSpectrum => chaos::spectrum(cfg),
        Experiment::Balance => chaos::balance(cfg),
        Experiment::JsumVsI => kinetic::jsum_vs_i(cfg),
        Experiment::Theorem1 => kinetic::theorem1(cfg),
        Experiment::KineticNull => kinetic::null(cfg),
        Experiment::WkeRun => wke::run(cfg),
        Experiment::SteadyState => wke::steady(cfg),
        Experiment::Theorem4Trend => wke::trend(cfg),
        Experiment::DiagramCensus => census::run(cfg),
    }
}

/// Column names `sx, sy(, sz)` for a lattice of dimension `d`.
pub(crate) fn coord_names(d: usize) -> &'static [&'static str] {
    &["sx", "sy", "sz"][..d]
}

/// `site_index, sx, sy(, sz), abs_s` for one site.
pub(crate) fn site_cells(lat: &Lattice, s: usize) -> Vec<Cell> {
    let p = lat.point(s);
    let mut row = vec![Cell::from(s)];
    row.extend(p[..lat.dim()].iter().map(|&x| Cell::from(x)));
    row.push(Cell::from(lat.abs_sq(s).sqrt()));
    row
}

pub(crate) fn site_header<'a>(d: usize, rest: &[&'a str]) -> Vec<&'a str> {
    let mut h = vec!["site_index"];
    h.extend_from_slice(coord_names(d));
    h.push("abs_s");
    h.extend_from_slice(rest);
    h
}
