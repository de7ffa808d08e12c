//! gnuplot-ready files: whitespace-delimited columns under a `# name ...` header.

use std::fs;
use std::path::{Path, PathBuf};

use crate::config::Experiment;
use crate::error::{invalid, CliError, Result};
use crate::output::write_text;
use crate::MANIFEST;

/// `(output file, source table, columns)`.
pub type PlotSpec = (&'static str, &'static str, &'static [&'static str]);

pub fn plot_specs(exp: Experiment) -> &'static [PlotSpec] {
    use Experiment as E;
    match exp {
        E::OuCheck => &[(
            "spectrum.dat",
            "spectrum",
            &["abs_s", "mean", "stderr", "theory"],
        )],
        E::YOracle => &[
            ("convolution.dat", "convolution", &["n_sites", "rel_error"]),
            ("conservation.dat", "conservation", &["n_sites", "rel"]),
        ],
        E::ChaosSpectrum => &[(
            "spectrum.dat",
            "spectrum",
            &["abs_s", "a1_sq", "a1_sq_stderr", "j", "N", "N_stderr"],
        )],
        E::Balance => &[(
            "balance.dat",
            "balance",
            &[
                "tau",
                "lhs",
                "lhs_stderr",
                "rhs",
                "rhs_stderr",
                "residual",
                "residual_stderr",
            ],
        )],
        E::JsumVsI => &[(
            "jsum_vs_i.dat",
            "jsum_vs_i",
            &["L", "nu", "J", "I", "I_stderr", "nu_I0", "gap"],
        )],
        E::Theorem1 => &[(
            "theorem1.dat",
            "theorem1",
            &["nu", "I", "I_stderr", "I0", "ratio", "ratio_stderr"],
        )],
        E::KineticNull => &[(
            "kinetic_null.dat",
            "kinetic_null",
            &["point", "k_const", "k_rj", "k_gauss", "k_gauss_refined"],
        )],
        E::WkeRun => &[("wke_run.dat", "trajectory", &["tau", "r", "m"])],
        E::SteadyState => &[(
            "steady_state.dat",
            "steady_state",
            &["epsilon", "r", "m", "m0"],
        )],
        E::Theorem4Trend => &[
            (
                "trend.dat",
                "trend",
                &["epsilon", "r", "value", "noise_floored"],
            ),
            (
                "comparison.dat",
                "comparison",
                &["epsilon", "abs_s", "N", "N_stderr", "m"],
            ),
        ],
        E::DiagramCensus => &[(
            "census.dat",
            "census",
            &["k", "n_trees", "n_diagrams", "n_f2", "min_rank"],
        )],
    }
}

fn missing(path: &Path) -> CliError {
    invalid(format!("missing run artifact {}", path.display()))
}

/// Writes every plot file of a finished run and returns their paths.
pub fn emit_plot(run_dir: &Path) -> Result<Vec<PathBuf>> {
    let manifest_path = run_dir.join(MANIFEST);
    let text = fs::read_to_string(&manifest_path).map_err(|_| missing(&manifest_path))?;
    let manifest: serde_json::Value = serde_json::from_str(&text)
        .map_err(|e| invalid(format!("{}: {e}", manifest_path.display())))?;
    let exp: Experiment = manifest
        .get("experiment")
        .cloned()
        .and_then(|v| serde_json::from_value(v).ok())
        .ok_or_else(|| {
            invalid(format!(
                "{}: no experiment recorded",
                manifest_path.display()
            ))
        })?;
    let mut written = Vec::new();
    for (dat, table, cols) in plot_specs(exp) {
        let src = run_dir.join(format!("{table}.csv"));
        if !src.is_file() {
            return Err(missing(&src));
        }
        let mut reader = csv::Reader::from_path(&src)
            .map_err(|e| CliError::io(&src, std::io::Error::other(e)))?;
        let header = reader
            .headers()
            .map_err(|e| CliError::io(&src, std::io::Error::other(e)))?
            .clone();
        let idx: Vec<usize> = cols
            .iter()
            .map(|c| {
                header
                    .iter()
                    .position(|h| h == *c)
                    .ok_or_else(|| invalid(format!("{}: no column `{c}`", src.display())))
            })
            .collect::<Result<_>>()?;
        let mut body = format!("# {}\n", cols.join(" "));
        for rec in reader.records() {
            let rec = rec.map_err(|e| CliError::io(&src, std::io::Error::other(e)))?;
            // gnuplot reads NaN as a missing point
            let fields: Vec<&str> = idx
                .iter()
                .map(|&j| if rec[j].is_empty() { "NaN" } else { &rec[j] })
                .collect();
            body.push_str(&fields.join(" "));
            body.push('\n');
        }
        let path = run_dir.join(dat);
        write_text(&path, &body)?;
        written.push(path);
    }
    Ok(written)
}
