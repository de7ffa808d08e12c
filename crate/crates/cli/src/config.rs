//! Strict JSON configuration.
//!
//! Every experiment has a table of defaults. A field is *used* by an
//! experiment exactly when its default is present; setting any other field is
//! a validation error. Materialization fills the unset used fields, and the
//! result is what the manifest records.

use std::fmt;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use wavekin_core::lattice::ForcingKind;
use wavekin_core::quasi::max_step;
use wavekin_core::{DampingProfile, ForcingProfile, Lattice, Profiles64};

use crate::error::{invalid, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    OuCheck,
    YOracle,
    ChaosSpectrum,
    Balance,
    JsumVsI,
    Theorem1,
    KineticNull,
    WkeRun,
    SteadyState,
    Theorem4Trend,
    DiagramCensus,
}

impl Experiment {
    pub const ALL: [Experiment; 11] = [
        Experiment::OuCheck,
        Experiment::YOracle,
        Experiment::ChaosSpectrum,
        Experiment::Balance,
        Experiment::JsumVsI,
        Experiment::Theorem1,
        Experiment::KineticNull,
        Experiment::WkeRun,
        Experiment::SteadyState,
        Experiment::Theorem4Trend,
        Experiment::DiagramCensus,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::OuCheck => "ou-check",
            Experiment::YOracle => "y-oracle",
            Experiment::ChaosSpectrum => "chaos-spectrum",
            Experiment::Balance => "balance",
            Experiment::JsumVsI => "jsum-vs-i",
            Experiment::Theorem1 => "theorem1",
            Experiment::KineticNull => "kinetic-null",
            Experiment::WkeRun => "wke-run",
            Experiment::SteadyState => "steady-state",
            Experiment::Theorem4Trend => "theorem4-trend",
            Experiment::DiagramCensus => "diagram-census",
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ForcingParams {
    pub kind: ForcingKind,
    pub amplitude: f64,
    pub width: f64,
}

impl Default for ForcingParams {
    fn default() -> Self {
        Self {
            kind: ForcingKind::Gaussian,
            amplitude: 1.0,
            width: 1.0,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelParams {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d: Option<usize>,
    #[serde(rename = "L", skip_serializing_if = "Option::is_none")]
    pub box_size: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cutoff: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nu: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r_star: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub forcing: Option<ForcingParams>,
    /// Horizon: the system starts from zero at `tau = -T`.
    #[serde(rename = "T", skip_serializing_if = "Option::is_none")]
    pub horizon: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tau_end: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NumericParams {
    /// Step of the stochastic integrators.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub h: Option<f64>,
    /// Step of the kinetic equation.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_realizations: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_radial: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_angular: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_inner: Option<usize>,
    /// Truncation radius of the quadric quadrature and the radial grid.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r_max: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_radii: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mc_samples: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_iter: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub report_times: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_fields: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_trials: Option<usize>,
    /// Sites with `|s|` up to this radius are checked.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub s_radius: Option<f64>,
    /// Weight exponents `r` of the seminorms `sup (1 + |s|)^r |x_s|`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r_weights: Option<Vec<i32>>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepParams {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub box_sizes: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nus: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epsilons: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dts: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub orders: Option<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub model: ModelParams,
    #[serde(default)]
    pub numerics: NumericParams,
    #[serde(default)]
    pub sweep: SweepParams,
}

impl ExperimentConfig {
    pub fn new(experiment: Experiment) -> Self {
        Self {
            experiment,
            seed: None,
            output: None,
            model: ModelParams::default(),
            numerics: NumericParams::default(),
            sweep: SweepParams::default(),
        }
    }

    /// Parses a config, or the `config` object of a run manifest.
    pub fn from_json(text: &str) -> Result<Self> {
        let value: serde_json::Value =
            serde_json::from_str(text).map_err(|e| invalid(format!("malformed JSON: {e}")))?;
        let value = match value.get("config") {
            Some(c) if value.get("manifest_version").is_some() => c.clone(),
            _ => value,
        };
        serde_json::from_value(value).map_err(|e| invalid(e.to_string()))
    }

    /// Defaults plus user overrides, validated.
    pub fn materialize(&self) -> Result<Materialized> {
        let mut def = defaults(self.experiment, self);
        let user = self;
        merge_model(&user.model, &mut def.model, self.experiment)?;
        merge_numerics(&user.numerics, &mut def.numerics, self.experiment)?;
        merge_sweep(&user.sweep, &mut def.sweep, self.experiment)?;
        if user.seed.is_some() && def.seed.is_none() {
            return Err(invalid(format!(
                "field `seed` is not used by deterministic experiment {}",
                self.experiment
            )));
        }
        def.seed = user.seed.or(def.seed);
        def.output = user.output.clone();
        derived_defaults(&mut def)?;
        let m = Materialized(def);
        m.validate()?;
        Ok(m)
    }
}

macro_rules! merge_fields {
    ($user:expr, $def:expr, $exp:expr, $section:literal, [$($field:ident => $name:literal),* $(,)?]) => {{
        $(
            if $user.$field.is_some() {
                if $def.$field.is_none() {
                    return Err(invalid(format!(
                        "field `{}.{}` is not used by experiment {}",
                        $section, $name, $exp
                    )));
                }
                $def.$field = $user.$field.clone();
            }
        )*
        Ok(())
    }};
}

fn merge_model(user: &ModelParams, def: &mut ModelParams, exp: Experiment) -> Result<()> {
    merge_fields!(user, def, exp, "model", [
        d => "d", box_size => "L", cutoff => "cutoff", nu => "nu", epsilon => "epsilon",
        r_star => "r_star", forcing => "forcing", horizon => "T", tau_end => "tau_end",
    ])
}

fn merge_numerics(user: &NumericParams, def: &mut NumericParams, exp: Experiment) -> Result<()> {
    merge_fields!(user, def, exp, "numerics", [
        h => "h", dt => "dt", n_realizations => "n_realizations", n_radial => "n_radial",
        n_angular => "n_angular", n_inner => "n_inner", r_max => "r_max", n_radii => "n_radii",
        mc_samples => "mc_samples", tol => "tol", max_iter => "max_iter",
        report_times => "report_times", n_fields => "n_fields", n_trials => "n_trials",
        s_radius => "s_radius", r_weights => "r_weights",
    ])
}

fn merge_sweep(user: &SweepParams, def: &mut SweepParams, exp: Experiment) -> Result<()> {
    merge_fields!(user, def, exp, "sweep", [
        box_sizes => "box_sizes", nus => "nus", epsilons => "epsilons", dts => "dts",
        orders => "orders",
    ])
}

/// Placeholder for defaults computed from other fields after merging.
const DERIVED: f64 = f64::NAN;

fn defaults(exp: Experiment, user: &ExperimentConfig) -> ExperimentConfig {
    use Experiment as E;
    let mut c = ExperimentConfig::new(exp);
    let (m, n, s) = (&mut c.model, &mut c.numerics, &mut c.sweep);
    c.seed = match exp {
        E::OuCheck => Some(1),
        E::YOracle => Some(2),
        E::ChaosSpectrum => Some(3),
        E::Balance => Some(4),
        E::JsumVsI => Some(5),
        E::Theorem1 => Some(6),
        E::Theorem4Trend => Some(7),
        E::KineticNull | E::WkeRun | E::SteadyState | E::DiagramCensus => None,
    };
    let profile = |m: &mut ModelParams| {
        m.r_star = Some(1.0);
        m.forcing = Some(ForcingParams::default());
    };
    let lattice = |m: &mut ModelParams| {
        m.d = Some(2);
        m.box_size = Some(2.0);
        m.cutoff = Some(2.0);
    };
    match exp {
        E::OuCheck => {
            lattice(m);
            profile(m);
            m.horizon = Some(DERIVED);
            m.tau_end = Some(0.0);
            n.h = Some(0.5);
            n.n_realizations = Some(2000);
        }
        E::YOracle => {
            n.n_fields = Some(50);
            n.n_trials = Some(100);
        }
        E::ChaosSpectrum => {
            lattice(m);
            profile(m);
            m.nu = Some(0.2);
            m.epsilon = Some(0.1);
            m.horizon = Some(5.0);
            m.tau_end = Some(0.0);
            n.h = Some(DERIVED);
            n.n_realizations = Some(1000);
            n.s_radius = Some(1.0);
        }
        E::Balance => {
            lattice(m);
            profile(m);
            m.nu = Some(0.2);
            m.epsilon = Some(0.1);
            m.horizon = Some(1.0);
            n.h = Some(DERIVED);
            n.n_realizations = Some(500);
            n.report_times = Some(vec![0.2, 0.4, 0.6, 0.8, 1.0]);
        }
        E::JsumVsI => {
            m.d = Some(2);
            m.cutoff = Some(3.0);
            profile(m);
            n.mc_samples = Some(1 << 26);
            n.n_radial = Some(64);
            n.n_angular = Some(64);
            n.n_inner = Some(128);
            n.r_max = Some(DERIVED);
            s.box_sizes = Some(vec![4.0, 8.0, 16.0]);
            s.nus = Some(vec![0.2]);
        }
        E::Theorem1 => {
            m.d = Some(3);
            m.r_star = Some(0.25);
            m.forcing = Some(ForcingParams {
                width: 5.0,
                ..ForcingParams::default()
            });
            n.mc_samples = Some(1 << 24);
            n.n_radial = Some(32);
            n.n_angular = Some(16);
            n.n_inner = Some(64);
            n.r_max = Some(DERIVED);
            s.nus = Some(vec![0.1, 0.05, 0.025]);
        }
        E::KineticNull => {
            m.d = Some(2);
            n.n_radial = Some(24);
            n.n_angular = Some(24);
            n.n_inner = Some(48);
            n.r_max = Some(6.0);
        }
        E::WkeRun => {
            m.d = Some(2);
            profile(m);
            m.epsilon = Some(0.0);
            m.horizon = Some(2.0);
            n.n_radii = Some(24);
            n.r_max = Some(DERIVED);
            n.report_times = Some(vec![-2.0, -1.5, -1.0, -0.5, 0.0, 0.5, 1.0]);
            s.dts = Some(vec![0.5, 0.1, 0.03125]);
            if user.model.epsilon.is_some_and(|e| e > 0.0) {
                n.n_radial = Some(16);
                n.n_angular = Some(16);
                n.n_inner = Some(32);
            }
        }
        E::SteadyState => {
            m.d = Some(2);
            profile(m);
            m.horizon = Some(30.0);
            n.dt = Some(0.2);
            n.n_radii = Some(64);
            n.n_radial = Some(32);
            n.n_angular = Some(32);
            n.n_inner = Some(64);
            n.r_max = Some(DERIVED);
            n.tol = Some(1e-8);
            n.max_iter = Some(400);
            s.epsilons = Some(vec![0.2, 0.1, 0.05]);
        }
        E::Theorem4Trend => {
            lattice(m);
            profile(m);
            m.nu = Some(0.1);
            m.horizon = Some(5.0);
            m.tau_end = Some(0.0);
            n.h = Some(DERIVED);
            n.n_realizations = Some(2000);
            n.dt = Some(0.05);
            n.n_radii = Some(32);
            n.n_radial = Some(24);
            n.n_angular = Some(24);
            n.n_inner = Some(48);
            n.r_max = Some(DERIVED);
            n.r_weights = Some(vec![0, 2]);
            s.epsilons = Some(vec![0.2, 0.1]);
        }
        E::DiagramCensus => {
            s.orders = Some(vec![0, 1, 2, 3]);
        }
    }
    c
}

/// Resolves the placeholders that depend on other (possibly user-set) fields.
fn derived_defaults(c: &mut ExperimentConfig) -> Result<()> {
    let needs = |v: Option<f64>| v.is_some_and(f64::is_nan);
    if needs(c.model.horizon) {
        let m = Materialized(c.clone());
        let lat = m.lattice_with(m.box_size())?;
        let p = m.profiles()?;
        c.model.horizon = Some(wavekin_core::ou::default_horizon(&lat, &p));
    }
    if needs(c.numerics.h) {
        let m = Materialized(c.clone());
        let lat = m.lattice_with(m.box_size())?;
        c.numerics.h = Some(max_step(&lat, m.nu()));
    }
    if needs(c.numerics.r_max) {
        // b^2 / gamma and every product of it is below e^{-72} beyond six widths
        let w = c.model.forcing.map_or(1.0, |f| f.width);
        c.numerics.r_max = Some(6.0 * w);
    }
    Ok(())
}

/// A config with every used field present and validated.
#[derive(Debug, Clone, PartialEq)]
pub struct Materialized(pub ExperimentConfig);

fn need<T: Clone>(v: &Option<T>, name: &str) -> T {
    v.clone()
        .unwrap_or_else(|| panic!("materialized config lacks `{name}`"))
}

impl Materialized {
    pub fn config(&self) -> &ExperimentConfig {
        &self.0
    }

    pub fn experiment(&self) -> Experiment {
        self.0.experiment
    }

    pub fn seed(&self) -> Option<u64> {
        self.0.seed
    }

    pub fn with_seed(mut self, seed: u64) -> Result<Self> {
        if self.0.seed.is_none() {
            return Err(invalid(format!(
                "experiment {} is deterministic and takes no seed",
                self.0.experiment
            )));
        }
        self.0.seed = Some(seed);
        Ok(self)
    }

    /// The seed of a stochastic experiment.
    pub fn rng_seed(&self) -> u64 {
        need(&self.0.seed, "seed")
    }

    pub fn model(&self) -> &ModelParams {
        &self.0.model
    }

    pub fn numerics(&self) -> &NumericParams {
        &self.0.numerics
    }

    pub fn sweep(&self) -> &SweepParams {
        &self.0.sweep
    }

    pub fn d(&self) -> usize {
        need(&self.0.model.d, "d")
    }

    pub fn box_size(&self) -> f64 {
        need(&self.0.model.box_size, "L")
    }

    pub fn nu(&self) -> f64 {
        need(&self.0.model.nu, "nu")
    }

    pub fn epsilon(&self) -> f64 {
        need(&self.0.model.epsilon, "epsilon")
    }

    pub fn horizon(&self) -> f64 {
        need(&self.0.model.horizon, "T")
    }

    pub fn tau_end(&self) -> f64 {
        need(&self.0.model.tau_end, "tau_end")
    }

    pub fn lattice_with(&self, box_size: f64) -> Result<Lattice> {
        Ok(Lattice::new(
            self.d(),
            box_size,
            need(&self.0.model.cutoff, "cutoff"),
        )?)
    }

    pub fn profiles(&self) -> Result<Profiles64> {
        let f = need(&self.0.model.forcing, "forcing");
        let forcing = match f.kind {
            ForcingKind::Gaussian => ForcingProfile::gaussian(f.amplitude, f.width)?,
        };
        Ok(Profiles64::new(
            DampingProfile::new(need(&self.0.model.r_star, "r_star"))?,
            forcing,
        ))
    }

    /// `(n_radial, n_angular, n_inner)` with the truncation radius.
    pub fn quadrature(&self) -> (usize, usize, usize, f64) {
        let n = &self.0.numerics;
        (
            need(&n.n_radial, "n_radial"),
            need(&n.n_angular, "n_angular"),
            need(&n.n_inner, "n_inner"),
            need(&n.r_max, "r_max"),
        )
    }

    /// `rho = (epsilon / nu)^{1/2}` when both are part of the config.
    pub fn rho(&self) -> Option<f64> {
        match (self.0.model.epsilon, self.0.model.nu) {
            (Some(e), Some(n)) => Some((e / n).sqrt()),
            _ => None,
        }
    }

    fn validate(&self) -> Result<()> {
        let m = &self.0.model;
        let n = &self.0.numerics;
        let s = &self.0.sweep;
        let positive = |name: &str, v: Option<f64>| match v {
            Some(x) if !(x.is_finite() && x > 0.0) => {
                Err(invalid(format!("`{name}` must be finite and > 0, got {x}")))
            }
            _ => Ok(()),
        };
        let at_least = |name: &str, v: Option<usize>, lo: usize| match v {
            Some(x) if x < lo => Err(invalid(format!("`{name}` must be >= {lo}, got {x}"))),
            _ => Ok(()),
        };
        if let Some(d) = m.d {
            if !(2..=3).contains(&d) {
                return Err(invalid(format!("`d` must be 2 or 3, got {d}")));
            }
        }
        positive("L", m.box_size)?;
        positive("cutoff", m.cutoff)?;
        positive("r_star", m.r_star)?;
        positive("T", m.horizon)?;
        if let Some(nu) = m.nu {
            if !(nu > 0.0 && nu <= 0.5) {
                return Err(invalid(format!("`nu` must lie in (0, 1/2], got {nu}")));
            }
        }
        if let Some(e) = m.epsilon {
            if !(0.0..=wavekin_core::wke::solver::EPSILON_CAP).contains(&e) {
                return Err(invalid(format!("`epsilon` must lie in [0, 0.5], got {e}")));
            }
        }
        if let Some(f) = m.forcing {
            positive("forcing.amplitude", Some(f.amplitude))?;
            positive("forcing.width", Some(f.width))?;
        }
        if let (Some(t), Some(horizon)) = (m.tau_end, m.horizon) {
            if !(t.is_finite() && t > -horizon) {
                return Err(invalid(format!("`tau_end` must exceed -T, got {t}")));
            }
        }
        positive("h", n.h)?;
        positive("dt", n.dt)?;
        positive("r_max", n.r_max)?;
        positive("tol", n.tol)?;
        positive("s_radius", n.s_radius)?;
        at_least("n_realizations", n.n_realizations, 2)?;
        at_least("n_radial", n.n_radial, 4)?;
        at_least("n_angular", n.n_angular, 4)?;
        at_least("n_inner", n.n_inner, 4)?;
        at_least("n_radii", n.n_radii, 4)?;
        at_least("mc_samples", n.mc_samples, 10_000)?;
        at_least("max_iter", n.max_iter, 1)?;
        at_least("n_fields", n.n_fields, 1)?;
        at_least("n_trials", n.n_trials, 1)?;
        if n.report_times.as_ref().is_some_and(Vec::is_empty) {
            return Err(invalid("`report_times` must not be empty"));
        }
        if n.report_times.iter().flatten().any(|t| !t.is_finite()) {
            return Err(invalid("`report_times` must be finite"));
        }
        for (name, v) in [
            ("box_sizes", &s.box_sizes),
            ("nus", &s.nus),
            ("epsilons", &s.epsilons),
            ("dts", &s.dts),
        ] {
            if let Some(v) = v {
                if v.is_empty() {
                    return Err(invalid(format!("`sweep.{name}` must not be empty")));
                }
                if v.iter().any(|x| !(x.is_finite() && *x > 0.0)) {
                    return Err(invalid(format!("`sweep.{name}` entries must be > 0")));
                }
            }
        }
        if s.orders.as_ref().is_some_and(Vec::is_empty) {
            return Err(invalid("`sweep.orders` must not be empty"));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_fields_are_named() {
        let e = ExperimentConfig::from_json(r#"{"experiment": "ou-check", "foo": 1}"#)
            .unwrap_err()
            .to_string();
        assert!(e.contains("foo"), "{e}");
        let e = ExperimentConfig::from_json(r#"{"experiment": "ou-check", "model": {"bar": 1}}"#)
            .unwrap_err()
            .to_string();
        assert!(e.contains("bar"), "{e}");
    }

    #[test]
    fn unused_fields_are_rejected() {
        let mut c = ExperimentConfig::new(Experiment::DiagramCensus);
        c.model.nu = Some(0.1);
        let e = c.materialize().unwrap_err().to_string();
        assert!(e.contains("model.nu"), "{e}");
    }

    #[test]
    fn materialized_config_round_trips() {
        for exp in Experiment::ALL {
            let m = ExperimentConfig::new(exp).materialize().unwrap();
            let text = serde_json::to_string(m.config()).unwrap();
            let again = ExperimentConfig::from_json(&text)
                .unwrap()
                .materialize()
                .unwrap();
            assert_eq!(m, again, "{exp}");
        }
    }

    #[test]
    fn derived_defaults_are_resolved() {
        let m = ExperimentConfig::new(Experiment::ChaosSpectrum)
            .materialize()
            .unwrap();
        // 0.1 nu / omega_max with omega_max = 16 at L = 2, cutoff 2
        let h = m.numerics().h.unwrap();
        assert!((h / 1.25e-3 - 1.0).abs() < 1e-14, "{h}");
        let m = ExperimentConfig::new(Experiment::OuCheck)
            .materialize()
            .unwrap();
        assert_eq!(m.horizon(), 5.0);
    }

    #[test]
    fn ranges_are_checked() {
        let mut c = ExperimentConfig::new(Experiment::Balance);
        c.model.nu = Some(0.9);
        assert!(c.materialize().is_err());
        let mut c = ExperimentConfig::new(Experiment::Balance);
        c.numerics.n_realizations = Some(1);
        assert!(c.materialize().is_err());
    }
}
