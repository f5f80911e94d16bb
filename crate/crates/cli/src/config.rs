//! Run configuration: built-in defaults, then an optional TOML file of
//! `key = value` lines, then command-line flags.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::Args;
use pcf_hopf::flow::{FlowControls, TimeScheme};
use pcf_hopf::SurfaceParams64;
use serde::Deserialize;

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub alpha_mod: f64,
    pub alpha_arg: f64,
    pub beta_mod: f64,
    pub beta_arg: f64,
    /// Half-width of the window `[-L, L]`. Unset means 30 for `soliton`
    /// and 40 for `flow`.
    pub length: Option<f64>,
    /// Grid nodes; odd so that `x = 0` is a node.
    pub nodes: usize,
    pub t_end: f64,
    pub dt0: f64,
    pub dt_max: f64,
    pub newton_tol: f64,
    pub scheme: String,
    pub record_interval: f64,
    /// Residual tolerance for the soliton and the form identities.
    pub tol: f64,
    /// Allowed growth of the comparison envelope between records.
    pub envelope_tol: f64,
    /// Stop a flow once the aligned error drops below this; 0 disables.
    pub target: f64,
    pub initial: String,
    pub bump_amplitude: f64,
    pub bump_center: f64,
    pub bump_width: f64,
    /// Perturbation of Ω₊ used as a negative control by `verify`.
    pub perturb: f64,
    pub seed: u64,
    pub samples: usize,
    pub out: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            alpha_mod: (-2.0f64).exp(),
            alpha_arg: 0.0,
            beta_mod: (-1.0f64).exp(),
            beta_arg: 0.0,
            length: None,
            nodes: 2001,
            t_end: 5.0,
            dt0: 1e-2,
            dt_max: 0.25,
            newton_tol: 1e-12,
            scheme: "bdf2".into(),
            record_interval: 0.1,
            tol: 1e-9,
            envelope_tol: 1e-6,
            target: 1e-3,
            initial: "bump".into(),
            bump_amplitude: -1.5,
            bump_center: 0.0,
            bump_width: 3.0,
            perturb: 0.0,
            seed: 0,
            samples: 20,
            out: PathBuf::from("out"),
        }
    }
}

/// Flags shared by every subcommand; each overrides the config file.
#[derive(Clone, Debug, Default, Args)]
pub struct Overrides {
    /// TOML file of `key = value` settings.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// |α|, in (0, 1).
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub alpha_mod: Option<f64>,
    /// arg α; does not enter the invariant geometry.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub alpha_arg: Option<f64>,
    /// |β|, in (0, 1).
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub beta_mod: Option<f64>,
    /// arg β.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub beta_arg: Option<f64>,
    /// Half-width of the spatial window.
    #[arg(long = "L", global = true)]
    pub length: Option<f64>,
    /// Number of grid nodes (odd).
    #[arg(long = "N", global = true)]
    pub nodes: Option<usize>,
    /// Final flow time.
    #[arg(long = "T", global = true)]
    pub t_end: Option<f64>,
    /// Initial time step.
    #[arg(long, global = true)]
    pub dt0: Option<f64>,
    /// Output directory.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Seed for sampled points.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Residual tolerance for `soliton` and `verify`.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Allowed growth of the comparison envelope between records.
    #[arg(long, global = true)]
    pub envelope_tol: Option<f64>,
    /// Stop once the aligned error is below this; 0 runs to T.
    #[arg(long, global = true)]
    pub target: Option<f64>,
    /// `soliton`, `bump`, or a CSV file with columns `x` and `theta` or `k`.
    #[arg(long, global = true)]
    pub initial: Option<String>,
    /// `bdf2`, `conservative` or `logit`.
    #[arg(long, global = true)]
    pub scheme: Option<String>,
    /// Tilt of the even-type distribution; nonzero makes `frobenius` fail.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub perturb: Option<f64>,
    /// Sample count for the even-type, odd-type and `phi` checks.
    #[arg(long, global = true)]
    pub samples: Option<usize>,
}

impl RunConfig {
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        toml::from_str(&text).with_context(|| format!("parsing {}", path.display()))
    }

    pub fn resolve(o: &Overrides) -> Result<Self> {
        let mut c = match &o.config {
            Some(p) => Self::from_file(p)?,
            None => Self::default(),
        };
        macro_rules! set {
            ($($field:ident),*) => {$(
                if let Some(v) = &o.$field {
                    c.$field = v.clone();
                }
            )*};
        }
        if o.length.is_some() {
            c.length = o.length;
        }
        set!(
            alpha_mod,
            alpha_arg,
            beta_mod,
            beta_arg,
            nodes,
            t_end,
            dt0,
            out,
            seed,
            tol,
            envelope_tol,
            target,
            initial,
            scheme,
            perturb,
            samples
        );
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, m) in [("alpha_mod", self.alpha_mod), ("beta_mod", self.beta_mod)] {
            if !(m > 0.0 && m < 1.0) {
                bail!("{name} = {m} must lie in (0, 1)");
            }
        }
        if self.nodes < 3 || self.nodes.is_multiple_of(2) {
            bail!("N = {} must be odd and at least 3", self.nodes);
        }
        let positive = [
            ("L", self.length.unwrap_or(1.0)),
            ("dt0", self.dt0),
            ("dt_max", self.dt_max),
            ("newton_tol", self.newton_tol),
            ("record_interval", self.record_interval),
            ("tol", self.tol),
            ("envelope_tol", self.envelope_tol),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                bail!("{name} = {v} must be positive");
            }
        }
        if !(self.t_end >= 0.0 && self.t_end.is_finite()) {
            bail!("T = {} must be non-negative", self.t_end);
        }
        if !(self.target >= 0.0) {
            bail!("target = {} must be non-negative", self.target);
        }
        if !(self.bump_width > 0.0) {
            bail!("bump_width = {} must be positive", self.bump_width);
        }
        if self.samples == 0 {
            bail!("samples must be positive");
        }
        self.time_scheme()?;
        Ok(())
    }

    pub fn length_or(&self, default: f64) -> f64 {
        self.length.unwrap_or(default)
    }

    pub fn params(&self) -> Result<SurfaceParams64> {
        Ok(SurfaceParams64::from_polar(self.alpha_mod, self.alpha_arg, self.beta_mod, self.beta_arg)?)
    }

    pub fn time_scheme(&self) -> Result<TimeScheme> {
        Ok(match self.scheme.as_str() {
            "bdf2" => TimeScheme::Bdf2,
            "conservative" => TimeScheme::Conservative,
            "logit" => TimeScheme::Logit,
            other => bail!("unknown scheme {other:?}; expected bdf2, conservative or logit"),
        })
    }

    pub fn controls(&self) -> Result<FlowControls<f64>> {
        Ok(FlowControls {
            dt0: self.dt0,
            dt_max: self.dt_max.max(self.dt0),
            newton_tol: self.newton_tol,
            scheme: self.time_scheme()?,
            record_interval: self.record_interval,
            target: (self.target > 0.0).then_some(self.target),
            ..FlowControls::default()
        })
    }
}
