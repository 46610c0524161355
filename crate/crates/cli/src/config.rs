//! Declarative run description shared by the flag parser and `--config` files.

use std::path::{Path, PathBuf};

use anyhow::{bail, ensure, Context, Result};
use num_complex::Complex64;
use qho_relax::model::n_beta_from_temperature;
use qho_relax::oracle::DEFAULT_TRUNCATION;
use qho_relax::{GaussianInitialState, OscillatorParams, ThermalBath, TimeGrid};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CommandKind {
    Entropy,
    Variance,
    Phase,
    Photon,
    ClassicalEntropy,
    Verify,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum VarianceKind {
    Q,
    Energy,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum VerifySet {
    Gaussian,
    Fock,
    Classical,
    All,
}

/// Initial state of one series. Gaussian displacement is given by the
/// dimensionless amplitude `α = α₁ + iα₂`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum StateSpec {
    Gaussian {
        r: f64,
        #[serde(default)]
        alpha1: f64,
        #[serde(default)]
        alpha2: f64,
    },
    Fock {
        n: u32,
    },
}

impl StateSpec {
    /// Parses `r=1,alpha1=0.5` style assignments.
    pub fn parse_gaussian(text: &str) -> Result<Self> {
        let (mut r, mut alpha1, mut alpha2) = (None, 0.0, 0.0);
        for (key, value) in assignments(text)? {
            let v: f64 = value
                .parse()
                .with_context(|| format!("`{key}` needs a number, got `{value}`"))?;
            match key {
                "r" => r = Some(v),
                "alpha1" => alpha1 = v,
                "alpha2" => alpha2 = v,
                _ => bail!("unknown gaussian key `{key}` (expected r, alpha1, alpha2)"),
            }
        }
        let r = r.context("gaussian state needs `r=<squeeze factor>`")?;
        Ok(Self::Gaussian { r, alpha1, alpha2 })
    }

    /// Parses `n=3`.
    pub fn parse_fock(text: &str) -> Result<Self> {
        let mut n = None;
        for (key, value) in assignments(text)? {
            match key {
                "n" => {
                    n = Some(
                        value
                            .parse()
                            .with_context(|| format!("`n` needs an integer, got `{value}`"))?,
                    )
                }
                _ => bail!("unknown fock key `{key}` (expected n)"),
            }
        }
        Ok(Self::Fock {
            n: n.context("fock state needs `n=<photon number>`")?,
        })
    }

    pub fn label(&self) -> String {
        match *self {
            Self::Gaussian { r, alpha1, alpha2 } if alpha1 == 0.0 && alpha2 == 0.0 => {
                format!("r={r}")
            }
            Self::Gaussian { r, alpha1, alpha2 } => {
                format!("r={r};alpha1={alpha1};alpha2={alpha2}")
            }
            Self::Fock { n } => format!("n={n}"),
        }
    }

    pub fn gaussian(&self, params: &OscillatorParams) -> Result<Option<GaussianInitialState>> {
        match *self {
            Self::Gaussian { r, alpha1, alpha2 } => Ok(Some(GaussianInitialState::from_amplitude(
                params, alpha1, alpha2, r,
            )?)),
            Self::Fock { .. } => Ok(None),
        }
    }
}

fn assignments(text: &str) -> Result<Vec<(&str, &str)>> {
    text.split(',')
        .map(|part| {
            part.split_once('=')
                .map(|(k, v)| (k.trim(), v.trim()))
                .with_context(|| format!("expected key=value, got `{part}`"))
        })
        .collect()
}

/// Parses `2i`, `0.5`, `0`, `i`.
pub fn parse_alpha(text: &str) -> Result<Complex64> {
    let t = text.trim();
    let parsed = match t.strip_suffix('i') {
        Some("") => Ok(Complex64::new(0.0, 1.0)),
        Some(im) => im.parse().map(|b| Complex64::new(0.0, b)),
        None => t.parse().map(|a| Complex64::new(a, 0.0)),
    };
    parsed.with_context(|| {
        format!("cannot read damping parameter `{text}` (use forms like 2i or 0.5)")
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    /// Final Γt.
    pub t_max: Option<f64>,
    pub points: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub command: CommandKind,
    #[serde(default = "default_omega")]
    pub omega: f64,
    #[serde(default = "default_gamma")]
    pub gamma: f64,
    /// Γ/ω; when set it replaces `omega`.
    pub gamma_ratio: Option<f64>,
    #[serde(default)]
    pub n_beta: Vec<f64>,
    /// k_B T, converted to N_β with `omega`. The classical commands use it
    /// directly.
    pub temperature: Option<f64>,
    #[serde(default)]
    pub states: Vec<StateSpec>,
    #[serde(default)]
    pub grid: GridSpec,
    pub out: Option<PathBuf>,
    #[serde(default)]
    pub oracle: bool,
    pub truncation: Option<usize>,
    pub variance: Option<VarianceKind>,
    #[serde(default)]
    pub classical: bool,
    #[serde(default)]
    pub alpha: Vec<String>,
    #[serde(default)]
    pub lambda: Vec<f64>,
    #[serde(default)]
    pub photon_numbers: Vec<u32>,
    pub verify_set: Option<VerifySet>,
}

fn default_omega() -> f64 {
    1.0
}

fn default_gamma() -> f64 {
    0.1
}

impl RunConfig {
    pub fn new(command: CommandKind) -> Self {
        Self {
            command,
            omega: default_omega(),
            gamma: default_gamma(),
            gamma_ratio: None,
            n_beta: Vec::new(),
            temperature: None,
            states: Vec::new(),
            grid: GridSpec::default(),
            out: None,
            oracle: false,
            truncation: None,
            variance: None,
            classical: false,
            alpha: Vec::new(),
            lambda: Vec::new(),
            photon_numbers: Vec::new(),
            verify_set: None,
        }
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text =
            std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        toml::from_str(&text).with_context(|| format!("parsing {}", path.display()))
    }

    pub fn validate(&self) -> Result<()> {
        self.params()?;
        self.baths()?;
        if let Some(t) = self.grid.t_max {
            ensure!(
                t.is_finite() && t > 0.0,
                "t_max must be a positive Γt, got {t}"
            );
        }
        if let Some(p) = self.grid.points {
            ensure!(p >= 2, "a time grid needs at least 2 points, got {p}");
        }
        if let Some(n) = self.truncation {
            ensure!(n >= 2, "truncation must be at least 2, got {n}");
        }
        for a in &self.alpha {
            parse_alpha(a)?;
        }
        ensure!(
            self.lambda.iter().all(|l| l.is_finite() && *l >= 0.0),
            "lambda values must be finite and non-negative"
        );
        Ok(())
    }

    pub fn params(&self) -> Result<OscillatorParams> {
        let params = match self.gamma_ratio {
            Some(ratio) => OscillatorParams::from_damping_ratio(self.gamma, ratio),
            None => OscillatorParams::new(self.omega, self.gamma),
        };
        params.context("invalid oscillator parameters")
    }

    /// Baths from the temperature if given, else the `n_beta` list, else N_β = 1.
    pub fn baths(&self) -> Result<Vec<ThermalBath>> {
        if let Some(t) = self.temperature {
            ensure!(
                self.n_beta.is_empty(),
                "give either temperature or n_beta, not both"
            );
            return Ok(vec![n_beta_from_temperature(self.params()?.omega(), t)?]);
        }
        if self.n_beta.is_empty() {
            return Ok(vec![ThermalBath::new(1.0)?]);
        }
        self.n_beta
            .iter()
            .map(|&n| ThermalBath::new(n).with_context(|| format!("invalid n_beta {n}")))
            .collect()
    }

    pub fn states_or(&self, default: StateSpec) -> Vec<StateSpec> {
        if self.states.is_empty() {
            vec![default]
        } else {
            self.states.clone()
        }
    }

    pub fn alphas_or(&self, default: &[&str]) -> Result<Vec<(String, Complex64)>> {
        let names: Vec<String> = if self.alpha.is_empty() {
            default.iter().map(|s| s.to_string()).collect()
        } else {
            self.alpha.clone()
        };
        names
            .into_iter()
            .map(|n| parse_alpha(&n).map(|a| (n, a)))
            .collect()
    }

    pub fn truncation(&self) -> usize {
        self.truncation.unwrap_or(DEFAULT_TRUNCATION)
    }

    /// Γt grid from 0 to `t_max`, with per-command defaults.
    pub fn gt_grid(&self, t_max: f64, points: usize) -> Result<TimeGrid> {
        let t = self.grid.t_max.unwrap_or(t_max);
        let n = self.grid.points.unwrap_or(points);
        Ok(TimeGrid::linspace(0.0, t, n)?)
    }
}
