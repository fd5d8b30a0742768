//! Run configuration, read from a TOML file with the sections `[grid]`,
//! `[time]`, `[model]`, `[ic]`, `[output]` and the optional experiment
//! sections `[sweep]` and `[sensitivity]`. Unknown keys are rejected.
//!
//! ```toml
//! [grid]
//! n = 64
//! m = 32
//!
//! [time]
//! dt = 1e-3
//! t_end = 1.0
//!
//! [model]
//! model = "euler_alpha"
//! alpha = 1.0
//! nu = 0.0
//!
//! [ic]
//! kind = "random"
//! seed = 7
//! p = 4.0
//! cutoff = 8
//! ```

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::dynamics::{Model, ModelParams};
use crate::error::{Error, Result};
use crate::spectral::Grid;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimConfig {
    #[serde(default)]
    pub grid: GridConfig,
    #[serde(default)]
    pub time: TimeConfig,
    pub model: ModelConfig,
    pub ic: IcSpec,
    #[serde(default)]
    pub output: OutputConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sensitivity: Option<SensitivityConfig>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridConfig {
    /// Grid points per direction.
    pub n: usize,
    /// Particles per direction.
    pub m: usize,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self { n: 64, m: 32 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TimeConfig {
    pub dt: f64,
    pub t_end: f64,
}

impl Default for TimeConfig {
    fn default() -> Self {
        Self { dt: 1e-3, t_end: 1.0 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    pub model: Model,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default)]
    pub nu: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IcKind {
    TaylorGreen,
    Shear,
    Modes,
    Random,
}

/// One Fourier mode `amplitude · cos(k₁x + k₂y + phase)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModeSpec {
    pub k1: i64,
    pub k2: i64,
    pub amplitude: f64,
    #[serde(default)]
    pub phase: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IcSpec {
    pub kind: IcKind,
    /// Random-phase seed.
    #[serde(default)]
    pub seed: u64,
    /// Spectral decay exponent: `|ω̂_k| ∝ (1 + |k|²)^(−p/2)`.
    #[serde(default = "default_p")]
    pub p: f64,
    /// Largest wavenumber magnitude K of the random spectrum.
    #[serde(default = "default_cutoff")]
    pub cutoff: usize,
    /// RMS velocity of the random field.
    #[serde(default = "default_amplitude")]
    pub amplitude: f64,
    /// Vorticity modes (Euler) or potential-vorticity modes (Euler-α).
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub modes: Vec<ModeSpec>,
}

fn default_p() -> f64 {
    4.0
}

fn default_cutoff() -> usize {
    8
}

fn default_amplitude() -> f64 {
    1.0
}

impl IcSpec {
    pub fn new(kind: IcKind) -> Self {
        Self {
            kind,
            seed: 0,
            p: default_p(),
            cutoff: default_cutoff(),
            amplitude: default_amplitude(),
            modes: Vec::new(),
        }
    }

    pub fn random(seed: u64, p: f64, cutoff: usize) -> Self {
        Self { seed, p, cutoff, ..Self::new(IcKind::Random) }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputConfig {
    /// Output directory; nothing is written when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dir: Option<PathBuf>,
    /// Diagnostics every this many steps (the final time is always sampled).
    pub sample_every: usize,
    /// Snapshots every this many steps; initial and final snapshots only
    /// when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub snapshot_every: Option<usize>,
    /// Sobolev index of `hs_norm` and the tangent monitor.
    pub sobolev_s: f64,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self { dir: None, sample_every: 10, snapshot_every: None, sobolev_s: 2.5 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepConfig {
    /// Positive viscosities, strictly descending; ν = 0 is the reference run.
    pub nus: Vec<f64>,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self { nus: vec![1e-2, 1e-3, 1e-4] }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SensitivityConfig {
    /// Largest step; the Richardson table uses `eps`, `eps/2`, `eps/4`.
    pub eps: f64,
    /// Seed of the random perturbation direction (default: ic seed + 1).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub direction_seed: Option<u64>,
}

impl Default for SensitivityConfig {
    fn default() -> Self {
        Self { eps: 1e-3, direction_seed: None }
    }
}

fn invalid(key: &'static str, detail: impl Into<String>) -> Error {
    Error::Config { key, detail: detail.into() }
}

impl SimConfig {
    /// Configuration with default grid, time and output settings.
    pub fn new(params: ModelParams, ic: IcSpec) -> Self {
        let alpha = (params.model == Model::EulerAlpha).then_some(params.alpha);
        Self {
            grid: GridConfig::default(),
            time: TimeConfig::default(),
            model: ModelConfig { model: params.model, alpha, nu: params.nu },
            ic,
            output: OutputConfig::default(),
            sweep: None,
            sensitivity: None,
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::ConfigParse(e.message().to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|source| Error::Io { path: path.to_path_buf(), source })?;
        Self::parse(&text).map_err(|e| match e {
            Error::ConfigParse(d) => Error::ConfigParse(format!("{}: {d}", path.display())),
            other => other,
        })
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes to TOML")
    }

    pub fn steps(&self) -> usize {
        (self.time.t_end / self.time.dt).round() as usize
    }

    pub fn params(&self) -> ModelParams {
        ModelParams {
            model: self.model.model,
            alpha: self.model.alpha.unwrap_or(0.0),
            nu: self.model.nu,
        }
    }

    pub fn build_grid(&self) -> Result<Grid> {
        Grid::new(self.grid.n)
    }

    pub fn sweep_or_default(&self) -> SweepConfig {
        self.sweep.clone().unwrap_or_default()
    }

    pub fn sensitivity_or_default(&self) -> SensitivityConfig {
        self.sensitivity.clone().unwrap_or_default()
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.grid.n;
        if n < 8 || n % 2 != 0 {
            return Err(invalid("grid.n", format!("n must be even and at least 8, got {n}")));
        }
        if self.grid.m < 2 {
            return Err(invalid("grid.m", format!("m must be at least 2, got {}", self.grid.m)));
        }

        let TimeConfig { dt, t_end } = self.time;
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(invalid("time.dt", format!("dt must be positive, got {dt}")));
        }
        if !(t_end >= 0.0 && t_end.is_finite()) {
            return Err(invalid("time.t_end", format!("t_end must be non-negative, got {t_end}")));
        }
        let steps = (t_end / dt).round();
        if (steps * dt - t_end).abs() > 1e-9 * t_end.max(dt) {
            return Err(invalid("time.t_end", format!("t_end = {t_end} is not a multiple of dt = {dt}")));
        }

        let m = &self.model;
        match m.model {
            Model::Euler => {
                if m.alpha.is_some() {
                    return Err(invalid("alpha", "alpha applies only to model = \"euler_alpha\""));
                }
                if m.nu != 0.0 {
                    return Err(invalid("nu", format!("the Euler model is inviscid, got nu = {}", m.nu)));
                }
            }
            Model::EulerAlpha => {
                let Some(alpha) = m.alpha else {
                    return Err(invalid("alpha", "alpha is required when model = \"euler_alpha\""));
                };
                if !(alpha > 0.0 && alpha.is_finite()) {
                    return Err(invalid("alpha", format!("alpha must be positive, got {alpha}")));
                }
                if !(m.nu >= 0.0 && m.nu.is_finite()) {
                    return Err(invalid("nu", format!("nu must be non-negative, got {}", m.nu)));
                }
            }
        }

        let ic = &self.ic;
        if i64::try_from(ic.seed).is_err() {
            return Err(invalid("ic.seed", format!("seed must be at most {}, got {}", i64::MAX, ic.seed)));
        }
        match ic.kind {
            IcKind::Random => {
                if ic.cutoff == 0 || 3 * ic.cutoff >= n {
                    return Err(invalid(
                        "ic.cutoff",
                        format!("cutoff K must satisfy 1 <= K < n/3 (dealiasing), got K = {} for n = {n}", ic.cutoff),
                    ));
                }
                if !ic.p.is_finite() {
                    return Err(invalid("ic.p", "p must be finite"));
                }
                if !(ic.amplitude > 0.0 && ic.amplitude.is_finite()) {
                    return Err(invalid("ic.amplitude", "amplitude must be positive"));
                }
            }
            IcKind::Modes => {
                if ic.modes.is_empty() {
                    return Err(invalid("ic.modes", "kind = \"modes\" needs at least one mode"));
                }
                let kmax = ((n - 1) / 3) as i64;
                for mode in &ic.modes {
                    if (mode.k1, mode.k2) == (0, 0) || mode.k1.abs() > kmax || mode.k2.abs() > kmax {
                        return Err(invalid(
                            "ic.modes",
                            format!("mode ({}, {}) must be nonzero with |k_i| <= {kmax}", mode.k1, mode.k2),
                        ));
                    }
                    if !(mode.amplitude.is_finite() && mode.phase.is_finite()) {
                        return Err(invalid("ic.modes", "amplitude and phase must be finite"));
                    }
                }
            }
            IcKind::TaylorGreen | IcKind::Shear => {}
        }
        if ic.kind != IcKind::Modes && !ic.modes.is_empty() {
            return Err(invalid("ic.modes", "modes are only used with kind = \"modes\""));
        }

        let out = &self.output;
        if out.sample_every == 0 {
            return Err(invalid("output.sample_every", "must be at least 1"));
        }
        if out.snapshot_every == Some(0) {
            return Err(invalid("output.snapshot_every", "must be at least 1"));
        }
        if !(out.sobolev_s > 2.0 && out.sobolev_s.is_finite()) {
            return Err(invalid("output.sobolev_s", format!("s must exceed 2, got {}", out.sobolev_s)));
        }

        if let Some(sweep) = &self.sweep {
            validate_nus(&sweep.nus)?;
        }
        if let Some(sens) = &self.sensitivity {
            if !(sens.eps > 0.0 && sens.eps.is_finite()) {
                return Err(invalid("sensitivity.eps", format!("eps must be positive, got {}", sens.eps)));
            }
            if sens.direction_seed.is_some_and(|s| i64::try_from(s).is_err()) {
                return Err(invalid("sensitivity.direction_seed", format!("seed must be at most {}", i64::MAX)));
            }
        }
        Ok(())
    }
}

pub(crate) fn validate_nus(nus: &[f64]) -> Result<()> {
    if nus.is_empty() {
        return Err(invalid("sweep.nus", "at least one viscosity is required"));
    }
    if let Some(nu) = nus.iter().find(|nu| !(**nu > 0.0 && nu.is_finite())) {
        return Err(invalid(
            "sweep.nus",
            format!("viscosities must be positive (nu = 0 is the reference run), got {nu}"),
        ));
    }
    if nus.windows(2).any(|w| w[1] >= w[0]) {
        return Err(invalid("sweep.nus", "viscosities must be strictly descending"));
    }
    Ok(())
}
