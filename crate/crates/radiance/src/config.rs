//! Run configuration: a flat JSON object whose keys mirror the CLI flags.

use crate::error::CliError;
use clap::{Args, ValueEnum};
use radiance_core::kinematics::{FieldConfig, Handedness, ParticleParams, PhaseWindow};
use radiance_core::quadrature::GridConfig;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Circular,
    Linear,
    Schott,
    NikishovRitus,
    RestFrameCircular,
    RestFrameLinear,
    OracleCompare,
    Sweep,
    ClassicalLimit,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Circular => "circular",
            Mode::Linear => "linear",
            Mode::Schott => "schott",
            Mode::NikishovRitus => "nikishov-ritus",
            Mode::RestFrameCircular => "rest-frame-circular",
            Mode::RestFrameLinear => "rest-frame-linear",
            Mode::OracleCompare => "oracle-compare",
            Mode::Sweep => "sweep",
            Mode::ClassicalLimit => "classical-limit",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum, Default)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum, Default)]
#[serde(rename_all = "lowercase")]
pub enum Quantity {
    #[default]
    Energy,
    Rate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum PolarizationArg {
    Circular,
    Linear,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum, Default)]
#[serde(rename_all = "lowercase")]
pub enum HandednessArg {
    #[default]
    Right,
    Left,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum, Default)]
#[serde(rename_all = "lowercase")]
pub enum CouplingArg {
    #[default]
    Diagonal,
    Coherent,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum, Default)]
#[serde(rename_all = "lowercase")]
pub enum Units {
    #[default]
    Internal,
    Physical,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum SweepParam {
    Xi,
    Pminus,
    Dphi,
    OmegaMax,
    RelTol,
}

impl SweepParam {
    pub fn name(self) -> &'static str {
        match self {
            SweepParam::Xi => "xi",
            SweepParam::Pminus => "pminus",
            SweepParam::Dphi => "dphi",
            SweepParam::OmegaMax => "omega_max",
            SweepParam::RelTol => "rel_tol",
        }
    }
}

/// Every key is optional so that a file and the command line can each
/// supply part of it. Unset keys take the defaults of [`GridConfig`].
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize, Args)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Set from the subcommand; only read from files.
    #[arg(skip)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<Mode>,

    /// Classical nonlinearity parameter ξ.
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub xi: Option<f64>,
    /// Light-front momentum p_- (lab-frame modes).
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pminus: Option<f64>,
    /// Use the average-rest-frame p_- instead of --pminus.
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rest_frame: Option<bool>,
    /// Rotation sense of the circular field (default right).
    #[arg(long, value_enum)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub handedness: Option<HandednessArg>,
    /// Polarization for oracle-compare and classical-limit.
    #[arg(long, value_enum)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub polarization: Option<PolarizationArg>,
    /// Start of the phase window (default 0).
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi_in: Option<f64>,
    /// Length of the phase window Δφ.
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dphi: Option<f64>,

    /// energy (dW) or rate (dw) for circular and linear.
    #[arg(long, value_enum)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quantity: Option<Quantity>,
    /// Harmonic coupling for linear energies.
    #[arg(long, value_enum)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coupling: Option<CouplingArg>,
    /// Emit dW_n/dθ rows on this many polar angles instead of per-harmonic totals.
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta_points: Option<usize>,

    /// Relative tolerance of every quadrature.
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rel_tol: Option<f64>,
    /// Absolute tolerance floor.
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub abs_tol: Option<f64>,
    /// Cap on the number of adaptive panels.
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_subdivisions: Option<usize>,
    /// Half-width of each resonance window in line widths.
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window_multiplier: Option<f64>,
    /// Fixed harmonic cutoff for classical rates.
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_max: Option<usize>,
    /// Upper end of the photon-frequency integration.
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega_max: Option<f64>,
    /// Width of the smooth frequency cutoff relative to its start.
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub taper_fraction: Option<f64>,
    /// Initial panels in θ.
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta_seed: Option<usize>,
    /// Initial trapezoid nodes in φ_γ.
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi_seed: Option<usize>,
    /// Nodes per frequency panel.
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chebyshev_nodes: Option<usize>,

    /// Output file; a summary line always goes to stdout.
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    /// Output format (default csv).
    #[arg(long, value_enum)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub format: Option<Format>,
    /// Worker threads (default: RADIANCE_THREADS, else all cores).
    #[arg(long, env = "RADIANCE_THREADS")]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threads: Option<usize>,
    /// Units of the reported totals (default internal).
    #[arg(long, value_enum)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub units: Option<Units>,
    /// Wave angular frequency in rad/s, for --units physical.
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega_w: Option<f64>,

    /// Computation repeated by a sweep.
    #[arg(long, value_enum)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep_mode: Option<Mode>,
    /// Parameter varied by a sweep.
    #[arg(long, value_enum)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep_param: Option<SweepParam>,
    /// First grid value.
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep_from: Option<f64>,
    /// Last grid value.
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep_to: Option<f64>,
    /// Number of grid points, inclusive of both ends.
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep_steps: Option<usize>,

    /// Window lengths for classical-limit (comma separated).
    #[arg(long, value_delimiter = ',')]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dphis: Option<Vec<f64>>,
}

impl RunConfig {
    /// Reads a config file. A JSON output document (with a `config` member)
    /// is accepted as well, so results can be re-run from their own output.
    pub fn from_file(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let mut v: Value =
            serde_json::from_str(text).map_err(|e| CliError::Usage(format!("invalid config: {e}")))?;
        if let Some(obj) = v.as_object_mut() {
            if let Some(inner) = obj.remove("config") {
                v = inner;
            }
        }
        serde_json::from_value(v).map_err(|e| CliError::Usage(format!("invalid config: {e}")))
    }

    /// Keys set in `over` replace those in `self`.
    pub fn overlay(&self, over: &RunConfig) -> RunConfig {
        let mut base = to_map(self);
        base.extend(to_map(over));
        serde_json::from_value(Value::Object(base)).expect("overlay of valid configs")
    }

    pub fn to_json(&self) -> Value {
        serde_json::to_value(self).expect("config serializes")
    }

    pub fn mode(&self) -> Result<Mode, CliError> {
        self.mode.ok_or_else(|| CliError::Usage("no mode given".into()))
    }

    pub fn grid(&self) -> Result<GridConfig, CliError> {
        let d = GridConfig::default();
        let g = GridConfig {
            rel_tol: self.rel_tol.unwrap_or(d.rel_tol),
            abs_tol: self.abs_tol.unwrap_or(d.abs_tol),
            max_subdivisions: self.max_subdivisions.unwrap_or(d.max_subdivisions),
            window_multiplier: self.window_multiplier.unwrap_or(d.window_multiplier),
            n_max_override: self.n_max,
            omega_max: self.omega_max,
            taper_fraction: self.taper_fraction.unwrap_or(d.taper_fraction),
            theta_seed: self.theta_seed.unwrap_or(d.theta_seed),
            phi_seed: self.phi_seed.unwrap_or(d.phi_seed),
            chebyshev_nodes: self.chebyshev_nodes.unwrap_or(d.chebyshev_nodes),
        };
        g.validate()?;
        Ok(g)
    }

    pub fn require_xi(&self) -> Result<f64, CliError> {
        self.xi.ok_or_else(|| missing("xi"))
    }

    pub fn field(&self, pol: PolarizationArg) -> Result<FieldConfig, CliError> {
        let xi = self.require_xi()?;
        Ok(match pol {
            PolarizationArg::Circular => {
                let h = match self.handedness.unwrap_or_default() {
                    HandednessArg::Right => Handedness::Right,
                    HandednessArg::Left => Handedness::Left,
                };
                FieldConfig::circular(xi, h)?
            }
            PolarizationArg::Linear => FieldConfig::linear(xi)?,
        })
    }

    /// Lab-frame particle: exactly one of `pminus` and `rest_frame = true`.
    pub fn particle(&self, f: &FieldConfig) -> Result<ParticleParams, CliError> {
        match (self.pminus, self.rest_frame.unwrap_or(false)) {
            (Some(_), true) => Err(CliError::Usage("pminus and rest_frame are mutually exclusive".into())),
            (Some(p), false) => Ok(ParticleParams::new(p)?),
            (None, true) => Ok(ParticleParams::rest_frame(f)),
            (None, false) => Err(missing("pminus")),
        }
    }

    /// Rest-frame modes fix p_- themselves.
    pub fn forbid_pminus(&self) -> Result<(), CliError> {
        if self.pminus.is_some() {
            return Err(CliError::Usage("pminus is not accepted in rest-frame modes".into()));
        }
        Ok(())
    }

    pub fn window(&self) -> Result<PhaseWindow, CliError> {
        let dphi = self.dphi.ok_or_else(|| missing("dphi"))?;
        let a = self.phi_in.unwrap_or(0.0);
        Ok(PhaseWindow::new(a, a + dphi)?)
    }

    pub fn polarization(&self) -> Result<PolarizationArg, CliError> {
        self.polarization.ok_or_else(|| missing("polarization"))
    }

    pub fn format(&self) -> Format {
        self.format.unwrap_or_default()
    }
}

fn to_map(c: &RunConfig) -> Map<String, Value> {
    match serde_json::to_value(c).expect("config serializes") {
        Value::Object(m) => m,
        _ => unreachable!(),
    }
}

pub(crate) fn missing(key: &str) -> CliError {
    CliError::Usage(format!("missing required key `{key}`"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_key_is_named() {
        let e = RunConfig::from_json(r#"{"xi": 0.5, "xii": 1}"#).unwrap_err();
        assert!(e.to_string().contains("xii"), "{e}");
    }

    #[test]
    fn overlay_prefers_command_line() {
        let file = RunConfig::from_json(r#"{"xi": 0.5, "dphi": 3.0}"#).unwrap();
        let cli = RunConfig { xi: Some(0.7), ..Default::default() };
        let c = file.overlay(&cli);
        assert_eq!(c.xi, Some(0.7));
        assert_eq!(c.dphi, Some(3.0));
    }

    #[test]
    fn output_document_is_accepted() {
        let c = RunConfig::from_json(r#"{"config": {"mode": "schott", "xi": 0.1}, "result": {}}"#).unwrap();
        assert_eq!(c.mode, Some(Mode::Schott));
        assert_eq!(c.xi, Some(0.1));
    }

    #[test]
    fn pminus_and_rest_frame_conflict() {
        let c = RunConfig { xi: Some(0.5), pminus: Some(1.0), rest_frame: Some(true), ..Default::default() };
        let f = c.field(PolarizationArg::Linear).unwrap();
        assert!(c.particle(&f).is_err());
    }
}
