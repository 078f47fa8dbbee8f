//! JSON run configuration.
//!
//! Every field has a sensible default, so `{}` is a valid config and the
//! subcommands run out of the box with the reference polytropic setup.
//! Validation errors carry the offending field and value.

use capfluid::grid::StencilOrder;
use capfluid::lagrangian1d::Energy1D;
use capfluid::thermo::EosModel;
use serde::Deserialize;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub eos: EosModel,
    /// Capillarity coefficient of the Eulerian model.
    pub c: f64,
    pub equilibrium: Equilibrium,
    pub dispersion: DispersionConfig,
    pub grid: GridConfig,
    pub time: TimeConfig,
    /// Energy functional of the mass-Lagrangian solver.
    pub lagrangian_energy: Energy1D,
    pub initial: InitialCondition,
    pub output: OutputConfig,
    pub verify: VerifyConfig,
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            eos: EosModel::Polytropic { k: 1.0, gamma: 2.0 },
            c: 0.1,
            equilibrium: Equilibrium::default(),
            dispersion: DispersionConfig::default(),
            grid: GridConfig::default(),
            time: TimeConfig::default(),
            lagrangian_energy: Energy1D::PowerLaw {
                gamma: 2.0,
                capillarity: 0.1,
            },
            initial: InitialCondition::default(),
            output: OutputConfig::default(),
            verify: VerifyConfig::default(),
            seed: 42,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Equilibrium {
    pub rho_e: f64,
    pub eta_e: f64,
    pub u_e: [f64; 3],
}

impl Default for Equilibrium {
    fn default() -> Self {
        Self {
            rho_e: 1.0,
            eta_e: 0.0,
            u_e: [0.0; 3],
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DispersionConfig {
    pub k_min: f64,
    pub k_max: f64,
    pub n_k: usize,
    pub direction: [f64; 3],
}

impl Default for DispersionConfig {
    fn default() -> Self {
        Self {
            k_min: 0.0,
            k_max: 4.0,
            n_k: 41,
            direction: [1.0, 0.0, 0.0],
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridConfig {
    pub n: usize,
    pub length: f64,
    /// Central-difference order: 2, 4 or 6.
    pub order: u8,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self {
            n: 256,
            length: std::f64::consts::TAU,
            order: 4,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TimeConfig {
    /// Explicit step; mutually exclusive with `cfl`.
    pub dt: Option<f64>,
    /// CFL fraction of the solver's stability bound; mutually exclusive
    /// with `dt`.
    pub cfl: Option<f64>,
    pub t_final: f64,
    pub audit_every: usize,
    pub snapshot_every: Option<usize>,
}

impl Default for TimeConfig {
    fn default() -> Self {
        Self {
            dt: None,
            cfl: Some(0.4),
            t_final: 4.0,
            audit_every: 50,
            snapshot_every: None,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "preset", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialCondition {
    /// Constant fields at the configured equilibrium.
    Uniform,
    /// Sinusoidal density (or specific-volume) perturbation with compatible
    /// gradient field.
    StandingWave { amplitude: f64, mode: usize },
}

impl Default for InitialCondition {
    fn default() -> Self {
        InitialCondition::StandingWave {
            amplitude: 0.01,
            mode: 1,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputConfig {
    /// Output file; stdout when absent. Snapshots (if requested) go to
    /// sibling files named `<stem>_snap_NNNNNN.csv`.
    pub path: Option<String>,
    pub format: OutputFormat,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self {
            path: None,
            format: OutputFormat::Csv,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct VerifyConfig {
    pub spectral_samples: usize,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            spectral_samples: 200,
        }
    }
}

impl RunConfig {
    /// Structural validation beyond what serde enforces.
    pub fn validate(&self) -> Result<(), String> {
        self.eos.validate().map_err(|e| e.to_string())?;
        self.lagrangian_energy
            .validate()
            .map_err(|e| e.to_string())?;
        if !(self.c > 0.0) {
            return Err(format!("c must be > 0, got {}", self.c));
        }
        if !(self.equilibrium.rho_e > 0.0) {
            return Err(format!(
                "equilibrium.rho_e must be > 0, got {}",
                self.equilibrium.rho_e
            ));
        }
        if self.dispersion.n_k < 1 {
            return Err("dispersion.n_k must be >= 1".into());
        }
        if self.grid.n < 8 {
            return Err(format!("grid.n must be >= 8, got {}", self.grid.n));
        }
        if !(self.grid.length > 0.0) {
            return Err(format!("grid.length must be > 0, got {}", self.grid.length));
        }
        StencilOrder::try_from(self.grid.order).map_err(|e| e.to_string())?;
        if !(self.time.t_final > 0.0) {
            return Err(format!(
                "time.t_final must be > 0, got {}",
                self.time.t_final
            ));
        }
        if self.time.audit_every == 0 {
            return Err("time.audit_every must be >= 1".into());
        }
        match (self.time.dt, self.time.cfl) {
            (Some(_), Some(_)) => {
                return Err("time.dt and time.cfl are mutually exclusive; give exactly one".into())
            }
            (None, None) => {
                return Err("give exactly one of time.dt or time.cfl".into());
            }
            (Some(dt), None) if !(dt > 0.0) => {
                return Err(format!("time.dt must be > 0, got {dt}"));
            }
            (None, Some(cfl)) if !(cfl > 0.0) => {
                return Err(format!("time.cfl must be > 0, got {cfl}"));
            }
            _ => {}
        }
        if let InitialCondition::StandingWave { amplitude, mode } = self.initial {
            if !amplitude.is_finite() {
                return Err(format!("initial.amplitude must be finite, got {amplitude}"));
            }
            if mode == 0 {
                return Err("initial.mode must be >= 1".into());
            }
        }
        if self.verify.spectral_samples < 1 {
            return Err("verify.spectral_samples must be >= 1".into());
        }
        Ok(())
    }

    pub fn stencil_order(&self) -> StencilOrder {
        StencilOrder::try_from(self.grid.order).expect("validated")
    }
}
