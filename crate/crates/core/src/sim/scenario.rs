//! Scenario files: JSON with units spelled out in field names, compiled into
//! the typed parameters consumed by the runner.
//!
//! ```json
//! {
//!   "name": "hover",
//!   "vehicle": {"mass_kg": 1.0, "gravity_mps2": 9.81},
//!   "aero": {"family": "sin2", "k_a": 0.06, "params": {"c0": 0.43, "c1": 0.462}},
//!   "wind": {"kind": "constant", "velocity_mps": [0, 0, 0]},
//!   "trajectory": {"kind": "constant", "velocity_mps": [0, 0, 0]},
//!   "dt_s": 0.001,
//!   "duration_s": 10.0
//! }
//! ```
//!
//! `aero` is either an inline model card or a path to one, resolved relative
//! to the scenario file.

use super::SimError;
use crate::aero::ModelCard;
use crate::control::{ControllerGains, YawPolicy};
use crate::dynamics::{ReferenceTrajectory, VehicleParams, VehicleState, WindModel, MAX_STEP};
use crate::math::{exp_so3, Vec3};
use serde::{Deserialize, Serialize};
use std::path::Path;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    #[serde(default)]
    pub name: Option<String>,
    pub vehicle: VehicleSpec,
    pub aero: AeroSpec,
    #[serde(default)]
    pub wind: WindSpec,
    #[serde(default)]
    pub trajectory: TrajectorySpec,
    #[serde(default)]
    pub gains: Option<GainsSpec>,
    #[serde(default)]
    pub initial: InitialSpec,
    pub dt_s: f64,
    pub duration_s: f64,
    #[serde(default)]
    pub disturbance_force_n: Option<[f64; 3]>,
    #[serde(default)]
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VehicleSpec {
    pub mass_kg: f64,
    #[serde(default = "default_gravity")]
    pub gravity_mps2: f64,
    #[serde(default)]
    pub thrust_limits_n: Option<[f64; 2]>,
}

fn default_gravity() -> f64 {
    9.81
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AeroSpec {
    Path(String),
    Inline(ModelCard),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum WindSpec {
    Constant {
        velocity_mps: [f64; 3],
    },
    Sinusoidal {
        mean_mps: [f64; 3],
        amplitude_mps: [f64; 3],
        frequency_hz: f64,
        #[serde(default)]
        phase_deg: f64,
    },
}

impl Default for WindSpec {
    fn default() -> Self {
        WindSpec::Constant {
            velocity_mps: [0.0; 3],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum TrajectorySpec {
    Constant {
        velocity_mps: [f64; 3],
    },
    Ramp {
        from_mps: [f64; 3],
        to_mps: [f64; 3],
        start_s: f64,
        duration_s: f64,
    },
    Circle {
        radius_m: f64,
        rate_dps: f64,
        #[serde(default)]
        phase_deg: f64,
        #[serde(default)]
        vertical_velocity_mps: f64,
    },
}

impl Default for TrajectorySpec {
    fn default() -> Self {
        TrajectorySpec::Constant {
            velocity_mps: [0.0; 3],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GainsSpec {
    pub k1: f64,
    pub k2: f64,
    pub k3: f64,
    pub eta_n: f64,
    #[serde(default)]
    pub integral: bool,
    #[serde(default)]
    pub yaw: Option<YawSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct YawSpec {
    pub gain_per_s: f64,
    pub heading_deg: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialSpec {
    #[serde(default)]
    pub position_m: [f64; 3],
    #[serde(default)]
    pub velocity_mps: [f64; 3],
    /// Rotation vector (axis times angle) of the initial attitude.
    #[serde(default)]
    pub attitude_rotvec_deg: [f64; 3],
    #[serde(default)]
    pub integral_m: [f64; 3],
}

/// A validated, ready-to-run scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub name: String,
    pub params: VehicleParams,
    pub wind: WindModel,
    pub trajectory: ReferenceTrajectory,
    pub gains: ControllerGains,
    pub initial: VehicleState,
    pub dt: f64,
    pub duration: f64,
    pub seed: u64,
}

fn vec3(a: [f64; 3]) -> Vec3 {
    Vec3::new(a[0], a[1], a[2])
}

fn config<E: std::fmt::Display>(what: &str) -> impl FnOnce(E) -> SimError + '_ {
    move |e| SimError::Config(format!("{what}: {e}"))
}

impl ScenarioFile {
    pub fn from_json(text: &str) -> Result<Self, SimError> {
        serde_json::from_str(text).map_err(config("scenario"))
    }

    /// Validates and resolves the file. Relative card paths are taken
    /// relative to `base_dir`.
    pub fn compile(&self, base_dir: Option<&Path>) -> Result<Scenario, SimError> {
        let card = match &self.aero {
            AeroSpec::Inline(card) => card.clone(),
            AeroSpec::Path(p) => {
                let path = match base_dir {
                    Some(dir) => dir.join(p),
                    None => p.into(),
                };
                let bytes = std::fs::read(&path)
                    .map_err(config(&format!("model card {}", path.display())))?;
                ModelCard::from_json_slice(&bytes).map_err(config("model card"))?
            }
        };
        let aero = card.to_model().map_err(config("model card"))?;

        let v = &self.vehicle;
        let mut params =
            VehicleParams::new(v.mass_kg, v.gravity_mps2, aero).map_err(config("vehicle"))?;
        if let Some([lo, hi]) = v.thrust_limits_n {
            params = params
                .with_thrust_limits(lo, hi)
                .map_err(config("vehicle"))?;
        }
        if let Some(d) = self.disturbance_force_n {
            if !d.iter().all(|x| x.is_finite()) {
                return Err(SimError::Config(
                    "disturbance_force_n must be finite".into(),
                ));
            }
            params = params.with_disturbance(vec3(d));
        }

        let wind = match &self.wind {
            WindSpec::Constant { velocity_mps } => WindModel::Constant {
                velocity: vec3(*velocity_mps),
            },
            WindSpec::Sinusoidal {
                mean_mps,
                amplitude_mps,
                frequency_hz,
                phase_deg,
            } => WindModel::Sinusoidal {
                mean: vec3(*mean_mps),
                amplitude: vec3(*amplitude_mps),
                frequency_hz: *frequency_hz,
                phase: phase_deg.to_radians(),
            },
        };
        let trajectory = match &self.trajectory {
            TrajectorySpec::Constant { velocity_mps } => ReferenceTrajectory::ConstantVelocity {
                velocity: vec3(*velocity_mps),
            },
            TrajectorySpec::Ramp {
                from_mps,
                to_mps,
                start_s,
                duration_s,
            } => ReferenceTrajectory::PolynomialRamp {
                from: vec3(*from_mps),
                to: vec3(*to_mps),
                start: *start_s,
                duration: *duration_s,
            },
            TrajectorySpec::Circle {
                radius_m,
                rate_dps,
                phase_deg,
                vertical_velocity_mps,
            } => ReferenceTrajectory::Circle {
                radius: *radius_m,
                rate: rate_dps.to_radians(),
                phase: phase_deg.to_radians(),
                vertical_velocity: *vertical_velocity_mps,
            },
        };
        if !trajectory.is_valid() {
            return Err(SimError::Config(
                "trajectory parameters are not finite or not positive".into(),
            ));
        }
        if !(wind.velocity(0.0).iter().all(|x| x.is_finite()) && wind_frequency_ok(&wind)) {
            return Err(SimError::Config("wind parameters must be finite".into()));
        }

        let gains = match &self.gains {
            None => ControllerGains::default_for(&params),
            Some(g) => {
                let yaw = match &g.yaw {
                    None => YawPolicy::Zero,
                    Some(y) if y.gain_per_s.is_finite() && y.heading_deg.is_finite() => {
                        YawPolicy::HeadingHold {
                            gain: y.gain_per_s,
                            target: y.heading_deg.to_radians(),
                        }
                    }
                    Some(_) => return Err(SimError::Config("yaw gains must be finite".into())),
                };
                ControllerGains::new(g.k1, g.k2, g.k3, g.eta_n)
                    .map_err(config("gains"))?
                    .with_integral(g.integral)
                    .with_yaw(yaw)
            }
        };

        let i = &self.initial;
        let rotvec = vec3(i.attitude_rotvec_deg).map(f64::to_radians);
        let initial = VehicleState {
            position: vec3(i.position_m),
            velocity: vec3(i.velocity_mps),
            attitude: exp_so3(&rotvec),
            velocity_error_integral: vec3(i.integral_m),
        };
        if !initial.is_finite() {
            return Err(SimError::Config("initial state must be finite".into()));
        }

        if !(self.dt_s > 0.0 && self.dt_s <= MAX_STEP) {
            return Err(SimError::Config(format!(
                "dt_s must lie in (0, {MAX_STEP}], got {}",
                self.dt_s
            )));
        }
        if !(self.duration_s.is_finite() && self.duration_s > 0.0) {
            return Err(SimError::Config(format!(
                "duration_s must be positive, got {}",
                self.duration_s
            )));
        }

        Ok(Scenario {
            name: self.name.clone().unwrap_or_else(|| "scenario".into()),
            params,
            wind,
            trajectory,
            gains,
            initial,
            dt: self.dt_s,
            duration: self.duration_s,
            seed: self.seed,
        })
    }
}

fn wind_frequency_ok(wind: &WindModel) -> bool {
    match wind {
        WindModel::Constant { .. } => true,
        WindModel::Sinusoidal {
            amplitude,
            frequency_hz,
            phase,
            ..
        } => {
            amplitude.iter().all(|x| x.is_finite()) && frequency_hz.is_finite() && phase.is_finite()
        }
    }
}

impl Scenario {
    /// Reads and compiles a scenario file.
    pub fn load(path: &Path) -> Result<Self, SimError> {
        let text = std::fs::read_to_string(path)
            .map_err(config(&format!("reading {}", path.display())))?;
        ScenarioFile::from_json(&text)?.compile(path.parent())
    }

    /// Number of logged records, `floor(duration / dt) + 1`.
    pub fn record_count(&self) -> usize {
        // tolerate representation error in e.g. 0.3 / 0.1
        (self.duration / self.dt + 1e-9).floor() as usize + 1
    }
}
