//! Monte-Carlo sampling of initial conditions around a base scenario.

use super::{run_batch, RunStatus, Scenario, SimError};
use crate::control::required_forces;
use crate::math::{e3, exp_so3, Rotation, Vec3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::f64::consts::{PI, TAU};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepConfig {
    pub samples: usize,
    /// Largest initial angle between the thrust axis and `f_p` (rad).
    pub theta_max: f64,
    /// Largest initial velocity error (m/s).
    pub speed_max: f64,
    pub seed: u64,
}

/// Convergence: `|v_err| < 1e-3` m/s and attitude error `< 0.01` rad at the end.
pub const CONVERGED_SPEED: f64 = 1e-3;
pub const CONVERGED_ANGLE: f64 = 0.01;

/// Draws `config.samples` copies of `base` with random initial velocity error
/// (uniform in a ball) and attitude error (angle uniform in `[0, theta_max]`,
/// random tilt direction and yaw).
pub fn sample_initial_conditions(
    base: &Scenario,
    config: &SweepConfig,
) -> Result<Vec<Scenario>, SimError> {
    if !(config.theta_max >= 0.0 && config.theta_max < PI) {
        return Err(SimError::Config(format!(
            "theta max must lie in [0, 180) deg, got {}",
            config.theta_max.to_degrees()
        )));
    }
    if !(config.speed_max >= 0.0 && config.speed_max.is_finite()) {
        return Err(SimError::Config("speed max must be non-negative".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let v_ref = base.trajectory.velocity(0.0);
    (0..config.samples)
        .map(|i| {
            let velocity = v_ref + random_in_ball(&mut rng) * config.speed_max;
            let mut s = base.clone();
            s.initial.velocity = velocity;
            // f_p does not depend on the attitude
            let (_, f_p) =
                required_forces(&s.params, &s.gains, &s.initial, &s.wind, &s.trajectory, 0.0)
                    .map_err(|e| SimError::Config(e.to_string()))?;
            if f_p.norm() == 0.0 {
                return Err(SimError::Config("f_p vanishes at t = 0".into()));
            }
            let theta = rng.gen_range(0.0..=config.theta_max);
            let tilt_dir = rng.gen_range(0.0..TAU);
            let yaw = rng.gen_range(0.0..TAU);
            s.initial.attitude = tilted_attitude(&f_p, theta, tilt_dir, yaw);
            s.name = format!("{}-{i}", base.name);
            s.seed = config.seed.wrapping_add(i as u64);
            Ok(s)
        })
        .collect()
}

fn random_in_ball(rng: &mut ChaCha8Rng) -> Vec3 {
    loop {
        let v = Vec3::new(
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
        );
        if v.norm_squared() <= 1.0 {
            return v;
        }
    }
}

/// Attitude whose thrust axis makes angle `theta` with `f_p`.
fn tilted_attitude(f_p: &Vec3, theta: f64, tilt_dir: f64, yaw: f64) -> Rotation {
    let target = f_p.normalize();
    let align = {
        let axis = e3().cross(&target);
        let angle = e3().dot(&target).clamp(-1.0, 1.0).acos();
        if axis.norm() < 1e-12 {
            if angle > 1.0 {
                exp_so3(&Vec3::new(PI, 0.0, 0.0))
            } else {
                Rotation::identity()
            }
        } else {
            Rotation::from_axis_angle(&axis, angle)
        }
    };
    // tilt about a body axis orthogonal to e3, then spin about e3
    let tilt = exp_so3(&(Vec3::new(tilt_dir.cos(), tilt_dir.sin(), 0.0) * theta));
    align.compose(&tilt).compose(&exp_so3(&(e3() * yaw)))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepOutcome {
    pub name: String,
    pub initial_theta_tilde_rad: f64,
    pub initial_vtilde_norm_mps: f64,
    pub status: Option<RunStatus>,
    pub error: Option<String>,
    pub final_vtilde_norm_mps: f64,
    pub final_theta_tilde_rad: f64,
    pub v_violations: usize,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepReport {
    pub samples: usize,
    pub converged: usize,
    pub convergence_fraction: f64,
    pub outcomes: Vec<SweepOutcome>,
}

pub fn run_sweep(
    base: &Scenario,
    config: &SweepConfig,
    parallelism: usize,
) -> Result<SweepReport, SimError> {
    let scenarios = sample_initial_conditions(base, config)?;
    let results = run_batch(&scenarios, parallelism)?;
    let outcomes: Vec<SweepOutcome> = scenarios
        .iter()
        .zip(results)
        .map(|(s, res)| match res {
            Ok(log) => {
                let first = log.records.first();
                let sum = &log.summary;
                SweepOutcome {
                    name: s.name.clone(),
                    initial_theta_tilde_rad: first.map_or(f64::NAN, |r| r.lyapunov.theta_tilde),
                    initial_vtilde_norm_mps: first.map_or(f64::NAN, |r| r.lyapunov.vtilde_norm),
                    status: Some(sum.status),
                    error: None,
                    final_vtilde_norm_mps: sum.final_vtilde_norm_mps,
                    final_theta_tilde_rad: sum.final_theta_tilde_rad,
                    v_violations: sum.v_violations,
                    converged: sum.status == RunStatus::Completed
                        && sum.final_vtilde_norm_mps < CONVERGED_SPEED
                        && sum.final_theta_tilde_rad < CONVERGED_ANGLE,
                }
            }
            Err(e) => SweepOutcome {
                name: s.name.clone(),
                initial_theta_tilde_rad: f64::NAN,
                initial_vtilde_norm_mps: f64::NAN,
                status: None,
                error: Some(e.to_string()),
                final_vtilde_norm_mps: f64::NAN,
                final_theta_tilde_rad: f64::NAN,
                v_violations: 0,
                converged: false,
            },
        })
        .collect();
    let converged = outcomes.iter().filter(|o| o.converged).count();
    Ok(SweepReport {
        samples: outcomes.len(),
        converged,
        convergence_fraction: if outcomes.is_empty() {
            0.0
        } else {
            converged as f64 / outcomes.len() as f64
        },
        outcomes,
    })
}
