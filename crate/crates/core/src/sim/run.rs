use super::{Scenario, SimError};
use crate::aero::angles_from_airspeed;
use crate::control::{control_cycle, lyapunov_sample, ControlError, LyapunovSample};
use crate::dynamics::{step, DynamicsError, VehicleState};
use crate::math::Vec3;
use rayon::prelude::*;
use serde::Serialize;

/// `|v_err|` below which the vehicle counts as settled (m/s).
pub const SETTLING_THRESHOLD: f64 = 1e-3;

/// Per-step increase of `V` tolerated before counting a violation.
pub const V_INCREASE_TOLERANCE: f64 = 1e-6;

/// One logged instant: the state at `t` and the command applied from `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct Record {
    pub t: f64,
    pub state: VehicleState,
    pub alpha: f64,
    pub beta: f64,
    pub thrust: f64,
    pub omega: Vec3,
    pub lyapunov: LyapunovSample,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RunStatus {
    Completed,
    /// `|f_p|` fell to the guard at `t_s`; the run stopped there.
    FpDegenerate {
        t_s: f64,
    },
    /// The thrust axis reached the antipode of `f_p` at `t_s`.
    ThrustConeSingularity {
        t_s: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub name: String,
    pub status: RunStatus,
    pub records: usize,
    /// First time after which `|v_err|` stays below the threshold.
    pub settling_time_s: Option<f64>,
    pub rms_error_after_settling_mps: Option<f64>,
    pub max_theta_tilde_rad: f64,
    pub v_violations: usize,
    pub max_v_increase: f64,
    pub final_vtilde_norm_mps: f64,
    pub final_theta_tilde_rad: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunLog {
    pub records: Vec<Record>,
    pub summary: Summary,
}

/// Simulates the closed loop from `t = 0` to the scenario duration. The
/// command is computed at each step and held over it.
pub fn run_scenario(scenario: &Scenario) -> Result<RunLog, SimError> {
    let n = scenario.record_count();
    let mut records = Vec::with_capacity(n);
    let mut state = scenario.initial.clone();
    let mut status = RunStatus::Completed;

    for k in 0..n {
        let t = k as f64 * scenario.dt;
        let record = match make_record(scenario, &state, t) {
            Ok(r) => r,
            Err(e) => {
                status = flag(e, t)?;
                break;
            }
        };
        let (thrust, omega) = (record.thrust, record.omega);
        records.push(record);
        if k + 1 == n {
            break;
        }
        let h = (k + 1) as f64 * scenario.dt - t;
        state = step(
            &scenario.params,
            &state,
            &scenario.wind,
            &scenario.trajectory,
            t,
            h,
            thrust,
            &omega,
        )
        .map_err(|e| dynamics_failure(e, t))?;
    }

    let summary = summarize(scenario, &records, status);
    Ok(RunLog { records, summary })
}

fn make_record(scenario: &Scenario, state: &VehicleState, t: f64) -> Result<Record, ControlError> {
    let cycle = control_cycle(
        &scenario.gains,
        &scenario.params,
        state,
        &scenario.wind,
        &scenario.trajectory,
        t,
    )?;
    let lyapunov = lyapunov_sample(
        &scenario.gains,
        &scenario.params,
        state,
        &scenario.trajectory,
        &scenario.wind,
        t,
    )?;
    let body_airspeed = state
        .attitude
        .apply_inverse(&state.airspeed(&scenario.wind, t));
    // angles are undefined in still air; log zeros there
    let (alpha, beta) = angles_from_airspeed(&body_airspeed).unwrap_or((0.0, 0.0));
    Ok(Record {
        t,
        state: state.clone(),
        alpha,
        beta,
        thrust: cycle.output.thrust,
        omega: cycle.output.omega,
        lyapunov,
    })
}

/// Control failures end the run with a flagged status; anything else is fatal.
fn flag(e: ControlError, t: f64) -> Result<RunStatus, SimError> {
    match e {
        ControlError::FpDegenerate { .. } => {
            log::warn!("f_p degenerate at t = {t} s; stopping");
            Ok(RunStatus::FpDegenerate { t_s: t })
        }
        ControlError::ThrustConeSingularity { .. } => {
            log::warn!("thrust cone singularity at t = {t} s; stopping");
            Ok(RunStatus::ThrustConeSingularity { t_s: t })
        }
        ControlError::Dynamics(d) => Err(dynamics_failure(d, t)),
        other => Err(SimError::Config(other.to_string())),
    }
}

fn dynamics_failure(e: DynamicsError, t: f64) -> SimError {
    match e {
        DynamicsError::NonFiniteState => SimError::NumericalDivergence { t_s: t },
        other => SimError::Config(other.to_string()),
    }
}

fn summarize(scenario: &Scenario, records: &[Record], status: RunStatus) -> Summary {
    let settled_from = records
        .iter()
        .rposition(|r| r.lyapunov.vtilde_norm >= SETTLING_THRESHOLD)
        .map_or(0, |i| i + 1);
    let settled = &records[settled_from.min(records.len())..];
    let (settling_time_s, rms_error_after_settling_mps) = if settled.is_empty() {
        (None, None)
    } else {
        let ms = settled
            .iter()
            .map(|r| r.lyapunov.vtilde_norm.powi(2))
            .sum::<f64>()
            / settled.len() as f64;
        (Some(settled[0].t), Some(ms.sqrt()))
    };

    let mut v_violations = 0;
    let mut max_v_increase = f64::NEG_INFINITY;
    for w in records.windows(2) {
        let inc = w[1].lyapunov.v - w[0].lyapunov.v;
        max_v_increase = max_v_increase.max(inc);
        if inc > V_INCREASE_TOLERANCE {
            v_violations += 1;
        }
    }
    if records.len() < 2 {
        max_v_increase = 0.0;
    }

    let last = records.last();
    Summary {
        name: scenario.name.clone(),
        status,
        records: records.len(),
        settling_time_s,
        rms_error_after_settling_mps,
        max_theta_tilde_rad: records
            .iter()
            .map(|r| r.lyapunov.theta_tilde)
            .fold(0.0, f64::max),
        v_violations,
        max_v_increase,
        final_vtilde_norm_mps: last.map_or(f64::NAN, |r| r.lyapunov.vtilde_norm),
        final_theta_tilde_rad: last.map_or(f64::NAN, |r| r.lyapunov.theta_tilde),
    }
}

/// Runs independent scenarios on `parallelism` worker threads. Output order
/// follows input order, and results do not depend on `parallelism`.
pub fn run_batch(
    scenarios: &[Scenario],
    parallelism: usize,
) -> Result<Vec<Result<RunLog, SimError>>, SimError> {
    if parallelism == 0 {
        return Err(SimError::Config("parallelism must be positive".into()));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(parallelism)
        .build()
        .map_err(|e| SimError::Config(format!("thread pool: {e}")))?;
    Ok(pool.install(|| scenarios.par_iter().map(run_scenario).collect()))
}
