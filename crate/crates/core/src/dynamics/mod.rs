//! Translational dynamics of a thrust-propelled body and attitude kinematics.
//!
//! `m xddot = m g e3 + R F_a - T R e3 + d`, `Rdot = R S(omega)`, where `d` is
//! an optional constant disturbance force the controller does not model.

mod signals;

pub use signals::{ReferenceTrajectory, WindModel};

use crate::aero::{aero_force, AeroError, AeroModel};
use crate::math::{e3, exp_so3, is_finite, Rotation, Vec3};

/// Largest integration step accepted by [`step`].
pub const MAX_STEP: f64 = 0.1;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum DynamicsError {
    #[error("invalid vehicle parameters: {0}")]
    InvalidParams(String),
    #[error("step size {0} s is outside (0, 0.1]")]
    InvalidStep(f64),
    #[error("state became non-finite")]
    NonFiniteState,
    #[error(transparent)]
    Aero(#[from] AeroError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct VehicleParams {
    /// kg
    pub mass: f64,
    /// m/s^2, acting along +e3
    pub gravity: f64,
    pub aero: AeroModel,
    /// Constant inertial force (N) unknown to the controller.
    pub disturbance: Vec3,
    /// Optional actuator clamp on the thrust intensity (N).
    pub thrust_limits: Option<(f64, f64)>,
}

impl VehicleParams {
    pub fn new(mass: f64, gravity: f64, aero: AeroModel) -> Result<Self, DynamicsError> {
        if !(mass.is_finite() && mass > 0.0) {
            return Err(DynamicsError::InvalidParams(format!(
                "mass must be positive, got {mass}"
            )));
        }
        if !(gravity.is_finite() && gravity > 0.0) {
            return Err(DynamicsError::InvalidParams(format!(
                "gravity must be positive, got {gravity}"
            )));
        }
        Ok(VehicleParams {
            mass,
            gravity,
            aero,
            disturbance: Vec3::zeros(),
            thrust_limits: None,
        })
    }

    pub fn with_disturbance(mut self, force: Vec3) -> Self {
        self.disturbance = force;
        self
    }

    pub fn with_thrust_limits(mut self, min: f64, max: f64) -> Result<Self, DynamicsError> {
        if !(min.is_finite() && max.is_finite() && min <= max) {
            return Err(DynamicsError::InvalidParams(format!(
                "bad thrust limits [{min}, {max}]"
            )));
        }
        self.thrust_limits = Some((min, max));
        Ok(self)
    }

    pub fn weight(&self) -> f64 {
        self.mass * self.gravity
    }

    /// Thrust actually produced for a commanded intensity.
    pub fn applied_thrust(&self, commanded: f64) -> f64 {
        match self.thrust_limits {
            Some((lo, hi)) => commanded.clamp(lo, hi),
            None => commanded,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VehicleState {
    /// Inertial position (m).
    pub position: Vec3,
    /// Inertial velocity (m/s).
    pub velocity: Vec3,
    pub attitude: Rotation,
    /// Integral of the inertial velocity error (m).
    pub velocity_error_integral: Vec3,
}

impl Default for VehicleState {
    fn default() -> Self {
        VehicleState {
            position: Vec3::zeros(),
            velocity: Vec3::zeros(),
            attitude: Rotation::identity(),
            velocity_error_integral: Vec3::zeros(),
        }
    }
}

impl VehicleState {
    pub fn is_finite(&self) -> bool {
        is_finite(&self.position)
            && is_finite(&self.velocity)
            && is_finite(&self.velocity_error_integral)
            && self.attitude.matrix().iter().all(|c| c.is_finite())
    }

    /// Airspeed in inertial coordinates.
    pub fn airspeed(&self, wind: &WindModel, t: f64) -> Vec3 {
        self.velocity - wind.velocity(t)
    }
}

fn acceleration_at(
    params: &VehicleParams,
    velocity: &Vec3,
    attitude: &Rotation,
    wind: &WindModel,
    t: f64,
    thrust: f64,
) -> Result<Vec3, DynamicsError> {
    let airspeed_body = attitude.apply_inverse(&(velocity - wind.velocity(t)));
    let aero_body = aero_force(&params.aero, &airspeed_body)?.total();
    let thrust = params.applied_thrust(thrust);
    let body_force = aero_body - e3() * thrust;
    Ok(e3() * params.gravity + (attitude.apply(&body_force) + params.disturbance) / params.mass)
}

/// Inertial acceleration for thrust intensity `thrust`.
pub fn acceleration(
    params: &VehicleParams,
    state: &VehicleState,
    wind: &WindModel,
    t: f64,
    thrust: f64,
) -> Result<Vec3, DynamicsError> {
    acceleration_at(params, &state.velocity, &state.attitude, wind, t, thrust)
}

/// Advances the state by `dt` holding `thrust` and `omega` constant.
///
/// Position, velocity and the velocity-error integral use classical RK4.
/// The attitude is advanced exactly, `R+ = R exp(S(omega) dt)`, and the
/// stage attitudes are taken on the same exact path.
#[allow(clippy::too_many_arguments)]
pub fn step(
    params: &VehicleParams,
    state: &VehicleState,
    wind: &WindModel,
    trajectory: &ReferenceTrajectory,
    t: f64,
    dt: f64,
    thrust: f64,
    omega: &Vec3,
) -> Result<VehicleState, DynamicsError> {
    if !(dt > 0.0 && dt <= MAX_STEP) {
        return Err(DynamicsError::InvalidStep(dt));
    }
    let rotating = *omega != Vec3::zeros();
    let (r_half, r_end) = if rotating {
        let half = state.attitude.compose(&exp_so3(&(omega * (0.5 * dt))));
        let end = state.attitude.compose(&exp_so3(&(omega * dt)));
        (half, end)
    } else {
        (state.attitude, state.attitude)
    };

    let v0 = state.velocity;
    let t_half = t + 0.5 * dt;
    let t_end = t + dt;

    let a1 = acceleration_at(params, &v0, &state.attitude, wind, t, thrust)?;
    let e1 = v0 - trajectory.velocity(t);

    let v2 = v0 + a1 * (0.5 * dt);
    let a2 = acceleration_at(params, &v2, &r_half, wind, t_half, thrust)?;
    let e2 = v2 - trajectory.velocity(t_half);

    let v3 = v0 + a2 * (0.5 * dt);
    let a3 = acceleration_at(params, &v3, &r_half, wind, t_half, thrust)?;
    let e3_ = v3 - trajectory.velocity(t_half);

    let v4 = v0 + a3 * dt;
    let a4 = acceleration_at(params, &v4, &r_end, wind, t_end, thrust)?;
    let e4 = v4 - trajectory.velocity(t_end);

    let sixth = dt / 6.0;
    let next = VehicleState {
        position: state.position + (v0 + (v2 + v3) * 2.0 + v4) * sixth,
        velocity: v0 + (a1 + (a2 + a3) * 2.0 + a4) * sixth,
        attitude: r_end,
        velocity_error_integral: state.velocity_error_integral
            + (e1 + (e2 + e3_) * 2.0 + e4) * sixth,
    };
    if !next.is_finite() {
        return Err(DynamicsError::NonFiniteState);
    }
    Ok(next)
}
