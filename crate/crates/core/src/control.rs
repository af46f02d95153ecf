//! Nonlinear velocity controller built on the spherical-equivalent model.
//!
//! With `f_p = m g e3 - k_a C_D0 |xdot_a| xdot_a - m xddot_r [+ h(|I|^2) I]`,
//! which does not depend on the attitude, the thrust axis `k` is steered
//! toward `f_p` while the thrust intensity cancels the true aerodynamic load
//! along `k`. Per control cycle the thrust is computed first (it only needs
//! `f_a`), then the plant acceleration under that thrust, then `d f_p/dt`,
//! then the angular velocity.

use crate::aero::AeroError;
use crate::dynamics::{
    acceleration, DynamicsError, ReferenceTrajectory, VehicleParams, VehicleState, WindModel,
};
use crate::math::{e3, is_finite, Vec3};
use std::f64::consts::PI;

/// `|f_p|` must exceed this fraction of the weight.
pub const FP_GUARD_FRACTION: f64 = 1e-6;

/// `|f_p| + fbar_p3` must exceed this fraction of `|f_p|`.
pub const CONE_GUARD_FRACTION: f64 = 1e-9;

/// Airspeed below which the drag-rate term drops its `|u| u` derivative part.
const DRAG_RATE_THRESHOLD: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ControlError {
    #[error("invalid controller gains: {0}")]
    InvalidGains(String),
    #[error("aerodynamic model has no spherical equivalent")]
    NotEquivalent,
    #[error("|f_p| = {norm:e} N is below the guard {guard:e} N")]
    FpDegenerate { norm: f64, guard: f64 },
    #[error("thrust axis is antipodal to f_p (|f_p| + fbar_p3 = {margin:e})")]
    ThrustConeSingularity { margin: f64 },
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
}

impl From<AeroError> for ControlError {
    fn from(e: AeroError) -> Self {
        ControlError::Dynamics(DynamicsError::Aero(e))
    }
}

/// How the free rotation rate about the thrust axis is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum YawPolicy {
    #[default]
    Zero,
    /// `omega_3 = -gain * (heading - target)`, heading of the body `i` axis
    /// in the inertial `(e1, e2)` plane.
    HeadingHold { gain: f64, target: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ControllerGains {
    pub k1: f64,
    pub k2: f64,
    pub k3: f64,
    /// Bound of the integral correction (N).
    pub eta: f64,
    pub integral_enabled: bool,
    pub yaw: YawPolicy,
}

impl ControllerGains {
    pub fn new(k1: f64, k2: f64, k3: f64, eta: f64) -> Result<Self, ControlError> {
        for (name, v) in [("k1", k1), ("k2", k2), ("k3", k3), ("eta", eta)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(ControlError::InvalidGains(format!(
                    "{name} must be positive, got {v}"
                )));
            }
        }
        Ok(ControllerGains {
            k1,
            k2,
            k3,
            eta,
            integral_enabled: false,
            yaw: YawPolicy::Zero,
        })
    }

    /// Desk-scale defaults: `k1 = k2 = 0.5 / (m g)`, `k3 = 2`, `eta = 0.2 m g`.
    pub fn default_for(params: &VehicleParams) -> Self {
        let w = params.weight();
        ControllerGains {
            k1: 0.5 / w,
            k2: 0.5 / w,
            k3: 2.0,
            eta: 0.2 * w,
            integral_enabled: false,
            yaw: YawPolicy::Zero,
        }
    }

    pub fn with_integral(mut self, enabled: bool) -> Self {
        self.integral_enabled = enabled;
        self
    }

    pub fn with_yaw(mut self, yaw: YawPolicy) -> Self {
        self.yaw = yaw;
        self
    }
}

/// Thrust intensity and body angular velocity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ControlOutput {
    pub thrust: f64,
    pub omega: Vec3,
}

/// `h(s) = eta / sqrt(1 + s)` and `dh/ds`.
///
/// The scalar map `u -> h(u^2) u = eta u / sqrt(1 + u^2)` is bounded by `eta`
/// and has slope `eta (1 + u^2)^(-3/2)` in `(0, eta]`.
pub fn h_saturation(s: f64, eta: f64) -> (f64, f64) {
    let one_plus = 1.0 + s;
    let root = one_plus.sqrt();
    (eta / root, -0.5 * eta / (one_plus * root))
}

/// Forces in inertial coordinates used by the control law.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ForceTerms {
    pub f_a: Vec3,
    pub f_p: Vec3,
    pub fdot_p: Vec3,
}

fn integral_term(gains: &ControllerGains, state: &VehicleState) -> Vec3 {
    if !gains.integral_enabled {
        return Vec3::zeros();
    }
    let i = &state.velocity_error_integral;
    let (h, _) = h_saturation(i.norm_squared(), gains.eta);
    i * h
}

/// `(f_a, f_p)` at time `t`.
pub fn required_forces(
    params: &VehicleParams,
    gains: &ControllerGains,
    state: &VehicleState,
    wind: &WindModel,
    trajectory: &ReferenceTrajectory,
    t: f64,
) -> Result<(Vec3, Vec3), ControlError> {
    let cd0 = params.aero.cd0().ok_or(ControlError::NotEquivalent)?;
    let k_a = params.aero.k_a;
    let m = params.mass;
    let airspeed = state.airspeed(wind, t);
    let common =
        e3() * (m * params.gravity) - trajectory.acceleration(t) * m + integral_term(gains, state);

    let f_p = common - airspeed * (k_a * cd0 * airspeed.norm());
    let body_airspeed = state.attitude.apply_inverse(&airspeed);
    let aero_body = crate::aero::aero_force(&params.aero, &body_airspeed)?.total();
    let f_a = common + state.attitude.apply(&aero_body);
    if !(is_finite(&f_a) && is_finite(&f_p)) {
        return Err(DynamicsError::NonFiniteState.into());
    }
    Ok((f_a, f_p))
}

/// `f_a`, `f_p` and the analytic time derivative of `f_p` when the plant is
/// driven by `thrust`.
#[allow(clippy::too_many_arguments)]
pub fn compute_fp_fa(
    params: &VehicleParams,
    gains: &ControllerGains,
    state: &VehicleState,
    wind: &WindModel,
    trajectory: &ReferenceTrajectory,
    t: f64,
    thrust: f64,
) -> Result<ForceTerms, ControlError> {
    let (f_a, f_p) = required_forces(params, gains, state, wind, trajectory, t)?;
    let accel = acceleration(params, state, wind, t, thrust)?;
    let fdot_p = fp_rate(params, gains, state, wind, trajectory, t, &accel)?;
    Ok(ForceTerms { f_a, f_p, fdot_p })
}

fn fp_rate(
    params: &VehicleParams,
    gains: &ControllerGains,
    state: &VehicleState,
    wind: &WindModel,
    trajectory: &ReferenceTrajectory,
    t: f64,
    accel: &Vec3,
) -> Result<Vec3, ControlError> {
    let cd0 = params.aero.cd0().ok_or(ControlError::NotEquivalent)?;
    let drag_gain = params.aero.k_a * cd0;
    let u = state.airspeed(wind, t);
    let u_dot = accel - wind.acceleration(t);
    let speed = u.norm();
    let drag_rate = if speed < DRAG_RATE_THRESHOLD {
        u_dot * (-drag_gain * speed)
    } else {
        (u * (u.dot(&u_dot) / speed) + u_dot * speed) * (-drag_gain)
    };
    let mut rate = drag_rate - trajectory.jerk(t) * params.mass;
    if gains.integral_enabled {
        let i = &state.velocity_error_integral;
        let i_dot = state.velocity - trajectory.velocity(t);
        let (h, dh) = h_saturation(i.norm_squared(), gains.eta);
        rate += i_dot * h + i * (2.0 * dh * i.dot(&i_dot));
    }
    Ok(rate)
}

/// Rotation rate about the thrust axis.
pub fn yaw_policy(state: &VehicleState, policy: &YawPolicy) -> f64 {
    match *policy {
        YawPolicy::Zero => 0.0,
        YawPolicy::HeadingHold { gain, target } => {
            let m = state.attitude.matrix();
            let heading = m[(1, 0)].atan2(m[(0, 0)]);
            -gain * wrap_angle(heading - target)
        }
    }
}

/// Wraps to `(-pi, pi]`.
fn wrap_angle(a: f64) -> f64 {
    let w = a.rem_euclid(2.0 * PI);
    if w > PI {
        w - 2.0 * PI
    } else {
        w
    }
}

/// Controller output together with the forces it was computed from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ControlCycle {
    pub output: ControlOutput,
    pub forces: ForceTerms,
    /// Body-frame velocity error.
    pub velocity_error: Vec3,
}

/// Thrust and angular velocity for the current state.
pub fn velocity_control(
    gains: &ControllerGains,
    params: &VehicleParams,
    state: &VehicleState,
    wind: &WindModel,
    trajectory: &ReferenceTrajectory,
    t: f64,
) -> Result<ControlOutput, ControlError> {
    control_cycle(gains, params, state, wind, trajectory, t).map(|c| c.output)
}

/// [`velocity_control`], also returning the intermediate forces.
pub fn control_cycle(
    gains: &ControllerGains,
    params: &VehicleParams,
    state: &VehicleState,
    wind: &WindModel,
    trajectory: &ReferenceTrajectory,
    t: f64,
) -> Result<ControlCycle, ControlError> {
    let (f_a, f_p) = required_forces(params, gains, state, wind, trajectory, t)?;
    let fp_norm = f_p.norm();
    let guard = FP_GUARD_FRACTION * params.weight();
    if fp_norm.is_nan() || fp_norm <= guard {
        return Err(ControlError::FpDegenerate {
            norm: fp_norm,
            guard,
        });
    }
    let r = &state.attitude;
    let v_err = r.apply_inverse(&(state.velocity - trajectory.velocity(t)));
    let fa_body = r.apply_inverse(&f_a);
    let fp_body = r.apply_inverse(&f_p);
    let cone = fp_norm + fp_body.z;
    if cone.is_nan() || cone <= CONE_GUARD_FRACTION * fp_norm {
        return Err(ControlError::ThrustConeSingularity { margin: cone });
    }

    let thrust = fa_body.z + gains.k1 * fp_norm * v_err.z;

    let accel = acceleration(params, state, wind, t, thrust)?;
    let fdot_p = fp_rate(params, gains, state, wind, trajectory, t, &accel)?;

    // Rate of the unit vector f_p/|f_p| seen from the body: fbar_p x R^T fdot_p / |f_p|^2.
    let feed_forward = fp_body.cross(&r.apply_inverse(&fdot_p)) / (fp_norm * fp_norm);
    let tilt = gains.k3 * fp_norm / (cone * cone);
    let omega = Vec3::new(
        -gains.k2 * fp_norm * v_err.y - tilt * fp_body.y + feed_forward.x,
        gains.k2 * fp_norm * v_err.x + tilt * fp_body.x + feed_forward.y,
        yaw_policy(state, &gains.yaw),
    );
    Ok(ControlCycle {
        output: ControlOutput { thrust, omega },
        forces: ForceTerms { f_a, f_p, fdot_p },
        velocity_error: v_err,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LyapunovSample {
    /// `|v_err|^2 / 2 + (1 - cos(theta)) / (k2 m)`
    pub v: f64,
    /// Closed-form time derivative of `v` along closed-loop trajectories.
    pub vdot_predicted: f64,
    /// Angle between the thrust axis and `f_p` (rad).
    pub theta_tilde: f64,
    pub fp_norm: f64,
    pub vtilde_norm: f64,
    /// The integral correction is active. `v` then omits the integral state
    /// and `vdot_predicted` is not a certificate.
    pub integral_active: bool,
}

/// `V = |v|^2/2 + (1 - cos(theta)) / (k2 m)` from its parts.
pub fn lyapunov_value(vtilde_norm: f64, theta_tilde: f64, k2: f64, mass: f64) -> f64 {
    0.5 * vtilde_norm * vtilde_norm + (1.0 - theta_tilde.cos()) / (k2 * mass)
}

/// Samples the Lyapunov function and its predicted derivative.
///
/// The predicted derivative is `-(k1 |f_p| v3^2 + (k3/k2) tan^2(theta/2)) / m`.
pub fn lyapunov_sample(
    gains: &ControllerGains,
    params: &VehicleParams,
    state: &VehicleState,
    trajectory: &ReferenceTrajectory,
    wind: &WindModel,
    t: f64,
) -> Result<LyapunovSample, ControlError> {
    let (_, f_p) = required_forces(params, gains, state, wind, trajectory, t)?;
    let fp_norm = f_p.norm();
    if fp_norm == 0.0 {
        return Err(ControlError::FpDegenerate {
            norm: 0.0,
            guard: 0.0,
        });
    }
    let r = &state.attitude;
    let v_err = r.apply_inverse(&(state.velocity - trajectory.velocity(t)));
    let cos_theta = (r.apply_inverse(&f_p).z / fp_norm).clamp(-1.0, 1.0);
    let theta_tilde = cos_theta.acos();
    let vtilde_norm = v_err.norm();
    let v = lyapunov_value(vtilde_norm, theta_tilde, gains.k2, params.mass);
    let half_tan_sq = if cos_theta <= -1.0 {
        f64::INFINITY
    } else {
        (1.0 - cos_theta) / (1.0 + cos_theta)
    };
    let vdot_predicted =
        -(gains.k1 * fp_norm * v_err.z * v_err.z + gains.k3 / gains.k2 * half_tan_sq) / params.mass;
    Ok(LyapunovSample {
        v,
        vdot_predicted,
        theta_tilde,
        fp_norm,
        vtilde_norm,
        integral_active: gains.integral_enabled,
    })
}
