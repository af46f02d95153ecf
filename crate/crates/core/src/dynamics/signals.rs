//! Time-varying wind and reference velocity, with analytic derivatives.

use crate::math::Vec3;
use std::f64::consts::TAU;

/// Uniform wind velocity in inertial coordinates.
#[derive(Debug, Clone, PartialEq)]
pub enum WindModel {
    Constant {
        velocity: Vec3,
    },
    /// `mean + amplitude * sin(2 pi f t + phase)` per axis.
    Sinusoidal {
        mean: Vec3,
        amplitude: Vec3,
        frequency_hz: f64,
        phase: f64,
    },
}

impl Default for WindModel {
    fn default() -> Self {
        WindModel::Constant {
            velocity: Vec3::zeros(),
        }
    }
}

impl WindModel {
    pub fn still() -> Self {
        Self::default()
    }

    pub fn velocity(&self, t: f64) -> Vec3 {
        match self {
            WindModel::Constant { velocity } => *velocity,
            WindModel::Sinusoidal {
                mean,
                amplitude,
                frequency_hz,
                phase,
            } => mean + amplitude * (TAU * frequency_hz * t + phase).sin(),
        }
    }

    pub fn acceleration(&self, t: f64) -> Vec3 {
        match self {
            WindModel::Constant { .. } => Vec3::zeros(),
            WindModel::Sinusoidal {
                amplitude,
                frequency_hz,
                phase,
                ..
            } => {
                let w = TAU * frequency_hz;
                amplitude * (w * (w * t + phase).cos())
            }
        }
    }

    pub fn jerk(&self, t: f64) -> Vec3 {
        match self {
            WindModel::Constant { .. } => Vec3::zeros(),
            WindModel::Sinusoidal {
                amplitude,
                frequency_hz,
                phase,
                ..
            } => {
                let w = TAU * frequency_hz;
                amplitude * (-w * w * (w * t + phase).sin())
            }
        }
    }
}

/// Reference velocity `xdot_r(t)` in inertial coordinates.
#[derive(Debug, Clone, PartialEq)]
pub enum ReferenceTrajectory {
    ConstantVelocity {
        velocity: Vec3,
    },
    /// Quintic blend from `from` to `to` over `[start, start + duration]`;
    /// velocity, acceleration and jerk are continuous.
    PolynomialRamp {
        from: Vec3,
        to: Vec3,
        start: f64,
        duration: f64,
    },
    /// Horizontal circle of `radius` at `rate` rad/s, plus a constant
    /// vertical velocity.
    Circle {
        radius: f64,
        rate: f64,
        phase: f64,
        vertical_velocity: f64,
    },
}

impl Default for ReferenceTrajectory {
    fn default() -> Self {
        ReferenceTrajectory::ConstantVelocity {
            velocity: Vec3::zeros(),
        }
    }
}

/// Smoothstep `10 u^3 - 15 u^4 + 6 u^5` and its first two derivatives in `u`.
fn quintic(u: f64) -> (f64, f64, f64) {
    if u <= 0.0 {
        return (0.0, 0.0, 0.0);
    }
    if u >= 1.0 {
        return (1.0, 0.0, 0.0);
    }
    let u2 = u * u;
    let u3 = u2 * u;
    (
        u3 * (10.0 - 15.0 * u + 6.0 * u2),
        30.0 * u2 * (1.0 - 2.0 * u + u2),
        60.0 * u * (1.0 - 3.0 * u + 2.0 * u2),
    )
}

impl ReferenceTrajectory {
    pub fn hover() -> Self {
        Self::default()
    }

    pub fn velocity(&self, t: f64) -> Vec3 {
        match self {
            ReferenceTrajectory::ConstantVelocity { velocity } => *velocity,
            ReferenceTrajectory::PolynomialRamp {
                from,
                to,
                start,
                duration,
            } => {
                let (s, _, _) = quintic((t - start) / duration);
                from + (to - from) * s
            }
            ReferenceTrajectory::Circle {
                radius,
                rate,
                phase,
                vertical_velocity,
            } => {
                let (s, c) = (rate * t + phase).sin_cos();
                Vec3::new(-radius * rate * s, radius * rate * c, *vertical_velocity)
            }
        }
    }

    pub fn acceleration(&self, t: f64) -> Vec3 {
        match self {
            ReferenceTrajectory::ConstantVelocity { .. } => Vec3::zeros(),
            ReferenceTrajectory::PolynomialRamp {
                from,
                to,
                start,
                duration,
            } => {
                let (_, ds, _) = quintic((t - start) / duration);
                (to - from) * (ds / duration)
            }
            ReferenceTrajectory::Circle {
                radius,
                rate,
                phase,
                ..
            } => {
                let (s, c) = (rate * t + phase).sin_cos();
                let k = -radius * rate * rate;
                Vec3::new(k * c, k * s, 0.0)
            }
        }
    }

    /// Third derivative of the reference position.
    pub fn jerk(&self, t: f64) -> Vec3 {
        match self {
            ReferenceTrajectory::ConstantVelocity { .. } => Vec3::zeros(),
            ReferenceTrajectory::PolynomialRamp {
                from,
                to,
                start,
                duration,
            } => {
                let (_, _, dds) = quintic((t - start) / duration);
                (to - from) * (dds / (duration * duration))
            }
            ReferenceTrajectory::Circle {
                radius,
                rate,
                phase,
                ..
            } => {
                let (s, c) = (rate * t + phase).sin_cos();
                let k = radius * rate * rate * rate;
                Vec3::new(k * s, -k * c, 0.0)
            }
        }
    }

    pub fn is_valid(&self) -> bool {
        match self {
            ReferenceTrajectory::ConstantVelocity { velocity } => crate::math::is_finite(velocity),
            ReferenceTrajectory::PolynomialRamp {
                from,
                to,
                start,
                duration,
            } => {
                crate::math::is_finite(from)
                    && crate::math::is_finite(to)
                    && start.is_finite()
                    && *duration > 0.0
            }
            ReferenceTrajectory::Circle {
                radius,
                rate,
                phase,
                vertical_velocity,
            } => {
                [radius, rate, phase, vertical_velocity]
                    .iter()
                    .all(|v| v.is_finite())
                    && *radius >= 0.0
            }
        }
    }
}
