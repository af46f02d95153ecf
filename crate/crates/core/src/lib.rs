//! Velocity control of thrust-propelled vehicles with spherically-equivalent
//! aerodynamics.

pub mod aero;
pub mod control;
pub mod dynamics;
pub mod math;
pub mod sim;
