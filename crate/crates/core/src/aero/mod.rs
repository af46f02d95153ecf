//! Lift and drag of rotationally symmetric bodies.
//!
//! The airspeed `v_a` is given in body coordinates. The angle of attack
//! `alpha` is measured between `-k` and `v_a`, and `beta` is the azimuth of
//! the projection of `v_a` on the `{i, j}` plane. For symmetric bodies the
//! coefficients depend on `alpha` only and the lift direction is
//! `r(beta) x v_a` with `r(beta) = -sin(beta) i + cos(beta) j`.
//!
//! A model admits a *spherical equivalent* when `C_D + C_L cot(alpha)` is a
//! constant `C_D0`. The aerodynamic force is then the sum of an
//! orientation-independent drag `-k_a C_D0 |v_a| v_a` and a force along `k`,
//! which can be absorbed into the thrust.

mod card;
mod fit;

pub use card::{parse_samples, CardParams, CardResiduals, FlowConditions, ModelCard, Sample};
pub use fit::{fit_sin2_family, fit_tan_family, FitResiduals, Sin2Fit, TanFit};

use crate::math::{e3, Vec3};
use std::f64::consts::{FRAC_PI_2, PI};

/// `sin(alpha)` below which `beta` is reported as zero.
pub const AXIS_SINE_THRESHOLD: f64 = 1e-9;

/// Airspeed below which the angles are undefined.
pub const MIN_AIRSPEED: f64 = 1e-12;

/// Largest `C_D + C_L cot(alpha)` spread accepted as an exact equivalency.
pub const EQUIVALENCY_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum AeroError {
    #[error("airspeed is zero; angle of attack is undefined")]
    ZeroAirspeed,
    #[error("angle of attack {alpha} rad is outside the model domain [{lo}, {hi}]")]
    Domain { alpha: f64, lo: f64, hi: f64 },
    #[error("model does not admit a spherical equivalent (defect {defect:e})")]
    NotEquivalent { defect: f64 },
    #[error("invalid aerodynamic model: {0}")]
    InvalidModel(String),
    #[error("least-squares problem is singular (condition number {condition:e})")]
    SingularFit { condition: f64 },
    #[error("invalid samples: {0}")]
    InvalidSamples(String),
}

/// Airspeed in body coordinates with its polar decomposition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AirState {
    pub v_a: Vec3,
    pub alpha: f64,
    pub beta: f64,
    pub speed: f64,
}

impl AirState {
    pub fn from_body_airspeed(v_a: Vec3) -> Result<Self, AeroError> {
        let (alpha, beta) = angles_from_airspeed(&v_a)?;
        Ok(AirState {
            v_a,
            alpha,
            beta,
            speed: v_a.norm(),
        })
    }

    /// Rebuilds `v_a` from `(speed, alpha, beta)`.
    pub fn reconstruct(&self) -> Vec3 {
        let (sa, ca) = self.alpha.sin_cos();
        let (sb, cb) = self.beta.sin_cos();
        Vec3::new(self.speed * sa * cb, self.speed * sa * sb, -self.speed * ca)
    }
}

/// Angle of attack in `[0, pi]` and azimuth in `(-pi, pi]`.
pub fn angles_from_airspeed(v_a: &Vec3) -> Result<(f64, f64), AeroError> {
    let speed = v_a.norm();
    if speed < MIN_AIRSPEED {
        return Err(AeroError::ZeroAirspeed);
    }
    let alpha = (-v_a.z / speed).clamp(-1.0, 1.0).acos();
    let beta = if alpha.sin() < AXIS_SINE_THRESHOLD {
        0.0
    } else {
        let b = v_a.y.atan2(v_a.x);
        // atan2 returns -pi for (-0, negative x); fold onto the half-open interval.
        if b <= -PI {
            PI
        } else {
            b
        }
    };
    Ok((alpha, beta))
}

/// Piecewise-linear coefficient table over an increasing `alpha` grid.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientTable {
    alpha: Vec<f64>,
    cd: Vec<f64>,
    cl: Vec<f64>,
    lift_over_sine: Option<Vec<f64>>,
}

impl CoefficientTable {
    pub fn new(
        alpha: Vec<f64>,
        cd: Vec<f64>,
        cl: Vec<f64>,
        lift_over_sine: Option<Vec<f64>>,
    ) -> Result<Self, AeroError> {
        let n = alpha.len();
        if n < 2 {
            return Err(AeroError::InvalidModel(
                "table needs at least two rows".into(),
            ));
        }
        if cd.len() != n || cl.len() != n || lift_over_sine.as_ref().is_some_and(|l| l.len() != n) {
            return Err(AeroError::InvalidModel(
                "table columns differ in length".into(),
            ));
        }
        let all = alpha
            .iter()
            .chain(&cd)
            .chain(&cl)
            .chain(lift_over_sine.iter().flatten());
        if !all.into_iter().all(|v| v.is_finite()) {
            return Err(AeroError::InvalidModel(
                "table holds non-finite values".into(),
            ));
        }
        if alpha.windows(2).any(|w| w[1] <= w[0]) {
            return Err(AeroError::InvalidModel(
                "alpha grid must be strictly increasing".into(),
            ));
        }
        if alpha[0] < 0.0 || alpha[n - 1] > PI {
            return Err(AeroError::InvalidModel(
                "alpha grid must lie in [0, pi]".into(),
            ));
        }
        if cd.iter().any(|&c| c < 0.0) {
            return Err(AeroError::InvalidModel(
                "drag coefficient must be non-negative".into(),
            ));
        }
        Ok(CoefficientTable {
            alpha,
            cd,
            cl,
            lift_over_sine,
        })
    }

    pub fn alpha(&self) -> &[f64] {
        &self.alpha
    }

    pub fn cd(&self) -> &[f64] {
        &self.cd
    }

    pub fn cl(&self) -> &[f64] {
        &self.cl
    }

    pub fn lift_over_sine(&self) -> Option<&[f64]> {
        self.lift_over_sine.as_deref()
    }

    fn bracket(&self, alpha: f64) -> Result<(usize, f64), AeroError> {
        let lo = self.alpha[0];
        let hi = self.alpha[self.alpha.len() - 1];
        if !(lo..=hi).contains(&alpha) {
            return Err(AeroError::Domain { alpha, lo, hi });
        }
        let i = match self.alpha.partition_point(|&a| a <= alpha) {
            0 => 0,
            p => (p - 1).min(self.alpha.len() - 2),
        };
        let t = (alpha - self.alpha[i]) / (self.alpha[i + 1] - self.alpha[i]);
        Ok((i, t))
    }

    fn interp(&self, column: &[f64], alpha: f64) -> Result<f64, AeroError> {
        let (i, t) = self.bracket(alpha)?;
        Ok(column[i] + t * (column[i + 1] - column[i]))
    }
}

/// Coefficient family of a symmetric body.
#[derive(Debug, Clone, PartialEq)]
pub enum AeroFamily {
    /// `C_D = c0 + 2 c1 sin^2(alpha)`, `C_L = c1 sin(2 alpha)`.
    SymmetricSin2 {
        c0: f64,
        c1: f64,
    },
    /// `C_D = c0_bar`, `C_L = c1_bar tan(alpha)`, for `alpha < pi/2`.
    TanFamily {
        c0_bar: f64,
        c1_bar: f64,
    },
    Tabulated(CoefficientTable),
}

/// Coefficient family together with `k_a = rho * Sigma / 2` (kg/m).
#[derive(Debug, Clone, PartialEq)]
pub struct AeroModel {
    pub k_a: f64,
    pub family: AeroFamily,
    pub source: Option<FlowConditions>,
}

impl AeroModel {
    pub fn new(k_a: f64, family: AeroFamily) -> Result<Self, AeroError> {
        if !(k_a.is_finite() && k_a >= 0.0) {
            return Err(AeroError::InvalidModel(format!(
                "k_a must be finite and >= 0, got {k_a}"
            )));
        }
        match &family {
            AeroFamily::SymmetricSin2 { c0, c1 } => {
                if !(c0.is_finite() && c1.is_finite()) {
                    return Err(AeroError::InvalidModel("non-finite coefficient".into()));
                }
                // min over alpha of c0 + 2 c1 sin^2 is c0 + min(0, 2 c1)
                if c0 + (2.0 * c1).min(0.0) < 0.0 {
                    return Err(AeroError::InvalidModel(
                        "drag coefficient becomes negative".into(),
                    ));
                }
            }
            AeroFamily::TanFamily { c0_bar, c1_bar } => {
                if !(c0_bar.is_finite() && c1_bar.is_finite()) {
                    return Err(AeroError::InvalidModel("non-finite coefficient".into()));
                }
                if *c0_bar < 0.0 {
                    return Err(AeroError::InvalidModel(
                        "drag coefficient becomes negative".into(),
                    ));
                }
            }
            AeroFamily::Tabulated(_) => {}
        }
        Ok(AeroModel {
            k_a,
            family,
            source: None,
        })
    }

    pub fn sin2(k_a: f64, c0: f64, c1: f64) -> Result<Self, AeroError> {
        Self::new(k_a, AeroFamily::SymmetricSin2 { c0, c1 })
    }

    pub fn tan(k_a: f64, c0_bar: f64, c1_bar: f64) -> Result<Self, AeroError> {
        Self::new(k_a, AeroFamily::TanFamily { c0_bar, c1_bar })
    }

    /// Sphere: constant drag, no lift.
    pub fn sphere(k_a: f64, cd: f64) -> Result<Self, AeroError> {
        Self::sin2(k_a, cd, 0.0)
    }

    pub fn with_source(mut self, source: FlowConditions) -> Self {
        self.source = Some(source);
        self
    }

    /// Closed interval of angles of attack on which the coefficients are defined.
    /// The tan family excludes `pi/2` itself.
    pub fn alpha_domain(&self) -> (f64, f64) {
        match &self.family {
            AeroFamily::SymmetricSin2 { .. } => (0.0, PI),
            AeroFamily::TanFamily { .. } => (0.0, FRAC_PI_2),
            AeroFamily::Tabulated(t) => (t.alpha[0], t.alpha[t.alpha.len() - 1]),
        }
    }

    fn check_open_domain(&self, alpha: f64) -> Result<(), AeroError> {
        if let AeroFamily::TanFamily { .. } = self.family {
            if !(0.0..FRAC_PI_2).contains(&alpha) {
                return Err(AeroError::Domain {
                    alpha,
                    lo: 0.0,
                    hi: FRAC_PI_2,
                });
            }
        }
        Ok(())
    }

    pub fn cd(&self, alpha: f64) -> Result<f64, AeroError> {
        self.check_open_domain(alpha)?;
        match &self.family {
            AeroFamily::SymmetricSin2 { c0, c1 } => {
                let s = alpha.sin();
                Ok(c0 + 2.0 * c1 * s * s)
            }
            AeroFamily::TanFamily { c0_bar, .. } => Ok(*c0_bar),
            AeroFamily::Tabulated(t) => t.interp(&t.cd, alpha),
        }
    }

    pub fn cl(&self, alpha: f64) -> Result<f64, AeroError> {
        self.check_open_domain(alpha)?;
        match &self.family {
            AeroFamily::SymmetricSin2 { c1, .. } => Ok(c1 * (2.0 * alpha).sin()),
            AeroFamily::TanFamily { c1_bar, .. } => Ok(c1_bar * alpha.tan()),
            AeroFamily::Tabulated(t) => t.interp(&t.cl, alpha),
        }
    }

    /// `C_L(alpha) / sin(alpha)` in closed form, or `None` when the model has
    /// no such form (a table without that column).
    pub fn lift_over_sine(&self, alpha: f64) -> Result<Option<f64>, AeroError> {
        self.check_open_domain(alpha)?;
        match &self.family {
            AeroFamily::SymmetricSin2 { c1, .. } => Ok(Some(2.0 * c1 * alpha.cos())),
            AeroFamily::TanFamily { c1_bar, .. } => Ok(Some(c1_bar / alpha.cos())),
            AeroFamily::Tabulated(t) => match &t.lift_over_sine {
                Some(col) => t.interp(col, alpha).map(Some),
                None => Ok(None),
            },
        }
    }

    /// Equivalent drag coefficient, when the model admits one.
    pub fn cd0(&self) -> Option<f64> {
        match &self.family {
            AeroFamily::SymmetricSin2 { c0, c1 } => Some(c0 + 2.0 * c1),
            AeroFamily::TanFamily { c0_bar, c1_bar } => Some(c0_bar + c1_bar),
            AeroFamily::Tabulated(t) => {
                t.lift_over_sine.as_ref()?;
                let grid: Vec<f64> = t
                    .alpha
                    .iter()
                    .copied()
                    .filter(|a| a.sin() >= 1e-6)
                    .collect();
                if grid.is_empty() {
                    return None;
                }
                let check = equivalency_defect(self, &grid).ok()?;
                (check.defect <= EQUIVALENCY_TOLERANCE).then_some(check.cd0)
            }
        }
    }
}

/// Lift and drag in body coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AeroForces {
    pub lift: Vec3,
    pub drag: Vec3,
}

impl AeroForces {
    pub fn zero() -> Self {
        AeroForces {
            lift: Vec3::zeros(),
            drag: Vec3::zeros(),
        }
    }

    pub fn total(&self) -> Vec3 {
        self.lift + self.drag
    }
}

/// Lift and drag on the body for airspeed `v_a` (body coordinates).
pub fn aero_force(model: &AeroModel, v_a: &Vec3) -> Result<AeroForces, AeroError> {
    let speed = v_a.norm();
    if speed < MIN_AIRSPEED {
        return Ok(AeroForces::zero());
    }
    let (alpha, beta) = angles_from_airspeed(v_a)?;
    let cd = model.cd(alpha)?;
    let drag = v_a * (-model.k_a * speed * cd);

    let sin_alpha = alpha.sin();
    if sin_alpha < AXIS_SINE_THRESHOLD {
        if let Some(l) = model.lift_over_sine(alpha)? {
            // r(beta) x v_a = -cot(alpha) v_a - |v_a|/sin(alpha) k, multiplied through by sin(alpha)
            let lift = (v_a * alpha.cos() + e3() * speed) * (-model.k_a * speed * l);
            return Ok(AeroForces { lift, drag });
        }
    }
    let cl = model.cl(alpha)?;
    let (sb, cb) = beta.sin_cos();
    let r = Vec3::new(-sb, cb, 0.0);
    let lift = r.cross(v_a) * (model.k_a * speed * cl);
    Ok(AeroForces { lift, drag })
}

/// Total aerodynamic force from the combined expression
/// `-k_a |v_a| [(C_D + L cos(alpha)) v_a + L |v_a| k]` with `L = C_L / sin(alpha)`.
pub fn aero_force_combined(model: &AeroModel, v_a: &Vec3) -> Result<Vec3, AeroError> {
    let speed = v_a.norm();
    if speed < MIN_AIRSPEED {
        return Ok(Vec3::zeros());
    }
    let (alpha, _) = angles_from_airspeed(v_a)?;
    let cd = model.cd(alpha)?;
    let l = model
        .lift_over_sine(alpha)?
        .ok_or_else(|| AeroError::InvalidModel("model has no closed-form C_L/sin(alpha)".into()))?;
    Ok((v_a * (cd + l * alpha.cos()) + e3() * (l * speed)) * (-model.k_a * speed))
}

/// Result of checking `C_D + C_L cot(alpha) = const` on a grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EquivalencyCheck {
    /// Largest deviation from `cd0` over the grid.
    pub defect: f64,
    /// Median of `C_D + C_L cot(alpha)` over the grid.
    pub cd0: f64,
}

/// Spread of `C_D(alpha) + C_L(alpha) cot(alpha)` over `alpha_grid`.
///
/// Uses `L(alpha) cos(alpha)` for the lift term when the model provides
/// `L = C_L / sin(alpha)`, otherwise `C_L / tan(alpha)`.
pub fn equivalency_defect(
    model: &AeroModel,
    alpha_grid: &[f64],
) -> Result<EquivalencyCheck, AeroError> {
    if alpha_grid.is_empty() {
        return Err(AeroError::InvalidSamples("empty alpha grid".into()));
    }
    let mut values = Vec::with_capacity(alpha_grid.len());
    for &alpha in alpha_grid {
        if alpha.sin().abs() < 1e-6 {
            return Err(AeroError::Domain {
                alpha,
                lo: 1e-6,
                hi: PI - 1e-6,
            });
        }
        let cd = model.cd(alpha)?;
        let lift_term = match model.lift_over_sine(alpha)? {
            Some(l) => l * alpha.cos(),
            None => model.cl(alpha)? / alpha.tan(),
        };
        values.push(cd + lift_term);
    }
    let mut sorted = values.clone();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    let cd0 = if n % 2 == 1 {
        sorted[n / 2]
    } else {
        0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
    };
    let defect = values.iter().map(|v| (v - cd0).abs()).fold(0.0, f64::max);
    Ok(EquivalencyCheck { defect, cd0 })
}

/// Orientation-independent drag and the thrust that absorbs the axial lift.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EquivalentActuation {
    /// Equivalent drag in inertial coordinates (N).
    pub drag: Vec3,
    /// Equivalent thrust intensity (N).
    pub thrust: f64,
    pub cd0: f64,
}

/// Equivalent drag `-k_a C_D0 |v_a| v_a` and thrust `T + k_a |v_a|^2 L(alpha)`.
pub fn equivalent_actuation(
    model: &AeroModel,
    v_a_inertial: &Vec3,
    alpha: f64,
    thrust: f64,
    speed: f64,
) -> Result<EquivalentActuation, AeroError> {
    let cd0 = match model.cd0() {
        Some(c) => c,
        None => {
            let defect = match &model.family {
                AeroFamily::Tabulated(t) => {
                    let grid: Vec<f64> = t
                        .alpha
                        .iter()
                        .copied()
                        .filter(|a| a.sin() >= 1e-6)
                        .collect();
                    equivalency_defect(model, &grid)
                        .map(|c| c.defect)
                        .unwrap_or(f64::INFINITY)
                }
                _ => f64::INFINITY,
            };
            return Err(AeroError::NotEquivalent { defect });
        }
    };
    let drag = v_a_inertial * (-model.k_a * cd0 * v_a_inertial.norm());
    if speed == 0.0 {
        return Ok(EquivalentActuation { drag, thrust, cd0 });
    }
    let l = model
        .lift_over_sine(alpha)?
        .ok_or(AeroError::NotEquivalent {
            defect: f64::INFINITY,
        })?;
    Ok(EquivalentActuation {
        drag,
        thrust: thrust + model.k_a * speed * speed * l,
        cd0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::math::exp_so3;
    use proptest::prelude::*;

    fn elliptic() -> AeroModel {
        AeroModel::sin2(1.0, 0.43, 0.462).unwrap()
    }

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn angle_examples() {
        assert_eq!(
            angles_from_airspeed(&Vec3::new(0.0, 0.0, -1.0)).unwrap(),
            (0.0, 0.0)
        );
        let (a, b) = angles_from_airspeed(&Vec3::new(1.0, 0.0, 0.0)).unwrap();
        assert!(close(a, FRAC_PI_2, 1e-15) && b == 0.0);
        let (a, b) = angles_from_airspeed(&Vec3::new(0.0, 1.0, 1.0)).unwrap();
        assert!(close(a, 3.0 * PI / 4.0, 1e-15) && close(b, FRAC_PI_2, 1e-15));
        assert_eq!(
            angles_from_airspeed(&Vec3::zeros()),
            Err(AeroError::ZeroAirspeed)
        );
        // beta on the symmetry axis is pinned to zero
        let (a, b) = angles_from_airspeed(&Vec3::new(0.0, 0.0, 3.0)).unwrap();
        assert!(close(a, PI, 0.0) && b == 0.0);
        // -pi is folded to pi
        let (_, b) = angles_from_airspeed(&Vec3::new(-1.0, -0.0, 0.0)).unwrap();
        assert_eq!(b, PI);
    }

    #[test]
    fn sphere_has_no_lift() {
        let sphere = AeroModel::sphere(0.7, 0.47).unwrap();
        for v in [
            Vec3::new(1.0, 2.0, 3.0),
            Vec3::new(-4.0, 0.1, 0.0),
            Vec3::new(0.0, 0.0, -2.0),
        ] {
            let f = aero_force(&sphere, &v).unwrap();
            assert!(f.lift.norm() < 1e-15);
            assert!((f.drag + v * (0.7 * 0.47 * v.norm())).norm() < 1e-12);
        }
    }

    #[test]
    fn elliptic_head_on() {
        let f = aero_force(&elliptic(), &Vec3::new(0.0, 0.0, -1.0)).unwrap();
        assert_eq!(f.drag, Vec3::new(0.0, 0.0, 0.43));
        assert_eq!(f.lift, Vec3::zeros());
    }

    #[test]
    fn broadside_lift_magnitude() {
        // oracle: explicit cross product r x v_a with r = (-sin b, cos b, 0)
        let s = 3.0;
        for model in [elliptic(), AeroModel::sin2(0.2, 0.1, 11.55).unwrap()] {
            let v = Vec3::new(s, 0.0, 0.0);
            let f = aero_force(&model, &v).unwrap();
            let r = Vec3::new(0.0, 1.0, 0.0);
            let cross = Vec3::new(
                r.y * v.z - r.z * v.y,
                r.z * v.x - r.x * v.z,
                r.x * v.y - r.y * v.x,
            );
            assert!(close(cross.norm(), s, 1e-15));
            assert!(f.lift.dot(&v).abs() < 1e-12);
            let cl = model.cl(FRAC_PI_2).unwrap();
            assert!(close(f.lift.norm(), model.k_a * s * s * cl.abs(), 1e-12));
        }
    }

    #[test]
    fn zero_airspeed_gives_zero_force() {
        let f = aero_force(&elliptic(), &Vec3::zeros()).unwrap();
        assert_eq!(f, AeroForces::zero());
    }

    #[test]
    fn near_axis_uses_regular_form() {
        let m = AeroModel::sin2(1.0, 0.3, 2.0).unwrap();
        let v = Vec3::new(1e-11, 2e-11, -5.0);
        let f = aero_force(&m, &v).unwrap();
        assert!(f.lift.iter().all(|c| c.is_finite()));
        assert!(f.lift.norm() < 1e-9);
        assert!((f.total() - aero_force_combined(&m, &v).unwrap()).norm() < 1e-12);
    }

    #[test]
    fn tabulated_interpolation_and_domain() {
        let t = CoefficientTable::new(
            vec![0.0, 1.0, 2.0],
            vec![1.0, 2.0, 4.0],
            vec![0.0, 1.0, 0.0],
            None,
        )
        .unwrap();
        let m = AeroModel::new(1.0, AeroFamily::Tabulated(t)).unwrap();
        assert!(close(m.cd(0.5).unwrap(), 1.5, 1e-15));
        assert!(close(m.cd(1.5).unwrap(), 3.0, 1e-15));
        assert!(close(m.cd(2.0).unwrap(), 4.0, 1e-15));
        assert!(matches!(m.cd(2.5), Err(AeroError::Domain { .. })));
        // alpha = 3 rad, outside grid
        let v = Vec3::new(3.0f64.sin(), 0.0, -(3.0f64.cos()));
        assert!(matches!(aero_force(&m, &v), Err(AeroError::Domain { .. })));
        assert!(m.cd0().is_none());
    }

    #[test]
    fn table_validation() {
        assert!(CoefficientTable::new(vec![0.0], vec![1.0], vec![0.0], None).is_err());
        assert!(
            CoefficientTable::new(vec![1.0, 0.5], vec![1.0, 1.0], vec![0.0, 0.0], None).is_err()
        );
        assert!(
            CoefficientTable::new(vec![0.0, 1.0], vec![-1.0, 1.0], vec![0.0, 0.0], None).is_err()
        );
        assert!(
            CoefficientTable::new(vec![0.0, 4.0], vec![1.0, 1.0], vec![0.0, 0.0], None).is_err()
        );
        assert!(AeroModel::sin2(1.0, 0.1, -0.2).is_err());
        assert!(AeroModel::sin2(-1.0, 0.1, 0.2).is_err());
    }

    #[test]
    fn tan_family_domain() {
        let m = AeroModel::tan(1.0, 0.05, 2.0).unwrap();
        assert!(matches!(m.cl(FRAC_PI_2), Err(AeroError::Domain { .. })));
        assert!(matches!(m.cd(2.0), Err(AeroError::Domain { .. })));
        assert!(close(m.cl(0.3).unwrap(), 2.0 * 0.3f64.tan(), 1e-15));
    }

    #[test]
    fn equivalency_examples() {
        let grid: Vec<f64> = (1..100).map(|i| i as f64 * PI / 100.0).collect();
        let check = equivalency_defect(&AeroModel::sin2(1.0, 0.43, 0.462).unwrap(), &grid).unwrap();
        assert!(check.defect < 1e-12);
        assert!(close(check.cd0, 1.354, 1e-12));

        let tan_grid: Vec<f64> = (1..50).map(|i| i as f64 * FRAC_PI_2 / 50.0).collect();
        let tan = AeroModel::tan(1.0, 0.05, 2.0).unwrap();
        let check = equivalency_defect(&tan, &tan_grid).unwrap();
        assert!(check.defect < 1e-12);
        // oracle: c0_bar + c1_bar tan * cot, evaluated directly
        for &a in &tan_grid {
            assert!(close(
                tan.cd(a).unwrap() + tan.cl(a).unwrap() / a.tan(),
                2.05,
                1e-12
            ));
        }
        assert!(close(check.cd0, 2.05, 1e-12));

        let sphere_table = CoefficientTable::new(
            vec![0.0, 1.0, PI],
            vec![0.5, 0.5, 0.5],
            vec![0.0, 0.0, 0.0],
            Some(vec![0.0, 0.0, 0.0]),
        )
        .unwrap();
        let sphere = AeroModel::new(1.0, AeroFamily::Tabulated(sphere_table)).unwrap();
        let check = equivalency_defect(&sphere, &grid).unwrap();
        assert_eq!(check.defect, 0.0);
        assert_eq!(sphere.cd0(), Some(0.5));

        assert!(equivalency_defect(&sphere, &[0.0]).is_err());
    }

    #[test]
    fn equivalent_actuation_examples() {
        let missile = AeroModel::sin2(0.5, 0.1, 11.55).unwrap();
        let alpha = PI / 3.0;
        let ea =
            equivalent_actuation(&missile, &Vec3::new(1.0, 0.0, 0.0), alpha, 2.0, 1.0).unwrap();
        assert!(close(ea.thrust, 7.775, 1e-12));
        assert!(close(ea.cd0, 23.2, 1e-12));

        let ell = elliptic();
        assert!(close(ell.cd0().unwrap(), 1.354, 1e-15));
        let ea = equivalent_actuation(&ell, &Vec3::zeros(), 0.0, 3.5, 0.0).unwrap();
        assert_eq!(ea.drag, Vec3::zeros());
        assert_eq!(ea.thrust, 3.5);

        let t = CoefficientTable::new(
            vec![0.0, 1.0, 2.0],
            vec![1.0, 2.0, 4.0],
            vec![0.0, 1.0, 0.0],
            None,
        )
        .unwrap();
        let bad = AeroModel::new(1.0, AeroFamily::Tabulated(t)).unwrap();
        assert!(matches!(
            equivalent_actuation(&bad, &Vec3::new(1.0, 0.0, 0.0), 1.0, 0.0, 1.0),
            Err(AeroError::NotEquivalent { .. })
        ));
    }

    fn airspeed() -> impl Strategy<Value = Vec3> {
        (-20.0..20.0f64, -20.0..20.0f64, -20.0..20.0f64).prop_map(|(a, b, c)| Vec3::new(a, b, c))
    }

    fn sin2_model() -> impl Strategy<Value = AeroModel> {
        (0.01..2.0f64, 0.0..2.0f64, 0.0..15.0f64)
            .prop_map(|(k, c0, c1)| AeroModel::sin2(k, c0, c1).unwrap())
    }

    proptest! {
        #[test]
        fn decomposition_round_trip(v in airspeed()) {
            prop_assume!(v.norm() > 1e-6);
            let air = AirState::from_body_airspeed(v).unwrap();
            prop_assert!((0.0..=PI).contains(&air.alpha));
            prop_assert!(air.beta > -PI && air.beta <= PI);
            prop_assert!((air.reconstruct() - v).norm() <= 1e-10 * v.norm());
        }

        #[test]
        fn force_geometry(model in sin2_model(), v in airspeed()) {
            prop_assume!(v.norm() > 1e-3);
            let f = aero_force(&model, &v).unwrap();
            let scale = 1e-9 * (f.lift.norm() * v.norm()).max(1e-12);
            prop_assert!(f.lift.dot(&v).abs() <= scale);
            prop_assert!(f.drag.cross(&v).norm() <= 1e-9 * (f.drag.norm() * v.norm()).max(1e-12));
            // total force lies in span{k, v_a}
            let normal = e3().cross(&v);
            if normal.norm() > 1e-6 * v.norm() {
                prop_assert!(f.total().dot(&normal).abs() <= 1e-9 * f.total().norm() * normal.norm() + 1e-12);
            }
        }

        #[test]
        fn lift_direction_is_orthogonal_to_airspeed(v in airspeed()) {
            prop_assume!(v.norm() > 1e-6);
            let (_, beta) = angles_from_airspeed(&v).unwrap();
            let r = Vec3::new(-beta.sin(), beta.cos(), 0.0);
            prop_assert!(r.dot(&v).abs() <= 1e-12 * v.norm().max(1.0));
        }

        #[test]
        fn combined_form_matches(model in sin2_model(), v in airspeed()) {
            let (alpha, _) = match angles_from_airspeed(&v) { Ok(x) => x, Err(_) => return Ok(()) };
            prop_assume!(alpha.sin() > 1e-3);
            let split = aero_force(&model, &v).unwrap().total();
            let combined = aero_force_combined(&model, &v).unwrap();
            prop_assert!((split - combined).norm() <= 1e-10 * split.norm().max(1e-300));
        }

        #[test]
        fn invariant_under_rotation_about_axis(model in sin2_model(), v in airspeed(), theta in -PI..PI) {
            prop_assume!(v.norm() > 1e-3);
            let rot = exp_so3(&(e3() * theta));
            let w = rot.apply(&v);
            let (a1, _) = angles_from_airspeed(&v).unwrap();
            let (a2, _) = angles_from_airspeed(&w).unwrap();
            prop_assert!((a1 - a2).abs() < 1e-9);
            let f1 = aero_force(&model, &v).unwrap();
            let f2 = aero_force(&model, &w).unwrap();
            prop_assert!((f1.lift.norm() - f2.lift.norm()).abs() <= 1e-9 * f1.lift.norm().max(1.0));
            prop_assert!((f1.drag.norm() - f2.drag.norm()).abs() <= 1e-9 * f1.drag.norm().max(1.0));
            // and the force itself rotates with the airspeed
            prop_assert!((rot.apply(&f1.total()) - f2.total()).norm() <= 1e-9 * f1.total().norm().max(1.0));
        }

        #[test]
        fn pi_periodic(c0 in 0.0..5.0f64, c1 in 0.0..15.0f64, alpha in 0.0..PI) {
            let m = AeroModel::sin2(1.0, c0, c1).unwrap();
            let tol = 1e-12 * (1.0 + c1);
            prop_assert!((m.cd(alpha).unwrap() - m.cd(alpha + PI).unwrap()).abs() <= tol);
            prop_assert!((m.cl(alpha).unwrap() - m.cl(alpha + PI).unwrap()).abs() <= tol);
            prop_assert!(m.cd(alpha).unwrap() >= 0.0);
        }

        #[test]
        fn force_scales_with_speed_squared(model in sin2_model(), v in airspeed(), scale in 0.1..10.0f64) {
            prop_assume!(v.norm() > 1e-3);
            let f1 = aero_force(&model, &v).unwrap().total();
            let f2 = aero_force(&model, &(v * scale)).unwrap().total();
            prop_assert!((f2.norm() - f1.norm() * scale * scale).abs() <= 1e-10 * f2.norm().max(1e-300));
        }
    }
}
