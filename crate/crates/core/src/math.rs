//! Vector and rotation algebra.
//!
//! Coordinates are column vectors. A [`Rotation`] `R` stores the body axes
//! `i, j, k` as its columns, expressed in the inertial frame, so `R * x_body`
//! gives inertial coordinates and `R^T * x_inertial` gives body coordinates.
//! The inertial third axis `e3` points down (gravity is `+g e3`).

use nalgebra::{Matrix3, Vector3};

pub type Vec3 = Vector3<f64>;
pub type Mat3 = Matrix3<f64>;

/// Below this angle `exp_so3` switches to its second-order series.
pub const SMALL_ANGLE: f64 = 1e-8;

/// Tolerance used when validating orthogonality and determinant.
pub const SO3_TOLERANCE: f64 = 1e-9;

#[inline]
pub fn e1() -> Vec3 {
    Vec3::new(1.0, 0.0, 0.0)
}

#[inline]
pub fn e2() -> Vec3 {
    Vec3::new(0.0, 1.0, 0.0)
}

#[inline]
pub fn e3() -> Vec3 {
    Vec3::new(0.0, 0.0, 1.0)
}

pub fn is_finite(v: &Vec3) -> bool {
    v.iter().all(|c| c.is_finite())
}

/// Skew-symmetric matrix such that `skew(x) * y == x.cross(&y)`.
pub fn skew(x: &Vec3) -> Mat3 {
    Mat3::new(
        0.0, -x.z, x.y, //
        x.z, 0.0, -x.x, //
        -x.y, x.x, 0.0,
    )
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum RotationError {
    #[error("matrix is not orthogonal: |R^T R - I|_F = {0:e}")]
    NotOrthogonal(f64),
    #[error("matrix has determinant {0}, expected +1")]
    BadDeterminant(f64),
    #[error("matrix has non-finite entries")]
    NonFinite,
}

/// Attitude of the vehicle: a proper orthogonal 3x3 matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rotation(Mat3);

impl Default for Rotation {
    fn default() -> Self {
        Self::identity()
    }
}

impl Rotation {
    pub fn identity() -> Self {
        Rotation(Mat3::identity())
    }

    /// Checks the SO(3) invariants before wrapping `m`.
    pub fn from_matrix(m: Mat3) -> Result<Self, RotationError> {
        if !m.iter().all(|c| c.is_finite()) {
            return Err(RotationError::NonFinite);
        }
        let defect = (m.transpose() * m - Mat3::identity()).norm();
        if defect > SO3_TOLERANCE {
            return Err(RotationError::NotOrthogonal(defect));
        }
        let det = m.determinant();
        if (det - 1.0).abs() > SO3_TOLERANCE {
            return Err(RotationError::BadDeterminant(det));
        }
        Ok(Rotation(m))
    }

    /// Rotation of `angle` radians about `axis` (need not be normalised).
    pub fn from_axis_angle(axis: &Vec3, angle: f64) -> Self {
        let n = axis.norm();
        if n == 0.0 {
            return Self::identity();
        }
        exp_so3(&(axis * (angle / n)))
    }

    pub fn matrix(&self) -> &Mat3 {
        &self.0
    }

    pub fn transpose(&self) -> Rotation {
        Rotation(self.0.transpose())
    }

    /// Column `j` of `R`: body axis `j` in inertial coordinates.
    pub fn column(&self, j: usize) -> Vec3 {
        self.0.column(j).into_owned()
    }

    /// Thrust axis `k` in inertial coordinates.
    pub fn thrust_axis(&self) -> Vec3 {
        self.column(2)
    }

    pub fn compose(&self, other: &Rotation) -> Rotation {
        Rotation(self.0 * other.0)
    }

    /// `R * x`, body coordinates to inertial.
    pub fn apply(&self, x: &Vec3) -> Vec3 {
        self.0 * x
    }

    /// `R^T * x`, inertial coordinates to body.
    pub fn apply_inverse(&self, x: &Vec3) -> Vec3 {
        self.0.tr_mul(x)
    }

    /// Frobenius norm of `R^T R - I`.
    pub fn orthogonality_defect(&self) -> f64 {
        (self.0.transpose() * self.0 - Mat3::identity()).norm()
    }

    /// Rotation vector `w` with `exp_so3(w) == self`, angle in `[0, pi]`.
    pub fn log(&self) -> Vec3 {
        let m = &self.0;
        let cos = ((m.trace() - 1.0) * 0.5).clamp(-1.0, 1.0);
        let angle = cos.acos();
        let vee = Vec3::new(
            m[(2, 1)] - m[(1, 2)],
            m[(0, 2)] - m[(2, 0)],
            m[(1, 0)] - m[(0, 1)],
        );
        if angle < 1e-6 {
            return vee * 0.5;
        }
        if std::f64::consts::PI - angle > 1e-6 {
            return vee * (angle / (2.0 * angle.sin()));
        }
        // Near pi the antisymmetric part vanishes; recover the axis from R + I.
        let b = (m + Mat3::identity()) * 0.5;
        let mut best = 0;
        for c in 1..3 {
            if b[(c, c)] > b[(best, best)] {
                best = c;
            }
        }
        let mut axis: Vec3 = b.column(best).into_owned();
        axis /= axis.norm();
        if axis.dot(&vee) < 0.0 {
            axis = -axis;
        }
        axis * angle
    }
}

/// `R * x`.
pub fn rotate(r: &Rotation, x: &Vec3) -> Vec3 {
    r.apply(x)
}

/// Matrix exponential of `skew(w)` (Rodrigues' formula).
pub fn exp_so3(w: &Vec3) -> Rotation {
    let theta2 = w.norm_squared();
    let theta = theta2.sqrt();
    let k = skew(w);
    let (a, b) = if theta < SMALL_ANGLE {
        (1.0 - theta2 / 6.0, 0.5 - theta2 / 24.0)
    } else {
        (theta.sin() / theta, (1.0 - theta.cos()) / theta2)
    };
    Rotation(Mat3::identity() + k * a + k * k * b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn vec3() -> impl Strategy<Value = Vec3> {
        (-10.0..10.0f64, -10.0..10.0f64, -10.0..10.0f64).prop_map(|(a, b, c)| Vec3::new(a, b, c))
    }

    #[test]
    fn skew_examples() {
        assert_eq!(skew(&e3()) * e1(), e2());
        let x = Vec3::new(1.0, 2.0, 3.0);
        assert_eq!(skew(&x) * x, Vec3::zeros());
        assert_eq!(
            skew(&x) * Vec3::new(4.0, 5.0, 6.0),
            Vec3::new(-3.0, 6.0, -3.0)
        );
    }

    #[test]
    fn rotate_examples() {
        let x = Vec3::new(0.3, -1.0, 2.0);
        assert_eq!(rotate(&Rotation::identity(), &x), x);
        let r = exp_so3(&Vec3::new(0.2, -0.4, 1.1));
        assert_eq!(rotate(&r, &e3()), r.column(2));
        let back = rotate(&r.transpose(), &rotate(&r, &x));
        assert!((back - x).norm() < 1e-12);
    }

    #[test]
    fn exp_examples() {
        assert_eq!(*exp_so3(&Vec3::zeros()).matrix(), Mat3::identity());
        let quarter = exp_so3(&Vec3::new(0.0, 0.0, PI / 2.0));
        assert!((quarter.apply(&e1()) - e2()).norm() < 1e-12);
        let w = Vec3::new(0.7, -1.3, 2.2);
        let prod = exp_so3(&w).compose(&exp_so3(&-w));
        assert!((prod.matrix() - Mat3::identity()).norm() < 1e-12);
    }

    #[test]
    fn exp_small_angle_branch_is_continuous() {
        let w = Vec3::new(3e-9, -2e-9, 1e-9);
        let series = exp_so3(&w);
        let first_order = Mat3::identity() + skew(&w);
        assert!((series.matrix() - first_order).norm() < 1e-16);
        let above = exp_so3(&(w * 10.0));
        assert!(above.orthogonality_defect() < 1e-15);
    }

    #[test]
    fn from_matrix_rejects_reflections() {
        let mut m = Mat3::identity();
        m[(2, 2)] = -1.0;
        assert!(matches!(
            Rotation::from_matrix(m),
            Err(RotationError::BadDeterminant(_))
        ));
        assert!(matches!(
            Rotation::from_matrix(Mat3::identity() * 2.0),
            Err(RotationError::NotOrthogonal(_))
        ));
        assert!(Rotation::from_matrix(*exp_so3(&Vec3::new(1.0, 2.0, 0.5)).matrix()).is_ok());
    }

    #[test]
    fn log_inverts_exp_near_pi() {
        let w = Vec3::new(1.0, -2.0, 0.5).normalize() * (PI - 1e-9);
        let r = exp_so3(&w);
        assert!((r.log() - w).norm() < 1e-6);
    }

    proptest! {
        #[test]
        fn skew_is_antisymmetric_and_linear(x in vec3(), y in vec3(), a in -3.0..3.0f64) {
            let s = skew(&x);
            prop_assert_eq!(s.transpose(), -s);
            prop_assert!((skew(&(x * a + y)) - (s * a + skew(&y))).norm() < 1e-12);
            prop_assert!((s * y - x.cross(&y)).norm() < 1e-12);
        }

        #[test]
        fn exp_stays_in_so3(w in vec3()) {
            prop_assume!(w.norm() <= 10.0);
            let r = exp_so3(&w);
            prop_assert!(r.orthogonality_defect() < 1e-9);
            prop_assert!((r.matrix().determinant() - 1.0).abs() < 1e-9);
        }

        #[test]
        fn rotate_preserves_dot_products(w in vec3(), x in vec3(), y in vec3()) {
            let r = exp_so3(&w);
            let lhs = rotate(&r, &x).dot(&rotate(&r, &y));
            prop_assert!((lhs - x.dot(&y)).abs() < 1e-10);
            let scale = x.norm().max(1e-300);
            prop_assert!((rotate(&r, &x).norm() - x.norm()).abs() <= 1e-12 * scale.max(1.0));
        }

        #[test]
        fn log_inverts_exp(dir in vec3(), angle in 0.0..3.1f64) {
            prop_assume!(dir.norm() > 1e-6);
            let w = dir.normalize() * angle;
            prop_assert!((exp_so3(&w).log() - w).norm() < 1e-8);
        }
    }
}
