//! The reduced three-dimensional family on the unit cube.

use crate::linalg::{Mat3, Vec3};
use crate::{Error, Result};

/// Lower end of the analysed parameter range, `-2938/95`.
pub const MU_MIN: f64 = -2938.0 / 95.0;
/// Upper end of the analysed parameter range.
pub const MU_MAX: f64 = 10.0;

/// A point `(x, y, z)` of the cube `[0,1]³`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CubeState {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl CubeState {
    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub const fn to_array(self) -> Vec3 {
        [self.x, self.y, self.z]
    }

    pub const fn from_array(a: Vec3) -> Self {
        Self::new(a[0], a[1], a[2])
    }

    /// True when every coordinate lies in `[-tol, 1 + tol]`.
    pub fn in_cube(&self, tol: f64) -> bool {
        self.to_array().iter().all(|c| *c >= -tol && *c <= 1.0 + tol)
    }

    /// True when every coordinate lies strictly inside `]0,1[`.
    pub fn is_interior(&self) -> bool {
        self.to_array().iter().all(|c| *c > 0.0 && *c < 1.0)
    }

    /// Largest distance by which a coordinate leaves `[0,1]`.
    pub fn overshoot(&self) -> f64 {
        self.to_array().iter().map(|c| (-c).max(c - 1.0).max(0.0)).fold(0.0, f64::max)
    }

    pub fn distance(&self, other: &CubeState) -> f64 {
        crate::linalg::distance(&self.to_array(), &other.to_array())
    }
}

impl From<Vec3> for CubeState {
    fn from(a: Vec3) -> Self {
        Self::from_array(a)
    }
}

impl From<CubeState> for Vec3 {
    fn from(p: CubeState) -> Self {
        p.to_array()
    }
}

/// Closed parameter interval used to validate `mu`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParameterRange {
    pub lo: f64,
    pub hi: f64,
}

impl Default for ParameterRange {
    fn default() -> Self {
        Self { lo: MU_MIN, hi: MU_MAX }
    }
}

impl ParameterRange {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite()) || lo > hi {
            return Err(Error::InvalidArgument("parameter range must satisfy lo <= hi"));
        }
        Ok(Self { lo, hi })
    }

    pub fn contains(&self, mu: f64) -> bool {
        mu >= self.lo && mu <= self.hi
    }

    pub fn check(&self, mu: f64) -> Result<f64> {
        if self.contains(mu) {
            Ok(mu)
        } else {
            Err(Error::ParameterOutOfRange { mu, lo: self.lo, hi: self.hi })
        }
    }
}

/// The three affine factors `g1, g2, g3` that multiply `x(1-x)`, `y(1-y)`, `z(1-z)`.
#[inline]
pub fn factors(mu: f64, [x, y, z]: Vec3) -> Vec3 {
    [
        12.0 - mu + (mu - 14.0) * x - 20.0 * y - 4.0 * z,
        -10.0 + 20.0 * x + 4.0 * y - 4.0 * z,
        27.0 - 54.0 * x + 11.0 * y - 4.0 * z,
    ]
}

/// Reduced vector field. Each component is exactly zero when its coordinate
/// is exactly 0 or 1.
#[inline]
pub fn field(mu: f64, p: Vec3) -> Vec3 {
    let g = factors(mu, p);
    [p[0] * (1.0 - p[0]) * g[0], p[1] * (1.0 - p[1]) * g[1], p[2] * (1.0 - p[2]) * g[2]]
}

pub fn vector_field(mu: f64, p: CubeState) -> CubeState {
    field(mu, p.to_array()).into()
}

/// Analytic Jacobian of [`field`].
#[inline]
pub fn jacobian_at(mu: f64, p: Vec3) -> Mat3 {
    let [x, y, z] = p;
    let g = factors(mu, p);
    let sx = x * (1.0 - x);
    let sy = y * (1.0 - y);
    let sz = z * (1.0 - z);
    [
        [(1.0 - 2.0 * x) * g[0] + sx * (mu - 14.0), -20.0 * sx, -4.0 * sx],
        [20.0 * sy, (1.0 - 2.0 * y) * g[1] + 4.0 * sy, -4.0 * sy],
        [-54.0 * sz, 11.0 * sz, (1.0 - 2.0 * z) * g[2] - 4.0 * sz],
    ]
}

pub fn jacobian(mu: f64, p: CubeState) -> Mat3 {
    jacobian_at(mu, p.to_array())
}

/// Trace of the Jacobian, i.e. the divergence of the field.
pub fn divergence(mu: f64, p: Vec3) -> f64 {
    let j = jacobian_at(mu, p);
    j[0][0] + j[1][1] + j[2][2]
}

/// `(14-μ)x + 20y + 4z - (12-μ)`; vanishes on the plane holding the
/// edge, face and interior equilibria.
pub fn plane_residual(mu: f64, p: CubeState) -> f64 {
    (14.0 - mu) * p.x + 20.0 * p.y + 4.0 * p.z - (12.0 - mu)
}

/// Normal of the plane of [`plane_residual`].
pub fn plane_normal(mu: f64) -> Vec3 {
    [14.0 - mu, 20.0, 4.0]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn center_of_cube_at_zero() {
        let v = vector_field(0.0, CubeState::new(0.5, 0.5, 0.5));
        assert_eq!(v, CubeState::new(-1.75, 0.0, 0.875));
    }

    #[test]
    fn face_y_zero_is_invariant() {
        for mu in [-30.0, -5.0, 3.6, 10.0] {
            let v = vector_field(mu, CubeState::new(0.3, 0.0, 0.8));
            assert_eq!(v.y, 0.0);
            let v = vector_field(mu, CubeState::new(0.3, 1.0, 0.8));
            assert_eq!(v.y, 0.0);
        }
    }

    #[test]
    fn jacobian_at_origin_is_diagonal() {
        let mu = -3.0;
        let j = jacobian(mu, CubeState::new(0.0, 0.0, 0.0));
        assert_eq!(j, [[12.0 - mu, 0.0, 0.0], [0.0, -10.0, 0.0], [0.0, 0.0, 27.0]]);
    }

    #[test]
    fn jacobian_first_row_on_face_x0() {
        let mu = 2.5;
        let (y, z) = (0.3, 0.6);
        let j = jacobian(mu, CubeState::new(0.0, y, z));
        assert_eq!(j[0], [12.0 - mu - 20.0 * y - 4.0 * z, 0.0, 0.0]);
    }

    #[test]
    fn plane_residual_at_origin() {
        assert_eq!(plane_residual(0.0, CubeState::default()), -12.0);
    }

    #[test]
    fn range_checks() {
        let r = ParameterRange::default();
        assert!(r.check(0.0).is_ok());
        assert!(r.check(10.5).is_err());
        assert!(ParameterRange::new(1.0, 0.0).is_err());
    }

    use proptest::prelude::*;

    proptest! {
        #[test]
        fn jacobian_matches_central_differences(
            mu in MU_MIN..MU_MAX, x in 0.0..1.0f64, y in 0.0..1.0f64, z in 0.0..1.0f64
        ) {
            let p = [x, y, z];
            let j = jacobian_at(mu, p);
            let h = 1e-6;
            for c in 0..3 {
                let mut a = p;
                let mut b = p;
                a[c] += h;
                b[c] -= h;
                let fa = field(mu, a);
                let fb = field(mu, b);
                for r in 0..3 {
                    let fd = (fa[r] - fb[r]) / (2.0 * h);
                    prop_assert!((fd - j[r][c]).abs() < 1e-6);
                }
            }
        }

        #[test]
        fn field_vanishes_on_every_face(
            mu in MU_MIN..MU_MAX, a in 0.0..1.0f64, b in 0.0..1.0f64, face in 0usize..3, side in 0usize..2
        ) {
            let mut p = [a, b, a * b];
            p[face] = side as f64;
            prop_assert_eq!(field(mu, p)[face], 0.0);
        }
    }
}
