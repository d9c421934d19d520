//! Real quaternions, the axial split `x = x0 + I rho` and the cylindrical
//! angle conventions used for meridional fields.
//!
//! Points of R^4 and values of Fueter-type functions share the same type.
//! Component order is scalar first: `x0 + i x1 + j x2 + k x3`.

use std::f64::consts::PI;
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Quaternion {
    pub x0: f64,
    pub x1: f64,
    pub x2: f64,
    pub x3: f64,
}

impl Quaternion {
    pub const ZERO: Quaternion = Quaternion::new(0.0, 0.0, 0.0, 0.0);
    pub const ONE: Quaternion = Quaternion::new(1.0, 0.0, 0.0, 0.0);
    pub const I: Quaternion = Quaternion::new(0.0, 1.0, 0.0, 0.0);
    pub const J: Quaternion = Quaternion::new(0.0, 0.0, 1.0, 0.0);
    pub const K: Quaternion = Quaternion::new(0.0, 0.0, 0.0, 1.0);

    #[inline]
    pub const fn new(x0: f64, x1: f64, x2: f64, x3: f64) -> Self {
        Self { x0, x1, x2, x3 }
    }

    #[inline]
    pub const fn real(x0: f64) -> Self {
        Self::new(x0, 0.0, 0.0, 0.0)
    }

    #[inline]
    pub fn from_array(a: [f64; 4]) -> Self {
        Self::new(a[0], a[1], a[2], a[3])
    }

    #[inline]
    pub fn to_array(self) -> [f64; 4] {
        [self.x0, self.x1, self.x2, self.x3]
    }

    #[inline]
    pub fn conj(self) -> Self {
        Self::new(self.x0, -self.x1, -self.x2, -self.x3)
    }

    #[inline]
    pub fn norm_sqr(self) -> f64 {
        self.x0 * self.x0 + self.x1 * self.x1 + self.x2 * self.x2 + self.x3 * self.x3
    }

    #[inline]
    pub fn norm(self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// Length of the imaginary part, the cylindrical radius `rho`.
    #[inline]
    pub fn rho(self) -> f64 {
        (self.x1 * self.x1 + self.x2 * self.x2 + self.x3 * self.x3).sqrt()
    }

    #[inline]
    pub fn imag(self) -> Self {
        Self::new(0.0, self.x1, self.x2, self.x3)
    }

    /// `conj(q) / |q|^2`.
    pub fn inverse(self) -> Result<Self> {
        let n2 = self.norm_sqr();
        if n2 == 0.0 {
            return Err(Error::ZeroQuaternion);
        }
        Ok(self.conj() * (1.0 / n2))
    }

    pub fn is_finite(self) -> bool {
        self.to_array().iter().all(|c| c.is_finite())
    }

    /// Decomposes the point as `x0 + rho * axis`.
    pub fn axial_split(self) -> AxialForm {
        let rho = self.rho();
        let axis = if rho > 0.0 {
            Some(self.imag() * (1.0 / rho))
        } else {
            None
        };
        AxialForm {
            x0: self.x0,
            rho,
            axis,
        }
    }

    /// Spherical and cylindrical angles of the point.
    ///
    /// `theta` is recovered with `atan2(sqrt(x2^2 + x3^2), x1)` so that the
    /// coordinate relations round-trip; `psi` is only defined in the half
    /// space `x3 > 0`.
    pub fn angles(self) -> Result<CylindricalAngles> {
        let rho = self.rho();
        if rho == 0.0 {
            return Err(Error::OnAxis { rho });
        }
        let r = self.norm();
        let varphi = rho.atan2(self.x0);
        let theta = self.x2.hypot(self.x3).atan2(self.x1);
        let psi = (self.x3 > 0.0).then(|| self.x3.atan2(self.x2));
        Ok(CylindricalAngles {
            r,
            rho,
            varphi,
            theta,
            psi,
            x3: self.x3,
        })
    }

    pub fn max_abs_diff(self, other: Self) -> f64 {
        let d = self - other;
        d.to_array().iter().fold(0.0f64, |m, c| m.max(c.abs()))
    }
}

impl fmt::Display for Quaternion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "({} {:+}i {:+}j {:+}k)",
            self.x0, self.x1, self.x2, self.x3
        )
    }
}

impl Add for Quaternion {
    type Output = Self;
    #[inline]
    fn add(self, o: Self) -> Self {
        Self::new(self.x0 + o.x0, self.x1 + o.x1, self.x2 + o.x2, self.x3 + o.x3)
    }
}

impl AddAssign for Quaternion {
    #[inline]
    fn add_assign(&mut self, o: Self) {
        *self = *self + o;
    }
}

impl Sub for Quaternion {
    type Output = Self;
    #[inline]
    fn sub(self, o: Self) -> Self {
        Self::new(self.x0 - o.x0, self.x1 - o.x1, self.x2 - o.x2, self.x3 - o.x3)
    }
}

impl Neg for Quaternion {
    type Output = Self;
    #[inline]
    fn neg(self) -> Self {
        Self::new(-self.x0, -self.x1, -self.x2, -self.x3)
    }
}

/// Hamilton product with `i^2 = j^2 = k^2 = ijk = -1`.
impl Mul for Quaternion {
    type Output = Self;
    #[inline]
    fn mul(self, q: Self) -> Self {
        let p = self;
        Self::new(
            p.x0 * q.x0 - p.x1 * q.x1 - p.x2 * q.x2 - p.x3 * q.x3,
            p.x0 * q.x1 + p.x1 * q.x0 + p.x2 * q.x3 - p.x3 * q.x2,
            p.x0 * q.x2 - p.x1 * q.x3 + p.x2 * q.x0 + p.x3 * q.x1,
            p.x0 * q.x3 + p.x1 * q.x2 - p.x2 * q.x1 + p.x3 * q.x0,
        )
    }
}

impl Mul<f64> for Quaternion {
    type Output = Self;
    #[inline]
    fn mul(self, s: f64) -> Self {
        Self::new(self.x0 * s, self.x1 * s, self.x2 * s, self.x3 * s)
    }
}

impl Mul<Quaternion> for f64 {
    type Output = Quaternion;
    #[inline]
    fn mul(self, q: Quaternion) -> Quaternion {
        q * self
    }
}

impl Div<f64> for Quaternion {
    type Output = Self;
    #[inline]
    fn div(self, s: f64) -> Self {
        self * (1.0 / s)
    }
}

/// `x = x0 + rho * axis` with `axis` a unit pure-imaginary quaternion.
///
/// On the real axis (`rho == 0`) the direction is undefined and `axis` is `None`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AxialForm {
    pub x0: f64,
    pub rho: f64,
    pub axis: Option<Quaternion>,
}

impl AxialForm {
    pub fn reconstruct(&self) -> Quaternion {
        match self.axis {
            Some(axis) => Quaternion::real(self.x0) + axis * self.rho,
            None => Quaternion::real(self.x0),
        }
    }

    /// The axis, or `OnAxis` when the point sits on the real line.
    pub fn axis(&self) -> Result<Quaternion> {
        self.axis.ok_or(Error::OnAxis { rho: self.rho })
    }

    /// Re-embeds a meridian-plane pair `(a, b)` as `a + b * axis`.
    ///
    /// Points on the real axis accept only `b == 0`.
    pub fn embed(&self, a: f64, b: f64) -> Result<Quaternion> {
        match self.axis {
            Some(axis) => Ok(Quaternion::real(a) + axis * b),
            None if b == 0.0 => Ok(Quaternion::real(a)),
            None => Err(Error::OnAxis { rho: self.rho }),
        }
    }
}

/// `x1 = rho cos(theta)`, `x2 = rho sin(theta) cos(psi)`, `x3 = rho sin(theta) sin(psi)`,
/// with `varphi` the angle between the point and the positive real axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CylindricalAngles {
    pub r: f64,
    pub rho: f64,
    pub varphi: f64,
    pub theta: f64,
    psi: Option<f64>,
    x3: f64,
}

impl CylindricalAngles {
    pub fn psi(&self) -> Result<f64> {
        self.psi.ok_or(Error::HalfSpaceViolation { x3: self.x3 })
    }

    /// True when `psi` sits within `eps` of one end of `(0, pi)`.
    pub fn psi_at_boundary(&self, eps: f64) -> bool {
        match self.psi {
            Some(p) => p < eps || PI - p < eps,
            None => true,
        }
    }

    /// Rebuilds `(x1, x2, x3)`; needs `psi` to be defined.
    pub fn imaginary_coords(&self) -> Result<[f64; 3]> {
        let psi = self.psi()?;
        let (st, ct) = self.theta.sin_cos();
        let (sp, cp) = psi.sin_cos();
        Ok([self.rho * ct, self.rho * st * cp, self.rho * st * sp])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use std::f64::consts::FRAC_PI_2;

    fn q(a: f64, b: f64, c: f64, d: f64) -> Quaternion {
        Quaternion::new(a, b, c, d)
    }

    #[test]
    fn multiplication_table() {
        assert_eq!(Quaternion::I * Quaternion::J, Quaternion::K);
        assert_eq!(Quaternion::J * Quaternion::I, -Quaternion::K);
        assert_eq!(Quaternion::J * Quaternion::K, Quaternion::I);
        assert_eq!(Quaternion::K * Quaternion::I, Quaternion::J);
        for u in [Quaternion::I, Quaternion::J, Quaternion::K] {
            assert_eq!(u * u, -Quaternion::ONE);
        }
        assert_eq!(Quaternion::I * Quaternion::J * Quaternion::K, -Quaternion::ONE);
        let p = q(0.3, -1.0, 2.0, 5.0);
        assert_eq!(Quaternion::ONE * p, p);
    }

    #[test]
    fn inverse_examples() {
        assert_eq!(Quaternion::real(2.0).inverse().unwrap(), Quaternion::real(0.5));
        assert_eq!(Quaternion::I.inverse().unwrap(), -Quaternion::I);
        assert_eq!(
            q(1.0, 1.0, 1.0, 1.0).inverse().unwrap(),
            q(0.25, -0.25, -0.25, -0.25)
        );
        assert_eq!(Quaternion::ZERO.inverse(), Err(Error::ZeroQuaternion));

        let p = q(1.0, 2.0, 3.0, 4.0);
        // conj / norm^2 done by hand: (1, -2, -3, -4) / 30
        let by_hand = q(1.0 / 30.0, -2.0 / 30.0, -3.0 / 30.0, -4.0 / 30.0);
        assert!((p * by_hand).max_abs_diff(Quaternion::ONE) < 1e-15);
        let inv = p.inverse().unwrap();
        assert!((p * inv).max_abs_diff(Quaternion::ONE) < 1e-12);
        assert!((inv * p).max_abs_diff(Quaternion::ONE) < 1e-12);
    }

    #[test]
    fn axial_split_examples() {
        let a = q(1.0, 3.0, 0.0, 4.0).axial_split();
        assert_eq!(a.x0, 1.0);
        assert_eq!(a.rho, 5.0);
        assert!(a.axis.unwrap().max_abs_diff(q(0.0, 0.6, 0.0, 0.8)) < 1e-15);

        let a = q(7.0, 0.0, 0.0, 0.0).axial_split();
        assert_eq!(a.rho, 0.0);
        assert!(a.axis.is_none());
        assert_eq!(a.axis(), Err(Error::OnAxis { rho: 0.0 }));
        assert_eq!(a.reconstruct(), Quaternion::real(7.0));

        let a = q(0.0, 0.0, 1.0, 0.0).axial_split();
        assert_eq!(a.axis, Some(Quaternion::J));
    }

    #[test]
    fn angle_examples() {
        let ang = q(0.0, 1.0, 0.0, 0.0).angles().unwrap();
        assert_eq!(ang.theta, 0.0);
        assert_eq!(ang.psi(), Err(Error::HalfSpaceViolation { x3: 0.0 }));

        let ang = q(0.0, 0.0, 1.0, 1.0).angles().unwrap();
        assert_relative_eq!(ang.theta, FRAC_PI_2, epsilon = 1e-15);
        assert_relative_eq!(ang.psi().unwrap(), PI / 4.0, epsilon = 1e-15);

        // x1 = x2 = 0: psi = arccot(0) = pi/2, an interior value.
        let ang = q(1.0, 0.0, 0.0, 1.0).angles().unwrap();
        assert_relative_eq!(ang.varphi, PI / 4.0, epsilon = 1e-15);
        assert_relative_eq!(ang.theta, FRAC_PI_2, epsilon = 1e-15);
        assert_relative_eq!(ang.psi().unwrap(), FRAC_PI_2, epsilon = 1e-15);
        assert!(!ang.psi_at_boundary(1e-9));

        let ang = q(0.0, 0.0, 1.0, 1e-300).angles().unwrap();
        assert!(ang.psi_at_boundary(1e-9));

        assert!(matches!(
            Quaternion::real(3.0).angles(),
            Err(Error::OnAxis { .. })
        ));
    }

    #[test]
    fn unit_axis_squares_to_minus_one() {
        let axis = q(0.0, 0.3, -1.2, 0.7).axial_split().axis.unwrap();
        assert!((axis * axis).max_abs_diff(-Quaternion::ONE) < 1e-14);
    }

    fn quat() -> impl Strategy<Value = Quaternion> {
        prop::array::uniform4(-10.0f64..10.0).prop_map(Quaternion::from_array)
    }

    fn rel(a: Quaternion, b: Quaternion) -> f64 {
        a.max_abs_diff(b) / a.norm().max(b.norm()).max(1.0)
    }

    proptest! {
        #[test]
        fn associative(p in quat(), r in quat(), s in quat()) {
            prop_assert!(rel((p * r) * s, p * (r * s)) < 1e-12);
        }

        #[test]
        fn conj_reverses_products(p in quat(), r in quat()) {
            prop_assert!(rel((p * r).conj(), r.conj() * p.conj()) < 1e-14);
        }

        #[test]
        fn norm_is_multiplicative(p in quat(), r in quat()) {
            let lhs = (p * r).norm();
            let rhs = p.norm() * r.norm();
            prop_assert!((lhs - rhs).abs() <= 8.0 * f64::EPSILON * rhs.max(f64::MIN_POSITIVE));
        }

        #[test]
        fn norm_sqr_is_q_conj_q(p in quat()) {
            let n = p * p.conj();
            prop_assert!((n.x0 - p.norm_sqr()).abs() <= 4.0 * f64::EPSILON * p.norm_sqr());
            prop_assert_eq!(p.conj().conj(), p);
        }

        #[test]
        fn axial_split_round_trips(p in quat()) {
            prop_assume!(p.rho() > 1e-8);
            let back = p.axial_split().reconstruct();
            for (a, b) in back.to_array().iter().zip(p.to_array()) {
                prop_assert!((a - b).abs() <= 4.0 * f64::EPSILON * p.norm());
            }
            let axis = p.axial_split().axis.unwrap();
            prop_assert_eq!(axis.x0, 0.0);
            prop_assert!((axis.norm() - 1.0).abs() < 4.0 * f64::EPSILON);
        }

        #[test]
        fn angles_round_trip(p in quat()) {
            prop_assume!(p.rho() > 1e-6 && p.x3 > 1e-6);
            let ang = p.angles().unwrap();
            let [x1, x2, x3] = ang.imaginary_coords().unwrap();
            prop_assert!((x1 - p.x1).abs() < 1e-12);
            prop_assert!((x2 - p.x2).abs() < 1e-12);
            prop_assert!((x3 - p.x3).abs() < 1e-12);
            prop_assert!(ang.psi().unwrap() > 0.0 && ang.psi().unwrap() < PI);
        }
    }
}
