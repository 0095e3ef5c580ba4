//! Directions, spherical angles and momentum-transfer vectors.

use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Vec3<T> {
    pub x: T,
    pub y: T,
    pub z: T,
}

impl<T: Scalar> Vec3<T> {
    pub const fn new(x: T, y: T, z: T) -> Self {
        Vec3 { x, y, z }
    }

    pub fn zero() -> Self {
        Vec3::new(T::zero(), T::zero(), T::zero())
    }

    pub fn from_array(v: [T; 3]) -> Self {
        Vec3::new(v[0], v[1], v[2])
    }

    pub fn to_array(self) -> [T; 3] {
        [self.x, self.y, self.z]
    }

    /// Component by Cartesian index (0 = x, 1 = y, 2 = z).
    pub fn axis(&self, i: usize) -> T {
        match i {
            0 => self.x,
            1 => self.y,
            2 => self.z,
            _ => panic!("axis index {i} out of range"),
        }
    }

    pub fn dot(self, o: Self) -> T {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    pub fn cross(self, o: Self) -> Self {
        Vec3::new(self.y * o.z - self.z * o.y, self.z * o.x - self.x * o.z, self.x * o.y - self.y * o.x)
    }

    pub fn norm_sqr(self) -> T {
        self.dot(self)
    }

    pub fn norm(self) -> T {
        self.norm_sqr().sqrt()
    }

    pub fn scale(self, s: T) -> Self {
        Vec3::new(self.x * s, self.y * s, self.z * s)
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    pub fn cast<U: Scalar>(self) -> Vec3<U> {
        Vec3::new(U::of(self.x.to_f64_lossy()), U::of(self.y.to_f64_lossy()), U::of(self.z.to_f64_lossy()))
    }
}

impl<T: Scalar> Add for Vec3<T> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Vec3::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl<T: Scalar> AddAssign for Vec3<T> {
    fn add_assign(&mut self, o: Self) {
        *self = *self + o;
    }
}

impl<T: Scalar> Sub for Vec3<T> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Vec3::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl<T: Scalar> Neg for Vec3<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Vec3::new(-self.x, -self.y, -self.z)
    }
}

impl<T: Scalar> Mul<T> for Vec3<T> {
    type Output = Self;
    fn mul(self, s: T) -> Self {
        self.scale(s)
    }
}

/// A direction on the unit sphere.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct UnitDir<T>(Vec3<T>);

impl<T: Scalar> UnitDir<T> {
    /// Normalizes `v`. Fails for zero or non-finite vectors.
    pub fn new(v: Vec3<T>) -> Result<Self> {
        let n = v.norm();
        if !v.is_finite() || n <= T::min_positive_value() {
            return Err(Error::param("direction must be a finite nonzero vector"));
        }
        Ok(UnitDir(v.scale(T::one() / n)))
    }

    /// Wraps a vector that is already unit length (within the scalar's tolerance).
    pub fn try_unit(v: Vec3<T>) -> Result<Self> {
        if !v.is_finite() || (v.norm() - T::one()).abs() > T::geom_tol() {
            return Err(Error::param("vector is not of unit length"));
        }
        Ok(UnitDir(v))
    }

    pub fn x() -> Self {
        UnitDir(Vec3::new(T::one(), T::zero(), T::zero()))
    }

    pub fn y() -> Self {
        UnitDir(Vec3::new(T::zero(), T::one(), T::zero()))
    }

    pub fn z() -> Self {
        UnitDir(Vec3::new(T::zero(), T::zero(), T::one()))
    }

    pub fn vec(&self) -> Vec3<T> {
        self.0
    }

    /// Polar angle from +z and azimuth in `(-pi, pi]`.
    pub fn spherical_angles(&self) -> (T, T) {
        let v = self.0;
        let rho = (v.x * v.x + v.y * v.y).sqrt();
        (rho.atan2(v.z), v.y.atan2(v.x))
    }
}

/// Monochromatic plane-wave illumination geometry.
#[derive(Clone, Debug, PartialEq)]
pub struct ScatteringGeometry<T> {
    k: T,
    s0: UnitDir<T>,
    pub frequency_tag: Option<String>,
}

impl<T: Scalar> ScatteringGeometry<T> {
    pub fn new(k: T, s0: UnitDir<T>) -> Result<Self> {
        if !(k > T::zero()) || !k.is_finite() {
            return Err(Error::param("wavenumber must be positive and finite"));
        }
        Ok(ScatteringGeometry { k, s0, frequency_tag: None })
    }

    pub fn with_tag(mut self, tag: impl Into<String>) -> Self {
        self.frequency_tag = Some(tag.into());
        self
    }

    pub fn k(&self) -> T {
        self.k
    }

    pub fn s0(&self) -> UnitDir<T> {
        self.s0
    }
}

/// `(sin t cos p, sin t sin p, cos t)`.
pub fn unit_from_spherical<T: Scalar>(theta: T, phi: T) -> UnitDir<T> {
    let (st, ct) = theta.sin_cos();
    let (sp, cp) = phi.sin_cos();
    UnitDir(Vec3::new(st * cp, st * sp, ct))
}

/// `K = k (s - s0)`.
pub fn momentum_transfer<T: Scalar>(geom: &ScatteringGeometry<T>, s: UnitDir<T>) -> Vec3<T> {
    (s.vec() - geom.s0.vec()).scale(geom.k)
}

/// Unit vector along the part of `s` transverse to `s0`, with `sin` of the angle between them.
pub fn transverse_unit<T: Scalar>(s0: UnitDir<T>, s: UnitDir<T>) -> Result<(UnitDir<T>, T)> {
    if s.vec().cross(s0.vec()).norm() < T::geom_tol() {
        return Err(Error::DegenerateDirection);
    }
    let t = s.vec() - s0.vec().scale(s.vec().dot(s0.vec()));
    let sin_theta = t.norm();
    Ok((UnitDir(t.scale(T::one() / sin_theta)), sin_theta))
}

/// Mirror pair `(s, s - 2 n sin(theta))` about the incident direction.
pub fn symmetric_pair<T: Scalar>(geom: &ScatteringGeometry<T>, s: UnitDir<T>) -> Result<(UnitDir<T>, UnitDir<T>)> {
    let (n, sin_theta) = transverse_unit(geom.s0, s)?;
    let s2 = s.vec() - n.vec().scale(T::of(2.0) * sin_theta);
    // exact reflection, renormalized only to absorb rounding
    Ok((s, UnitDir::new(s2)?))
}

/// Some unit vector perpendicular to `s0`, chosen deterministically.
pub fn perpendicular<T: Scalar>(s0: UnitDir<T>) -> UnitDir<T> {
    let v = s0.vec();
    let seed = if v.x.abs() < T::of(0.9) {
        Vec3::new(T::one(), T::zero(), T::zero())
    } else {
        Vec3::new(T::zero(), T::one(), T::zero())
    };
    let t = seed - v.scale(seed.dot(v));
    UnitDir(t.scale(T::one() / t.norm()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

    fn close(a: Vec3<f64>, b: Vec3<f64>, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    fn geom_z(k: f64) -> ScatteringGeometry<f64> {
        ScatteringGeometry::new(k, UnitDir::z()).unwrap()
    }

    #[test]
    fn spherical_cardinal_points() {
        assert!(close(unit_from_spherical(0.0, 1.234).vec(), Vec3::new(0.0, 0.0, 1.0), 1e-15));
        assert!(close(unit_from_spherical(FRAC_PI_2, 0.0).vec(), Vec3::new(1.0, 0.0, 0.0), 1e-15));
        assert!(close(unit_from_spherical(FRAC_PI_2, FRAC_PI_2).vec(), Vec3::new(0.0, 1.0, 0.0), 1e-15));
    }

    #[test]
    fn momentum_transfer_examples() {
        let g = geom_z(1.0);
        assert_eq!(momentum_transfer(&g, UnitDir::z()), Vec3::zero());
        let back = UnitDir::new(Vec3::new(0.0, 0.0, -1.0)).unwrap();
        assert_eq!(momentum_transfer(&g, back), Vec3::new(0.0, 0.0, -2.0));
        assert_eq!(momentum_transfer(&g, UnitDir::x()), Vec3::new(1.0, 0.0, -1.0));
    }

    #[test]
    fn mirror_at_quarter_pi() {
        let g = geom_z(1.0);
        let s = unit_from_spherical(FRAC_PI_4, 0.0);
        let (s1, s2) = symmetric_pair(&g, s).unwrap();
        assert_eq!(s1, s);
        let want = Vec3::new(-FRAC_PI_4.sin(), 0.0, FRAC_PI_4.cos());
        assert!(close(s2.vec(), want, 1e-15));
    }

    #[test]
    fn chord_at_right_angle() {
        let g = geom_z(1.0);
        let (s1, s2) = symmetric_pair(&g, UnitDir::x()).unwrap();
        let d = momentum_transfer(&g, s1) - momentum_transfer(&g, s2);
        assert!((d.norm() - 2.0).abs() < 1e-15);
    }

    #[test]
    fn degenerate_pairs_rejected() {
        let g = geom_z(2.0);
        assert_eq!(symmetric_pair(&g, UnitDir::z()), Err(Error::DegenerateDirection));
        let back = UnitDir::new(Vec3::new(0.0, 0.0, -1.0)).unwrap();
        assert_eq!(symmetric_pair(&g, back), Err(Error::DegenerateDirection));
    }

    #[test]
    fn invalid_inputs() {
        assert!(ScatteringGeometry::new(0.0, UnitDir::<f64>::z()).is_err());
        assert!(ScatteringGeometry::new(-1.0, UnitDir::<f64>::z()).is_err());
        assert!(UnitDir::new(Vec3::<f64>::zero()).is_err());
        assert!(UnitDir::try_unit(Vec3::new(1.0, 1.0, 0.0)).is_err());
    }

    #[test]
    fn single_precision_geometry() {
        let g = ScatteringGeometry::new(1.0f32, UnitDir::z()).unwrap();
        let k = momentum_transfer(&g, unit_from_spherical(std::f32::consts::FRAC_PI_2, 0.0));
        assert!((k.norm_sqr() - 2.0).abs() < 1e-6);
    }

    fn arb_dir() -> impl Strategy<Value = UnitDir<f64>> {
        (0.0..PI, -PI..PI).prop_map(|(t, p)| unit_from_spherical(t, p))
    }

    proptest! {
        #[test]
        fn momentum_norm_identity(k in 0.1f64..10.0, s in arb_dir(), s0 in arb_dir()) {
            let g = ScatteringGeometry::new(k, s0).unwrap();
            let kv = momentum_transfer(&g, s);
            let want = 2.0 * k * k * (1.0 - s.vec().dot(s0.vec()));
            prop_assert!((kv.norm_sqr() - want).abs() <= 1e-12 * (1.0 + want));
            prop_assert!(kv.norm() <= 2.0 * k * (1.0 + 1e-15));
        }

        #[test]
        fn mirror_keeps_angle_and_norm(k in 0.1f64..10.0, s in arb_dir(), s0 in arb_dir()) {
            let g = ScatteringGeometry::new(k, s0).unwrap();
            prop_assume!(s.vec().cross(s0.vec()).norm() > 1e-6);
            let (s1, s2) = symmetric_pair(&g, s).unwrap();
            prop_assert!((s2.vec().norm() - 1.0).abs() < 1e-12);
            prop_assert!((s2.vec().dot(s0.vec()) - s1.vec().dot(s0.vec())).abs() < 1e-12);
            let (_, sin_t) = transverse_unit(s0, s).unwrap();
            let chord = (momentum_transfer(&g, s1) - momentum_transfer(&g, s2)).norm();
            prop_assert!((chord - 2.0 * k * sin_t).abs() < 1e-11 * k);
        }

        #[test]
        fn spherical_round_trip(t in 0.0f64..PI, p in -10.0f64..10.0) {
            let u = unit_from_spherical(t, p);
            prop_assert!((u.vec().norm() - 1.0).abs() < 1e-12);
            let (t2, p2) = u.spherical_angles();
            prop_assert!(close(unit_from_spherical(t2, p2).vec(), u.vec(), 1e-12));
        }
    }
}
