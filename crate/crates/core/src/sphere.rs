//! Geometry of the unit-area sphere.
//!
//! Positions are stored as unit vectors and every distance is a central
//! angle in `[0, π]`; the physical radius never enters a computation.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::scalar::{unit, Real};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GeometryError {
    #[error("vector norm {norm} is not 1 (unit vector required)")]
    NotUnit { norm: f64 },
    #[error("cannot normalize a zero-length vector")]
    ZeroVector,
    #[error("cap radius {0} outside [0, π]")]
    RadiusOutOfRange(f64),
}

/// A point on the sphere, stored as a unit vector.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpherePoint<T> {
    xyz: [T; 3],
}

impl<T: Real> SpherePoint<T> {
    /// Accepts `(x, y, z)` only if it already has unit norm.
    pub fn from_unit(x: T, y: T, z: T) -> Result<Self, GeometryError> {
        let norm = (x * x + y * y + z * z).sqrt();
        let tol = T::epsilon() * T::lit(64.0);
        if (norm - T::one()).abs() > tol {
            return Err(GeometryError::NotUnit { norm: norm.as_f64() });
        }
        Ok(Self { xyz: [x, y, z] })
    }

    pub fn normalized(x: T, y: T, z: T) -> Result<Self, GeometryError> {
        let norm = (x * x + y * y + z * z).sqrt();
        if norm <= T::min_positive_value() || !norm.is_finite() {
            return Err(GeometryError::ZeroVector);
        }
        Ok(Self {
            xyz: [x / norm, y / norm, z / norm],
        })
    }

    /// Point at polar angle `polar` from the north pole and azimuth `azimuth`.
    pub fn from_spherical(polar: T, azimuth: T) -> Self {
        let s = polar.sin();
        Self {
            xyz: [s * azimuth.cos(), s * azimuth.sin(), polar.cos()],
        }
    }

    pub fn north_pole() -> Self {
        Self {
            xyz: [T::zero(), T::zero(), T::one()],
        }
    }

    pub fn south_pole() -> Self {
        Self {
            xyz: [T::zero(), T::zero(), -T::one()],
        }
    }

    #[inline]
    pub fn x(&self) -> T {
        self.xyz[0]
    }
    #[inline]
    pub fn y(&self) -> T {
        self.xyz[1]
    }
    #[inline]
    pub fn z(&self) -> T {
        self.xyz[2]
    }
    #[inline]
    pub fn coords(&self) -> [T; 3] {
        self.xyz
    }

    #[inline]
    pub fn dot(&self, other: &Self) -> T {
        self.xyz[0] * other.xyz[0] + self.xyz[1] * other.xyz[1] + self.xyz[2] * other.xyz[2]
    }

    pub fn norm(&self) -> T {
        self.dot(self).sqrt()
    }

    /// Central angle to `other`, see [`angular_distance`].
    #[inline]
    pub fn angle_to(&self, other: &Self) -> T {
        angular_distance(self, other)
    }
}

/// Uniform point on the sphere: `z` uniform on `[-1, 1]`, azimuth uniform on `[0, 2π)`.
pub fn sample_uniform<T: Real, R: Rng + ?Sized>(rng: &mut R) -> SpherePoint<T> {
    let two = T::lit(2.0);
    let z = two * unit::<T, _>(rng) - T::one();
    let phi = T::TAU() * unit::<T, _>(rng);
    let r = (T::one() - z * z).max(T::zero()).sqrt();
    SpherePoint {
        xyz: [r * phi.cos(), r * phi.sin(), z],
    }
}

/// Central angle between two points, in `[0, π]`.
///
/// The dot product is clamped into `[-1, 1]` before the inverse cosine.
#[inline]
pub fn angular_distance<T: Real>(a: &SpherePoint<T>, b: &SpherePoint<T>) -> T {
    a.dot(b).max(-T::one()).min(T::one()).acos()
}

/// Area fraction of a spherical cap of angular radius `rho`: `(1 - cos rho) / 2`.
pub fn cap_area<T: Real>(rho: T) -> Result<T, GeometryError> {
    if !(rho >= T::zero() && rho <= T::PI()) {
        return Err(GeometryError::RadiusOutOfRange(rho.as_f64()));
    }
    Ok(cap_area_unchecked(rho))
}

#[inline]
pub(crate) fn cap_area_unchecked<T: Real>(rho: T) -> T {
    // 1 - cos x = 2 sin^2(x/2), which keeps precision for small caps.
    let s = (rho / T::lit(2.0)).sin();
    s * s
}

/// Chord length for a central angle.
#[inline]
pub(crate) fn chord<T: Real>(angle: T) -> T {
    T::lit(2.0) * (angle.min(T::PI()) / T::lit(2.0)).sin()
}
