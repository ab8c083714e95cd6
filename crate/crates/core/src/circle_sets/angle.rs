use crate::error::{invalid, Result};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::{PI, TAU};

/// Default tolerance for deciding that two angles coincide.
pub const ANGLE_TOL: f64 = 1e-12;

/// A point of the unit circle, stored as its angle in `[0, 2π)`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct Angle(f64);

impl Angle {
    pub fn new(theta: f64) -> Result<Self> {
        if !theta.is_finite() {
            return invalid(format!("angle {theta} is not finite"));
        }
        Ok(Angle(reduce(theta)))
    }

    pub fn radians(self) -> f64 {
        self.0
    }

    /// Angle measured in full turns, in `[0, 1)`.
    pub fn turns(self) -> f64 {
        self.0 / TAU
    }

    /// Geodesic distance on the circle, in `[0, π]`.
    pub fn distance(self, other: Angle) -> f64 {
        let d = (self.0 - other.0).abs();
        d.min(TAU - d)
    }

    pub fn approx_eq(self, other: Angle, tol: f64) -> bool {
        self.distance(other) <= tol
    }

    pub fn to_unimodular(self) -> Complex64 {
        Complex64::from_polar(1.0, self.0)
    }

    pub fn from_unimodular(z: Complex64) -> Result<Self> {
        if z.norm() == 0.0 || !z.norm().is_finite() {
            return invalid("cannot take the angle of zero or a non-finite number");
        }
        Angle::new(z.arg())
    }
}

impl TryFrom<f64> for Angle {
    type Error = crate::error::Error;
    fn try_from(v: f64) -> Result<Self> {
        Angle::new(v)
    }
}

impl From<Angle> for f64 {
    fn from(a: Angle) -> f64 {
        a.0
    }
}

/// Reduce to `[0, 2π)`.
pub(crate) fn reduce(theta: f64) -> f64 {
    let r = theta.rem_euclid(TAU);
    if r >= TAU {
        0.0
    } else {
        r
    }
}

/// Signed offset `b − a` wrapped into `(−π, π]`.
pub(crate) fn signed_offset(a: f64, b: f64) -> f64 {
    let mut d = (b - a).rem_euclid(TAU);
    if d > PI {
        d -= TAU;
    }
    d
}
