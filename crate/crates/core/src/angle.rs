//! Angle wrapping.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Arc-angle cap of a path family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Kappa {
    #[serde(rename = "2pi")]
    TwoPi,
    #[serde(rename = "4pi")]
    FourPi,
}

impl Kappa {
    pub fn value<S: Scalar>(self) -> S {
        match self {
            Kappa::TwoPi => S::TAU(),
            Kappa::FourPi => S::c(2.0) * S::TAU(),
        }
    }

    /// Accepts 2π or 4π (to within a few ulps).
    pub fn from_radians<S: Scalar>(k: S) -> Result<Self> {
        let tol = S::c(1e-6);
        if (k - S::TAU()).abs() < tol {
            Ok(Kappa::TwoPi)
        } else if (k - S::c(2.0) * S::TAU()).abs() < tol {
            Ok(Kappa::FourPi)
        } else {
            Err(Error::InvalidKappa)
        }
    }
}

impl std::fmt::Display for Kappa {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Kappa::TwoPi => "2pi",
            Kappa::FourPi => "4pi",
        })
    }
}

/// Non-negative remainder of `a` modulo `m`, in `[0, m)`.
#[inline]
pub fn wrap<S: Scalar>(a: S, m: S) -> S {
    let mut r = a % m;
    if r < S::zero() {
        r = r + m;
    }
    if r >= m {
        r = r - m;
    }
    r
}

/// Wraps into `[0, 2π)` without checking finiteness.
#[inline]
pub fn wrap_2pi<S: Scalar>(a: S) -> S {
    wrap(a, S::TAU())
}

pub fn normalize_angle<S: Scalar>(a: S) -> Result<S> {
    if !a.is_finite() {
        return Err(Error::NonFinite);
    }
    Ok(wrap_2pi(a))
}

pub fn mod_kappa<S: Scalar>(a: S, kappa: Kappa) -> Result<S> {
    if !a.is_finite() {
        return Err(Error::NonFinite);
    }
    Ok(wrap(a, kappa.value()))
}

/// Smallest absolute difference between two directions, in `[0, π]`.
pub fn circular_distance<S: Scalar>(a: S, b: S) -> S {
    let d = wrap_2pi(a - b);
    d.min(S::TAU() - d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn normalize_examples() {
        assert!((normalize_angle(-PI / 2.0).unwrap() - 1.5 * PI).abs() < 1e-15);
        assert_eq!(normalize_angle(0.0).unwrap(), 0.0);
        assert!((normalize_angle(5.0 * PI).unwrap() - PI).abs() < 1e-12);
        assert_eq!(normalize_angle(f64::NAN), Err(Error::NonFinite));
        assert_eq!(normalize_angle(f64::INFINITY), Err(Error::NonFinite));
    }

    #[test]
    fn mod_kappa_examples() {
        let r = mod_kappa(-PI / 4.0, Kappa::FourPi).unwrap();
        assert!((r - 15.0 * PI / 4.0).abs() < 1e-12);
        let r = mod_kappa(4.5 * PI, Kappa::FourPi).unwrap();
        assert!((r - PI / 2.0).abs() < 1e-12);
        assert_eq!(mod_kappa(2.0 * PI, Kappa::TwoPi).unwrap(), 0.0);
        assert_eq!(Kappa::from_radians(3.0_f64), Err(Error::InvalidKappa));
        assert_eq!(Kappa::from_radians(4.0 * PI).unwrap(), Kappa::FourPi);
    }

    #[test]
    fn tiny_negative_does_not_wrap_to_modulus() {
        let r: f64 = wrap_2pi(-1e-20);
        assert!(r < 2.0 * PI);
        let r: f32 = wrap_2pi(-1e-12_f32);
        assert!(r < std::f32::consts::TAU);
    }

    #[test]
    fn circular_distance_is_minimal() {
        assert!((circular_distance(0.1, 2.0 * PI - 0.1) - 0.2).abs() < 1e-12);
        assert!((circular_distance(PI, 0.0) - PI).abs() < 1e-12);
    }
}
