use std::f64::consts::{FRAC_PI_4, TAU};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An angle `k * pi/4` with `k` in `0..8`.
#[derive(
    Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize,
)]
#[serde(try_from = "u8", into = "u8")]
pub struct Octant(u8);

/// Which of the two angle sets an octant belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum AngleSet {
    /// Multiples of `pi/2`.
    A,
    /// Odd multiples of `pi/4`.
    B,
}

impl Octant {
    pub const ZERO: Octant = Octant(0);

    pub fn new(k: u8) -> Result<Self> {
        if k < 8 {
            Ok(Octant(k))
        } else {
            Err(Error::InvalidOctant(k))
        }
    }

    /// Reduces any integer modulo 8.
    pub fn wrap(k: i64) -> Self {
        Octant(k.rem_euclid(8) as u8)
    }

    /// Snaps a radian angle to an octant, failing if it is not within `tol` of one.
    pub fn from_radians(theta: f64, tol: f64) -> Result<Self> {
        let k = theta / FRAC_PI_4;
        let r = k.round();
        if (k - r).abs() * FRAC_PI_4 > tol {
            return Err(Error::NotAnOctant(theta));
        }
        Ok(Octant::wrap(r as i64))
    }

    pub fn k(self) -> u8 {
        self.0
    }

    pub fn radians(self) -> f64 {
        (self.0 as f64 * FRAC_PI_4) % TAU
    }

    pub fn set(self) -> AngleSet {
        if self.0.is_multiple_of(2) {
            AngleSet::A
        } else {
            AngleSet::B
        }
    }

    pub fn neg(self) -> Self {
        Octant::wrap(-(self.0 as i64))
    }

    /// `self` negated when `flip` is set.
    pub fn signed(self, flip: bool) -> Self {
        if flip {
            self.neg()
        } else {
            self
        }
    }

    pub fn all() -> impl Iterator<Item = Octant> {
        (0..8).map(Octant)
    }
}

impl std::ops::Add for Octant {
    type Output = Octant;
    fn add(self, rhs: Octant) -> Octant {
        Octant((self.0 + rhs.0) % 8)
    }
}

impl std::ops::Sub for Octant {
    type Output = Octant;
    fn sub(self, rhs: Octant) -> Octant {
        Octant((self.0 + 8 - rhs.0) % 8)
    }
}

impl TryFrom<u8> for Octant {
    type Error = Error;
    fn try_from(k: u8) -> Result<Self> {
        Octant::new(k)
    }
}

impl From<Octant> for u8 {
    fn from(o: Octant) -> u8 {
        o.0
    }
}

impl fmt::Display for Octant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}pi/4", self.0)
    }
}

/// Set membership of an octant.
pub fn classify_angle(theta: Octant) -> AngleSet {
    theta.set()
}
