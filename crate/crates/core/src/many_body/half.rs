use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A half-integer stored as twice its value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct HalfInt(pub i32);

impl HalfInt {
    pub const ZERO: HalfInt = HalfInt(0);
    pub const HALF: HalfInt = HalfInt(1);
    pub const ONE: HalfInt = HalfInt(2);

    pub fn from_f64(x: f64) -> Result<Self> {
        let twice = 2.0 * x;
        if !twice.is_finite() || (twice - twice.round()).abs() > 1e-9 || twice.abs() > 1e6 {
            return Err(Error::NotHalfInteger { value: x });
        }
        Ok(HalfInt(twice.round() as i32))
    }

    /// Non-negative half-integer, as required for angular momenta.
    pub fn spin(x: f64) -> Result<Self> {
        let h = Self::from_f64(x)?;
        if h.0 < 0 {
            return Err(Error::NotHalfInteger { value: x });
        }
        Ok(h)
    }

    pub fn twice(self) -> i32 {
        self.0
    }

    pub fn value(self) -> f64 {
        0.5 * f64::from(self.0)
    }

    pub fn is_integer(self) -> bool {
        self.0 % 2 == 0
    }

    /// Number of projections, `2j + 1`.
    pub fn multiplicity(self) -> usize {
        (self.0 + 1) as usize
    }

    /// Projections `j, j-1, …, -j`, the order used for spin amplitudes (so
    /// that spin ½ matches the Pauli basis `(↑, ↓)`).
    pub fn projections(self) -> impl Iterator<Item = HalfInt> {
        let j = self.0;
        (0..=j).map(move |k| HalfInt(j - 2 * k))
    }

    /// Position of `m` in [`HalfInt::projections`].
    pub fn projection_index(self, m: HalfInt) -> Option<usize> {
        if m.0.abs() > self.0 || (self.0 - m.0) % 2 != 0 {
            None
        } else {
            Some(((self.0 - m.0) / 2) as usize)
        }
    }
}

impl fmt::Display for HalfInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0 % 2 == 0 {
            write!(f, "{}", self.0 / 2)
        } else {
            write!(f, "{}/2", self.0)
        }
    }
}
