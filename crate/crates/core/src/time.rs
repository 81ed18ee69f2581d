//! Exact non-negative time values on the half-integer grid.

use std::fmt;
use std::str::FromStr;

/// A non-negative multiple of 1/2, stored as a count of half-units.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HalfInt(u32);

impl HalfInt {
    pub const ZERO: HalfInt = HalfInt(0);
    /// Grid step used for delays and valuations.
    pub const STEP: HalfInt = HalfInt(1);

    pub const fn from_halves(halves: u32) -> Self {
        HalfInt(halves)
    }

    pub const fn from_int(value: u32) -> Self {
        HalfInt(value * 2)
    }

    pub const fn halves(self) -> u32 {
        self.0
    }

    /// Values in `[0, upper]` on the grid, ascending.
    pub fn grid_up_to(upper: HalfInt) -> impl Iterator<Item = HalfInt> {
        (0..=upper.0).map(HalfInt)
    }
}

impl std::ops::Add for HalfInt {
    type Output = HalfInt;
    fn add(self, rhs: HalfInt) -> HalfInt {
        HalfInt(self.0 + rhs.0)
    }
}

impl fmt::Display for HalfInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_multiple_of(2) {
            write!(f, "{}", self.0 / 2)
        } else {
            write!(f, "{}/2", self.0)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("not a non-negative half-integer: {0:?}")]
pub struct ParseHalfIntError(String);

impl FromStr for HalfInt {
    type Err = ParseHalfIntError;

    /// Accepts `3`, `3/2`, `1.5`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || ParseHalfIntError(s.to_string());
        let s = s.trim();
        if let Some((num, den)) = s.split_once('/') {
            let num: u32 = num.trim().parse().map_err(|_| err())?;
            return match den.trim() {
                "2" => Ok(HalfInt(num)),
                "1" => Ok(HalfInt::from_int(num)),
                _ => Err(err()),
            };
        }
        if let Some((int, frac)) = s.split_once('.') {
            let int: u32 = int.parse().map_err(|_| err())?;
            return match frac.trim_end_matches('0') {
                "" => Ok(HalfInt::from_int(int)),
                "5" => Ok(HalfInt(int * 2 + 1)),
                _ => Err(err()),
            };
        }
        s.parse::<u32>().map(HalfInt::from_int).map_err(|_| err())
    }
}
