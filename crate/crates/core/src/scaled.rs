//! Exact fixed-denominator arithmetic.

use std::cmp::Ordering;
use std::fmt;
use std::ops::Add;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `num / 2^sigma` with an `i128` numerator. Values with different scales are
/// aligned to the larger scale before combining; every overflow is an error.
#[derive(Clone, Copy, Debug, Default, Serialize, Deserialize)]
pub struct ScaledRational {
    pub num: i128,
    pub sigma: u32,
}

impl ScaledRational {
    pub const fn new(num: i128, sigma: u32) -> Self {
        Self { num, sigma }
    }

    pub const fn zero(sigma: u32) -> Self {
        Self { num: 0, sigma }
    }

    pub const fn integer(v: i64) -> Self {
        Self { num: v as i128, sigma: 0 }
    }

    /// Rescales to `sigma >= self.sigma`.
    pub fn rescale(self, sigma: u32) -> Result<Self> {
        if sigma < self.sigma {
            return Err(Error::Overflow(format!("cannot lower scale {} to {sigma}", self.sigma)));
        }
        let shift = sigma - self.sigma;
        if self.num == 0 {
            return Ok(Self::zero(sigma));
        }
        if shift >= 127 || self.num.unsigned_abs().leading_zeros() <= shift {
            return Err(Error::Overflow(format!("rescaling {self} to 2^-{sigma}")));
        }
        Ok(Self { num: self.num << shift, sigma })
    }

    fn aligned(self, other: Self) -> Result<(i128, i128, u32)> {
        let s = self.sigma.max(other.sigma);
        Ok((self.rescale(s)?.num, other.rescale(s)?.num, s))
    }

    pub fn checked_add(self, other: Self) -> Result<Self> {
        let (a, b, s) = self.aligned(other)?;
        a.checked_add(b)
            .map(|num| Self { num, sigma: s })
            .ok_or_else(|| Error::Overflow(format!("{self} + {other}")))
    }

    pub fn checked_sub(self, other: Self) -> Result<Self> {
        let (a, b, s) = self.aligned(other)?;
        a.checked_sub(b)
            .map(|num| Self { num, sigma: s })
            .ok_or_else(|| Error::Overflow(format!("{self} - {other}")))
    }

    /// Squares the value; the scale doubles.
    pub fn checked_square(self) -> Result<Self> {
        self.num
            .checked_mul(self.num)
            .map(|num| Self { num, sigma: self.sigma * 2 })
            .ok_or_else(|| Error::Overflow(format!("({self})^2")))
    }

    pub fn checked_mul_int(self, k: i128) -> Result<Self> {
        self.num
            .checked_mul(k)
            .map(|num| Self { num, sigma: self.sigma })
            .ok_or_else(|| Error::Overflow(format!("{self} * {k}")))
    }

    pub fn is_negative(self) -> bool {
        self.num < 0
    }

    pub fn to_f64(self) -> f64 {
        self.num as f64 / 2f64.powi(self.sigma as i32)
    }
}

impl PartialEq for ScaledRational {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for ScaledRational {}

impl PartialOrd for ScaledRational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ScaledRational {
    fn cmp(&self, other: &Self) -> Ordering {
        if self.sigma == other.sigma {
            return self.num.cmp(&other.num);
        }
        match self.aligned(*other) {
            Ok((a, b, _)) => a.cmp(&b),
            // An alignment overflow means the lower-scale value is huge in
            // magnitude; its sign decides.
            Err(_) => {
                let (big, flip) = if self.sigma < other.sigma { (self.num, false) } else { (other.num, true) };
                let ord = if big > 0 { Ordering::Greater } else { Ordering::Less };
                if flip {
                    ord.reverse()
                } else {
                    ord
                }
            }
        }
    }
}

impl fmt::Display for ScaledRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/2^{}", self.num, self.sigma)
    }
}

/// Path multiplicity that saturates at `2^63` instead of overflowing.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PathCount {
    pub value: u64,
    pub saturated: bool,
}

impl PathCount {
    pub const LIMIT: u64 = 1 << 63;
    pub const ZERO: PathCount = PathCount { value: 0, saturated: false };
    pub const ONE: PathCount = PathCount { value: 1, saturated: false };

    pub fn is_unique(self) -> bool {
        self.value == 1 && !self.saturated
    }
}

impl Add for PathCount {
    type Output = PathCount;
    fn add(self, rhs: PathCount) -> PathCount {
        let sum = self.value.saturating_add(rhs.value);
        if sum >= Self::LIMIT || self.saturated || rhs.saturated {
            PathCount { value: sum.min(Self::LIMIT), saturated: true }
        } else {
            PathCount { value: sum, saturated: false }
        }
    }
}

impl fmt::Display for PathCount {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.saturated {
            write!(f, ">={}", self.value)
        } else {
            write!(f, "{}", self.value)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn square_doubles_scale() {
        let e = ScaledRational::new(3 << 31, 32); // 1.5
        let sq = e.checked_square().unwrap();
        assert_eq!(sq.sigma, 64);
        assert_eq!(sq, ScaledRational::new(9, 2)); // 2.25
    }

    #[test]
    fn overflow_is_an_error() {
        let big = ScaledRational::new(i128::MAX / 2 + 1, 0);
        assert!(big.checked_add(big).is_err());
        assert!(big.checked_square().is_err());
        assert!(ScaledRational::new(1 << 100, 0).rescale(64).is_err());
    }

    #[test]
    fn compare_across_scales() {
        assert!(ScaledRational::new(1, 0) > ScaledRational::new(1, 1));
        assert_eq!(ScaledRational::new(2, 1), ScaledRational::new(1, 0));
        assert!(ScaledRational::new(1 << 100, 0) > ScaledRational::new(5, 64));
        assert!(ScaledRational::new(-(1 << 100), 0) < ScaledRational::new(5, 64));
    }

    #[test]
    fn path_count_saturates() {
        let half = PathCount { value: 1 << 62, saturated: false };
        let s = half + half;
        assert!(s.saturated);
        assert_eq!(s.value, PathCount::LIMIT);
        assert!(!(half + PathCount::ONE).saturated);
        assert!(PathCount::ONE.is_unique());
        assert!(!(PathCount::ONE + PathCount::ONE).is_unique());
    }

    proptest! {
        #[test]
        fn add_matches_integer_sum(a in -(1i64 << 40)..(1i64 << 40), b in -(1i64 << 40)..(1i64 << 40), s1 in 0u32..20, s2 in 0u32..20) {
            let x = ScaledRational::new(a as i128, s1);
            let y = ScaledRational::new(b as i128, s2);
            let z = x.checked_add(y).unwrap();
            let s = s1.max(s2);
            prop_assert_eq!(z.num, ((a as i128) << (s - s1)) + ((b as i128) << (s - s2)));
            prop_assert_eq!(z.checked_sub(y).unwrap(), x);
            prop_assert_eq!(x.cmp(&y), (a as f64 / 2f64.powi(s1 as i32)).partial_cmp(&(b as f64 / 2f64.powi(s2 as i32))).unwrap());
        }
    }
}
