use std::fmt;
use std::ops::Sub;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

/// Closed interval `[lo, hi]`.
///
/// Only ordering and subtraction are required, so exact types such as
/// rationals work as well as floats.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Interval<T> {
    pub lo: T,
    pub hi: T,
}

impl<T> Interval<T>
where
    T: Copy + PartialOrd + Sub<Output = T> + Zero,
{
    /// Builds `[lo, hi]`, swapping the bounds if they arrive reversed.
    pub fn new(lo: T, hi: T) -> Self {
        if hi < lo {
            Interval { lo: hi, hi: lo }
        } else {
            Interval { lo, hi }
        }
    }

    pub fn point(x: T) -> Self {
        Interval { lo: x, hi: x }
    }

    pub fn contains(&self, x: T) -> bool {
        self.lo <= x && x <= self.hi
    }

    /// Distance from `x` to the nearest point of the interval; zero inside.
    pub fn distance(&self, x: T) -> T {
        if x < self.lo {
            self.lo - x
        } else if x > self.hi {
            x - self.hi
        } else {
            T::zero()
        }
    }

    /// Gap between two intervals; zero when they intersect.
    pub fn gap(&self, other: &Self) -> T {
        if other.lo > self.hi {
            other.lo - self.hi
        } else if self.lo > other.hi {
            self.lo - other.hi
        } else {
            T::zero()
        }
    }

    pub fn overlaps(&self, other: &Self) -> bool {
        self.lo <= other.hi && other.lo <= self.hi
    }

    pub fn hull(&self, other: &Self) -> Self {
        let lo = if other.lo < self.lo { other.lo } else { self.lo };
        let hi = if other.hi > self.hi { other.hi } else { self.hi };
        Interval { lo, hi }
    }

    pub fn width(&self) -> T {
        self.hi - self.lo
    }
}

impl<T: fmt::Display> fmt::Display for Interval<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}
