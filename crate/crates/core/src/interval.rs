//! Certified comparisons.
//!
//! Floating-point quantities that feed a verdict are carried either as exact
//! rationals (every finite `f64` is a dyadic rational) or as closed enclosures
//! `[lo, hi]`. A comparison whose enclosures overlap is reported as undecided
//! instead of being rounded to a guess.

use std::cmp::Ordering;
use std::f64::consts::{PI, TAU};
use std::fmt;

use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

/// Default half-width applied to angle enclosures.
pub const DEFAULT_EPS: f64 = 1e-12;

/// Three-valued outcome of a certified predicate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Decision {
    True,
    False,
    Indeterminate,
}

impl Decision {
    pub fn from_bool(b: bool) -> Self {
        if b {
            Decision::True
        } else {
            Decision::False
        }
    }

    /// `Some(b)` when decided.
    pub fn known(self) -> Option<bool> {
        match self {
            Decision::True => Some(true),
            Decision::False => Some(false),
            Decision::Indeterminate => None,
        }
    }

    pub fn is_true(self) -> bool {
        self == Decision::True
    }

    pub fn is_false(self) -> bool {
        self == Decision::False
    }
}

impl fmt::Display for Decision {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Decision::True => "true",
            Decision::False => "false",
            Decision::Indeterminate => "indeterminate",
        };
        f.write_str(s)
    }
}

/// Closed interval `[lo, hi]` of reals with `f64` endpoints.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Self {
        debug_assert!(lo <= hi, "inverted interval [{lo}, {hi}]");
        Interval { lo, hi }
    }

    pub fn point(x: f64) -> Self {
        Interval { lo: x, hi: x }
    }

    /// `[x - w, x + w]`, rounded outward.
    pub fn around(x: f64, w: f64) -> Self {
        Interval {
            lo: (x - w).next_down(),
            hi: (x + w).next_up(),
        }
    }

    /// Enclosure of pi.
    pub fn pi() -> Self {
        Interval::new(PI, PI.next_up())
    }

    /// Enclosure of 2 pi.
    pub fn tau() -> Self {
        Interval::new(TAU, TAU.next_up())
    }

    pub fn abs(self) -> Self {
        if self.lo >= 0.0 {
            self
        } else if self.hi <= 0.0 {
            Interval::new(-self.hi, -self.lo)
        } else {
            Interval::new(0.0, self.hi.max(-self.lo))
        }
    }

    pub fn hull(self, other: Interval) -> Self {
        Interval::new(self.lo.min(other.lo), self.hi.max(other.hi))
    }

    pub fn contains(self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn mid(self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn width(self) -> f64 {
        self.hi - self.lo
    }

    /// Certified ordering: `None` when the intervals overlap.
    pub fn compare(self, other: Interval) -> Option<Ordering> {
        if self.hi < other.lo {
            Some(Ordering::Less)
        } else if self.lo > other.hi {
            Some(Ordering::Greater)
        } else {
            None
        }
    }
}

/// Exact rational value of a finite float.
pub fn rational(x: f64) -> BigRational {
    BigRational::from_float(x).expect("finite float")
}

/// Nearest `f64` to a rational.
pub fn rational_to_f64(x: &BigRational) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// A nonnegative length known exactly, as an exact square root, or through an enclosure.
#[derive(Debug, Clone, PartialEq)]
pub enum Length {
    Exact(BigRational),
    /// The square root of a nonnegative rational.
    Sqrt(BigRational),
    Bounded(Interval),
}

impl Length {
    pub fn zero() -> Self {
        Length::Exact(BigRational::zero())
    }

    /// Certified comparison of the length with a rational `t`.
    pub fn compare(&self, t: &BigRational) -> Option<Ordering> {
        match self {
            Length::Exact(v) => Some(v.cmp(t)),
            Length::Sqrt(s) => {
                if t.is_negative() {
                    Some(Ordering::Greater)
                } else {
                    Some(s.cmp(&(t * t)))
                }
            }
            Length::Bounded(iv) => {
                if rational(iv.hi) < *t {
                    Some(Ordering::Less)
                } else if rational(iv.lo) > *t {
                    Some(Ordering::Greater)
                } else {
                    None
                }
            }
        }
    }

    /// Certified comparison of two lengths.
    pub fn compare_length(&self, other: &Length) -> Option<Ordering> {
        match (self, other) {
            (_, Length::Exact(v)) => self.compare(v),
            (Length::Exact(v), _) => other.compare(v).map(Ordering::reverse),
            (Length::Sqrt(a), Length::Sqrt(b)) => Some(a.cmp(b)),
            _ => self.enclosure().compare(other.enclosure()),
        }
    }

    pub fn is_exact(&self) -> bool {
        !matches!(self, Length::Bounded(_))
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Length::Exact(v) => rational_to_f64(v),
            Length::Sqrt(s) => rational_to_f64(s).sqrt(),
            Length::Bounded(iv) => iv.mid(),
        }
    }

    /// An `f64` enclosure of the length.
    pub fn enclosure(&self) -> Interval {
        match self {
            Length::Bounded(iv) => *iv,
            _ => {
                let v = self.to_f64();
                let slack = v.abs() * 4.0 * f64::EPSILON;
                Interval::new((v - slack).max(0.0), v + slack)
            }
        }
    }
}

impl fmt::Display for Length {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Length::Exact(v) => write!(f, "{} (exact)", rational_to_f64(v)),
            Length::Sqrt(s) => write!(f, "sqrt({}) (exact)", rational_to_f64(s)),
            Length::Bounded(iv) => write!(f, "[{}, {}]", iv.lo, iv.hi),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pi_enclosure_is_tight_and_correct() {
        let pi = Interval::pi();
        assert!(pi.lo < pi.hi);
        // 3.14159265358979323846... lies strictly between the two neighbours.
        assert_eq!(pi.lo, std::f64::consts::PI);
        assert!(pi.hi > std::f64::consts::PI);
    }

    #[test]
    fn overlapping_intervals_do_not_compare() {
        let a = Interval::new(0.0, 1.0);
        let b = Interval::new(0.5, 2.0);
        assert_eq!(a.compare(b), None);
        assert_eq!(a.compare(Interval::new(1.5, 2.0)), Some(Ordering::Less));
    }

    #[test]
    fn rational_roundtrip() {
        for x in [0.0, 1.0, -2.5, 1e-300, 123456.789, std::f64::consts::PI] {
            assert_eq!(rational_to_f64(&rational(x)), x);
        }
        let third = BigRational::new(1.into(), 3.into());
        assert_eq!(rational_to_f64(&third), 1.0 / 3.0);
    }

    #[test]
    fn exact_length_comparisons() {
        let two = rational(2.0);
        assert_eq!(Length::Exact(rational(1.0) + rational(1.0)).compare(&two), Some(Ordering::Equal));
        assert_eq!(Length::Sqrt(rational(4.0)).compare(&two), Some(Ordering::Equal));
        assert_eq!(Length::Sqrt(rational(2.0)).compare(&rational(1.5)), Some(Ordering::Less));
        assert_eq!(Length::Bounded(Interval::around(2.0, 1e-12)).compare(&two), None);
    }
}
