//! Intervals over the rationals with independently open or closed ends.

use std::fmt;

use serde::Serialize;

use crate::rational::Rational;

/// A possibly-empty interval. Emptiness is tracked explicitly so that
/// degenerate constructions (an open interval with equal ends, a window too
/// narrow to certify) have a single canonical representation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Interval {
    empty: bool,
    lo: Rational,
    hi: Rational,
    lo_open: bool,
    hi_open: bool,
}

impl Interval {
    pub fn empty() -> Interval {
        Interval {
            empty: true,
            lo: Rational::zero(),
            hi: Rational::zero(),
            lo_open: true,
            hi_open: true,
        }
    }

    /// Open interval `(lo, hi)`; empty unless `lo < hi`.
    pub fn open(lo: Rational, hi: Rational) -> Interval {
        if lo >= hi {
            return Interval::empty();
        }
        Interval {
            empty: false,
            lo,
            hi,
            lo_open: true,
            hi_open: true,
        }
    }

    /// Closed interval `[lo, hi]`; empty unless `lo <= hi`.
    pub fn closed(lo: Rational, hi: Rational) -> Interval {
        if lo > hi {
            return Interval::empty();
        }
        Interval {
            empty: false,
            lo,
            hi,
            lo_open: false,
            hi_open: false,
        }
    }

    pub fn point(x: Rational) -> Interval {
        Interval::closed(x.clone(), x)
    }

    pub fn is_empty(&self) -> bool {
        self.empty
    }

    pub fn lo(&self) -> Option<&Rational> {
        (!self.empty).then_some(&self.lo)
    }

    pub fn hi(&self) -> Option<&Rational> {
        (!self.empty).then_some(&self.hi)
    }

    pub fn width(&self) -> Rational {
        if self.empty {
            Rational::zero()
        } else {
            &self.hi - &self.lo
        }
    }

    pub fn contains(&self, x: &Rational) -> bool {
        if self.empty {
            return false;
        }
        let lo_ok = if self.lo_open { *x > self.lo } else { *x >= self.lo };
        let hi_ok = if self.hi_open { *x < self.hi } else { *x <= self.hi };
        lo_ok && hi_ok
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.empty {
            return write!(f, "empty");
        }
        let open = if self.lo_open { '(' } else { '[' };
        let close = if self.hi_open { ')' } else { ']' };
        write!(f, "{}{}, {}{}", open, self.lo, self.hi, close)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(s: &str) -> Rational {
        s.parse().unwrap()
    }

    #[test]
    fn degenerate_intervals_collapse_to_empty() {
        assert!(Interval::open(r("1"), r("1")).is_empty());
        assert!(Interval::open(r("2"), r("1")).is_empty());
        assert!(!Interval::closed(r("1"), r("1")).is_empty());
        assert!(Interval::closed(r("2"), r("1")).is_empty());
        assert!(Interval::empty().is_empty());
    }

    #[test]
    fn membership_respects_end_openness() {
        let open = Interval::open(r("0"), r("1"));
        assert!(!open.contains(&r("0")));
        assert!(open.contains(&r("1/2")));
        assert!(!open.contains(&r("1")));

        let closed = Interval::closed(r("0"), r("1"));
        assert!(closed.contains(&r("0")));
        assert!(closed.contains(&r("1")));
        assert!(!closed.contains(&r("-1/10")));

        assert!(Interval::point(r("3/2")).contains(&r("3/2")));
        assert!(!Interval::empty().contains(&r("0")));
    }

    #[test]
    fn width_and_display() {
        let i = Interval::open(r("1/2"), r("2"));
        assert_eq!(i.width(), r("3/2"));
        assert_eq!(i.to_string(), "(1/2, 2)");
        assert_eq!(Interval::closed(r("0"), r("1")).to_string(), "[0, 1]");
        assert_eq!(Interval::empty().to_string(), "empty");
        assert_eq!(Interval::empty().width(), Rational::zero());
    }
}
