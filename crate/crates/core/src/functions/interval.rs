use std::fmt;

/// A real interval with open/closed endpoints; endpoints may be infinite
/// (infinite endpoints are always open).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
    pub lo_closed: bool,
    pub hi_closed: bool,
}

impl Interval {
    pub fn new(lo: f64, hi: f64, lo_closed: bool, hi_closed: bool) -> Self {
        Self {
            lo,
            hi,
            lo_closed: lo_closed && lo.is_finite(),
            hi_closed: hi_closed && hi.is_finite(),
        }
    }

    pub fn real_line() -> Self {
        Self::new(f64::NEG_INFINITY, f64::INFINITY, false, false)
    }

    /// `[0, ∞)`
    pub fn non_negative() -> Self {
        Self::new(0.0, f64::INFINITY, true, false)
    }

    /// `(0, ∞)`
    pub fn positive_open() -> Self {
        Self::new(0.0, f64::INFINITY, false, false)
    }

    pub fn closed(lo: f64, hi: f64) -> Self {
        Self::new(lo, hi, true, true)
    }

    pub fn contains(&self, t: f64) -> bool {
        let above = if self.lo_closed { t >= self.lo } else { t > self.lo };
        let below = if self.hi_closed { t <= self.hi } else { t < self.hi };
        above && below
    }

    /// Returns `t` if it is inside, the nearest closed endpoint if `t` misses
    /// it by at most `slack`, and `None` otherwise.
    pub fn admit(&self, t: f64, slack: f64) -> Option<f64> {
        if self.contains(t) {
            Some(t)
        } else if self.lo_closed && t < self.lo && self.lo - t <= slack {
            Some(self.lo)
        } else if self.hi_closed && t > self.hi && t - self.hi <= slack {
            Some(self.hi)
        } else {
            None
        }
    }

    /// `{t + c : t ∈ self}`
    pub fn shifted(&self, c: f64) -> Self {
        Self::new(self.lo + c, self.hi + c, self.lo_closed, self.hi_closed)
    }

    /// `{c − t : t ∈ self}`
    pub fn reflected(&self, c: f64) -> Self {
        Self::new(c - self.hi, c - self.lo, self.hi_closed, self.lo_closed)
    }

    /// Common part of two intervals, `None` when empty.
    pub fn intersect(&self, other: &Interval) -> Option<Interval> {
        let (lo, lo_closed) = if self.lo > other.lo {
            (self.lo, self.lo_closed)
        } else if other.lo > self.lo {
            (other.lo, other.lo_closed)
        } else {
            (self.lo, self.lo_closed && other.lo_closed)
        };
        let (hi, hi_closed) = if self.hi < other.hi {
            (self.hi, self.hi_closed)
        } else if other.hi < self.hi {
            (other.hi, other.hi_closed)
        } else {
            (self.hi, self.hi_closed && other.hi_closed)
        };
        let out = Interval::new(lo, hi, lo_closed, hi_closed);
        let nonempty = lo < hi || (lo == hi && out.lo_closed && out.hi_closed);
        nonempty.then_some(out)
    }

    pub fn is_subset_of(&self, other: &Interval) -> bool {
        let lo_ok = self.lo > other.lo
            || (self.lo == other.lo && (other.lo_closed || !self.lo_closed));
        let hi_ok = self.hi < other.hi
            || (self.hi == other.hi && (other.hi_closed || !self.hi_closed));
        lo_ok && hi_ok
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let open = if self.lo_closed { '[' } else { '(' };
        let close = if self.hi_closed { ']' } else { ')' };
        write!(f, "{open}{}, {}{close}", self.lo, self.hi)
    }
}
