//! Closed intervals of nonnegative reals with outward rounding.

use std::ops::{Add, Div, Mul};

use serde::{Deserialize, Serialize};

/// Relative widening applied after every floating-point operation.
const ROUND: f64 = 16.0 * f64::EPSILON;

/// An enclosure `[lo, hi]` of a nonnegative quantity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bracket {
    pub lo: f64,
    pub hi: f64,
}

impl Bracket {
    pub const ZERO: Bracket = Bracket { lo: 0.0, hi: 0.0 };
    pub const ONE: Bracket = Bracket { lo: 1.0, hi: 1.0 };

    pub fn new(lo: f64, hi: f64) -> Self {
        debug_assert!(lo <= hi, "inverted bracket [{lo}, {hi}]");
        Bracket { lo, hi }
    }

    pub fn point(x: f64) -> Self {
        Bracket { lo: x, hi: x }
    }

    /// Encloses a value computed with a few roundings.
    pub fn around(x: f64) -> Self {
        Bracket { lo: x * (1.0 - ROUND), hi: x * (1.0 + ROUND) }
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn mid(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn overlaps(&self, other: &Bracket) -> bool {
        self.lo <= other.hi && other.lo <= self.hi
    }

    pub fn intersect(&self, other: &Bracket) -> Option<Bracket> {
        let lo = self.lo.max(other.lo);
        let hi = self.hi.min(other.hi);
        (lo <= hi).then_some(Bracket { lo, hi })
    }

    pub fn clamp_unit(self) -> Bracket {
        Bracket { lo: self.lo.clamp(0.0, 1.0), hi: self.hi.clamp(0.0, 1.0) }
    }

    pub fn scale(self, k: f64) -> Bracket {
        debug_assert!(k >= 0.0);
        Bracket { lo: self.lo * k * (1.0 - ROUND), hi: self.hi * k * (1.0 + ROUND) }
    }
}

impl Add for Bracket {
    type Output = Bracket;

    fn add(self, rhs: Bracket) -> Bracket {
        Bracket { lo: (self.lo + rhs.lo) * (1.0 - ROUND), hi: (self.hi + rhs.hi) * (1.0 + ROUND) }
    }
}

impl Mul for Bracket {
    type Output = Bracket;

    fn mul(self, rhs: Bracket) -> Bracket {
        Bracket { lo: self.lo * rhs.lo * (1.0 - ROUND), hi: self.hi * rhs.hi * (1.0 + ROUND) }
    }
}

impl Div for Bracket {
    type Output = Bracket;

    /// Requires `rhs.lo > 0`.
    fn div(self, rhs: Bracket) -> Bracket {
        debug_assert!(rhs.lo > 0.0);
        Bracket { lo: self.lo / rhs.hi * (1.0 - ROUND), hi: self.hi / rhs.lo * (1.0 + ROUND) }
    }
}

impl std::iter::Sum for Bracket {
    fn sum<I: Iterator<Item = Bracket>>(iter: I) -> Bracket {
        iter.fold(Bracket::ZERO, |a, b| a + b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arithmetic_encloses() {
        let a = Bracket::around(0.1);
        let b = Bracket::around(0.2);
        assert!((a + b).contains(0.30000000000000004));
        assert!((a + b).contains(0.3));
        let q = Bracket::around(3.0) / Bracket::around(7.0);
        assert!(q.contains(3.0 / 7.0));
        assert!(Bracket::new(0.0, 1.0).overlaps(&Bracket::point(1.0)));
        assert!(!Bracket::new(0.0, 0.5).overlaps(&Bracket::new(0.6, 0.7)));
    }
}
