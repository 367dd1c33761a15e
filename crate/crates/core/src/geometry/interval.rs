//! Rational intervals with explicit endpoint openness, and finite unions of them.
//!
//! Set operations work on "cut positions": a real `x` is split into the three
//! positions just below `x`, at `x`, and just above `x`. An interval is then a
//! closed range of positions, and union/intersection/complement reduce to
//! comparisons of positions.

use std::fmt;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::number::{display_rational, rational_max, rational_min, Rational};

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
struct Pos {
    x: Rational,
    side: i8,
}

impl Pos {
    fn successor(&self) -> Option<Pos> {
        match self.side {
            -1 => Some(Pos {
                x: self.x.clone(),
                side: 0,
            }),
            0 => Some(Pos {
                x: self.x.clone(),
                side: 1,
            }),
            _ => None,
        }
    }
}

/// An interval of the real line, possibly a single point.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Interval1D {
    lo: Rational,
    hi: Rational,
    lo_closed: bool,
    hi_closed: bool,
}

impl Interval1D {
    pub fn new(lo: Rational, hi: Rational, lo_closed: bool, hi_closed: bool) -> Result<Self> {
        if lo > hi || (lo == hi && !(lo_closed && hi_closed)) {
            return Err(Error::InvalidRegion(format!(
                "empty interval {}",
                Interval1D {
                    lo,
                    hi,
                    lo_closed,
                    hi_closed
                }
            )));
        }
        Ok(Interval1D {
            lo,
            hi,
            lo_closed,
            hi_closed,
        })
    }

    pub fn closed(lo: Rational, hi: Rational) -> Result<Self> {
        Self::new(lo, hi, true, true)
    }

    pub fn open(lo: Rational, hi: Rational) -> Result<Self> {
        Self::new(lo, hi, false, false)
    }

    pub fn point(x: Rational) -> Self {
        Interval1D {
            lo: x.clone(),
            hi: x,
            lo_closed: true,
            hi_closed: true,
        }
    }

    pub fn lo(&self) -> &Rational {
        &self.lo
    }

    pub fn hi(&self) -> &Rational {
        &self.hi
    }

    pub fn lo_closed(&self) -> bool {
        self.lo_closed
    }

    pub fn hi_closed(&self) -> bool {
        self.hi_closed
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    pub fn is_closed(&self) -> bool {
        self.lo_closed && self.hi_closed
    }

    pub fn length(&self) -> Rational {
        &self.hi - &self.lo
    }

    pub fn midpoint(&self) -> Rational {
        (&self.lo + &self.hi) / Rational::from_integer(2.into())
    }

    pub fn closure(&self) -> Interval1D {
        Interval1D {
            lo: self.lo.clone(),
            hi: self.hi.clone(),
            lo_closed: true,
            hi_closed: true,
        }
    }

    pub fn contains_point(&self, x: &Rational) -> bool {
        let above = if self.lo_closed {
            x >= &self.lo
        } else {
            x > &self.lo
        };
        let below = if self.hi_closed {
            x <= &self.hi
        } else {
            x < &self.hi
        };
        above && below
    }

    fn lo_pos(&self) -> Pos {
        Pos {
            x: self.lo.clone(),
            side: if self.lo_closed { 0 } else { 1 },
        }
    }

    fn hi_pos(&self) -> Pos {
        Pos {
            x: self.hi.clone(),
            side: if self.hi_closed { 0 } else { -1 },
        }
    }

    fn from_positions(lo: Pos, hi: Pos) -> Option<Interval1D> {
        if lo > hi {
            return None;
        }
        Some(Interval1D {
            lo: lo.x,
            hi: hi.x,
            lo_closed: lo.side == 0,
            hi_closed: hi.side == 0,
        })
    }
}

impl fmt::Display for Interval1D {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_point() {
            return write!(f, "{{{}}}", display_rational(&self.lo));
        }
        write!(
            f,
            "{}{},{}{}",
            if self.lo_closed { '[' } else { '(' },
            display_rational(&self.lo),
            display_rational(&self.hi),
            if self.hi_closed { ']' } else { ')' }
        )
    }
}

/// A finite union of intervals kept sorted, disjoint, and non-mergeable.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct IntervalSet {
    parts: Vec<Interval1D>,
}

impl IntervalSet {
    pub fn empty() -> Self {
        IntervalSet { parts: Vec::new() }
    }

    pub fn from_interval(i: Interval1D) -> Self {
        IntervalSet { parts: vec![i] }
    }

    pub fn from_intervals<I: IntoIterator<Item = Interval1D>>(items: I) -> Self {
        let mut ranges: Vec<(Pos, Pos)> = items
            .into_iter()
            .map(|i| (i.lo_pos(), i.hi_pos()))
            .collect();
        ranges.sort();
        let mut merged: Vec<(Pos, Pos)> = Vec::with_capacity(ranges.len());
        for (lo, hi) in ranges {
            if let Some(last) = merged.last_mut() {
                let joins = match last.1.successor() {
                    Some(next) => lo <= next,
                    None => lo <= last.1,
                };
                if joins {
                    if hi > last.1 {
                        last.1 = hi;
                    }
                    continue;
                }
            }
            merged.push((lo, hi));
        }
        IntervalSet {
            parts: merged
                .into_iter()
                .filter_map(|(lo, hi)| Interval1D::from_positions(lo, hi))
                .collect(),
        }
    }

    pub fn parts(&self) -> &[Interval1D] {
        &self.parts
    }

    pub fn into_parts(self) -> Vec<Interval1D> {
        self.parts
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    /// Total length; isolated points contribute nothing.
    pub fn measure(&self) -> Rational {
        self.parts
            .iter()
            .map(|p| p.length())
            .fold(Rational::zero(), |a, b| a + b)
    }

    pub fn union(&self, other: &IntervalSet) -> IntervalSet {
        IntervalSet::from_intervals(self.parts.iter().chain(other.parts.iter()).cloned())
    }

    pub fn intersection(&self, other: &IntervalSet) -> IntervalSet {
        let mut out = Vec::new();
        let (mut i, mut j) = (0, 0);
        while i < self.parts.len() && j < other.parts.len() {
            let a = &self.parts[i];
            let b = &other.parts[j];
            let lo = std::cmp::max(a.lo_pos(), b.lo_pos());
            let (a_hi, b_hi) = (a.hi_pos(), b.hi_pos());
            let hi = std::cmp::min(a_hi.clone(), b_hi.clone());
            if let Some(piece) = Interval1D::from_positions(lo, hi) {
                out.push(piece);
            }
            if a_hi <= b_hi {
                i += 1;
            } else {
                j += 1;
            }
        }
        IntervalSet::from_intervals(out)
    }

    /// Points of `within` not in `self`.
    pub fn complement_within(&self, within: &Interval1D) -> IntervalSet {
        let mut out = Vec::new();
        let mut cursor = Some(within.lo_pos());
        let end = within.hi_pos();
        for part in &self.parts {
            let Some(start) = cursor.clone() else { break };
            let gap_hi = match part.lo_pos() {
                Pos { x, side: 0 } => Pos { x, side: -1 },
                Pos { x, .. } => Pos { x, side: 0 },
            };
            let gap_hi = std::cmp::min(gap_hi, end.clone());
            if let Some(g) = Interval1D::from_positions(start.clone(), gap_hi) {
                out.push(g);
            }
            let after = match part.hi_pos() {
                Pos { x, side: 0 } => Pos { x, side: 1 },
                Pos { x, .. } => Pos { x, side: 0 },
            };
            cursor = Some(std::cmp::max(start, after));
        }
        if let Some(start) = cursor {
            if let Some(g) = Interval1D::from_positions(start, end) {
                out.push(g);
            }
        }
        IntervalSet::from_intervals(out)
    }

    pub fn difference(&self, other: &IntervalSet) -> IntervalSet {
        let Some(h) = self.hull() else {
            return IntervalSet::empty();
        };
        self.intersection(&other.complement_within(&h.closure()))
    }

    pub fn symmetric_difference(&self, other: &IntervalSet) -> IntervalSet {
        self.difference(other).union(&other.difference(self))
    }

    pub fn contains_set(&self, other: &IntervalSet) -> bool {
        other.difference(self).is_empty()
    }

    pub fn intersects(&self, other: &IntervalSet) -> bool {
        !self.intersection(other).is_empty()
    }

    pub fn contains_point(&self, x: &Rational) -> bool {
        self.parts.iter().any(|p| p.contains_point(x))
    }

    /// Smallest interval containing the set, keeping the outer openness flags.
    pub fn hull(&self) -> Option<Interval1D> {
        let first = self.parts.first()?;
        let last = self.parts.last()?;
        Some(Interval1D {
            lo: first.lo.clone(),
            hi: last.hi.clone(),
            lo_closed: first.lo_closed,
            hi_closed: last.hi_closed,
        })
    }

    pub fn closure(&self) -> IntervalSet {
        IntervalSet::from_intervals(self.parts.iter().map(|p| p.closure()))
    }

    /// Infimum distance between two nonempty sets (0 if they touch).
    pub fn gap(&self, other: &IntervalSet) -> Rational {
        let mut best: Option<Rational> = None;
        for a in &self.parts {
            for b in &other.parts {
                let d = if b.lo >= a.hi {
                    &b.lo - &a.hi
                } else if a.lo >= b.hi {
                    &a.lo - &b.hi
                } else {
                    Rational::zero()
                };
                best = Some(match best {
                    Some(x) => rational_min(&x, &d),
                    None => d,
                });
            }
        }
        best.unwrap_or_else(Rational::zero)
    }

    /// Removes isolated points (null sets for length).
    pub fn without_points(&self) -> IntervalSet {
        IntervalSet {
            parts: self
                .parts
                .iter()
                .filter(|p| !p.is_point())
                .cloned()
                .collect(),
        }
    }

    pub fn max_gap_between_parts(&self) -> Rational {
        self.parts
            .windows(2)
            .map(|w| &w[1].lo - &w[0].hi)
            .fold(Rational::zero(), |a, b| rational_max(&a, &b))
    }
}

impl fmt::Display for IntervalSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.parts.is_empty() {
            return write!(f, "{{}}");
        }
        let texts: Vec<String> = self.parts.iter().map(|p| p.to_string()).collect();
        write!(f, "{}", texts.join(" u "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::number::{int, rat};

    fn iv(lo: Rational, hi: Rational, lc: bool, hc: bool) -> Interval1D {
        Interval1D::new(lo, hi, lc, hc).unwrap()
    }

    #[test]
    fn rejects_empty_intervals() {
        assert!(Interval1D::new(int(1), int(0), true, true).is_err());
        assert!(Interval1D::new(int(1), int(1), true, false).is_err());
        assert!(Interval1D::new(int(1), int(1), true, true).is_ok());
    }

    #[test]
    fn length_of_sixth_to_half() {
        assert_eq!(
            Interval1D::closed(rat(1, 6), rat(1, 2)).unwrap().length(),
            rat(1, 3)
        );
    }

    #[test]
    fn half_open_touching_intervals_do_not_intersect() {
        let a = IntervalSet::from_interval(iv(int(0), rat(1, 2), true, false));
        let b = IntervalSet::from_interval(Interval1D::closed(rat(1, 2), int(1)).unwrap());
        assert!(!a.intersects(&b));
        assert_eq!(a.union(&b).parts().len(), 1);
        assert_eq!(
            a.union(&b).parts()[0],
            Interval1D::closed(int(0), int(1)).unwrap()
        );
    }

    #[test]
    fn open_touching_intervals_stay_apart() {
        let a = iv(int(0), rat(1, 2), true, false);
        let b = iv(rat(1, 2), int(1), false, true);
        let u = IntervalSet::from_intervals([a, b]);
        assert_eq!(u.parts().len(), 2);
        assert!(!u.contains_point(&rat(1, 2)));
        assert_eq!(u.measure(), int(1));
    }

    #[test]
    fn complement_and_difference() {
        let a = IntervalSet::from_interval(Interval1D::closed(int(0), int(4)).unwrap());
        let b = IntervalSet::from_interval(iv(int(1), int(2), false, true));
        let d = a.difference(&b);
        assert_eq!(d.to_string(), "[0,1] u (2,4]");
        let sym = IntervalSet::from_interval(iv(int(0), rat(1, 2), true, false))
            .symmetric_difference(&IntervalSet::from_interval(
                Interval1D::closed(int(0), rat(1, 2)).unwrap(),
            ));
        assert_eq!(sym.to_string(), "{1/2}");
        assert_eq!(sym.measure(), int(0));
    }

    #[test]
    fn gap_between_moving_intervals() {
        let l = rat(1, 4);
        let a = IntervalSet::from_interval(Interval1D::open(l.clone(), rat(2, 3) - &l).unwrap());
        let b = IntervalSet::from_interval(Interval1D::open(rat(1, 3) + &l, int(1) - &l).unwrap());
        assert_eq!(a.gap(&b), rat(1, 6));
    }

    #[test]
    fn containment() {
        let outer = IntervalSet::from_interval(Interval1D::closed(int(0), int(1)).unwrap());
        let inner = IntervalSet::from_interval(Interval1D::closed(rat(1, 6), rat(1, 2)).unwrap());
        assert!(outer.contains_set(&inner));
        assert!(!inner.contains_set(&outer));
        let open = IntervalSet::from_interval(Interval1D::open(int(0), int(1)).unwrap());
        assert!(!open.contains_set(&outer));
        assert!(outer.contains_set(&open));
    }
}
