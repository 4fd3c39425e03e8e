// Copyright 2026 the ivdl Authors
// SPDX-License-Identifier: Apache-2.0

//! Interval-values: finite unions of half-open dyadic intervals in `[0, 1)`.
//!
//! An [`IntervalValue`] always holds its components sorted, non-empty and
//! pairwise non-adjacent, so two values denote the same point set iff they are
//! structurally equal. Every operation re-establishes that form.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::dyadic::{Dyadic, DyadicError};

/// Default cap on the number of components a single value may hold.
pub const DEFAULT_COMPONENT_LIMIT: usize = 1 << 24;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum IvError {
    #[error("malformed component [{lo}, {hi})")]
    MalformedComponent { lo: Dyadic, hi: Dyadic },
    #[error("point {0} is outside [0, 1)")]
    PointOutOfRange(Dyadic),
    #[error("value would need {needed} components, limit is {limit}")]
    ResourceLimit { needed: usize, limit: usize },
    #[error("cannot parse interval-value: {0}")]
    Syntax(String),
    #[error(transparent)]
    Dyadic(#[from] DyadicError),
}

/// A half-open interval `[lo, hi)` with `lo < hi`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Component {
    pub lo: Dyadic,
    pub hi: Dyadic,
}

impl Component {
    pub fn len(&self) -> Dyadic {
        self.hi.checked_sub(&self.lo).expect("lo < hi")
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct IntervalValue {
    components: Vec<Component>,
}

/// Appends `[lo, hi)` to a sorted run, merging with the last component when
/// they touch or overlap. Empty intervals are skipped.
fn push_merged(out: &mut Vec<Component>, lo: Dyadic, hi: Dyadic) {
    if lo >= hi {
        return;
    }
    if let Some(last) = out.last_mut() {
        if lo <= last.hi {
            if hi > last.hi {
                last.hi = hi;
            }
            return;
        }
    }
    out.push(Component { lo, hi });
}

impl IntervalValue {
    pub fn empty() -> Self {
        IntervalValue { components: Vec::new() }
    }

    /// `[0, 1)`.
    pub fn full() -> Self {
        IntervalValue { components: vec![Component { lo: Dyadic::zero(), hi: Dyadic::one() }] }
    }

    /// `[0, 1/2)`.
    pub fn first_half() -> Self {
        IntervalValue { components: vec![Component { lo: Dyadic::zero(), hi: Dyadic::half() }] }
    }

    /// Builds the canonical value for an arbitrary list of `[lo, hi)` pairs.
    /// Pairs with `lo == hi` are dropped.
    pub fn normalize<I>(raw: I) -> Result<Self, IvError>
    where
        I: IntoIterator<Item = (Dyadic, Dyadic)>,
    {
        let one = Dyadic::one();
        let mut pairs = Vec::new();
        for (lo, hi) in raw {
            if lo > hi || hi > one {
                return Err(IvError::MalformedComponent { lo, hi });
            }
            if lo < hi {
                pairs.push((lo, hi));
            }
        }
        pairs.sort_by(|a, b| a.0.cmp(&b.0));
        let mut components = Vec::with_capacity(pairs.len());
        for (lo, hi) in pairs {
            push_merged(&mut components, lo, hi);
        }
        Ok(IntervalValue { components })
    }

    /// The union of grid cells `[l/2^m, (l+1)/2^m)` for the given indices.
    pub fn from_cells<I>(m: u64, cells: I) -> Result<Self, IvError>
    where
        I: IntoIterator<Item = u64>,
    {
        let mut cells: Vec<u64> = cells.into_iter().collect();
        cells.sort_unstable();
        cells.dedup();
        // merge adjacent cells first so each run costs two endpoints
        let mut runs: Vec<(u64, u64)> = Vec::new();
        for l in cells {
            match runs.last_mut() {
                Some(last) if last.1 == l => last.1 = l + 1,
                _ => runs.push((l, l + 1)),
            }
        }
        let raw = runs
            .into_iter()
            .map(|(lo, hi)| Ok((Dyadic::grid(lo, m)?, Dyadic::grid(hi, m)?)))
            .collect::<Result<Vec<_>, DyadicError>>()?;
        Self::normalize(raw)
    }

    pub fn components(&self) -> &[Component] {
        &self.components
    }

    pub fn component_count(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn is_full(&self) -> bool {
        matches!(self.components.as_slice(), [c] if c.lo.is_zero() && c.hi.is_one())
    }

    pub fn complement(&self) -> IntervalValue {
        let mut out = Vec::with_capacity(self.components.len() + 1);
        let mut cursor = Dyadic::zero();
        for c in &self.components {
            if cursor < c.lo {
                out.push(Component { lo: cursor, hi: c.lo.clone() });
            }
            cursor = c.hi.clone();
        }
        if !cursor.is_one() {
            out.push(Component { lo: cursor, hi: Dyadic::one() });
        }
        IntervalValue { components: out }
    }

    pub fn union(&self, other: &IntervalValue) -> IntervalValue {
        let (a, b) = (&self.components, &other.components);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() || j < b.len() {
            let take_a = j >= b.len() || (i < a.len() && a[i].lo <= b[j].lo);
            let c = if take_a {
                i += 1;
                &a[i - 1]
            } else {
                j += 1;
                &b[j - 1]
            };
            push_merged(&mut out, c.lo.clone(), c.hi.clone());
        }
        IntervalValue { components: out }
    }

    pub fn intersect(&self, other: &IntervalValue) -> IntervalValue {
        let (a, b) = (&self.components, &other.components);
        let mut out = Vec::new();
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            let lo = (&a[i].lo).max(&b[j].lo);
            let hi = (&a[i].hi).min(&b[j].hi);
            if lo < hi {
                // inputs are non-adjacent, so pieces never touch
                out.push(Component { lo: lo.clone(), hi: hi.clone() });
            }
            if a[i].hi < b[j].hi {
                i += 1;
            } else {
                j += 1;
            }
        }
        IntervalValue { components: out }
    }

    /// Length of the left-most maximal component, 0 for the empty value.
    pub fn flength(&self) -> Dyadic {
        self.components.first().map_or_else(Dyadic::zero, Component::len)
    }

    /// Points `x` with `x + d` in `self`, where `d = shift.flength()`. Mass moved
    /// below 0 is dropped.
    pub fn lshift(&self, shift: &IntervalValue) -> IntervalValue {
        let d = shift.flength();
        self.lshift_by(&d)
    }

    pub fn lshift_by(&self, d: &Dyadic) -> IntervalValue {
        if d.is_zero() {
            return self.clone();
        }
        let mut out = Vec::with_capacity(self.components.len());
        for c in &self.components {
            if c.hi <= *d {
                continue;
            }
            let lo = if c.lo <= *d { Dyadic::zero() } else { c.lo.checked_sub(d).unwrap() };
            let hi = c.hi.checked_sub(d).unwrap();
            out.push(Component { lo, hi });
        }
        IntervalValue { components: out }
    }

    /// Circular right shift by `shift.flength()`: points `x` with
    /// `frac(x - d)` in `self`.
    pub fn rshift(&self, shift: &IntervalValue) -> IntervalValue {
        let d = shift.flength();
        self.rshift_by(&d)
    }

    pub fn rshift_by(&self, d: &Dyadic) -> IntervalValue {
        if d.is_zero() || d.is_one() {
            return self.clone();
        }
        // points at or beyond `wrap` move past 1 and re-enter at 0
        let wrap = d.complement();
        let mut low = Vec::new();
        let mut high = Vec::with_capacity(self.components.len());
        for c in &self.components {
            if c.hi <= wrap {
                high.push(Component { lo: c.lo.checked_add(d).unwrap(), hi: c.hi.checked_add(d).unwrap() });
            } else if c.lo >= wrap {
                low.push(Component { lo: c.lo.checked_sub(&wrap).unwrap(), hi: c.hi.checked_sub(&wrap).unwrap() });
            } else {
                high.push(Component { lo: c.lo.checked_add(d).unwrap(), hi: Dyadic::one() });
                low.push(Component { lo: Dyadic::zero(), hi: c.hi.checked_sub(&wrap).unwrap() });
            }
        }
        // wrapped pieces end at or below d, unwrapped ones start at or above d
        let mut out = Vec::with_capacity(low.len() + high.len());
        for c in low.into_iter().chain(high) {
            push_merged(&mut out, c.lo, c.hi);
        }
        IntervalValue { components: out }
    }

    /// The fractalian product `self * pattern`: `pattern` scaled into every
    /// component of `self`. Fails if the result would exceed `limit` components.
    pub fn product_limited(&self, pattern: &IntervalValue, limit: usize) -> Result<IntervalValue, IvError> {
        let needed = self.components.len().saturating_mul(pattern.components.len());
        if needed > limit {
            return Err(IvError::ResourceLimit { needed, limit });
        }
        let mut out = Vec::with_capacity(needed);
        for b in &self.components {
            let width = b.len();
            for a in &pattern.components {
                let lo = b.lo.checked_add(&a.lo.mul(&width)).unwrap();
                let hi = b.lo.checked_add(&a.hi.mul(&width)).unwrap();
                push_merged(&mut out, lo, hi);
            }
        }
        Ok(IntervalValue { components: out })
    }

    pub fn product(&self, pattern: &IntervalValue) -> Result<IntervalValue, IvError> {
        self.product_limited(pattern, DEFAULT_COMPONENT_LIMIT)
    }

    pub fn first_component(&self) -> IntervalValue {
        IntervalValue { components: self.components.first().cloned().into_iter().collect() }
    }

    pub fn contains(&self, r: &Dyadic) -> Result<bool, IvError> {
        if r.is_one() {
            return Err(IvError::PointOutOfRange(r.clone()));
        }
        // first component whose right end lies beyond r
        let idx = self.components.partition_point(|c| c.hi <= *r);
        Ok(self.components.get(idx).is_some_and(|c| c.lo <= *r))
    }

    /// Total length of the value.
    pub fn measure(&self) -> Dyadic {
        self.components.iter().fold(Dyadic::zero(), |acc, c| acc.checked_add(&c.len()).expect("measure is at most 1"))
    }

    /// Smallest `m` such that every endpoint is a multiple of `2^-m`.
    pub fn bit_height(&self) -> u64 {
        self.components.iter().map(|c| c.lo.exponent().max(c.hi.exponent())).max().unwrap_or(0)
    }
}

/// Renders as `[lo,hi) [lo,hi) ...` with `num/2^m` endpoints, or `{}` when empty.
impl fmt::Display for IntervalValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.components.is_empty() {
            return f.write_str("{}");
        }
        for (i, c) in self.components.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "[{},{})", c.lo, c.hi)?;
        }
        Ok(())
    }
}

impl FromStr for IntervalValue {
    type Err = IvError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s == "{}" {
            return Ok(IntervalValue::empty());
        }
        let bad = |why: &str| IvError::Syntax(format!("{why} in `{s}`"));
        let mut raw = Vec::new();
        let mut rest = s;
        while !rest.is_empty() {
            let body = rest.strip_prefix('[').ok_or_else(|| bad("expected `[`"))?;
            let close = body.find(')').ok_or_else(|| bad("missing `)`"))?;
            let (lo, hi) = body[..close].split_once(',').ok_or_else(|| bad("missing `,`"))?;
            raw.push((lo.parse()?, hi.parse()?));
            rest = body[close + 1..].trim_start();
        }
        Self::normalize(raw)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(n: u64, m: u64) -> Dyadic {
        Dyadic::ratio(n, m).unwrap()
    }

    /// Builds a value from `(lo_num, hi_num)` pairs over a common `2^m` grid.
    fn iv(m: u64, pairs: &[(u64, u64)]) -> IntervalValue {
        IntervalValue::normalize(pairs.iter().map(|&(a, b)| (d(a, m), d(b, m)))).unwrap()
    }

    /// Membership at the midpoints of resolution `m`, independent of the
    /// component algebra.
    fn midpoints(v: &IntervalValue, m: u64) -> Vec<bool> {
        (0..1u64 << m).map(|l| v.contains(&d(2 * l + 1, m + 1)).unwrap()).collect()
    }

    #[test]
    fn normalize_examples() {
        assert_eq!(IntervalValue::normalize(Vec::new()).unwrap(), IntervalValue::empty());
        assert_eq!(iv(2, &[(0, 1), (1, 2)]), iv(1, &[(0, 1)]));
        assert_eq!(iv(1, &[(0, 1)]).component_count(), 1);
        let v = iv(2, &[(2, 3), (0, 1)]);
        assert_eq!(v.components()[0].lo, Dyadic::zero());
        assert_eq!(midpoints(&v, 3), [true, true, false, false, true, true, false, false]);
        // dropping degenerate pairs
        assert!(iv(2, &[(1, 1)]).is_empty());
    }

    #[test]
    fn normalize_rejects_malformed() {
        let err = IntervalValue::normalize([(d(1, 1), d(1, 2))]).unwrap_err();
        assert!(matches!(err, IvError::MalformedComponent { .. }));
    }

    #[test]
    fn normalize_is_idempotent() {
        let v = iv(3, &[(5, 7), (0, 2), (1, 3), (7, 8)]);
        let again = IntervalValue::normalize(v.components().iter().map(|c| (c.lo.clone(), c.hi.clone()))).unwrap();
        assert_eq!(v, again);
        assert_eq!(v, iv(3, &[(0, 3), (5, 8)]));
    }

    #[test]
    fn complement_examples() {
        assert_eq!(IntervalValue::empty().complement(), IntervalValue::full());
        assert_eq!(iv(1, &[(0, 1)]).complement(), iv(1, &[(1, 2)]));
        let c = iv(2, &[(1, 2), (3, 4)]).complement();
        assert_eq!(c, iv(2, &[(0, 1), (2, 3)]));
        assert_eq!(midpoints(&c, 3), [true, true, false, false, true, true, false, false]);
    }

    #[test]
    fn union_and_intersect_examples() {
        let a = iv(3, &[(1, 3), (5, 6)]);
        assert_eq!(a.union(&IntervalValue::empty()), a);
        assert_eq!(iv(2, &[(0, 1)]).union(&iv(2, &[(2, 3)])), iv(2, &[(0, 1), (2, 3)]));
        assert_eq!(iv(2, &[(0, 1)]).union(&iv(2, &[(1, 2)])), iv(1, &[(0, 1)]));
        assert_eq!(a.intersect(&IntervalValue::full()), a);
        assert_eq!(a.intersect(&IntervalValue::empty()), IntervalValue::empty());
        let i = iv(2, &[(0, 2)]).intersect(&iv(2, &[(1, 3)]));
        assert_eq!(i, iv(2, &[(1, 2)]));
        assert_eq!(midpoints(&i, 2), [false, true, false, false]);
    }

    #[test]
    fn flength_examples() {
        assert_eq!(IntervalValue::empty().flength(), Dyadic::zero());
        assert_eq!(iv(1, &[(0, 1)]).flength(), d(1, 1));
        assert_eq!(iv(3, &[(2, 3), (4, 8)]).flength(), d(1, 3));
    }

    #[test]
    fn lshift_examples() {
        let quarter = iv(2, &[(1, 2)]);
        assert_eq!(iv(2, &[(1, 2)]).lshift(&quarter), iv(2, &[(0, 1)]));
        assert_eq!(iv(1, &[(0, 1)]).lshift(&iv(1, &[(1, 2)])), IntervalValue::empty());
        let a = iv(3, &[(1, 4), (6, 7)]);
        assert_eq!(a.lshift(&IntervalValue::empty()), a);
        // partial loss at 0
        assert_eq!(a.lshift(&iv(3, &[(0, 2)])), iv(3, &[(0, 2), (4, 5)]));
    }

    #[test]
    fn rshift_examples() {
        let half = iv(1, &[(1, 2)]);
        assert_eq!(iv(1, &[(0, 1)]).rshift(&half), iv(1, &[(1, 2)]));
        assert_eq!(iv(2, &[(3, 4)]).rshift(&half), iv(2, &[(1, 2)]));
        let a = iv(3, &[(1, 4), (6, 7)]);
        assert_eq!(a.rshift(&IntervalValue::empty()), a);
        // a component straddling 1 splits in two
        assert_eq!(iv(3, &[(5, 7)]).rshift(&iv(2, &[(0, 1)])), iv(3, &[(0, 1), (7, 8)]));
        // rotating by the full length is the identity
        assert_eq!(a.rshift(&IntervalValue::full()), a);
    }

    #[test]
    fn rshift_rejoins_pieces_across_zero() {
        // [3/4,1) ∪ [0,1/4) style wrap merges with a piece that starts at d
        let v = iv(2, &[(0, 1), (2, 4)]);
        assert_eq!(v.rshift(&iv(2, &[(0, 1)])), iv(2, &[(0, 2), (3, 4)]));
    }

    #[test]
    fn product_examples() {
        let a = iv(3, &[(1, 3), (6, 7)]);
        assert_eq!(IntervalValue::full().product(&a).unwrap(), a);
        let h = iv(1, &[(0, 1)]);
        assert_eq!(h.product(&h).unwrap(), iv(2, &[(0, 1)]));
        let b = iv(2, &[(0, 1), (2, 3)]);
        assert_eq!(b.product(&h).unwrap(), iv(3, &[(0, 1), (4, 5)]));
    }

    #[test]
    fn product_respects_component_limit() {
        let b = iv(3, &[(0, 1), (2, 3), (4, 5)]);
        let err = b.product_limited(&b, 8).unwrap_err();
        assert_eq!(err, IvError::ResourceLimit { needed: 9, limit: 8 });
    }

    #[test]
    fn first_component_examples() {
        assert_eq!(IntervalValue::empty().first_component(), IntervalValue::empty());
        assert_eq!(iv(2, &[(1, 2), (3, 4)]).first_component(), iv(2, &[(1, 2)]));
        assert_eq!(IntervalValue::full().first_component(), IntervalValue::full());
    }

    #[test]
    fn membership_examples() {
        let h = iv(1, &[(0, 1)]);
        assert!(h.contains(&Dyadic::zero()).unwrap());
        assert!(!h.contains(&d(1, 1)).unwrap());
        assert!(iv(3, &[(0, 1), (4, 5)]).contains(&d(9, 4)).unwrap());
        assert!(matches!(h.contains(&Dyadic::one()), Err(IvError::PointOutOfRange(_))));
    }

    #[test]
    fn measure_and_bit_height_examples() {
        assert_eq!(IntervalValue::empty().measure(), Dyadic::zero());
        assert_eq!(iv(1, &[(0, 1)]).measure(), d(1, 1));
        assert_eq!(iv(3, &[(0, 1), (2, 3), (4, 5), (6, 7)]).measure(), d(1, 1));
        assert_eq!(IntervalValue::empty().bit_height(), 0);
        assert_eq!(iv(1, &[(0, 1)]).bit_height(), 1);
        assert_eq!(iv(3, &[(0, 1), (4, 5)]).bit_height(), 3);
        assert_eq!(IntervalValue::full().bit_height(), 0);
    }

    #[test]
    fn text_form() {
        assert_eq!(IntervalValue::empty().to_string(), "{}");
        let v = iv(3, &[(0, 1), (4, 5)]);
        assert_eq!(v.to_string(), "[0/2^0,1/2^3) [1/2^1,5/2^3)");
        assert_eq!(v.to_string().parse::<IntervalValue>().unwrap(), v);
        assert!("[0/2^0,1/2^3".parse::<IntervalValue>().is_err());
    }
}
