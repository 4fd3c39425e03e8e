// Copyright 2026 the ivdl Authors
// SPDX-License-Identifier: Apache-2.0

//! Exact binary rationals in the closed unit interval.
//!
//! A [`Dyadic`] is `numerator / 2^exponent` with `0 <= value <= 1`. Values are
//! kept in lowest terms (odd numerator, or `0/2^0`, or `1/2^0`), so structural
//! equality is numeric equality.
//!
//! Numerators are arbitrary precision. Values whose exponent fits in 126 bits
//! are stored inline as `u128`; everything else falls back to [`BigUint`].
//! The split is invisible to callers.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use thiserror::Error;

/// Largest exponent stored inline. Any canonical numerator at or below this
/// exponent is `< 2^126`, so aligned sums stay below `2^127`.
const SMALL_EXP: u64 = 126;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DyadicError {
    #[error("{0} is outside [0, 1]")]
    OutOfRange(String),
    #[error("cannot parse dyadic `{0}`: expected `num/2^m`, `0` or `1`")]
    Syntax(String),
}

#[derive(Clone, PartialEq, Eq, Hash)]
enum Repr {
    Small { num: u128, exp: u32 },
    Big { num: BigUint, exp: u64 },
}

/// An exact value `numerator / 2^exponent` in `[0, 1]`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Dyadic(Repr);

impl Dyadic {
    pub fn zero() -> Self {
        Dyadic(Repr::Small { num: 0, exp: 0 })
    }

    pub fn one() -> Self {
        Dyadic(Repr::Small { num: 1, exp: 0 })
    }

    pub fn half() -> Self {
        Dyadic(Repr::Small { num: 1, exp: 1 })
    }

    /// `numerator / 2^exponent`, reduced to lowest terms.
    pub fn new(numerator: BigUint, exponent: u64) -> Result<Self, DyadicError> {
        if numerator > (BigUint::one() << exponent) {
            return Err(DyadicError::OutOfRange(format!("{numerator}/2^{exponent}")));
        }
        Ok(Self::from_parts_unchecked(numerator, exponent))
    }

    /// Convenience constructor for small literals, e.g. `Dyadic::ratio(3, 3)` is 3/8.
    pub fn ratio(numerator: u64, exponent: u64) -> Result<Self, DyadicError> {
        if exponent <= SMALL_EXP {
            if u128::from(numerator) > 1u128 << exponent {
                return Err(DyadicError::OutOfRange(format!("{numerator}/2^{exponent}")));
            }
            return Ok(Self::from_small(u128::from(numerator), exponent));
        }
        Self::new(BigUint::from(numerator), exponent)
    }

    /// The left end of grid cell `index` at resolution `2^-exponent`.
    pub fn grid(index: u64, exponent: u64) -> Result<Self, DyadicError> {
        Self::ratio(index, exponent)
    }

    fn from_parts_unchecked(num: BigUint, exp: u64) -> Self {
        if num.is_zero() {
            return Self::zero();
        }
        let tz = num.trailing_zeros().unwrap_or(0).min(exp);
        let num = num >> tz;
        let exp = exp - tz;
        if exp <= SMALL_EXP {
            // canonical numerators at this exponent are < 2^126 (or exactly 1)
            let small = num.to_u128().expect("numerator fits below 2^126");
            Dyadic(Repr::Small { num: small, exp: exp as u32 })
        } else {
            Dyadic(Repr::Big { num, exp })
        }
    }

    fn from_small(num: u128, exp: u64) -> Self {
        if num == 0 {
            return Self::zero();
        }
        let tz = (num.trailing_zeros() as u64).min(exp);
        Dyadic(Repr::Small { num: num >> tz, exp: (exp - tz) as u32 })
    }

    pub fn numerator(&self) -> BigUint {
        match &self.0 {
            Repr::Small { num, .. } => BigUint::from(*num),
            Repr::Big { num, .. } => num.clone(),
        }
    }

    /// Exponent `m` of the canonical form; this is the smallest `m` such that
    /// the value is a multiple of `2^-m`.
    pub fn exponent(&self) -> u64 {
        match &self.0 {
            Repr::Small { exp, .. } => u64::from(*exp),
            Repr::Big { exp, .. } => *exp,
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self.0, Repr::Small { num: 0, .. })
    }

    pub fn is_one(&self) -> bool {
        matches!(self.0, Repr::Small { num: 1, exp: 0 })
    }

    /// Numerator scaled to `2^-m` units, if the value lies on that grid.
    pub fn grid_index(&self, m: u64) -> Option<BigUint> {
        let exp = self.exponent();
        if exp > m {
            return None;
        }
        Some(self.numerator() << (m - exp))
    }

    /// Same as [`Dyadic::grid_index`] but narrowed to `u64`.
    pub fn grid_index_u64(&self, m: u64) -> Option<u64> {
        self.grid_index(m).and_then(|v| v.to_u64())
    }

    fn aligned_big(&self, exp: u64) -> BigUint {
        self.numerator() << (exp - self.exponent())
    }

    /// `self + rhs`, or `None` if the sum exceeds 1.
    pub fn checked_add(&self, rhs: &Dyadic) -> Option<Dyadic> {
        if let (Repr::Small { num: a, exp: ea }, Repr::Small { num: b, exp: eb }) = (&self.0, &rhs.0) {
            let e = (*ea).max(*eb);
            let sum = (a << (e - ea)) + (b << (e - eb));
            if sum > 1u128 << e {
                return None;
            }
            return Some(Self::from_small(sum, u64::from(e)));
        }
        let e = self.exponent().max(rhs.exponent());
        let sum = self.aligned_big(e) + rhs.aligned_big(e);
        if sum > BigUint::one() << e {
            return None;
        }
        Some(Self::from_parts_unchecked(sum, e))
    }

    /// `self - rhs`, or `None` if the difference is negative.
    pub fn checked_sub(&self, rhs: &Dyadic) -> Option<Dyadic> {
        if let (Repr::Small { num: a, exp: ea }, Repr::Small { num: b, exp: eb }) = (&self.0, &rhs.0) {
            let e = (*ea).max(*eb);
            let (a, b) = (a << (e - ea), b << (e - eb));
            return a.checked_sub(b).map(|d| Self::from_small(d, u64::from(e)));
        }
        let e = self.exponent().max(rhs.exponent());
        let (a, b) = (self.aligned_big(e), rhs.aligned_big(e));
        if a < b {
            return None;
        }
        Some(Self::from_parts_unchecked(a - b, e))
    }

    /// Exact product. Closed on `[0, 1]`, so this never fails.
    pub fn mul(&self, rhs: &Dyadic) -> Dyadic {
        if let (Repr::Small { num: a, exp: ea }, Repr::Small { num: b, exp: eb }) = (&self.0, &rhs.0) {
            let e = u64::from(*ea) + u64::from(*eb);
            if e <= SMALL_EXP {
                return Self::from_small(a * b, e);
            }
        }
        Self::from_parts_unchecked(self.numerator() * rhs.numerator(), self.exponent() + rhs.exponent())
    }

    /// `1 - self`.
    pub fn complement(&self) -> Dyadic {
        Dyadic::one().checked_sub(self).expect("value is at most 1")
    }

    /// Nearest `f64`, for drawing. Exact up to 53 significant bits.
    pub fn to_f64(&self) -> f64 {
        match &self.0 {
            Repr::Small { num, exp } => *num as f64 * 2f64.powi(-(*exp as i32)),
            Repr::Big { num, exp } => {
                // keep the top 64 bits of the numerator so the scaling stays finite
                let drop = num.bits().saturating_sub(64);
                let top = (num >> drop).to_f64().unwrap_or(0.0);
                top * 2f64.powf(drop as f64 - *exp as f64)
            }
        }
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        match (&self.0, &other.0) {
            (Repr::Small { num: a, exp: ea }, Repr::Small { num: b, exp: eb }) => {
                if ea == eb {
                    a.cmp(b)
                } else {
                    let e = (*ea).max(*eb);
                    (a << (e - ea)).cmp(&(b << (e - eb)))
                }
            }
            _ => {
                let e = self.exponent().max(other.exponent());
                self.aligned_big(e).cmp(&other.aligned_big(e))
            }
        }
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.0 {
            Repr::Small { num, exp } => write!(f, "{num}/2^{exp}"),
            Repr::Big { num, exp } => write!(f, "{num}/2^{exp}"),
        }
    }
}

impl fmt::Debug for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Dyadic {
    type Err = DyadicError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let syntax = || DyadicError::Syntax(s.to_string());
        match s.split_once('/') {
            None => {
                let num: BigUint = s.parse().map_err(|_| syntax())?;
                Dyadic::new(num, 0)
            }
            Some((num, den)) => {
                let num: BigUint = num.trim().parse().map_err(|_| syntax())?;
                let exp = den.trim().strip_prefix("2^").ok_or_else(syntax)?;
                let exp: u64 = exp.parse().map_err(|_| syntax())?;
                Dyadic::new(num, exp)
            }
        }
    }
}
