// Copyright 2026 the ivdl Authors
// SPDX-License-Identifier: Apache-2.0

//! Reference implementations used as test oracles.
//!
//! [`BitsetValue`] re-implements every interval operator on a fixed grid of
//! `2^m` cells with plain index arithmetic, sharing no code with
//! [`crate::interval`]. [`brute_dlog`] enumerates exponents directly.

use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::dlog::{BuildPlan, DlogError, Label};
use crate::dyadic::Dyadic;
use crate::interval::IntervalValue;
use crate::program::EvalResult;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("operands have resolutions {0} and {1}")]
    ResolutionMismatch(u32, u32),
    #[error("value has bit height {height}, above resolution {m}")]
    ResolutionTooLow { height: u64, m: u32 },
    #[error("{op} needs two operands")]
    MissingOperand { op: BitsetOp },
    #[error("slice {l} is outside 0..{count}")]
    IndexOutOfRange { l: u64, count: u64 },
    #[error("plan has no label {0}")]
    MissingLabel(Label),
}

/// A value of `V_m` as `2^m` cells; cell `l` stands for `[l/2^m, (l+1)/2^m)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BitsetValue {
    m: u32,
    bits: Vec<bool>,
}

impl BitsetValue {
    pub fn new(m: u32, bits: Vec<bool>) -> Self {
        assert_eq!(bits.len(), 1usize << m, "need 2^m cells");
        BitsetValue { m, bits }
    }

    pub fn empty(m: u32) -> Self {
        BitsetValue { m, bits: vec![false; 1 << m] }
    }

    pub fn resolution(&self) -> u32 {
        self.m
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    /// Parses a cell string such as `"1100"`.
    pub fn from_cells(cells: &str) -> Self {
        let bits: Vec<bool> = cells.chars().map(|c| c == '1').collect();
        let m = bits.len().trailing_zeros();
        Self::new(m, bits)
    }

    pub fn to_cells(&self) -> String {
        self.bits.iter().map(|&b| if b { '1' } else { '0' }).collect()
    }

    pub fn from_interval(v: &IntervalValue, m: u32) -> Result<Self, OracleError> {
        let height = v.bit_height();
        if height > u64::from(m) {
            return Err(OracleError::ResolutionTooLow { height, m });
        }
        let mut bits = vec![false; 1 << m];
        for c in v.components() {
            let lo = c.lo.grid_index_u64(u64::from(m)).expect("endpoint on grid") as usize;
            let hi = c.hi.grid_index_u64(u64::from(m)).expect("endpoint on grid") as usize;
            bits[lo..hi].iter_mut().for_each(|b| *b = true);
        }
        Ok(BitsetValue { m, bits })
    }

    pub fn to_interval(&self) -> IntervalValue {
        let cells = self.bits.iter().enumerate().filter(|(_, &b)| b).map(|(l, _)| l as u64);
        IntervalValue::from_cells(u64::from(self.m), cells).expect("cells are in range")
    }

    /// Maximal runs of set cells as `(start, len)`.
    fn runs(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        let mut l = 0;
        while l < self.bits.len() {
            if self.bits[l] {
                let start = l;
                while l < self.bits.len() && self.bits[l] {
                    l += 1;
                }
                out.push((start, l - start));
            } else {
                l += 1;
            }
        }
        out
    }

    /// Length of the first run, in cells.
    pub fn flength_cells(&self) -> usize {
        self.runs().first().map_or(0, |r| r.1)
    }

    fn same_res(&self, other: &Self) -> Result<(), OracleError> {
        if self.m == other.m {
            Ok(())
        } else {
            Err(OracleError::ResolutionMismatch(self.m, other.m))
        }
    }

    pub fn complement(&self) -> Self {
        BitsetValue { m: self.m, bits: self.bits.iter().map(|b| !b).collect() }
    }

    pub fn union(&self, other: &Self) -> Result<Self, OracleError> {
        self.same_res(other)?;
        let bits = self.bits.iter().zip(&other.bits).map(|(a, b)| *a || *b).collect();
        Ok(BitsetValue { m: self.m, bits })
    }

    pub fn intersect(&self, other: &Self) -> Result<Self, OracleError> {
        self.same_res(other)?;
        let bits = self.bits.iter().zip(&other.bits).map(|(a, b)| *a && *b).collect();
        Ok(BitsetValue { m: self.m, bits })
    }

    pub fn lshift(&self, by: &Self) -> Result<Self, OracleError> {
        self.same_res(by)?;
        let d = by.flength_cells();
        let n = self.bits.len();
        let bits = (0..n).map(|x| x + d < n && self.bits[x + d]).collect();
        Ok(BitsetValue { m: self.m, bits })
    }

    pub fn rshift(&self, by: &Self) -> Result<Self, OracleError> {
        self.same_res(by)?;
        let d = by.flength_cells();
        let n = self.bits.len();
        let bits = (0..n).map(|x| self.bits[(x + n - d % n) % n]).collect();
        Ok(BitsetValue { m: self.m, bits })
    }

    /// `self * pattern` at resolution `m_self + m_pattern`: each run of `L`
    /// cells is replaced by `pattern` stretched by a factor of `L`.
    pub fn product(&self, pattern: &Self) -> Self {
        let m = self.m + pattern.m;
        let scale = 1usize << pattern.m;
        let mut bits = vec![false; 1 << m];
        for (start, len) in self.runs() {
            for j in 0..len * scale {
                bits[start * scale + j] = pattern.bits[j / len];
            }
        }
        BitsetValue { m, bits }
    }

    pub fn first_component(&self) -> Self {
        let mut bits = vec![false; self.bits.len()];
        if let Some(&(start, len)) = self.runs().first() {
            bits[start..start + len].iter_mut().for_each(|b| *b = true);
        }
        BitsetValue { m: self.m, bits }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BitsetOp {
    Complement,
    Union,
    Intersect,
    LShift,
    RShift,
    Product,
    FirstComponent,
}

impl BitsetOp {
    pub const ALL: [BitsetOp; 7] = [
        BitsetOp::Complement,
        BitsetOp::Union,
        BitsetOp::Intersect,
        BitsetOp::LShift,
        BitsetOp::RShift,
        BitsetOp::Product,
        BitsetOp::FirstComponent,
    ];

    pub fn name(self) -> &'static str {
        match self {
            BitsetOp::Complement => "complement",
            BitsetOp::Union => "union",
            BitsetOp::Intersect => "intersect",
            BitsetOp::LShift => "lshift",
            BitsetOp::RShift => "rshift",
            BitsetOp::Product => "product",
            BitsetOp::FirstComponent => "first_component",
        }
    }

    fn binary(self) -> bool {
        !matches!(self, BitsetOp::Complement | BitsetOp::FirstComponent)
    }

    /// The interval-algebra counterpart of this operator.
    pub fn apply_interval(self, a: &IntervalValue, b: &IntervalValue) -> IntervalValue {
        match self {
            BitsetOp::Complement => a.complement(),
            BitsetOp::Union => a.union(b),
            BitsetOp::Intersect => a.intersect(b),
            BitsetOp::LShift => a.lshift(b),
            BitsetOp::RShift => a.rshift(b),
            BitsetOp::Product => a.product(b).expect("small operands"),
            BitsetOp::FirstComponent => a.first_component(),
        }
    }
}

impl fmt::Display for BitsetOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Applies `op` at fixed resolution. Unary operators ignore `b`.
pub fn bitset_apply(op: BitsetOp, a: &BitsetValue, b: Option<&BitsetValue>) -> Result<BitsetValue, OracleError> {
    let rhs = || b.ok_or(OracleError::MissingOperand { op });
    match op {
        BitsetOp::Complement => Ok(a.complement()),
        BitsetOp::FirstComponent => Ok(a.first_component()),
        BitsetOp::Union => a.union(rhs()?),
        BitsetOp::Intersect => a.intersect(rhs()?),
        BitsetOp::LShift => a.lshift(rhs()?),
        BitsetOp::RShift => a.rshift(rhs()?),
        BitsetOp::Product => Ok(a.product(rhs()?)),
    }
}

/// A random element of `V_m`. Mixes i.i.d. cells at a random density with
/// occasional all-empty and all-full values.
pub fn random_bitset<R: Rng>(rng: &mut R, m: u32) -> BitsetValue {
    let n = 1usize << m;
    let bits = match rng.gen_range(0..20) {
        0 => vec![false; n],
        1 => vec![true; n],
        2 => {
            // a single run
            let a = rng.gen_range(0..n);
            let b = rng.gen_range(a..=n);
            (0..n).map(|l| a <= l && l < b).collect()
        }
        _ => {
            let density: f64 = rng.gen_range(0.05..0.95);
            (0..n).map(|_| rng.gen_bool(density)).collect()
        }
    };
    BitsetValue { m, bits }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Mismatch {
    pub op: BitsetOp,
    pub m: u32,
    pub seed: u64,
    pub case: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DiffReport {
    pub cases: usize,
    pub checks: usize,
    pub mismatches: Vec<Mismatch>,
}

impl DiffReport {
    pub fn is_clean(&self) -> bool {
        self.mismatches.is_empty()
    }

    fn check(&mut self, op: BitsetOp, m: u32, seed: u64, case: usize, a: &BitsetValue, b: &BitsetValue) {
        self.checks += 1;
        let (ia, ib) = (a.to_interval(), b.to_interval());
        let expected = bitset_apply(op, a, Some(b)).expect("same resolution").to_interval();
        if op.apply_interval(&ia, &ib) != expected {
            self.mismatches.push(Mismatch { op, m, seed, case });
        }
    }

    fn check_flength(&mut self, m: u32, seed: u64, case: usize, a: &BitsetValue) {
        self.checks += 1;
        let expected = Dyadic::ratio(a.flength_cells() as u64, u64::from(m)).expect("in range");
        if a.to_interval().flength() != expected {
            // reported under first_component, which shares the run scan
            self.mismatches.push(Mismatch { op: BitsetOp::FirstComponent, m, seed, case });
        }
    }
}

/// One line per mismatch: `op m seed case#`.
impl fmt::Display for DiffReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for mm in &self.mismatches {
            writeln!(f, "{} {} {} {}", mm.op, mm.m, mm.seed, mm.case)?;
        }
        Ok(())
    }
}

/// Random `V_m` pairs through every operator, compared exactly against the
/// bitset semantics.
pub fn differential_check(seed: u64, cases: usize, m: u32) -> DiffReport {
    assert!(m <= 12, "bitset oracle is capped at 4096 cells");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = DiffReport { cases, ..DiffReport::default() };
    for case in 0..cases {
        let a = random_bitset(&mut rng, m);
        let b = random_bitset(&mut rng, m);
        for op in BitsetOp::ALL {
            report.check(op, m, seed, case, &a, &b);
        }
        report.check_flength(m, seed, case, &a);
    }
    report
}

/// Every pair of `V_m` values through every operator.
pub fn exhaustive_check(m: u32) -> DiffReport {
    assert!(m <= 3, "2^(2^m) squared pairs");
    let n = 1usize << m;
    let all: Vec<BitsetValue> = (0..1u64 << n)
        .map(|mask| BitsetValue { m, bits: (0..n).map(|l| mask >> (n - 1 - l) & 1 == 1).collect() })
        .collect();
    let mut report = DiffReport::default();
    for (i, a) in all.iter().enumerate() {
        report.check_flength(m, 0, i, a);
        for (j, b) in all.iter().enumerate() {
            let case = i * all.len() + j;
            report.cases += 1;
            for op in BitsetOp::ALL {
                if !op.binary() && j > 0 {
                    continue;
                }
                report.check(op, m, 0, case, a, b);
            }
        }
    }
    report
}

/// Products of a resolution-`m_b` macro value with a resolution-`m_a` pattern.
pub fn product_cross_check(seed: u64, cases: usize, m_b: u32, m_a: u32) -> DiffReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = DiffReport { cases, ..DiffReport::default() };
    for case in 0..cases {
        let b = random_bitset(&mut rng, m_b);
        let a = random_bitset(&mut rng, m_a);
        report.checks += 1;
        let expected = b.product(&a).to_interval();
        let got = b.to_interval().product(&a.to_interval()).expect("small operands");
        if got != expected || got.bit_height() > u64::from(m_a + m_b) {
            report.mismatches.push(Mismatch { op: BitsetOp::Product, m: m_a + m_b, seed, case });
        }
    }
    report
}

/// All `x` in `[0, 2^n)` with `a^x = b (mod p)`, by direct iteration.
pub fn brute_dlog(a: &BigUint, b: &BigUint, p: &BigUint, n: usize) -> Result<Vec<u64>, DlogError> {
    if *p < BigUint::from(2u32) {
        return Err(DlogError::DegenerateModulus(p.clone()));
    }
    let target = b % p;
    let base = a % p;
    let mut power = BigUint::one() % p;
    let mut out = Vec::new();
    for x in 0..1u64 << n {
        if power == target {
            out.push(x);
        }
        power = (&power * &base) % p;
    }
    Ok(out)
}

/// Membership pattern of a point across `x(1..n)` and the integer it spells.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SlicePattern {
    pub r: Dyadic,
    pub bits: Vec<bool>,
    pub value: u64,
}

/// Pattern of the midpoint of grid slice `l`, read from evaluated values.
pub fn slice_pattern(plan: &BuildPlan, result: &EvalResult, l: u64) -> Result<SlicePattern, OracleError> {
    let n = plan.instance.n();
    let count = 1u64 << n;
    if l >= count {
        return Err(OracleError::IndexOutOfRange { l, count });
    }
    let r = Dyadic::ratio(2 * l + 1, n as u64 + 1).expect("midpoint below 1");
    let mut bits = Vec::with_capacity(n);
    for k in 1..=n {
        let idx = plan.labels.get(Label::X(k)).ok_or(OracleError::MissingLabel(Label::X(k)))?;
        bits.push(result.value(idx).contains(&r).expect("midpoint below 1"));
    }
    let value = bits.iter().fold(0u64, |acc, &b| (acc << 1) | u64::from(b));
    Ok(SlicePattern { r, bits, value })
}

/// The point `sum (1 - t_i) / 2^i` over the `n` pattern bits.
pub fn pattern_point(t: &[bool]) -> Dyadic {
    let numer = t.iter().fold(BigUint::zero(), |acc, &ti| (acc << 1u32) + BigUint::from(u8::from(!ti)));
    Dyadic::new(numer, t.len() as u64).expect("sum is below 1")
}

/// Integer decoded from a big-endian bit pattern, as `u64` when it fits.
pub fn pattern_value(t: &[bool]) -> Option<u64> {
    let v = t.iter().fold(BigUint::zero(), |acc, &b| (acc << 1u32) + BigUint::from(u8::from(b)));
    v.to_u64()
}
