// Copyright 2026 the ivdl Authors
// SPDX-License-Identifier: Apache-2.0

//! Compiles a discrete-logarithm instance into a computation sequence.
//!
//! Given `(a, b, p)` the builder emits a sequence of `O(n^3)` instructions,
//! `n = max(3, bits(p))`, whose output tape spells (MSB first) an exponent `x`
//! with `a^x = b (mod p)` whenever one exists in `[0, 2^n)`.
//!
//! Every candidate exponent lives in its own grid slice of width `2^-n`. The
//! fan-out values `x(1..n)` give slice `l` the membership pattern of the
//! integer `2^n - 1 - l`. From there the work is pointwise Boolean circuitry:
//!
//! 1. inputs `a`, `b`, `p` as constant wires;
//! 2. power rows: row `i` holds `a^(2^(n-i)) mod p`, by repeated squaring;
//! 3. gating: row `i` is kept where `x(i)` holds, replaced by 1 elsewhere;
//! 4. accumulation: the running modular product of the gated rows, so that
//!    `f(n, ·)` spells `a^#X(r) mod p` on each slice;
//! 5. equality with `b`, giving the union `e` of all solution slices;
//! 6. slice selection, which isolates one `2^-n` slice `z` of `e`;
//! 7. output: `z ∩ x(k)` for each `k`, each followed by `OUTPUT`.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use thiserror::Error;

use crate::circuit::{CircuitError, SegmentBuilder, Wire, FIRST_HALF};
use crate::program::{
    bits_to_string, ComputationSequence, EvalError, EvalResult, Evaluator, Instruction, Limits, Metrics,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DlogError {
    #[error("modulus {0} is below 2")]
    DegenerateModulus(BigUint),
    #[error("{name} = {value} must be below the modulus {p}")]
    OperandOutOfRange { name: &'static str, value: BigUint, p: BigUint },
    #[error("bit width {0} is too large to encode candidate exponents")]
    TooWide(usize),
    #[error(transparent)]
    Circuit(#[from] CircuitError),
    #[error(transparent)]
    Eval(#[from] EvalError),
}

/// Largest supported bit width; slice indices must fit a `u64`.
pub const MAX_WIDTH: usize = 62;

/// An instance `a^x = b (mod p)` with `a, b < p` and `p >= 2`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DlogInstance {
    a: BigUint,
    b: BigUint,
    p: BigUint,
    n: usize,
}

impl DlogInstance {
    /// Uses `n = max(3, bits(p))`.
    pub fn new(a: BigUint, b: BigUint, p: BigUint) -> Result<Self, DlogError> {
        let n = (p.bits() as usize).max(3);
        Self::with_width(a, b, p, n)
    }

    /// Uses an explicit width `n`, which must hold `p`.
    pub fn with_width(a: BigUint, b: BigUint, p: BigUint, n: usize) -> Result<Self, DlogError> {
        if p < BigUint::from(2u32) {
            return Err(DlogError::DegenerateModulus(p));
        }
        if a >= p {
            return Err(DlogError::OperandOutOfRange { name: "a", value: a, p });
        }
        if b >= p {
            return Err(DlogError::OperandOutOfRange { name: "b", value: b, p });
        }
        if n > MAX_WIDTH || (p.bits() as usize) > n {
            return Err(DlogError::TooWide(n));
        }
        Ok(DlogInstance { a, b, p, n })
    }

    pub fn from_u64(a: u64, b: u64, p: u64) -> Result<Self, DlogError> {
        Self::new(a.into(), b.into(), p.into())
    }

    pub fn a(&self) -> &BigUint {
        &self.a
    }

    pub fn b(&self) -> &BigUint {
        &self.b
    }

    pub fn p(&self) -> &BigUint {
        &self.p
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `v` as `n` bits, MSB first.
    pub fn bits_of(&self, v: &BigUint) -> Vec<bool> {
        (0..self.n as u64).rev().map(|i| v.bit(i)).collect()
    }

    /// `a^x = b (mod p)` by host arithmetic.
    pub fn verifies(&self, x: u64) -> bool {
        self.a.modpow(&BigUint::from(x), &self.p) == self.b
    }
}

/// Symbolic positions in a built sequence.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Label {
    One,
    Zero,
    A(usize),
    B(usize),
    P(usize),
    X(usize),
    /// `Row(i, j)`: bit `j` of `a^(2^(n-i)) mod p`.
    Row(usize, usize),
    C(usize, usize),
    F(usize, usize),
    /// Bit `k` of the equality test.
    Eq(usize),
    E,
    /// Step `k` (1..=22) of slice selection, i.e. position `e + k`.
    Select(usize),
    Z,
    Out(usize),
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Label::One => write!(f, "one"),
            Label::Zero => write!(f, "zero"),
            Label::A(k) => write!(f, "a({k})"),
            Label::B(k) => write!(f, "b({k})"),
            Label::P(k) => write!(f, "p({k})"),
            Label::X(k) => write!(f, "x({k})"),
            Label::Row(i, j) => write!(f, "e_row({i},{j})"),
            Label::C(i, j) => write!(f, "c({i},{j})"),
            Label::F(i, j) => write!(f, "f({i},{j})"),
            Label::Eq(k) => write!(f, "eq({k})"),
            Label::E => write!(f, "e"),
            Label::Select(k) => write!(f, "e+{k}"),
            Label::Z => write!(f, "z"),
            Label::Out(k) => write!(f, "out({k})"),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("unknown label `{0}`")]
pub struct LabelParseError(String);

impl FromStr for Label {
    type Err = LabelParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || LabelParseError(s.to_string());
        match s {
            "one" => return Ok(Label::One),
            "zero" => return Ok(Label::Zero),
            "e" => return Ok(Label::E),
            "z" => return Ok(Label::Z),
            _ => {}
        }
        if let Some(k) = s.strip_prefix("e+") {
            return k.parse().map(Label::Select).map_err(|_| err());
        }
        let (name, args) = s.strip_suffix(')').and_then(|t| t.split_once('(')).ok_or_else(err)?;
        let nums =
            args.split(',').map(|t| t.trim().parse::<usize>()).collect::<Result<Vec<_>, _>>().map_err(|_| err())?;
        match (name, nums.as_slice()) {
            ("a", &[k]) => Ok(Label::A(k)),
            ("b", &[k]) => Ok(Label::B(k)),
            ("p", &[k]) => Ok(Label::P(k)),
            ("x", &[k]) => Ok(Label::X(k)),
            ("eq", &[k]) => Ok(Label::Eq(k)),
            ("out", &[k]) => Ok(Label::Out(k)),
            ("e_row", &[i, j]) => Ok(Label::Row(i, j)),
            ("c", &[i, j]) => Ok(Label::C(i, j)),
            ("f", &[i, j]) => Ok(Label::F(i, j)),
            _ => Err(err()),
        }
    }
}

/// Label to instruction index. Several labels may share an index.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LabelMap(BTreeMap<Label, usize>);

impl LabelMap {
    pub fn insert(&mut self, label: Label, index: usize) {
        self.0.insert(label, index);
    }

    pub fn get(&self, label: Label) -> Option<usize> {
        self.0.get(&label).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (Label, usize)> + '_ {
        self.0.iter().map(|(l, i)| (*l, *i))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Labels attached to `index`, in label order.
    pub fn names_for(&self, index: usize) -> Vec<Label> {
        self.iter().filter(|&(_, i)| i == index).map(|(l, _)| l).collect()
    }

    /// Sidecar text: one `label index` pair per line, sorted by index.
    pub fn to_text(&self) -> String {
        let mut rows: Vec<_> = self.iter().collect();
        rows.sort_by_key(|&(l, i)| (i, l));
        rows.iter().map(|(l, i)| format!("{l} {i}\n")).collect()
    }

    pub fn parse(text: &str) -> Result<Self, LabelParseError> {
        let mut map = LabelMap::default();
        for line in text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#')) {
            let (label, index) = line.rsplit_once(' ').ok_or_else(|| LabelParseError(line.to_string()))?;
            let index = index.parse().map_err(|_| LabelParseError(line.to_string()))?;
            map.insert(label.trim().parse()?, index);
        }
        Ok(map)
    }
}

/// A contiguous run of instructions emitted by one construction stage.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Stage {
    pub name: &'static str,
    /// First and last 1-based index, inclusive. `start > end` for empty stages.
    pub start: usize,
    pub end: usize,
}

impl Stage {
    pub fn len(&self) -> usize {
        (self.end + 1).saturating_sub(self.start)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn contains(&self, index: usize) -> bool {
        self.start <= index && index <= self.end
    }
}

#[derive(Clone, Debug)]
pub struct BuildPlan {
    pub instance: DlogInstance,
    pub sequence: ComputationSequence,
    pub labels: LabelMap,
    pub stages: Vec<Stage>,
}

impl BuildPlan {
    /// Index bound to `label`. Panics on labels the builder never emits.
    pub fn index(&self, label: Label) -> usize {
        self.labels.get(label).unwrap_or_else(|| panic!("plan has no label {label}"))
    }

    pub fn stage(&self, name: &str) -> Option<&Stage> {
        self.stages.iter().find(|s| s.name == name)
    }

    /// Indices of `x(1..n)`.
    pub fn x_indices(&self) -> Vec<usize> {
        (1..=self.instance.n).map(|k| self.index(Label::X(k))).collect()
    }

    /// Indices of `f(n, 1..n)`.
    pub fn result_row(&self) -> Vec<usize> {
        let n = self.instance.n;
        (1..=n).map(|j| self.index(Label::F(n, j))).collect()
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct BuildOptions {
    /// Skip emission of gates whose operands are both global constants.
    pub fold_constant_gates: bool,
    /// Compute the power rows on the host and emit them as constant bits.
    pub host_power_rows: bool,
}

/// Wires of the encoded inputs.
#[derive(Clone, Debug)]
pub struct Inputs {
    pub a: Vec<Wire>,
    pub b: Vec<Wire>,
    pub p: Vec<Wire>,
}

/// Stage-by-stage constructor. [`build`] runs every stage in order; the
/// stage methods are public so tests can stop at any point.
#[derive(Debug)]
pub struct DlogBuilder {
    seg: SegmentBuilder,
    labels: LabelMap,
    stages: Vec<Stage>,
    opts: BuildOptions,
}

impl DlogBuilder {
    pub fn new(opts: BuildOptions) -> Self {
        DlogBuilder {
            seg: SegmentBuilder::new().with_constant_folding(opts.fold_constant_gates),
            labels: LabelMap::default(),
            stages: Vec::new(),
            opts,
        }
    }

    pub fn segment(&self) -> &SegmentBuilder {
        &self.seg
    }

    pub fn labels(&self) -> &LabelMap {
        &self.labels
    }

    fn label(&mut self, label: Label, w: Wire) {
        self.labels.insert(label, w.index());
    }

    fn stage<T>(&mut self, name: &'static str, f: impl FnOnce(&mut Self) -> T) -> T {
        let start = self.seg.len() + 1;
        let out = f(self);
        self.stages.push(Stage { name, start, end: self.seg.len() });
        out
    }

    /// Prologue `FIRSTHALF; RSHIFT 1 1`, the input bits of `a`, `b`, `p`, and
    /// the shared constants `one` (`OR 1 2`) and `zero` (`AND 1 2`).
    pub fn encode_inputs(&mut self, inst: &DlogInstance) -> Inputs {
        let start = 1;
        let inputs = {
            let a = self.seg.emit_const_bits(&inst.bits_of(&inst.a));
            let b = self.seg.emit_const_bits(&inst.bits_of(&inst.b));
            let p = self.seg.emit_const_bits(&inst.bits_of(&inst.p));
            Inputs { a, b, p }
        };
        for k in 1..=inst.n {
            self.label(Label::A(k), inputs.a[k - 1]);
            self.label(Label::B(k), inputs.b[k - 1]);
            self.label(Label::P(k), inputs.p[k - 1]);
        }
        let one = self.seg.one();
        let zero = self.seg.zero();
        self.label(Label::One, one);
        self.label(Label::Zero, zero);
        self.stages.push(Stage { name: "inputs", start, end: self.seg.len() });
        inputs
    }

    /// `x(1) = AND 1 1`; then `P = PRODUCT x(k-1) 1`, `R = RSHIFT P x(k-1)`,
    /// `x(k) = OR R P`. `x(k)` is the union of the even cells at resolution `k`.
    pub fn build_fanout(&mut self, n: usize) -> Vec<Wire> {
        self.stage("fanout", |this| {
            let mut xs = Vec::with_capacity(n);
            let mut prev = this.seg.push(Instruction::And(FIRST_HALF.index(), FIRST_HALF.index()));
            xs.push(prev);
            for _ in 2..=n {
                let prod = this.seg.push(Instruction::Product(prev.index(), FIRST_HALF.index()));
                let moved = this.seg.push(Instruction::RShift(prod.index(), prev.index()));
                prev = this.seg.push(Instruction::Or(moved.index(), prod.index()));
                xs.push(prev);
            }
            for (k, &w) in xs.iter().enumerate() {
                this.label(Label::X(k + 1), w);
            }
            xs
        })
    }

    /// Rows `1..=n`; row `i` carries `a^(2^(n-i)) mod p`. Row `n` is the input
    /// `a` itself and each earlier row squares the one below it.
    pub fn build_power_rows(&mut self, inst: &DlogInstance, inputs: &Inputs) -> Result<Vec<Vec<Wire>>, DlogError> {
        let n = inst.n;
        let host = self.opts.host_power_rows;
        self.stage("power_rows", |this| {
            let mut rows = vec![Vec::new(); n];
            rows[n - 1] = inputs.a.clone();
            for i in (1..n).rev() {
                rows[i - 1] = if host {
                    let exp = BigUint::from(1u32) << (n - i);
                    let v = inst.a.modpow(&exp, &inst.p);
                    this.seg.emit_const_bits(&inst.bits_of(&v))
                } else {
                    let below = &rows[i];
                    this.seg.emit_modmul(below, below, &inputs.p)?
                };
            }
            for (i, row) in rows.iter().enumerate() {
                for (j, &w) in row.iter().enumerate() {
                    this.label(Label::Row(i + 1, j + 1), w);
                }
            }
            Ok(rows)
        })
    }

    /// `c(i, j) = e_row(i, j) ∩ x(i)` for `j < n` and
    /// `c(i, n) = (e_row(i, n) ∩ x(i)) ∪ ¬x(i)`: the row where `x(i)` holds,
    /// the integer 1 elsewhere.
    pub fn build_gating(&mut self, rows: &[Vec<Wire>], xs: &[Wire]) -> Vec<Vec<Wire>> {
        let n = xs.len();
        self.stage("gating", |this| {
            let mut gated = Vec::with_capacity(n);
            for (i, (row, &x)) in rows.iter().zip(xs).enumerate() {
                let mut out = Vec::with_capacity(n);
                for (j, &bit) in row.iter().enumerate() {
                    let kept = this.seg.and(bit, x);
                    let w = if j + 1 < n {
                        kept
                    } else {
                        let off = this.seg.not(x);
                        this.seg.or(kept, off)
                    };
                    this.label(Label::C(i + 1, j + 1), w);
                    out.push(w);
                }
                gated.push(out);
            }
            gated
        })
    }

    /// `f(1, ·) = c(1, ·)` and `f(i, ·) = f(i-1, ·) · c(i, ·) mod p`.
    pub fn build_accumulation(&mut self, gated: &[Vec<Wire>], p: &[Wire]) -> Result<Vec<Vec<Wire>>, DlogError> {
        self.stage("accumulation", |this| {
            let mut acc = vec![gated[0].clone()];
            for row in &gated[1..] {
                let next = this.seg.emit_modmul(acc.last().unwrap(), row, p)?;
                acc.push(next);
            }
            for (i, row) in acc.iter().enumerate() {
                for (j, &w) in row.iter().enumerate() {
                    this.label(Label::F(i + 1, j + 1), w);
                }
            }
            Ok(acc)
        })
    }

    /// `e`: the slices where `f(n, ·)` spells `b`.
    pub fn build_equality(&mut self, b: &[Wire], last_row: &[Wire]) -> Result<Wire, DlogError> {
        self.stage("equality", |this| {
            let eq = this.seg.emit_equality(b, last_row)?;
            for (k, &w) in eq.bits.iter().enumerate() {
                this.label(Label::Eq(k + 1), w);
            }
            let e = eq.result().expect("width is at least 3");
            this.label(Label::E, e);
            Ok(e)
        })
    }

    /// `z`: a single `2^-n` slice of `e`, or empty.
    pub fn build_slice_select(&mut self, e: Wire, x_n: Wire) -> Wire {
        self.stage("select", |this| {
            let steps = emit_slice_select(&mut this.seg, e, x_n);
            for (k, &w) in steps.iter().enumerate() {
                this.label(Label::Select(k + 1), w);
            }
            let z = steps[21];
            this.label(Label::Z, z);
            z
        })
    }

    /// `AND z x(k)` for each `k`, then one `OUTPUT` per result.
    pub fn build_output_stage(&mut self, z: Wire, xs: &[Wire]) -> Vec<Wire> {
        self.stage("output", |this| {
            let picked: Vec<Wire> = xs.iter().map(|&x| this.seg.and(z, x)).collect();
            let outs: Vec<Wire> = picked.iter().map(|w| this.seg.push(Instruction::Output(w.index()))).collect();
            for (k, &w) in outs.iter().enumerate() {
                this.label(Label::Out(k + 1), w);
            }
            outs
        })
    }

    pub fn finish(self, instance: DlogInstance) -> BuildPlan {
        BuildPlan { instance, sequence: self.seg.finish(), labels: self.labels, stages: self.stages }
    }
}

/// Emits the seven-instruction first-component extractor on `src`.
///
/// With `g = Flength(¬src)` and `L = Flength(src)`, steps 2 to 5 compute
/// `src ∩ [g + L, 1)`. If `src` starts above 0 then `g + L` is the end of its
/// first component; if `src` starts at 0 it is the start of the second one.
/// Either way step 7 is exactly the first component.
pub fn emit_first_component(seg: &mut SegmentBuilder, src: Wire) -> [Wire; 7] {
    let s = src.index();
    let s1 = seg.push(Instruction::Not(s));
    let s2 = seg.push(Instruction::LShift(s, s1.index()));
    let s3 = seg.push(Instruction::LShift(s2.index(), s));
    let s4 = seg.push(Instruction::RShift(s3.index(), s));
    let s5 = seg.push(Instruction::RShift(s4.index(), s1.index()));
    let s6 = seg.push(Instruction::Not(s5.index()));
    let s7 = seg.push(Instruction::And(s, s6.index()));
    [s1, s2, s3, s4, s5, s6, s7]
}

/// Emits the 22-step slice selection on `e`, with `x_n` supplying shifts of
/// one slice width `2^-n`. Returns the wires of steps `e+1 ..= e+22`.
///
/// Steps 8-10 drop the top slice and leave `[0, 2^-n)` empty; 11-12 move the
/// remainder so it starts at 0; 13 keeps every other slice of it; 14-20 take
/// the first of those; 21-22 move it back. The result is the left-most slice
/// of the first component of `e` minus its top slice.
pub fn emit_slice_select(seg: &mut SegmentBuilder, e: Wire, x_n: Wire) -> [Wire; 22] {
    let xn = x_n.index();
    let mut steps = Vec::with_capacity(22);
    steps.extend(emit_first_component(seg, e));
    let s7 = steps[6].index();
    let s8 = seg.push(Instruction::RShift(s7, xn));
    let s9 = seg.push(Instruction::LShift(s8.index(), xn));
    let s10 = seg.push(Instruction::RShift(s9.index(), xn));
    let s11 = seg.push(Instruction::Not(s10.index()));
    let s12 = seg.push(Instruction::LShift(s10.index(), s11.index()));
    let s13 = seg.push(Instruction::And(s12.index(), xn));
    steps.extend([s8, s9, s10, s11, s12, s13]);
    steps.extend(emit_first_component(seg, s13));
    let s20 = steps[19].index();
    let s21 = seg.push(Instruction::RShift(s20, s11.index()));
    let s22 = seg.push(Instruction::LShift(s21.index(), xn));
    steps.extend([s21, s22]);
    steps.try_into().expect("22 steps")
}

pub fn build(inst: &DlogInstance) -> Result<BuildPlan, DlogError> {
    build_with(inst, BuildOptions::default())
}

pub fn build_with(inst: &DlogInstance, opts: BuildOptions) -> Result<BuildPlan, DlogError> {
    let n = inst.n;
    let mut b = DlogBuilder::new(opts);
    let inputs = b.encode_inputs(inst);
    let xs = b.build_fanout(n);
    let rows = b.build_power_rows(inst, &inputs)?;
    let gated = b.build_gating(&rows, &xs);
    let acc = b.build_accumulation(&gated, &inputs.p)?;
    let e = b.build_equality(&inputs.b, acc.last().expect("n >= 3 rows"))?;
    let z = b.build_slice_select(e, xs[n - 1]);
    b.build_output_stage(z, &xs);
    Ok(b.finish(inst.clone()))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outcome {
    Solved(u64),
    NoSolution,
}

/// A built and evaluated instance.
#[derive(Clone, Debug)]
pub struct Solution {
    pub plan: BuildPlan,
    pub output: Vec<bool>,
    pub metrics: Metrics,
    /// Integer spelled by the output tape.
    pub decoded: u64,
    pub verified: bool,
}

impl Solution {
    fn new(plan: BuildPlan, output: Vec<bool>, metrics: Metrics) -> Self {
        let decoded = output.iter().fold(0u64, |acc, &bit| (acc << 1) | u64::from(bit));
        let verified = plan.instance.verifies(decoded);
        Solution { plan, output, metrics, decoded, verified }
    }

    pub fn outcome(&self) -> Outcome {
        if self.verified {
            Outcome::Solved(self.decoded)
        } else {
            Outcome::NoSolution
        }
    }

    pub fn output_string(&self) -> String {
        bits_to_string(&self.output)
    }
}

/// Builds, evaluates and checks the decoded exponent by host arithmetic.
/// Intermediate values are dropped as soon as they are dead.
pub fn run(inst: &DlogInstance, opts: BuildOptions, limits: Limits) -> Result<Solution, DlogError> {
    let plan = build_with(inst, opts)?;
    let (output, metrics) = Evaluator::new(limits).stream(&plan.sequence, |_, _| {})?;
    Ok(Solution::new(plan, output, metrics))
}

/// As [`run`], also returning every intermediate value.
pub fn run_traced(
    inst: &DlogInstance,
    opts: BuildOptions,
    limits: Limits,
) -> Result<(Solution, EvalResult), DlogError> {
    let plan = build_with(inst, opts)?;
    let result = Evaluator::new(limits).evaluate(&plan.sequence)?;
    let solution = Solution::new(plan, result.output.clone(), result.metrics.clone());
    Ok((solution, result))
}

pub fn solve(inst: &DlogInstance) -> Result<Outcome, DlogError> {
    run(inst, BuildOptions::default(), Limits::default()).map(|s| s.outcome())
}
