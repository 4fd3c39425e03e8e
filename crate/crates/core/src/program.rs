// Copyright 2026 the ivdl Authors
// SPDX-License-Identifier: Apache-2.0

//! Computation sequences: straight-line programs over interval-values.
//!
//! Instruction `i` (1-based) may only reference instructions `1..i`. The first
//! instruction is always `FIRSTHALF`, whose value is `[0, 1/2)`. `OUTPUT j`
//! copies the value of `j` and appends one bit to the output tape: 1 when that
//! value is nonempty, 0 otherwise.
//!
//! The text form (`.ivc`) has one instruction per line, `MNEMONIC [j [k]]`.
//! Blank lines and `#` comments are skipped and do not consume an index.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::interval::{IntervalValue, IvError, DEFAULT_COMPONENT_LIMIT};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum OpKind {
    FirstHalf,
    And,
    Or,
    Not,
    LShift,
    RShift,
    Product,
    Output,
}

impl OpKind {
    pub const ALL: [OpKind; 8] = [
        OpKind::FirstHalf,
        OpKind::And,
        OpKind::Or,
        OpKind::Not,
        OpKind::LShift,
        OpKind::RShift,
        OpKind::Product,
        OpKind::Output,
    ];

    pub fn mnemonic(self) -> &'static str {
        match self {
            OpKind::FirstHalf => "FIRSTHALF",
            OpKind::And => "AND",
            OpKind::Or => "OR",
            OpKind::Not => "NOT",
            OpKind::LShift => "LSHIFT",
            OpKind::RShift => "RSHIFT",
            OpKind::Product => "PRODUCT",
            OpKind::Output => "OUTPUT",
        }
    }

    pub fn arity(self) -> usize {
        match self {
            OpKind::FirstHalf => 0,
            OpKind::Not | OpKind::Output => 1,
            _ => 2,
        }
    }

    pub fn from_mnemonic(s: &str) -> Option<OpKind> {
        OpKind::ALL.into_iter().find(|k| k.mnemonic() == s)
    }
}

impl fmt::Display for OpKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.mnemonic())
    }
}

/// One step of a computation sequence. Operands are 1-based indices.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Instruction {
    FirstHalf,
    And(usize, usize),
    Or(usize, usize),
    Not(usize),
    LShift(usize, usize),
    RShift(usize, usize),
    /// `Product(j, k)` is `value(j) * value(k)`: `k` zoomed into every component of `j`.
    Product(usize, usize),
    Output(usize),
}

impl Instruction {
    pub fn kind(&self) -> OpKind {
        match self {
            Instruction::FirstHalf => OpKind::FirstHalf,
            Instruction::And(..) => OpKind::And,
            Instruction::Or(..) => OpKind::Or,
            Instruction::Not(_) => OpKind::Not,
            Instruction::LShift(..) => OpKind::LShift,
            Instruction::RShift(..) => OpKind::RShift,
            Instruction::Product(..) => OpKind::Product,
            Instruction::Output(_) => OpKind::Output,
        }
    }

    pub fn operands(&self) -> Vec<usize> {
        match *self {
            Instruction::FirstHalf => vec![],
            Instruction::Not(j) | Instruction::Output(j) => vec![j],
            Instruction::And(j, k)
            | Instruction::Or(j, k)
            | Instruction::LShift(j, k)
            | Instruction::RShift(j, k)
            | Instruction::Product(j, k) => vec![j, k],
        }
    }

    pub fn from_parts(kind: OpKind, operands: &[usize]) -> Option<Instruction> {
        let ins = match (kind, operands) {
            (OpKind::FirstHalf, []) => Instruction::FirstHalf,
            (OpKind::Not, &[j]) => Instruction::Not(j),
            (OpKind::Output, &[j]) => Instruction::Output(j),
            (OpKind::And, &[j, k]) => Instruction::And(j, k),
            (OpKind::Or, &[j, k]) => Instruction::Or(j, k),
            (OpKind::LShift, &[j, k]) => Instruction::LShift(j, k),
            (OpKind::RShift, &[j, k]) => Instruction::RShift(j, k),
            (OpKind::Product, &[j, k]) => Instruction::Product(j, k),
            _ => return None,
        };
        Some(ins)
    }
}

impl fmt::Display for Instruction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.kind().mnemonic())?;
        for op in self.operands() {
            write!(f, " {op}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ViolationKind {
    EmptySequence,
    MustStartWithFirstHalf,
    FirstHalfNotFirst,
    /// Operand does not name an earlier instruction.
    BadReference(usize),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    /// 1-based instruction index (0 for whole-sequence problems).
    pub index: usize,
    pub kind: ViolationKind,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            ViolationKind::EmptySequence => write!(f, "sequence is empty"),
            ViolationKind::MustStartWithFirstHalf => write!(f, "instruction 1 must be FIRSTHALF"),
            ViolationKind::FirstHalfNotFirst => {
                write!(f, "instruction {}: FIRSTHALF only allowed at index 1", self.index)
            }
            ViolationKind::BadReference(r) => {
                write!(f, "instruction {}: operand {r} does not refer to an earlier instruction", self.index)
            }
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ComputationSequence {
    instructions: Vec<Instruction>,
}

impl ComputationSequence {
    pub fn new(instructions: Vec<Instruction>) -> Self {
        ComputationSequence { instructions }
    }

    pub fn instructions(&self) -> &[Instruction] {
        &self.instructions
    }

    pub fn len(&self) -> usize {
        self.instructions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.instructions.is_empty()
    }

    /// Instruction at 1-based `index`.
    pub fn get(&self, index: usize) -> Option<&Instruction> {
        index.checked_sub(1).and_then(|i| self.instructions.get(i))
    }

    /// The first `len` instructions.
    pub fn prefix(&self, len: usize) -> ComputationSequence {
        ComputationSequence::new(self.instructions[..len.min(self.len())].to_vec())
    }

    pub fn push(&mut self, ins: Instruction) -> usize {
        self.instructions.push(ins);
        self.instructions.len()
    }

    pub fn validate(&self) -> Result<(), Vec<Violation>> {
        let mut violations = Vec::new();
        if self.instructions.is_empty() {
            violations.push(Violation { index: 0, kind: ViolationKind::EmptySequence });
        }
        for (pos, ins) in self.instructions.iter().enumerate() {
            let index = pos + 1;
            match ins {
                Instruction::FirstHalf if index != 1 => {
                    violations.push(Violation { index, kind: ViolationKind::FirstHalfNotFirst })
                }
                Instruction::FirstHalf => {}
                _ if index == 1 => violations.push(Violation { index, kind: ViolationKind::MustStartWithFirstHalf }),
                _ => {}
            }
            for r in ins.operands() {
                if r == 0 || r >= index {
                    violations.push(Violation { index, kind: ViolationKind::BadReference(r) });
                }
            }
        }
        if violations.is_empty() {
            Ok(())
        } else {
            Err(violations)
        }
    }

    /// Canonical `.ivc` text.
    pub fn serialize(&self) -> String {
        let mut out = String::with_capacity(self.instructions.len() * 12);
        for ins in &self.instructions {
            out.push_str(&ins.to_string());
            out.push('\n');
        }
        out
    }

    pub fn op_counts(&self) -> BTreeMap<OpKind, usize> {
        let mut counts = BTreeMap::new();
        for ins in &self.instructions {
            *counts.entry(ins.kind()).or_insert(0) += 1;
        }
        counts
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseErrorKind {
    #[error("unknown mnemonic `{0}`")]
    UnknownMnemonic(String),
    #[error("{mnemonic} takes {expected} operand(s), found {found}")]
    OperandCount { mnemonic: &'static str, expected: usize, found: usize },
    #[error("operand `{0}` is not a decimal index")]
    BadOperand(String),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ProgramError {
    #[error("line {line}: {kind}")]
    Parse { line: usize, kind: ParseErrorKind },
    #[error("line {line}: {violation}")]
    Invalid { line: usize, violation: Violation },
    #[error("{0}")]
    Empty(Violation),
}

impl ProgramError {
    pub fn line(&self) -> Option<usize> {
        match self {
            ProgramError::Parse { line, .. } | ProgramError::Invalid { line, .. } => Some(*line),
            ProgramError::Empty(_) => None,
        }
    }
}

/// Parses `.ivc` text without validating references.
pub fn parse_unchecked(text: &str) -> Result<(ComputationSequence, Vec<usize>), ProgramError> {
    let mut seq = ComputationSequence::default();
    let mut lines = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = lineno + 1;
        let body = raw.trim();
        if body.is_empty() || body.starts_with('#') {
            continue;
        }
        let mut words = body.split_whitespace();
        let word = words.next().expect("non-empty line");
        let kind = OpKind::from_mnemonic(word)
            .ok_or_else(|| ProgramError::Parse { line, kind: ParseErrorKind::UnknownMnemonic(word.to_string()) })?;
        let operands = words
            .map(|w| {
                w.parse::<usize>()
                    .map_err(|_| ProgramError::Parse { line, kind: ParseErrorKind::BadOperand(w.to_string()) })
            })
            .collect::<Result<Vec<_>, _>>()?;
        let ins = Instruction::from_parts(kind, &operands).ok_or(ProgramError::Parse {
            line,
            kind: ParseErrorKind::OperandCount {
                mnemonic: kind.mnemonic(),
                expected: kind.arity(),
                found: operands.len(),
            },
        })?;
        seq.push(ins);
        lines.push(line);
    }
    Ok((seq, lines))
}

/// Parses and validates `.ivc` text. Validation failures report the source
/// line of the first offending instruction.
pub fn parse_program(text: &str) -> Result<ComputationSequence, ProgramError> {
    let (seq, lines) = parse_unchecked(text)?;
    if let Err(violations) = seq.validate() {
        let violation = violations.into_iter().next().expect("at least one violation");
        return Err(match violation.index {
            0 => ProgramError::Empty(violation),
            i => ProgramError::Invalid { line: lines[i - 1], violation },
        });
    }
    Ok(seq)
}

impl FromStr for ComputationSequence {
    type Err = ProgramError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_program(s)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Metrics {
    pub length: usize,
    pub max_bit_height: u64,
    pub max_components: usize,
    pub op_counts: BTreeMap<OpKind, usize>,
    pub output_len: usize,
}

#[derive(Clone, Debug)]
pub struct EvalResult {
    /// `values[i - 1]` is the value of instruction `i`.
    pub values: Vec<IntervalValue>,
    pub output: Vec<bool>,
    pub metrics: Metrics,
}

impl EvalResult {
    /// Value of 1-based instruction `index`.
    pub fn value(&self, index: usize) -> &IntervalValue {
        &self.values[index - 1]
    }

    pub fn output_string(&self) -> String {
        bits_to_string(&self.output)
    }
}

pub fn bits_to_string(bits: &[bool]) -> String {
    bits.iter().map(|&b| if b { '1' } else { '0' }).collect()
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EvalError {
    #[error("invalid program: {}", .0.first().map(ToString::to_string).unwrap_or_default())]
    Invalid(Vec<Violation>),
    #[error("instruction {index}: {source}")]
    Resource { index: usize, source: IvError },
    #[error("seed values reference {given} instructions but the sequence has {len}")]
    BadSeed { given: usize, len: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Limits {
    pub max_components: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits { max_components: DEFAULT_COMPONENT_LIMIT }
    }
}

/// Value of a single instruction given the values of everything before it.
/// `values[i - 1]` must hold the value of instruction `i`.
pub fn apply(ins: &Instruction, values: &[IntervalValue], limits: Limits) -> Result<IntervalValue, IvError> {
    let v = |i: usize| &values[i - 1];
    let out = match *ins {
        Instruction::FirstHalf => IntervalValue::first_half(),
        Instruction::And(j, k) => v(j).intersect(v(k)),
        Instruction::Or(j, k) => v(j).union(v(k)),
        Instruction::Not(j) => v(j).complement(),
        Instruction::LShift(j, k) => v(j).lshift(v(k)),
        Instruction::RShift(j, k) => v(j).rshift(v(k)),
        Instruction::Product(j, k) => v(j).product_limited(v(k), limits.max_components)?,
        Instruction::Output(j) => v(j).clone(),
    };
    if out.component_count() > limits.max_components {
        return Err(IvError::ResourceLimit { needed: out.component_count(), limit: limits.max_components });
    }
    Ok(out)
}

#[derive(Clone, Debug, Default)]
pub struct Evaluator {
    limits: Limits,
}

impl Evaluator {
    pub fn new(limits: Limits) -> Self {
        Evaluator { limits }
    }

    pub fn evaluate(&self, seq: &ComputationSequence) -> Result<EvalResult, EvalError> {
        seq.validate().map_err(EvalError::Invalid)?;
        self.run_from(seq, Vec::new())
    }

    /// Evaluates `seq` with the first `seed.len()` values supplied by the caller
    /// instead of computed. Useful for running a segment on arbitrary inputs.
    /// Only the reference discipline is checked; the seeded prefix is trusted.
    pub fn resume(&self, seq: &ComputationSequence, seed: Vec<IntervalValue>) -> Result<EvalResult, EvalError> {
        if seed.len() > seq.len() {
            return Err(EvalError::BadSeed { given: seed.len(), len: seq.len() });
        }
        let skip = seed.len();
        let bad: Vec<Violation> = seq
            .validate()
            .err()
            .unwrap_or_default()
            .into_iter()
            .filter(|v| v.index > skip && matches!(v.kind, ViolationKind::BadReference(_)))
            .collect();
        if !bad.is_empty() {
            return Err(EvalError::Invalid(bad));
        }
        self.run_from(seq, seed)
    }

    fn run_from(&self, seq: &ComputationSequence, mut values: Vec<IntervalValue>) -> Result<EvalResult, EvalError> {
        let start = values.len();
        values.reserve(seq.len() - start);
        let mut output = Vec::new();
        for (pos, ins) in seq.instructions().iter().enumerate().skip(start) {
            let value =
                apply(ins, &values, self.limits).map_err(|source| EvalError::Resource { index: pos + 1, source })?;
            if let Instruction::Output(_) = ins {
                output.push(!value.is_empty());
            }
            values.push(value);
        }
        let metrics = Metrics {
            length: seq.len(),
            max_bit_height: values.iter().map(IntervalValue::bit_height).max().unwrap_or(0),
            max_components: values.iter().map(IntervalValue::component_count).max().unwrap_or(0),
            op_counts: seq.op_counts(),
            output_len: output.len(),
        };
        Ok(EvalResult { values, output, metrics })
    }
}

impl Evaluator {
    /// Evaluates `seq` without keeping every value: each one is handed to
    /// `visit` as `(index, value)` and dropped after its last use. Memory is
    /// bounded by the live set rather than the sequence length.
    pub fn stream(
        &self,
        seq: &ComputationSequence,
        mut visit: impl FnMut(usize, &IntervalValue),
    ) -> Result<(Vec<bool>, Metrics), EvalError> {
        seq.validate().map_err(EvalError::Invalid)?;
        let mut last_use = vec![0usize; seq.len() + 1];
        for (pos, ins) in seq.instructions().iter().enumerate() {
            for j in ins.operands() {
                last_use[j] = pos + 1;
            }
        }
        let mut values: Vec<IntervalValue> = Vec::with_capacity(seq.len());
        let mut output = Vec::new();
        let (mut max_bit_height, mut max_components) = (0, 0);
        for (pos, ins) in seq.instructions().iter().enumerate() {
            let index = pos + 1;
            let value = apply(ins, &values, self.limits).map_err(|source| EvalError::Resource { index, source })?;
            if let Instruction::Output(_) = ins {
                output.push(!value.is_empty());
            }
            max_bit_height = max_bit_height.max(value.bit_height());
            max_components = max_components.max(value.component_count());
            visit(index, &value);
            values.push(if last_use[index] > index { value } else { IntervalValue::empty() });
            for j in ins.operands() {
                if last_use[j] == index {
                    values[j - 1] = IntervalValue::empty();
                }
            }
        }
        let metrics = Metrics {
            length: seq.len(),
            max_bit_height,
            max_components,
            op_counts: seq.op_counts(),
            output_len: output.len(),
        };
        Ok((output, metrics))
    }
}

pub fn evaluate(seq: &ComputationSequence) -> Result<EvalResult, EvalError> {
    Evaluator::default().evaluate(seq)
}

pub fn stats(seq: &ComputationSequence) -> Result<Metrics, EvalError> {
    Evaluator::default().stream(seq, |_, _| {}).map(|(_, m)| m)
}
