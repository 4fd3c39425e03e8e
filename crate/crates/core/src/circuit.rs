// Copyright 2026 the ivdl Authors
// SPDX-License-Identifier: Apache-2.0

//! Boolean circuits lifted onto interval-values.
//!
//! A [`Wire`] is an instruction index. Read pointwise, a value carries one bit
//! per point `r` of `[0, 1)`: `r` in the value means 1. AND, OR and NOT act on
//! every point independently, so a gate network emitted here computes the same
//! Boolean function on every slice at once. Constant wires are `[0, 1)` (1)
//! and the empty value (0).
//!
//! All multi-bit buses are MSB first.

use thiserror::Error;

use crate::program::{ComputationSequence, Instruction};

/// 1-based index of the instruction carrying a wire's value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Wire(pub usize);

impl Wire {
    pub fn index(self) -> usize {
        self.0
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CircuitError {
    #[error("bus width mismatch: {left} vs {right}")]
    WidthMismatch { left: usize, right: usize },
}

/// Index of `FIRSTHALF`, `[0, 1/2)`.
pub const FIRST_HALF: Wire = Wire(1);
/// Index of `RSHIFT 1 1`, `[1/2, 1)`.
pub const SECOND_HALF: Wire = Wire(2);

/// Appends gates to a computation sequence.
///
/// A fresh builder holds the two-instruction prologue `FIRSTHALF; RSHIFT 1 1`,
/// from which the constants are derived: `OR 1 2` is 1 and `AND 1 2` is 0.
#[derive(Clone, Debug)]
pub struct SegmentBuilder {
    seq: ComputationSequence,
    /// Known global constant per instruction, `None` when slice dependent.
    constant: Vec<Option<bool>>,
    one: Option<Wire>,
    zero: Option<Wire>,
    gates: usize,
    fold_constants: bool,
}

impl Default for SegmentBuilder {
    fn default() -> Self {
        Self::new()
    }
}

impl SegmentBuilder {
    pub fn new() -> Self {
        let mut b = SegmentBuilder {
            seq: ComputationSequence::default(),
            constant: Vec::new(),
            one: None,
            zero: None,
            gates: 0,
            fold_constants: false,
        };
        b.push(Instruction::FirstHalf);
        b.push(Instruction::RShift(1, 1));
        b
    }

    /// When enabled, gates whose operands are both global constants reuse the
    /// shared constant wires instead of emitting an instruction. Off by default.
    pub fn with_constant_folding(mut self, on: bool) -> Self {
        self.fold_constants = on;
        self
    }

    pub fn len(&self) -> usize {
        self.seq.len()
    }

    pub fn is_empty(&self) -> bool {
        self.seq.is_empty()
    }

    /// Number of AND/OR/NOT gates emitted so far.
    pub fn gate_count(&self) -> usize {
        self.gates
    }

    pub fn sequence(&self) -> &ComputationSequence {
        &self.seq
    }

    pub fn finish(self) -> ComputationSequence {
        self.seq
    }

    /// Global constant carried by `w`, if statically known.
    pub fn constant_of(&self, w: Wire) -> Option<bool> {
        self.constant[w.0 - 1]
    }

    /// Appends a raw instruction. Constant tracking treats shifts and products
    /// conservatively.
    pub fn push(&mut self, ins: Instruction) -> Wire {
        let known = match ins {
            Instruction::And(j, k) => match (self.known(j), self.known(k)) {
                (Some(false), _) | (_, Some(false)) => Some(false),
                (Some(true), Some(true)) => Some(true),
                _ if (j, k) == (1, 2) || (j, k) == (2, 1) => Some(false),
                _ => None,
            },
            Instruction::Or(j, k) => match (self.known(j), self.known(k)) {
                (Some(true), _) | (_, Some(true)) => Some(true),
                (Some(false), Some(false)) => Some(false),
                _ if (j, k) == (1, 2) || (j, k) == (2, 1) => Some(true),
                _ => None,
            },
            Instruction::Not(j) => self.known(j).map(|b| !b),
            Instruction::Output(j) => self.known(j),
            // shifts of [0,1) and of the empty value are fixed points
            Instruction::LShift(j, _) | Instruction::RShift(j, _) if self.known(j) == Some(false) => Some(false),
            Instruction::RShift(j, _) if self.known(j) == Some(true) => Some(true),
            _ => None,
        };
        self.seq.push(ins);
        self.constant.push(known);
        Wire(self.seq.len())
    }

    fn known(&self, i: usize) -> Option<bool> {
        self.constant.get(i.wrapping_sub(1)).copied().flatten()
    }

    /// The shared constant-1 wire, emitted as `OR 1 2` on first use.
    pub fn one(&mut self) -> Wire {
        if let Some(w) = self.one {
            return w;
        }
        let w = self.push(Instruction::Or(FIRST_HALF.0, SECOND_HALF.0));
        self.one = Some(w);
        w
    }

    /// The shared constant-0 wire, emitted as `AND 1 2` on first use.
    pub fn zero(&mut self) -> Wire {
        if let Some(w) = self.zero {
            return w;
        }
        let w = self.push(Instruction::And(FIRST_HALF.0, SECOND_HALF.0));
        self.zero = Some(w);
        w
    }

    fn constant_wire(&mut self, bit: bool) -> Wire {
        if bit {
            self.one()
        } else {
            self.zero()
        }
    }

    fn gate(&mut self, ins: Instruction) -> Wire {
        if self.fold_constants {
            let folded = match ins {
                Instruction::And(j, k) => self.known(j).zip(self.known(k)).map(|(a, b)| a && b),
                Instruction::Or(j, k) => self.known(j).zip(self.known(k)).map(|(a, b)| a || b),
                Instruction::Not(j) => self.known(j).map(|a| !a),
                _ => None,
            };
            if let Some(bit) = folded {
                return self.constant_wire(bit);
            }
        }
        self.gates += 1;
        self.push(ins)
    }

    pub fn and(&mut self, u: Wire, v: Wire) -> Wire {
        self.gate(Instruction::And(u.0, v.0))
    }

    pub fn or(&mut self, u: Wire, v: Wire) -> Wire {
        self.gate(Instruction::Or(u.0, v.0))
    }

    pub fn not(&mut self, u: Wire) -> Wire {
        self.gate(Instruction::Not(u.0))
    }

    /// `(u AND NOT v) OR (NOT u AND v)`, five instructions.
    pub fn xor(&mut self, u: Wire, v: Wire) -> Wire {
        let nu = self.not(u);
        let nv = self.not(v);
        let left = self.and(u, nv);
        let right = self.and(nu, v);
        self.or(left, right)
    }

    /// `sel ? a : b`, with `not_sel` supplied so a bus can share one inverter.
    pub fn mux(&mut self, sel: Wire, not_sel: Wire, a: Wire, b: Wire) -> Wire {
        let left = self.and(sel, a);
        let right = self.and(not_sel, b);
        self.or(left, right)
    }

    /// One constant wire per bit: `OR 1 2` for 1, `AND 1 2` for 0. Each bit
    /// gets its own instruction so inputs have distinct indices.
    pub fn emit_const_bits(&mut self, bits: &[bool]) -> Vec<Wire> {
        bits.iter()
            .map(|&b| {
                let ins = if b { Instruction::Or(1, 2) } else { Instruction::And(1, 2) };
                self.push(ins)
            })
            .collect()
    }

    /// `U + V` for equal-width buses; the result is one bit wider.
    pub fn emit_ripple_adder(&mut self, u: &[Wire], v: &[Wire]) -> Result<Vec<Wire>, CircuitError> {
        check_width(u.len(), v.len())?;
        let mut carry = self.zero();
        let mut sum = Vec::with_capacity(u.len() + 1);
        for (&a, &b) in u.iter().rev().zip(v.iter().rev()) {
            let t = self.xor(a, b);
            sum.push(self.xor(t, carry));
            let g = self.and(a, b);
            let p = self.and(t, carry);
            carry = self.or(g, p);
        }
        sum.push(carry);
        sum.reverse();
        Ok(sum)
    }

    /// `ACC mod P` for `ACC < 2P` by one conditional subtraction.
    ///
    /// `P` is zero-extended to the width of `ACC`; the result has the width of
    /// `P`, which holds any value below `P`.
    pub fn emit_mod_reduce(&mut self, acc: &[Wire], p: &[Wire]) -> Result<Vec<Wire>, CircuitError> {
        if acc.len() < p.len() || p.is_empty() {
            return Err(CircuitError::WidthMismatch { left: acc.len(), right: p.len() });
        }
        let zero = self.zero();
        let pad = acc.len() - p.len();
        let p_ext: Vec<Wire> = std::iter::repeat_n(zero, pad).chain(p.iter().copied()).collect();

        // ACC - P with a borrow chain, LSB first
        let mut borrow = zero;
        let mut diff = Vec::with_capacity(acc.len());
        for (&a, &b) in acc.iter().rev().zip(p_ext.iter().rev()) {
            let t = self.xor(a, b);
            diff.push(self.xor(t, borrow));
            let na = self.not(a);
            let under = self.and(na, b);
            let nt = self.not(t);
            let pass = self.and(nt, borrow);
            borrow = self.or(under, pass);
        }
        diff.reverse();

        // final borrow set means ACC < P: keep ACC
        let keep = self.not(borrow);
        let out = acc[pad..].iter().zip(&diff[pad..]).map(|(&a, &d)| self.mux(borrow, keep, a, d)).collect();
        Ok(out)
    }

    /// `(U * V) mod P` by double-and-add over the bits of `U`, MSB first.
    /// Requires `U, V < P` and `P >= 2` on every slice.
    pub fn emit_modmul(&mut self, u: &[Wire], v: &[Wire], p: &[Wire]) -> Result<Vec<Wire>, CircuitError> {
        check_width(u.len(), v.len())?;
        check_width(u.len(), p.len())?;
        let zero = self.zero();
        let mut acc = vec![zero; p.len()];
        for &bit in u {
            let mut doubled = acc.clone();
            doubled.push(zero);
            acc = self.emit_mod_reduce(&doubled, p)?;
            let addend: Vec<Wire> = v.iter().map(|&vj| self.and(bit, vj)).collect();
            let sum = self.emit_ripple_adder(&acc, &addend)?;
            acc = self.emit_mod_reduce(&sum, p)?;
        }
        Ok(acc)
    }

    /// Per-bit equality wires plus their running conjunction.
    ///
    /// Bit `k` uses five instructions: `AND(u,v)`, `NOT u`, `NOT v`,
    /// `AND(¬u,¬v)`, `OR` of the two ANDs. The conjunction starts with
    /// `AND(eq1, eq1)` and folds each later bit into the running result.
    pub fn emit_equality(&mut self, u: &[Wire], v: &[Wire]) -> Result<Equality, CircuitError> {
        check_width(u.len(), v.len())?;
        let mut bits = Vec::with_capacity(u.len());
        for (&a, &b) in u.iter().zip(v) {
            let both = self.and(a, b);
            let na = self.not(a);
            let nb = self.not(b);
            let neither = self.and(na, nb);
            bits.push(self.or(both, neither));
        }
        let mut chain = Vec::with_capacity(bits.len());
        if let Some(&first) = bits.first() {
            let mut acc = self.and(first, first);
            chain.push(acc);
            for &eq in &bits[1..] {
                acc = self.and(eq, acc);
                chain.push(acc);
            }
        }
        Ok(Equality { bits, chain })
    }
}

/// Wires produced by [`SegmentBuilder::emit_equality`].
#[derive(Clone, Debug)]
pub struct Equality {
    /// `bits[k]` holds where bit `k` of both buses agrees.
    pub bits: Vec<Wire>,
    /// `chain[k]` holds where bits `0..=k` all agree.
    pub chain: Vec<Wire>,
}

impl Equality {
    /// The all-bits-equal wire. `None` for zero-width buses.
    pub fn result(&self) -> Option<Wire> {
        self.chain.last().copied()
    }
}

fn check_width(left: usize, right: usize) -> Result<(), CircuitError> {
    if left == right {
        Ok(())
    } else {
        Err(CircuitError::WidthMismatch { left, right })
    }
}

/// `value` as `width` bits, MSB first. Higher bits are dropped.
pub fn to_bits(value: u64, width: usize) -> Vec<bool> {
    (0..width).rev().map(|i| i < 64 && (value >> i) & 1 == 1).collect()
}

/// Integer spelled by MSB-first bits.
pub fn from_bits(bits: &[bool]) -> u64 {
    bits.iter().fold(0, |acc, &b| (acc << 1) | u64::from(b))
}
