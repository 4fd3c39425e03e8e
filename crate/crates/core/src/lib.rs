// Copyright 2026 the ivdl Authors
// SPDX-License-Identifier: Apache-2.0

//! Exact interval-valued computing.
//!
//! - [`dyadic`] and [`interval`]: the value domain, finite unions of half-open
//!   dyadic intervals in `[0, 1)`, with the paradigm's operators.
//! - [`program`]: computation sequences, their `.ivc` text form and evaluator.
//! - [`circuit`]: Boolean circuits (adders, modular reduction and
//!   multiplication, equality) emitted as instruction segments.
//! - [`dlog`]: compiles a discrete-logarithm instance `(a, b, p)` into a
//!   sequence whose output tape spells an exponent `x` with `a^x = b mod p`.
//! - [`oracle`]: brute-force and fixed-resolution reference implementations.

pub mod circuit;
pub mod dlog;
pub mod dyadic;
pub mod interval;
pub mod oracle;
pub mod program;

pub use dyadic::Dyadic;
pub use interval::IntervalValue;
pub use program::{ComputationSequence, Instruction};
