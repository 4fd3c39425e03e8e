//! Pointwise lifting: on every grid slice, the membership bits of a segment's
//! output wires equal the plain circuit applied to that slice's input bits.

use ivdl_core::circuit::{SegmentBuilder, Wire};
use ivdl_core::interval::IntervalValue;
use ivdl_core::program::{EvalResult, Evaluator, Instruction};
use ivdl_core::Dyadic;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// `width`-bit integers, one per slice, laid out as wire values MSB first.
fn bus_values(ints: &[u64], width: usize, m: u64) -> Vec<IntervalValue> {
    (0..width)
        .map(|j| {
            let bit = width - 1 - j;
            let cells = ints.iter().enumerate().filter(|(_, &v)| v >> bit & 1 == 1).map(|(l, _)| l as u64);
            IntervalValue::from_cells(m, cells).unwrap()
        })
        .collect()
}

fn read_bus(r: &EvalResult, wires: &[Wire], l: u64, m: u64) -> u64 {
    let mid = Dyadic::ratio(2 * l + 1, m + 1).unwrap();
    wires.iter().fold(0, |acc, w| (acc << 1) | u64::from(r.value(w.index()).contains(&mid).unwrap()))
}

struct Harness {
    seg: SegmentBuilder,
    seed: Vec<IntervalValue>,
}

impl Harness {
    fn new() -> Self {
        let seg = SegmentBuilder::new();
        let seed = vec![IntervalValue::first_half(), IntervalValue::first_half().complement()];
        Harness { seg, seed }
    }

    /// Placeholder wires whose values are injected at evaluation time.
    fn input(&mut self, values: Vec<IntervalValue>) -> Vec<Wire> {
        values
            .into_iter()
            .map(|v| {
                self.seed.push(v);
                self.seg.push(Instruction::And(1, 1))
            })
            .collect()
    }

    fn run(self) -> EvalResult {
        Evaluator::default().resume(self.seg.sequence(), self.seed).unwrap()
    }
}

fn check_modmul(rng: &mut ChaCha8Rng, n: usize, m: u64) {
    let slices = 1usize << m;
    let p: Vec<u64> = (0..slices).map(|_| rng.gen_range(2..1u64 << n)).collect();
    let u: Vec<u64> = p.iter().map(|&p| rng.gen_range(0..p)).collect();
    let v: Vec<u64> = p.iter().map(|&p| rng.gen_range(0..p)).collect();
    let mut h = Harness::new();
    let uw = h.input(bus_values(&u, n, m));
    let vw = h.input(bus_values(&v, n, m));
    let pw = h.input(bus_values(&p, n, m));
    let out = h.seg.emit_modmul(&uw, &vw, &pw).unwrap();
    let r = h.run();
    for l in 0..slices {
        let got = read_bus(&r, &out, l as u64, m);
        assert_eq!(got, u[l] * v[l] % p[l], "n={n} slice {l}: {}*{} mod {}", u[l], v[l], p[l]);
    }
    assert!(r.values.iter().all(|v| v.bit_height() <= m));
}

#[test]
fn modmul_lifts_pointwise() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for n in 2..=4 {
        check_modmul(&mut rng, n, n as u64);
    }
    for n in 5..=8 {
        check_modmul(&mut rng, n, 6);
    }
}

#[test]
fn adder_xor_and_equality_lift_pointwise() {
    let mut rng = ChaCha8Rng::seed_from_u64(32);
    for n in 1..=6usize {
        let m = n.min(4) as u64 + 2;
        let slices = 1usize << m;
        let u: Vec<u64> = (0..slices).map(|_| rng.gen_range(0..1u64 << n)).collect();
        // equal on roughly half the slices
        let v: Vec<u64> = u.iter().map(|&x| if rng.gen() { x } else { rng.gen_range(0..1u64 << n) }).collect();
        let mut h = Harness::new();
        let uw = h.input(bus_values(&u, n, m));
        let vw = h.input(bus_values(&v, n, m));
        let sum = h.seg.emit_ripple_adder(&uw, &vw).unwrap();
        let xor: Vec<Wire> = uw.iter().zip(&vw).map(|(&a, &b)| h.seg.xor(a, b)).collect();
        let eq = h.seg.emit_equality(&uw, &vw).unwrap().result().unwrap();
        let r = h.run();
        for l in 0..slices {
            let lu = l as u64;
            assert_eq!(read_bus(&r, &sum, lu, m), u[l] + v[l]);
            assert_eq!(read_bus(&r, &xor, lu, m), u[l] ^ v[l]);
            assert_eq!(read_bus(&r, &[eq], lu, m) == 1, u[l] == v[l], "n={n} slice {l}");
        }
    }
}

#[test]
fn mod_reduce_lifts_pointwise() {
    let mut rng = ChaCha8Rng::seed_from_u64(33);
    for n in 2..=6usize {
        let m = 5;
        let slices = 1usize << m;
        let p: Vec<u64> = (0..slices).map(|_| rng.gen_range(1..1u64 << n)).collect();
        let acc: Vec<u64> = p.iter().map(|&p| rng.gen_range(0..2 * p)).collect();
        let mut h = Harness::new();
        let aw = h.input(bus_values(&acc, n + 1, m));
        let pw = h.input(bus_values(&p, n, m));
        let out = h.seg.emit_mod_reduce(&aw, &pw).unwrap();
        assert_eq!(out.len(), n);
        let r = h.run();
        for l in 0..slices {
            assert_eq!(read_bus(&r, &out, l as u64, m), acc[l] % p[l]);
        }
    }
}
