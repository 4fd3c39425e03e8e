use ivdl_core::interval::IntervalValue;
use ivdl_core::program::{evaluate, parse_program, ComputationSequence, EvalError, Evaluator, Instruction, Limits};
use ivdl_core::Dyadic;
use proptest::prelude::*;

const M: u64 = 6;

fn value_at(m: u64) -> impl Strategy<Value = IntervalValue> {
    prop::collection::vec(any::<bool>(), 1usize << m).prop_map(move |bits| {
        let cells = bits.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| i as u64);
        IntervalValue::from_cells(m, cells).unwrap()
    })
}

fn value() -> impl Strategy<Value = IntervalValue> {
    value_at(M)
}

fn nonempty(m: u64) -> impl Strategy<Value = IntervalValue> {
    value_at(m).prop_filter("nonempty", |v| !v.is_empty())
}

fn sum(a: &Dyadic, b: &Dyadic) -> Dyadic {
    a.checked_add(b).unwrap()
}

fn instruction(len: usize) -> impl Strategy<Value = Instruction> {
    let r = 1..=len;
    prop_oneof![
        (r.clone(), r.clone()).prop_map(|(j, k)| Instruction::And(j, k)),
        (r.clone(), r.clone()).prop_map(|(j, k)| Instruction::Or(j, k)),
        r.clone().prop_map(Instruction::Not),
        (r.clone(), r.clone()).prop_map(|(j, k)| Instruction::LShift(j, k)),
        (r.clone(), r.clone()).prop_map(|(j, k)| Instruction::RShift(j, k)),
        (r.clone(), r.clone()).prop_map(|(j, k)| Instruction::Product(j, k)),
        r.prop_map(Instruction::Output),
    ]
}

/// Valid programs of up to `max` instructions.
fn program(max: usize) -> impl Strategy<Value = ComputationSequence> {
    prop::collection::vec(any::<prop::sample::Index>(), 0..max).prop_flat_map(|picks| {
        let gens: Vec<_> = (0..picks.len()).map(|i| instruction(i + 1)).collect();
        gens.prop_map(|body| {
            let mut seq = ComputationSequence::new(vec![Instruction::FirstHalf]);
            for ins in body {
                seq.push(ins);
            }
            seq
        })
    })
}

proptest! {
    #[test]
    fn boolean_algebra(a in value(), b in value(), c in value()) {
        prop_assert_eq!(a.complement().complement(), a.clone());
        prop_assert_eq!(a.union(&b).complement(), a.complement().intersect(&b.complement()));
        prop_assert_eq!(a.intersect(&b).complement(), a.complement().union(&b.complement()));
        prop_assert_eq!(a.union(&b), b.union(&a));
        prop_assert_eq!(a.intersect(&b), b.intersect(&a));
        prop_assert_eq!(a.union(&b).union(&c), a.union(&b.union(&c)));
        prop_assert_eq!(a.intersect(&b.union(&c)), a.intersect(&b).union(&a.intersect(&c)));
        prop_assert!(a.union(&a.complement()).is_full());
        prop_assert!(a.intersect(&a.complement()).is_empty());
    }

    #[test]
    fn measure_is_additive(a in value(), b in value()) {
        // |A ∪ B| - |A| = |B| - |A ∩ B|, kept inside [0, 1]
        let lhs = a.union(&b).measure().checked_sub(&a.measure()).unwrap();
        let rhs = b.measure().checked_sub(&a.intersect(&b).measure()).unwrap();
        prop_assert_eq!(lhs, rhs);
        prop_assert_eq!(sum(&a.measure(), &a.complement().measure()), Dyadic::one());
    }

    #[test]
    fn rshift_preserves_measure(a in value(), b in value()) {
        let shifted = a.rshift(&b);
        prop_assert_eq!(shifted.measure(), a.measure());
        prop_assert!(shifted.bit_height() <= M);
    }

    #[test]
    fn lshift_drops_the_prefix(a in value(), b in value()) {
        let d = b.flength();
        let shifted = a.lshift(&b);
        let kept = a.intersect(&IntervalValue::normalize([(d.clone(), Dyadic::one())]).unwrap());
        prop_assert_eq!(shifted.measure(), kept.measure());
        prop_assert_eq!(shifted.rshift(&b), kept);
        prop_assert!(shifted.bit_height() <= M);
    }

    #[test]
    fn product_scales_measure(b in value_at(3), a in value_at(3)) {
        let p = b.product(&a).unwrap();
        prop_assert_eq!(p.measure(), b.measure().mul(&a.measure()));
        prop_assert!(p.bit_height() <= 6);
        prop_assert!(p.intersect(&b) == p);
    }

    #[test]
    fn first_component_is_a_prefix(a in nonempty(M)) {
        let fc = a.first_component();
        prop_assert_eq!(fc.component_count(), 1);
        prop_assert_eq!(fc.intersect(&a), fc.clone());
        prop_assert_eq!(fc.measure(), a.flength());
        let rest = a.intersect(&fc.complement());
        if let (Some(first), Some(next)) = (fc.components().first(), rest.components().first()) {
            prop_assert!(first.hi < next.lo);
        }
    }

    #[test]
    fn values_round_trip_as_text(a in value()) {
        let text = a.to_string();
        prop_assert_eq!(text.parse::<IntervalValue>().unwrap(), a);
    }

    #[test]
    fn programs_round_trip_as_text(seq in program(24)) {
        prop_assert!(seq.validate().is_ok());
        let text = seq.serialize();
        prop_assert_eq!(parse_program(&text).unwrap(), seq);
    }

    #[test]
    fn streaming_matches_full_evaluation(seq in program(16)) {
        let limits = Limits { max_components: 1 << 12 };
        let full = Evaluator::new(limits).evaluate(&seq);
        let mut seen = Vec::new();
        let streamed = Evaluator::new(limits).stream(&seq, |i, v| seen.push((i, v.clone())));
        match (full, streamed) {
            (Ok(r), Ok((output, metrics))) => {
                prop_assert_eq!(&r.output, &output);
                prop_assert_eq!(&r.metrics, &metrics);
                for (i, v) in seen {
                    prop_assert_eq!(r.value(i), &v);
                }
            }
            (Err(EvalError::Resource { index: a, .. }), Err(EvalError::Resource { index: b, .. })) => prop_assert_eq!(a, b),
            (f, s) => prop_assert!(false, "full {:?} vs streamed {:?}", f.map(|r| r.output), s.map(|r| r.0)),
        }
    }
}

#[test]
fn first_half_then_output() {
    let seq: ComputationSequence = "FIRSTHALF\nOUTPUT 1\n".parse().unwrap();
    assert_eq!(evaluate(&seq).unwrap().output_string(), "1");
}
