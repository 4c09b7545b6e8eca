//! Property tests for the machine, the codec and the curve metric.

use proptest::prelude::*;

use algstat::bits::BitString;
use algstat::codec;
use algstat::profiles::{self, Profile, ProfileKind, ProfileValue, Provenance};
use algstat::vm::{self, ExecStatus};

fn arb_bits(max_len: usize) -> impl Strategy<Value = BitString> {
    proptest::collection::vec(0u8..=1, 0..=max_len).prop_map(BitString::from_bits)
}

proptest! {
    #[test]
    fn element_encoding_is_prefix_free(a in arb_bits(12), b in arb_bits(12)) {
        let ea = codec::encode_element(&a);
        let eb = codec::encode_element(&b);
        if a != b {
            let (short, long) = if ea.len() <= eb.len() { (&ea, &eb) } else { (&eb, &ea) };
            let is_prefix =
                short.len() < long.len() && short.iter().zip(long.iter()).all(|(x, y)| x == y);
            prop_assert!(!is_prefix, "{a:?} / {b:?}");
        } else {
            prop_assert_eq!(ea, eb);
        }
    }

    #[test]
    fn set_encoding_round_trips_and_is_injective(
        words in proptest::collection::vec(arb_bits(6), 1..6),
        extra in arb_bits(6),
    ) {
        let set = codec::canonicalize(&words).unwrap();
        let coded = codec::encode_set(&set);
        prop_assert_eq!(codec::decode_set(&coded).unwrap(), set.clone());

        let mut more = words.clone();
        more.push(extra);
        let other = codec::canonicalize(&more).unwrap();
        if other != set {
            prop_assert_ne!(codec::encode_set(&other), coded);
        }
    }

    #[test]
    fn wire_form_round_trips(b in arb_bits(40)) {
        let wire = b.to_string();
        prop_assert_eq!(wire.parse::<BitString>().unwrap(), b.clone());
        let json = serde_json::to_string(&b).unwrap();
        prop_assert_eq!(serde_json::from_str::<BitString>(&json).unwrap(), b);
    }

    #[test]
    fn execution_caps_are_monotone(raw in arb_bits(18), input in arb_bits(4), cap in 0u32..40) {
        let small = vm::run_raw(&raw, &input, cap);
        let large = vm::run_raw(&raw, &input, cap + 7);
        // Outputs grow monotonically; a halt is final.
        prop_assert!(small.output.len() <= large.output.len());
        let prefix: Vec<u8> = large.output.iter().take(small.output.len()).collect();
        prop_assert_eq!(BitString::from_bits(prefix), small.output.clone());
        if small.status == ExecStatus::Halted {
            prop_assert_eq!(small, large);
        } else if small.status == ExecStatus::StepLimit {
            prop_assert_eq!(small.steps, cap);
        }
    }

    #[test]
    fn distance_is_a_pseudometric(
        p in proptest::collection::vec(-3.0f64..8.0, 5),
        q in proptest::collection::vec(-3.0f64..8.0, 5),
        r in proptest::collection::vec(-3.0f64..8.0, 5),
        tops in proptest::collection::vec(0usize..=3, 3),
    ) {
        let prov = Provenance { max_len: 4, step_cap: 9, machine_tag: "prop".into() };
        // Top sentinels appear only as a prefix, as in pipeline profiles.
        let mk = |v: &[f64], top_prefix: usize| Profile::new(
            ProfileKind::Structure,
            v.iter()
                .enumerate()
                .map(|(i, x)| if i < top_prefix { ProfileValue::Top } else { ProfileValue::Finite(*x) })
                .collect(),
            prov.clone(),
        );
        let (p, q, r) = (mk(&p, tops[0]), mk(&q, tops[1]), mk(&r, tops[2]));
        let dpq = profiles::profile_distance(&p, &q).unwrap();
        let dqp = profiles::profile_distance(&q, &p).unwrap();
        let dpr = profiles::profile_distance(&p, &r).unwrap();
        let dqr = profiles::profile_distance(&q, &r).unwrap();
        prop_assert!((dpq - dqp).abs() <= 1e-9);
        prop_assert_eq!(profiles::profile_distance(&p, &p).unwrap(), 0.0);
        prop_assert!(dpr <= dpq + dqr + 1e-9, "{dpr} > {dpq} + {dqr}");
    }
}

proptest! {
    /// Dense boundary sampling is an independent route to the Hausdorff
    /// distance: the exact value may exceed the sampled one by at most the
    /// grid pitch (the distance field is 1-Lipschitz along the boundary).
    #[test]
    fn distance_agrees_with_dense_sampling(
        p in proptest::collection::vec(-2.0f64..6.0, 2..6),
        q in proptest::collection::vec(-2.0f64..6.0, 2..6),
    ) {
        let k = p.len().min(q.len());
        let prov = Provenance { max_len: (k - 1) as u32, step_cap: 9, machine_tag: "prop".into() };
        let mk = |v: &[f64]| Profile::new(
            ProfileKind::Structure,
            v[..k].iter().map(|x| ProfileValue::Finite(*x)).collect(),
            prov.clone(),
        );
        let (p, q) = (mk(&p), mk(&q));
        let exact = profiles::profile_distance(&p, &q).unwrap();

        let pitch = 1.0 / 64.0;
        let sampled_directed = |from: &Profile, to: &Profile| -> f64 {
            let vals = from.numeric_values();
            let mut worst = 0.0f64;
            let mut t = 0.0;
            while t <= (k - 1) as f64 + 1e-9 {
                let idx = (t.floor() as usize).min(k - 1);
                let mut heights = vec![vals[idx]];
                if (t - t.round()).abs() < 1e-12 && t.round() as usize >= 1 {
                    heights.push(vals[t.round() as usize - 1]);
                }
                for v in heights {
                    worst = worst.max(profiles::point_to_upper_graph_distance(t, v, to));
                }
                t += pitch;
            }
            worst
        };
        let sampled = sampled_directed(&p, &q).max(sampled_directed(&q, &p));
        prop_assert!(sampled <= exact + 1e-9, "sampled {sampled} > exact {exact}");
        prop_assert!(exact <= sampled + pitch + 1e-9, "exact {exact} >> sampled {sampled}");
    }
}

#[test]
fn reading_past_input_end_equals_zero_padding() {
    // Exhaustive over all programs of length <= 9 and inputs of length <= 2.
    let inputs: Vec<BitString> = algstat::verify::strings_up_to(2);
    for len in 0..=9u32 {
        for v in 0..(1u64 << len) {
            let raw = BitString::from_u64_msb(v, len as usize);
            if vm::parse_program(&raw).is_none() {
                continue;
            }
            for input in &inputs {
                let padded = input.concat(&BitString::from_bits([0, 0, 0]));
                assert_eq!(
                    vm::run_raw(&raw, input, 32),
                    vm::run_raw(&raw, &padded, 32),
                    "program {raw:?} input {input:?}"
                );
            }
        }
    }
}

#[test]
fn execution_is_deterministic_across_threads() {
    let raw = BitString::from_binary_str("010101011100110011").unwrap();
    let input = BitString::from_binary_str("10").unwrap();
    let reference = vm::run_raw(&raw, &input, 50);
    std::thread::scope(|scope| {
        for _ in 0..8 {
            scope.spawn(|| {
                for _ in 0..100 {
                    assert_eq!(vm::run_raw(&raw, &input, 50), reference);
                }
            });
        }
    });
}
