//! Deeper model coverage at L=24, the smallest scale where a non-trivial
//! string ("0") gains a containing model. The oracle cannot reach this
//! scale, so the expected values here are hand-derived from the machine's
//! measured constants: C("0")=3, C({empty})=18, C({"0"})=24.

use algstat::bits::BitString;
use algstat::codec::FiniteSetModel;
use algstat::models::{self, ModelError};
use algstat::profiles::{self, ProfileValue, SlackBound};
use algstat::vm::MachineConfig;
use algstat::{complexity, enumerate};

fn bs(s: &str) -> BitString {
    BitString::from_binary_str(s).unwrap()
}

#[test]
fn two_model_scale_behaves() {
    let machine = MachineConfig::default();
    let plain = enumerate::build_run_table(&machine, &BitString::new(), 24, 32).unwrap();
    let model_list = models::harvest_models(&plain, 24).unwrap();
    let sets: Vec<&FiniteSetModel> = model_list.iter().map(|m| &m.set).collect();
    assert_eq!(
        sets,
        vec![
            &FiniteSetModel::singleton(BitString::new()),
            &FiniteSetModel::singleton(bs("0")),
        ]
    );
    assert_eq!(model_list[0].complexity, 18);
    assert_eq!(model_list[1].complexity, 24);

    let cond = models::build_cond_tables(&machine, &model_list, None, 24, 32).unwrap();
    assert_eq!(cond.len(), 2);

    // Exact deficiency algebra over every harvested pair.
    let mut pairs = 0;
    for record in &model_list {
        let ct = cond.get(&record.set).unwrap();
        for x in record.set.elements() {
            let pair = models::deficiency_pair(x, record, ct, &plain).unwrap();
            let lhs = pair.delta - pair.d;
            let rhs =
                record.complexity as f64 + pair.conditional_used as f64 - pair.plain_used as f64;
            assert!((lhs - rhs).abs() <= 1e-12);
            assert!(pair.d <= record.set.log_size() + 1e-12);
            pairs += 1;
        }
    }
    assert_eq!(pairs, 2);

    // The two-part overhead makes d negative for "0" in its own singleton:
    // C("0" | E({"0"})) = C("0") = 3 here (the unconditional witness is
    // already as short as any copy-from-input program).
    let zero = bs("0");
    let m0 = &model_list[1];
    let ct0 = cond.get(&m0.set).unwrap();
    let d = models::randomness_deficiency(&zero, m0, ct0).unwrap();
    assert_eq!(d, -3.0);
    let delta = models::optimality_deficiency(&zero, m0, &plain).unwrap();
    assert_eq!(delta, 21.0);

    // best_models: the singleton {"0"} is the only containing model.
    let best = models::best_models(&zero, 24, &model_list, &plain, &cond).unwrap();
    assert_eq!(best.min_d.1.set, m0.set);
    assert_eq!(best.min_delta.0, 21.0);
    assert_eq!(
        models::best_models(&zero, 23, &model_list, &plain, &cond).unwrap_err(),
        ModelError::NoModel
    );

    // Profiles for "0" exist at this scale and cohere.
    let b = profiles::bounded_profile(&zero, &plain).unwrap();
    let h = profiles::structure_function(&zero, &model_list, &plain).unwrap();
    let n = profiles::normalized_structure_profile(&zero, &model_list, &plain).unwrap();
    let st = profiles::stochasticity_profile(&zero, &model_list, &cond).unwrap();
    assert!(b.is_non_increasing());
    assert!(h.is_non_increasing());
    assert!(st.profile.is_non_increasing());
    assert_eq!(h.value(23), ProfileValue::Top);
    assert_eq!(h.value(24), ProfileValue::Finite(0.0));
    // At k = C({x}) the normalized curve equals delta(x|{x}).
    assert_eq!(n.value(24), ProfileValue::Finite(21.0));
    assert_eq!(st.profile.value(24), ProfileValue::Finite(-3.0));
    assert_eq!(st.clamped.value(24), ProfileValue::Finite(0.0));

    // Running-min consistency between the normalized curve and the best
    // optimality deficiency under each budget.
    let mut running_min = f64::INFINITY;
    for k in 0..=24u32 {
        if let ProfileValue::Finite(v) = n.value(k) {
            running_min = running_min.min(v);
            let best_delta = models::best_models(&zero, k, &model_list, &plain, &cond)
                .unwrap()
                .min_delta
                .0;
            assert!((running_min - best_delta).abs() <= 1e-12);
            assert!(v + 1e-12 >= best_delta);
        }
    }

    let report =
        profiles::coincidence_report(&zero, &b, &n, &st.profile, SlackBound { a: 1.0, b: 30.0 })
            .unwrap();
    assert!(report.epsilons.max().is_finite());

    // Sufficient statistic: h(24)+24 <= C("0")+c first holds at c=21.
    let s = profiles::minimal_sufficient_statistic(&zero, &model_list, &plain, 21).unwrap();
    assert_eq!(s.k_star, 24);
    assert_eq!(s.witness.set, m0.set);
    assert!(profiles::minimal_sufficient_statistic(&zero, &model_list, &plain, 20).is_err());
    assert_eq!(
        profiles::sophistication(&zero, &model_list, &plain, 21).unwrap(),
        24
    );

    // k* and the best-model minima shrink (weakly) as the budget grows.
    let mut prev_k = u32::MAX;
    for c in 21..=30 {
        let k = profiles::sophistication(&zero, &model_list, &plain, c).unwrap();
        assert!(k <= prev_k);
        prev_k = k;
    }
    let mut prev = (f64::INFINITY, f64::INFINITY);
    for alpha in 24..=26 {
        let best = models::best_models(&zero, alpha, &model_list, &plain, &cond).unwrap();
        assert!(best.min_d.0 <= prev.0 && best.min_delta.0 <= prev.1);
        prev = (best.min_d.0, best.min_delta.0);
    }

    // K^t settles at C(x) once t reaches the busy-beaver bound of C(x).
    let c = complexity::plain_complexity(&zero, &plain)
        .unwrap()
        .finite()
        .unwrap();
    assert_eq!(c, 3);
    let bb = complexity::busy_beaver_bound(c, &plain).unwrap();
    assert_eq!(
        complexity::time_bounded_complexity(&zero, bb, &plain)
            .unwrap()
            .finite(),
        Some(3)
    );
}
