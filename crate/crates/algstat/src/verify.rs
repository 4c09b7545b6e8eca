//! The verification suite: named checks over the whole stack, runnable at
//! different scales. Each check certifies the optimized pipeline against
//! hand-derived anchors, exact invariants, or the brute-force oracle, and
//! reports one pass/fail line.

use std::fmt;

use crate::bits::BitString;
use crate::codec;
use crate::complexity;
use crate::enumerate;
use crate::models::{self, ModelError};
use crate::oracle;
use crate::profiles::{self, Profile, ProfileError, ProfileValue};
use crate::vm::{self, ExecStatus, MachineConfig};

/// Real-valued comparisons between pipeline and oracle use this tolerance;
/// both sides evaluate the same formulas on the same integers.
pub const ORACLE_TOLERANCE: f64 = 1e-12;

#[derive(Clone, Debug)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl CheckResult {
    fn pass(name: &'static str, detail: String) -> Self {
        CheckResult {
            name,
            passed: true,
            detail,
        }
    }

    fn fail(name: &'static str, detail: String) -> Self {
        CheckResult {
            name,
            passed: false,
            detail,
        }
    }

    fn from_failures(name: &'static str, failures: Vec<String>, ok_detail: String) -> Self {
        if failures.is_empty() {
            Self::pass(name, ok_detail)
        } else {
            let mut detail = failures.join("; ");
            if detail.len() > 400 {
                detail.truncate(400);
                detail.push_str(" ...");
            }
            Self::fail(name, detail)
        }
    }
}

impl fmt::Display for CheckResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {:<22} {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.detail
        )
    }
}

/// Knobs for one suite run.
#[derive(Clone, Copy, Debug)]
pub struct Scale {
    pub max_len: u32,
    pub step_cap: u32,
    pub x_max_len: usize,
    pub print_max_len: usize,
    pub label: &'static str,
}

pub fn smoke_scale() -> Scale {
    Scale {
        max_len: 10,
        step_cap: 64,
        x_max_len: 3,
        print_max_len: 8,
        label: "smoke",
    }
}

pub fn full_scale() -> Scale {
    Scale {
        max_len: 14,
        step_cap: 256,
        x_max_len: 4,
        print_max_len: 16,
        label: "full",
    }
}

/// All strings of length `0..=max_len` in canonical order.
pub fn strings_up_to(max_len: usize) -> Vec<BitString> {
    let mut out = Vec::new();
    for len in 0..=max_len {
        for v in 0..(1u64 << len) {
            out.push(BitString::from_u64_msb(v, len));
        }
    }
    out
}

fn machine() -> MachineConfig {
    MachineConfig::default()
}

fn bits(s: &str) -> BitString {
    BitString::from_binary_str(s).expect("literal")
}

/// Hand-derived machine anchors: opcode decoding, the three execution
/// examples, the minimal witnesses for "0" and "1", and the first
/// busy-beaver values. Any change to the semantics trips this first.
pub fn check_vm_anchors() -> CheckResult {
    const NAME: &str = "vm_anchors";
    let mut bad = Vec::new();

    if vm::parse_program(&bits("101")).is_some() {
        bad.push("unmatched bracket accepted".into());
    }
    match vm::parse_program(&bits("101110")) {
        Some(p) if p.ops() == [vm::Opcode::LoopOpen, vm::Opcode::LoopClose] => {}
        _ => bad.push("loop pair decodes wrong".into()),
    }
    let cases = [
        ("", "", 100, ExecStatus::Halted, "", 0u32),
        ("011111", "", 100, ExecStatus::Halted, "0", 2),
        ("010011", "", 100, ExecStatus::Halted, "1", 2),
        ("010011", "", 1, ExecStatus::StepLimit, "", 1),
    ];
    for (prog, input, cap, status, output, steps) in cases {
        let got = vm::run_raw(&bits(prog), &bits(input), cap);
        if got.status != status || got.output != bits(output) || got.steps != steps {
            bad.push(format!("execute({prog}) = {got:?}"));
        }
    }

    let t6 = match enumerate::build_run_table(&machine(), &BitString::new(), 6, 10) {
        Ok(t) => t,
        Err(e) => return CheckResult::fail(NAME, format!("table build failed: {e}")),
    };
    let anchors: [(&str, u32, &str); 3] = [("", 0, ""), ("0", 3, "011"), ("1", 6, "010011")];
    for (x, want_len, want_witness) in anchors {
        match t6.row(&bits(x)) {
            Some(row)
                if row.min_len() == want_len && row.witness().raw() == &bits(want_witness) => {}
            other => bad.push(format!("C({x:?}) row = {other:?}")),
        }
    }
    for (k, want) in [(0u32, 0u32), (1, 0), (2, 0), (3, 1)] {
        if complexity::busy_beaver_bound(k, &t6) != Ok(want) {
            bad.push(format!("bb({k}) != {want}"));
        }
    }

    CheckResult::from_failures(NAME, bad, "parse/execute/C/bb anchors hold".into())
}

/// The print bound: the straight-line printer reproduces every string of
/// length `0..=max_len` within `6*len + 1` steps.
pub fn check_print_bound(max_len: usize) -> CheckResult {
    const NAME: &str = "print_bound";
    let mut checked = 0u64;
    for x in strings_up_to(max_len) {
        let p = complexity::print_program(&x);
        if p.bit_len() > 6 * x.len() {
            return CheckResult::fail(NAME, format!("printer for {x:?} too long"));
        }
        let out = vm::execute(&p, &BitString::new(), 6 * x.len() as u32 + 1);
        if out.status != ExecStatus::Halted || out.output != x {
            return CheckResult::fail(NAME, format!("printer for {x:?} gave {out:?}"));
        }
        checked += 1;
    }
    CheckResult::pass(
        NAME,
        format!("{checked} strings print within 6*len+1 steps"),
    )
}

/// Exhaustive codec round-trip over all canonical sets with at most 3
/// elements of length at most 3, plus rejection cases.
pub fn check_codec_round_trip() -> CheckResult {
    const NAME: &str = "codec_round_trip";
    let mut bad = Vec::new();
    let universe = strings_up_to(3);
    let n = universe.len();
    let mut sets = 0u64;
    let mut singles: Vec<Vec<usize>> = (0..n).map(|i| vec![i]).collect();
    let mut pairs = Vec::new();
    let mut triples = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            pairs.push(vec![i, j]);
            for k in j + 1..n {
                triples.push(vec![i, j, k]);
            }
        }
    }
    let mut all = Vec::new();
    all.append(&mut singles);
    all.append(&mut pairs);
    all.append(&mut triples);
    for idxs in all {
        let words: Vec<BitString> = idxs.iter().map(|&i| universe[i].clone()).collect();
        let set = codec::canonicalize(&words).expect("non-empty");
        match codec::decode_set(&codec::encode_set(&set)) {
            Ok(back) if back == set => sets += 1,
            other => bad.push(format!("round trip failed for {set:?}: {other:?}")),
        }
    }
    if codec::decode_set(&bits("11")) != Err(codec::CodecError::MalformedEncoding) {
        bad.push("dangling pair accepted".into());
    }
    if codec::decode_set(&bits("1101000110")) != Err(codec::CodecError::NonCanonical) {
        bad.push("unsorted listing accepted".into());
    }
    CheckResult::from_failures(NAME, bad, format!("{sets} canonical sets round-trip"))
}

fn profile_results_match(
    a: &Result<Profile, ProfileError>,
    b: &Result<Profile, ProfileError>,
) -> bool {
    match (a, b) {
        (Ok(p), Ok(q)) => {
            p.kind() == q.kind()
                && p.provenance() == q.provenance()
                && profiles::profile_values_match(p, q, ORACLE_TOLERANCE)
        }
        (Err(e), Err(f)) => e == f,
        _ => false,
    }
}

/// Pipeline against oracle: run tables for the three reference conditions,
/// the model list, and all profile curves (including each side's error
/// verdicts) for every string of length `<= x_max_len`.
pub fn check_oracle_equivalence(scale: Scale) -> CheckResult {
    const NAME: &str = "oracle_equivalence";
    let m = machine();
    let (l, t) = (scale.max_len, scale.step_cap);
    let mut bad = Vec::new();

    let conditions = [
        BitString::new(),
        codec::encode_element(&bits("0")),
        codec::encode_set(&codec::canonicalize(&[bits("0"), bits("1")]).unwrap()),
    ];
    for cond in &conditions {
        let fast = match enumerate::build_run_table(&m, cond, l, t) {
            Ok(t) => t,
            Err(e) => return CheckResult::fail(NAME, format!("pipeline build failed: {e}")),
        };
        let slow = match oracle::oracle_run_table(&m, cond, l, t) {
            Ok(t) => t,
            Err(e) => return CheckResult::fail(NAME, format!("oracle build failed: {e}")),
        };
        if fast != slow {
            bad.push(format!("run tables differ for condition {cond}"));
        }
    }

    let plain = enumerate::build_run_table(&m, &BitString::new(), l, t).unwrap();
    let run = oracle::oracle_run(&m, &BitString::new(), l, t).unwrap();

    let fast_models = models::harvest_models(&plain, l).unwrap();
    let slow_models = oracle::oracle_models(&run, l);
    if fast_models != slow_models {
        bad.push(format!(
            "model lists differ: pipeline {} vs oracle {}",
            fast_models.len(),
            slow_models.len()
        ));
    }

    let cond_tables = models::build_cond_tables(&m, &fast_models, None, l, t).expect("cond tables");
    let mut compared = 0u64;
    for x in strings_up_to(scale.x_max_len) {
        let fb = profiles::bounded_profile(&x, &plain);
        let ob = oracle::oracle_bounded_profile(&x, &run);
        if !profile_results_match(&fb, &ob) {
            bad.push(format!("bounded profiles differ for {x:?}"));
        }
        let fs = profiles::structure_function(&x, &fast_models, &plain);
        let os = oracle::oracle_structure_function(&x, &slow_models, &run);
        if !profile_results_match(&fs, &os) {
            bad.push(format!("structure functions differ for {x:?}"));
        }
        let fn_ = profiles::normalized_structure_profile(&x, &fast_models, &plain);
        let on = oracle::oracle_normalized_structure(&x, &slow_models, &run);
        if !profile_results_match(&fn_, &on) {
            bad.push(format!("normalized profiles differ for {x:?}"));
        }
        let fst = profiles::stochasticity_profile(&x, &fast_models, &cond_tables);
        let ost = oracle::oracle_stochasticity_profile(&x, &slow_models, &run);
        let stoch_match = match (&fst, &ost) {
            (Ok(f), Ok((ou, oc))) => {
                profile_results_match(&Ok(f.profile.clone()), &Ok(ou.clone()))
                    && profile_results_match(&Ok(f.clamped.clone()), &Ok(oc.clone()))
            }
            (Err(e), Err(f)) => e == f,
            _ => false,
        };
        if !stoch_match {
            bad.push(format!("stochasticity profiles differ for {x:?}"));
        }
        compared += 1;
    }

    CheckResult::from_failures(
        NAME,
        bad,
        format!(
            "tables x{} + models + 4 curve families for {compared} strings agree",
            conditions.len()
        ),
    )
}

/// Conditioning never hurts: `C(x|c) <= C(x)` at equal `(L, T)`, for every
/// output of the plain table against every reference condition.
pub fn check_conditional_dominance(scale: Scale) -> CheckResult {
    const NAME: &str = "conditional_dominance";
    let m = machine();
    let (l, t) = (scale.max_len, scale.step_cap);
    let plain = match enumerate::build_run_table(&m, &BitString::new(), l, t) {
        Ok(t) => t,
        Err(e) => return CheckResult::fail(NAME, format!("table build failed: {e}")),
    };
    let conditions = [
        codec::encode_element(&bits("0")),
        codec::encode_element(&bits("11")),
        codec::encode_set(&codec::canonicalize(&[bits("0"), bits("1")]).unwrap()),
    ];
    let mut compared = 0u64;
    for cond in &conditions {
        let table = match enumerate::build_run_table(&m, cond, l, t) {
            Ok(t) => t,
            Err(e) => return CheckResult::fail(NAME, format!("table build failed: {e}")),
        };
        for (x, row) in plain.rows() {
            let c = complexity::conditional_complexity(x, cond, &table).unwrap();
            match c.finite() {
                Some(v) if v <= row.min_len() => compared += 1,
                other => {
                    return CheckResult::fail(
                        NAME,
                        format!(
                            "C({x:?} | {cond}) = {other:?} exceeds C = {}",
                            row.min_len()
                        ),
                    )
                }
            }
        }
    }
    CheckResult::pass(NAME, format!("C(x|c) <= C(x) on {compared} (x, c) pairs"))
}

/// Exact monotonicity and dominance invariants, plus definedness: a string
/// lacks a bounded profile exactly when it has no row, and lacks
/// structure/stochasticity profiles exactly when no harvested model
/// contains it.
pub fn check_monotonicity(scale: Scale) -> CheckResult {
    const NAME: &str = "monotonicity";
    let m = machine();
    let (l, t) = (scale.max_len, scale.step_cap);
    let plain = match enumerate::build_run_table(&m, &BitString::new(), l, t) {
        Ok(t) => t,
        Err(e) => return CheckResult::fail(NAME, format!("table build failed: {e}")),
    };
    let model_list = models::harvest_models(&plain, l).unwrap();
    let cond_tables = models::build_cond_tables(&m, &model_list, None, l, t).unwrap();

    let mut bad = Vec::new();
    let mut with_row = 0u64;
    let mut with_model = 0u64;
    let mut absent = 0u64;
    for x in strings_up_to(scale.x_max_len) {
        let row = plain.row(&x);
        // K^t non-increasing in t, settling at C(x).
        let mut prev = u32::MAX;
        for cap in 0..=t {
            let v = complexity::time_bounded_complexity(&x, cap, &plain).unwrap();
            if let Some(val) = v.finite() {
                if val > prev {
                    bad.push(format!("K^t increases for {x:?} at t={cap}"));
                }
                prev = val;
            } else if prev != u32::MAX {
                bad.push(format!("K^t loses a value for {x:?} at t={cap}"));
            }
        }
        match (row, profiles::bounded_profile(&x, &plain)) {
            (Some(row), Ok(b)) => {
                with_row += 1;
                if !b.is_non_increasing() {
                    bad.push(format!("bounded profile increases for {x:?}"));
                }
                for k in row.min_len()..=l {
                    if b.value(k) != ProfileValue::Finite(0.0) {
                        bad.push(format!("bounded profile nonzero beyond C for {x:?}"));
                        break;
                    }
                }
                if prev != row.min_len() {
                    bad.push(format!("K^T != C for {x:?}"));
                }
            }
            (None, Err(ProfileError::AbsentString)) => absent += 1,
            (r, b) => bad.push(format!(
                "definedness mismatch for {x:?}: row {} profile {:?}",
                r.is_some(),
                b.map(|_| ())
            )),
        }

        let contained = model_list.iter().any(|mr| mr.set.contains(&x));
        let h = profiles::structure_function(&x, &model_list, &plain);
        let st = profiles::stochasticity_profile(&x, &model_list, &cond_tables);
        match (contained, h, st) {
            (true, Ok(h), Ok(st)) => {
                with_model += 1;
                if !h.is_non_increasing() {
                    bad.push(format!("structure function increases for {x:?}"));
                }
                if !st.profile.is_non_increasing() {
                    bad.push(format!("stochasticity increases for {x:?}"));
                }
                for k in 0..=l {
                    if let (ProfileValue::Finite(s), ProfileValue::Finite(hh)) =
                        (st.profile.value(k), h.value(k))
                    {
                        if s > hh + ORACLE_TOLERANCE {
                            bad.push(format!("stochasticity above structure for {x:?} at {k}"));
                        }
                    }
                }
            }
            (false, Err(ProfileError::NoModel), Err(ProfileError::NoModel)) => {}
            (c, h, s) => bad.push(format!(
                "model definedness mismatch for {x:?}: contained={c} h={:?} st={:?}",
                h.map(|_| ()),
                s.map(|_| ())
            )),
        }
    }

    CheckResult::from_failures(
        NAME,
        bad,
        format!(
            "K^t/profile monotonicity and dominance hold ({with_row} strings with rows, \
             {with_model} with models, {absent} absent as measured)"
        ),
    )
}

/// The exact deficiency algebra over every harvested `(x, S)` pair:
/// `delta - d = C(S) + C(x|E(S)) - C(x)` to 1e-12, and `d <= log2 #S`.
pub fn check_deficiency_algebra(scale: Scale) -> CheckResult {
    const NAME: &str = "deficiency_algebra";
    let m = machine();
    let (l, t) = (scale.max_len, scale.step_cap);
    let plain = match enumerate::build_run_table(&m, &BitString::new(), l, t) {
        Ok(t) => t,
        Err(e) => return CheckResult::fail(NAME, format!("table build failed: {e}")),
    };
    let model_list = models::harvest_models(&plain, l).unwrap();
    let cond_tables = models::build_cond_tables(&m, &model_list, None, l, t).unwrap();

    let mut bad = Vec::new();
    let mut pairs = 0u64;
    let mut unresolved = 0u64;
    for record in &model_list {
        let cond = cond_tables.get(&record.set).expect("built for every model");
        for x in record.set.elements() {
            match models::deficiency_pair(x, record, cond, &plain) {
                Ok(pair) => {
                    pairs += 1;
                    let lhs = pair.delta - pair.d;
                    let rhs = record.complexity as f64 + pair.conditional_used as f64
                        - pair.plain_used as f64;
                    if (lhs - rhs).abs() > 1e-12 {
                        bad.push(format!("algebra broken for {x:?} in {:?}", record.set));
                    }
                    if pair.d > record.set.log_size() + 1e-12 {
                        bad.push(format!("d exceeds log size for {x:?}"));
                    }
                }
                Err(ModelError::UnresolvedConditional) | Err(ModelError::AbsentString) => {
                    unresolved += 1;
                }
                Err(e) => bad.push(format!("unexpected error for {x:?}: {e}")),
            }
        }
    }

    CheckResult::from_failures(
        NAME,
        bad,
        format!(
            "delta - d identity exact on {pairs} pairs ({} models, {unresolved} unresolved \
             at this scale)",
            model_list.len()
        ),
    )
}

/// The analytic anchors evaluated to fixed digits.
pub fn check_analytic_values() -> CheckResult {
    const NAME: &str = "analytic_values";
    let mut bad = Vec::new();
    let h_half = profiles::shannon_entropy(0.5).unwrap();
    if h_half != 1.0 {
        bad.push(format!("H(1/2) = {h_half}"));
    }
    let h_third = profiles::shannon_entropy(1.0 / 3.0).unwrap();
    if (h_third - 0.9182958280).abs() > 1e-8 {
        bad.push(format!("H(1/3) = {h_third}"));
    }
    let b = profiles::bernoulli_two_part(4, 2).unwrap();
    if (b.log_count - 6f64.log2()).abs() > 1e-12 {
        bad.push(format!("log C(4,2) = {}", b.log_count));
    }
    CheckResult::from_failures(NAME, bad, "Shannon and binomial anchors hold".into())
}

/// Dovetail order against the oracle's literal lockstep.
pub fn check_dovetail_lockstep(scale: Scale) -> CheckResult {
    const NAME: &str = "dovetail_lockstep";
    let m = scale.max_len.min(oracle::ORACLE_MAX_LEN).min(12);
    let t = scale.step_cap.min(64);
    for mm in [0, 3, m.saturating_sub(1), m] {
        let fast = enumerate::dovetail_first_appearance(mm, t).unwrap();
        let slow = oracle::oracle_first_appearance(mm, t).unwrap();
        if fast != slow {
            return CheckResult::fail(NAME, format!("orders differ at m={mm}"));
        }
    }
    CheckResult::pass(
        NAME,
        format!("first-appearance order matches lockstep up to m={m}"),
    )
}

/// Tables, cache bytes and profile CSVs are identical across worker counts.
pub fn check_determinism(scale: Scale) -> CheckResult {
    const NAME: &str = "determinism";
    let m = machine();
    let (l, t) = (scale.max_len, scale.step_cap);
    let build = || {
        let table = enumerate::build_run_table(&m, &BitString::new(), l, t).unwrap();
        let bytes = enumerate::cache_to_bytes(&table);
        let csv = profiles::bounded_profile(&BitString::new(), &table)
            .map(|p| profiles::profile_to_csv(&p, &BitString::new()))
            .unwrap();
        (table, bytes, csv)
    };
    let pool1 = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .unwrap();
    let pool8 = rayon::ThreadPoolBuilder::new()
        .num_threads(8)
        .build()
        .unwrap();
    let (t1, b1, c1) = pool1.install(build);
    let (t8, b8, c8) = pool8.install(build);
    let (t8b, b8b, _) = pool8.install(build);
    if t1 != t8 || t8 != t8b {
        return CheckResult::fail(NAME, "tables differ across schedules".into());
    }
    if b1 != b8 || b8 != b8b {
        return CheckResult::fail(NAME, "cache bytes differ across schedules".into());
    }
    if c1 != c8 {
        return CheckResult::fail(NAME, "profile CSVs differ across schedules".into());
    }
    CheckResult::pass(
        NAME,
        "tables, cache bytes and CSVs identical for 1 and 8 workers".into(),
    )
}

/// The whole suite at one scale, in a stable order.
pub fn run_all(scale: Scale) -> Vec<CheckResult> {
    vec![
        check_vm_anchors(),
        check_print_bound(scale.print_max_len),
        check_codec_round_trip(),
        check_oracle_equivalence(scale),
        check_conditional_dominance(scale),
        check_monotonicity(scale),
        check_deficiency_algebra(scale),
        check_analytic_values(),
        check_dovetail_lockstep(scale),
        check_determinism(scale),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn smoke_suite_is_green() {
        for r in run_all(smoke_scale()) {
            assert!(r.passed, "{r}");
        }
    }
}
