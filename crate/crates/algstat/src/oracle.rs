//! Brute-force reference implementations for the test suite.
//!
//! Everything above the machine and the codec is re-derived here by
//! definition chasing: single-threaded loops over every program, a full
//! log of halting runs, no caching, no frontier tricks. The machine
//! semantics themselves are shared with the pipeline on purpose — they are
//! single-sourced in [`crate::vm`] and pinned by hand-simulated examples.
//!
//! Scale is hard-capped; these routines exist to certify the optimized
//! pipeline bit for bit at small sizes, not to run workloads.

use std::collections::{BTreeMap, BTreeSet, HashSet};

use thiserror::Error;

use crate::bits::BitString;
use crate::codec::{self, FiniteSetModel};
use crate::enumerate::RunTable;
use crate::models::ModelRecord;
use crate::profiles::{Profile, ProfileError, ProfileKind, ProfileValue, Provenance};
use crate::vm::{self, ExecStatus, MachineConfig};

/// Largest `L` the oracle will touch.
pub const ORACLE_MAX_LEN: u32 = 14;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("oracle is capped at L={ORACLE_MAX_LEN}, got {0}")]
    ScaleExceeded(u32),
}

/// One halting run from the exhaustive sweep.
#[derive(Clone, Debug)]
struct LogEntry {
    len: u32,
    raw: BitString,
    output: BitString,
    steps: u32,
}

/// The full log of halting runs for one `(condition, L, T)`, plus the
/// query helpers that chase the definitions across it.
#[derive(Debug)]
pub struct OracleRun {
    machine: MachineConfig,
    condition: BitString,
    max_len: u32,
    step_cap: u32,
    log: Vec<LogEntry>,
}

/// Sweep every program of length `0..=max_len` once, single-threaded.
pub fn oracle_run(
    machine: &MachineConfig,
    condition: &BitString,
    max_len: u32,
    step_cap: u32,
) -> Result<OracleRun, OracleError> {
    if max_len > ORACLE_MAX_LEN {
        return Err(OracleError::ScaleExceeded(max_len));
    }
    let mut log = Vec::new();
    for len in 0..=max_len {
        for v in 0..(1u64 << len) {
            let raw = BitString::from_u64_msb(v, len as usize);
            let Some(program) = vm::parse_program(&raw) else {
                continue;
            };
            let out = vm::execute(&program, condition, step_cap);
            if out.status == ExecStatus::Halted {
                log.push(LogEntry {
                    len,
                    raw,
                    output: out.output,
                    steps: out.steps,
                });
            }
        }
    }
    Ok(OracleRun {
        machine: machine.clone(),
        condition: condition.clone(),
        max_len,
        step_cap,
        log,
    })
}

impl OracleRun {
    pub fn max_len(&self) -> u32 {
        self.max_len
    }

    pub fn step_cap(&self) -> u32 {
        self.step_cap
    }

    /// Minimal length of a halting program with output `x`.
    pub fn complexity_of(&self, x: &BitString) -> Option<u32> {
        self.log
            .iter()
            .filter(|e| &e.output == x)
            .map(|e| e.len)
            .min()
    }

    /// Minimal length halting with `x` within `t` steps.
    pub fn time_bounded(&self, x: &BitString, t: u32) -> Option<u32> {
        self.log
            .iter()
            .filter(|e| &e.output == x && e.steps <= t)
            .map(|e| e.len)
            .min()
    }

    /// Max halting step count over programs of length at most `k`.
    pub fn busy_beaver(&self, k: u32) -> u32 {
        self.log
            .iter()
            .filter(|e| e.len <= k)
            .map(|e| e.steps)
            .max()
            .unwrap_or(0)
    }

    fn provenance(&self) -> Provenance {
        Provenance {
            max_len: self.max_len,
            step_cap: self.step_cap,
            machine_tag: self.machine.version_tag.clone(),
        }
    }

    /// Assemble a [`RunTable`] with the same contract as the pipeline's
    /// builder, from the log alone.
    pub fn to_table(&self) -> RunTable {
        let mut grouped: BTreeMap<BitString, Vec<&LogEntry>> = BTreeMap::new();
        for e in &self.log {
            grouped.entry(e.output.clone()).or_default().push(e);
        }
        let mut rows = BTreeMap::new();
        for (output, entries) in grouped {
            let witness_raw = entries
                .iter()
                .map(|e| &e.raw)
                .min()
                .expect("group is non-empty")
                .clone();
            let witness = vm::parse_program(&witness_raw).expect("logged runs parsed before");
            let points: BTreeSet<(u32, u32)> = entries.iter().map(|e| (e.len, e.steps)).collect();
            let frontier: Vec<(u32, u32)> = points
                .iter()
                .filter(|p| !points.iter().any(|q| q != *p && q.0 <= p.0 && q.1 <= p.1))
                .copied()
                .collect();
            rows.insert(output, RunTable::make_row(witness, frontier));
        }
        let bb_by_len = (0..=self.max_len).map(|k| self.busy_beaver(k)).collect();
        RunTable::from_parts(
            self.machine.clone(),
            self.condition.clone(),
            self.max_len,
            self.step_cap,
            rows,
            bb_by_len,
        )
    }
}

/// Same contract as `enumerate::build_run_table`, derived naively.
pub fn oracle_run_table(
    machine: &MachineConfig,
    condition: &BitString,
    max_len: u32,
    step_cap: u32,
) -> Result<RunTable, OracleError> {
    Ok(oracle_run(machine, condition, max_len, step_cap)?.to_table())
}

/// Models from the log: outputs that decode as canonical sets.
pub fn oracle_models(run: &OracleRun, max_elem_len: u32) -> Vec<ModelRecord> {
    let mut by_set: BTreeMap<FiniteSetModel, (u32, BitString)> = BTreeMap::new();
    for e in &run.log {
        let Ok(set) = codec::decode_set(&e.output) else {
            continue;
        };
        if set.max_element_len() > max_elem_len as usize {
            continue;
        }
        let cand = (e.len, e.raw.clone());
        by_set
            .entry(set)
            .and_modify(|cur| {
                if cand < *cur {
                    *cur = cand.clone();
                }
            })
            .or_insert(cand);
    }
    let mut out: Vec<ModelRecord> = by_set
        .into_iter()
        .map(|(set, (complexity, raw))| ModelRecord {
            set,
            complexity,
            witness: vm::parse_program(&raw).expect("logged runs parsed before"),
        })
        .collect();
    out.sort_by(|a, b| (a.complexity, &a.set).cmp(&(b.complexity, &b.set)));
    out
}

/// `k -> K^{B(k)}(x) - C(x)` by definition chasing over the log.
pub fn oracle_bounded_profile(x: &BitString, run: &OracleRun) -> Result<Profile, ProfileError> {
    let base = run.complexity_of(x).ok_or(ProfileError::AbsentString)?;
    let values = (0..=run.max_len)
        .map(|k| {
            let t = run.busy_beaver(k);
            match run.time_bounded(x, t) {
                Some(len) => ProfileValue::Finite((len - base) as f64),
                None => ProfileValue::Top,
            }
        })
        .collect();
    Ok(Profile::new(ProfileKind::Bounded, values, run.provenance()))
}

fn oracle_h(x: &BitString, models: &[ModelRecord], k: u32) -> Option<f64> {
    let mut best: Option<f64> = None;
    for m in models {
        if m.complexity <= k && m.set.contains(x) {
            let v = m.set.log_size();
            best = Some(best.map_or(v, |b: f64| b.min(v)));
        }
    }
    best
}

/// The raw structure function over oracle-harvested models.
pub fn oracle_structure_function(
    x: &BitString,
    models: &[ModelRecord],
    run: &OracleRun,
) -> Result<Profile, ProfileError> {
    if !models.iter().any(|m| m.set.contains(x)) {
        return Err(ProfileError::NoModel);
    }
    let values = (0..=run.max_len)
        .map(|k| oracle_h(x, models, k).map_or(ProfileValue::Top, ProfileValue::Finite))
        .collect();
    Ok(Profile::new(
        ProfileKind::Structure,
        values,
        run.provenance(),
    ))
}

/// `k + h(k) - C(x)` over oracle-harvested models.
pub fn oracle_normalized_structure(
    x: &BitString,
    models: &[ModelRecord],
    run: &OracleRun,
) -> Result<Profile, ProfileError> {
    if !models.iter().any(|m| m.set.contains(x)) {
        return Err(ProfileError::NoModel);
    }
    let c = run.complexity_of(x).ok_or(ProfileError::AbsentString)? as f64;
    let values = (0..=run.max_len)
        .map(|k| match oracle_h(x, models, k) {
            Some(h) => ProfileValue::Finite(k as f64 + h - c),
            None => ProfileValue::Top,
        })
        .collect();
    Ok(Profile::new(
        ProfileKind::Structure,
        values,
        run.provenance(),
    ))
}

/// Unclamped and clamped stochasticity curves; conditioned sweeps are run
/// here, naively, per containing model.
pub fn oracle_stochasticity_profile(
    x: &BitString,
    models: &[ModelRecord],
    run: &OracleRun,
) -> Result<(Profile, Profile), ProfileError> {
    let family: Vec<&ModelRecord> = models.iter().filter(|m| m.set.contains(x)).collect();
    if family.is_empty() {
        return Err(ProfileError::NoModel);
    }
    let mut measured: Vec<(u32, f64)> = Vec::new();
    for m in family {
        let cond = codec::encode_set(&m.set);
        let cond_run = oracle_run(&run.machine, &cond, run.max_len, run.step_cap)
            .expect("same scale as the parent run");
        // Unresolved conditionals contribute no measured value.
        if let Some(c) = cond_run.complexity_of(x) {
            measured.push((m.complexity, m.set.log_size() - c as f64));
        }
    }
    let values: Vec<ProfileValue> = (0..=run.max_len)
        .map(|k| {
            measured
                .iter()
                .filter(|(c, _)| *c <= k)
                .map(|(_, d)| *d)
                .fold(None, |acc: Option<f64>, v| {
                    Some(acc.map_or(v, |a| a.min(v)))
                })
                .map_or(ProfileValue::Top, ProfileValue::Finite)
        })
        .collect();
    let clamped = values
        .iter()
        .map(|v| match v {
            ProfileValue::Finite(d) => ProfileValue::Finite(d.max(0.0)),
            ProfileValue::Top => ProfileValue::Top,
        })
        .collect();
    Ok((
        Profile::new(ProfileKind::Stochasticity, values, run.provenance()),
        Profile::new(ProfileKind::Stochasticity, clamped, run.provenance()),
    ))
}

/// Literal lockstep dovetailing through the public machine interface:
/// round `r` asks every still-live program for its outcome under cap `r`;
/// a program halts at round `r` exactly when that outcome is `Halted`
/// with `steps == r`.
pub fn oracle_first_appearance(m: u32, step_cap: u32) -> Result<Vec<BitString>, OracleError> {
    if m > ORACLE_MAX_LEN {
        return Err(OracleError::ScaleExceeded(m));
    }
    let mut live: Vec<vm::Program> = Vec::new();
    for len in 0..=m {
        for v in 0..(1u64 << len) {
            if let Some(p) = vm::parse_program(&BitString::from_u64_msb(v, len as usize)) {
                live.push(p);
            }
        }
    }
    let mut order = Vec::new();
    let mut seen = HashSet::new();
    let empty = BitString::new();
    for round in 0..=step_cap {
        if live.is_empty() {
            break;
        }
        let mut still_live = Vec::new();
        for p in live {
            let out = vm::execute(&p, &empty, round);
            if out.status == ExecStatus::Halted {
                if out.steps == round && seen.insert(out.output.clone()) {
                    order.push(out.output);
                }
            } else {
                still_live.push(p);
            }
        }
        live = still_live;
    }
    Ok(order)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::enumerate;

    fn bs(s: &str) -> BitString {
        BitString::from_binary_str(s).unwrap()
    }

    fn machine() -> MachineConfig {
        MachineConfig::default()
    }

    #[test]
    fn scale_cap_is_enforced() {
        assert_eq!(
            oracle_run(&machine(), &BitString::new(), 15, 10).unwrap_err(),
            OracleError::ScaleExceeded(15)
        );
        assert_eq!(
            oracle_first_appearance(15, 10).unwrap_err(),
            OracleError::ScaleExceeded(15)
        );
    }

    #[test]
    fn oracle_table_matches_pipeline_small() {
        for (l, t) in [(3u32, 10u32), (6, 10), (9, 32)] {
            let fast = enumerate::build_run_table(&machine(), &BitString::new(), l, t).unwrap();
            let slow = oracle_run_table(&machine(), &BitString::new(), l, t).unwrap();
            assert_eq!(fast, slow, "L={l} T={t}");
        }
    }

    #[test]
    fn oracle_table_matches_pipeline_conditioned() {
        let cond = codec::encode_element(&bs("0"));
        let fast = enumerate::build_run_table(&machine(), &cond, 8, 16).unwrap();
        let slow = oracle_run_table(&machine(), &cond, 8, 16).unwrap();
        assert_eq!(fast, slow);
    }

    #[test]
    fn oracle_anchors() {
        let run = oracle_run(&machine(), &BitString::new(), 6, 10).unwrap();
        assert_eq!(run.complexity_of(&bs("")), Some(0));
        assert_eq!(run.complexity_of(&bs("0")), Some(3));
        assert_eq!(run.complexity_of(&bs("1")), Some(6));
        assert_eq!(run.busy_beaver(0), 0);
        assert_eq!(run.busy_beaver(3), 1);
        assert_eq!(run.time_bounded(&bs("0"), 0), None);
        assert_eq!(run.time_bounded(&bs("0"), 1), Some(3));
    }

    #[test]
    fn lockstep_matches_sorted_dovetail() {
        for (m, t) in [(0u32, 10u32), (3, 10), (6, 10), (9, 24)] {
            let fast = enumerate::dovetail_first_appearance(m, t).unwrap();
            let slow = oracle_first_appearance(m, t).unwrap();
            assert_eq!(fast, slow, "m={m} T={t}");
        }
    }

    #[test]
    fn lockstep_hand_anchor() {
        assert_eq!(
            oracle_first_appearance(3, 10).unwrap(),
            vec![bs(""), bs("0")]
        );
    }
}
