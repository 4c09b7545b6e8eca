//! Finite-set models and their deficiencies.
//!
//! A model is machine-realizable: some program of length <= L outputs the
//! canonical set encoding within T steps. Its measured description
//! complexity is that minimal length. For a string `x` in a model `S` two
//! qualities are computed:
//!
//! - randomness deficiency `d(x|S) = log2 #S - C(x | E(S))`, small when
//!   `x` looks typical in `S`;
//! - optimality deficiency `delta(x|S) = C(S) + log2 #S - C(x)`, small
//!   when the two-part description through `S` is near-optimal.
//!
//! Both are signed reals and are reported unclamped; on a small fixed
//! machine the two-part overhead can push either below zero.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::bits::BitString;
use crate::codec::{self, FiniteSetModel};
use crate::complexity::{self, ComplexityError};
use crate::enumerate::{self, EnumerateError, RunTable};
use crate::vm::{self, ExecStatus, MachineConfig, Program};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ModelError {
    #[error("string is not a member of the model")]
    NotMember,
    #[error("conditioned table does not match the model's encoding")]
    ConditionMismatch,
    #[error("model harvesting needs the unconditioned table")]
    PlainTableRequired,
    #[error("string has no row in the plain table")]
    AbsentString,
    #[error("conditional complexity unresolved at this (L, T)")]
    UnresolvedConditional,
    #[error("no conditioned table available for the model")]
    MissingCondTable,
    #[error("no model of the allowed complexity contains the string")]
    NoModel,
    #[error(transparent)]
    Budget(#[from] EnumerateError),
}

/// A harvested model: the set, its measured complexity, and the witness
/// program that prints its canonical encoding.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModelRecord {
    pub set: FiniteSetModel,
    pub complexity: u32,
    pub witness: Program,
}

/// Both deficiencies for one `(x, S)` pair plus the complexities they were
/// computed from, so the defining algebra can be re-checked exactly:
/// `d = log2 #S - conditional_used` and
/// `delta = C(S) + log2 #S - plain_used`.
#[derive(Clone, Debug, PartialEq)]
pub struct DeficiencyPair {
    pub d: f64,
    pub delta: f64,
    pub conditional_used: u32,
    pub plain_used: u32,
}

/// Conditioned run tables keyed by the canonical set encoding.
#[derive(Debug, Default)]
pub struct CondTables {
    map: BTreeMap<BitString, RunTable>,
}

impl CondTables {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, table: RunTable) {
        self.map.insert(table.condition().clone(), table);
    }

    pub fn get(&self, set: &FiniteSetModel) -> Option<&RunTable> {
        self.map.get(&codec::encode_set(set))
    }

    pub fn tables(&self) -> impl Iterator<Item = &RunTable> {
        self.map.values()
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }
}

/// Build conditioned tables for every model in `models` (restricted to the
/// models containing `only_for` when given), at the same scale as the
/// plain table they came from.
pub fn build_cond_tables(
    machine: &MachineConfig,
    models: &[ModelRecord],
    only_for: Option<&BitString>,
    max_len: u32,
    step_cap: u32,
) -> Result<CondTables, EnumerateError> {
    let mut out = CondTables::new();
    for m in models {
        if let Some(x) = only_for {
            if !m.set.contains(x) {
                continue;
            }
        }
        let cond = codec::encode_set(&m.set);
        if out.map.contains_key(&cond) {
            continue;
        }
        out.insert(enumerate::build_run_table(
            machine, &cond, max_len, step_cap,
        )?);
    }
    Ok(out)
}

/// Scan the unconditioned table for rows whose output decodes as a
/// canonical set with all elements of length <= `max_elem_len`. Sorted by
/// complexity, then canonical set order.
pub fn harvest_models(table: &RunTable, max_elem_len: u32) -> Result<Vec<ModelRecord>, ModelError> {
    if !table.condition().is_empty() {
        return Err(ModelError::PlainTableRequired);
    }
    let mut found: Vec<ModelRecord> = table
        .rows()
        .par_iter()
        .filter_map(|(output, row)| {
            let set = codec::decode_set(output).ok()?;
            if set.max_element_len() > max_elem_len as usize {
                return None;
            }
            Some(ModelRecord {
                set,
                complexity: row.min_len(),
                witness: row.witness().clone(),
            })
        })
        .collect();
    found.sort_by(|a, b| (a.complexity, &a.set).cmp(&(b.complexity, &b.set)));
    for m in &found {
        let rerun = vm::execute(&m.witness, &BitString::new(), table.step_cap());
        assert!(
            rerun.status == ExecStatus::Halted && rerun.output == codec::encode_set(&m.set),
            "harvested witness fails re-execution"
        );
    }
    Ok(found)
}

fn check_membership(x: &BitString, model: &ModelRecord) -> Result<(), ModelError> {
    if model.set.contains(x) {
        Ok(())
    } else {
        Err(ModelError::NotMember)
    }
}

/// `d(x|S) = log2 #S - C(x | E(S))`, read from the conditioned table.
/// Unresolved (infinite) conditionals are reported as an error rather than
/// as a fake value; callers skip such pairs and say so.
pub fn randomness_deficiency(
    x: &BitString,
    model: &ModelRecord,
    cond_table: &RunTable,
) -> Result<f64, ModelError> {
    Ok(deficiency_parts(x, model, cond_table)?.0)
}

fn deficiency_parts(
    x: &BitString,
    model: &ModelRecord,
    cond_table: &RunTable,
) -> Result<(f64, u32), ModelError> {
    check_membership(x, model)?;
    let cond = codec::encode_set(&model.set);
    let value = complexity::conditional_complexity(x, &cond, cond_table).map_err(|e| match e {
        ComplexityError::ConditionMismatch { .. } => ModelError::ConditionMismatch,
        _ => ModelError::MissingCondTable,
    })?;
    let used = value.finite().ok_or(ModelError::UnresolvedConditional)?;
    Ok((model.set.log_size() - used as f64, used))
}

/// `delta(x|S) = C(S) + log2 #S - C(x)`, read from the plain table.
pub fn optimality_deficiency(
    x: &BitString,
    model: &ModelRecord,
    plain_table: &RunTable,
) -> Result<f64, ModelError> {
    Ok(optimality_parts(x, model, plain_table)?.0)
}

fn optimality_parts(
    x: &BitString,
    model: &ModelRecord,
    plain_table: &RunTable,
) -> Result<(f64, u32), ModelError> {
    check_membership(x, model)?;
    let value = complexity::plain_complexity(x, plain_table).map_err(|e| match e {
        ComplexityError::ConditionMismatch { .. } => ModelError::PlainTableRequired,
        _ => ModelError::AbsentString,
    })?;
    let used = value.finite().ok_or(ModelError::AbsentString)?;
    Ok((
        model.complexity as f64 + model.set.log_size() - used as f64,
        used,
    ))
}

/// Both deficiencies of one pair, with their inputs.
pub fn deficiency_pair(
    x: &BitString,
    model: &ModelRecord,
    cond_table: &RunTable,
    plain_table: &RunTable,
) -> Result<DeficiencyPair, ModelError> {
    let (d, conditional_used) = deficiency_parts(x, model, cond_table)?;
    let (delta, plain_used) = optimality_parts(x, model, plain_table)?;
    Ok(DeficiencyPair {
        d,
        delta,
        conditional_used,
        plain_used,
    })
}

/// The best models for `x` under a description budget.
#[derive(Clone, Debug)]
pub struct BestModels {
    pub min_d: (f64, ModelRecord),
    pub min_delta: (f64, ModelRecord),
}

/// Argmin of each deficiency over models with `C(S) <= alpha` containing
/// `x`. Ties break toward smaller `log2 #S`, then canonical set order.
pub fn best_models(
    x: &BitString,
    alpha: u32,
    models: &[ModelRecord],
    plain_table: &RunTable,
    cond_tables: &CondTables,
) -> Result<BestModels, ModelError> {
    let qualifying: Vec<&ModelRecord> = models
        .iter()
        .filter(|m| m.complexity <= alpha && m.set.contains(x))
        .collect();
    if qualifying.is_empty() {
        return Err(ModelError::NoModel);
    }

    let mut best_d: Option<(f64, &ModelRecord)> = None;
    for m in &qualifying {
        let table = cond_tables
            .get(&m.set)
            .ok_or(ModelError::MissingCondTable)?;
        let d = match randomness_deficiency(x, m, table) {
            Ok(d) => d,
            Err(ModelError::UnresolvedConditional) => continue,
            Err(e) => return Err(e),
        };
        if better(d, m, &best_d) {
            best_d = Some((d, m));
        }
    }
    let min_d = best_d.ok_or(ModelError::UnresolvedConditional)?;

    let mut best_delta: Option<(f64, &ModelRecord)> = None;
    for m in &qualifying {
        let delta = optimality_deficiency(x, m, plain_table)?;
        if better(delta, m, &best_delta) {
            best_delta = Some((delta, m));
        }
    }
    let min_delta = best_delta.expect("qualifying set is non-empty");

    Ok(BestModels {
        min_d: (min_d.0, min_d.1.clone()),
        min_delta: (min_delta.0, min_delta.1.clone()),
    })
}

fn better(value: f64, model: &ModelRecord, cur: &Option<(f64, &ModelRecord)>) -> bool {
    match cur {
        None => true,
        Some((cv, cm)) => (value, model.set.log_size(), &model.set)
            .partial_cmp(&(*cv, cm.set.log_size(), &cm.set))
            .expect("deficiencies are never NaN")
            .is_lt(),
    }
}

#[derive(Serialize)]
struct ModelDumpRow<'a> {
    set: &'a [BitString],
    complexity: u32,
    witness: &'a BitString,
}

/// JSON-lines dump in harvest order.
pub fn dump_jsonl(models: &[ModelRecord]) -> String {
    let mut out = String::new();
    for m in models {
        let row = ModelDumpRow {
            set: m.set.elements(),
            complexity: m.complexity,
            witness: m.witness.raw(),
        };
        out.push_str(&serde_json::to_string(&row).expect("model row serialization"));
        out.push('\n');
    }
    out
}
