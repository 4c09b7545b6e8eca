//! Exhaustive, parallel, cached enumeration of programs.
//!
//! [`build_run_table`] runs every valid program of raw length `0..=L`
//! against a fixed condition (the input tape) under a step cap `T` and
//! keeps, per distinct output: the minimal-length witness (ties broken by
//! lexicographically smallest raw bits), and the Pareto frontier of
//! `(length, steps)` pairs so time-bounded complexity can be queried at any
//! cap without re-running the enumeration. It also records `bb_by_len[k]`,
//! the maximal halting step count over programs of length at most `k` —
//! the machine's measured busy-beaver bound under `T`.
//!
//! Work is sharded by program prefix and merged with associative
//! min/max reductions, so the result is independent of the worker count
//! and schedule.

use std::collections::{BTreeMap, HashMap};
use std::fs;
use std::io::{self, Write};
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bits::BitString;
use crate::vm::{self, ExecStatus, Executor, MachineConfig, Opcode, Program};

/// Hard ceiling on `2^(L+1)` raw candidates; keeps runs at desk scale.
pub const ENUMERATION_CEILING_LOG2: u32 = 26;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EnumerateError {
    #[error(
        "enumerating all programs of length <= {max_len} needs 2^{} candidates, \
         over the 2^{ENUMERATION_CEILING_LOG2} ceiling",
        max_len + 1
    )]
    ResourceBudget { max_len: u32 },
}

#[derive(Debug, Error)]
pub enum CacheError {
    #[error("cache miss: {0}")]
    Miss(String),
    #[error("cache corrupt: {0}")]
    Corrupt(String),
    #[error("cache key mismatch: {0}")]
    KeyMismatch(String),
    #[error("cache io: {0}")]
    Io(#[from] io::Error),
}

/// Per-output record: minimal witness plus the `(length, steps)` frontier.
///
/// The frontier is strictly increasing in length and strictly decreasing in
/// steps; its first point is `(min_len, min_steps_at_min_len)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Row {
    witness: Program,
    frontier: Vec<(u32, u32)>,
}

impl Row {
    pub fn witness(&self) -> &Program {
        &self.witness
    }

    pub fn frontier(&self) -> &[(u32, u32)] {
        &self.frontier
    }

    pub fn min_len(&self) -> u32 {
        self.frontier[0].0
    }

    pub fn min_steps_at_min_len(&self) -> u32 {
        self.frontier[0].1
    }

    /// Minimal program length achieving the output within `t` steps.
    pub fn min_len_within(&self, t: u32) -> Option<u32> {
        self.frontier
            .iter()
            .find(|&&(_, s)| s <= t)
            .map(|&(l, _)| l)
    }
}

/// The exhaustive map from outputs to minimal descriptions, for one
/// `(machine, condition, L, T)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunTable {
    machine: MachineConfig,
    condition: BitString,
    max_len: u32,
    step_cap: u32,
    rows: BTreeMap<BitString, Row>,
    bb_by_len: Vec<u32>,
}

impl RunTable {
    pub fn machine(&self) -> &MachineConfig {
        &self.machine
    }

    pub fn condition(&self) -> &BitString {
        &self.condition
    }

    pub fn max_len(&self) -> u32 {
        self.max_len
    }

    pub fn step_cap(&self) -> u32 {
        self.step_cap
    }

    pub fn rows(&self) -> &BTreeMap<BitString, Row> {
        &self.rows
    }

    pub fn row(&self, x: &BitString) -> Option<&Row> {
        self.rows.get(x)
    }

    /// `bb_by_len[k]` for `k = 0..=L`; non-decreasing, bounded by `T`.
    pub fn bb_by_len(&self) -> &[u32] {
        &self.bb_by_len
    }

    pub(crate) fn from_parts(
        machine: MachineConfig,
        condition: BitString,
        max_len: u32,
        step_cap: u32,
        rows: BTreeMap<BitString, Row>,
        bb_by_len: Vec<u32>,
    ) -> Self {
        debug_assert_eq!(bb_by_len.len(), max_len as usize + 1);
        RunTable {
            machine,
            condition,
            max_len,
            step_cap,
            rows,
            bb_by_len,
        }
    }

    pub(crate) fn make_row(witness: Program, frontier: Vec<(u32, u32)>) -> Row {
        debug_assert!(!frontier.is_empty());
        Row { witness, frontier }
    }
}

fn over_budget(max_len: u32) -> bool {
    max_len + 1 > ENUMERATION_CEILING_LOG2
}

/// Every valid program of raw length `0..=max_len`, exactly once, in
/// canonical order (length ascending, then lexicographic raw bits).
/// Bracket-invalid candidates are skipped.
pub fn enumerate_programs(max_len: u32) -> impl Iterator<Item = Program> {
    (0..=max_len).flat_map(|len| {
        let count: u64 = 1u64 << len;
        (0..count).filter_map(move |v| vm::parse_program(&BitString::from_u64_msb(v, len as usize)))
    })
}

/// Keep a Pareto set: drop the new point if some kept point is at least as
/// good in both coordinates, else evict the points it dominates.
fn insert_frontier_point(frontier: &mut Vec<(u32, u32)>, len: u32, steps: u32) {
    if frontier.iter().any(|&(l, s)| l <= len && s <= steps) {
        return;
    }
    frontier.retain(|&(l, s)| !(l >= len && s >= steps));
    let pos = frontier.partition_point(|&(l, _)| l < len);
    frontier.insert(pos, (len, steps));
}

#[derive(Clone)]
struct PartialRow {
    witness: (u32, u64),
    frontier: Vec<(u32, u32)>,
}

impl PartialRow {
    fn new() -> Self {
        PartialRow {
            witness: (u32::MAX, u64::MAX),
            frontier: Vec::new(),
        }
    }

    fn add(&mut self, len: u32, value: u64, steps: u32) {
        self.witness = self.witness.min((len, value));
        insert_frontier_point(&mut self.frontier, len, steps);
    }

    fn merge(&mut self, other: PartialRow) {
        self.witness = self.witness.min(other.witness);
        for (l, s) in other.frontier {
            insert_frontier_point(&mut self.frontier, l, s);
        }
    }
}

/// Fold-state for one worker: result maps plus reusable VM scratch.
struct Acc {
    rows: HashMap<BitString, PartialRow>,
    bb_at_len: Vec<u32>,
    exec: Executor,
    ops: Vec<Opcode>,
    jumps: Vec<u32>,
    stack: Vec<u32>,
}

impl Acc {
    fn new(max_len: u32, step_cap: u32) -> Self {
        Acc {
            rows: HashMap::new(),
            bb_at_len: vec![0; max_len as usize + 1],
            exec: Executor::new(step_cap),
            ops: Vec::new(),
            jumps: Vec::new(),
            stack: Vec::new(),
        }
    }

    fn run_range(&mut self, len: u32, lo: u64, hi: u64, condition: &BitString, step_cap: u32) {
        for v in lo..hi {
            if !vm::decode_candidate_into(len, v, &mut self.ops, &mut self.jumps, &mut self.stack) {
                continue;
            }
            let (status, steps) = self.exec.run(&self.ops, &self.jumps, condition, step_cap);
            if status != ExecStatus::Halted {
                continue;
            }
            self.bb_at_len[len as usize] = self.bb_at_len[len as usize].max(steps);
            let out = BitString::from_bits(self.exec.output_bits().iter().copied());
            self.rows
                .entry(out)
                .or_insert_with(PartialRow::new)
                .add(len, v, steps);
        }
    }

    fn merge(mut self, other: Acc) -> Acc {
        for (out, row) in other.rows {
            match self.rows.entry(out) {
                std::collections::hash_map::Entry::Occupied(mut e) => e.get_mut().merge(row),
                std::collections::hash_map::Entry::Vacant(e) => {
                    e.insert(row);
                }
            }
        }
        for (a, b) in self.bb_at_len.iter_mut().zip(other.bb_at_len) {
            *a = (*a).max(b);
        }
        self
    }
}

const SHARD_BITS: u32 = 13;

fn shards(max_len: u32) -> Vec<(u32, u64, u64)> {
    let mut out = Vec::new();
    for len in 0..=max_len {
        let count = 1u64 << len;
        let step = 1u64 << SHARD_BITS.min(len);
        let mut lo = 0;
        while lo < count {
            out.push((len, lo, (lo + step).min(count)));
            lo += step;
        }
    }
    out
}

/// Execute every program of length `0..=max_len` on `condition` under
/// `step_cap` and assemble the [`RunTable`]. Deterministic for any number
/// of rayon workers.
pub fn build_run_table(
    machine: &MachineConfig,
    condition: &BitString,
    max_len: u32,
    step_cap: u32,
) -> Result<RunTable, EnumerateError> {
    if over_budget(max_len) {
        return Err(EnumerateError::ResourceBudget { max_len });
    }
    let acc = shards(max_len)
        .into_par_iter()
        .fold(
            || Acc::new(max_len, step_cap),
            |mut acc, (len, lo, hi)| {
                acc.run_range(len, lo, hi, condition, step_cap);
                acc
            },
        )
        .reduce(|| Acc::new(max_len, step_cap), Acc::merge);

    let mut rows = BTreeMap::new();
    for (out, partial) in acc.rows {
        let (wlen, wval) = partial.witness;
        let raw = BitString::from_u64_msb(wval, wlen as usize);
        let witness = vm::parse_program(&raw).expect("witness decoded during enumeration");
        rows.insert(
            out,
            Row {
                witness,
                frontier: partial.frontier,
            },
        );
    }
    // The empty program always halts, so the empty output is always present.
    debug_assert!(rows.contains_key(&BitString::new()));

    let mut bb_by_len = acc.bb_at_len;
    for k in 1..bb_by_len.len() {
        bb_by_len[k] = bb_by_len[k].max(bb_by_len[k - 1]);
    }

    Ok(RunTable {
        machine: machine.clone(),
        condition: condition.clone(),
        max_len,
        step_cap,
        rows,
        bb_by_len,
    })
}

/// First-appearance order of outputs when all programs of length `<= m`
/// run in lockstep rounds (one step per live program per round, canonical
/// program order within a round) until every program has halted or hit
/// `step_cap`. A string is listed when the first program halts with it.
///
/// Equivalent to sorting halting runs by `(steps, canonical index)` and
/// deduplicating outputs in that order, which is how it is computed here.
pub fn dovetail_first_appearance(m: u32, step_cap: u32) -> Result<Vec<BitString>, EnumerateError> {
    if over_budget(m) {
        return Err(EnumerateError::ResourceBudget { max_len: m });
    }
    let mut halted: Vec<(u32, u64, BitString)> = shards(m)
        .into_par_iter()
        .fold(
            || (Vec::new(), Acc::new(m, step_cap)),
            |(mut list, mut acc), (len, lo, hi)| {
                for v in lo..hi {
                    if !vm::decode_candidate_into(
                        len,
                        v,
                        &mut acc.ops,
                        &mut acc.jumps,
                        &mut acc.stack,
                    ) {
                        continue;
                    }
                    let (status, steps) =
                        acc.exec
                            .run(&acc.ops, &acc.jumps, &BitString::new(), step_cap);
                    if status == ExecStatus::Halted {
                        // Raw candidate rank preserves canonical program order.
                        let index = (1u64 << len) - 1 + v;
                        let out = BitString::from_bits(acc.exec.output_bits().iter().copied());
                        list.push((steps, index, out));
                    }
                }
                (list, acc)
            },
        )
        .map(|(list, _)| list)
        .reduce(Vec::new, |mut a, mut b| {
            a.append(&mut b);
            a
        });
    halted.sort();
    let mut seen = std::collections::HashSet::new();
    let mut order = Vec::new();
    for (_, _, out) in halted {
        if seen.insert(out.clone()) {
            order.push(out);
        }
    }
    Ok(order)
}

// ---------------------------------------------------------------------------
// Cache files
// ---------------------------------------------------------------------------
//
// Layout: one JSON header line, one JSON line per row in canonical output
// order, then one JSON line with bb_by_len. The header checksum is the
// CRC-32 of the row lines (each including its trailing newline).

pub const CACHE_FORMAT_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct CacheHeader {
    format_version: u32,
    machine_version_tag: String,
    condition: BitString,
    #[serde(rename = "L")]
    max_len: u32,
    #[serde(rename = "T")]
    step_cap: u32,
    row_count: usize,
    checksum: u32,
}

#[derive(Serialize, Deserialize)]
struct CacheRow {
    output: BitString,
    min_len: u32,
    witness: BitString,
    min_steps: u32,
    frontier: Vec<(u32, u32)>,
}

#[derive(Serialize, Deserialize)]
struct CacheBb {
    bb_by_len: Vec<u32>,
}

fn render_row_lines(table: &RunTable) -> String {
    let mut lines = String::new();
    for (output, row) in table.rows() {
        let wire = CacheRow {
            output: output.clone(),
            min_len: row.min_len(),
            witness: row.witness().raw().clone(),
            min_steps: row.min_steps_at_min_len(),
            frontier: row.frontier().to_vec(),
        };
        lines.push_str(&serde_json::to_string(&wire).expect("row serialization"));
        lines.push('\n');
    }
    lines
}

/// The exact bytes [`cache_store`] writes.
pub fn cache_to_bytes(table: &RunTable) -> Vec<u8> {
    let row_lines = render_row_lines(table);
    let checksum = crc32fast::hash(row_lines.as_bytes());
    let header = CacheHeader {
        format_version: CACHE_FORMAT_VERSION,
        machine_version_tag: table.machine().version_tag.clone(),
        condition: table.condition().clone(),
        max_len: table.max_len(),
        step_cap: table.step_cap(),
        row_count: table.rows().len(),
        checksum,
    };
    let mut out = serde_json::to_string(&header).expect("header serialization");
    out.push('\n');
    out.push_str(&row_lines);
    out.push_str(
        &serde_json::to_string(&CacheBb {
            bb_by_len: table.bb_by_len().to_vec(),
        })
        .expect("bb serialization"),
    );
    out.push('\n');
    out.into_bytes()
}

/// Write a complete table to `path`, bit-exactly reloadable.
pub fn cache_store(table: &RunTable, path: &Path) -> Result<(), CacheError> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            fs::create_dir_all(dir)?;
        }
    }
    let mut f = io::BufWriter::new(fs::File::create(path)?);
    f.write_all(&cache_to_bytes(table))?;
    f.flush()?;
    Ok(())
}

/// Load a table, verifying the `(version_tag, condition, L, T)` key and the
/// row checksum.
pub fn cache_load(
    machine: &MachineConfig,
    condition: &BitString,
    max_len: u32,
    step_cap: u32,
    path: &Path,
) -> Result<RunTable, CacheError> {
    let text = match fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) if e.kind() == io::ErrorKind::NotFound => {
            return Err(CacheError::Miss(path.display().to_string()))
        }
        Err(e) => return Err(CacheError::Io(e)),
    };
    let mut lines = text.split_inclusive('\n');
    let header_line = lines
        .next()
        .ok_or_else(|| CacheError::Corrupt("empty file".into()))?;
    let header: CacheHeader = serde_json::from_str(header_line)
        .map_err(|e| CacheError::Corrupt(format!("bad header: {e}")))?;
    if header.format_version != CACHE_FORMAT_VERSION {
        return Err(CacheError::Corrupt(format!(
            "unsupported format_version {}",
            header.format_version
        )));
    }
    if header.machine_version_tag != machine.version_tag
        || header.condition != *condition
        || header.max_len != max_len
        || header.step_cap != step_cap
    {
        return Err(CacheError::KeyMismatch(format!(
            "file has (tag={}, condition={}, L={}, T={}), wanted (tag={}, condition={}, L={}, T={})",
            header.machine_version_tag,
            header.condition,
            header.max_len,
            header.step_cap,
            machine.version_tag,
            condition,
            max_len,
            step_cap,
        )));
    }

    let mut row_bytes = String::new();
    let mut rows = BTreeMap::new();
    for _ in 0..header.row_count {
        let line = lines
            .next()
            .ok_or_else(|| CacheError::Corrupt("truncated row section".into()))?;
        row_bytes.push_str(line);
        let wire: CacheRow =
            serde_json::from_str(line).map_err(|e| CacheError::Corrupt(format!("bad row: {e}")))?;
        let witness = vm::parse_program(&wire.witness)
            .ok_or_else(|| CacheError::Corrupt("witness does not parse".into()))?;
        if wire.frontier.first() != Some(&(wire.min_len, wire.min_steps)) {
            return Err(CacheError::Corrupt(
                "frontier head disagrees with min fields".into(),
            ));
        }
        if witness.bit_len() != wire.min_len as usize {
            return Err(CacheError::Corrupt(
                "witness length disagrees with min_len".into(),
            ));
        }
        if rows
            .insert(
                wire.output,
                Row {
                    witness,
                    frontier: wire.frontier,
                },
            )
            .is_some()
        {
            return Err(CacheError::Corrupt("duplicate output row".into()));
        }
    }
    if crc32fast::hash(row_bytes.as_bytes()) != header.checksum {
        return Err(CacheError::Corrupt("row checksum mismatch".into()));
    }

    let bb_line = lines
        .next()
        .ok_or_else(|| CacheError::Corrupt("missing bb_by_len line".into()))?;
    let bb: CacheBb = serde_json::from_str(bb_line)
        .map_err(|e| CacheError::Corrupt(format!("bad bb_by_len: {e}")))?;
    if lines.next().is_some() {
        return Err(CacheError::Corrupt("trailing data after bb_by_len".into()));
    }
    if bb.bb_by_len.len() != max_len as usize + 1 {
        return Err(CacheError::Corrupt("bb_by_len has wrong length".into()));
    }
    if !rows.contains_key(&BitString::new()) {
        return Err(CacheError::Corrupt(
            "table lacks the empty-output row".into(),
        ));
    }

    Ok(RunTable {
        machine: machine.clone(),
        condition: condition.clone(),
        max_len,
        step_cap,
        rows,
        bb_by_len: bb.bb_by_len,
    })
}
