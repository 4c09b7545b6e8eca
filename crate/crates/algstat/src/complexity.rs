//! Complexity quantities read out of run tables.
//!
//! All values are measured facts about the fixed machine at a given
//! `(L, T)`: `Infinite` means "no program of length <= L produces the
//! object within T steps", not a claim about the unbounded quantity.

use crate::bits::BitString;
use crate::enumerate::RunTable;
use crate::profiles::{Profile, ProfileKind, ProfileValue, Provenance};
use crate::vm::{self, Program};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ComplexityError {
    #[error("table was built for condition {got}, expected {want}")]
    ConditionMismatch { want: BitString, got: BitString },
    #[error("time bound {t} exceeds the table's step cap {cap}")]
    CapExceeded { t: u32, cap: u32 },
    #[error("budget {k} out of range 0..={max}")]
    OutOfRange { k: u32, max: u32 },
    #[error("string has no row in this table")]
    AbsentString,
}

/// A measured complexity: finite bits, or infinite at this `(L, T)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ComplexityValue {
    value: Option<u32>,
    /// `(L, T)` the value was measured under.
    pub source: (u32, u32),
}

impl ComplexityValue {
    pub fn finite(&self) -> Option<u32> {
        self.value
    }

    pub fn is_infinite(&self) -> bool {
        self.value.is_none()
    }
}

fn measured(table: &RunTable, value: Option<u32>) -> ComplexityValue {
    ComplexityValue {
        value,
        source: (table.max_len(), table.step_cap()),
    }
}

/// Minimal program length producing `x` with no input. The table must be
/// unconditioned.
pub fn plain_complexity(
    x: &BitString,
    table: &RunTable,
) -> Result<ComplexityValue, ComplexityError> {
    conditional_complexity(x, &BitString::new(), table)
}

/// Minimal program length producing `x` given `condition` on the input
/// tape. Callers pass self-delimiting encodings as conditions (an encoded
/// element for string conditions, an encoded set for set conditions).
pub fn conditional_complexity(
    x: &BitString,
    condition: &BitString,
    table: &RunTable,
) -> Result<ComplexityValue, ComplexityError> {
    if table.condition() != condition {
        return Err(ComplexityError::ConditionMismatch {
            want: condition.clone(),
            got: table.condition().clone(),
        });
    }
    Ok(measured(table, table.row(x).map(|r| r.min_len())))
}

/// Minimal length over programs halting with `x` in at most `t` steps,
/// answered from the per-output `(length, steps)` frontier.
pub fn time_bounded_complexity(
    x: &BitString,
    t: u32,
    table: &RunTable,
) -> Result<ComplexityValue, ComplexityError> {
    if t > table.step_cap() {
        return Err(ComplexityError::CapExceeded {
            t,
            cap: table.step_cap(),
        });
    }
    Ok(measured(
        table,
        table.row(x).and_then(|r| r.min_len_within(t)),
    ))
}

/// The measured busy-beaver bound: maximal halting step count over
/// programs of length at most `k` (within the table's cap).
pub fn busy_beaver_bound(k: u32, table: &RunTable) -> Result<u32, ComplexityError> {
    if k > table.max_len() {
        return Err(ComplexityError::OutOfRange {
            k,
            max: table.max_len(),
        });
    }
    Ok(table.bb_by_len()[k as usize])
}

/// The resource-bounded profile `k -> K^{B(k)}(x) - K(x)` for
/// `k = 0..=L`, with infinite values rendered as the TopValue sentinel.
pub fn depth_profile(x: &BitString, table: &RunTable) -> Result<Profile, ComplexityError> {
    let row = table.row(x).ok_or(ComplexityError::AbsentString)?;
    let base = row.min_len();
    let values = (0..=table.max_len())
        .map(|k| {
            let t = table.bb_by_len()[k as usize];
            match row.min_len_within(t) {
                Some(len) => ProfileValue::Finite((len - base) as f64),
                None => ProfileValue::Top,
            }
        })
        .collect();
    Ok(Profile::new(
        ProfileKind::Bounded,
        values,
        Provenance::of_table(table),
    ))
}

/// The straight-line printer for `x`: flip whenever the current cell
/// disagrees with the next output bit, then emit. At most `6*len(x)` bits
/// long; runs in at most `2*len(x)` steps.
pub fn print_program(x: &BitString) -> Program {
    let mut raw = BitString::new();
    let mut cell = 0u8;
    for b in x.iter() {
        if cell != b {
            for bit in [0, 1, 0] {
                raw.push(bit);
            }
            cell = b;
        }
        for bit in [0, 1, 1] {
            raw.push(bit);
        }
    }
    vm::parse_program(&raw).expect("printer has no brackets")
}
