//! The three profile curves and their comparison.
//!
//! For a string `x`, three integer-budget step functions are built from
//! measured tables and compared in the same coordinates (excess over the
//! plain complexity of `x`):
//!
//! - bounded:       `k -> K^{B(k)}(x) - C(x)`
//! - structure:     `k -> k + h(k) - C(x)` where `h(k)` is the minimal
//!   `log2 #S` over harvested models `S` containing `x` with `C(S) <= k`
//! - stochasticity: `k -> min d(x|S)` over the same model family
//!
//! Budgets where a value is undefined at the working `(L, T)` carry the
//! sentinel `TopValue = L + 1`, which keeps profile arithmetic and the
//! curve distance total. The distance between curves is the Hausdorff
//! distance between their upper graphs in the L-infinity metric, budgets
//! treated as reals.

use std::ops::RangeInclusive;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bits::BitString;
use crate::complexity::{self, ComplexityError};
use crate::enumerate::{self, EnumerateError, RunTable};
use crate::models::{self, CondTables, ModelError, ModelRecord};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ProfileError {
    #[error("no harvested model contains the string")]
    NoModel,
    #[error("string has no row in the table")]
    AbsentString,
    #[error("profiles have different budget ranges")]
    ShapeMismatch,
    #[error("profiles were built under different (L, T, machine) provenances")]
    ProvenanceMismatch,
    #[error("no conditioned table available for a qualifying model")]
    MissingCondTable,
    #[error("argument outside the operation's domain")]
    DomainError,
    #[error("no budget admits a two-part description within the slack")]
    NoSufficientStatistic,
    #[error("operation needs the unconditioned table")]
    PlainTableRequired,
}

impl From<ComplexityError> for ProfileError {
    fn from(e: ComplexityError) -> Self {
        match e {
            ComplexityError::AbsentString => ProfileError::AbsentString,
            ComplexityError::ConditionMismatch { .. } => ProfileError::PlainTableRequired,
            ComplexityError::CapExceeded { .. } | ComplexityError::OutOfRange { .. } => {
                ProfileError::DomainError
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProfileKind {
    Bounded,
    Structure,
    Stochasticity,
    Rank,
}

impl std::fmt::Display for ProfileKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            ProfileKind::Bounded => "Bounded",
            ProfileKind::Structure => "Structure",
            ProfileKind::Stochasticity => "Stochasticity",
            ProfileKind::Rank => "Rank",
        };
        f.write_str(s)
    }
}

/// A profile value at one budget. `Top` marks "undefined at this scale"
/// and renders as `L + 1` in arithmetic and as `TOP` in CSV.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ProfileValue {
    Finite(f64),
    Top,
}

/// Where a profile's numbers came from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Provenance {
    pub max_len: u32,
    pub step_cap: u32,
    pub machine_tag: String,
}

impl Provenance {
    pub fn of_table(table: &RunTable) -> Self {
        Provenance {
            max_len: table.max_len(),
            step_cap: table.step_cap(),
            machine_tag: table.machine().version_tag.clone(),
        }
    }
}

/// An integer-budget step function `k -> value`, `k = 0..=k_max`.
#[derive(Clone, Debug, PartialEq)]
pub struct Profile {
    kind: ProfileKind,
    values: Vec<ProfileValue>,
    provenance: Provenance,
}

impl Profile {
    pub fn new(kind: ProfileKind, values: Vec<ProfileValue>, provenance: Provenance) -> Self {
        assert!(!values.is_empty(), "a profile needs at least budget 0");
        Profile {
            kind,
            values,
            provenance,
        }
    }

    pub fn kind(&self) -> ProfileKind {
        self.kind
    }

    pub fn k_max(&self) -> u32 {
        (self.values.len() - 1) as u32
    }

    pub fn value(&self, k: u32) -> ProfileValue {
        self.values[k as usize]
    }

    pub fn values(&self) -> &[ProfileValue] {
        &self.values
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    /// Numeric rendering of the Top sentinel: `L + 1`.
    pub fn top_numeric(&self) -> f64 {
        (self.provenance.max_len + 1) as f64
    }

    pub fn numeric_values(&self) -> Vec<f64> {
        let top = self.top_numeric();
        self.values
            .iter()
            .map(|v| match v {
                ProfileValue::Finite(x) => *x,
                ProfileValue::Top => top,
            })
            .collect()
    }

    pub fn is_non_increasing(&self) -> bool {
        self.numeric_values().windows(2).all(|w| w[0] >= w[1])
    }
}

/// Compare two profiles value-by-value at a tolerance (Top only equals Top).
pub fn profile_values_match(p: &Profile, q: &Profile, tol: f64) -> bool {
    p.k_max() == q.k_max()
        && p.values()
            .iter()
            .zip(q.values())
            .all(|(a, b)| match (a, b) {
                (ProfileValue::Top, ProfileValue::Top) => true,
                (ProfileValue::Finite(x), ProfileValue::Finite(y)) => (x - y).abs() <= tol,
                _ => false,
            })
}

fn containing<'m>(x: &BitString, models: &'m [ModelRecord]) -> Vec<&'m ModelRecord> {
    models.iter().filter(|m| m.set.contains(x)).collect()
}

/// The raw structure function `h(k) = min { log2 #S : x in S, C(S) <= k }`.
pub fn structure_function(
    x: &BitString,
    models: &[ModelRecord],
    plain_table: &RunTable,
) -> Result<Profile, ProfileError> {
    let family = containing(x, models);
    if family.is_empty() {
        return Err(ProfileError::NoModel);
    }
    let values = (0..=plain_table.max_len())
        .map(|k| {
            family
                .iter()
                .filter(|m| m.complexity <= k)
                .map(|m| m.set.log_size())
                .fold(None, |acc: Option<f64>, v| {
                    Some(acc.map_or(v, |a| a.min(v)))
                })
                .map_or(ProfileValue::Top, ProfileValue::Finite)
        })
        .collect();
    Ok(Profile::new(
        ProfileKind::Structure,
        values,
        Provenance::of_table(plain_table),
    ))
}

/// The structure curve in coincidence coordinates: `k + h(k) - C(x)`.
pub fn normalized_structure_profile(
    x: &BitString,
    models: &[ModelRecord],
    plain_table: &RunTable,
) -> Result<Profile, ProfileError> {
    let h = structure_function(x, models, plain_table)?;
    let c = complexity::plain_complexity(x, plain_table)?
        .finite()
        .ok_or(ProfileError::AbsentString)? as f64;
    let values = h
        .values()
        .iter()
        .enumerate()
        .map(|(k, v)| match v {
            ProfileValue::Finite(h) => ProfileValue::Finite(k as f64 + h - c),
            ProfileValue::Top => ProfileValue::Top,
        })
        .collect();
    Ok(Profile::new(
        ProfileKind::Structure,
        values,
        h.provenance().clone(),
    ))
}

/// The stochasticity curve, kept in both readings: unclamped minimal
/// deficiency (used for the coincidence comparison) and the clamped-at-zero
/// variant matching the natural-number deficiency parameter.
#[derive(Clone, Debug, PartialEq)]
pub struct StochasticityProfile {
    pub profile: Profile,
    pub clamped: Profile,
}

/// `value(k) = min { d(x|S) : x in S, C(S) <= k }` over harvested models.
/// Models whose conditional complexity is unresolved at this `(L, T)` are
/// skipped from the minimum (they contribute no measured value).
pub fn stochasticity_profile(
    x: &BitString,
    models: &[ModelRecord],
    cond_tables: &CondTables,
) -> Result<StochasticityProfile, ProfileError> {
    let family = containing(x, models);
    if family.is_empty() {
        return Err(ProfileError::NoModel);
    }
    let mut provenance: Option<Provenance> = None;
    let mut measured: Vec<(u32, f64)> = Vec::new();
    for m in &family {
        let table = cond_tables
            .get(&m.set)
            .ok_or(ProfileError::MissingCondTable)?;
        let this = Provenance::of_table(table);
        match &provenance {
            None => provenance = Some(this),
            Some(p) if *p != this => return Err(ProfileError::ProvenanceMismatch),
            _ => {}
        }
        match models::randomness_deficiency(x, m, table) {
            Ok(d) => measured.push((m.complexity, d)),
            Err(ModelError::UnresolvedConditional) => {}
            Err(_) => return Err(ProfileError::MissingCondTable),
        }
    }
    let provenance = provenance.expect("family is non-empty");
    let values: Vec<ProfileValue> = (0..=provenance.max_len)
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
    Ok(StochasticityProfile {
        profile: Profile::new(ProfileKind::Stochasticity, values, provenance.clone()),
        clamped: Profile::new(ProfileKind::Stochasticity, clamped, provenance),
    })
}

/// The resource-bounded curve; see [`complexity::depth_profile`].
pub fn bounded_profile(x: &BitString, plain_table: &RunTable) -> Result<Profile, ProfileError> {
    Ok(complexity::depth_profile(x, plain_table)?)
}

/// One point of the enumeration-rank characterization.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RankPoint {
    /// The enumeration bound the point was measured at.
    pub m: u32,
    /// First coordinate `m - s` (a description-budget reading).
    pub budget: i64,
    /// Second coordinate `s = ceil(log2(c + 1))` for `c` strings after `x`.
    pub log_count: u32,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RankProfile {
    pub points: Vec<RankPoint>,
    /// Bounds `m` where `x` never appeared (silently skipped).
    pub skipped: Vec<u32>,
    pub provenance: Provenance,
}

fn ceil_log2(n: u64) -> u32 {
    debug_assert!(n >= 1);
    if n == 1 {
        0
    } else {
        64 - (n - 1).leading_zeros()
    }
}

/// For each `m`, dovetail all programs of length <= `m`, find how many
/// distinct strings appear strictly after `x`, and emit `(m - s, s)`.
pub fn rank_profile(
    x: &BitString,
    m_range: RangeInclusive<u32>,
    step_cap: u32,
) -> Result<RankProfile, EnumerateError> {
    let mut points = Vec::new();
    let mut skipped = Vec::new();
    for m in m_range.clone() {
        let order = enumerate::dovetail_first_appearance(m, step_cap)?;
        match order.iter().position(|y| y == x) {
            Some(i) => {
                let after = (order.len() - 1 - i) as u64;
                let s = ceil_log2(after + 1);
                points.push(RankPoint {
                    m,
                    budget: m as i64 - s as i64,
                    log_count: s,
                });
            }
            None => skipped.push(m),
        }
    }
    Ok(RankProfile {
        points,
        skipped,
        provenance: Provenance {
            max_len: *m_range.end(),
            step_cap,
            machine_tag: crate::vm::VERSION_TAG.to_string(),
        },
    })
}

// ---------------------------------------------------------------------------
// Curve distance
// ---------------------------------------------------------------------------

#[derive(Clone, Copy)]
struct Seg {
    a: f64,
    b: f64,
    v: f64,
}

/// A profile's upper graph as closed horizontal segments: `[k, k+1]` at
/// `value(k)` plus the endpoint column at `k_max`.
fn segments(p: &Profile) -> Vec<Seg> {
    let vals = p.numeric_values();
    let k = vals.len() - 1;
    let mut segs: Vec<Seg> = (0..k)
        .map(|i| Seg {
            a: i as f64,
            b: (i + 1) as f64,
            v: vals[i],
        })
        .collect();
    segs.push(Seg {
        a: k as f64,
        b: k as f64,
        v: vals[k],
    });
    segs
}

fn dist_point_to_segs(t: f64, v: f64, segs: &[Seg]) -> f64 {
    segs.iter()
        .map(|s| {
            let dt = if t < s.a {
                s.a - t
            } else if t > s.b {
                t - s.b
            } else {
                0.0
            };
            dt.max((s.v - v).max(0.0))
        })
        .fold(f64::INFINITY, f64::min)
}

/// `sup` over the lower boundary of `U(p)` of the distance to `U(q)`.
/// The supremum of the piecewise-linear distance along each boundary
/// segment is attained at a segment end or at a crossing of two linear
/// pieces; all such abscissas are enumerated below, so the value is exact
/// up to rounding.
fn directed_hausdorff(p: &[Seg], q: &[Seg]) -> f64 {
    let mut worst = 0.0f64;
    let mut cands: Vec<f64> = Vec::new();
    for sp in p {
        cands.clear();
        cands.push(sp.a);
        cands.push(sp.b);
        for q1 in q {
            for q2 in q {
                let h2 = (q2.v - sp.v).max(0.0);
                cands.push((q1.b + q2.a) / 2.0);
                cands.push(q1.b + h2);
                cands.push(q1.a - h2);
            }
        }
        for &t in cands.iter() {
            let t = t.clamp(sp.a, sp.b);
            let d = dist_point_to_segs(t, sp.v, q);
            worst = worst.max(d);
        }
    }
    worst
}

/// Hausdorff distance in the L-infinity metric between the upper graphs of
/// two profiles over the same budget range.
pub fn profile_distance(p: &Profile, q: &Profile) -> Result<f64, ProfileError> {
    if p.k_max() != q.k_max() {
        return Err(ProfileError::ShapeMismatch);
    }
    let ps = segments(p);
    let qs = segments(q);
    Ok(directed_hausdorff(&ps, &qs).max(directed_hausdorff(&qs, &ps)))
}

/// L-infinity distance from a single point to a profile's upper graph.
pub fn point_to_upper_graph_distance(t: f64, v: f64, p: &Profile) -> f64 {
    dist_point_to_segs(t, v, &segments(p))
}

// ---------------------------------------------------------------------------
// Derived statistics
// ---------------------------------------------------------------------------

#[derive(Clone, Debug)]
pub struct SufficientStatistic {
    pub k_star: u32,
    pub witness: ModelRecord,
}

/// Least `k` with `h(k) + k <= C(x) + c`, and the model achieving `h(k)`
/// there (ties: smaller `log2 #S`, then canonical set order).
pub fn minimal_sufficient_statistic(
    x: &BitString,
    models: &[ModelRecord],
    plain_table: &RunTable,
    slack: u32,
) -> Result<SufficientStatistic, ProfileError> {
    let h = structure_function(x, models, plain_table)?;
    let c = complexity::plain_complexity(x, plain_table)?
        .finite()
        .ok_or(ProfileError::AbsentString)? as f64;
    let family = containing(x, models);
    for k in 0..=h.k_max() {
        if let ProfileValue::Finite(hv) = h.value(k) {
            if hv + k as f64 <= c + slack as f64 + 1e-9 {
                let witness = family
                    .iter()
                    .filter(|m| m.complexity <= k)
                    .min_by(|a, b| {
                        (a.set.log_size(), &a.set)
                            .partial_cmp(&(b.set.log_size(), &b.set))
                            .expect("log sizes are never NaN")
                    })
                    .expect("finite h(k) implies a qualifying model");
                return Ok(SufficientStatistic {
                    k_star: k,
                    witness: (*witness).clone(),
                });
            }
        }
    }
    Err(ProfileError::NoSufficientStatistic)
}

/// Koppel's coordinates of the same search: the first-part length of the
/// best two-part description within slack `c`.
pub fn sophistication(
    x: &BitString,
    models: &[ModelRecord],
    plain_table: &RunTable,
    slack: u32,
) -> Result<u32, ProfileError> {
    minimal_sufficient_statistic(x, models, plain_table, slack).map(|s| s.k_star)
}

// ---------------------------------------------------------------------------
// Analytic helpers
// ---------------------------------------------------------------------------

/// `H(p) = p log2(1/p) + (1-p) log2(1/(1-p))`, with `0 log(1/0) = 0`.
pub fn shannon_entropy(p: f64) -> Result<f64, ProfileError> {
    if !(0.0..=1.0).contains(&p) {
        return Err(ProfileError::DomainError);
    }
    fn term(p: f64) -> f64 {
        if p == 0.0 {
            0.0
        } else {
            p * (1.0 / p).log2()
        }
    }
    Ok(term(p) + term(1.0 - p))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TwoPartLength {
    /// `log2 binomial(n, m)`, via a log-sum (no factorial overflow).
    pub log_count: f64,
    /// `log_count + log2(n+1) + log2(m+1)`: the fixed first-part
    /// accounting this artifact uses for the counting model.
    pub total_hint: f64,
}

/// Two-part length hints for the n-trial, m-successes counting model.
pub fn bernoulli_two_part(n: u64, m: u64) -> Result<TwoPartLength, ProfileError> {
    if m > n {
        return Err(ProfileError::DomainError);
    }
    let mut log_count = 0.0f64;
    for i in 1..=m {
        log_count += ((n - m + i) as f64).log2() - (i as f64).log2();
    }
    let total_hint = log_count + ((n + 1) as f64).log2() + ((m + 1) as f64).log2();
    Ok(TwoPartLength {
        log_count,
        total_hint,
    })
}

// ---------------------------------------------------------------------------
// Coincidence report
// ---------------------------------------------------------------------------

/// Slack line `eps <= a * log2(len(x) + 2) + b`, pinned in the golden
/// configuration file at bring-up.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SlackBound {
    pub a: f64,
    pub b: f64,
}

impl SlackBound {
    pub fn threshold(&self, x_len: usize) -> f64 {
        self.a * ((x_len + 2) as f64).log2() + self.b
    }
}

/// The slack line pinned at bring-up, compiled into the library.
pub fn golden_slack() -> SlackBound {
    serde_json::from_str(include_str!("../golden/slack.json")).expect("golden slack file parses")
}

/// Pairwise curve distances: structure/bounded, stochasticity/structure,
/// bounded/stochasticity.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Epsilons {
    pub sb: f64,
    pub ss: f64,
    pub bs: f64,
}

impl Epsilons {
    pub fn max(&self) -> f64 {
        self.sb.max(self.ss).max(self.bs)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CoincidenceReport {
    pub x: BitString,
    pub epsilons: Epsilons,
    pub slack: SlackBound,
    pub pass: bool,
}

/// Pairwise distances between the three curves (in shared coordinates)
/// checked against the golden slack line.
pub fn coincidence_report(
    x: &BitString,
    bounded: &Profile,
    normalized_structure: &Profile,
    stochasticity: &Profile,
    slack: SlackBound,
) -> Result<CoincidenceReport, ProfileError> {
    if bounded.provenance() != normalized_structure.provenance()
        || bounded.provenance() != stochasticity.provenance()
    {
        return Err(ProfileError::ProvenanceMismatch);
    }
    let epsilons = Epsilons {
        sb: profile_distance(normalized_structure, bounded)?,
        ss: profile_distance(stochasticity, normalized_structure)?,
        bs: profile_distance(bounded, stochasticity)?,
    };
    let pass = epsilons.max() <= slack.threshold(x.len());
    Ok(CoincidenceReport {
        x: x.clone(),
        epsilons,
        slack,
        pass,
    })
}

// ---------------------------------------------------------------------------
// CSV rendering
// ---------------------------------------------------------------------------

pub const PROFILE_CSV_HEADER: &str = "k,value,kind,x_len,x_hex,L,T,machine";

/// One row per budget; Top renders as the literal `TOP`.
pub fn profile_to_csv(p: &Profile, x: &BitString) -> String {
    let mut out = String::from(PROFILE_CSV_HEADER);
    out.push('\n');
    let prov = p.provenance();
    for (k, v) in p.values().iter().enumerate() {
        let val = match v {
            ProfileValue::Finite(f) => format!("{f}"),
            ProfileValue::Top => "TOP".to_string(),
        };
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            k,
            val,
            p.kind(),
            x.len(),
            x.hex(),
            prov.max_len,
            prov.step_cap,
            prov.machine_tag
        ));
    }
    out
}

/// Rank points in the same schema (`k` is the point's budget coordinate).
pub fn rank_to_csv(r: &RankProfile, x: &BitString) -> String {
    let mut out = String::from(PROFILE_CSV_HEADER);
    out.push('\n');
    for p in &r.points {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            p.budget,
            p.log_count,
            ProfileKind::Rank,
            x.len(),
            x.hex(),
            r.provenance.max_len,
            r.provenance.step_cap,
            r.provenance.machine_tag
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::enumerate::build_run_table;
    use crate::vm::MachineConfig;

    fn bs(s: &str) -> BitString {
        BitString::from_binary_str(s).unwrap()
    }

    fn prov(k: u32) -> Provenance {
        Provenance {
            max_len: k,
            step_cap: 99,
            machine_tag: "test".into(),
        }
    }

    fn prof(values: &[f64]) -> Profile {
        Profile::new(
            ProfileKind::Structure,
            values.iter().map(|v| ProfileValue::Finite(*v)).collect(),
            prov(values.len() as u32 - 1),
        )
    }

    #[test]
    fn distance_of_identical_profiles_is_zero() {
        let p = prof(&[3.0, 2.0, 1.0, 0.0]);
        assert_eq!(profile_distance(&p, &p).unwrap(), 0.0);
    }

    #[test]
    fn distance_of_unit_shift_is_one() {
        // Q is P shifted by +1 in budget and +1 in value.
        let p = prof(&[3.0, 2.0, 1.0, 0.0, 0.0]);
        let q = prof(&[4.0, 4.0, 3.0, 2.0, 1.0]);
        let d = profile_distance(&p, &q).unwrap();
        assert!((d - 1.0).abs() <= 1e-12, "got {d}");
    }

    #[test]
    fn distance_sees_interior_midpoints() {
        // Slots at offset positions force a half-integer maximizer.
        let p = prof(&[9.0, 0.0, 9.0]);
        let q = prof(&[0.0, 9.0, 0.0]);
        let d = profile_distance(&p, &q).unwrap();
        assert!((d - 1.0).abs() <= 1e-12, "got {d}");
        // Directed from p only: the slot bottom [1,2] is 0.5 from q's graph.
        let ps = segments(&p);
        let qs = segments(&q);
        assert!((directed_hausdorff(&ps, &qs) - 0.5).abs() <= 1e-12);
    }

    #[test]
    fn distance_is_symmetric_and_shape_checked() {
        let p = prof(&[2.0, 1.0, 0.0]);
        let q = prof(&[5.0, 0.0, 0.0]);
        assert_eq!(
            profile_distance(&p, &q).unwrap(),
            profile_distance(&q, &p).unwrap()
        );
        let r = prof(&[1.0, 0.0]);
        assert_eq!(profile_distance(&p, &r), Err(ProfileError::ShapeMismatch));
    }

    #[test]
    fn point_distance_handles_out_of_range_budgets() {
        let p = prof(&[1.0, 0.0]);
        assert_eq!(point_to_upper_graph_distance(-2.0, 1.0, &p), 2.0);
        assert_eq!(point_to_upper_graph_distance(0.0, 1.0, &p), 0.0);
        assert_eq!(point_to_upper_graph_distance(1.0, -1.0, &p), 1.0);
    }

    #[test]
    fn ceil_log2_small_values() {
        let want = [(1u64, 0u32), (2, 1), (3, 2), (4, 2), (5, 3), (8, 3), (9, 4)];
        for (n, s) in want {
            assert_eq!(ceil_log2(n), s, "n={n}");
        }
    }

    #[test]
    fn shannon_anchors() {
        assert_eq!(shannon_entropy(0.5).unwrap(), 1.0);
        assert_eq!(shannon_entropy(0.0).unwrap(), 0.0);
        assert_eq!(shannon_entropy(1.0).unwrap(), 0.0);
        // Independently evaluated to 12 digits: log2(3) - 2/3.
        let h = shannon_entropy(1.0 / 3.0).unwrap();
        assert!((h - 0.918295834054).abs() <= 1e-12, "got {h}");
        assert_eq!(shannon_entropy(1.2), Err(ProfileError::DomainError));
        assert_eq!(shannon_entropy(-0.1), Err(ProfileError::DomainError));
    }

    #[test]
    fn bernoulli_anchors() {
        // binomial(3,1) = 3 and binomial(4,2) = 6, counted by hand.
        let t = bernoulli_two_part(3, 1).unwrap();
        assert!((t.log_count - 3f64.log2()).abs() <= 1e-12);
        let t = bernoulli_two_part(4, 2).unwrap();
        assert!((t.log_count - 6f64.log2()).abs() <= 1e-12);
        assert!((t.total_hint - (6f64.log2() + 5f64.log2() + 3f64.log2())).abs() <= 1e-12);
        assert_eq!(bernoulli_two_part(4, 0).unwrap().log_count, 0.0);
        assert_eq!(bernoulli_two_part(2, 3), Err(ProfileError::DomainError));
        // No overflow at sizes where factorials are hopeless; the entropy
        // approximation is good to the usual half-log correction.
        let big = bernoulli_two_part(3000, 1000).unwrap();
        assert!((big.log_count - 3000.0 * shannon_entropy(1.0 / 3.0).unwrap()).abs() < 7.0);
    }

    #[test]
    fn rank_anchor_for_empty_string() {
        // At m=3 the dovetail order is ["", "0"], so c=1, s=1, point (2,1).
        let r = rank_profile(&BitString::new(), 0..=3, 10).unwrap();
        assert_eq!(
            r.points.last(),
            Some(&RankPoint {
                m: 3,
                budget: 2,
                log_count: 1
            })
        );
        // At m=0 the empty string is the last to appear: point (0, 0).
        assert_eq!(
            r.points[0],
            RankPoint {
                m: 0,
                budget: 0,
                log_count: 0
            }
        );
        assert!(r.skipped.is_empty());
        // A string never produced is skipped silently.
        let miss = rank_profile(&bs("1"), 0..=3, 10).unwrap();
        assert!(miss.points.is_empty());
        assert_eq!(miss.skipped, vec![0, 1, 2, 3]);
    }

    // Pipeline fixtures at the smallest scale where a model exists.
    fn fixture() -> (RunTable, Vec<ModelRecord>, CondTables) {
        let machine = MachineConfig::default();
        let plain = build_run_table(&machine, &BitString::new(), 18, 64).unwrap();
        let models = models::harvest_models(&plain, 18).unwrap();
        let cond = models::build_cond_tables(&machine, &models, None, 18, 64).unwrap();
        (plain, models, cond)
    }

    #[test]
    fn pipeline_profiles_for_empty_string() {
        let (plain, models, cond) = fixture();
        let x = BitString::new();

        let h = structure_function(&x, &models, &plain).unwrap();
        assert!(h.is_non_increasing());
        // Singleton {empty} has complexity 18: Top before, 0 at and after.
        for k in 0..18 {
            assert_eq!(h.value(k), ProfileValue::Top);
        }
        assert_eq!(h.value(18), ProfileValue::Finite(0.0));

        let norm = normalized_structure_profile(&x, &models, &plain).unwrap();
        // At k = C({x}) the normalized value equals delta(x|{x}) = 18.
        assert_eq!(norm.value(18), ProfileValue::Finite(18.0));

        let st = stochasticity_profile(&x, &models, &cond).unwrap();
        assert!(st.profile.is_non_increasing());
        assert_eq!(st.profile.value(18), ProfileValue::Finite(0.0));
        assert_eq!(st.clamped.value(18), ProfileValue::Finite(0.0));

        // Dominance: stochasticity <= structure wherever both are finite.
        for k in 0..=18 {
            if let (ProfileValue::Finite(s), ProfileValue::Finite(hh)) =
                (st.profile.value(k), h.value(k))
            {
                assert!(s <= hh + 1e-12);
            }
        }

        let b = bounded_profile(&x, &plain).unwrap();
        assert!(b.is_non_increasing());
        assert_eq!(b.value(0), ProfileValue::Finite(0.0));

        let report =
            coincidence_report(&x, &b, &norm, &st.profile, SlackBound { a: 1.0, b: 20.0 }).unwrap();
        assert!(report.epsilons.max().is_finite());
        assert!(report.pass);
        // Zero slack fails as soon as any epsilon is positive.
        let strict =
            coincidence_report(&x, &b, &norm, &st.profile, SlackBound { a: 0.0, b: 0.0 }).unwrap();
        assert_eq!(strict.pass, report.epsilons.max() == 0.0);
    }

    #[test]
    fn no_model_errors_are_reported() {
        let (plain, models, cond) = fixture();
        let x = bs("0");
        assert_eq!(
            structure_function(&x, &models, &plain),
            Err(ProfileError::NoModel)
        );
        assert_eq!(
            stochasticity_profile(&x, &models, &cond).unwrap_err(),
            ProfileError::NoModel
        );
    }

    #[test]
    fn sufficient_statistic_for_empty_string() {
        let (plain, models, _) = fixture();
        let x = BitString::new();
        // C(empty)=0, singleton at k=18 with h=0: needs slack >= 18.
        let s = minimal_sufficient_statistic(&x, &models, &plain, 18).unwrap();
        assert_eq!(s.k_star, 18);
        assert_eq!(
            minimal_sufficient_statistic(&x, &models, &plain, 17).unwrap_err(),
            ProfileError::NoSufficientStatistic
        );
        assert_eq!(sophistication(&x, &models, &plain, 20).unwrap(), 18);
    }

    #[test]
    fn csv_shape() {
        let p = prof(&[1.0, 0.0]);
        let csv = profile_to_csv(&p, &bs("0"));
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some(PROFILE_CSV_HEADER));
        assert_eq!(lines.next(), Some("0,1,Structure,1,00,1,99,test"));
        assert_eq!(lines.next(), Some("1,0,Structure,1,00,1,99,test"));
    }

    #[test]
    fn csv_renders_top_literal() {
        let p = Profile::new(
            ProfileKind::Bounded,
            vec![ProfileValue::Top, ProfileValue::Finite(0.5)],
            prov(1),
        );
        let csv = profile_to_csv(&p, &BitString::new());
        assert!(csv.contains("0,TOP,Bounded,0,,1,99,test"));
        assert!(csv.contains("1,0.5,Bounded,0,,1,99,test"));
    }

    #[test]
    fn coincidence_requires_shared_provenance() {
        let p = prof(&[0.0, 0.0]);
        let mut other = prof(&[0.0, 0.0]);
        other.provenance.step_cap = 7;
        assert_eq!(
            coincidence_report(
                &BitString::new(),
                &p,
                &p,
                &other,
                SlackBound { a: 1.0, b: 1.0 }
            )
            .unwrap_err(),
            ProfileError::ProvenanceMismatch
        );
    }
}
