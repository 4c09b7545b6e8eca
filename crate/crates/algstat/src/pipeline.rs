//! Front-door glue: cache-aware table building and the per-string bundle
//! of curves and reports that the CLI and the acceptance suite emit.

use std::ops::RangeInclusive;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::bits::BitString;
use crate::codec;
use crate::enumerate::{self, CacheError, EnumerateError, RunTable};
use crate::models::{self, CondTables, ModelError, ModelRecord};
use crate::profiles::{
    self, CoincidenceReport, Profile, ProfileError, RankProfile, SlackBound, StochasticityProfile,
};
use crate::vm::MachineConfig;

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Budget(#[from] EnumerateError),
    #[error(transparent)]
    Cache(#[from] CacheError),
    #[error(transparent)]
    Profile(#[from] ProfileError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CacheOutcome {
    Disabled,
    Hit,
    Built,
    /// The file existed but failed validation and was rebuilt in place.
    Rebuilt,
}

/// Builds tables, going through the cache directory when one is set.
#[derive(Clone, Debug)]
pub struct TableSource {
    pub machine: MachineConfig,
    pub cache_dir: Option<PathBuf>,
}

impl TableSource {
    pub fn new(machine: MachineConfig, cache_dir: Option<PathBuf>) -> Self {
        TableSource { machine, cache_dir }
    }

    /// Cache file name for a key; the key is also validated on load.
    pub fn cache_file(
        &self,
        condition: &BitString,
        max_len: u32,
        step_cap: u32,
    ) -> Option<PathBuf> {
        self.cache_dir.as_ref().map(|dir| {
            dir.join(format!(
                "{}_c{}x{}_L{}_T{}.runtable",
                self.machine.version_tag,
                condition.len(),
                condition.hex(),
                max_len,
                step_cap
            ))
        })
    }

    pub fn table(
        &self,
        condition: &BitString,
        max_len: u32,
        step_cap: u32,
    ) -> Result<(RunTable, CacheOutcome), PipelineError> {
        let Some(path) = self.cache_file(condition, max_len, step_cap) else {
            let t = enumerate::build_run_table(&self.machine, condition, max_len, step_cap)?;
            return Ok((t, CacheOutcome::Disabled));
        };
        match enumerate::cache_load(&self.machine, condition, max_len, step_cap, &path) {
            Ok(t) => Ok((t, CacheOutcome::Hit)),
            Err(CacheError::Io(e)) => Err(PipelineError::Io(e)),
            Err(CacheError::Miss(_)) => {
                let t = enumerate::build_run_table(&self.machine, condition, max_len, step_cap)?;
                enumerate::cache_store(&t, &path)?;
                Ok((t, CacheOutcome::Built))
            }
            Err(CacheError::Corrupt(_)) | Err(CacheError::KeyMismatch(_)) => {
                let t = enumerate::build_run_table(&self.machine, condition, max_len, step_cap)?;
                enumerate::cache_store(&t, &path)?;
                Ok((t, CacheOutcome::Rebuilt))
            }
        }
    }
}

/// Everything the profiles front end produces for one string.
#[derive(Debug)]
pub struct ProfileBundle {
    pub x: BitString,
    pub plain: RunTable,
    pub models: Vec<ModelRecord>,
    pub bounded: Profile,
    pub structure_raw: Profile,
    pub normalized: Profile,
    pub stochasticity: StochasticityProfile,
    pub report: CoincidenceReport,
    pub rank: Option<RankProfile>,
}

/// Build the three curves, their coincidence report, and optionally the
/// rank points, for `x` at `(L, T)`.
pub fn build_profile_bundle(
    source: &TableSource,
    x: &BitString,
    max_len: u32,
    step_cap: u32,
    max_elem_len: u32,
    slack: SlackBound,
    rank_range: Option<RangeInclusive<u32>>,
) -> Result<ProfileBundle, PipelineError> {
    let (plain, _) = source.table(&BitString::new(), max_len, step_cap)?;
    let models = models::harvest_models(&plain, max_elem_len)?;
    let mut cond = CondTables::new();
    for m in &models {
        if m.set.contains(x) {
            let (table, _) = source.table(&codec::encode_set(&m.set), max_len, step_cap)?;
            cond.insert(table);
        }
    }
    let bounded = profiles::bounded_profile(x, &plain)?;
    let structure_raw = profiles::structure_function(x, &models, &plain)?;
    let normalized = profiles::normalized_structure_profile(x, &models, &plain)?;
    let stochasticity = profiles::stochasticity_profile(x, &models, &cond)?;
    let report =
        profiles::coincidence_report(x, &bounded, &normalized, &stochasticity.profile, slack)?;
    let rank = match rank_range {
        Some(range) => Some(profiles::rank_profile(x, range, step_cap)?),
        None => None,
    };
    Ok(ProfileBundle {
        x: x.clone(),
        plain,
        models,
        bounded,
        structure_raw,
        normalized,
        stochasticity,
        report,
        rank,
    })
}

/// File names used by the profiles front end.
pub const BOUNDED_CSV: &str = "profile_bounded.csv";
pub const STRUCTURE_CSV: &str = "profile_structure.csv";
pub const STOCHASTICITY_CSV: &str = "profile_stochasticity.csv";
pub const COINCIDENCE_JSON: &str = "coincidence.json";
pub const MODELS_JSONL: &str = "models.jsonl";
pub const RANK_CSV: &str = "rank.csv";

/// Render the bundle's data files (name, bytes), deterministically.
/// The structure CSV carries the normalized curve and the stochasticity
/// CSV the unclamped one: the coordinates the coincidence check uses.
pub fn render_bundle_files(bundle: &ProfileBundle) -> Vec<(String, Vec<u8>)> {
    let mut files = Vec::new();
    files.push((
        BOUNDED_CSV.to_string(),
        profiles::profile_to_csv(&bundle.bounded, &bundle.x).into_bytes(),
    ));
    files.push((
        STRUCTURE_CSV.to_string(),
        profiles::profile_to_csv(&bundle.normalized, &bundle.x).into_bytes(),
    ));
    files.push((
        STOCHASTICITY_CSV.to_string(),
        profiles::profile_to_csv(&bundle.stochasticity.profile, &bundle.x).into_bytes(),
    ));
    let mut report = serde_json::to_string(&bundle.report).expect("report serialization");
    report.push('\n');
    files.push((COINCIDENCE_JSON.to_string(), report.into_bytes()));
    files.push((
        MODELS_JSONL.to_string(),
        models::dump_jsonl(&bundle.models).into_bytes(),
    ));
    if let Some(rank) = &bundle.rank {
        files.push((
            RANK_CSV.to_string(),
            profiles::rank_to_csv(rank, &bundle.x).into_bytes(),
        ));
    }
    files
}

/// Write rendered files under `dir`.
pub fn write_bundle_files(
    bundle: &ProfileBundle,
    dir: &Path,
) -> Result<Vec<PathBuf>, PipelineError> {
    std::fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    for (name, bytes) in render_bundle_files(bundle) {
        let path = dir.join(name);
        std::fs::write(&path, bytes)?;
        written.push(path);
    }
    Ok(written)
}
