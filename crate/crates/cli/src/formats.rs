//! File formats consumed and produced by the command line: source problems,
//! planted-solution sidecars, verification reports, and run manifests.
//! Magnitude-carrying integers are decimal strings throughout; structural
//! indices and counts are plain numbers.

use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};

use bicrit_core::lemma_lab::{FlagMismatch, IdentityFailure, Mismatch, StrongSweep, WeakSweep};
use bicrit_core::sched_core::{dec_str_vec, Instance, Time};

/// An equal-sum split question: `m` groups (three-partition style) when `m`
/// is present, two halves otherwise.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SourceFile {
    pub kind: String,
    #[serde(with = "dec_str_vec")]
    pub a: Vec<Time>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<u32>,
}

/// Hidden solution of a planted source problem, 1-based element indices.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SolutionFile {
    pub groups: Vec<Vec<u32>>,
}

#[derive(Serialize)]
pub struct SweepReport {
    pub explored: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub best_tardy: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub achievable: Option<bool>,
    pub witness_found: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness_groups: Option<Vec<Vec<u32>>>,
}

impl From<&StrongSweep> for SweepReport {
    fn from(s: &StrongSweep) -> Self {
        SweepReport {
            explored: s.explored,
            best_tardy: s.best_tardy,
            achievable: None,
            witness_found: s.witness.is_some(),
            witness_groups: None,
        }
    }
}

impl From<&WeakSweep> for SweepReport {
    fn from(s: &WeakSweep) -> Self {
        SweepReport {
            explored: s.explored,
            best_tardy: None,
            achievable: Some(s.achievable),
            witness_found: s.witness.is_some(),
            witness_groups: s.witness_subset.as_ref().map(|set| vec![set.iter().copied().collect()]),
        }
    }
}

#[derive(Serialize)]
pub struct RoundTripReport {
    pub solution_source: String,
    pub tardy_ok: bool,
    pub bound_ok: bool,
    pub extraction_ok: bool,
}

/// Verification report written by `bicrit verify`.
#[derive(Serialize)]
pub struct VerifyReport {
    pub suite: String,
    pub input: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub samples: u64,
    pub skipped: u64,
    pub jobs_compared: u64,
    pub flags_compared: u64,
    pub identities_checked: u64,
    pub identity_failures: Vec<IdentityFailure>,
    pub mismatches: Vec<Mismatch>,
    pub feasibility_mismatches: Vec<FlagMismatch>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub roundtrip: Option<RoundTripReport>,
    pub ok: bool,
}

/// Reproducibility record for one invocation.
#[derive(Serialize)]
pub struct RunManifest {
    pub command: Vec<String>,
    pub rng: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub budgets: BudgetManifest,
    pub inputs: Vec<String>,
    pub outputs: Vec<String>,
    pub wall_ms: u128,
    pub summary: String,
}

#[derive(Serialize)]
pub struct BudgetManifest {
    pub subsets: u64,
    pub perms: u64,
    pub candidates: u64,
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("cannot parse {}", path.display()))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).context("serialization failed")?;
    text.push('\n');
    fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))?;
    Ok(())
}

pub fn read_instance(path: &Path) -> Result<Instance> {
    let instance: Instance = read_json(path)?;
    let report = bicrit_core::validate_instance(&instance);
    if !report.is_valid() {
        bail!("invalid instance {}: {:?}", path.display(), report.findings);
    }
    Ok(instance)
}
