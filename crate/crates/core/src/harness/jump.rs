use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::{BoxStats, HarnessError, SCHEMA_VERSION};
use crate::sim::{run_jump_trial, JumpMetrics, Scenario, SpineMode, TrialConfig};

/// Seed of trial `index` in a batch. Every spine mode uses the same trial
/// seeds, so trial `i` of each mode sees the same perturbations.
pub fn derive_trial_seed(base: u64, index: u32) -> u64 {
    // splitmix64 finalizer
    let mut z = base.wrapping_add((index as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial: u32,
    pub seed: u64,
    pub mode: SpineMode,
    pub metrics: Option<JumpMetrics>,
    pub fault: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeSummary {
    pub mode: SpineMode,
    pub completed: usize,
    pub faults: usize,
    pub max_height: Option<BoxStats>,
    pub max_vz: Option<BoxStats>,
    pub peak_landing_decel: Option<BoxStats>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JumpExperiment {
    pub schema_version: u32,
    pub scenario: Scenario,
    pub base_seed: u64,
    pub trials: u32,
    pub records: Vec<TrialRecord>,
    pub summaries: Vec<ModeSummary>,
}

impl JumpExperiment {
    pub fn records_for(&self, mode: SpineMode) -> impl Iterator<Item = &TrialRecord> {
        self.records.iter().filter(move |r| r.mode == mode)
    }

    pub fn summary(&self, mode: SpineMode) -> Option<&ModeSummary> {
        self.summaries.iter().find(|s| s.mode == mode)
    }
}

fn run_one(base: &TrialConfig, mode: SpineMode, scenario: Scenario, trial: u32, seed: u64) -> TrialRecord {
    let cfg = TrialConfig { mode, scenario, seed, log_every: usize::MAX, ..base.clone() };
    match run_jump_trial(&cfg) {
        Ok(out) => TrialRecord { trial, seed, mode, metrics: Some(out.metrics), fault: None },
        Err(e) => {
            log::warn!("{} trial {trial} (seed {seed}) failed: {e}", mode.label());
            TrialRecord { trial, seed, mode, metrics: None, fault: Some(e.fault.to_string()) }
        }
    }
}

/// Runs `trials` seeded jumps for every mode in `modes`. Sim faults are
/// recorded per trial and left out of the statistics.
pub fn jump_experiment(
    base: &TrialConfig,
    modes: &[SpineMode],
    scenario: Scenario,
    trials: u32,
    seed: u64,
    parallel: bool,
) -> Result<JumpExperiment, HarnessError> {
    if trials < 1 {
        return Err(HarnessError::Config("trials must be at least 1".into()));
    }
    if modes.is_empty() {
        return Err(HarnessError::Config("no spine modes selected".into()));
    }
    let jobs: Vec<(SpineMode, u32)> = modes.iter().flat_map(|&m| (0..trials).map(move |i| (m, i))).collect();
    let run = |&(mode, i): &(SpineMode, u32)| run_one(base, mode, scenario, i, derive_trial_seed(seed, i));

    let records: Vec<TrialRecord> = if parallel && jobs.len() > 1 {
        let workers = std::thread::available_parallelism().map_or(1, |n| n.get()).min(jobs.len());
        let chunk = jobs.len().div_ceil(workers);
        std::thread::scope(|scope| {
            let handles: Vec<_> = jobs
                .chunks(chunk)
                .map(|part| scope.spawn(move || part.iter().map(run).collect::<Vec<_>>()))
                .collect();
            handles.into_iter().flat_map(|h| h.join().expect("trial worker panicked")).collect()
        })
    } else {
        jobs.iter().map(run).collect()
    };

    let summaries = modes
        .iter()
        .map(|&mode| {
            let ok: Vec<&JumpMetrics> = records.iter().filter(|r| r.mode == mode).filter_map(|r| r.metrics.as_ref()).collect();
            let col = |f: fn(&JumpMetrics) -> f64| BoxStats::from_values(&ok.iter().map(|m| f(m)).collect::<Vec<_>>());
            ModeSummary {
                mode,
                completed: ok.len(),
                faults: trials as usize - ok.len(),
                max_height: col(|m| m.max_height),
                max_vz: col(|m| m.max_vz),
                peak_landing_decel: col(|m| m.peak_landing_decel),
            }
        })
        .collect();

    Ok(JumpExperiment { schema_version: SCHEMA_VERSION, scenario, base_seed: seed, trials, records, summaries })
}

/// Plain-text table of means and medians per mode, with the compliant/rigid
/// ratio of means when both are present.
pub fn comparison_table(exp: &JumpExperiment) -> String {
    let mut out = String::new();
    type Column = fn(&ModeSummary) -> Option<BoxStats>;
    let metrics: [(&str, Column); 3] = [
        ("max_height_m", |s| s.max_height),
        ("max_vz_mps", |s| s.max_vz),
        ("peak_landing_decel_mps2", |s| s.peak_landing_decel),
    ];
    let _ = write!(out, "{:<26}", "metric");
    for s in &exp.summaries {
        let _ = write!(out, " {:>14} {:>14}", format!("{}_mean", s.mode.label()), format!("{}_median", s.mode.label()));
    }
    let pair = (exp.summary(SpineMode::Rigid), exp.summary(SpineMode::Compliant));
    if let (Some(_), Some(_)) = pair {
        let _ = write!(out, " {:>10}", "c/r");
    }
    out.push('\n');
    for (name, get) in metrics {
        let _ = write!(out, "{name:<26}");
        for s in &exp.summaries {
            match get(s) {
                Some(b) => {
                    let _ = write!(out, " {:>14.4} {:>14.4}", b.mean, b.median);
                }
                None => {
                    let _ = write!(out, " {:>14} {:>14}", "-", "-");
                }
            }
        }
        if let (Some(r), Some(c)) = pair {
            match (get(r), get(c)) {
                (Some(r), Some(c)) if r.mean != 0.0 => {
                    let _ = write!(out, " {:>10.3}", c.mean / r.mean);
                }
                _ => {
                    let _ = write!(out, " {:>10}", "-");
                }
            }
        }
        out.push('\n');
    }
    for s in &exp.summaries {
        let _ = writeln!(out, "{}: {} completed, {} faults", s.mode.label(), s.completed, s.faults);
    }
    out
}
