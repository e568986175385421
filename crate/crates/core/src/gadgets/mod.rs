//! Reduction workloads as update scripts with brute-force expected answers,
//! and a harness that replays them against any distance provider.

pub mod kcycle;
pub mod oumv;

use std::collections::BTreeMap;
use std::fmt::Write;
use std::time::Instant;

use crate::error::{Error, Result};
use crate::graph::script::{ScriptEvent, UpdateScript};
use crate::graph::Dist;
use crate::provider::DistanceProvider;

pub use kcycle::{gen_kcycle, KCycleMode};
pub use oumv::{gen_oumv_decremental, gen_oumv_fully, gen_oumv_incremental, OuMvInstance};

/// A script whose `PH` markers carry expected bits, with per-phase thresholds
/// recorded as `threshold <phase> <value>` annotations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GadgetScript {
    pub script: UpdateScript,
    pub thresholds: BTreeMap<usize, u64>,
    pub expected_bits: BTreeMap<usize, bool>,
}

impl GadgetScript {
    pub(crate) fn new(script: UpdateScript) -> Self {
        GadgetScript { script, thresholds: BTreeMap::new(), expected_bits: BTreeMap::new() }
    }

    /// Ends a phase: distance query, then the phase marker.
    pub(crate) fn phase(&mut self, index: usize, u: usize, v: usize, threshold: u64, bit: bool) {
        self.script.push(ScriptEvent::DistQuery { u, v, expected: None });
        self.script.push(ScriptEvent::Phase { index, expected_bit: Some(bit) });
        self.script.annotations.push(format!("threshold {index} {threshold}"));
        self.thresholds.insert(index, threshold);
        self.expected_bits.insert(index, bit);
    }

    /// Recovers thresholds and bits from a parsed script.
    pub fn from_script(script: UpdateScript) -> Result<Self> {
        let thresholds: BTreeMap<usize, u64> = script.thresholds().into_iter().collect();
        let mut expected_bits = BTreeMap::new();
        for ev in &script.events {
            if let ScriptEvent::Phase { index, expected_bit } = ev {
                if !thresholds.contains_key(index) {
                    return Err(Error::ParamDomain(format!("phase {index} has no threshold annotation")));
                }
                if let Some(b) = expected_bit {
                    expected_bits.insert(*index, *b);
                }
            }
        }
        Ok(GadgetScript { script, thresholds, expected_bits })
    }

    pub fn phase_count(&self) -> usize {
        self.thresholds.len()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PhaseResult {
    pub phase: usize,
    pub expected: Option<bool>,
    pub observed: bool,
    pub distance: Dist,
    pub threshold: u64,
    pub micros: u64,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct HarnessReport {
    pub provider: String,
    pub phases: Vec<PhaseResult>,
}

pub const HARNESS_HEADER: &str = "# dynpaths-harness v1";

impl HarnessReport {
    pub fn mismatches(&self) -> Vec<&PhaseResult> {
        self.phases.iter().filter(|p| p.expected.is_some_and(|e| e != p.observed)).collect()
    }

    /// Disjunction of all observed bits (the detection answer for k-cycle scripts).
    pub fn any_observed(&self) -> bool {
        self.phases.iter().any(|p| p.observed)
    }

    /// CSV with a versioned header line. `timing = false` writes 0 micros so
    /// identical runs give identical bytes.
    pub fn to_csv(&self, timing: bool) -> String {
        let mut s = String::new();
        writeln!(s, "{HARNESS_HEADER}").unwrap();
        writeln!(s, "phase,expected,observed,distance,threshold,micros").unwrap();
        for p in &self.phases {
            let exp = p.expected.map_or("".to_string(), |b| (b as u8).to_string());
            let micros = if timing { p.micros } else { 0 };
            writeln!(s, "{},{},{},{},{},{}", p.phase, exp, p.observed as u8, p.distance, p.threshold, micros).unwrap();
        }
        s
    }
}

/// Replays `gs` against `provider`, which must start on the script's initial
/// graph. A phase bit is `distance < threshold` for the last distance query
/// before the phase marker.
pub fn harness_run(gs: &GadgetScript, provider: &mut dyn DistanceProvider) -> Result<HarnessReport> {
    let mut report = HarnessReport { provider: provider.name().to_string(), phases: Vec::new() };
    let mut last = Dist::Inf;
    let mut clock = Instant::now();
    for ev in &gs.script.events {
        match ev {
            ScriptEvent::Insert(..) | ScriptEvent::Delete(..) => {
                provider.apply(ev.edge_event().expect("edge event"))?;
            }
            ScriptEvent::DistQuery { u, v, .. } => last = provider.dist(*u, *v)?,
            ScriptEvent::PathQuery { u, v } => {
                provider.path(*u, *v)?;
            }
            ScriptEvent::AddTerminal(_) | ScriptEvent::RemoveTerminal(_) => {}
            ScriptEvent::Phase { index, expected_bit } => {
                let threshold = *gs
                    .thresholds
                    .get(index)
                    .ok_or_else(|| Error::ParamDomain(format!("phase {index} has no threshold")))?;
                let observed = matches!(last, Dist::Finite(d) if (d as u64) < threshold);
                report.phases.push(PhaseResult {
                    phase: *index,
                    expected: *expected_bit,
                    observed,
                    distance: last,
                    threshold,
                    micros: clock.elapsed().as_micros() as u64,
                });
                last = Dist::Inf;
                clock = Instant::now();
            }
        }
    }
    Ok(report)
}
