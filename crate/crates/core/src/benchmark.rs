//! Latency and validity sweeps over fixed scenario classes.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};
use std::str::FromStr;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::director::{check_reply, Strictness, ValidityReport};
use crate::gateway::{Gateway, ProviderConfig, ProviderKind};
use crate::scene::Scene;
use crate::synth::{agent, floor_position, CATALOG};

/// Half-width of the square floor area scenarios are laid out on.
pub const LAYOUT_EXTENT: f64 = 6.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ScenarioLabel {
    #[serde(rename = "1O-1A")]
    O1A1,
    #[serde(rename = "5O-1A")]
    O5A1,
    #[serde(rename = "5O-2A")]
    O5A2,
    #[serde(rename = "5O-5A")]
    O5A5,
    #[serde(rename = "10O-5A")]
    O10A5,
}

impl ScenarioLabel {
    pub const ALL: [ScenarioLabel; 5] = [
        ScenarioLabel::O1A1,
        ScenarioLabel::O5A1,
        ScenarioLabel::O5A2,
        ScenarioLabel::O5A5,
        ScenarioLabel::O10A5,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ScenarioLabel::O1A1 => "1O-1A",
            ScenarioLabel::O5A1 => "5O-1A",
            ScenarioLabel::O5A2 => "5O-2A",
            ScenarioLabel::O5A5 => "5O-5A",
            ScenarioLabel::O10A5 => "10O-5A",
        }
    }

    /// `(objects, agents)`.
    pub fn counts(self) -> (usize, usize) {
        match self {
            ScenarioLabel::O1A1 => (1, 1),
            ScenarioLabel::O5A1 => (5, 1),
            ScenarioLabel::O5A2 => (5, 2),
            ScenarioLabel::O5A5 => (5, 5),
            ScenarioLabel::O10A5 => (10, 5),
        }
    }
}

impl fmt::Display for ScenarioLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("unknown scenario class {0:?} (expected 1O-1A, 5O-1A, 5O-2A, 5O-5A, or 10O-5A)")]
pub struct UnknownScenario(pub String);

impl FromStr for ScenarioLabel {
    type Err = UnknownScenario;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ScenarioLabel::ALL
            .into_iter()
            .find(|l| l.as_str().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| UnknownScenario(s.to_owned()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScenarioClass {
    pub label: ScenarioLabel,
    pub layout_seed: u64,
}

impl ScenarioClass {
    pub fn new(label: ScenarioLabel, layout_seed: u64) -> Self {
        Self { label, layout_seed }
    }

    pub fn all(layout_seed: u64) -> Vec<ScenarioClass> {
        ScenarioLabel::ALL
            .into_iter()
            .map(|l| ScenarioClass::new(l, layout_seed))
            .collect()
    }

    pub fn object_count(&self) -> usize {
        self.label.counts().0
    }

    pub fn agent_count(&self) -> usize {
        self.label.counts().1
    }
}

/// Deterministic scene for a class. Objects cycle through the catalog starting
/// at a seeded offset, so every class with five or more objects mixes
/// interaction types.
pub fn build_scenario(class: ScenarioClass) -> Scene {
    let (objects, agents) = class.label.counts();
    let mut rng =
        ChaCha8Rng::seed_from_u64(class.layout_seed ^ ((objects as u64) << 8) ^ agents as u64);
    let offset = rng.random_range(0..CATALOG.len());
    let agents = (1..=agents as u64)
        .map(|n| agent(n, floor_position(&mut rng, LAYOUT_EXTENT)))
        .collect();
    let objects = (0..objects)
        .map(|i| {
            let item = &CATALOG[(offset + i) % CATALOG.len()];
            item.object(i as u64 + 1, floor_position(&mut rng, LAYOUT_EXTENT))
        })
        .collect();
    Scene { agents, objects }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValiditySummary {
    pub parse_ok: bool,
    pub is_structurally_valid: bool,
    pub errors: usize,
    pub warnings: usize,
    /// Gateway failure message, when the request itself failed.
    pub failure: Option<String>,
}

impl From<&ValidityReport> for ValiditySummary {
    fn from(r: &ValidityReport) -> Self {
        Self {
            parse_ok: r.parse_ok,
            is_structurally_valid: r.is_structurally_valid,
            errors: r.errors().count(),
            warnings: r.warnings().count(),
            failure: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkRecord {
    pub provider: ProviderKind,
    pub scenario: ScenarioLabel,
    pub trial: usize,
    /// Seconds.
    pub latency: f64,
    pub validity: ValiditySummary,
    pub retained: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkStats {
    pub provider: ProviderKind,
    pub scenario: ScenarioLabel,
    /// Mean latency over retained trials, seconds. Zero when none were retained.
    pub mean: f64,
    /// Sample standard deviation (n - 1), seconds.
    pub sd: f64,
    /// Retained trials behind `mean` and `sd`.
    pub trial_count: usize,
    pub total: usize,
    pub validity_rate: f64,
    /// `sd` is reported as 0 because only one trial was retained.
    pub single_sample: bool,
}

#[derive(Debug, Error)]
pub enum BenchmarkError {
    #[error("trials must be at least 1")]
    NoTrials,
    #[error("no providers given")]
    NoProviders,
    #[error("no scenario classes given")]
    NoClasses,
}

/// Runs every class against every provider, one request at a time.
///
/// Validity is judged in lenient mode: a reply is retained when it parses and
/// references resolve, even if a speed or duration is out of range.
pub fn run_benchmark(
    gateway: &Gateway,
    providers: &[ProviderConfig],
    classes: &[ScenarioClass],
    trials: usize,
) -> Result<Vec<BenchmarkRecord>, BenchmarkError> {
    run_benchmark_with(gateway, providers, classes, trials, |_| {})
}

/// [`run_benchmark`] with a callback after every trial.
pub fn run_benchmark_with(
    gateway: &Gateway,
    providers: &[ProviderConfig],
    classes: &[ScenarioClass],
    trials: usize,
    mut on_record: impl FnMut(&BenchmarkRecord),
) -> Result<Vec<BenchmarkRecord>, BenchmarkError> {
    if trials == 0 {
        return Err(BenchmarkError::NoTrials);
    }
    if providers.is_empty() {
        return Err(BenchmarkError::NoProviders);
    }
    if classes.is_empty() {
        return Err(BenchmarkError::NoClasses);
    }
    let mut records = Vec::with_capacity(providers.len() * classes.len() * trials);
    for class in classes {
        let scene = build_scenario(*class);
        for config in providers {
            for trial in 0..trials {
                let started = Instant::now();
                let outcome = gateway.generate(config, &scene);
                let record = match outcome {
                    Ok(result) => {
                        let (_, report) =
                            check_reply(&result.raw_text, &scene, Strictness::Lenient);
                        BenchmarkRecord {
                            provider: config.provider,
                            scenario: class.label,
                            trial,
                            latency: result.latency,
                            retained: report.is_structurally_valid,
                            validity: ValiditySummary::from(&report),
                        }
                    }
                    Err(e) => BenchmarkRecord {
                        provider: config.provider,
                        scenario: class.label,
                        trial,
                        latency: started.elapsed().as_secs_f64(),
                        retained: false,
                        validity: ValiditySummary {
                            parse_ok: false,
                            is_structurally_valid: false,
                            errors: 0,
                            warnings: 0,
                            failure: Some(e.to_string()),
                        },
                    },
                };
                on_record(&record);
                records.push(record);
            }
        }
    }
    Ok(records)
}

/// Mean and sample standard deviation. Samples are sorted first so the result
/// does not depend on input order, and centered on their minimum so constant
/// samples give exactly that constant and zero spread.
pub fn mean_sd(samples: &[f64]) -> (f64, f64) {
    if samples.is_empty() {
        return (0.0, 0.0);
    }
    let mut xs = samples.to_vec();
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    let base = xs[0];
    let shift = xs.iter().map(|x| x - base).sum::<f64>() / n;
    let mean = base + shift;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let ss: f64 = xs.iter().map(|x| (x - base - shift).powi(2)).sum();
    (mean, (ss / (n - 1.0)).sqrt())
}

/// Per (provider, scenario) statistics over retained trials, sorted by provider
/// then scenario.
pub fn summarize(records: &[BenchmarkRecord]) -> Vec<BenchmarkStats> {
    let mut cells: BTreeMap<(ProviderKind, ScenarioLabel), (Vec<f64>, usize)> = BTreeMap::new();
    for r in records {
        let cell = cells.entry((r.provider, r.scenario)).or_default();
        cell.1 += 1;
        if r.retained {
            cell.0.push(r.latency);
        }
    }
    cells
        .into_iter()
        .map(|((provider, scenario), (latencies, total))| {
            let (mean, sd) = mean_sd(&latencies);
            BenchmarkStats {
                provider,
                scenario,
                mean,
                sd,
                trial_count: latencies.len(),
                total,
                validity_rate: latencies.len() as f64 / total as f64,
                single_sample: latencies.len() == 1,
            }
        })
        .collect()
}

pub const CSV_HEADER: &str = "provider,scenario,trial,latency_s,valid,retained";

pub fn records_csv(records: &[BenchmarkRecord]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in records {
        let _ = writeln!(
            out,
            "{},{},{},{:.6},{},{}",
            r.provider,
            r.scenario,
            r.trial,
            r.latency,
            r.validity.is_structurally_valid,
            r.retained
        );
    }
    out
}

/// One published reference cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReferenceCell {
    pub provider: ProviderKind,
    pub scenario: ScenarioLabel,
    pub mean: f64,
    pub sd: f64,
}

/// Published latency figures for the four hosted providers, for side-by-side
/// display only. They were measured against live APIs and are not expected to
/// be reproduced.
pub const REFERENCE_CSV: &str = include_str!("../resources/reference_latency.csv");

pub fn reference_table() -> Vec<ReferenceCell> {
    REFERENCE_CSV
        .lines()
        .skip(1)
        .filter(|l| !l.trim().is_empty())
        .map(|line| {
            let f: Vec<&str> = line.split(',').collect();
            ReferenceCell {
                provider: f[0].parse().expect("bundled provider"),
                scenario: f[1].parse().expect("bundled scenario"),
                mean: f[2].parse().expect("bundled mean"),
                sd: f[3].parse().expect("bundled sd"),
            }
        })
        .collect()
}

/// Two decimals with the leading zero dropped, as in published tables.
fn table_number(x: f64) -> String {
    let s = format!("{x:.2}");
    match s.strip_prefix("0.") {
        Some(rest) => format!(".{rest}"),
        None => s,
    }
}

/// Markdown table: one row per scenario, an M and SD column per provider.
pub fn markdown_report(stats: &[BenchmarkStats]) -> String {
    let mut providers: Vec<ProviderKind> = stats.iter().map(|s| s.provider).collect();
    providers.sort();
    providers.dedup();
    let mut scenarios: Vec<ScenarioLabel> = stats.iter().map(|s| s.scenario).collect();
    scenarios.sort();
    scenarios.dedup();
    let cell = |p, sc| stats.iter().find(|s| s.provider == p && s.scenario == sc);

    let mut out = String::from("Latency by provider and scenario (seconds)\n\n|");
    for p in &providers {
        let _ = write!(out, " | {} M | {} SD", p.display_name(), p.display_name());
    }
    out.push_str(" |\n|---");
    for _ in &providers {
        out.push_str("|---:|---:");
    }
    out.push_str("|\n");
    let mut footnotes = Vec::new();
    for sc in &scenarios {
        let _ = write!(out, "| **{sc}**");
        for p in &providers {
            match cell(*p, *sc) {
                Some(s) if s.trial_count > 0 => {
                    let mark = if s.single_sample { "*" } else { "" };
                    let _ = write!(
                        out,
                        " | {} | {}{mark}",
                        table_number(s.mean),
                        table_number(s.sd)
                    );
                    if s.trial_count < s.total {
                        footnotes.push(format!(
                            "{} {}: {} of {} trials retained",
                            p.display_name(),
                            sc,
                            s.trial_count,
                            s.total
                        ));
                    }
                }
                Some(s) => {
                    out.push_str(" | n/a | n/a");
                    footnotes.push(format!(
                        "{} {}: no retained trials out of {}",
                        p.display_name(),
                        sc,
                        s.total
                    ));
                }
                None => out.push_str(" | | "),
            }
        }
        out.push_str(" |\n");
    }
    out.push_str(
        "\nM is the mean over retained trials. SD is the sample standard deviation \
         (n - 1 denominator); * marks a single retained trial, reported as 0.\n",
    );
    for note in footnotes {
        let _ = writeln!(out, "- {note}");
    }
    out
}

/// The bundled reference figures in the same layout as [`markdown_report`].
pub fn reference_markdown() -> String {
    let stats: Vec<BenchmarkStats> = reference_table()
        .into_iter()
        .map(|c| BenchmarkStats {
            provider: c.provider,
            scenario: c.scenario,
            mean: c.mean,
            sd: c.sd,
            trial_count: 5,
            total: 5,
            validity_rate: 1.0,
            single_sample: false,
        })
        .collect();
    markdown_report(&stats)
}
