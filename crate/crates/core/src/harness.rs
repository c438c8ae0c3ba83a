//! Scenario replication and aggregation.
//!
//! A scenario names one simulation cell. Each replicate derives its own
//! seed from `(master_seed, scenario id, replicate index)`, samples a
//! graph, selects K by silhouette and scores the partition against the
//! ground truth with the ARI. Results do not depend on thread count or
//! scheduling order.
//!
//! Summary quantiles use linear interpolation between order statistics
//! (`h = (R - 1) q`), the same convention as numpy's default.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{adjacency_from_points, generate_rings, ClusterAssignment, WeightedGraph};
use crate::kmeans::KMeansConfig;
use crate::metrics::adjusted_rand_index;
use crate::numeric::quantile;
use crate::rng;
use crate::sbm::{
    allocate_sizes, sample_fully_connected, sample_weighted, BlockProbMatrix, SizeProfile, WeakPair,
    WeightDistribution,
};
use crate::spectral::{select_k, SelectKOptions};

/// Fraction of failed replicates above which a scenario fails the suite.
pub const MAX_FAILURE_RATE: f64 = 0.01;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Profile {
    #[serde(rename = "EQ")]
    Eq,
    #[serde(rename = "NE")]
    Ne,
}

impl std::fmt::Display for Profile {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Profile::Eq => "EQ",
            Profile::Ne => "NE",
        })
    }
}

/// Concentric-ring point cloud in place of an SBM.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RingSpec {
    pub counts: Vec<usize>,
    pub radii: Vec<f64>,
}

/// One simulation cell.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScenarioSpec {
    pub id: String,
    pub n: usize,
    pub k_true: usize,
    pub p_win: f64,
    pub p_btw: f64,
    #[serde(default)]
    pub weak_pair: Option<WeakPair>,
    #[serde(default)]
    pub w_win: Option<WeightDistribution>,
    #[serde(default)]
    pub w_btw: Option<WeightDistribution>,
    #[serde(default)]
    pub fully_connected: bool,
    pub profile: Profile,
    pub replicates: usize,
    pub master_seed: u64,
    pub k_max: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rings: Option<RingSpec>,
}

impl ScenarioSpec {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(format!("scenario '{}': {msg}", self.id)));
        if self.id.is_empty() {
            return Err(Error::Config("scenario with empty id".into()));
        }
        if self.replicates == 0 {
            return bad("replicates must be >= 1".into());
        }
        if self.k_max < 2 || self.k_max > self.n {
            return bad(format!("k_max = {} must lie in [2, n = {}]", self.k_max, self.n));
        }
        if let Some(r) = &self.rings {
            if r.counts.len() != r.radii.len() || r.counts.len() != self.k_true {
                return bad("ring counts, radii and k_true must agree".into());
            }
            if r.counts.iter().sum::<usize>() != self.n {
                return bad("ring counts must sum to n".into());
            }
            return Ok(());
        }
        self.sizes()?;
        self.prob_matrix()?;
        let (w_win, w_btw) = self.weight_distributions();
        w_win.validate()?;
        w_btw.validate()?;
        if self.fully_connected && (self.w_win.is_none() || self.w_btw.is_none()) {
            return bad("fully connected scenarios need w_win and w_btw".into());
        }
        Ok(())
    }

    pub fn size_profile(&self) -> Result<SizeProfile> {
        match self.profile {
            Profile::Eq => Ok(SizeProfile::Equal),
            Profile::Ne => SizeProfile::imbalanced_for(self.k_true),
        }
    }

    pub fn sizes(&self) -> Result<Vec<usize>> {
        allocate_sizes(self.n, self.k_true, self.size_profile()?)
    }

    pub fn prob_matrix(&self) -> Result<BlockProbMatrix> {
        BlockProbMatrix::build(self.k_true, self.p_win, self.p_btw, self.weak_pair)
    }

    fn weight_distributions(&self) -> (WeightDistribution, WeightDistribution) {
        (
            self.w_win.unwrap_or(WeightDistribution::UNIT),
            self.w_btw.unwrap_or(WeightDistribution::UNIT),
        )
    }

    /// Draws one network and its ground truth.
    pub fn sample(&self, seed: u64) -> Result<(WeightedGraph, ClusterAssignment)> {
        if let Some(r) = &self.rings {
            let pc = generate_rings(&r.counts, &r.radii, seed)?;
            return Ok((adjacency_from_points(&pc)?, pc.truth()));
        }
        let sizes = self.sizes()?;
        let (w_win, w_btw) = self.weight_distributions();
        if self.fully_connected {
            sample_fully_connected(&sizes, w_win, w_btw, seed)
        } else {
            sample_weighted(&sizes, &self.prob_matrix()?, w_win, w_btw, seed)
        }
    }

    pub fn replicate_seed(&self, replicate: usize) -> u64 {
        rng::replicate_seed(self.master_seed, &self.id, replicate)
    }
}

/// Outcome of one replicate. `selected_k`/`ari` are `None` when the
/// replicate failed; `error` then carries the message.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReplicateRecord {
    pub scenario_id: String,
    pub replicate: usize,
    pub seed: u64,
    pub k_true: usize,
    pub n: usize,
    pub selected_k: Option<usize>,
    pub ari: Option<f64>,
    pub curve: BTreeMap<usize, f64>,
    pub runtime_ms: f64,
    pub error: Option<String>,
}

impl ReplicateRecord {
    pub fn failed(&self) -> bool {
        self.error.is_some()
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct RunOptions {
    /// Worker threads; `None` uses all available cores.
    pub jobs: Option<usize>,
    /// Overrides every scenario's replicate count.
    pub replicates: Option<usize>,
    pub kmeans: KMeansConfig,
    /// Write wall-clock times to `replicates.csv`; when off the column is
    /// left empty.
    pub record_timing: bool,
}

fn run_replicate(spec: &ScenarioSpec, replicate: usize, kmeans: &KMeansConfig) -> ReplicateRecord {
    let seed = spec.replicate_seed(replicate);
    let start = Instant::now();
    let outcome = (|| {
        let (g, truth) = spec.sample(seed)?;
        let opts = SelectKOptions {
            k_max: spec.k_max,
            kmeans: *kmeans,
            ..SelectKOptions::default()
        };
        let sel = select_k(&g, seed, &opts)?;
        let ari = adjusted_rand_index(&sel.assignment, &truth)?;
        Ok::<_, Error>((sel, ari))
    })();
    let runtime_ms = start.elapsed().as_secs_f64() * 1e3;
    let mut record = ReplicateRecord {
        scenario_id: spec.id.clone(),
        replicate,
        seed,
        k_true: spec.k_true,
        n: spec.n,
        selected_k: None,
        ari: None,
        curve: BTreeMap::new(),
        runtime_ms,
        error: None,
    };
    match outcome {
        Ok((sel, ari)) => {
            record.selected_k = Some(sel.best_k);
            record.ari = Some(ari);
            record.curve = sel.curve;
        }
        Err(e) => {
            log::warn!("{} replicate {replicate} failed: {e}", spec.id);
            record.error = Some(e.to_string());
        }
    }
    record
}

/// Runs every replicate of a scenario on the current rayon pool. Records
/// come back sorted by replicate index.
pub fn run_scenario(spec: &ScenarioSpec, kmeans: &KMeansConfig) -> Result<Vec<ReplicateRecord>> {
    spec.validate()?;
    Ok((0..spec.replicates)
        .into_par_iter()
        .map(|r| run_replicate(spec, r, kmeans))
        .collect())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScenarioSummary {
    pub scenario_id: String,
    /// Number of successful replicates aggregated.
    pub replicates: usize,
    pub failed: usize,
    pub proportion_correct: f64,
    pub k_histogram: BTreeMap<usize, usize>,
    pub ari_median: f64,
    pub ari_q1: f64,
    pub ari_q3: f64,
}

impl ScenarioSummary {
    pub fn failure_rate(&self) -> f64 {
        self.failed as f64 / (self.failed + self.replicates) as f64
    }

    pub fn ari_iqr(&self) -> f64 {
        self.ari_q3 - self.ari_q1
    }
}

/// Aggregates successful records; failed ones are only counted.
pub fn aggregate(records: &[ReplicateRecord]) -> Result<ScenarioSummary> {
    let ok: Vec<&ReplicateRecord> = records.iter().filter(|r| !r.failed()).collect();
    let failed = records.len() - ok.len();
    let Some(first) = records.first() else {
        return Err(Error::Aggregation("no records".into()));
    };
    if ok.is_empty() {
        return Err(Error::Aggregation(format!(
            "all {} replicates of '{}' failed",
            records.len(),
            first.scenario_id
        )));
    }
    let mut k_histogram = BTreeMap::new();
    let mut correct = 0;
    let mut aris = Vec::with_capacity(ok.len());
    for r in &ok {
        let k = r.selected_k.expect("successful record has K");
        *k_histogram.entry(k).or_insert(0) += 1;
        if k == r.k_true {
            correct += 1;
        }
        aris.push(r.ari.expect("successful record has ARI"));
    }
    Ok(ScenarioSummary {
        scenario_id: first.scenario_id.clone(),
        replicates: ok.len(),
        failed,
        proportion_correct: correct as f64 / ok.len() as f64,
        k_histogram,
        ari_median: quantile(&aris, 0.5).unwrap(),
        ari_q1: quantile(&aris, 0.25).unwrap(),
        ari_q3: quantile(&aris, 0.75).unwrap(),
    })
}

pub const REPLICATES_HEADER: [&str; 8] =
    ["scenario_id", "replicate", "seed", "selected_k", "ari", "k_true", "n", "runtime_ms"];

pub const SUMMARY_HEADER: [&str; 15] = [
    "scenario_id",
    "n",
    "k_true",
    "profile",
    "p_win",
    "p_btw",
    "p_tilde",
    "w_win",
    "w_btw",
    "fully_connected",
    "R",
    "prop_correct",
    "ari_median",
    "ari_q1",
    "ari_q3",
];

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn dist_cell(d: Option<WeightDistribution>) -> String {
    d.map(|d| format!("{}:{}", d.lo, d.hi)).unwrap_or_default()
}

pub fn replicates_csv(records: &[ReplicateRecord], record_timing: bool) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(REPLICATES_HEADER)?;
    for r in records {
        w.write_record([
            r.scenario_id.clone(),
            r.replicate.to_string(),
            r.seed.to_string(),
            opt(r.selected_k),
            opt(r.ari),
            r.k_true.to_string(),
            r.n.to_string(),
            if record_timing { format!("{:.3}", r.runtime_ms) } else { String::new() },
        ])?;
    }
    w.into_inner().map_err(|e| Error::Config(format!("csv buffer: {e}")))
}

pub fn summary_csv(rows: &[(ScenarioSpec, ScenarioSummary)]) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(SUMMARY_HEADER)?;
    for (spec, s) in rows {
        w.write_record([
            spec.id.clone(),
            spec.n.to_string(),
            spec.k_true.to_string(),
            spec.profile.to_string(),
            spec.p_win.to_string(),
            spec.p_btw.to_string(),
            opt(spec.weak_pair.map(|w| w.p)),
            dist_cell(spec.w_win),
            dist_cell(spec.w_btw),
            spec.fully_connected.to_string(),
            s.replicates.to_string(),
            s.proportion_correct.to_string(),
            s.ari_median.to_string(),
            s.ari_q1.to_string(),
            s.ari_q3.to_string(),
        ])?;
    }
    w.into_inner().map_err(|e| Error::Config(format!("csv buffer: {e}")))
}

/// Run manifest written as `suite.json`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteManifest {
    pub software: String,
    pub generator: String,
    pub kmeans_restarts: usize,
    pub kmeans_max_iter: usize,
    pub kmeans_tol: f64,
    pub scenarios: Vec<ScenarioSpec>,
}

/// Parses a suite config: a JSON array of scenario specs.
pub fn load_suite(path: &Path) -> Result<Vec<ScenarioSpec>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let specs: Vec<ScenarioSpec> = serde_json::from_str(&text)
        .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    Ok(specs)
}

pub fn load_manifest(path: &Path) -> Result<SuiteManifest> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Ok(serde_json::from_str(&text)?)
}

/// Writes `bytes` to `path` via a temporary file in the same directory.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| Error::io(dir, e))?;
    tmp.write_all(bytes).map_err(|e| Error::io(path, e))?;
    tmp.persist(path).map_err(|e| Error::io(path, e.error))?;
    Ok(())
}

/// Result of a suite run.
#[derive(Clone, Debug)]
pub struct SuiteOutcome {
    pub out_dir: PathBuf,
    pub specs: Vec<ScenarioSpec>,
    pub records: Vec<ReplicateRecord>,
    /// One entry per scenario; `Err` when aggregation failed outright.
    pub summaries: Vec<std::result::Result<ScenarioSummary, String>>,
}

impl SuiteOutcome {
    /// Ids of scenarios that failed outright or exceeded the failure rate.
    pub fn failed_scenarios(&self) -> Vec<String> {
        self.specs
            .iter()
            .zip(&self.summaries)
            .filter(|(_, s)| match s {
                Ok(s) => s.failure_rate() > MAX_FAILURE_RATE,
                Err(_) => true,
            })
            .map(|(spec, _)| spec.id.clone())
            .collect()
    }

    pub fn succeeded(&self) -> bool {
        self.failed_scenarios().is_empty()
    }
}

fn prepare(specs: &mut [ScenarioSpec], opts: &RunOptions) -> Result<()> {
    if specs.is_empty() {
        return Err(Error::Config("suite has no scenarios".into()));
    }
    let mut seen = std::collections::HashSet::new();
    for spec in specs.iter_mut() {
        if let Some(r) = opts.replicates {
            spec.replicates = r;
        }
        spec.validate()?;
        if !seen.insert(spec.id.clone()) {
            return Err(Error::Config(format!("duplicate scenario id '{}'", spec.id)));
        }
    }
    Ok(())
}

/// Runs a list of scenarios and writes `replicates.csv`, `summary.csv` and
/// `suite.json` into `out_dir`. Configuration and output-directory problems
/// are reported before any scenario runs. `on_scenario` is called after
/// each scenario completes.
pub fn run_specs(
    mut specs: Vec<ScenarioSpec>,
    out_dir: &Path,
    opts: &RunOptions,
    mut on_scenario: impl FnMut(&ScenarioSpec, &std::result::Result<ScenarioSummary, String>),
) -> Result<SuiteOutcome> {
    prepare(&mut specs, opts)?;
    fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    tempfile::NamedTempFile::new_in(out_dir).map_err(|e| Error::io(out_dir, e))?;

    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(j) = opts.jobs {
        builder = builder.num_threads(j.max(1));
    }
    let pool = builder
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;

    let mut records = Vec::new();
    let mut summaries = Vec::new();
    for spec in &specs {
        let recs = pool.install(|| run_scenario(spec, &opts.kmeans))?;
        let summary = aggregate(&recs).map_err(|e| e.to_string());
        on_scenario(spec, &summary);
        records.extend(recs);
        summaries.push(summary);
    }

    write_atomic(&out_dir.join("replicates.csv"), &replicates_csv(&records, opts.record_timing)?)?;
    let rows: Vec<(ScenarioSpec, ScenarioSummary)> = specs
        .iter()
        .zip(&summaries)
        .filter_map(|(spec, s)| s.as_ref().ok().map(|s| (spec.clone(), s.clone())))
        .collect();
    write_atomic(&out_dir.join("summary.csv"), &summary_csv(&rows)?)?;
    let manifest = SuiteManifest {
        software: format!("netsil-core {}", crate::VERSION),
        generator: rng::GENERATOR.to_string(),
        kmeans_restarts: opts.kmeans.restarts,
        kmeans_max_iter: opts.kmeans.max_iter,
        kmeans_tol: opts.kmeans.tol,
        scenarios: specs.clone(),
    };
    write_atomic(&out_dir.join("suite.json"), serde_json::to_string_pretty(&manifest)?.as_bytes())?;

    Ok(SuiteOutcome {
        out_dir: out_dir.to_path_buf(),
        specs,
        records,
        summaries,
    })
}

/// [`run_specs`] on a suite config file.
pub fn run_suite(config: &Path, out_dir: &Path, opts: &RunOptions) -> Result<SuiteOutcome> {
    let specs = load_suite(config)?;
    run_specs(specs, out_dir, opts, |_, _| {})
}
