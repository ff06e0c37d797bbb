//! Sweeps over sampling fractions with repeated trials and CSV output.

use std::fmt;
use std::io::Write;
use std::path::PathBuf;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::baselines::{rank_centrality, DEFAULT_DAMPING};
use crate::error::{Error, Result};
use crate::graph::{
    gen_complete, gen_erdos_renyi, gen_regular, gen_two_cluster, gen_union_cliques, graph_from_features,
    io::{self, FeatureData},
    Graph, ThresholdRule,
};
use crate::kernels::PairKernel;
use crate::ranking::{
    bipartite_from_scores, full_from_graph, kendall_tau, ordinal_from_scores, pairwise_error,
    pref_rank_with_kernel, preference_from_labels, sample_pairs, spearman_footrule, two_cluster_bipartite,
    two_cluster_full, two_cluster_ordinal, Embedding, Loss, PreferenceSample, PreferenceVector,
    Ranking, Subset, Task,
};
use crate::rng::{derive_seed, seeded};
use crate::svm::{SvmOptions, DEFAULT_TOL};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum Algorithm {
    PrefRank(Embedding),
    GraphRank,
    RankCentrality,
}

impl Algorithm {
    /// Pair embedding used by the SVM-based methods.
    pub fn embedding(self) -> Option<Embedding> {
        match self {
            Algorithm::PrefRank(e) => Some(e),
            Algorithm::GraphRank => Some(Embedding::LapPd),
            Algorithm::RankCentrality => None,
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Algorithm::PrefRank(Embedding::LsKron) => write!(f, "PR-Kron"),
            Algorithm::PrefRank(Embedding::LsPd) => write!(f, "PR-PD"),
            Algorithm::PrefRank(e) => write!(f, "PR-{e}"),
            Algorithm::GraphRank => write!(f, "GR"),
            Algorithm::RankCentrality => write!(f, "RC"),
        }
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        match t.to_ascii_uppercase().as_str() {
            "PR-KRON" => return Ok(Algorithm::PrefRank(Embedding::LsKron)),
            "PR-PD" => return Ok(Algorithm::PrefRank(Embedding::LsPd)),
            "GR" => return Ok(Algorithm::GraphRank),
            "RC" => return Ok(Algorithm::RankCentrality),
            _ => {}
        }
        let rest = t
            .strip_prefix("PR-")
            .or_else(|| t.strip_prefix("pr-"))
            .ok_or_else(|| Error::invalid(format!("unknown algorithm {s:?} (PR-Kron, PR-PD, PR-<embedding>, GR, RC)")))?;
        Ok(Algorithm::PrefRank(rest.parse()?))
    }
}

impl TryFrom<String> for Algorithm {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<Algorithm> for String {
    fn from(a: Algorithm) -> String {
        a.to_string()
    }
}

/// Graph source for an experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum GraphSpec {
    Complete { n: usize },
    UnionCliques { n: usize, k: usize },
    Regular { n: usize, r: usize },
    ErdosRenyi { n: usize, q: f64 },
    TwoCluster { n: usize, p: f64, q: f64 },
    File { path: PathBuf },
}

impl GraphSpec {
    pub fn build(&self, seed: u64) -> Result<Graph> {
        match self {
            GraphSpec::Complete { n } => Ok(gen_complete(*n)),
            GraphSpec::UnionCliques { n, k } => gen_union_cliques(*n, *k),
            GraphSpec::Regular { n, r } => gen_regular(*n, *r, seed),
            GraphSpec::ErdosRenyi { n, q } => gen_erdos_renyi(*n, *q, seed),
            GraphSpec::TwoCluster { n, p, q } => gen_two_cluster(*n, *p, *q, seed),
            GraphSpec::File { path } => io::read_edge_list(path),
        }
    }
}

/// Ground-truth preferences for a graph. Two-cluster graphs use the
/// cluster-consistent protocol; other graphs derive every task from the
/// score `A α`.
pub fn generate_preference(
    spec: &GraphSpec,
    g: &Graph,
    task: Task,
    bipartite_probs: (f64, f64),
    seed: u64,
) -> Result<PreferenceVector> {
    if let GraphSpec::TwoCluster { n, .. } = spec {
        return match task {
            Task::Full => two_cluster_full(*n, seed),
            Task::Ordinal(d) => two_cluster_ordinal(*n, d, seed),
            Task::Bipartite => two_cluster_bipartite(*n, bipartite_probs.0, bipartite_probs.1, seed),
        };
    }
    let fr = full_from_graph(g, seed)?;
    match task {
        Task::Full => Ok(fr),
        Task::Ordinal(d) => ordinal_from_scores(fr.values(), d),
        Task::Bipartite => bipartite_from_scores(fr.values()),
    }
}

fn default_repeats() -> usize {
    10
}
fn default_c() -> f64 {
    1.0
}
fn default_tol() -> f64 {
    DEFAULT_TOL
}
fn default_damping() -> f64 {
    DEFAULT_DAMPING
}
fn default_bipartite_probs() -> (f64, f64) {
    (0.8, 0.2)
}
fn default_true() -> bool {
    true
}
fn default_algorithms() -> Vec<Algorithm> {
    vec![
        Algorithm::PrefRank(Embedding::LsKron),
        Algorithm::PrefRank(Embedding::LsPd),
        Algorithm::GraphRank,
        Algorithm::RankCentrality,
    ]
}
fn default_fractions() -> Vec<f64> {
    (1..=10).map(|i| f64::from(i) * 0.05).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub graph: GraphSpec,
    #[serde(with = "task_string")]
    pub task: Task,
    /// Preference file; generated from the graph when absent.
    #[serde(default)]
    pub preference: Option<PathBuf>,
    #[serde(default = "default_algorithms")]
    pub algorithms: Vec<Algorithm>,
    #[serde(default = "default_fractions")]
    pub fractions: Vec<f64>,
    #[serde(default = "default_repeats")]
    pub repeats: usize,
    #[serde(default = "default_c")]
    pub c: f64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default = "default_damping")]
    pub damping: f64,
    /// Probability of a `+1` label in the first and second cluster.
    #[serde(default = "default_bipartite_probs")]
    pub bipartite_probs: (f64, f64),
    /// Record per-trial wall time; off for byte-reproducible output.
    #[serde(default = "default_true")]
    pub record_time: bool,
}

mod task_string {
    use super::Task;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(t: &Task, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&t.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Task, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

impl ExperimentConfig {
    pub fn new(graph: GraphSpec, task: Task) -> Self {
        ExperimentConfig {
            graph,
            task,
            preference: None,
            algorithms: default_algorithms(),
            fractions: default_fractions(),
            repeats: default_repeats(),
            c: default_c(),
            seed: 0,
            tol: default_tol(),
            damping: default_damping(),
            bipartite_probs: default_bipartite_probs(),
            record_time: true,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.fractions.is_empty() || self.fractions.iter().any(|&f| !(f > 0.0 && f <= 1.0)) {
            return Err(Error::invalid("fraction grid must be non-empty and inside (0, 1]"));
        }
        if self.repeats == 0 {
            return Err(Error::invalid("repeats must be >= 1"));
        }
        if self.algorithms.is_empty() {
            return Err(Error::invalid("no algorithms selected"));
        }
        if !(self.c > 0.0) || !(self.tol > 0.0) {
            return Err(Error::invalid("C and tol must be positive"));
        }
        Ok(())
    }

    /// First 16 hex digits of the SHA-256 of the canonical JSON form.
    pub fn hash(&self) -> String {
        let json = serde_json::to_string(self).expect("config serializes");
        let digest = Sha256::digest(json.as_bytes());
        digest.iter().take(8).map(|b| format!("{b:02x}")).collect()
    }

    /// Graph and ground truth. The graph uses stream `[0]` of the seed, the
    /// generated preference stream `[1]`.
    pub fn build_instance(&self) -> Result<Instance> {
        let graph = self.graph.build(derive_seed(self.seed, &[0]))?;
        let preference = match &self.preference {
            Some(path) => PreferenceVector::parse_text(&std::fs::read_to_string(path)?)?,
            None => generate_preference(
                &self.graph,
                &graph,
                self.task,
                self.bipartite_probs,
                derive_seed(self.seed, &[1]),
            )?,
        };
        if preference.n() != graph.n() {
            return Err(Error::DimensionMismatch {
                expected: graph.n(),
                got: preference.n(),
            });
        }
        Ok(Instance { graph, preference })
    }
}

#[derive(Debug, Clone)]
pub struct Instance {
    pub graph: Graph,
    pub preference: PreferenceVector,
}

/// Seed of the pair sample for grid point `f_index`, trial `trial`; shared
/// by every algorithm.
pub fn trial_seed(seed: u64, f_index: usize, trial: usize) -> u64 {
    derive_seed(seed, &[2, f_index as u64, trial as u64])
}

/// One random subset of a labelled dataset turned into a ranking instance.
#[derive(Debug, Clone)]
pub struct IngestedSubset {
    /// Dataset rows, in node order.
    pub items: Vec<usize>,
    pub instance: Instance,
}

/// Draw `subsets` random subsets of `subset_size` items (subset `s` uses
/// stream `[s]` of the seed), build the RBF graph on each and label the
/// nodes from the dataset.
pub fn ingest_subsets(
    data: &FeatureData,
    task: Task,
    subset_size: usize,
    subsets: usize,
    seed: u64,
) -> Result<Vec<IngestedSubset>> {
    let total = data.labels.len();
    if subset_size < 2 || subset_size > total {
        return Err(Error::invalid(format!("subset size {subset_size} outside [2, {total}]")));
    }
    (0..subsets)
        .map(|s| {
            let mut items = if subset_size == total {
                (0..total).collect()
            } else {
                rand::seq::index::sample(&mut seeded(derive_seed(seed, &[s as u64])), total, subset_size).into_vec()
            };
            items.sort_unstable();
            let points: Vec<Vec<f64>> = items.iter().map(|&i| data.features[i].clone()).collect();
            let labels: Vec<f64> = items.iter().map(|&i| data.labels[i]).collect();
            let graph = graph_from_features(&points, ThresholdRule::MeanStrict)?;
            let preference = preference_from_labels(&labels, task)?;
            Ok(IngestedSubset {
                items,
                instance: Instance { graph, preference },
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricsRow {
    pub algorithm: String,
    pub embedding: String,
    pub f: f64,
    pub trial: usize,
    pub er_d: f64,
    pub d_k: f64,
    pub d_s: f64,
    pub train_error: f64,
    pub m_effective: usize,
    pub wall_time_ms: Option<f64>,
    pub seed: u64,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummaryRow {
    pub algorithm: String,
    pub embedding: String,
    pub f: f64,
    pub trials: usize,
    pub er_d_mean: f64,
    pub er_d_std: f64,
    pub d_k_mean: f64,
    pub d_k_std: f64,
    pub d_s_mean: f64,
    pub d_s_std: f64,
    pub train_error_mean: f64,
    pub train_error_std: f64,
    pub m_effective_mean: f64,
}

#[derive(Debug, Clone)]
pub struct ExperimentResult {
    pub config_hash: String,
    pub rows: Vec<MetricsRow>,
    pub summaries: Vec<SummaryRow>,
}

/// Outcome of one algorithm on one sample.
#[derive(Debug, Clone)]
pub struct TrialOutcome {
    pub scores: Vec<f64>,
    pub ranking: Ranking,
    /// The SVM or power iteration met its tolerance.
    pub converged: bool,
}

/// Kernels are built once per embedding and shared by all trials.
struct Prepared {
    algorithm: Algorithm,
    kernel: Option<PairKernel>,
}

fn prepare(g: &Graph, algorithms: &[Algorithm]) -> Result<Vec<Prepared>> {
    algorithms
        .iter()
        .map(|&algorithm| {
            let kernel = algorithm.embedding().map(|e| e.pair_kernel(g)).transpose()?;
            Ok(Prepared { algorithm, kernel })
        })
        .collect()
}

fn run_prepared(p: &Prepared, n: usize, sample: &PreferenceSample, options: &SvmOptions, damping: f64) -> Result<TrialOutcome> {
    match &p.kernel {
        Some(kernel) => {
            let out = pref_rank_with_kernel(kernel, sample, options)?;
            Ok(TrialOutcome {
                converged: out.solution.converged,
                scores: out.scores,
                ranking: out.ranking,
            })
        }
        None => {
            let out = rank_centrality(n, sample, damping)?;
            Ok(TrialOutcome {
                scores: out.pair_scores(),
                converged: out.chain.converged,
                ranking: out.ranking,
            })
        }
    }
}

/// Run a single algorithm on a sample.
pub fn run_algorithm(
    algorithm: Algorithm,
    g: &Graph,
    sample: &PreferenceSample,
    options: &SvmOptions,
    damping: f64,
) -> Result<TrialOutcome> {
    let p = prepare(g, &[algorithm])?.pop().expect("one algorithm");
    run_prepared(&p, g.n(), sample, options, damping)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TrialMetrics {
    pub er_d: f64,
    pub d_k: f64,
    pub d_s: f64,
    pub train_error: f64,
}

/// Zero-one error over all distinct pairs, ranking distances to the ground
/// truth and the training error.
pub fn evaluate(out: &TrialOutcome, pref: &PreferenceVector, sample: &PreferenceSample) -> Result<TrialMetrics> {
    let sigma_star = pref.ranking();
    Ok(TrialMetrics {
        er_d: pairwise_error(&out.scores, pref, Subset::Distinct, Loss::ZeroOne)?,
        d_k: kendall_tau(&sigma_star, &out.ranking)?,
        d_s: spearman_footrule(&sigma_star, &out.ranking)?,
        train_error: if sample.is_empty() {
            0.0
        } else {
            pairwise_error(&out.scores, pref, Subset::Train(sample), Loss::ZeroOne)?
        },
    })
}

fn mean_std(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// Summaries per `(algorithm, f)`, in first-appearance order of `rows`.
pub fn summarize(rows: &[MetricsRow]) -> Vec<SummaryRow> {
    let mut keys: Vec<(String, u64)> = Vec::new();
    for r in rows {
        let key = (r.algorithm.clone(), r.f.to_bits());
        if !keys.contains(&key) {
            keys.push(key);
        }
    }
    keys.into_iter()
        .map(|(alg, fbits)| {
            let group: Vec<&MetricsRow> = rows
                .iter()
                .filter(|r| r.algorithm == alg && r.f.to_bits() == fbits)
                .collect();
            let col = |g: fn(&MetricsRow) -> f64| mean_std(&group.iter().map(|r| g(r)).collect::<Vec<_>>());
            let (er_d_mean, er_d_std) = col(|r| r.er_d);
            let (d_k_mean, d_k_std) = col(|r| r.d_k);
            let (d_s_mean, d_s_std) = col(|r| r.d_s);
            let (train_error_mean, train_error_std) = col(|r| r.train_error);
            let (m_effective_mean, _) = col(|r| r.m_effective as f64);
            SummaryRow {
                algorithm: alg,
                embedding: group[0].embedding.clone(),
                f: f64::from_bits(fbits),
                trials: group.len(),
                er_d_mean,
                er_d_std,
                d_k_mean,
                d_k_std,
                d_s_mean,
                d_s_std,
                train_error_mean,
                train_error_std,
                m_effective_mean,
            }
        })
        .collect()
}

/// Rows of one trial, up to the first failing algorithm.
type TrialRows = (Vec<MetricsRow>, Option<(Algorithm, Error)>);

/// Run the sweep. Rows come back ordered by (algorithm, f, trial) whatever
/// the order in which trials finish. On failure the rows that precede the
/// first missing one in that order are returned alongside the error.
pub fn run_experiment(config: &ExperimentConfig, instance: &Instance) -> std::result::Result<ExperimentResult, PartialFailure> {
    let fail = |e: Error| PartialFailure {
        rows: Vec::new(),
        failed_at: None,
        error: e,
    };
    config.validate().map_err(fail)?;
    let g = &instance.graph;
    let pref = &instance.preference;
    let prepared = prepare(g, &config.algorithms).map_err(fail)?;
    let options = SvmOptions {
        c: config.c,
        tol: config.tol,
        ..Default::default()
    };
    let n = g.n();

    let grid: Vec<(usize, usize)> = (0..config.fractions.len())
        .flat_map(|fi| (0..config.repeats).map(move |t| (fi, t)))
        .collect();
    let one = |p: &Prepared, f: f64, trial: usize, seed: u64, sample: &PreferenceSample| -> Result<MetricsRow> {
        let start = Instant::now();
        let out = run_prepared(p, n, sample, &options, config.damping)?;
        let elapsed = start.elapsed().as_secs_f64() * 1e3;
        let m = evaluate(&out, pref, sample)?;
        Ok(MetricsRow {
            algorithm: p.algorithm.to_string(),
            embedding: p.algorithm.embedding().map_or("-".into(), |e| e.to_string()),
            f,
            trial,
            er_d: m.er_d,
            d_k: m.d_k,
            d_s: m.d_s,
            train_error: m.train_error,
            m_effective: sample.len(),
            wall_time_ms: config.record_time.then_some(elapsed),
            seed,
            converged: out.converged,
        })
    };
    let mut per_trial: Vec<TrialRows> = grid
        .par_iter()
        .map(|&(fi, trial)| {
            let f = config.fractions[fi];
            let seed = trial_seed(config.seed, fi, trial);
            let sample = match sample_pairs(n, f, pref, seed) {
                Ok(s) => s,
                Err(e) => return (Vec::new(), Some((prepared[0].algorithm, e))),
            };
            let mut rows = Vec::with_capacity(prepared.len());
            for p in &prepared {
                match one(p, f, trial, seed, &sample) {
                    Ok(r) => rows.push(r),
                    Err(e) => return (rows, Some((p.algorithm, e))),
                }
            }
            (rows, None)
        })
        .collect();

    // reorder from (f, trial, algorithm) to (algorithm, f, trial)
    let mut rows = Vec::with_capacity(grid.len() * prepared.len());
    for ai in 0..prepared.len() {
        for (gi, &(fi, trial)) in grid.iter().enumerate() {
            match per_trial[gi].0.get(ai) {
                Some(r) => rows.push(r.clone()),
                None => {
                    let (alg, error) = per_trial[gi].1.take().expect("a missing row has an error");
                    return Err(PartialFailure {
                        rows,
                        failed_at: Some((alg.to_string(), config.fractions[fi], trial)),
                        error,
                    });
                }
            }
        }
    }
    let summaries = summarize(&rows);
    Ok(ExperimentResult {
        config_hash: config.hash(),
        rows,
        summaries,
    })
}

/// Rows completed before a failing trial.
#[derive(Debug)]
pub struct PartialFailure {
    pub rows: Vec<MetricsRow>,
    pub failed_at: Option<(String, f64, usize)>,
    pub error: Error,
}

const HEADER: [&str; 17] = [
    "schema=1",
    "config_hash",
    "algorithm",
    "embedding",
    "task",
    "n",
    "c",
    "f",
    "trial",
    "seed",
    "m_effective",
    "er_d",
    "d_k",
    "d_s",
    "train_error",
    "wall_time_ms",
    "note",
];

fn num(x: f64) -> String {
    x.to_string()
}

/// CSV writer for sweep output. The first column holds the row kind:
/// `trial`, `mean`, `std` or `error`.
pub struct MetricsWriter<W: Write> {
    inner: csv::Writer<W>,
    hash: String,
    task: String,
    n: usize,
    c: f64,
}

impl<W: Write> MetricsWriter<W> {
    pub fn new(out: W, config: &ExperimentConfig, n: usize) -> Result<Self> {
        let mut inner = csv::Writer::from_writer(out);
        inner.write_record(HEADER)?;
        Ok(MetricsWriter {
            inner,
            hash: config.hash(),
            task: config.task.to_string(),
            n,
            c: config.c,
        })
    }

    fn prefix(&self, kind: &str, algorithm: &str, embedding: &str) -> Vec<String> {
        vec![
            kind.into(),
            self.hash.clone(),
            algorithm.into(),
            embedding.into(),
            self.task.clone(),
            self.n.to_string(),
            num(self.c),
        ]
    }

    pub fn write_row(&mut self, r: &MetricsRow) -> Result<()> {
        let mut rec = self.prefix("trial", &r.algorithm, &r.embedding);
        rec.extend([
            num(r.f),
            r.trial.to_string(),
            r.seed.to_string(),
            r.m_effective.to_string(),
            num(r.er_d),
            num(r.d_k),
            num(r.d_s),
            num(r.train_error),
            r.wall_time_ms.map(num).unwrap_or_default(),
            if r.converged { String::new() } else { "unconverged".into() },
        ]);
        self.inner.write_record(&rec)?;
        Ok(())
    }

    pub fn write_summary(&mut self, s: &SummaryRow) -> Result<()> {
        let stats = [
            ("mean", s.m_effective_mean, s.er_d_mean, s.d_k_mean, s.d_s_mean, s.train_error_mean),
            ("std", f64::NAN, s.er_d_std, s.d_k_std, s.d_s_std, s.train_error_std),
        ];
        for (kind, m, er, dk, ds, tr) in stats {
            let mut rec = self.prefix(kind, &s.algorithm, &s.embedding);
            rec.extend([
                num(s.f),
                String::new(),
                String::new(),
                if m.is_nan() { String::new() } else { num(m) },
                num(er),
                num(dk),
                num(ds),
                num(tr),
                String::new(),
                format!("trials={}", s.trials),
            ]);
            self.inner.write_record(&rec)?;
        }
        Ok(())
    }

    pub fn write_error(&mut self, failed_at: Option<&(String, f64, usize)>, error: &Error) -> Result<()> {
        let (alg, f, trial) = match failed_at {
            Some((a, f, t)) => (a.as_str(), num(*f), t.to_string()),
            None => ("", String::new(), String::new()),
        };
        let mut rec = self.prefix("error", alg, "");
        rec.extend([f, trial]);
        rec.extend(std::iter::repeat_n(String::new(), 7));
        rec.push(error.to_string());
        self.inner.write_record(&rec)?;
        Ok(())
    }

    pub fn flush(&mut self) -> Result<()> {
        self.inner.flush()?;
        Ok(())
    }
}

/// Run the sweep and stream the CSV: trial rows, then summary rows. On
/// failure the completed rows are written, followed by an error row, and
/// the error is returned.
pub fn run_to_csv<W: Write>(config: &ExperimentConfig, instance: &Instance, out: W) -> Result<ExperimentResult> {
    let mut w = MetricsWriter::new(out, config, instance.graph.n())?;
    match run_experiment(config, instance) {
        Ok(res) => {
            for r in &res.rows {
                w.write_row(r)?;
            }
            for s in &res.summaries {
                w.write_summary(s)?;
            }
            w.flush()?;
            Ok(res)
        }
        Err(fail) => {
            for r in &fail.rows {
                w.write_row(r)?;
            }
            w.write_error(fail.failed_at.as_ref(), &fail.error)?;
            w.flush()?;
            Err(fail.error)
        }
    }
}
