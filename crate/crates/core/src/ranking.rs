//! Pair sampling, the ranking pipeline, and ranking losses.
//!
//! Label convention: for a pair `(i, j)` with `i < j`, `y = +1` iff node `i`
//! is preferred, i.e. carries the larger preference value (equivalently the
//! smaller rank). Pairs with equal preference values carry no label.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Graph, PairIndex};
use crate::kernels::{laplacian_kernel, ls_kernel, NodeKernel, PairKernel, PairMode};
use crate::rng::seeded;
use crate::svm::{solve_dual, SvmOptions, SvmProblem, SvmSolution};

/// `ranks[i]` is the 1-based rank of node `i`; rank 1 is the best.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Ranking {
    ranks: Vec<usize>,
}

impl Ranking {
    pub fn new(ranks: Vec<usize>) -> Result<Self> {
        let n = ranks.len();
        let mut seen = vec![false; n];
        for &r in &ranks {
            if r == 0 || r > n || seen[r - 1] {
                return Err(Error::invalid(format!(
                    "ranks must be a permutation of 1..={n}"
                )));
            }
            seen[r - 1] = true;
        }
        Ok(Ranking { ranks })
    }

    pub fn identity(n: usize) -> Self {
        Ranking {
            ranks: (1..=n).collect(),
        }
    }

    /// `order[r]` is the node placed at rank `r + 1`.
    pub fn from_order(order: &[usize]) -> Result<Self> {
        let n = order.len();
        let mut ranks = vec![0; n];
        for (r, &node) in order.iter().enumerate() {
            if node >= n || ranks[node] != 0 {
                return Err(Error::invalid("order must be a permutation of 0..n"));
            }
            ranks[node] = r + 1;
        }
        Ok(Ranking { ranks })
    }

    /// Nodes sorted by descending key, ties to the lower index.
    pub fn from_scores(keys: &[f64]) -> Self {
        Self::from_order(&argsort_desc(keys)).expect("argsort is a permutation")
    }

    pub fn n(&self) -> usize {
        self.ranks.len()
    }

    pub fn ranks(&self) -> &[usize] {
        &self.ranks
    }

    pub fn rank(&self, i: usize) -> usize {
        self.ranks[i]
    }

    pub fn order(&self) -> Vec<usize> {
        let mut order = vec![0; self.n()];
        for (i, &r) in self.ranks.iter().enumerate() {
            order[r - 1] = i;
        }
        order
    }

    pub fn reversed(&self) -> Self {
        let n = self.n();
        Ranking {
            ranks: self.ranks.iter().map(|r| n + 1 - r).collect(),
        }
    }

    pub fn to_line(&self) -> String {
        self.ranks
            .iter()
            .map(|r| r.to_string())
            .collect::<Vec<_>>()
            .join(" ")
    }

    pub fn parse_line(line: &str) -> Result<Self> {
        let ranks = line
            .split_whitespace()
            .map(|t| {
                t.parse::<usize>()
                    .map_err(|_| Error::parse(1, format!("bad rank {t:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Ranking::new(ranks)
    }
}

impl fmt::Display for Ranking {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_line())
    }
}

/// Indices sorted by descending key; ties keep ascending index order.
pub fn argsort_desc(keys: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..keys.len()).collect();
    order.sort_by(|&a, &b| keys[b].total_cmp(&keys[a]).then(a.cmp(&b)));
    order
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Task {
    /// Two classes, values `±1`.
    Bipartite,
    /// Ratings in `1..=d`.
    Ordinal(u32),
    /// Distinct real scores.
    Full,
}

impl fmt::Display for Task {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Task::Bipartite => write!(f, "BR"),
            Task::Ordinal(d) => write!(f, "OR({d})"),
            Task::Full => write!(f, "FR"),
        }
    }
}

impl FromStr for Task {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim().to_ascii_uppercase();
        match t.as_str() {
            "BR" => Ok(Task::Bipartite),
            "FR" => Ok(Task::Full),
            _ => {
                let d = t
                    .strip_prefix("OR")
                    .map(|r| r.trim_matches(|c: char| c == '(' || c == ')' || c == ' ' || c == ':'))
                    .and_then(|r| r.parse::<u32>().ok())
                    .ok_or_else(|| Error::invalid(format!("unknown task {s:?} (BR, FR, OR(d))")))?;
                if d < 2 {
                    return Err(Error::invalid("ordinal task needs d >= 2"));
                }
                Ok(Task::Ordinal(d))
            }
        }
    }
}

/// Per-node preference values together with the task they encode.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PreferenceVector {
    values: Vec<f64>,
    task: Task,
}

impl PreferenceVector {
    pub fn new(values: Vec<f64>, task: Task) -> Result<Self> {
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("preference values must be finite"));
        }
        match task {
            Task::Bipartite => {
                if values.iter().any(|&v| v != 1.0 && v != -1.0) {
                    return Err(Error::invalid("bipartite values must be +1 or -1"));
                }
            }
            Task::Ordinal(d) => {
                if d < 2 {
                    return Err(Error::invalid("ordinal task needs d >= 2"));
                }
                if values
                    .iter()
                    .any(|&v| v.fract() != 0.0 || v < 1.0 || v > f64::from(d))
                {
                    return Err(Error::invalid(format!("ordinal values must be integers in 1..={d}")));
                }
            }
            Task::Full => {
                let mut sorted = values.clone();
                sorted.sort_by(f64::total_cmp);
                if sorted.windows(2).any(|w| w[0] == w[1]) {
                    return Err(Error::invalid("full-ranking values must be distinct"));
                }
            }
        }
        Ok(PreferenceVector { values, task })
    }

    pub fn full(values: Vec<f64>) -> Result<Self> {
        Self::new(values, Task::Full)
    }

    pub fn bipartite(values: Vec<f64>) -> Result<Self> {
        Self::new(values, Task::Bipartite)
    }

    pub fn ordinal(values: Vec<f64>, d: u32) -> Result<Self> {
        Self::new(values, Task::Ordinal(d))
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn task(&self) -> Task {
        self.task
    }

    pub fn n(&self) -> usize {
        self.values.len()
    }

    /// Label of the pair `(i, j)`, `None` on a tie.
    pub fn label(&self, i: usize, j: usize) -> Option<i8> {
        let (a, b) = (self.values[i], self.values[j]);
        if a > b {
            Some(1)
        } else if a < b {
            Some(-1)
        } else {
            None
        }
    }

    /// Labels of all `N` pairs in pair-index order; `0` marks a tie.
    pub fn pair_labels(&self) -> Vec<i8> {
        PairIndex::new(self.n())
            .iter()
            .map(|(i, j)| self.label(i, j).unwrap_or(0))
            .collect()
    }

    /// Descending order of the values, ties to the lower index.
    pub fn ranking(&self) -> Ranking {
        Ranking::from_scores(&self.values)
    }

    /// First line is the task tag (`BR`, `FR`, `OR(d)`), then one value per line.
    pub fn to_text(&self) -> String {
        let mut s = format!("{}\n", self.task);
        for v in &self.values {
            s.push_str(&format!("{v:?}\n"));
        }
        s
    }

    pub fn parse_text(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let (_, head) = lines.next().ok_or_else(|| Error::parse(1, "missing task line"))?;
        let task: Task = head.parse()?;
        let values = lines
            .map(|(no, l)| {
                l.parse::<f64>()
                    .map_err(|_| Error::parse(no, format!("bad preference value {l:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(values, task)
    }
}

/// `f = A α` with `α` uniform on `[0,1]^n`. If two nodes tie, every value is
/// shifted by `1e-12 · index`.
pub fn full_from_graph(g: &Graph, seed: u64) -> Result<PreferenceVector> {
    let mut rng = seeded(seed);
    let alpha: Vec<f64> = (0..g.n()).map(|_| rng.gen::<f64>()).collect();
    let values: Vec<f64> = (0..g.n())
        .map(|i| (0..g.n()).filter(|&j| g.has_edge(i, j)).map(|j| alpha[j]).sum())
        .collect();
    full_breaking_ties(values)
}

/// Preference from raw dataset labels. `FR` keeps the values (breaking
/// ties), `OR(d)` maps the distinct values in increasing order onto `1..=k`
/// (`k` distinct values, `k <= d`), `BR` sends the larger of two values to
/// `+1`.
pub fn preference_from_labels(labels: &[f64], task: Task) -> Result<PreferenceVector> {
    let mut distinct: Vec<f64> = labels.to_vec();
    distinct.sort_by(f64::total_cmp);
    distinct.dedup();
    let level = |v: f64| distinct.partition_point(|&x| x < v);
    match task {
        Task::Full => full_breaking_ties(labels.to_vec()),
        Task::Ordinal(d) => {
            if distinct.len() > d as usize {
                return Err(Error::invalid(format!(
                    "{} distinct labels do not fit OR({d})",
                    distinct.len()
                )));
            }
            PreferenceVector::ordinal(labels.iter().map(|&v| (level(v) + 1) as f64).collect(), d)
        }
        Task::Bipartite => {
            if distinct.len() != 2 {
                return Err(Error::invalid(format!(
                    "bipartite task needs exactly two label values, got {}",
                    distinct.len()
                )));
            }
            PreferenceVector::bipartite(labels.iter().map(|&v| if level(v) == 1 { 1.0 } else { -1.0 }).collect())
        }
    }
}

/// Full-ranking preference from scores that may tie: if any two values are
/// equal, every value is shifted by `1e-12 · index`.
pub fn full_breaking_ties(mut values: Vec<f64>) -> Result<PreferenceVector> {
    if has_duplicates(&values) {
        for (i, v) in values.iter_mut().enumerate() {
            *v += 1e-12 * i as f64;
        }
    }
    if has_duplicates(&values) {
        return Err(Error::Infeasible("could not break preference ties".into()));
    }
    PreferenceVector::full(values)
}

fn has_duplicates(values: &[f64]) -> bool {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    sorted.windows(2).any(|w| w[0] == w[1])
}

fn check_two_cluster(n: usize) -> Result<usize> {
    if n == 0 || n % 2 == 1 {
        return Err(Error::invalid(format!("two-cluster preferences need even n > 0, got {n}")));
    }
    Ok(n / 2)
}

/// Random full ranking with every node of the first half above every node
/// of the second half. Values are `n + 1 - rank`.
pub fn two_cluster_full(n: usize, seed: u64) -> Result<PreferenceVector> {
    let half = check_two_cluster(n)?;
    let mut rng = seeded(seed);
    let mut top: Vec<f64> = ((half + 1)..=n).map(|v| v as f64).collect();
    let mut bottom: Vec<f64> = (1..=half).map(|v| v as f64).collect();
    top.shuffle(&mut rng);
    bottom.shuffle(&mut rng);
    top.extend(bottom);
    PreferenceVector::full(top)
}

/// Ratings in `1..=d`: first half uniform on the upper `d - ⌊d/2⌋` levels,
/// second half uniform on the lower `⌊d/2⌋`.
pub fn two_cluster_ordinal(n: usize, d: u32, seed: u64) -> Result<PreferenceVector> {
    let half = check_two_cluster(n)?;
    if d < 2 {
        return Err(Error::invalid("ordinal task needs d >= 2"));
    }
    let split = d / 2;
    let mut rng = seeded(seed);
    let values = (0..n)
        .map(|i| {
            let v = if i < half {
                rng.gen_range(split + 1..=d)
            } else {
                rng.gen_range(1..=split)
            };
            f64::from(v)
        })
        .collect();
    PreferenceVector::ordinal(values, d)
}

/// Label `+1` with probability `p_first` in the first half and `p_second`
/// in the second half, `-1` otherwise.
pub fn two_cluster_bipartite(n: usize, p_first: f64, p_second: f64, seed: u64) -> Result<PreferenceVector> {
    let half = check_two_cluster(n)?;
    for p in [p_first, p_second] {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::invalid(format!("{p} is not a probability")));
        }
    }
    let mut rng = seeded(seed);
    let values = (0..n)
        .map(|i| {
            let p = if i < half { p_first } else { p_second };
            if rng.gen::<f64>() < p {
                1.0
            } else {
                -1.0
            }
        })
        .collect();
    PreferenceVector::bipartite(values)
}

/// Coarsen distinct scores into `d` equal-count levels (best scores get `d`).
pub fn ordinal_from_scores(scores: &[f64], d: u32) -> Result<PreferenceVector> {
    if d < 2 {
        return Err(Error::invalid("ordinal task needs d >= 2"));
    }
    let n = scores.len();
    let order = argsort_desc(scores);
    let mut values = vec![0.0; n];
    for (pos, &node) in order.iter().enumerate() {
        // position 0 is the best score
        let level = d as usize - (pos * d as usize) / n.max(1);
        values[node] = level as f64;
    }
    PreferenceVector::ordinal(values, d)
}

/// Top half of the scores (ties to the lower index) labelled `+1`.
pub fn bipartite_from_scores(scores: &[f64]) -> Result<PreferenceVector> {
    let n = scores.len();
    let order = argsort_desc(scores);
    let mut values = vec![-1.0; n];
    for &node in &order[..n / 2] {
        values[node] = 1.0;
    }
    PreferenceVector::bipartite(values)
}

/// Observed pairs with their labels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PreferenceSample {
    n: usize,
    indices: Vec<usize>,
    labels: Vec<i8>,
    fraction: f64,
    drawn: usize,
    dropped_ties: usize,
}

impl PreferenceSample {
    pub fn new(n: usize, indices: Vec<usize>, labels: Vec<i8>) -> Result<Self> {
        let big_n = n * n.saturating_sub(1) / 2;
        if indices.len() != labels.len() {
            return Err(Error::DimensionMismatch {
                expected: indices.len(),
                got: labels.len(),
            });
        }
        let mut seen = vec![false; big_n];
        for &k in &indices {
            if k >= big_n || seen[k] {
                return Err(Error::invalid(format!(
                    "pair index {k} is out of range or repeated (N = {big_n})"
                )));
            }
            seen[k] = true;
        }
        if labels.iter().any(|&y| y != 1 && y != -1) {
            return Err(Error::invalid("labels must be +1 or -1"));
        }
        let m = indices.len();
        Ok(PreferenceSample {
            n,
            indices,
            labels,
            fraction: if big_n == 0 { 0.0 } else { m as f64 / big_n as f64 },
            drawn: m,
            dropped_ties: 0,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn labels(&self) -> &[i8] {
        &self.labels
    }

    /// Requested fraction `f`.
    pub fn fraction(&self) -> f64 {
        self.fraction
    }

    /// Pairs drawn before tie removal, `⌈N f⌉`.
    pub fn drawn(&self) -> usize {
        self.drawn
    }

    pub fn dropped_ties(&self) -> usize {
        self.dropped_ties
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    /// `k,y` rows, `k` being the 0-based pair index.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("k,y\n");
        for (k, y) in self.indices.iter().zip(&self.labels) {
            s.push_str(&format!("{k},{y}\n"));
        }
        s
    }

    pub fn from_csv(n: usize, text: &str) -> Result<Self> {
        let mut rdr = csv::Reader::from_reader(text.as_bytes());
        let mut indices = Vec::new();
        let mut labels = Vec::new();
        for row in rdr.deserialize::<(usize, i8)>() {
            let (k, y) = row?;
            indices.push(k);
            labels.push(y);
        }
        Self::new(n, indices, labels)
    }
}

/// `⌈N f⌉`, snapping products within `1e-9` of an integer so that e.g.
/// `N = 10, f = 0.3` gives 3 rather than 4.
pub fn sample_size(big_n: usize, f: f64) -> usize {
    let x = big_n as f64 * f;
    let r = x.round();
    let m = if (x - r).abs() <= 1e-9 * x.max(1.0) { r } else { x.ceil() };
    (m as usize).min(big_n)
}

/// Draw `⌈N f⌉` distinct pairs uniformly (prefix of a seeded Fisher–Yates
/// shuffle), label them from `pref` and drop tied pairs. Indices are
/// returned in ascending order.
pub fn sample_pairs(n: usize, f: f64, pref: &PreferenceVector, seed: u64) -> Result<PreferenceSample> {
    if !(f > 0.0 && f <= 1.0) {
        return Err(Error::invalid(format!("sampling fraction {f} outside (0, 1]")));
    }
    if pref.n() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: pref.n(),
        });
    }
    let index = PairIndex::new(n);
    let big_n = index.len();
    let m = sample_size(big_n, f);
    let mut rng = seeded(seed);
    let mut perm: Vec<usize> = (0..big_n).collect();
    for t in 0..m {
        let r = rng.gen_range(t..big_n);
        perm.swap(t, r);
    }
    let mut chosen = perm[..m].to_vec();
    chosen.sort_unstable();
    let mut indices = Vec::with_capacity(m);
    let mut labels = Vec::with_capacity(m);
    for k in chosen {
        let (i, j) = index.pair(k);
        if let Some(y) = pref.label(i, j) {
            indices.push(k);
            labels.push(y);
        }
    }
    let dropped_ties = m - indices.len();
    Ok(PreferenceSample {
        n,
        indices,
        labels,
        fraction: f,
        drawn: m,
        dropped_ties,
    })
}

/// Node kernel and pair lift used by the pipeline.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Embedding {
    LsKron,
    LsPd,
    LapKron,
    LapPd,
    NLapKron,
    NLapPd,
}

impl Embedding {
    pub const ALL: [Embedding; 6] = [
        Embedding::LsKron,
        Embedding::LsPd,
        Embedding::LapKron,
        Embedding::LapPd,
        Embedding::NLapKron,
        Embedding::NLapPd,
    ];

    pub fn mode(self) -> PairMode {
        match self {
            Embedding::LsKron | Embedding::LapKron | Embedding::NLapKron => PairMode::Kronecker,
            _ => PairMode::PairwiseDifference,
        }
    }

    pub fn node_kernel(self, g: &Graph) -> Result<NodeKernel> {
        match self {
            Embedding::LsKron | Embedding::LsPd => ls_kernel(g),
            Embedding::LapKron | Embedding::LapPd => laplacian_kernel(g, false),
            Embedding::NLapKron | Embedding::NLapPd => laplacian_kernel(g, true),
        }
    }

    pub fn pair_kernel(self, g: &Graph) -> Result<PairKernel> {
        Ok(PairKernel::new(self.node_kernel(g)?, self.mode()))
    }

    pub fn name(self) -> &'static str {
        match self {
            Embedding::LsKron => "LS-Kron",
            Embedding::LsPd => "LS-PD",
            Embedding::LapKron => "Lap-Kron",
            Embedding::LapPd => "Lap-PD",
            Embedding::NLapKron => "nLap-Kron",
            Embedding::NLapPd => "nLap-PD",
        }
    }
}

impl fmt::Display for Embedding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Embedding {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_lowercase().replace(['_', ' '], "-");
        Embedding::ALL
            .into_iter()
            .find(|e| e.name().to_ascii_lowercase() == key)
            .ok_or_else(|| {
                Error::invalid(format!(
                    "unknown embedding {s:?} (LS-Kron, LS-PD, Lap-Kron, Lap-PD, nLap-Kron, nLap-PD)"
                ))
            })
    }
}

#[derive(Debug, Clone)]
pub struct PrefRankOutput {
    /// Score of every pair, in pair-index order.
    pub scores: Vec<f64>,
    pub wins: Vec<usize>,
    pub ranking: Ranking,
    pub solution: SvmSolution,
}

/// Build the pair kernel for `embedding`, fit the SVM with box `c` and rank
/// by win counts.
pub fn pref_rank(g: &Graph, embedding: Embedding, sample: &PreferenceSample, c: f64) -> Result<PrefRankOutput> {
    let kernel = embedding.pair_kernel(g)?;
    pref_rank_with_kernel(&kernel, sample, &SvmOptions::with_c(c))
}

/// Pipeline on a prebuilt pair kernel.
pub fn pref_rank_with_kernel(
    kernel: &PairKernel,
    sample: &PreferenceSample,
    options: &SvmOptions,
) -> Result<PrefRankOutput> {
    if sample.is_empty() {
        return Err(Error::EmptySubset("no labelled pairs in the sample".into()));
    }
    if sample.n() != kernel.index().n() {
        return Err(Error::DimensionMismatch {
            expected: kernel.index().n(),
            got: sample.n(),
        });
    }
    let problem = SvmProblem::new(kernel, sample, options.clone())?;
    let solution = solve_dual(&problem)?;
    let scores = solution.scores.clone();
    let wins = win_counts(kernel.index(), &scores)?;
    let ranking = ranking_from_wins(&wins);
    Ok(PrefRankOutput {
        scores,
        wins,
        ranking,
        solution,
    })
}

/// `c(i)`: pairs that node `i` wins according to the sign of the score.
/// A zero score counts for neither node.
pub fn win_counts(index: &PairIndex, scores: &[f64]) -> Result<Vec<usize>> {
    if scores.len() != index.len() {
        return Err(Error::DimensionMismatch {
            expected: index.len(),
            got: scores.len(),
        });
    }
    let mut wins = vec![0; index.n()];
    for ((i, j), &f) in index.iter().zip(scores) {
        if f > 0.0 {
            wins[i] += 1;
        } else if f < 0.0 {
            wins[j] += 1;
        }
    }
    Ok(wins)
}

/// Descending win count, ties to the lower node index.
pub fn ranking_from_wins(wins: &[usize]) -> Ranking {
    let mut order: Vec<usize> = (0..wins.len()).collect();
    order.sort_by(|&a, &b| wins[b].cmp(&wins[a]).then(a.cmp(&b)));
    Ranking::from_order(&order).expect("sorted indices form a permutation")
}

fn check_same_n(a: &Ranking, b: &Ranking) -> Result<()> {
    if a.n() != b.n() {
        return Err(Error::DimensionMismatch {
            expected: a.n(),
            got: b.n(),
        });
    }
    Ok(())
}

/// Number of node pairs ordered differently by the two rankings.
pub fn discordant_pairs(a: &Ranking, b: &Ranking) -> Result<u64> {
    check_same_n(a, b)?;
    let (ra, rb) = (a.ranks(), b.ranks());
    let n = a.n();
    let mut count = 0u64;
    for i in 0..n {
        for j in (i + 1)..n {
            let da = ra[i] as i64 - ra[j] as i64;
            let db = rb[i] as i64 - rb[j] as i64;
            if da * db < 0 {
                count += 1;
            }
        }
    }
    Ok(count)
}

/// `Σ_i |a(i) − b(i)|`.
pub fn total_displacement(a: &Ranking, b: &Ranking) -> Result<u64> {
    check_same_n(a, b)?;
    Ok(a.ranks()
        .iter()
        .zip(b.ranks())
        .map(|(&x, &y)| x.abs_diff(y) as u64)
        .sum())
}

/// Fraction of discordant pairs.
pub fn kendall_tau(sigma_star: &Ranking, sigma_hat: &Ranking) -> Result<f64> {
    let n = sigma_star.n();
    let d = discordant_pairs(sigma_star, sigma_hat)?;
    if n < 2 {
        return Ok(0.0);
    }
    Ok(d as f64 / (n * (n - 1) / 2) as f64)
}

/// Mean absolute rank displacement.
pub fn spearman_footrule(sigma_star: &Ranking, sigma_hat: &Ranking) -> Result<f64> {
    let n = sigma_star.n();
    let d = total_displacement(sigma_star, sigma_hat)?;
    if n == 0 {
        return Ok(0.0);
    }
    Ok(d as f64 / n as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Loss {
    /// `1[y f ≤ 0]`.
    ZeroOne,
    /// `(1 − y f)₊`.
    Hinge,
    /// `min(1, (1 − y f)₊)`.
    Ramp,
}

impl Loss {
    pub fn eval(self, y: f64, f: f64) -> f64 {
        let margin = y * f;
        match self {
            Loss::ZeroOne => f64::from(u8::from(margin <= 0.0)),
            Loss::Hinge => (1.0 - margin).max(0.0),
            Loss::Ramp => (1.0 - margin).clamp(0.0, 1.0),
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub enum Subset<'a> {
    /// The sampled pairs.
    Train(&'a PreferenceSample),
    /// Unsampled pairs with distinct preferences.
    Test(&'a PreferenceSample),
    /// Every pair; tied pairs carry `y = 0` and so cost a full unit under
    /// every loss.
    All,
    /// Pairs with distinct preferences.
    Distinct,
}

/// Mean loss over a subset of pairs.
pub fn pairwise_error(scores: &[f64], pref: &PreferenceVector, subset: Subset<'_>, loss: Loss) -> Result<f64> {
    let index = PairIndex::new(pref.n());
    if scores.len() != index.len() {
        return Err(Error::DimensionMismatch {
            expected: index.len(),
            got: scores.len(),
        });
    }
    let labels = pref.pair_labels();
    let mut total = 0.0;
    let mut count = 0usize;
    let mut add = |k: usize, y: i8| {
        total += loss.eval(f64::from(y), scores[k]);
        count += 1;
    };
    match subset {
        Subset::Train(s) => {
            for (&k, &y) in s.indices().iter().zip(s.labels()) {
                add(k, y);
            }
        }
        Subset::Test(s) => {
            let mut sampled = vec![false; index.len()];
            for &k in s.indices() {
                sampled[k] = true;
            }
            for (k, &y) in labels.iter().enumerate() {
                if !sampled[k] && y != 0 {
                    add(k, y);
                }
            }
        }
        Subset::All => {
            for (k, &y) in labels.iter().enumerate() {
                add(k, y);
            }
        }
        Subset::Distinct => {
            for (k, &y) in labels.iter().enumerate() {
                if y != 0 {
                    add(k, y);
                }
            }
        }
    }
    if count == 0 {
        return Err(Error::EmptySubset("no pairs in the requested subset".into()));
    }
    Ok(total / count as f64)
}
